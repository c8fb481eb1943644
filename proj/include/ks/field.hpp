#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace ks {

inline constexpr int kMaxDim = 8;

/// Uniform periodic grid: the torus [0, L)^dim with N points per axis.
/// A computational proxy for R^dim; fields of interest must stay
/// concentrated away from the wrap seam (see edge_mass_fraction).
struct GridSpec {
    int dim = 3;
    int n_per_axis = 64;
    double box_length = 20.0;

    GridSpec() = default;
    GridSpec(int dim_, int n_per_axis_, double box_length_);

    double dx() const { return box_length / n_per_axis; }
    double cell_volume() const;
    std::size_t size() const;
    /// Coordinate of lattice point j along one axis.
    double coord(int j) const { return j * dx(); }

    bool operator==(const GridSpec&) const = default;
};

/// Real scalar field sampled on a GridSpec, row-major (last axis fastest).
struct ScalarField {
    GridSpec grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& g, double fill = 0.0)
        : grid(g), values(g.size(), fill) {}
    ScalarField(const GridSpec& g, std::vector<double> v);

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);

/// Fills from a function of the point coordinates.
ScalarField make_field(const GridSpec& g,
                       const std::function<double(const double* x)>& f);

/// Lattice-quadrature L^p norm; p = infinity gives max |v|. Requires p >= 1.
double lp_norm(const ScalarField& f, double p);

/// Total integral: sum of values times cell volume.
double mass(const ScalarField& f);

double min_value(const ScalarField& f);
double max_value(const ScalarField& f);
double max_abs(const ScalarField& f);

/// Fraction of |f|-mass lying within 10% of the box edge along any axis.
double edge_mass_fraction(const ScalarField& f);

// ---------------------------------------------------------------------------
// Spectral calculus. Derivative multipliers zero the Nyquist frequency so
// that first derivatives of real fields stay real and divergence(gradient)
// equals laplacian identically.

std::vector<std::complex<double>> spectrum(const ScalarField& f);
ScalarField field_from_spectrum(const GridSpec& g,
                                std::vector<std::complex<double>> spec);

/// Signed integer frequency of DFT index j (0..N-1).
int signed_freq(int j, int n);
/// 2*pi*f/L with the Nyquist mode zeroed (first-derivative convention).
double deriv_wavenumber(int j, int n, double box_length);

/// Per-mode |k|^2 table (flat spectral index -> value), derivative-consistent.
const std::vector<double>& k2_table(const GridSpec& g);

/// Applies a real isotropic spectral multiplier m(|k|^2).
ScalarField apply_k2_multiplier(const ScalarField& f,
                                const std::function<double(double)>& m);

std::vector<ScalarField> gradient(const ScalarField& f);
ScalarField laplacian(const ScalarField& f);
ScalarField divergence(const std::vector<ScalarField>& v);

// Second-order centered finite-difference fallbacks for cross-checks.
std::vector<ScalarField> gradient_fd(const ScalarField& f);
ScalarField laplacian_fd(const ScalarField& f);

// ---------------------------------------------------------------------------
// Mollifiers and convolution.

struct Mollifier {
    enum class Kind { gaussian, bump };
    double width = 0.0;  // 0 means "2*dx of the target grid"
    Kind kind = Kind::gaussian;
};

/// Periodized kernel centered at the origin, discretely normalized so its
/// mass is exactly 1.
ScalarField mollifier_kernel(const GridSpec& g, const Mollifier& m);

/// Fast circular convolution with a unit-mass kernel field. Caches the
/// kernel spectrum; one instance per kernel, reusable across calls.
class ConvolutionKernel {
public:
    ConvolutionKernel() = default;
    explicit ConvolutionKernel(const ScalarField& kernel);
    const GridSpec& grid() const { return grid_; }
    const std::vector<std::complex<double>>& hat() const { return hat_; }
    ScalarField apply(const ScalarField& f) const;

private:
    GridSpec grid_;
    std::vector<std::complex<double>> hat_;
};

/// Convolution against a mollifier. Preserves mass to round-off and clips
/// FFT ringing so nonnegative inputs stay nonnegative.
ScalarField convolve(const ScalarField& f, const Mollifier& m);

// ---------------------------------------------------------------------------
// KSF1 binary field files: magic "KSF1", u32 dim, u32 N per axis (dim
// entries, all equal), f64 L, then N^dim f64 values row-major, little-endian.

void write_ksf(const std::string& path, const ScalarField& f);
ScalarField read_ksf(const std::string& path);

// Flat-index geometry helpers shared by the finite-volume solver.
struct GridIndexer {
    int dim = 0;
    int n = 0;
    std::array<std::size_t, kMaxDim> stride{};  // stride of each axis

    explicit GridIndexer(const GridSpec& g);
    /// Index of the +1 neighbor along `axis` (periodic wrap).
    std::size_t up(std::size_t i, int axis) const {
        const std::size_t s = stride[axis];
        const std::size_t c = (i / s) % static_cast<std::size_t>(n);
        return c + 1 < static_cast<std::size_t>(n) ? i + s
                                                   : i - s * (n - 1);
    }
    std::size_t down(std::size_t i, int axis) const {
        const std::size_t s = stride[axis];
        const std::size_t c = (i / s) % static_cast<std::size_t>(n);
        return c > 0 ? i - s : i + s * (n - 1);
    }
};

}  // namespace ks
