#include "ks/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "ks/fft.hpp"
#include "ks/parallel.hpp"

static_assert(std::endian::native == std::endian::little,
              "KSF1 i/o assumes a little-endian host");

namespace ks {

namespace {

using cplx = std::complex<double>;

// Compensated accumulation keeps lattice sums deterministic and accurate
// enough for the 1e-10 conservation checks.
struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

void decompose(std::size_t idx, int dim, int n, int* out) {
    for (int a = dim - 1; a >= 0; --a) {
        out[a] = static_cast<int>(idx % n);
        idx /= n;
    }
}

}  // namespace

GridSpec::GridSpec(int dim_, int n_per_axis_, double box_length_)
    : dim(dim_), n_per_axis(n_per_axis_), box_length(box_length_) {
    if (dim < 1 || dim > kMaxDim)
        throw std::invalid_argument("GridSpec: dim out of range");
    if (n_per_axis < 8)
        throw std::invalid_argument("GridSpec: need at least 8 points per axis");
    if (!(box_length > 0.0) || !std::isfinite(box_length))
        throw std::invalid_argument("GridSpec: box length must be positive");
    double total = 1.0;
    for (int a = 0; a < dim; ++a) total *= n_per_axis;
    if (total > 2147483648.0)
        throw std::invalid_argument("GridSpec: more than 2^31 lattice points");
}

double GridSpec::cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= dx();
    return v;
}

std::size_t GridSpec::size() const {
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n_per_axis);
    return total;
}

ScalarField::ScalarField(const GridSpec& g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
    if (values.size() != grid.size())
        throw std::invalid_argument("ScalarField: value count != grid size");
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("field +: grid mismatch");
    ScalarField out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
    return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("field -: grid mismatch");
    ScalarField out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= b.values[i];
    return out;
}

ScalarField operator*(double s, const ScalarField& a) {
    ScalarField out = a;
    for (double& v : out.values) v *= s;
    return out;
}

ScalarField make_field(const GridSpec& g,
                       const std::function<double(const double* x)>& f) {
    ScalarField out(g);
    const std::size_t total = g.size();
    const double dx = g.dx();
    parallel_for(0, total, [&](std::size_t i) {
        int j[kMaxDim];
        double x[kMaxDim];
        decompose(i, g.dim, g.n_per_axis, j);
        for (int a = 0; a < g.dim; ++a) x[a] = j[a] * dx;
        out.values[i] = f(x);
    });
    return out;
}

double lp_norm(const ScalarField& f, double p) {
    if (std::isinf(p)) return max_abs(f);
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: requires p >= 1");
    KahanSum sum;
    if (p == 2.0) {
        for (double v : f.values) sum.add(v * v);
    } else if (p == 1.0) {
        for (double v : f.values) sum.add(std::abs(v));
    } else {
        for (double v : f.values) sum.add(std::pow(std::abs(v), p));
    }
    return std::pow(sum.value() * f.grid.cell_volume(), 1.0 / p);
}

double mass(const ScalarField& f) {
    KahanSum sum;
    for (double v : f.values) sum.add(v);
    return sum.value() * f.grid.cell_volume();
}

double min_value(const ScalarField& f) {
    double m = f.values.empty() ? 0.0 : f.values[0];
    for (double v : f.values) m = std::min(m, v);
    return m;
}

double max_value(const ScalarField& f) {
    double m = f.values.empty() ? 0.0 : f.values[0];
    for (double v : f.values) m = std::max(m, v);
    return m;
}

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

double edge_mass_fraction(const ScalarField& f) {
    const GridSpec& g = f.grid;
    const double lo = 0.1 * g.box_length;
    const double hi = 0.9 * g.box_length;
    KahanSum band, total;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        int j[kMaxDim];
        decompose(i, g.dim, g.n_per_axis, j);
        bool near_edge = false;
        for (int a = 0; a < g.dim; ++a) {
            const double x = g.coord(j[a]);
            if (x < lo || x >= hi) {
                near_edge = true;
                break;
            }
        }
        const double v = std::abs(f.values[i]);
        total.add(v);
        if (near_edge) band.add(v);
    }
    return total.value() > 0.0 ? band.value() / total.value() : 0.0;
}

// ---------------------------------------------------------------------------
// Spectral machinery.

int signed_freq(int j, int n) { return 2 * j <= n ? j : j - n; }

double deriv_wavenumber(int j, int n, double box_length) {
    if (n % 2 == 0 && j == n / 2) return 0.0;  // Nyquist carries no derivative
    constexpr double kTwoPi = 6.283185307179586476925286766559005768;
    return kTwoPi * signed_freq(j, n) / box_length;
}

std::vector<cplx> spectrum(const ScalarField& f) {
    std::vector<cplx> spec(f.values.size());
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] = f.values[i];
    fft::forward_nd(spec, f.grid.dim, f.grid.n_per_axis);
    return spec;
}

ScalarField field_from_spectrum(const GridSpec& g, std::vector<cplx> spec) {
    fft::inverse_nd(spec, g.dim, g.n_per_axis);
    ScalarField out(g);
    for (std::size_t i = 0; i < spec.size(); ++i) out.values[i] = spec[i].real();
    return out;
}

const std::vector<double>& k2_table(const GridSpec& g) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, double>, std::unique_ptr<std::vector<double>>>
        cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{g.dim, g.n_per_axis, g.box_length}];
    if (!slot) {
        auto table = std::make_unique<std::vector<double>>(g.size());
        const int n = g.n_per_axis;
        for (std::size_t i = 0; i < table->size(); ++i) {
            int j[kMaxDim];
            decompose(i, g.dim, n, j);
            double k2 = 0.0;
            for (int a = 0; a < g.dim; ++a) {
                const double k = deriv_wavenumber(j[a], n, g.box_length);
                k2 += k * k;
            }
            (*table)[i] = k2;
        }
        slot = std::move(table);
    }
    return *slot;
}

ScalarField apply_k2_multiplier(const ScalarField& f,
                                const std::function<double(double)>& m) {
    const auto& k2 = k2_table(f.grid);
    auto spec = spectrum(f);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= m(k2[i]);
    return field_from_spectrum(f.grid, std::move(spec));
}

std::vector<ScalarField> gradient(const ScalarField& f) {
    const GridSpec& g = f.grid;
    const auto spec = spectrum(f);
    std::vector<ScalarField> out;
    out.reserve(g.dim);
    for (int a = 0; a < g.dim; ++a) {
        std::vector<cplx> da(spec.size());
        for (std::size_t i = 0; i < spec.size(); ++i) {
            int j[kMaxDim];
            decompose(i, g.dim, g.n_per_axis, j);
            const double k = deriv_wavenumber(j[a], g.n_per_axis, g.box_length);
            da[i] = spec[i] * cplx(0.0, k);
        }
        out.push_back(field_from_spectrum(g, std::move(da)));
    }
    return out;
}

ScalarField laplacian(const ScalarField& f) {
    return apply_k2_multiplier(f, [](double k2) { return -k2; });
}

ScalarField divergence(const std::vector<ScalarField>& v) {
    if (v.empty()) throw std::invalid_argument("divergence: empty vector field");
    const GridSpec& g = v[0].grid;
    if (static_cast<int>(v.size()) != g.dim)
        throw std::invalid_argument("divergence: component count != dim");
    std::vector<cplx> acc(g.size(), cplx(0.0, 0.0));
    for (int a = 0; a < g.dim; ++a) {
        if (!(v[a].grid == g)) throw std::invalid_argument("divergence: grid mismatch");
        auto spec = spectrum(v[a]);
        for (std::size_t i = 0; i < spec.size(); ++i) {
            int j[kMaxDim];
            decompose(i, g.dim, g.n_per_axis, j);
            const double k = deriv_wavenumber(j[a], g.n_per_axis, g.box_length);
            acc[i] += spec[i] * cplx(0.0, k);
        }
    }
    return field_from_spectrum(g, std::move(acc));
}

std::vector<ScalarField> gradient_fd(const ScalarField& f) {
    const GridIndexer ix(f.grid);
    const double inv2dx = 1.0 / (2.0 * f.grid.dx());
    std::vector<ScalarField> out(f.grid.dim, ScalarField(f.grid));
    for (int a = 0; a < f.grid.dim; ++a) {
        auto& da = out[a].values;
        parallel_for(0, f.values.size(), [&](std::size_t i) {
            da[i] = (f.values[ix.up(i, a)] - f.values[ix.down(i, a)]) * inv2dx;
        });
    }
    return out;
}

ScalarField laplacian_fd(const ScalarField& f) {
    const GridIndexer ix(f.grid);
    const double invdx2 = 1.0 / (f.grid.dx() * f.grid.dx());
    ScalarField out(f.grid);
    parallel_for(0, f.values.size(), [&](std::size_t i) {
        double acc = 0.0;
        for (int a = 0; a < f.grid.dim; ++a)
            acc += f.values[ix.up(i, a)] - 2.0 * f.values[i] + f.values[ix.down(i, a)];
        out.values[i] = acc * invdx2;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Mollifiers.

ScalarField mollifier_kernel(const GridSpec& g, const Mollifier& m) {
    const double w = m.width > 0.0 ? m.width : 2.0 * g.dx();
    ScalarField kernel(g);
    const double L = g.box_length;
    for (std::size_t i = 0; i < kernel.values.size(); ++i) {
        int j[kMaxDim];
        decompose(i, g.dim, g.n_per_axis, j);
        double d2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            const double x = g.coord(j[a]);
            const double d = std::min(x, L - x);  // distance to origin on the torus
            d2 += d * d;
        }
        if (m.kind == Mollifier::Kind::gaussian) {
            kernel.values[i] = std::exp(-d2 / (2.0 * w * w));
        } else {
            const double t = d2 / (w * w);
            kernel.values[i] = t < 1.0 ? std::exp(-1.0 / (1.0 - t)) : 0.0;
        }
    }
    const double total = mass(kernel);
    if (!(total > 0.0)) throw std::runtime_error("mollifier_kernel: zero mass");
    for (double& v : kernel.values) v /= total;
    return kernel;
}

ConvolutionKernel::ConvolutionKernel(const ScalarField& kernel)
    : grid_(kernel.grid) {
    hat_ = spectrum(kernel);
    const double vol = grid_.cell_volume();
    for (auto& h : hat_) h *= vol;
}

ScalarField ConvolutionKernel::apply(const ScalarField& f) const {
    if (!(f.grid == grid_))
        throw std::invalid_argument("ConvolutionKernel: grid mismatch");
    const double in_min = min_value(f);
    auto spec = spectrum(f);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= hat_[i];
    ScalarField out = field_from_spectrum(grid_, std::move(spec));
    if (in_min >= 0.0) {
        // clip FFT ringing so a nonnegative kernel keeps nonnegative data
        const double floor = -1e-13 * std::max(1.0, max_abs(out));
        for (double& v : out.values)
            if (v < 0.0 && v > floor) v = 0.0;
    }
    return out;
}

ScalarField convolve(const ScalarField& f, const Mollifier& m) {
    return ConvolutionKernel(mollifier_kernel(f.grid, m)).apply(f);
}

// ---------------------------------------------------------------------------
// KSF1 i/o.

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_f64(std::ostream& os, double v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

}  // namespace

void write_ksf(const std::string& path, const ScalarField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_ksf: cannot open " + path);
    os.write("KSF1", 4);
    put_u32(os, static_cast<std::uint32_t>(f.grid.dim));
    for (int a = 0; a < f.grid.dim; ++a)
        put_u32(os, static_cast<std::uint32_t>(f.grid.n_per_axis));
    put_f64(os, f.grid.box_length);
    os.write(reinterpret_cast<const char*>(f.values.data()),
             static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!os) throw std::runtime_error("write_ksf: write failed on " + path);
}

ScalarField read_ksf(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_ksf: cannot open " + path);
    char magic[4] = {};
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "KSF1", 4) != 0)
        throw std::runtime_error("read_ksf: bad header field 'magic'");
    std::uint32_t dim = 0;
    is.read(reinterpret_cast<char*>(&dim), sizeof dim);
    if (!is || dim < 1 || dim > static_cast<std::uint32_t>(kMaxDim))
        throw std::runtime_error("read_ksf: bad header field 'dim'");
    std::uint32_t n0 = 0;
    for (std::uint32_t a = 0; a < dim; ++a) {
        std::uint32_t n = 0;
        is.read(reinterpret_cast<char*>(&n), sizeof n);
        if (!is || n < 8 || (a > 0 && n != n0))
            throw std::runtime_error("read_ksf: bad header field 'n_per_axis'");
        if (a == 0) n0 = n;
    }
    double box = 0.0;
    is.read(reinterpret_cast<char*>(&box), sizeof box);
    if (!is || !(box > 0.0) || !std::isfinite(box))
        throw std::runtime_error("read_ksf: bad header field 'box_length'");
    GridSpec g(static_cast<int>(dim), static_cast<int>(n0), box);
    std::vector<double> values(g.size());
    is.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!is || static_cast<std::size_t>(is.gcount()) != values.size() * sizeof(double))
        throw std::runtime_error("read_ksf: bad payload 'values'");
    return ScalarField(g, std::move(values));
}

GridIndexer::GridIndexer(const GridSpec& g) : dim(g.dim), n(g.n_per_axis) {
    std::size_t s = 1;
    for (int a = dim - 1; a >= 0; --a) {
        stride[a] = s;
        s *= static_cast<std::size_t>(n);
    }
}

}  // namespace ks
