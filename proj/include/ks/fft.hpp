#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace ks::fft {

using cplx = std::complex<double>;

/// Mixed-radix Cooley-Tukey plan for 1-D transforms of a fixed length.
/// Any length is accepted; prime factors are handled by a direct DFT of
/// that radix, so keep lengths 2^a 3^b 5^c for speed.
class Plan {
public:
    explicit Plan(std::size_t n);

    std::size_t size() const { return n_; }
    std::size_t scratch_size() const { return n_ + max_factor_; }

    /// In-place transform of one line. `scratch` must hold scratch_size()
    /// elements. Forward is unnormalized; inverse scales by 1/n.
    void execute(cplx* line, cplx* scratch, bool inverse) const;

private:
    void recurse(const cplx* in, std::size_t in_stride, cplx* out,
                 std::size_t n, std::size_t tw_step, bool inverse,
                 cplx* fbuf) const;

    std::size_t n_;
    std::size_t max_factor_;
    std::vector<cplx> tw_;  // exp(-2*pi*i*j/n)
};

/// Forward/inverse transform along every axis of a row-major dim-cube with
/// `n_per_axis` points per axis. data.size() must equal n_per_axis^dim.
void forward_nd(std::vector<cplx>& data, int dim, std::size_t n_per_axis);
void inverse_nd(std::vector<cplx>& data, int dim, std::size_t n_per_axis);

}  // namespace ks::fft
