#include "ks/fft.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "ks/parallel.hpp"

namespace ks::fft {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559005768;

std::size_t smallest_factor(std::size_t n) {
    if (n % 2 == 0) return 2;
    for (std::size_t f = 3; f * f <= n; f += 2)
        if (n % f == 0) return f;
    return n;
}

}  // namespace

Plan::Plan(std::size_t n) : n_(n), max_factor_(1) {
    if (n == 0) throw std::invalid_argument("fft::Plan: zero length");
    tw_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double ang = -kTwoPi * static_cast<double>(j) / static_cast<double>(n);
        tw_[j] = cplx(std::cos(ang), std::sin(ang));
    }
    std::size_t rem = n;
    while (rem > 1) {
        const std::size_t p = smallest_factor(rem);
        max_factor_ = std::max(max_factor_, p);
        rem /= p;
    }
}

void Plan::recurse(const cplx* in, std::size_t in_stride, cplx* out,
                   std::size_t n, std::size_t tw_step, bool inverse,
                   cplx* fbuf) const {
    if (n == 1) {
        out[0] = in[0];
        return;
    }
    const std::size_t p = smallest_factor(n);
    const std::size_t m = n / p;
    for (std::size_t r = 0; r < p; ++r)
        recurse(in + r * in_stride, in_stride * p, out + r * m, m, tw_step * p,
                inverse, fbuf);

    auto tw_at = [&](std::size_t idx) -> cplx {
        const cplx w = tw_[idx % n_];
        return inverse ? std::conj(w) : w;
    };

    if (p == 2) {
        for (std::size_t k = 0; k < m; ++k) {
            const cplx a = out[k];
            const cplx b = out[m + k] * tw_at(k * tw_step);
            out[k] = a + b;
            out[m + k] = a - b;
        }
        return;
    }
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t r = 0; r < p; ++r)
            fbuf[r] = out[r * m + k] * tw_at(r * k * tw_step);
        for (std::size_t s = 0; s < p; ++s) {
            cplx acc = fbuf[0];
            for (std::size_t r = 1; r < p; ++r)
                acc += fbuf[r] * tw_at(r * s * m * tw_step);
            out[s * m + k] = acc;
        }
    }
}

void Plan::execute(cplx* line, cplx* scratch, bool inverse) const {
    std::memcpy(scratch, line, n_ * sizeof(cplx));
    recurse(scratch, 1, line, n_, 1, inverse, scratch + n_);
    if (inverse) {
        const double s = 1.0 / static_cast<double>(n_);
        for (std::size_t j = 0; j < n_; ++j) line[j] *= s;
    }
}

namespace {

const Plan& cached_plan(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, std::unique_ptr<Plan>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Plan>(n);
    return *slot;
}

void transform_nd(std::vector<cplx>& data, int dim, std::size_t n, bool inverse) {
    if (dim < 1) throw std::invalid_argument("fft: dim must be >= 1");
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= n;
    if (data.size() != total) throw std::invalid_argument("fft: size mismatch");
    const Plan& plan = cached_plan(n);

    // Axis `a` has stride n^(dim-1-a) in row-major order.
    std::size_t stride = total / n;
    for (int a = 0; a < dim; ++a) {
        const std::size_t lines = total / n;
        cplx* base_ptr = data.data();
        parallel_chunks(0, lines, [&, stride](std::size_t lo, std::size_t hi) {
            std::vector<cplx> line(n);
            std::vector<cplx> scratch(plan.scratch_size());
            for (std::size_t l = lo; l < hi; ++l) {
                const std::size_t outer = l / stride;
                const std::size_t inner = l % stride;
                cplx* base = base_ptr + outer * (n * stride) + inner;
                if (stride == 1) {
                    plan.execute(base, scratch.data(), inverse);
                } else {
                    for (std::size_t j = 0; j < n; ++j) line[j] = base[j * stride];
                    plan.execute(line.data(), scratch.data(), inverse);
                    for (std::size_t j = 0; j < n; ++j) base[j * stride] = line[j];
                }
            }
        });
        stride /= n;
    }
}

}  // namespace

void forward_nd(std::vector<cplx>& data, int dim, std::size_t n_per_axis) {
    transform_nd(data, dim, n_per_axis, false);
}

void inverse_nd(std::vector<cplx>& data, int dim, std::size_t n_per_axis) {
    transform_nd(data, dim, n_per_axis, true);
}

}  // namespace ks::fft
