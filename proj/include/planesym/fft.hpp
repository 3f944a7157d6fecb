#pragma once

// Radix-2 complex FFT, in place, unnormalized.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "planesym/error.hpp"

namespace planesym::fft {

using cplx = std::complex<double>;

/// Precomputed twiddles for one length and sign.
class Plan {
public:
    Plan(std::size_t n, int sign) : n_(n), w_(n / 2) {
        if (n == 0 || (n & (n - 1)) != 0) throw InvalidArgumentError("FFT length must be a power of two");
        for (std::size_t t = 0; t < n / 2; ++t) {
            const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(n);
            w_[t] = {std::cos(ang), std::sin(ang)};
        }
    }

    std::size_t size() const { return n_; }

    /// out[m] = sum_x in[x] * exp(sign * 2 pi i x m / N).
    void execute(std::span<cplx> a) const {
        if (a.size() != n_) throw InvalidArgumentError("FFT buffer does not match plan length");
        const std::size_t n = n_;
        for (std::size_t i = 1, j = 0; i < n; ++i) {
            std::size_t bit = n >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j ^= bit;
            if (i < j) std::swap(a[i], a[j]);
        }
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const std::size_t half = len / 2;
            const std::size_t stride = n / len;
            for (std::size_t i = 0; i < n; i += len) {
                for (std::size_t t = 0; t < half; ++t) {
                    const cplx u = a[i + t];
                    const cplx v = a[i + t + half] * w_[t * stride];
                    a[i + t] = u + v;
                    a[i + t + half] = u - v;
                }
            }
        }
    }

private:
    std::size_t n_;
    std::vector<cplx> w_;
};

inline void transform(std::span<cplx> a, int sign) { Plan(a.size(), sign).execute(a); }

/// Row-major n x n 2D transform.
inline void transform2d(std::vector<cplx>& a, std::size_t n, int sign) {
    if (a.size() != n * n) throw InvalidArgumentError("2D FFT buffer size mismatch");
    const Plan plan(n, sign);
    for (std::size_t r = 0; r < n; ++r) plan.execute(std::span<cplx>(a.data() + r * n, n));
    std::vector<cplx> col(n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = 0; r < n; ++r) col[r] = a[r * n + c];
        plan.execute(col);
        for (std::size_t r = 0; r < n; ++r) a[r * n + c] = col[r];
    }
}

}  // namespace planesym::fft
