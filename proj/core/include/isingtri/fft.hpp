#pragma once

#include <cstddef>
#include <vector>

#include "isingtri/dd.hpp"
#include "isingtri/errors.hpp"

namespace isingtri {

// Radix-2 FFT over double-double complex values. Twiddles are generated by
// repeated multiplication from a Taylor-expanded primitive root, keeping the
// full dd accuracy; sizes stay small (<= 2^14) so the drift is negligible.

namespace fft_detail {

inline dd dd_two_pi() { return dd(6.283185307179586232e0, 2.4492935982947063545e-16); }

inline dd dd_sin_small(dd x) {
    dd term = x, sum = x;
    dd x2 = x * x;
    for (int k = 1; k < 14; ++k) {
        term = term * x2 / dd((2.0 * k) * (2.0 * k + 1.0));
        term = -term;
        sum += term;
        if (std::abs(to_double(term)) < 1e-36) break;
    }
    return sum;
}

inline dd dd_cos_small(dd x) {
    dd term(1.0), sum(1.0);
    dd x2 = x * x;
    for (int k = 1; k < 14; ++k) {
        term = term * x2 / dd((2.0 * k - 1.0) * (2.0 * k));
        term = -term;
        sum += term;
        if (std::abs(to_double(term)) < 1e-36) break;
    }
    return sum;
}

} // namespace fft_detail

// twiddles[k] = exp(-2 pi i k / n) for k < n/2
inline std::vector<cdd> fft_twiddles(std::size_t n) {
    using namespace fft_detail;
    dd theta = dd_two_pi() / dd((double)n);
    cdd w0(dd_cos_small(theta), -dd_sin_small(theta));
    std::vector<cdd> tw(n / 2);
    tw[0] = cdd(dd(1.0), dd(0.0));
    for (std::size_t k = 1; k < n / 2; ++k) tw[k] = tw[k - 1] * w0;
    return tw;
}

// in-place forward DFT: out[k] = sum_j in[j] exp(-2 pi i jk / n)
inline void fft_cdd(std::vector<cdd>& a, const std::vector<cdd>& tw) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1))) throw domain_error("fft size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                cdd u = a[i + k];
                cdd v = a[i + k + len / 2] * tw[k * step];
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

} // namespace isingtri
