#pragma once

#include <vector>
#include <cstddef>
#include <algorithm>

#include "isingtri/errors.hpp"
#include "isingtri/poly.hpp"

namespace isingtri {

// Formal power series helpers over an arbitrary scalar. Series are plain
// vectors, index = power of x, always truncated to an explicit order.

namespace fps_detail {

template <typename T>
void mul_naive(const T* a, std::size_t na, const T* b, std::size_t nb, T* out) {
    for (std::size_t i = 0; i < na + nb - 1; ++i) out[i] = T(0);
    for (std::size_t i = 0; i < na; ++i) {
        T ai = a[i];
        for (std::size_t j = 0; j < nb; ++j) out[i + j] += ai * b[j];
    }
}

constexpr std::size_t kKaratsubaCutoff = 48;

// out must hold na+nb-1 entries; scratch at least 4*(max(na,nb)) entries.
template <typename T>
void mul_rec(const T* a, std::size_t na, const T* b, std::size_t nb, T* out, T* scratch) {
    if (na == 0 || nb == 0) return;
    if (na < nb) { mul_rec(b, nb, a, na, out, scratch); return; }
    if (nb <= kKaratsubaCutoff) { mul_naive(a, na, b, nb, out); return; }

    const std::size_t h = (na + 1) / 2;
    if (nb <= h) {
        // unbalanced: split a only
        for (std::size_t i = 0; i < na + nb - 1; ++i) out[i] = T(0);
        std::vector<T> tmp(h + nb - 1);
        mul_rec(a, h, b, nb, tmp.data(), scratch);
        for (std::size_t i = 0; i < h + nb - 1; ++i) out[i] += tmp[i];
        tmp.assign(na - h + nb - 1, T(0));
        mul_rec(a + h, na - h, b, nb, tmp.data(), scratch);
        for (std::size_t i = 0; i < na - h + nb - 1; ++i) out[h + i] += tmp[i];
        return;
    }

    // Karatsuba: a = a0 + x^h a1, b = b0 + x^h b1
    const std::size_t na1 = na - h, nb1 = nb - h;
    std::vector<T> asum(h), bsum(h);
    for (std::size_t i = 0; i < h; ++i) asum[i] = a[i];
    for (std::size_t i = 0; i < na1; ++i) asum[i] += a[h + i];
    for (std::size_t i = 0; i < h; ++i) bsum[i] = b[i];
    for (std::size_t i = 0; i < nb1; ++i) bsum[i] += b[h + i];

    std::vector<T> z0(2 * h - 1), z2(na1 + nb1 - 1), z1(2 * h - 1);
    mul_rec(a, h, b, h, z0.data(), scratch);
    mul_rec(a + h, na1, b + h, nb1, z2.data(), scratch);
    mul_rec(asum.data(), h, bsum.data(), h, z1.data(), scratch);

    for (std::size_t i = 0; i < na + nb - 1; ++i) out[i] = T(0);
    for (std::size_t i = 0; i < z0.size(); ++i) { out[i] += z0[i]; z1[i] -= z0[i]; }
    for (std::size_t i = 0; i < z2.size(); ++i) { out[2 * h + i] += z2[i]; z1[i] -= z2[i]; }
    for (std::size_t i = 0; i < z1.size(); ++i) out[h + i] += z1[i];
}

} // namespace fps_detail

// c = a*b truncated to `order`+1 coefficients.
template <typename T>
std::vector<T> fps_mul(const std::vector<T>& a, const std::vector<T>& b, std::size_t order) {
    std::vector<T> out(order + 1, T(0));
    if (a.empty() || b.empty()) return out;
    std::size_t na = std::min(a.size(), order + 1);
    std::size_t nb = std::min(b.size(), order + 1);
    std::vector<T> full(na + nb - 1, T(0));
    fps_detail::mul_rec(a.data(), na, b.data(), nb, full.data(), (T*)nullptr);
    std::size_t n = std::min(full.size(), order + 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = full[i];
    return out;
}

// Reciprocal series: b with a*b = 1 + O(x^{order+1}). Requires a[0] != 0.
template <typename T>
std::vector<T> fps_inv(const std::vector<T>& a, std::size_t order) {
    if (a.empty()) throw precision_error("fps_inv of empty series");
    std::vector<T> b{T(1) / a[0]};
    std::size_t m = 1;
    while (m <= order) {
        m = std::min(2 * m, order + 1);
        // b <- b*(2 - a*b) to order m-1
        std::vector<T> ab = fps_mul(a, b, m - 1);
        for (auto& v : ab) v = -v;
        ab[0] += T(2);
        b = fps_mul(b, ab, m - 1);
    }
    b.resize(order + 1, T(0));
    return b;
}

template <typename T>
std::vector<T> fps_div(const std::vector<T>& a, const std::vector<T>& b, std::size_t order) {
    return fps_mul(a, fps_inv(b, order), order);
}

// Evaluate a polynomial at a power series argument (Horner), truncated.
template <typename T>
std::vector<T> fps_compose_poly(const Poly<T>& p, const std::vector<T>& h, std::size_t order) {
    std::vector<T> acc(1, T(0));
    for (std::size_t i = p.c.size(); i-- > 0;) {
        acc = fps_mul(acc, h, order);
        if (acc.empty()) acc.assign(1, T(0));
        acc.resize(std::max<std::size_t>(acc.size(), 1), T(0));
        acc[0] += p.c[i];
    }
    acc.resize(order + 1, T(0));
    return acc;
}

// Compose a rational function num/den with a series h (h[0] must avoid
// den's zeros; requires den(h[0]) != 0).
template <typename T>
std::vector<T> fps_compose_rational(const RationalFn<T>& f, const std::vector<T>& h,
                                    std::size_t order) {
    std::vector<T> n = fps_compose_poly(f.num, h, order);
    std::vector<T> d = fps_compose_poly(f.den, h, order);
    return fps_div(n, d, order);
}

// Solve pre*H*(q2 H^2 + q1 H + q0)/(H - pp) = uc * x for the series H(x),
// H(0) = 0, by Newton iteration on the equivalent cubic
//   F(H) = pre*q2 H^3 + pre*q1 H^2 + (pre*q0 - uc x) H + uc*pp*x = 0.
// This is the shape shared by both rational parametrizations of u.
template <typename T>
std::vector<T> invert_u_parametrization(const T& pre, const T& q2, const T& q1, const T& q0,
                                        const T& pp, const T& uc, std::size_t order) {
    const T c3 = pre * q2, c2 = pre * q1, c1 = pre * q0;
    std::vector<T> h(2, T(0));
    h[1] = -(uc * pp) / c1; // linear term from F's order-1 coefficients
    std::size_t m = 1;
    while (m < order) {
        m = std::min(2 * m + 1, order);
        h.resize(m + 1, T(0));
        std::vector<T> h2 = fps_mul(h, h, m);
        std::vector<T> h3 = fps_mul(h2, h, m);
        // F = c3 h3 + c2 h2 + c1 h - uc*x*h + uc*pp*x
        std::vector<T> F(m + 1, T(0));
        for (std::size_t i = 0; i <= m; ++i) F[i] = c3 * h3[i] + c2 * h2[i] + c1 * h[i];
        for (std::size_t i = 1; i <= m; ++i) F[i] -= uc * h[i - 1];
        F[1] += uc * pp;
        // F' = 3 c3 h2 + 2 c2 h + c1 - uc*x
        std::vector<T> Fp(m + 1, T(0));
        for (std::size_t i = 0; i <= m; ++i) Fp[i] = T(3) * c3 * h2[i] + T(2) * c2 * h[i];
        Fp[0] += c1;
        Fp[1] -= uc;
        std::vector<T> corr = fps_div(F, Fp, m);
        for (std::size_t i = 0; i <= m; ++i) h[i] -= corr[i];
    }
    h.resize(order + 1, T(0));
    return h;
}

} // namespace isingtri
