#pragma once

#include <vector>
#include <cstddef>

#include "isingtri/errors.hpp"

namespace isingtri {

// Dense univariate polynomial over an arbitrary field-like scalar.
template <typename T>
struct Poly {
    std::vector<T> c; // c[i] = coefficient of x^i

    Poly() = default;
    explicit Poly(std::vector<T> coeffs) : c(std::move(coeffs)) {}

    std::size_t degree() const { return c.empty() ? 0 : c.size() - 1; }

    template <typename X>
    X eval(const X& x) const {
        X acc = X(0);
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + X(c[i]);
        return acc;
    }

    Poly derivative() const {
        Poly d;
        if (c.size() <= 1) return d;
        d.c.resize(c.size() - 1);
        for (std::size_t i = 1; i < c.size(); ++i) d.c[i - 1] = c[i] * T(double(i));
        return d;
    }

    // Taylor coefficients of p(x0 + s) in s, via iterated Horner shift.
    std::vector<T> taylor_at(const T& x0, std::size_t order) const {
        std::vector<T> work = c;
        std::vector<T> out(order + 1, T(0));
        const std::size_t n = work.size();
        for (std::size_t k = 0; k <= order && k < n; ++k) {
            // synthetic division of `work` by (x - x0); remainder = coeff of s^k
            for (std::size_t i = n - 1 - k; i-- > 0;) work[i] = work[i] + x0 * work[i + 1];
            out[k] = work[0];
            work.erase(work.begin());
        }
        return out;
    }
};

template <typename T>
Poly<T> operator*(const Poly<T>& a, const Poly<T>& b) {
    Poly<T> r;
    if (a.c.empty() || b.c.empty()) return r;
    r.c.assign(a.c.size() + b.c.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c.size(); ++i)
        for (std::size_t j = 0; j < b.c.size(); ++j)
            r.c[i + j] += a.c[i] * b.c[j];
    return r;
}

template <typename T>
Poly<T> operator+(const Poly<T>& a, const Poly<T>& b) {
    Poly<T> r;
    r.c.assign(std::max(a.c.size(), b.c.size()), T(0));
    for (std::size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
    for (std::size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
    return r;
}

// Rational function num/den with local Taylor expansion support.
template <typename T>
struct RationalFn {
    Poly<T> num, den;

    template <typename X>
    X eval(const X& x) const {
        X d = den.eval(x);
        return num.eval(x) / d;
    }

    // Taylor coefficients of (num/den)(x0 + s) through s^order.
    // Requires den(x0) != 0.
    std::vector<T> taylor_at(const T& x0, std::size_t order) const {
        std::vector<T> n = num.taylor_at(x0, order);
        std::vector<T> d = den.taylor_at(x0, order);
        std::vector<T> q(order + 1, T(0));
        // formal series division q = n/d
        for (std::size_t k = 0; k <= order; ++k) {
            T acc = n[k];
            for (std::size_t j = 1; j <= k; ++j) acc -= d[j] * q[k - j];
            q[k] = acc / d[0];
        }
        return q;
    }
};

} // namespace isingtri
