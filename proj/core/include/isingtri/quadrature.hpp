#pragma once

#include <cmath>
#include <cstddef>

#include "isingtri/errors.hpp"

namespace isingtri {

// Adaptive Simpson with Richardson correction. Good to ~1e-13 relative in
// long double for the smooth integrands used here.
template <typename T, typename F>
T adaptive_simpson_rec(const F& f, T a, T b, T fa, T fm, T fb, T whole, T tol, int depth) {
    T m = (a + b) / 2;
    T lm = (a + m) / 2, rm = (m + b) / 2;
    T flm = f(lm), frm = f(rm);
    T left = (m - a) / 6 * (fa + 4 * flm + fm);
    T right = (b - m) / 6 * (fm + 4 * frm + fb);
    T delta = left + right - whole;
    using std::fabs;
    if (depth <= 0) throw precision_error("quadrature recursion depth exhausted");
    if (fabs((double)delta) <= 15 * (double)tol)
        return left + right + delta / 15;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

template <typename T, typename F>
T integrate(const F& f, T a, T b, T tol, int depth = 60) {
    T fa = f(a), fb = f(b), m = (a + b) / 2, fm = f(m);
    T whole = (b - a) / 6 * (fa + 4 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Integral over [0, infinity) via r = s/(1-s).
template <typename T, typename F>
T integrate_halfline(const F& f, T tol, int depth = 60) {
    auto g = [&](T s) {
        T om = 1 - s;
        if (om <= 0) return T(0);
        T r = s / om;
        return f(r) / (om * om);
    };
    return integrate<T>(g, T(0), T(1), tol, depth);
}

} // namespace isingtri
