#pragma once

#include <vector>
#include <string>

#include "isingtri/mp.hpp"

namespace isingtri::series {

// Exact polynomial in the coupling nu; index = power of nu. Coefficients
// produced by the peeling recursion are nonnegative integers (they count
// spin-decorated maps), so big integers rather than rationals are stored;
// the serialized form still writes numerator/denominator pairs.
struct NuPolynomial {
    std::vector<BigInt> c;

    NuPolynomial() = default;
    explicit NuPolynomial(std::vector<BigInt> coeffs) : c(std::move(coeffs)) { trim(); }
    static NuPolynomial constant(long v) {
        NuPolynomial p;
        if (v != 0) p.c.assign(1, BigInt(v));
        return p;
    }
    static NuPolynomial nu_power(std::size_t k, long v = 1) {
        NuPolynomial p;
        p.c.assign(k + 1, BigInt(0));
        p.c[k] = v;
        return p;
    }

    bool is_zero() const { return c.empty(); }
    std::size_t degree() const { return c.empty() ? 0 : c.size() - 1; }

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }

    void add(const NuPolynomial& o) {
        if (o.c.size() > c.size()) c.resize(o.c.size(), BigInt(0));
        for (std::size_t i = 0; i < o.c.size(); ++i) c[i] += o.c[i];
        trim();
    }

    // this += a*b
    void add_mul(const NuPolynomial& a, const NuPolynomial& b) {
        if (a.is_zero() || b.is_zero()) return;
        std::size_t need = a.c.size() + b.c.size() - 1;
        if (need > c.size()) c.resize(need, BigInt(0));
        for (std::size_t i = 0; i < a.c.size(); ++i)
            for (std::size_t j = 0; j < b.c.size(); ++j)
                c[i + j] += a.c[i] * b.c[j];
    }

    // multiply by nu^1
    void shift_nu() {
        if (is_zero()) return;
        c.insert(c.begin(), BigInt(0));
    }

    template <typename T>
    T eval(const T& nu) const {
        T acc(0);
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * nu + T(c[i]);
        return acc;
    }

    bool operator==(const NuPolynomial& o) const { return c == o.c; }
    bool operator!=(const NuPolynomial& o) const { return !(*this == o); }

    std::string to_string() const; // human form, e.g. "nu^2 + nu"
};

// Truncated power series in t; coeffs[n] is the exact nu-polynomial of t^n.
struct TSeries {
    std::size_t order = 0;
    std::vector<NuPolynomial> coeffs;

    TSeries() = default;
    explicit TSeries(std::size_t ord) : order(ord), coeffs(ord + 1) {}
};

} // namespace isingtri::series
