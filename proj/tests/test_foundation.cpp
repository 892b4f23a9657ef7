#include <doctest.h>

#include <vector>

#include "isingtri/dd.hpp"
#include "isingtri/mp.hpp"
#include "isingtri/poly.hpp"
#include "isingtri/rng.hpp"
#include "isingtri/series_ops.hpp"

using namespace isingtri;

TEST_CASE("dd arithmetic keeps ~30 digits") {
    dd third = dd(1.0) / dd(3.0);
    dd r = third * dd(3.0) - dd(1.0);
    CHECK(std::abs(to_double(r)) < 1e-30);

    dd s = dd_sqrt(dd(2.0));
    dd err = s * s - dd(2.0);
    CHECK(std::abs(to_double(err)) < 1e-30);
}

TEST_CASE("counter rng is reproducible and stream-independent") {
    CounterRng a(42, 0), b(42, 0), c(42, 1);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    bool differs = false;
    CounterRng a2(42, 0);
    for (int i = 0; i < 100; ++i) differs |= (a2.next_u64() != c.next_u64());
    CHECK(differs);

    // uniformity smoke check
    CounterRng r(7, 3);
    double m = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) m += r.next_double();
    CHECK(std::abs(m / n - 0.5) < 0.005);
}

TEST_CASE("poly taylor shift and rational local expansion") {
    // p(x) = (x-2)^3 expanded at 2 is exactly s^3
    Poly<double> p({-8, 12, -6, 1});
    auto t = p.taylor_at(2.0, 3);
    CHECK(t[0] == doctest::Approx(0));
    CHECK(t[1] == doctest::Approx(0));
    CHECK(t[2] == doctest::Approx(0));
    CHECK(t[3] == doctest::Approx(1));

    RationalFn<double> f{Poly<double>({0, 1}), Poly<double>({1, 1})}; // x/(1+x)
    auto g = f.taylor_at(0.0, 4);
    CHECK(g[1] == doctest::Approx(1));
    CHECK(g[2] == doctest::Approx(-1));
    CHECK(g[3] == doctest::Approx(1));
}

TEST_CASE("series multiplication agrees between naive and karatsuba sizes") {
    CounterRng rng(1, 1);
    std::vector<dd> a(700), b(700);
    for (auto& v : a) v = dd(rng.next_double() - 0.5);
    for (auto& v : b) v = dd(rng.next_double() - 0.5);
    auto big = fps_mul(a, b, 699);
    // compare a few entries against direct convolution
    for (std::size_t n : {size_t(0), size_t(3), size_t(57), size_t(311), size_t(699)}) {
        dd s(0.0);
        for (std::size_t i = 0; i <= n; ++i)
            if (i < a.size() && n - i < b.size()) s += a[i] * b[n - i];
        CHECK(std::abs(to_double(s - big[n])) < 1e-25);
    }
}

TEST_CASE("series inverse and parametrization inversion round trip") {
    // invert 1/(1-x): inverse of series (1,-1) is all-ones
    std::vector<double> a{1.0, -1.0};
    auto inv = fps_inv(a, 10);
    for (auto v : inv) CHECK(v == doctest::Approx(1.0));

    // u(H) = H(2H^2-6H+5)/(H-2), normalized by u(1) = 1: invert and compose back
    double pre = 1.0, uc = -1.0; // u(1) = 1*(2-6+5)/(1-2) = -1 -> uc = -1
    auto h = invert_u_parametrization<double>(pre, 2, -6, 5, 2, uc, 64);
    CHECK(h[0] == doctest::Approx(0));
    // compose: u(h(x))/uc should be x
    Poly<double> num({0, 5 * pre, -6 * pre, 2 * pre});
    Poly<double> den({-2, 1});
    auto nn = fps_compose_poly(num, h, 64);
    auto dd_ = fps_compose_poly(den, h, 64);
    auto u = fps_div(nn, dd_, 64);
    for (std::size_t i = 0; i <= 64; ++i) {
        double want = (i == 1) ? uc : 0.0;
        CHECK(std::abs(u[i] - want) < 1e-16 * 100);
    }
}
