#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "isingtri/coefficients.hpp"
#include "isingtri/constants.hpp"
#include "isingtri/errors.hpp"
#include "isingtri/series_engine.hpp"

using namespace isingtri;
using namespace isingtri::coeffs;
namespace C = isingtri::constants;

namespace {

const CoefficientTables& tiny_crit() {
    static const CoefficientTables t = [] {
        BuildOptions opt;
        opt.k_max = 8192;
        opt.zeta_size = 96;
        opt.grid_points = 512;
        opt.radius = 0.92;
        opt.radius_check = 0.85;
        return load_or_build(C::nu_c(), opt, default_cache_dir());
    }();
    return t;
}

const CoefficientTables& tiny_ht() {
    static const CoefficientTables t = [] {
        BuildOptions opt;
        opt.k_max = 8192;
        opt.zeta_size = 24;
        opt.grid_points = 512;
        opt.radius = 0.9;
        opt.radius_check = 0.8;
        opt.want_a_sigma = false;
        return load_or_build(Real("1.2"), opt, default_cache_dir());
    }();
    return t;
}

// truncated series value at t_c plus a fitted power-law tail extrapolation
double series_estimate(std::size_t p, std::size_t q, const Real& nu) {
    static const series::PartitionTable table = series::extend_table(series::PartitionTable(), 56);
    Real t = C::t_c_of_nu(nu);
    Real value(0), tn(1);
    std::vector<std::pair<double, double>> last; // (n, term)
    for (std::size_t n = 1; n <= table.max_order(); ++n) {
        tn *= t;
        const auto& cf = table.entry(p, q, n);
        if (cf.is_zero()) continue;
        Real term = cf.eval(nu) * tn;
        value += term;
        last.emplace_back((double)n, (double)term);
    }
    // fit term_n ~ c n^{-alpha} on the last few nonzero terms and sum the
    // fitted law over the series' own support pattern (the nonzero orders
    // are arithmetic with gap 3 here)
    std::size_t m = last.size();
    REQUIRE(m >= 4);
    double n1 = last[m - 4].first, a1 = last[m - 4].second;
    double n2 = last[m - 1].first, a2 = last[m - 1].second;
    double gap = last[m - 1].first - last[m - 2].first;
    double alpha = std::log(a1 / a2) / std::log(n2 / n1);
    double c = a2 * std::pow(n2, alpha);
    double tail = 0;
    for (std::size_t j = 1; j < 2000000; ++j) {
        double term = c * std::pow(n2 + gap * j, -alpha);
        tail += term;
        if (term < 1e-18 * (double)value) break;
    }
    return (double)value + tail;
}

} // namespace

TEST_CASE("series inversion round trip at high precision") {
    auto spec = u_param(C::nu_c());
    auto par = u_param_as<Real>(spec);
    auto h = invert_series<Real>(par, 50);
    CHECK((double)abs(h[0]) == 0.0);
    // H'(0) = u_c / u_hat'(0)
    auto uf = C::u_hat_crit();
    auto t0 = uf.taylor_at(Real(0), 1);
    CHECK(abs(h[1] - C::u_c_crit() / t0[1]) < Real("1e-100"));
    // round-trip residual well below the 60-digit requirement
    CHECK(inversion_residual<Real>(par, h, 50) < 1e-40);

    // the high-temperature branch inverts too
    auto spec_ht = u_param(Real("1.2"));
    auto par_ht = u_param_as<Real>(spec_ht);
    auto h_ht = invert_series<Real>(par_ht, 40);
    CHECK(inversion_residual<Real>(par_ht, h_ht, 40) < 1e-40);
}

TEST_CASE("w sequence: positivity, partial sums, tail exponent") {
    const auto& t = tiny_crit();
    for (std::size_t k = 1; k <= t.k_cut; ++k) CHECK(t.w[k] > 0);

    // partial sums approach Z0(u_c) from below; exact residual is the tail mass
    double s = 0;
    for (std::size_t k = t.k_cut; k >= 1; --k) s += t.w[k];
    CHECK(s < t.Z0_uc);
    CHECK(s + t.tail_mass == doctest::Approx(t.Z0_uc).epsilon(1e-14));
    CHECK(t.tail_fit_residual < 0.05);

    // rescaled tail levels off at a0 / Gamma(-4/3)
    double lim = (double)(C::a0() / gamma_minus_four_thirds());
    double top = t.w[t.k_cut] * std::pow((double)t.k_cut, 7.0 / 3);
    CHECK(std::abs(top / lim - 1) < 0.15); // finite-size correction ~ k^{-1/3}

    // high-temperature tail is steeper (5/2): compare local slopes
    const auto& th = tiny_ht();
    auto slope = [](const CoefficientTables& tt) {
        double k1 = tt.k_cut / 2, k2 = tt.k_cut;
        return std::log(tt.w[(std::size_t)k2] / tt.w[(std::size_t)k1]) / std::log(k2 / k1);
    };
    CHECK(slope(tiny_crit()) == doctest::Approx(-7.0 / 3).epsilon(0.02));
    CHECK(slope(th) == doctest::Approx(-5.0 / 2).epsilon(0.02));
}

TEST_CASE("a sequence: a0, positivity, rescaled limit") {
    const auto& t = tiny_crit();
    CHECK(t.a_scaled[0] == doctest::Approx((double)C::a0()).epsilon(1e-14));
    for (std::size_t p = 1; p <= t.p_max; ++p) CHECK(t.a_scaled[p] > 0);

    // a_p p^{4/3} u_c^p * |Gamma(-1/3)|/|b| -> 1: intercept of the fit in p^{-1/3}
    double lim = (double)abs(C::b_signed() / gamma_minus_one_third());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t p = t.p_max / 8; p <= t.p_max; ++p) {
        double x = std::pow((double)p, -1.0 / 3);
        double y = t.a_scaled[p] * std::pow((double)p, 4.0 / 3);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    double d = n * sxx - sx * sx;
    double intercept = (sy * sxx - sx * sxy) / d;
    CHECK(std::abs(intercept / lim - 1) < 0.01);

    // partial sums of a_p u_c^p extrapolate to A(u_c) = 2 a0
    double partial = 0;
    for (std::size_t p = t.p_max; p >= 1; --p) partial += t.a_scaled[p];
    partial += t.a_scaled[0];
    // tail ~ sum of C p^{-4/3}, with slack for the p^{-1/3} correction
    double tail = t.a_scaled[t.p_max] * (double)t.p_max * 3;
    CHECK(partial < (double)C::A_at_uc());
    CHECK(partial + 1.15 * tail > (double)C::A_at_uc());
    CHECK(partial + 0.85 * tail < (double)C::A_at_uc());
}

TEST_CASE("zeta table: symmetry, positivity, diagonal trend") {
    const auto& t = tiny_crit();
    REQUIRE(t.zmax >= 96);
    for (std::size_t p = 1; p <= t.zmax; ++p) {
        for (std::size_t q = 1; q <= p; ++q) {
            double a = t.zeta[(p - 1) * t.zmax + (q - 1)];
            double b = t.zeta[(q - 1) * t.zmax + (p - 1)];
            CHECK(a > 0);
            CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
        }
    }
    CHECK(t.zeta_radius_check >= 0);
    CHECK(t.zeta_radius_check < 1e-10);

    // zeta_{p,p} p^{11/3} drifts toward b c(1) / (Gamma(-4/3) Gamma(-1/3))
    double target = (double)(C::b_signed() * C::c_lambda(Real(1), C::Regime::critical) /
                             (gamma_minus_four_thirds() * gamma_minus_one_third()));
    auto ratio = [&](std::size_t p) {
        return t.zeta_at(p, p) * std::pow((double)p, 11.0 / 3) *
               std::pow(1.0, (double)p) / target;
    };
    double r_lo = ratio(24), r_hi = ratio(96);
    CHECK(std::abs(r_hi - 1) < std::abs(r_lo - 1));
    CHECK(std::abs(r_hi - 1) < 0.25);
}

TEST_CASE("two-estimator agreement with the exact series") {
    const auto& t = tiny_crit();
    const auto& th = tiny_ht();
    double uc = t.u_c, uch = th.u_c;
    // z_{1,0}, z_{2,0}, z_{1,1} at nu_c
    CHECK(std::abs(series_estimate(1, 0, C::nu_c()) * uc / t.w[1] - 1) < 1e-3);
    CHECK(std::abs(series_estimate(2, 0, C::nu_c()) * uc * uc / t.w[2] - 1) < 1e-3);
    CHECK(std::abs(series_estimate(1, 1, C::nu_c()) * uc * uc / t.zeta_at(1, 1) - 1) < 1e-3);
    // and at nu = 1.2
    CHECK(std::abs(series_estimate(1, 0, Real("1.2")) * uch / th.w[1] - 1) < 1e-3);
    CHECK(std::abs(series_estimate(2, 0, Real("1.2")) * uch * uch / th.w[2] - 1) < 1e-3);
    CHECK(std::abs(series_estimate(1, 1, Real("1.2")) * uch * uch / th.zeta_at(1, 1) - 1) <
          1e-3);
}

TEST_CASE("sigma matches zeta row sums plus the analytic tail") {
    const auto& t = tiny_crit();
    for (std::size_t p : {1ul, 3ul, 10ul, 40ul}) {
        double row = 0;
        for (std::size_t q = t.zmax; q >= 1; --q) row += t.zeta_at(p, q);
        CHECK(row < t.sigma[p]);
        // the missing mass decays like the one-step tail ~ q^{-4/3}
        double missing = t.sigma[p] - row;
        CHECK(missing / t.sigma[p] < 0.05);
    }
}

TEST_CASE("mono-boundary normalization identity from the tables") {
    const auto& t = tiny_crit();
    double a0 = (double)C::a0();
    double lhs = t.t_c * t.nu *
                 (t.a_scaled[1] / (t.u_c * a0) + (1 + 2 * t.Z0_uc) / t.u_c);
    CHECK(std::abs(lhs - 1) < 1e-10);
}

TEST_CASE("cache round trip with content hash") {
    const auto& t = tiny_crit();
    std::string path = default_cache_dir() + "/roundtrip-test.tbl";
    save_tables(t, path);
    auto u = load_tables(path);
    CHECK(u.k_cut == t.k_cut);
    CHECK(u.content_hash() == t.content_hash());
    CHECK(u.w == t.w);
    CHECK(u.zeta == t.zeta);

    // corrupting a byte breaks the hash
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(64);
        char c = 0x5a;
        f.write(&c, 1);
    }
    CHECK_THROWS_AS(load_tables(path), io_error);
    std::remove(path.c_str());
}

TEST_CASE("build guards") {
    CHECK_THROWS_AS(build_tables(Real("0.8"), BuildOptions{}), domain_error);
    BuildOptions bad;
    bad.k_max = 64;
    bad.zeta_size = 60;
    bad.grid_points = 64; // grid too small for the requested table
    CHECK_THROWS_AS(build_tables(C::nu_c(), bad), capacity_error);
}
