#include <doctest.h>

#include "isingtri/constants.hpp"
#include "isingtri/errors.hpp"
#include "isingtri/rng.hpp"

using namespace isingtri;
namespace C = isingtri::constants;

namespace {
bool near(const Real& a, const Real& b, const Real& tol) { return abs(a - b) <= tol; }
const Real tol30 = Real("1e-30");
const Real tol60 = Real("1e-60");
} // namespace

TEST_CASE("critical line map nu(S) and its inverse") {
    CHECK(near(C::nu_of_S(C::S_c()), C::nu_c(), tol60));
    CHECK(near(C::nu_of_S(C::S_perc()), Real(1), tol60));
    CHECK(C::nu_of_S(Real("1e-25")) < Real("1e-20"));

    CHECK(near(C::S_of_nu(C::nu_c()), C::S_c(), tol60));
    CHECK(near(C::S_of_nu(Real(1)), C::S_perc(), tol60));

    CounterRng rng(11, 0);
    for (int i = 0; i < 100; ++i) {
        Real nu = Real("0.01") + Real(rng.next_double()) * (C::nu_c() - Real("0.02"));
        CHECK(near(C::nu_of_S(C::S_of_nu(nu)), nu, tol30));
    }
    CHECK_THROWS_AS(C::nu_of_S(Real("0.5")), domain_error);
    CHECK_THROWS_AS(C::S_of_nu(Real("1.5")), domain_error);
}

TEST_CASE("critical temperature values") {
    Real sqrt7 = sqrt(Real(7));
    CHECK(near(C::T_crit(C::S_c()), (25 * sqrt7 - 55) / 864, tol60));
    CHECK(near(C::t_c_crit() * C::t_c_crit() * C::t_c_crit(), C::T_crit(C::S_c()), tol60));

    // positive over the physical range
    for (int i = 1; i <= 1000; ++i) {
        Real S = C::S_perc() + (C::S_c() - C::S_perc()) * i / 1000;
        CHECK(C::T_crit(S) > 0);
    }
}

TEST_CASE("critical parametrization point values") {
    auto [u0, z0] = C::param_critical(Complex(0));
    CHECK(abs(u0) < tol60);
    CHECK(abs(z0) < tol60);

    auto [u1, z1] = C::param_critical(Complex(1));
    CHECK(near(u1.real(), C::u_c_crit(), tol60));
    Real sqrt7 = sqrt(Real(7));
    CHECK(near(z1.real(), (2 * sqrt7 - 3) / 5, tol60));

    CHECK_THROWS_AS(C::param_critical(Complex(2)), pole_error);
}

TEST_CASE("u_hat has a double critical point at 1 and a simple one at 5/2") {
    auto uf = C::u_hat_crit();
    auto t1 = uf.taylor_at(Real(1), 3);
    CHECK(abs(t1[1]) < tol60);
    CHECK(abs(t1[2]) < tol60);
    CHECK(abs(t1[3]) > Real("0.1")); // genuinely cubic
    // u_hat = u_c - u3 (1-H)^3 + ... = u_c + u3 (H-1)^3 + ...
    CHECK(near(t1[3], C::u3(), tol60));
    CHECK(near(C::u3(), 2 * C::u_c_crit(), tol60));

    auto t52 = uf.taylor_at(Real(5) / 2, 2);
    CHECK(abs(t52[1]) < tol60);
    CHECK(abs(t52[2]) > Real("0.1"));
}

TEST_CASE("expansion constants and the sign-corrected A_hat") {
    Real sqrt7 = sqrt(Real(7));
    // the radical expression collapses: (sqrt7-1)(4-sqrt7) = 5 sqrt7 - 11
    CHECK(near((sqrt7 - 1) * (4 - sqrt7), 5 * sqrt7 - 11, tol60));
    CHECK(near(C::a0_radical(), C::a0(), tol60));
    CHECK(near(C::a0(), pow(Real(2), Real(2) / 3) / 5, tol60));

    // A_hat(1) = a0 under the corrected sign; A(u_c) - a0 = a0
    CHECK(near(C::A_hat(Complex(1)).real(), C::a0(), tol60));
    CHECK(near(C::A_at_uc() - C::a0(), C::a0(), tol60));
    // printed convention differs only by sign
    CHECK(near(C::A_hat(Complex(1), false).real(), -C::a0(), tol60));

    CHECK(near(abs(C::b_signed()), Real(2) / 5 * pow(Real(2), Real(1) / 3), tol60));
}

TEST_CASE("normalization identity on the critical line") {
    for (const char* nus : {"1.05", "1.2", "1.35"}) {
        CHECK(near(C::p_infinity_normalization(Real(nus)), Real(1), Real("1e-12")));
    }
    CHECK(near(C::p_infinity_normalization(C::nu_c()), Real(1), Real("1e-12")));
}

TEST_CASE("drift is the order parameter") {
    CHECK(near(C::drift(C::nu_c()), C::mu(), Real("1e-30")));
    CHECK(near(C::drift(Real("1.2")), Real(0), Real("1e-30")));
    for (const char* nus : {"1.05", "1.12", "1.2", "1.28", "1.35"}) {
        CHECK(near(C::drift(Real(nus)), Real(0), Real("1e-30")));
    }
    CHECK_THROWS_AS(C::drift(Real("0.9")), domain_error);
}

TEST_CASE("pure gravity limit of the step probabilities") {
    Real ratio = C::t_c_of_nu(Real("1.0001")) / C::u_c_of_nu(Real("1.0001"));
    CHECK(near(ratio, 1 / (2 * sqrt(Real(3))), Real("1e-3")));
}

TEST_CASE("c(lambda) in both regimes") {
    CHECK(near(C::c_lambda(Real(1), C::Regime::critical), Real(4) / 11, Real("1e-12")));
    CHECK(near(C::c_lambda(Real(1), C::Regime::high_temperature),
               pow(Real(2), Real(-5) / 2), tol60));
    CHECK_THROWS_AS(C::c_lambda(Real(0), C::Regime::critical), domain_error);

    // c_infinity at lambda = 1: c(1) = 4/11 gives (11/3) mu
    CHECK(near(C::c_infinity(Real(1)), Real(11) / 3 * C::mu(), Real("1e-11")));
    CHECK(near(C::c_tilde_infinity(), Real(4) / 3 * C::mu(), Real("1e-30")));
    // magnitude identity on a lambda grid
    for (const char* ls : {"0.5", "1.0", "2.0", "3.5"}) {
        Real lam(ls);
        Real lhs = C::c_infinity(lam);
        Real rhs = Real(4) / 3 *
                   abs(2 * C::t_c_crit() * C::a0() * (C::A_at_uc() - C::a0()) /
                       (C::b_signed() * C::u_c_crit())) /
                   (C::c_lambda(lam, C::Regime::critical) * pow(lam, Real(7) / 3));
        CHECK(near(lhs, rhs, Real("1e-11") * rhs));
    }
}

TEST_CASE("bivariate critical parametrization") {
    CHECK(abs(C::param_critical_Z(Complex(0), Complex(Real("0.7")))) < tol60);

    CounterRng rng(12, 0);
    for (int i = 0; i < 20; ++i) {
        Complex H(Real(rng.next_double() * 1.2 - 0.3), Real(rng.next_double() * 0.6 - 0.3));
        Complex K(Real(rng.next_double() * 1.2 - 0.3), Real(rng.next_double() * 0.6 - 0.3));
        Complex a = C::param_critical_Z(H, K);
        Complex b = C::param_critical_Z(K, H);
        CHECK(abs(a - b) < Real("1e-90"));
    }

    // the denominator factor H + K - 2 vanishes at (1,1) but the diagonal
    // value stays finite: approach along H = K -> 1
    Complex prev;
    Real last_delta(1);
    for (int k = 6; k <= 12; k += 2) {
        Real eps = pow(Real(10), -k);
        Complex v = C::param_critical_Z(Complex(1 - eps), Complex(1 - eps));
        if (k > 6) last_delta = abs(v - prev);
        prev = v;
    }
    CHECK(last_delta < Real("1e-8")); // converging to a finite limit
}

TEST_CASE("high-temperature parametrization") {
    Real S = C::S_of_nu(Real("1.2"));
    auto [u0, z0] = C::param_hightemp(Complex(0), S);
    CHECK(abs(u0) < tol60);
    CHECK(abs(z0) < tol60);

    // u_hat(S;S) equals the displayed closed form for u_c(S)
    auto [uS, zS] = C::param_hightemp(Complex(S), S);
    CHECK(near(uS.real(), C::u_c_of_S(S), tol60));
    (void)zS;

    // derivative roots: H = S plus the radical pair, all positive, S smallest
    for (const char* nus : {"1.05", "1.2", "1.35"}) {
        Real Sx = C::S_of_nu(Real(nus));
        auto uf = C::u_hat_ht(Sx);
        auto tS = uf.taylor_at(Sx, 1);
        CHECK(abs(tS[1]) < Real("1e-55"));
        auto roots = C::u_hat_ht_extra_roots(Sx);
        for (const Real& r : roots) {
            auto tr = uf.taylor_at(r, 1);
            CHECK(abs(tr[1]) < Real("1e-50"));
            CHECK(r > Sx);
        }
    }
    CHECK_THROWS_AS(C::param_hightemp(Complex(Real("0.2")), Real("0.5")), domain_error);
}

TEST_CASE("numerically reconstructed bivariate function below criticality") {
    Real S = C::S_of_nu(Real("1.2"));
    CounterRng rng(13, 0);
    for (int i = 0; i < 10; ++i) {
        Complex H(Real(rng.next_double() * 0.15), Real(rng.next_double() * 0.05));
        Complex K(Real(rng.next_double() * 0.15), Real(rng.next_double() * 0.05));
        Complex a = C::Z_bivariate_hightemp(H, K, S);
        Complex b = C::Z_bivariate_hightemp(K, H, S);
        CHECK(abs(a - b) < Real("1e-80"));
    }

    // the singular locus H + K = 2S is removable on the diagonal: approach
    // along H = K -> S
    Complex prev;
    Real delta(1);
    for (int k = 6; k <= 10; k += 2) {
        Real eps = pow(Real(10), -k);
        Complex v = C::Z_bivariate_hightemp(Complex(S - eps), Complex(S - eps), S);
        if (k > 6) delta = abs(v - prev);
        prev = v;
    }
    CHECK(delta < Real("1e-6"));
}

TEST_CASE("b_hat on the physical range") {
    for (int i = 1; i < 40; ++i) {
        Real S = C::S_perc() + (C::S_c() - C::S_perc()) * i / 40;
        CHECK(C::b_hat(S) > 0);
    }
    // continuity at midpoints
    Real S1 = C::S_perc() + (C::S_c() - C::S_perc()) / 3;
    Real h = Real("1e-20");
    CHECK(abs(C::b_hat(S1 + h) - C::b_hat(S1)) < Real("1e-15"));
    // finite just above the percolation endpoint
    Real v = C::b_hat(C::S_perc() + Real("1e-6"));
    CHECK(abs(v) < Real("1e12"));
    CHECK_THROWS_AS(C::b_hat(Real("0.1")), domain_error);
}

TEST_CASE("critical point and expansion aggregates") {
    auto cp = C::critical_point(Real("1.2"));
    CHECK(near(cp.tail_exponent, Real(5) / 2, tol60));
    CHECK(near(cp.drift, Real(0), Real("1e-30")));
    auto cc = C::critical_point(C::nu_c());
    CHECK(near(cc.tail_exponent, Real(7) / 3, tol60));
    CHECK(near(cc.drift, C::mu(), Real("1e-30")));
    CHECK(near(cc.u_c, C::u_c_crit(), tol60));

    auto ex = C::critical_expansion();
    CHECK(near(ex.a0, C::a0(), tol60));
    CHECK(near(ex.u3, 2 * C::u_c_crit(), tol60));
}
