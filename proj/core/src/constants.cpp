#include "isingtri/constants.hpp"

#include <cmath>

#include "isingtri/errors.hpp"
#include "isingtri/quadrature.hpp"

namespace isingtri::constants {

namespace {

const Real& sqrt7() {
    static const Real v = sqrt(Real(7));
    return v;
}

Real cbrt_pos(const Real& x) { return pow(x, Real(1) / 3); }

void check_pole(const Complex& d, const char* what) {
    if (abs(d) < Real("1e-60")) throw pole_error(what);
}

bool is_critical_nu(const Real& nu) { return abs(nu - nu_c()) < Real("1e-60"); }

} // namespace

Real nu_c() {
    static const Real v = 1 + 1 / sqrt7();
    return v;
}

Real S_c() {
    static const Real v = (5 - sqrt7()) / 9;
    return v;
}

Real S_perc() {
    static const Real v = Real(1) / 2 - sqrt(Real(3)) / 6;
    return v;
}

Real mu() {
    static const Real v = (11 - 5 * sqrt7()) / (12 * sqrt7() - 48);
    return v;
}

Real nu_of_S(const Real& S) {
    if (!(S > 0) || S > S_c() + Real("1e-110"))
        throw domain_error("S outside (0, S_c]");
    return 3 * S * (1 - S) / (3 * S * S - 3 * S + 1);
}

Real S_of_nu(const Real& nu) {
    if (!(nu > 0) || nu > nu_c() + Real("1e-110"))
        throw domain_error("nu outside (0, nu_c]");
    if (is_critical_nu(nu)) return S_c();
    Real lo(0), hi = S_c();
    for (int i = 0; i < 64; ++i) {
        Real mid = (lo + hi) / 2;
        if (nu_of_S(mid) < nu) lo = mid; else hi = mid;
    }
    // Newton polish on nu(S) - nu
    Real S = (lo + hi) / 2;
    for (int i = 0; i < 8; ++i) {
        Real den = 3 * S * S - 3 * S + 1;
        Real f = 3 * S * (1 - S) / den - nu;
        Real fp = (3 - 6 * S) / den - 3 * S * (1 - S) * (6 * S - 3) / (den * den);
        S -= f / fp;
    }
    return S;
}

Real T_crit(const Real& S) {
    if (!(S > 0) || S > S_c() + Real("1e-110"))
        throw domain_error("S outside (0, S_c]");
    Real num = (6 * S * S - 10 * S + 3) * (3 * S - 2) * (3 * S - 2);
    Real den = S * (S - 1) * (S - 1) * (S - 1);
    return -num / (864 * den);
}

Real t_c_of_nu(const Real& nu) {
    return cbrt_pos(T_crit(S_of_nu(nu)));
}

Real u_c_of_S(const Real& S) {
    Real X = (3 * S - 2) * (3 * S - 2) * (6 * S * S - 10 * S + 3) /
             (S * (1 - S) * (1 - S) * (1 - S));
    return (18 * S * S - 18 * S + 4) * cbrt_pos(Real(2)) /
           (pow(X, Real(2) / 3) * S * (1 - S));
}

Real u_c_of_nu(const Real& nu) {
    if (is_critical_nu(nu)) return u_c_crit();
    return u_c_of_S(S_of_nu(nu));
}

// --- critical parametrization ---------------------------------------------

Real u_c_crit() {
    static const Real v = 4 * (4 - sqrt7()) / pow(50 * sqrt7() - 110, Real(2) / 3);
    return v;
}

Real t_c_crit() {
    static const Real v = cbrt_pos((25 * sqrt7() - 55) / 864);
    return v;
}

Poly<Real> u_hat_crit_num() {
    Real pre = 4 * (sqrt7() - 4) / pow(50 * sqrt7() - 110, Real(2) / 3);
    return Poly<Real>({Real(0), 5 * pre, -6 * pre, 2 * pre});
}

RationalFn<Real> u_hat_crit() {
    return {u_hat_crit_num(), Poly<Real>({Real(-2), Real(1)})};
}

Poly<Real> z0_hat_crit_num() {
    Real pre = (sqrt7() - 1) * (sqrt7() - 4) / (5 * (5 * sqrt7() - 11));
    // H * (8H^4 + (4sqrt7-44)H^3 + (96-20sqrt7)H^2 + (34sqrt7-101)H + 44-20sqrt7)
    return Poly<Real>({Real(0), pre * (44 - 20 * sqrt7()), pre * (34 * sqrt7() - 101),
                       pre * (96 - 20 * sqrt7()), pre * (4 * sqrt7() - 44), pre * 8});
}

RationalFn<Real> z0_hat_crit() {
    return {z0_hat_crit_num(), Poly<Real>({Real(4), Real(-4), Real(1)})};
}

std::pair<Complex, Complex> param_critical(const Complex& H) {
    check_pole(H - Complex(2), "u_hat/Z0_hat at H = 2");
    auto uf = u_hat_crit();
    auto zf = z0_hat_crit();
    return {uf.num.eval(H) / uf.den.eval(H), zf.num.eval(H) / zf.den.eval(H)};
}

Complex param_critical_Z(const Complex& H, const Complex& K) {
    check_pole(H - Complex(2), "Z_hat at H = 2");
    check_pole(K - Complex(2), "Z_hat at K = 2");
    check_pole(H + K - Complex(2), "Z_hat at H + K = 2");
    const Complex K2 = K * K, K3 = K2 * K;
    Complex c3 = K3 - 5 * K2 + Complex(Real(17) / 2) * K - Complex(5);
    Complex c2 = -5 * K3 + 24 * K2 - Complex(Real(313) / 8) * K + Complex(22);
    Complex c1 = Complex(Real(17) / 2) * K3 - Complex(Real(313) / 8) * K2 +
                 Complex(Real(245) / 4) * K - Complex(33);
    Complex c0 = -5 * K3 + 22 * K2 - 33 * K + Complex(17);
    Complex num = ((c3 * H + c2) * H + c1) * H + c0;
    Complex den = (H - Complex(2)) * (H - Complex(2)) * (K - Complex(2)) * (K - Complex(2)) *
                  (H + K - Complex(2));
    return Complex(Real(-8) / 5) * H * K * num / den;
}

// --- high-temperature parametrization --------------------------------------

RationalFn<Real> u_hat_ht(const Real& S) {
    Real pre = pow(T_crit(S), Real(-2) / 3) * (2 - 3 * S) / (36 * S * S * (S - 1) * (S - 1));
    // H * ((3S-2)H^2 + (2-4S)H + (-6S^3 + 10S^2 - 3S))
    Poly<Real> num({Real(0), pre * (-6 * S * S * S + 10 * S * S - 3 * S), pre * (2 - 4 * S),
                    pre * (3 * S - 2)});
    return {num, Poly<Real>({-2 * S, Real(1)})};
}

RationalFn<Real> z0_hat_ht(const Real& S) {
    Real S2 = S * S, S3 = S2 * S, S4 = S3 * S, S5 = S4 * S;
    Real pre = 36 / (S2 * (3 * S - 2) * (6 * S2 - 10 * S + 3));
    Real h4 = S2 - Real(4) / 3 * S + Real(4) / 9;
    Real h3 = -2 * S3 + S2 + Real(8) / 9 * S - Real(4) / 9;
    Real h2 = -S4 + Real(20) / 3 * S3 - Real(53) / 9 * S2 + Real(4) / 3 * S;
    Real h1 = Real(5) / 2 * S5 - Real(15) / 2 * S4 + Real(19) / 4 * S3 - Real(5) / 6 * S2;
    Real h0 = Real(2) / 3 * S4 - Real(2) / 9 * S3;
    // numerator = pre * H * (h4 H^4 + h3 H^3 + h2 H^2 + h1 H + h0)
    Poly<Real> num({Real(0), pre * h0, pre * h1, pre * h2, pre * h3, pre * h4});
    return {num, Poly<Real>({4 * S * S, -4 * S, Real(1)})};
}

std::pair<Complex, Complex> param_hightemp(const Complex& H, const Real& S) {
    if (!(S > S_perc()) || !(S < S_c())) throw domain_error("S outside (S_perc, S_c)");
    check_pole(H - Complex(2 * S), "u_hat/Z0_hat at H = 2S");
    auto uf = u_hat_ht(S);
    auto zf = z0_hat_ht(S);
    return {uf.num.eval(H) / uf.den.eval(H), zf.num.eval(H) / zf.den.eval(H)};
}

Complex Z_bivariate_hightemp(const Complex& H, const Complex& K, const Real& S,
                             const Real& Z1_script) {
    Real T = T_crit(S);
    Real t = cbrt_pos(T);
    Real nu = nu_of_S(S);
    Real Z1s = Z1_script >= 0 ? Z1_script : t * z10_at_tc(nu);

    auto u_and_F = [&](const Complex& X) {
        auto [u, z0] = param_hightemp(X, S);
        check_pole(u, "F at u = 0");
        Complex U = Complex(t * t) * u;
        Complex F = Complex(t) * z0 / u;
        return std::pair<Complex, Complex>{U, F};
    };
    auto [Uu, Fu] = u_and_F(H);
    auto [Uv, Fv] = u_and_F(K);

    auto tZ1 = [&](const Complex& U, const Complex& F) {
        return (U * F * (Complex(1) - Complex(nu) * F) - Complex(nu) * U * U -
                Complex(nu * T) * (F - Complex(Z1s))) /
               Complex(nu * T);
    };
    Complex num = Uu * Uu * Uv * Uv - Complex(T) * Uu * Uv * (tZ1(Uu, Fu) + tZ1(Uv, Fv));
    Complex den = Complex(T) * Uu * Uv * (Complex(1) - Fu - Fv) - Complex(T * T) * (Uu + Uv);
    check_pole(den, "Z(u,v) denominator");
    return num / den;
}

// --- singular expansion constants ------------------------------------------

Real a0() {
    static const Real v = pow(Real(2), Real(2) / 3) / 5;
    return v;
}

Real a0_radical() {
    static const Real v =
        pow(Real(2), Real(2) / 3) * (sqrt7() - 1) * (4 - sqrt7()) / (25 * sqrt7() - 55);
    return v;
}

Real A_at_uc() { return 2 * a0(); }

Real u3() { return 2 * u_c_crit(); }

Real b_signed() {
    static const Real v = -Real(2) / 5 * cbrt_pos(Real(2));
    return v;
}

Complex A_hat(const Complex& H, bool corrected_sign) {
    Complex den = corrected_sign ? Complex(10) - 5 * H : 5 * H - Complex(10);
    check_pole(den, "A_hat at H = 2");
    return Complex(pow(Real(2), Real(2) / 3)) * H / den;
}

Real Z0_at_uc(const Real& nu) {
    if (is_critical_nu(nu)) {
        auto zf = z0_hat_crit();
        return zf.num.eval(Real(1)) / zf.den.eval(Real(1));
    }
    Real S = S_of_nu(nu);
    auto zf = z0_hat_ht(S);
    return zf.num.eval(S) / zf.den.eval(S);
}

Real z10_at_tc(const Real& nu) {
    RationalFn<Real> uf, zf;
    if (is_critical_nu(nu)) {
        uf = u_hat_crit();
        zf = z0_hat_crit();
    } else {
        Real S = S_of_nu(nu);
        uf = u_hat_ht(S);
        zf = z0_hat_ht(S);
    }
    auto ut = uf.taylor_at(Real(0), 1);
    auto zt = zf.taylor_at(Real(0), 1);
    return zt[1] / ut[1];
}

Real drift(const Real& nu) {
    if (!(nu > 1) || nu > nu_c() + Real("1e-110"))
        throw domain_error("drift defined for nu in (1, nu_c]");
    RationalFn<Real> uf, zf;
    Real Hc;
    if (is_critical_nu(nu)) {
        uf = u_hat_crit();
        zf = z0_hat_crit();
        Hc = 1;
    } else {
        Real S = S_of_nu(nu);
        uf = u_hat_ht(S);
        zf = z0_hat_ht(S);
        Hc = S;
    }
    Real uc = uf.num.eval(Hc) / uf.den.eval(Hc);
    Real z0c = zf.num.eval(Hc) / zf.den.eval(Hc);
    auto ut = uf.taylor_at(Hc, 3);
    auto zt = zf.taylor_at(Hc, 3);
    Real scale = abs(ut[0]) + abs(ut[1]) + abs(ut[2]) + abs(ut[3]);
    Real z0prime;
    bool found = false;
    for (std::size_t k = 1; k <= 3; ++k) {
        if (abs(ut[k]) > scale * Real("1e-80")) {
            z0prime = zt[k] / ut[k];
            found = true;
            break;
        }
    }
    if (!found) throw precision_error("u_hat Taylor coefficients underflow at critical point");
    Real t = is_critical_nu(nu) ? t_c_crit() : t_c_of_nu(nu);
    return t * ((1 + z0c) / uc - z0prime);
}

Real p_infinity_normalization(const Real& nu) {
    Real t = is_critical_nu(nu) ? t_c_crit() : t_c_of_nu(nu);
    Real u = u_c_of_nu(nu);
    return 2 * (t / u) * (1 + Z0_at_uc(nu));
}

Real c_lambda(const Real& lambda, Regime regime) {
    if (!(lambda > 0)) throw domain_error("lambda must be positive");
    if (regime == Regime::high_temperature)
        return pow(1 + lambda, Real(-5) / 2);
    // substitute r -> lambda s (lambda < 1) or pull lambda out (lambda >= 1)
    // so the remaining integrand J(M) = int (1+x)^{-7/3} (1+x/M)^{-7/3} dx is
    // uniformly smooth; the spike of the raw display form at r ~ lambda -> 0
    // otherwise starves the adaptive quadrature
    long double lam = (long double)lambda;
    long double M = lam >= 1 ? lam : 1 / lam;
    auto f = [M](long double x) {
        return powl(1 + x, -7.0L / 3) * powl(1 + x / M, -7.0L / 3);
    };
    long double J = integrate_halfline<long double>(f, 1e-16L);
    long double pref = lam >= 1 ? powl(lam, -7.0L / 3) : powl(lam, -4.0L / 3);
    return Real(4) / 3 * Real(pref * J);
}

Real c_infinity(const Real& lambda) {
    return Real(4) / 3 * mu() / (c_lambda(lambda, Regime::critical) * pow(lambda, Real(7) / 3));
}

Real c_tilde_infinity() {
    Real v = Real(4) / 3 * 2 * t_c_crit() * a0() * (A_at_uc() - a0()) /
             (b_signed() * u_c_crit());
    return abs(v);
}

Real b_hat(const Real& S) {
    if (!(S > S_perc()) || !(S < S_c())) throw domain_error("S outside (S_perc, S_c)");
    Real S2 = S * S, S3 = S2 * S, S4 = S3 * S;
    Real g = 9 * S2 - 10 * S + 2;
    Real root = sqrt(g / (3 * S4 - 4 * S3 + S2));
    return 4 * g * g / (root * S2 * (-18 * S3 + 42 * S2 - 29 * S + 6));
}

std::array<Real, 2> u_hat_ht_extra_roots(const Real& S) {
    Real S2 = S * S, S3 = S2 * S, S4 = S3 * S;
    Real disc = sqrt(108 * S4 - 192 * S3 + 108 * S2 - 20 * S + 1);
    Real den = 6 * S - 4;
    return {(6 * S2 - 2 * S - 1 + disc) / den, (6 * S2 - 2 * S - 1 - disc) / den};
}

CriticalPoint critical_point(const Real& nu) {
    if (!(nu > 1) || nu > nu_c() + Real("1e-110"))
        throw domain_error("critical_point defined for nu in (1, nu_c]");
    CriticalPoint cp;
    cp.nu = nu;
    cp.S = S_of_nu(nu);
    cp.t_c = is_critical_nu(nu) ? t_c_crit() : t_c_of_nu(nu);
    cp.u_c = u_c_of_nu(nu);
    cp.tail_exponent = is_critical_nu(nu) ? Real(7) / 3 : Real(5) / 2;
    cp.drift = drift(nu);
    return cp;
}

CriticalExpansion critical_expansion() {
    return {a0(), b_signed(), A_at_uc(), mu(), u3()};
}

} // namespace isingtri::constants
