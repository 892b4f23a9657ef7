#pragma once

#include <array>
#include <utility>

#include "isingtri/mp.hpp"
#include "isingtri/poly.hpp"

namespace isingtri::constants {

enum class Regime { critical, high_temperature };

// --- critical line -------------------------------------------------------

Real nu_c();    // 1 + 1/sqrt(7)
Real S_c();     // (5 - sqrt(7))/9
Real S_perc();  // 1/2 - sqrt(3)/6
Real mu();      // (11 - 5 sqrt(7)) / (12 sqrt(7) - 48)

Real nu_of_S(const Real& S);   // strictly increasing on (0, S_c]
Real S_of_nu(const Real& nu);  // inverse by bisection
Real T_crit(const Real& S);    // critical cube of the edge weight
Real t_c_of_nu(const Real& nu);
Real u_c_of_nu(const Real& nu);
Real u_c_of_S(const Real& S);  // closed form, high-temperature branch

// --- rational parametrizations -------------------------------------------

// u = u_hat(H), Z0 = Z0_hat(H) at nu = nu_c. Pole at H = 2.
std::pair<Complex, Complex> param_critical(const Complex& H);

// Z_hat(H, K) at nu = nu_c. Poles at H = 2, K = 2, H + K = 2.
Complex param_critical_Z(const Complex& H, const Complex& K);

// u_hat(H; S), Z0_hat(H; S) on the high-temperature branch. Pole at H = 2S.
std::pair<Complex, Complex> param_hightemp(const Complex& H, const Real& S);

// Z(u,v) on the high-temperature branch, reconstructed numerically from the
// solved functional-equation system. Z1_script = t * z_{1,0}(t_c); pass a
// negative value to use the parametrization-derived default.
Complex Z_bivariate_hightemp(const Complex& H, const Complex& K, const Real& S,
                             const Real& Z1_script = Real(-1));

// Rational-function access for series work (coefficients over a scalar T).
Poly<Real> u_hat_crit_num();          // numerator of u_hat (critical)
Poly<Real> z0_hat_crit_num();
RationalFn<Real> u_hat_crit();        // den = (H-2)
RationalFn<Real> z0_hat_crit();       // den = (H-2)^2
RationalFn<Real> u_hat_ht(const Real& S);   // den = (H-2S)
RationalFn<Real> z0_hat_ht(const Real& S);  // den = (H-2S)^2

// --- singular expansion constants ----------------------------------------

Real u_c_crit();   // u_hat(1)
Real t_c_crit();
Real a0();         // 2^{2/3}/5 after simplification of the radical form
Real a0_radical(); // the unsimplified radical expression (identity-checked)
Real A_at_uc();    // A(u_c) = 2 a0 under the corrected sign
Real u3();         // cubic coefficient of u_hat at H=1; equals 2 u_c
Real b_signed();   // transfer constant, -(2/5) 2^{1/3}

// hat A(H): the corrected sign makes a_p > 0; the printed convention is kept
// behind the flag for sign-invariant cross-checks.
Complex A_hat(const Complex& H, bool corrected_sign = true);

// Z0 evaluated at the dominant singularity (H=1 critically, H=S below).
Real Z0_at_uc(const Real& nu);
// z_{1,0}(t_c(nu)) from the parametrization at the origin (chain rule).
Real z10_at_tc(const Real& nu);

// E[X_1] under the infinite law: t_c [(1+Z0(u_c))/u_c - Z0'(u_c)], the
// derivative taken through the parametrization (Taylor-coefficient ratio at
// the critical H, which resolves the 0/0 of the chain rule).
Real drift(const Real& nu);

// sum of the infinite-law probabilities, 2 (t_c/u_c)(1 + Z0(u_c)); equals 1.
Real p_infinity_normalization(const Real& nu);

Real c_lambda(const Real& lambda, Regime regime);
Real c_infinity(const Real& lambda); // (4/3) mu / (c(lambda) lambda^{7/3})
Real c_tilde_infinity();             // |(4/3) 2 t a0 (A(u_c)-a0) / (b u_c)|
Real b_hat(const Real& S);

// The two non-physical roots of d/dH u_hat(H;S) besides H = S.
std::array<Real, 2> u_hat_ht_extra_roots(const Real& S);

// --- aggregates -----------------------------------------------------------

struct CriticalPoint {
    Real nu, S, t_c, u_c;
    Real tail_exponent; // 7/3 at nu_c, 5/2 below
    Real drift;         // mu at nu_c, 0 below
};
CriticalPoint critical_point(const Real& nu);

struct CriticalExpansion {
    Real a0, b, A_at_uc, mu, u3;
};
CriticalExpansion critical_expansion();

} // namespace isingtri::constants
