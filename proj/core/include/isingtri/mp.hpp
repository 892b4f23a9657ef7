#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace isingtri {

// Working precision for closed-form constants and parametrizations.
// 120 decimal digits leaves a wide guard band over the 60 digits the
// identity checks are run at.
using Real = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<120>, boost::multiprecision::et_off>;
using Complex = boost::multiprecision::cpp_complex<120>;

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

inline Real mp_pi() { return boost::math::constants::pi<Real>(); }
inline Real mp_sqrt(const Real& x) { return sqrt(x); }

// Gamma values at the negative arguments used by the coefficient
// asymptotics, derived from Gamma(2/3) via the recurrence
// Gamma(z) = Gamma(z+1)/z.
inline Real gamma_two_thirds() {
    return boost::math::tgamma(Real(2) / 3);
}
inline Real gamma_minus_one_third() {
    // Gamma(-1/3) = Gamma(2/3) / (-1/3)
    return gamma_two_thirds() * Real(-3);
}
inline Real gamma_minus_four_thirds() {
    // Gamma(-4/3) = Gamma(-1/3) / (-4/3)
    return gamma_minus_one_third() * Real(-3) / 4;
}
inline Real gamma_minus_three_halves() {
    // Gamma(-3/2) = 4*sqrt(pi)/3
    return 4 * sqrt(mp_pi()) / 3;
}

} // namespace isingtri
