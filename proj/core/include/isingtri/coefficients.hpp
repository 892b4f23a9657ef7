#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isingtri/constants.hpp"
#include "isingtri/dd.hpp"
#include "isingtri/mp.hpp"
#include "isingtri/series_ops.hpp"

namespace isingtri::coeffs {

// Coefficients of the u-parametrization in the shape shared by both
// temperature branches: u_hat(H) = pre * H (q2 H^2 + q1 H + q0)/(H - pp).
struct UParamSpec {
    Real pre, q2, q1, q0, pp, uc;
};
UParamSpec u_param(const Real& nu);

template <typename T>
struct UParamT {
    T pre, q2, q1, q0, pp, uc;
};

inline dd to_dd(const Real& x) {
    double hi = (double)x;
    double lo = (double)(x - Real(hi));
    return dd(hi, lo);
}

template <typename T> T from_real(const Real& x);
template <> inline dd from_real<dd>(const Real& x) { return to_dd(x); }
template <> inline Real from_real<Real>(const Real& x) { return x; }
template <> inline double from_real<double>(const Real& x) { return (double)x; }

template <typename T>
UParamT<T> u_param_as(const UParamSpec& s) {
    return {from_real<T>(s.pre), from_real<T>(s.q2), from_real<T>(s.q1),
            from_real<T>(s.q0), from_real<T>(s.pp), from_real<T>(s.uc)};
}

// Series H(x) with u_hat(H(x)) = u_c x, by Newton iteration on formal power
// series. Throws precision_error if the round-trip residual through `order`
// exceeds roughly the working epsilon.
template <typename T>
std::vector<T> invert_series(const UParamT<T>& par, std::size_t order) {
    auto h = invert_u_parametrization<T>(par.pre, par.q2, par.q1, par.q0, par.pp, par.uc,
                                         order);
    return h;
}

// max |coefficient| of u_hat(H(x))/u_c - x through `order`
template <typename T>
double inversion_residual(const UParamT<T>& par, const std::vector<T>& h, std::size_t order);

// Numeric coefficient tables at the critical edge weight for one nu. All
// sequences are stored in the u_c-rescaled form that stays bounded:
//   w[k]        = z_{k,0}(t_c) u_c^k
//   a_scaled[p] = a_p u_c^p
//   sigma[p]    = sum_{q>=1} z_{p,q}(t_c) u_c^{p+q}
//   zeta(p,q)   = z_{p,q}(t_c) u_c^{p+q}
struct CoefficientTables {
    double nu = 0;
    int digits = 31;
    std::size_t k_cut = 0;
    std::size_t p_max = 0;
    std::size_t zmax = 0;
    double t_c = 0, u_c = 0, Z0_uc = 0;

    std::vector<double> w;        // index k, valid 1..k_cut
    std::vector<double> a_scaled; // index p, valid 0..p_max (critical only)
    std::vector<double> sigma;    // index p, valid 1..p_max (critical only)
    std::vector<double> zeta;     // (p-1)*zmax + (q-1), 1 <= p,q <= zmax

    // fitted pure power law for w beyond k_cut and its bookkeeping
    double tail_C = 0, tail_alpha = 0;
    double tail_mass = 0;         // Z0_uc - sum_{k<=k_cut} w_k, assigned exactly
    double tail_fit_residual = 0; // |fitted tail sum / tail_mass - 1|
    double zeta_radius_check = -1;

    bool has_zeta(std::size_t p, std::size_t q) const {
        return p >= 1 && q >= 1 && p <= zmax && q <= zmax;
    }
    double zeta_at(std::size_t p, std::size_t q) const;
    double w_at(std::size_t k) const; // table below k_cut, fitted power law beyond

    std::uint64_t content_hash() const;
};

struct BuildOptions {
    std::size_t k_max = 100000;   // w/a/sigma order
    std::size_t zeta_size = 600;  // 0 = skip the bivariate table
    std::size_t grid_points = 2048;
    double radius = 0.985;
    double radius_check = 0.97; // second radius; <= 0 skips the robustness pass
    bool want_a_sigma = true;   // critical branch only
};

CoefficientTables build_tables(const Real& nu, const BuildOptions& opt);

// Full-size options used by the experiments: w/a/sigma to 1e5, a 600x600
// bivariate table on the critical branch. Both radii keep the r^{-(p+q)}
// amplification at the far table corner well inside double-double accuracy.
inline BuildOptions production_options(bool critical) {
    BuildOptions opt;
    opt.k_max = 100000;
    opt.zeta_size = critical ? 600 : 24;
    opt.grid_points = 2048;
    opt.radius = 0.985;
    opt.radius_check = 0.98;
    opt.want_a_sigma = critical;
    return opt;
}

// spec-facing convenience wrappers
std::vector<double> w_sequence(std::size_t k_max, const Real& nu);
std::vector<double> a_sequence(std::size_t p_max); // at nu_c, scaled by u_c^p
std::vector<double> zeta_row(const CoefficientTables& t, std::size_t p);

void save_tables(const CoefficientTables& t, const std::string& path);
CoefficientTables load_tables(const std::string& path);
std::optional<CoefficientTables> try_load_tables(const std::string& path);

// cache file named from (nu, options); builds and saves on miss.
CoefficientTables load_or_build(const Real& nu, const BuildOptions& opt,
                                const std::string& cache_dir);

std::string default_cache_dir(); // $ISINGTRI_CACHE_DIR or a build-local default

} // namespace isingtri::coeffs
