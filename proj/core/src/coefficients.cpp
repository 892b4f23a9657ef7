#include "isingtri/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "isingtri/errors.hpp"
#include "isingtri/fft.hpp"

namespace isingtri::coeffs {

namespace C = isingtri::constants;

namespace {

double mag(const dd& x) { return std::abs(to_double(x)); }
double mag(const Real& x) { return (double)abs(x); }

// rescaled rational functions R(H) composed with H(x); coefficients in T
template <typename T>
struct RatT {
    Poly<T> num, den;
};

template <typename T>
RatT<T> convert(const RationalFn<Real>& f) {
    RatT<T> out;
    out.num.c.reserve(f.num.c.size());
    out.den.c.reserve(f.den.c.size());
    for (const auto& c : f.num.c) out.num.c.push_back(from_real<T>(c));
    for (const auto& c : f.den.c) out.den.c.push_back(from_real<T>(c));
    return out;
}

template <typename T>
std::vector<T> compose(const RatT<T>& f, const std::vector<T>& h, std::size_t order) {
    auto n = fps_compose_poly(f.num, h, order);
    auto d = fps_compose_poly(f.den, h, order);
    return fps_div(n, d, order);
}

// sigma generating function at criticality: Z_hat(H, 1) with the vanishing
// (H-1) factor cancelled against the denominator,
//   Z_hat(H,1) = ((4/5)H^3 - (11/5)H^2 + (8/5)H) / (H-2)^2
RationalFn<Real> sigma_fn_crit() {
    return {Poly<Real>({Real(0), Real(8) / 5, Real(-11) / 5, Real(4) / 5}),
            Poly<Real>({Real(4), Real(-4), Real(1)})};
}

RationalFn<Real> a_fn_crit() {
    return {Poly<Real>({Real(0), pow(Real(2), Real(2) / 3)}), Poly<Real>({Real(10), Real(-5)})};
}

struct LogLogFit {
    double slope = 0, intercept = 0;
};

LogLogFit fit_power(const std::vector<double>& y, std::size_t k_lo, std::size_t k_hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        if (!(y[k] > 0)) continue;
        double lx = std::log((double)k), ly = std::log(y[k]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++n;
    }
    if (n < 8) throw precision_error("too few positive terms for the tail fit");
    double d = n * sxx - sx * sx;
    LogLogFit f;
    f.slope = (n * sxy - sx * sy) / d;
    f.intercept = (sy * sxx - sx * sxy) / d;
    return f;
}

// ---- contour extraction ----------------------------------------------------

// H(x) on the circle |x| = r by Newton continuation around the circle.
std::vector<cdd> solve_circle(const UParamT<dd>& par, std::size_t M, double r) {
    std::vector<cdd> Hs(M);
    // x walks the circle through repeated rotation
    dd theta = fft_detail::dd_two_pi() / dd((double)M);
    cdd rot(fft_detail::dd_cos_small(theta), fft_detail::dd_sin_small(theta));
    cdd x(dd(r), dd(0.0));

    auto newton = [&](cdd x0, cdd seed) {
        cdd H = seed;
        for (int it = 0; it < 60; ++it) {
            cdd H2 = H * H;
            cdd F = cdd(par.pre) * (cdd(par.q2) * H2 * H + cdd(par.q1) * H2 + cdd(par.q0) * H) -
                    cdd(par.uc) * x0 * (H - cdd(par.pp));
            cdd Fp = cdd(par.pre) * (cdd(dd(3.0)) * cdd(par.q2) * H2 +
                                     cdd(dd(2.0)) * cdd(par.q1) * H + cdd(par.q0)) -
                     cdd(par.uc) * x0;
            cdd step = F / Fp;
            H = H - step;
            if (to_double(cdd_abs2(step)) < 1e-62) break;
        }
        return H;
    };

    // real starting point: bisection of u_hat(H)/uc = r on (0,1)
    auto ux = [&](double Hr) {
        dd H(Hr);
        dd val = par.pre * (par.q2 * H * H * H + par.q1 * H * H + par.q0 * H) / (H - par.pp);
        return to_double(val / par.uc);
    };
    double lo = 0, hi = 1;
    for (int i = 0; i < 60; ++i) {
        double mid = (lo + hi) / 2;
        (ux(mid) < r ? lo : hi) = mid;
    }
    cdd seed(dd((lo + hi) / 2), dd(0.0));
    for (std::size_t j = 0; j < M; ++j) {
        Hs[j] = newton(x, seed);
        seed = Hs[j];
        x = x * rot; // rotation drift stays ~ M * eps_dd, far below target
    }
    return Hs;
}

// critical Z_hat(H,K) evaluator over cdd with per-K precomputation
struct CritZGrid {
    std::vector<cdd> c3, c2, c1, c0, km2sq, K;
    void prepare(const std::vector<cdd>& Hs) {
        std::size_t M = Hs.size();
        c3.resize(M); c2.resize(M); c1.resize(M); c0.resize(M);
        km2sq.resize(M); K = Hs;
        for (std::size_t l = 0; l < M; ++l) {
            cdd k = Hs[l], k2 = k * k, k3 = k2 * k;
            c3[l] = k3 - cdd(dd(5.0)) * k2 + cdd(dd(8.5)) * k - cdd(dd(5.0));
            c2[l] = cdd(dd(-5.0)) * k3 + cdd(dd(24.0)) * k2 - cdd(dd(313.0 / 8)) * k +
                    cdd(dd(22.0));
            c1[l] = cdd(dd(8.5)) * k3 - cdd(dd(313.0 / 8)) * k2 + cdd(dd(245.0 / 4)) * k -
                    cdd(dd(33.0));
            c0[l] = cdd(dd(-5.0)) * k3 + cdd(dd(22.0)) * k2 - cdd(dd(33.0)) * k + cdd(dd(17.0));
            cdd km2 = k - cdd(dd(2.0));
            km2sq[l] = km2 * km2;
        }
    }
    cdd eval(const cdd& H, const cdd& Hm2sq, std::size_t l) const {
        cdd num = ((c3[l] * H + c2[l]) * H + c1[l]) * H + c0[l];
        cdd den = Hm2sq * km2sq[l] * (H + K[l] - cdd(dd(2.0)));
        return cdd(dd(-1.6)) * H * K[l] * num / den;
    }
};

// high-temperature Z(u,v) evaluator from the solved functional equations
struct HtZGrid {
    dd t, T, nu, Z1s;
    RatT<dd> uf, zf;
    std::vector<cdd> U, F, tZ1;

    cdd eval_u(const cdd& H) const { return uf.num.eval(H) / uf.den.eval(H); }
    cdd eval_z0(const cdd& H) const { return zf.num.eval(H) / zf.den.eval(H); }

    void prepare(const std::vector<cdd>& Hs) {
        std::size_t M = Hs.size();
        U.resize(M); F.resize(M); tZ1.resize(M);
        for (std::size_t l = 0; l < M; ++l) {
            cdd u = eval_u(Hs[l]);
            cdd z0 = eval_z0(Hs[l]);
            U[l] = cdd(t) * cdd(t) * u;
            F[l] = cdd(t) * z0 / u;
            tZ1[l] = (U[l] * F[l] * (cdd(dd(1.0)) - cdd(nu) * F[l]) - cdd(nu) * U[l] * U[l] -
                      cdd(nu) * cdd(T) * (F[l] - cdd(Z1s))) /
                     (cdd(nu) * cdd(T));
        }
    }
    cdd eval(std::size_t j, std::size_t l) const {
        cdd num = U[j] * U[j] * U[l] * U[l] - cdd(T) * U[j] * U[l] * (tZ1[j] + tZ1[l]);
        cdd den = cdd(T) * U[j] * U[l] * (cdd(dd(1.0)) - F[j] - F[l]) -
                  cdd(T) * cdd(T) * (U[j] + U[l]);
        return num / den;
    }
};

std::vector<double> extract_zeta(const UParamSpec& spec, const Real& nu, std::size_t zmax,
                                 std::size_t M, double r, bool critical, const Real& Z1s) {
    if (M & (M - 1)) throw domain_error("grid_points must be a power of two");
    if (2 * zmax + 16 > M) throw capacity_error("zeta table larger than the sampling grid");
    auto par = u_param_as<dd>(spec);
    auto Hs = solve_circle(par, M, r);
    auto tw = fft_twiddles(M);

    CritZGrid cg;
    HtZGrid hg;
    if (critical) {
        cg.prepare(Hs);
    } else {
        Real S = C::S_of_nu(nu);
        hg.t = to_dd(C::t_c_of_nu(nu));
        hg.T = to_dd(C::T_crit(S));
        hg.nu = to_dd(nu);
        hg.Z1s = to_dd(Z1s);
        hg.uf = convert<dd>(C::u_hat_ht(S));
        hg.zf = convert<dd>(C::z0_hat_ht(S));
        hg.prepare(Hs);
    }

    std::vector<cdd> rows((zmax + 1) * M);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t j = 0; j < (std::ptrdiff_t)M; ++j) {
        std::vector<cdd> V(M);
        if (critical) {
            cdd H = Hs[j];
            cdd Hm2 = H - cdd(dd(2.0));
            cdd Hm2sq = Hm2 * Hm2;
            for (std::size_t l = 0; l < M; ++l) V[l] = cg.eval(H, Hm2sq, l);
        } else {
            for (std::size_t l = 0; l < M; ++l) V[l] = hg.eval(j, l);
        }
        fft_cdd(V, tw);
        for (std::size_t q = 0; q <= zmax; ++q) rows[q * M + j] = V[q];
    }

    std::vector<double> zeta(zmax * zmax, 0.0);
    std::vector<dd> rinv(2 * zmax + 1);
    rinv[0] = dd(1.0);
    for (std::size_t s = 1; s < rinv.size(); ++s) rinv[s] = rinv[s - 1] / dd(r);
    dd m2inv = dd(1.0) / (dd((double)M) * dd((double)M));
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t q = 1; q <= (std::ptrdiff_t)zmax; ++q) {
        std::vector<cdd> col(rows.begin() + q * M, rows.begin() + (q + 1) * M);
        fft_cdd(col, tw);
        for (std::size_t p = 1; p <= zmax; ++p)
            zeta[(p - 1) * zmax + (q - 1)] =
                to_double(col[p].re * m2inv * rinv[p + q]);
    }
    return zeta;
}

} // namespace

UParamSpec u_param(const Real& nu) {
    if (abs(nu - C::nu_c()) < Real("1e-60")) {
        Real sqrt7 = sqrt(Real(7));
        Real pre = 4 * (sqrt7 - 4) / pow(50 * sqrt7 - 110, Real(2) / 3);
        return {pre, Real(2), Real(-6), Real(5), Real(2), C::u_c_crit()};
    }
    Real S = C::S_of_nu(nu);
    Real pre = pow(C::T_crit(S), Real(-2) / 3) * (2 - 3 * S) / (36 * S * S * (S - 1) * (S - 1));
    return {pre, 3 * S - 2, 2 - 4 * S, -6 * S * S * S + 10 * S * S - 3 * S, 2 * S,
            C::u_c_of_S(S)};
}

template <typename T>
double inversion_residual_impl(const UParamT<T>& par, const std::vector<T>& h,
                               std::size_t order) {
    Poly<T> num({T(0), par.pre * par.q0, par.pre * par.q1, par.pre * par.q2});
    Poly<T> den({T(0) - par.pp, T(1)});
    auto n = fps_compose_poly(num, h, order);
    auto d = fps_compose_poly(den, h, order);
    auto u = fps_div(n, d, order);
    double worst = 0;
    for (std::size_t i = 0; i <= order; ++i) {
        T want = (i == 1) ? par.uc : T(0);
        worst = std::max(worst, mag(u[i] - want) );
    }
    return worst;
}

template <typename T>
double inversion_residual(const UParamT<T>& par, const std::vector<T>& h, std::size_t order) {
    return inversion_residual_impl(par, h, order);
}
template double inversion_residual<dd>(const UParamT<dd>&, const std::vector<dd>&, std::size_t);
template double inversion_residual<Real>(const UParamT<Real>&, const std::vector<Real>&,
                                         std::size_t);

double CoefficientTables::zeta_at(std::size_t p, std::size_t q) const {
    if (p < q) std::swap(p, q);
    if (q == 0) {
        if (p == 0 || p > k_cut) throw missing_table_error("w index out of range");
        return w[p];
    }
    if (!has_zeta(p, q)) throw missing_table_error("zeta index out of range");
    return zeta[(p - 1) * zmax + (q - 1)];
}

double CoefficientTables::w_at(std::size_t k) const {
    if (k == 0) throw domain_error("w is indexed from 1");
    if (k <= k_cut) return w[k];
    return tail_C * std::pow((double)k, -tail_alpha);
}

CoefficientTables build_tables(const Real& nu, const BuildOptions& opt) {
    const bool critical = abs(nu - C::nu_c()) < Real("1e-60");
    if (!(nu > 1) || nu > C::nu_c() + Real("1e-110"))
        throw domain_error("tables are built for nu in (1, nu_c]");

    CoefficientTables t;
    t.nu = (double)nu;
    t.digits = 31;
    t.k_cut = opt.k_max;
    t.p_max = opt.want_a_sigma && critical ? opt.k_max : 0;
    t.t_c = (double)(critical ? C::t_c_crit() : C::t_c_of_nu(nu));
    t.u_c = (double)C::u_c_of_nu(nu);
    t.Z0_uc = (double)C::Z0_at_uc(nu);

    UParamSpec spec = u_param(nu);
    auto par = u_param_as<dd>(spec);
    auto H = invert_series<dd>(par, opt.k_max);
    double resid = inversion_residual<dd>(par, H, std::min<std::size_t>(opt.k_max, 4096));
    if (resid > 1e-20) throw precision_error("series inversion residual " + std::to_string(resid));

    RationalFn<Real> z0 = critical ? C::z0_hat_crit() : C::z0_hat_ht(C::S_of_nu(nu));
    auto W = compose(convert<dd>(z0), H, opt.k_max);
    t.w.assign(opt.k_max + 1, 0.0);
    for (std::size_t k = 1; k <= opt.k_max; ++k) {
        t.w[k] = to_double(W[k]);
        if (!(t.w[k] > 0))
            throw precision_error("nonpositive w at k=" + std::to_string(k));
    }

    if (t.p_max) {
        auto A = compose(convert<dd>(a_fn_crit()), H, t.p_max);
        t.a_scaled.assign(t.p_max + 1, 0.0);
        t.a_scaled[0] = (double)C::a0();
        for (std::size_t p = 1; p <= t.p_max; ++p) {
            t.a_scaled[p] = to_double(A[p]);
            if (!(t.a_scaled[p] > 0))
                throw precision_error("nonpositive a at p=" + std::to_string(p));
        }
        auto Sg = compose(convert<dd>(sigma_fn_crit()), H, t.p_max);
        t.sigma.assign(t.p_max + 1, 0.0);
        for (std::size_t p = 1; p <= t.p_max; ++p) t.sigma[p] = to_double(Sg[p]);
    }

    if (opt.zeta_size) {
        t.zmax = opt.zeta_size;
        Real Z1s = C::t_c_of_nu(nu) * C::z10_at_tc(nu);
        t.zeta = extract_zeta(spec, nu, t.zmax, opt.grid_points, opt.radius, critical, Z1s);
        if (opt.radius_check > 0) {
            auto z2 = extract_zeta(spec, nu, t.zmax, opt.grid_points, opt.radius_check,
                                   critical, Z1s);
            double worst = 0;
            for (std::size_t i = 0; i < t.zeta.size(); ++i) {
                double denom = std::max(std::abs(t.zeta[i]), 1e-300);
                worst = std::max(worst, std::abs(t.zeta[i] - z2[i]) / denom);
            }
            t.zeta_radius_check = worst;
            if (worst > 1e-10)
                throw precision_error("zeta radius robustness " + std::to_string(worst));
        }
    }

    // fitted pure power law for the sampling tail
    auto fit = fit_power(t.w, std::max<std::size_t>(2, t.k_cut / 2), t.k_cut);
    t.tail_alpha = -fit.slope;
    t.tail_C = std::exp(fit.intercept);
    double wsum = 0;
    for (std::size_t k = t.k_cut; k >= 1; --k) wsum += t.w[k];
    t.tail_mass = t.Z0_uc - wsum;
    double fitted = t.tail_C * std::pow(t.k_cut + 0.5, 1.0 - t.tail_alpha) / (t.tail_alpha - 1);
    t.tail_fit_residual = std::abs(fitted / t.tail_mass - 1.0);
    return t;
}

std::vector<double> w_sequence(std::size_t k_max, const Real& nu) {
    BuildOptions opt;
    opt.k_max = k_max;
    opt.zeta_size = 0;
    opt.want_a_sigma = false;
    return build_tables(nu, opt).w;
}

std::vector<double> a_sequence(std::size_t p_max) {
    BuildOptions opt;
    opt.k_max = p_max;
    opt.zeta_size = 0;
    return build_tables(C::nu_c(), opt).a_scaled;
}

std::vector<double> zeta_row(const CoefficientTables& t, std::size_t p) {
    std::vector<double> row(t.zmax + 1, 0.0);
    for (std::size_t q = 1; q <= t.zmax; ++q) row[q] = t.zeta_at(p, q);
    return row;
}

// ---- persistence -----------------------------------------------------------

namespace {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
    const unsigned char* b = (const unsigned char*)data;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 1099511628211ULL;
    }
    return h;
}

template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <typename T>
void get(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof v);
}

void put_vec(std::ostream& os, const std::vector<double>& v) {
    put(os, (std::uint64_t)v.size());
    os.write(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
}
void get_vec(std::istream& is, std::vector<double>& v) {
    std::uint64_t n = 0;
    get(is, n);
    v.resize(n);
    is.read(reinterpret_cast<char*>(v.data()), n * sizeof(double));
}

} // namespace

std::uint64_t CoefficientTables::content_hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    h = fnv1a(&nu, sizeof nu, h);
    h = fnv1a(&k_cut, sizeof k_cut, h);
    h = fnv1a(&p_max, sizeof p_max, h);
    h = fnv1a(&zmax, sizeof zmax, h);
    double scalars[] = {t_c, u_c, Z0_uc, tail_C, tail_alpha, tail_mass,
                        tail_fit_residual, zeta_radius_check};
    h = fnv1a(scalars, sizeof scalars, h);
    h = fnv1a(w.data(), w.size() * 8, h);
    h = fnv1a(a_scaled.data(), a_scaled.size() * 8, h);
    h = fnv1a(sigma.data(), sigma.size() * 8, h);
    h = fnv1a(zeta.data(), zeta.size() * 8, h);
    return h;
}

void save_tables(const CoefficientTables& t, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot write " + path);
    os.write("ISTCOEF1", 8);
    put(os, t.nu);
    put(os, t.digits);
    put(os, (std::uint64_t)t.k_cut);
    put(os, (std::uint64_t)t.p_max);
    put(os, (std::uint64_t)t.zmax);
    put(os, t.t_c);
    put(os, t.u_c);
    put(os, t.Z0_uc);
    put(os, t.tail_C);
    put(os, t.tail_alpha);
    put(os, t.tail_mass);
    put(os, t.tail_fit_residual);
    put(os, t.zeta_radius_check);
    put_vec(os, t.w);
    put_vec(os, t.a_scaled);
    put_vec(os, t.sigma);
    put_vec(os, t.zeta);
    put(os, t.content_hash());
}

CoefficientTables load_tables(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot read " + path);
    char magic[8];
    is.read(magic, 8);
    if (std::memcmp(magic, "ISTCOEF1", 8) != 0) throw io_error("not a coefficient table file");
    CoefficientTables t;
    std::uint64_t k = 0, p = 0, z = 0;
    get(is, t.nu);
    get(is, t.digits);
    get(is, k);
    get(is, p);
    get(is, z);
    t.k_cut = k;
    t.p_max = p;
    t.zmax = z;
    get(is, t.t_c);
    get(is, t.u_c);
    get(is, t.Z0_uc);
    get(is, t.tail_C);
    get(is, t.tail_alpha);
    get(is, t.tail_mass);
    get(is, t.tail_fit_residual);
    get(is, t.zeta_radius_check);
    get_vec(is, t.w);
    get_vec(is, t.a_scaled);
    get_vec(is, t.sigma);
    get_vec(is, t.zeta);
    std::uint64_t stored = 0;
    get(is, stored);
    if (!is || stored != t.content_hash()) throw io_error("coefficient table hash mismatch");
    return t;
}

std::optional<CoefficientTables> try_load_tables(const std::string& path) {
    try {
        return load_tables(path);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::string default_cache_dir() {
    if (const char* env = std::getenv("ISINGTRI_CACHE_DIR")) return env;
    return "isingtri-cache";
}

CoefficientTables load_or_build(const Real& nu, const BuildOptions& opt,
                                const std::string& cache_dir) {
    char name[160];
    std::snprintf(name, sizeof name, "coeffs_nu%.10f_k%zu_z%zu_g%zu.tbl", (double)nu,
                  opt.k_max, opt.zeta_size, opt.grid_points);
    std::filesystem::create_directories(cache_dir);
    std::string path = cache_dir + "/" + name;
    if (auto t = try_load_tables(path)) return *t;
    CoefficientTables t = build_tables(nu, opt);
    save_tables(t, path);
    return t;
}

} // namespace isingtri::coeffs
