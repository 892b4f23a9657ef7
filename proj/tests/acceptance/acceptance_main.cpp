// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned in code next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "isingtri/coefficients.hpp"
#include "isingtri/constants.hpp"
#include "isingtri/enumerate.hpp"
#include "isingtri/map_build.hpp"
#include "isingtri/peeling.hpp"
#include "isingtri/scaling.hpp"
#include "isingtri/series_engine.hpp"

using namespace isingtri;
namespace C = isingtri::constants;
namespace S = isingtri::scaling;

namespace {

int g_failures = 0;

double now_s() {
    static auto t0 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void criterion(int idx, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s  (%s)\n", pass ? "PASS" : "FAIL", idx, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

const series::PartitionTable& table30() {
    static const series::PartitionTable t = series::extend_table(series::PartitionTable(), 30);
    return t;
}

coeffs::CoefficientTables load_ctx_tables(const Real& nu, bool critical) {
    return coeffs::load_or_build(nu, coeffs::production_options(critical),
                                 coeffs::default_cache_dir());
}

// --- criteria ----------------------------------------------------------------

void criterion_1_oracle() {
    double t0 = now_s();
    bool ok = true;
    std::string first_bad;
    for (std::size_t p = 0; p <= 6 && ok; ++p) {
        for (std::size_t q = 0; q <= p && ok; ++q) {
            if (p + q < 1 || p + q > 6) continue;
            for (std::size_t n = 1; n <= 8 && ok; ++n) {
                auto oracle = enumerate::z_oracle(p, q, n);
                if (oracle != table30().entry(p, q, n)) {
                    ok = false;
                    first_bad = "(" + std::to_string(p) + "," + std::to_string(q) + "," +
                                std::to_string(n) + ")";
                }
            }
        }
    }
    double dt = now_s() - t0;
    bool in_time = dt <= 300.0;
    criterion(1, "oracle equivalence p+q<=6, n<=8", ok && in_time,
              (ok ? "all coefficients equal" : "mismatch at " + first_bad) + ", " + fmt(dt) +
                  " s (limit 300)");
}

void criterion_2_master_equation() {
    auto rep = series::check_master_equation(table30(), 8);
    criterion(2, "functional-equation residual at order 8", rep.exact_zero(),
              "max |residual| = " + rep.max_abs_eq_dobrushin.str() + " / " +
                  rep.max_abs_eq_mono.str());
}

void criterion_3_constants() {
    std::ostringstream detail;
    bool ok = true;
    auto check = [&](const char* what, const Real& err, const Real& tol) {
        bool good = abs(err) <= tol;
        ok = ok && good;
        if (!good) detail << what << " err " << fmt((double)abs(err)) << "; ";
    };
    for (const char* nus : {"1.05", "1.2", "1.35"})
        check("normalization", C::p_infinity_normalization(Real(nus)) - 1, Real("1e-12"));
    check("normalization@nu_c", C::p_infinity_normalization(C::nu_c()) - 1, Real("1e-12"));
    Real sqrt7 = sqrt(Real(7));
    check("Z0(1)", C::Z0_at_uc(C::nu_c()) - (2 * sqrt7 - 3) / 5, Real("1e-50"));
    check("a0", C::a0_radical() - pow(Real(2), Real(2) / 3) / 5, Real("1e-50"));
    check("drift(nu_c)", C::drift(C::nu_c()) - (11 - 5 * sqrt7) / (12 * sqrt7 - 48),
          Real("1e-9"));
    check("drift(1.2)", C::drift(Real("1.2")), Real("1e-10"));
    check("c(1)", C::c_lambda(Real(1), C::Regime::critical) - Real(4) / 11, Real("1e-12"));
    check("c_tilde", C::c_tilde_infinity() - Real(4) / 3 * C::mu(), Real("1e-9"));
    check("pure gravity",
          C::t_c_of_nu(Real("1.0001")) / C::u_c_of_nu(Real("1.0001")) -
              1 / (2 * sqrt(Real(3))),
          Real("1e-3"));
    criterion(3, "constants identities at 60 digits", ok,
              ok ? "all identities hold" : detail.str());
}

void criterion_4_normalizations(const peel::PeelingContext& ctx) {
    std::ostringstream detail;
    bool ok = true;

    auto inf = peel::law_infinite(ctx, 99999);
    double d_inf = std::abs(inf.total() - 1.0);
    ok &= d_inf <= 1e-9;
    detail << "inf " << fmt(d_inf);

    double worst_p = 0;
    for (std::int64_t p : {1, 5, 50, 200}) {
        auto law = peel::law_halfplane(ctx, p, 99999);
        worst_p = std::max(worst_p, std::abs(law.total() - 1.0));
    }
    ok &= worst_p <= 1e-7;
    detail << ", halfplane " << fmt(worst_p);

    auto mono = peel::law_mono(ctx, 99999);
    double d0 = std::abs(mono.total() - 1.0);
    ok &= d0 <= 1e-10;
    detail << ", mono " << fmt(d0);

    // finite laws: truncated event masses over the truncated partition
    // function sum to one identically in rational arithmetic, and the law's
    // truncation tail stays below 1e-6 at the chosen subcritical t
    const auto& tab = table30();
    const BigRational tr(1, 8), nur(5, 4);
    const std::size_t N = tab.max_order();
    bool exact_ok = true;
    for (std::int64_t s = 2; s <= 12 && exact_ok; ++s) {
        for (std::int64_t P = 1; P < s && exact_ok; ++P) {
            std::int64_t Q = s - P;
            BigRational z = series::eval_partition_exact(P, Q, tr, nur, tab, N);
            BigRational sum(0);
            sum += tr * series::eval_partition_exact(P + 1, Q, tr, nur, tab, N - 1);
            sum += tr * series::eval_partition_exact(P, Q + 1, tr, nur, tab, N - 1);
            auto conv = [&](std::int64_t a, std::int64_t b, std::int64_t c) {
                BigRational acc(0);
                for (std::size_t j = 1; j + 1 <= N - 1; ++j) {
                    const auto& za = tab.entry(a, b, j);
                    if (za.is_zero()) continue;
                    BigRational zav = za.eval(nur);
                    for (std::size_t i = 1; i + j <= N - 1; ++i) {
                        const auto& zb = tab.entry(c, 0, i);
                        if (zb.is_zero()) continue;
                        BigRational tw(1);
                        for (std::size_t w = 0; w < i + j + 1; ++w) tw *= tr;
                        acc += tw * zav * zb.eval(nur);
                    }
                }
                return acc;
            };
            for (std::int64_t k = 0; k < P; ++k) sum += conv(P - k, Q, k + 1);
            for (std::int64_t k = 0; k < Q; ++k) sum += conv(P, Q - k, k + 1);
            if (P == 1 && Q == 1) sum += tr;
            if (sum != z) exact_ok = false;
        }
    }
    ok &= exact_ok;
    detail << ", recursion identity " << (exact_ok ? "exact" : "BROKEN");

    auto ev = series::eval_partition(1, 1, Real(1) / 8, Real(5) / 4, tab);
    double tail_rel = (double)(ev.truncation_bound / ev.value);
    ok &= tail_rel <= 1e-6;
    detail << ", tail " << fmt(tail_rel);

    criterion(4, "probability normalizations", ok, detail.str());
}

void criterion_5_tails(const coeffs::CoefficientTables& tc,
                       const coeffs::CoefficientTables& th) {
    auto fc = S::fit_tail_exponent(tc.w, 1000, 100000);
    auto fh = S::fit_tail_exponent(th.w, 1000, 100000);
    double err_c = std::abs(fc.slope + 7.0 / 3);
    double err_h = std::abs(fh.slope + 5.0 / 2);

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t p = 1000; p <= 10000; ++p) {
        double x = std::pow((double)p, -1.0 / 3);
        double y = tc.a_scaled[p] * std::pow((double)p, 4.0 / 3);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    double det = n * sxx - sx * sx;
    double intercept = (sy * sxx - sx * sxy) / det;
    double lim = (double)abs(C::b_signed() / gamma_minus_one_third());
    double err_a = std::abs(intercept / lim - 1);

    bool ok = err_c <= 0.02 && err_h <= 0.02 && err_a <= 0.01;
    criterion(5, "tail exponents and amplitude", ok,
              "w slope nu_c " + fmt(fc.slope) + " (err " + fmt(err_c) + "), w slope 1.2 " +
                  fmt(fh.slope) + " (err " + fmt(err_h) + "), a intercept rel err " +
                  fmt(err_a));
}

void criterion_6_mc_drift(const peel::PeelingContext& ctx_c,
                          const peel::PeelingContext& ctx_h) {
    double t0 = now_s();
    auto d1 = S::drift_experiment(ctx_c, 10000000, 20260101);
    auto d2 = S::drift_experiment(ctx_h, 10000000, 20260102);
    double dt = now_s() - t0;
    double mu = (double)C::mu();
    bool ok1 = std::abs(d1.mean - mu) <= 3 * d1.stderr_trimmed;
    bool ok2 = std::abs(d2.mean) <= 3 * d2.stderr_trimmed;
    bool in_time = dt <= 120.0;
    criterion(6, "monte carlo drift (1e7 draws)", ok1 && ok2 && in_time,
              "nu_c " + fmt(d1.mean) + "+-" + fmt(d1.stderr_trimmed) + " vs mu " + fmt(mu) +
                  "; 1.2 " + fmt(d2.mean) + "+-" + fmt(d2.stderr_trimmed) + "; " + fmt(dt) +
                  " s (limit 120)");
}

void criterion_7_8_hitting(const peel::PeelingContext& ctx) {
    double t0 = now_s();
    auto r200 = S::hitting_time_experiment_halfplane(ctx, 200, 10, 100000, 31);
    auto r100 = S::hitting_time_experiment_halfplane(ctx, 100, 10, 100000, 32);
    auto r50 = S::hitting_time_experiment_halfplane(ctx, 50, 10, 100000, 33);
    auto rdiag = S::hitting_time_experiment_diagonal(ctx, 60, 60, 10, 100000, 34);
    double dt = now_s() - t0;
    bool ok = r200.ks <= 0.05 && r200.ks < r50.ks && rdiag.ks <= 0.08 && dt <= 1800.0;
    criterion(7, "hitting-time scaling", ok,
              "KS p=200 " + fmt(r200.ks) + " (<=0.05), trend " + fmt(r50.ks) + "->" +
                  fmt(r100.ks) + "->" + fmt(r200.ks) + ", diagonal " + fmt(rdiag.ks) +
                  " (<=0.08), " + fmt(dt) + " s (limit 1800)");

    auto m5 = S::hitting_time_experiment_halfplane(ctx, 200, 5, 100000, 35);
    auto m20 = S::hitting_time_experiment_halfplane(ctx, 200, 20, 100000, 36);
    double gap = std::abs(m5.ks - m20.ks);
    criterion(8, "m-insensitivity at p=200", gap <= 0.02,
              "KS m=5 " + fmt(m5.ks) + ", m=20 " + fmt(m20.ks) + ", gap " + fmt(gap));
}

void criterion_9_stable(const peel::PeelingContext& ctx_c, const peel::PeelingContext& ctx_h) {
    auto sc = S::stable_selfsimilarity_test(ctx_c, 10000, 10000, 41);
    auto sh = S::stable_selfsimilarity_test(ctx_h, 10000, 10000, 42);
    auto neg = S::stable_selfsimilarity_test(ctx_c, 10000, 10000, 41, 0.5);
    bool ok = sc.ks <= 0.02 && sh.ks <= 0.02 && neg.ks >= 0.1;
    criterion(9, "stable self-similarity n vs 4n", ok,
              "KS nu_c " + fmt(sc.ks) + ", 1.2 " + fmt(sh.ks) + " (<=0.02), wrong exponent " +
                  fmt(neg.ks) + " (>=0.1)");
}

void criterion_10_hull(const peel::PeelingContext& ctx_h, const peel::PeelingContext& ctx_p) {
    auto hull = S::hull_experiment(ctx_h, 30000, 51, 10000000);
    double exp_err = std::abs(hull.report.fitted_exponent + 0.5);

    // mean swallowed edges per peeling step just above the percolation point
    peel::InfiniteSampler inf(ctx_p, false);
    CounterRng rng(52, 0);
    double sw = 0;
    const std::size_t N = 10000000;
    for (std::size_t i = 0; i < N; ++i) {
        auto e = inf.draw(rng);
        if (e.tag == peel::EventTag::L || e.tag == peel::EventTag::R) sw += (double)e.k;
    }
    double mean_sw = sw / N;
    double target = 1.0 / std::sqrt(3.0);
    bool ok = exp_err <= 0.1 && std::abs(mean_sw - target) <= 1e-2;
    criterion(10, "hull exponent and swallowed-edge mean", ok,
              "exponent " + fmt(hull.report.fitted_exponent) + " (err " + fmt(exp_err) +
                  " <=0.1), mean swallow@1.0001 " + fmt(mean_sw) + " vs " + fmt(target));
}

void criterion_11_interface(const peel::PeelingContext& ctx) {
    bool ok = true;
    std::string bad;
    CounterRng rng(61, 0);
    std::size_t checked = 0;
    for (int rep = 0; rep < 1000 && ok; ++rep) {
        std::int64_t p = 1 + (std::int64_t)(rng.next_below(8));
        std::int64_t q = 1 + (std::int64_t)(rng.next_below(8));
        auto built = build::sample_finite_map(ctx, p, q, rng);
        auto v = maps::validate_bicolored(built.map, p, q);
        if (!v.ok) {
            ok = false;
            bad = "invariant: " + v.message;
            break;
        }
        auto path = build::interface_path(built.map);
        if (!path.simple || build::interface_length(built.map) != built.main_steps) {
            ok = false;
            bad = "length mismatch at (" + std::to_string(p) + "," + std::to_string(q) + ")";
        }
        ++checked;
    }
    criterion(11, "interface length = peeling steps on sampled maps", ok,
              ok ? std::to_string(checked) + " maps, exact on all" : bad);
}

} // namespace

int main() {
    std::printf("acceptance suite started\n");
    std::fflush(stdout);

    criterion_1_oracle();
    criterion_2_master_equation();
    criterion_3_constants();

    std::printf("-- loading coefficient tables (builds on first run)\n");
    std::fflush(stdout);
    auto tc = load_ctx_tables(C::nu_c(), true);
    auto th = load_ctx_tables(Real("1.2"), false);
    auto tp = load_ctx_tables(Real("1.0001"), false);
    peel::PeelingContext ctx_c(tc), ctx_h(th), ctx_p(tp);

    criterion_4_normalizations(ctx_c);
    criterion_5_tails(tc, th);
    criterion_6_mc_drift(ctx_c, ctx_h);
    criterion_7_8_hitting(ctx_c);
    criterion_9_stable(ctx_c, ctx_h);
    criterion_10_hull(ctx_h, ctx_p);
    criterion_11_interface(ctx_c);

    std::printf("acceptance finished: %d failure(s), %.1f s total\n", g_failures, now_s());
    return g_failures;
}
