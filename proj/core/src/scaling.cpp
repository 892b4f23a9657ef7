#include "isingtri/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "isingtri/constants.hpp"
#include "isingtri/errors.hpp"
#include "isingtri/quadrature.hpp"

namespace isingtri::scaling {

namespace C = isingtri::constants;

namespace {

double mu_d() {
    static const double v = (double)C::mu();
    return v;
}

// Chebyshev fit of log c(e^u): c(lambda) is analytic in log lambda, so a few
// dozen nodes reach full double precision. Used by the diagonal reference
// law, where the integrand needs c at a continuum of ratios.
class CLambdaCheb {
  public:
    CLambdaCheb(double lmin, double lmax, std::size_t n = 72)
        : a_(std::log(lmin)), b_(std::log(lmax)), coef_(n) {
        std::vector<double> fv(n);
        for (std::size_t k = 0; k < n; ++k) {
            double xk = std::cos(M_PI * (k + 0.5) / n);
            double u = 0.5 * (a_ + b_) + 0.5 * (b_ - a_) * xk;
            fv[k] = std::log(
                (double)C::c_lambda(Real(std::exp(u)), C::Regime::critical));
        }
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < n; ++k)
                s += fv[k] * std::cos(M_PI * j * (k + 0.5) / n);
            coef_[j] = 2.0 / n * s;
        }
    }

    double operator()(double lambda) const {
        double u = std::log(lambda);
        double x = (2 * u - a_ - b_) / (b_ - a_);
        x = std::clamp(x, -1.0, 1.0);
        // Clenshaw
        double b1 = 0, b2 = 0;
        for (std::size_t j = coef_.size(); j-- > 1;) {
            double t = 2 * x * b1 - b2 + coef_[j];
            b2 = b1;
            b1 = t;
        }
        return std::exp(x * b1 - b2 + 0.5 * coef_[0]);
    }

  private:
    double a_, b_;
    std::vector<double> coef_;
};

} // namespace

// ---- ecdf ---------------------------------------------------------------------

EmpiricalCDF::EmpiricalCDF(std::vector<double> samples) : x_(std::move(samples)) {
    std::sort(x_.begin(), x_.end());
}

double EmpiricalCDF::operator()(double t) const {
    return (double)(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin()) / x_.size();
}

double EmpiricalCDF::ks_against(const std::function<double(double)>& cdf) const {
    double worst = 0;
    const double n = (double)x_.size();
    for (std::size_t i = 0; i < x_.size(); ++i) {
        double F = cdf(x_[i]);
        worst = std::max(worst, std::abs((i + 1) / n - F));
        worst = std::max(worst, std::abs(F - i / n));
    }
    return worst;
}

double EmpiricalCDF::ks_two_sample(const EmpiricalCDF& other) const {
    double worst = 0;
    std::size_t i = 0, j = 0;
    const double na = (double)x_.size(), nb = (double)other.x_.size();
    while (i < x_.size() && j < other.x_.size()) {
        double d = std::min(x_[i], other.x_[j]);
        while (i < x_.size() && x_[i] <= d) ++i;
        while (j < other.x_.size() && other.x_[j] <= d) ++j;
        worst = std::max(worst, std::abs(i / na - j / nb));
    }
    return worst;
}

// ---- reference laws --------------------------------------------------------------

double reference_law_halfplane(double t) {
    if (t <= 0) return 0;
    return 1.0 - std::pow(1.0 + mu_d() * t, -4.0 / 3);
}

double reference_law_diagonal(double t, double lambda) {
    if (!(lambda > 0)) throw domain_error("lambda must be positive");
    if (t <= 0) return 0;
    if (lambda == 1.0) return 1.0 - std::pow(1.0 + mu_d() * t, -11.0 / 3);
    // lambda(s) = (lambda + mu s)/(1 + mu s) sweeps from lambda to 1
    double lo = std::min(lambda, 1.0) * 0.999, hi = std::max(lambda, 1.0) * 1.001;
    static thread_local std::unique_ptr<CLambdaCheb> cheb;
    static thread_local double cheb_lo = 0, cheb_hi = 0;
    if (!cheb || lo < cheb_lo || hi > cheb_hi) {
        cheb = std::make_unique<CLambdaCheb>(lo, hi);
        cheb_lo = lo;
        cheb_hi = hi;
    }
    const double mu = mu_d();
    auto integrand = [&](double s) {
        double lam_s = (lambda + mu * s) / (1 + mu * s);
        double c = (*cheb)(lam_s);
        double cinf = 4.0 / 3 * mu / (c * std::pow(lam_s, 7.0 / 3));
        return cinf / (1 + mu * s);
    };
    double I = integrate<double>(integrand, 0.0, t, 1e-12);
    return 1.0 - std::exp(-I);
}

double normalized_display_survival(double t, double lambda) {
    auto upper_integral = [&](double t0) {
        // int_{t0}^inf (1+s)^{-7/3} (lambda+s)^{-7/3} ds, substituted so the
        // integrand stays uniformly smooth
        long double A = 1 + t0, B = lambda + t0;
        long double scale = std::max(A, B);
        auto f = [&](long double y) {
            long double x = scale * y;
            return powl(A + x, -7.0L / 3) * powl(B + x, -7.0L / 3) * scale;
        };
        return (double)integrate_halfline<long double>(f, 1e-18L);
    };
    return upper_integral(t) / upper_integral(0);
}

// ---- fits --------------------------------------------------------------------------

SlopeFit fit_tail_exponent(const std::vector<double>& y, std::size_t k_lo, std::size_t k_hi) {
    if (k_hi >= y.size() || k_lo < 1 || k_lo >= k_hi)
        throw domain_error("fit range outside the data");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        if (!(y[k] > 0)) continue;
        double lx = std::log((double)k), ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 3) throw domain_error("too few points for the fit");
    double det = n * sxx - sx * sx;
    SlopeFit f;
    f.points = n;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy * sxx - sx * sxy) / det;
    double ss = 0;
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        if (!(y[k] > 0)) continue;
        double r = std::log(y[k]) - (f.intercept + f.slope * std::log((double)k));
        ss += r * r;
    }
    f.stderr_ = std::sqrt(ss / (double)(n - 2) / (sxx - sx * sx / n));
    return f;
}

SlopeFit fit_survival_exponent(const std::vector<double>& samples, double n_lo, double n_hi,
                               std::size_t grid) {
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < grid; ++i) {
        double ln = std::log(n_lo) + (std::log(n_hi) - std::log(n_lo)) * i / (grid - 1);
        double n = std::exp(ln);
        double surv =
            (double)(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), n)) /
            sorted.size();
        if (surv <= 0) continue;
        pts.emplace_back(ln, std::log(surv));
    }
    if (pts.size() < 3) throw domain_error("too few survival points for the fit");
    for (auto [lx, ly] : pts) {
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double n = (double)pts.size();
    double det = n * sxx - sx * sx;
    SlopeFit f;
    f.points = pts.size();
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy * sxx - sx * sxy) / det;
    double ss = 0;
    for (auto [lx, ly] : pts) {
        double r = ly - (f.intercept + f.slope * lx);
        ss += r * r;
    }
    f.stderr_ = std::sqrt(ss / std::max(1.0, n - 2) / (sxx - sx * sx / n));
    return f;
}

// ---- reports -------------------------------------------------------------------------

std::string ScalingReport::to_json() const {
    nlohmann::ordered_json j;
    j["experiment"] = experiment;
    j["nu"] = nu;
    j["p"] = p;
    j["q"] = q;
    j["lambda"] = lambda;
    j["m"] = m;
    j["runs"] = runs;
    j["seed"] = seed;
    j["ks"] = ks;
    j["fitted_exponent"] = fitted_exponent;
    j["fitted_stderr"] = fitted_stderr;
    j["statistic"] = statistic;
    j["tolerance"] = tolerance;
    j["pass"] = pass;
    return j.dump();
}

std::string ScalingReport::cdf_csv() const {
    std::ostringstream os;
    os << "t,F\n";
    char buf[64];
    for (auto [t, F] : cdf_points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, F);
        os << buf;
    }
    return os.str();
}

namespace {

void attach_cdf(ScalingReport& rep, const EmpiricalCDF& ecdf, std::size_t max_points = 512) {
    const auto& xs = ecdf.sorted();
    std::size_t step = std::max<std::size_t>(1, xs.size() / max_points);
    for (std::size_t i = 0; i < xs.size(); i += step)
        rep.cdf_points.emplace_back(xs[i], (double)(i + 1) / xs.size());
}

} // namespace

// ---- experiments ----------------------------------------------------------------------

ScalingReport hitting_time_experiment_halfplane(const peel::PeelingContext& ctx,
                                                std::int64_t p, std::int64_t m,
                                                std::uint64_t runs, std::uint64_t seed) {
    peel::HalfplaneSampler hp(ctx);
    std::vector<double> t_over_p(runs);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)runs; ++i) {
        CounterRng rng(seed, (std::uint64_t)i);
        std::int64_t P = p;
        std::uint64_t n = 0;
        while (P > m) {
            ++n;
            auto e = hp.draw(rng, P);
            if (e.tag == peel::EventTag::CPlus) P += 1;
            else if (e.tag == peel::EventTag::R) P = e.wrap ? 0 : P - e.k;
        }
        t_over_p[i] = (double)n / (double)p;
    }
    EmpiricalCDF ecdf(std::move(t_over_p));
    ScalingReport rep;
    rep.experiment = "hitting-halfplane";
    rep.nu = ctx.nu();
    rep.p = p;
    rep.q = -1;
    rep.m = m;
    rep.runs = runs;
    rep.seed = seed;
    rep.ks = ecdf.ks_against(reference_law_halfplane);
    rep.tolerance = 0.05;
    rep.pass = rep.ks <= rep.tolerance;
    attach_cdf(rep, ecdf);
    return rep;
}

ScalingReport hitting_time_experiment_diagonal(const peel::PeelingContext& ctx,
                                               std::int64_t p, std::int64_t q, std::int64_t m,
                                               std::uint64_t runs, std::uint64_t seed) {
    std::vector<double> t_over_p(runs);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)runs; ++i) {
        CounterRng rng(seed, (std::uint64_t)i);
        peel::FiniteSampler fs(ctx);
        std::int64_t P = p, Q = q;
        std::uint64_t n = 0;
        while (std::min(P, Q) > m) {
            ++n;
            auto e = fs.draw(rng, P, Q);
            switch (e.tag) {
                case peel::EventTag::CPlus: P += 1; break;
                case peel::EventTag::CMinus: Q += 1; break;
                case peel::EventTag::R: P -= e.k; break;
                case peel::EventTag::L: Q -= e.k; break;
                default: break;
            }
        }
        t_over_p[i] = (double)n / (double)p;
    }
    double lambda = (double)q / (double)p;
    EmpiricalCDF ecdf(std::move(t_over_p));
    ScalingReport rep;
    rep.experiment = "hitting-diagonal";
    rep.nu = ctx.nu();
    rep.p = p;
    rep.q = q;
    rep.lambda = lambda;
    rep.m = m;
    rep.runs = runs;
    rep.seed = seed;
    rep.ks = ecdf.ks_against([&](double t) { return reference_law_diagonal(t, lambda); });
    rep.tolerance = 0.08;
    rep.pass = rep.ks <= rep.tolerance;
    attach_cdf(rep, ecdf);
    return rep;
}

ScalingReport interface_experiment_halfplane(const peel::PeelingContext& ctx, std::int64_t p,
                                             std::uint64_t runs, std::uint64_t seed) {
    std::vector<double> eta_over_p(runs);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)runs; ++i) {
        CounterRng rng(seed, (std::uint64_t)i);
        eta_over_p[i] =
            (double)peel::sample_interface_length(ctx, peel::RegimeTag::halfplane, p, 0, rng) /
            (double)p;
    }
    EmpiricalCDF ecdf(std::move(eta_over_p));
    ScalingReport rep;
    rep.experiment = "interface-halfplane";
    rep.nu = ctx.nu();
    rep.p = p;
    rep.q = -1;
    rep.runs = runs;
    rep.seed = seed;
    rep.ks = ecdf.ks_against(reference_law_halfplane);
    rep.tolerance = 0.06;
    rep.pass = rep.ks <= rep.tolerance;
    attach_cdf(rep, ecdf);
    return rep;
}

ScalingReport interface_experiment_diagonal(const peel::PeelingContext& ctx, std::int64_t p,
                                            std::int64_t q, std::uint64_t runs,
                                            std::uint64_t seed) {
    std::vector<double> eta_over_p(runs);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)runs; ++i) {
        CounterRng rng(seed, (std::uint64_t)i);
        eta_over_p[i] =
            (double)peel::sample_interface_length(ctx, peel::RegimeTag::finite, p, q, rng) /
            (double)p;
    }
    double lambda = (double)q / (double)p;
    EmpiricalCDF ecdf(std::move(eta_over_p));
    ScalingReport rep;
    rep.experiment = "interface-diagonal";
    rep.nu = ctx.nu();
    rep.p = p;
    rep.q = q;
    rep.lambda = lambda;
    rep.runs = runs;
    rep.seed = seed;
    rep.ks = ecdf.ks_against([&](double t) { return reference_law_diagonal(t, lambda); });
    rep.tolerance = 0.09;
    rep.pass = rep.ks <= rep.tolerance;
    attach_cdf(rep, ecdf);
    return rep;
}

ScalingReport stable_selfsimilarity_test(const peel::PeelingContext& ctx, std::uint64_t n1,
                                         std::uint64_t runs, std::uint64_t seed,
                                         std::optional<double> exponent_override,
                                         bool center_override_off) {
    const bool critical = ctx.critical();
    const double alpha_exp = exponent_override.value_or(critical ? 0.75 : 2.0 / 3);
    const bool center = critical && !center_override_off;
    const std::uint64_t n2 = 4 * n1;
    peel::InfiniteSampler inf(ctx, false);
    const double mu = mu_d();

    auto marginal = [&](std::uint64_t steps, std::uint64_t stream0) {
        std::vector<double> vals(runs);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)runs; ++i) {
            CounterRng rng(seed, stream0 + (std::uint64_t)i);
            std::int64_t X = 0;
            peel::BoundaryState full = peel::initial_state(peel::RegimeTag::fullplane, 0, 0);
            for (std::uint64_t s = 0; s < steps; ++s) {
                auto [dx, dy] = peel::event_delta(full, inf.draw(rng));
                X += dx;
            }
            double centered = (double)X - (center ? mu * (double)steps : 0.0);
            vals[i] = centered / std::pow((double)steps, alpha_exp);
        }
        return EmpiricalCDF(std::move(vals));
    };

    EmpiricalCDF a = marginal(n1, 1);
    EmpiricalCDF b = marginal(n2, 1 + runs);

    ScalingReport rep;
    rep.experiment = "stable-selfsimilarity";
    rep.nu = ctx.nu();
    rep.runs = runs;
    rep.seed = seed;
    rep.fitted_exponent = alpha_exp;
    rep.ks = a.ks_two_sample(b);
    rep.tolerance = 0.02;
    rep.pass = rep.ks <= rep.tolerance;
    attach_cdf(rep, a);
    return rep;
}

HullResult hull_experiment(const peel::PeelingContext& ctx, std::uint64_t runs,
                           std::uint64_t seed, std::uint64_t step_budget) {
    peel::InfiniteSampler inf(ctx, false);
    std::vector<double> hull_sizes(runs);
    std::vector<double> swallow_sum(runs), swallow_n(runs);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)runs; ++i) {
        CounterRng rng(seed, (std::uint64_t)i);
        // counts of revealed vertices still on the frontier, per side
        std::int64_t n_plus = 0, n_minus = 0;
        double sw = 0;
        std::uint64_t n = 0;
        bool touched = false;
        while (!touched && n < step_budget) {
            ++n;
            auto e = inf.draw(rng);
            switch (e.tag) {
                case peel::EventTag::CPlus: n_plus += 1; break;
                case peel::EventTag::CMinus: n_minus += 1; break;
                case peel::EventTag::L:
                    sw += (double)e.k;
                    n_minus = std::max<std::int64_t>(0, n_minus - e.k);
                    break;
                case peel::EventTag::R:
                    sw += (double)e.k;
                    if (e.k >= n_plus)
                        touched = true; // reached the original + boundary
                    else
                        n_plus -= e.k;
                    break;
                default: break;
            }
        }
        // budget-exhausted runs stand in as right-censored large hulls
        hull_sizes[i] = (double)(n_plus + n_minus);
        swallow_sum[i] = sw;
        swallow_n[i] = (double)n;
    }
    HullResult out;
    auto fit = fit_survival_exponent(hull_sizes, 100, 10000);
    out.report.experiment = "hull";
    out.report.nu = ctx.nu();
    out.report.runs = runs;
    out.report.seed = seed;
    out.report.fitted_exponent = fit.slope;
    out.report.fitted_stderr = fit.stderr_;
    out.report.tolerance = 0.1;
    out.report.pass = std::abs(fit.slope + 0.5) <= out.report.tolerance;
    double ssum = 0, scount = 0;
    for (std::size_t i = 0; i < runs; ++i) {
        ssum += swallow_sum[i];
        scount += swallow_n[i];
    }
    out.mean_swallowed_per_step = ssum / scount;
    out.report.statistic = out.mean_swallowed_per_step;
    EmpiricalCDF ecdf(std::move(hull_sizes));
    attach_cdf(out.report, ecdf);
    return out;
}

DriftResult drift_experiment(const peel::PeelingContext& ctx, std::uint64_t draws,
                             std::uint64_t seed) {
    peel::InfiniteSampler inf(ctx, false);
    const int threads = 8;
    std::vector<std::map<std::int64_t, std::uint64_t>> counts(threads);
#pragma omp parallel for schedule(static)
    for (int t = 0; t < threads; ++t) {
        CounterRng rng(seed, (std::uint64_t)t);
        std::uint64_t quota = draws / threads + (t < (int)(draws % threads) ? 1 : 0);
        peel::BoundaryState full = peel::initial_state(peel::RegimeTag::fullplane, 0, 0);
        auto& local = counts[t];
        for (std::uint64_t i = 0; i < quota; ++i) {
            auto [dx, dy] = peel::event_delta(full, inf.draw(rng));
            local[dx] += 1;
        }
    }
    std::map<std::int64_t, std::uint64_t> hist;
    for (const auto& local : counts)
        for (auto [v, c] : local) hist[v] += c;

    long double sum = 0;
    std::uint64_t n = 0;
    for (auto [v, c] : hist) {
        sum += (long double)v * c;
        n += c;
    }
    double mean = (double)(sum / n);

    // trimmed spread: drop the most extreme 1e-4 of the mass on each side
    std::uint64_t trim = (std::uint64_t)(n * 1e-4) + 1;
    std::int64_t lo_cut = hist.begin()->first, hi_cut = hist.rbegin()->first;
    {
        std::uint64_t acc = 0;
        for (auto it = hist.begin(); it != hist.end(); ++it) {
            acc += it->second;
            if (acc >= trim) {
                lo_cut = it->first;
                break;
            }
        }
        acc = 0;
        for (auto it = hist.rbegin(); it != hist.rend(); ++it) {
            acc += it->second;
            if (acc >= trim) {
                hi_cut = it->first;
                break;
            }
        }
    }
    long double tsum = 0, tsum2 = 0, tn = 0;
    for (auto [v, c] : hist) {
        if (v < lo_cut || v > hi_cut) continue;
        tsum += (long double)v * c;
        tsum2 += (long double)v * v * c;
        tn += c;
    }
    double tmean = (double)(tsum / tn);
    double tvar = (double)(tsum2 / tn) - tmean * tmean;
    double se = std::sqrt(tvar / (double)n);

    DriftResult out;
    out.mean = mean;
    out.stderr_trimmed = se;
    out.report.experiment = "drift";
    out.report.nu = ctx.nu();
    out.report.runs = draws;
    out.report.seed = seed;
    out.report.statistic = mean;
    double target = ctx.critical() ? mu_d() : 0.0;
    out.report.tolerance = 3 * se;
    out.report.pass = std::abs(mean - target) <= 3 * se;
    return out;
}

} // namespace isingtri::scaling
