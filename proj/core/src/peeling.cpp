#include "isingtri/peeling.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "isingtri/constants.hpp"
#include "isingtri/errors.hpp"

namespace isingtri::peel {

namespace C = isingtri::constants;

// ---- alias table -------------------------------------------------------------

AliasTable::AliasTable(const std::vector<double>& weights) {
    const std::size_t n = weights.size();
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    long double sum = 0;
    for (double w : weights) {
        if (w < 0) throw domain_error("negative weight in alias table");
        sum += w;
    }
    total_ = (double)sum;
    if (n == 0 || !(sum > 0)) return;
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = (double)(weights[i] * n / sum);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i)
        (scaled[i] < 1.0 ? small : large).push_back((std::uint32_t)i);
    while (!small.empty() && !large.empty()) {
        std::uint32_t s = small.back(), l = large.back();
        small.pop_back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] -= 1.0 - scaled[s];
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (auto i : large) prob_[i] = 1.0;
    for (auto i : small) prob_[i] = 1.0;
}

std::size_t AliasTable::sample(CounterRng& rng) const {
    std::size_t i = (std::size_t)rng.next_below(prob_.size());
    return rng.next_double() < prob_[i] ? i : alias_[i];
}

// ---- context -----------------------------------------------------------------

PeelingContext::PowFit PeelingContext::fit_two_point(double alpha, double p1, double v1,
                                                     double p2, double v2) {
    double r1 = v1 * std::pow(p1, alpha), r2 = v2 * std::pow(p2, alpha);
    double x1 = std::pow(p1, -1.0 / 3), x2 = std::pow(p2, -1.0 / 3);
    PowFit f;
    f.alpha = alpha;
    f.A = (r2 * x1 - r1 * x2) / (x1 - x2);
    f.c = f.A != 0 ? (r1 - f.A) / (f.A * x1) : 0;
    return f;
}

PeelingContext::PeelingContext(coeffs::CoefficientTables tables) : tab_(std::move(tables)) {
    critical_ = std::abs(tab_.nu - (double)C::nu_c()) < 1e-12;
    t_over_u_ = tab_.t_c / tab_.u_c;

    // alias over the stored w (k = 1..k_cut)
    std::vector<double> wv(tab_.w.begin() + 1, tab_.w.end());
    w_alias_ = AliasTable(wv);

    std::size_t pm = tab_.p_max;
    if (pm) {
        std::vector<double> gv(tab_.a_scaled.begin() + 1, tab_.a_scaled.end());
        g_alias_ = AliasTable(gv);

        // conv[p] = sum_{k<p} w_{k+1} g(p-k) by one double-precision product
        std::vector<double> A(tab_.w.begin() + 1, tab_.w.begin() + 1 + pm);
        std::vector<double> B(tab_.a_scaled.begin() + 1, tab_.a_scaled.begin() + 1 + pm);
        auto full = fps_mul(A, B, pm - 1);
        conv_.assign(pm + 1, 0.0);
        for (std::size_t p = 1; p <= pm; ++p) conv_[p] = full[p - 1];

        mfar_exact_ = std::min<std::size_t>(pm, 4096);
        mfar_.assign(mfar_exact_ + 1, 0.0);
        for (std::size_t p = 1; p <= mfar_exact_; ++p) {
            double s = 0;
            for (std::size_t j = 1; 2 * j <= p; ++j)
                s += tab_.a_scaled[j] * tab_.w[p - j + 1];
            mfar_[p] = s;
        }

        gmax_.assign(pm + 2, 0.0);
        for (std::size_t j = pm; j >= 1; --j)
            gmax_[j] = std::max(tab_.a_scaled[j], gmax_[j + 1]);

        g_fit_ = fit_two_point(4.0 / 3, (double)pm / 2, tab_.a_scaled[pm / 2], (double)pm,
                               tab_.a_scaled[pm]);
        sigma_fit_ = fit_two_point(7.0 / 3, (double)pm / 2, tab_.sigma[pm / 2], (double)pm,
                                   tab_.sigma[pm]);
        conv_fit_ = fit_two_point(4.0 / 3, (double)pm / 2, conv_[pm / 2], (double)pm, conv_[pm]);
        mfar_fit_ = fit_two_point(7.0 / 3, (double)mfar_exact_ / 2, mfar_[mfar_exact_ / 2],
                                  (double)mfar_exact_, mfar_[mfar_exact_]);
    }

    wmax_.assign(tab_.k_cut + 2, 0.0);
    for (std::size_t k = tab_.k_cut; k >= 1; --k)
        wmax_[k] = std::max(tab_.w[k], wmax_[k + 1]);

    if (critical_) {
        // interpolate log c(lambda) over a log-spaced grid
        const int n = 385;
        clam_lmin_ = std::log(1e-4);
        clam_step_ = (std::log(1e4) - clam_lmin_) / (n - 1);
        clam_grid_.resize(n);
        for (int i = 0; i < n; ++i) {
            double lam = std::exp(clam_lmin_ + i * clam_step_);
            clam_grid_[i] =
                std::log((double)C::c_lambda(Real(lam), C::Regime::critical));
        }
    }
}

double PeelingContext::w(std::int64_t k) const {
    if (k < 1) throw domain_error("w index");
    if ((std::size_t)k <= tab_.k_cut) return tab_.w[k];
    return tab_.tail_C * std::pow((double)k, -tab_.tail_alpha);
}

double PeelingContext::g(std::int64_t p) const {
    if (!tab_.p_max) throw missing_table_error("a-sequence not built for this nu");
    if (p == 0) return tab_.a_scaled[0];
    if (p < 0) throw domain_error("g index");
    if ((std::size_t)p <= tab_.p_max) return tab_.a_scaled[p];
    return g_fit_((double)p);
}

double PeelingContext::sigma(std::int64_t p) const {
    if (!tab_.p_max) throw missing_table_error("sigma not built for this nu");
    if (p < 1) throw domain_error("sigma index");
    if ((std::size_t)p <= tab_.p_max) return tab_.sigma[p];
    return sigma_fit_((double)p);
}

double PeelingContext::conv_wg(std::int64_t p) const {
    if (p < 1) throw domain_error("conv index");
    if ((std::size_t)p <= tab_.p_max) return conv_[p];
    return conv_fit_((double)p);
}

double PeelingContext::mfar(std::int64_t p) const {
    if (p < 1) throw domain_error("mfar index");
    if (p == 1) return 0;
    if ((std::size_t)p <= mfar_exact_) return mfar_[p];
    return mfar_fit_((double)p);
}

double PeelingContext::w_suffix_max(std::int64_t k) const {
    if (k < 1) k = 1;
    if ((std::size_t)k <= tab_.k_cut) return wmax_[k];
    return w(k);
}

double PeelingContext::g_suffix_max(std::int64_t j) const {
    if (j < 1) j = 1;
    if ((std::size_t)j <= tab_.p_max) return gmax_[j];
    return g(j);
}

double PeelingContext::c_of_lambda(double lambda) const {
    if (!critical_) throw missing_table_error("c(lambda) interpolation is critical-only");
    double ll = std::log(lambda);
    if (ll <= clam_lmin_) return std::exp(clam_grid_.front()) *
                                 std::pow(lambda / 1e-4, -4.0 / 3);
    double top = clam_lmin_ + clam_step_ * (clam_grid_.size() - 1);
    if (ll >= top) return std::exp(clam_grid_.back()) * std::pow(lambda / 1e4, -7.0 / 3);
    double u = (ll - clam_lmin_) / clam_step_;
    std::size_t i = (std::size_t)u;
    double f = u - i;
    return std::exp(clam_grid_[i] * (1 - f) + clam_grid_[i + 1] * f);
}

double PeelingContext::zeta(std::int64_t p, std::int64_t q) const {
    if (p < q) std::swap(p, q);
    if (q < 0 || p < 1) throw domain_error("zeta index");
    if (q == 0) return w(p);
    if ((std::size_t)p <= tab_.zmax) return tab_.zeta[(p - 1) * tab_.zmax + (q - 1)];
    static constexpr std::int64_t kOneStepCut = 64;
    const double gamma43 = 3.0467653637094009381;   // Gamma(-4/3)
    const double gamma13 = -4.0623538182792012508;  // Gamma(-1/3)
    const double b = -0.5039684199579492473;        // -(2/5) 2^{1/3}
    if (q <= kOneStepCut && tab_.zmax >= (std::size_t)kOneStepCut) {
        // one-step asymptotics in the larger index, calibrated at the table edge
        double base = g(q) / gamma43 * std::pow((double)p, -7.0 / 3);
        double edge = g(q) / gamma43 * std::pow((double)tab_.zmax, -7.0 / 3);
        double ratio = tab_.zeta[(tab_.zmax - 1) * tab_.zmax + (q - 1)] / edge;
        return base * ratio;
    }
    // diagonal asymptotics with c(lambda), calibrated on the table edge row
    double lam = (double)q / (double)p;
    double base = b * c_of_lambda(lam) / (gamma43 * gamma13) * std::pow((double)p, -11.0 / 3);
    std::int64_t qe = std::max<std::int64_t>(
        1, std::min<std::int64_t>((std::int64_t)tab_.zmax,
                                  (std::int64_t)std::llround(lam * (double)tab_.zmax)));
    double edge = b * c_of_lambda((double)qe / (double)tab_.zmax) / (gamma43 * gamma13) *
                  std::pow((double)tab_.zmax, -11.0 / 3);
    double ratio = tab_.zeta[(tab_.zmax - 1) * tab_.zmax + (qe - 1)] / edge;
    return base * ratio;
}

std::int64_t PeelingContext::sample_w(CounterRng& rng) const {
    double ptail = tab_.tail_mass / tab_.Z0_uc;
    if (rng.next_double() < ptail) {
        double U = rng.next_double();
        double x = (tab_.k_cut + 0.5) * std::pow(1 - U, -1.0 / (tab_.tail_alpha - 1));
        double capped = std::min(x, 4.0e18);
        return std::max<std::int64_t>((std::int64_t)tab_.k_cut + 1,
                                      (std::int64_t)std::llround(capped));
    }
    return (std::int64_t)w_alias_.sample(rng) + 1;
}

std::int64_t PeelingContext::sample_g(CounterRng& rng) const {
    // the g tail mass beyond the table is negligible for sampling purposes
    return (std::int64_t)g_alias_.sample(rng) + 1;
}

// ---- laws --------------------------------------------------------------------

double PeelingLaw::total() const {
    double s = tail_prob;
    for (const auto& e : entries) s += e.prob;
    return s;
}

BoundaryState initial_state(RegimeTag regime, std::int64_t p, std::int64_t q) {
    switch (regime) {
        case RegimeTag::finite: return {p, q, RegimeTag::finite};
        case RegimeTag::halfplane: return {p, kInf, RegimeTag::halfplane};
        case RegimeTag::mono: return {0, kInf, RegimeTag::mono};
        case RegimeTag::fullplane: return {kInf, kInf, RegimeTag::fullplane};
    }
    throw domain_error("bad regime");
}

PeelingLaw law_infinite(const PeelingContext& ctx, std::size_t k_limit) {
    PeelingLaw law{RegimeTag::fullplane, ctx.nu(), {}, 0};
    const double tou = ctx.t_over_u();
    law.entries.push_back({{EventTag::CPlus, 0, false}, tou, 1, 0});
    law.entries.push_back({{EventTag::CMinus, 0, false}, tou, 0, 1});
    double listed = 0;
    for (std::size_t k = 0; k <= k_limit; ++k) {
        double pr = tou * ctx.w((std::int64_t)k + 1);
        listed += 2 * pr;
        law.entries.push_back({{EventTag::L, (std::int64_t)k, false}, pr, 0, -(std::int64_t)k});
        law.entries.push_back({{EventTag::R, (std::int64_t)k, false}, pr, -(std::int64_t)k, 0});
    }
    law.tail_prob = 2 * tou * ctx.tables().Z0_uc - listed;
    return law;
}

PeelingLaw law_mono(const PeelingContext& ctx, std::size_t k_limit) {
    if (!ctx.critical()) throw missing_table_error("mono law requires the critical tables");
    PeelingLaw law{RegimeTag::mono, ctx.nu(), {}, 0};
    const double tnu_u = ctx.t_over_u() * ctx.nu();
    const double a0 = (double)C::a0();
    law.entries.push_back({{EventTag::CPlus, 0, false}, tnu_u * ctx.g(1) / a0, 1, 0});
    law.entries.push_back({{EventTag::CMinus, 0, false}, tnu_u, 0, 1});
    double listed = 0;
    for (std::size_t k = 0; k <= k_limit; ++k) {
        double pr = tnu_u * ctx.w((std::int64_t)k + 1);
        listed += 2 * pr;
        law.entries.push_back({{EventTag::L, (std::int64_t)k, false}, pr, 0, -(std::int64_t)k});
        law.entries.push_back({{EventTag::R, (std::int64_t)k, false}, pr, 0, -(std::int64_t)k});
    }
    law.tail_prob = 2 * tnu_u * ctx.tables().Z0_uc - listed;
    return law;
}

PeelingLaw law_halfplane(const PeelingContext& ctx, std::int64_t p, std::size_t k_limit) {
    if (!ctx.critical()) throw missing_table_error("half-plane law requires the critical tables");
    if (p < 1) throw domain_error("half-plane law needs p >= 1");
    PeelingLaw law{RegimeTag::halfplane, ctx.nu(), {}, 0};
    const double tou = ctx.t_over_u();
    const double gp = ctx.g(p);
    const double a0 = (double)C::a0();
    law.entries.push_back({{EventTag::CPlus, 0, false}, tou * ctx.g(p + 1) / gp, 1, 0});
    law.entries.push_back({{EventTag::CMinus, 0, false}, tou, 0, 1});
    double listedL = 0, listedR = 0, listedWrap = 0;
    for (std::size_t k = 0; k <= k_limit; ++k) {
        double prL = tou * ctx.w((std::int64_t)k + 1);
        listedL += prL;
        law.entries.push_back({{EventTag::L, (std::int64_t)k, false}, prL, 0, -(std::int64_t)k});
        if ((std::int64_t)k < p) {
            double prR = prL * ctx.g(p - (std::int64_t)k) / gp;
            listedR += prR;
            law.entries.push_back(
                {{EventTag::R, (std::int64_t)k, false}, prR, -(std::int64_t)k, 0});
        }
        double prW = tou * a0 * ctx.zeta(p, (std::int64_t)k + 1) / gp;
        listedWrap += prW;
        law.entries.push_back({{EventTag::R, (std::int64_t)k, true}, prW, -p, -(std::int64_t)k});
    }
    double totL = tou * ctx.tables().Z0_uc;
    double totR = tou * ctx.conv_wg(p) / gp;
    double totW = tou * a0 * ctx.sigma(p) / gp;
    law.tail_prob = (totL - listedL) + (totR - listedR) + (totW - listedWrap);
    return law;
}

namespace {

// shared finite-law enumeration; fills events and unnormalized probabilities
void finite_law_raw(const PeelingContext& ctx, std::int64_t P, std::int64_t Q,
                    std::vector<PeelingEvent>& ev, std::vector<double>& pr,
                    std::vector<std::pair<std::int64_t, std::int64_t>>* dxy) {
    ev.clear();
    pr.clear();
    if (dxy) dxy->clear();
    if (P < 0 || Q < 0 || P + Q < 1) throw domain_error("finite law needs P+Q >= 1");
    const auto& tabs = ctx.tables();
    auto push = [&](EventTag tag, std::int64_t k, double p, std::int64_t dx, std::int64_t dy) {
        ev.push_back({tag, k, false});
        pr.push_back(p);
        if (dxy) dxy->push_back({dx, dy});
    };

    if (P >= 1 && Q >= 1) {
        const double tou = ctx.t_over_u();
        const double zpq = ctx.zeta(P, Q);
        push(EventTag::CPlus, 0, tou * ctx.zeta(P + 1, Q) / zpq, 1, 0);
        push(EventTag::CMinus, 0, tou * ctx.zeta(P, Q + 1) / zpq, 0, 1);
        for (std::int64_t k = 0; k < P; ++k)
            push(EventTag::R, k, tou * ctx.w(k + 1) * ctx.zeta(P - k, Q) / zpq, -k, 0);
        for (std::int64_t k = 0; k < Q; ++k)
            push(EventTag::L, k, tou * ctx.w(k + 1) * ctx.zeta(P, Q - k) / zpq, 0, -k);
        if (P == 1 && Q == 1)
            push(EventTag::End, 0, tabs.t_c * tabs.u_c * tabs.u_c / ctx.zeta(1, 1), -1, -1);
        return;
    }

    // monochromatic boundary (P,0) or (0,Q); weights are symmetric, tags and
    // deltas follow the side carrying the boundary
    const bool plus_side = Q == 0;
    const std::int64_t M = plus_side ? P : Q;
    const double tnu_u = ctx.t_over_u() * ctx.nu();
    const double zM = ctx.w(M);
    const EventTag c_same = plus_side ? EventTag::CPlus : EventTag::CMinus;
    const EventTag c_opp = plus_side ? EventTag::CMinus : EventTag::CPlus;
    push(c_same, 0, tnu_u * ctx.w(M + 1) / zM, plus_side ? 1 : 0, plus_side ? 0 : 1);
    push(c_opp, 0, tnu_u * ctx.zeta(M, 1) / zM, plus_side ? 0 : 1, plus_side ? 1 : 0);
    for (std::int64_t j = 0; j < M; ++j)
        push(EventTag::R, j, tnu_u * ctx.w(M - j) * ctx.w(j + 1) / zM,
             plus_side ? -j : 0, plus_side ? 0 : -j);
    if (M == 2)
        push(EventTag::End, 0, tabs.t_c * ctx.nu() * tabs.u_c * tabs.u_c / ctx.w(2),
             plus_side ? -2 : 0, plus_side ? 0 : -2);
}

} // namespace

PeelingLaw law_finite(const PeelingContext& ctx, std::int64_t P, std::int64_t Q) {
    PeelingLaw law{RegimeTag::finite, ctx.nu(), {}, 0};
    std::vector<PeelingEvent> ev;
    std::vector<double> pr;
    std::vector<std::pair<std::int64_t, std::int64_t>> dxy;
    finite_law_raw(ctx, P, Q, ev, pr, &dxy);
    for (std::size_t i = 0; i < ev.size(); ++i)
        law.entries.push_back({ev[i], pr[i], dxy[i].first, dxy[i].second});
    return law;
}

// ---- step --------------------------------------------------------------------

// relative perimeter variation (dX, dY) of an event in a given state
std::pair<std::int64_t, std::int64_t> event_delta(const BoundaryState& s,
                                                  const PeelingEvent& e) {
    switch (e.tag) {
        case EventTag::CPlus: return {1, 0};
        case EventTag::CMinus: return {0, 1};
        case EventTag::End: return {-std::max<std::int64_t>(s.P, 0),
                                    -std::max<std::int64_t>(s.Q, 0)};
        case EventTag::L: return {0, -e.k};
        case EventTag::R:
            if (e.wrap) return {-s.P, -e.k};
            if (s.regime == RegimeTag::mono) return {0, -e.k};
            if (s.regime == RegimeTag::finite && s.P == 0 && s.Q >= 1) return {0, -e.k};
            return {-e.k, 0};
    }
    return {0, 0};
}

BoundaryState step(const BoundaryState& s, const PeelingEvent& e, bool targeted) {
    BoundaryState out = s;
    auto bad = [&] { throw domain_error("event is inconsistent with the boundary state"); };
    switch (s.regime) {
        case RegimeTag::fullplane:
            return out; // perimeters stay infinite; variations live in the trace
        case RegimeTag::halfplane:
            switch (e.tag) {
                case EventTag::CPlus: out.P += 1; return out;
                case EventTag::CMinus: return out;
                case EventTag::L: return out;
                case EventTag::R:
                    if (e.wrap) {
                        out.P = 0;
                        out.regime = RegimeTag::mono;
                        return out;
                    }
                    if (e.k >= s.P) bad();
                    out.P -= e.k;
                    return out;
                default: bad();
            }
            break;
        case RegimeTag::mono:
            switch (e.tag) {
                case EventTag::CPlus:
                    out.P = 1;
                    out.regime = RegimeTag::halfplane;
                    return out;
                case EventTag::CMinus: return out;
                case EventTag::L:
                case EventTag::R: return out;
                default: bad();
            }
            break;
        case RegimeTag::finite:
            if (s.P >= 1 && s.Q >= 1) {
                switch (e.tag) {
                    case EventTag::CPlus: out.P += 1; return out;
                    case EventTag::CMinus: out.Q += 1; return out;
                    case EventTag::R:
                        if (e.k >= s.P) {
                            // targeted identification R_{p+k} = L_{q-k-1}
                            if (!targeted || e.k >= s.P + s.Q) bad();
                            out.Q -= s.Q - (e.k - s.P) - 1;
                            return out;
                        }
                        out.P -= e.k;
                        return out;
                    case EventTag::L:
                        if (e.k >= s.Q) bad();
                        out.Q -= e.k;
                        return out;
                    case EventTag::End:
                        if (s.P != 1 || s.Q != 1) bad();
                        out.P = out.Q = 0;
                        return out;
                }
            } else {
                const bool plus_side = s.Q == 0;
                const std::int64_t M = plus_side ? s.P : s.Q;
                switch (e.tag) {
                    case EventTag::CPlus:
                        if (plus_side) out.P += 1; else out.P = 1;
                        return out;
                    case EventTag::CMinus:
                        if (plus_side) out.Q = 1; else out.Q += 1;
                        return out;
                    case EventTag::R:
                    case EventTag::L:
                        if (e.k >= M) bad();
                        (plus_side ? out.P : out.Q) -= e.k;
                        return out;
                    case EventTag::End:
                        if (M != 2) bad();
                        out.P = out.Q = 0;
                        return out;
                }
            }
            break;
    }
    bad();
    return out;
}

// ---- samplers ------------------------------------------------------------------

InfiniteSampler::InfiniteSampler(const PeelingContext& ctx, bool mono)
    : ctx_(&ctx), mono_(mono) {
    double pref = ctx.t_over_u() * (mono ? ctx.nu() : 1.0);
    if (mono) {
        if (!ctx.critical()) throw missing_table_error("mono sampler requires critical tables");
        p_cplus_ = pref * ctx.g(1) / (double)C::a0();
    } else {
        p_cplus_ = pref;
    }
    p_cminus_ = pref;
    p_block_ = pref * ctx.tables().Z0_uc; // each of the two swallow blocks
}

PeelingEvent InfiniteSampler::draw(CounterRng& rng) const {
    double total = p_cplus_ + p_cminus_ + 2 * p_block_;
    double u = rng.next_double() * total;
    if (u < p_cplus_) return {EventTag::CPlus, 0, false};
    u -= p_cplus_;
    if (u < p_cminus_) return {EventTag::CMinus, 0, false};
    u -= p_cminus_;
    std::int64_t k = ctx_->sample_w(rng) - 1;
    if (u < p_block_) return {EventTag::L, k, false};
    return {EventTag::R, k, false};
}

std::array<double, 5> HalfplaneSampler::masses(std::int64_t p) const {
    const auto& ctx = *ctx_;
    const double tou = ctx.t_over_u();
    const double gp = ctx.g(p);
    return {tou * ctx.g(p + 1) / gp, tou, tou * ctx.tables().Z0_uc, tou * ctx.conv_wg(p) / gp,
            tou * (double)C::a0() * ctx.sigma(p) / gp};
}

PeelingEvent HalfplaneSampler::draw(CounterRng& rng, std::int64_t p) const {
    const auto& ctx = *ctx_;
    auto m = masses(p);
    double total = m[0] + m[1] + m[2] + m[3] + m[4];
    double u = rng.next_double() * total;
    if (u < m[0]) return {EventTag::CPlus, 0, false};
    u -= m[0];
    if (u < m[1]) return {EventTag::CMinus, 0, false};
    u -= m[1];
    if (u < m[2]) return {EventTag::L, ctx.sample_w(rng) - 1, false};
    u -= m[2];
    if (u < m[3]) {
        // R_k, k < p: near block (k < ceil(p/2)) via the w proposal, far block
        // (j = p-k <= p/2) via the g proposal
        double far = ctx.mfar(p);
        double conv = ctx.conv_wg(p);
        std::int64_t half_k = (p + 1) / 2; // k < half_k is the near block
        if (rng.next_double() * conv < far) {
            double wmax = ctx.w_suffix_max(p - p / 2 + 1);
            for (int it = 0; it < 100000; ++it) {
                std::int64_t j = ctx.sample_g(rng);
                if (j > p / 2) continue;
                if (rng.next_double() * wmax <= ctx.w(p - j + 1))
                    return {EventTag::R, p - j, false};
            }
        } else {
            double gmax = ctx.g_suffix_max(p - half_k + 1);
            for (int it = 0; it < 100000; ++it) {
                std::int64_t k = ctx.sample_w(rng) - 1;
                if (k >= half_k) continue;
                if (rng.next_double() * gmax <= ctx.g(p - k))
                    return {EventTag::R, k, false};
            }
        }
        throw precision_error("half-plane rejection sampler failed to accept");
    }
    // wrap: swallow the whole + segment and k minus vertices beyond
    std::int64_t k;
    if ((std::size_t)p <= ctx.zmax()) {
        double s = ctx.sigma(p);
        double target = rng.next_double() * s;
        double acc = 0;
        k = (std::int64_t)ctx.zmax() - 1;
        for (std::size_t q = 1; q <= ctx.zmax(); ++q) {
            acc += ctx.zeta(p, (std::int64_t)q);
            if (acc >= target) {
                k = (std::int64_t)q - 1;
                break;
            }
        }
    } else {
        k = ctx.sample_g(rng) - 1; // asymptotic profile of the far row
    }
    return {EventTag::R, k, true};
}

PeelingEvent FiniteSampler::draw(CounterRng& rng, std::int64_t P, std::int64_t Q) {
    finite_law_raw(*ctx_, P, Q, ev_, buf_, nullptr);
    double total = 0;
    for (double v : buf_) total += v;
    last_total_ = total;
    double u = rng.next_double() * total;
    for (std::size_t i = 0; i < buf_.size(); ++i) {
        u -= buf_[i];
        if (u <= 0) return ev_[i];
    }
    return ev_.back();
}

// ---- runs ----------------------------------------------------------------------

PeelingTrace run(const PeelingContext& ctx, const RunSpec& spec) {
    PeelingTrace tr;
    tr.spec = spec;
    CounterRng rng(spec.seed, spec.stream);
    BoundaryState st = initial_state(spec.regime, spec.p, spec.q);
    tr.final_state = st;

    // targets sorted descending: the largest m is hit first
    std::vector<std::int64_t> targets = spec.t_m_targets;
    std::sort(targets.begin(), targets.end(), std::greater<>());
    auto current_min = [&]() -> std::int64_t {
        if (st.finite_P() && st.finite_Q()) return std::min(st.P, st.Q);
        if (st.finite_P()) return st.P;
        if (st.finite_Q()) return st.Q;
        return kInf;
    };
    auto record_hits = [&](std::uint64_t n) {
        std::int64_t m = current_min();
        if (m == kInf) return;
        while (!targets.empty() && m <= targets.front()) {
            tr.T[targets.front()] = n;
            targets.erase(targets.begin());
        }
    };
    record_hits(0);

    if (!ctx.critical() &&
        (spec.regime == RegimeTag::mono || spec.regime == RegimeTag::halfplane))
        throw missing_table_error("half-plane/mono runs need the critical tables");

    InfiniteSampler inf_sampler(ctx, false);
    std::optional<InfiniteSampler> mono_sampler;
    std::optional<HalfplaneSampler> hp_sampler;
    FiniteSampler fin_sampler(ctx);
    if (ctx.critical() && spec.regime != RegimeTag::fullplane &&
        spec.regime != RegimeTag::finite) {
        mono_sampler.emplace(ctx, true);
        hp_sampler.emplace(ctx);
    }

    for (std::uint64_t n = 1; n <= spec.max_steps; ++n) {
        PeelingEvent e;
        switch (st.regime) {
            case RegimeTag::fullplane: e = inf_sampler.draw(rng); break;
            case RegimeTag::halfplane:
                if (!hp_sampler) hp_sampler.emplace(ctx);
                e = hp_sampler->draw(rng, st.P);
                break;
            case RegimeTag::mono:
                if (!mono_sampler) mono_sampler.emplace(ctx, true);
                e = mono_sampler->draw(rng);
                break;
            case RegimeTag::finite: e = fin_sampler.draw(rng, st.P, st.Q); break;
        }
        if (spec.record_events) tr.events.push_back(e);

        auto [dX, dY] = event_delta(st, e);
        tr.X += dX;
        tr.Y += dY;
        if (e.tag == EventTag::L || e.tag == EventTag::R)
            tr.swallowed_edges += (std::uint64_t)(-(dX + dY));

        bool targeted = st.regime == RegimeTag::finite;
        bool was_wrap = e.wrap;
        st = step(st, e, targeted);
        tr.steps = n;
        record_hits(n);

        if (e.tag == EventTag::End) {
            tr.eta = n;
            break;
        }
        if (was_wrap && (spec.stop_at_wrap || spec.regime == RegimeTag::halfplane)) break;
        if (spec.stop_at_first_tm && tr.T.size() == spec.t_m_targets.size()) break;
        if (n == spec.max_steps) tr.budget_exhausted = true;
    }
    tr.final_state = st;
    return tr;
}

std::uint64_t sample_interface_length(const PeelingContext& ctx, RegimeTag regime,
                                      std::int64_t p, std::int64_t q, CounterRng& rng,
                                      std::uint64_t budget) {
    if (regime == RegimeTag::finite) {
        FiniteSampler fs(ctx);
        BoundaryState st = initial_state(regime, p, q);
        for (std::uint64_t n = 1; n <= budget; ++n) {
            PeelingEvent e = fs.draw(rng, st.P, st.Q);
            st = step(st, e, true);
            if (e.tag == EventTag::End) return n;
        }
        throw budget_error("interface budget exhausted in the finite run");
    }
    if (regime == RegimeTag::halfplane) {
        HalfplaneSampler hp(ctx);
        std::int64_t P = p;
        for (std::uint64_t n = 1; n <= budget; ++n) {
            PeelingEvent e = hp.draw(rng, P);
            switch (e.tag) {
                case EventTag::CPlus: P += 1; break;
                case EventTag::R:
                    if (e.wrap) {
                        // interface continues inside the swallowed (P, k+1)-gon
                        return n + sample_interface_length(ctx, RegimeTag::finite, P, e.k + 1,
                                                           rng, budget - n);
                    }
                    P -= e.k;
                    break;
                default: break;
            }
        }
        throw budget_error("interface budget exhausted in the half-plane run");
    }
    throw domain_error("interface length is defined for finite and half-plane runs");
}

std::string trace_to_jsonl(const PeelingTrace& t) {
    nlohmann::json j;
    j["seed"] = t.spec.seed;
    j["stream"] = t.spec.stream;
    switch (t.spec.regime) {
        case RegimeTag::finite: j["regime"] = "finite"; break;
        case RegimeTag::halfplane: j["regime"] = "halfplane"; break;
        case RegimeTag::mono: j["regime"] = "mono"; break;
        case RegimeTag::fullplane: j["regime"] = "fullplane"; break;
    }
    j["p"] = t.spec.p;
    j["q"] = t.spec.q;
    j["nu"] = t.spec.nu;
    nlohmann::json tm = nlohmann::json::object();
    for (const auto& [m, n] : t.T) tm[std::to_string(m)] = n;
    j["T"] = tm;
    if (t.eta) j["eta"] = *t.eta; else j["eta"] = nullptr;
    j["steps"] = t.steps;
    nlohmann::json fs;
    fs["P"] = t.final_state.P;
    fs["Q"] = t.final_state.Q;
    j["final_state"] = fs;
    return j.dump();
}

} // namespace isingtri::peel
