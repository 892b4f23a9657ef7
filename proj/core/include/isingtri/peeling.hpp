#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isingtri/coefficients.hpp"
#include "isingtri/rng.hpp"

namespace isingtri::peel {

enum class EventTag : std::uint8_t { CPlus, CMinus, L, R, End };

struct PeelingEvent {
    EventTag tag = EventTag::CPlus;
    std::int64_t k = 0; // swallow distance for L/R
    bool wrap = false;  // R event landing past the far junction (half-plane)
};

enum class RegimeTag : std::uint8_t { finite, halfplane, mono, fullplane };

// Perimeter state; kInf marks an infinite side.
inline constexpr std::int64_t kInf = -1;
struct BoundaryState {
    std::int64_t P = kInf, Q = kInf;
    RegimeTag regime = RegimeTag::fullplane;

    bool finite_P() const { return P >= 0; }
    bool finite_Q() const { return Q >= 0; }
};

BoundaryState initial_state(RegimeTag regime, std::int64_t p, std::int64_t q);

// Walker alias table over {0,...,n-1}.
class AliasTable {
  public:
    AliasTable() = default;
    explicit AliasTable(const std::vector<double>& weights);
    std::size_t sample(CounterRng& rng) const;
    double total() const { return total_; }

  private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
    double total_ = 0;
};

// Derived sampling machinery on top of the coefficient tables: rescaled
// sequences with fitted power-law extensions past the table edge, alias
// tables for the swallow distributions, and the half-plane block masses.
class PeelingContext {
  public:
    explicit PeelingContext(coeffs::CoefficientTables tables);

    const coeffs::CoefficientTables& tables() const { return tab_; }
    double t_over_u() const { return t_over_u_; }
    double nu() const { return tab_.nu; }
    bool critical() const { return critical_; }

    // rescaled sequences with asymptotic extension
    double w(std::int64_t k) const;        // z_{k,0} u_c^k
    double g(std::int64_t p) const;        // a_p u_c^p (critical only)
    double sigma(std::int64_t p) const;    // sum_q zeta_{p,q}
    double conv_wg(std::int64_t p) const;  // sum_{k<p} w_{k+1} g(p-k)
    double mfar(std::int64_t p) const;     // far half of conv_wg (j <= p/2)
    double zeta(std::int64_t p, std::int64_t q) const; // with asymptotic fallback
    double w_suffix_max(std::int64_t k) const;
    double g_suffix_max(std::int64_t j) const;

    const AliasTable& w_alias() const { return w_alias_; }
    const AliasTable& g_alias() const { return g_alias_; }
    std::int64_t sample_w(CounterRng& rng) const; // k >= 1 with P(k) ~ w_k / Z0
    std::int64_t sample_g(CounterRng& rng) const; // j >= 1 with P(j) ~ g_j

    double c_of_lambda(double lambda) const; // interpolated c(lambda), critical

    std::size_t zmax() const { return tab_.zmax; }
    std::size_t table_pmax() const { return tab_.p_max; }

  private:
    struct PowFit {
        double A = 0, c = 0, alpha = 0;
        double operator()(double p) const {
            return A * std::pow(p, -alpha) * (1 + c * std::pow(p, -1.0 / 3));
        }
    };
    static PowFit fit_two_point(double alpha, double p1, double v1, double p2, double v2);

    coeffs::CoefficientTables tab_;
    bool critical_ = false;
    double t_over_u_ = 0;
    std::vector<double> conv_, mfar_, wmax_, gmax_;
    std::size_t mfar_exact_ = 0;
    PowFit g_fit_, sigma_fit_, conv_fit_, mfar_fit_, wmax_fit_;
    AliasTable w_alias_, g_alias_;
    std::vector<double> clam_grid_; // log-spaced interpolation of c(lambda)
    double clam_lmin_ = 0, clam_step_ = 0;
};

// --- laws as explicit distributions ----------------------------------------

struct LawEntry {
    PeelingEvent event;
    double prob = 0;
    std::int64_t dX = 0, dY = 0;
};

struct PeelingLaw {
    RegimeTag regime;
    double nu = 0;
    std::vector<LawEntry> entries; // swallow distances truncated at k_limit
    double tail_prob = 0;          // analytic mass beyond the truncation
    double total() const;
};

// Limit law with both boundaries infinite (i.i.d. steps).
PeelingLaw law_infinite(const PeelingContext& ctx, std::size_t k_limit);
// Half-plane law at finite + boundary p >= 1 (critical only).
PeelingLaw law_halfplane(const PeelingContext& ctx, std::int64_t p, std::size_t k_limit);
// Monochromatic infinite boundary (critical only).
PeelingLaw law_mono(const PeelingContext& ctx, std::size_t k_limit);
// Finite Dobrushin or monochromatic boundary; exact within the table budget,
// analytic continuation outside. Includes the End events.
PeelingLaw law_finite(const PeelingContext& ctx, std::int64_t P, std::int64_t Q);

// Perimeter update for an event under the targeted (finite) or untargeted
// rules; throws on an event that is illegal in the given state.
BoundaryState step(const BoundaryState& s, const PeelingEvent& e, bool targeted);

// (dX, dY) of an event in a given state, matching the law tables.
std::pair<std::int64_t, std::int64_t> event_delta(const BoundaryState& s,
                                                  const PeelingEvent& e);

// --- samplers ---------------------------------------------------------------

// O(1) sampler for the infinite and monochromatic laws.
class InfiniteSampler {
  public:
    InfiniteSampler(const PeelingContext& ctx, bool mono);
    PeelingEvent draw(CounterRng& rng) const;

  private:
    const PeelingContext* ctx_;
    bool mono_;
    double p_cplus_, p_cminus_, p_block_; // block masses
};

// O(1)-amortized sampler for the half-plane law at arbitrary p (critical).
class HalfplaneSampler {
  public:
    explicit HalfplaneSampler(const PeelingContext& ctx) : ctx_(&ctx) {}
    PeelingEvent draw(CounterRng& rng, std::int64_t p) const;
    // block masses (C+, C-, L, R, wrap), unnormalized
    std::array<double, 5> masses(std::int64_t p) const;

  private:
    const PeelingContext* ctx_;
};

// O(P+Q) exact-vector sampler for finite boundaries.
class FiniteSampler {
  public:
    explicit FiniteSampler(const PeelingContext& ctx) : ctx_(&ctx) {}
    PeelingEvent draw(CounterRng& rng, std::int64_t P, std::int64_t Q);
    double last_normalization() const { return last_total_; }

  private:
    const PeelingContext* ctx_;
    std::vector<double> buf_;
    std::vector<PeelingEvent> ev_;
    double last_total_ = 1;
};

// --- runs --------------------------------------------------------------------

struct RunSpec {
    RegimeTag regime = RegimeTag::fullplane;
    std::int64_t p = 0, q = 0;
    double nu = 0; // informational; the context fixes nu
    std::vector<std::int64_t> t_m_targets; // record T_m for these m
    std::uint64_t max_steps = 100000000;
    bool stop_at_first_tm = false;  // stop once the smallest target is hit
    bool stop_at_wrap = false;      // half-plane: stop when the + side closes
    bool record_events = false;
    std::uint64_t seed = 0, stream = 0;
};

struct PeelingTrace {
    RunSpec spec;
    std::vector<PeelingEvent> events; // only if record_events
    std::int64_t X = 0, Y = 0;        // final relative perimeter variations
    std::uint64_t steps = 0;
    std::map<std::int64_t, std::uint64_t> T; // m -> first n with min <= m
    std::optional<std::uint64_t> eta;        // interface length if measured
    BoundaryState final_state;
    bool budget_exhausted = false;
    std::uint64_t swallowed_edges = 0;
};

PeelingTrace run(const PeelingContext& ctx, const RunSpec& spec);

// Interface length: total peeling steps along the interface. Finite targeted
// runs count to the End event; half-plane runs continue recursively in the
// swallowed Dobrushin piece after the wrap.
std::uint64_t sample_interface_length(const PeelingContext& ctx, RegimeTag regime,
                                      std::int64_t p, std::int64_t q, CounterRng& rng,
                                      std::uint64_t budget = 100000000);

std::string trace_to_jsonl(const PeelingTrace& t);

} // namespace isingtri::peel
