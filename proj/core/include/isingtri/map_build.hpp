#pragma once

#include <cstdint>
#include <vector>

#include "isingtri/map_core.hpp"
#include "isingtri/peeling.hpp"
#include "isingtri/rng.hpp"

namespace isingtri::build {

// Provenance of each half-edge, for construction audits.
enum class Phase : std::uint8_t { boundary, main, left_mono, right_mono, fill };

struct BuiltMap {
    maps::BicoloredMap map;
    std::vector<Phase> phase;                 // per half-edge
    std::vector<std::int32_t> open_holes;     // one half-edge inside each open hole
    std::uint64_t main_steps = 0;
    std::uint64_t fill_steps = 0;
};

// Sample a finite Boltzmann Ising-triangulation of the (p,q)-gon by targeted
// junction peeling; swallowed regions are filled recursively through the
// monochromatic finite laws.
BuiltMap sample_finite_map(const peel::PeelingContext& ctx, std::int64_t p, std::int64_t q,
                           CounterRng& rng, std::uint64_t budget = 4000000);

// Replay a recorded finite targeted trace structurally; the swallowed holes
// are sampled fresh from rng. A partial trace leaves the main hole open.
BuiltMap build_explored_map(const peel::PeelingContext& ctx, const peel::PeelingTrace& trace,
                            CounterRng& rng, std::uint64_t budget = 4000000);

// The interface: the chain of mixed triangles crossed between the root edge
// and the opposite bichromatic boundary edge.
struct InterfacePath {
    std::vector<std::int32_t> crossed;   // bichromatic edges crossed, in order
    std::vector<std::int32_t> triangles; // one half-edge per visited triangle
    bool simple = true;                  // no edge or triangle visited twice
};
InterfacePath interface_path(const maps::BicoloredMap& m);

// Interface length: visited triangles plus the closing boundary edge. The
// single-edge map has length one.
std::uint64_t interface_length(const maps::BicoloredMap& m);

struct ExtractedBall {
    maps::BicoloredMap map;                    // ball as a standalone map
    std::vector<std::int32_t> source_half_edges; // ids in the source map
    std::vector<Phase> phase;                  // provenance carried over
};

// Ball of radius r around the root edge: r = 0 is the root edge alone,
// otherwise all faces having a vertex at distance < r from a root endpoint,
// with distances measured in m.
ExtractedBall extract_ball(const maps::BicoloredMap& m, int r,
                           const std::vector<Phase>* phase = nullptr);

struct FullplaneBall {
    BuiltMap built;       // explored portion of the full-plane limit object
    ExtractedBall ball;   // stabilized ball of the requested radius
    std::uint64_t ribbon_steps = 0, left_steps = 0, right_steps = 0;
};

// Constructive local ball of the doubly-infinite boundary limit at nu_c:
// junction peeling builds the ribbon until the interface has drifted a safety
// margin away, then the two flanks are explored with the monochromatic laws
// (spin roles flipped on the + side) until the ball stabilizes. The margin
// makes the residual truncation bias a heavy-tail event of the margin size.
FullplaneBall sample_ball_fullplane(const peel::PeelingContext& ctx, int r,
                                    std::uint64_t seed,
                                    std::uint64_t budget = 4000000);

} // namespace isingtri::build
