#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "isingtri/map_core.hpp"
#include "isingtri/nupoly.hpp"

namespace isingtri::enumerate {

// Brute-force generation of every rooted triangulation of the (p,q)-gon
// with at most max_edges edges, each exactly once. Triangles are attached
// on a fixed edge of each open region over all third-vertex positions;
// canonical-code dedup guards against double counting. This never touches
// the junction-edge recursion it is used to validate.
//
// Generated maps carry boundary spins only (internal spins unassigned).
std::vector<maps::BicoloredMap> enumerate_maps(std::size_t p, std::size_t q,
                                               std::size_t max_edges);

// Streaming form; stops early if the visitor returns false.
void enumerate_maps(std::size_t p, std::size_t q, std::size_t max_edges,
                    const std::function<bool(const maps::BicoloredMap&)>& visit);

// [t^n] z_{p,q}(nu) by explicit spin summation over all generated maps with
// exactly n edges: sum over maps, sum over internal assignments of
// nu^{#monochromatic edges}.
series::NuPolynomial z_oracle(std::size_t p, std::size_t q, std::size_t n);

// Same, split by map: number of maps and the spin polynomial per map size.
struct OracleStats {
    std::size_t maps = 0;
    series::NuPolynomial weight;
};
OracleStats z_oracle_stats(std::size_t p, std::size_t q, std::size_t n);

} // namespace isingtri::enumerate
