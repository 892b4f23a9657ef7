#include "isingtri/enumerate.hpp"

#include <algorithm>
#include <set>

#include "isingtri/errors.hpp"

namespace isingtri::enumerate {

using maps::BicoloredMap;

namespace {

constexpr std::size_t kEdgeBudget = 14;
constexpr std::size_t kSpinBudget = 12; // internal vertices per map

struct GenState {
    BicoloredMap m;
    std::vector<std::int32_t> regions; // one live half-edge inside each open region
    std::size_t max_edges = 0;
};

GenState initial_state(std::size_t p, std::size_t q, std::size_t max_edges) {
    const std::size_t L = p + q;
    GenState st;
    st.max_edges = max_edges;
    auto& m = st.m;
    std::vector<std::int32_t> b(L);
    for (std::size_t i = 0; i < L; ++i) b[i] = m.new_vertex(i < p ? 1 : -1);
    std::vector<std::int32_t> outer(L), inner(L);
    for (std::size_t i = 0; i < L; ++i) {
        outer[i] = m.new_edge(b[i], b[(i + 1) % L]);
        inner[i] = m.twin[outer[i]];
    }
    for (std::size_t i = 0; i < L; ++i) {
        m.nxt[outer[i]] = outer[(i + 1) % L];
        m.nxt[inner[i]] = inner[(i + L - 1) % L];
    }
    m.root = outer[L - 1];
    st.regions.push_back(inner[0]);
    return st;
}

// minimum extra edges any completion of the open regions must add
long min_completion_cost(const GenState& st) {
    long cost = 0;
    for (auto rep : st.regions) {
        std::size_t s = st.m.face_cycle(rep).size();
        if (s == 1) cost += 1;
        else if (s == 2) cost -= 1;
        else cost += (long)s - 3;
    }
    return cost;
}

void rec(const GenState& st, const std::function<bool(const BicoloredMap&)>& visit,
         bool& keep_going) {
    if (!keep_going) return;
    if ((long)st.m.edge_count() + min_completion_cost(st) > (long)st.max_edges) return;
    if (st.regions.empty()) {
        keep_going = visit(st.m);
        return;
    }

    const std::int32_t rep = st.regions.back();
    auto cycle = st.m.face_cycle(rep);
    // deterministic base edge: the lowest half-edge id in the region
    std::size_t base_pos = 0;
    for (std::size_t i = 1; i < cycle.size(); ++i)
        if (cycle[i] < cycle[base_pos]) base_pos = i;
    std::rotate(cycle.begin(), cycle.begin() + base_pos, cycle.end());
    const std::size_t size = cycle.size();
    const std::int32_t e = cycle[0];
    const std::int32_t a = st.m.orig[e];
    const std::int32_t b = st.m.target(e);

    if (size == 2 && st.m.twin[cycle[0]] != cycle[1]) {
        GenState child = st;
        child.regions.pop_back();
        child.m.glue(cycle[0], cycle[1]);
        rec(child, visit, keep_going);
    }

    // third vertex inside the region
    {
        GenState child = st;
        auto& m = child.m;
        std::int32_t v = m.new_vertex(0);
        std::int32_t h_bv = m.new_edge(b, v);
        std::int32_t h_va = m.new_edge(v, a);
        std::int32_t g_vb = m.twin[h_bv], g_av = m.twin[h_va];
        m.nxt[e] = h_bv;
        m.nxt[h_bv] = h_va;
        m.nxt[h_va] = e;
        if (size == 1) {
            m.nxt[g_av] = g_vb;
            m.nxt[g_vb] = g_av;
        } else {
            m.nxt[cycle[size - 1]] = g_av;
            m.nxt[g_av] = g_vb;
            m.nxt[g_vb] = cycle[1];
        }
        child.regions.back() = g_av;
        rec(child, visit, keep_going);
    }

    // third vertex at each boundary position of the region (j = size is the
    // origin of the base edge itself)
    for (std::size_t j = 1; j <= size; ++j) {
        GenState child = st;
        auto& m = child.m;
        std::int32_t v = (j == size) ? a : m.orig[cycle[j]];
        std::int32_t h_bv = m.new_edge(b, v);
        std::int32_t h_va = m.new_edge(v, a);
        std::int32_t g_vb = m.twin[h_bv], g_av = m.twin[h_va];
        m.nxt[e] = h_bv;
        m.nxt[h_bv] = h_va;
        m.nxt[h_va] = e;
        // region A: g_vb, cycle[1..j-1]
        if (j == 1) {
            m.nxt[g_vb] = g_vb;
        } else {
            m.nxt[g_vb] = cycle[1];
            m.nxt[cycle[j - 1]] = g_vb;
        }
        // region B: g_av, cycle[j..size-1]
        if (j == size) {
            m.nxt[g_av] = g_av;
        } else {
            m.nxt[g_av] = cycle[j];
            m.nxt[cycle[size - 1]] = g_av;
        }
        child.regions.back() = g_vb;
        child.regions.push_back(g_av);
        rec(child, visit, keep_going);
    }
}

} // namespace

void enumerate_maps(std::size_t p, std::size_t q, std::size_t max_edges,
                    const std::function<bool(const BicoloredMap&)>& visit) {
    if (p + q < 1) throw domain_error("perimeter must be at least 1");
    if (max_edges > kEdgeBudget)
        throw capacity_error("edge budget is " + std::to_string(kEdgeBudget));
    std::set<std::vector<std::int32_t>> seen;
    bool keep_going = true;
    auto dedup_visit = [&](const BicoloredMap& m) {
        if (m.edge_count() > max_edges) return true;
        auto rep = maps::validate_bicolored(m, p, q);
        if (!rep.ok) throw domain_error("generated map fails validation: " + rep.message);
        if (!seen.insert(maps::canonical_code(m)).second) return true;
        return visit(m);
    };
    GenState st = initial_state(p, q, max_edges);
    rec(st, dedup_visit, keep_going);
}

std::vector<BicoloredMap> enumerate_maps(std::size_t p, std::size_t q, std::size_t max_edges) {
    std::vector<BicoloredMap> out;
    enumerate_maps(p, q, max_edges, [&](const BicoloredMap& m) {
        out.push_back(m);
        return true;
    });
    return out;
}

series::NuPolynomial z_oracle(std::size_t p, std::size_t q, std::size_t n) {
    return z_oracle_stats(p, q, n).weight;
}

OracleStats z_oracle_stats(std::size_t p, std::size_t q, std::size_t n) {
    OracleStats stats;
    std::vector<BigInt> acc(n + 1, BigInt(0)); // acc[m] = #assignments with m mono edges
    enumerate_maps(p, q, n, [&](const BicoloredMap& m0) {
        if (m0.edge_count() != n) return true;
        ++stats.maps;
        BicoloredMap m = m0;
        auto ivs = maps::internal_vertices(m);
        if (ivs.size() > kSpinBudget)
            throw capacity_error("spin summation budget exceeded");
        const std::size_t k = ivs.size();
        for (std::size_t mask = 0; mask < (std::size_t(1) << k); ++mask) {
            for (std::size_t i = 0; i < k; ++i)
                m.spin[ivs[i]] = (mask >> i) & 1 ? 1 : -1;
            std::size_t mono = maps::monochromatic_edges(m);
            if (mono >= acc.size()) acc.resize(mono + 1, BigInt(0));
            acc[mono] += 1;
        }
        return true;
    });
    stats.weight = series::NuPolynomial(std::move(acc));
    return stats;
}

} // namespace isingtri::enumerate
