#include "isingtri/map_core.hpp"

#include <algorithm>
#include <deque>

namespace isingtri::maps {

std::vector<std::int32_t> BicoloredMap::face_cycle(std::int32_t h) const {
    std::vector<std::int32_t> cyc;
    std::int32_t x = h;
    do {
        cyc.push_back(x);
        x = nxt[x];
        if (cyc.size() > twin.size()) throw domain_error("nxt is not a permutation");
    } while (x != h);
    return cyc;
}

std::size_t BicoloredMap::face_count() const {
    std::vector<std::uint8_t> seen(twin.size(), 0);
    std::size_t faces = 0;
    for (std::size_t h = 0; h < twin.size(); ++h) {
        if (dead[h] || seen[h]) continue;
        ++faces;
        std::int32_t x = (std::int32_t)h;
        do {
            seen[x] = 1;
            x = nxt[x];
        } while (x != (std::int32_t)h);
    }
    return faces;
}

void BicoloredMap::glue(std::int32_t a, std::int32_t b) {
    if (twin[a] == b) throw domain_error("cannot glue a half-edge to its own twin");
    std::int32_t ta = twin[a], tb = twin[b];
    twin[ta] = tb;
    twin[tb] = ta;
    dead[a] = dead[b] = 1;
}

std::vector<std::int32_t> boundary_cycle(const BicoloredMap& m) {
    return m.face_cycle(m.root);
}

ValidationReport validate_bicolored(const BicoloredMap& m, std::size_t p, std::size_t q) {
    auto fail = [](std::string msg) { return ValidationReport{false, std::move(msg)}; };
    if (m.root < 0 || m.dead[m.root]) return fail("missing root");

    std::size_t live = 0;
    for (std::size_t h = 0; h < m.twin.size(); ++h) {
        if (m.dead[h]) continue;
        ++live;
        if (m.dead[m.twin[h]] || m.twin[m.twin[h]] != (std::int32_t)h)
            return fail("twin is not an involution");
        if (m.dead[m.nxt[h]]) return fail("nxt points to a dead half-edge");
        if (m.orig[m.nxt[h]] != m.target(h)) return fail("nxt does not continue the face walk");
    }
    if (live % 2) return fail("odd number of live half-edges");

    // faces: external = root cycle, everything else degree 3
    auto ext = m.face_cycle(m.root);
    if (ext.size() != p + q) return fail("external degree != p+q");
    std::vector<std::uint8_t> on_ext(m.twin.size(), 0);
    for (auto h : ext) on_ext[h] = 1;
    std::vector<std::uint8_t> seen(m.twin.size(), 0);
    std::size_t faces = 0;
    for (std::size_t h = 0; h < m.twin.size(); ++h) {
        if (m.dead[h] || seen[h]) continue;
        auto cyc = m.face_cycle((std::int32_t)h);
        ++faces;
        for (auto x : cyc) seen[x] = 1;
        if (!on_ext[h] && cyc.size() != 3) return fail("internal face of degree != 3");
    }

    // boundary: simple (no repeated vertex unless the whole map is one edge)
    std::vector<std::int32_t> bverts;
    for (auto h : ext) bverts.push_back(m.orig[h]);
    std::vector<std::int32_t> sorted = bverts;
    std::sort(sorted.begin(), sorted.end());
    bool repeats = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
    if (repeats) return fail("pinch point on the boundary");

    // Dobrushin word +^p -^q from the root
    for (std::size_t i = 0; i < ext.size(); ++i) {
        std::int32_t v = m.orig[ext[(i + 1) % ext.size()]];
        std::int8_t want = i < p ? 1 : -1;
        if (m.spin[v] != want) return fail("boundary spins are not +^p -^q");
    }

    // Euler relation V - E + F = 2 over reachable structure
    std::size_t V = 0;
    std::vector<std::uint8_t> vseen(m.spin.size(), 0);
    for (std::size_t h = 0; h < m.twin.size(); ++h)
        if (!m.dead[h] && !vseen[m.orig[h]]) {
            vseen[m.orig[h]] = 1;
            ++V;
        }
    std::size_t E = live / 2;
    if ((long long)V - (long long)E + (long long)faces != 2) return fail("Euler relation fails");
    return {};
}

std::vector<std::int32_t> canonical_code(const BicoloredMap& m) {
    std::vector<std::int32_t> label(m.twin.size(), -1);
    std::vector<std::int32_t> order;
    std::deque<std::int32_t> fifo;
    label[m.root] = 0;
    order.push_back(m.root);
    fifo.push_back(m.root);
    while (!fifo.empty()) {
        std::int32_t h = fifo.front();
        fifo.pop_front();
        for (std::int32_t nb : {m.nxt[h], m.twin[h]}) {
            if (label[nb] < 0) {
                label[nb] = (std::int32_t)order.size();
                order.push_back(nb);
                fifo.push_back(nb);
            }
        }
    }
    std::vector<std::int32_t> code;
    code.reserve(order.size() * 2);
    for (auto h : order) {
        code.push_back(label[m.nxt[h]]);
        code.push_back(label[m.twin[h]]);
    }
    return code;
}

std::size_t monochromatic_edges(const BicoloredMap& m) {
    std::size_t mono = 0;
    for (std::size_t h = 0; h < m.twin.size(); ++h) {
        if (m.dead[h] || (std::int32_t)h > m.twin[h]) continue;
        if (m.spin[m.orig[h]] == m.spin[m.orig[m.twin[h]]]) ++mono;
    }
    return mono;
}

std::vector<std::int32_t> internal_vertices(const BicoloredMap& m) {
    std::vector<std::uint8_t> on_ext(m.spin.size(), 0);
    for (auto h : boundary_cycle(m)) on_ext[m.orig[h]] = 1;
    std::vector<std::int32_t> out;
    for (std::size_t v = 0; v < m.spin.size(); ++v)
        if (!on_ext[v]) out.push_back((std::int32_t)v);
    return out;
}

} // namespace isingtri::maps
