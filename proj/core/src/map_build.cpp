#include "isingtri/map_build.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "isingtri/errors.hpp"

namespace isingtri::build {

using maps::BicoloredMap;
using peel::EventTag;
using peel::PeelingEvent;

namespace {

constexpr std::int32_t kNone = -1;
constexpr std::int64_t kHuge = std::numeric_limits<std::int32_t>::max();

// Map under construction plus the inverse of nxt. Unexplored pieces are
// nxt-cycles (finite holes) or nxt-paths (truncated infinite frontiers).
struct Builder {
    BicoloredMap m;
    std::vector<std::int32_t> prv;
    std::vector<Phase> phase;

    std::int32_t new_vertex(std::int8_t s) { return m.new_vertex(s); }

    std::int32_t new_edge(std::int32_t u, std::int32_t v, Phase ph) {
        std::int32_t h = m.new_edge(u, v);
        prv.resize(m.nxt.size(), kNone);
        phase.resize(m.nxt.size(), ph);
        phase[h] = ph;
        phase[h + 1] = ph;
        return h;
    }

    void link(std::int32_t a, std::int32_t b) {
        m.nxt[a] = b;
        prv[b] = a;
    }

    std::int32_t walk_prev(std::int32_t h, std::int64_t k) const {
        while (k-- > 0) {
            h = prv[h];
            if (h == kNone) throw domain_error("walked past the frontier end");
        }
        return h;
    }
    std::int32_t walk_next(std::int32_t h, std::int64_t k) const {
        while (k-- > 0) {
            h = m.nxt[h];
            if (h == kNone) throw domain_error("walked past the frontier end");
        }
        return h;
    }

    // edges available in each direction before hitting a path end, capped
    std::int64_t room_prev(std::int32_t h, std::int64_t cap) const {
        std::int64_t n = 0;
        while (n < cap && h != kNone) {
            h = prv[h];
            ++n;
        }
        return h == kNone ? n - 1 : n;
    }
    std::int64_t room_next(std::int32_t h, std::int64_t cap) const {
        std::int64_t n = 0;
        while (n < cap && h != kNone) {
            h = m.nxt[h];
            ++n;
        }
        return h == kNone ? n - 1 : n;
    }
};

// Reveal the triangle over e with a fresh interior vertex of the given spin.
// Returns (g_vb, g_av): the new hole-side half-edges v->b and a->v.
std::pair<std::int32_t, std::int32_t> reveal_new_vertex(Builder& b, std::int32_t e,
                                                        std::int8_t spin, Phase ph) {
    const std::int32_t a = b.m.orig[e], bb = b.m.target(e);
    const std::int32_t prev_old = b.prv[e], next_old = b.m.nxt[e];
    std::int32_t v = b.new_vertex(spin);
    std::int32_t h_bv = b.new_edge(bb, v, ph);
    std::int32_t h_va = b.new_edge(v, a, ph);
    b.link(e, h_bv);
    b.link(h_bv, h_va);
    b.link(h_va, e);
    std::int32_t g_vb = b.m.twin[h_bv], g_av = b.m.twin[h_va];
    if (next_old == e) {
        // the hole was a 1-gon; it becomes the digon [g_av, g_vb]
        b.link(g_av, g_vb);
        b.link(g_vb, g_av);
    } else {
        if (prev_old != kNone) b.link(prev_old, g_av);
        b.link(g_av, g_vb);
        if (next_old != kNone) b.link(g_vb, next_old);
    }
    return {g_vb, g_av};
}

struct SwallowCut {
    std::int32_t g_vb = kNone;    // v->b side
    std::int32_t g_av = kNone;    // a->v side
    std::int32_t sub_rep = kNone; // hole-side rep of the swallowed piece
    std::int32_t rem_rep = kNone; // hole-side rep of the remaining piece
};

// Reveal the triangle over e whose third vertex sits on the hole boundary,
// k steps backward along prv (v = origin of the k-th predecessor; k = 0 is
// the origin of e itself) or forward along nxt (v = origin of the (k+1)-th
// successor). The swallowed piece lies on the walked side.
SwallowCut reveal_boundary_vertex(Builder& b, std::int32_t e, bool backward, std::int64_t k,
                                  Phase ph) {
    const std::int32_t a = b.m.orig[e], bb = b.m.target(e);
    const std::int32_t prev_old = b.prv[e], next_old = b.m.nxt[e];
    SwallowCut cut;
    if (backward) {
        std::int32_t pk = b.walk_prev(e, k);
        std::int32_t v = b.m.orig[pk];
        std::int32_t before = (k == 0) ? kNone : b.prv[pk];
        std::int32_t h_bv = b.new_edge(bb, v, ph);
        std::int32_t h_va = b.new_edge(v, a, ph);
        b.link(e, h_bv);
        b.link(h_bv, h_va);
        b.link(h_va, e);
        cut.g_vb = b.m.twin[h_bv];
        cut.g_av = b.m.twin[h_va];
        if (k == 0) {
            b.link(cut.g_av, cut.g_av); // loop piece at a
            if (next_old == e) {
                b.link(cut.g_vb, cut.g_vb);
            } else {
                if (prev_old != kNone) b.link(prev_old, cut.g_vb);
                if (next_old != kNone) b.link(cut.g_vb, next_old);
            }
        } else {
            b.link(prev_old, cut.g_av); // prev_old = first swallowed edge's end
            b.link(cut.g_av, pk);
            if (before == e) {
                b.link(cut.g_vb, cut.g_vb); // the rest of the cycle was swallowed
            } else {
                if (before != kNone) b.link(before, cut.g_vb);
                if (next_old != kNone) b.link(cut.g_vb, next_old);
            }
        }
        cut.sub_rep = cut.g_av;
        cut.rem_rep = cut.g_vb;
    } else {
        std::int32_t nk1 = b.walk_next(e, k + 1);
        std::int32_t v = b.m.orig[nk1];
        std::int32_t next_1 = b.m.nxt[e];
        std::int32_t next_k = (k == 0) ? kNone : b.walk_next(e, k);
        std::int32_t h_bv = b.new_edge(bb, v, ph);
        std::int32_t h_va = b.new_edge(v, a, ph);
        b.link(e, h_bv);
        b.link(h_bv, h_va);
        b.link(h_va, e);
        cut.g_vb = b.m.twin[h_bv];
        cut.g_av = b.m.twin[h_va];
        if (k == 0) {
            b.link(cut.g_vb, cut.g_vb); // loop piece at b
        } else {
            b.link(cut.g_vb, next_1);
            b.link(next_k, cut.g_vb);
        }
        if (nk1 == e) {
            b.link(cut.g_av, cut.g_av); // remaining shrinks to the 1-gon at a
        } else {
            if (prev_old != kNone) b.link(prev_old, cut.g_av);
            b.link(cut.g_av, nk1);
        }
        cut.sub_rep = cut.g_vb;
        cut.rem_rep = cut.g_av;
    }
    return cut;
}

void close_digon(Builder& b, std::int32_t e) {
    std::int32_t f = b.m.nxt[e];
    if (f == e || f == kNone || b.m.nxt[f] != e)
        throw domain_error("End event on a non-digon hole");
    b.m.glue(e, f);
}

// A pending hole: boundary word +^P -^Q. For Dobrushin words the peel edge
// is the junction (origin +, target -, minus block along nxt); a
// monochromatic hole peels at its stored edge. kHuge marks truncated
// infinite sides.
struct Hole {
    std::int32_t peel = kNone;
    std::int64_t P = 0, Q = 0;
};

// Apply one event to a hole in absolute spin coordinates; returns the
// swallowed piece, if any.
std::optional<Hole> apply_event(Builder& b, Hole& h, const PeelingEvent& ev, Phase ph) {
    const bool dobrushin = h.P >= 1 && h.Q >= 1;
    const bool mono_plus = h.Q == 0;
    switch (ev.tag) {
        case EventTag::CPlus: {
            auto [g_vb, g_av] = reveal_new_vertex(b, h.peel, +1, ph);
            if (dobrushin) {
                h.P += 1;
                h.peel = g_vb; // v+ -> b- is the new junction
            } else if (mono_plus) {
                h.P += 1;
                h.peel = g_av;
            } else {
                h.P = 1;
                h.peel = g_vb; // opens the (1,Q) junction
            }
            return std::nullopt;
        }
        case EventTag::CMinus: {
            auto [g_vb, g_av] = reveal_new_vertex(b, h.peel, -1, ph);
            (void)g_vb;
            if (dobrushin) {
                h.Q += 1;
                h.peel = g_av; // a+ -> v- stays the junction
            } else if (mono_plus) {
                h.Q = 1;
                h.peel = g_av; // opens the (P,1) junction
            } else {
                h.Q += 1;
                h.peel = g_av;
            }
            return std::nullopt;
        }
        case EventTag::R:
        case EventTag::L: {
            // Dobrushin R walks the + block (prv side), L the - block (nxt);
            // (P,0) holes walk prv, (0,Q) holes walk nxt
            const bool backward = dobrushin ? (ev.tag == EventTag::R) : mono_plus;
            const std::int64_t block = backward ? h.P : h.Q;
            if (ev.k >= block) throw domain_error("swallow beyond the boundary block");
            auto cut = reveal_boundary_vertex(b, h.peel, backward, ev.k, ph);
            Hole sub;
            sub.peel = cut.sub_rep;
            if (backward) {
                sub.P = ev.k + 1;
                sub.Q = 0;
                h.P -= ev.k;
            } else {
                sub.P = 0;
                sub.Q = ev.k + 1;
                h.Q -= ev.k;
            }
            h.peel = cut.rem_rep;
            return sub;
        }
        case EventTag::End: {
            if (!((h.P == 1 && h.Q == 1) || (h.P == 2 && h.Q == 0) ||
                  (h.P == 0 && h.Q == 2)))
                throw domain_error("End event in a non-terminal state");
            close_digon(b, h.peel);
            h.P = h.Q = 0;
            h.peel = kNone;
            return std::nullopt;
        }
    }
    throw domain_error("unhandled event tag");
}

std::uint64_t fill_holes(Builder& b, std::vector<Hole>& stack, peel::FiniteSampler& fs,
                         CounterRng& rng, std::uint64_t budget) {
    std::uint64_t steps = 0;
    while (!stack.empty()) {
        Hole h = stack.back();
        stack.pop_back();
        while (h.P + h.Q > 0) {
            if (++steps > budget) throw budget_error("hole filling exceeded the step budget");
            PeelingEvent ev = fs.draw(rng, h.P, h.Q);
            auto sub = apply_event(b, h, ev, Phase::fill);
            if (sub) stack.push_back(*sub);
        }
    }
    return steps;
}

Builder initial_polygon(std::int64_t p, std::int64_t q, Hole& main_hole) {
    const std::int64_t L = p + q;
    if (L < 1) throw domain_error("perimeter must be at least 1");
    Builder b;
    std::vector<std::int32_t> verts(L);
    for (std::int64_t i = 0; i < L; ++i) verts[i] = b.new_vertex(i < p ? 1 : -1);
    std::vector<std::int32_t> outer(L), inner(L);
    for (std::int64_t i = 0; i < L; ++i) {
        outer[i] = b.new_edge(verts[i], verts[(i + 1) % L], Phase::boundary);
        inner[i] = b.m.twin[outer[i]];
    }
    for (std::int64_t i = 0; i < L; ++i) {
        b.link(outer[i], outer[(i + 1) % L]);
        b.link(inner[i], inner[(i + L - 1) % L]);
    }
    b.m.root = outer[L - 1];
    // hole side of the root edge runs first-plus -> last-minus: the junction
    main_hole.peel = inner[L - 1];
    main_hole.P = p;
    main_hole.Q = q;
    return b;
}

} // namespace

BuiltMap sample_finite_map(const peel::PeelingContext& ctx, std::int64_t p, std::int64_t q,
                           CounterRng& rng, std::uint64_t budget) {
    Hole main_hole;
    Builder b = initial_polygon(p, q, main_hole);
    peel::FiniteSampler fs(ctx);
    std::vector<Hole> pending;
    std::uint64_t main_steps = 0;
    while (main_hole.P + main_hole.Q > 0) {
        if (++main_steps > budget) throw budget_error("main exploration exceeded the budget");
        PeelingEvent ev = fs.draw(rng, main_hole.P, main_hole.Q);
        auto sub = apply_event(b, main_hole, ev, Phase::main);
        if (sub) pending.push_back(*sub);
    }
    BuiltMap out;
    out.main_steps = main_steps;
    out.fill_steps = fill_holes(b, pending, fs, rng, budget);
    out.map = std::move(b.m);
    out.phase = std::move(b.phase);
    return out;
}

BuiltMap build_explored_map(const peel::PeelingContext& ctx, const peel::PeelingTrace& trace,
                            CounterRng& rng, std::uint64_t budget) {
    if (trace.spec.regime != peel::RegimeTag::finite)
        throw domain_error("replay expects a finite targeted trace");
    if (!trace.spec.record_events)
        throw domain_error("replay needs a trace with recorded events");
    Hole main_hole;
    Builder b = initial_polygon(trace.spec.p, trace.spec.q, main_hole);
    peel::FiniteSampler fs(ctx);
    std::vector<Hole> pending;
    std::uint64_t main_steps = 0;
    for (const auto& ev : trace.events) {
        ++main_steps;
        auto sub = apply_event(b, main_hole, ev, Phase::main);
        if (sub) pending.push_back(*sub);
        if (main_hole.peel == kNone) break;
    }
    BuiltMap out;
    out.main_steps = main_steps;
    out.fill_steps = fill_holes(b, pending, fs, rng, budget);
    if (main_hole.peel != kNone) out.open_holes.push_back(main_hole.peel);
    out.map = std::move(b.m);
    out.phase = std::move(b.phase);
    return out;
}

// ---- interface ----------------------------------------------------------------

InterfacePath interface_path(const BicoloredMap& m) {
    InterfacePath path;
    auto ext = m.face_cycle(m.root);
    std::vector<std::uint8_t> on_ext(m.twin.size(), 0);
    for (auto h : ext) on_ext[h] = 1;

    auto bichromatic = [&](std::int32_t h) {
        return m.spin[m.orig[h]] != m.spin[m.orig[m.twin[h]]];
    };

    std::int32_t cur = m.twin[m.root];
    if (on_ext[cur]) return path; // single-edge map: the interface is the edge

    std::vector<std::uint8_t> seen_face(m.twin.size(), 0);
    while (true) {
        auto tri = m.face_cycle(cur);
        if (tri.size() != 3) throw domain_error("interface walked into a non-triangle");
        path.triangles.push_back(cur);
        for (auto h : tri) {
            if (seen_face[h]) path.simple = false;
            seen_face[h] = 1;
        }
        std::int32_t exit = kNone;
        for (auto h : tri) {
            if (h == cur) continue;
            if (bichromatic(h)) {
                if (exit != kNone) throw domain_error("triangle with three mixed edges");
                exit = h;
            }
        }
        if (exit == kNone) throw domain_error("interface stuck in a monochromatic triangle");
        path.crossed.push_back(exit);
        std::int32_t nxt = m.twin[exit];
        if (on_ext[nxt]) break; // reached the opposite bichromatic boundary edge
        cur = nxt;
    }
    return path;
}

std::uint64_t interface_length(const BicoloredMap& m) {
    return interface_path(m).triangles.size() + 1;
}

// ---- balls ----------------------------------------------------------------------

ExtractedBall extract_ball(const BicoloredMap& m, int r, const std::vector<Phase>* phase) {
    ExtractedBall ball;
    std::vector<std::int32_t> dist(m.spin.size(), std::numeric_limits<std::int32_t>::max());
    {
        std::deque<std::int32_t> fifo;
        for (std::int32_t v : {m.orig[m.root], m.target(m.root)}) {
            if (dist[v] != 0) {
                dist[v] = 0;
                fifo.push_back(v);
            }
        }
        std::vector<std::vector<std::int32_t>> adj(m.spin.size());
        for (std::size_t h = 0; h < m.twin.size(); ++h)
            if (!m.dead[h]) adj[m.orig[h]].push_back((std::int32_t)h);
        while (!fifo.empty()) {
            std::int32_t v = fifo.front();
            fifo.pop_front();
            for (auto h : adj[v]) {
                std::int32_t w = m.target(h);
                if (dist[w] > dist[v] + 1) {
                    dist[w] = dist[v] + 1;
                    fifo.push_back(w);
                }
            }
        }
    }

    auto ext = m.face_cycle(m.root);
    std::vector<std::uint8_t> on_ext(m.twin.size(), 0);
    for (auto h : ext) on_ext[h] = 1;
    std::vector<std::uint8_t> keep(m.twin.size(), 0);
    if (r > 0) {
        std::vector<std::uint8_t> seen(m.twin.size(), 0);
        for (std::size_t h0 = 0; h0 < m.twin.size(); ++h0) {
            if (m.dead[h0] || seen[h0] || on_ext[h0]) continue;
            // walk the face; truncated frontier paths are not faces
            std::vector<std::int32_t> cyc;
            std::int32_t x = (std::int32_t)h0;
            bool open = false;
            do {
                cyc.push_back(x);
                seen[x] = 1;
                x = m.nxt[x];
                if (x == kNone || cyc.size() > m.twin.size()) {
                    open = true;
                    break;
                }
            } while (x != (std::int32_t)h0);
            if (open || cyc.size() != 3) continue;
            bool inside = false;
            for (auto h : cyc)
                if (dist[m.orig[h]] < r) inside = true;
            if (inside)
                for (auto h : cyc) keep[h] = 1;
        }
    }

    auto& bm = ball.map;
    std::vector<std::int32_t> new_id(m.twin.size(), kNone);
    std::vector<std::int32_t> vmap(m.spin.size(), kNone);
    auto map_vertex = [&](std::int32_t v) {
        if (vmap[v] == kNone) vmap[v] = bm.new_vertex(m.spin[v]);
        return vmap[v];
    };

    if (!keep[m.twin[m.root]]) {
        // radius 0 or no internal face: the ball is the root edge alone
        std::int32_t a = map_vertex(m.orig[m.root]);
        std::int32_t b = map_vertex(m.target(m.root));
        std::int32_t h = bm.new_edge(a, b);
        bm.nxt[h] = h + 1;
        bm.nxt[h + 1] = h;
        bm.root = h;
        ball.source_half_edges = {m.root, m.twin[m.root]};
        ball.phase.assign(2, Phase::boundary);
        return ball;
    }

    for (std::size_t h = 0; h < m.twin.size(); ++h) {
        if (!keep[h] || new_id[h] != kNone) continue;
        std::int32_t t = m.twin[h];
        std::int32_t nh = bm.new_edge(map_vertex(m.orig[h]), map_vertex(m.orig[t]));
        new_id[h] = nh;
        new_id[t] = nh + 1;
        ball.source_half_edges.push_back((std::int32_t)h);
        ball.source_half_edges.push_back(t);
        ball.phase.push_back(phase ? (*phase)[h] : Phase::main);
        ball.phase.push_back(keep[t] ? (phase ? (*phase)[t] : Phase::main) : Phase::boundary);
    }
    for (std::size_t h = 0; h < m.twin.size(); ++h) {
        if (!keep[h]) continue;
        bm.nxt[new_id[h]] = new_id[m.nxt[h]];
        std::int32_t t = m.twin[h];
        if (!keep[t]) {
            // stitch the ball boundary: rotate through unkept faces until the
            // next frontier side out of this corner
            std::int32_t x = m.nxt[t];
            int guard = 0;
            while (!keep[m.twin[x]]) {
                x = m.nxt[m.twin[x]];
                if (x == kNone || ++guard > (int)m.twin.size())
                    throw domain_error("ball boundary stitch failed");
            }
            bm.nxt[new_id[t]] = new_id[x];
        }
    }
    bm.root = new_id[m.root] != kNone ? new_id[m.root] : bm.twin[new_id[m.twin[m.root]]];
    return ball;
}

// ---- full-plane ball -------------------------------------------------------------

namespace {

// Doubly-infinite boundary line, truncated and grown on demand: plus spins
// on the prv side of the root junction, minus spins along nxt. The lower
// sides are chained as the (eventually closed) external face.
struct Line {
    Builder* b = nullptr;
    std::deque<std::int32_t> frontier; // upper half-edges, left to right
    std::deque<std::int32_t> lower;    // their twins, same order

    void append_right(Phase ph) {
        std::int32_t u = b->m.target(frontier.back());
        std::int32_t v = b->new_vertex(-1);
        std::int32_t f = b->new_edge(u, v, ph);
        b->link(frontier.back(), f);
        b->link(b->m.twin[f], lower.back()); // lower sides run right to left
        frontier.push_back(f);
        lower.push_back(b->m.twin[f]);
    }
    void append_left(Phase ph) {
        std::int32_t u = b->m.orig[frontier.front()];
        std::int32_t v = b->new_vertex(+1);
        std::int32_t f = b->new_edge(v, u, ph);
        b->link(f, frontier.front());
        b->link(lower.front(), b->m.twin[f]);
        frontier.push_front(f);
        lower.push_front(b->m.twin[f]);
    }

    // join the two chain ends so the external face is one nxt-cycle (the
    // seam is combinatorially inconsistent but only face traversal uses it)
    void close_external() { b->link(lower.front(), lower.back()); }
};

} // namespace

FullplaneBall sample_ball_fullplane(const peel::PeelingContext& ctx, int r,
                                    std::uint64_t seed, std::uint64_t budget) {
    if (!ctx.critical())
        throw missing_table_error("full-plane ball sampling needs the critical tables");
    FullplaneBall out;
    Builder b;
    Line line;
    line.b = &b;

    // root edge with + origin (line continues + to the left, - to the right)
    {
        std::int32_t v0 = b.new_vertex(+1);
        std::int32_t v1 = b.new_vertex(-1);
        std::int32_t f = b.new_edge(v0, v1, Phase::boundary);
        line.frontier.push_back(f);
        line.lower.push_back(b.m.twin[f]);
        for (int i = 0; i < 8; ++i) {
            line.append_left(Phase::boundary);
            line.append_right(Phase::boundary);
        }
    }
    std::int32_t root_upper = line.frontier[line.frontier.size() / 2];
    b.m.root = b.m.twin[root_upper];

    peel::InfiniteSampler inf(ctx, false);
    peel::InfiniteSampler mono(ctx, true);
    peel::HalfplaneSampler hp(ctx);
    peel::FiniteSampler fs(ctx);
    CounterRng rng_main(seed, 1), rng_left(seed, 2), rng_right(seed, 3), rng_fill(seed, 4);

    std::uint64_t steps_total = 0;
    auto spend = [&] {
        if (++steps_total > budget) throw budget_error("full-plane ball budget exhausted");
    };

    std::vector<Hole> pending;
    auto drain_fill = [&] {
        out.built.fill_steps += fill_holes(b, pending, fs, rng_fill, budget);
    };

    auto bfs_dist = [&] {
        std::vector<std::int32_t> dist(b.m.spin.size(),
                                       std::numeric_limits<std::int32_t>::max());
        std::deque<std::int32_t> fifo;
        for (std::int32_t v : {b.m.orig[b.m.root], b.m.target(b.m.root)}) {
            dist[v] = 0;
            fifo.push_back(v);
        }
        std::vector<std::vector<std::int32_t>> adj(b.m.spin.size());
        for (std::size_t h = 0; h < b.m.twin.size(); ++h)
            if (!b.m.dead[h]) adj[b.m.orig[h]].push_back((std::int32_t)h);
        while (!fifo.empty()) {
            std::int32_t v = fifo.front();
            fifo.pop_front();
            for (auto h : adj[v]) {
                std::int32_t w = b.m.target(h);
                if (dist[w] > dist[v] + 1) {
                    dist[w] = dist[v] + 1;
                    fifo.push_back(w);
                }
            }
        }
        return dist;
    };

    // ---- phase 1: ribbon under the infinite law at the junction ----
    std::int32_t junction = root_upper;
    std::int64_t X = 0, Y = 0;
    const std::int64_t margin = 40 + 8 * (std::int64_t)(r + 2);
    auto ensure_room = [&](bool backward, std::int64_t k) {
        if (backward)
            while (b.room_prev(junction, k + 4) < k + 4) line.append_left(Phase::boundary);
        else
            while (b.room_next(junction, k + 4) < k + 4) line.append_right(Phase::boundary);
    };
    for (std::uint64_t n = 0;; ++n) {
        if (X >= margin && Y >= margin && n % 16 == 0) {
            auto dist = bfs_dist();
            std::int32_t dj =
                std::min(dist[b.m.orig[junction]], dist[b.m.target(junction)]);
            if (dj > 2 * (r + 2)) break;
        }
        spend();
        PeelingEvent ev = inf.draw(rng_main);
        if (ev.tag == EventTag::R) ensure_room(true, ev.k + 1);
        if (ev.tag == EventTag::L) ensure_room(false, ev.k + 2);
        Hole h{junction, kHuge, kHuge};
        auto sub = apply_event(b, h, ev, Phase::main);
        junction = h.peel;
        if (sub) pending.push_back(*sub);
        switch (ev.tag) {
            case EventTag::CPlus: X += 1; break;
            case EventTag::CMinus: Y += 1; break;
            case EventTag::R: X -= ev.k; break;
            case EventTag::L: Y -= ev.k; break;
            default: break;
        }
        out.ribbon_steps += 1;
    }
    drain_fill();

    // ---- phases 2 and 3: the two flanks through the monochromatic laws ----
    // The flank law is the mono / half-plane chain; on the + flank the spin
    // roles are mirrored before the structural step. Excursion wraps whose
    // walk would reach the parked main junction are redrawn; that truncation
    // bias is a heavy-tail event of the safety margin.
    auto explore_flank = [&](bool plus_side, CounterRng& rng, Phase tag,
                             std::uint64_t& counter) {
        std::int64_t exc = 0;
        std::int32_t exc_junction = kNone;
        while (true) {
            std::int32_t peel = kNone;
            if (exc > 0) {
                peel = exc_junction;
            } else {
                auto dist = bfs_dist();
                std::int32_t best = r + 1;
                std::int32_t cur = plus_side ? b.prv[junction] : b.m.nxt[junction];
                int guard = 0;
                while (cur != kNone && ++guard < 1000000) {
                    std::int32_t d = std::min(dist[b.m.orig[cur]], dist[b.m.target(cur)]);
                    if (d < best) {
                        best = d;
                        peel = cur;
                    }
                    cur = plus_side ? b.prv[cur] : b.m.nxt[cur];
                }
                if (peel == kNone) break; // every flank frontier vertex sits past r
            }

            spend();
            counter += 1;
            PeelingEvent ev = exc == 0 ? mono.draw(rng) : hp.draw(rng, exc);
            if (plus_side) {
                // mirror law tags into absolute spins
                if (ev.tag == EventTag::CPlus) ev.tag = EventTag::CMinus;
                else if (ev.tag == EventTag::CMinus) ev.tag = EventTag::CPlus;
                else if (exc > 0 && ev.tag == EventTag::R && !ev.wrap) ev.tag = EventTag::L;
                else if (exc > 0 && ev.tag == EventTag::L) ev.tag = EventTag::R;
            }

            if (exc > 0 && ev.wrap) {
                // swallow the excursion and ev.k beyond it: the cut-off piece
                // carries the whole Dobrushin word
                std::int64_t kk = exc + ev.k;
                bool backward = !plus_side;
                // the walk toward the main junction must not reach it
                std::int64_t room = backward ? b.room_prev(peel, kk + 8)
                                             : b.room_next(peel, kk + 8);
                if (room < kk + 8) {
                    if (backward)
                        for (std::int64_t i = room; i < kk + 8; ++i)
                            line.append_left(Phase::boundary);
                    else
                        for (std::int64_t i = room; i < kk + 8; ++i)
                            line.append_right(Phase::boundary);
                }
                auto cut = reveal_boundary_vertex(b, peel, backward, kk, tag);
                Hole sub;
                sub.peel = cut.sub_rep;
                if (plus_side) {
                    sub.P = ev.k + 1;
                    sub.Q = exc;
                } else {
                    sub.P = exc;
                    sub.Q = ev.k + 1;
                }
                pending.push_back(sub);
                exc = 0;
                exc_junction = kNone;
            } else {
                Hole h;
                h.peel = peel;
                if (plus_side) {
                    h.P = kHuge;
                    h.Q = exc;
                } else {
                    h.P = exc;
                    h.Q = kHuge;
                }
                if (ev.tag == EventTag::R || ev.tag == EventTag::L) {
                    bool backward = (h.P >= 1 && h.Q >= 1) ? (ev.tag == EventTag::R)
                                                           : (h.Q == 0);
                    std::int64_t need = ev.k + (backward ? 1 : 2);
                    if (backward)
                        while (b.room_prev(peel, need + 4) < need + 4)
                            line.append_left(Phase::boundary);
                    else
                        while (b.room_next(peel, need + 4) < need + 4)
                            line.append_right(Phase::boundary);
                }
                auto sub = apply_event(b, h, ev, tag);
                if (sub) pending.push_back(*sub);
                exc = plus_side ? (h.Q == kHuge ? 0 : h.Q) : (h.P == kHuge ? 0 : h.P);
                if (h.P >= 1 && h.Q >= 1) exc_junction = h.peel;
                if (exc == 0) exc_junction = kNone;
            }
            drain_fill();
        }
    };

    explore_flank(true, rng_left, Phase::left_mono, out.left_steps);
    explore_flank(false, rng_right, Phase::right_mono, out.right_steps);
    drain_fill();

    line.close_external();
    out.built.map = std::move(b.m);
    out.built.phase = std::move(b.phase);
    out.ball = extract_ball(out.built.map, r, &out.built.phase);
    return out;
}

} // namespace isingtri::build
