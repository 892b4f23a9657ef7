#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isingtri/errors.hpp"

namespace isingtri::maps {

// Rooted planar map in half-edge form with vertex spins.
//
// Half-edges come in twin pairs (h, h^1). nxt[h] is the next half-edge
// counterclockwise around the face to the LEFT of h, so every face is one
// nxt-cycle. orig[h] is the origin vertex. The root half-edge has the
// external face on its left and runs from the last "-" boundary vertex to
// the first "+" one, so reading origins along nxt from the root gives the
// boundary condition +^p -^q.
struct BicoloredMap {
    std::vector<std::int32_t> twin, nxt, orig;
    std::vector<std::int8_t> spin; // per vertex: +1, -1, or 0 = unassigned
    std::vector<std::uint8_t> dead; // half-edges removed by gluing
    std::int32_t root = -1;

    std::int32_t new_vertex(std::int8_t s) {
        spin.push_back(s);
        return (std::int32_t)spin.size() - 1;
    }

    // creates the pair (u->v, v->u); returns the u->v side
    std::int32_t new_edge(std::int32_t u, std::int32_t v) {
        std::int32_t h = (std::int32_t)twin.size();
        twin.push_back(h + 1);
        twin.push_back(h);
        orig.push_back(u);
        orig.push_back(v);
        nxt.push_back(-1);
        nxt.push_back(-1);
        dead.push_back(0);
        dead.push_back(0);
        return h;
    }

    std::int32_t target(std::int32_t h) const { return orig[twin[h]]; }

    std::size_t live_half_edges() const {
        std::size_t n = 0;
        for (auto d : dead) n += !d;
        return n;
    }
    std::size_t edge_count() const { return live_half_edges() / 2; }

    std::size_t vertex_count() const { return spin.size(); }

    // number of nxt-cycles over live half-edges (faces, holes included)
    std::size_t face_count() const;

    // cycle of the face left of h
    std::vector<std::int32_t> face_cycle(std::int32_t h) const;

    // identify the edges carrying a and b: twins of a and b become partners,
    // a and b disappear. Used for the degree-2 closures.
    void glue(std::int32_t a, std::int32_t b);
};

// external face cycle starting at the root
std::vector<std::int32_t> boundary_cycle(const BicoloredMap& m);

struct ValidationReport {
    bool ok = true;
    std::string message;
};

// Structural invariants of a finished triangulation of the (p,q)-gon:
// permutation consistency, triangular internal faces, simple boundary with
// the Dobrushin spin word, and the Euler relation.
ValidationReport validate_bicolored(const BicoloredMap& m, std::size_t p, std::size_t q);

// Canonical rooted-map encoding (breadth-first half-edge relabeling from the
// root). Rooted maps have no nontrivial automorphisms, so equal codes mean
// equal rooted maps.
std::vector<std::int32_t> canonical_code(const BicoloredMap& m);

// Monochromatic edge count for the current spin assignment; loops count.
std::size_t monochromatic_edges(const BicoloredMap& m);

// Vertices not on the external face
std::vector<std::int32_t> internal_vertices(const BicoloredMap& m);

} // namespace isingtri::maps
