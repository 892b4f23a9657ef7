#include <doctest.h>

#include <set>

#include "isingtri/enumerate.hpp"
#include "isingtri/errors.hpp"
#include "isingtri/series_engine.hpp"

using namespace isingtri;
using namespace isingtri::enumerate;

TEST_CASE("smallest maps") {
    // the (1,1)-gon with one edge: exactly the edge map
    auto maps11 = enumerate_maps(1, 1, 1);
    CHECK(maps11.size() == 1);
    CHECK(maps11[0].edge_count() == 1);

    // no triangulation of perimeter 2 with zero edges
    auto empty = enumerate_maps(1, 1, 0);
    CHECK(empty.empty());

    // the monochromatic digon closes to a single edge too
    auto maps20 = enumerate_maps(2, 0, 1);
    CHECK(maps20.size() == 1);
}

TEST_CASE("oracle base values") {
    CHECK(z_oracle(1, 1, 1) == series::NuPolynomial::constant(1));
    CHECK(z_oracle(2, 0, 1) == series::NuPolynomial::nu_power(1));
    CHECK(z_oracle(1, 0, 2) ==
          series::NuPolynomial(std::vector<BigInt>{BigInt(0), BigInt(1), BigInt(1)}));
}

TEST_CASE("all generated maps pass the structural invariants") {
    // validation runs inside the generator; this exercises a spread of
    // boundary conditions and checks dedup found no isomorphic repeats
    for (auto [p, q, n] : {std::tuple<int, int, int>{1, 1, 7}, {2, 1, 6}, {3, 0, 6}, {2, 2, 6}}) {
        std::set<std::vector<std::int32_t>> codes;
        std::size_t count = 0;
        enumerate_maps(p, q, n, [&](const maps::BicoloredMap& m) {
            ++count;
            codes.insert(maps::canonical_code(m));
            return true;
        });
        CHECK(codes.size() == count);
    }
}

TEST_CASE("spin flip symmetry of the oracle") {
    for (auto [p, q] : {std::pair<int, int>{2, 1}, {3, 1}, {3, 2}, {2, 0}}) {
        for (std::size_t n = 1; n <= 5; ++n) {
            CHECK(z_oracle(p, q, n) == z_oracle(q, p, n));
        }
    }
}

TEST_CASE("setting nu to 1 counts maps times spin configurations") {
    for (auto [p, q, n] : {std::tuple<int, int, int>{1, 1, 4}, {2, 1, 6}, {1, 0, 5}}) {
        auto stats = z_oracle_stats(p, q, n);
        BigInt at_one(0);
        for (const auto& c : stats.weight.c) at_one += c;
        // direct recount from the stream
        BigInt expected(0);
        enumerate_maps(p, q, n, [&](const maps::BicoloredMap& m) {
            if (m.edge_count() != (std::size_t)n) return true;
            expected += BigInt(1) << maps::internal_vertices(m).size();
            return true;
        });
        CHECK(at_one == expected);
    }
}

TEST_CASE("oracle equals the recursion table") {
    // the central cross-validation at unit-test scale; the acceptance suite
    // runs the full p+q <= 6, n <= 8 sweep
    auto table = series::extend_table(series::PartitionTable(), 6);
    for (std::size_t p = 0; p <= 3; ++p) {
        for (std::size_t q = 0; q <= p; ++q) {
            if (p + q < 1 || p + q > 4) continue;
            for (std::size_t n = 1; n <= 6; ++n) {
                CAPTURE(p);
                CAPTURE(q);
                CAPTURE(n);
                CHECK(z_oracle(p, q, n) == table.entry(p, q, n));
            }
        }
    }
}

TEST_CASE("budget guards") {
    CHECK_THROWS_AS(enumerate_maps(1, 1, 15), capacity_error);
    CHECK_THROWS_AS(enumerate_maps(0, 0, 3), domain_error);
}
