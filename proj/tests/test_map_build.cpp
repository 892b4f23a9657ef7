#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "isingtri/constants.hpp"
#include "isingtri/errors.hpp"
#include "isingtri/map_build.hpp"

using namespace isingtri;
using namespace isingtri::build;
namespace C = isingtri::constants;
using peel::EventTag;
using peel::RegimeTag;

namespace {

const peel::PeelingContext& ctx_crit() {
    static const peel::PeelingContext ctx = [] {
        coeffs::BuildOptions opt;
        opt.k_max = 8192;
        opt.zeta_size = 96;
        opt.grid_points = 512;
        opt.radius = 0.92;
        opt.radius_check = 0.85;
        return peel::PeelingContext(
            coeffs::load_or_build(C::nu_c(), opt, coeffs::default_cache_dir()));
    }();
    return ctx;
}

} // namespace

TEST_CASE("sampled finite maps satisfy all structural invariants") {
    const auto& ctx = ctx_crit();
    CounterRng rng(808, 0);
    for (auto [p, q] : {std::pair<int, int>{1, 1}, {3, 2}, {5, 4}, {4, 0}, {0, 3}, {8, 5}}) {
        for (int rep = 0; rep < 8; ++rep) {
            auto built = sample_finite_map(ctx, p, q, rng);
            auto rep_v = maps::validate_bicolored(built.map, p, q);
            CAPTURE(p);
            CAPTURE(q);
            CAPTURE(rep_v.message);
            CHECK(rep_v.ok);
        }
    }
}

TEST_CASE("interface length equals the number of peeling steps") {
    const auto& ctx = ctx_crit();
    CounterRng rng(809, 0);
    std::size_t with_swallows = 0;
    for (int rep = 0; rep < 60; ++rep) {
        auto built = sample_finite_map(ctx, 5, 4, rng);
        auto path = interface_path(built.map);
        CHECK(path.simple);
        CHECK(interface_length(built.map) == built.main_steps);
        for (auto h : path.crossed) {
            CHECK(built.map.spin[built.map.orig[h]] !=
                  built.map.spin[built.map.orig[built.map.twin[h]]]);
        }
        if (built.fill_steps > 0) ++with_swallows;
    }
    CHECK(with_swallows > 0);
}

TEST_CASE("replaying a recorded trace reproduces the peeling structurally") {
    const auto& ctx = ctx_crit();
    peel::RunSpec spec;
    spec.regime = RegimeTag::finite;
    spec.p = 4;
    spec.q = 3;
    spec.nu = ctx.nu();
    spec.record_events = true;
    spec.seed = 404;
    for (std::uint64_t stream = 0; stream < 12; ++stream) {
        spec.stream = stream;
        auto tr = peel::run(ctx, spec);
        REQUIRE(tr.eta.has_value());
        CounterRng rng(9, stream);
        auto built = build_explored_map(ctx, tr, rng);
        CHECK(built.open_holes.empty());
        CHECK(built.main_steps == tr.steps);
        auto rep_v = maps::validate_bicolored(built.map, 4, 3);
        CHECK(rep_v.ok);
        CHECK(interface_length(built.map) == *tr.eta);
    }
}

TEST_CASE("a run of pure C+ events builds a fan with no swallowed region") {
    const auto& ctx = ctx_crit();
    peel::PeelingTrace tr;
    tr.spec.regime = RegimeTag::finite;
    tr.spec.p = 3;
    tr.spec.q = 2;
    tr.spec.nu = ctx.nu();
    tr.spec.record_events = true;
    for (int i = 0; i < 7; ++i) tr.events.push_back({EventTag::CPlus, 0, false});
    CounterRng rng(1, 1);
    auto built = build_explored_map(ctx, tr, rng);
    CHECK(built.open_holes.size() == 1);
    CHECK(built.fill_steps == 0);
    CHECK(built.main_steps == 7);
    std::size_t tris = 0;
    std::vector<std::uint8_t> seen(built.map.twin.size(), 0);
    auto ext = built.map.face_cycle(built.map.root);
    for (auto h : ext) seen[h] = 1;
    for (auto h : built.open_holes)
        for (auto x : built.map.face_cycle(h)) seen[x] = 1;
    for (std::size_t h = 0; h < built.map.twin.size(); ++h) {
        if (seen[h] || built.map.dead[h]) continue;
        auto cyc = built.map.face_cycle((std::int32_t)h);
        CHECK(cyc.size() == 3);
        for (auto x : cyc) seen[x] = 1;
        ++tris;
    }
    CHECK(tris == 7);
}

TEST_CASE("ball extraction: radius zero, monotonicity, structure") {
    const auto& ctx = ctx_crit();
    CounterRng rng(321, 5);
    auto built = sample_finite_map(ctx, 6, 5, rng);

    auto b0 = extract_ball(built.map, 0);
    CHECK(b0.map.edge_count() == 1);
    CHECK(b0.map.spin[b0.map.orig[b0.map.root]] ==
          built.map.spin[built.map.orig[built.map.root]]);

    std::set<std::int32_t> prev_ids;
    for (int r = 0; r <= 4; ++r) {
        auto ball = extract_ball(built.map, r);
        std::set<std::int32_t> ids(ball.source_half_edges.begin(),
                                   ball.source_half_edges.end());
        for (auto id : prev_ids) CHECK(ids.count(id));
        prev_ids = std::move(ids);
        for (std::size_t h = 0; h < ball.map.twin.size(); ++h) {
            CHECK(ball.map.twin[ball.map.twin[h]] == (std::int32_t)h);
            CHECK(ball.map.nxt[h] >= 0);
        }
    }
}

TEST_CASE("first-event histogram of a large finite boundary matches the limit law") {
    const auto& ctx = ctx_crit();
    peel::FiniteSampler fs(ctx);
    peel::InfiniteSampler inf(ctx, false);
    CounterRng r1(5150, 1), r2(5150, 2);
    const std::size_t N = 100000;
    auto bucket = [](const peel::PeelingEvent& e) {
        std::int64_t k = std::min<std::int64_t>(e.k, 8);
        bool cev = e.tag == EventTag::CPlus || e.tag == EventTag::CMinus;
        return std::pair<int, std::int64_t>((int)e.tag, cev ? 0 : k);
    };
    std::map<std::pair<int, std::int64_t>, double> h1, h2;
    for (std::size_t i = 0; i < N; ++i) {
        h1[bucket(fs.draw(r1, 100, 100))] += 1.0 / N;
        h2[bucket(inf.draw(r2))] += 1.0 / N;
    }
    double tv = 0;
    for (const auto& [k, v] : h1) tv += std::abs(v - h2[k]);
    for (const auto& [k, v] : h2)
        if (!h1.count(k)) tv += v;
    CHECK(tv / 2 <= 0.05);
}

TEST_CASE("full-plane ball construction") {
    const auto& ctx = ctx_crit();
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto res = sample_ball_fullplane(ctx, 1, seed);
        CHECK(res.ribbon_steps > 0);
        CHECK(res.ball.map.edge_count() >= 1);
        bool has_main = false;
        for (auto ph : res.ball.phase)
            if (ph == Phase::main) has_main = true;
        CHECK(has_main);
        for (std::size_t h = 0; h < res.ball.map.twin.size(); ++h)
            CHECK(res.ball.map.twin[res.ball.map.twin[h]] == (std::int32_t)h);
    }
}

TEST_CASE("full-plane root triangle is flip-reflection symmetric") {
    const auto& ctx = ctx_crit();
    const std::size_t N = 40000;
    peel::InfiniteSampler inf(ctx, false);
    CounterRng rng(246, 9);
    std::map<std::pair<int, bool>, double> hist;
    for (std::size_t i = 0; i < N; ++i) {
        auto e = inf.draw(rng);
        bool swallow = e.tag == EventTag::L || e.tag == EventTag::R;
        int cls = swallow ? 2 : (e.tag == EventTag::CPlus ? 0 : 1);
        bool side = e.tag == EventTag::CPlus || e.tag == EventTag::R;
        hist[{cls, side}] += 1.0 / N;
    }
    CHECK(std::abs(hist[{0, true}] - hist[{1, false}]) < 0.01);
    CHECK(std::abs(hist[{2, true}] - hist[{2, false}]) < 0.01);
}
