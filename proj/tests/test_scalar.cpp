#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "percolab/scalar_fpp.hpp"

using namespace percolab;

namespace {

Configuration uniform_config(int dim, const Rational& w) {
    Configuration cfg(dim, PassageValue(w));
    cfg.set_value_set(ValueSet::finite_scalar({w}));
    return cfg;
}

Edge E(Coord x1, Coord y1, Coord x2, Coord y2) {
    return canonical_edge(LatticePoint{x1, y1}, LatticePoint{x2, y2});
}

}  // namespace

TEST_CASE("uniform weights reduce passage time to l1 distance", "[scalar]") {
    Configuration cfg = uniform_config(2, Rational(1));
    auto res = passage_time(cfg, LatticePoint{0, 0}, LatticePoint{3, -4});
    CHECK(res.time == Rational(7));
    CHECK(res.witness.front() == LatticePoint{0, 0});
    CHECK(res.witness.back() == LatticePoint{3, -4});
    CHECK(res.witness.edge_count() == 7);
    CHECK(path_passage_time(cfg, res.witness) == res.time);

    Configuration c3 = uniform_config(3, Rational(2));
    CHECK(passage_time(c3, LatticePoint{0, 0, 0}, LatticePoint{1, 1, 1}).time == Rational(6));
}

TEST_CASE("a cheap street funnels optimal routes", "[scalar]") {
    Configuration cfg(2, PassageValue(Rational(10)));
    EdgeRule street;
    street.region = EdgeRegion::segment(LatticePoint{0, 0}, LatticePoint{5, 0});
    street.values = {PassageValue(Rational(1))};
    cfg.add_rule(street);
    cfg.set_value_set(ValueSet::finite_scalar({Rational(1), Rational(10)}));

    auto res = passage_time(cfg, LatticePoint{0, 0}, LatticePoint{5, 3});
    CHECK(res.time == Rational(35));
    CHECK(path_passage_time(cfg, res.witness) == Rational(35));

    // Along the street itself the optimum is unique.
    Box box = bounding_box({LatticePoint{0, 0}, LatticePoint{5, 0}}, 6);
    auto opt = optimal_paths(cfg, LatticePoint{0, 0}, LatticePoint{5, 0}, box);
    CHECK(opt.time == Rational(5));
    REQUIRE(opt.paths.size() == 1);
    CHECK(opt.paths[0].edge_count() == 5);
    CHECK_FALSE(opt.truncated);
}

TEST_CASE("fractional weights stay exact through both grid backends", "[scalar]") {
    // Small denominator: integer-scaled fast path.
    Configuration fine = uniform_config(2, Rational(1, 3));
    CHECK(passage_time(fine, LatticePoint{0, 0}, LatticePoint{4, 2}).time == Rational(2));

    // Denominator past the fast-path bound: exact rational Dijkstra.
    Rational tiny(1, std::int64_t(1) << 25);
    Configuration wide = uniform_config(2, tiny);
    CHECK(passage_time(wide, LatticePoint{0, 0}, LatticePoint{4, 2}).time == 6 * tiny);
}

TEST_CASE("zero-cost edges are admissible with an explicit box", "[scalar]") {
    Configuration cfg(2, PassageValue(Rational(0)));
    auto res = passage_time(cfg, LatticePoint{0, 0}, LatticePoint{2, 0}, centered_box(2, 2));
    CHECK(res.time == Rational(0));
    CHECK(path_passage_time(cfg, res.witness) == Rational(0));
}

TEST_CASE("auto search box needs a usable alphabet", "[scalar]") {
    Configuration bare(2, PassageValue(Rational(1)));
    try {
        passage_time(bare, LatticePoint{0, 0}, LatticePoint{1, 0});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyValueSet);
    }

    Configuration zero = uniform_config(2, Rational(0));
    try {
        passage_time(zero, LatticePoint{0, 0}, LatticePoint{1, 0});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidParams);
    }
}

TEST_CASE("all optimal paths: monotone staircase count", "[scalar]") {
    Configuration cfg = uniform_config(2, Rational(1));
    Box box = centered_box(2, 3);
    auto opt = optimal_paths(cfg, LatticePoint{0, 0}, LatticePoint{2, 2}, box);
    CHECK(opt.time == Rational(4));
    CHECK(opt.paths.size() == 6);  // C(4, 2) monotone lattice paths
    CHECK_FALSE(opt.truncated);
    for (const Path& p : opt.paths) {
        CHECK(p.edge_count() == 4);
        CHECK(path_passage_time(cfg, p) == Rational(4));
    }
    // Lexicographic enumeration: the all-vertical-first path comes out first.
    CHECK(opt.paths[0].v == std::vector<LatticePoint>{{0, 0}, {0, 1}, {0, 2}, {1, 2}, {2, 2}});

    auto capped = optimal_paths(cfg, LatticePoint{0, 0}, LatticePoint{2, 2}, box, 3);
    CHECK(capped.truncated);
    CHECK(capped.paths.size() == 3);
}

TEST_CASE("geodesic test checks every contiguous subpath", "[scalar]") {
    Configuration cfg = uniform_config(2, Rational(1));
    Box box = centered_box(2, 4);

    Path straight(std::vector<LatticePoint>{{0, 0}, {1, 0}, {1, 1}, {2, 1}});
    CHECK(is_geodesic(cfg, straight, box));

    Path backtrack(std::vector<LatticePoint>{{0, 0}, {1, 0}, {0, 0}, {0, 1}});
    CHECK_FALSE(is_geodesic(cfg, backtrack, box));

    // A direct edge that exactly ties the three-edge detour still qualifies;
    // one that loses to it strictly does not.
    Configuration mixed = uniform_config(2, Rational(1));
    Path through(std::vector<LatticePoint>{{0, 0}, {1, 0}});
    mixed.set_value(E(0, 0, 1, 0), PassageValue(Rational(3)));
    CHECK(is_geodesic(mixed, through, box));
    mixed.set_value(E(0, 0, 1, 0), PassageValue(Rational(4)));
    CHECK_FALSE(is_geodesic(mixed, through, box));
}

TEST_CASE("balls grow to exact sublevel sets", "[scalar]") {
    Configuration cfg = uniform_config(2, Rational(1));
    BallSnapshot snap = grow_ball(cfg, Rational(2));
    CHECK(snap.t == Rational(2));
    CHECK(snap.points.size() == 13);  // |{x : |x|_1 <= 2}| in d = 2
    CHECK(std::is_sorted(snap.points.begin(), snap.points.end()));
    auto has = [&](const LatticePoint& p) {
        return std::binary_search(snap.points.begin(), snap.points.end(), p);
    };
    CHECK(has(LatticePoint{0, 0}));
    CHECK(has(LatticePoint{2, 0}));
    CHECK(has(LatticePoint{-1, 1}));
    CHECK_FALSE(has(LatticePoint{2, 1}));

    BallSnapshot origin_only = grow_ball(cfg, Rational(0));
    CHECK(origin_only.points.size() == 1);

    PointSet scaled = rescale(snap, Rational(2));
    CHECK(scaled.size() == snap.points.size());
    CHECK(scaled.point(0) == std::vector<double>{-1.0, 0.0});
    CHECK_THROWS_AS(rescale(snap, Rational(0)), Error);
}

TEST_CASE("hausdorff distance under l1", "[scalar]") {
    PointSet a(2), b(2);
    a.append({0.0, 0.0});
    b.append({3.0, 4.0});
    CHECK(hausdorff_l1(a, b) == Catch::Approx(7.0));

    PointSet c(2);
    c.append({0.0, 0.0});
    c.append({1.0, 0.0});
    // Directed distances are asymmetric; the max picks the 1.
    CHECK(hausdorff_l1(a, c) == Catch::Approx(1.0));

    PointSet empty(2);
    CHECK_THROWS_AS(hausdorff_l1(a, empty), Error);

    // A larger scattered pair, oracle by direct quadratic scan.
    PointSet s(2), t(2);
    double worst = 0;
    std::vector<std::pair<double, double>> sp{{0, 0}, {2.5, 1}, {-1, 4}, {3, -2}};
    std::vector<std::pair<double, double>> tp{{1, 1}, {-2, 3}, {4, 0}};
    for (auto [x, y] : sp) s.append({x, y});
    for (auto [x, y] : tp) t.append({x, y});
    auto directed = [](const std::vector<std::pair<double, double>>& from,
                       const std::vector<std::pair<double, double>>& to) {
        double w = 0;
        for (auto [fx, fy] : from) {
            double best = 1e300;
            for (auto [tx, ty] : to) best = std::min(best, std::abs(fx - tx) + std::abs(fy - ty));
            w = std::max(w, best);
        }
        return w;
    };
    worst = std::max(directed(sp, tp), directed(tp, sp));
    CHECK(hausdorff_l1(s, t) == Catch::Approx(worst));
}

TEST_CASE("ball convergence trace against a target sampling", "[scalar]") {
    Configuration cfg = uniform_config(2, Rational(1));
    PointSet corners(2);
    corners.append({1.0, 0.0});
    corners.append({0.0, 1.0});
    corners.append({-1.0, 0.0});
    corners.append({0.0, -1.0});
    auto rows = ball_convergence_trace(cfg, {Rational(1), Rational(2)}, corners);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].t == Rational(1));
    CHECK(rows[1].t == Rational(2));
    // The farthest rescaled ball point from the four corners sits at distance 1.
    CHECK(rows[0].distance == Catch::Approx(1.0));
    CHECK(rows[1].distance == Catch::Approx(1.0));
}
