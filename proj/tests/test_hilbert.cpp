#include <catch2/catch_amalgamated.hpp>

#include <functional>

#include "percolab/hilbert_fpp.hpp"
#include "percolab/rng.hpp"

using namespace percolab;

namespace {

Configuration vector_config(int dim, VectorValue def, std::vector<VectorValue> alphabet) {
    Configuration cfg(dim, PassageValue(std::move(def)));
    cfg.set_value_set(ValueSet::finite_vector(std::move(alphabet)));
    return cfg;
}

// Exhaustive minimum over all in-box walks of length <= cap, exact arithmetic.
Rational brute_min_norm_sq(const Configuration& cfg, const LatticePoint& x, const LatticePoint& y,
                           int cap, const Box& box) {
    Rational best = 0;
    bool found = false;
    RatVec sum;
    std::function<void(const LatticePoint&, int)> rec = [&](const LatticePoint& cur, int len) {
        if (cur == y) {
            Rational nsq = rat_norm_sq(sum);
            if (!found || nsq < best) best = nsq;
            found = true;
        }
        if (len == cap) return;
        for (int ax = 0; ax < box.dim(); ++ax)
            for (int dir : {+1, -1}) {
                LatticePoint nxt = cur;
                nxt[ax] += dir;
                if (!box.contains(nxt)) continue;
                RatVec v = rat_vec(cfg.vector_value(canonical_edge(cur, nxt)));
                if (sum.empty()) sum.assign(v.size(), Rational(0));
                for (std::size_t j = 0; j < v.size(); ++j) sum[j] += v[j];
                rec(nxt, len + 1);
                for (std::size_t j = 0; j < v.size(); ++j) sum[j] -= v[j];
            }
    };
    sum.clear();
    rec(x, 0);
    REQUIRE(found);
    return best;
}

}  // namespace

TEST_CASE("vector passage needs a declared vector alphabet", "[hilbert]") {
    Configuration scalar_cfg(2, PassageValue(Rational(1)));
    scalar_cfg.set_value_set(ValueSet::finite_scalar({Rational(1)}));
    try {
        default_length_cap(scalar_cfg, LatticePoint{0, 0}, LatticePoint{1, 0});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::KindMismatch);
    }

    Configuration undeclared(2, PassageValue(VectorValue{0.0, 1.0}));
    try {
        default_length_cap(undeclared, LatticePoint{0, 0}, LatticePoint{1, 0});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyValueSet);
    }
}

TEST_CASE("single-letter alphabet: norm equals walk length", "[hilbert]") {
    Configuration cfg = vector_config(2, {0.0, 1.0}, {{0.0, 1.0}});
    Box box = centered_box(2, 4);
    auto res = passage_time_h(cfg, LatticePoint{0, 0}, LatticePoint{2, 1}, 9, box);
    CHECK(res.norm_sq == Rational(9));
    CHECK(res.time == Catch::Approx(3.0));
    CHECK(res.length == 3);
    CHECK(res.witness.front() == LatticePoint{0, 0});
    CHECK(res.witness.back() == LatticePoint{2, 1});

    // Default cap: lattice distance plus slack from the straight path.
    CHECK(default_length_cap(cfg, LatticePoint{0, 0}, LatticePoint{2, 1}) == 13);
}

TEST_CASE("alternating letters make the straight road cheap", "[hilbert]") {
    // Letters alternate with the parity of the edge's lower endpoint.
    Configuration cfg(2, PassageValue(VectorValue{1.0, 0.0}));
    EdgeRule rule;
    rule.region = EdgeRegion::periodic();
    rule.values = {PassageValue(VectorValue{1.0, 0.0}), PassageValue(VectorValue{0.0, 1.0})};
    cfg.add_rule(rule);
    cfg.set_value_set(ValueSet::finite_vector({{1.0, 0.0}, {0.0, 1.0}}));

    Box box = centered_box(2, 4);
    auto res = passage_time_h(cfg, LatticePoint{0, 0}, LatticePoint{2, 0}, 6, box);
    CHECK(res.norm_sq == Rational(2));  // (1,0) + (0,1), all longer walks beaten
    CHECK(res.length == 2);
}

TEST_CASE("opposite letters cancel exactly", "[hilbert]") {
    Configuration cfg = vector_config(2, {1.0, 0.0}, {{1.0, 0.0}, {-1.0, 0.0}});
    cfg.set_value(canonical_edge(LatticePoint{1, 0}, LatticePoint{2, 0}), PassageValue(VectorValue{-1.0, 0.0}));
    Box box = make_box(LatticePoint{-1, -1}, LatticePoint{3, 1});
    auto res = passage_time_h(cfg, LatticePoint{0, 0}, LatticePoint{2, 0}, 6, box);
    CHECK(res.norm_sq == Rational(0));
    CHECK(res.time == 0.0);
}

TEST_CASE("passage sets collect every reachable vector with minimal lengths", "[hilbert]") {
    Configuration cfg = vector_config(2, {1.0, 0.0}, {{1.0, 0.0}});
    Box box = centered_box(2, 4);
    PassageSet ps = passage_set(cfg, LatticePoint{0, 0}, LatticePoint{2, 0}, 6, box);
    REQUIRE(ps.vectors.size() == 3);
    CHECK(ps.vectors[0].vector == (RatVec{2, 0}));
    CHECK(ps.vectors[0].min_length == 2);
    CHECK(ps.vectors[1].vector == (RatVec{4, 0}));
    CHECK(ps.vectors[1].min_length == 4);
    CHECK(ps.vectors[2].vector == (RatVec{6, 0}));
    CHECK(ps.vectors[2].min_length == 6);
    CHECK(ps.contains(RatVec{4, 0}));
    CHECK_FALSE(ps.contains(RatVec{3, 0}));
    CHECK(ps.length_cap == 6);
}

TEST_CASE("length caps below the lattice distance are rejected", "[hilbert]") {
    Configuration cfg = vector_config(2, {1.0, 0.0}, {{1.0, 0.0}});
    Box box = centered_box(2, 4);
    try {
        passage_time_h(cfg, LatticePoint{0, 0}, LatticePoint{2, 0}, 1, box);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CapTooSmall);
    }
    CHECK_THROWS_AS(passage_time_h(cfg, LatticePoint{0, 0}, LatticePoint{9, 9}, 20, box), Error);
}

TEST_CASE("vector geodesics check all contiguous subpaths", "[hilbert]") {
    Configuration cfg = vector_config(2, {0.0, 1.0}, {{0.0, 1.0}});
    Box box = centered_box(2, 4);
    Path straight(std::vector<LatticePoint>{{0, 0}, {1, 0}, {1, 1}});
    CHECK(is_geodesic_h(cfg, straight, 6, box));
    Path backtrack(std::vector<LatticePoint>{{0, 0}, {1, 0}, {0, 0}});
    CHECK_FALSE(is_geodesic_h(cfg, backtrack, 6, box));
}

TEST_CASE("nested-pair monotonicity matches alphabet positivity", "[hilbert]") {
    Configuration pos = vector_config(2, {0.0, 1.0}, {{0.0, 1.0}, {1.0, 0.0}});
    auto clean = monotonicity_check(pos, 100, 11);
    CHECK(clean.violations == 0);
    CHECK_FALSE(clean.found());

    // Letters that cancel along straight roads violate monotonicity.
    Configuration neg(2, PassageValue(VectorValue{1.0, 0.0}));
    EdgeRule rule;
    rule.region = EdgeRegion::periodic();
    rule.values = {PassageValue(VectorValue{1.0, 0.0}), PassageValue(VectorValue{-1.0, 0.0})};
    neg.add_rule(rule);
    neg.set_value_set(ValueSet::finite_vector({{1.0, 0.0}, {-1.0, 0.0}}));
    auto dirty = monotonicity_check(neg, 500, 11);
    REQUIRE(dirty.found());
    CHECK(dirty.tau_super + 1e-9 < dirty.tau_sub);
    CHECK(dirty.sub.edge_count() + 1 == dirty.super.edge_count());
}

TEST_CASE("search agrees with raw walk enumeration", "[hilbert]") {
    Box box = make_box(LatticePoint{0, 0}, LatticePoint{2, 2});
    std::vector<VectorValue> alphabet{{1.0, 0.0}, {-0.5, 1.0}};
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        Configuration cfg(2, PassageValue(alphabet[0]));
        cfg.set_value_set(ValueSet::finite_vector(alphabet));
        for (Coord x = 0; x <= 2; ++x)
            for (Coord y = 0; y <= 2; ++y) {
                if (x < 2)
                    cfg.set_value(canonical_edge(LatticePoint{x, y}, LatticePoint{x + 1, y}),
                                  PassageValue(alphabet[rng.below(2)]));
                if (y < 2)
                    cfg.set_value(canonical_edge(LatticePoint{x, y}, LatticePoint{x, y + 1}),
                                  PassageValue(alphabet[rng.below(2)]));
            }
        auto res = passage_time_h(cfg, LatticePoint{0, 0}, LatticePoint{1, 1}, 6, box);
        Rational expect = brute_min_norm_sq(cfg, LatticePoint{0, 0}, LatticePoint{1, 1}, 6, box);
        CHECK(res.norm_sq == expect);

        // The witness path reproduces the reported optimum exactly.
        RatVec sum;
        for (std::size_t i = 0; i < res.witness.edge_count(); ++i) {
            RatVec v = rat_vec(cfg.vector_value(res.witness.edge(i)));
            if (sum.empty()) sum.assign(v.size(), Rational(0));
            for (std::size_t j = 0; j < v.size(); ++j) sum[j] += v[j];
        }
        if (res.witness.edge_count() > 0) CHECK(rat_norm_sq(sum) == res.norm_sq);
    }
}
