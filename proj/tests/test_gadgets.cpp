#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "percolab/gadgets.hpp"

using namespace percolab;

namespace {

ValueSet one_seven() { return ValueSet::finite_scalar({Rational(1), Rational(7)}); }

SkewBoxParams hilbert_box() {
    SkewBoxParams P;
    P.d = 2;
    P.m = 1;
    P.p = 1;
    P.q = 7;
    P.r = 45;
    P.q_prime = 262;
    return P;
}

}  // namespace

TEST_CASE("gadget parameter selection from the cost ratio", "[gadgets]") {
    SkewBoxParams P = choose_gadget_params(2, 1, Rational(1), Rational(7), one_seven());
    CHECK(P.p == 1);
    CHECK(P.q == 5);
    CHECK(P.r == 12);
    CHECK(P.q_prime == 18);
    CHECK(P.lambda == Rational(7, 2));
    CHECK(P.eps == Rational(3, 4));
    P.validate();  // full gap inequalities hold

    // A joint-gap requirement below the dimensional term changes nothing...
    SkewBoxParams P3 = choose_gadget_params(2, 3, Rational(1), Rational(7), one_seven());
    CHECK(P3.q == 5);
    CHECK(P3.q_prime == 18);
    // ... while a dominant one widens the whole box.
    SkewBoxParams P7 = choose_gadget_params(2, 7, Rational(1), Rational(7), one_seven());
    CHECK(P7.q == 9);
    CHECK(P7.r == 19);
    CHECK(P7.q_prime == 26);

    try {
        choose_gadget_params(2, 1, Rational(1), Rational(1), ValueSet::finite_scalar({Rational(1)}));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoMargin);
    }
    try {
        choose_gadget_params(2, 1, Rational(1), Rational(6, 5),
                             ValueSet::finite_scalar({Rational(1), Rational(6, 5)}));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoMargin);
    }
}

TEST_CASE("skew-box parameter validation levels", "[gadgets]") {
    SkewBoxParams bad;
    bad.d = 2;
    bad.m = 1;
    bad.p = 5;
    bad.q = 3;
    bad.r = 12;
    bad.q_prime = 18;
    CHECK_THROWS_AS(bad.validate_geometry(), Error);

    SkewBoxParams geo = choose_gadget_params(2, 1, Rational(1), Rational(7), one_seven());
    geo.validate_geometry();
    geo.validate_values();
    geo.eps = Rational(3);  // breaks (a + eps) lambda < b - eps
    CHECK_THROWS_AS(geo.validate(), Error);

    SkewBoxParams flat = geo;
    flat.d = 1;
    CHECK_THROWS_AS(flat.validate_geometry(), Error);
    SkewBoxParams cheapless = geo;
    cheapless.a = Rational(0);
    CHECK_THROWS_AS(cheapless.validate_values(), Error);
}

TEST_CASE("skew-box configuration carries the two-value field", "[gadgets]") {
    SkewBoxParams P = choose_gadget_params(2, 1, Rational(1), Rational(7), one_seven());
    SkewBoxGadget g = skew_box_config(P);
    CHECK(g.cheap.count(canonical_edge(LatticePoint{2, 0}, LatticePoint{3, 0})) == 1);
    CHECK(g.cheap.count(canonical_edge(LatticePoint{2, 1}, LatticePoint{3, 1})) == 0);
    CHECK(g.cfg.scalar_value(canonical_edge(LatticePoint{2, 0}, LatticePoint{3, 0})) == Rational(1));
    CHECK(g.cfg.scalar_value(canonical_edge(LatticePoint{2, 1}, LatticePoint{3, 1})) == Rational(7));
}

TEST_CASE("funneling holds on the selected box", "[gadgets]") {
    SkewBoxParams P = choose_gadget_params(2, 1, Rational(1), Rational(7), one_seven());
    SkewBoxGadget g = skew_box_config(P);
    GadgetReport rep = verify_funneling(g.cfg, g.cheap, P);
    CHECK(rep.verified);
    CHECK_FALSE(rep.counterexample.has_value());
    CHECK(rep.claim == "funnel");
    CHECK(rep.statistics.at("pairs") == 1067.0);
    CHECK(rep.statistics.at("box_vertices") == 1056.0);
    CHECK(rep.statistics.at("cheap_diameter") == 55.0);
    CHECK(rep.statistics.at("expensive_edges") == 1941.0);
    CHECK(rep.statistics.at("traversal_checks") == 1702.0);
    CHECK(rep.statistics.at("min_expensive_slack") == 10.0);
}

TEST_CASE("greedy shrink finds the smallest verifying box", "[gadgets]") {
    SkewBoxParams P = choose_gadget_params(2, 1, Rational(1), Rational(7), one_seven());
    MinimalFunnelingResult mr = minimal_funneling_params(P);
    CHECK(mr.params.p == 1);
    CHECK(mr.params.q == 2);
    CHECK(mr.params.r == 3);
    CHECK(mr.params.q_prime == 4);
    CHECK(mr.shrink_steps == 26);
    CHECK(mr.report.verified);
    CHECK(mr.report.statistics.at("pairs") == 192.0);
    CHECK(mr.report.statistics.at("min_expensive_slack") == 4.0);
}

TEST_CASE("funneling verification rejects broken configurations", "[gadgets]") {
    SkewBoxParams P = choose_gadget_params(2, 1, Rational(1), Rational(7), one_seven());

    SECTION("a cheap-valued edge outside the declared set is caught") {
        SkewBoxGadget g = skew_box_config(P);
        std::set<Edge> cheap = g.cheap;
        cheap.erase(canonical_edge(LatticePoint{1, 0}, LatticePoint{1, 1}));
        GadgetReport rep = verify_funneling(g.cfg, cheap, P);
        CHECK_FALSE(rep.verified);
        REQUIRE(rep.counterexample.has_value());
        // The violating path really is optimal yet strays off the cheap set.
        const Path& bad = rep.counterexample->first;
        bool off_cheap = false;
        for (size_t i = 0; i < bad.edge_count(); ++i) off_cheap = off_cheap || !cheap.count(bad.edge(i));
        CHECK(off_cheap);
    }

    SECTION("a cheap bypass road defeats the joint traversal claim") {
        SkewBoxGadget g = skew_box_config(P);
        std::set<Edge> cheap = g.cheap;
        for (Coord x = P.p; x < P.q; ++x) {
            Edge e = canonical_edge(LatticePoint{x, 1}, LatticePoint{x + 1, 1});
            g.cfg.set_value(e, PassageValue(P.a));
            cheap.insert(e);
        }
        GadgetReport rep = verify_funneling(g.cfg, cheap, P);
        CHECK_FALSE(rep.verified);
        CHECK(rep.counterexample.has_value());
    }
}

TEST_CASE("alternating tree funneling for vector passage", "[gadgets]") {
    SkewBoxParams P = hilbert_box();
    VectorValue va{1.0, 0.0}, vb{0.0, 1.0};
    HilbertFunnelGadget g = bfs_alternating_config(P, va, vb);
    CHECK(g.mu == 0.0);
    CHECK(g.lambda == Catch::Approx(std::sqrt(0.75)));
    CHECK(g.tree_edges.size() == 730);
    CHECK(g.root == LatticePoint{1, 0});

    GadgetReport rep = verify_funneling_h(g.cfg, P, 460);
    CHECK(rep.verified);
    CHECK(rep.claim == "funnel-h");
    CHECK(rep.statistics.at("pairs") == 9394.0);
    CHECK(rep.statistics.at("tree_paths") == 132490.0);
    CHECK(rep.statistics.at("mu") == 0.0);
    CHECK(rep.statistics.at("lambda") == Catch::Approx(0.8660254038));
    CHECK(rep.statistics.at("contraction_max_ratio") == Catch::Approx(0.860662966));
    CHECK(rep.statistics.at("contraction_max_ratio") < rep.statistics.at("lambda"));
    CHECK(rep.statistics.at("min_margin") == Catch::Approx(0.0766396047));
    CHECK(rep.statistics.at("min_margin") > 0.0);

    try {
        verify_funneling_h(g.cfg, P, 10);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CapTooSmall);
    }
}

TEST_CASE("tree funneling rejects off-pattern configurations", "[gadgets]") {
    SkewBoxParams P = hilbert_box();
    VectorValue va{1.0, 0.0}, vb{0.0, 1.0};

    SECTION("an off-skeleton edge not carrying the default letter") {
        HilbertFunnelGadget g = bfs_alternating_config(P, va, vb);
        g.cfg.set_value(canonical_edge(LatticePoint{3, 3}, LatticePoint{3, 4}), PassageValue(va));
        try {
            verify_funneling_h(g.cfg, P, 460);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::PreconditionFailed);
        }
    }

    SECTION("a tree without alternation loses the contraction bound") {
        HilbertFunnelGadget g = bfs_alternating_config(P, va, vb);
        for (const Edge& e : g.tree_edges) g.cfg.set_value(e, PassageValue(vb));
        GadgetReport rep = verify_funneling_h(g.cfg, P, 460);
        CHECK_FALSE(rep.verified);
        CHECK(rep.counterexample.has_value());
    }
}

TEST_CASE("one more letter can shorten a vector passage", "[gadgets]") {
    Lemma52Result r1 = lemma52_counterexample({1.0, 0.0}, {-0.6, 0.8});
    CHECK(r1.n == 1);
    CHECK(r1.gamma1.edge_count() == 1);
    CHECK(r1.gamma2.edge_count() == 2);
    GadgetReport rep1 = verify_lemma52(r1);
    CHECK(rep1.verified);
    CHECK(rep1.statistics.at("n") == 1.0);
    CHECK(rep1.statistics.at("tau1_sq") == 1.0);
    CHECK(rep1.statistics.at("tau2_sq") == Catch::Approx(0.8));

    Lemma52Result r6 = lemma52_counterexample({1.0, 0.0}, {-0.1, 0.995});
    CHECK(r6.n == 6);
    GadgetReport rep6 = verify_lemma52(r6);
    CHECK(rep6.verified);
    CHECK(rep6.statistics.at("tau1_sq") == 36.0);
    CHECK(rep6.statistics.at("tau2_sq") == Catch::Approx(35.800025));

    try {
        lemma52_counterexample({1.0, 0.0}, {0.0, 1.0});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotNegative);
    }

    // Swapping the paths inverts the inequality and yields a counterexample.
    Lemma52Result swapped = r1;
    std::swap(swapped.gamma1, swapped.gamma2);
    GadgetReport bad = verify_lemma52(swapped);
    CHECK_FALSE(bad.verified);
    CHECK(bad.counterexample.has_value());
}

TEST_CASE("equal norms: unique optimum, no geodesic", "[gadgets]") {
    Lemma53EqualResult r = lemma53_equal_norm_config({1.0, 0.0}, {0.0, 1.0});
    CHECK(r.X == LatticePoint{0, 0});
    CHECK(r.Z == LatticePoint{1, 1});
    CHECK(r.Y == LatticePoint{2, 2});
    GadgetReport rep = verify_lemma53_equal(r);
    CHECK(rep.verified);
    CHECK(rep.statistics.at("optimum_nsq") == 8.0);  // ||2a + 2b||^2
    CHECK(std::sqrt(rep.statistics.at("optimum_nsq")) == Catch::Approx(2.0 * std::sqrt(2.0)));
    CHECK(rep.statistics.at("optimal_walks") == 1.0);
    CHECK(rep.statistics.at("walks_to_target") == 570.0);
    CHECK(rep.statistics.at("walk_nodes") == 4681.0);

    try {
        lemma53_equal_norm_config({1.5, 0.0}, {0.0, 1.0});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NormMismatch);
    }
    try {
        lemma53_equal_norm_config({1.0, 0.0}, {1.0, 0.0});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RayContained);
    }
}

TEST_CASE("unequal norms: a longer letter string wins at scale", "[gadgets]") {
    Lemma53UnequalResult r = lemma53_unequal_norm_config({1.5, 0.0}, {0.0, 1.0}, 4);
    CHECK(r.n_a == 6);
    CHECK(r.n_b == 8);
    CHECK(r.case_tag == "fill-b");
    CHECK(r.X == LatticePoint{0, 0});
    CHECK(r.Y == LatticePoint{6, 24});
    CHECK(r.gamma1.edge_count() == 6);
    CHECK(r.gamma2.edge_count() == 8);

    GadgetReport rep = verify_lemma53_unequal(r);
    CHECK(rep.verified);
    CHECK(rep.statistics.at("n_a") == 6.0);
    CHECK(rep.statistics.at("n_b") == 8.0);
    CHECK(rep.statistics.at("tau1_sq") == 81.0);   // (6 * 1.5)^2: the straight a-run
    CHECK(rep.statistics.at("tau2_sq") == 64.0);   // (8 * 1)^2: the b-detour beats it
    CHECK(rep.statistics.at("scale_gap") == 5.4375);
    CHECK(rep.statistics.at("dfs_nodes") == 4121.0);
    CHECK(rep.statistics.at("fields_built") == 116.0);

    // A finer tolerance forces a larger even pair.
    Lemma53UnequalResult r40 = lemma53_unequal_norm_config({1.5, 0.0}, {0.0, 1.0}, 40);
    CHECK(r40.n_a == 30);
    CHECK(r40.n_b == 44);

    try {
        lemma53_unequal_norm_config({1.0, 0.0}, {0.0, 1.0}, 4);  // needs ||a|| > ||b||
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NormMismatch);
    }
}

TEST_CASE("no-ray patch tables", "[gadgets]") {
    CHECK(std::strcmp(detail::no_ray_horiz_row(1), "babaaa") == 0);
    CHECK(std::strcmp(detail::no_ray_horiz_row(6), "b") == 0);
    CHECK(std::strcmp(detail::no_ray_vert_col(1), "ababba") == 0);
    CHECK(std::strcmp(detail::no_ray_vert_col(6), "a") == 0);
    CHECK(detail::no_ray_horiz(0, 0) == 'a');  // the axis row stays cheap
    CHECK(detail::no_ray_horiz(0, 1) == 'b');
    CHECK(detail::no_ray_vert(2, 4) == 'b');

    CHECK_THROWS_AS(no_ray_config(7), Error);
    Configuration cfg = no_ray_config(8);
    // One vertical patch edge, one horizontal, and the far default.
    CHECK(as_vector(cfg.value(canonical_edge(LatticePoint{8, 0}, LatticePoint{9, 0}))) ==
          VectorValue{1.0, 0.0});
    CHECK(as_vector(cfg.value(canonical_edge(LatticePoint{30, 30}, LatticePoint{31, 30}))) ==
          (VectorValue{0.0, 2.0}));
}

TEST_CASE("optimal directions exist but no geodesic ray leaves the patch", "[gadgets]") {
    Configuration cfg = no_ray_config(8);
    GadgetReport rep = verify_no_geodesic_ray(cfg, 8, 8);
    CHECK(rep.verified);
    CHECK(rep.statistics.at("targets") == 13.0);
    CHECK(rep.statistics.at("optimal_walks") == 34.0);
    CHECK(rep.statistics.at("geodesics_found") == 0.0);
    CHECK(rep.statistics.at("missing_prefix_witness") == 0.0);
    CHECK(rep.statistics.at("min_prefix_gap") ==
          Catch::Approx(std::sqrt(10.0) - std::sqrt(8.0)));
    CHECK(rep.statistics.at("walk_nodes") == 127172.0);

    // Flooding the patch with the unit vertical letter restores a geodesic.
    Configuration flooded = no_ray_config(8);
    const VectorValue vb{0.0, 1.0};
    for (Coord u = 0; u <= 6; ++u)
        for (Coord v = -7; v <= 7; ++v) {
            if (u + 1 + std::abs(v) <= 7)
                flooded.set_value(canonical_edge(LatticePoint{8 + u, v}, LatticePoint{9 + u, v}),
                                  PassageValue(vb));
            if (u >= 1 && u + std::max(std::abs(v), std::abs(v + 1)) <= 7)
                flooded.set_value(canonical_edge(LatticePoint{8 + u, v}, LatticePoint{8 + u, v + 1}),
                                  PassageValue(vb));
        }
    GadgetReport broken = verify_no_geodesic_ray(flooded, 8, 8);
    CHECK_FALSE(broken.verified);
    CHECK(broken.statistics.at("geodesics_found") >= 1.0);
}

TEST_CASE("cycle attachment realizes a target passage vector", "[gadgets]") {
    std::vector<VectorValue> A{{1.0, 0.0}, {-0.625, 0.75}, {-0.625, -0.75}};
    Configuration host(2, PassageValue(VectorValue{1.0, 0.0}));
    host.set_value_set(ValueSet::finite_vector(A));
    Thm43Result r = thm43_cycle_builder(A, {0.75, 0.0}, LatticePoint{0, 0}, LatticePoint{2, 0},
                                        host, 0.5);
    CHECK(r.q == 5);
    CHECK(r.witness.edge_count() == 56);
    CHECK(r.error_norm_sq == Rational(0));
    REQUIRE(r.p.size() == 3);
    CHECK(r.p[0] == 0);
    CHECK(r.p[1] == 8);
    CHECK(r.p[2] == 8);
    CHECK(r.m_counts == std::vector<int>{2, 1, 1});

    GadgetReport rep = verify_thm43(r);
    CHECK(rep.verified);
    CHECK(rep.statistics.at("cycle_q") == 5.0);
    CHECK(rep.statistics.at("error_norm") == 0.0);
    CHECK(rep.statistics.at("witness_edges") == 56.0);

    // Padding the witness with an out-and-back step spoils the vector.
    Thm43Result bad = r;
    std::vector<LatticePoint> verts = bad.witness.v;
    LatticePoint last = verts.back(), out = last;
    out[1] += 1;
    verts.push_back(out);
    verts.push_back(last);
    bad.witness = Path(std::move(verts));
    GadgetReport broken = verify_thm43(bad);
    CHECK_FALSE(broken.verified);
    CHECK(broken.statistics.at("error_norm") > 0.0);

    try {
        thm43_cycle_builder({{1.0, 0.0}, {0.0, 1.0}}, {0.75, 0.0}, LatticePoint{0, 0},
                            LatticePoint{2, 0}, host, 0.5);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotSPD);
    }
    try {
        thm43_cycle_builder(A, {0.75, 0.0}, LatticePoint{0, 0}, LatticePoint{1, 0}, host, 0.5);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParityMismatch);
    }
}

TEST_CASE("gadget reports serialize their evidence", "[gadgets]") {
    Lemma52Result r = lemma52_counterexample({1.0, 0.0}, {-0.6, 0.8});
    nlohmann::json ok = to_json(verify_lemma52(r));
    CHECK(ok["claim"] == nlohmann::json("lemma52"));
    CHECK(ok["verified"] == nlohmann::json(true));
    CHECK(ok["statistics"].contains("n"));
    CHECK_FALSE(ok.contains("counterexample"));

    std::swap(r.gamma1, r.gamma2);
    nlohmann::json bad = to_json(verify_lemma52(r));
    CHECK(bad["verified"] == nlohmann::json(false));
    REQUIRE(bad.contains("counterexample"));
    CHECK(bad["counterexample"].contains("violating"));
    CHECK(bad["counterexample"].contains("reference"));
}
