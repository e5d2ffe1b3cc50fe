#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <optional>

#include "percolab/cone.hpp"
#include "percolab/rng.hpp"

using namespace percolab;

namespace {

FiniteVectorSet fvs(std::vector<RatVec> vs) { return FiniteVectorSet(std::move(vs)); }

}  // namespace

TEST_CASE("exact rationals from doubles", "[cone]") {
    CHECK(rational_from_double(0.5) == Rational(1, 2));
    CHECK(rational_from_double(-0.625) == Rational(-5, 8));
    CHECK(rational_from_double(3.0) == Rational(3));
    CHECK_THROWS_AS(rational_from_double(std::nan("")), Error);
    try {
        rational_from_double(std::numeric_limits<double>::infinity());
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedInput);
    }
}

TEST_CASE("finite vector set shape checks", "[cone]") {
    CHECK_THROWS_AS(FiniteVectorSet(std::vector<RatVec>{}), Error);
    CHECK_THROWS_AS(fvs({{1, 0}, {1}}), Error);
    CHECK_THROWS_AS(fvs({{1, 0}, {1, 0}}), Error);  // duplicates rejected
    FiniteVectorSet A = fvs({{1, 0}, {0, 1}});
    CHECK(A.size() == 2);
    CHECK(A.k == 2);
}

TEST_CASE("cone membership produces a checkable certificate", "[cone]") {
    FiniteVectorSet A = fvs({{1, 0}, {0, 1}});

    ConeCertificate in = in_cone(RatVec{2, 3}, A);
    REQUIRE(in.member);
    REQUIRE(in.coefficients.size() == 2);
    CHECK(in.coefficients[0] == Rational(2));
    CHECK(in.coefficients[1] == Rational(3));
    CHECK(certificate_verifies(in, RatVec{2, 3}, A));

    ConeCertificate out = in_cone(RatVec{-1, 0}, A);
    CHECK_FALSE(out.member);
    REQUIRE(out.separator.size() == 2);
    // The separator keeps every generator on one side and the point strictly
    // on the other.
    for (const auto& a : A.vectors) CHECK(rat_dot(out.separator, a) >= 0);
    CHECK(rat_dot(out.separator, RatVec{-1, 0}) < 0);
    CHECK(certificate_verifies(out, RatVec{-1, 0}, A));

    // Tampered certificates fail the checker.
    ConeCertificate bad = in;
    bad.coefficients[0] += 1;
    CHECK_FALSE(certificate_verifies(bad, RatVec{2, 3}, A));
}

TEST_CASE("caratheodory decompositions use few generators", "[cone]") {
    FiniteVectorSet A = fvs({{1, 0}, {0, 1}, {1, 1}, {2, 1}});
    std::vector<Rational> dec = caratheodory_decompose(RatVec{3, 2}, A);
    REQUIRE(dec.size() == A.size());
    std::size_t support = 0;
    RatVec sum{0, 0};
    for (std::size_t i = 0; i < dec.size(); ++i) {
        if (dec[i] != 0) ++support;
        CHECK(dec[i] >= 0);
        for (int j = 0; j < 2; ++j) sum[j] += dec[i] * A.vectors[i][j];
    }
    CHECK(support <= 2);
    CHECK(sum == (RatVec{3, 2}));

    try {
        caratheodory_decompose(RatVec{-1, -1}, A);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotInCone);
    }
}

TEST_CASE("strong positive dependence and origin-interior hulls", "[cone]") {
    FiniteVectorSet axes = fvs({{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
    CHECK(is_strongly_positively_dependent(axes));
    CHECK(conv_contains_origin_interior(axes));

    FiniteVectorSet trident =
        fvs({{1, 0}, {Rational(-3, 5), Rational(4, 5)}, {Rational(-3, 5), Rational(-4, 5)}});
    CHECK(is_strongly_positively_dependent(trident));
    CHECK(conv_contains_origin_interior(trident));

    FiniteVectorSet quadrant = fvs({{1, 0}, {0, 1}});
    CHECK_FALSE(is_strongly_positively_dependent(quadrant));
    CHECK_FALSE(conv_contains_origin_interior(quadrant));

    // A line through 0: positively dependent but the hull has empty interior.
    FiniteVectorSet line = fvs({{1, 0}, {-1, 0}});
    CHECK(is_strongly_positively_dependent(line));
    CHECK_FALSE(conv_contains_origin_interior(line));

    FiniteVectorSet single = fvs({{1, 0}});
    CHECK_FALSE(is_strongly_positively_dependent(single));
    CHECK_FALSE(conv_contains_origin_interior(single));
}

TEST_CASE("positivity and ray containment of alphabets", "[cone]") {
    CHECK(is_positive(fvs({{1, 0}, {0, 1}, {1, 1}})));
    CHECK_FALSE(is_positive(fvs({{1, 0}, {Rational(-3, 5), Rational(4, 5)}})));
    CHECK(is_positive(fvs({{0, 0}, {1, 0}})));
    // The double-vector overload routes through exact rationals.
    CHECK(is_positive(std::vector<VectorValue>{{1.0, 0.0}, {0.0, 1.0}}));

    CHECK(is_ray_contained(fvs({{1, 0}, {2, 0}})));
    CHECK(is_ray_contained(fvs({{0, 0}, {1, 2}, {Rational(1, 2), 1}})));
    CHECK_FALSE(is_ray_contained(fvs({{1, 0}, {0, 1}})));
    CHECK_FALSE(is_ray_contained(fvs({{1, 0}, {-1, 0}})));
}

TEST_CASE("even-length monoid sums", "[cone]") {
    FiniteVectorSet A = fvs({{1, 0}, {0, 1}});
    auto elems = monoid_elements(A, 4);
    CHECK(elems.size() == 9);

    auto counts = monoid_decompose(A, RatVec{1, 1}, 2);
    REQUIRE(counts.has_value());
    CHECK((*counts) == std::vector<int>{1, 1});

    CHECK_FALSE(monoid_decompose(A, RatVec{1, 0}, 4).has_value());  // odd parity
    CHECK_FALSE(monoid_decompose(A, RatVec{Rational(1, 2), Rational(1, 2)}, 4).has_value());

    // Ties resolve to the smallest total, then lexicographically smallest counts.
    FiniteVectorSet B = fvs({{1, 0}, {0, 1}, {1, 1}});
    auto tie = monoid_decompose(B, RatVec{1, 1}, 4);
    REQUIRE(tie.has_value());
    CHECK((*tie) == std::vector<int>{1, 1, 0});

    CHECK_THROWS_AS(monoid_elements(A, 3), Error);  // odd cap rejected

    CHECK(min_norm_odd_target(A, 2) == Catch::Approx(1.0));
    CHECK(min_norm_odd_target(fvs({{1, 0}, {-1, 0}}), 2) == Catch::Approx(1.0));
}

TEST_CASE("simultaneous rational approximation", "[cone]") {
    auto one_third = dirichlet_approx(std::vector<Rational>{Rational(1, 3)}, 10);
    CHECK(one_third.q == 3);
    REQUIRE(one_third.p.size() == 1);
    CHECK(one_third.p[0] == 1);

    auto pair = dirichlet_approx(std::vector<Rational>{Rational(1, 2), Rational(1, 3)}, 6);
    CHECK(pair.q == 2);
    REQUIRE(pair.p.size() == 2);
    CHECK(pair.p[0] == 1);
    CHECK(pair.p[1] == 1);

    // The accepted denominator satisfies the defining inequality exactly:
    // |p_i - q r_i|^k q^k Q < 1 for every coordinate.
    for (std::size_t i = 0; i < 2; ++i) {
        Rational ri = (i == 0) ? Rational(1, 2) : Rational(1, 3);
        Rational err = rat_abs(Rational(pair.p[i], 1) / Rational(pair.q) - ri);
        Rational lhs = (err * Rational(pair.q)) * (err * Rational(pair.q)) * Rational(6);
        CHECK(lhs < 1);
    }

    try {
        dirichlet_approx(std::vector<Rational>{Rational(-1, 3)}, 10);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidParams);
    }
}

TEST_CASE("denominator bound selection for target accuracy", "[cone]") {
    FiniteVectorSet axes = fvs({{1, 0}, {0, 1}});
    std::int64_t Q = choose_dirichlet_Q(1.0, axes);
    CHECK(Q == 2305);
    double S = 2.0;  // sum of generator norms
    CHECK(1.0 / 4.0 + 2.0 * S / std::sqrt(double(Q)) < 1.0 / 3.0);
}

TEST_CASE("cone JSON serialization", "[cone]") {
    FiniteVectorSet A = fvs({{1, 0}, {Rational(-3, 5), Rational(4, 5)}});
    nlohmann::json ja = to_json(A);
    FiniteVectorSet back = vector_set_from_json(ja);
    CHECK(to_json(back).dump() == ja.dump());
    // Non-dyadic entries ride as exact fraction strings.
    CHECK(ja[1][0] == nlohmann::json("-3/5"));

    ConeCertificate yes = in_cone(RatVec{1, 1}, A);
    nlohmann::json jy = to_json(yes);
    CHECK(jy["member"] == nlohmann::json(true));
    REQUIRE(jy.contains("coefficients"));
    CHECK(jy["coefficients"].size() == A.size());

    ConeCertificate no = in_cone(RatVec{-1, -1}, A);
    nlohmann::json jn = to_json(no);
    CHECK(jn["member"] == nlohmann::json(false));
    CHECK(jn.contains("separator"));
}

TEST_CASE("randomized membership certificates all verify", "[cone]") {
    FiniteVectorSet A = fvs({{1, 0}, {0, 1}, {1, 1}, {-1, 2}});
    Rng rng(7);
    int members = 0, non_members = 0;
    for (int trial = 0; trial < 50; ++trial) {
        RatVec x{Rational(rng.range(-6, 6), 1 + static_cast<std::int64_t>(rng.below(4))),
                 Rational(rng.range(-6, 6), 1 + static_cast<std::int64_t>(rng.below(4)))};
        ConeCertificate cert = in_cone(x, A);
        CHECK(certificate_verifies(cert, x, A));
        (cert.member ? members : non_members) += 1;
    }
    CHECK(members > 0);
    CHECK(non_members > 0);
}
