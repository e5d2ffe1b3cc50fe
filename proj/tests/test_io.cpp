#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "percolab/io.hpp"

using namespace percolab;
namespace fs = std::filesystem;

TEST_CASE("pinned floating point rendering", "[io]") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0 / 3.0) == "0.333333333333");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(-1.5) == "-1.5");
    CHECK(format_double(1e-13) == "1e-13");
    CHECK(format_double(1e20) == "1e+20");
}

TEST_CASE("atomic text output", "[io]") {
    fs::path root = fs::path("io_test_tmp");
    fs::remove_all(root);
    std::string file = (root / "a" / "b" / "out.txt").string();

    atomic_write_text(file, "first\n");  // creates the missing parents
    CHECK(read_text_file(file) == "first\n");
    atomic_write_text(file, "second\n");  // replaces in place
    CHECK(read_text_file(file) == "second\n");
    CHECK_FALSE(fs::exists(file + ".tmp"));

    CHECK_THROWS_AS(read_text_file((root / "missing.txt").string()), Error);
    fs::remove_all(root);
}

TEST_CASE("ball and trace tables", "[io]") {
    BallSnapshot snap;
    snap.t = Rational(2);
    snap.points = {LatticePoint{0, 0}, LatticePoint{1, 0}};
    CHECK(ball_csv(snap) == "t,x1,x2\n2,0,0\n2,1,0\n");

    BallSnapshot empty;
    empty.t = Rational(0);
    CHECK(ball_csv(empty) == "t,x1\n");

    std::vector<TraceRow> rows{{Rational(1), 0.5}, {Rational(1, 2), 0.25}};
    CHECK(trace_csv(rows) == "t,distance\n1,0.5\n1/2,0.25\n");
}

TEST_CASE("passage set and point set tables", "[io]") {
    PassageSet ps;
    ps.length_cap = 4;
    ps.vectors = {PassageSetEntry{RatVec{Rational(2), Rational(0)}, 2},
                  PassageSetEntry{RatVec{Rational(5, 2), Rational(-1)}, 4}};
    CHECK(passage_set_csv(ps) == "v1,v2,pathlen\n2,0,2\n5/2,-1,4\n");

    PointSet pts(2);
    pts.append({0.5, -1.0});
    CHECK(point_set_csv(pts) == "x1,x2\n0.5,-1\n");
    CHECK(point_set_csv(PointSet(2)) == "x1,x2\n");
}

TEST_CASE("paths serialize as vertex arrays", "[io]") {
    Path p(std::vector<LatticePoint>{LatticePoint{0, 0}, LatticePoint{1, 0}});
    CHECK(path_to_json(p) == nlohmann::json::parse("[[0,0],[1,0]]"));
}

TEST_CASE("ball pictures are planar unit squares", "[io]") {
    BallSnapshot snap;
    snap.t = Rational(0);
    snap.points = {LatticePoint{0, 0}};
    CHECK(ball_svg(snap) ==
          "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1 -1 3 3\">\n"
          "  <rect x=\"-0.5\" y=\"-0.5\" width=\"1\" height=\"1\" fill=\"#4477aa\" stroke=\"none\"/>\n"
          "</svg>\n");

    // The vertical axis is flipped: the higher lattice point lands higher up.
    BallSnapshot two;
    two.t = Rational(1);
    two.points = {LatticePoint{0, 0}, LatticePoint{0, 1}};
    std::string svg = ball_svg(two);
    CHECK(svg.find("y=\"0.5\"") != std::string::npos);   // the (0,0) square
    CHECK(svg.find("y=\"-0.5\"") != std::string::npos);  // the (0,1) square, above it

    BallSnapshot empty;
    try {
        ball_svg(empty);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptySet);
    }
    BallSnapshot solid;
    solid.points = {LatticePoint{0, 0, 0}};
    try {
        ball_svg(solid);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnsupportedDimension);
    }
}

TEST_CASE("field pictures shade between the declared bounds", "[io]") {
    CostField flat;
    flat.dim = 2;
    flat.default_value = 1;
    flat.inf_a = 1;
    flat.sup_a = 1;
    flat.dom_lo = {Rational(-5, 4), Rational(-5, 4)};
    flat.dom_hi = {Rational(5, 4), Rational(5, 4)};
    CHECK(field_svg(flat, 1) ==
          "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\">\n"
          "  <rect x=\"0\" y=\"0\" width=\"1\" height=\"1\" fill=\"#ffffff\"/>\n"
          "</svg>\n");

    CostField bumped = flat;
    bumped.sup_a = 2;
    bumped.regions.push_back(FieldRegion::ball(Rational(1, 2), Rational(2)));
    std::string svg = field_svg(bumped, 1);  // the lone tile samples the center
    CHECK(svg.find("fill=\"#3232ff\"") != std::string::npos);

    CHECK_THROWS_AS(field_svg(flat, 0), Error);
    CostField solid = flat;
    solid.dim = 3;
    try {
        field_svg(solid, 1);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnsupportedDimension);
    }
}

TEST_CASE("run manifests record every artifact", "[io]") {
    RunManifest m;
    m.command = "ball";
    m.inputs = {"config.json"};
    m.parameters = {{"t", "4"}, {"rescale", "true"}};
    m.seed = 7;
    m.tool_version = "0.1.0";
    m.outputs = {"ball.csv", "ball.svg"};
    m.wall_clock_seconds = 0.25;

    nlohmann::json j = to_json(m);
    CHECK(j["command"] == nlohmann::json("ball"));
    CHECK(j["inputs"] == nlohmann::json::parse(R"(["config.json"])"));
    CHECK(j["parameters"]["t"] == nlohmann::json("4"));
    CHECK(j["parameters"]["rescale"] == nlohmann::json("true"));
    CHECK(j["seed"] == nlohmann::json(7));
    CHECK(j["tool_version"] == nlohmann::json("0.1.0"));
    CHECK(j["outputs"] == nlohmann::json::parse(R"(["ball.csv","ball.svg"])"));
    CHECK(j["wall_clock_seconds"] == nlohmann::json(0.25));
}

TEST_CASE("configurations survive a file round trip", "[io]") {
    Configuration cfg(2, PassageValue(Rational(1)));
    cfg.set_value(canonical_edge(LatticePoint{0, 0}, LatticePoint{1, 0}),
                  PassageValue(Rational(1, 3)));
    cfg.set_value_set(ValueSet::finite_scalar({Rational(1, 3), Rational(1)}));
    cfg.set_domain(centered_box(2, 3));

    fs::path root = fs::path("io_test_tmp_cfg");
    fs::remove_all(root);
    std::string file = (root / "cfg.json").string();
    nlohmann::json j1 = to_json(cfg);
    atomic_write_text(file, j1.dump(2));

    Configuration back = configuration_from_json(nlohmann::json::parse(read_text_file(file)));
    nlohmann::json j2 = to_json(back);
    CHECK(j2 == j1);
    CHECK(j2.dump(2) == j1.dump(2));
    CHECK(back.scalar_value(canonical_edge(LatticePoint{0, 0}, LatticePoint{1, 0})) ==
          Rational(1, 3));
    fs::remove_all(root);
}
