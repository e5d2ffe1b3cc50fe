#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "percolab/config.hpp"
#include "percolab/errors.hpp"
#include "percolab/field.hpp"
#include "percolab/geometry.hpp"
#include "percolab/hilbert_fpp.hpp"
#include "percolab/rational.hpp"
#include "percolab/scalar_fpp.hpp"

// Deterministic artifact emission: CSV/SVG/JSON text builders with pinned
// number formatting, atomic file writes, and a run manifest listing every
// produced file.  Identical inputs reproduce byte-identical text.

namespace percolab {

// Pinned floating-point rendering used by every emitted artifact.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
}

// ---------------------------------------------------------------------------
// Atomic file output: write to a sibling temp file, then rename into place.
// ---------------------------------------------------------------------------

inline void atomic_write_text(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(out.good(), ErrorCode::MalformedInput, "cannot open output file " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        require(out.good(), ErrorCode::MalformedInput, "short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::MalformedInput, "cannot open input file " + path);
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

// ---------------------------------------------------------------------------
// CSV builders.
// ---------------------------------------------------------------------------

// Rows "t,x1,...,xd", one per ball point, exact rational t.
inline std::string ball_csv(const BallSnapshot& snap) {
    int d = snap.points.empty() ? 0 : snap.points[0].dim();
    std::string out = "t";
    for (int i = 1; i <= std::max(d, 1); ++i) out += ",x" + std::to_string(i);
    out += "\n";
    const std::string ts = rat_string(snap.t);
    for (const auto& p : snap.points) {
        out += ts;
        for (int i = 0; i < p.dim(); ++i) out += "," + std::to_string(p[i]);
        out += "\n";
    }
    return out;
}

// Rows "t,distance" for a convergence trace.
inline std::string trace_csv(const std::vector<TraceRow>& rows) {
    std::string out = "t,distance\n";
    for (const auto& r : rows) out += rat_string(r.t) + "," + format_double(r.distance) + "\n";
    return out;
}

// Rows "v1,...,vk,pathlen" for a passage set, exact rational components.
inline std::string passage_set_csv(const PassageSet& ps) {
    size_t k = ps.vectors.empty() ? 0 : ps.vectors[0].vector.size();
    std::string out;
    for (size_t i = 1; i <= std::max<size_t>(k, 1); ++i) out += "v" + std::to_string(i) + ",";
    out += "pathlen\n";
    for (const auto& e : ps.vectors) {
        for (const auto& c : e.vector) out += rat_string(c) + ",";
        out += std::to_string(e.min_length) + "\n";
    }
    return out;
}

// Rows "x1,...,xd" for a sampled point set (unit balls, rescaled balls).
inline std::string point_set_csv(const PointSet& ps) {
    std::string out;
    for (int i = 1; i <= std::max(ps.dim, 1); ++i)
        out += std::string(i > 1 ? "," : "") + "x" + std::to_string(i);
    out += "\n";
    for (size_t i = 0; i < ps.size(); ++i) {
        for (int j = 0; j < ps.dim; ++j)
            out += std::string(j > 0 ? "," : "") + format_double(ps.coord(i, j));
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON builders.
// ---------------------------------------------------------------------------

inline nlohmann::json path_to_json(const Path& p) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : p.v) arr.push_back(detail::point_to_json(v));
    return arr;
}

// ---------------------------------------------------------------------------
// SVG rendering (d = 2 only): unit squares per lattice point, heat tiles for
// planar cost fields.  Fixed scale, pinned coordinates.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string svg_header(double min_x, double min_y, double w, double h) {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"";
    out += format_double(min_x) + " " + format_double(min_y) + " " + format_double(w) + " " +
           format_double(h) + "\">\n";
    return out;
}

}  // namespace detail

inline std::string ball_svg(const BallSnapshot& snap) {
    require(!snap.points.empty(), ErrorCode::EmptySet, "cannot render an empty ball");
    require(snap.points[0].dim() == 2, ErrorCode::UnsupportedDimension, "SVG rendering is planar only");
    Box bb = bounding_box(snap.points, 1);
    std::string out = detail::svg_header(static_cast<double>(bb.lo[0]), static_cast<double>(bb.lo[1]),
                                         static_cast<double>(bb.hi[0] - bb.lo[0] + 1),
                                         static_cast<double>(bb.hi[1] - bb.lo[1] + 1));
    // Flip the vertical axis so +y points up on screen.
    const double flip = static_cast<double>(bb.lo[1] + bb.hi[1] + 1);
    for (const auto& p : snap.points) {
        out += "  <rect x=\"" + format_double(static_cast<double>(p[0]) - 0.5) + "\" y=\"" +
               format_double(flip - static_cast<double>(p[1]) - 0.5 - 1.0) +
               "\" width=\"1\" height=\"1\" fill=\"#4477aa\" stroke=\"none\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

// Planar heat tiles: sample the field on an n x n grid over its domain and
// shade each tile by its value between the field's declared bounds.
inline std::string field_svg(const CostField& f, int n) {
    require(f.dim == 2, ErrorCode::UnsupportedDimension, "SVG rendering is planar only");
    require(n >= 1, ErrorCode::InvalidParams, "tile count must be positive");
    const Rational lo_x = f.dom_lo[0], lo_y = f.dom_lo[1];
    const Rational w = f.dom_hi[0] - f.dom_lo[0], h = f.dom_hi[1] - f.dom_lo[1];
    require(w > 0 && h > 0, ErrorCode::InvalidParams, "degenerate field domain");
    std::string out = detail::svg_header(0, 0, static_cast<double>(n), static_cast<double>(n));
    const double vlo = to_double(f.inf_a), vhi = to_double(f.sup_a);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            RatVec y{lo_x + w * Rational(2 * i + 1, 2 * n), lo_y + h * Rational(2 * j + 1, 2 * n)};
            double v = to_double(field_value(f, y));
            double s = vhi > vlo ? (v - vlo) / (vhi - vlo) : 0.0;
            int shade = static_cast<int>(255.0 - 205.0 * std::min(1.0, std::max(0.0, s)));
            char color[8];
            std::snprintf(color, sizeof(color), "#%02x%02x%02x", shade, shade, 255);
            out += "  <rect x=\"" + std::to_string(i) + "\" y=\"" + std::to_string(n - 1 - j) +
                   "\" width=\"1\" height=\"1\" fill=\"" + std::string(color) + "\"/>\n";
        }
    out += "</svg>\n";
    return out;
}

// ---------------------------------------------------------------------------
// Run manifest: one JSON record per invocation, listing command, inputs,
// parameters, seed, and every file written.
// ---------------------------------------------------------------------------

struct RunManifest {
    std::string command;
    std::vector<std::string> inputs;
    std::map<std::string, std::string> parameters;
    std::uint64_t seed = 0;
    std::string tool_version;
    std::vector<std::string> outputs;
    double wall_clock_seconds = 0;
};

inline nlohmann::json to_json(const RunManifest& m) {
    nlohmann::json j;
    j["command"] = m.command;
    j["inputs"] = m.inputs;
    j["parameters"] = nlohmann::json::object();
    for (const auto& [key, val] : m.parameters) j["parameters"][key] = val;
    j["seed"] = m.seed;
    j["tool_version"] = m.tool_version;
    j["outputs"] = m.outputs;
    j["wall_clock_seconds"] = m.wall_clock_seconds;
    return j;
}

}  // namespace percolab
