#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "percolab/errors.hpp"
#include "percolab/geometry.hpp"
#include "percolab/rng.hpp"
#include "percolab/values.hpp"

namespace percolab {

// ---------------------------------------------------------------------------
// Region filters over edges, used by lazily evaluated default rules.
// ---------------------------------------------------------------------------

struct EdgeRegion {
    enum class Type { Box, BoxBoundary, Segment, Periodic };

    Type type = Type::Box;
    std::optional<Box> box;            // Box / BoxBoundary / optional clip for Periodic
    LatticePoint seg_a, seg_b;         // Segment: axis-aligned lattice segment

    static EdgeRegion box_region(const Box& b) { return EdgeRegion{Type::Box, b, {}, {}}; }
    static EdgeRegion box_boundary(const Box& b) { return EdgeRegion{Type::BoxBoundary, b, {}, {}}; }

    static EdgeRegion segment(const LatticePoint& a, const LatticePoint& b) {
        require(a.dim() == b.dim(), ErrorCode::DimensionMismatch, "segment region");
        int diff = 0;
        for (int i = 0; i < a.dim(); ++i)
            if (a[i] != b[i]) ++diff;
        require(diff == 1, ErrorCode::InvalidParams, "segment region must be axis-aligned and nondegenerate");
        return EdgeRegion{Type::Segment, std::nullopt, a, b};
    }

    static EdgeRegion periodic(std::optional<Box> clip = std::nullopt) {
        return EdgeRegion{Type::Periodic, clip, {}, {}};
    }

    bool matches(const Edge& e) const {
        switch (type) {
            case Type::Box:
                return box->contains(e);
            case Type::BoxBoundary:
                return edge_on_box_boundary(e, *box);
            case Type::Segment: {
                int axis = edge_axis(e);
                for (int i = 0; i < e.a.dim(); ++i) {
                    if (i == axis) continue;
                    if (e.a[i] != seg_a[i]) return false;
                }
                if (seg_a[axis] == seg_b[axis]) return false;
                Coord lo = std::min(seg_a[axis], seg_b[axis]);
                Coord hi = std::max(seg_a[axis], seg_b[axis]);
                for (int i = 0; i < e.a.dim(); ++i)
                    if (i != axis && seg_b[i] != seg_a[i]) return false;
                return e.a[axis] >= lo && e.b[axis] <= hi;
            }
            case Type::Periodic:
                return !box || box->contains(e);
        }
        return false;
    }
};

// One default-rule entry: a region plus either a constant value or a periodic
// pattern indexed by the coordinate sum of the edge's lower endpoint.
struct EdgeRule {
    EdgeRegion region;
    std::vector<PassageValue> values;  // size 1 = constant, size n = periodic pattern

    const PassageValue& value_for(const Edge& e) const {
        if (values.size() == 1) return values[0];
        Coord s = 0;
        for (int i = 0; i < e.a.dim(); ++i) s += e.a[i];
        std::int64_t n = static_cast<std::int64_t>(values.size());
        std::int64_t ix = ((s % n) + n) % n;
        return values[static_cast<size_t>(ix)];
    }
};

// ---------------------------------------------------------------------------
// Configuration: a total assignment of passage values to nearest-neighbour
// edges, given by an explicit finite map layered over ordered default rules
// and a fallback constant.  Scalar values are exact rationals.
// ---------------------------------------------------------------------------

class Configuration {
  public:
    Configuration() = default;

    Configuration(int dim, PassageValue default_value) : dim_(dim), default_(std::move(default_value)) {
        require(dim >= 1, ErrorCode::InvalidParams, "dimension must be positive");
        check_arity(default_);
    }

    int dim() const { return dim_; }
    bool scalar_kind() const { return is_scalar(default_); }

    int vector_arity() const {
        require(!scalar_kind(), ErrorCode::KindMismatch, "vector_arity of a scalar configuration");
        return static_cast<int>(as_vector(default_).size());
    }

    void set_value(const Edge& e, PassageValue v) {
        check_arity(v);
        explicit_[e] = std::move(v);
    }

    void set_value(const LatticePoint& u, const LatticePoint& v, PassageValue val) {
        set_value(canonical_edge(u, v), std::move(val));
    }

    void add_rule(EdgeRule rule) {
        require(!rule.values.empty(), ErrorCode::InvalidParams, "rule without values");
        for (const auto& v : rule.values) check_arity(v);
        rules_.push_back(std::move(rule));
    }

    void set_domain(const Box& b) {
        require(b.dim() == dim_, ErrorCode::DimensionMismatch, "domain box");
        domain_ = b;
    }

    void set_value_set(ValueSet a) { value_set_ = std::move(a); }

    const std::optional<Box>& domain() const { return domain_; }
    const std::optional<ValueSet>& value_set() const { return value_set_; }
    const PassageValue& default_value() const { return default_; }
    const std::unordered_map<Edge, PassageValue, EdgeHash>& explicit_edges() const { return explicit_; }
    const std::vector<EdgeRule>& rules() const { return rules_; }

    const PassageValue& value(const Edge& e) const {
        require(e.a.dim() == dim_, ErrorCode::DimensionMismatch, "edge dimension");
        if (domain_)
            require(domain_->contains(e), ErrorCode::DomainExceeded, "edge outside declared bounding box");
        auto it = explicit_.find(e);
        if (it != explicit_.end()) return it->second;
        for (const auto& r : rules_)
            if (r.region.matches(e)) return r.value_for(e);
        return default_;
    }

    const PassageValue& value(const LatticePoint& u, const LatticePoint& v) const {
        return value(canonical_edge(u, v));
    }

    Rational scalar_value(const Edge& e) const { return as_scalar(value(e)); }
    const VectorValue& vector_value(const Edge& e) const { return as_vector(value(e)); }

  private:
    void check_arity(const PassageValue& v) const {
        if (is_scalar(default_)) {
            require(is_scalar(v), ErrorCode::KindMismatch, "scalar configuration got vector value");
            require(as_scalar(v) >= 0, ErrorCode::InvalidParams, "scalar passage values must be nonnegative");
        } else {
            require(!is_scalar(v), ErrorCode::KindMismatch, "vector configuration got scalar value");
            require(as_vector(v).size() == as_vector(default_).size(), ErrorCode::DimensionMismatch,
                    "vector value arity");
        }
    }

    int dim_ = 1;
    PassageValue default_ = Rational(1);
    std::unordered_map<Edge, PassageValue, EdgeHash> explicit_;
    std::vector<EdgeRule> rules_;
    std::optional<Box> domain_;
    std::optional<ValueSet> value_set_;
};

// ---------------------------------------------------------------------------
// Deterministic perturbations constrained to the declared alphabet.
// ---------------------------------------------------------------------------

struct PerturbationSpec {
    double radius = 0.0;               // per-edge budget epsilon_e >= 0
    std::vector<Edge> target_edges;    // edges to jiggle
    std::uint64_t seed = 0;
};

// Moves each targeted edge's value within `radius`, restricted to the
// configuration's declared alphabet: finite alphabets select among members
// within the radius, interval alphabets draw uniformly from the clipped
// interval.  Radius 0 is the identity.
inline Configuration perturb(const Configuration& cfg, const PerturbationSpec& spec) {
    require(spec.radius >= 0, ErrorCode::InvalidParams, "negative perturbation radius");
    require(cfg.value_set().has_value(), ErrorCode::EmptyValueSet,
            "perturb needs a declared value alphabet");
    const ValueSet& A = *cfg.value_set();
    require(A.scalar() == cfg.scalar_kind(), ErrorCode::KindMismatch, "alphabet kind vs configuration kind");

    Configuration out = cfg;
    Rng rng(spec.seed);
    Rational rad(spec.radius);

    for (const Edge& e : spec.target_edges) {
        const PassageValue& cur = cfg.value(e);
        if (A.kind == ValueSet::Kind::FiniteScalar) {
            const Rational& v = as_scalar(cur);
            std::vector<Rational> cands;
            for (const auto& a : A.scalars)
                if (rat_abs(a - v) <= rad) cands.push_back(a);
            if (cands.empty()) continue;  // value not representable within budget: leave untouched
            out.set_value(e, cands[rng.below(cands.size())]);
        } else if (A.kind == ValueSet::Kind::IntervalScalar) {
            const Rational& v = as_scalar(cur);
            Rational lo = rat_max(A.lo, v - rad), hi = rat_min(A.hi, v + rad);
            if (lo > hi) continue;
            Rational u(rng.real());  // exact binary rational in [0,1)
            out.set_value(e, lo + u * (hi - lo));
        } else {
            const VectorValue& v = as_vector(cur);
            std::vector<const VectorValue*> cands;
            for (const auto& a : A.vectors)
                if (norm(vsub(a, v)) <= spec.radius) cands.push_back(&a);
            if (cands.empty()) continue;
            out.set_value(e, *cands[rng.below(cands.size())]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON serialization.
//
// Schema: { "dim": d, "value_kind": "scalar" | {"vector": k},
//           "default": value, "regions": [...], "edges": [...],
//           optional "domain", optional "value_set" }.
// Scalar values are JSON numbers; exact non-dyadic rationals are written as
// "p/q" strings so that save/load round-trips are lossless.
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json rational_to_json(const Rational& r) {
    if (rat_den(r) == 1 && rat_abs(r) <= Rational(std::int64_t(1) << 53))
        return nlohmann::json(to_int64(rat_num(r)));
    double d = to_double(r);
    if (Rational(d) == r) return nlohmann::json(d);
    return nlohmann::json(rat_string(r));
}

inline Rational rational_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number_float()) return Rational(j.get<double>());
    if (j.is_string()) {
        try {
            return Rational(j.get<std::string>());
        } catch (const std::exception&) {
            raise(ErrorCode::MalformedInput, "bad rational literal: " + j.get<std::string>());
        }
    }
    raise(ErrorCode::MalformedInput, "expected a number or \"p/q\" string");
}

inline nlohmann::json value_to_json(const PassageValue& v) {
    if (is_scalar(v)) return rational_to_json(as_scalar(v));
    return nlohmann::json(as_vector(v));
}

inline PassageValue value_from_json(const nlohmann::json& j, bool scalar_kind) {
    if (scalar_kind) return rational_from_json(j);
    require(j.is_array(), ErrorCode::MalformedInput, "vector value must be an array");
    return j.get<VectorValue>();
}

inline nlohmann::json point_to_json(const LatticePoint& p) { return nlohmann::json(p.c); }

inline LatticePoint point_from_json(const nlohmann::json& j) {
    require(j.is_array(), ErrorCode::MalformedInput, "lattice point must be an array");
    return LatticePoint(j.get<std::vector<Coord>>());
}

}  // namespace detail

inline nlohmann::json to_json(const Configuration& cfg) {
    using nlohmann::json;
    json j;
    j["dim"] = cfg.dim();
    if (cfg.scalar_kind())
        j["value_kind"] = "scalar";
    else
        j["value_kind"] = json{{"vector", cfg.vector_arity()}};
    j["default"] = detail::value_to_json(cfg.default_value());

    json regions = json::array();
    for (const auto& r : cfg.rules()) {
        json e;
        switch (r.region.type) {
            case EdgeRegion::Type::Box:
                e["type"] = "box";
                break;
            case EdgeRegion::Type::BoxBoundary:
                e["type"] = "box_boundary";
                break;
            case EdgeRegion::Type::Segment:
                e["type"] = "segment";
                e["from"] = detail::point_to_json(r.region.seg_a);
                e["to"] = detail::point_to_json(r.region.seg_b);
                break;
            case EdgeRegion::Type::Periodic:
                e["type"] = "periodic";
                break;
        }
        if (r.region.box) {
            e["min"] = detail::point_to_json(r.region.box->lo);
            e["max"] = detail::point_to_json(r.region.box->hi);
        }
        if (r.values.size() == 1)
            e["value"] = detail::value_to_json(r.values[0]);
        else {
            json vals = json::array();
            for (const auto& v : r.values) vals.push_back(detail::value_to_json(v));
            e["values"] = vals;
        }
        regions.push_back(e);
    }
    j["regions"] = regions;

    // Sorted for byte-stable output.
    std::vector<Edge> keys;
    keys.reserve(cfg.explicit_edges().size());
    for (const auto& [e, v] : cfg.explicit_edges()) keys.push_back(e);
    std::sort(keys.begin(), keys.end());
    json edges = json::array();
    for (const auto& e : keys) {
        json ej;
        ej["a"] = detail::point_to_json(e.a);
        ej["b"] = detail::point_to_json(e.b);
        ej["value"] = detail::value_to_json(cfg.explicit_edges().at(e));
        edges.push_back(ej);
    }
    j["edges"] = edges;

    if (cfg.domain()) {
        j["domain"] = nlohmann::json{{"min", detail::point_to_json(cfg.domain()->lo)},
                                     {"max", detail::point_to_json(cfg.domain()->hi)}};
    }
    if (cfg.value_set()) {
        const ValueSet& A = *cfg.value_set();
        json s;
        if (A.kind == ValueSet::Kind::FiniteScalar) {
            json vals = json::array();
            for (const auto& v : A.scalars) vals.push_back(detail::rational_to_json(v));
            s["finite"] = vals;
        } else if (A.kind == ValueSet::Kind::IntervalScalar) {
            s["interval"] = json::array({detail::rational_to_json(A.lo), detail::rational_to_json(A.hi)});
        } else {
            json vals = json::array();
            for (const auto& v : A.vectors) vals.push_back(json(v));
            s["finite"] = vals;
        }
        j["value_set"] = s;
    }
    return j;
}

inline Configuration configuration_from_json(const nlohmann::json& j) {
    using nlohmann::json;
    try {
        require(j.contains("dim") && j.contains("value_kind") && j.contains("default"),
                ErrorCode::MalformedInput, "configuration needs dim, value_kind, default");
        int dim = j.at("dim").get<int>();
        bool scalar_kind;
        int arity = 0;
        if (j.at("value_kind").is_string()) {
            require(j.at("value_kind").get<std::string>() == "scalar", ErrorCode::MalformedInput,
                    "value_kind must be \"scalar\" or {\"vector\": k}");
            scalar_kind = true;
        } else {
            scalar_kind = false;
            arity = j.at("value_kind").at("vector").get<int>();
            require(arity >= 1, ErrorCode::MalformedInput, "vector arity must be positive");
        }
        PassageValue def = detail::value_from_json(j.at("default"), scalar_kind);
        if (!scalar_kind)
            require(static_cast<int>(as_vector(def).size()) == arity, ErrorCode::MalformedInput,
                    "default arity mismatch");
        Configuration cfg(dim, def);

        for (const auto& e : j.value("regions", json::array())) {
            std::string type = e.at("type").get<std::string>();
            EdgeRegion region;
            if (type == "segment") {
                region = EdgeRegion::segment(detail::point_from_json(e.at("from")),
                                             detail::point_from_json(e.at("to")));
            } else {
                std::optional<Box> b;
                if (e.contains("min"))
                    b = make_box(detail::point_from_json(e.at("min")), detail::point_from_json(e.at("max")));
                if (type == "box") {
                    require(b.has_value(), ErrorCode::MalformedInput, "box region needs min/max");
                    region = EdgeRegion::box_region(*b);
                } else if (type == "box_boundary") {
                    require(b.has_value(), ErrorCode::MalformedInput, "box_boundary region needs min/max");
                    region = EdgeRegion::box_boundary(*b);
                } else if (type == "periodic") {
                    region = EdgeRegion::periodic(b);
                } else {
                    raise(ErrorCode::MalformedInput, "unknown region type: " + type);
                }
            }
            EdgeRule rule;
            rule.region = region;
            if (e.contains("values"))
                for (const auto& v : e.at("values")) rule.values.push_back(detail::value_from_json(v, scalar_kind));
            else
                rule.values.push_back(detail::value_from_json(e.at("value"), scalar_kind));
            cfg.add_rule(std::move(rule));
        }

        for (const auto& e : j.value("edges", json::array())) {
            LatticePoint a = detail::point_from_json(e.at("a"));
            LatticePoint b = detail::point_from_json(e.at("b"));
            cfg.set_value(canonical_edge(a, b), detail::value_from_json(e.at("value"), scalar_kind));
        }

        if (j.contains("domain"))
            cfg.set_domain(make_box(detail::point_from_json(j.at("domain").at("min")),
                                    detail::point_from_json(j.at("domain").at("max"))));

        if (j.contains("value_set")) {
            const auto& s = j.at("value_set");
            if (s.contains("interval")) {
                cfg.set_value_set(ValueSet::interval(detail::rational_from_json(s.at("interval").at(0)),
                                                     detail::rational_from_json(s.at("interval").at(1))));
            } else if (scalar_kind) {
                std::vector<Rational> vals;
                for (const auto& v : s.at("finite")) vals.push_back(detail::rational_from_json(v));
                cfg.set_value_set(ValueSet::finite_scalar(std::move(vals)));
            } else {
                std::vector<VectorValue> vals;
                for (const auto& v : s.at("finite")) vals.push_back(v.get<VectorValue>());
                cfg.set_value_set(ValueSet::finite_vector(std::move(vals)));
            }
        }
        return cfg;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& ex) {
        raise(ErrorCode::MalformedInput, std::string("configuration JSON: ") + ex.what());
    }
}

}  // namespace percolab
