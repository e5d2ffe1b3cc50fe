#pragma once

#include <cmath>
#include <variant>
#include <vector>

#include "percolab/errors.hpp"
#include "percolab/rational.hpp"

namespace percolab {

// Global comparison tolerance for double-valued (Hilbert) quantities.
inline constexpr double kTauCmp = 1e-9;
// Tolerance for float-side cone-certificate re-verification.
inline constexpr double kTauCone = 1e-7;

using VectorValue = std::vector<double>;

inline double dot(const VectorValue& a, const VectorValue& b) {
    require(a.size() == b.size(), ErrorCode::DimensionMismatch, "dot");
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const VectorValue& a) { return std::sqrt(dot(a, a)); }

inline VectorValue vadd(const VectorValue& a, const VectorValue& b) {
    require(a.size() == b.size(), ErrorCode::DimensionMismatch, "vadd");
    VectorValue r = a;
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

inline VectorValue vsub(const VectorValue& a, const VectorValue& b) {
    require(a.size() == b.size(), ErrorCode::DimensionMismatch, "vsub");
    VectorValue r = a;
    for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    return r;
}

inline VectorValue vscale(double s, const VectorValue& a) {
    VectorValue r = a;
    for (auto& x : r) x *= s;
    return r;
}

// Per-edge passage value: exact rational scalar, or a k-vector of reals.
using PassageValue = std::variant<Rational, VectorValue>;

inline bool is_scalar(const PassageValue& v) { return std::holds_alternative<Rational>(v); }

inline const Rational& as_scalar(const PassageValue& v) {
    require(is_scalar(v), ErrorCode::KindMismatch, "expected scalar passage value");
    return std::get<Rational>(v);
}

inline const VectorValue& as_vector(const PassageValue& v) {
    require(!is_scalar(v), ErrorCode::KindMismatch, "expected vector passage value");
    return std::get<VectorValue>(v);
}

// ---------------------------------------------------------------------------
// Declared value alphabet A.  Scalar alphabets may be a finite list or a
// closed interval; vector alphabets are finite lists.  inf/sup are exact for
// scalars.
// ---------------------------------------------------------------------------

struct ValueSet {
    enum class Kind { FiniteScalar, IntervalScalar, FiniteVector };

    Kind kind = Kind::FiniteScalar;
    std::vector<Rational> scalars;   // FiniteScalar
    Rational lo = 0, hi = 0;         // IntervalScalar
    std::vector<VectorValue> vectors;  // FiniteVector

    static ValueSet finite_scalar(std::vector<Rational> vals) {
        require(!vals.empty(), ErrorCode::EmptyValueSet, "finite scalar alphabet");
        ValueSet s;
        s.kind = Kind::FiniteScalar;
        s.scalars = std::move(vals);
        return s;
    }

    static ValueSet interval(const Rational& lo, const Rational& hi) {
        require(lo <= hi, ErrorCode::InvalidParams, "interval alphabet out of order");
        ValueSet s;
        s.kind = Kind::IntervalScalar;
        s.lo = lo;
        s.hi = hi;
        return s;
    }

    static ValueSet finite_vector(std::vector<VectorValue> vals) {
        require(!vals.empty(), ErrorCode::EmptyValueSet, "finite vector alphabet");
        for (const auto& v : vals)
            require(v.size() == vals[0].size(), ErrorCode::DimensionMismatch, "vector alphabet arity");
        ValueSet s;
        s.kind = Kind::FiniteVector;
        s.vectors = std::move(vals);
        return s;
    }

    bool scalar() const { return kind != Kind::FiniteVector; }

    Rational inf() const {
        require(scalar(), ErrorCode::KindMismatch, "inf of a vector alphabet");
        if (kind == Kind::IntervalScalar) return lo;
        Rational m = scalars[0];
        for (const auto& v : scalars) m = rat_min(m, v);
        return m;
    }

    Rational sup() const {
        require(scalar(), ErrorCode::KindMismatch, "sup of a vector alphabet");
        if (kind == Kind::IntervalScalar) return hi;
        Rational m = scalars[0];
        for (const auto& v : scalars) m = rat_max(m, v);
        return m;
    }
};

}  // namespace percolab
