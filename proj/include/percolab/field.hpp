#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <unordered_map>
#include <vector>

#include "percolab/cone.hpp"
#include "percolab/config.hpp"
#include "percolab/geometry.hpp"

namespace percolab {

// ---------------------------------------------------------------------------
// Piecewise-constant cost fields on R^d with exact rational evaluation.  A
// field is an ordered, first-match-wins list of regions over a default value.
// Region values are profiles indexed by the l1 norm of the query point, which
// coincides with arc length from the origin on the radial constructions used
// here.  All geometry is rational; edge integrals are exact.
// ---------------------------------------------------------------------------

inline Rational l1_norm_rat(const RatVec& y) {
    Rational s = 0;
    for (const auto& c : y) s += rat_abs(c);
    return s;
}

struct StepProfile {
    // values[i] applies on [breaks[i], breaks[i+1]); the last value extends
    // to infinity.  breaks[0] must be 0 and breaks strictly increase.
    std::vector<Rational> breaks;
    std::vector<Rational> values;

    static StepProfile constant(const Rational& v) { return StepProfile{{Rational(0)}, {v}}; }

    void validate() const {
        require(!breaks.empty() && breaks.size() == values.size(), ErrorCode::InvalidParams, "profile shape");
        require(breaks[0] == 0, ErrorCode::InvalidParams, "profile must start at 0");
        for (size_t i = 1; i < breaks.size(); ++i)
            require(breaks[i - 1] < breaks[i], ErrorCode::InvalidParams, "profile breaks must increase");
    }

    const Rational& at(const Rational& s) const {
        size_t i = breaks.size();
        while (i > 0 && breaks[i - 1] > s) --i;
        require(i > 0, ErrorCode::InvalidParams, "profile queried at negative arc length");
        return values[i - 1];
    }
};

struct FieldRegion {
    enum class Type { Segment, Cone, GridPath, Ball, Skeleton };

    Type type = Type::Ball;
    std::vector<RatVec> poly;  // Segment: {from,to}; GridPath: polyline; Cone: {axis}
    Rational theta = 0;        // Cone: l1 angular half-width
    Rational radius = 0;       // Ball
    StepProfile profile = StepProfile::constant(Rational(0));
    std::shared_ptr<const Configuration> skel_cfg;  // Skeleton
    Rational skel_scale = 1;                        // Skeleton: field lives on Z^d / scale

    static FieldRegion segment(RatVec from, RatVec to, StepProfile p) {
        FieldRegion r;
        r.type = Type::Segment;
        r.poly = {std::move(from), std::move(to)};
        r.profile = std::move(p);
        r.profile.validate();
        return r;
    }

    static FieldRegion cone(RatVec axis, Rational th, StepProfile p) {
        FieldRegion r;
        r.type = Type::Cone;
        r.poly = {std::move(axis)};
        r.theta = std::move(th);
        r.profile = std::move(p);
        r.profile.validate();
        require(l1_norm_rat(r.poly[0]) > 0, ErrorCode::InvalidParams, "cone axis must be nonzero");
        return r;
    }

    static FieldRegion grid_path(std::vector<RatVec> polyline, StepProfile p) {
        FieldRegion r;
        r.type = Type::GridPath;
        r.poly = std::move(polyline);
        r.profile = std::move(p);
        r.profile.validate();
        require(r.poly.size() >= 2, ErrorCode::InvalidParams, "grid path needs at least two vertices");
        return r;
    }

    static FieldRegion ball(Rational rad, const Rational& value) {
        FieldRegion r;
        r.type = Type::Ball;
        r.radius = std::move(rad);
        r.profile = StepProfile::constant(value);
        require(r.radius >= 0, ErrorCode::InvalidParams, "ball radius");
        return r;
    }

    static FieldRegion skeleton(std::shared_ptr<const Configuration> cfg, Rational scale) {
        FieldRegion r;
        r.type = Type::Skeleton;
        r.skel_cfg = std::move(cfg);
        r.skel_scale = std::move(scale);
        require(r.skel_cfg != nullptr, ErrorCode::InvalidParams, "skeleton needs a configuration");
        require(r.skel_scale > 0, ErrorCode::InvalidParams, "skeleton scale must be positive");
        return r;
    }
};

struct CostField {
    int dim = 0;
    Rational default_value = 0;
    Rational inf_a = 0, sup_a = 0;  // declared value range
    std::vector<FieldRegion> regions;
    RatVec dom_lo, dom_hi;  // rational domain box

    // Construction bookkeeping (stages of the star -> alternate -> grid
    // pipeline carry these forward).
    std::optional<Rational> eps;        // net resolution / central-ball radius
    std::optional<Rational> eps_prime;  // composite tolerance of the build
    std::vector<RatVec> rays;           // boundary net points x_i
    std::optional<Rational> block_s;    // alternating block bound s
    std::optional<std::int64_t> grid_m;  // grid scale M

    bool in_domain(const RatVec& y) const {
        for (int k = 0; k < dim; ++k)
            if (y[static_cast<size_t>(k)] < dom_lo[static_cast<size_t>(k)] ||
                y[static_cast<size_t>(k)] > dom_hi[static_cast<size_t>(k)])
                return false;
        return true;
    }
};

// ---------------------------------------------------------------------------
// Exact membership and evaluation.
// ---------------------------------------------------------------------------

namespace detail {

inline bool on_segment(const RatVec& p, const RatVec& q, const RatVec& y) {
    size_t d = p.size();
    // Collinearity of y-p with q-p, then the dot-product range check.
    for (size_t i = 0; i < d; ++i)
        for (size_t j = i + 1; j < d; ++j)
            if ((y[i] - p[i]) * (q[j] - p[j]) != (y[j] - p[j]) * (q[i] - p[i])) return false;
    Rational num = 0, den = 0;
    for (size_t i = 0; i < d; ++i) {
        num += (y[i] - p[i]) * (q[i] - p[i]);
        den += (q[i] - p[i]) * (q[i] - p[i]);
    }
    if (den == 0) return y == p;
    return num >= 0 && num <= den;
}

inline Rational cone_deviation(const RatVec& axis, const RatVec& y) {
    Rational ax_norm = l1_norm_rat(axis);
    Rational y_norm = l1_norm_rat(y);
    Rational dev = 0;
    for (size_t i = 0; i < axis.size(); ++i) dev += rat_abs(ax_norm * y[i] - y_norm * axis[i]);
    return dev;
}

inline bool in_cone_region(const RatVec& axis, const Rational& theta, const RatVec& y) {
    return cone_deviation(axis, y) <= theta * l1_norm_rat(y);
}

// Skeleton lookup: y lies on an open edge of Z^d/scale when exactly one
// coordinate is strictly between multiples of 1/scale; vertices and
// off-skeleton points do not match.
inline bool skeleton_edge(const Configuration& cfg, const Rational& scale, const RatVec& y, Edge& out) {
    int free_axis = -1;
    LatticePoint lo = zero_point(static_cast<int>(y.size()));
    for (size_t k = 0; k < y.size(); ++k) {
        Rational scaled = y[k] * scale;
        Integer fl = rat_floor(scaled);
        if (Rational(fl, 1) == scaled) {
            lo[static_cast<int>(k)] = to_int64(fl);
        } else {
            if (free_axis >= 0) return false;
            free_axis = static_cast<int>(k);
            lo[static_cast<int>(k)] = to_int64(fl);
        }
    }
    if (free_axis < 0) return false;
    LatticePoint hi = lo;
    hi[free_axis] += 1;
    if (cfg.domain() && !(cfg.domain()->contains(lo) && cfg.domain()->contains(hi))) return false;
    out = canonical_edge(lo, hi);
    return true;
}

inline bool region_matches(const FieldRegion& r, const RatVec& y, Rational& value_out) {
    switch (r.type) {
        case FieldRegion::Type::Segment:
            if (!on_segment(r.poly[0], r.poly[1], y)) return false;
            value_out = r.profile.at(l1_norm_rat(y));
            return true;
        case FieldRegion::Type::GridPath:
            for (size_t i = 0; i + 1 < r.poly.size(); ++i)
                if (on_segment(r.poly[i], r.poly[i + 1], y)) {
                    value_out = r.profile.at(l1_norm_rat(y));
                    return true;
                }
            return false;
        case FieldRegion::Type::Cone:
            if (!in_cone_region(r.poly[0], r.theta, y)) return false;
            value_out = r.profile.at(l1_norm_rat(y));
            return true;
        case FieldRegion::Type::Ball:
            if (l1_norm_rat(y) > r.radius) return false;
            value_out = r.profile.values[0];
            return true;
        case FieldRegion::Type::Skeleton: {
            Edge e = canonical_edge(zero_point(1), axis_point(1, 0, 1));
            if (!skeleton_edge(*r.skel_cfg, r.skel_scale, y, e)) return false;
            value_out = r.skel_cfg->scalar_value(e);
            return true;
        }
    }
    return false;
}

}  // namespace detail

inline Rational field_value(const CostField& f, const RatVec& y) {
    require(static_cast<int>(y.size()) == f.dim, ErrorCode::DimensionMismatch, "field_value point");
    Rational v = 0;
    for (const auto& r : f.regions)
        if (detail::region_matches(r, y, v)) return v;
    return f.default_value;
}

// ---------------------------------------------------------------------------
// Exact integral of the field along an axis-aligned segment.  The segment is
// cut at every parameter where any region's membership or profile piece can
// change; each elementary piece is then constant and sampled at its midpoint.
// ---------------------------------------------------------------------------

namespace detail {

struct EdgeParam {
    // y(c) = base with coordinate `axis` replaced by c, c in [lo, hi].
    RatVec base;
    int axis = 0;
    Rational lo = 0, hi = 0;
    Rational fixed_l1 = 0;  // sum of |base_k| over k != axis

    RatVec point(const Rational& c) const {
        RatVec y = base;
        y[static_cast<size_t>(axis)] = c;
        return y;
    }

    Rational l1(const Rational& c) const { return fixed_l1 + rat_abs(c); }
};

inline void add_break(std::set<Rational>& cuts, const EdgeParam& ep, const Rational& c) {
    if (c > ep.lo && c < ep.hi) cuts.insert(c);
}

// Roots of l1(c) == r, i.e. |c| == r - fixed_l1.
inline void add_radius_breaks(std::set<Rational>& cuts, const EdgeParam& ep, const Rational& r) {
    Rational d = r - ep.fixed_l1;
    if (d < 0) return;
    add_break(cuts, ep, d);
    add_break(cuts, ep, -d);
}

inline void collect_segment_breaks(std::set<Rational>& cuts, const EdgeParam& ep, const RatVec& p,
                                   const RatVec& q, const StepProfile& profile) {
    size_t d = p.size();
    size_t ax = static_cast<size_t>(ep.axis);
    bool axis_aligned = true;
    for (size_t k = 0; k < d; ++k)
        if (k != ax && p[k] != q[k]) axis_aligned = false;

    if (axis_aligned) {
        // Overlap only when the fixed coordinates agree exactly.
        for (size_t k = 0; k < d; ++k)
            if (k != ax && p[k] != ep.base[k]) return;
        Rational s0 = rat_min(p[ax], q[ax]), s1 = rat_max(p[ax], q[ax]);
        add_break(cuts, ep, s0);
        add_break(cuts, ep, s1);
        for (const auto& b : profile.breaks) add_radius_breaks(cuts, ep, b);
        return;
    }
    // Transversal: at most one crossing point; cut there so piece midpoints
    // avoid the measure-zero overlap.
    Rational t;
    bool have_t = false;
    for (size_t k = 0; k < d; ++k) {
        if (k == ax) continue;
        Rational dk = q[k] - p[k];
        if (dk == 0) {
            if (p[k] != ep.base[k]) return;  // parallel offset: no crossing
            continue;
        }
        Rational tk = (ep.base[k] - p[k]) / dk;
        if (have_t && tk != t) return;
        t = tk;
        have_t = true;
    }
    if (!have_t || t < 0 || t > 1) return;
    add_break(cuts, ep, p[ax] + t * (q[ax] - p[ax]));
}

inline void collect_cone_breaks(std::set<Rational>& cuts, const EdgeParam& ep, const FieldRegion& r) {
    const RatVec& axis_v = r.poly[0];
    size_t d = axis_v.size();
    size_t ax = static_cast<size_t>(ep.axis);
    Rational ax_norm = l1_norm_rat(axis_v);

    // Membership margin g(c) = sum_k |ax_norm*y_k(c) - l1(c)*axis_k| - theta*l1(c)
    // is piecewise linear; kinks sit at c=0 and at roots of each inner term.
    std::set<Rational> kinks{ep.lo, ep.hi};
    if (ep.lo < 0 && ep.hi > 0) kinks.insert(Rational(0));
    auto inner_roots = [&](int sgn) {
        // On the half-line where |c| = sgn*c: inner term for k != ax is
        // ax_norm*base_k - (fixed + sgn*c)*axis_k, linear in c; for k == ax it
        // is ax_norm*c - (fixed + sgn*c)*axis_ax.
        for (size_t k = 0; k < d; ++k) {
            Rational A, B;  // term = A + B*c
            if (k == ax) {
                A = -ep.fixed_l1 * axis_v[k];
                B = ax_norm - Rational(sgn) * axis_v[k];
            } else {
                A = ax_norm * ep.base[k] - ep.fixed_l1 * axis_v[k];
                B = -Rational(sgn) * axis_v[k];
            }
            if (B == 0) continue;
            Rational root = -A / B;
            if (sgn > 0 ? root >= 0 : root <= 0) {
                if (root > ep.lo && root < ep.hi) kinks.insert(root);
            }
        }
    };
    inner_roots(+1);
    inner_roots(-1);

    auto margin = [&](const Rational& c) {
        return cone_deviation(axis_v, ep.point(c)) - r.theta * ep.l1(c);
    };
    std::vector<Rational> ks(kinks.begin(), kinks.end());
    for (size_t i = 0; i + 1 < ks.size(); ++i) {
        Rational g0 = margin(ks[i]), g1 = margin(ks[i + 1]);
        if ((g0 < 0 && g1 > 0) || (g0 > 0 && g1 < 0)) {
            // Linear on this piece: interpolate the exact root.
            Rational root = ks[i] - g0 * (ks[i + 1] - ks[i]) / (g1 - g0);
            add_break(cuts, ep, root);
        }
        add_break(cuts, ep, ks[i]);
    }
    for (const auto& b : r.profile.breaks) add_radius_breaks(cuts, ep, b);
}

inline void collect_skeleton_breaks(std::set<Rational>& cuts, const EdgeParam& ep, const FieldRegion& r) {
    // Grid lines of Z^d/scale crossing the edge along its axis.
    const Rational& s = r.skel_scale;
    Integer first = rat_ceil(ep.lo * s);
    Integer last = rat_floor(ep.hi * s);
    for (Integer n = first; n <= last; ++n) add_break(cuts, ep, Rational(n) / s);
}

}  // namespace detail

inline Rational edge_integral(const CostField& f, const RatVec& a, const RatVec& b) {
    require(static_cast<int>(a.size()) == f.dim && static_cast<int>(b.size()) == f.dim,
            ErrorCode::DimensionMismatch, "edge_integral endpoints");
    int axis = -1;
    for (int k = 0; k < f.dim; ++k)
        if (a[static_cast<size_t>(k)] != b[static_cast<size_t>(k)]) {
            require(axis < 0, ErrorCode::InvalidParams, "edge_integral needs an axis-aligned segment");
            axis = k;
        }
    if (axis < 0) return 0;

    detail::EdgeParam ep;
    ep.base = a;
    ep.axis = axis;
    ep.lo = rat_min(a[static_cast<size_t>(axis)], b[static_cast<size_t>(axis)]);
    ep.hi = rat_max(a[static_cast<size_t>(axis)], b[static_cast<size_t>(axis)]);
    for (int k = 0; k < f.dim; ++k)
        if (k != axis) ep.fixed_l1 += rat_abs(a[static_cast<size_t>(k)]);

    std::set<Rational> cuts{ep.lo, ep.hi};
    if (ep.lo < 0 && ep.hi > 0) cuts.insert(Rational(0));
    for (const auto& r : f.regions) {
        switch (r.type) {
            case FieldRegion::Type::Segment:
                detail::collect_segment_breaks(cuts, ep, r.poly[0], r.poly[1], r.profile);
                break;
            case FieldRegion::Type::GridPath:
                for (size_t i = 0; i + 1 < r.poly.size(); ++i)
                    detail::collect_segment_breaks(cuts, ep, r.poly[i], r.poly[i + 1], r.profile);
                break;
            case FieldRegion::Type::Cone:
                detail::collect_cone_breaks(cuts, ep, r);
                break;
            case FieldRegion::Type::Ball:
                detail::add_radius_breaks(cuts, ep, r.radius);
                break;
            case FieldRegion::Type::Skeleton:
                detail::collect_skeleton_breaks(cuts, ep, r);
                break;
        }
    }

    std::vector<Rational> cs(cuts.begin(), cuts.end());
    Rational total = 0;
    for (size_t i = 0; i + 1 < cs.size(); ++i) {
        Rational mid = (cs[i] + cs[i + 1]) / 2;
        total += field_value(f, ep.point(mid)) * (cs[i + 1] - cs[i]);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Rational polytopes (d=2 boundary machinery) and the K_A^d membership test.
// ---------------------------------------------------------------------------

struct PolytopeSpec {
    std::vector<RatVec> vertices;
    bool allow_degenerate = false;
};

namespace detail {

inline int rational_rank(std::vector<RatVec> rows) {
    if (rows.empty()) return 0;
    size_t cols = rows[0].size();
    int rank = 0;
    size_t rpos = 0;
    for (size_t c = 0; c < cols && rpos < rows.size(); ++c) {
        size_t piv = rpos;
        while (piv < rows.size() && rows[piv][c] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[rpos]);
        for (size_t i = 0; i < rows.size(); ++i) {
            if (i == rpos || rows[i][c] == 0) continue;
            Rational fmul = rows[i][c] / rows[rpos][c];
            for (size_t j = c; j < cols; ++j) rows[i][j] -= fmul * rows[rpos][j];
        }
        ++rpos;
        ++rank;
    }
    return rank;
}

inline bool polytope_full_dimensional(const PolytopeSpec& K) {
    if (K.vertices.empty()) return false;
    size_t d = K.vertices[0].size();
    std::vector<RatVec> diffs;
    for (size_t i = 1; i < K.vertices.size(); ++i) {
        RatVec row(d);
        for (size_t j = 0; j < d; ++j) row[j] = K.vertices[i][j] - K.vertices[0][j];
        diffs.push_back(std::move(row));
    }
    return rational_rank(std::move(diffs)) == static_cast<int>(d);
}

inline bool in_convex_hull(const std::vector<RatVec>& verts, const RatVec& x) {
    // Feasibility of sum lambda_i v_i = x, sum lambda_i = 1, lambda >= 0.
    int d = static_cast<int>(x.size());
    int n = static_cast<int>(verts.size());
    std::vector<RatVec> rows(static_cast<size_t>(d) + 1, RatVec(static_cast<size_t>(n)));
    RatVec b(static_cast<size_t>(d) + 1);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < n; ++j) rows[static_cast<size_t>(i)][static_cast<size_t>(j)] = verts[static_cast<size_t>(j)][static_cast<size_t>(i)];
        b[static_cast<size_t>(i)] = x[static_cast<size_t>(i)];
    }
    for (int j = 0; j < n; ++j) rows[static_cast<size_t>(d)][static_cast<size_t>(j)] = 1;
    b[static_cast<size_t>(d)] = 1;
    return phase1_simplex(d + 1, n, std::move(rows), std::move(b)).feasible;
}

// Counter-clockwise convex hull of 2-d rational points (monotone chain).
inline std::vector<RatVec> convex_hull_2d(std::vector<RatVec> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() <= 2) return pts;
    auto cross = [](const RatVec& o, const RatVec& a, const RatVec& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<RatVec> hull;
    for (int pass = 0; pass < 2; ++pass) {
        size_t start = hull.size();
        for (const auto& p : pts) {
            while (hull.size() >= start + 2 && cross(hull[hull.size() - 2], hull[hull.size() - 1], p) <= 0)
                hull.pop_back();
            hull.push_back(p);
        }
        hull.pop_back();
        std::reverse(pts.begin(), pts.end());
    }
    return hull;
}

// Minimum l1 norm over a segment: the norm is convex piecewise linear, so
// the minimum sits at an endpoint or a coordinate sign change.
inline Rational min_l1_on_segment(const RatVec& p, const RatVec& q) {
    Rational best = rat_min(l1_norm_rat(p), l1_norm_rat(q));
    for (size_t k = 0; k < p.size(); ++k) {
        Rational dk = q[k] - p[k];
        if (dk == 0) continue;
        Rational t = -p[k] / dk;
        if (t <= 0 || t >= 1) continue;
        RatVec y(p.size());
        for (size_t j = 0; j < p.size(); ++j) y[j] = p[j] + t * (q[j] - p[j]);
        best = rat_min(best, l1_norm_rat(y));
    }
    return best;
}

inline void require_scalar_range(const ValueSet& A, Rational& inf_a, Rational& sup_a) {
    require(A.scalar(), ErrorCode::KindMismatch, "field constructions need a scalar alphabet");
    inf_a = A.inf();
    sup_a = A.sup();
    require(inf_a > 0, ErrorCode::InvalidParams, "alphabet must be bounded away from 0");
}

}  // namespace detail

inline bool in_KAd(const PolytopeSpec& K, const ValueSet& A) {
    require(!K.vertices.empty(), ErrorCode::EmptySet, "empty polytope");
    Rational inf_a, sup_a;
    detail::require_scalar_range(A, inf_a, sup_a);
    size_t d = K.vertices[0].size();
    for (const auto& v : K.vertices)
        require(v.size() == d, ErrorCode::DimensionMismatch, "polytope vertex dimensions");
    if (!detail::polytope_full_dimensional(K)) {
        if (!K.allow_degenerate) raise(ErrorCode::DegeneratePolytope, "polytope is not full-dimensional");
        return false;  // a flat polytope cannot contain the inner ball
    }
    // Every vertex of D_{1/supA} inside conv(K) ...
    for (size_t k = 0; k < d; ++k)
        for (int sgn : {+1, -1}) {
            RatVec x(d, Rational(0));
            x[k] = Rational(sgn) / sup_a;
            if (!detail::in_convex_hull(K.vertices, x)) return false;
        }
    // ... and every vertex of K inside D_{1/infA}.
    for (const auto& v : K.vertices)
        if (l1_norm_rat(v) > Rational(1) / inf_a) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Star field: rational eps-net of the polytope boundary (d=2: subdivided
// hull edges), one radial segment per net point with value 1/|x_i|.
// ---------------------------------------------------------------------------

inline CostField build_star_field(const PolytopeSpec& K, const ValueSet& A, const Rational& eps) {
    Rational inf_a, sup_a;
    detail::require_scalar_range(A, inf_a, sup_a);
    require(!K.vertices.empty() && K.vertices[0].size() == 2, ErrorCode::UnsupportedDimension,
            "star-field construction is implemented for d=2");
    require(eps > 0 && eps < Rational(1) / sup_a, ErrorCode::PreconditionFailed,
            "net resolution must satisfy 0 < eps < 1/sup A");
    require(in_KAd(K, A), ErrorCode::PreconditionFailed, "polytope violates the K_A^d sandwich");

    std::vector<RatVec> hull = detail::convex_hull_2d(K.vertices);
    require(hull.size() >= 3, ErrorCode::DegeneratePolytope, "hull is not full-dimensional");

    // The boundary must stay strictly outside the inner ball, else the radial
    // values would degenerate against sup A.
    for (size_t i = 0; i < hull.size(); ++i) {
        const RatVec& p = hull[i];
        const RatVec& q = hull[(i + 1) % hull.size()];
        require(detail::min_l1_on_segment(p, q) > Rational(1) / sup_a, ErrorCode::BoundaryTouchesInnerBall,
                "polytope boundary touches the inner ball D_{1/supA}");
    }

    // eps-net: barycentric (halving) refinement of each hull edge until the
    // mesh is <= eps, so net selection is deterministic and rational.
    std::vector<RatVec> net;
    std::set<RatVec> seen;
    for (size_t i = 0; i < hull.size(); ++i) {
        const RatVec& p = hull[i];
        const RatVec& q = hull[(i + 1) % hull.size()];
        Rational len = rat_abs(q[0] - p[0]) + rat_abs(q[1] - p[1]);
        std::int64_t n = 1;
        while (len / Rational(n) > eps) n *= 2;
        for (std::int64_t j = 0; j < n; ++j) {  // endpoint j=n is the next edge's j=0
            Rational t(j, n);
            RatVec x{p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])};
            if (seen.insert(x).second) net.push_back(std::move(x));
        }
    }

    CostField f;
    f.dim = 2;
    f.default_value = sup_a;
    f.inf_a = inf_a;
    f.sup_a = sup_a;
    f.eps = eps;
    f.eps_prime = eps * (Rational(1) + sup_a - inf_a) / inf_a + eps;
    f.rays = net;
    Rational reach = Rational(1) / inf_a + eps;
    f.dom_lo = {-reach, -reach};
    f.dom_hi = {reach, reach};
    for (const auto& x : net) {
        Rational nrm = l1_norm_rat(x);
        require(nrm > 0, ErrorCode::InternalError, "net point at the origin");
        f.regions.push_back(FieldRegion::segment({Rational(0), Rational(0)}, x,
                                                 StepProfile::constant(Rational(1) / nrm)));
    }
    return f;
}

// ---------------------------------------------------------------------------
// Alternating field: each radial segment is cut into blocks of length
// s_i <= s dividing both |x_i| and eps; each block carries sup A first for
// s_{i,1} then inf A for s_{i,2}, preserving the block integral exactly.
// ---------------------------------------------------------------------------

inline CostField alternate_field(const CostField& f, const Rational& s) {
    require(s > 0, ErrorCode::InvalidParams, "block bound must be positive");
    require(f.eps.has_value() && !f.rays.empty(), ErrorCode::InvalidParams,
            "alternate_field expects a star field");
    require(f.inf_a < f.sup_a, ErrorCode::InvalidParams, "alternating split needs inf A < sup A");

    CostField out = f;
    out.block_s = s;
    out.regions.clear();
    for (const auto& r : f.regions) {
        require(r.type == FieldRegion::Type::Segment && l1_norm_rat(r.poly[0]) == 0,
                ErrorCode::InvalidParams, "alternate_field expects radial segments");
        require(r.profile.breaks.size() == 1, ErrorCode::InvalidParams,
                "alternate_field expects constant radial values");
        const Rational c = r.profile.values[0];
        const Rational len = l1_norm_rat(r.poly[1]);
        require(c >= f.inf_a && c <= f.sup_a, ErrorCode::NoRationalSplit, "radial value outside [inf A, sup A]");

        // s_i divides both |x_i| and eps so later grid scales can align.
        Rational g = rat_gcd(len, *f.eps);
        Integer n = rat_ceil(g / s);
        Rational s_i = g / Rational(n);
        Rational s1 = s_i * (c - f.inf_a) / (f.sup_a - f.inf_a);
        Rational s2 = s_i - s1;
        require(s1 >= 0 && s2 >= 0, ErrorCode::NoRationalSplit, "negative block split");

        StepProfile prof;
        Integer blocks = rat_num(len / s_i);
        for (Integer k = 0; k < blocks; ++k) {
            Rational base = Rational(k) * s_i;
            if (s1 > 0 && (prof.breaks.empty() || prof.values.back() != f.sup_a)) {
                prof.breaks.push_back(base);
                prof.values.push_back(f.sup_a);
            }
            if (s2 > 0 && (prof.breaks.empty() || prof.values.back() != f.inf_a)) {
                prof.breaks.push_back(base + s1);
                prof.values.push_back(f.inf_a);
            }
        }
        if (prof.breaks.empty() || prof.values.back() != f.sup_a) {
            prof.breaks.push_back(len);
            prof.values.push_back(f.sup_a);  // beyond the segment
        }
        if (prof.breaks[0] != 0) {
            // Degenerate split starting with inf A at radius 0.
            prof.breaks.insert(prof.breaks.begin(), Rational(0));
            prof.values.insert(prof.values.begin(), prof.values[0]);
            prof.breaks.erase(prof.breaks.begin() + 1);
            prof.values.erase(prof.values.begin() + 1);
        }
        prof.validate();
        out.regions.push_back(FieldRegion::segment(r.poly[0], r.poly[1], std::move(prof)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cone and grid stages.
// ---------------------------------------------------------------------------

namespace detail {

inline void check_cones_disjoint(const std::vector<RatVec>& rays, const Rational& theta) {
    require(theta > 0, ErrorCode::InvalidParams, "cone half-width must be positive");
    for (size_t i = 0; i < rays.size(); ++i)
        for (size_t j = i + 1; j < rays.size(); ++j) {
            Rational ni = l1_norm_rat(rays[i]), nj = l1_norm_rat(rays[j]);
            Rational sep = 0;
            for (size_t k = 0; k < rays[i].size(); ++k) sep += rat_abs(nj * rays[i][k] - ni * rays[j][k]);
            require(sep > theta * (ni + nj), ErrorCode::ConesOverlap,
                    "cones overlap: reduce theta or thin the net");
        }
}

// Clip a radial profile to [0, len) and pin `tail` beyond.
inline StepProfile clip_profile(const StepProfile& p, const Rational& len, const Rational& tail) {
    StepProfile out;
    for (size_t i = 0; i < p.breaks.size() && p.breaks[i] < len; ++i) {
        if (!out.values.empty() && out.values.back() == p.values[i]) continue;
        out.breaks.push_back(p.breaks[i]);
        out.values.push_back(p.values[i]);
    }
    if (out.values.empty() || out.values.back() != tail) {
        out.breaks.push_back(len);
        out.values.push_back(tail);
    }
    out.validate();
    return out;
}

inline bool divides_den(const Rational& x, std::int64_t M) {
    Integer den = rat_den(x);
    return Integer(M) % den == 0;
}

// Monotone staircase in (Z/M)^d from the origin to x, greedily hugging the
// ray; every vertex strictly outside the eps-ball must lie in the cone.
inline std::vector<RatVec> build_staircase(const RatVec& x, const Rational& theta, const Rational& eps,
                                           std::int64_t M) {
    size_t d = x.size();
    Rational step(1, M);
    RatVec cur(d, Rational(0));
    std::vector<RatVec> verts{cur};
    while (cur != x) {
        int best_k = -1;
        Rational best_dev = 0;
        for (size_t k = 0; k < d; ++k) {
            if (cur[k] == x[k]) continue;
            RatVec nxt = cur;
            nxt[k] += (x[k] > 0 ? step : -step);
            Rational dev = cone_deviation(x, nxt);
            if (best_k < 0 || dev < best_dev) {
                best_k = static_cast<int>(k);
                best_dev = dev;
            }
        }
        require(best_k >= 0, ErrorCode::InternalError, "staircase stalled");
        cur[static_cast<size_t>(best_k)] += (x[static_cast<size_t>(best_k)] > 0 ? step : -step);
        verts.push_back(cur);
        if (l1_norm_rat(cur) > eps)
            require(in_cone_region(x, theta, cur), ErrorCode::NoGridPath,
                    "staircase leaves its cone: increase M");
    }
    // Compress collinear runs into legs.
    std::vector<RatVec> legs{verts[0]};
    for (size_t i = 1; i + 1 < verts.size(); ++i) {
        size_t ax_prev = 0, ax_next = 0;
        for (size_t k = 0; k < d; ++k) {
            if (verts[i][k] != verts[i - 1][k]) ax_prev = k;
            if (verts[i + 1][k] != verts[i][k]) ax_next = k;
        }
        if (ax_prev != ax_next) legs.push_back(verts[i]);
    }
    if (verts.size() > 1) legs.push_back(verts.back());
    return legs;
}

}  // namespace detail

// Intermediate stage: radial cones carrying the segment profiles, sup A in
// the central ball and elsewhere.
inline CostField radial_cone_field(const CostField& ft, const Rational& theta) {
    require(ft.eps.has_value() && !ft.rays.empty(), ErrorCode::InvalidParams,
            "cone stage expects a star/alternating field");
    detail::check_cones_disjoint(ft.rays, theta);
    CostField g = ft;
    g.regions.clear();
    g.regions.push_back(FieldRegion::ball(*ft.eps, ft.sup_a));
    for (const auto& r : ft.regions) {
        require(r.type == FieldRegion::Type::Segment, ErrorCode::InvalidParams,
                "cone stage expects radial segments");
        Rational len = l1_norm_rat(r.poly[1]);
        g.regions.push_back(FieldRegion::cone(r.poly[1], theta,
                                              detail::clip_profile(r.profile, len, ft.sup_a)));
    }
    return g;
}

inline CostField cone_and_grid_field(const CostField& ft, const Rational& theta, std::int64_t M) {
    require(M >= 1, ErrorCode::InvalidParams, "grid scale must be positive");
    require(ft.eps.has_value() && !ft.rays.empty(), ErrorCode::InvalidParams,
            "grid stage expects a star/alternating field");
    detail::check_cones_disjoint(ft.rays, theta);

    // M must place every construction breakpoint on the 1/M grid.
    bool aligned = detail::divides_den(*ft.eps, M);
    for (const auto& r : ft.regions) {
        for (const auto& c : r.poly[1]) aligned = aligned && detail::divides_den(c, M);
        for (const auto& b : r.profile.breaks) aligned = aligned && detail::divides_den(b, M);
    }
    require(aligned, ErrorCode::NoGridPath, "M is not a common multiple of the construction denominators");

    CostField g = ft;
    g.grid_m = M;
    g.regions.clear();
    g.regions.push_back(FieldRegion::ball(*ft.eps, ft.sup_a));
    for (const auto& r : ft.regions) {
        require(r.type == FieldRegion::Type::Segment, ErrorCode::InvalidParams,
                "grid stage expects radial segments");
        Rational len = l1_norm_rat(r.poly[1]);
        std::vector<RatVec> legs = detail::build_staircase(r.poly[1], theta, *ft.eps, M);
        g.regions.push_back(FieldRegion::grid_path(std::move(legs),
                                                   detail::clip_profile(r.profile, len, ft.sup_a)));
    }
    return g;
}

// ---------------------------------------------------------------------------
// Grid approximation of the induced pseudometric, and unit balls.
// ---------------------------------------------------------------------------

namespace detail {

struct FieldGrid {
    const CostField& f;
    std::int64_t N;
    Box box;
    BoxIndexer idx;
    mutable std::unordered_map<std::uint64_t, Rational> cache;

    FieldGrid(const CostField& field, std::int64_t n) : f(field), N(n), box(make_grid_box(field, n)), idx(box) {}

    static Box make_grid_box(const CostField& field, std::int64_t n) {
        Box b = make_box(zero_point(field.dim), zero_point(field.dim));
        for (int k = 0; k < field.dim; ++k) {
            b.lo[k] = to_int64(rat_ceil(field.dom_lo[static_cast<size_t>(k)] * Rational(n)));
            b.hi[k] = to_int64(rat_floor(field.dom_hi[static_cast<size_t>(k)] * Rational(n)));
            require(b.lo[k] <= b.hi[k], ErrorCode::DomainExceeded, "field domain holds no grid points");
        }
        return b;
    }

    RatVec to_field(const LatticePoint& p) const {
        RatVec y(static_cast<size_t>(f.dim));
        for (int k = 0; k < f.dim; ++k) y[static_cast<size_t>(k)] = Rational(p[k], N);
        return y;
    }

    Rational weight(std::int64_t ix, int axis) const {
        std::uint64_t key = static_cast<std::uint64_t>(ix) * static_cast<std::uint64_t>(f.dim) +
                            static_cast<std::uint64_t>(axis);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        LatticePoint p = idx.point(ix);
        LatticePoint q = p;
        q[axis] += 1;
        Rational w = edge_integral(f, to_field(p), to_field(q));
        cache.emplace(key, w);
        return w;
    }

    // Rational Dijkstra over the grid.
    std::vector<std::optional<Rational>> distances(std::int64_t source) const {
        std::vector<std::optional<Rational>> dist(static_cast<size_t>(idx.count));
        std::vector<char> done(static_cast<size_t>(idx.count), 0);
        using QE = std::pair<Rational, std::int64_t>;
        std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
        dist[static_cast<size_t>(source)] = Rational(0);
        pq.push({Rational(0), source});
        while (!pq.empty()) {
            auto [du, u] = pq.top();
            pq.pop();
            if (done[static_cast<size_t>(u)]) continue;
            done[static_cast<size_t>(u)] = 1;
            LatticePoint pu = idx.point(u);
            for (int ax = 0; ax < f.dim; ++ax)
                for (int dir : {+1, -1}) {
                    LatticePoint pv = pu;
                    pv[ax] += dir;
                    if (!box.contains(pv)) continue;
                    std::int64_t v = idx.index(pv);
                    Rational w = weight(dir > 0 ? u : v, ax);
                    Rational cand = du + w;
                    if (!dist[static_cast<size_t>(v)] || cand < *dist[static_cast<size_t>(v)]) {
                        dist[static_cast<size_t>(v)] = cand;
                        pq.push({cand, v});
                    }
                }
        }
        return dist;
    }

    std::int64_t index_of(const RatVec& y) const {
        LatticePoint p = zero_point(f.dim);
        for (int k = 0; k < f.dim; ++k) {
            Rational scaled = y[static_cast<size_t>(k)] * Rational(N);
            require(rat_den(scaled) == 1, ErrorCode::ScaleMismatch, "point is not on the 1/gridN grid");
            p[k] = to_int64(rat_num(scaled));
        }
        require(box.contains(p), ErrorCode::DomainExceeded, "point outside the field domain");
        return idx.index(p);
    }
};

}  // namespace detail

inline Rational field_distance(const CostField& f, const RatVec& x, const RatVec& y, std::int64_t gridN) {
    require(gridN >= 1, ErrorCode::InvalidParams, "gridN must be positive");
    require(f.in_domain(x) && f.in_domain(y), ErrorCode::DomainExceeded, "endpoints outside the field domain");
    detail::FieldGrid grid(f, gridN);
    std::int64_t xi = grid.index_of(x), yi = grid.index_of(y);
    auto dist = grid.distances(xi);
    require(dist[static_cast<size_t>(yi)].has_value(), ErrorCode::Unreachable, "grid disconnects the endpoints");
    return *dist[static_cast<size_t>(yi)];
}

inline PointSet unit_ball(const CostField& f, std::int64_t gridN) {
    require(gridN >= 1, ErrorCode::InvalidParams, "gridN must be positive");
    Rational reach = Rational(1) / f.inf_a;
    for (int k = 0; k < f.dim; ++k)
        require(f.dom_lo[static_cast<size_t>(k)] <= -reach && f.dom_hi[static_cast<size_t>(k)] >= reach,
                ErrorCode::DomainExceeded, "field domain must contain D_{1/inf A}");
    detail::FieldGrid grid(f, gridN);
    RatVec origin(static_cast<size_t>(f.dim), Rational(0));
    auto dist = grid.distances(grid.index_of(origin));
    PointSet ps(f.dim);
    for (std::int64_t ix = 0; ix < grid.idx.count; ++ix) {
        if (!dist[static_cast<size_t>(ix)] || *dist[static_cast<size_t>(ix)] > 1) continue;
        LatticePoint p = grid.idx.point(ix);
        std::vector<double> row(static_cast<size_t>(f.dim));
        for (int k = 0; k < f.dim; ++k) row[static_cast<size_t>(k)] = static_cast<double>(p[k]) / static_cast<double>(gridN);
        ps.append(row);
    }
    return ps;
}

// ---------------------------------------------------------------------------
// Bridges between fields and lattice configurations.
// ---------------------------------------------------------------------------

// Project the grid-stage field onto Z^d at combined scale M*t: explicit edge
// values along the scaled grid paths, default elsewhere (the field is its
// default off the paths by construction).
inline Configuration config_from_field(const CostField& g, std::int64_t t, const ValueSet& A) {
    require(t >= 1, ErrorCode::ScaleMismatch, "scale t must be >= 1");
    require(g.grid_m.has_value(), ErrorCode::ScaleMismatch, "configuration projection needs a grid-stage field");
    Rational inf_a, sup_a;
    detail::require_scalar_range(A, inf_a, sup_a);
    std::int64_t Mt = *g.grid_m * t;

    auto member = [&](const Rational& v) {
        if (A.kind == ValueSet::Kind::IntervalScalar) return v >= A.lo && v <= A.hi;
        for (const auto& a : A.scalars)
            if (a == v) return true;
        return false;
    };
    require(member(g.default_value), ErrorCode::ScaleMismatch, "field default is not an alphabet value");

    Configuration cfg(g.dim, PassageValue(g.default_value));
    Box dom = make_box(zero_point(g.dim), zero_point(g.dim));
    for (int k = 0; k < g.dim; ++k) {
        dom.lo[k] = to_int64(rat_ceil(g.dom_lo[static_cast<size_t>(k)] * Rational(Mt)));
        dom.hi[k] = to_int64(rat_floor(g.dom_hi[static_cast<size_t>(k)] * Rational(Mt)));
    }
    cfg.set_domain(dom);
    cfg.set_value_set(A);

    for (const auto& r : g.regions) {
        if (r.type != FieldRegion::Type::GridPath) continue;
        for (size_t leg = 0; leg + 1 < r.poly.size(); ++leg) {
            RatVec a = r.poly[leg], b = r.poly[leg + 1];
            int axis = -1;
            for (int k = 0; k < g.dim; ++k)
                if (a[static_cast<size_t>(k)] != b[static_cast<size_t>(k)]) axis = k;
            if (axis < 0) continue;
            // Scaled leg endpoints are lattice points by the grid-stage M check.
            LatticePoint pa = zero_point(g.dim), pb = zero_point(g.dim);
            for (int k = 0; k < g.dim; ++k) {
                Rational sa = a[static_cast<size_t>(k)] * Rational(Mt), sb = b[static_cast<size_t>(k)] * Rational(Mt);
                require(rat_den(sa) == 1 && rat_den(sb) == 1, ErrorCode::ScaleMismatch,
                        "grid path endpoint off the scaled lattice");
                pa[k] = to_int64(rat_num(sa));
                pb[k] = to_int64(rat_num(sb));
            }
            Coord step = pb[axis] > pa[axis] ? 1 : -1;
            for (Coord c = pa[axis]; c != pb[axis]; c += step) {
                LatticePoint u = pa, v = pa;
                u[axis] = c;
                v[axis] = c + step;
                // Field value at the edge midpoint (constant on the open edge).
                RatVec mid(static_cast<size_t>(g.dim));
                for (int k = 0; k < g.dim; ++k)
                    mid[static_cast<size_t>(k)] = Rational(u[k] + v[k], 1) / Rational(2 * Mt);
                Rational val = field_value(g, mid);
                require(member(val), ErrorCode::ScaleMismatch, "projected edge value is not an alphabet value");
                cfg.set_value(u, v, PassageValue(val));
            }
        }
    }
    return cfg;
}

// The rescaled skeleton field of a bounded configuration: value tau(e) on
// each open edge of Z^d/t, sup A elsewhere.
inline CostField field_from_config(const Configuration& cfg, const Rational& t) {
    require(cfg.scalar_kind(), ErrorCode::KindMismatch, "skeleton field needs a scalar configuration");
    require(cfg.domain().has_value(), ErrorCode::InvalidParams, "skeleton field needs a bounded configuration");
    require(cfg.value_set().has_value(), ErrorCode::EmptyValueSet, "skeleton field needs a declared alphabet");
    require(t > 0, ErrorCode::InvalidParams, "scale must be positive");
    CostField f;
    f.dim = cfg.dim();
    f.inf_a = cfg.value_set()->inf();
    f.sup_a = cfg.value_set()->sup();
    require(f.inf_a > 0, ErrorCode::InvalidParams, "alphabet must be bounded away from 0");
    f.default_value = f.sup_a;
    const Box& dom = *cfg.domain();
    f.dom_lo.resize(static_cast<size_t>(f.dim));
    f.dom_hi.resize(static_cast<size_t>(f.dim));
    for (int k = 0; k < f.dim; ++k) {
        f.dom_lo[static_cast<size_t>(k)] = Rational(dom.lo[k]) / t;
        f.dom_hi[static_cast<size_t>(k)] = Rational(dom.hi[k]) / t;
    }
    f.regions.push_back(FieldRegion::skeleton(std::make_shared<Configuration>(cfg), t));
    return f;
}

// ---------------------------------------------------------------------------
// JSON round-trip.
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const StepProfile& p) {
    nlohmann::json j;
    j["breaks"] = nlohmann::json::array();
    j["values"] = nlohmann::json::array();
    for (const auto& b : p.breaks) j["breaks"].push_back(detail::rational_to_json(b));
    for (const auto& v : p.values) j["values"].push_back(detail::rational_to_json(v));
    return j;
}

inline StepProfile profile_from_json(const nlohmann::json& j) {
    StepProfile p;
    p.breaks.clear();
    p.values.clear();
    for (const auto& b : j.at("breaks")) p.breaks.push_back(detail::rational_from_json(b));
    for (const auto& v : j.at("values")) p.values.push_back(detail::rational_from_json(v));
    p.validate();
    return p;
}

namespace detail {

inline nlohmann::json ratvec_to_json(const RatVec& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : v) arr.push_back(rational_to_json(c));
    return arr;
}

inline RatVec ratvec_from_json(const nlohmann::json& j) {
    RatVec v;
    for (const auto& c : j) v.push_back(rational_from_json(c));
    return v;
}

}  // namespace detail

inline nlohmann::json to_json(const CostField& f) {
    nlohmann::json j;
    j["dim"] = f.dim;
    j["default"] = detail::rational_to_json(f.default_value);
    j["value_range"] = nlohmann::json::array({detail::rational_to_json(f.inf_a), detail::rational_to_json(f.sup_a)});
    j["domain"] = {{"lo", detail::ratvec_to_json(f.dom_lo)}, {"hi", detail::ratvec_to_json(f.dom_hi)}};
    if (f.eps) j["eps"] = detail::rational_to_json(*f.eps);
    if (f.eps_prime) j["eps_prime"] = detail::rational_to_json(*f.eps_prime);
    if (f.block_s) j["block_s"] = detail::rational_to_json(*f.block_s);
    if (f.grid_m) j["grid_m"] = *f.grid_m;
    if (!f.rays.empty()) {
        j["rays"] = nlohmann::json::array();
        for (const auto& r : f.rays) j["rays"].push_back(detail::ratvec_to_json(r));
    }
    j["regions"] = nlohmann::json::array();
    for (const auto& r : f.regions) {
        nlohmann::json rj;
        switch (r.type) {
            case FieldRegion::Type::Segment:
                rj["type"] = "segment";
                rj["from"] = detail::ratvec_to_json(r.poly[0]);
                rj["to"] = detail::ratvec_to_json(r.poly[1]);
                rj["profile"] = to_json(r.profile);
                break;
            case FieldRegion::Type::Cone:
                rj["type"] = "cone";
                rj["axis"] = detail::ratvec_to_json(r.poly[0]);
                rj["theta"] = detail::rational_to_json(r.theta);
                rj["profile"] = to_json(r.profile);
                break;
            case FieldRegion::Type::GridPath:
                rj["type"] = "gridpath";
                rj["vertices"] = nlohmann::json::array();
                for (const auto& v : r.poly) rj["vertices"].push_back(detail::ratvec_to_json(v));
                rj["profile"] = to_json(r.profile);
                break;
            case FieldRegion::Type::Ball:
                rj["type"] = "ball";
                rj["radius"] = detail::rational_to_json(r.radius);
                rj["value"] = detail::rational_to_json(r.profile.values[0]);
                break;
            case FieldRegion::Type::Skeleton:
                rj["type"] = "skeleton";
                rj["scale"] = detail::rational_to_json(r.skel_scale);
                rj["config"] = to_json(*r.skel_cfg);
                break;
        }
        j["regions"].push_back(std::move(rj));
    }
    return j;
}

inline CostField field_from_json(const nlohmann::json& j) {
    try {
        CostField f;
        f.dim = j.at("dim").get<int>();
        require(f.dim >= 1, ErrorCode::MalformedInput, "field dimension");
        f.default_value = detail::rational_from_json(j.at("default"));
        f.inf_a = detail::rational_from_json(j.at("value_range").at(0));
        f.sup_a = detail::rational_from_json(j.at("value_range").at(1));
        f.dom_lo = detail::ratvec_from_json(j.at("domain").at("lo"));
        f.dom_hi = detail::ratvec_from_json(j.at("domain").at("hi"));
        if (j.contains("eps")) f.eps = detail::rational_from_json(j.at("eps"));
        if (j.contains("eps_prime")) f.eps_prime = detail::rational_from_json(j.at("eps_prime"));
        if (j.contains("block_s")) f.block_s = detail::rational_from_json(j.at("block_s"));
        if (j.contains("grid_m")) f.grid_m = j.at("grid_m").get<std::int64_t>();
        if (j.contains("rays"))
            for (const auto& r : j.at("rays")) f.rays.push_back(detail::ratvec_from_json(r));
        for (const auto& rj : j.at("regions")) {
            std::string type = rj.at("type").get<std::string>();
            if (type == "segment") {
                f.regions.push_back(FieldRegion::segment(detail::ratvec_from_json(rj.at("from")),
                                                         detail::ratvec_from_json(rj.at("to")),
                                                         profile_from_json(rj.at("profile"))));
            } else if (type == "cone") {
                f.regions.push_back(FieldRegion::cone(detail::ratvec_from_json(rj.at("axis")),
                                                      detail::rational_from_json(rj.at("theta")),
                                                      profile_from_json(rj.at("profile"))));
            } else if (type == "gridpath") {
                std::vector<RatVec> verts;
                for (const auto& v : rj.at("vertices")) verts.push_back(detail::ratvec_from_json(v));
                f.regions.push_back(FieldRegion::grid_path(std::move(verts), profile_from_json(rj.at("profile"))));
            } else if (type == "ball") {
                f.regions.push_back(FieldRegion::ball(detail::rational_from_json(rj.at("radius")),
                                                      detail::rational_from_json(rj.at("value"))));
            } else if (type == "skeleton") {
                auto cfg = std::make_shared<Configuration>(configuration_from_json(rj.at("config")));
                f.regions.push_back(FieldRegion::skeleton(std::move(cfg),
                                                          detail::rational_from_json(rj.at("scale"))));
            } else {
                raise(ErrorCode::MalformedInput, "unknown field region type: " + type);
            }
        }
        return f;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        raise(ErrorCode::MalformedInput, std::string("field JSON: ") + e.what());
    }
}

}  // namespace percolab
