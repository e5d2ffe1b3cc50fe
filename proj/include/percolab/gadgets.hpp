#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "percolab/cone.hpp"
#include "percolab/config.hpp"
#include "percolab/errors.hpp"
#include "percolab/geometry.hpp"
#include "percolab/hilbert_fpp.hpp"
#include "percolab/rational.hpp"
#include "percolab/scalar_fpp.hpp"
#include "percolab/values.hpp"

// Gadget constructions paired with machine verifiers.  Each generator emits a
// concrete Configuration realizing one structural phenomenon (funneling of
// optimal paths through a joint, failure of subpath monotonicity, absence of
// geodesics, passage vectors steered into a prescribed neighbourhood), and
// each verifier re-derives the claimed property from the emitted configuration
// alone, reporting witness paths whenever a claim fails.

namespace percolab {

// ---------------------------------------------------------------------------
// Verification reports.
// ---------------------------------------------------------------------------

struct GadgetReport {
    std::string claim;
    bool verified = false;
    // (violating path, reference path); present whenever verified is false.
    std::optional<std::pair<Path, Path>> counterexample;
    std::map<std::string, double> statistics;
};

inline nlohmann::json to_json(const GadgetReport& r) {
    auto path_json = [](const Path& p) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& v : p.v) arr.push_back(detail::point_to_json(v));
        return arr;
    };
    nlohmann::json j;
    j["claim"] = r.claim;
    j["verified"] = r.verified;
    if (r.counterexample)
        j["counterexample"] = nlohmann::json{{"violating", path_json(r.counterexample->first)},
                                             {"reference", path_json(r.counterexample->second)}};
    j["statistics"] = nlohmann::json::object();
    for (const auto& [key, val] : r.statistics) j["statistics"][key] = val;
    return j;
}

// ---------------------------------------------------------------------------
// Shared lattice helpers.
// ---------------------------------------------------------------------------

namespace detail {

inline bool on_box_surface(const Box& B, const LatticePoint& p) {
    if (!B.contains(p)) return false;
    for (int i = 0; i < B.dim(); ++i)
        if (p[i] == B.lo[i] || p[i] == B.hi[i]) return true;
    return false;
}

inline std::vector<LatticePoint> box_surface_vertices(const Box& B) {
    std::vector<LatticePoint> out;
    BoxIndexer idx(B);
    for (std::int64_t ix = 0; ix < idx.count; ++ix) {
        LatticePoint p = idx.point(ix);
        if (on_box_surface(B, p)) out.push_back(p);
    }
    return out;
}

inline std::vector<Edge> box_surface_edges(const Box& B) {
    std::vector<Edge> out;
    BoxIndexer idx(B);
    for (std::int64_t ix = 0; ix < idx.count; ++ix) {
        LatticePoint p = idx.point(ix);
        for (int ax = 0; ax < B.dim(); ++ax) {
            if (p[ax] == B.hi[ax]) continue;
            LatticePoint q = p;
            q[ax] += 1;
            Edge e = canonical_edge(p, q);
            if (edge_on_box_boundary(e, B)) out.push_back(e);
        }
    }
    return out;
}

// Cheap skeleton of the skew-box gadget: the two box shells plus the joint
// segment [p e1, q e1] connecting them.
inline std::set<Edge> skew_cheap_edges(int d, Coord p, Coord q, Coord r, Coord q_prime) {
    Box k1 = centered_box(d, p);
    LatticePoint lo = zero_point(d), hi = zero_point(d);
    lo[0] = -q_prime;
    hi[0] = q;
    for (int i = 1; i < d; ++i) {
        lo[i] = -r;
        hi[i] = r;
    }
    Box k2 = make_box(lo, hi);
    std::set<Edge> cheap;
    for (const Edge& e : box_surface_edges(k1)) cheap.insert(e);
    for (const Edge& e : box_surface_edges(k2)) cheap.insert(e);
    for (Coord t = p; t < q; ++t)
        cheap.insert(canonical_edge(axis_point(d, 0, t), axis_point(d, 0, t + 1)));
    return cheap;
}

// Smallest integer strictly greater than v.
inline Coord next_integer_above(const Rational& v) { return to_int64(rat_floor(v)) + 1; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Skew-box funneling gadget (scalar values).  Two nested boxes K1 = [-p,p]^d
// and K2 = [-q',q] x [-r,r]^{d-1} carry a cheap boundary shell each, joined by
// the cheap segment [p e1, q e1]; every other edge is expensive.  With wide
// enough parameter gaps, every optimal shell-to-shell path threads the joint.
// ---------------------------------------------------------------------------

struct SkewBoxParams {
    int d = 2;            // lattice dimension
    int m = 1;            // required lower bound on the joint gap q - p
    Coord p = 0;          // K1 half-width
    Coord q = 0;          // near face of K2 along +e1
    Coord r = 0;          // K2 half-width along the remaining axes
    Coord q_prime = 0;    // far extent of K2 along -e1
    Rational a = 0;       // cheap edge value
    Rational b = 0;       // expensive edge value, a < b
    Rational eps = 0;     // perturbation budget
    Rational lambda = 0;  // cost-ratio margin, (a + eps) lambda < b - eps

    Box k1() const { return centered_box(d, p); }

    Box k2() const {
        LatticePoint lo = zero_point(d), hi = zero_point(d);
        lo[0] = -q_prime;
        hi[0] = q;
        for (int i = 1; i < d; ++i) {
            lo[i] = -r;
            hi[i] = r;
        }
        return make_box(lo, hi);
    }

    // Box ordering and positivity: enough for the boxes to nest and the
    // verifiers to run at any (including deliberately small) scale.
    void validate_geometry() const {
        require(d >= 2, ErrorCode::UnsupportedDimension, "skew-box gadget needs d >= 2");
        require(m >= 1, ErrorCode::InvalidParams, "joint gap requirement m must be positive");
        require(p >= 1 && p < q && q < r && r < q_prime, ErrorCode::InvalidParams,
                "skew-box ordering 1 <= p < q < r < q' violated");
    }

    void validate_values() const {
        require(a > 0 && a < b, ErrorCode::InvalidParams, "need 0 < a < b");
    }

    // Full proof-scale parameter gaps on top of geometry and values.
    void validate() const {
        validate_geometry();
        validate_values();
        require(eps > 0, ErrorCode::InvalidParams, "eps must be positive");
        require(lambda > 1, ErrorCode::InvalidParams, "lambda must exceed 1");
        require((a + eps) * lambda < b - eps, ErrorCode::InvalidParams,
                "(a + eps) lambda < b - eps violated");
        Rational lm1 = lambda - 1;
        require(Rational(q - p) > rat_max(Rational(m), Rational(4 * d * p) / lm1),
                ErrorCode::InvalidParams, "q - p gap too small");
        require(Rational(r - q) > Rational(4 * d * p + 2 * q - 2 * p) / lm1,
                ErrorCode::InvalidParams, "r - q gap too small");
        require(Rational(q_prime - p) > Rational(2 * r + 4 * d * p + 2 * q - 2 * p) / lm1,
                ErrorCode::InvalidParams, "q' - p gap too small");
    }
};

// Smallest integer parameters satisfying all gap inequalities, with lambda
// the largest quarter-integer admitting a cost margin between a and b.
inline SkewBoxParams choose_gadget_params(int d, int m, const Rational& a, const Rational& b,
                                          const ValueSet& A) {
    require(d >= 2, ErrorCode::UnsupportedDimension, "funneling gadget needs d >= 2");
    require(m >= 1, ErrorCode::InvalidParams, "joint gap requirement m must be positive");
    require(A.scalar(), ErrorCode::KindMismatch, "funneling gadget uses scalar alphabets");
    auto member = [&A](const Rational& v) {
        if (A.kind == ValueSet::Kind::FiniteScalar)
            return std::find(A.scalars.begin(), A.scalars.end(), v) != A.scalars.end();
        return A.lo <= v && v <= A.hi;
    };
    require(member(a) && member(b), ErrorCode::InvalidParams, "a and b must belong to the alphabet");
    require(a > 0, ErrorCode::InvalidParams, "cheap value must be positive");
    if (b <= a) raise(ErrorCode::NoMargin, "need a < b to open a cost margin");

    SkewBoxParams P;
    P.d = d;
    P.m = m;
    P.a = a;
    P.b = b;
    P.eps = (b - a) / 8;

    // Largest n/4 with (a + eps) * n/4 < b - eps.
    std::int64_t n = to_int64(rat_ceil(4 * (b - P.eps) / (a + P.eps))) - 1;
    if (n <= 4) raise(ErrorCode::NoMargin, "cost ratio too small for a funneling margin");
    P.lambda = Rational(n, 4);

    Rational lm1 = P.lambda - 1;
    P.p = 1;
    P.q = P.p + detail::next_integer_above(rat_max(Rational(m), Rational(4 * d * P.p) / lm1));
    P.r = std::max<Coord>(
        P.q + detail::next_integer_above(Rational(4 * d * P.p + 2 * P.q - 2 * P.p) / lm1), P.q + 1);
    P.q_prime = std::max<Coord>(
        P.p + detail::next_integer_above(Rational(2 * P.r + 4 * d * P.p + 2 * P.q - 2 * P.p) / lm1),
        P.r + 1);
    P.validate();
    return P;
}

struct SkewBoxGadget {
    Configuration cfg;
    std::set<Edge> cheap;
    SkewBoxParams params;
};

inline SkewBoxGadget skew_box_config(const SkewBoxParams& P) {
    P.validate_geometry();
    P.validate_values();
    Configuration cfg(P.d, PassageValue(P.b));
    std::set<Edge> cheap = detail::skew_cheap_edges(P.d, P.p, P.q, P.r, P.q_prime);
    for (const Edge& e : cheap) cfg.set_value(e, PassageValue(P.a));
    cfg.set_value_set(ValueSet::finite_scalar({P.a, P.b}));
    return SkewBoxGadget{std::move(cfg), std::move(cheap), P};
}

// Exhaustive funneling check.  For every pair (x1, x2) with x1 on the inner
// shell or the joint segment and x2 on the segment or the outer shell:
//   (i)  no optimal x1 -> x2 path uses an edge outside the cheap set, and
//   (ii) when the pair brackets the joint, every optimal path visits the
//        joint endpoints p e1 / q e1 as dictated by its endpoint classes.
// All comparisons are exact (integer-scaled rationals).  The search box is
// provably large enough: a path leaving it spends more on expensive edges
// than the whole cheap-graph route costs.
inline GadgetReport verify_funneling(const Configuration& cfg, const std::set<Edge>& cheap,
                                     const SkewBoxParams& P) {
    P.validate_geometry();
    require(cfg.dim() == P.d, ErrorCode::DimensionMismatch, "configuration dimension");
    require(cfg.scalar_kind(), ErrorCode::KindMismatch, "funneling verifier needs scalar values");
    require(!cheap.empty(), ErrorCode::EmptySet, "cheap edge set");

    GadgetReport rep;
    rep.claim = "funnel";

    // Exact cheap-graph diameter; bounds every shell-to-shell passage time by
    // amax * diam.
    std::map<LatticePoint, std::vector<LatticePoint>> adj;
    Rational amax = 0;
    for (const Edge& e : cheap) {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
        amax = rat_max(amax, cfg.scalar_value(e));
    }
    std::int64_t diam = 0;
    {
        std::map<LatticePoint, std::int64_t> dist;
        for (const auto& [src, nbrs] : adj) {
            (void)nbrs;
            dist.clear();
            dist[src] = 0;
            std::deque<LatticePoint> dq{src};
            while (!dq.empty()) {
                LatticePoint u = dq.front();
                dq.pop_front();
                for (const auto& v : adj.at(u))
                    if (!dist.count(v)) {
                        dist[v] = dist[u] + 1;
                        dq.push_back(v);
                    }
            }
            require(dist.size() == adj.size(), ErrorCode::InvalidParams,
                    "cheap edge set must be connected");
            for (const auto& [v, dv] : dist) {
                (void)v;
                diam = std::max(diam, dv);
            }
        }
    }

    // Smallest value any edge outside the cheap set can take: the default,
    // every rule value, and every explicit non-cheap edge.
    Rational bmin = as_scalar(cfg.default_value());
    for (const auto& rule : cfg.rules())
        for (const auto& v : rule.values) bmin = rat_min(bmin, as_scalar(v));
    for (const auto& [e, v] : cfg.explicit_edges())
        if (!cheap.count(e)) bmin = rat_min(bmin, as_scalar(v));
    require(bmin > 0, ErrorCode::InvalidParams, "expensive edges must have positive value");

    // A path straying `margin` steps beyond K2 crosses at least 2*margin
    // non-cheap edges, costing more than amax * diam >= T(x1, x2).
    Coord margin = to_int64(rat_floor(amax * Rational(diam) / (2 * bmin))) + 1;
    Box box = P.k2();
    for (int i = 0; i < P.d; ++i) {
        box.lo[i] -= margin;
        box.hi[i] += margin;
    }
    ScalarGrid grid(cfg, box);
    const BoxIndexer& idx = grid.indexer();

    // Integer scaling: all box weights share one denominator, so distances
    // scale to exact int64 and the pair scan stays cheap.
    Integer den_acc = 1;
    for (std::int64_t ix = 0; ix < idx.count; ++ix)
        for (int ax = 0; ax < P.d; ++ax)
            if (grid.has_edge(ix, ax)) den_acc = int_lcm(den_acc, rat_den(grid.weight(ix, ax)));
    require(den_acc <= (Integer(1) << 40), ErrorCode::InvalidParams,
            "edge value denominators too large to scale");
    const std::int64_t den64 = to_int64(den_acc);
    const Rational den_r(den64);
    {
        Integer bound = rat_num(amax * den_r) * Integer(diam) + 1;
        require(bound < (Integer(1) << 60), ErrorCode::InternalError, "scaled distances overflow");
    }
    auto scaled = [&](const Rational& v) { return to_int64(rat_num(v * den_r)); };

    const LatticePoint pe1 = axis_point(P.d, 0, P.p);
    const LatticePoint qe1 = axis_point(P.d, 0, P.q);
    std::vector<LatticePoint> X1 = detail::box_surface_vertices(P.k1());
    for (Coord t = P.p; t < P.q; ++t) X1.push_back(axis_point(P.d, 0, t));
    std::vector<LatticePoint> X2;
    for (Coord t = P.p + 1; t <= P.q; ++t) X2.push_back(axis_point(P.d, 0, t));
    for (auto& v : detail::box_surface_vertices(P.k2())) X2.push_back(v);
    auto dedupe = [](std::vector<LatticePoint>& pts) {
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    };
    dedupe(X1);
    dedupe(X2);

    std::vector<ScalarGrid::DistanceField> f1, f2;
    std::vector<std::vector<std::int64_t>> g1, g2;
    auto add_field = [&](std::vector<ScalarGrid::DistanceField>& fs,
                         std::vector<std::vector<std::int64_t>>& gs, const LatticePoint& s) {
        fs.push_back(grid.dijkstra(idx.index(s)));
        std::vector<std::int64_t> g(static_cast<size_t>(idx.count), 0);
        for (std::int64_t ix = 0; ix < idx.count; ++ix) g[static_cast<size_t>(ix)] = scaled(fs.back().at(ix));
        gs.push_back(std::move(g));
    };
    for (const auto& s : X1) add_field(f1, g1, s);
    for (const auto& s : X2) add_field(f2, g2, s);

    struct DirEdge {
        std::int64_t u = 0, v = 0, w = 0;
    };
    std::vector<DirEdge> expensive;
    for (std::int64_t ix = 0; ix < idx.count; ++ix) {
        LatticePoint pt = idx.point(ix);
        for (int ax = 0; ax < P.d; ++ax) {
            if (pt[ax] == box.hi[ax] || !grid.has_edge(ix, ax)) continue;
            LatticePoint qt = pt;
            qt[ax] += 1;
            if (cheap.count(canonical_edge(pt, qt))) continue;
            expensive.push_back(DirEdge{ix, idx.index(qt), scaled(grid.weight(ix, ax))});
        }
    }

    double min_slack = std::numeric_limits<double>::infinity();
    std::int64_t pairs = 0, traversal_checks = 0;
    bool done = false;

    auto record_violation = [&](const Path& bad, size_t i1, size_t j2, const Rational& T) {
        // Soundness re-check via an independent passage recomputation.
        require(path_passage_time(cfg, bad) == T, ErrorCode::InternalError,
                "counterexample re-check failed");
        Path ref = detail::trace_witness(grid, f1[i1], idx.index(X1[i1]), idx.index(X2[j2]));
        rep.counterexample = std::make_pair(bad, ref);
        done = true;
    };

    for (size_t i = 0; i < X1.size() && !done; ++i) {
        const std::int64_t x1i = idx.index(X1[i]);
        const bool shell1 = detail::on_box_surface(P.k1(), X1[i]) && X1[i] != pe1;
        for (size_t j = 0; j < X2.size() && !done; ++j) {
            ++pairs;
            const std::int64_t x2i = idx.index(X2[j]);
            require(f1[i].is_reached(x2i), ErrorCode::Unreachable, "pair disconnected in the box");
            const std::int64_t T = g1[i][static_cast<size_t>(x2i)];
            const bool shell2 = detail::on_box_surface(P.k2(), X2[j]) && X2[j] != qe1;

            // (i) every expensive edge must be slack on every optimal path.
            for (const auto& e : expensive) {
                std::int64_t t1 = g1[i][static_cast<size_t>(e.u)] + e.w + g2[j][static_cast<size_t>(e.v)];
                std::int64_t t2 = g1[i][static_cast<size_t>(e.v)] + e.w + g2[j][static_cast<size_t>(e.u)];
                std::int64_t slack = std::min(t1, t2) - T;
                min_slack = std::min(min_slack, static_cast<double>(slack) / static_cast<double>(den64));
                if (slack <= 0) {
                    std::int64_t from = (t1 <= t2) ? e.u : e.v;
                    std::int64_t to = (t1 <= t2) ? e.v : e.u;
                    Path left = detail::trace_witness(grid, f1[i], x1i, from);
                    Path right = detail::trace_witness(grid, f2[j], x2i, to);
                    std::vector<LatticePoint> verts = left.v;
                    for (auto it = right.v.rbegin(); it != right.v.rend(); ++it) verts.push_back(*it);
                    Path bad(std::move(verts));
                    bool uses_expensive = false;
                    for (size_t t = 0; t < bad.edge_count() && !uses_expensive; ++t)
                        uses_expensive = !cheap.count(bad.edge(t));
                    require(uses_expensive, ErrorCode::InternalError,
                            "counterexample misses an expensive edge");
                    record_violation(bad, i, j, f1[i].at(x2i));
                    break;
                }
            }
            if (done) break;

            // (ii) joint traversal: BFS over tight edges, excluding the joint
            // endpoint the pair must visit; reaching x2 refutes the claim.
            std::vector<LatticePoint> musts;
            if (shell1) musts.push_back(pe1);
            if (shell2) musts.push_back(qe1);
            for (const auto& z : musts) {
                ++traversal_checks;
                const std::int64_t zi = idx.index(z);
                std::vector<std::int64_t> par(static_cast<size_t>(idx.count), -2);
                std::deque<std::int64_t> dq;
                par[static_cast<size_t>(x1i)] = -1;
                dq.push_back(x1i);
                while (!dq.empty()) {
                    std::int64_t u = dq.front();
                    dq.pop_front();
                    if (u == x2i) break;
                    LatticePoint pu = idx.point(u);
                    for (int ax = 0; ax < P.d; ++ax)
                        for (int dir : {+1, -1}) {
                            LatticePoint pv = pu;
                            pv[ax] += dir;
                            if (!box.contains(pv)) continue;
                            std::int64_t v = idx.index(pv);
                            if (v == zi || par[static_cast<size_t>(v)] != -2) continue;
                            std::int64_t lower = dir > 0 ? u : v;
                            if (!grid.has_edge(lower, ax)) continue;
                            std::int64_t w = scaled(grid.weight(lower, ax));
                            if (g1[i][static_cast<size_t>(u)] + w != g1[i][static_cast<size_t>(v)]) continue;
                            if (g1[i][static_cast<size_t>(v)] + g2[j][static_cast<size_t>(v)] != T) continue;
                            par[static_cast<size_t>(v)] = u;
                            dq.push_back(v);
                        }
                }
                if (par[static_cast<size_t>(x2i)] != -2) {
                    std::vector<LatticePoint> rev;
                    for (std::int64_t cur = x2i; cur >= 0; cur = par[static_cast<size_t>(cur)])
                        rev.push_back(idx.point(cur));
                    std::reverse(rev.begin(), rev.end());
                    Path bad(std::move(rev));
                    for (const auto& vtx : bad.v)
                        require(vtx != z, ErrorCode::InternalError, "avoidance witness visits the joint");
                    record_violation(bad, i, j, f1[i].at(x2i));
                    break;
                }
            }
        }
    }

    rep.verified = !rep.counterexample.has_value();
    rep.statistics["pairs"] = static_cast<double>(pairs);
    rep.statistics["expensive_edges"] = static_cast<double>(expensive.size());
    rep.statistics["traversal_checks"] = static_cast<double>(traversal_checks);
    rep.statistics["box_vertices"] = static_cast<double>(idx.count);
    rep.statistics["cheap_diameter"] = static_cast<double>(diam);
    if (!expensive.empty() && pairs > 0) rep.statistics["min_expensive_slack"] = min_slack;
    return rep;
}

// Greedy downward search for the smallest box parameters that still verify.
// Only the box ordering is preserved; the proof-scale gap inequalities are
// intentionally dropped, since they are sufficient but not necessary.
struct MinimalFunnelingResult {
    SkewBoxParams params;
    GadgetReport report;  // report for the final, minimal parameters
    int shrink_steps = 0;
};

inline MinimalFunnelingResult minimal_funneling_params(const SkewBoxParams& start) {
    SkewBoxParams cur = start;
    SkewBoxGadget g = skew_box_config(cur);
    GadgetReport rep = verify_funneling(g.cfg, g.cheap, cur);
    require(rep.verified, ErrorCode::VerificationFailed, "starting parameters fail verification");
    int steps = 0;
    bool progress = true;
    while (progress) {
        progress = false;
        // Shrink preference: far face first, then side half-width, then the
        // near face; p stays fixed.
        for (int field = 0; field < 3 && !progress; ++field) {
            SkewBoxParams cand = cur;
            if (field == 0) {
                if (cand.q_prime <= cand.r + 1) continue;
                cand.q_prime -= 1;
            } else if (field == 1) {
                if (cand.r <= cand.q + 1) continue;
                cand.r -= 1;
            } else {
                if (cand.q <= cand.p + 1) continue;
                cand.q -= 1;
            }
            SkewBoxGadget cg = skew_box_config(cand);
            GadgetReport crep = verify_funneling(cg.cfg, cg.cheap, cand);
            if (crep.verified) {
                cur = cand;
                rep = std::move(crep);
                ++steps;
                progress = true;
            }
        }
    }
    return MinimalFunnelingResult{cur, std::move(rep), steps};
}

// ---------------------------------------------------------------------------
// Alternating BFS-tree gadget (vector values).  The skeleton is the same
// shell-segment-shell graph; a breadth-first tree rooted at the inner joint
// endpoint carries values alternating between the two alphabet vectors, with
// the alternation phase flipped on the branch heading through the joint.
// ---------------------------------------------------------------------------

namespace detail {

struct SkeletonTree {
    std::set<Edge> skeleton;
    LatticePoint root;
    std::vector<LatticePoint> order;  // BFS visit order; order[0] == root
    std::unordered_map<LatticePoint, int, LatticePointHash> id;
    std::vector<int> parent;    // -1 at the root
    std::vector<int> depth;
    std::vector<char> via_joint;  // branch passes through (p+1) e1
};

// Deterministic BFS over the skeleton, lexicographic neighbour order.
inline SkeletonTree build_skeleton_tree(int d, Coord p, Coord q, Coord r, Coord q_prime) {
    SkeletonTree t;
    t.skeleton = skew_cheap_edges(d, p, q, r, q_prime);
    t.root = axis_point(d, 0, p);
    std::map<LatticePoint, std::vector<LatticePoint>> adj;
    for (const Edge& e : t.skeleton) {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
    }
    for (auto& [u, nb] : adj) std::sort(nb.begin(), nb.end());
    const LatticePoint joint = axis_point(d, 0, p + 1);
    std::deque<int> dq;
    auto add = [&](const LatticePoint& v, int par, bool via) {
        int idv = static_cast<int>(t.order.size());
        t.order.push_back(v);
        t.id.emplace(v, idv);
        t.parent.push_back(par);
        t.depth.push_back(par < 0 ? 0 : t.depth[static_cast<size_t>(par)] + 1);
        t.via_joint.push_back(via ? 1 : 0);
        dq.push_back(idv);
    };
    add(t.root, -1, false);
    while (!dq.empty()) {
        int u = dq.front();
        dq.pop_front();
        LatticePoint pu = t.order[static_cast<size_t>(u)];
        for (const auto& v : adj.at(pu)) {
            if (t.id.count(v)) continue;
            bool via = t.via_joint[static_cast<size_t>(u)] != 0 ||
                       (t.depth[static_cast<size_t>(u)] == 0 && v == joint);
            add(v, u, via);
        }
    }
    return t;
}

// Vertex chain from ancestor `anc` down to `v` (both inclusive).
inline Path tree_chain(const SkeletonTree& t, int anc, int v) {
    std::vector<LatticePoint> rev;
    int cur = v;
    while (true) {
        rev.push_back(t.order[static_cast<size_t>(cur)]);
        if (cur == anc) break;
        cur = t.parent[static_cast<size_t>(cur)];
        require(cur >= 0, ErrorCode::InternalError, "tree chain missed its ancestor");
    }
    std::reverse(rev.begin(), rev.end());
    return Path(std::move(rev));
}

}  // namespace detail

struct HilbertFunnelGadget {
    Configuration cfg;
    std::set<Edge> skeleton;
    std::vector<Edge> tree_edges;
    LatticePoint root;
    double mu = 0;      // max(0, (a,b) / ||b||^2)
    double lambda = 0;  // sqrt(3/4 + mu/4) < 1
};

inline HilbertFunnelGadget bfs_alternating_config(const SkewBoxParams& P, const VectorValue& a,
                                                  const VectorValue& b) {
    P.validate_geometry();
    require(!a.empty() && a.size() == b.size(), ErrorCode::DimensionMismatch,
            "alphabet vectors must share one dimension");
    RatVec ra = rat_vec(a), rb = rat_vec(b);
    require(rat_norm_sq(ra) > 0 && rat_norm_sq(rb) > 0, ErrorCode::InvalidParams,
            "alphabet vectors must be nonzero");
    if (ra == rb || is_ray_contained(vector_set_from_doubles({a, b})))
        raise(ErrorCode::RayContained, "a and b must not be positive multiples of each other");
    require(rat_norm_sq(ra) <= rat_norm_sq(rb), ErrorCode::InvalidParams, "expected ||a|| <= ||b||");

    detail::SkeletonTree T = detail::build_skeleton_tree(P.d, P.p, P.q, P.r, P.q_prime);
    Configuration cfg(P.d, PassageValue(b));
    std::vector<Edge> tree_edges;
    for (size_t i = 1; i < T.order.size(); ++i) {
        Edge e = canonical_edge(T.order[static_cast<size_t>(T.parent[i])], T.order[i]);
        bool odd = (T.depth[i] % 2) == 1;
        bool via = T.via_joint[i] != 0;
        const VectorValue& val = via ? (odd ? b : a) : (odd ? a : b);
        cfg.set_value(e, PassageValue(val));
        tree_edges.push_back(e);
    }
    cfg.set_value_set(ValueSet::finite_vector({a, b}));
    Rational mu_r = rat_dot(ra, rb) / rat_norm_sq(rb);
    double mu = std::max(0.0, to_double(mu_r));
    return HilbertFunnelGadget{std::move(cfg),   std::move(T.skeleton), std::move(tree_edges),
                               T.root,           mu,                    std::sqrt(0.75 + mu / 4.0)};
}

// Re-derives the tree from the parameters and the two alphabet vectors from
// the configuration, then checks:
//   (i)  every monotone (ancestor-to-descendant) tree path of length >= 2 has
//        passage time at most lambda * length * ||b||, and
//   (ii) for every pair (x1, x2) with x1 in dK1 u [p e1, (q-1) e1] and x2 in
//        [(p+1) e1, q e1] u dK2, the unique tree route (which is l1-optimal
//        within the cheap set) is strictly faster than the best competitor
//        using only non-skeleton edges (all of which carry b, so a competitor
//        of L edges costs exactly L * ||b||), and obeys the lambda bound.
// Pairs whose competitor enumeration would exceed the length cap raise
// CapTooSmall rather than silently passing.
inline GadgetReport verify_funneling_h(const Configuration& cfg, const SkewBoxParams& P,
                                       int length_cap) {
    P.validate_geometry();
    require(cfg.dim() == P.d, ErrorCode::DimensionMismatch, "configuration dimension");
    detail::VectorAlphabet A = detail::make_alphabet(cfg);
    require(A.exact.size() == 2, ErrorCode::InvalidParams, "expected a two-letter alphabet");
    // b is the letter carried off the skeleton: the configuration default.
    const size_t ib = static_cast<size_t>(A.index_of(as_vector(cfg.default_value())));
    const size_t ia = 1 - ib;
    const RatVec& rb = A.exact[ib];
    require(rat_norm_sq(A.exact[ia]) <= rat_norm_sq(rb), ErrorCode::InvalidParams,
            "tree letter must not outweigh the default letter");
    const Rational nb2 = rat_norm_sq(rb);
    const double bnorm = std::sqrt(to_double(nb2));
    Rational mu_r = rat_dot(A.exact[ia], rb) / nb2;
    const double mu = std::max(0.0, to_double(mu_r));
    const double lambda = std::sqrt(0.75 + mu / 4.0);

    GadgetReport rep;
    rep.claim = "funnel-h";

    detail::SkeletonTree T = detail::build_skeleton_tree(P.d, P.p, P.q, P.r, P.q_prime);

    // Root-prefix passage vectors along the tree, read from the configuration.
    const size_t k = rb.size();
    std::vector<RatVec> pre(T.order.size(), RatVec(k, Rational(0)));
    for (size_t i = 1; i < T.order.size(); ++i) {
        RatVec v = rat_vec(cfg.vector_value(
            canonical_edge(T.order[static_cast<size_t>(T.parent[i])], T.order[i])));
        pre[i] = pre[static_cast<size_t>(T.parent[i])];
        for (size_t j = 0; j < k; ++j) pre[i][j] += v[j];
    }

    // Verification box: the outer box padded by two; every non-skeleton edge
    // inside it must carry b exactly, or the competitor bound is meaningless.
    Box box = P.k2();
    for (int i = 0; i < P.d; ++i) {
        box.lo[i] -= 2;
        box.hi[i] += 2;
    }
    BoxIndexer idx(box);
    for (std::int64_t ix = 0; ix < idx.count; ++ix) {
        LatticePoint u = idx.point(ix);
        for (int ax = 0; ax < P.d; ++ax) {
            if (u[ax] == box.hi[ax]) continue;
            LatticePoint v = u;
            v[ax] += 1;
            Edge e = canonical_edge(u, v);
            if (T.skeleton.count(e)) continue;
            require(rat_vec(cfg.vector_value(e)) == rb, ErrorCode::PreconditionFailed,
                    "non-skeleton edges in the verification box must carry b");
        }
    }

    // (i) contraction bound over ancestor-descendant tree paths.
    double contraction_max = 0;
    std::int64_t tree_paths = 0;
    for (size_t v = 0; v < T.order.size() && !rep.counterexample; ++v) {
        int u = T.parent[v];
        if (u >= 0) u = T.parent[static_cast<size_t>(u)];
        for (; u >= 0; u = T.parent[static_cast<size_t>(u)]) {
            ++tree_paths;
            int len = T.depth[v] - T.depth[static_cast<size_t>(u)];
            RatVec diff(k);
            for (size_t j = 0; j < k; ++j) diff[j] = pre[v][j] - pre[static_cast<size_t>(u)][j];
            double tau = std::sqrt(to_double(rat_norm_sq(diff)));
            double bound = lambda * static_cast<double>(len) * bnorm;
            contraction_max = std::max(contraction_max, tau / bound);
            if (tau > bound + kTauCmp) {
                Path bad = detail::tree_chain(T, u, static_cast<int>(v));
                rep.counterexample = std::make_pair(bad, bad);
                break;
            }
        }
    }

    // (ii) tree route vs expensive-only competitors, over the funneling pairs.
    std::vector<LatticePoint> X1 = detail::box_surface_vertices(P.k1());
    for (Coord t = P.p; t < P.q; ++t) X1.push_back(axis_point(P.d, 0, t));
    std::vector<LatticePoint> X2;
    for (Coord t = P.p + 1; t <= P.q; ++t) X2.push_back(axis_point(P.d, 0, t));
    for (auto& v : detail::box_surface_vertices(P.k2())) X2.push_back(v);
    auto dedupe = [](std::vector<LatticePoint>& pts) {
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    };
    dedupe(X1);
    dedupe(X2);
    for (const auto& x1 : X1)
        for (const auto& x2 : X2)
            require(length_cap >= l1_dist(x1, x2), ErrorCode::CapTooSmall,
                    "length cap below a pair distance");

    double min_margin = std::numeric_limits<double>::infinity();
    std::int64_t pairs = 0;
    for (size_t i = 0; i < X1.size() && !rep.counterexample; ++i) {
        // Edge-count BFS from x1 over non-skeleton edges only.
        std::vector<std::int64_t> dist(static_cast<size_t>(idx.count), -1), par(dist);
        std::int64_t x1i = idx.index(X1[i]);
        dist[static_cast<size_t>(x1i)] = 0;
        par[static_cast<size_t>(x1i)] = -2;
        std::deque<std::int64_t> dq{x1i};
        while (!dq.empty()) {
            std::int64_t u = dq.front();
            dq.pop_front();
            LatticePoint pu = idx.point(u);
            for (int ax = 0; ax < P.d; ++ax)
                for (int dir : {+1, -1}) {
                    LatticePoint pv = pu;
                    pv[ax] += dir;
                    if (!box.contains(pv)) continue;
                    if (T.skeleton.count(canonical_edge(pu, pv))) continue;
                    std::int64_t v = idx.index(pv);
                    if (dist[static_cast<size_t>(v)] >= 0) continue;
                    dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
                    par[static_cast<size_t>(v)] = u;
                    dq.push_back(v);
                }
        }
        int u1 = T.id.at(X1[i]);
        for (size_t j = 0; j < X2.size() && !rep.counterexample; ++j) {
            if (X1[i] == X2[j]) continue;
            ++pairs;
            int u2 = T.id.at(X2[j]);
            // Tree passage vector via the lowest common ancestor.
            int x = u1, y = u2;
            while (T.depth[static_cast<size_t>(x)] > T.depth[static_cast<size_t>(y)])
                x = T.parent[static_cast<size_t>(x)];
            while (T.depth[static_cast<size_t>(y)] > T.depth[static_cast<size_t>(x)])
                y = T.parent[static_cast<size_t>(y)];
            while (x != y) {
                x = T.parent[static_cast<size_t>(x)];
                y = T.parent[static_cast<size_t>(y)];
            }
            int len = T.depth[static_cast<size_t>(u1)] + T.depth[static_cast<size_t>(u2)] -
                      2 * T.depth[static_cast<size_t>(x)];
            RatVec tv(k);
            for (size_t t = 0; t < k; ++t)
                tv[t] = pre[static_cast<size_t>(u1)][t] + pre[static_cast<size_t>(u2)][t] -
                        2 * pre[static_cast<size_t>(x)][t];
            Rational tree_nsq = rat_norm_sq(tv);
            double tau = std::sqrt(to_double(tree_nsq));
            // Reference witness: the tree route, realized through the ancestor.
            auto tree_route = [&]() {
                Path up = detail::tree_chain(T, x, u1);
                Path down = detail::tree_chain(T, x, u2);
                std::vector<LatticePoint> route(up.v.rbegin(), up.v.rend());
                for (size_t t = 1; t < down.v.size(); ++t) route.push_back(down.v[t]);
                return Path(std::move(route));
            };
            if (len >= 2) {
                double bound = lambda * static_cast<double>(len) * bnorm;
                contraction_max = std::max(contraction_max, tau / bound);
                if (tau > bound + kTauCmp) {
                    Path bad = tree_route();
                    rep.counterexample = std::make_pair(bad, bad);
                    break;
                }
            }
            std::int64_t L = dist[static_cast<size_t>(idx.index(X2[j]))];
            require(L >= 0, ErrorCode::InternalError, "competitor search found no route");
            require(L <= length_cap, ErrorCode::CapTooSmall,
                    "competitor enumeration exceeds the length cap");
            double margin = static_cast<double>(L) * bnorm - tau;
            min_margin = std::min(min_margin, margin);
            if (!(Rational(L * L) * nb2 > tree_nsq) || margin <= kTauCmp) {
                std::vector<LatticePoint> rev;
                for (std::int64_t cur = idx.index(X2[j]); cur >= 0; cur = par[static_cast<size_t>(cur)])
                    rev.push_back(idx.point(cur));
                std::reverse(rev.begin(), rev.end());
                rep.counterexample = std::make_pair(Path(std::move(rev)), tree_route());
            }
        }
    }

    rep.verified = !rep.counterexample.has_value();
    rep.statistics["pairs"] = static_cast<double>(pairs);
    rep.statistics["tree_paths"] = static_cast<double>(tree_paths);
    rep.statistics["contraction_max_ratio"] = contraction_max;
    if (pairs > 0) rep.statistics["min_margin"] = min_margin;
    rep.statistics["lambda"] = lambda;
    rep.statistics["mu"] = mu;
    return rep;
}

// ---------------------------------------------------------------------------
// Exact count-state search utilities for small vector alphabets.  A walk's
// passage vector depends only on how many edges of each letter it crosses, so
// states (vertex, letter counts) capture everything; letter counts pack into
// a 64-bit key.
// ---------------------------------------------------------------------------

namespace detail {

struct CountGrid {
    VectorAlphabet A;
    BoxIndexer idx;
    int dim;
    size_t letters;
    std::vector<std::int8_t> letter;  // slot ix*dim + ax; -1 past the high face
    bool int_mode = false;
    std::int64_t den = 1;                // common denominator of the Gram matrix
    std::vector<std::int64_t> igram;     // den-scaled Gram entries (int mode)
    std::vector<Rational> gram;

    CountGrid(const Configuration& cfg, const Box& box)
        : A(make_alphabet(cfg)), idx(box), dim(box.dim()), letters(A.exact.size()) {
        require(letters <= 5, ErrorCode::InvalidParams, "count search supports at most 5 letters");
        require(idx.count < (std::int64_t(1) << (62 - 8 * static_cast<int>(letters))),
                ErrorCode::InvalidParams, "box too large for packed count states");
        letter.assign(static_cast<size_t>(idx.count) * static_cast<size_t>(dim), -1);
        for (std::int64_t ix = 0; ix < idx.count; ++ix) {
            LatticePoint p = idx.point(ix);
            for (int ax = 0; ax < dim; ++ax) {
                if (p[ax] == box.hi[ax]) continue;
                LatticePoint q = p;
                q[ax] += 1;
                letter[static_cast<size_t>(ix) * static_cast<size_t>(dim) + static_cast<size_t>(ax)] =
                    static_cast<std::int8_t>(A.index_of(cfg.vector_value(canonical_edge(p, q))));
            }
        }
        gram.resize(letters * letters);
        Integer den_acc = 1;
        for (size_t i = 0; i < letters; ++i)
            for (size_t j = 0; j < letters; ++j) {
                gram[i * letters + j] = rat_dot(A.exact[i], A.exact[j]);
                den_acc = int_lcm(den_acc, rat_den(gram[i * letters + j]));
            }
        Integer maxg = 0;
        for (const auto& g : gram) {
            Integer n = rat_num(g * Rational(den_acc, 1));
            if (n < 0) n = -n;
            if (n > maxg) maxg = n;
        }
        if (den_acc <= (Integer(1) << 30) &&
            maxg * Integer(250) * Integer(250) * Integer(static_cast<int>(letters * letters)) <
                (Integer(1) << 62)) {
            int_mode = true;
            den = to_int64(den_acc);
            igram.resize(letters * letters);
            for (size_t t = 0; t < gram.size(); ++t)
                igram[t] = to_int64(rat_num(gram[t] * Rational(den, 1)));
        }
    }

    std::int8_t letter_at(std::int64_t ix, int ax) const {
        return letter[static_cast<size_t>(ix) * static_cast<size_t>(dim) + static_cast<size_t>(ax)];
    }

    Rational nsq(const std::array<std::uint8_t, 5>& c) const {
        if (int_mode) {
            std::int64_t s = 0;
            for (size_t i = 0; i < letters; ++i)
                for (size_t j = 0; j < letters; ++j)
                    s += igram[i * letters + j] * static_cast<std::int64_t>(c[i]) *
                         static_cast<std::int64_t>(c[j]);
            return Rational(s, den);
        }
        Rational s = 0;
        for (size_t i = 0; i < letters; ++i)
            for (size_t j = 0; j < letters; ++j)
                s += gram[i * letters + j] * Rational(static_cast<int>(c[i]) * static_cast<int>(c[j]));
        return s;
    }
};

struct HMinField {
    std::vector<char> reached;
    std::vector<Rational> min_nsq;  // meaningful where reached
};

// Exact min ||v(walk)||^2 from src to every box vertex over walks of length
// <= cap, by layered expansion of (vertex, counts) states.
inline HMinField h_min_field(const CountGrid& g, const LatticePoint& src, int cap) {
    require(cap >= 0 && cap <= 250, ErrorCode::InvalidParams, "count search cap out of range");
    require(g.idx.box.contains(src), ErrorCode::InvalidParams, "source outside the search box");
    const size_t nA = g.letters;
    const int shift = 8 * static_cast<int>(nA);
    auto pack = [&](std::int64_t vix, const std::array<std::uint8_t, 5>& c) {
        std::uint64_t key = static_cast<std::uint64_t>(vix) << shift;
        for (size_t i = 0; i < nA; ++i) key |= static_cast<std::uint64_t>(c[i]) << (8 * i);
        return key;
    };

    struct State {
        std::int64_t vix;
        std::array<std::uint8_t, 5> c;
    };
    HMinField out;
    out.reached.assign(static_cast<size_t>(g.idx.count), 0);
    out.min_nsq.assign(static_cast<size_t>(g.idx.count), Rational(0));
    std::vector<std::int64_t> best_scaled;
    if (g.int_mode) best_scaled.assign(static_cast<size_t>(g.idx.count), std::numeric_limits<std::int64_t>::max());

    auto consider = [&](std::int64_t vix, const std::array<std::uint8_t, 5>& c) {
        if (g.int_mode) {
            std::int64_t s = 0;
            for (size_t i = 0; i < nA; ++i)
                for (size_t j = 0; j < nA; ++j)
                    s += g.igram[i * nA + j] * static_cast<std::int64_t>(c[i]) *
                         static_cast<std::int64_t>(c[j]);
            if (s < best_scaled[static_cast<size_t>(vix)]) {
                best_scaled[static_cast<size_t>(vix)] = s;
                out.reached[static_cast<size_t>(vix)] = 1;
            }
            return;
        }
        Rational s = g.nsq(c);
        if (!out.reached[static_cast<size_t>(vix)] || s < out.min_nsq[static_cast<size_t>(vix)]) {
            out.reached[static_cast<size_t>(vix)] = 1;
            out.min_nsq[static_cast<size_t>(vix)] = s;
        }
    };

    std::unordered_set<std::uint64_t> seen;
    std::vector<State> frontier{State{g.idx.index(src), {}}};
    seen.insert(pack(frontier[0].vix, frontier[0].c));
    consider(frontier[0].vix, frontier[0].c);
    for (int len = 0; len < cap && !frontier.empty(); ++len) {
        std::vector<State> next;
        for (const auto& st : frontier) {
            LatticePoint pu = g.idx.point(st.vix);
            for (int ax = 0; ax < g.dim; ++ax)
                for (int dir : {+1, -1}) {
                    LatticePoint pv = pu;
                    pv[ax] += dir;
                    if (!g.idx.box.contains(pv)) continue;
                    std::int64_t lower_ix = dir > 0 ? st.vix : g.idx.index(pv);
                    std::int8_t li = g.letter_at(lower_ix, ax);
                    if (li < 0) continue;
                    State ns = st;
                    ns.vix = g.idx.index(pv);
                    ns.c[static_cast<size_t>(li)] += 1;
                    std::uint64_t key = pack(ns.vix, ns.c);
                    if (!seen.insert(key).second) continue;
                    consider(ns.vix, ns.c);
                    next.push_back(ns);
                }
        }
        frontier = std::move(next);
    }
    if (g.int_mode)
        for (std::int64_t ix = 0; ix < g.idx.count; ++ix)
            if (out.reached[static_cast<size_t>(ix)])
                out.min_nsq[static_cast<size_t>(ix)] = Rational(best_scaled[static_cast<size_t>(ix)], g.den);
    return out;
}

// Exact passage vector of a path, read from the configuration.
inline RatVec path_vector_exact(const Configuration& cfg, const Path& p, size_t k) {
    RatVec v(k, Rational(0));
    for (size_t i = 0; i < p.edge_count(); ++i) {
        RatVec e = rat_vec(cfg.vector_value(p.edge(i)));
        for (size_t j = 0; j < k; ++j) v[j] += e[j];
    }
    return v;
}

// All walks (raw vertex sequences, revisits allowed) from x to y of length
// <= cap whose exact squared passage norm equals opt_nsq.  For positive
// alphabets, prefixes are pruned once they exceed the optimum.
inline std::vector<Path> enumerate_optimal_walks_h(const CountGrid& g, const LatticePoint& x,
                                                   const LatticePoint& y, int cap,
                                                   const Rational& opt_nsq,
                                                   std::int64_t* nodes_out = nullptr) {
    std::vector<Path> out;
    std::vector<LatticePoint> stack{x};
    std::array<std::uint8_t, 5> counts{};
    std::int64_t nodes = 0;
    auto rec = [&](auto&& self, std::int64_t vix) -> void {
        ++nodes;
        if (stack.back() == y && g.nsq(counts) == opt_nsq) out.push_back(Path(stack));
        if (static_cast<int>(stack.size()) - 1 >= cap) return;
        if (g.A.positive && g.nsq(counts) > opt_nsq) return;
        LatticePoint pu = stack.back();
        for (int ax = 0; ax < g.dim; ++ax)
            for (int dir : {+1, -1}) {
                LatticePoint pv = pu;
                pv[ax] += dir;
                if (!g.idx.box.contains(pv)) continue;
                std::int64_t nix = g.idx.index(pv);
                std::int64_t lower_ix = dir > 0 ? vix : nix;
                std::int8_t li = g.letter_at(lower_ix, ax);
                if (li < 0) continue;
                counts[static_cast<size_t>(li)] += 1;
                stack.push_back(pv);
                self(self, nix);
                stack.pop_back();
                counts[static_cast<size_t>(li)] -= 1;
            }
    };
    rec(rec, g.idx.index(x));
    if (nodes_out) *nodes_out = nodes;
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Nested-path monotonicity counterexample: n cheap edges followed by one edge
// whose value points backwards, so the longer path has the smaller norm.
// ---------------------------------------------------------------------------

struct Lemma52Result {
    Configuration cfg;
    Path gamma1;  // the first n edges
    Path gamma2;  // gamma1 extended by one more edge
    int n = 0;
};

inline Lemma52Result lemma52_counterexample(const VectorValue& a, const VectorValue& b) {
    require(!a.empty() && a.size() == b.size(), ErrorCode::DimensionMismatch,
            "alphabet vectors must share one dimension");
    RatVec ra = rat_vec(a), rb = rat_vec(b);
    Rational dot = rat_dot(ra, rb);
    if (dot >= 0) raise(ErrorCode::NotNegative, "(a, b) must be negative");
    // Smallest n with 2 n (a,b) + ||b||^2 < 0.
    std::int64_t n = to_int64(rat_floor(rat_norm_sq(rb) / (Rational(-2) * dot))) + 1;
    Configuration cfg(1, PassageValue(b));
    for (std::int64_t i = 0; i < n; ++i)
        cfg.set_value(canonical_edge(LatticePoint{i}, LatticePoint{i + 1}), PassageValue(a));
    cfg.set_domain(make_box(LatticePoint{0}, LatticePoint{n + 1}));
    cfg.set_value_set(ValueSet::finite_vector({a, b}));
    std::vector<LatticePoint> v1, v2;
    for (std::int64_t i = 0; i <= n; ++i) v1.push_back(LatticePoint{i});
    v2 = v1;
    v2.push_back(LatticePoint{n + 1});
    return Lemma52Result{std::move(cfg), Path(std::move(v1)), Path(std::move(v2)),
                         static_cast<int>(n)};
}

inline GadgetReport verify_lemma52(const Lemma52Result& r) {
    GadgetReport rep;
    rep.claim = "lemma52";
    size_t k = rat_vec(r.cfg.vector_value(r.gamma1.edge(0))).size();
    Rational t1 = rat_norm_sq(detail::path_vector_exact(r.cfg, r.gamma1, k));
    Rational t2 = rat_norm_sq(detail::path_vector_exact(r.cfg, r.gamma2, k));
    rep.verified = t2 < t1;
    if (!rep.verified) rep.counterexample = std::make_pair(r.gamma2, r.gamma1);
    rep.statistics["n"] = static_cast<double>(r.n);
    rep.statistics["tau1_sq"] = to_double(t1);
    rep.statistics["tau2_sq"] = to_double(t2);
    return rep;
}

// ---------------------------------------------------------------------------
// Equal-norm geodesic failure on the 2x2 grid.  Twelve pinned edge values
// make the unique optimum from X to Y start with a non-optimal leg, and no
// walk between X and Y is a geodesic.
// ---------------------------------------------------------------------------

struct Lemma53EqualResult {
    Configuration cfg;
    LatticePoint X, Z, Y;
};

inline Lemma53EqualResult lemma53_equal_norm_config(const VectorValue& a, const VectorValue& b) {
    require(!a.empty() && a.size() == b.size(), ErrorCode::DimensionMismatch,
            "alphabet vectors must share one dimension");
    RatVec ra = rat_vec(a), rb = rat_vec(b);
    require(rat_norm_sq(ra) > 0, ErrorCode::InvalidParams, "alphabet vectors must be nonzero");
    require(rat_norm_sq(ra) == rat_norm_sq(rb), ErrorCode::NormMismatch,
            "expected ||a|| == ||b|| exactly");
    if (ra == rb || is_ray_contained(vector_set_from_doubles({a, b})))
        raise(ErrorCode::RayContained, "a and b must not be positive multiples of each other");

    Configuration cfg(2, PassageValue(b));
    auto E = [](Coord x1, Coord y1, Coord x2, Coord y2) {
        return canonical_edge(LatticePoint{x1, y1}, LatticePoint{x2, y2});
    };
    const Edge a_edges[] = {E(0, 0, 1, 0), E(1, 0, 1, 1), E(0, 1, 1, 1), E(1, 1, 1, 2),
                            E(1, 2, 2, 2)};
    const Edge b_edges[] = {E(0, 0, 0, 1), E(1, 0, 2, 0), E(2, 0, 2, 1), E(1, 1, 2, 1),
                            E(2, 1, 2, 2), E(0, 1, 0, 2), E(0, 2, 1, 2)};
    for (const Edge& e : a_edges) cfg.set_value(e, PassageValue(a));
    for (const Edge& e : b_edges) cfg.set_value(e, PassageValue(b));
    cfg.set_domain(make_box(LatticePoint{0, 0}, LatticePoint{2, 2}));
    cfg.set_value_set(ValueSet::finite_vector({a, b}));
    return Lemma53EqualResult{std::move(cfg), LatticePoint{0, 0}, LatticePoint{1, 1},
                              LatticePoint{2, 2}};
}

// Raw exhaustive verification on the 2x2 grid, cap 8: the optimum equals
// ||2a + 2b|| with every optimal walk carrying that exact vector, the first
// leg of the optimum is beatable, and no X -> Y walk is a geodesic.
inline GadgetReport verify_lemma53_equal(const Lemma53EqualResult& r) {
    GadgetReport rep;
    rep.claim = "lemma53-eq";
    const int cap = 8;
    require(r.cfg.domain().has_value(), ErrorCode::InvalidParams, "expected a boxed configuration");
    const Box box = *r.cfg.domain();
    auto E = [](Coord x1, Coord y1, Coord x2, Coord y2) {
        return canonical_edge(LatticePoint{x1, y1}, LatticePoint{x2, y2});
    };
    RatVec va = rat_vec(r.cfg.vector_value(E(0, 0, 1, 0)));
    RatVec vb = rat_vec(r.cfg.vector_value(E(0, 0, 0, 1)));
    const size_t k = va.size();
    RatVec target(k);
    for (size_t j = 0; j < k; ++j) target[j] = 2 * va[j] + 2 * vb[j];
    const Rational target_nsq = rat_norm_sq(target);

    // Raw enumeration of every walk from X (no dedup, no pruning), recording
    // per-vertex minima and all walks reaching Y.
    BoxIndexer idx(box);
    std::vector<char> reached(static_cast<size_t>(idx.count), 0);
    std::vector<Rational> min_from_x(static_cast<size_t>(idx.count), Rational(0));
    std::vector<std::pair<Path, RatVec>> to_y;
    std::int64_t walk_nodes = 0;
    {
        std::vector<LatticePoint> stack{r.X};
        RatVec sum(k, Rational(0));
        auto rec = [&](auto&& self) -> void {
            ++walk_nodes;
            std::int64_t ix = idx.index(stack.back());
            Rational nsq = rat_norm_sq(sum);
            if (!reached[static_cast<size_t>(ix)] || nsq < min_from_x[static_cast<size_t>(ix)]) {
                reached[static_cast<size_t>(ix)] = 1;
                min_from_x[static_cast<size_t>(ix)] = nsq;
            }
            if (stack.back() == r.Y) to_y.emplace_back(Path(stack), sum);
            if (static_cast<int>(stack.size()) - 1 >= cap) return;
            LatticePoint pu = stack.back();
            for (int ax = 0; ax < 2; ++ax)
                for (int dir : {+1, -1}) {
                    LatticePoint pv = pu;
                    pv[ax] += dir;
                    if (!box.contains(pv)) continue;
                    RatVec ev = rat_vec(r.cfg.vector_value(canonical_edge(pu, pv)));
                    for (size_t j = 0; j < k; ++j) sum[j] += ev[j];
                    stack.push_back(pv);
                    self(self);
                    stack.pop_back();
                    for (size_t j = 0; j < k; ++j) sum[j] -= ev[j];
                }
        };
        rec(rec);
    }
    require(!to_y.empty(), ErrorCode::Unreachable, "no walk reached Y");
    Rational opt = rat_norm_sq(to_y[0].second);
    for (const auto& [w, v] : to_y) {
        (void)w;
        opt = rat_min(opt, rat_norm_sq(v));
    }
    std::vector<const std::pair<Path, RatVec>*> optimal;
    for (const auto& entry : to_y)
        if (rat_norm_sq(entry.second) == opt) optimal.push_back(&entry);

    bool ok = true;
    auto fail_with = [&](const Path& bad) {
        if (ok) {
            ok = false;
            rep.counterexample = std::make_pair(bad, optimal.front()->first);
        }
    };

    // (1) the optimum is ||2a + 2b||, (2) every optimal walk carries exactly
    // that vector.
    if (opt != target_nsq) fail_with(optimal.front()->first);
    for (const auto* entry : optimal)
        if (entry->second != target) fail_with(entry->first);

    // (3) the straight first leg of the optimum is beatable: the best X -> Z
    // value lies strictly below ||2a||.
    RatVec two_a(k);
    for (size_t j = 0; j < k; ++j) two_a[j] = 2 * va[j];
    std::int64_t zi = idx.index(r.Z);
    if (!reached[static_cast<size_t>(zi)] || !(min_from_x[static_cast<size_t>(zi)] < rat_norm_sq(two_a)))
        fail_with(optimal.front()->first);

    // (4) no geodesic: a geodesic's full span is optimal, so only optimal
    // walks qualify; check their subpaths against exact count-state minima.
    detail::CountGrid grid(r.cfg, box);
    std::map<LatticePoint, detail::HMinField> fields;
    auto field_from = [&](const LatticePoint& s) -> const detail::HMinField& {
        auto it = fields.find(s);
        if (it == fields.end()) it = fields.emplace(s, detail::h_min_field(grid, s, cap)).first;
        return it->second;
    };
    for (const auto* entry : optimal) {
        const Path& w = entry->first;
        std::vector<RatVec> pre(w.v.size(), RatVec(k, Rational(0)));
        for (size_t i = 0; i + 1 < w.v.size(); ++i) {
            RatVec ev = rat_vec(r.cfg.vector_value(w.edge(i)));
            pre[i + 1] = pre[i];
            for (size_t j = 0; j < k; ++j) pre[i + 1][j] += ev[j];
        }
        bool geodesic = true;
        for (size_t i = 0; i + 1 < w.v.size() && geodesic; ++i)
            for (size_t j = i + 1; j < w.v.size() && geodesic; ++j) {
                RatVec diff(k);
                for (size_t t = 0; t < k; ++t) diff[t] = pre[j][t] - pre[i][t];
                if (rat_norm_sq(diff) > field_from(w.v[i]).min_nsq[static_cast<size_t>(idx.index(w.v[j]))])
                    geodesic = false;
            }
        if (geodesic) fail_with(w);
    }

    rep.verified = ok;
    rep.statistics["walk_nodes"] = static_cast<double>(walk_nodes);
    rep.statistics["walks_to_target"] = static_cast<double>(to_y.size());
    rep.statistics["optimal_walks"] = static_cast<double>(optimal.size());
    rep.statistics["optimum_nsq"] = to_double(opt);
    return rep;
}

// ---------------------------------------------------------------------------
// Unequal-norm geodesic failure.  A straight run of n_a heavy edges is beaten
// by an n_b-edge detour of light edges, the scale inequality that would make
// a geodesic possible provably fails, and a capped exhaustive search finds no
// geodesic between the far endpoints.
// ---------------------------------------------------------------------------

struct Lemma53UnequalResult {
    Configuration cfg;
    Path gamma1;  // straight run of a-edges
    Path gamma2;  // three-segment detour of b-edges around gamma1
    Path gamma3;  // continuation of b-edges up to Y
    std::string case_tag;  // fill-a or fill-b, per the projection test
    std::int64_t n_a = 0, n_b = 0;
    int M_eps = 0;
    LatticePoint X, Y;
};

inline Lemma53UnequalResult lemma53_unequal_norm_config(const VectorValue& a, const VectorValue& b,
                                                        int M_eps, int size_cap = 1000) {
    require(!a.empty() && a.size() == b.size(), ErrorCode::DimensionMismatch,
            "alphabet vectors must share one dimension");
    require(M_eps >= 1, ErrorCode::InvalidParams, "M_eps must be positive");
    RatVec ra = rat_vec(a), rb = rat_vec(b);
    const Rational na2 = rat_norm_sq(ra), nb2 = rat_norm_sq(rb);
    require(nb2 > 0, ErrorCode::InvalidParams, "b must be nonzero");
    require(na2 > nb2, ErrorCode::NormMismatch, "expected ||a|| > ||b||");
    if (is_ray_contained(vector_set_from_doubles({a, b})))
        raise(ErrorCode::RayContained, "a and b must not be positive multiples of each other");

    // Smallest even pair n_a < n_b with
    //   n_a^2 ||a||^2 > n_b^2 ||b||^2   and   n_a^2 ||a||^2 <= n_b^2 ||b||^2 (1 + 1/M)^2.
    const Rational M(M_eps);
    std::int64_t n_a = 0, n_b = 0;
    for (std::int64_t i = 2; i <= size_cap && n_a == 0; i += 2)
        for (std::int64_t j = i + 2; j <= size_cap; j += 2) {
            Rational lhs = Rational(i * i) * na2, rhs = Rational(j * j) * nb2;
            if (lhs > rhs && lhs * M * M <= rhs * (M + 1) * (M + 1)) {
                n_a = i;
                n_b = j;
                break;
            }
        }
    if (n_a == 0) raise(ErrorCode::NoEvenPair, "no admissible even pair below the size cap");

    const Coord h = (n_b - n_a) / 2;
    LatticePoint X{0, 0}, P1{n_a, 0}, Y{n_a, 3 * n_b};
    std::vector<LatticePoint> v1, v2, v3;
    for (Coord i = 0; i <= n_a; ++i) v1.push_back(LatticePoint{i, 0});
    v2.push_back(X);
    for (Coord i = 1; i <= h; ++i) v2.push_back(LatticePoint{0, -i});
    for (Coord i = 1; i <= n_a; ++i) v2.push_back(LatticePoint{i, -h});
    for (Coord i = h - 1; i >= 0; --i) v2.push_back(LatticePoint{n_a, -i});
    for (Coord j = 0; j <= 3 * n_b; ++j) v3.push_back(LatticePoint{n_a, j});
    Path gamma1(std::move(v1)), gamma2(std::move(v2)), gamma3(std::move(v3));

    // Fill rule: where the origin projects onto the segment mixing t copies
    // of a with S - t copies of b decides which letter floods the rest.
    const Rational S(3 * n_b + n_a);
    const Rational dot = rat_dot(ra, rb);
    RatVec amb(ra.size());
    for (size_t j = 0; j < ra.size(); ++j) amb[j] = ra[j] - rb[j];
    const Rational t0 = S * (nb2 - dot) / rat_norm_sq(amb);
    const bool fill_b = t0 >= Rational(n_a);

    Configuration cfg(2, PassageValue(fill_b ? b : a));
    for (size_t i = 0; i < gamma1.edge_count(); ++i) cfg.set_value(gamma1.edge(i), PassageValue(a));
    for (size_t i = 0; i < gamma2.edge_count(); ++i) cfg.set_value(gamma2.edge(i), PassageValue(b));
    for (size_t i = 0; i < gamma3.edge_count(); ++i) cfg.set_value(gamma3.edge(i), PassageValue(b));
    std::vector<LatticePoint> all = gamma1.v;
    all.insert(all.end(), gamma2.v.begin(), gamma2.v.end());
    all.insert(all.end(), gamma3.v.begin(), gamma3.v.end());
    cfg.set_domain(bounding_box(all, 2));
    cfg.set_value_set(ValueSet::finite_vector({a, b}));
    return Lemma53UnequalResult{std::move(cfg), std::move(gamma1), std::move(gamma2),
                                std::move(gamma3), fill_b ? "fill-b" : "fill-a",
                                n_a,              n_b,
                                M_eps,            X,
                                Y};
}

inline GadgetReport verify_lemma53_unequal(const Lemma53UnequalResult& r, int length_cap) {
    GadgetReport rep;
    rep.claim = "lemma53-neq";
    require(r.cfg.domain().has_value(), ErrorCode::InvalidParams, "expected a boxed configuration");
    const Box box = *r.cfg.domain();
    require(length_cap >= l1_dist(r.X, r.Y), ErrorCode::CapTooSmall,
            "length cap below the endpoint distance");

    RatVec va = rat_vec(r.cfg.vector_value(r.gamma1.edge(0)));
    RatVec vb = rat_vec(r.cfg.vector_value(r.gamma2.edge(0)));
    const size_t k = va.size();
    const Rational na2 = rat_norm_sq(va), nb2 = rat_norm_sq(vb);
    const Rational dot = rat_dot(va, vb);

    bool ok = true;
    auto fail_with = [&](const Path& bad, const Path& ref) {
        if (ok) {
            ok = false;
            rep.counterexample = std::make_pair(bad, ref);
        }
    };

    // (1) the straight run is strictly beaten by its detour.
    Rational t1 = rat_norm_sq(detail::path_vector_exact(r.cfg, r.gamma1, k));
    Rational t2 = rat_norm_sq(detail::path_vector_exact(r.cfg, r.gamma2, k));
    if (!(t2 < t1)) fail_with(r.gamma2, r.gamma1);

    // (2) the scale inequality 6 < 6 mu + (2 + 6 mu)/M + 1/M^2 must fail for
    // the chosen M, with mu the exact cosine between a and b.
    {
        const Rational M(r.M_eps);
        const Rational L = Rational(6) - Rational(2) / M - Rational(1) / (M * M);
        bool fails = true;
        if (dot > 0) {
            const Rational c = Rational(6) * (M + 1) / M;
            fails = L * L * na2 * nb2 >= c * c * dot * dot;
        }
        if (!fails) fail_with(r.gamma1, r.gamma2);
        rep.statistics["scale_gap"] =
            to_double(L) - 6.0 * std::max(0.0, to_double(dot)) /
                               std::sqrt(to_double(na2) * to_double(nb2)) * (1.0 + 1.0 / r.M_eps);
    }

    // (3) capped exhaustive geodesic search: grow walks from X keeping every
    // contiguous subpath exactly optimal; reaching Y would exhibit a geodesic.
    detail::CountGrid grid(r.cfg, box);
    std::map<LatticePoint, detail::HMinField> fields;
    auto field_from = [&](const LatticePoint& s) -> const detail::HMinField& {
        auto it = fields.find(s);
        if (it == fields.end())
            it = fields.emplace(s, detail::h_min_field(grid, s, length_cap)).first;
        return it->second;
    };
    std::int64_t dfs_nodes = 0;
    {
        std::vector<LatticePoint> stack{r.X};
        std::vector<RatVec> pre{RatVec(k, Rational(0))};
        auto rec = [&](auto&& self) -> void {
            ++dfs_nodes;
            require(dfs_nodes < 20'000'000, ErrorCode::InternalError,
                    "geodesic search budget exceeded");
            if (!ok) return;
            if (stack.back() == r.Y && stack.size() > 1) {
                fail_with(Path(stack), r.gamma2);
                return;
            }
            if (static_cast<int>(stack.size()) - 1 >= length_cap) return;
            LatticePoint pu = stack.back();
            for (int ax = 0; ax < 2 && ok; ++ax)
                for (int dir : {+1, -1}) {
                    if (!ok) break;
                    LatticePoint pv = pu;
                    pv[ax] += dir;
                    if (!box.contains(pv)) continue;
                    RatVec ev = rat_vec(r.cfg.vector_value(canonical_edge(pu, pv)));
                    RatVec npre = pre.back();
                    for (size_t j = 0; j < k; ++j) npre[j] += ev[j];
                    // Every new suffix subpath must stay exactly optimal.
                    bool geodesic_prefix = true;
                    for (size_t i = 0; i < stack.size() && geodesic_prefix; ++i) {
                        RatVec diff(k);
                        for (size_t j = 0; j < k; ++j) diff[j] = npre[j] - pre[i][j];
                        const auto& f = field_from(stack[i]);
                        std::int64_t tix = grid.idx.index(pv);
                        if (!f.reached[static_cast<size_t>(tix)] ||
                            rat_norm_sq(diff) > f.min_nsq[static_cast<size_t>(tix)])
                            geodesic_prefix = false;
                    }
                    if (!geodesic_prefix) continue;
                    stack.push_back(pv);
                    pre.push_back(std::move(npre));
                    self(self);
                    pre.pop_back();
                    stack.pop_back();
                }
        };
        rec(rec);
    }

    rep.verified = ok;
    rep.statistics["n_a"] = static_cast<double>(r.n_a);
    rep.statistics["n_b"] = static_cast<double>(r.n_b);
    rep.statistics["tau1_sq"] = to_double(t1);
    rep.statistics["tau2_sq"] = to_double(t2);
    rep.statistics["dfs_nodes"] = static_cast<double>(dfs_nodes);
    rep.statistics["fields_built"] = static_cast<double>(fields.size());
    return rep;
}

inline GadgetReport verify_lemma53_unequal(const Lemma53UnequalResult& r) {
    return verify_lemma53_unequal(r, static_cast<int>(l1_dist(r.X, r.Y)) + 4);
}

// ---------------------------------------------------------------------------
// No-geodesic-ray neighbourhood.  On the three-letter alphabet
// {(1,0), (0,1), (0,2)}, the outer joint of the skew-box skeleton receives a
// hand-coded value patch on the l1-ball of radius 7 to its right, tuned so
// that every unit-sphere multiple-of-six target admits optimal paths but no
// geodesic: each optimal path's first 2 or first 4 steps are beatable.
// ---------------------------------------------------------------------------

namespace detail {

// Patch tables in local coordinates u = x - q >= 0, v = |y|; mirrored across
// v = 0.  Horizontal edge (u,v)-(u+1,v): row v = 0 is all 'a', rows v >= 1
// index kNoRayHoriz[v-1][u].  Vertical edge (u,v)-(u,v+1), u >= 1 (u = 0 is
// the shell face and stays b): kNoRayVert[u-1][v].
inline const char* no_ray_horiz_row(int v) {
    static const char* rows[6] = {"babaaa", "abaaa", "bbba", "abb", "bb", "b"};
    return rows[v - 1];
}

inline const char* no_ray_vert_col(int u) {
    static const char* cols[6] = {"ababba", "bbbbb", "aaab", "bab", "ab", "a"};
    return cols[u - 1];
}

inline char no_ray_horiz(int u, int v) { return v == 0 ? 'a' : no_ray_horiz_row(v)[u]; }
inline char no_ray_vert(int u, int v) { return no_ray_vert_col(u)[v]; }

}  // namespace detail

inline Configuration no_ray_config(Coord q) {
    require(q >= 8, ErrorCode::InvalidParams,
            "need q >= 8 so the patch clears the joint and stays on the shell face");
    const VectorValue a{1.0, 0.0}, b{0.0, 1.0}, b2{0.0, 2.0};
    const Coord p = 1, r = q + 1, q_prime = q + 2;
    Configuration cfg(2, PassageValue(b2));
    for (const Edge& e : detail::skew_cheap_edges(2, p, q, r, q_prime))
        cfg.set_value(e, PassageValue(b));
    // D_7 patch right of q e1, mirror symmetric across the axis.
    for (Coord u = 0; u <= 6; ++u)
        for (Coord v = -7; v <= 7; ++v) {
            if (u + 1 + std::abs(v) <= 7) {
                char c = detail::no_ray_horiz(static_cast<int>(u), static_cast<int>(std::abs(v)));
                cfg.set_value(canonical_edge(LatticePoint{q + u, v}, LatticePoint{q + u + 1, v}),
                              PassageValue(c == 'a' ? a : b));
            }
            if (u >= 1 && u + std::max(std::abs(v), std::abs(v + 1)) <= 7) {
                int vv = v >= 0 ? static_cast<int>(v) : static_cast<int>(-v - 1);
                char c = detail::no_ray_vert(static_cast<int>(u), vv);
                cfg.set_value(canonical_edge(LatticePoint{q + u, v}, LatticePoint{q + u, v + 1}),
                              PassageValue(c == 'a' ? a : b));
            }
        }
    cfg.set_value_set(ValueSet::finite_vector({a, b, b2}));
    return cfg;
}

inline GadgetReport verify_no_geodesic_ray(const Configuration& cfg, Coord q, int length_cap) {
    GadgetReport rep;
    rep.claim = "no-ray";
    const LatticePoint O{q, 0};
    std::vector<LatticePoint> targets;
    for (Coord j = 0; j <= 6; ++j) {
        Coord kk = 6 - j;
        targets.push_back(LatticePoint{q + j, kk});
        if (kk != 0) targets.push_back(LatticePoint{q + j, -kk});
    }
    for (const auto& t : targets)
        require(length_cap >= l1_dist(O, t), ErrorCode::CapTooSmall,
                "length cap below a target distance");

    const Box box = make_box(LatticePoint{q - 2, -8}, LatticePoint{q + 8, 8});
    detail::CountGrid grid(cfg, box);
    const size_t k = grid.A.exact[0].size();
    std::map<LatticePoint, detail::HMinField> fields;
    auto field_from = [&](const LatticePoint& s) -> const detail::HMinField& {
        auto it = fields.find(s);
        if (it == fields.end())
            it = fields.emplace(s, detail::h_min_field(grid, s, length_cap)).first;
        return it->second;
    };

    auto straight_path = [&](const LatticePoint& t) {
        std::vector<LatticePoint> verts{O};
        LatticePoint cur = O;
        for (int ax = 0; ax < 2; ++ax)
            while (cur[ax] != t[ax]) {
                cur[ax] += (t[ax] > cur[ax]) ? 1 : -1;
                verts.push_back(cur);
            }
        return Path(std::move(verts));
    };

    bool ok = true;
    std::int64_t optimal_total = 0, walk_nodes_total = 0, geodesics = 0, missing_witness = 0;
    double min_prefix_gap = std::numeric_limits<double>::infinity();

    for (const auto& t : targets) {
        if (!ok) break;
        const auto& f0 = field_from(O);
        std::int64_t tix = grid.idx.index(t);
        require(f0.reached[static_cast<size_t>(tix)] != 0, ErrorCode::Unreachable,
                "target unreachable in the search box");
        const Rational opt = f0.min_nsq[static_cast<size_t>(tix)];
        std::int64_t nodes = 0;
        std::vector<Path> walks = detail::enumerate_optimal_walks_h(grid, O, t, length_cap, opt, &nodes);
        walk_nodes_total += nodes;
        optimal_total += static_cast<std::int64_t>(walks.size());
        require(!walks.empty(), ErrorCode::InternalError, "optimum not realized by any walk");

        for (const Path& w : walks) {
            std::vector<RatVec> pre(w.v.size(), RatVec(k, Rational(0)));
            for (size_t i = 0; i + 1 < w.v.size(); ++i) {
                RatVec ev = rat_vec(cfg.vector_value(w.edge(i)));
                pre[i + 1] = pre[i];
                for (size_t j = 0; j < k; ++j) pre[i + 1][j] += ev[j];
            }
            // First 2 or first 4 steps must be beatable.
            auto prefix_beatable = [&](size_t steps) {
                if (w.edge_count() < steps) return false;
                Rational tau = rat_norm_sq(pre[steps]);
                const auto& opt_v = f0.min_nsq[static_cast<size_t>(grid.idx.index(w.v[steps]))];
                if (tau > opt_v)
                    min_prefix_gap = std::min(
                        min_prefix_gap, std::sqrt(to_double(tau)) - std::sqrt(to_double(opt_v)));
                return tau > opt_v;
            };
            bool witness = prefix_beatable(2) || prefix_beatable(4);
            // Full geodesic test against exact count-state minima.
            bool geodesic = true;
            for (size_t i = 0; i + 1 < w.v.size() && geodesic; ++i)
                for (size_t j = i + 1; j < w.v.size() && geodesic; ++j) {
                    RatVec diff(k);
                    for (size_t s = 0; s < k; ++s) diff[s] = pre[j][s] - pre[i][s];
                    const auto& f = field_from(w.v[i]);
                    std::int64_t jx = grid.idx.index(w.v[j]);
                    if (!f.reached[static_cast<size_t>(jx)] ||
                        rat_norm_sq(diff) > f.min_nsq[static_cast<size_t>(jx)])
                        geodesic = false;
                }
            if (geodesic) ++geodesics;
            if (!witness) ++missing_witness;
            if (geodesic || !witness) {
                ok = false;
                rep.counterexample = std::make_pair(w, straight_path(t));
                break;
            }
        }
    }

    rep.verified = ok;
    rep.statistics["targets"] = static_cast<double>(targets.size());
    rep.statistics["optimal_walks"] = static_cast<double>(optimal_total);
    rep.statistics["walk_nodes"] = static_cast<double>(walk_nodes_total);
    rep.statistics["geodesics_found"] = static_cast<double>(geodesics);
    rep.statistics["missing_prefix_witness"] = static_cast<double>(missing_witness);
    if (optimal_total > 0 && min_prefix_gap < std::numeric_limits<double>::infinity())
        rep.statistics["min_prefix_gap"] = min_prefix_gap;
    return rep;
}

// ---------------------------------------------------------------------------
// Cycle augmentation: extend a host path by an attached rectangular cycle
// whose edge values realize a prescribed passage vector up to eps.  The cycle
// carries an even decomposition of the target m, 2 p_i copies of each
// alphabet vector, and 2q - 1 repetitions of the host path's values, with
// (p, q) chosen by simultaneous rational approximation so the surplus nearly
// cancels.
// ---------------------------------------------------------------------------

struct Thm43Result {
    Configuration cfg;
    Path witness;
    RatVec achieved;          // exact passage vector of the witness
    RatVec target;            // m
    Rational error_norm_sq;   // exact ||achieved - m||^2
    double eps = 0;
    std::int64_t q = 0;
    std::vector<Integer> p;
    std::vector<int> m_counts;
};

inline Thm43Result thm43_cycle_builder(const std::vector<VectorValue>& A_raw, const VectorValue& m,
                                       const LatticePoint& x, const LatticePoint& y,
                                       const Configuration& host, double eps,
                                       int m_max_total = 16) {
    FiniteVectorSet A = vector_set_from_doubles(A_raw);
    if (!is_strongly_positively_dependent(A))
        raise(ErrorCode::NotSPD, "alphabet is not strongly positively dependent");
    require(eps > 0, ErrorCode::InvalidParams, "eps must be positive");
    const int d = host.dim();
    require(d >= 2, ErrorCode::UnsupportedDimension, "cycle builder needs d >= 2");
    require(x.dim() == d && y.dim() == d, ErrorCode::DimensionMismatch, "endpoint dimensions");
    if (l1_dist(x, y) % 2 != 0)
        raise(ErrorCode::ParityMismatch, "endpoint distance must be even");
    require(static_cast<int>(m.size()) == A.k, ErrorCode::DimensionMismatch, "target dimension");

    // Host path: the monotone staircase from x to y, axis by axis; its values
    // must come from the alphabet.
    std::vector<LatticePoint> gverts{x};
    {
        LatticePoint cur = x;
        for (int ax = 0; ax < d; ++ax)
            while (cur[ax] != y[ax]) {
                cur[ax] += (y[ax] > cur[ax]) ? 1 : -1;
                gverts.push_back(cur);
            }
    }
    Path gamma(std::move(gverts));
    const size_t k = static_cast<size_t>(A.k);
    std::vector<RatVec> gvals;
    RatVec alpha(k, Rational(0));
    for (size_t i = 0; i < gamma.edge_count(); ++i) {
        RatVec v = rat_vec(host.vector_value(gamma.edge(i)));
        bool known = false;
        for (const auto& av : A.vectors) known = known || av == v;
        require(known, ErrorCode::InvalidParams, "host path values must come from the alphabet");
        for (size_t j = 0; j < k; ++j) alpha[j] += v[j];
        gvals.push_back(std::move(v));
    }

    // beta = -alpha expressed inside the cone, then integers (p, q) with
    // p_i close to q * lambda_i so that || sum 2 p_i a_i + 2 q alpha || < eps/3.
    RatVec neg_alpha(k);
    for (size_t j = 0; j < k; ++j) neg_alpha[j] = -alpha[j];
    std::vector<Rational> lambda = caratheodory_decompose(neg_alpha, A);

    double S = 0;
    for (size_t i = 0; i < A.size(); ++i)
        if (lambda[i] > 0) S += rat_norm(A.vectors[i]);
    const Rational eps_r = rational_from_double(eps);
    const Rational eps3_sq = (eps_r / 3) * (eps_r / 3);
    std::int64_t Q = 1;
    if (S > 0) {
        double base = std::pow(6.0 * S / eps, static_cast<double>(A.size()));
        require(base < 4.0e18, ErrorCode::InvalidParams, "eps too small for a practical search");
        Q = static_cast<std::int64_t>(std::floor(base)) + 1;
    }

    DirichletResult dr;
    RatVec surplus(k);
    bool found = false;
    for (int attempt = 0; attempt < 40 && !found; ++attempt) {
        bool have = true;
        try {
            dr = dirichlet_approx(lambda, Q);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoApproximant) throw;
            have = false;
        }
        if (have) {
            for (size_t j = 0; j < k; ++j) surplus[j] = 0;
            for (size_t i = 0; i < A.size(); ++i) {
                Rational coeff = 2 * (Rational(dr.p[i]) - Rational(dr.q) * lambda[i]);
                for (size_t j = 0; j < k; ++j) surplus[j] += coeff * A.vectors[i][j];
            }
            found = rat_norm_sq(surplus) < eps3_sq;
        }
        if (!found) {
            require(Q < (std::int64_t(1) << 61), ErrorCode::InternalError,
                    "approximation scan exhausted");
            Q *= 2;
        }
    }
    require(found, ErrorCode::InternalError, "no adequate rational approximation found");

    // Even decomposition of m over the alphabet.
    RatVec m_rat = rat_vec(m);
    auto counts_opt = monoid_decompose(A, m_rat, m_max_total);
    require(counts_opt.has_value(), ErrorCode::InvalidParams,
            "m is not in the truncated even monoid (raise m_max_total)");
    const std::vector<int> m_counts = *counts_opt;

    // Cycle length: the even decomposition, 2 p_i copies of each letter, and
    // 2q - 1 repetitions of the host path's value sequence.
    Integer L_big = 0;
    for (int c : m_counts) L_big += c;
    for (const auto& pi : dr.p) L_big += 2 * pi;
    L_big += Integer(2 * dr.q - 1) * Integer(gamma.edge_count());
    require(L_big <= Integer(10'000'000), ErrorCode::InvalidParams,
            "eps too small: the cycle would be impractically long");
    const std::int64_t L = to_int64(L_big);
    require(L % 2 == 0, ErrorCode::InternalError, "cycle length must be even");

    // Highest structure row: nothing of the host construction reaches above.
    Coord max_top = std::max(x[1], y[1]);
    for (const auto& vtx : gamma.v) max_top = std::max(max_top, vtx[1]);
    for (const auto& [e, val] : host.explicit_edges()) {
        (void)val;
        max_top = std::max({max_top, e.a[1], e.b[1]});
    }

    // Attachment vertex: topmost-then-rightmost along gamma, with fallbacks.
    std::vector<size_t> z_candidates(gamma.v.size());
    for (size_t i = 0; i < z_candidates.size(); ++i) z_candidates[i] = i;
    std::sort(z_candidates.begin(), z_candidates.end(), [&](size_t i, size_t j) {
        if (gamma.v[i][1] != gamma.v[j][1]) return gamma.v[i][1] > gamma.v[j][1];
        return gamma.v[i][0] > gamma.v[j][0];
    });
    std::set<Edge> gamma_edges;
    for (size_t i = 0; i < gamma.edge_count(); ++i) gamma_edges.insert(gamma.edge(i));
    std::set<LatticePoint> gamma_verts(gamma.v.begin(), gamma.v.end());

    std::vector<LatticePoint> cycle;
    size_t z_index = gamma.v.size();
    for (size_t cand : z_candidates) {
        const LatticePoint z = gamma.v[cand];
        const Coord h = max_top + 1 - z[1];
        const Coord w = L / 2 - h;
        if (w < 1) continue;
        std::vector<LatticePoint> cyc{z};
        LatticePoint cur = z;
        auto run = [&](int axis, Coord steps, int dir) {
            for (Coord s = 0; s < steps; ++s) {
                cur[axis] += dir;
                cyc.push_back(cur);
            }
        };
        run(1, h, +1);
        run(0, w, +1);
        run(1, h, -1);
        run(0, w, -1);
        bool clash = false;
        for (size_t i = 0; i + 1 < cyc.size() && !clash; ++i) {
            Edge e = canonical_edge(cyc[i], cyc[i + 1]);
            clash = gamma_edges.count(e) != 0 || host.explicit_edges().count(e) != 0;
        }
        for (size_t i = 1; i + 1 < cyc.size() && !clash; ++i) clash = gamma_verts.count(cyc[i]) != 0;
        if (clash) continue;
        if (host.domain()) {
            bool inside = true;
            for (const auto& vtx : cyc) inside = inside && host.domain()->contains(vtx);
            if (!inside) raise(ErrorCode::DomainExceeded, "cycle leaves the host domain");
        }
        cycle = std::move(cyc);
        z_index = cand;
        break;
    }
    require(!cycle.empty(), ErrorCode::InternalError, "no collision-free cycle attachment found");

    // Value sequence around the cycle.
    std::vector<const VectorValue*> seq;
    seq.reserve(static_cast<size_t>(L));
    for (size_t i = 0; i < A.size(); ++i)
        for (int c = 0; c < m_counts[i]; ++c) seq.push_back(&A_raw[i]);
    for (size_t i = 0; i < A.size(); ++i) {
        std::int64_t reps = to_int64(2 * dr.p[i]);
        for (std::int64_t c = 0; c < reps; ++c) seq.push_back(&A_raw[i]);
    }
    std::vector<VectorValue> gvals_raw;
    for (size_t i = 0; i < gamma.edge_count(); ++i)
        gvals_raw.push_back(host.vector_value(gamma.edge(i)));
    for (std::int64_t rep = 0; rep < 2 * dr.q - 1; ++rep)
        for (const auto& gv : gvals_raw) seq.push_back(&gv);
    require(static_cast<std::int64_t>(seq.size()) == L, ErrorCode::InternalError,
            "cycle value sequence length mismatch");

    Configuration cfg = host;
    for (size_t i = 0; i + 1 < cycle.size(); ++i)
        cfg.set_value(canonical_edge(cycle[i], cycle[i + 1]), PassageValue(*seq[i]));

    // Witness: host path to z, around the cycle, host path onward to y.
    std::vector<LatticePoint> wverts(gamma.v.begin(), gamma.v.begin() + static_cast<std::ptrdiff_t>(z_index) + 1);
    wverts.insert(wverts.end(), cycle.begin() + 1, cycle.end());
    wverts.insert(wverts.end(), gamma.v.begin() + static_cast<std::ptrdiff_t>(z_index) + 1, gamma.v.end());
    Path witness(std::move(wverts));

    RatVec achieved = detail::path_vector_exact(cfg, witness, k);
    RatVec err(k);
    for (size_t j = 0; j < k; ++j) err[j] = achieved[j] - m_rat[j];
    Rational err_sq = rat_norm_sq(err);
    require(err_sq < eps_r * eps_r, ErrorCode::InternalError,
            "assembled witness misses the target accuracy");

    return Thm43Result{std::move(cfg),  std::move(witness), std::move(achieved), std::move(m_rat),
                       std::move(err_sq), eps,              dr.q,                dr.p,
                       m_counts};
}

inline GadgetReport verify_thm43(const Thm43Result& r) {
    GadgetReport rep;
    rep.claim = "thm43";
    const size_t k = r.target.size();
    RatVec achieved = detail::path_vector_exact(r.cfg, r.witness, k);
    RatVec err(k);
    for (size_t j = 0; j < k; ++j) err[j] = achieved[j] - r.target[j];
    Rational err_sq = rat_norm_sq(err);
    const Rational eps_r = rational_from_double(r.eps);
    rep.verified = achieved == r.achieved && err_sq == r.error_norm_sq && err_sq < eps_r * eps_r;
    if (!rep.verified) rep.counterexample = std::make_pair(r.witness, r.witness);
    rep.statistics["error_norm"] = std::sqrt(to_double(err_sq));
    rep.statistics["eps"] = r.eps;
    rep.statistics["cycle_q"] = static_cast<double>(r.q);
    rep.statistics["witness_edges"] = static_cast<double>(r.witness.edge_count());
    return rep;
}

}  // namespace percolab
