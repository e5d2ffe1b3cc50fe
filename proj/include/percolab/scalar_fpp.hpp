#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <unordered_map>
#include <vector>

#include "percolab/config.hpp"
#include "percolab/geometry.hpp"
#include "percolab/rational.hpp"

namespace percolab {

// ---------------------------------------------------------------------------
// Weight cache over a search box.  Weights are exact rationals; when a common
// denominator keeps everything comfortably inside int64, searches run on
// scaled integers (still exact, much faster).
// ---------------------------------------------------------------------------

class ScalarGrid {
  public:
    ScalarGrid(const Configuration& cfg, const Box& box) : idx_(box), dim_(box.dim()) {
        require(cfg.dim() == box.dim(), ErrorCode::DimensionMismatch, "search box dimension");
        require(cfg.scalar_kind(), ErrorCode::KindMismatch, "scalar search on vector configuration");
        weights_.resize(static_cast<size_t>(idx_.count) * static_cast<size_t>(dim_), Rational(0));
        has_edge_.resize(weights_.size(), 0);
        Integer den = 1;
        Rational maxw = 0;
        for (std::int64_t ix = 0; ix < idx_.count; ++ix) {
            LatticePoint p = idx_.point(ix);
            for (int ax = 0; ax < dim_; ++ax) {
                if (p[ax] == box.hi[ax]) continue;
                LatticePoint q = p;
                q[ax] += 1;
                Rational w = cfg.scalar_value(canonical_edge(p, q));
                size_t slot = static_cast<size_t>(ix) * static_cast<size_t>(dim_) + static_cast<size_t>(ax);
                weights_[slot] = w;
                has_edge_[slot] = 1;
                den = int_lcm(den, rat_den(w));
                maxw = rat_max(maxw, w);
            }
        }
        // Integer fast path: all scaled weights and any in-box path total
        // must fit int64 with headroom.
        Integer scaled_max = rat_num(maxw * Rational(den, 1));
        Integer total_bound = scaled_max * Integer(idx_.count) * Integer(2 * dim_) + 1;
        if (den <= Integer(1) << 24 && total_bound < (Integer(1) << 62)) {
            integral_ = true;
            den_ = den;
            iweights_.resize(weights_.size(), 0);
            for (size_t i = 0; i < weights_.size(); ++i)
                if (has_edge_[i]) iweights_[i] = to_int64(rat_num(weights_[i] * Rational(den, 1)));
        }
    }

    const BoxIndexer& indexer() const { return idx_; }
    const Box& box() const { return idx_.box; }
    int dim() const { return dim_; }

    bool has_edge(std::int64_t ix, int axis) const {
        return has_edge_[static_cast<size_t>(ix) * static_cast<size_t>(dim_) + static_cast<size_t>(axis)] != 0;
    }

    Rational weight(std::int64_t ix, int axis) const {
        return weights_[static_cast<size_t>(ix) * static_cast<size_t>(dim_) + static_cast<size_t>(axis)];
    }

    // Weight of the edge from node `ix` toward neighbour along `axis` in
    // direction `dir` (+1/-1); returns false if the edge leaves the box.
    bool neighbour(std::int64_t ix, int axis, int dir, std::int64_t& nix) const {
        LatticePoint p = idx_.point(ix);
        p[axis] += dir;
        if (!idx_.box.contains(p)) return false;
        nix = idx_.index(p);
        return true;
    }

    struct DistanceField {
        std::vector<Rational> dist;
        std::vector<char> reached;
        std::vector<std::int64_t> parent;  // -1 = source or unreached

        bool is_reached(std::int64_t ix) const { return reached[static_cast<size_t>(ix)] != 0; }
        const Rational& at(std::int64_t ix) const { return dist[static_cast<size_t>(ix)]; }
    };

    DistanceField dijkstra(const std::vector<std::int64_t>& sources) const {
        if (integral_) return dijkstra_int(sources);
        return dijkstra_rat(sources);
    }

    DistanceField dijkstra(std::int64_t source) const { return dijkstra(std::vector<std::int64_t>{source}); }

  private:
    template <typename W, typename GetW>
    DistanceField run(const std::vector<std::int64_t>& sources, W inf, GetW getw) const {
        std::vector<W> d(static_cast<size_t>(idx_.count), inf);
        std::vector<char> done(static_cast<size_t>(idx_.count), 0);
        DistanceField out;
        out.parent.assign(static_cast<size_t>(idx_.count), -1);
        using QE = std::pair<W, std::int64_t>;
        std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
        for (auto s : sources) {
            d[static_cast<size_t>(s)] = W(0);
            pq.push({W(0), s});
        }
        while (!pq.empty()) {
            auto [dist_u, u] = pq.top();
            pq.pop();
            if (done[static_cast<size_t>(u)]) continue;
            done[static_cast<size_t>(u)] = 1;
            for (int ax = 0; ax < dim_; ++ax) {
                for (int dir : {+1, -1}) {
                    std::int64_t v;
                    if (!neighbour(u, ax, dir, v)) continue;
                    std::int64_t lower = dir > 0 ? u : v;
                    if (!has_edge(lower, ax)) continue;
                    W w = getw(lower, ax);
                    W cand = dist_u + w;
                    if (cand < d[static_cast<size_t>(v)]) {
                        d[static_cast<size_t>(v)] = cand;
                        out.parent[static_cast<size_t>(v)] = u;
                        pq.push({cand, v});
                    }
                }
            }
        }
        out.dist.assign(static_cast<size_t>(idx_.count), Rational(0));
        out.reached.assign(static_cast<size_t>(idx_.count), 0);
        for (std::int64_t i = 0; i < idx_.count; ++i) {
            if (d[static_cast<size_t>(i)] == inf) continue;
            out.reached[static_cast<size_t>(i)] = 1;
            out.dist[static_cast<size_t>(i)] = to_rational(d[static_cast<size_t>(i)]);
        }
        return out;
    }

    Rational to_rational(const Rational& w) const { return w; }
    Rational to_rational(std::int64_t w) const { return Rational(w, to_int64(den_)); }

    DistanceField dijkstra_int(const std::vector<std::int64_t>& sources) const {
        auto getw = [this](std::int64_t ix, int ax) {
            return iweights_[static_cast<size_t>(ix) * static_cast<size_t>(dim_) + static_cast<size_t>(ax)];
        };
        return run<std::int64_t>(sources, std::numeric_limits<std::int64_t>::max(), getw);
    }

    DistanceField dijkstra_rat(const std::vector<std::int64_t>& sources) const {
        // Sentinel beyond any in-box path cost.
        Rational inf = 1;
        for (const auto& w : weights_) inf += w;
        inf += 1;
        auto getw = [this](std::int64_t ix, int ax) { return weight(ix, ax); };
        return run<Rational>(sources, inf, getw);
    }

    BoxIndexer idx_;
    int dim_;
    std::vector<Rational> weights_;
    std::vector<char> has_edge_;
    std::vector<std::int64_t> iweights_;
    bool integral_ = false;
    Integer den_ = 1;
};

// ---------------------------------------------------------------------------
// Passage times and witness paths.
// ---------------------------------------------------------------------------

struct PassageResult {
    Rational time;
    Path witness;
};

inline Rational path_passage_time(const Configuration& cfg, const Path& p) {
    Rational t = 0;
    for (size_t i = 0; i < p.edge_count(); ++i) t += cfg.scalar_value(p.edge(i));
    return t;
}

namespace detail {

inline Path trace_witness(const ScalarGrid& g, const ScalarGrid::DistanceField& f, std::int64_t from,
                          std::int64_t to) {
    std::vector<LatticePoint> rev;
    std::int64_t cur = to;
    while (true) {
        rev.push_back(g.indexer().point(cur));
        if (cur == from) break;
        cur = f.parent[static_cast<size_t>(cur)];
        require(cur >= 0, ErrorCode::InternalError, "broken witness chain");
    }
    std::reverse(rev.begin(), rev.end());
    return Path(std::move(rev));
}

}  // namespace detail

// Search box sized from the declared alphabet: any path cheaper than the
// straight monotone path stays within T_ub / inf A of the endpoints.
inline Box auto_search_box(const Configuration& cfg, const LatticePoint& x, const LatticePoint& y) {
    require(cfg.value_set().has_value(), ErrorCode::EmptyValueSet,
            "auto_search_box needs a declared alphabet (or pass a box explicitly)");
    Rational inf_a = cfg.value_set()->inf();
    require(inf_a > 0, ErrorCode::InvalidParams, "auto_search_box needs inf A > 0");
    // Cost of one straight monotone path.
    Rational t_ub = 0;
    LatticePoint cur = x;
    for (int ax = 0; ax < x.dim(); ++ax) {
        while (cur[ax] != y[ax]) {
            LatticePoint nxt = cur;
            nxt[ax] += (y[ax] > cur[ax]) ? 1 : -1;
            t_ub += cfg.scalar_value(canonical_edge(cur, nxt));
            cur = nxt;
        }
    }
    Coord radius = to_int64(rat_ceil(t_ub / inf_a));
    Box bx = bounding_box({x, y}, radius);
    return bx;
}

inline PassageResult passage_time(const Configuration& cfg, const LatticePoint& x, const LatticePoint& y,
                                  const Box& search_box) {
    require(search_box.contains(x) && search_box.contains(y), ErrorCode::InvalidParams,
            "endpoints must lie in the search box");
    ScalarGrid g(cfg, search_box);
    auto f = g.dijkstra(g.indexer().index(x));
    std::int64_t yi = g.indexer().index(y);
    require(f.is_reached(yi), ErrorCode::Unreachable, "search box disconnects the endpoints");
    return PassageResult{f.at(yi), detail::trace_witness(g, f, g.indexer().index(x), yi)};
}

inline PassageResult passage_time(const Configuration& cfg, const LatticePoint& x, const LatticePoint& y) {
    return passage_time(cfg, x, y, auto_search_box(cfg, x, y));
}

// ---------------------------------------------------------------------------
// All optimal paths via the tight-edge DAG.  Enumeration is exact (rational
// tie detection) and lexicographic in the vertex sequence; `max_paths` caps
// the answer and sets `truncated` when hit.  Paths are simple: an optimal
// walk with a repeated vertex rides a zero-cost cycle that excision removes.
// ---------------------------------------------------------------------------

struct OptimalPaths {
    Rational time;
    std::vector<Path> paths;
    bool truncated = false;
};

inline OptimalPaths optimal_paths(const Configuration& cfg, const LatticePoint& x, const LatticePoint& y,
                                  const Box& search_box, size_t max_paths = 1024) {
    require(search_box.contains(x) && search_box.contains(y), ErrorCode::InvalidParams,
            "endpoints must lie in the search box");
    ScalarGrid g(cfg, search_box);
    std::int64_t xi = g.indexer().index(x), yi = g.indexer().index(y);
    auto fx = g.dijkstra(xi);
    require(fx.is_reached(yi), ErrorCode::Unreachable, "search box disconnects the endpoints");
    auto fy = g.dijkstra(yi);
    Rational total = fx.at(yi);

    OptimalPaths out;
    out.time = total;
    std::vector<char> on_path(static_cast<size_t>(g.indexer().count), 0);
    std::vector<LatticePoint> stack;

    // DFS over tight edges, children in lexicographic order.
    auto dfs = [&](auto&& self, std::int64_t u) -> void {
        if (out.truncated) return;
        if (u == yi) {
            if (out.paths.size() >= max_paths) {
                out.truncated = true;
                return;
            }
            out.paths.push_back(Path(stack));
            return;
        }
        LatticePoint pu = g.indexer().point(u);
        std::vector<std::pair<LatticePoint, std::int64_t>> nexts;
        for (int ax = 0; ax < g.dim(); ++ax)
            for (int dir : {+1, -1}) {
                std::int64_t v;
                if (!g.neighbour(u, ax, dir, v)) continue;
                std::int64_t lower = dir > 0 ? u : v;
                if (!g.has_edge(lower, ax)) continue;
                if (!fx.is_reached(v) || !fy.is_reached(v)) continue;
                Rational w = g.weight(lower, ax);
                if (fx.at(u) + w == fx.at(v) && fx.at(v) + fy.at(v) == total) nexts.push_back({g.indexer().point(v), v});
            }
        std::sort(nexts.begin(), nexts.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [pv, v] : nexts) {
            if (on_path[static_cast<size_t>(v)]) continue;
            on_path[static_cast<size_t>(v)] = 1;
            stack.push_back(pv);
            self(self, v);
            stack.pop_back();
            on_path[static_cast<size_t>(v)] = 0;
        }
    };
    on_path[static_cast<size_t>(xi)] = 1;
    stack.push_back(x);
    dfs(dfs, xi);
    return out;
}

// A path is a geodesic when every contiguous subpath is optimal between its
// endpoints.
inline bool is_geodesic(const Configuration& cfg, const Path& p, const Box& search_box) {
    size_t n = p.v.size();
    ScalarGrid g(cfg, search_box);
    // Prefix sums of the path's own costs.
    std::vector<Rational> pre(n, Rational(0));
    for (size_t i = 0; i + 1 < n; ++i) pre[i + 1] = pre[i] + cfg.scalar_value(p.edge(i));
    for (size_t i = 0; i + 1 < n; ++i) {
        require(search_box.contains(p.v[i]), ErrorCode::InvalidParams, "path leaves the search box");
        auto f = g.dijkstra(g.indexer().index(p.v[i]));
        for (size_t j = i + 1; j < n; ++j) {
            std::int64_t tj = g.indexer().index(p.v[j]);
            require(f.is_reached(tj), ErrorCode::Unreachable, "subpath endpoint unreachable");
            if (f.at(tj) != pre[j] - pre[i]) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Lattice balls.
// ---------------------------------------------------------------------------

struct BallSnapshot {
    Rational t;
    std::vector<LatticePoint> points;  // sorted lexicographically
};

inline Box auto_ball_box(const Configuration& cfg, const Rational& t) {
    require(cfg.value_set().has_value(), ErrorCode::EmptyValueSet, "auto_ball_box needs a declared alphabet");
    Rational inf_a = cfg.value_set()->inf();
    require(inf_a > 0, ErrorCode::InvalidParams, "auto_ball_box needs inf A > 0");
    return centered_box(cfg.dim(), to_int64(rat_ceil(t / inf_a)));
}

inline BallSnapshot grow_ball(const Configuration& cfg, const Rational& t, const Box& search_box) {
    require(t >= 0, ErrorCode::InvalidParams, "ball radius must be nonnegative");
    LatticePoint origin = zero_point(cfg.dim());
    require(search_box.contains(origin), ErrorCode::InvalidParams, "search box must contain the origin");
    ScalarGrid g(cfg, search_box);
    auto f = g.dijkstra(g.indexer().index(origin));
    BallSnapshot snap;
    snap.t = t;
    for (std::int64_t ix = 0; ix < g.indexer().count; ++ix)
        if (f.is_reached(ix) && f.at(ix) <= t) snap.points.push_back(g.indexer().point(ix));
    std::sort(snap.points.begin(), snap.points.end());
    return snap;
}

inline BallSnapshot grow_ball(const Configuration& cfg, const Rational& t) {
    return grow_ball(cfg, t, auto_ball_box(cfg, t));
}

inline PointSet rescale(const BallSnapshot& snap, const Rational& t) {
    require(t > 0, ErrorCode::InvalidParams, "rescale needs t > 0");
    int d = snap.points.empty() ? 1 : snap.points[0].dim();
    PointSet ps(d);
    double tt = to_double(t);
    for (const auto& p : snap.points) {
        std::vector<double> row(static_cast<size_t>(d));
        for (int i = 0; i < d; ++i) row[static_cast<size_t>(i)] = static_cast<double>(p[i]) / tt;
        ps.append(row);
    }
    return ps;
}

// ---------------------------------------------------------------------------
// Hausdorff distance under the l1 metric, accelerated with a uniform bucket
// grid and expanding-ring lookup.  Exact up to double arithmetic.
// ---------------------------------------------------------------------------

namespace detail {

class BucketIndex {
  public:
    BucketIndex(const PointSet& pts, double cell) : pts_(pts), cell_(cell) {
        for (size_t i = 0; i < pts.size(); ++i) buckets_[key(cell_coords(i))].push_back(i);
    }

    double nearest_l1(const std::vector<double>& q) const {
        std::vector<std::int64_t> qc(q.size());
        for (size_t k = 0; k < q.size(); ++k) qc[k] = cell_of(q[k]);
        double best = std::numeric_limits<double>::infinity();
        for (std::int64_t r = 0;; ++r) {
            if (static_cast<double>(r - 1) * cell_ > best) break;
            bool any_cell = visit_ring(qc, r, q, best);
            if (!any_cell && best < std::numeric_limits<double>::infinity() &&
                static_cast<double>(r) * cell_ > best)
                break;
            if (r > 2 * max_ring_ + 2) break;  // beyond all data
        }
        return best;
    }

  private:
    std::int64_t cell_of(double x) const { return static_cast<std::int64_t>(std::floor(x / cell_)); }

    std::vector<std::int64_t> cell_coords(size_t i) const {
        std::vector<std::int64_t> c(static_cast<size_t>(pts_.dim));
        for (int k = 0; k < pts_.dim; ++k) c[static_cast<size_t>(k)] = cell_of(pts_.coord(i, k));
        return c;
    }

    static size_t key(const std::vector<std::int64_t>& c) {
        size_t h = 0x8f1e3b7d;
        for (auto x : c) h = hash_combine(h, std::hash<std::int64_t>{}(x));
        return h;
    }

    bool visit_ring(const std::vector<std::int64_t>& center, std::int64_t r, const std::vector<double>& q,
                    double& best) const {
        bool any = false;
        std::vector<std::int64_t> c(center.size());
        visit_rec(center, r, 0, false, c, q, best, any);
        return any;
    }

    void visit_rec(const std::vector<std::int64_t>& center, std::int64_t r, size_t axis, bool extremal,
                   std::vector<std::int64_t>& c, const std::vector<double>& q, double& best, bool& any) const {
        if (axis == center.size()) {
            if (!extremal && r > 0) return;  // interior of the ring: already visited
            auto it = buckets_.find(key(c));
            if (it == buckets_.end()) return;
            any = true;
            for (size_t i : it->second) {
                double d = 0;
                for (int k = 0; k < pts_.dim; ++k) d += std::abs(q[static_cast<size_t>(k)] - pts_.coord(i, k));
                best = std::min(best, d);
            }
            return;
        }
        for (std::int64_t off = -r; off <= r; ++off) {
            c[axis] = center[axis] + off;
            visit_rec(center, r, axis + 1, extremal || off == -r || off == r, c, q, best, any);
        }
    }

    const PointSet& pts_;
    double cell_;
    std::unordered_map<size_t, std::vector<size_t>> buckets_;
    std::int64_t max_ring_ = 1 << 20;
};

inline double directed_hausdorff_l1(const PointSet& from, const PointSet& to) {
    require(to.size() > 0, ErrorCode::EmptySet, "hausdorff target set is empty");
    // Cell size tuned to the target's density.
    double span = 0;
    for (int k = 0; k < to.dim; ++k) {
        double lo = to.coord(0, k), hi = lo;
        for (size_t i = 1; i < to.size(); ++i) {
            lo = std::min(lo, to.coord(i, k));
            hi = std::max(hi, to.coord(i, k));
        }
        span = std::max(span, hi - lo);
    }
    double per_axis = std::pow(static_cast<double>(to.size()), 1.0 / to.dim);
    double cell = span > 0 ? std::max(span / std::max(per_axis, 1.0), 1e-12) : 1.0;
    BucketIndex index(to, cell);
    double worst = 0;
    for (size_t i = 0; i < from.size(); ++i) worst = std::max(worst, index.nearest_l1(from.point(i)));
    return worst;
}

}  // namespace detail

inline double hausdorff_l1(const PointSet& s1, const PointSet& s2) {
    require(s1.dim == s2.dim, ErrorCode::DimensionMismatch, "hausdorff_l1");
    require(s1.size() > 0 && s2.size() > 0, ErrorCode::EmptySet, "hausdorff_l1 of an empty set");
    return std::max(detail::directed_hausdorff_l1(s1, s2), detail::directed_hausdorff_l1(s2, s1));
}

// ---------------------------------------------------------------------------
// Rescaled-ball convergence trace against a target shape sampling.
// ---------------------------------------------------------------------------

struct TraceRow {
    Rational t;
    double distance;
};

inline std::vector<TraceRow> ball_convergence_trace(const Configuration& cfg,
                                                    const std::vector<Rational>& scales,
                                                    const PointSet& target) {
    std::vector<TraceRow> rows;
    for (const auto& t : scales) {
        BallSnapshot snap = grow_ball(cfg, t);
        require(!snap.points.empty(), ErrorCode::EmptySet, "ball is empty at requested scale");
        rows.push_back(TraceRow{t, hausdorff_l1(rescale(snap, t), target)});
    }
    return rows;
}

}  // namespace percolab
