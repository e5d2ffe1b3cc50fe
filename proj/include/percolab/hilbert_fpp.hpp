#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <unordered_map>
#include <vector>

#include "percolab/cone.hpp"
#include "percolab/config.hpp"
#include "percolab/geometry.hpp"
#include "percolab/rng.hpp"

namespace percolab {

// ---------------------------------------------------------------------------
// Vector-valued passage: tau(path) = || sum of edge values ||.  Searches
// deduplicate by (vertex, value counts), since the passage vector depends
// only on how many edges of each alphabet element a path uses.  Loops are
// allowed; results are exact up to the declared length cap.
// ---------------------------------------------------------------------------

namespace detail {

struct VectorAlphabet {
    int k = 0;
    std::vector<VectorValue> raw;
    std::vector<RatVec> exact;
    bool positive = false;  // all pairwise inner products >= 0, exactly

    int index_of(const VectorValue& v) const {
        RatVec rv = rat_vec(v);
        for (size_t i = 0; i < exact.size(); ++i)
            if (exact[i] == rv) return static_cast<int>(i);
        raise(ErrorCode::InvalidParams, "edge value not in the declared alphabet");
    }
};

inline VectorAlphabet make_alphabet(const Configuration& cfg) {
    require(!cfg.scalar_kind(), ErrorCode::KindMismatch, "vector passage on scalar configuration");
    require(cfg.value_set().has_value() && !cfg.value_set()->scalar(), ErrorCode::EmptyValueSet,
            "vector passage needs a declared finite alphabet");
    VectorAlphabet a;
    a.raw = cfg.value_set()->vectors;
    a.k = static_cast<int>(a.raw[0].size());
    for (const auto& v : a.raw) a.exact.push_back(rat_vec(v));
    a.positive = true;
    for (size_t i = 0; i < a.exact.size() && a.positive; ++i)
        for (size_t j = i; j < a.exact.size() && a.positive; ++j)
            if (rat_dot(a.exact[i], a.exact[j]) < 0) a.positive = false;
    return a;
}

struct HNode {
    std::int64_t vix = 0;
    LatticePoint point;
    std::vector<std::uint16_t> counts;
    std::int64_t parent = -1;
    RatVec sum;
    double norm = 0;
    int len = 0;
};

struct HStateStore {
    std::vector<HNode> nodes;
    std::unordered_map<size_t, std::vector<std::int64_t>> index;

    static size_t key(std::int64_t vix, const std::vector<std::uint16_t>& counts) {
        size_t h = std::hash<std::int64_t>{}(vix);
        for (auto c : counts) h = hash_combine(h, std::hash<std::uint16_t>{}(c));
        return h;
    }

    // Returns node id, or -1 if the state already exists.
    std::int64_t add_if_new(HNode&& n) {
        size_t h = key(n.vix, n.counts);
        auto& bucket = index[h];
        for (auto id : bucket) {
            const HNode& o = nodes[static_cast<size_t>(id)];
            if (o.vix == n.vix && o.counts == n.counts) return -1;
        }
        nodes.push_back(std::move(n));
        std::int64_t id = static_cast<std::int64_t>(nodes.size()) - 1;
        bucket.push_back(id);
        return id;
    }
};

}  // namespace detail

struct HPassageResult {
    double time = 0;      // min ||v(path)|| over paths of length <= cap
    Rational norm_sq = 0;  // exact square of the minimum
    Path witness;
    int length = 0;
};

struct PassageSetEntry {
    RatVec vector;
    int min_length = 0;
};

struct PassageSet {
    LatticePoint source, target;
    int length_cap = 0;
    std::vector<PassageSetEntry> vectors;  // sorted lexicographically

    bool contains(const RatVec& v) const {
        for (const auto& e : vectors)
            if (e.vector == v) return true;
        return false;
    }
};

// Reported default cap: shortest length plus a slack scaled by one greedy
// path's passage norm against the cheapest nonzero alphabet element.
inline int default_length_cap(const Configuration& cfg, const LatticePoint& x, const LatticePoint& y) {
    detail::VectorAlphabet A = detail::make_alphabet(cfg);
    RatVec sum(static_cast<size_t>(A.k), Rational(0));
    LatticePoint cur = x;
    for (int ax = 0; ax < x.dim(); ++ax)
        while (cur[ax] != y[ax]) {
            LatticePoint nxt = cur;
            nxt[ax] += (y[ax] > cur[ax]) ? 1 : -1;
            RatVec v = rat_vec(cfg.vector_value(canonical_edge(cur, nxt)));
            for (int j = 0; j < A.k; ++j) sum[static_cast<size_t>(j)] += v[static_cast<size_t>(j)];
            cur = nxt;
        }
    double min_norm = -1;
    for (const auto& a : A.exact) {
        double n = rat_norm(a);
        if (n > 0 && (min_norm < 0 || n < min_norm)) min_norm = n;
    }
    Coord base = l1_dist(x, y);
    if (min_norm <= 0) return static_cast<int>(base) + 4;
    double slack = rat_norm(sum) / min_norm;
    return static_cast<int>(base) + 2 * static_cast<int>(std::ceil(slack)) + 4;
}

namespace detail {

// Expands all (vertex, counts) states of length <= cap inside the box,
// breadth-first by length; `stop_at_target_best_first` switches to norm-
// ordered expansion with early exit (sound only for positive alphabets,
// where one more edge never decreases the norm).
struct HSearch {
    const Configuration& cfg;
    const Box& box;
    VectorAlphabet A;
    BoxIndexer idx;
    HStateStore store;

    HSearch(const Configuration& c, const Box& b) : cfg(c), box(b), A(make_alphabet(c)), idx(b) {
        require(c.dim() == b.dim(), ErrorCode::DimensionMismatch, "search box dimension");
    }

    HNode make_root(const LatticePoint& x) {
        HNode root;
        root.vix = idx.index(x);
        root.point = x;
        root.counts.assign(A.raw.size(), 0);
        root.parent = -1;
        root.sum.assign(static_cast<size_t>(A.k), Rational(0));
        root.norm = 0;
        root.len = 0;
        return root;
    }

    std::vector<std::int64_t> children(std::int64_t id) {
        std::vector<std::int64_t> out;
        HNode base = store.nodes[static_cast<size_t>(id)];  // copy: push_back invalidates refs
        for (int ax = 0; ax < box.dim(); ++ax)
            for (int dir : {+1, -1}) {
                LatticePoint q = base.point;
                q[ax] += dir;
                if (!box.contains(q)) continue;
                int vi = A.index_of(cfg.vector_value(canonical_edge(base.point, q)));
                HNode child;
                child.vix = idx.index(q);
                child.point = q;
                child.counts = base.counts;
                child.counts[static_cast<size_t>(vi)] += 1;
                child.parent = id;
                child.sum = base.sum;
                for (int j = 0; j < A.k; ++j) child.sum[static_cast<size_t>(j)] += A.exact[static_cast<size_t>(vi)][static_cast<size_t>(j)];
                child.norm = std::sqrt(to_double(rat_norm_sq(child.sum)));
                child.len = base.len + 1;
                std::int64_t cid = store.add_if_new(std::move(child));
                if (cid >= 0) out.push_back(cid);
            }
        return out;
    }

    Path trace(std::int64_t id) const {
        std::vector<LatticePoint> rev;
        for (std::int64_t cur = id; cur >= 0; cur = store.nodes[static_cast<size_t>(cur)].parent)
            rev.push_back(store.nodes[static_cast<size_t>(cur)].point);
        std::reverse(rev.begin(), rev.end());
        return Path(std::move(rev));
    }
};

}  // namespace detail

inline HPassageResult passage_time_h(const Configuration& cfg, const LatticePoint& x, const LatticePoint& y,
                                     int length_cap, const Box& search_box) {
    require(search_box.contains(x) && search_box.contains(y), ErrorCode::InvalidParams,
            "endpoints must lie in the search box");
    require(length_cap >= l1_dist(x, y), ErrorCode::CapTooSmall, "length cap below the lattice distance");
    detail::HSearch s(cfg, search_box);
    std::int64_t yix = s.idx.index(y);

    std::int64_t best_id = -1;
    Rational best_sq = 0;

    std::int64_t root = s.store.add_if_new(s.make_root(x));

    if (s.A.positive) {
        // Norm-ordered expansion: with a positive alphabet the norm never
        // decreases along a path, so the first target pop is optimal.
        auto cmp = [&s](std::int64_t a, std::int64_t b) {
            const auto& na = s.store.nodes[static_cast<size_t>(a)];
            const auto& nb = s.store.nodes[static_cast<size_t>(b)];
            if (na.norm != nb.norm) return na.norm > nb.norm;
            if (na.point != nb.point) return nb.point < na.point;
            return nb.counts < na.counts;
        };
        std::priority_queue<std::int64_t, std::vector<std::int64_t>, decltype(cmp)> pq(cmp);
        pq.push(root);
        while (!pq.empty()) {
            std::int64_t id = pq.top();
            pq.pop();
            const auto& n = s.store.nodes[static_cast<size_t>(id)];
            if (n.vix == yix) {
                best_id = id;
                best_sq = rat_norm_sq(n.sum);
                break;
            }
            if (n.len >= length_cap) continue;
            for (auto cid : s.children(id)) pq.push(cid);
        }
    } else {
        // Full layered enumeration; keep the exact-minimum target state.
        std::vector<std::int64_t> frontier{root};
        auto consider = [&](std::int64_t id) {
            const auto& n = s.store.nodes[static_cast<size_t>(id)];
            if (n.vix != yix) return;
            Rational sq = rat_norm_sq(n.sum);
            if (best_id < 0 || sq < best_sq) {
                best_id = id;
                best_sq = sq;
            }
        };
        consider(root);
        for (int len = 0; len < length_cap && !frontier.empty(); ++len) {
            std::vector<std::int64_t> next;
            for (auto id : frontier)
                for (auto cid : s.children(id)) {
                    consider(cid);
                    next.push_back(cid);
                }
            frontier = std::move(next);
        }
    }

    require(best_id >= 0, ErrorCode::Unreachable, "no path within the cap and search box");
    HPassageResult out;
    out.norm_sq = best_sq;
    out.time = std::sqrt(to_double(best_sq));
    out.witness = s.trace(best_id);
    out.length = s.store.nodes[static_cast<size_t>(best_id)].len;
    return out;
}

inline PassageSet passage_set(const Configuration& cfg, const LatticePoint& x, const LatticePoint& y,
                              int length_cap, const Box& search_box) {
    require(search_box.contains(x) && search_box.contains(y), ErrorCode::InvalidParams,
            "endpoints must lie in the search box");
    require(length_cap >= l1_dist(x, y), ErrorCode::CapTooSmall, "length cap below the lattice distance");
    detail::HSearch s(cfg, search_box);
    std::int64_t yix = s.idx.index(y);

    std::map<RatVec, int> reached;  // vector -> minimal length
    auto consider = [&](std::int64_t id) {
        const auto& n = s.store.nodes[static_cast<size_t>(id)];
        if (n.vix != yix) return;
        auto it = reached.find(n.sum);
        if (it == reached.end())
            reached.emplace(n.sum, n.len);
        else if (n.len < it->second)
            it->second = n.len;
    };

    std::int64_t root = s.store.add_if_new(s.make_root(x));
    consider(root);
    std::vector<std::int64_t> frontier{root};
    for (int len = 0; len < length_cap && !frontier.empty(); ++len) {
        std::vector<std::int64_t> next;
        for (auto id : frontier)
            for (auto cid : s.children(id)) {
                consider(cid);
                next.push_back(cid);
            }
        frontier = std::move(next);
    }

    require(!reached.empty(), ErrorCode::Unreachable, "no path within the cap and search box");
    PassageSet out;
    out.source = x;
    out.target = y;
    out.length_cap = length_cap;
    for (auto& [vec, len] : reached) out.vectors.push_back(PassageSetEntry{vec, len});
    return out;
}

// True iff every contiguous subpath attains the vector passage time between
// its endpoints (per-subpath cap `length_cap`).
inline bool is_geodesic_h(const Configuration& cfg, const Path& p, int length_cap, const Box& search_box) {
    detail::VectorAlphabet A = detail::make_alphabet(cfg);
    size_t n = p.v.size();
    std::vector<RatVec> pre(n, RatVec(static_cast<size_t>(A.k), Rational(0)));
    for (size_t i = 0; i + 1 < n; ++i) {
        RatVec v = rat_vec(cfg.vector_value(p.edge(i)));
        pre[i + 1] = pre[i];
        for (int j = 0; j < A.k; ++j) pre[i + 1][static_cast<size_t>(j)] += v[static_cast<size_t>(j)];
    }
    for (size_t i = 0; i + 1 < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            RatVec diff(static_cast<size_t>(A.k));
            for (int t = 0; t < A.k; ++t) diff[static_cast<size_t>(t)] = pre[j][static_cast<size_t>(t)] - pre[i][static_cast<size_t>(t)];
            double tau_sub = std::sqrt(to_double(rat_norm_sq(diff)));
            HPassageResult opt = passage_time_h(cfg, p.v[i], p.v[j], length_cap, search_box);
            if (tau_sub > opt.time + kTauCmp) return false;
        }
    return true;
}

// ---------------------------------------------------------------------------
// Random nested-pair monotonicity probe: tau(sub) <= tau(super) must hold for
// every contiguous subpath pair exactly when the alphabet is positive.  A
// violating nested pair exists iff a one-edge extension violates, so walks
// are scanned over all single extensions.
// ---------------------------------------------------------------------------

struct MonotonicityReport {
    int trials = 0;
    int violations = 0;
    Path sub, super;  // first violation found, if any
    double tau_sub = 0, tau_super = 0;

    bool found() const { return violations > 0; }
};

inline MonotonicityReport monotonicity_check(const Configuration& cfg, int trials, std::uint64_t seed) {
    detail::VectorAlphabet A = detail::make_alphabet(cfg);
    Box box = cfg.domain() ? *cfg.domain() : centered_box(cfg.dim(), 5);
    Rng rng(seed);
    MonotonicityReport rep;
    rep.trials = trials;
    const int max_len = 12;
    for (int t = 0; t < trials; ++t) {
        // Random in-box walk.
        LatticePoint cur = zero_point(box.dim());
        for (int ax = 0; ax < box.dim(); ++ax) cur[ax] = rng.range(box.lo[ax], box.hi[ax]);
        std::vector<LatticePoint> walk{cur};
        int len = 1 + static_cast<int>(rng.below(max_len));
        for (int s = 0; s < len; ++s) {
            std::vector<LatticePoint> moves;
            for (int ax = 0; ax < box.dim(); ++ax)
                for (int dir : {+1, -1}) {
                    LatticePoint nxt = cur;
                    nxt[ax] += dir;
                    if (box.contains(nxt)) moves.push_back(nxt);
                }
            if (moves.empty()) break;
            cur = moves[rng.below(moves.size())];
            walk.push_back(cur);
        }
        Path p(walk);
        size_t m = p.edge_count();
        if (m == 0) continue;
        // Prefix sums in double; violations must clear kTauCmp, far above
        // float noise at these path lengths.
        std::vector<VectorValue> pre(m + 1, VectorValue(static_cast<size_t>(A.k), 0.0));
        for (size_t i = 0; i < m; ++i) pre[i + 1] = vadd(pre[i], cfg.vector_value(p.edge(i)));
        auto tau = [&](size_t i, size_t j) { return norm(vsub(pre[j], pre[i])); };
        for (size_t i = 0; i <= m && !rep.found(); ++i)
            for (size_t j = i + 1; j <= m && !rep.found(); ++j) {
                double t_sub = tau(i, j);
                if (j + 1 <= m && t_sub > tau(i, j + 1) + kTauCmp) {
                    rep.violations += 1;
                    rep.sub = p.subpath(i, j);
                    rep.super = p.subpath(i, j + 1);
                    rep.tau_sub = t_sub;
                    rep.tau_super = tau(i, j + 1);
                } else if (i >= 1 && t_sub > tau(i - 1, j) + kTauCmp) {
                    rep.violations += 1;
                    rep.sub = p.subpath(i, j);
                    rep.super = p.subpath(i - 1, j);
                    rep.tau_sub = t_sub;
                    rep.tau_super = tau(i - 1, j);
                }
            }
        if (rep.found()) break;
    }
    return rep;
}

}  // namespace percolab
