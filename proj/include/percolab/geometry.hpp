#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "percolab/errors.hpp"

namespace percolab {

using Coord = std::int64_t;

// ---------------------------------------------------------------------------
// Lattice points of Z^d.
// ---------------------------------------------------------------------------

struct LatticePoint {
    std::vector<Coord> c;

    LatticePoint() = default;
    explicit LatticePoint(std::vector<Coord> coords) : c(std::move(coords)) {}
    LatticePoint(std::initializer_list<Coord> coords) : c(coords) {}

    int dim() const { return static_cast<int>(c.size()); }
    Coord operator[](int i) const { return c[static_cast<size_t>(i)]; }
    Coord& operator[](int i) { return c[static_cast<size_t>(i)]; }

    bool operator==(const LatticePoint& o) const { return c == o.c; }
    bool operator!=(const LatticePoint& o) const { return c != o.c; }
    bool operator<(const LatticePoint& o) const { return c < o.c; }  // lexicographic
};

inline LatticePoint zero_point(int dim) { return LatticePoint(std::vector<Coord>(static_cast<size_t>(dim), 0)); }

// i-th standard unit vector scaled by k.
inline LatticePoint axis_point(int dim, int axis, Coord k) {
    LatticePoint p = zero_point(dim);
    p[axis] = k;
    return p;
}

inline LatticePoint operator+(const LatticePoint& a, const LatticePoint& b) {
    require(a.dim() == b.dim(), ErrorCode::DimensionMismatch, "point addition");
    LatticePoint r = a;
    for (int i = 0; i < a.dim(); ++i) r[i] += b[i];
    return r;
}

inline LatticePoint operator-(const LatticePoint& a, const LatticePoint& b) {
    require(a.dim() == b.dim(), ErrorCode::DimensionMismatch, "point subtraction");
    LatticePoint r = a;
    for (int i = 0; i < a.dim(); ++i) r[i] -= b[i];
    return r;
}

inline Coord l1_norm(const LatticePoint& p) {
    Coord s = 0;
    for (int i = 0; i < p.dim(); ++i) s += std::abs(p[i]);
    return s;
}

inline Coord l1_dist(const LatticePoint& a, const LatticePoint& b) { return l1_norm(a - b); }

inline bool adjacent(const LatticePoint& a, const LatticePoint& b) {
    return a.dim() == b.dim() && l1_dist(a, b) == 1;
}

inline size_t hash_combine(size_t seed, size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

struct LatticePointHash {
    size_t operator()(const LatticePoint& p) const {
        size_t h = 0x51ab2ce1;
        for (Coord x : p.c) h = hash_combine(h, std::hash<Coord>{}(x));
        return h;
    }
};

// ---------------------------------------------------------------------------
// Undirected nearest-neighbour edges, stored in canonical (sorted) order so
// that value lookup is direction-free.
// ---------------------------------------------------------------------------

struct Edge {
    LatticePoint a, b;  // invariant: a < b lexicographically, adjacent(a, b)

    bool operator==(const Edge& o) const { return a == o.a && b == o.b; }
    bool operator<(const Edge& o) const { return a < o.a || (a == o.a && b < o.b); }
};

inline Edge canonical_edge(const LatticePoint& u, const LatticePoint& v) {
    require(u.dim() == v.dim(), ErrorCode::DimensionMismatch, "canonical_edge");
    require(adjacent(u, v), ErrorCode::NotAdjacent, "canonical_edge endpoints must differ by one step");
    return u < v ? Edge{u, v} : Edge{v, u};
}

struct EdgeHash {
    size_t operator()(const Edge& e) const {
        return hash_combine(LatticePointHash{}(e.a), LatticePointHash{}(e.b));
    }
};

// Axis along which the edge runs.
inline int edge_axis(const Edge& e) {
    for (int i = 0; i < e.a.dim(); ++i)
        if (e.a[i] != e.b[i]) return i;
    raise(ErrorCode::InternalError, "degenerate edge");
}

// ---------------------------------------------------------------------------
// Axis-aligned lattice boxes.
// ---------------------------------------------------------------------------

struct Box {
    LatticePoint lo, hi;  // inclusive corners, lo[i] <= hi[i]

    int dim() const { return lo.dim(); }

    bool contains(const LatticePoint& p) const {
        if (p.dim() != dim()) return false;
        for (int i = 0; i < dim(); ++i)
            if (p[i] < lo[i] || p[i] > hi[i]) return false;
        return true;
    }

    bool contains(const Edge& e) const { return contains(e.a) && contains(e.b); }

    std::int64_t vertex_count() const {
        std::int64_t n = 1;
        for (int i = 0; i < dim(); ++i) n *= (hi[i] - lo[i] + 1);
        return n;
    }
};

inline Box make_box(const LatticePoint& lo, const LatticePoint& hi) {
    require(lo.dim() == hi.dim(), ErrorCode::DimensionMismatch, "make_box");
    for (int i = 0; i < lo.dim(); ++i)
        require(lo[i] <= hi[i], ErrorCode::InvalidParams, "box corners out of order");
    return Box{lo, hi};
}

// Cube [-r, r]^d (the lattice ball D_r's bounding box).
inline Box centered_box(int dim, Coord r) {
    LatticePoint lo = zero_point(dim), hi = zero_point(dim);
    for (int i = 0; i < dim; ++i) {
        lo[i] = -r;
        hi[i] = r;
    }
    return Box{lo, hi};
}

inline Box bounding_box(const std::vector<LatticePoint>& pts, Coord pad = 0) {
    require(!pts.empty(), ErrorCode::EmptySet, "bounding_box of nothing");
    Box b{pts[0], pts[0]};
    for (const auto& p : pts)
        for (int i = 0; i < p.dim(); ++i) {
            b.lo[i] = std::min(b.lo[i], p[i]);
            b.hi[i] = std::max(b.hi[i], p[i]);
        }
    for (int i = 0; i < b.dim(); ++i) {
        b.lo[i] -= pad;
        b.hi[i] += pad;
    }
    return b;
}

// Edge lies inside the boundary surface of `box` (both endpoints on a common
// face).
inline bool edge_on_box_boundary(const Edge& e, const Box& box) {
    if (!box.contains(e)) return false;
    for (int i = 0; i < box.dim(); ++i) {
        if (e.a[i] == e.b[i] && (e.a[i] == box.lo[i] || e.a[i] == box.hi[i])) return true;
    }
    return false;
}

// Flat indexing of a box's vertices for array-based searches.
struct BoxIndexer {
    Box box;
    std::vector<std::int64_t> stride;
    std::int64_t count = 0;

    explicit BoxIndexer(const Box& b) : box(b) {
        int d = b.dim();
        stride.assign(static_cast<size_t>(d), 1);
        count = 1;
        for (int i = d - 1; i >= 0; --i) {
            stride[static_cast<size_t>(i)] = count;
            count *= (b.hi[i] - b.lo[i] + 1);
        }
    }

    std::int64_t index(const LatticePoint& p) const {
        std::int64_t ix = 0;
        for (int i = 0; i < box.dim(); ++i) ix += (p[i] - box.lo[i]) * stride[static_cast<size_t>(i)];
        return ix;
    }

    LatticePoint point(std::int64_t ix) const {
        LatticePoint p = zero_point(box.dim());
        for (int i = 0; i < box.dim(); ++i) {
            std::int64_t w = box.hi[i] - box.lo[i] + 1;
            std::int64_t q = (ix / stride[static_cast<size_t>(i)]) % w;
            p[i] = box.lo[i] + q;
        }
        return p;
    }
};

// ---------------------------------------------------------------------------
// Lattice paths: vertex sequences with unit steps.  Loops and revisits are
// allowed; a path is a walk, and passage functionals see each traversal.
// ---------------------------------------------------------------------------

struct Path {
    std::vector<LatticePoint> v;

    Path() = default;
    explicit Path(std::vector<LatticePoint> verts) : v(std::move(verts)) {
        require(!v.empty(), ErrorCode::NotAPath, "empty vertex list");
        for (size_t i = 0; i + 1 < v.size(); ++i)
            require(adjacent(v[i], v[i + 1]), ErrorCode::NotAPath, "consecutive vertices must be adjacent");
    }

    size_t edge_count() const { return v.empty() ? 0 : v.size() - 1; }
    Edge edge(size_t i) const { return canonical_edge(v[i], v[i + 1]); }
    const LatticePoint& front() const { return v.front(); }
    const LatticePoint& back() const { return v.back(); }

    // Contiguous subpath on vertex indices [i, j].
    Path subpath(size_t i, size_t j) const {
        require(i <= j && j < v.size(), ErrorCode::InvalidParams, "subpath indices");
        return Path(std::vector<LatticePoint>(v.begin() + static_cast<std::ptrdiff_t>(i),
                                              v.begin() + static_cast<std::ptrdiff_t>(j) + 1));
    }
};

// ---------------------------------------------------------------------------
// Finite point sets of R^d (flat storage), used for rescaled balls, limit
// shapes and Hausdorff comparisons.
// ---------------------------------------------------------------------------

struct PointSet {
    int dim = 0;
    std::vector<double> xs;  // row-major, size() * dim entries

    PointSet() = default;
    explicit PointSet(int d) : dim(d) {}

    size_t size() const { return dim == 0 ? 0 : xs.size() / static_cast<size_t>(dim); }

    void append(const std::vector<double>& p) {
        require(static_cast<int>(p.size()) == dim, ErrorCode::DimensionMismatch, "PointSet::append");
        xs.insert(xs.end(), p.begin(), p.end());
    }

    double coord(size_t i, int j) const { return xs[i * static_cast<size_t>(dim) + static_cast<size_t>(j)]; }

    std::vector<double> point(size_t i) const {
        auto it = xs.begin() + static_cast<std::ptrdiff_t>(i * static_cast<size_t>(dim));
        return std::vector<double>(it, it + dim);
    }
};

inline double l1_dist(const PointSet& s, size_t i, const PointSet& t, size_t j) {
    double d = 0;
    for (int k = 0; k < s.dim; ++k) d += std::abs(s.coord(i, k) - t.coord(j, k));
    return d;
}

}  // namespace percolab
