#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "percolab/config.hpp"
#include "percolab/rational.hpp"
#include "percolab/values.hpp"

namespace percolab {

// All cone arithmetic is exact: inputs arrive as doubles or rationals, and a
// double is itself a rational, so certificates are decided by exact pivoting
// and merely *re-verified* within kTauCone by callers working in floats.

using RatVec = std::vector<Rational>;

inline Rational rational_from_double(double x) {
    require(std::isfinite(x), ErrorCode::MalformedInput, "non-finite value");
    return Rational(x);  // binary doubles convert exactly
}

inline RatVec rat_vec(const VectorValue& v) {
    RatVec r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r[i] = rational_from_double(v[i]);
    return r;
}

inline VectorValue double_vec(const RatVec& v) {
    VectorValue r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r[i] = to_double(v[i]);
    return r;
}

inline Rational rat_dot(const RatVec& a, const RatVec& b) {
    require(a.size() == b.size(), ErrorCode::DimensionMismatch, "dot product");
    Rational s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Rational rat_norm_sq(const RatVec& a) { return rat_dot(a, a); }

inline double rat_norm(const RatVec& a) { return std::sqrt(to_double(rat_norm_sq(a))); }

struct FiniteVectorSet {
    int k = 0;
    std::vector<RatVec> vectors;

    FiniteVectorSet() = default;
    explicit FiniteVectorSet(std::vector<RatVec> vs) : vectors(std::move(vs)) {
        require(!vectors.empty(), ErrorCode::EmptySet, "vector set must be nonempty");
        k = static_cast<int>(vectors[0].size());
        require(k >= 1, ErrorCode::InvalidParams, "vector set needs dimension >= 1");
        for (const auto& v : vectors)
            require(static_cast<int>(v.size()) == k, ErrorCode::DimensionMismatch, "mixed dimensions in vector set");
        for (size_t i = 0; i < vectors.size(); ++i)
            for (size_t j = i + 1; j < vectors.size(); ++j)
                require(vectors[i] != vectors[j], ErrorCode::InvalidParams, "duplicate vector in set");
    }

    size_t size() const { return vectors.size(); }
};

inline FiniteVectorSet vector_set_from_doubles(const std::vector<VectorValue>& vs) {
    std::vector<RatVec> out;
    out.reserve(vs.size());
    for (const auto& v : vs) out.push_back(rat_vec(v));
    return FiniteVectorSet(std::move(out));
}

// ---------------------------------------------------------------------------
// Exact phase-1 simplex with Bland's rule.  Decides {x >= 0 : M x = b} and
// produces either the solution or a dual vector y with y'M <= 0, y'b > 0.
// ---------------------------------------------------------------------------

namespace detail {

struct Phase1Result {
    bool feasible = false;
    std::vector<Rational> x;  // size n, when feasible
    std::vector<Rational> y;  // size k, when infeasible
};

inline Phase1Result phase1_simplex(int k, int n, std::vector<RatVec> rows, RatVec b) {
    // Sign-normalize so the right-hand side is nonnegative.
    std::vector<int> sign(static_cast<size_t>(k), 1);
    for (int i = 0; i < k; ++i)
        if (b[static_cast<size_t>(i)] < 0) {
            sign[static_cast<size_t>(i)] = -1;
            b[static_cast<size_t>(i)] = -b[static_cast<size_t>(i)];
            for (auto& e : rows[static_cast<size_t>(i)]) e = -e;
        }
    // Tableau columns: n structural + k artificial.
    int cols = n + k;
    std::vector<RatVec> t(static_cast<size_t>(k), RatVec(static_cast<size_t>(cols), Rational(0)));
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < n; ++j) t[static_cast<size_t>(i)][static_cast<size_t>(j)] = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
        t[static_cast<size_t>(i)][static_cast<size_t>(n + i)] = 1;
    }
    std::vector<int> basis(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) basis[static_cast<size_t>(i)] = n + i;

    auto reduced_cost = [&](int j) {
        // c_j minus the weighted column sum over rows whose basis var is artificial.
        Rational r = (j >= n) ? 1 : 0;
        for (int i = 0; i < k; ++i)
            if (basis[static_cast<size_t>(i)] >= n) r -= t[static_cast<size_t>(i)][static_cast<size_t>(j)];
        return r;
    };

    while (true) {
        int enter = -1;
        for (int j = 0; j < cols; ++j)
            if (reduced_cost(j) < 0) {
                enter = j;
                break;  // Bland: smallest index
            }
        if (enter < 0) break;
        int leave = -1;
        Rational best_ratio = 0;
        for (int i = 0; i < k; ++i) {
            const Rational& piv = t[static_cast<size_t>(i)][static_cast<size_t>(enter)];
            if (piv <= 0) continue;
            Rational ratio = b[static_cast<size_t>(i)] / piv;
            if (leave < 0 || ratio < best_ratio ||
                (ratio == best_ratio && basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)]))
                leave = i, best_ratio = ratio;
        }
        require(leave >= 0, ErrorCode::InternalError, "phase-1 objective unbounded");
        // Pivot.
        Rational piv = t[static_cast<size_t>(leave)][static_cast<size_t>(enter)];
        for (auto& e : t[static_cast<size_t>(leave)]) e /= piv;
        b[static_cast<size_t>(leave)] /= piv;
        for (int i = 0; i < k; ++i) {
            if (i == leave) continue;
            Rational f = t[static_cast<size_t>(i)][static_cast<size_t>(enter)];
            if (f == 0) continue;
            for (int j = 0; j < cols; ++j)
                t[static_cast<size_t>(i)][static_cast<size_t>(j)] -= f * t[static_cast<size_t>(leave)][static_cast<size_t>(j)];
            b[static_cast<size_t>(i)] -= f * b[static_cast<size_t>(leave)];
        }
        basis[static_cast<size_t>(leave)] = enter;
    }

    Rational opt = 0;
    for (int i = 0; i < k; ++i)
        if (basis[static_cast<size_t>(i)] >= n) opt += b[static_cast<size_t>(i)];

    Phase1Result out;
    if (opt == 0) {
        out.feasible = true;
        out.x.assign(static_cast<size_t>(n), Rational(0));
        for (int i = 0; i < k; ++i)
            if (basis[static_cast<size_t>(i)] < n) out.x[static_cast<size_t>(basis[static_cast<size_t>(i)])] = b[static_cast<size_t>(i)];
    } else {
        // Dual from artificial reduced costs: y_j = 1 - r_{n+j}, undone through
        // the row sign flips.
        out.y.assign(static_cast<size_t>(k), Rational(0));
        for (int j = 0; j < k; ++j) {
            Rational yj = Rational(1) - reduced_cost(n + j);
            out.y[static_cast<size_t>(j)] = Rational(sign[static_cast<size_t>(j)]) * yj;
        }
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Cone membership with self-verifying certificates.
// ---------------------------------------------------------------------------

struct ConeCertificate {
    bool member = false;
    std::vector<Rational> coefficients;  // per element of A, when member
    RatVec separator;                    // (w,a) >= 0 for all a in A, (w,v) < 0, when not
};

inline bool certificate_verifies(const ConeCertificate& cert, const RatVec& v, const FiniteVectorSet& A) {
    if (cert.member) {
        if (cert.coefficients.size() != A.size()) return false;
        RatVec sum(static_cast<size_t>(A.k), Rational(0));
        for (size_t i = 0; i < A.size(); ++i) {
            if (cert.coefficients[i] < 0) return false;
            for (int j = 0; j < A.k; ++j) sum[static_cast<size_t>(j)] += cert.coefficients[i] * A.vectors[i][static_cast<size_t>(j)];
        }
        return sum == v;
    }
    if (cert.separator.size() != static_cast<size_t>(A.k)) return false;
    for (const auto& a : A.vectors)
        if (rat_dot(cert.separator, a) < 0) return false;
    return rat_dot(cert.separator, v) < 0;
}

inline ConeCertificate in_cone(const RatVec& v, const FiniteVectorSet& A) {
    require(static_cast<int>(v.size()) == A.k, ErrorCode::DimensionMismatch, "in_cone point dimension");
    int k = A.k, n = static_cast<int>(A.size());
    std::vector<RatVec> rows(static_cast<size_t>(k), RatVec(static_cast<size_t>(n)));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < n; ++j) rows[static_cast<size_t>(i)][static_cast<size_t>(j)] = A.vectors[static_cast<size_t>(j)][static_cast<size_t>(i)];
    auto r = detail::phase1_simplex(k, n, std::move(rows), v);
    ConeCertificate cert;
    if (r.feasible) {
        cert.member = true;
        cert.coefficients = std::move(r.x);
    } else {
        cert.member = false;
        cert.separator.assign(static_cast<size_t>(k), Rational(0));
        for (int j = 0; j < k; ++j) cert.separator[static_cast<size_t>(j)] = -r.y[static_cast<size_t>(j)];
    }
    require(certificate_verifies(cert, v, A), ErrorCode::InternalError, "cone certificate failed self-check");
    return cert;
}

inline ConeCertificate in_cone(const VectorValue& v, const std::vector<VectorValue>& A) {
    return in_cone(rat_vec(v), vector_set_from_doubles(A));
}

// ---------------------------------------------------------------------------
// Predicates on finite vector sets.
// ---------------------------------------------------------------------------

inline bool is_strongly_positively_dependent(const FiniteVectorSet& A) {
    for (const auto& a : A.vectors) {
        RatVec neg(a.size());
        for (size_t i = 0; i < a.size(); ++i) neg[i] = -a[i];
        if (!in_cone(neg, A).member) return false;
    }
    return true;
}

// 0 lies in the interior of conv(A) for finite A exactly when cone(A) is the
// whole space, i.e. when every signed coordinate direction is in the cone.
inline bool conv_contains_origin_interior(const FiniteVectorSet& A) {
    for (int j = 0; j < A.k; ++j) {
        for (int s : {+1, -1}) {
            RatVec dir(static_cast<size_t>(A.k), Rational(0));
            dir[static_cast<size_t>(j)] = s;
            if (!in_cone(dir, A).member) return false;
        }
    }
    return true;
}

inline bool is_positive(const FiniteVectorSet& A) {
    Rational slack = -rational_from_double(kTauCone);
    for (size_t i = 0; i < A.size(); ++i)
        for (size_t j = i; j < A.size(); ++j)
            if (rat_dot(A.vectors[i], A.vectors[j]) < slack) return false;
    return true;
}

inline bool is_positive(const std::vector<VectorValue>& A) { return is_positive(vector_set_from_doubles(A)); }

inline bool is_ray_contained(const FiniteVectorSet& A) {
    const RatVec* dir = nullptr;
    for (const auto& a : A.vectors)
        if (rat_norm_sq(a) != 0) {
            dir = &a;
            break;
        }
    if (!dir) return true;  // only zero vectors
    for (const auto& a : A.vectors) {
        if (rat_norm_sq(a) == 0) continue;
        // Proportional to *dir with a positive factor.
        for (int i = 0; i < A.k; ++i)
            for (int j = i + 1; j < A.k; ++j)
                if (a[static_cast<size_t>(i)] * (*dir)[static_cast<size_t>(j)] !=
                    a[static_cast<size_t>(j)] * (*dir)[static_cast<size_t>(i)])
                    return false;
        if (rat_dot(a, *dir) <= 0) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Truncated monoid M(A): sums with nonnegative integer coefficients of even
// total, total <= max_total.
// ---------------------------------------------------------------------------

inline std::vector<RatVec> monoid_elements(const FiniteVectorSet& A, int max_total) {
    require(max_total >= 0 && max_total % 2 == 0, ErrorCode::InvalidParams, "maxTotal must be even and nonnegative");
    std::set<RatVec> seen;
    std::vector<int> counts(A.size(), 0);
    auto rec = [&](auto&& self, size_t idx, int used) -> void {
        if (idx == A.size()) {
            if (used % 2 != 0) return;
            RatVec sum(static_cast<size_t>(A.k), Rational(0));
            for (size_t i = 0; i < A.size(); ++i)
                for (int j = 0; j < A.k; ++j) sum[static_cast<size_t>(j)] += Rational(counts[i]) * A.vectors[i][static_cast<size_t>(j)];
            seen.insert(std::move(sum));
            return;
        }
        for (int c = 0; used + c <= max_total; ++c) {
            counts[idx] = c;
            self(self, idx + 1, used + c);
        }
        counts[idx] = 0;
    };
    rec(rec, 0, 0);
    return std::vector<RatVec>(seen.begin(), seen.end());
}

// Express a monoid element as explicit counts: nonnegative integers with even
// total and sum_i counts[i] a_i = m. Smallest total (then lexicographically
// smallest counts) wins so results are deterministic.
inline std::optional<std::vector<int>> monoid_decompose(const FiniteVectorSet& A, const RatVec& m, int max_total) {
    require(max_total >= 0 && max_total % 2 == 0, ErrorCode::InvalidParams, "maxTotal must be even and nonnegative");
    require(m.size() == static_cast<size_t>(A.k), ErrorCode::DimensionMismatch, "monoid target dimension");
    std::vector<int> counts(A.size(), 0);
    for (int total = 0; total <= max_total; total += 2) {
        std::optional<std::vector<int>> found;
        auto rec = [&](auto&& self, size_t idx, int left) -> bool {
            if (idx == A.size()) {
                if (left != 0) return false;
                RatVec sum(static_cast<size_t>(A.k), Rational(0));
                for (size_t i = 0; i < A.size(); ++i)
                    for (int j = 0; j < A.k; ++j) sum[static_cast<size_t>(j)] += Rational(counts[i]) * A.vectors[i][static_cast<size_t>(j)];
                if (sum != m) return false;
                found = counts;
                return true;
            }
            for (int c = 0; c <= left; ++c) {
                counts[idx] = c;
                if (self(self, idx + 1, left - c)) return true;
            }
            counts[idx] = 0;
            return false;
        };
        if (rec(rec, 0, total)) return found;
    }
    return std::nullopt;
}

// Truncated proxy for the odd-parity passage target: min ||m + a||.
inline double min_norm_odd_target(const FiniteVectorSet& A, int max_total) {
    auto ms = monoid_elements(A, max_total);
    bool any = false;
    Rational best_sq = 0;
    for (const auto& m : ms)
        for (const auto& a : A.vectors) {
            RatVec s(m.size());
            for (size_t i = 0; i < m.size(); ++i) s[i] = m[i] + a[i];
            Rational nsq = rat_norm_sq(s);
            if (!any || nsq < best_sq) {
                best_sq = nsq;
                any = true;
            }
        }
    require(any, ErrorCode::EmptySet, "no odd-parity combination");
    return std::sqrt(to_double(best_sq));
}

// ---------------------------------------------------------------------------
// Simultaneous Dirichlet approximation: scan q = 1..Q with p_i = round(q r_i)
// and accept the first q meeting |p_i/q - r_i| < 1/(q Q^{1/k}) for all i.
// The comparison is exact: e < 1/(q Q^{1/k})  <=>  e^k q^k Q < 1.
// ---------------------------------------------------------------------------

struct DirichletResult {
    std::vector<Integer> p;
    std::int64_t q = 0;
};

inline DirichletResult dirichlet_approx(const std::vector<Rational>& r, std::int64_t Q) {
    require(Q >= 1, ErrorCode::InvalidParams, "Q must be >= 1");
    require(!r.empty(), ErrorCode::InvalidParams, "empty target vector");
    for (const auto& ri : r) require(ri >= 0, ErrorCode::InvalidParams, "targets must be nonnegative");
    int k = static_cast<int>(r.size());
    for (std::int64_t q = 1; q <= Q; ++q) {
        std::vector<Integer> p(r.size());
        bool ok = true;
        for (size_t i = 0; i < r.size() && ok; ++i) {
            Integer pi = rat_round(Rational(q) * r[i]);
            if (pi < 0) pi = 0;
            p[i] = pi;
            Rational err = rat_abs(Rational(pi, 1) / Rational(q) - r[i]);
            Rational lhs = 1;
            for (int t = 0; t < k; ++t) lhs *= err * Rational(q);
            if (!(lhs * Rational(Q) < 1)) ok = false;
        }
        if (ok) return DirichletResult{std::move(p), q};
    }
    raise(ErrorCode::NoApproximant, "Dirichlet scan exhausted — contract bug");
}

inline DirichletResult dirichlet_approx(const std::vector<double>& r, std::int64_t Q) {
    std::vector<Rational> rr(r.size());
    for (size_t i = 0; i < r.size(); ++i) rr[i] = rational_from_double(r[i]);
    return dirichlet_approx(rr, Q);
}

// Smallest Q with eps/4 + 2 (sum of norms) Q^{-1/k} < eps/3, found by direct
// solve and then nudged until the float check clears.
inline std::int64_t choose_dirichlet_Q(double eps, const FiniteVectorSet& A) {
    require(eps > 0, ErrorCode::InvalidParams, "eps must be positive");
    double S = 0;
    for (const auto& a : A.vectors) S += rat_norm(a);
    double base = std::pow(24.0 * S / eps, static_cast<double>(A.k));
    require(base < 9e17, ErrorCode::InvalidParams, "required Q exceeds integer range");
    std::int64_t Q = static_cast<std::int64_t>(std::floor(base)) + 1;
    while (eps / 4.0 + 2.0 * S / std::pow(static_cast<double>(Q), 1.0 / A.k) >= eps / 3.0) {
        require(Q < (std::int64_t{1} << 61), ErrorCode::InvalidParams, "required Q exceeds integer range");
        Q *= 2;
    }
    return Q;
}

// ---------------------------------------------------------------------------
// Caratheodory-style decomposition: membership coefficients supported on at
// most k elements (free from the basic solution of the simplex).
// ---------------------------------------------------------------------------

inline std::vector<Rational> caratheodory_decompose(const RatVec& v, const FiniteVectorSet& A) {
    ConeCertificate cert = in_cone(v, A);
    require(cert.member, ErrorCode::NotInCone, "caratheodory_decompose: point outside the cone");
    size_t support = 0;
    for (const auto& c : cert.coefficients)
        if (c != 0) ++support;
    require(support <= static_cast<size_t>(A.k), ErrorCode::InternalError, "basic solution exceeded dimension support");
    return cert.coefficients;
}

// ---------------------------------------------------------------------------
// JSON adapters.
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const ConeCertificate& cert) {
    nlohmann::json j;
    j["member"] = cert.member;
    if (cert.member) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : cert.coefficients) arr.push_back(detail::rational_to_json(c));
        j["coefficients"] = arr;
    } else {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& w : cert.separator) arr.push_back(detail::rational_to_json(w));
        j["separator"] = arr;
    }
    return j;
}

inline nlohmann::json to_json(const FiniteVectorSet& A) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : A.vectors) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& x : v) row.push_back(detail::rational_to_json(x));
        arr.push_back(row);
    }
    return arr;
}

inline FiniteVectorSet vector_set_from_json(const nlohmann::json& j) {
    require(j.is_array() && !j.empty(), ErrorCode::MalformedInput, "vector set JSON must be a nonempty array");
    std::vector<RatVec> vs;
    for (const auto& row : j) {
        require(row.is_array(), ErrorCode::MalformedInput, "vector JSON must be an array");
        RatVec v;
        for (const auto& x : row) v.push_back(detail::rational_from_json(x));
        vs.push_back(std::move(v));
    }
    try {
        return FiniteVectorSet(std::move(vs));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        raise(ErrorCode::MalformedInput, e.what());
    }
}

}  // namespace percolab
