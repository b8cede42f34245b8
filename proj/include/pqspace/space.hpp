#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pqspace/error.hpp"
#include "pqspace/rational.hpp"

namespace pqspace {

// Dense row-major storage is the only representation; spaces beyond this
// point count must go through the implicit cube interface instead.
inline constexpr int kMaxDensePoints = 4096;

// Side selector for set distances, neighborhoods and concentration
// functions. "left" uses distances into the point (q(a,x)), "right" uses
// distances out of the point (q(x,a)), "associated" uses max(q,q~). The
// naming follows the neighborhood convention: the left eps-neighborhood of A
// is { x : min_{a in A} q(a,x) < eps }.
enum class Side { left, right, associated };

inline const char* side_name(Side s) {
    switch (s) {
        case Side::left: return "left";
        case Side::right: return "right";
        default: return "associated";
    }
}

enum class ViolationKind { nonneg, self_distance, separation, triangle, mass };

inline const char* violation_kind_name(ViolationKind k) {
    switch (k) {
        case ViolationKind::nonneg: return "nonneg";
        case ViolationKind::self_distance: return "self_distance";
        case ViolationKind::separation: return "separation";
        case ViolationKind::triangle: return "triangle";
        default: return "mass";
    }
}

template <class T>
struct Violation {
    ViolationKind kind;
    std::array<int, 3> witness{-1, -1, -1};
    int witness_count = 0;
    T magnitude{};
};

template <class T>
struct ValidationReportT {
    bool is_quasimetric = false;
    std::vector<Violation<T>> violations;
};

using ValidationReport = ValidationReportT<double>;

template <class T>
struct Tolerances {
    T triangle;
    T mass;

    static Tolerances defaults() {
        return {scalar_traits<T>::default_tolerance(),
                scalar_traits<T>::default_tolerance()};
    }
};

namespace detail {

inline bool scalar_is_nan(double x) { return std::isnan(x); }
inline bool scalar_is_nan(const Rational&) { return false; }

} // namespace detail

// A finite quasi-metric space with probability measure: labels, an n x n
// matrix q (row i = distances from point i) and a measure vector mu.
// Instances are immutable; construction checks shape only, so spaces that
// break quasi-metric axioms can be represented and fed to validate().
template <class T>
class SpaceT {
public:
    SpaceT(std::vector<std::string> labels, std::vector<T> q, std::vector<T> mu)
        : labels_(std::move(labels)), q_(std::move(q)), mu_(std::move(mu)) {
        n_ = static_cast<int>(labels_.size());
        if (n_ <= 0) raise(ErrorKind::invalid_argument, "space needs at least one point");
        if (n_ > kMaxDensePoints)
            raise(ErrorKind::domain,
                  "dense spaces are capped at " + std::to_string(kMaxDensePoints) +
                      " points; use the implicit cube interface for larger spaces");
        if (q_.size() != static_cast<std::size_t>(n_) * n_)
            raise(ErrorKind::invalid_argument, "distance matrix is not n x n");
        if (mu_.size() != static_cast<std::size_t>(n_))
            raise(ErrorKind::invalid_argument, "measure length does not match point count");
    }

    static SpaceT from_matrix(std::vector<std::vector<T>> rows, std::vector<T> mu,
                              std::vector<std::string> labels = {}) {
        const int n = static_cast<int>(rows.size());
        std::vector<T> flat;
        flat.reserve(static_cast<std::size_t>(n) * n);
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != n)
                raise(ErrorKind::invalid_argument, "distance matrix is not square");
            for (const auto& v : row) flat.push_back(v);
        }
        if (labels.empty()) {
            labels.reserve(n);
            for (int i = 0; i < n; ++i) labels.push_back("p" + std::to_string(i));
        }
        return SpaceT(std::move(labels), std::move(flat), std::move(mu));
    }

    int size() const { return n_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<T>& matrix() const { return q_; }
    const std::vector<T>& measure() const { return mu_; }

    const T& q(int i, int j) const { return q_[static_cast<std::size_t>(i) * n_ + j]; }
    const T& mu(int i) const { return mu_[static_cast<std::size_t>(i)]; }

    T diameter() const {
        T d{};
        for (const auto& v : q_)
            if (v > d) d = v;
        return d;
    }

    bool is_symmetric() const {
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                if (q(i, j) != q(j, i)) return false;
        return true;
    }

private:
    int n_;
    std::vector<std::string> labels_;
    std::vector<T> q_;  // row-major, q_[i*n + j] = distance from i to j
    std::vector<T> mu_;
};

using Space = SpaceT<double>;
using RationalSpace = SpaceT<Rational>;

// Checks every Def-1.1 axiom plus the measure constraints and reports each
// violation with a concrete witness. NaN or negative entries are data
// problems, not exceptions: they surface as `nonneg` violations.
template <class T>
ValidationReportT<T> validate(const SpaceT<T>& space,
                              Tolerances<T> tol = Tolerances<T>::defaults()) {
    const int n = space.size();
    ValidationReportT<T> report;
    auto add = [&](ViolationKind kind, std::initializer_list<int> idx, T magnitude) {
        Violation<T> v;
        v.kind = kind;
        v.witness_count = static_cast<int>(idx.size());
        int k = 0;
        for (int i : idx) v.witness[k++] = i;
        v.magnitude = std::move(magnitude);
        report.violations.push_back(std::move(v));
    };

    bool entries_clean = true;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const T& v = space.q(i, j);
            if (detail::scalar_is_nan(v) || v < T(0)) {
                add(ViolationKind::nonneg, {i, j}, v);
                entries_clean = false;
            }
        }
    }

    for (int i = 0; i < n; ++i) {
        const T& d = space.q(i, i);
        if (detail::scalar_is_nan(d) || !(d == T(0))) add(ViolationKind::self_distance, {i}, d);
    }

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (space.q(i, j) == T(0) && space.q(j, i) == T(0))
                add(ViolationKind::separation, {i, j}, T(0));

    if (entries_clean) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                for (int k = 0; k < n; ++k) {
                    if (k == i || k == j) continue;
                    // q(i,k) <= q(i,j) + q(j,k) within tol.triangle
                    T excess = space.q(i, k) - space.q(i, j) - space.q(j, k);
                    if (excess > tol.triangle) add(ViolationKind::triangle, {i, j, k}, excess);
                }
            }
        }
    }

    T mass{};
    for (int i = 0; i < n; ++i) {
        const T& m = space.mu(i);
        if (detail::scalar_is_nan(m) || m < T(0)) add(ViolationKind::mass, {i}, m);
        mass += m;
    }
    T mass_err = mass - T(1);
    if (mass_err < T(0)) mass_err = -mass_err;
    if (detail::scalar_is_nan(mass) || mass_err > tol.mass) add(ViolationKind::mass, {}, mass_err);

    report.is_quasimetric = report.violations.empty();
    return report;
}

template <class T>
ValidationReportT<T> validate(const std::vector<std::vector<T>>& matrix, const std::vector<T>& mu,
                              Tolerances<T> tol = Tolerances<T>::defaults()) {
    return validate(SpaceT<T>::from_matrix(matrix, mu), tol);
}

// Conjugate space: q~(x,y) = q(y,x). Involution; measure unchanged.
template <class T>
SpaceT<T> conjugate(const SpaceT<T>& space) {
    const int n = space.size();
    std::vector<T> q(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q[static_cast<std::size_t>(i) * n + j] = space.q(j, i);
    return SpaceT<T>(space.labels(), std::move(q), space.measure());
}

// Associated metric space: q^(x,y) = max(q(x,y), q(y,x)).
template <class T>
SpaceT<T> associated_metric(const SpaceT<T>& space) {
    const int n = space.size();
    std::vector<T> q(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            q[static_cast<std::size_t>(i) * n + j] = std::max(space.q(i, j), space.q(j, i));
    return SpaceT<T>(space.labels(), std::move(q), space.measure());
}

template <class T>
struct WeightResult {
    std::optional<std::vector<T>> weight; // anchored at w[0] = 0
    T max_residual{};                     // worst |q(i,j)+w(i)-q(j,i)-w(j)|
    std::pair<int, int> witness{-1, -1};
};

// Recovers a generalized weight w with q(x,y)+w(x) = q(y,x)+w(y) when one
// exists. Weights are unique up to an additive constant, so w[0] = 0 anchors
// the candidate w[j] = q(0,j) - q(j,0); the full pair sweep then either
// certifies it or exhibits the inconsistent pair.
template <class T>
WeightResult<T> recover_weight(const SpaceT<T>& space,
                               T tolerance = scalar_traits<T>::default_tolerance()) {
    const int n = space.size();
    std::vector<T> w(n);
    for (int j = 0; j < n; ++j) w[j] = space.q(0, j) - space.q(j, 0);

    WeightResult<T> result;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            T residual = space.q(i, j) + w[i] - space.q(j, i) - w[j];
            if (residual < T(0)) residual = -residual;
            if (residual > result.max_residual) {
                result.max_residual = residual;
                result.witness = {i, j};
            }
        }
    }
    if (result.max_residual <= tolerance) result.weight = std::move(w);
    return result;
}

// Distance from point x to the nonempty set A on the requested side.
// left: min over a in A of q(a,x); right: min of q(x,a); associated: min of
// max(q(x,a), q(a,x)).
template <class T>
T set_distance(const SpaceT<T>& space, int x, std::span<const int> A, Side side) {
    if (A.empty()) raise(ErrorKind::invalid_argument, "set_distance over empty set");
    bool first = true;
    T best{};
    for (int a : A) {
        T d;
        switch (side) {
            case Side::left: d = space.q(a, x); break;
            case Side::right: d = space.q(x, a); break;
            default: d = std::max(space.q(x, a), space.q(a, x)); break;
        }
        if (first || d < best) {
            best = std::move(d);
            first = false;
        }
    }
    return best;
}

// Open eps-neighborhood of A (strict inequality, per the definition); always
// contains A. Returned as sorted point indices.
template <class T>
std::vector<int> neighborhood(const SpaceT<T>& space, std::span<const int> A, const T& eps,
                              Side side) {
    if (A.empty()) raise(ErrorKind::invalid_argument, "neighborhood of empty set");
    if (!(eps > T(0)))
        raise(ErrorKind::invalid_argument, "neighborhood radius must be positive");
    std::vector<int> out;
    for (int x = 0; x < space.size(); ++x)
        if (set_distance(space, x, A, side) < eps) out.push_back(x);
    return out;
}

} // namespace pqspace
