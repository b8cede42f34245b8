#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "pqspace/concentration.hpp"
#include "pqspace/rng.hpp"
#include "pqspace/space.hpp"

namespace helpers {

using pqspace::Rational;
using pqspace::Rng;
using pqspace::Side;

// Random valid pq-space: positive entries, min-plus closure for the triangle
// inequality, integer-weight measure. Entries are twelfths so the rational
// instantiation exercises non-dyadic values.
template <class T>
pqspace::SpaceT<T> random_space(Rng& rng, int n, bool symmetric = false,
                                bool allow_zero_mass = false) {
    std::vector<T> q(static_cast<std::size_t>(n) * n, T(0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            q[static_cast<std::size_t>(i) * n + j] =
                T(static_cast<int>(1 + rng.below(24))) / T(12);
        }
    if (symmetric)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                q[static_cast<std::size_t>(j) * n + i] = q[static_cast<std::size_t>(i) * n + j];
    // Min-plus closure; preserves symmetry and positivity.
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                T via = q[static_cast<std::size_t>(i) * n + k] +
                        q[static_cast<std::size_t>(k) * n + j];
                if (k != i && k != j && via < q[static_cast<std::size_t>(i) * n + j])
                    q[static_cast<std::size_t>(i) * n + j] = via;
            }

    std::vector<T> mu(n);
    long total = 0;
    std::vector<long> w(n);
    for (int i = 0; i < n; ++i) {
        w[i] = allow_zero_mass ? static_cast<long>(rng.below(10))
                               : static_cast<long>(1 + rng.below(9));
        total += w[i];
    }
    if (total == 0) {
        w[0] = 1;
        total = 1;
    }
    for (int i = 0; i < n; ++i) mu[i] = T(static_cast<int>(w[i])) / T(static_cast<int>(total));

    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) labels.push_back("x" + std::to_string(i));
    return pqspace::SpaceT<T>(std::move(labels), std::move(q), std::move(mu));
}

// The paper's two-point example: mu = (2/3, 1/3), q(a,b) = 1, q(b,a) = 1/n.
template <class T>
pqspace::SpaceT<T> levy_two_point(int n) {
    return pqspace::SpaceT<T>({"a", "b"}, {T(0), T(1), T(1) / T(n), T(0)},
                              {T(2) / T(3), T(1) / T(3)});
}

// Independent oracle for alpha_exact: plain subset loop, neighborhoods via
// the public set-distance path, measures summed in index order. No bitmask
// reach tricks, no Gray ordering.
template <class T>
pqspace::AlphaResult<T> naive_alpha(const pqspace::SpaceT<T>& space, const T& eps, Side side) {
    const int n = space.size();
    const T half = T(1) / T(2);
    bool found = false;
    T best_covered{};
    std::uint32_t best_mask = 0;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        T mass{};
        std::vector<int> members;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) {
                mass += space.mu(i);
                members.push_back(i);
            }
        if (!(mass >= half)) continue;
        auto nbhd = pqspace::neighborhood(space, std::span<const int>(members), eps, side);
        T covered{};
        for (int i : nbhd) covered += space.mu(i);
        if (!found || covered < best_covered ||
            (covered == best_covered && mask < best_mask)) {
            found = true;
            best_covered = covered;
            best_mask = mask;
        }
    }
    return {T(1) - best_covered, best_mask};
}

inline std::vector<int> mask_members(std::uint32_t mask) {
    std::vector<int> out;
    for (std::uint32_t m = mask; m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
    return out;
}

} // namespace helpers
