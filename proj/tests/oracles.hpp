// Independent reference computations used only by the tests.
#ifndef LIPFREE_TESTS_ORACLES_HPP
#define LIPFREE_TESTS_ORACLES_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "lipfree/common.hpp"
#include "lipfree/qmetric.hpp"

namespace oracle {

template <typename T>
inline T abs_value(const T& v) {
    return v < T(0) ? T(-v) : v;
}

template <typename T>
inline bool negligible(const T& v, const T& scale) {
    if constexpr (std::is_same_v<T, lipfree::Rational>) {
        (void)scale;
        return v == 0;
    } else {
        return abs_value(v) <= T(1e-10) * scale;
    }
}

/// Solves A_S lambda = b for a column subset by Gaussian elimination with
/// partial pivoting. Returns nothing when the columns are dependent or the
/// system is inconsistent.
template <typename T>
std::optional<std::vector<T>> solve_subset(const std::vector<std::vector<T>>& columns, const std::vector<int>& subset,
                                           const std::vector<T>& b) {
    const std::size_t rows = b.size(), k = subset.size();
    std::vector<std::vector<T>> m(rows, std::vector<T>(k + 1));
    T scale(0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            m[r][c] = columns[static_cast<std::size_t>(subset[c])][r];
            if (abs_value(m[r][c]) > scale) scale = abs_value(m[r][c]);
        }
        m[r][k] = b[r];
    }
    if (scale == T(0)) scale = T(1);
    std::size_t row = 0;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = row;
        for (std::size_t r = row; r < rows; ++r)
            if (abs_value(m[r][c]) > abs_value(m[piv][c])) piv = r;
        if (piv >= rows || negligible(m[piv][c], scale)) return std::nullopt;
        std::swap(m[piv], m[row]);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == row || m[r][c] == T(0)) continue;
            const T f = m[r][c] / m[row][c];
            for (std::size_t j = c; j <= k; ++j) m[r][j] -= f * m[row][j];
        }
        ++row;
    }
    T bscale(1);
    for (const T& v : b)
        if (abs_value(v) > bscale) bscale = abs_value(v);
    for (std::size_t r = k; r < rows; ++r)
        if (!negligible(m[r][k], bscale)) return std::nullopt;
    std::vector<T> lambda(k);
    for (std::size_t c = 0; c < k; ++c) lambda[c] = m[c][k] / m[c][c];
    return lambda;
}

/// Literal support enumeration of min sum |lambda|^p over all independent
/// column subsets of size <= n-1 of the elementary-molecule matrix. Columns
/// are (e_y - e_x) / d(x, y) in delta-coordinates. Returns the norm.
template <typename T>
double subset_norm(const std::vector<std::vector<T>>& dist, double p, const std::vector<T>& delta) {
    const std::size_t n = dist.size();
    std::vector<std::vector<T>> columns;
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y) {
            std::vector<T> col(n - 1, T(0));
            col[y - 1] += T(1) / dist[x][y];
            if (x != 0) col[x - 1] -= T(1) / dist[x][y];
            columns.push_back(col);
        }
    bool zero = true;
    for (const T& v : delta) zero = zero && v == T(0);
    if (zero) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    const int total = static_cast<int>(columns.size());
    std::vector<int> subset;
    // Depth-first over increasing index subsets.
    auto recurse = [&](auto&& self, int start) -> void {
        if (!subset.empty()) {
            if (auto sol = solve_subset(columns, subset, delta)) {
                double cost = 0.0;
                for (const T& l : *sol) cost += std::pow(std::abs(static_cast<double>(l)), p);
                best = std::min(best, cost);
            }
        }
        if (subset.size() == n - 1) return;
        for (int c = start; c < total; ++c) {
            subset.push_back(c);
            self(self, c + 1);
            subset.pop_back();
        }
    };
    recurse(recurse, 0);
    return std::pow(best, 1.0 / p);
}

inline double subset_norm(const lipfree::PMetricSpace& space, const std::vector<double>& delta) {
    return subset_norm<double>(space.matrix(), space.p(), delta);
}

/// Random p-metric: Euclidean points in the plane, distances raised to an
/// exponent in [1, 1/p] (a p-metric because |x-y|^(1/p) is one).
inline lipfree::PMetricSpace random_space(std::size_t n, double p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::pair<double, double>> pts(n);
    for (auto& pt : pts) pt = {u(rng), u(rng)};
    const double e = 1.0 + u(rng) * (1.0 / p - 1.0);
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = pts[i].first - pts[j].first, dy = pts[i].second - pts[j].second;
            d[i][j] = d[j][i] = std::pow(std::sqrt(dx * dx + dy * dy) + 1e-3, e);
        }
    return lipfree::PMetricSpace({}, d, p);
}

inline std::vector<double> random_delta(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n - 1);
    for (auto& x : v) x = u(rng);
    return v;
}

}  // namespace oracle

#endif
