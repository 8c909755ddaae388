#ifndef LIPFREE_BASES_HPP
#define LIPFREE_BASES_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "lipfree/freecore.hpp"
#include "lipfree/qmetric.hpp"

namespace lipfree {

enum class BasisKind { natural_N, haar_dyadic };

/// One Haar molecule: h_0 (level -1) or h_J = delta(a) + delta(b) - 2 delta(c)
/// with J = [a, b] and c its midpoint. Indices refer to the ambient grid.
struct HaarTerm {
    int level = -1;
    double a = 0.0, b = 1.0, c = 0.5;
    std::size_t ia = 0, ib = 0, ic = 0;
};

struct BasisSystem {
    BasisKind kind = BasisKind::natural_N;
    SpacePtr ambient;
    /// Delta-coordinates of the ordered basis vectors.
    std::vector<std::vector<double>> vectors;
    /// projections[j] maps onto the span of the first j vectors, j = 0..size.
    std::vector<FreeOperator> projections;
    /// Haar layout; empty for the natural basis.
    std::vector<HaarTerm> haar;
};

// ---------------------------------------------------------------------------
// Natural basis of F_p(Z[0,m]).

/// Matrix of P[k,j]: delta(n) -> delta(max{k, min{n, j}}) - delta(k) on Z[0,m].
[[nodiscard]] MatrixD retraction_projection(std::size_t m, std::size_t k, std::size_t j);

/// x_n = delta(n) - delta(n-1), n = 1..m, with partial sums P_j = P[0,j].
[[nodiscard]] BasisSystem natural_basis(std::size_t m, double p);

// ---------------------------------------------------------------------------
// Interval interpolation projections.

/// Delta-coordinate matrix of P_{K1,K2}: x in K2 goes to delta(x); otherwise
/// to ((b-x)/(b-a)) delta(a) + ((x-a)/(b-a)) delta(b) with a, b the neighbours
/// of x in K2. Both grids sorted ascending, starting at 0, K2 a subset of K1.
template <typename T>
[[nodiscard]] Matrix<T> interval_projection_matrix(const std::vector<T>& K1, const std::vector<T>& K2) {
    if (K1.empty() || K2.empty() || K1.front() != T(0) || K2.front() != T(0))
        throw StructuralError("grids must start at 0");
    if (!std::is_sorted(K1.begin(), K1.end()) || !std::is_sorted(K2.begin(), K2.end()))
        throw StructuralError("grids must be sorted");
    if (!std::includes(K1.begin(), K1.end(), K2.begin(), K2.end()))
        throw StructuralError("K2 is not contained in K1");
    if (K1.back() != K2.back()) throw StructuralError("K2 must contain the largest point of K1");
    Matrix<T> out(K2.size() - 1, K1.size() - 1);
    std::size_t hi = 0;
    for (std::size_t i = 1; i < K1.size(); ++i) {
        const T& x = K1[i];
        while (K2[hi] < x) ++hi;
        if (K2[hi] == x) {
            out(hi - 1, i - 1) = T(1);
            continue;
        }
        const T& a = K2[hi - 1];
        const T& b = K2[hi];
        if (hi - 1 > 0) out(hi - 2, i - 1) = (b - x) / (b - a);
        out(hi - 1, i - 1) = (x - a) / (b - a);
    }
    return out;
}

/// Matrix of the canonical map F_p(K2) -> F_p(K1).
template <typename T>
[[nodiscard]] Matrix<T> grid_embedding_matrix(const std::vector<T>& K1, const std::vector<T>& K2) {
    Matrix<T> out(K1.size() - 1, K2.size() - 1);
    for (std::size_t j = 1; j < K2.size(); ++j) {
        const auto it = std::lower_bound(K1.begin(), K1.end(), K2[j]);
        if (it == K1.end() || *it != K2[j]) throw StructuralError("K2 is not contained in K1");
        out(static_cast<std::size_t>(it - K1.begin()) - 1, j - 1) = T(1);
    }
    return out;
}

/// P_{K1,K2} between the grid spaces (custom grids in [0,1]).
[[nodiscard]] FreeOperator interval_projection(const std::vector<double>& K1, const std::vector<double>& K2, double p);
/// L_{K1,K2}.
[[nodiscard]] FreeOperator grid_embedding(const std::vector<double>& K1, const std::vector<double>& K2, double p);

// ---------------------------------------------------------------------------
// Haar system on dyadic grids.

constexpr std::size_t kHaarCap = 4;

/// h_0 first, then dyadic intervals of level 0..N-1 (bigger first, left to
/// right within a level). P_n = L o P_{D,K_n} with D = dyadic(N).
[[nodiscard]] BasisSystem haar_system(std::size_t N, double p, std::size_t cap = kHaarCap);

// ---------------------------------------------------------------------------
// Diagnostics.

struct BasisCheck {
    /// max |P_i P_j - P_min(i,j)|.
    double composition = 0.0;
    /// max |P_j v_n - v_n| over n < j.
    double reproduction = 0.0;
    /// max |P_j v_n| over n >= j.
    double annihilation = 0.0;
};

[[nodiscard]] BasisCheck check_basis(const BasisSystem& system);

struct BasisConstant {
    double value = 0.0;
    std::size_t index = 0;
    /// max ||P_j - P_k|| over k < j; computed only on request.
    double bimonotone = 0.0;
    std::size_t bimonotone_k = 0;
    std::size_t bimonotone_j = 0;
};

[[nodiscard]] BasisConstant basis_constant(const BasisSystem& system, bool bimonotone = false);

struct ConditionalityRow {
    std::size_t m = 0;
    /// ||x_1 + ... + x_m||.
    double sum_norm = 0.0;
    /// (sum ||x_n||^p)^(1/p) = m^(1/p).
    double lp_aggregate = 0.0;
    /// ||sum_n (-1)^n x_n||.
    double alternating = 0.0;
    /// alternating / sum_norm.
    double ratio = 0.0;
};

/// Rows for m = 1..m_max on Z[0,m].
[[nodiscard]] std::vector<ConditionalityRow> conditionality_witness(std::size_t m_max, double p);

struct BridgeReport {
    double max_relative_error = 0.0;
    std::size_t samples = 0;
};

/// Compares ||mu|| on dyadic(N) with 2^(-N) ||mu|| on Z[0, 2^N] for random
/// molecules and all elementary molecules.
[[nodiscard]] BridgeReport scaling_bridge(std::size_t N, double p, std::size_t samples, std::uint64_t seed);

}  // namespace lipfree

#endif
