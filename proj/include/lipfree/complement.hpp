#ifndef LIPFREE_COMPLEMENT_HPP
#define LIPFREE_COMPLEMENT_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "lipfree/freecore.hpp"
#include "lipfree/qmetric.hpp"

namespace lipfree {

// ---------------------------------------------------------------------------
// l_p-sums of free spaces.

/// T : (sum_a F_p(M_a))_p -> F_p(M) assembled from the canonical maps of the
/// parts. Sum coordinates are the concatenated delta-coordinates of the parts.
struct SumIsomorphism {
    std::vector<SpacePtr> parts;
    /// offsets[a] = first sum coordinate of part a; offsets.back() = total.
    std::vector<std::size_t> offsets;
    /// embeddings[a][x] = index in `target` of point x of part a.
    std::vector<std::vector<std::size_t>> embeddings;
    SpacePtr target;
    MatrixD forward;
    MatrixD inverse;
    /// Smallest K >= 1 with K^p d^p(x,y) >= d^p(x,0) + d^p(y,0) across parts.
    double K = 1.0;
};

/// (sum_a ||x_a||^p)^(1/p) for a vector in sum coordinates.
[[nodiscard]] double sum_norm(const SumIsomorphism& iso, const std::vector<double>& x);
/// sup over the elementary molecules of every part of ||T z||.
[[nodiscard]] OperatorNorm forward_norm(const SumIsomorphism& iso);
/// sup over the elementary molecules of the target of ||T^{-1} z|| in the sum norm.
[[nodiscard]] OperatorNorm inverse_norm(const SumIsomorphism& iso);

/// `blocks` partition M \ {0}; each part is {0} united with one block.
[[nodiscard]] SumIsomorphism partition_isomorphism(const SpacePtr& space,
                                                   const std::vector<std::vector<std::size_t>>& blocks);

/// Canonical map onto F_p of the maltese sum of the parts (an isometry, K = 1).
[[nodiscard]] SumIsomorphism maltese_isometry(const std::vector<PMetricSpace>& parts);

// ---------------------------------------------------------------------------
// Retraction complements.

struct RetractionComplement {
    /// Image of the retraction, ascending, starts with 0.
    std::vector<std::size_t> retract_set;
    SpacePtr retract_space;
    QuotientResult quotient;
    SpacePtr quotient_space;
    /// Maltese sum of the retract (part 0) and the quotient (part 1).
    SumResult maltese;
    SpacePtr maltese_space;
    /// F_p(M) -> F_p(N maltese M/N).
    FreeOperator T;
    /// F_p(N maltese M/N) -> F_p(M).
    FreeOperator S;
    double lip = 0.0;
    /// (L^p + 1)^(1/p), the bound for both T and S.
    double bound = 0.0;
};

/// r must be idempotent and fix the base point.
[[nodiscard]] RetractionComplement retraction_complement(const SpacePtr& space, const std::vector<std::size_t>& r);

/// Sends each point outside `subset` to its nearest point in `subset` (lowest
/// index on ties); fixes the subset. Subset must contain 0.
[[nodiscard]] std::vector<std::size_t> nearest_point_retraction(const PMetricSpace& space,
                                                                const std::vector<std::size_t>& subset);

// ---------------------------------------------------------------------------
// Complemented copies of l_p(Gamma).

struct Condition2Data {
    SpacePtr space;
    std::vector<std::size_t> x;
    std::vector<std::size_t> y;
    std::vector<LipschitzFunction> f;
    /// Common Lipschitz bound.
    double C = 1.0;
    /// f_g(x_g) / d(x_g, y_g) >= 1 / t for every g.
    double t = 1.0;
};

/// Throws StructuralError naming the first violated clause.
void validate_condition2(const Condition2Data& data);

/// Smallest t for which the ratio clause holds.
[[nodiscard]] double minimal_t(const Condition2Data& data);

struct Condition2Operators {
    /// l_p(Gamma) -> F_p(M), column g = b_g in delta-coordinates.
    MatrixD S;
    /// F_p(M) -> l_p(Gamma).
    MatrixD P;
    /// 2^(1/p) C t.
    double bound = 0.0;
};

[[nodiscard]] Condition2Operators condition2_operators(const Condition2Data& data);

/// ||P|| with the closed-form l_p(Gamma) norm on the codomain.
[[nodiscard]] OperatorNorm projection_norm(const Condition2Data& data, const Condition2Operators& ops);

enum class BumpStyle { isolated, metric_ball, condition3_metric, condition3_psep };

[[nodiscard]] std::string to_string(BumpStyle style);
[[nodiscard]] BumpStyle parse_bump_style(const std::string& name);

/// Builds validated Condition2Data.
///  isolated:          f_i = rho_i chi_{x_i}, rho_i = d(x_i, M \ {x_i}); y_i is the nearest
///                     non-center point with d(x_i, y_i) <= t_isolated rho_i.
///  metric_ball:       f_i = max{d(x_i,y_i) - d(., x_i), 0}; y_i nearest non-center point
///                     within the closed radius r_i. Requires a metric.
///  condition3_metric: f_i = max{r_i - d(., x_i), 0}, y_i = 0. Requires a metric.
///  condition3_psep:   f_i = max{r_i - d^p(., x_i), 0}, y_i = 0, C = s^(p-1) with s the
///                     separation of the space.
/// `radii` is ignored for the isolated style.
[[nodiscard]] Condition2Data bump_family(const SpacePtr& space, const std::vector<std::size_t>& centers,
                                         BumpStyle style, const std::vector<double>& radii,
                                         double t_isolated = 1.5);

/// Half the distance (metric styles) or half of d^p (condition3_psep) from
/// each center to the nearest other center or the base point.
[[nodiscard]] std::vector<double> auto_radii(const PMetricSpace& space, const std::vector<std::size_t>& centers,
                                             BumpStyle style);

// ---------------------------------------------------------------------------
// Separated sequences with radii.

enum class ToninMode { unbounded, limit_point };

struct ToninSequence {
    /// points[0] is x_0; radii[0] = 0.
    std::vector<std::size_t> points;
    std::vector<double> radii;
    double t = 0.0;
    /// Ratio gap s with sqrt(t) = (1 + s) / (1 - s).
    double s = 0.0;
};

/// s from t.
[[nodiscard]] double tonin_gap(double t);

/// Greedy longest chain from x_0 = `anchor` whose distance ratios to x_0 stay
/// below s^(1/p) (increasing for unbounded, decreasing for limit_point), radii
/// r_n = t^(-1/2) d^p(x_n, x_0). Throws StructuralError when fewer than
/// `min_length` points follow x_0 or an invariant fails.
[[nodiscard]] ToninSequence tonin_select(const PMetricSpace& space, double t, ToninMode mode,
                                         std::size_t min_length = 1, std::size_t anchor = 0);

/// Checks d^p(x_n,x_m) >= r_n + r_m and |r_n - r_m| / d^p(x_n,x_m) >= 1/t.
/// Returns an empty string when both hold, else a description.
[[nodiscard]] std::string check_tonin(const PMetricSpace& space, const ToninSequence& seq);

}  // namespace lipfree

#endif
