#ifndef LIPFREE_QMETRIC_HPP
#define LIPFREE_QMETRIC_HPP

#include <array>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "lipfree/common.hpp"

namespace lipfree {

/// Absolute tolerance for p-metric axiom checks. Triangle checks scale it by
/// max(1, rhs) so large distances are compared relatively.
inline constexpr double kValidationTol = 1e-12;

/// Default cap on the number of points produced by a full l_p-sum.
inline constexpr std::size_t kProductCap = 10000;

struct ValidationReport {
    bool ok = true;
    /// (i, j, k) with i < j and d(i,j)^p > d(i,k)^p + d(k,j)^p.
    std::vector<std::array<std::size_t, 3>> triangle_violations;
    /// Free-form descriptions of diagonal, symmetry and positivity failures.
    std::vector<std::string> axiom_violations;

    [[nodiscard]] std::string summary() const;
};

/// A finite pointed p-metric space. Index 0 is the base point. Immutable.
class PMetricSpace {
  public:
    /// Throws StructuralError if `dist` is not n x n, n == 0, or p is outside (0,1].
    /// Axioms are not checked here; see validate().
    PMetricSpace(std::vector<std::string> labels, std::vector<std::vector<double>> dist, double p);

    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] double p() const { return p_; }
    [[nodiscard]] double d(std::size_t i, std::size_t j) const { return dist_[i * n_ + j]; }
    [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }
    [[nodiscard]] std::vector<std::vector<double>> matrix() const;

    /// Same point count, exponent and bitwise-equal distances.
    [[nodiscard]] bool same_as(const PMetricSpace& other) const;

  private:
    std::size_t n_;
    double p_;
    std::vector<std::string> labels_;
    std::vector<double> dist_;
};

using SpacePtr = std::shared_ptr<const PMetricSpace>;

struct SpaceStats {
    double separation = 0.0;
    double diameter = 0.0;
    /// Every point of a finite space is isolated; paired with d(i, M \ {i}).
    std::vector<std::pair<std::size_t, double>> isolated;
};

[[nodiscard]] ValidationReport validate(const PMetricSpace& space);
/// Throws StructuralError carrying the report summary when validation fails.
void require_valid(const PMetricSpace& space, const std::string& context);
[[nodiscard]] SpaceStats stats(const PMetricSpace& space);

/// Largest exponent q for which d^r is guaranteed to be a q-metric when d is a
/// p-metric: min(1, p / r).
[[nodiscard]] double snowflake_exponent(double p, double r);

/// Entrywise d^r with exponent `new_p`; the result is validated.
[[nodiscard]] PMetricSpace snowflake(const PMetricSpace& space, double r, double new_p);

/// Scales every distance by c > 0.
[[nodiscard]] PMetricSpace dilate(const PMetricSpace& space, double c);

/// Restriction to the listed indices; indices[0] becomes the base point.
[[nodiscard]] PMetricSpace subspace(const PMetricSpace& space, const std::vector<std::size_t>& indices);

enum class SumMode { maltese, full_p_sum };

struct SumResult {
    PMetricSpace space;
    /// embeddings[a][x] = index in `space` of point x of part a (base -> 0).
    std::vector<std::vector<std::size_t>> embeddings;
};

[[nodiscard]] SumResult maltese_sum(const std::vector<PMetricSpace>& parts, SumMode mode,
                                    std::size_t product_cap = kProductCap);

struct QuotientResult {
    PMetricSpace space;
    /// old index -> new index; every point of N maps to 0.
    std::vector<std::size_t> table;
};

/// Collapses N (must contain 0) to the base point.
[[nodiscard]] QuotientResult quotient(const PMetricSpace& space, const std::vector<std::size_t>& subset);

/// Distance from point x to the subset.
[[nodiscard]] double distance_to_set(const PMetricSpace& space, std::size_t x,
                                     const std::vector<std::size_t>& subset);

/// Shortest-path metric (largest metric dominated by d), exponent 1.
[[nodiscard]] PMetricSpace metric_envelope(const PMetricSpace& space);

struct GridSpec {
    enum class Kind { integer_segment, dyadic, custom };
    Kind kind = Kind::integer_segment;
    /// m for integer_segment, the level for dyadic.
    std::size_t size = 1;
    /// custom only; must contain 0 and 1.
    std::vector<double> points;
};

[[nodiscard]] PMetricSpace make_grid(const GridSpec& spec, double p);

/// Line grids. Points are sorted ascending; the point 0 (or the smallest
/// point) is the base.
[[nodiscard]] PMetricSpace integer_segment(std::size_t m, double p);
[[nodiscard]] PMetricSpace dyadic_grid(std::size_t level, double p);
[[nodiscard]] PMetricSpace custom_grid(const std::vector<double>& points, double p);
/// Any finite subset of the line with |x - y|; no {0,1} requirement.
[[nodiscard]] PMetricSpace line_space(std::vector<double> points, double p);
/// Points x_0..x_{n-1} with d(x_i, x_j) = ratio^max(i,j) for i != j (an
/// ultrametric; x_0 is the base).
[[nodiscard]] PMetricSpace ultrametric_chain(std::size_t n, double ratio, double p);
/// Coordinates of dyadic_grid(level): i / 2^level.
[[nodiscard]] std::vector<double> dyadic_points(std::size_t level);

}  // namespace lipfree

#endif
