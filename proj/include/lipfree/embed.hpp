#ifndef LIPFREE_EMBED_HPP
#define LIPFREE_EMBED_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "lipfree/complement.hpp"
#include "lipfree/qmetric.hpp"

namespace lipfree {

// ---------------------------------------------------------------------------
// Step functions in L_q(R).

/// Value c_i on (t_{i-1}, t_i], zero outside [t_0, t_k]. Kept canonical:
/// adjacent equal values merged, zero end pieces trimmed.
class StepFunction {
public:
    StepFunction() = default;
    StepFunction(std::vector<double> breakpoints, std::vector<double> values);

    /// chi_(a,b]; zero when a == b.
    [[nodiscard]] static StepFunction indicator(double a, double b);
    /// chi_(0,x] for x >= 0, -chi_(x,0] for x < 0.
    [[nodiscard]] static StepFunction phi(double x);

    [[nodiscard]] const std::vector<double>& breakpoints() const { return breakpoints_; }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }
    [[nodiscard]] bool is_zero() const { return values_.empty(); }

    [[nodiscard]] double operator()(double x) const;
    /// (sum |c_i|^q (t_i - t_{i-1}))^(1/q).
    [[nodiscard]] double quasinorm(double q) const;

    friend StepFunction operator+(const StepFunction& a, const StepFunction& b);
    friend StepFunction operator-(const StepFunction& a, const StepFunction& b);
    friend StepFunction operator*(double s, const StepFunction& f);
    friend bool operator==(const StepFunction& a, const StepFunction& b) = default;

private:
    void canonicalize();

    std::vector<double> breakpoints_;
    std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Sums of Lipschitz maps with disjoint supports.

using Point = std::vector<double>;
using StepMap = std::function<StepFunction(const Point&)>;

struct SumCheckReport {
    /// Largest sampled ||f(x) - f(y)||_q / ||x - y||.
    double measured = 0.0;
    /// L 2^(1/q - 1).
    double bound = 0.0;
    std::size_t points = 0;
    std::size_t pairs = 0;
    /// Pairs without a segment point z outside both supports.
    std::size_t missing_witness = 0;
    bool holds = false;
};

/// Samples f = sum f_g on `samples` in R^d with the l_{domain_p} quasinorm.
/// For pairs lying in two different supports, a witness z on [x,y] outside
/// both is sought among the samples between them (1-D) and then among dyadic
/// points of [x,y] down to `depth` levels. Every evaluated
/// point must lie in at most one support, else StructuralError.
[[nodiscard]] SumCheckReport disjoint_sum_check(const std::vector<StepMap>& fs, std::vector<Point> samples,
                                                double L, double q, double domain_p = 1.0, int depth = 8,
                                                double tolerance = 1e-6);

// ---------------------------------------------------------------------------
// Maps of a p-metric space into L_p(R).

struct EmbeddingMap {
    std::size_t center = 0;
    double radius = 0.0;
    /// g(x) = max{r - d^p(x, center), 0} for every point of the space.
    std::vector<double> g;

    [[nodiscard]] StepFunction operator()(std::size_t x) const { return StepFunction::phi(g[x]); }
};

struct EmbeddingReport {
    /// Largest ||f_n(x) - f_n(y)||_p / d(x,y) over n and all pairs.
    double max_ratio = 0.0;
    bool disjoint = false;
    bool indicators = false;
};

/// One map per (point, radius) of the sequence, including x_0. Throws
/// StructuralError unless d^p(x_m, x_n) >= r_m + r_n.
[[nodiscard]] std::vector<EmbeddingMap> lp_embedding_maps(const PMetricSpace& space, const ToninSequence& seq);

[[nodiscard]] EmbeddingReport check_embedding_maps(const PMetricSpace& space, const std::vector<EmbeddingMap>& maps);

// ---------------------------------------------------------------------------
// Lower l_p estimate for consecutive molecules.

struct SandwichRow {
    double lp = 0.0;
    double lower = 0.0;
    double value = 0.0;
    /// Norm of the same molecule in the ambient space; NaN when not computed.
    double ambient = 0.0;
    bool holds = false;
};

struct SandwichReport {
    std::vector<SandwichRow> rows;
    /// max d^p(x_n, x_{n-1}) / |r_n - r_{n-1}|, at most seq.t.
    double effective_t = 0.0;
    /// (2 / 2^(1/p)) / t.
    double lower_factor = 0.0;
    /// max(value / lp) * max(lp / value) over the rows.
    double distortion = 0.0;
    bool holds = false;
};

/// b_n = (delta(x_{n-1}) - delta(x_n)) / d(x_{n-1}, x_n) on N = {x_n}. Each
/// coefficient vector has one entry per b_n. The ambient norm is evaluated
/// too when the whole space fits the exact engines.
[[nodiscard]] SandwichReport anso_micha_verify(const PMetricSpace& space, const ToninSequence& seq,
                                               const std::vector<std::vector<double>>& coeffs,
                                               double tolerance = 1e-9);

// ---------------------------------------------------------------------------
// Almost isometric l_p block sequences.

using CoefficientNorm = std::function<double(const std::vector<double>&)>;

struct JamesOptions {
    double p = 1.0;
    double epsilon = 0.1;
    std::size_t blocks = 2;
    std::uint64_t seed = 42;
    /// Random starts per inner maximization.
    std::size_t restarts = 64;
    /// Coefficient vectors used to measure the final lower constant.
    std::size_t samples = 200;
};

struct JamesState {
    double epsilon = 0.0;
    /// M_hat[n] estimates the least M_n for coefficients vanishing on 0..n-1.
    std::vector<double> M_hat;
    double M = 0.0;
    /// n_0 < n_1 < ...; block k occupies [bounds[k], bounds[k+1]).
    std::vector<std::size_t> bounds;
    /// Full-length coefficient vectors, normalized in the ambient norm.
    std::vector<std::vector<double>> blocks;
    /// min over samples of ||sum a_k y_k|| / (sum |a_k|^p)^(1/p).
    double lower = 0.0;
    /// max(0, 1 - epsilon - lower).
    double delta_report = 0.0;
    bool complete = false;
};

/// Heuristic: M_hat from seeded random search plus coordinate ascent,
/// made nonincreasing by a suffix maximum. `length` is the number of ambient
/// vectors; `norm` evaluates ||sum a_j x_j||.
[[nodiscard]] JamesState james_extract(const CoefficientNorm& norm, std::size_t length, const JamesOptions& options);

/// Best l_p(b) / ||sum b_j x_j|| found over b supported on [begin, end).
struct WindowMax {
    double ratio = 0.0;
    std::vector<double> b;
};
[[nodiscard]] WindowMax window_max(const CoefficientNorm& norm, std::size_t length, std::size_t begin,
                                   std::size_t end, double p, std::uint64_t seed, std::size_t restarts);

}  // namespace lipfree

#endif
