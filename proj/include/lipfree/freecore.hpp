#ifndef LIPFREE_FREECORE_HPP
#define LIPFREE_FREECORE_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "lipfree/common.hpp"
#include "lipfree/qmetric.hpp"

namespace lipfree {

/// Default point cap for spanning-tree enumeration (n^(n-2) trees).
inline constexpr std::size_t kEnumerateCap = 9;
/// Default point cap for the exact subset dynamic program (about n 3^n work).
inline constexpr std::size_t kTreeDpCap = 16;
/// Sum-to-zero tolerance for molecules, relative to max(1, sum |c|).
inline constexpr double kMoleculeTol = 1e-12;

/// Finitely supported zero-sum vector on the points of a space.
class Molecule {
  public:
    /// `coeffs` has one entry per point and must sum to zero.
    Molecule(SpacePtr space, std::vector<double> coeffs);

    /// Builds from delta-coordinates (entries for points 1..n-1).
    static Molecule from_delta(SpacePtr space, const std::vector<double>& delta);
    /// (delta(y) - delta(x)) / d(x, y).
    static Molecule elementary(SpacePtr space, std::size_t x, std::size_t y);

    [[nodiscard]] const PMetricSpace& space() const { return *space_; }
    [[nodiscard]] const SpacePtr& space_ptr() const { return space_; }
    [[nodiscard]] const std::vector<double>& coeffs() const { return coeffs_; }
    [[nodiscard]] std::vector<double> delta() const;

  private:
    SpacePtr space_;
    std::vector<double> coeffs_;
};

/// A real function on the points with value 0 at the base point.
class LipschitzFunction {
  public:
    LipschitzFunction() = default;
    explicit LipschitzFunction(std::vector<double> values);

    [[nodiscard]] const std::vector<double>& values() const { return values_; }
    /// max over x != y of |f(x) - f(y)| / d(x, y); 0 on a one-point space.
    [[nodiscard]] double lip(const PMetricSpace& space) const;
    /// <f, mu> = sum f(x) mu(x).
    [[nodiscard]] double pair(const Molecule& mu) const;

  private:
    std::vector<double> values_;
};

/// lambda * (delta(y) - delta(x)) / d(x, y) with x < y.
struct PrimalTerm {
    std::size_t x = 0;
    std::size_t y = 0;
    double lambda = 0.0;
};

enum class NormMethod { automatic, lp, enumerate, tree_dp, bounds_only };

[[nodiscard]] std::string to_string(NormMethod method);
/// Accepts auto, lp, enumerate, dp, bounds_only.
[[nodiscard]] NormMethod parse_norm_method(const std::string& name);

struct NormCertificate {
    double value = 0.0;
    /// (sum |lambda|^p)^(1/p) of the primal decomposition.
    double upper = 0.0;
    /// <dual, mu> with Lip(dual) <= 1. Tight only for p = 1.
    double lower = 0.0;
    std::vector<PrimalTerm> primal;
    LipschitzFunction dual;
    NormMethod method = NormMethod::automatic;
    /// True when `value` is the exact norm (up to solver tolerance).
    bool exact = false;

    [[nodiscard]] double gap() const { return upper - lower; }
};

struct NormOptions {
    std::size_t enumerate_cap = kEnumerateCap;
    std::size_t dp_cap = kTreeDpCap;
    /// Skip the dual LP (lower is then left at 0).
    bool skip_dual = false;
};

/// The n(n-1)/2 molecules (delta(y) - delta(x)) / d(x, y), x < y, in
/// lexicographic (x, y) order.
[[nodiscard]] std::vector<Molecule> elementary_molecules(const SpacePtr& space);

[[nodiscard]] NormCertificate norm(const Molecule& mu, NormMethod method = NormMethod::automatic,
                                   const NormOptions& options = {});

/// Exact norm value of a delta-coordinate vector, no certificate. Uses the
/// subset program for n <= dp_cap, the LP at p = 1 otherwise; throws
/// ResourceError beyond that.
[[nodiscard]] double norm_value(const PMetricSpace& space, const std::vector<double>& delta,
                                std::size_t dp_cap = kTreeDpCap);

/// Reproduces sum lambda_e z_e as a point-indexed vector.
[[nodiscard]] std::vector<double> primal_sum(const PMetricSpace& space, const std::vector<PrimalTerm>& terms);
/// (sum |lambda|^p)^(1/p).
[[nodiscard]] double primal_cost(const std::vector<PrimalTerm>& terms, double p);

struct DualBound {
    double value = 0.0;
    LipschitzFunction f;
};

/// Inequality-form LP: max <f, mu> over |f(x) - f(y)| <= d(x, y), f(0) = 0.
[[nodiscard]] DualBound dual_lower_bound(const Molecule& mu);

struct FlowSolution {
    double value = 0.0;
    std::vector<PrimalTerm> primal;
};

/// Flow-form LP: min sum d(x,y) f(x,y) over ordered pairs with divergence mu.
/// Equals the p = 1 norm over the same distance matrix.
[[nodiscard]] FlowSolution transport_flow(const Molecule& mu);

/// Linear map between free spaces in delta-coordinates.
class FreeOperator {
  public:
    /// matrix is (n_cod - 1) x (n_dom - 1).
    FreeOperator(SpacePtr domain, SpacePtr codomain, MatrixD matrix);

    [[nodiscard]] const SpacePtr& domain() const { return domain_; }
    [[nodiscard]] const SpacePtr& codomain() const { return codomain_; }
    [[nodiscard]] const MatrixD& matrix() const { return matrix_; }
    [[nodiscard]] Molecule apply(const Molecule& mu) const;

  private:
    SpacePtr domain_;
    SpacePtr codomain_;
    MatrixD matrix_;
};

struct LipschitzOperator {
    FreeOperator op;
    double lip = 0.0;
};

/// delta(x) -> delta(f(x)). f[0] must be 0.
[[nodiscard]] LipschitzOperator operator_from_lipschitz(const SpacePtr& domain, const SpacePtr& codomain,
                                                        const std::vector<std::size_t>& f);

/// Delta-coordinate matrix of delta(x) -> delta(f(x)) without the Lipschitz constant.
[[nodiscard]] MatrixD point_map_matrix(std::size_t n_domain, std::size_t n_codomain,
                                       const std::vector<std::size_t>& f);

/// Norm of a codomain vector given in its coordinates.
using CodomainNorm = std::function<double(const std::vector<double>&)>;

struct OperatorNorm {
    double value = 0.0;
    /// Witness elementary molecule (x < y); equal to (0, 0) on a one-point domain.
    std::size_t witness_x = 0;
    std::size_t witness_y = 0;
};

/// sup over elementary molecules z of the domain of codomain_norm(M z).
[[nodiscard]] OperatorNorm operator_norm(const MatrixD& matrix, const PMetricSpace& domain,
                                         const CodomainNorm& codomain_norm);
/// Same with the exact free norm of the codomain.
[[nodiscard]] OperatorNorm operator_norm(const FreeOperator& op);

/// outer o inner.
[[nodiscard]] FreeOperator compose(const FreeOperator& outer, const FreeOperator& inner);

}  // namespace lipfree

#endif
