#ifndef LIPFREE_SIMPLEX_HPP
#define LIPFREE_SIMPLEX_HPP

#include <vector>

#include "lipfree/common.hpp"

namespace lipfree {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    double objective = 0.0;
    std::vector<double> x;
    int pivots = 0;
};

/// Solves  min c.x  s.t.  A x = b, x >= 0  with a dense two-phase tableau
/// simplex under Bland's rule (no cycling). Intended for the small transport
/// programs of this library: a few hundred rows and columns at most.
[[nodiscard]] LpResult solve_lp(const MatrixD& A, const std::vector<double>& b, const std::vector<double>& c);

}  // namespace lipfree

#endif
