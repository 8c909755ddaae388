#include "lipfree/simplex.hpp"

#include <limits>

namespace lipfree {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr int kMaxPivots = 200000;

class Tableau {
  public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_(rows + 1, cols + 1), basis_(rows) {}

    double& at(std::size_t r, std::size_t c) { return t_(r, c); }
    double& rhs(std::size_t r) { return t_(r, cols_); }
    double& cost(std::size_t c) { return t_(rows_, c); }
    double& objective() { return t_(rows_, cols_); }
    std::vector<std::size_t>& basis() { return basis_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    void pivot(std::size_t r, std::size_t c) {
        const double piv = t_(r, c);
        for (std::size_t j = 0; j <= cols_; ++j) t_(r, j) /= piv;
        t_(r, c) = 1.0;
        for (std::size_t i = 0; i <= rows_; ++i) {
            if (i == r) continue;
            const double factor = t_(i, c);
            if (factor == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) t_(i, j) -= factor * t_(r, j);
            t_(i, c) = 0.0;
        }
        basis_[r] = c;
    }

    // Bland's rule over columns allowed by `allowed`; returns the status of the phase.
    LpStatus run(const std::vector<bool>& allowed, double cost_tol, int& pivots) {
        while (true) {
            std::size_t enter = cols_;
            for (std::size_t j = 0; j < cols_; ++j)
                if (allowed[j] && cost(j) < -cost_tol) {
                    enter = j;
                    break;
                }
            if (enter == cols_) return LpStatus::optimal;
            std::size_t leave = rows_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < rows_; ++i) {
                const double a = at(i, enter);
                if (a <= kPivotTol) continue;
                const double ratio = rhs(i) / a;
                const double slack = 1e-15 * std::max(1.0, std::abs(best));
                if (leave == rows_ || ratio < best - slack ||
                    (ratio <= best + slack && basis_[i] < basis_[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave == rows_) return LpStatus::unbounded;
            pivot(leave, enter);
            if (++pivots > kMaxPivots) return LpStatus::iteration_limit;
        }
    }

    void drop_row(std::size_t r) {
        MatrixD next(rows_, cols_ + 1);
        std::size_t out = 0;
        for (std::size_t i = 0; i <= rows_; ++i) {
            if (i == r) continue;
            for (std::size_t j = 0; j <= cols_; ++j) next(out, j) = t_(i, j);
            ++out;
        }
        t_ = std::move(next);
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
        --rows_;
    }

  private:
    std::size_t rows_;
    std::size_t cols_;
    MatrixD t_;
    std::vector<std::size_t> basis_;
};

}  // namespace

LpResult solve_lp(const MatrixD& A, const std::vector<double>& b, const std::vector<double>& c) {
    const std::size_t m = A.rows(), n = A.cols();
    if (b.size() != m || c.size() != n) throw StructuralError("LP dimension mismatch");

    double scale_b = 1.0, scale_c = 1.0;
    for (double v : b) scale_b = std::max(scale_b, std::abs(v));
    for (double v : c) scale_c = std::max(scale_c, std::abs(v));

    // Columns [0, n) are structural, [n, n + m) artificial.
    Tableau tab(m, n + m);
    for (std::size_t i = 0; i < m; ++i) {
        const double sign = b[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = sign * A(i, j);
        tab.at(i, n + i) = 1.0;
        tab.rhs(i) = sign * b[i];
        tab.basis()[i] = n + i;
    }
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc -= tab.at(i, j);
        tab.cost(j) = acc;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc -= tab.rhs(i);
    tab.objective() = acc;

    LpResult result;
    std::vector<bool> allowed(n + m, true);
    LpStatus phase1 = tab.run(allowed, 1e-12 * scale_b, result.pivots);
    if (phase1 == LpStatus::iteration_limit) {
        result.status = phase1;
        return result;
    }
    if (-tab.objective() > 1e-9 * scale_b) {
        result.status = LpStatus::infeasible;
        return result;
    }

    // Drive artificial variables out of the basis; rows that cannot pivot are redundant.
    for (std::size_t i = 0; i < tab.rows();) {
        if (tab.basis()[i] < n) {
            ++i;
            continue;
        }
        std::size_t col = n;
        double best = kPivotTol;
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(tab.at(i, j)) > best) {
                best = std::abs(tab.at(i, j));
                col = j;
            }
        if (col == n) {
            tab.drop_row(i);
            continue;
        }
        tab.pivot(i, col);
        ++i;
    }

    for (std::size_t j = n; j < n + m; ++j) allowed[j] = false;
    for (std::size_t j = 0; j < n + m; ++j) tab.cost(j) = j < n ? c[j] : 0.0;
    tab.objective() = 0.0;
    for (std::size_t i = 0; i < tab.rows(); ++i) {
        const std::size_t bj = tab.basis()[i];
        const double cb = bj < n ? c[bj] : 0.0;
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j < n + m; ++j) tab.cost(j) -= cb * tab.at(i, j);
        tab.objective() -= cb * tab.rhs(i);
    }

    result.status = tab.run(allowed, 1e-11 * scale_c, result.pivots);
    if (result.status != LpStatus::optimal) return result;
    result.x.assign(n, 0.0);
    for (std::size_t i = 0; i < tab.rows(); ++i)
        if (tab.basis()[i] < n) result.x[tab.basis()[i]] = std::max(0.0, tab.rhs(i));
    result.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) result.objective += c[j] * result.x[j];
    return result;
}

}  // namespace lipfree
