#include "lipfree/freecore.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>

#include "lipfree/simplex.hpp"

namespace lipfree {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pow_abs(double v, double p) {
    const double a = std::abs(v);
    return p == 1.0 ? a : std::pow(a, p);
}

// Flows below this fraction of the molecule's mass are rounding noise of
// subtree sums whose exact value is zero.
double snap_threshold(const std::vector<double>& coeffs) {
    double mass = 0.0;
    for (double c : coeffs) mass = std::max(mass, std::abs(c));
    return 1e-13 * mass;
}

double snap(double v, double threshold) { return std::abs(v) <= threshold ? 0.0 : v; }

// Term for flow F along (delta(child) - delta(parent)).
PrimalTerm term_from_flow(const PMetricSpace& space, std::size_t child, std::size_t parent, double flow) {
    PrimalTerm t;
    t.x = std::min(child, parent);
    t.y = std::max(child, parent);
    const double scaled = flow * space.d(child, parent);
    t.lambda = child == t.y ? scaled : -scaled;
    return t;
}

void sort_terms(std::vector<PrimalTerm>& terms) {
    std::sort(terms.begin(), terms.end(),
              [](const PrimalTerm& a, const PrimalTerm& b) { return std::pair(a.x, a.y) < std::pair(b.x, b.y); });
}

bool support_less(const std::vector<PrimalTerm>& a, const std::vector<PrimalTerm>& b) {
    return std::lexicographical_compare(
        a.begin(), a.end(), b.begin(), b.end(),
        [](const PrimalTerm& u, const PrimalTerm& v) { return std::pair(u.x, u.y) < std::pair(v.x, v.y); });
}

std::vector<double> pow_table(const PMetricSpace& space) {
    const std::size_t n = space.size();
    std::vector<double> out(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i * n + j] = pow_abs(space.d(i, j), space.p());
    return out;
}

// ---------------------------------------------------------------------------
// Spanning-tree enumeration through Pruefer sequences.

struct TreeBest {
    double cost = kInf;
    std::vector<PrimalTerm> terms;
};

TreeBest enumerate_chunk(const PMetricSpace& space, const std::vector<double>& mu, const std::vector<double>& dp,
                         std::size_t first) {
    const std::size_t n = space.size();
    const double p = space.p();
    const double threshold = snap_threshold(mu);
    const std::size_t len = n - 2;
    std::vector<std::size_t> seq(len, 0);
    seq[0] = first;
    std::vector<std::size_t> degree(n);
    std::vector<double> acc(n);
    std::vector<std::size_t> child(n - 1), parent(n - 1);
    std::vector<double> flow(n - 1);
    TreeBest best;

    while (true) {
        std::fill(degree.begin(), degree.end(), 1);
        for (std::size_t a : seq) ++degree[a];
        acc = mu;
        std::size_t ptr = 0;
        while (degree[ptr] != 1) ++ptr;
        std::size_t leaf = ptr;
        double cost = 0.0;
        bool pruned = false;
        for (std::size_t k = 0; k < len; ++k) {
            const std::size_t a = seq[k];
            const double f = snap(acc[leaf], threshold);
            child[k] = leaf;
            parent[k] = a;
            flow[k] = f;
            cost += dp[leaf * n + a] * pow_abs(f, p);
            if (cost > best.cost) {
                pruned = true;
                break;
            }
            acc[a] += acc[leaf];
            if (--degree[a] == 1 && a < ptr) {
                leaf = a;
            } else {
                ++ptr;
                while (degree[ptr] != 1) ++ptr;
                leaf = ptr;
            }
        }
        if (!pruned) {
            const double f = snap(acc[leaf], threshold);
            child[len] = leaf;
            parent[len] = n - 1;
            flow[len] = f;
            cost += dp[leaf * n + (n - 1)] * pow_abs(f, p);
            if (cost <= best.cost) {
                std::vector<PrimalTerm> terms;
                for (std::size_t k = 0; k + 1 < n; ++k)
                    if (flow[k] != 0.0) terms.push_back(term_from_flow(space, child[k], parent[k], flow[k]));
                sort_terms(terms);
                if (cost < best.cost || support_less(terms, best.terms)) {
                    best.cost = cost;
                    best.terms = std::move(terms);
                }
            }
        }
        // Odometer over positions 1..len-1; position 0 is fixed per chunk.
        std::size_t pos = len;
        while (pos > 1) {
            --pos;
            if (++seq[pos] < n) break;
            seq[pos] = 0;
            if (pos == 1) return best;
        }
        if (pos <= 1 && len <= 1) return best;
    }
}

TreeBest enumerate_trees(const PMetricSpace& space, const std::vector<double>& mu) {
    const std::size_t n = space.size();
    const std::vector<double> dp = pow_table(space);
    if (n == 2) {
        TreeBest best;
        const double f = snap(mu[0], snap_threshold(mu));
        best.cost = dp[1] * pow_abs(f, space.p());
        if (f != 0.0) best.terms.push_back(term_from_flow(space, 0, 1, f));
        return best;
    }
    std::vector<TreeBest> chunks(n);
    parallel_for(n, [&](std::size_t i) { chunks[i] = enumerate_chunk(space, mu, dp, i); });
    TreeBest best;
    for (auto& c : chunks)
        if (c.cost < best.cost || (c.cost == best.cost && support_less(c.terms, best.terms))) best = std::move(c);
    return best;
}

// ---------------------------------------------------------------------------
// Subset dynamic program over rooted spanning trees.
//
// H(S, r): cheapest tree on S rooted at r, where an edge above a subtree T
// costs d^p(child, parent) |mu(T)|^p. The child subtree of r holding the
// lowest point of S \ {r} is split off first:
//   H(S, r) = min_T U(T, r) + H(S \ T, r),  U(T, r) = min_{c in T} H(T, c) + d^p(r, c) |mu(T)|^p.

class TreeDp {
  public:
    TreeDp(const PMetricSpace& space, const std::vector<double>& mu, bool keep_choices)
        : space_(space), n_(space.size()), full_((std::uint32_t{1} << n_) - 1) {
        const std::size_t masks = std::size_t{1} << n_;
        const double p = space.p();
        const double threshold = snap_threshold(mu);
        const std::vector<double> dp = pow_table(space);
        mass_.assign(masks, 0.0);
        std::vector<double> weight(masks, 0.0);
        for (std::uint32_t m = 1; m < masks; ++m) {
            const std::uint32_t low = m & (~m + 1);
            mass_[m] = mass_[m ^ low] + mu[static_cast<std::size_t>(std::countr_zero(low))];
        }
        for (std::uint32_t m = 1; m < masks; ++m) {
            mass_[m] = snap(mass_[m], threshold);
            weight[m] = pow_abs(mass_[m], p);
        }
        h_.assign(masks * n_, kInf);
        u_.assign(masks * n_, kInf);
        if (keep_choices) {
            split_.assign(masks * n_, 0);
            top_.assign(masks * n_, 0);
        }
        for (std::uint32_t mask = 1; mask <= full_; ++mask) {
            if (std::has_single_bit(mask)) {
                h_[mask * n_ + static_cast<std::size_t>(std::countr_zero(mask))] = 0.0;
            } else {
                for (std::size_t r = 0; r < n_; ++r) {
                    if (!(mask >> r & 1u)) continue;
                    const std::uint32_t rest = mask ^ (std::uint32_t{1} << r);
                    const std::uint32_t low = rest & (~rest + 1);
                    const std::uint32_t others = rest ^ low;
                    double best = kInf;
                    std::uint32_t arg = 0;
                    std::uint32_t sub = others;
                    while (true) {
                        const std::uint32_t t = sub | low;
                        const double v = u_[t * n_ + r] + h_[(mask ^ t) * n_ + r];
                        if (v < best) {
                            best = v;
                            arg = t;
                        }
                        if (sub == 0) break;
                        sub = (sub - 1) & others;
                    }
                    h_[mask * n_ + r] = best;
                    if (keep_choices) split_[mask * n_ + r] = arg;
                }
            }
            if (mask == full_) break;
            for (std::size_t r = 0; r < n_; ++r) {
                if (mask >> r & 1u) continue;
                double best = kInf;
                std::uint8_t arg = 0;
                for (std::size_t c = 0; c < n_; ++c) {
                    if (!(mask >> c & 1u)) continue;
                    const double v = h_[mask * n_ + c] + dp[r * n_ + c] * weight[mask];
                    if (v < best) {
                        best = v;
                        arg = static_cast<std::uint8_t>(c);
                    }
                }
                u_[mask * n_ + r] = best;
                if (keep_choices) top_[mask * n_ + r] = arg;
            }
        }
    }

    [[nodiscard]] double cost() const { return h_[full_ * n_]; }

    [[nodiscard]] std::vector<PrimalTerm> terms() const {
        std::vector<PrimalTerm> out;
        collect(full_, 0, out);
        sort_terms(out);
        return out;
    }

  private:
    void collect(std::uint32_t mask, std::size_t r, std::vector<PrimalTerm>& out) const {
        if (std::has_single_bit(mask)) return;
        const std::uint32_t t = split_[mask * n_ + r];
        const std::size_t c = top_[t * n_ + r];
        if (mass_[t] != 0.0) out.push_back(term_from_flow(space_, c, r, mass_[t]));
        collect(t, c, out);
        collect(mask ^ t, r, out);
    }

    const PMetricSpace& space_;
    std::size_t n_;
    std::uint32_t full_;
    std::vector<double> mass_;
    std::vector<double> h_;
    std::vector<double> u_;
    std::vector<std::uint32_t> split_;
    std::vector<std::uint8_t> top_;
};

// ---------------------------------------------------------------------------

std::vector<PrimalTerm> greedy_terms(const PMetricSpace& space, std::vector<double> c) {
    std::vector<PrimalTerm> terms;
    const double threshold = snap_threshold(c);
    for (std::size_t step = 0; step < c.size(); ++step) {
        const auto lo = std::min_element(c.begin(), c.end());
        const auto hi = std::max_element(c.begin(), c.end());
        if (*hi <= threshold || *lo >= -threshold) break;
        const double m = std::min(-*lo, *hi);
        const auto from = static_cast<std::size_t>(lo - c.begin());
        const auto to = static_cast<std::size_t>(hi - c.begin());
        terms.push_back(term_from_flow(space, to, from, m));
        *lo += m;
        *hi -= m;
    }
    sort_terms(terms);
    return terms;
}

std::vector<PrimalTerm> star_terms(const PMetricSpace& space, const std::vector<double>& c) {
    std::vector<PrimalTerm> terms;
    for (std::size_t v = 1; v < c.size(); ++v)
        if (c[v] != 0.0) terms.push_back(term_from_flow(space, v, 0, c[v]));
    return terms;
}

void require_exact_cap(std::size_t n, std::size_t cap, const char* method) {
    if (n > cap)
        throw ResourceError(std::string(method) + " supports at most " + std::to_string(cap) + " points, got " +
                            std::to_string(n) + "; use method bounds_only");
}

}  // namespace

// ---------------------------------------------------------------------------

Molecule::Molecule(SpacePtr space, std::vector<double> coeffs) : space_(std::move(space)), coeffs_(std::move(coeffs)) {
    if (!space_) throw StructuralError("molecule without a space");
    if (coeffs_.size() != space_->size())
        throw StructuralError("molecule has " + std::to_string(coeffs_.size()) + " coefficients for " +
                              std::to_string(space_->size()) + " points");
    double sum = 0.0, mass = 0.0;
    for (double c : coeffs_) {
        if (!std::isfinite(c)) throw StructuralError("molecule coefficient is not finite");
        sum += c;
        mass += std::abs(c);
    }
    if (std::abs(sum) > kMoleculeTol * std::max(1.0, mass))
        throw StructuralError("molecule coefficients sum to " + std::to_string(sum) + ", expected 0");
}

Molecule Molecule::from_delta(SpacePtr space, const std::vector<double>& delta) {
    if (!space) throw StructuralError("molecule without a space");
    if (delta.size() + 1 != space->size()) throw StructuralError("delta-coordinate length mismatch");
    std::vector<double> c(space->size(), 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < delta.size(); ++i) {
        c[i + 1] = delta[i];
        sum += delta[i];
    }
    c[0] = -sum;
    return Molecule(std::move(space), std::move(c));
}

Molecule Molecule::elementary(SpacePtr space, std::size_t x, std::size_t y) {
    if (!space || x >= space->size() || y >= space->size() || x == y)
        throw StructuralError("elementary molecule needs two distinct points");
    std::vector<double> c(space->size(), 0.0);
    const double d = space->d(x, y);
    c[y] = 1.0 / d;
    c[x] = -1.0 / d;
    return Molecule(std::move(space), std::move(c));
}

std::vector<double> Molecule::delta() const { return {coeffs_.begin() + 1, coeffs_.end()}; }

LipschitzFunction::LipschitzFunction(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty() || values_[0] != 0.0) throw StructuralError("Lipschitz function must vanish at the base point");
}

double LipschitzFunction::lip(const PMetricSpace& space) const {
    if (values_.size() != space.size()) throw StructuralError("Lipschitz function size mismatch");
    double best = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        for (std::size_t j = i + 1; j < values_.size(); ++j)
            best = std::max(best, std::abs(values_[i] - values_[j]) / space.d(i, j));
    return best;
}

double LipschitzFunction::pair(const Molecule& mu) const {
    if (values_.size() != mu.coeffs().size()) throw StructuralError("pairing size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) acc += values_[i] * mu.coeffs()[i];
    return acc;
}

std::string to_string(NormMethod method) {
    switch (method) {
        case NormMethod::automatic: return "auto";
        case NormMethod::lp: return "lp";
        case NormMethod::enumerate: return "enumerate";
        case NormMethod::tree_dp: return "dp";
        case NormMethod::bounds_only: return "bounds_only";
    }
    return "auto";
}

NormMethod parse_norm_method(const std::string& name) {
    if (name == "auto") return NormMethod::automatic;
    if (name == "lp") return NormMethod::lp;
    if (name == "enumerate") return NormMethod::enumerate;
    if (name == "dp") return NormMethod::tree_dp;
    if (name == "bounds_only") return NormMethod::bounds_only;
    throw StructuralError("unknown norm method '" + name + "'");
}

std::vector<Molecule> elementary_molecules(const SpacePtr& space) {
    std::vector<Molecule> out;
    for (std::size_t x = 0; x < space->size(); ++x)
        for (std::size_t y = x + 1; y < space->size(); ++y) out.push_back(Molecule::elementary(space, x, y));
    return out;
}

std::vector<double> primal_sum(const PMetricSpace& space, const std::vector<PrimalTerm>& terms) {
    std::vector<double> out(space.size(), 0.0);
    for (const auto& t : terms) {
        const double w = t.lambda / space.d(t.x, t.y);
        out[t.y] += w;
        out[t.x] -= w;
    }
    return out;
}

double primal_cost(const std::vector<PrimalTerm>& terms, double p) {
    double acc = 0.0;
    for (const auto& t : terms) acc += pow_abs(t.lambda, p);
    return std::pow(acc, 1.0 / p);
}

FlowSolution transport_flow(const Molecule& mu) {
    const PMetricSpace& space = mu.space();
    const std::size_t n = space.size();
    FlowSolution out;
    if (n == 1) return out;
    std::vector<std::pair<std::size_t, std::size_t>> arcs;
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
            if (x != y) arcs.emplace_back(x, y);
    MatrixD a(n - 1, arcs.size());
    std::vector<double> cost(arcs.size());
    for (std::size_t k = 0; k < arcs.size(); ++k) {
        const auto [x, y] = arcs[k];
        cost[k] = space.d(x, y);
        if (y != 0) a(y - 1, k) += 1.0;
        if (x != 0) a(x - 1, k) -= 1.0;
    }
    const LpResult lp = solve_lp(a, mu.delta(), cost);
    if (lp.status != LpStatus::optimal) throw InternalError("transport LP did not reach an optimum");
    out.value = lp.objective;
    std::vector<double> net(n * n, 0.0);
    for (std::size_t k = 0; k < arcs.size(); ++k) {
        const auto [x, y] = arcs[k];
        if (x < y) net[x * n + y] += lp.x[k];
        else net[y * n + x] -= lp.x[k];
    }
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y)
            if (net[x * n + y] != 0.0) out.primal.push_back({x, y, net[x * n + y] * space.d(x, y)});
    return out;
}

DualBound dual_lower_bound(const Molecule& mu) {
    const PMetricSpace& space = mu.space();
    const std::size_t n = space.size();
    DualBound out;
    if (n == 1) {
        out.f = LipschitzFunction({0.0});
        return out;
    }
    // Variables: g+ (n-1), g- (n-1), one slack per ordered pair.
    const std::size_t m = n * (n - 1);
    const std::size_t vars = 2 * (n - 1) + m;
    MatrixD a(m, vars);
    std::vector<double> b(m), c(vars, 0.0);
    std::size_t row = 0;
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            if (x == y) continue;
            // g_y - g_x + s = d(x, y)
            if (y != 0) {
                a(row, y - 1) += 1.0;
                a(row, n - 1 + y - 1) -= 1.0;
            }
            if (x != 0) {
                a(row, x - 1) -= 1.0;
                a(row, n - 1 + x - 1) += 1.0;
            }
            a(row, 2 * (n - 1) + row) = 1.0;
            b[row] = space.d(x, y);
            ++row;
        }
    for (std::size_t v = 1; v < n; ++v) {
        c[v - 1] = -mu.coeffs()[v];
        c[n - 1 + v - 1] = mu.coeffs()[v];
    }
    const LpResult lp = solve_lp(a, b, c);
    if (lp.status != LpStatus::optimal) throw InternalError("dual LP did not reach an optimum");
    std::vector<double> g(n, 0.0);
    for (std::size_t v = 1; v < n; ++v) g[v] = lp.x[v - 1] - lp.x[n - 1 + v - 1];
    out.f = LipschitzFunction(std::move(g));
    out.value = out.f.pair(mu);
    return out;
}

double norm_value(const PMetricSpace& space, const std::vector<double>& delta, std::size_t dp_cap) {
    const std::size_t n = space.size();
    if (delta.size() + 1 != n) throw StructuralError("delta-coordinate length mismatch");
    if (n == 1) return 0.0;
    std::vector<double> mu(n);
    double sum = 0.0;
    bool zero = true;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        mu[i + 1] = delta[i];
        sum += delta[i];
        zero = zero && delta[i] == 0.0;
    }
    if (zero) return 0.0;
    mu[0] = -sum;
    if (n <= std::min<std::size_t>(dp_cap, 24)) return std::pow(TreeDp(space, mu, false).cost(), 1.0 / space.p());
    if (space.p() == 1.0) {
        auto shared = std::make_shared<PMetricSpace>(space);
        return transport_flow(Molecule(shared, mu)).value;
    }
    throw ResourceError("exact norm needs at most " + std::to_string(dp_cap) + " points at p < 1, got " +
                        std::to_string(n));
}

NormCertificate norm(const Molecule& mu, NormMethod method, const NormOptions& options) {
    const PMetricSpace& space = mu.space();
    const std::size_t n = space.size();
    const double p = space.p();
    NormCertificate cert;
    cert.method = method;
    if (method == NormMethod::automatic) {
        if (n <= options.dp_cap) cert.method = NormMethod::tree_dp;
        else if (p == 1.0) cert.method = NormMethod::lp;
        else cert.method = NormMethod::bounds_only;
    }

    switch (cert.method) {
        case NormMethod::lp: {
            if (p != 1.0) throw StructuralError("method lp computes the p = 1 norm; the space has p < 1");
            FlowSolution flow = transport_flow(mu);
            cert.primal = std::move(flow.primal);
            cert.value = flow.value;
            cert.exact = true;
            break;
        }
        case NormMethod::enumerate: {
            require_exact_cap(n, options.enumerate_cap, "enumerate");
            if (n > 1) {
                TreeBest best = enumerate_trees(space, mu.coeffs());
                cert.primal = std::move(best.terms);
                cert.value = std::pow(best.cost, 1.0 / p);
            }
            cert.exact = true;
            break;
        }
        case NormMethod::tree_dp: {
            require_exact_cap(n, std::min<std::size_t>(options.dp_cap, 24), "dp");
            if (n > 1) {
                TreeDp dp(space, mu.coeffs(), true);
                cert.primal = dp.terms();
                cert.value = std::pow(dp.cost(), 1.0 / p);
            }
            cert.exact = true;
            break;
        }
        case NormMethod::bounds_only:
        case NormMethod::automatic: {
            auto greedy = greedy_terms(space, mu.coeffs());
            auto star = star_terms(space, mu.coeffs());
            cert.primal = primal_cost(star, p) < primal_cost(greedy, p) ? std::move(star) : std::move(greedy);
            cert.value = primal_cost(cert.primal, p);
            cert.exact = false;
            break;
        }
    }
    cert.upper = primal_cost(cert.primal, p);
    if (options.skip_dual || n == 1) {
        cert.dual = LipschitzFunction(std::vector<double>(n, 0.0));
    } else {
        DualBound dual = dual_lower_bound(mu);
        cert.lower = dual.value;
        cert.dual = std::move(dual.f);
    }
    return cert;
}

// ---------------------------------------------------------------------------

FreeOperator::FreeOperator(SpacePtr domain, SpacePtr codomain, MatrixD matrix)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), matrix_(std::move(matrix)) {
    if (!domain_ || !codomain_) throw StructuralError("operator without a domain or codomain");
    if (matrix_.rows() + 1 != codomain_->size() || matrix_.cols() + 1 != domain_->size())
        throw StructuralError("operator matrix is " + std::to_string(matrix_.rows()) + "x" +
                              std::to_string(matrix_.cols()) + ", expected " +
                              std::to_string(codomain_->size() - 1) + "x" + std::to_string(domain_->size() - 1));
}

Molecule FreeOperator::apply(const Molecule& mu) const {
    if (mu.space_ptr() != domain_ && !mu.space().same_as(*domain_))
        throw StructuralError("molecule does not live on the operator domain");
    return Molecule::from_delta(codomain_, matrix_.apply(mu.delta()));
}

MatrixD point_map_matrix(std::size_t n_domain, std::size_t n_codomain, const std::vector<std::size_t>& f) {
    if (f.size() != n_domain) throw StructuralError("point map size mismatch");
    if (f[0] != 0) throw StructuralError("point map must send the base point to the base point");
    MatrixD m(n_codomain - 1, n_domain - 1);
    for (std::size_t x = 1; x < n_domain; ++x) {
        if (f[x] >= n_codomain) throw StructuralError("point map image out of range");
        if (f[x] != 0) m(f[x] - 1, x - 1) = 1.0;
    }
    return m;
}

LipschitzOperator operator_from_lipschitz(const SpacePtr& domain, const SpacePtr& codomain,
                                          const std::vector<std::size_t>& f) {
    MatrixD m = point_map_matrix(domain->size(), codomain->size(), f);
    double lip = 0.0;
    for (std::size_t x = 0; x < domain->size(); ++x)
        for (std::size_t y = x + 1; y < domain->size(); ++y)
            lip = std::max(lip, codomain->d(f[x], f[y]) / domain->d(x, y));
    return {FreeOperator(domain, codomain, std::move(m)), lip};
}

OperatorNorm operator_norm(const MatrixD& matrix, const PMetricSpace& domain, const CodomainNorm& codomain_norm) {
    const std::size_t n = domain.size();
    if (matrix.cols() + 1 != n) throw StructuralError("operator matrix does not match the domain");
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y) pairs.emplace_back(x, y);
    std::vector<double> values(pairs.size(), 0.0);
    parallel_for(pairs.size(), [&](std::size_t k) {
        const auto [x, y] = pairs[k];
        std::vector<double> z(n - 1, 0.0);
        const double w = 1.0 / domain.d(x, y);
        z[y - 1] += w;
        if (x != 0) z[x - 1] -= w;
        values[k] = codomain_norm(matrix.apply(z));
    });
    OperatorNorm out;
    for (std::size_t k = 0; k < pairs.size(); ++k)
        if (k == 0 || values[k] > out.value) {
            out.value = values[k];
            out.witness_x = pairs[k].first;
            out.witness_y = pairs[k].second;
        }
    return out;
}

OperatorNorm operator_norm(const FreeOperator& op) {
    const PMetricSpace& cod = *op.codomain();
    return operator_norm(op.matrix(), *op.domain(), [&cod](const std::vector<double>& v) { return norm_value(cod, v); });
}

FreeOperator compose(const FreeOperator& outer, const FreeOperator& inner) {
    if (inner.codomain() != outer.domain() && !inner.codomain()->same_as(*outer.domain()))
        throw StructuralError("compose: inner codomain differs from outer domain");
    return FreeOperator(inner.domain(), outer.codomain(), outer.matrix() * inner.matrix());
}

}  // namespace lipfree
