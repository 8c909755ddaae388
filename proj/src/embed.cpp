#include "lipfree/embed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "lipfree/freecore.hpp"

namespace lipfree {

// ---------------------------------------------------------------------------
// StepFunction

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    if (breakpoints_.empty() && values_.empty()) return;
    if (breakpoints_.size() != values_.size() + 1)
        throw StructuralError("step function needs one more breakpoint than values");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i)
        if (!(breakpoints_[i - 1] < breakpoints_[i]))
            throw StructuralError("step function breakpoints must be strictly increasing");
    for (double v : values_)
        if (!std::isfinite(v)) throw StructuralError("step function values must be finite");
    canonicalize();
}

void StepFunction::canonicalize() {
    std::vector<double> bp{breakpoints_.front()};
    std::vector<double> vals;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!vals.empty() && vals.back() == values_[i])
            bp.back() = breakpoints_[i + 1];
        else {
            vals.push_back(values_[i]);
            bp.push_back(breakpoints_[i + 1]);
        }
    }
    std::size_t lo = 0, hi = vals.size();
    while (lo < hi && vals[lo] == 0.0) ++lo;
    while (hi > lo && vals[hi - 1] == 0.0) --hi;
    if (lo == hi) {
        breakpoints_.clear();
        values_.clear();
        return;
    }
    breakpoints_.assign(bp.begin() + static_cast<std::ptrdiff_t>(lo), bp.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    values_.assign(vals.begin() + static_cast<std::ptrdiff_t>(lo), vals.begin() + static_cast<std::ptrdiff_t>(hi));
}

StepFunction StepFunction::indicator(double a, double b) {
    if (b < a) throw StructuralError("indicator interval is reversed");
    if (a == b) return {};
    return StepFunction({a, b}, {1.0});
}

StepFunction StepFunction::phi(double x) {
    if (x > 0) return indicator(0.0, x);
    if (x < 0) return StepFunction({x, 0.0}, {-1.0});
    return {};
}

double StepFunction::operator()(double x) const {
    const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
    if (it == breakpoints_.begin() || it == breakpoints_.end()) return 0.0;
    return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

double StepFunction::quasinorm(double q) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        sum += std::pow(std::abs(values_[i]), q) * (breakpoints_[i + 1] - breakpoints_[i]);
    return std::pow(sum, 1.0 / q);
}

namespace {

template <class Op>
StepFunction combine(const StepFunction& a, const StepFunction& b, Op op) {
    std::vector<double> bp;
    std::set_union(a.breakpoints().begin(), a.breakpoints().end(), b.breakpoints().begin(), b.breakpoints().end(),
                   std::back_inserter(bp));
    if (bp.size() < 2) return {};
    std::vector<double> vals(bp.size() - 1);
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        const double x = bp[i + 1];
        vals[i] = op(a(x), b(x));
    }
    return StepFunction(std::move(bp), std::move(vals));
}

}  // namespace

StepFunction operator+(const StepFunction& a, const StepFunction& b) {
    return combine(a, b, [](double u, double v) { return u + v; });
}

StepFunction operator-(const StepFunction& a, const StepFunction& b) {
    return combine(a, b, [](double u, double v) { return u - v; });
}

StepFunction operator*(double s, const StepFunction& f) {
    if (f.is_zero() || s == 0.0) return {};
    std::vector<double> vals = f.values();
    for (double& v : vals) v *= s;
    return StepFunction(f.breakpoints(), std::move(vals));
}

// ---------------------------------------------------------------------------
// disjoint_sum_check

namespace {

constexpr std::size_t kNoSupport = std::numeric_limits<std::size_t>::max();

struct Evaluated {
    StepFunction value;
    std::size_t support = kNoSupport;
};

Evaluated evaluate(const std::vector<StepMap>& fs, const Point& x) {
    Evaluated out;
    for (std::size_t g = 0; g < fs.size(); ++g) {
        StepFunction v = fs[g](x);
        if (v.is_zero()) continue;
        if (out.support != kNoSupport)
            throw StructuralError("supports of maps " + std::to_string(out.support) + " and " + std::to_string(g) +
                                  " overlap");
        out.support = g;
        out.value = std::move(v);
    }
    return out;
}

Point lerp(const Point& x, const Point& y, double s) {
    Point z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + s * (y[i] - x[i]);
    return z;
}

bool find_witness(const std::vector<StepMap>& fs, const Point& x, const Point& y, std::size_t alpha,
                  std::size_t beta, int depth) {
    for (int level = 1; level <= depth; ++level) {
        const double den = std::ldexp(1.0, level);
        for (long k = 1; k < (1L << level); k += 2) {
            const Point z = lerp(x, y, static_cast<double>(k) / den);
            const std::size_t g = evaluate(fs, z).support;
            if (g != alpha && g != beta) return true;
        }
    }
    return false;
}

}  // namespace

SumCheckReport disjoint_sum_check(const std::vector<StepMap>& fs, std::vector<Point> samples, double L, double q,
                                  double domain_p, int depth, double tolerance) {
    if (!(q > 0 && q <= 1) || !(domain_p > 0 && domain_p <= 1))
        throw StructuralError("exponents must lie in (0,1]");
    if (samples.empty()) throw StructuralError("no sample points");
    const std::size_t dim = samples.front().size();
    for (const auto& s : samples)
        if (s.size() != dim) throw StructuralError("sample points differ in dimension");
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end()), samples.end());

    const std::size_t n = samples.size();
    std::vector<Evaluated> at(n);
    for (std::size_t i = 0; i < n; ++i) at[i] = evaluate(fs, samples[i]);

    SumCheckReport report;
    report.bound = L * std::pow(2.0, 1.0 / q - 1.0);
    report.points = n;
    report.pairs = n * (n - 1) / 2;

    // free_before[k] = number of samples before k outside every support.
    std::vector<std::size_t> free_before(n + 1, 0);
    for (std::size_t k = 0; k < n; ++k) free_before[k + 1] = free_before[k] + (at[k].support == kNoSupport ? 1 : 0);

    std::vector<double> row_max(n, 0.0);
    std::vector<std::size_t> row_missing(n, 0);
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            Point diff(dim);
            for (std::size_t c = 0; c < dim; ++c) diff[c] = samples[i][c] - samples[j][c];
            const double dist = lp_quasinorm(diff, domain_p);
            const double ratio = (at[i].value - at[j].value).quasinorm(q) / dist;
            row_max[i] = std::max(row_max[i], ratio);
            const std::size_t a = at[i].support, b = at[j].support;
            if (a == kNoSupport || b == kNoSupport || a == b) continue;
            bool found = false;
            if (dim == 1) {
                found = free_before[j] > free_before[i + 1];
                for (std::size_t k = i + 1; k < j && !found; ++k) found = at[k].support != a && at[k].support != b;
            }
            if (!found && !find_witness(fs, samples[i], samples[j], a, b, depth)) ++row_missing[i];
        }
    });
    for (std::size_t i = 0; i < n; ++i) {
        report.measured = std::max(report.measured, row_max[i]);
        report.missing_witness += row_missing[i];
    }
    report.holds = report.measured <= report.bound * (1.0 + tolerance);
    return report;
}

// ---------------------------------------------------------------------------
// lp_embedding_maps

namespace {

void require_separated(const PMetricSpace& space, const ToninSequence& seq) {
    if (seq.points.size() != seq.radii.size()) throw StructuralError("sequence points and radii differ in length");
    const double p = space.p();
    for (std::size_t m = 0; m < seq.points.size(); ++m) {
        if (seq.points[m] >= space.size()) throw StructuralError("sequence point out of range");
        if (!(seq.radii[m] >= 0)) throw StructuralError("radii must be nonnegative");
        for (std::size_t k = m + 1; k < seq.points.size(); ++k) {
            const double lhs = std::pow(space.d(seq.points[m], seq.points[k]), p);
            const double rhs = seq.radii[m] + seq.radii[k];
            if (lhs < rhs - 1e-12 * std::max(1.0, rhs))
                throw StructuralError("d^p(x_" + std::to_string(m) + ", x_" + std::to_string(k) +
                                      ") < r_m + r_n");
        }
    }
}

}  // namespace

std::vector<EmbeddingMap> lp_embedding_maps(const PMetricSpace& space, const ToninSequence& seq) {
    require_separated(space, seq);
    std::vector<EmbeddingMap> maps;
    for (std::size_t k = 0; k < seq.points.size(); ++k) {
        EmbeddingMap f{seq.points[k], seq.radii[k], std::vector<double>(space.size())};
        for (std::size_t x = 0; x < space.size(); ++x)
            f.g[x] = x == f.center ? f.radius : std::max(f.radius - std::pow(space.d(x, f.center), space.p()), 0.0);
        maps.push_back(std::move(f));
    }
    return maps;
}

EmbeddingReport check_embedding_maps(const PMetricSpace& space, const std::vector<EmbeddingMap>& maps) {
    EmbeddingReport report;
    const std::size_t n = space.size();
    const double p = space.p();
    report.disjoint = true;
    for (std::size_t x = 0; x < n; ++x) {
        std::size_t active = 0;
        for (const auto& f : maps) active += f.g[x] > 0 ? 1 : 0;
        if (active > 1) report.disjoint = false;
    }
    report.indicators = true;
    for (const auto& f : maps)
        if (!(f(f.center) == StepFunction::indicator(0.0, f.radius))) report.indicators = false;
    for (const auto& f : maps)
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = x + 1; y < n; ++y)
                report.max_ratio = std::max(report.max_ratio, (f(x) - f(y)).quasinorm(p) / space.d(x, y));
    return report;
}

// ---------------------------------------------------------------------------
// anso_micha_verify

SandwichReport anso_micha_verify(const PMetricSpace& space, const ToninSequence& seq,
                                 const std::vector<std::vector<double>>& coeffs, double tolerance) {
    require_separated(space, seq);
    const std::size_t m = seq.points.size() - 1;
    if (m == 0) throw StructuralError("sequence needs at least two points");
    const double p = space.p();

    const bool up = seq.radii[1] >= seq.radii[0];
    SandwichReport report;
    for (std::size_t k = 1; k <= m; ++k) {
        const double dr = seq.radii[k] - seq.radii[k - 1];
        if ((up && dr < 0) || (!up && dr > 0)) throw StructuralError("radii must be monotone");
        const double dp = std::pow(space.d(seq.points[k], seq.points[k - 1]), p);
        report.effective_t = std::max(report.effective_t, dr == 0 ? std::numeric_limits<double>::infinity()
                                                                  : dp / std::abs(dr));
    }
    if (report.effective_t > seq.t * (1 + 1e-12))
        throw StructuralError("radius increments fall below d^p / t");
    report.lower_factor = 2.0 / std::pow(2.0, 1.0 / p) / seq.t;

    const PMetricSpace sub = subspace(space, seq.points);
    const bool ambient = space.size() <= kTreeDpCap;
    std::vector<double> dist(m);
    for (std::size_t k = 1; k <= m; ++k) dist[k - 1] = space.d(seq.points[k - 1], seq.points[k]);

    for (const auto& a : coeffs)
        if (a.size() != m) throw StructuralError("coefficient vector length must equal the number of molecules");
    report.rows.resize(coeffs.size());
    parallel_for(coeffs.size(), [&](std::size_t i) {
        const auto& a = coeffs[i];
        std::vector<double> local(m, 0.0), global(space.size() - 1, 0.0);
        auto add = [&](std::size_t k, double c) {
            if (k > 0) local[k - 1] += c;
            const std::size_t x = seq.points[k];
            if (x > 0) global[x - 1] += c;
        };
        for (std::size_t k = 1; k <= m; ++k) {
            add(k - 1, a[k - 1] / dist[k - 1]);
            add(k, -a[k - 1] / dist[k - 1]);
        }
        SandwichRow row;
        row.lp = lp_quasinorm(a, p);
        row.lower = report.lower_factor * row.lp;
        row.value = norm_value(sub, local);
        row.ambient = ambient ? norm_value(space, global) : std::numeric_limits<double>::quiet_NaN();
        const double slack = tolerance * std::max(1.0, row.lp);
        const double low = ambient ? row.ambient : row.value;
        row.holds = low >= row.lower - slack && row.value <= row.lp + slack;
        report.rows[i] = row;
    });

    double up_ratio = 0.0, down_ratio = 0.0;
    report.holds = true;
    for (const auto& row : report.rows) {
        report.holds = report.holds && row.holds;
        if (row.lp == 0 || row.value == 0) continue;
        up_ratio = std::max(up_ratio, row.value / row.lp);
        down_ratio = std::max(down_ratio, row.lp / row.value);
    }
    report.distortion = up_ratio * down_ratio;
    return report;
}

// ---------------------------------------------------------------------------
// james_extract

namespace {

double ratio_of(const CoefficientNorm& norm, const std::vector<double>& b, double p) {
    const double n = norm(b);
    if (!(n > 0)) return 0.0;
    return lp_quasinorm(b, p) / n;
}

}  // namespace

WindowMax window_max(const CoefficientNorm& norm, std::size_t length, std::size_t begin, std::size_t end, double p,
                     std::uint64_t seed, std::size_t restarts) {
    WindowMax best;
    if (begin >= end || end > length) return best;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::bernoulli_distribution keep(0.5);

    std::vector<std::vector<double>> starts;
    for (std::size_t j = begin; j < end; ++j) {
        std::vector<double> e(length, 0.0);
        e[j] = 1.0;
        starts.push_back(std::move(e));
    }
    std::vector<double> ones(length, 0.0), alt(length, 0.0);
    for (std::size_t j = begin; j < end; ++j) {
        ones[j] = 1.0;
        alt[j] = (j - begin) % 2 ? -1.0 : 1.0;
    }
    starts.push_back(ones);
    starts.push_back(alt);
    for (std::size_t r = 0; r < restarts; ++r) {
        std::vector<double> b(length, 0.0);
        bool any = false;
        for (std::size_t j = begin; j < end; ++j)
            if (keep(rng)) {
                b[j] = gauss(rng);
                any = true;
            }
        if (!any) b[begin + rng() % (end - begin)] = 1.0;
        starts.push_back(std::move(b));
    }

    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < starts.size(); ++i) ranked.emplace_back(ratio_of(norm, starts[i], p), i);
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) { return x.first > y.first; });

    const std::size_t climbs = std::min<std::size_t>(4, ranked.size());
    for (std::size_t c = 0; c < climbs; ++c) {
        std::vector<double> b = starts[ranked[c].second];
        double value = ranked[c].first;
        double scale = 0.0;
        for (double v : b) scale = std::max(scale, std::abs(v));
        double step = 0.5 * scale;
        for (int sweep = 0; sweep < 400 && step > 1e-7 * scale; ++sweep) {
            bool improved = false;
            for (std::size_t j = begin; j < end; ++j)
                for (double sign : {1.0, -1.0}) {
                    const double old = b[j];
                    b[j] = old + sign * step;
                    const double trial = ratio_of(norm, b, p);
                    if (trial > value * (1 + 1e-14)) {
                        value = trial;
                        improved = true;
                    } else {
                        b[j] = old;
                    }
                }
            if (!improved) step *= 0.5;
        }
        if (value > best.ratio) {
            best.ratio = value;
            best.b = b;
        }
    }
    return best;
}

JamesState james_extract(const CoefficientNorm& norm, std::size_t length, const JamesOptions& options) {
    if (!(options.epsilon > 0 && options.epsilon < 1)) throw StructuralError("epsilon must lie in (0,1)");
    if (length == 0) throw StructuralError("empty ambient sequence");
    const double p = options.p;

    JamesState state;
    state.epsilon = options.epsilon;
    std::vector<double> raw(length);
    parallel_for(length, [&](std::size_t n) {
        raw[n] = window_max(norm, length, n, length, p, options.seed + n, options.restarts).ratio;
    });
    state.M_hat = raw;
    for (std::size_t n = length - 1; n-- > 0;) state.M_hat[n] = std::max(state.M_hat[n], state.M_hat[n + 1]);
    state.M = *std::min_element(state.M_hat.begin(), state.M_hat.end());

    const double root = std::sqrt(1.0 - options.epsilon);
    std::size_t start = 0;
    while (state.M_hat[start] > state.M / root) ++start;
    state.bounds.push_back(start);

    const double target = root * state.M * (1 - 1e-12);
    while (state.blocks.size() < options.blocks && start < length) {
        bool found = false;
        for (std::size_t end = start + 1; end <= length && !found; ++end) {
            const std::uint64_t seed = options.seed + 1000003ULL * (state.blocks.size() + 1) + end;
            WindowMax w = window_max(norm, length, start, end, p, seed, options.restarts);
            if (w.ratio < target) continue;
            const double scale = norm(w.b);
            for (double& v : w.b) v /= scale;
            state.blocks.push_back(std::move(w.b));
            state.bounds.push_back(end);
            start = end;
            found = true;
        }
        if (!found) break;
    }
    state.complete = state.blocks.size() == options.blocks;

    if (!state.blocks.empty()) {
        const std::size_t k = state.blocks.size();
        std::mt19937_64 rng(options.seed ^ 0x5eed5eedULL);
        std::normal_distribution<double> gauss(0.0, 1.0);
        state.lower = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < options.samples + k; ++s) {
            std::vector<double> a(k, 0.0);
            if (s < k)
                a[s] = 1.0;
            else
                for (double& v : a) v = gauss(rng);
            std::vector<double> x(length, 0.0);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < length; ++j) x[j] += a[i] * state.blocks[i][j];
            const double lp = lp_quasinorm(a, p);
            if (lp > 0) state.lower = std::min(state.lower, norm(x) / lp);
        }
    }
    state.delta_report = std::max(0.0, 1.0 - options.epsilon - state.lower);
    return state;
}

}  // namespace lipfree
