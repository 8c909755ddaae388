#include "lipfree/qmetric.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <limits>
#include <sstream>

namespace lipfree {

namespace {

std::string coordinate_label(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) throw InternalError("label formatting failed");
    return std::string(buf, end);
}

std::vector<std::vector<double>> square(std::size_t n) {
    return std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0));
}

}  // namespace

std::string ValidationReport::summary() const {
    if (ok) return "ok";
    std::ostringstream out;
    out << "invalid p-metric space";
    for (const auto& a : axiom_violations) out << "; " << a;
    if (!triangle_violations.empty()) {
        out << "; " << triangle_violations.size() << " p-triangle violation(s), first (i,j,k)=("
            << triangle_violations.front()[0] << "," << triangle_violations.front()[1] << ","
            << triangle_violations.front()[2] << ")";
    }
    return out.str();
}

PMetricSpace::PMetricSpace(std::vector<std::string> labels, std::vector<std::vector<double>> dist,
                           double p)
    : n_(dist.size()), p_(p), labels_(std::move(labels)) {
    if (n_ == 0) throw StructuralError("a pointed space needs at least the base point");
    if (!(p > 0.0 && p <= 1.0)) throw StructuralError("exponent p must lie in (0, 1]");
    if (labels_.empty()) {
        labels_.reserve(n_);
        for (std::size_t i = 0; i < n_; ++i) labels_.push_back(std::to_string(i));
    }
    if (labels_.size() != n_) throw StructuralError("label count does not match distance matrix");
    dist_.resize(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i) {
        if (dist[i].size() != n_) throw StructuralError("distance matrix is not square");
        for (std::size_t j = 0; j < n_; ++j) dist_[i * n_ + j] = dist[i][j];
    }
}

std::vector<std::vector<double>> PMetricSpace::matrix() const {
    auto out = square(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) out[i][j] = d(i, j);
    return out;
}

bool PMetricSpace::same_as(const PMetricSpace& other) const {
    return n_ == other.n_ && p_ == other.p_ && dist_ == other.dist_;
}

ValidationReport validate(const PMetricSpace& space) {
    ValidationReport report;
    const std::size_t n = space.size();
    const double p = space.p();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(std::abs(space.d(i, i)) <= kValidationTol))
            report.axiom_violations.push_back("d(" + std::to_string(i) + "," + std::to_string(i) + ") != 0");
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = space.d(i, j), b = space.d(j, i);
            if (!std::isfinite(a) || !std::isfinite(b))
                report.axiom_violations.push_back("non-finite distance at (" + std::to_string(i) + "," +
                                                  std::to_string(j) + ")");
            else if (std::abs(a - b) > kValidationTol * std::max(1.0, std::abs(a)))
                report.axiom_violations.push_back("asymmetric at (" + std::to_string(i) + "," +
                                                  std::to_string(j) + ")");
            if (!(a > 0.0))
                report.axiom_violations.push_back("non-positive distance at (" + std::to_string(i) + "," +
                                                  std::to_string(j) + ")");
        }
    }
    std::vector<double> powered(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) powered[i * n + j] = std::pow(space.d(i, j), p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                const double rhs = powered[i * n + k] + powered[k * n + j];
                if (powered[i * n + j] > rhs + kValidationTol * std::max(1.0, rhs))
                    report.triangle_violations.push_back({i, j, k});
            }
    report.ok = report.axiom_violations.empty() && report.triangle_violations.empty();
    return report;
}

void require_valid(const PMetricSpace& space, const std::string& context) {
    auto report = validate(space);
    if (!report.ok) throw StructuralError(context + ": " + report.summary());
}

SpaceStats stats(const PMetricSpace& space) {
    SpaceStats s;
    const std::size_t n = space.size();
    s.separation = n > 1 ? std::numeric_limits<double>::infinity() : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double radius = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            radius = std::min(radius, space.d(i, j));
            s.diameter = std::max(s.diameter, space.d(i, j));
        }
        if (n > 1) {
            s.separation = std::min(s.separation, radius);
            s.isolated.emplace_back(i, radius);
        }
    }
    return s;
}

double snowflake_exponent(double p, double r) {
    if (!(r > 0.0)) throw StructuralError("snowflake exponent must be positive");
    return std::min(1.0, p / r);
}

PMetricSpace snowflake(const PMetricSpace& space, double r, double new_p) {
    if (!(r > 0.0)) throw StructuralError("snowflake exponent must be positive");
    auto dist = space.matrix();
    for (auto& row : dist)
        for (double& v : row) v = std::pow(v, r);
    PMetricSpace out(space.labels(), std::move(dist), new_p);
    require_valid(out, "snowflake");
    return out;
}

PMetricSpace dilate(const PMetricSpace& space, double c) {
    if (!(c > 0.0)) throw StructuralError("dilation factor must be positive");
    auto dist = space.matrix();
    for (auto& row : dist)
        for (double& v : row) v *= c;
    return PMetricSpace(space.labels(), std::move(dist), space.p());
}

PMetricSpace subspace(const PMetricSpace& space, const std::vector<std::size_t>& indices) {
    if (indices.empty()) throw StructuralError("subspace needs at least one point");
    const std::size_t k = indices.size();
    auto dist = square(k);
    std::vector<std::string> labels;
    labels.reserve(k);
    for (std::size_t a = 0; a < k; ++a) {
        if (indices[a] >= space.size()) throw StructuralError("subspace index out of range");
        labels.push_back(space.labels()[indices[a]]);
        for (std::size_t b = 0; b < k; ++b) dist[a][b] = space.d(indices[a], indices[b]);
    }
    return PMetricSpace(std::move(labels), std::move(dist), space.p());
}

SumResult maltese_sum(const std::vector<PMetricSpace>& parts, SumMode mode, std::size_t product_cap) {
    if (parts.empty()) throw StructuralError("sum of an empty family");
    const double p = parts.front().p();
    for (const auto& part : parts)
        if (part.p() != p) throw StructuralError("summands must share the exponent p");

    std::vector<std::vector<std::size_t>> embeddings(parts.size());
    if (mode == SumMode::maltese) {
        // Shared base, then the non-base points of each part in order.
        std::vector<std::pair<std::size_t, std::size_t>> origin{{0, 0}};
        std::vector<std::string> labels{"0"};
        for (std::size_t a = 0; a < parts.size(); ++a) {
            embeddings[a].assign(parts[a].size(), 0);
            for (std::size_t x = 1; x < parts[a].size(); ++x) {
                embeddings[a][x] = origin.size();
                origin.emplace_back(a, x);
                labels.push_back(std::to_string(a) + ":" + parts[a].labels()[x]);
            }
        }
        const std::size_t n = origin.size();
        auto dist = square(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const auto [a, x] = origin[i];
                const auto [b, y] = origin[j];
                if (i == 0) dist[i][j] = parts[b].d(y, 0);
                else if (j == 0) dist[i][j] = parts[a].d(x, 0);
                else if (a == b) dist[i][j] = parts[a].d(x, y);
                else dist[i][j] = std::pow(std::pow(parts[a].d(x, 0), p) + std::pow(parts[b].d(y, 0), p), 1.0 / p);
            }
        SumResult result{PMetricSpace(std::move(labels), std::move(dist), p), std::move(embeddings)};
        require_valid(result.space, "maltese sum");
        return result;
    }

    std::size_t total = 1;
    for (const auto& part : parts) {
        if (total > product_cap / part.size()) throw ResourceError("full l_p-sum exceeds the product cap");
        total *= part.size();
    }
    if (total > product_cap) throw ResourceError("full l_p-sum exceeds the product cap");
    // Mixed-radix enumeration with the first part varying fastest; tuple 0 is the base.
    std::vector<std::vector<std::size_t>> tuples(total, std::vector<std::size_t>(parts.size()));
    std::vector<std::string> labels(total);
    for (std::size_t t = 0; t < total; ++t) {
        std::size_t rest = t;
        std::string label = "(";
        for (std::size_t a = 0; a < parts.size(); ++a) {
            tuples[t][a] = rest % parts[a].size();
            rest /= parts[a].size();
            label += (a ? "," : "") + parts[a].labels()[tuples[t][a]];
        }
        labels[t] = label + ")";
    }
    auto dist = square(total);
    for (std::size_t i = 0; i < total; ++i)
        for (std::size_t j = i + 1; j < total; ++j) {
            double acc = 0.0;
            for (std::size_t a = 0; a < parts.size(); ++a)
                acc += std::pow(parts[a].d(tuples[i][a], tuples[j][a]), p);
            dist[i][j] = dist[j][i] = std::pow(acc, 1.0 / p);
        }
    std::size_t stride = 1;
    for (std::size_t a = 0; a < parts.size(); ++a) {
        embeddings[a].resize(parts[a].size());
        for (std::size_t x = 0; x < parts[a].size(); ++x) embeddings[a][x] = x * stride;
        stride *= parts[a].size();
    }
    SumResult result{PMetricSpace(std::move(labels), std::move(dist), p), std::move(embeddings)};
    require_valid(result.space, "l_p-sum");
    return result;
}

double distance_to_set(const PMetricSpace& space, std::size_t x, const std::vector<std::size_t>& subset) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t y : subset) best = std::min(best, space.d(x, y));
    return best;
}

QuotientResult quotient(const PMetricSpace& space, const std::vector<std::size_t>& subset) {
    if (subset.empty()) throw StructuralError("quotient by an empty set");
    const std::size_t n = space.size();
    std::vector<bool> in_subset(n, false);
    for (std::size_t x : subset) {
        if (x >= n) throw StructuralError("quotient subset index out of range");
        in_subset[x] = true;
    }
    if (!in_subset[0]) throw StructuralError("quotient subset must contain the base point");

    const double p = space.p();
    std::vector<std::size_t> table(n, 0);
    std::vector<std::size_t> kept{0};
    std::vector<std::string> labels{"0"};
    for (std::size_t x = 0; x < n; ++x) {
        if (in_subset[x]) continue;
        table[x] = kept.size();
        kept.push_back(x);
        labels.push_back(space.labels()[x]);
    }
    std::vector<double> to_set(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) to_set[x] = in_subset[x] ? 0.0 : distance_to_set(space, x, subset);

    const std::size_t k = kept.size();
    auto dist = square(k);
    for (std::size_t a = 1; a < k; ++a) {
        dist[a][0] = dist[0][a] = to_set[kept[a]];
        for (std::size_t b = a + 1; b < k; ++b) {
            const std::size_t x = kept[a], y = kept[b];
            const double through = std::pow(std::pow(to_set[x], p) + std::pow(to_set[y], p), 1.0 / p);
            dist[a][b] = dist[b][a] = std::min(space.d(x, y), through);
        }
    }
    QuotientResult result{PMetricSpace(std::move(labels), std::move(dist), p), std::move(table)};
    require_valid(result.space, "quotient");
    return result;
}

PMetricSpace metric_envelope(const PMetricSpace& space) {
    auto dist = space.matrix();
    const std::size_t n = space.size();
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                dist[i][j] = std::min(dist[i][j], dist[i][k] + dist[k][j]);
    PMetricSpace out(space.labels(), std::move(dist), 1.0);
    require_valid(out, "metric envelope");
    return out;
}

PMetricSpace line_space(std::vector<double> points, double p) {
    if (points.empty()) throw StructuralError("a line space needs at least one point");
    std::sort(points.begin(), points.end());
    if (std::adjacent_find(points.begin(), points.end()) != points.end())
        throw StructuralError("duplicate grid points");
    const std::size_t n = points.size();
    auto dist = square(n);
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back(coordinate_label(points[i]));
        for (std::size_t j = 0; j < n; ++j) dist[i][j] = std::abs(points[i] - points[j]);
    }
    return PMetricSpace(std::move(labels), std::move(dist), p);
}

PMetricSpace ultrametric_chain(std::size_t n, double ratio, double p) {
    if (n < 2) throw StructuralError("an ultrametric chain needs at least two points");
    if (!(ratio > 1)) throw StructuralError("ultrametric chain ratio must exceed 1");
    auto dist = square(n);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back("x" + std::to_string(i));
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) dist[i][j] = std::pow(ratio, static_cast<double>(std::max(i, j)));
    }
    return PMetricSpace(std::move(labels), std::move(dist), p);
}

PMetricSpace integer_segment(std::size_t m, double p) {
    if (m < 1) throw StructuralError("integer segment needs m >= 1");
    std::vector<double> pts(m + 1);
    for (std::size_t i = 0; i <= m; ++i) pts[i] = static_cast<double>(i);
    return line_space(std::move(pts), p);
}

std::vector<double> dyadic_points(std::size_t level) {
    if (level > 30) throw ResourceError("dyadic level too large");
    const std::size_t count = (std::size_t{1} << level) + 1;
    std::vector<double> pts(count);
    for (std::size_t i = 0; i < count; ++i) pts[i] = std::ldexp(static_cast<double>(i), -static_cast<int>(level));
    return pts;
}

PMetricSpace dyadic_grid(std::size_t level, double p) { return line_space(dyadic_points(level), p); }

PMetricSpace custom_grid(const std::vector<double>& points, double p) {
    const bool has0 = std::find(points.begin(), points.end(), 0.0) != points.end();
    const bool has1 = std::find(points.begin(), points.end(), 1.0) != points.end();
    if (!has0 || !has1) throw StructuralError("custom grid must contain 0 and 1");
    for (double x : points)
        if (x < 0.0 || x > 1.0) throw StructuralError("custom grid points must lie in [0,1]");
    return line_space(points, p);
}

PMetricSpace make_grid(const GridSpec& spec, double p) {
    switch (spec.kind) {
        case GridSpec::Kind::integer_segment: return integer_segment(spec.size, p);
        case GridSpec::Kind::dyadic: return dyadic_grid(spec.size, p);
        case GridSpec::Kind::custom: return custom_grid(spec.points, p);
    }
    throw InternalError("unknown grid kind");
}

}  // namespace lipfree
