#include "lipfree/complement.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace lipfree {

namespace {

constexpr double kRelTol = 1e-12;

SpacePtr share(PMetricSpace s) { return std::make_shared<const PMetricSpace>(std::move(s)); }

std::vector<double> elementary_delta(const PMetricSpace& space, std::size_t x, std::size_t y) {
    std::vector<double> z(space.size() - 1, 0.0);
    const double w = 1.0 / space.d(x, y);
    z[y - 1] += w;
    if (x != 0) z[x - 1] -= w;
    return z;
}

bool is_metric(const PMetricSpace& space) {
    return validate(PMetricSpace(space.labels(), space.matrix(), 1.0)).ok;
}

std::string pair_text(std::size_t a, std::size_t b) {
    return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

}  // namespace

// ---------------------------------------------------------------------------

double sum_norm(const SumIsomorphism& iso, const std::vector<double>& x) {
    if (x.size() != iso.offsets.back()) throw StructuralError("sum vector length mismatch");
    double acc = 0.0;
    const double p = iso.target->p();
    for (std::size_t a = 0; a < iso.parts.size(); ++a) {
        std::vector<double> slice(x.begin() + static_cast<std::ptrdiff_t>(iso.offsets[a]),
                                  x.begin() + static_cast<std::ptrdiff_t>(iso.offsets[a + 1]));
        acc += std::pow(norm_value(*iso.parts[a], slice), p);
    }
    return std::pow(acc, 1.0 / p);
}

OperatorNorm forward_norm(const SumIsomorphism& iso) {
    struct Item {
        std::size_t part, x, y;
    };
    std::vector<Item> items;
    for (std::size_t a = 0; a < iso.parts.size(); ++a)
        for (std::size_t x = 0; x < iso.parts[a]->size(); ++x)
            for (std::size_t y = x + 1; y < iso.parts[a]->size(); ++y) items.push_back({a, x, y});
    std::vector<double> values(items.size(), 0.0);
    parallel_for(items.size(), [&](std::size_t k) {
        const auto& it = items[k];
        const auto local = elementary_delta(*iso.parts[it.part], it.x, it.y);
        std::vector<double> z(iso.offsets.back(), 0.0);
        std::copy(local.begin(), local.end(), z.begin() + static_cast<std::ptrdiff_t>(iso.offsets[it.part]));
        values[k] = norm_value(*iso.target, iso.forward.apply(z));
    });
    OperatorNorm out;
    for (std::size_t k = 0; k < items.size(); ++k)
        if (k == 0 || values[k] > out.value) {
            out.value = values[k];
            out.witness_x = iso.embeddings[items[k].part][items[k].x];
            out.witness_y = iso.embeddings[items[k].part][items[k].y];
        }
    return out;
}

OperatorNorm inverse_norm(const SumIsomorphism& iso) {
    return operator_norm(iso.inverse, *iso.target, [&iso](const std::vector<double>& v) { return sum_norm(iso, v); });
}

SumIsomorphism partition_isomorphism(const SpacePtr& space, const std::vector<std::vector<std::size_t>>& blocks) {
    const std::size_t n = space->size();
    std::vector<int> owner(n, -1);
    for (std::size_t a = 0; a < blocks.size(); ++a) {
        if (blocks[a].empty()) throw StructuralError("partition block " + std::to_string(a) + " is empty");
        for (std::size_t x : blocks[a]) {
            if (x == 0 || x >= n) throw StructuralError("partition blocks must list points 1..n-1");
            if (owner[x] >= 0) throw StructuralError("point " + std::to_string(x) + " lies in two blocks");
            owner[x] = static_cast<int>(a);
        }
    }
    for (std::size_t x = 1; x < n; ++x)
        if (owner[x] < 0) throw StructuralError("point " + std::to_string(x) + " is in no block");

    SumIsomorphism iso;
    iso.target = space;
    iso.offsets.push_back(0);
    for (const auto& block : blocks) {
        std::vector<std::size_t> idx{0};
        idx.insert(idx.end(), block.begin(), block.end());
        iso.parts.push_back(share(subspace(*space, idx)));
        iso.embeddings.push_back(idx);
        iso.offsets.push_back(iso.offsets.back() + block.size());
    }
    const std::size_t total = iso.offsets.back();
    iso.forward = MatrixD(n - 1, total);
    iso.inverse = MatrixD(total, n - 1);
    for (std::size_t a = 0; a < blocks.size(); ++a)
        for (std::size_t k = 0; k < blocks[a].size(); ++k) {
            iso.forward(blocks[a][k] - 1, iso.offsets[a] + k) = 1.0;
            iso.inverse(iso.offsets[a] + k, blocks[a][k] - 1) = 1.0;
        }

    const double p = space->p();
    double kp = 1.0;
    for (std::size_t x = 1; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y) {
            if (owner[x] == owner[y]) continue;
            const double ratio = (std::pow(space->d(x, 0), p) + std::pow(space->d(y, 0), p)) / std::pow(space->d(x, y), p);
            kp = std::max(kp, ratio);
        }
    iso.K = std::pow(kp, 1.0 / p);
    return iso;
}

SumIsomorphism maltese_isometry(const std::vector<PMetricSpace>& parts) {
    SumResult sum = maltese_sum(parts, SumMode::maltese);
    std::vector<std::vector<std::size_t>> blocks;
    for (const auto& emb : sum.embeddings) {
        std::vector<std::size_t> block(emb.begin() + 1, emb.end());
        blocks.push_back(std::move(block));
    }
    // One-point parts contribute nothing to the sum.
    std::vector<std::vector<std::size_t>> nonempty;
    for (auto& b : blocks)
        if (!b.empty()) nonempty.push_back(std::move(b));
    return partition_isomorphism(share(std::move(sum.space)), nonempty);
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> nearest_point_retraction(const PMetricSpace& space, const std::vector<std::size_t>& subset) {
    const std::size_t n = space.size();
    std::vector<bool> in(n, false);
    for (std::size_t x : subset) {
        if (x >= n) throw StructuralError("retraction subset index out of range");
        in[x] = true;
    }
    if (!in[0]) throw StructuralError("retraction subset must contain the base point");
    std::vector<std::size_t> r(n);
    for (std::size_t x = 0; x < n; ++x) {
        if (in[x]) {
            r[x] = x;
            continue;
        }
        std::size_t best = 0;
        for (std::size_t y = 0; y < n; ++y)
            if (in[y] && space.d(x, y) < space.d(x, best)) best = y;
        r[x] = best;
    }
    return r;
}

RetractionComplement retraction_complement(const SpacePtr& space, const std::vector<std::size_t>& r) {
    const std::size_t n = space->size();
    if (r.size() != n) throw StructuralError("retraction size mismatch");
    if (r[0] != 0) throw StructuralError("retraction must fix the base point");
    for (std::size_t x = 0; x < n; ++x) {
        if (r[x] >= n) throw StructuralError("retraction image out of range");
        if (r[r[x]] != r[x]) throw StructuralError("retraction is not idempotent at point " + std::to_string(x));
    }
    std::vector<std::size_t> image(r);
    std::sort(image.begin(), image.end());
    image.erase(std::unique(image.begin(), image.end()), image.end());

    auto retract = share(subspace(*space, image));
    QuotientResult q = quotient(*space, image);
    auto quotient_space = share(q.space);
    SumResult mal = maltese_sum({*retract, *quotient_space}, SumMode::maltese);
    auto mal_space = share(mal.space);

    std::vector<std::size_t> pos_in_n(n, 0);
    for (std::size_t k = 0; k < image.size(); ++k) pos_in_n[image[k]] = k;
    std::vector<bool> in_n(n, false);
    for (std::size_t x : image) in_n[x] = true;

    const std::size_t m = mal_space->size();
    MatrixD t(m - 1, n - 1), s(n - 1, m - 1);
    for (std::size_t x = 1; x < n; ++x) {
        if (in_n[x]) {
            t(mal.embeddings[0][pos_in_n[x]] - 1, x - 1) += 1.0;
            continue;
        }
        if (r[x] != 0) t(mal.embeddings[0][pos_in_n[r[x]]] - 1, x - 1) += 1.0;
        t(mal.embeddings[1][q.table[x]] - 1, x - 1) += 1.0;
    }
    for (std::size_t k = 1; k < image.size(); ++k) s(image[k] - 1, mal.embeddings[0][k] - 1) += 1.0;
    for (std::size_t x = 1; x < n; ++x) {
        if (in_n[x]) continue;
        const std::size_t col = mal.embeddings[1][q.table[x]] - 1;
        s(x - 1, col) += 1.0;
        if (r[x] != 0) s(r[x] - 1, col) -= 1.0;
    }

    double lip = 0.0;
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y) lip = std::max(lip, space->d(r[x], r[y]) / space->d(x, y));
    const double p = space->p();

    return RetractionComplement{image,
                                retract,
                                std::move(q),
                                quotient_space,
                                std::move(mal),
                                mal_space,
                                FreeOperator(space, mal_space, std::move(t)),
                                FreeOperator(mal_space, space, std::move(s)),
                                lip,
                                std::pow(std::pow(lip, p) + 1.0, 1.0 / p)};
}

// ---------------------------------------------------------------------------

void validate_condition2(const Condition2Data& data) {
    if (!data.space) throw StructuralError("condition data without a space");
    const PMetricSpace& space = *data.space;
    const std::size_t n = space.size(), g = data.x.size();
    if (g == 0) throw StructuralError("condition data: empty index set");
    if (data.y.size() != g || data.f.size() != g) throw StructuralError("condition data: x, y, f sizes differ");
    if (!(data.C > 0.0) || !(data.t > 0.0)) throw StructuralError("condition data: C and t must be positive");
    for (std::size_t k = 0; k < g; ++k) {
        if (data.x[k] >= n || data.y[k] >= n) throw StructuralError("condition data: point index out of range");
        if (data.x[k] == data.y[k]) throw StructuralError("condition data: x_g = y_g for g = " + std::to_string(k));
        if (data.f[k].values().size() != n) throw StructuralError("condition data: f_g has the wrong size");
    }
    // supp_0 pairwise disjoint.
    std::vector<std::string> collisions;
    for (std::size_t z = 0; z < n; ++z) {
        std::vector<std::size_t> owners;
        for (std::size_t k = 0; k < g; ++k)
            if (data.f[k].values()[z] != 0.0) owners.push_back(k);
        for (std::size_t a = 0; a < owners.size(); ++a)
            for (std::size_t b = a + 1; b < owners.size(); ++b)
                collisions.push_back(pair_text(owners[a], owners[b]) + " at point " + std::to_string(z));
    }
    if (!collisions.empty()) {
        std::ostringstream msg;
        msg << "supports are not pairwise disjoint: ";
        for (std::size_t i = 0; i < collisions.size(); ++i) msg << (i ? "; " : "") << collisions[i];
        throw StructuralError(msg.str());
    }
    for (std::size_t k = 0; k < g; ++k) {
        if (data.f[k].values()[data.x[k]] == 0.0)
            throw StructuralError("f_g(x_g) = 0 for g = " + std::to_string(k));
        for (std::size_t j = 0; j < g; ++j) {
            if (j != k && data.f[k].values()[data.x[j]] != 0.0)
                throw StructuralError("f_g1(x_g2) != 0 for (g1,g2) = " + pair_text(k, j));
            if (data.f[k].values()[data.y[j]] != 0.0)
                throw StructuralError("f_g1(y_g2) != 0 for (g1,g2) = " + pair_text(k, j));
        }
        const double lip = data.f[k].lip(space);
        if (lip > data.C * (1.0 + kRelTol))
            throw StructuralError("Lip(f_g) = " + std::to_string(lip) + " exceeds C = " + std::to_string(data.C) +
                                  " for g = " + std::to_string(k));
        const double ratio = data.f[k].values()[data.x[k]] / space.d(data.x[k], data.y[k]);
        if (ratio < (1.0 / data.t) * (1.0 - kRelTol))
            throw StructuralError("f_g(x_g)/d(x_g,y_g) < 1/t for g = " + std::to_string(k));
    }
}

double minimal_t(const Condition2Data& data) {
    double t = 0.0;
    for (std::size_t k = 0; k < data.x.size(); ++k)
        t = std::max(t, data.space->d(data.x[k], data.y[k]) / data.f[k].values()[data.x[k]]);
    return t;
}

Condition2Operators condition2_operators(const Condition2Data& data) {
    validate_condition2(data);
    const PMetricSpace& space = *data.space;
    const std::size_t n = space.size(), g = data.x.size();
    Condition2Operators ops;
    ops.S = MatrixD(n - 1, g);
    ops.P = MatrixD(g, n - 1);
    for (std::size_t k = 0; k < g; ++k) {
        const double d = space.d(data.x[k], data.y[k]);
        if (data.x[k] != 0) ops.S(data.x[k] - 1, k) += 1.0 / d;
        if (data.y[k] != 0) ops.S(data.y[k] - 1, k) -= 1.0 / d;
        const double scale = d / data.f[k].values()[data.x[k]];
        for (std::size_t z = 1; z < n; ++z) ops.P(k, z - 1) = scale * data.f[k].values()[z];
    }
    ops.bound = std::pow(2.0, 1.0 / space.p()) * data.C * data.t;
    return ops;
}

OperatorNorm projection_norm(const Condition2Data& data, const Condition2Operators& ops) {
    const double p = data.space->p();
    return operator_norm(ops.P, *data.space, [p](const std::vector<double>& v) { return lp_quasinorm(v, p); });
}

std::string to_string(BumpStyle style) {
    switch (style) {
        case BumpStyle::isolated: return "isolated";
        case BumpStyle::metric_ball: return "metric_ball";
        case BumpStyle::condition3_metric: return "condition3_metric";
        case BumpStyle::condition3_psep: return "condition3_psep";
    }
    return "isolated";
}

BumpStyle parse_bump_style(const std::string& name) {
    for (auto s : {BumpStyle::isolated, BumpStyle::metric_ball, BumpStyle::condition3_metric, BumpStyle::condition3_psep})
        if (to_string(s) == name) return s;
    throw StructuralError("unknown bump style '" + name + "'");
}

std::vector<double> auto_radii(const PMetricSpace& space, const std::vector<std::size_t>& centers, BumpStyle style) {
    const double p = space.p();
    const bool powered = style == BumpStyle::condition3_psep;
    std::vector<double> radii;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        double nearest = space.d(centers[i], 0);
        for (std::size_t j = 0; j < centers.size(); ++j)
            if (j != i) nearest = std::min(nearest, space.d(centers[i], centers[j]));
        radii.push_back(0.5 * (powered ? std::pow(nearest, p) : nearest));
    }
    return radii;
}

Condition2Data bump_family(const SpacePtr& space, const std::vector<std::size_t>& centers, BumpStyle style,
                           const std::vector<double>& radii, double t_isolated) {
    const PMetricSpace& m = *space;
    const std::size_t n = m.size();
    const double p = m.p();
    if (centers.empty()) throw StructuralError("bump family needs at least one center");
    std::vector<bool> is_center(n, false);
    for (std::size_t c : centers) {
        if (c == 0 || c >= n) throw StructuralError("bump centers must be points other than the base point");
        if (is_center[c]) throw StructuralError("bump centers must be distinct");
        is_center[c] = true;
    }
    if (style != BumpStyle::isolated) {
        if (radii.size() != centers.size()) throw StructuralError("one radius per center is required");
        for (double r : radii)
            if (!(r > 0.0)) throw StructuralError("bump radii must be positive");
    }
    if ((style == BumpStyle::metric_ball || style == BumpStyle::condition3_metric) && !is_metric(m))
        throw StructuralError("style " + to_string(style) + " requires a metric (p = 1 triangle law)");

    // Separation conditions between centers, with x_0 = 0 and r_0 = 0.
    if (style == BumpStyle::condition3_metric || style == BumpStyle::condition3_psep) {
        const bool powered = style == BumpStyle::condition3_psep;
        std::vector<std::string> bad;
        auto dist = [&](std::size_t a, std::size_t b) { return powered ? std::pow(m.d(a, b), p) : m.d(a, b); };
        for (std::size_t i = 0; i < centers.size(); ++i) {
            if (dist(centers[i], 0) < radii[i] * (1.0 - kRelTol)) bad.push_back(pair_text(i, centers.size()));
            for (std::size_t j = i + 1; j < centers.size(); ++j)
                if (dist(centers[i], centers[j]) < (radii[i] + radii[j]) * (1.0 - kRelTol)) bad.push_back(pair_text(i, j));
        }
        if (!bad.empty()) {
            std::ostringstream msg;
            msg << "radii overlap for center pairs";
            for (const auto& b : bad) msg << " " << b;
            msg << " (index " << centers.size() << " is the base point)";
            throw StructuralError(msg.str());
        }
    }

    Condition2Data data;
    data.space = space;
    data.C = 1.0;
    if (style == BumpStyle::condition3_psep) data.C = std::pow(stats(m).separation, p - 1.0);

    auto nearest_free = [&](std::size_t x, double limit) {
        std::size_t best = n;
        for (std::size_t z = 0; z < n; ++z) {
            if (z == x || is_center[z]) continue;
            if (m.d(x, z) > limit * (1.0 + kRelTol)) continue;
            if (best == n || m.d(x, z) < m.d(x, best)) best = z;
        }
        return best;
    };

    for (std::size_t i = 0; i < centers.size(); ++i) {
        const std::size_t x = centers[i];
        std::vector<double> f(n, 0.0);
        std::size_t y = 0;
        switch (style) {
            case BumpStyle::isolated: {
                if (!(t_isolated >= 1.0)) throw StructuralError("isolated style needs t >= 1");
                double rho = std::numeric_limits<double>::infinity();
                for (std::size_t z = 0; z < n; ++z)
                    if (z != x) rho = std::min(rho, m.d(x, z));
                y = nearest_free(x, t_isolated * rho);
                if (y == n)
                    throw StructuralError("no non-center point within t*d(x, M\\{x}) of center " + std::to_string(x));
                f[x] = rho;
                break;
            }
            case BumpStyle::metric_ball: {
                y = nearest_free(x, radii[i]);
                if (y == n)
                    throw StructuralError("no non-center point within radius " + std::to_string(radii[i]) +
                                          " of center " + std::to_string(x));
                const double h = m.d(x, y);
                for (std::size_t z = 0; z < n; ++z) f[z] = std::max(h - m.d(z, x), 0.0);
                break;
            }
            case BumpStyle::condition3_metric:
                for (std::size_t z = 0; z < n; ++z) f[z] = std::max(radii[i] - m.d(z, x), 0.0);
                break;
            case BumpStyle::condition3_psep:
                for (std::size_t z = 0; z < n; ++z) f[z] = std::max(radii[i] - std::pow(m.d(z, x), p), 0.0);
                break;
        }
        f[0] = 0.0;
        data.x.push_back(x);
        data.y.push_back(y);
        data.f.emplace_back(std::move(f));
    }
    data.t = minimal_t(data);
    validate_condition2(data);
    return data;
}

// ---------------------------------------------------------------------------

double tonin_gap(double t) {
    if (!(t > 1.0)) throw StructuralError("t must exceed 1");
    const double r = std::sqrt(t);
    return (r - 1.0) / (r + 1.0);
}

std::string check_tonin(const PMetricSpace& space, const ToninSequence& seq) {
    const double p = space.p();
    for (std::size_t a = 0; a < seq.points.size(); ++a)
        for (std::size_t b = a + 1; b < seq.points.size(); ++b) {
            const double dp = std::pow(space.d(seq.points[a], seq.points[b]), p);
            if (dp < (seq.radii[a] + seq.radii[b]) * (1.0 - kRelTol))
                return "d^p(x_n,x_m) < r_n + r_m at (n,m) = " + pair_text(a, b);
            if (std::abs(seq.radii[a] - seq.radii[b]) / dp < (1.0 / seq.t) * (1.0 - kRelTol))
                return "|r_n - r_m| / d^p(x_n,x_m) < 1/t at (n,m) = " + pair_text(a, b);
        }
    return {};
}

ToninSequence tonin_select(const PMetricSpace& space, double t, ToninMode mode, std::size_t min_length,
                           std::size_t anchor) {
    const std::size_t n = space.size();
    if (anchor >= n) throw StructuralError("anchor out of range");
    ToninSequence seq;
    seq.t = t;
    seq.s = tonin_gap(t);
    const double p = space.p();
    const double limit = std::pow(seq.s, 1.0 / p);

    std::vector<std::size_t> order;
    for (std::size_t x = 0; x < n; ++x)
        if (x != anchor) order.push_back(x);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return mode == ToninMode::unbounded ? space.d(a, anchor) < space.d(b, anchor)
                                            : space.d(a, anchor) > space.d(b, anchor);
    });

    seq.points.push_back(anchor);
    for (std::size_t x : order) {
        if (seq.points.size() == 1) {
            seq.points.push_back(x);
            continue;
        }
        const double prev = space.d(seq.points.back(), anchor), cur = space.d(x, anchor);
        const double ratio = mode == ToninMode::unbounded ? prev / cur : cur / prev;
        if (ratio < limit) seq.points.push_back(x);
    }
    if (seq.points.size() - 1 < min_length) {
        std::ostringstream msg;
        msg << "no admissible chain of length " << min_length << ": consecutive distance ratios to x_0 must stay below "
            << "s^(1/p) = " << limit << " (s = " << seq.s << " for t = " << t << "); the longest chain has "
            << seq.points.size() - 1 << " point(s)";
        throw StructuralError(msg.str());
    }
    for (std::size_t k = 0; k < seq.points.size(); ++k)
        seq.radii.push_back(k == 0 ? 0.0 : std::pow(space.d(seq.points[k], anchor), p) / std::sqrt(t));
    if (auto err = check_tonin(space, seq); !err.empty()) throw StructuralError("selected sequence fails: " + err);
    return seq;
}

}  // namespace lipfree
