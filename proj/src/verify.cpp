#include "lipfree/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "lipfree/bases.hpp"
#include "lipfree/complement.hpp"
#include "lipfree/embed.hpp"
#include "lipfree/freecore.hpp"
#include "lipfree/io.hpp"
#include "lipfree/qmetric.hpp"

namespace lipfree {

using nlohmann::json;

namespace {

SpacePtr share(PMetricSpace s) { return std::make_shared<const PMetricSpace>(std::move(s)); }

// ---------------------------------------------------------------------------
// Records

Record at_most(std::string instance, double p, double bound, double measured, double tol) {
    const double margin = bound + tol - measured;
    return {std::move(instance), p, bound, measured, margin, margin >= 0};
}

Record at_least(std::string instance, double p, double bound, double measured, double tol) {
    const double margin = measured - bound + tol;
    return {std::move(instance), p, bound, measured, margin, margin >= 0};
}

Record equal(std::string instance, double p, double expected, double measured, double tol) {
    const double margin = tol - std::abs(measured - expected);
    return {std::move(instance), p, expected, measured, margin, margin >= 0};
}

Record equal_rel(std::string instance, double p, double expected, double measured, double tol) {
    return equal(std::move(instance), p, expected, measured, tol * std::max(std::abs(expected), 1e-300));
}

std::string fmt(double x) { return format_double(x); }

std::string name(const std::string& head, std::initializer_list<std::size_t> parts) {
    std::string s = head;
    for (auto v : parts) s += "-" + std::to_string(v);
    return s;
}

double pinned(const VerifyConfig& c, double tol) { return c.tolerance ? *c.tolerance : tol; }

std::vector<double> exponents(const VerifyConfig& c, std::vector<double> defaults) {
    return c.ps.empty() ? defaults : c.ps;
}

std::mt19937_64 stream(const VerifyConfig& c, int id) { return std::mt19937_64(c.seed * 1000003ULL + static_cast<std::uint64_t>(id)); }

// Plane points with d = (euclid + 1e-3)^e, e in [1, 1/p]: a valid p-metric.
PMetricSpace random_pspace(std::size_t n, double p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::array<double, 2>> pts(n);
    for (auto& q : pts) q = {u(rng), u(rng)};
    const double e = 1.0 + u(rng) * (1.0 / p - 1.0);
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) d[i][j] = std::pow(std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]) + 1e-3, e);
    return PMetricSpace({}, std::move(d), p);
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

double identity_error(const MatrixD& m) { return max_abs_diff(m, MatrixD::identity(m.rows())); }

// ---------------------------------------------------------------------------
// Criteria

void c1_lp_vs_enumerate(const VerifyConfig& c, CriterionResult& r) {
    auto rng = stream(c, 1);
    const double tol = pinned(c, 1e-8);
    const std::size_t cap = std::clamp<std::size_t>(c.max_points, 2, 7);
    for (std::size_t i = 0; i < 100; ++i) {
        const std::size_t n = pick(rng, 2, cap);
        auto space = share(random_pspace(n, 1.0, rng));
        const auto mu = Molecule::from_delta(space, random_vector(n - 1, rng));
        const double lp = norm(mu, NormMethod::lp).value;
        const double en = norm(mu, NormMethod::enumerate).value;
        r.records.push_back(equal_rel(name("space", {i, n}), 1.0, en, lp, tol));
    }
}

void c2_segment_sums(const VerifyConfig& c, CriterionResult& r) {
    const double tol = pinned(c, 1e-8);
    json goldens = json::array();
    for (double p : exponents(c, {0.5, 2.0 / 3.0, 1.0})) {
        const auto seg = integer_segment(8, p);
        for (std::size_t k = 0; k < 8; ++k)
            for (std::size_t m = k + 1; m <= 8; ++m) {
                std::vector<double> delta(8, 0.0);
                delta[m - 1] = 1.0;
                if (k > 0) delta[k - 1] = -1.0;
                const double v = norm_value(seg, delta);
                r.records.push_back(equal(name("k-m", {k, m}), p, static_cast<double>(m - k), v, tol));
                goldens.push_back({{"p", p}, {"k", k}, {"m", m}, {"norm", v}});
            }
    }
    r.extra["norms"] = goldens;
}

void c3_subbases(const VerifyConfig& c, CriterionResult& r) {
    auto rng = stream(c, 3);
    const double tol = pinned(c, 1e-8);
    for (double p : exponents(c, {0.5, 1.0})) {
        const auto sys = natural_basis(8, p);
        for (std::size_t parity : {0u, 1u})
            for (std::size_t trial = 0; trial < 50; ++trial) {
                const auto a = random_vector(4, rng);
                std::vector<double> v(8, 0.0);
                for (std::size_t k = 0; k < 4; ++k)
                    for (std::size_t i = 0; i < 8; ++i) v[i] += a[k] * sys.vectors[2 * k + 1 - parity][i];
                r.records.push_back(equal_rel(name(parity ? "odd" : "even", {trial}), p, lp_quasinorm(a, p),
                                              norm_value(*sys.ambient, v), tol));
            }
    }
}

void c4_retraction_projections(const VerifyConfig& c, CriterionResult& r) {
    const double tol = pinned(c, 1e-9);
    json constants = json::array();
    for (double p : exponents(c, {0.5, 2.0 / 3.0, 1.0})) {
        auto seg = share(integer_segment(8, p));
        double worst = 0.0;
        for (std::size_t k = 0; k < 8; ++k)
            for (std::size_t m = k + 1; m <= 8; ++m) {
                const double v = operator_norm(FreeOperator(seg, seg, retraction_projection(8, k, m))).value;
                worst = std::max(worst, v);
                r.records.push_back(equal(name("P-k-m", {k, m}), p, 1.0, v, tol));
            }
        constants.push_back({{"system", "natural"}, {"p", p}, {"size", 8}, {"basis_constant", worst}, {"bound", 1.0}});
    }
    r.extra["constants"] = constants;
}

std::vector<double> subgrid(unsigned mask) {
    const auto D = dyadic_points(3);
    std::vector<double> out{0.0};
    for (std::size_t i = 1; i < 8; ++i)
        if (mask >> (i - 1) & 1U) out.push_back(D[i]);
    out.push_back(1.0);
    return out;
}

void c5_interval_projections(const VerifyConfig& c, CriterionResult& r) {
    const double tol = pinned(c, 1e-9);
    const double id_tol = pinned(c, 1e-12);
    // Pairs (K1, K2) with K2 inside K1: each of the 7 inner points is absent,
    // in K1 only, or in both (3^7 pairs).
    std::vector<std::pair<unsigned, unsigned>> pairs;
    for (unsigned m1 = 0; m1 < 128; ++m1)
        for (unsigned m2 = m1;; m2 = (m2 - 1) & m1) {
            pairs.emplace_back(m1, m2);
            if (m2 == 0) break;
        }
    std::sort(pairs.begin(), pairs.end());

    std::map<std::pair<unsigned, unsigned>, MatrixD> P, L;
    for (auto [m1, m2] : pairs) {
        P[{m1, m2}] = interval_projection_matrix(subgrid(m1), subgrid(m2));
        L[{m1, m2}] = grid_embedding_matrix(subgrid(m1), subgrid(m2));
    }
    double err_i = 0.0, err_ii = 0.0, err_iii_a = 0.0, err_iii_b = 0.0;
    for (auto [m1, m2] : pairs) {
        const auto& p12 = P[{m1, m2}];
        const auto& l12 = L[{m1, m2}];
        err_i = std::max(err_i, identity_error(p12 * l12));
        for (unsigned m3 = m2;; m3 = (m3 - 1) & m2) {
            err_ii = std::max(err_ii, max_abs_diff(P[{m2, m3}] * p12, P[{m1, m3}]));
            err_iii_a = std::max(err_iii_a, max_abs_diff(P[{m1, m3}] * l12, P[{m2, m3}]));
            err_iii_b = std::max(err_iii_b, max_abs_diff(p12 * L[{m1, m3}], L[{m2, m3}]));
            if (m3 == 0) break;
        }
    }
    r.records.push_back(at_most("identity-PL", 0.0, 0.0, err_i, id_tol));
    r.records.push_back(at_most("identity-compose", 0.0, 0.0, err_ii, id_tol));
    r.records.push_back(at_most("identity-restrict", 0.0, 0.0, err_iii_a, id_tol));
    r.records.push_back(at_most("identity-embed", 0.0, 0.0, err_iii_b, id_tol));

    for (double p : exponents(c, {0.5, 2.0 / 3.0, 1.0})) {
        const double bound = std::pow(3.0, 1.0 / p - 1.0);
        for (auto [m1, m2] : pairs) {
            auto dom = share(custom_grid(subgrid(m1), p));
            auto cod = share(custom_grid(subgrid(m2), p));
            const double v = operator_norm(FreeOperator(dom, cod, P[{m1, m2}])).value;
            r.records.push_back(at_most(name("K1-K2", {m1, m2}), p, bound, v, tol));
        }
    }
}

void c6_haar(const VerifyConfig& c, CriterionResult& r) {
    const double tol = pinned(c, 1e-9);
    const double id_tol = pinned(c, 1e-12);
    json constants = json::array();
    for (double p : exponents(c, {0.5, 2.0 / 3.0, 1.0})) {
        const auto sys = haar_system(3, p);
        const double bound = std::pow(3.0, 1.0 / p - 1.0);
        double worst = 0.0;
        for (std::size_t j = 0; j < sys.projections.size(); ++j) {
            const double v = operator_norm(sys.projections[j]).value;
            worst = std::max(worst, v);
            r.records.push_back(at_most(name("P", {j}), p, bound, v, tol));
            if (j < sys.vectors.size()) {
                const auto image = sys.projections[j].matrix().apply(sys.vectors[j]);
                double m = 0.0;
                for (double x : image) m = std::max(m, std::abs(x));
                r.records.push_back(at_most(name("P-kills-next", {j}), p, 0.0, m, id_tol));
            }
        }
        if (p == 1.0) r.records.push_back(at_most("constant-at-p1", p, 1.0, worst, tol));
        constants.push_back({{"system", "haar"}, {"p", p}, {"size", 3}, {"basis_constant", worst}, {"bound", bound}});
    }
    const auto chk = check_basis(haar_system(3, 1.0));
    r.records.push_back(at_most("compositions", 0.0, 0.0, chk.composition, id_tol));
    r.extra["constants"] = constants;
}

void c7_retraction_complement(const VerifyConfig& c, CriterionResult& r) {
    auto rng = stream(c, 7);
    const double tol = pinned(c, 1e-9);
    const double id_tol = pinned(c, 1e-10);
    const auto ps = exponents(c, {0.5, 1.0});
    const std::size_t cap = std::clamp<std::size_t>(c.max_points, 3, 7);
    for (std::size_t i = 0; i < 50; ++i) {
        const double p = ps[i % ps.size()];
        const std::size_t n = pick(rng, 3, cap);
        auto space = share(random_pspace(n, p, rng));
        std::vector<std::size_t> subset{0};
        for (std::size_t x = 1; x < n; ++x)
            if (rng() % 2) subset.push_back(x);
        const auto rc = retraction_complement(space, nearest_point_retraction(*space, subset));
        const std::string id = name("instance", {i, n});
        r.records.push_back(at_most(id + "-ST", p, 0.0, identity_error(compose(rc.S, rc.T).matrix()), id_tol));
        r.records.push_back(at_most(id + "-TS", p, 0.0, identity_error(compose(rc.T, rc.S).matrix()), id_tol));
        r.records.push_back(at_most(id + "-T", p, rc.bound, operator_norm(rc.T).value, tol));
        r.records.push_back(at_most(id + "-S", p, rc.bound, operator_norm(rc.S).value, tol));
    }
}

void condition2_rows(const std::string& id, double p, const Condition2Data& data, double bound, double tol,
                     double id_tol, CriterionResult& r) {
    const auto ops = condition2_operators(data);
    r.records.push_back(at_most(id + "-PS", p, 0.0, identity_error(ops.P * ops.S), id_tol));
    r.records.push_back(at_most(id + "-P", p, bound, projection_norm(data, ops).value, tol));
}

void c8_condition2(const VerifyConfig& c, CriterionResult& r) {
    auto rng = stream(c, 8);
    const double tol = pinned(c, 1e-9);
    const double id_tol = pinned(c, 1e-12);
    const std::size_t cap = std::clamp<std::size_t>(c.max_points, 5, 9);
    for (double p : exponents(c, {0.5, 1.0})) {
        // Isolated points of random uniformly discrete spaces.
        for (std::size_t i = 0; i < 10; ++i) {
            const std::size_t n = pick(rng, 5, cap);
            auto space = share(random_pspace(n, p, rng));
            std::vector<std::size_t> centers;
            for (std::size_t x = 1; x < n; ++x)
                if (rng() % 2) centers.push_back(x);
            if (centers.empty() || centers.size() == n - 1) centers = {1};
            const auto data = bump_family(space, centers, BumpStyle::isolated, {}, 1e6);
            condition2_rows(name("isolated", {i, n}), p, data, std::pow(2.0, 1.0 / p) * data.C * data.t, tol, id_tol, r);
        }
        // Metric balls on Z[0,8]: t = 1 and C = 1.
        auto seg = share(integer_segment(8, p));
        const std::vector<std::vector<std::size_t>> layouts{{2, 5, 8}, {1, 3, 5, 7}};
        for (std::size_t i = 0; i < layouts.size(); ++i) {
            const auto data =
                bump_family(seg, layouts[i], BumpStyle::metric_ball, std::vector<double>(layouts[i].size(), 1.0));
            condition2_rows(name("metric-ball", {i}), p, data, std::pow(2.0, 1.0 / p), tol, id_tol, r);
        }
        // Separated sequence with selected radii on |x - y|^(1/p).
        auto line = share(line_space({0, 1, 2, 4, 8, 16}, 1.0));
        auto flake = share(snowflake(*line, 1.0 / p, p));
        const auto seq = tonin_select(*flake, 16.0, ToninMode::unbounded, 5);
        std::vector<std::size_t> centers(seq.points.begin() + 1, seq.points.end());
        std::vector<double> radii(seq.radii.begin() + 1, seq.radii.end());
        const auto data = bump_family(flake, centers, BumpStyle::condition3_psep, radii);
        condition2_rows("separated-sequence", p, data, std::pow(2.0, 1.0 / p) * data.C * data.t, tol, id_tol, r);
    }
}

void c9_sum_isomorphisms(const VerifyConfig& c, CriterionResult& r) {
    auto rng = stream(c, 9);
    const double tol = pinned(c, 1e-9);
    const std::size_t total_cap = std::clamp<std::size_t>(c.max_points, 4, 8);
    for (double p : exponents(c, {0.5, 1.0})) {
        for (std::size_t i = 0; i < 10; ++i) {
            std::vector<PMetricSpace> parts;
            std::size_t total = 1;
            for (std::size_t a = 0; a < 3; ++a) {
                const std::size_t room = total_cap - total - (2 - a);
                const std::size_t size = pick(rng, 2, std::min<std::size_t>(4, room + 1));
                parts.push_back(random_pspace(size, p, rng));
                total += size - 1;
            }
            const auto iso = maltese_isometry(parts);
            const std::string id = name("maltese", {i, total});
            r.records.push_back(equal(id + "-T", p, 1.0, forward_norm(iso).value, tol));
            r.records.push_back(at_most(id + "-Tinv", p, iso.K, inverse_norm(iso).value, tol));
        }
        for (std::size_t i = 0; i < 10; ++i) {
            const std::size_t n = total_cap;
            auto space = share(random_pspace(n, p, rng));
            std::vector<std::vector<std::size_t>> blocks(3);
            for (std::size_t x = 1; x < n; ++x) blocks[x < 4 ? x - 1 : rng() % 3].push_back(x);
            const auto iso = partition_isomorphism(space, blocks);
            const std::string id = name("partition", {i, n});
            r.records.push_back(equal(id + "-T", p, 1.0, forward_norm(iso).value, tol));
            r.records.push_back(at_most(id + "-Tinv", p, iso.K, inverse_norm(iso).value, tol));
        }
    }
}

void c10_lower_lp(const VerifyConfig& c, CriterionResult& r) {
    auto rng = stream(c, 10);
    const double tol = pinned(c, 1e-9);
    for (double p : exponents(c, {0.5, 1.0})) {
        const auto space = line_space({0, 1, 4, 16, 64, 256}, p);
        const double s = 1.01 * std::pow(0.25, p);
        const double t = std::pow((1 + s) / (1 - s), 2.0);
        const auto seq = tonin_select(space, t, ToninMode::unbounded, 5);
        std::vector<std::vector<double>> coeffs;
        for (int k = 0; k < 50; ++k) coeffs.push_back(random_vector(5, rng));
        const auto rep = anso_micha_verify(space, seq, coeffs, tol);
        for (std::size_t k = 0; k < rep.rows.size(); ++k) {
            const auto& row = rep.rows[k];
            const double slack = tol * std::max(1.0, row.lp);
            r.records.push_back(at_least(name("lower", {k}), p, row.lower, row.value, slack));
            r.records.push_back(at_most(name("upper", {k}), p, row.lp, row.value, slack));
        }
        r.extra["t"].push_back({{"p", p}, {"t", t}, {"effective_t", rep.effective_t}});
    }
}

void c11_ultrametric(const VerifyConfig& c, CriterionResult& r) {
    auto rng = stream(c, 11);
    const double tol = pinned(c, 1e-6);
    double previous = 0.0;
    for (double t : {1.1, 1.01}) {
        const auto chain = ultrametric_chain(6, 1.01 / tonin_gap(t), 1.0);
        const auto seq = tonin_select(chain, t, ToninMode::unbounded, 5);
        std::vector<std::vector<double>> coeffs;
        for (int k = 0; k < 50; ++k) coeffs.push_back(random_vector(5, rng));
        const auto rep = anso_micha_verify(chain, seq, coeffs);
        r.records.push_back(at_most("distortion-t-" + fmt(t), 1.0, t, rep.distortion, tol));
        if (previous > 0) {
            const double margin = previous - rep.distortion;
            r.records.push_back({"decreasing", 1.0, previous, rep.distortion, margin, margin > 0});
        }
        previous = rep.distortion;
    }
}

StepMap tent(double center, double h, double slope, double offset, double sign) {
    return [=](const Point& x) {
        const double g = std::max(h - slope * std::abs(x[0] - center), 0.0);
        return sign * StepFunction::indicator(offset, offset + g);
    };
}

void c12_sum_lip(const VerifyConfig& c, CriterionResult& r) {
    auto rng = stream(c, 12);
    const double tol = pinned(c, 1e-6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto qs = exponents(c, {0.5, 1.0});
    for (double q : qs) {
        for (std::size_t i = 0; i < 6; ++i) {
            std::vector<StepMap> fs;
            std::vector<Point> samples;
            double L = 0.0, left = 0.0, right = 0.0;
            const std::size_t count = i == 0 ? 2 : pick(rng, 2, 4);
            for (std::size_t k = 0; k < count; ++k) {
                const double h = i == 0 ? 1.0 : 0.5 + 1.5 * u(rng);
                const double slope = i == 0 ? 1.0 : 0.5 + 1.5 * u(rng);
                const double gap = i == 0 ? 0.0 : 0.5 * u(rng);
                const double center = right + gap + h / slope;
                const double sign = i == 0 || rng() % 2 ? 1.0 : -1.0;
                const double offset = rng() % 2 ? 0.0 : 3.0 * static_cast<double>(k);
                fs.push_back(tent(center, h, slope, offset, sign));
                L = std::max(L, slope * std::pow(h, 1.0 / q - 1.0));
                for (double x : {center - h / slope, center, center + h / slope}) samples.push_back({x});
                right = center + h / slope;
            }
            for (std::size_t k = 0; k <= 300; ++k)
                samples.push_back({left - 1.0 + (right - left + 2.0) * static_cast<double>(k) / 300.0});
            const auto rep = disjoint_sum_check(fs, samples, L, q, 1.0, 8, tol);
            const double margin = rep.bound * (1 + tol) - rep.measured;
            r.records.push_back({name("bumps", {i, count}), q, rep.bound, rep.measured, margin, margin >= 0});
            r.records.push_back(at_most(name("witness", {i}), q, 0.0, static_cast<double>(rep.missing_witness), 0.0));
        }
    }
}

void c13_quotient(const VerifyConfig& c, CriterionResult& r) {
    auto rng = stream(c, 13);
    const double tol = pinned(c, 1e-12);
    std::uniform_real_distribution<double> u(0.3, 1.0);
    const std::size_t cap = std::clamp<std::size_t>(c.max_points, 3, 12);
    for (std::size_t i = 0; i < 100; ++i) {
        const double p = c.ps.empty() ? u(rng) : c.ps[i % c.ps.size()];
        const std::size_t n = pick(rng, 3, cap);
        const auto space = random_pspace(n, p, rng);
        std::vector<std::size_t> subset{0};
        for (std::size_t x = 1; x < n; ++x)
            if (rng() % 3 == 0) subset.push_back(x);
        const auto q = quotient(space, subset);
        const auto val = validate(q.space);
        const std::string id = name("instance", {i, n});
        r.records.push_back(at_most(id + "-violations", p, 0.0,
                                    static_cast<double>(val.triangle_violations.size() + val.axiom_violations.size()),
                                    0.0));
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            std::vector<double> f = random_vector(n, rng);
            for (auto x : subset) f[x] = 0.0;
            std::vector<double> g(q.space.size(), 0.0);
            for (std::size_t x = 0; x < n; ++x) g[q.table[x]] = f[x];
            const double before = LipschitzFunction(f).lip(space);
            const double after = LipschitzFunction(g).lip(q.space);
            worst = std::max(worst, std::abs(after - before) / before);
        }
        r.records.push_back(at_most(id + "-lip", p, 0.0, worst, tol));
    }
}

void c14_bridge(const VerifyConfig& c, CriterionResult& r) {
    const double tol = pinned(c, 1e-9);
    for (double p : exponents(c, {0.5, 1.0}))
        for (std::size_t N = 0; N <= 3; ++N) {
            const auto rep = scaling_bridge(N, p, 20, c.seed + N);
            r.records.push_back(at_most(name("level", {N}), p, 0.0, rep.max_relative_error, tol));
        }
}

using Runner = void (*)(const VerifyConfig&, CriterionResult&);

struct Entry {
    const char* title;
    Runner run;
};

const Entry kCriteria[kCriterionCount] = {
    {"LP and enumeration norms agree on random spaces", c1_lp_vs_enumerate},
    {"||x_{k+1} + ... + x_m|| = m - k on Z[0,8]", c2_segment_sums},
    {"even and odd subbases are isometric to l_p", c3_subbases},
    {"retraction projections P[k,m] have norm one", c4_retraction_projections},
    {"interval projections bounded by 3^(1/p-1) with exact identities", c5_interval_projections},
    {"Haar partial sums bounded by 3^(1/p-1)", c6_haar},
    {"retraction complement isomorphisms", c7_retraction_complement},
    {"bump families give 2^(1/p) C t complemented copies", c8_condition2},
    {"sum isomorphisms: ||T|| = 1 and ||T^-1|| <= K", c9_sum_isomorphisms},
    {"lower l_p estimate for separated sequences", c10_lower_lp},
    {"ultrametric chains are almost isometric to l_1", c11_ultrametric},
    {"disjointly supported Lipschitz sums", c12_sum_lip},
    {"quotients are p-metrics and preserve Lipschitz constants", c13_quotient},
    {"dyadic grid and integer segment agree under dilation", c14_bridge},
};

const Entry& entry(int id) {
    if (id < 1 || id > kCriterionCount) throw StructuralError("unknown criterion " + std::to_string(id));
    return kCriteria[id - 1];
}

}  // namespace

std::vector<std::string> suite_names() { return {"qmetric", "norms", "complement", "embed", "bases", "all"}; }

std::vector<int> suite_criteria(const std::string& suite) {
    if (suite == "qmetric") return {13};
    if (suite == "norms") return {1, 14};
    if (suite == "complement") return {7, 8, 9};
    if (suite == "embed") return {10, 11, 12};
    if (suite == "bases") return {2, 3, 4, 5, 6, 14};
    if (suite == "all") {
        std::vector<int> all(kCriterionCount);
        for (int i = 0; i < kCriterionCount; ++i) all[i] = i + 1;
        return all;
    }
    throw StructuralError("unknown suite '" + suite + "'");
}

std::string criterion_title(int id) { return entry(id).title; }

CriterionResult run_criterion(int id, const VerifyConfig& config) {
    CriterionResult r;
    r.id = id;
    r.title = entry(id).title;
    r.extra = json::object();
    entry(id).run(config, r);
    r.pass = !r.records.empty() &&
             std::all_of(r.records.begin(), r.records.end(), [](const Record& x) { return x.pass; });
    return r;
}

bool SuiteResult::pass() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.pass; });
}

std::size_t SuiteResult::passed_rows() const {
    std::size_t n = 0;
    for (const auto& c : criteria)
        for (const auto& rec : c.records) n += rec.pass ? 1 : 0;
    return n;
}

std::size_t SuiteResult::failed_rows() const {
    std::size_t n = 0;
    for (const auto& c : criteria)
        for (const auto& rec : c.records) n += rec.pass ? 0 : 1;
    return n;
}

SuiteResult run_suite(const VerifyConfig& config) {
    if (config.workers > 0) set_worker_count(config.workers);
    SuiteResult out;
    out.suite = config.suite;
    for (int id : suite_criteria(config.suite)) out.criteria.push_back(run_criterion(id, config));
    return out;
}

std::string records_csv(const SuiteResult& result) {
    std::ostringstream s;
    s << "criterion,instance,p,bound,measured,margin,pass\n";
    for (const auto& c : result.criteria)
        for (const auto& rec : c.records)
            s << c.id << ',' << rec.instance << ',' << fmt(rec.p) << ',' << fmt(rec.bound) << ',' << fmt(rec.measured)
              << ',' << fmt(rec.margin) << ',' << (rec.pass ? "true" : "false") << '\n';
    return s.str();
}

json suite_json(const SuiteResult& result) {
    json j;
    j["suite"] = result.suite;
    j["pass"] = result.pass();
    json crits = json::array();
    for (const auto& c : result.criteria) {
        json records = json::array();
        for (const auto& rec : c.records)
            records.push_back({{"instance", rec.instance},
                               {"p", rec.p},
                               {"bound", rec.bound},
                               {"measured", rec.measured},
                               {"slack", rec.margin},
                               {"pass", rec.pass}});
        crits.push_back({{"id", c.id}, {"title", c.title}, {"pass", c.pass}, {"records", records}, {"extra", c.extra}});
    }
    j["criteria"] = crits;
    return j;
}

void write_reports(const SuiteResult& result, const std::string& out) {
    write_text_file(out + "/" + result.suite + ".csv", records_csv(result));
    write_text_file(out + "/" + result.suite + ".json", suite_json(result).dump(2) + "\n");
    std::ostringstream s;
    bool any = false;
    s << "system,p,N_or_m,basis_constant,bound,margin\n";
    for (const auto& c : result.criteria) {
        if (!c.extra.contains("constants")) continue;
        for (const auto& row : c.extra["constants"]) {
            any = true;
            const double v = row["basis_constant"].get<double>(), b = row["bound"].get<double>();
            s << row["system"].get<std::string>() << ',' << fmt(row["p"].get<double>()) << ','
              << row["size"].get<int>() << ',' << fmt(v) << ',' << fmt(b) << ',' << fmt(b - v) << '\n';
        }
    }
    if (any) write_text_file(out + "/bases_constants.csv", s.str());
    json goldens = json::object();
    for (const auto& c : result.criteria)
        if (!c.extra.empty()) goldens[std::to_string(c.id)] = c.extra;
    if (!goldens.empty()) write_text_file(out + "/" + result.suite + "_goldens.json", goldens.dump(2) + "\n");
}

VerifyConfig read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StructuralError("cannot open config " + path);
    VerifyConfig c;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw StructuralError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        try {
            if (key == "suite")
                c.suite = value;
            else if (key == "p") {
                std::stringstream ss(value);
                std::string item;
                while (std::getline(ss, item, ','))
                    if (!trim(item).empty()) c.ps.push_back(std::stod(trim(item)));
            } else if (key == "max_points" || key == "max-points")
                c.max_points = std::stoul(value);
            else if (key == "seed")
                c.seed = std::stoull(value);
            else if (key == "out")
                c.out = value;
            else if (key == "workers")
                c.workers = static_cast<unsigned>(std::stoul(value));
            else if (key == "tolerance")
                c.tolerance = std::stod(value);
            else
                throw StructuralError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        } catch (const std::logic_error& e) {
            if (dynamic_cast<const StructuralError*>(&e) == nullptr && dynamic_cast<const std::invalid_argument*>(&e) == nullptr &&
                dynamic_cast<const std::out_of_range*>(&e) == nullptr)
                throw;
            throw StructuralError(path + ":" + std::to_string(lineno) + ": bad value for '" + key + "'");
        }
    }
    return c;
}

}  // namespace lipfree
