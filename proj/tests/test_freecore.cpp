#include <memory>
#include <random>

#include "doctest.h"
#include "lipfree/freecore.hpp"
#include "oracles.hpp"

using namespace lipfree;

namespace {

SpacePtr share(PMetricSpace s) { return std::make_shared<const PMetricSpace>(std::move(s)); }

Molecule dirac_pair(const SpacePtr& s, std::size_t x, std::size_t y, double w = 1.0) {
    std::vector<double> c(s->size(), 0.0);
    c[y] += w;
    c[x] -= w;
    return Molecule(s, c);
}

double reproduce_error(const Molecule& mu, const NormCertificate& cert) {
    auto sum = primal_sum(mu.space(), cert.primal);
    double worst = 0.0;
    for (std::size_t i = 0; i < sum.size(); ++i) worst = std::max(worst, std::abs(sum[i] - mu.coeffs()[i]));
    return worst;
}

// Retraction r[k,m](n) = max{k, min{n, m}} followed by translation so that k -> 0
// is not needed here: on Z[0,M] with k = 0 the base is fixed.
std::vector<std::size_t> clamp_map(std::size_t size, std::size_t m) {
    std::vector<std::size_t> f(size);
    for (std::size_t i = 0; i < size; ++i) f[i] = std::min(i, m);
    return f;
}

}  // namespace

TEST_CASE("molecules") {
    auto two = share(PMetricSpace({}, {{0, 2}, {2, 0}}, 1.0));
    auto el = elementary_molecules(two);
    REQUIRE(el.size() == 1);
    CHECK(el[0].coeffs() == std::vector<double>{-0.5, 0.5});

    CHECK(elementary_molecules(share(integer_segment(2, 1.0))).size() == 3);
    auto dy = share(dyadic_grid(1, 1.0));
    CHECK(elementary_molecules(dy)[1].coeffs() == std::vector<double>{-1, 0, 1});

    CHECK_THROWS_AS(Molecule(two, {1.0, 1.0}), StructuralError);
    CHECK_THROWS_AS(Molecule(two, {1.0}), StructuralError);
    auto fd = Molecule::from_delta(dy, {2.0, -1.0});
    CHECK(fd.coeffs() == std::vector<double>{-1, 2, -1});
    CHECK(fd.delta() == std::vector<double>{2, -1});
}

TEST_CASE("method names") {
    for (auto m : {NormMethod::automatic, NormMethod::lp, NormMethod::enumerate, NormMethod::tree_dp,
                   NormMethod::bounds_only})
        CHECK(parse_norm_method(to_string(m)) == m);
    CHECK_THROWS_AS((void)parse_norm_method("simplex"), StructuralError);
}

TEST_CASE("elementary molecules have norm one") {
    std::mt19937_64 rng(21);
    for (double p : {0.3, 0.5, 1.0}) {
        auto s = share(oracle::random_space(6, p, rng));
        for (const auto& z : elementary_molecules(s)) {
            auto dp = norm(z, NormMethod::tree_dp);
            auto en = norm(z, NormMethod::enumerate);
            CHECK(dp.value == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(en.value == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(dp.lower <= dp.value + 1e-12);
        }
    }
}

TEST_CASE("segment sums have norm m") {
    for (double p : {0.5, 2.0 / 3.0, 1.0})
        for (std::size_t m = 1; m <= 8; ++m) {
            auto s = share(integer_segment(m, p));
            auto mu = dirac_pair(s, 0, m);
            CHECK(norm(mu, NormMethod::tree_dp).value == doctest::Approx(double(m)).epsilon(1e-12));
            if (m <= 7) CHECK(norm(mu, NormMethod::enumerate).value == doctest::Approx(double(m)).epsilon(1e-12));
        }
}

TEST_CASE("even-odd differences span l_p isometrically") {
    const double p = 0.5;
    const std::size_t K = 4;
    auto s = share(integer_segment(2 * K, p));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> c(2 * K + 1, 0.0), a(K);
        for (std::size_t k = 1; k <= K; ++k) {
            a[k - 1] = u(rng);
            c[2 * k] += a[k - 1];
            c[2 * k - 1] -= a[k - 1];
        }
        CHECK(norm(Molecule(s, c), NormMethod::tree_dp).value == doctest::Approx(lp_quasinorm(a, p)).epsilon(1e-10));
    }
}

TEST_CASE("exact engines agree with the subset oracle") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 3 + static_cast<std::size_t>(trial % 4);
        const double p = trial % 3 == 0 ? 1.0 : (trial % 3 == 1 ? 0.5 : 0.25);
        auto s = share(oracle::random_space(n, p, rng));
        auto delta = oracle::random_delta(n, rng);
        auto mu = Molecule::from_delta(s, delta);
        const double ref = oracle::subset_norm(*s, delta);
        auto en = norm(mu, NormMethod::enumerate);
        auto dp = norm(mu, NormMethod::tree_dp);
        CHECK(en.value == doctest::Approx(ref).epsilon(1e-10));
        CHECK(dp.value == doctest::Approx(ref).epsilon(1e-10));
        CHECK(norm_value(*s, delta) == doctest::Approx(ref).epsilon(1e-10));
        CHECK(reproduce_error(mu, en) <= 1e-10);
        CHECK(reproduce_error(mu, dp) <= 1e-10);
        CHECK(en.primal.size() <= n - 1);
    }
}

TEST_CASE("frozen exact values") {
    // Distances are integers and the rational oracle solves every support
    // exactly; values computed once and frozen.
    std::vector<std::vector<double>> d{{0, 1, 3, 4}, {1, 0, 2, 4}, {3, 2, 0, 2}, {4, 4, 2, 0}};
    std::vector<std::vector<Rational>> dq(4, std::vector<Rational>(4));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) dq[i][j] = Rational(static_cast<int>(d[i][j]));
    const std::vector<Rational> delta_q{Rational(1), Rational(-2), Rational(3, 2)};
    const std::vector<double> delta{1.0, -2.0, 1.5};
    auto s = share(PMetricSpace({}, d, 0.5));
    const double exact = oracle::subset_norm<Rational>(dq, 0.5, delta_q);
    CHECK(exact == doctest::Approx(11.827804920294026).epsilon(1e-12));
    CHECK(norm(Molecule::from_delta(s, delta), NormMethod::enumerate).value ==
          doctest::Approx(11.827804920294026).epsilon(1e-12));
    auto s1 = share(PMetricSpace({}, d, 1.0));
    CHECK(norm(Molecule::from_delta(s1, delta), NormMethod::lp).value ==
          doctest::Approx(4.5).epsilon(1e-12));
}

TEST_CASE("lp and enumerate agree at p = 1") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 100; ++trial) {
        auto s = share(oracle::random_space(5, 1.0, rng));
        auto mu = Molecule::from_delta(s, oracle::random_delta(5, rng));
        auto lp = norm(mu, NormMethod::lp);
        auto en = norm(mu, NormMethod::enumerate);
        CHECK(lp.value == doctest::Approx(en.value).epsilon(1e-8));
        CHECK(lp.gap() <= 1e-9 * std::max(1.0, lp.value));
        CHECK(lp.lower <= lp.value + 1e-9);
        CHECK(reproduce_error(mu, lp) <= 1e-10);
    }
}

TEST_CASE("flow and inequality forms agree") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 7);
        auto s = share(oracle::random_space(n, trial % 2 ? 1.0 : 0.4, rng));
        auto mu = Molecule::from_delta(s, oracle::random_delta(n, rng));
        auto flow = transport_flow(mu);
        auto dual = dual_lower_bound(mu);
        CHECK(flow.value == doctest::Approx(dual.value).epsilon(1e-9));
        CHECK(dual.f.lip(*s) <= 1.0 + 1e-9);
    }
}

TEST_CASE("dual lower bound") {
    auto seg = share(integer_segment(3, 1.0));
    auto d = dual_lower_bound(dirac_pair(seg, 0, 3));
    CHECK(d.value == doctest::Approx(3.0));
    for (std::size_t x = 0; x < 4; ++x) CHECK(d.f.values()[x] == doctest::Approx(double(x)));

    std::mt19937_64 rng(8);
    auto metric = share(oracle::random_space(5, 1.0, rng));
    for (const auto& z : elementary_molecules(metric)) CHECK(dual_lower_bound(z).value == doctest::Approx(1.0));

    auto flake = share(snowflake(integer_segment(2, 1.0), 2.0, 0.5));
    auto mu = dirac_pair(flake, 0, 2);
    CHECK(dual_lower_bound(mu).value <= norm(mu, NormMethod::enumerate).value + 1e-12);
}

TEST_CASE("norm properties") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 30; ++trial) {
        const double p = 0.3 + 0.02 * trial;
        auto s = share(oracle::random_space(6, p, rng));
        auto a = oracle::random_delta(6, rng), b = oracle::random_delta(6, rng);
        const double c = u(rng);
        std::vector<double> ca(a), ab(a);
        for (std::size_t i = 0; i < a.size(); ++i) {
            ca[i] *= c;
            ab[i] += b[i];
        }
        const double na = norm_value(*s, a), nb = norm_value(*s, b);
        CHECK(norm_value(*s, ca) == doctest::Approx(std::abs(c) * na).epsilon(1e-9));
        CHECK(std::pow(norm_value(*s, ab), p) <= std::pow(na, p) + std::pow(nb, p) + 1e-12);
        CHECK(norm_value(dilate(*s, 3.5), a) == doctest::Approx(3.5 * na).epsilon(1e-9));

        auto mu = Molecule::from_delta(s, a);
        auto cert = norm(mu);
        CHECK(cert.exact);
        CHECK(cert.lower <= cert.value + 1e-9);
        CHECK(cert.value <= cert.upper + 1e-9 * cert.value);
        auto rough = norm(mu, NormMethod::bounds_only);
        CHECK_FALSE(rough.exact);
        CHECK(rough.upper >= cert.value - 1e-12);
        CHECK(reproduce_error(mu, rough) <= 1e-10);
    }
}

TEST_CASE("norm grows as p decreases") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        auto base = oracle::random_space(6, 1.0, rng);
        auto delta = oracle::random_delta(6, rng);
        double previous = 0.0;
        for (double p : {1.0, 0.8, 0.6, 0.4, 0.2}) {
            PMetricSpace s(base.labels(), base.matrix(), p);
            const double v = norm_value(s, delta);
            CHECK(v >= previous * (1.0 - 1e-12));
            previous = v;
        }
    }
}

TEST_CASE("results do not depend on the worker count") {
    std::mt19937_64 rng(5);
    auto s = share(oracle::random_space(8, 0.5, rng));
    auto mu = Molecule::from_delta(s, oracle::random_delta(8, rng));
    set_worker_count(1);
    auto one = norm(mu, NormMethod::enumerate, {.skip_dual = true});
    set_worker_count(4);
    auto four = norm(mu, NormMethod::enumerate, {.skip_dual = true});
    set_worker_count(0);
    CHECK(one.value == four.value);
    REQUIRE(one.primal.size() == four.primal.size());
    for (std::size_t i = 0; i < one.primal.size(); ++i) {
        CHECK(one.primal[i].x == four.primal[i].x);
        CHECK(one.primal[i].y == four.primal[i].y);
        CHECK(one.primal[i].lambda == four.primal[i].lambda);
    }
}

TEST_CASE("ties resolve to the lexicographically smallest support") {
    // Z[0,2] at p = 1: delta(2) - delta(0) is optimal along 0-1-2 and along 0-2.
    auto s = share(integer_segment(2, 1.0));
    auto cert = norm(dirac_pair(s, 0, 2), NormMethod::enumerate, {.skip_dual = true});
    REQUIRE(cert.primal.size() == 2);
    CHECK(cert.primal[0].x == 0);
    CHECK(cert.primal[0].y == 1);
    CHECK(cert.primal[1].x == 1);
    CHECK(cert.primal[1].y == 2);
}

TEST_CASE("method errors") {
    auto big = share(integer_segment(10, 0.5));
    auto mu = dirac_pair(big, 0, 10);
    CHECK_THROWS_AS((void)norm(mu, NormMethod::enumerate), ResourceError);
    CHECK_THROWS_AS((void)norm(mu, NormMethod::lp), StructuralError);
    CHECK(norm(mu, NormMethod::tree_dp).value == doctest::Approx(10.0));
    auto huge = share(integer_segment(20, 0.5));
    auto cert = norm(dirac_pair(huge, 0, 20));
    CHECK(cert.method == NormMethod::bounds_only);
    CHECK_FALSE(cert.exact);
    CHECK(norm(dirac_pair(share(integer_segment(20, 1.0)), 0, 20)).method == NormMethod::lp);
}

TEST_CASE("operators from Lipschitz maps") {
    auto s = share(integer_segment(5, 0.5));
    std::vector<std::size_t> id{0, 1, 2, 3, 4, 5};
    auto ident = operator_from_lipschitz(s, s, id);
    CHECK(ident.lip == 1.0);
    CHECK(ident.op.matrix() == MatrixD::identity(5));
    CHECK(operator_norm(ident.op).value == doctest::Approx(1.0));

    auto zero = operator_from_lipschitz(s, s, std::vector<std::size_t>(6, 0));
    CHECK(zero.op.matrix() == MatrixD(5, 5));
    CHECK(zero.lip == 0.0);
    CHECK_THROWS_AS((void)operator_from_lipschitz(s, s, {1, 1, 2, 3, 4, 5}), StructuralError);

    for (std::size_t m = 0; m <= 5; ++m) {
        auto clamp = operator_from_lipschitz(s, s, clamp_map(6, m));
        CHECK(clamp.lip <= 1.0);
        CHECK(operator_norm(clamp.op).value <= 1.0 + 1e-12);
        for (std::size_t k = 0; k <= 5; ++k) {
            auto other = operator_from_lipschitz(s, s, clamp_map(6, k));
            auto prod = compose(other.op, clamp.op);
            CHECK(prod.matrix() == operator_from_lipschitz(s, s, clamp_map(6, std::min(k, m))).op.matrix());
        }
    }
    auto t = operator_from_lipschitz(s, s, clamp_map(6, 2)).op;
    auto mu = dirac_pair(s, 1, 4);
    CHECK(t.apply(mu).coeffs() == std::vector<double>{0, -1, 1, 0, 0, 0});

    auto other = share(integer_segment(3, 0.5));
    auto small = operator_from_lipschitz(other, other, {0, 1, 2, 3}).op;
    CHECK_THROWS_AS((void)compose(small, t), StructuralError);
}
