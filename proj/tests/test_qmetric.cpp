#include <random>

#include "doctest.h"
#include "lipfree/qmetric.hpp"
#include "oracles.hpp"

using namespace lipfree;

namespace {

PMetricSpace three_points(double ab, double bc, double ac, double p) {
    return PMetricSpace({"a", "b", "c"}, {{0, ab, ac}, {ab, 0, bc}, {ac, bc, 0}}, p);
}

}  // namespace

TEST_CASE("validate accepts and rejects") {
    CHECK(validate(PMetricSpace({}, {{0, 1}, {1, 0}}, 0.5)).ok);

    auto bad = validate(three_points(1, 1, 3, 1.0));
    REQUIRE_FALSE(bad.ok);
    REQUIRE(bad.triangle_violations.size() == 1);
    CHECK(bad.triangle_violations[0] == std::array<std::size_t, 3>{0, 2, 1});

    // {0,1,2} with |x-y|^(1/p), p = 1/2: 2^(1/2 * 2) = 2 <= 1 + 1.
    CHECK(validate(three_points(1, 1, 4, 0.5)).ok);
    CHECK_FALSE(validate(three_points(1, 1, 4.01, 0.5)).ok);
}

TEST_CASE("validate reports axiom failures") {
    CHECK_FALSE(validate(PMetricSpace({}, {{0, 1}, {2, 0}}, 1.0)).ok);
    CHECK_FALSE(validate(PMetricSpace({}, {{0, 0}, {0, 0}}, 1.0)).ok);
    CHECK_FALSE(validate(PMetricSpace({}, {{1, 1}, {1, 0}}, 1.0)).ok);
    CHECK_THROWS_AS(PMetricSpace({}, {{0, 1}, {1}}, 1.0), StructuralError);
    CHECK_THROWS_AS(PMetricSpace({}, {{0}}, 1.5), StructuralError);
    CHECK_THROWS_AS(PMetricSpace({}, {}, 1.0), StructuralError);
}

TEST_CASE("stats") {
    auto s = stats(integer_segment(3, 1.0));
    CHECK(s.separation == 1.0);
    CHECK(s.diameter == 3.0);
    CHECK(s.isolated.size() == 4);
}

TEST_CASE("snowflake") {
    auto seg = integer_segment(3, 1.0);
    CHECK(snowflake(seg, 1.0, 1.0).same_as(seg));

    auto half = snowflake(seg, 0.5, 1.0);
    CHECK(half.d(0, 3) == doctest::Approx(std::sqrt(3.0)));
    CHECK(snowflake_exponent(1.0, 0.5) == 1.0);
    CHECK(snowflake_exponent(0.5, 2.0) == 0.25);

    // Raising a metric to a power > 1 generally breaks the triangle law.
    CHECK_THROWS_AS((void)snowflake(seg, 2.0, 1.0), StructuralError);
    CHECK_NOTHROW(snowflake(seg, 2.0, 0.5));

    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) {
        auto space = oracle::random_space(5, 1.0, rng);
        auto s = snowflake(space, 0.7, 1.0);
        CHECK(validate(s).ok);
        auto back = snowflake(s, 1.0 / 0.7, 0.7);
        for (std::size_t a = 0; a < 5; ++a)
            for (std::size_t b = 0; b < 5; ++b)
                CHECK(std::abs(back.d(a, b) - space.d(a, b)) <= 1e-12 * std::max(1.0, space.d(a, b)));
    }
}

TEST_CASE("dilate and subspace") {
    auto seg = integer_segment(4, 0.5);
    auto big = dilate(seg, 2.5);
    CHECK(big.d(1, 4) == 7.5);
    auto sub = subspace(seg, {2, 0, 4});
    CHECK(sub.size() == 3);
    CHECK(sub.d(0, 1) == 2.0);
    CHECK(sub.d(1, 2) == 4.0);
    CHECK(sub.labels()[0] == "2");
}

TEST_CASE("maltese sum") {
    auto two = PMetricSpace({}, {{0, 1}, {1, 0}}, 1.0);
    auto one = maltese_sum({two}, SumMode::maltese);
    CHECK(one.space.same_as(two));

    auto sum = maltese_sum({two, two}, SumMode::maltese);
    REQUIRE(sum.space.size() == 3);
    CHECK(sum.space.d(1, 2) == 2.0);
    CHECK(sum.embeddings[1][1] == 2);

    auto half = PMetricSpace({}, {{0, 1}, {1, 0}}, 0.5);
    CHECK(maltese_sum({half, half}, SumMode::maltese).space.d(1, 2) == doctest::Approx(4.0));

    CHECK_THROWS_AS((void)maltese_sum({two, half}, SumMode::maltese), StructuralError);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const double p = trial % 2 ? 0.5 : 1.0;
        auto a = oracle::random_space(4, p, rng), b = oracle::random_space(3, p, rng);
        auto res = maltese_sum({a, b}, SumMode::maltese);
        CHECK(validate(res.space).ok);
        for (std::size_t x = 0; x < 4; ++x)
            for (std::size_t y = 0; y < 4; ++y)
                CHECK(res.space.d(res.embeddings[0][x], res.embeddings[0][y]) == a.d(x, y));
        for (std::size_t x = 1; x < 4; ++x)
            for (std::size_t y = 1; y < 3; ++y) {
                const double lhs = std::pow(res.space.d(res.embeddings[0][x], res.embeddings[1][y]), p);
                CHECK(lhs == doctest::Approx(std::pow(a.d(x, 0), p) + std::pow(b.d(y, 0), p)).epsilon(1e-12));
            }
    }
}

TEST_CASE("full p-sum") {
    auto two = PMetricSpace({}, {{0, 1}, {1, 0}}, 0.5);
    auto prod = maltese_sum({two, two}, SumMode::full_p_sum);
    REQUIRE(prod.space.size() == 4);
    // (1,1) vs (0,0): (1 + 1)^(1/p) = 4.
    CHECK(prod.space.d(0, 3) == doctest::Approx(4.0));
    CHECK(prod.space.d(1, 2) == doctest::Approx(4.0));
    CHECK(validate(prod.space).ok);

    auto seg = integer_segment(9, 1.0);
    CHECK_THROWS_AS((void)maltese_sum({seg, seg, seg, seg, seg}, SumMode::full_p_sum), ResourceError);
}

TEST_CASE("quotient") {
    auto seg = integer_segment(3, 1.0);
    auto q = quotient(seg, {0, 1});
    REQUIRE(q.space.size() == 3);
    CHECK(q.table == std::vector<std::size_t>{0, 0, 1, 2});
    CHECK(q.space.d(1, 2) == 1.0);
    CHECK(q.space.d(0, 1) == 1.0);
    CHECK(q.space.d(0, 2) == 2.0);

    CHECK(quotient(seg, {0, 1, 2, 3}).space.size() == 1);
    CHECK_THROWS_AS((void)quotient(seg, {}), StructuralError);
    CHECK_THROWS_AS((void)quotient(seg, {1, 2}), StructuralError);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        auto space = oracle::random_space(6, trial % 2 ? 0.5 : 1.0, rng);
        auto same = quotient(space, {0});
        CHECK(same.space.matrix() == space.matrix());
    }
    for (int trial = 0; trial < 100; ++trial) {
        auto space = oracle::random_space(7, 0.3 + 0.007 * trial, rng);
        std::vector<std::size_t> n_set{0, 1 + static_cast<std::size_t>(trial % 6)};
        auto res = quotient(space, n_set);
        CHECK(validate(res.space).ok);
        for (std::size_t x = 0; x < 7; ++x) {
            CHECK(res.space.d(res.table[x], 0) == distance_to_set(space, x, n_set));
            for (std::size_t y = 0; y < 7; ++y) CHECK(res.space.d(res.table[x], res.table[y]) <= space.d(x, y));
        }
    }
}

TEST_CASE("metric envelope") {
    auto seg = integer_segment(4, 1.0);
    CHECK(metric_envelope(seg).matrix() == seg.matrix());

    auto tri = three_points(1, 1, 1.9, 0.5);
    CHECK(metric_envelope(tri).d(0, 2) == 1.9);

    auto flake = snowflake(integer_segment(4, 1.0), 2.0, 0.5);
    auto env = metric_envelope(flake);
    CHECK(env.d(0, 4) == 4.0);
    CHECK(env.p() == 1.0);
    CHECK(metric_envelope(env).matrix() == env.matrix());

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        auto space = oracle::random_space(6, 0.4, rng);
        auto e = metric_envelope(space);
        CHECK(validate(e).ok);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j) CHECK(e.d(i, j) <= space.d(i, j));
    }
}

TEST_CASE("grids") {
    auto one = make_grid({GridSpec::Kind::integer_segment, 1, {}}, 1.0);
    CHECK(one.size() == 2);
    CHECK(one.d(0, 1) == 1.0);

    auto dy = make_grid({GridSpec::Kind::dyadic, 2, {}}, 0.5);
    REQUIRE(dy.size() == 5);
    CHECK(dy.d(0, 1) == 0.25);
    CHECK(dy.d(0, 4) == 1.0);
    CHECK(dy.labels()[2] == "0.5");

    auto custom = make_grid({GridSpec::Kind::custom, 0, {0.0, 1.0 / 3.0, 1.0}}, 1.0);
    CHECK(custom.d(0, 1) == 1.0 / 3.0);
    CHECK_THROWS_AS((void)make_grid({GridSpec::Kind::custom, 0, {0.0, 0.5, 0.5, 1.0}}, 1.0), StructuralError);
    CHECK_THROWS_AS((void)make_grid({GridSpec::Kind::custom, 0, {0.0, 0.5}}, 1.0), StructuralError);
    for (double p : {0.1, 0.5, 1.0}) CHECK(validate(dyadic_grid(3, p)).ok);
}
