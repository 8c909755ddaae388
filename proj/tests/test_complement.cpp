#include <random>

#include "doctest.h"
#include "lipfree/complement.hpp"
#include "oracles.hpp"

using namespace lipfree;

namespace {

SpacePtr share(PMetricSpace s) { return std::make_shared<const PMetricSpace>(std::move(s)); }

bool is_identity(const MatrixD& m, double tol = 0.0) { return max_abs_diff(m, MatrixD::identity(m.rows())) <= tol; }

}  // namespace

TEST_CASE("maltese isometry") {
    auto seg = integer_segment(3, 0.5);
    auto one = maltese_isometry({seg});
    CHECK(is_identity(one.forward));
    CHECK(one.K == 1.0);

    auto two = PMetricSpace({}, {{0, 1}, {1, 0}}, 1.0);
    auto iso = maltese_isometry({two, two});
    REQUIRE(iso.target->size() == 3);
    CHECK(sum_norm(iso, {1.0, 0.0}) == doctest::Approx(1.0));

    std::mt19937_64 rng(17);
    for (double p : {1.0, 0.5}) {
        auto a = oracle::random_space(4, p, rng), b = oracle::random_space(3, p, rng);
        auto m = maltese_isometry({a, b});
        CHECK(m.K == doctest::Approx(1.0).epsilon(1e-12));
        for (int trial = 0; trial < 100; ++trial) {
            auto x = oracle::random_delta(m.offsets.back() + 1, rng);
            const double lhs = norm_value(*m.target, m.forward.apply(x));
            CHECK(lhs == doctest::Approx(sum_norm(m, x)).epsilon(1e-9));
        }
        CHECK(forward_norm(m).value <= 1.0 + 1e-9);
        CHECK(inverse_norm(m).value <= m.K + 1e-9);
    }
}

TEST_CASE("partition isomorphism bounds") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const double p = trial % 2 ? 0.5 : 1.0;
        auto s = share(oracle::random_space(7, p, rng));
        auto iso = partition_isomorphism(s, {{1, 3, 5}, {2, 6}, {4}});
        CHECK(iso.K >= 1.0);
        CHECK(forward_norm(iso).value <= 1.0 + 1e-9);
        CHECK(inverse_norm(iso).value <= iso.K + 1e-9);
        CHECK(is_identity(iso.inverse * iso.forward));
    }
    auto s = share(integer_segment(3, 1.0));
    CHECK_THROWS_AS((void)partition_isomorphism(s, {{1, 2}}), StructuralError);
    CHECK_THROWS_AS((void)partition_isomorphism(s, {{1, 2}, {2, 3}}), StructuralError);
}

TEST_CASE("retraction complement") {
    auto seg = share(integer_segment(3, 0.5));
    auto id = retraction_complement(seg, {0, 1, 2, 3});
    CHECK(is_identity(id.T.matrix()));
    CHECK(is_identity(id.S.matrix()));
    CHECK(id.quotient_space->size() == 1);

    auto clamp = retraction_complement(seg, {0, 1, 1, 1});
    CHECK(clamp.retract_set == std::vector<std::size_t>{0, 1});
    CHECK(is_identity(compose(clamp.S, clamp.T).matrix()));
    CHECK(is_identity(compose(clamp.T, clamp.S).matrix()));
    CHECK(clamp.lip == 1.0);
    CHECK(operator_norm(clamp.T).value <= clamp.bound + 1e-9);
    CHECK(operator_norm(clamp.S).value <= clamp.bound + 1e-9);

    CHECK_THROWS_AS((void)retraction_complement(seg, {0, 2, 1, 1}), StructuralError);
    CHECK_THROWS_AS((void)retraction_complement(seg, {1, 1, 1, 1}), StructuralError);

    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        auto s = share(oracle::random_space(6, trial % 2 ? 0.5 : 1.0, rng));
        auto r = nearest_point_retraction(*s, {0, 2, 4});
        auto rc = retraction_complement(s, r);
        CHECK(is_identity(compose(rc.S, rc.T).matrix()));
        CHECK(is_identity(compose(rc.T, rc.S).matrix()));
        CHECK(operator_norm(rc.T).value <= rc.bound + 1e-9);
        CHECK(operator_norm(rc.S).value <= rc.bound + 1e-9);
    }
}

TEST_CASE("condition 2 with one index") {
    auto two = share(PMetricSpace({}, {{0, 2}, {2, 0}}, 0.5));
    Condition2Data data{two, {1}, {0}, {LipschitzFunction({0.0, 2.0})}, 1.0, 1.0};
    auto ops = condition2_operators(data);
    CHECK((ops.P * ops.S)(0, 0) == 1.0);
    CHECK(projection_norm(data, ops).value <= ops.bound + 1e-9);
}

TEST_CASE("bump families") {
    // Isolated points on a separated 5-point space.
    std::mt19937_64 rng(41);
    for (double p : {0.5, 1.0}) {
        auto s = share(oracle::random_space(5, p, rng));
        auto data = bump_family(s, {1, 3}, BumpStyle::isolated, {}, 1e3);
        CHECK(data.t <= 1e3);
        auto ops = condition2_operators(data);
        CHECK(max_abs_diff(ops.P * ops.S, MatrixD::identity(2)) <= 1e-10);
        CHECK(projection_norm(data, ops).value <= ops.bound + 1e-9);
        for (std::size_t g = 0; g < 2; ++g)
            CHECK(norm_value(*s, ops.S.column(g)) <= 1.0 + 1e-12);
    }

    auto seg = share(integer_segment(9, 0.5));
    auto iso = bump_family(seg, {1, 3, 7}, BumpStyle::isolated, {}, 2.0);
    CHECK(iso.y == std::vector<std::size_t>{0, 2, 6});
    CHECK(iso.t == 1.0);
    auto iso_ops = condition2_operators(iso);
    CHECK(projection_norm(iso, iso_ops).value <= iso_ops.bound + 1e-9);
    auto balls = bump_family(seg, {2, 5, 8}, BumpStyle::metric_ball, {1, 1, 1});
    CHECK(balls.t == 1.0);
    auto ops = condition2_operators(balls);
    CHECK(is_identity(ops.P * ops.S, 1e-12));
    CHECK(projection_norm(balls, ops).value <= std::pow(2.0, 2.0) + 1e-9);

    auto single = bump_family(seg, {4}, BumpStyle::isolated, {}, 1.0);
    for (std::size_t z = 0; z < 10; ++z) CHECK((single.f[0].values()[z] != 0.0) == (z == 4));

    CHECK_THROWS_WITH_AS((void)bump_family(seg, {2, 3}, BumpStyle::condition3_metric, {1, 1}),
                         doctest::Contains("(0,1)"), StructuralError);
    auto flake = share(snowflake(integer_segment(4, 1.0), 2.0, 0.5));
    CHECK_THROWS_AS((void)bump_family(flake, {2}, BumpStyle::metric_ball, {1}), StructuralError);
}

TEST_CASE("condition 3 with selected radii") {
    // 2^n on the line, d = |x - y|^2 at p = 1/2.
    auto line = line_space({0, 1, 2, 4, 8, 16}, 1.0);
    auto s = share(snowflake(line, 2.0, 0.5));
    auto seq = tonin_select(*s, 16.0, ToninMode::unbounded, 5);
    REQUIRE(seq.points.size() == 6);
    std::vector<std::size_t> centers(seq.points.begin() + 1, seq.points.end());
    std::vector<double> radii(seq.radii.begin() + 1, seq.radii.end());
    auto data = bump_family(s, centers, BumpStyle::condition3_psep, radii);
    CHECK(data.C == doctest::Approx(1.0));
    auto ops = condition2_operators(data);
    CHECK(max_abs_diff(ops.P * ops.S, MatrixD::identity(5)) <= 1e-10);
    CHECK(projection_norm(data, ops).value <= ops.bound + 1e-9);

    auto auto_r = auto_radii(*s, centers, BumpStyle::condition3_psep);
    auto auto_data = bump_family(s, centers, BumpStyle::condition3_psep, auto_r);
    auto auto_ops = condition2_operators(auto_data);
    CHECK(projection_norm(auto_data, auto_ops).value <= auto_ops.bound + 1e-9);
}

TEST_CASE("condition 2 validation names the clause") {
    auto seg = share(integer_segment(4, 1.0));
    Condition2Data data{seg, {1, 2}, {0, 0}, {LipschitzFunction({0, 1, 0, 0, 0}), LipschitzFunction({0, 0, 1, 0, 0})}, 1.0, 2.0};
    CHECK_NOTHROW(validate_condition2(data));
    data.f[1] = LipschitzFunction({0, 0, 1, 1, 0});
    data.y[0] = 3;
    CHECK_THROWS_WITH_AS(validate_condition2(data), doctest::Contains("f_g1(y_g2)"), StructuralError);
    data.f[0] = LipschitzFunction({0, 1, 1, 0, 0});
    CHECK_THROWS_WITH_AS(validate_condition2(data), doctest::Contains("disjoint"), StructuralError);
    data = Condition2Data{seg, {1}, {0}, {LipschitzFunction({0, 2, 0, 0, 0})}, 1.0, 1.0};
    CHECK_THROWS_WITH_AS(validate_condition2(data), doctest::Contains("Lip"), StructuralError);
}

TEST_CASE("sequence selection") {
    auto line = share(line_space({0, 1, 4, 16, 64}, 1.0));
    auto seq = tonin_select(*line, 9.0, ToninMode::unbounded, 4);
    CHECK(seq.s == doctest::Approx(0.5));
    REQUIRE(seq.points == std::vector<std::size_t>{0, 1, 2, 3, 4});
    for (std::size_t k = 1; k < 5; ++k) CHECK(seq.radii[k] == doctest::Approx(line->d(seq.points[k], 0) / 3.0));
    CHECK(check_tonin(*line, seq).empty());

    auto dec = tonin_select(*line, 9.0, ToninMode::limit_point, 4);
    CHECK(dec.points == std::vector<std::size_t>{0, 4, 3, 2, 1});

    auto tight = share(line_space({0, 1, 1.0 / 0.9, 1.0 / 0.81, 1.0 / 0.729}, 1.0));
    CHECK_THROWS_WITH_AS((void)tonin_select(*tight, 9.0, ToninMode::unbounded, 4), doctest::Contains("s^(1/p)"),
                         StructuralError);
    auto loose = tonin_select(*tight, 1e6, ToninMode::unbounded, 4);
    CHECK(loose.points.size() == 5);
}
