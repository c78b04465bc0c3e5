#include <doctest.h>

#include <bit>
#include <cmath>

#include "lawvar/capacity.hpp"
#include "lawvar/collapse.hpp"

using namespace lawvar;

namespace {

RandomVariable rv(std::vector<double> v) {
    SampleSpace space(static_cast<int>(v.size()));
    return RandomVariable(space, std::move(v));
}

DistortionFunction square_knots(int pieces) {
    std::vector<std::pair<double, double>> knots;
    for (int i = 0; i <= pieces; ++i) {
        double u = static_cast<double>(i) / pieces;
        knots.emplace_back(u, u * u);
    }
    return DistortionFunction(std::move(knots));
}

DistortionFunction capped_double() {  // g(u) = min(2u, 1), concave
    return DistortionFunction({{0, 0}, {0.5, 1.0}, {1, 1}});
}

DistortionFunction strictly_concave(int pieces = 8) {  // 1 - (1-u)^2 sampled
    std::vector<std::pair<double, double>> knots;
    for (int i = 0; i <= pieces; ++i) {
        double u = static_cast<double>(i) / pieces;
        knots.emplace_back(u, 1.0 - (1.0 - u) * (1.0 - u));
    }
    return DistortionFunction(std::move(knots));
}

}  // namespace

TEST_CASE("distortion validation and evaluation") {
    CHECK_THROWS_AS(DistortionFunction({{0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(DistortionFunction({{0, 0.1}, {1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(DistortionFunction({{0, 0}, {1, 0.9}}), std::invalid_argument);
    CHECK_THROWS_AS(DistortionFunction({{0, 0}, {0.5, 0.8}, {0.5, 0.9}, {1, 1}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(DistortionFunction({{0, 0}, {0.5, 0.8}, {1, 0.99}}), std::invalid_argument);

    DistortionFunction g = capped_double();
    CHECK(g(0.25) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g(0.5) == 1.0);
    CHECK(g(0.75) == 1.0);
    CHECK(g.is_concave());
    CHECK_FALSE(square_knots(4).is_concave());
    CHECK(DistortionFunction::identity().is_concave());
}

TEST_CASE("distortion capacity tabulates g(|E|/n)") {
    SampleSpace space(4);
    Capacity p = capacity_from_distortion(DistortionFunction::identity(), space);
    for (std::uint32_t mask = 0; mask <= p.full_mask(); ++mask) {
        CHECK(p(mask) == doctest::Approx(std::popcount(mask) / 4.0).epsilon(1e-15));
    }
    Capacity sq = capacity_from_distortion(square_knots(4), space);
    CHECK(sq(0b0011) == doctest::Approx(0.25).epsilon(1e-15));  // knot at 1/2 hit exactly
    CHECK(sq.is_cardinality_based());

    CHECK_THROWS_AS(capacity_from_distortion(DistortionFunction::identity(), SampleSpace(21)),
                    std::invalid_argument);
}

TEST_CASE("capacity construction validates the table") {
    CHECK_THROWS_AS(Capacity(1, {0.1, 1.0}), std::invalid_argument);  // c(empty) != 0
    CHECK_THROWS_AS(Capacity(1, {0.0, 0.9}), std::invalid_argument);  // c(full) != 1
    // c({0}) = 0.5 > c({0,1}) = 0.3 breaks monotonicity
    CHECK_THROWS_AS(Capacity(3, {0.0, 0.5, 0.1, 0.3, 0.1, 0.6, 0.2, 1.0}),
                    std::invalid_argument);
    Capacity ok(2, {0.0, 0.2, 0.3, 1.0});
    CHECK_FALSE(ok.is_cardinality_based());
}

TEST_CASE("submodularity verdicts") {
    SampleSpace space(4);
    CHECK(is_submodular(capacity_from_distortion(DistortionFunction::identity(), space)).outcome ==
          Outcome::Pass);
    CHECK(is_submodular(capacity_from_distortion(capped_double(), space)).outcome ==
          Outcome::Pass);
    SampleSpace eight(8);
    CHECK(is_submodular(capacity_from_distortion(strictly_concave(), eight)).outcome ==
          Outcome::Pass);

    Verdict convex_case = is_submodular(capacity_from_distortion(square_knots(4), space));
    CHECK(convex_case.outcome == Outcome::Fail);
    REQUIRE(!convex_case.witness.is_null());
    // witness reproduces the violation standalone
    Capacity sq = capacity_from_distortion(square_knots(4), space);
    std::uint32_t e = convex_case.witness.at("E").get<std::uint32_t>();
    std::uint32_t f = convex_case.witness.at("F").get<std::uint32_t>();
    CHECK(sq(e | f) + sq(e & f) > sq(e) + sq(f) + 1e-12);

    CHECK_THROWS_AS(
        is_submodular(capacity_from_distortion(DistortionFunction::identity(), SampleSpace(15))),
        std::invalid_argument);
}

TEST_CASE("Choquet integral reduces to the mean for the uniform capacity") {
    SampleSpace space(6);
    Capacity p = capacity_from_distortion(DistortionFunction::identity(), space);
    for (int trial = 0; trial < 100; ++trial) {
        RandomVariable x = random_variable(trial, space, NormalLaw{0, 3});
        CHECK(std::abs(choquet_integral(p, x) - expectation(x)) <= 1e-12);
        CHECK(std::abs(choquet_integral(DistortionFunction::identity(), x) - expectation(x)) <=
              1e-12);
    }
}

TEST_CASE("Choquet integral of an indicator is the capacity") {
    SampleSpace space(5);
    Capacity c = capacity_from_distortion(strictly_concave(), space);
    for (std::uint32_t mask = 1; mask < c.full_mask(); ++mask) {
        CHECK(choquet_integral(c, RandomVariable::indicator(space, mask)) ==
              doctest::Approx(c(mask)).epsilon(1e-15));
    }
}

TEST_CASE("Choquet integral handles signed values by the two-part formula") {
    SampleSpace space(2);
    Capacity sq = capacity_from_distortion(square_knots(2), space);  // knot at 1/2: g = 0.25
    CHECK(choquet_integral(sq, rv({2, 1})) == doctest::Approx(1.25).epsilon(1e-15));
    // shifted: integral must shift by the same constant
    CHECK(choquet_integral(sq, rv({-1, -2})) ==
          doctest::Approx(choquet_integral(sq, rv({2, 1})) - 3.0).epsilon(1e-12));
}

TEST_CASE("table and distortion evaluation agree") {
    SampleSpace space(7);
    DistortionFunction g = strictly_concave();
    Capacity c = capacity_from_distortion(g, space);
    for (int trial = 0; trial < 50; ++trial) {
        RandomVariable x = random_variable(trial, space, UniformLaw{-5, 5});
        CHECK(choquet_integral(c, x) == doctest::Approx(choquet_integral(g, x)).epsilon(1e-14));
    }
}

TEST_CASE("positive homogeneity and constant translation") {
    SampleSpace space(6);
    DistortionFunction g = strictly_concave();
    for (int trial = 0; trial < 60; ++trial) {
        RandomVariable x = random_variable(trial, space, NormalLaw{0, 2});
        double base = choquet_integral(g, x);
        for (double lambda : {0.0, 0.5, 2.0, 7.5}) {
            CHECK(std::abs(choquet_integral(g, lambda * x) - lambda * base) <= 1e-12);
        }
        for (double m : {-2.5, 0.75, 4.0}) {
            CHECK(std::abs(choquet_integral(g, x + m) - (base + m)) <= 1e-12);
        }
    }
}

TEST_CASE("monotone capacity gives a monotone integral") {
    SampleSpace space(5);
    DistortionFunction g = capped_double();
    for (int trial = 0; trial < 60; ++trial) {
        RandomVariable x = random_variable(trial, space, UniformLaw{-3, 3});
        RandomVariable bump = random_variable(trial + 400, space, UniformLaw{0, 2});
        CHECK(choquet_integral(g, x + bump) >= choquet_integral(g, x) - 1e-12);
    }
}

TEST_CASE("submodular capacities are subadditive") {
    SampleSpace space(6);
    DistortionFunction g = strictly_concave();
    for (int trial = 0; trial < 500; ++trial) {
        RandomVariable x = random_variable(trial, space, NormalLaw{0, 2});
        RandomVariable y = random_variable(trial + 9000, space, UniformLaw{-4, 4});
        double lhs = choquet_integral(g, x + y);
        double rhs = choquet_integral(g, x) + choquet_integral(g, y);
        CHECK(lhs <= rhs + 1e-10);
    }
}

TEST_CASE("distortion capacities are law invariant") {
    SampleSpace space(7);
    DistortionFunction g = strictly_concave();
    CounterRng rng(314);
    for (int trial = 0; trial < 100; ++trial) {
        RandomVariable x = random_variable(trial, space, NormalLaw{0, 2});
        auto perm = random_permutation(rng, space.n());
        CHECK(choquet_integral(g, x) ==
              doctest::Approx(choquet_integral(g, x.permuted(perm))).epsilon(1e-14));
    }
}

TEST_CASE("comonotonic additivity holds on generated pairs") {
    SampleSpace space(5);
    Capacity p = capacity_from_distortion(DistortionFunction::identity(), space);
    CHECK(comonotonic_additivity_check(p, 100, 5).outcome == Outcome::Pass);

    Verdict concave_case =
        comonotonic_additivity_check(strictly_concave(), space, 500, 5);
    CHECK(concave_case.outcome == Outcome::Pass);
    CHECK(concave_case.trials == 500);
    CHECK(concave_case.max_residual <= 1e-10);

    // convex distortion: still additive on comonotone pairs
    CHECK(comonotonic_additivity_check(square_knots(8), space, 200, 5).outcome == Outcome::Pass);
}

TEST_CASE("capacity JSON round trip") {
    SampleSpace space(3);
    Capacity c = capacity_from_distortion(capped_double(), space);
    nlohmann::json j = c;
    Capacity back = capacity_from_json(j);
    for (std::uint32_t mask = 0; mask <= c.full_mask(); ++mask) CHECK(back(mask) == c(mask));

    nlohmann::json jg = strictly_concave();
    DistortionFunction g = distortion_from_json(jg);
    CHECK(g(0.25) == strictly_concave()(0.25));
    CHECK_THROWS_AS(distortion_from_json(nlohmann::json{{"knots", "zig"}}),
                    std::invalid_argument);

    nlohmann::json incomplete = {{"n", 2}, {"table", {{"0", 0.0}, {"3", 1.0}}}};
    CHECK_THROWS_AS(capacity_from_json(incomplete), std::invalid_argument);
}
