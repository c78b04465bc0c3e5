#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "lawvar/quantile.hpp"
#include "lawvar/rng.hpp"

using namespace lawvar;

namespace {

RandomVariable rv(std::vector<double> v) {
    SampleSpace space(static_cast<int>(v.size()));
    return RandomVariable(space, std::move(v));
}

// Brute-force oracle: min/max of E[X'Y] over every permutation image of X.
RearrangementBounds brute_force_bounds(const RandomVariable& x, const RandomVariable& y) {
    int n = x.size();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    do {
        double e = inner_expectation(x.permuted(perm), y);
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {lo, hi};
}

}  // namespace

TEST_CASE("lower quantile follows the CDF") {
    RandomVariable x = rv({3, 1, 2});
    CHECK(quantile(x, 0.5) == 2.0);   // P(X<=1)=1/3 < 0.5 <= P(X<=2)=2/3
    CHECK(quantile(x, 0.34) == 2.0);  // ceil(0.34*3) = 2
    CHECK(quantile(x, 0.33) == 1.0);
    CHECK(quantile(x, 0.99) == 3.0);
    RandomVariable c = rv({7, 7, 7, 7});
    for (double alpha : {0.01, 0.25, 0.5, 0.99}) CHECK(quantile(c, alpha) == 7.0);
    CHECK_THROWS_AS(quantile(x, 0.0), std::domain_error);
    CHECK_THROWS_AS(quantile(x, 1.0), std::domain_error);
    CHECK_THROWS_AS(quantile(x, -0.3), std::domain_error);
}

TEST_CASE("quantile function invariants") {
    SampleSpace space(7);
    for (int trial = 0; trial < 25; ++trial) {
        RandomVariable x = random_variable(trial, space, NormalLaw{0, 3});
        QuantileFunction q(x);
        CHECK(std::is_sorted(q.sorted().begin(), q.sorted().end()));
        RandomVariable as_variable(space, q.sorted());
        CHECK(same_law(as_variable, x));  // same multiset of values
        CHECK(q.step_weight() == 1.0 / 7.0);
    }
}

TEST_CASE("quantile is nondecreasing in alpha") {
    RandomVariable x = rv({0.5, -1.25, 3, 3, -0.25, 8, 2, 2});
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < 1000; ++i) {
        double q = quantile(x, i / 1000.0);
        CHECK(q >= prev);
        prev = q;
    }
}

TEST_CASE("rearrangement bounds on worked examples") {
    auto [lo, hi] = rearrangement_bounds(rv({1, 2, 3}), rv({1, 2, 3}));
    CHECK(lo == doctest::Approx(10.0 / 3).epsilon(1e-15));
    CHECK(hi == doctest::Approx(14.0 / 3).epsilon(1e-15));

    auto [lo2, hi2] = rearrangement_bounds(rv({1, 0}), rv({1, 0}));
    CHECK(lo2 == 0.0);
    CHECK(hi2 == 0.5);

    RandomVariable c = rv({4, 4, 4});
    RandomVariable y = rv({1, 2, 3});
    auto [lo3, hi3] = rearrangement_bounds(c, y);
    CHECK(lo3 == hi3);
    CHECK(lo3 == doctest::Approx(4.0 * 2.0).epsilon(1e-15));

    CHECK_THROWS_WITH_AS(rearrangement_bounds(rv({1, 2}), rv({1, 2, 3})), "space mismatch",
                         std::invalid_argument);
}

TEST_CASE("bounds agree with the full-permutation oracle for n <= 7") {
    for (int n = 2; n <= 7; ++n) {
        SampleSpace space(n);
        for (int trial = 0; trial < 12; ++trial) {
            std::uint64_t seed = 1000 * n + trial;
            RandomVariable x = random_variable(seed, space, IntegerLaw{-5, 5});
            RandomVariable y = random_variable(seed + 500, space, IntegerLaw{-5, 5});
            auto fast = rearrangement_bounds(x, y);
            auto slow = brute_force_bounds(x, y);
            CHECK(std::abs(fast.lo - slow.lo) <= 1e-10);
            CHECK(std::abs(fast.hi - slow.hi) <= 1e-10);
        }
    }
}

TEST_CASE("bounds are symmetric in their arguments, bitwise") {
    SampleSpace space(6);
    for (int trial = 0; trial < 40; ++trial) {
        RandomVariable x = random_variable(trial, space, UniformLaw{-2, 2});
        RandomVariable y = random_variable(trial + 99, space, NormalLaw{0, 1.5});
        auto a = rearrangement_bounds(x, y);
        auto b = rearrangement_bounds(y, x);
        CHECK(a.lo == b.lo);
        CHECK(a.hi == b.hi);
    }
}

TEST_CASE("bounds scale equivariantly") {
    SampleSpace space(5);
    for (int trial = 0; trial < 20; ++trial) {
        RandomVariable x = random_variable(trial, space, UniformLaw{-3, 3});
        RandomVariable y = random_variable(trial + 7, space, UniformLaw{-3, 3});
        auto base = rearrangement_bounds(x, y);
        for (double a : {0.0, 0.5, 2.0}) {
            auto scaled = rearrangement_bounds(a * x, y);
            CHECK(scaled.lo == doctest::Approx(a * base.lo).epsilon(1e-12));
            CHECK(scaled.hi == doctest::Approx(a * base.hi).epsilon(1e-12));
        }
        auto negated = rearrangement_bounds(-2.0 * x, y);  // order reverses
        CHECK(negated.lo == doctest::Approx(-2.0 * base.hi).epsilon(1e-12));
        CHECK(negated.hi == doctest::Approx(-2.0 * base.lo).epsilon(1e-12));
    }
}

TEST_CASE("singleton interval iff a factor is constant") {
    CHECK(interval_is_singleton(rv({1, 2}), rv({5, 5})));
    CHECK_FALSE(interval_is_singleton(rv({1, 2}), rv({0, 1})));  // interval [1/2, 1]
    CHECK(interval_is_singleton(rv({0, 0}), rv({0, 0})));
}

TEST_CASE("comonotone rearrangement attains the upper bound") {
    RandomVariable x = rv({2, 1});
    RandomVariable y = rv({0, 5});
    CHECK(comonotone_rearrangement(x, y).values() == std::vector<double>{5, 0});

    RandomVariable c = rv({3, 3, 3});
    CHECK(comonotone_rearrangement(rv({1, 5, 2}), c) == c);

    RandomVariable asc = rv({1, 2, 3});
    CHECK(comonotone_rearrangement(asc, asc) == asc);

    SampleSpace space(8);
    for (int trial = 0; trial < 30; ++trial) {
        RandomVariable a = random_variable(trial, space, NormalLaw{0, 2});
        RandomVariable b = random_variable(trial + 17, space, UniformLaw{-4, 4});
        RandomVariable rearranged = comonotone_rearrangement(a, b);
        CHECK(same_law(rearranged, b));
        double hi = rearrangement_bounds(a, b).hi;
        CHECK(std::abs(inner_expectation(rearranged, a) - hi) <= 1e-12);
    }
}
