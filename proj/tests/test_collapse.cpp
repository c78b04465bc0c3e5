#include <doctest.h>

#include <cmath>

#include "lawvar/collapse.hpp"

using namespace lawvar;

namespace {

RandomVariable rv(std::vector<double> v) {
    SampleSpace space(static_cast<int>(v.size()));
    return RandomVariable(space, std::move(v));
}

DistortionFunction strictly_concave(int pieces = 8) {
    std::vector<std::pair<double, double>> knots;
    for (int i = 0; i <= pieces; ++i) {
        double u = static_cast<double>(i) / pieces;
        knots.emplace_back(u, 1.0 - (1.0 - u) * (1.0 - u));
    }
    return DistortionFunction(std::move(knots));
}

Functional mean_square(bool claim_cash = false) {
    Claims claims;
    claims.convex = true;
    claims.law_invariant = true;
    claims.cash_additive = claim_cash;
    return Functional("mean_square",
                      [](const RandomVariable& x) {
                          double m = expectation(x);
                          return m * m;
                      },
                      claims);
}

// Indicator of the max-norm ball: 0 inside, +inf outside.  Law invariant
// and convex with a genuinely infinite branch.
Functional ball_indicator(double radius) {
    Claims claims;
    claims.convex = true;
    claims.law_invariant = true;
    return Functional("ball_indicator",
                      [radius](const RandomVariable& x) {
                          return x.max_abs() <= radius ? 0.0 : kPlusInfinity;
                      },
                      claims);
}

Functional first_coordinate() {
    Claims claims;
    claims.convex = true;
    return Functional("first_coordinate", [](const RandomVariable& x) { return x[0]; }, claims);
}

Functional concave_square() {
    Claims claims;
    claims.law_invariant = true;
    return Functional("concave_square",
                      [](const RandomVariable& x) {
                          double s = 0.0;
                          for (double v : x.values()) s -= v * v;
                          return s;
                      },
                      claims);
}

}  // namespace

TEST_CASE("law invariance falsifier") {
    SampleSpace space(5);
    CHECK(check_law_invariance(make_entropic(1.0), space, 200, 3).outcome == Outcome::Pass);

    Claims constant_claims;
    Functional constant("constant", [](const RandomVariable&) { return 4.0; }, constant_claims);
    CHECK(check_law_invariance(constant, space, 100, 3).outcome == Outcome::Pass);

    Verdict broken = check_law_invariance(first_coordinate(), space, 200, 3);
    CHECK(broken.outcome == Outcome::Fail);
    // the two-indicator construction caught it before any random trial
    RandomVariable witness = random_variable_from_json(broken.witness.at("x"));
    CHECK(witness == RandomVariable::prefix_indicator(space, 1));
    // witness reproduces the violation standalone
    std::vector<int> sigma = broken.witness.at("sigma").get<std::vector<int>>();
    Functional phi = first_coordinate();
    CHECK(std::abs(phi(witness) - phi(witness.permuted(sigma))) > 1e-10);
}

TEST_CASE("convexity falsifier") {
    SampleSpace space(4);
    CHECK(check_convexity(make_expected_shortfall(0.3), space, 300, 4).outcome == Outcome::Pass);

    Verdict broken = check_convexity(concave_square(), space, 300, 4);
    CHECK(broken.outcome == Outcome::Fail);
    CHECK(broken.witness.at("lambda").get<double>() == 0.5);
    RandomVariable x = random_variable_from_json(broken.witness.at("x"));
    RandomVariable y = random_variable_from_json(broken.witness.at("y"));
    Functional phi = concave_square();
    double mid = phi(0.5 * x + 0.5 * y);
    CHECK(mid > 0.5 * phi(x) + 0.5 * phi(y) + 1e-10);

    RandomVariable w = RandomVariable::indicator(space, 1);
    RandomVariable z = RandomVariable::indicator(space, 2);
    CHECK(check_convexity(make_span_parabola(w, z), space, 200, 4).outcome == Outcome::Pass);
}

TEST_CASE("translation invariance along a direction") {
    SampleSpace space(4);
    RandomVariable one = RandomVariable::constant(space, 1.0);
    Verdict cash = check_translation_invariance_along(make_expected_shortfall(0.4), one, 150, 5);
    CHECK(cash.outcome == Outcome::Pass);
    CHECK(cash.details.at("slope").get<double>() == doctest::Approx(-1.0).epsilon(1e-12));

    RandomVariable any_dir(space, {1, -2, 0.5, 3});
    CHECK(check_translation_invariance_along(make_mean_affine(2, 1), any_dir, 150, 5).outcome ==
          Outcome::Pass);

    RandomVariable w = RandomVariable::indicator(space, 1);
    RandomVariable z = RandomVariable::indicator(space, 2);
    Functional parabola = make_span_parabola(w, z);
    Verdict broken = check_translation_invariance_along(parabola, z, 150, 5);
    CHECK(broken.outcome == Outcome::Fail);
    CHECK(random_variable_from_json(broken.witness.at("x")) == w);
    CHECK(broken.witness.at("m").get<double>() == 1.0);
    CHECK(broken.witness.at("residual").get<double>() == 1.0);

    // not affine along W at all: the check refuses
    CHECK_THROWS_AS(check_translation_invariance_along(parabola, w, 50, 5), PreconditionError);
}

TEST_CASE("sublinear upgrade from affinity to translation invariance") {
    SampleSpace space(4);
    RandomVariable z(space, {2, 0, -1, 1});
    Functional linear = make_choquet(DistortionFunction::identity(), space);
    CHECK(check_sublinear_upgrade(linear, {z}, 200, 6).outcome == Outcome::Pass);

    RandomVariable one = RandomVariable::constant(space, 1.0);
    CHECK(check_sublinear_upgrade(make_expected_shortfall(0.5), {one}, 200, 6).outcome ==
          Outcome::Pass);

    RandomVariable w = RandomVariable::indicator(space, 1);
    RandomVariable dir = RandomVariable::indicator(space, 2);
    Functional parabola = make_span_parabola(w, dir);
    // phi(W+Z) = 1 but phi(2W+2Z) = inf: positive homogeneity fails, refused
    CHECK_THROWS_AS(check_sublinear_upgrade(parabola, {dir}, 100, 6), PreconditionError);
}

TEST_CASE("collapse verdict: affine case") {
    SampleSpace space(10);
    RandomVariable z = RandomVariable::indicator(space, 1);
    Verdict v = collapse_verdict(make_mean_affine(2, 1), z, 1000, 7);
    CHECK(v.outcome == Outcome::CollapseToMean);
    CHECK(v.details.at("a").get<double>() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(v.max_residual <= 1e-9);
}

TEST_CASE("collapse verdict: no affine direction for strictly convex functionals") {
    Verdict v = collapse_verdict(make_entropic(1.0), rv({1, 0}), 100, 8);
    CHECK(v.outcome == Outcome::NoAffineDirection);
    // spread along the direction is strictly positive:
    // log((1+e^-1)/2) + log((1+e)/2) = log((1+cosh 1)/2)
    Functional ent = make_entropic(1.0);
    double spread = ent(rv({1, 0})) + ent(rv({-1, 0})) - 2 * ent(rv({0, 0}));
    CHECK(spread == doctest::Approx(std::log((1.0 + std::cosh(1.0)) / 2.0)).epsilon(1e-12));
    CHECK(spread > 0);
}

TEST_CASE("collapse verdict: zero-expectation branch factors through the mean") {
    SampleSpace space(6);
    std::vector<double> dir(6, 0.0);
    dir[0] = 1;
    dir[1] = -1;
    RandomVariable z(space, dir);
    Verdict v = collapse_verdict(mean_square(), z, 1000, 9);
    CHECK(v.outcome == Outcome::CollapseThroughMean);
    CHECK(v.max_residual <= 1e-10);

    // the corollary needs translation invariance along constants: refused here
    CHECK_THROWS_AS(collapse_verdict(mean_square(true), z, 100, 9, Tolerances{}, true),
                    PreconditionError);

    // a cash-additive functional affine along a zero-mean direction collapses fully
    Verdict refined = collapse_verdict(make_mean_affine(-1, 0), z, 500, 9);
    CHECK(refined.outcome == Outcome::CollapseToMean);
    CHECK(refined.details.at("a").get<double>() == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("functionals with infinite branches flow through the engine") {
    SampleSpace space(4);
    Functional ball = ball_indicator(1.0);
    ball.add_domain_probe(RandomVariable::constant(space, 0.0));
    ball.add_domain_probe(RandomVariable(space, {0.5, -0.5, 0.25, 0.0}));

    // equal-in-law points are both inside or both outside the ball
    CHECK(check_law_invariance(ball, space, 300, 19).outcome == Outcome::Pass);
    CHECK(check_convexity(ball, space, 300, 19).outcome == Outcome::Pass);

    // the affinity grid leaves the domain: classified as no affine direction
    RandomVariable z = RandomVariable::unit(space, 0);
    Verdict v = collapse_verdict(ball, z, 100, 19);
    CHECK(v.outcome == Outcome::NoAffineDirection);
    CHECK(v.details.contains("infinite_at_m"));

    // a direction so small that the whole affinity grid stays inside the
    // ball: the fitted affinity is a domain artifact, not a collapse premise
    RandomVariable tiny = 0.1 * RandomVariable::unit(space, 0);
    Verdict artifact = collapse_verdict(ball, tiny, 200, 19);
    CHECK(artifact.outcome == Outcome::NoAffineDirection);
    CHECK(artifact.details.at("note").get<std::string>().find("artifact") !=
          std::string::npos);

    RandomVariable tiny_centered(space, {0.1, -0.1, 0, 0});  // zero-mean variant
    Verdict artifact_zero = collapse_verdict(ball, tiny_centered, 200, 19);
    CHECK(artifact_zero.outcome == Outcome::NoAffineDirection);

    // a shift can bring an infinite point back into the domain: that is a
    // genuine one-sided translation-invariance violation, not a pass
    Functional probed = ball_indicator(1.0);
    RandomVariable just_outside(space, {1.2, 0, 0, 0});
    probed.add_domain_probe(just_outside);
    Verdict one_sided = check_translation_invariance_along(probed, tiny, 100, 19);
    CHECK(one_sided.outcome == Outcome::Fail);
    CHECK(random_variable_from_json(one_sided.witness.at("x")) == just_outside);
    CHECK(one_sided.witness.at("phi_shifted") != nlohmann::json("inf"));
    CHECK(one_sided.witness.at("expected") == nlohmann::json("inf"));
}

TEST_CASE("pricing collapse accepts a zero-mean frictionless payoff via constants") {
    SampleSpace space(4);
    RandomVariable z(space, {1, -1, 2, -2});  // zero mean, nonconstant
    Verdict v = pricing_collapse(make_mean_affine(1, 0), z, 200, 16);
    CHECK(v.outcome == Outcome::Pass);
    CHECK(v.details.at("a").get<double>() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("collapse verdict preconditions") {
    SampleSpace space(4);
    RandomVariable z = RandomVariable::indicator(space, 1);
    CHECK_THROWS_AS(collapse_verdict(make_entropic(1.0), RandomVariable::constant(space, 3.0),
                                     100, 10),
                    PreconditionError);
    CHECK_THROWS_AS(collapse_verdict(first_coordinate(), z, 100, 10), PreconditionError);

    Claims lying = first_coordinate().claims();
    lying.convex = true;
    lying.law_invariant = true;
    CHECK_THROWS_AS(collapse_verdict(first_coordinate().with_claims(lying), z, 100, 10),
                    PreconditionError);

    SampleSpace singleton(1);
    CHECK_THROWS_AS(collapse_verdict(make_entropic(1.0),
                                     RandomVariable::constant(singleton, 1.0), 100, 10),
                    PreconditionError);
}

TEST_CASE("theorem consistency: builtins never come back Inconsistent") {
    SampleSpace space(5);
    std::vector<Functional> catalog;
    catalog.push_back(make_mean_affine(2, 1));
    catalog.push_back(make_mean_affine(-1, 0));
    catalog.push_back(make_expected_shortfall(1.0));
    catalog.push_back(make_expected_shortfall(0.3));
    catalog.push_back(make_entropic(1.0));
    catalog.push_back(make_choquet(DistortionFunction::identity(), space));
    catalog.push_back(make_choquet(strictly_concave(), space));
    catalog.push_back(make_shortfall_budget());
    catalog.push_back(mean_square());
    catalog.push_back(ball_indicator(2.0));

    auto directions = structured_directions(space);
    CounterRng rng(1234);
    for (int extra = 0; extra < 5; ++extra) {
        RandomVariable z = sample_test_point(rng, space);
        if (!is_constant(z, 0.0)) directions.push_back(z);
    }
    for (const auto& phi : catalog) {
        for (const auto& z : directions) {
            Verdict v = collapse_verdict(phi, z, 60, 11);
            INFO(phi.label(), " along ", nlohmann::json(z.values()).dump());
            CHECK(v.outcome != Outcome::Inconsistent);
            CHECK(v.outcome != Outcome::Fail);
        }
    }
}

TEST_CASE("verdicts are deterministic and scale invariant in outcome") {
    SampleSpace space(5);
    RandomVariable z = RandomVariable::indicator(space, 3);  // nonconstant, mean 2/5
    Verdict a = collapse_verdict(make_expected_shortfall(0.4), z, 200, 77);
    Verdict b = collapse_verdict(make_expected_shortfall(0.4), z, 200, 77);
    nlohmann::json ja = a, jb = b;
    CHECK(ja.dump() == jb.dump());

    // positive scaling preserves every outcome
    Functional es = make_expected_shortfall(0.4);
    Functional scaled = Functional("scaled_es",
                                   [es](const RandomVariable& x) { return 3.0 * es(x); },
                                   es.claims());
    CHECK(collapse_verdict(scaled, z, 200, 77).outcome == a.outcome);
}

TEST_CASE("choquet collapse scan") {
    SampleSpace space(5);
    Verdict uniform = choquet_collapse_scan(DistortionFunction::identity(), space, 500, 12);
    CHECK(uniform.outcome == Outcome::Pass);

    Verdict concave_case = choquet_collapse_scan(strictly_concave(), space, 1000, 12);
    CHECK(concave_case.outcome == Outcome::NoAffineDirection);
    CHECK(concave_case.details.at("min_spread").get<double>() > 0.0);

    // identity with one perturbed (still concave) knot
    DistortionFunction perturbed({{0, 0}, {0.5, 0.55}, {1, 1}});
    REQUIRE(perturbed.is_concave());
    Verdict bent = choquet_collapse_scan(perturbed, space, 1000, 12);
    CHECK(bent.outcome == Outcome::NoAffineDirection);
    CHECK(bent.details.at("min_spread").get<double>() > 0.0);

    Capacity table = capacity_from_distortion(DistortionFunction::identity(), SampleSpace(4));
    CHECK(choquet_collapse_scan(table, 500, 12).outcome == Outcome::Pass);

    std::vector<std::pair<double, double>> convex_knots = {{0, 0}, {0.5, 0.2}, {1, 1}};
    CHECK_THROWS_AS(
        choquet_collapse_scan(DistortionFunction(convex_knots), space, 100, 12),
        PreconditionError);
}

TEST_CASE("pricing collapse") {
    SampleSpace space(4);
    RandomVariable risky(space, {2, 0, 1, 1});  // nonzero mean
    Verdict linear = pricing_collapse(make_mean_affine(2, 0), risky, 300, 13);
    CHECK(linear.outcome == Outcome::Pass);
    CHECK(linear.details.at("a").get<double>() == doctest::Approx(2.0).epsilon(1e-9));

    Verdict identity_case =
        pricing_collapse(make_choquet(DistortionFunction::identity(), space), risky, 300, 13);
    CHECK(identity_case.outcome == Outcome::Pass);
    CHECK(identity_case.details.at("a").get<double>() == doctest::Approx(1.0).epsilon(1e-9));

    Verdict distorted =
        pricing_collapse(make_choquet(strictly_concave(), space), risky, 300, 13);
    CHECK(distorted.outcome == Outcome::NoAffineDirection);
    CHECK(distorted.details.at("spread").get<double>() > 0.0);

    CHECK_THROWS_AS(pricing_collapse(make_mean_affine(1, 1), risky, 100, 13),
                    PreconditionError);
    CHECK_THROWS_AS(pricing_collapse(make_mean_affine(2, 0),
                                     RandomVariable::constant(space, 1.0), 100, 13),
                    PreconditionError);
}

TEST_CASE("risk collapse for an asset-additive measure") {
    SampleSpace space(2);
    EligibleAsset asset(2.0, RandomVariable(space, {1, 3}));
    Functional rho = make_s_additive(make_mean_affine(-1, 0), asset);
    Verdict v = risk_collapse(rho, asset, 200, 14);
    CHECK(v.outcome == Outcome::Pass);
    CHECK(v.details.at("slope").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v.max_residual <= 1e-6);

    // expected shortfall is not additive in a risky asset: refused
    CHECK_THROWS_AS(risk_collapse(make_expected_shortfall(0.5), asset, 200, 14),
                    PreconditionError);

    // risk-free asset: the theorem is silent
    EligibleAsset riskfree(1.0, RandomVariable::constant(space, 1.0));
    CHECK_THROWS_AS(risk_collapse(rho, riskfree, 100, 14), PreconditionError);

    // a cash-additivity claim with a mispriced asset must come back Inconsistent
    EligibleAsset mispriced(3.0, RandomVariable(space, {1, 3}));  // E[S1] = 2 != 3
    Functional rho2 = make_s_additive(make_mean_affine(-1, 0), mispriced);
    Claims with_cash = rho2.claims();
    with_cash.cash_additive = true;
    with_cash.convention = TranslationConvention::Risk;
    Verdict inconsistent = risk_collapse(rho2.with_claims(with_cash), mispriced, 200, 14);
    CHECK(inconsistent.outcome == Outcome::Inconsistent);
}

TEST_CASE("relevance dichotomy") {
    SampleSpace space(6);
    Verdict shortfall = relevance_dichotomy(make_expected_shortfall(0.3), space, 1000, 15);
    CHECK(shortfall.outcome == Outcome::Pass);
    CHECK(shortfall.details.at("alternative").get<int>() == 2);

    Verdict negated_mean = relevance_dichotomy(make_mean_affine(-1, 0), space, 1000, 15);
    CHECK(negated_mean.outcome == Outcome::Pass);
    CHECK(negated_mean.details.at("alternative").get<int>() == 1);
    CHECK(negated_mean.max_residual == 0.0);

    // merely convex: refused, with the evaluation at -1 attached
    try {
        relevance_dichotomy(make_shortfall_budget(), space, 100, 15);
        FAIL("expected a precondition error");
    } catch (const PreconditionError& e) {
        CHECK(e.note().at("rho_at_minus_one").get<double>() == 0.0);
    }
}

TEST_CASE("structured directions exhaust laws on large spaces") {
    SampleSpace small(4);
    auto dirs = structured_directions(small);
    CHECK(dirs.size() == 14 + 6);  // all indicators except empty/full, all differences

    SampleSpace medium(40);
    auto mid = structured_directions(medium);
    CHECK(mid.size() == 39 + 780);  // one indicator per cardinality, every difference pair

    SampleSpace large(70);
    auto big = structured_directions(large);
    CHECK(big.size() == 69 + 69);  // representatives only
    for (const auto& z : big) CHECK_FALSE(is_constant(z, 0.0));
}
