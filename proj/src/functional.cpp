#include "lawvar/functional.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lawvar {

Functional::Functional(std::string label, Evaluator evaluator, Claims claims, ClosedForm form)
    : label_(std::move(label)), eval_(std::move(evaluator)), claims_(claims),
      form_(std::move(form)) {
    if (!eval_) throw std::invalid_argument("functional needs an evaluator");
}

double Functional::operator()(const RandomVariable& x) const {
    double v = eval_(x);
    if (std::isnan(v) || v == -kPlusInfinity) {
        throw std::logic_error("evaluator of '" + label_ + "' left the extended reals");
    }
    return v;
}

Functional Functional::with_claims(Claims claims) const {
    Functional copy(*this);
    copy.claims_ = claims;
    return copy;
}

Functional Functional::with_label(std::string label) const {
    Functional copy(*this);
    copy.label_ = std::move(label);
    return copy;
}

EligibleAsset::EligibleAsset(double price_in, RandomVariable payoff_in)
    : price(price_in), payoff(std::move(payoff_in)) {
    if (!(price > 0.0)) throw std::invalid_argument("eligible asset needs a strictly positive price");
    bool some_positive = false;
    for (double v : payoff.values()) {
        if (v < 0.0) throw std::invalid_argument("eligible asset payoff must be nonnegative");
        if (v > 0.0) some_positive = true;
    }
    if (!some_positive) throw std::invalid_argument("eligible asset payoff must be nonzero");
}

Functional make_mean_affine(double a, double b) {
    Claims claims;
    claims.convex = true;
    claims.law_invariant = true;
    claims.sublinear = (b == 0.0);
    claims.increasing = (a >= 0.0);
    claims.decreasing = (a <= 0.0);
    if (a == -1.0) {
        claims.cash_additive = true;
        claims.convention = TranslationConvention::Risk;
    } else if (a == 1.0) {
        claims.cash_additive = true;
        claims.convention = TranslationConvention::Pricing;
    }
    std::string label = "mean_affine(" + std::to_string(a) + "," + std::to_string(b) + ")";
    return Functional(
        label, [a, b](const RandomVariable& x) { return a * expectation(x) + b; }, claims,
        MeanAffineForm{a, b});
}

Functional make_expected_shortfall(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("expected shortfall level must lie in (0,1]");
    }
    Claims claims;
    claims.convex = true;
    claims.law_invariant = true;
    claims.cash_additive = true;
    claims.sublinear = true;
    claims.decreasing = true;
    claims.convention = TranslationConvention::Risk;
    auto eval = [alpha](const RandomVariable& x) {
        std::vector<double> v(x.values());
        std::sort(v.begin(), v.end());
        int n = x.size();
        int k = std::clamp(static_cast<int>(std::ceil(alpha * n)), 1, n);
        double integral = 0.0;  // of the lower quantile over (0, alpha)
        for (int i = 0; i + 1 < k; ++i) integral += v[i] / n;
        integral += (alpha - static_cast<double>(k - 1) / n) * v[k - 1];
        return -integral / alpha;
    };
    return Functional("expected_shortfall(" + std::to_string(alpha) + ")", eval, claims,
                      ShortfallForm{alpha});
}

Functional make_entropic(double theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("entropic parameter must be positive");
    Claims claims;
    claims.convex = true;
    claims.law_invariant = true;
    claims.cash_additive = true;
    claims.decreasing = true;
    claims.convention = TranslationConvention::Risk;
    auto eval = [theta](const RandomVariable& x) {
        // log-sum-exp with max shift so huge positions cannot overflow
        double m = -kPlusInfinity;
        for (double v : x.values()) m = std::max(m, -theta * v);
        double sum = 0.0;
        for (double v : x.values()) sum += std::exp(-theta * v - m);
        return (m + std::log(sum / x.size())) / theta;
    };
    return Functional("entropic(" + std::to_string(theta) + ")", eval, claims,
                      EntropicForm{theta});
}

namespace {

Claims choquet_claims(bool law_invariant, bool submodular) {
    Claims claims;
    claims.increasing = true;
    claims.cash_additive = true;
    claims.convention = TranslationConvention::Pricing;
    claims.law_invariant = law_invariant;
    claims.sublinear = submodular;
    claims.convex = submodular;
    return claims;
}

}  // namespace

Functional make_choquet(Capacity c) {
    bool law_invariant = c.is_cardinality_based(1e-15);
    bool submodular = false;
    if (c.n() <= 14) {
        submodular = is_submodular(c).outcome == Outcome::Pass;
    } else if (law_invariant) {
        // cardinality profile concave <=> submodular for symmetric capacities
        submodular = true;
        double prev = kPlusInfinity;
        for (int k = 1; k <= c.n(); ++k) {
            std::uint32_t mask = (std::uint32_t{1} << k) - 1;
            std::uint32_t prev_mask = (std::uint32_t{1} << (k - 1)) - 1;
            double step = c(mask) - c(prev_mask);
            if (step > prev + 1e-12) {
                submodular = false;
                break;
            }
            prev = step;
        }
    }
    auto eval = [c](const RandomVariable& x) { return choquet_integral(c, x); };
    return Functional("choquet(table,n=" + std::to_string(c.n()) + ")", eval,
                      choquet_claims(law_invariant, submodular),
                      ChoquetTableForm{c, submodular});
}

Functional make_choquet(DistortionFunction g, SampleSpace space) {
    bool concave = g.is_concave();
    auto eval = [g](const RandomVariable& x) { return choquet_integral(g, x); };
    return Functional("choquet(distortion,n=" + std::to_string(space.n()) + ")", eval,
                      choquet_claims(true, concave),
                      ChoquetDistortionForm{g, space.n(), concave});
}

Functional make_span_parabola(RandomVariable w, RandomVariable z, const Tolerances& tol) {
    if (w.space() != z.space()) throw std::invalid_argument("space mismatch");
    const int n = w.size();
    double gww = 0.0, gwz = 0.0, gzz = 0.0;
    for (int i = 0; i < n; ++i) {
        gww += w[i] * w[i];
        gwz += w[i] * z[i];
        gzz += z[i] * z[i];
    }
    double det = gww * gzz - gwz * gwz;
    if (det <= 1e-12 * (1.0 + gww) * (1.0 + gzz)) {
        throw std::invalid_argument("the two directions must be linearly independent");
    }

    double membership_rel = tol.membership_rel;
    auto eval = [w, z, gww, gwz, gzz, det, membership_rel](const RandomVariable& x) {
        double xw = 0.0, xz = 0.0, norm2 = 0.0;
        for (int i = 0; i < x.size(); ++i) {
            xw += x[i] * w[i];
            xz += x[i] * z[i];
            norm2 += x[i] * x[i];
        }
        double alpha = (gzz * xw - gwz * xz) / det;
        double beta = (gww * xz - gwz * xw) / det;
        double r2 = 0.0;
        for (int i = 0; i < x.size(); ++i) {
            double r = x[i] - alpha * w[i] - beta * z[i];
            r2 += r * r;
        }
        double mem_tol = membership_rel * (1.0 + std::sqrt(norm2));
        if (std::sqrt(r2) > mem_tol) return kPlusInfinity;
        if (alpha > 1.0 + mem_tol) return kPlusInfinity;
        if (std::abs(alpha - 1.0) <= mem_tol) return beta * beta;
        return 0.0;
    };

    Claims claims;
    claims.convex = true;
    Functional phi("span_parabola", eval, claims);
    if (n == 2) {
        phi.set_warning("the two directions span the whole space; the infinite branch is empty");
    }
    // Seed points covering all three branches of the domain.
    phi.add_domain_probe(RandomVariable::constant(w.space(), 0.0));
    phi.add_domain_probe(w);
    phi.add_domain_probe(z);
    phi.add_domain_probe(w + z);
    phi.add_domain_probe(w - z);
    phi.add_domain_probe(0.5 * w);
    phi.add_domain_probe(w + 2.0 * z);
    phi.add_domain_probe(2.0 * z);
    return phi;
}

Functional make_shortfall_budget() {
    Claims claims;
    claims.convex = true;
    claims.law_invariant = true;
    claims.cash_additive = true;
    claims.decreasing = true;
    claims.convention = TranslationConvention::Risk;
    auto eval = [](const RandomVariable& x) {
        // h(m) = E[min(X + m, 0)] is concave piecewise linear and strictly
        // increasing until it reaches 0; walk its pieces (descending order
        // statistics) and invert the one crossing level -1.
        int n = x.size();
        std::vector<double> v(x.values());
        std::sort(v.begin(), v.end(), std::greater<>());
        double tail = std::accumulate(v.begin(), v.end(), 0.0);  // sum of atoms still below 0
        for (int k = 0; k < n; ++k) {
            double piece_end = -v[k];  // breakpoint where atom k leaves the shortfall
            double h_end = ((n - k) * piece_end + tail) / n;
            if (h_end >= -1.0) return (-n - tail) / (n - k);
            tail -= v[k];
        }
        // h(-v[n-1]) = 0 >= -1, so the loop always returns.
        throw std::logic_error("shortfall budget root not bracketed");
    };
    return Functional("shortfall_budget", eval, claims);
}

Functional make_s_additive(Functional base, EligibleAsset asset,
                           std::pair<double, double> bracket, const Tolerances& tol) {
    if (!(bracket.first < bracket.second)) throw std::invalid_argument("invalid bracket");
    Claims claims;
    const Claims& bc = base.claims();
    claims.convex = bc.convex;
    claims.decreasing = bc.decreasing;
    bool cash_payoff = is_constant(asset.payoff, 0.0);
    // Law invariance survives only when the payoff direction is degenerate
    // or the base is linear in the mean.
    claims.law_invariant =
        bc.law_invariant &&
        (cash_payoff || std::holds_alternative<MeanAffineForm>(base.closed_form()));
    if (cash_payoff && std::abs(asset.payoff[0] - asset.price) <= 1e-15) {
        claims.cash_additive = true;
        claims.convention = TranslationConvention::Risk;
    }

    double s0 = asset.price;
    RandomVariable s1 = asset.payoff;
    double lo0 = bracket.first, hi0 = bracket.second;
    double step_tol = tol.bisection;
    int max_doublings = tol.ray_doublings;

    auto eval = [base, s0, s1, lo0, hi0, step_tol, max_doublings](const RandomVariable& x) {
        auto acceptable = [&](double m) {
            double v = base(x + (m / s0) * s1);
            return v <= 0.0;
        };
        double lo = lo0, hi = hi0;
        int expand = 0;
        while (!acceptable(hi)) {
            if (++expand > max_doublings) {
                throw std::runtime_error(
                    "no finite capital requirement: the position never becomes acceptable");
            }
            double width = hi - lo;
            hi += width;
        }
        expand = 0;
        while (acceptable(lo)) {
            if (++expand > max_doublings) {
                throw std::runtime_error(
                    "no finite capital requirement: the position is acceptable at every level");
            }
            double width = hi - lo;
            lo -= width;
        }
        // invariant: base > 0 at lo, base <= 0 at hi
        for (int iter = 0; iter < 200 && hi - lo > step_tol; ++iter) {
            double mid = 0.5 * (lo + hi);
            if (acceptable(mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return 0.5 * (lo + hi);
    };
    return Functional("s_additive(" + base.label() + ")", eval, claims);
}

Verdict is_frictionless(const Functional& pi, const RandomVariable& x,
                        std::span<const double> lambda_grid, double tol) {
    bool has_negative = std::any_of(lambda_grid.begin(), lambda_grid.end(),
                                    [](double l) { return l < 0.0; });
    if (!has_negative) {
        throw std::invalid_argument("the lambda grid must include negative values");
    }
    double at_zero = pi(RandomVariable::constant(x.space(), 0.0));
    if (!(std::abs(at_zero) <= tol)) {
        throw PreconditionError("pricing rule must vanish at zero",
                                nlohmann::json{{"pi_at_zero", at_zero}});
    }

    Verdict verdict;
    verdict.name = "is_frictionless";
    double base = pi(x);
    double worst = 0.0;
    for (double lambda : lambda_grid) {
        double lhs = pi(lambda * x);
        double rhs = lambda * base;
        bool bad;
        double residual = 0.0;
        if (std::isinf(base) || std::isinf(lhs)) {
            bad = true;  // an infinite price is never frictionless
        } else {
            residual = std::abs(lhs - rhs);
            bad = residual > tol * (1.0 + std::abs(lambda));
            worst = std::max(worst, residual);
        }
        ++verdict.trials;
        if (bad) {
            verdict.outcome = Outcome::Fail;
            verdict.witness = nlohmann::json{{"x", x.values()},
                                             {"lambda", lambda},
                                             {"pi_scaled", ext_to_json(lhs)},
                                             {"lambda_pi", ext_to_json(rhs)}};
            verdict.max_residual = residual;
            return verdict;
        }
    }
    verdict.outcome = Outcome::Pass;
    verdict.max_residual = worst;
    return verdict;
}

namespace {

// Candidate streams for the relevance falsifiers: structured points first
// (constants, indicators, two-point differences), then random draws.
std::vector<RandomVariable> structured_nonnegative(const SampleSpace& space) {
    std::vector<RandomVariable> out;
    out.push_back(RandomVariable::constant(space, 1.0));
    for (int k = 1; k < space.n(); ++k) out.push_back(RandomVariable::prefix_indicator(space, k));
    return out;
}

RandomVariable random_nonnegative(CounterRng& rng, const SampleSpace& space) {
    std::vector<double> v(space.n());
    for (int attempt = 0; attempt < 64; ++attempt) {
        bool positive = false;
        for (double& e : v) {
            e = std::abs(rng.uniform(-2.0, 4.0));
            if (rng.integer(0, 3) == 0) e = 0.0;
            if (e > 0.0) positive = true;
        }
        if (positive) return RandomVariable(space, v);
    }
    return RandomVariable::constant(space, 1.0);
}

RandomVariable random_signed(CounterRng& rng, const SampleSpace& space) {
    std::vector<double> v(space.n());
    switch (rng.integer(0, 2)) {
        case 0:
            for (double& e : v) e = static_cast<double>(rng.integer(-4, 4));
            break;
        case 1:
            for (double& e : v) e = rng.uniform(-3.0, 3.0);
            break;
        default:
            for (double& e : v) e = rng.normal(0.0, 2.0);
            break;
    }
    return RandomVariable(space, std::move(v));
}

}  // namespace

Verdict is_relevant(const Functional& rho, const SampleSpace& space, int trials,
                    std::uint64_t seed, const Tolerances& tol) {
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    Verdict verdict;
    verdict.name = "is_relevant";
    verdict.seed = seed;
    CounterRng rng(seed);

    auto structured = structured_nonnegative(space);
    long long tested = 0;
    for (long long i = 0; tested < trials; ++i) {
        RandomVariable x = i < static_cast<long long>(structured.size())
                               ? structured[i]
                               : random_nonnegative(rng, space);
        double worst_case = rho(-x);
        ++tested;
        if (worst_case <= tol.exact) {
            verdict.outcome = Outcome::Fail;
            verdict.witness = nlohmann::json{{"x", x.values()}, {"rho_of_minus_x", worst_case}};
            verdict.trials = tested;
            return verdict;
        }
    }
    verdict.outcome = Outcome::Pass;
    verdict.trials = tested;
    verdict.details = nlohmann::json{{"note", "no counterexample found in " +
                                                  std::to_string(tested) + " trials"}};
    return verdict;
}

Verdict is_strongly_relevant(const Functional& rho, const SampleSpace& space, int trials,
                             std::uint64_t seed, const Tolerances& tol) {
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    Verdict verdict;
    verdict.name = "is_strongly_relevant";
    verdict.seed = seed;
    CounterRng rng(seed);

    std::vector<RandomVariable> structured;
    structured.push_back(RandomVariable::constant(space, 1.0));
    structured.push_back(RandomVariable::constant(space, -1.0));
    if (space.n() >= 2) {
        RandomVariable e0 = RandomVariable::unit(space, 0);
        RandomVariable e1 = RandomVariable::unit(space, space.n() - 1);
        structured.push_back(e0 - e1);
        structured.push_back(2.0 * (e0 - e1));
    }
    for (int k = 1; k < space.n(); ++k) structured.push_back(RandomVariable::prefix_indicator(space, k));

    long long tested = 0;
    long long attempts = 0;
    const long long max_attempts = 50LL * trials + static_cast<long long>(structured.size());
    for (long long i = 0; tested < trials && attempts < max_attempts; ++i) {
        ++attempts;
        RandomVariable x = i < static_cast<long long>(structured.size())
                               ? structured[i]
                               : random_signed(rng, space);
        if (x.max_abs() == 0.0) continue;
        double value = rho(x);
        if (!(value <= tol.exact)) continue;  // not admissible: rho(X) > 0
        ++tested;
        double mirrored = rho(-x);
        if (mirrored <= tol.exact) {
            verdict.outcome = Outcome::Fail;
            verdict.witness =
                nlohmann::json{{"x", x.values()}, {"rho_x", value}, {"rho_of_minus_x", mirrored}};
            verdict.trials = tested;
            return verdict;
        }
    }
    verdict.outcome = Outcome::Pass;
    verdict.trials = tested;
    verdict.details = nlohmann::json{{"note", "no counterexample found in " +
                                                  std::to_string(tested) + " admissible trials"}};
    return verdict;
}

Functional functional_from_spec(const nlohmann::json& spec, const SampleSpace& space,
                                const Tolerances& tol) {
    if (!spec.is_object() || !spec.contains("kind")) {
        throw std::invalid_argument("functional spec must be an object with a \"kind\"");
    }
    const std::string kind = spec.at("kind").get<std::string>();

    auto vector_field = [&](const char* key) {
        RandomVariable v = random_variable_from_json(spec.at(key));
        if (v.space() != space) {
            throw std::invalid_argument(std::string("field \"") + key +
                                        "\" does not match the sample space");
        }
        return v;
    };

    Functional built = [&]() -> Functional {
        if (kind == "mean_affine") {
            return make_mean_affine(spec.at("a").get<double>(), spec.at("b").get<double>());
        }
        if (kind == "expected_shortfall") {
            return make_expected_shortfall(spec.at("alpha").get<double>());
        }
        if (kind == "entropic") {
            return make_entropic(spec.at("theta").get<double>());
        }
        if (kind == "choquet") {
            if (spec.contains("distortion")) {
                return make_choquet(distortion_from_json(spec.at("distortion")), space);
            }
            if (spec.contains("capacity")) {
                Capacity c = capacity_from_json(spec.at("capacity"));
                if (c.n() != space.n()) {
                    throw std::invalid_argument("capacity does not match the sample space");
                }
                return make_choquet(std::move(c));
            }
            throw std::invalid_argument("choquet spec needs a \"distortion\" or \"capacity\"");
        }
        if (kind == "final_remark_rho") {
            return make_shortfall_budget();
        }
        if (kind == "example_3_3") {
            return make_span_parabola(vector_field("W"), vector_field("Z"), tol);
        }
        if (kind == "s_additive") {
            Functional base = functional_from_spec(spec.at("base"), space, tol);
            EligibleAsset asset(spec.at("S0").get<double>(), vector_field("S1"));
            return make_s_additive(std::move(base), std::move(asset), {-1e6, 1e6}, tol);
        }
        throw std::invalid_argument("unknown functional kind '" + kind + "'");
    }();

    if (spec.contains("label")) {
        return built.with_label(spec.at("label").get<std::string>());
    }
    return built;
}

}  // namespace lawvar
