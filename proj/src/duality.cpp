#include "lawvar/duality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lawvar {

std::string to_string(ConjugateStatus s) {
    switch (s) {
        case ConjugateStatus::Exact: return "Exact";
        case ConjugateStatus::Numerical: return "Numerical";
        case ConjugateStatus::UnboundedDetected: return "UnboundedDetected";
    }
    throw std::logic_error("unknown conjugate status");
}

void to_json(nlohmann::json& j, const ConjugateResult& r) {
    j = nlohmann::json{{"value", ext_to_json(r.value)},
                       {"status", to_string(r.status)},
                       {"iterations", r.iterations}};
}

namespace {

double membership_tol(const RandomVariable& y, const Tolerances& tol) {
    return tol.membership_rel * (1.0 + y.max_abs());
}

ConjugateResult unbounded() {
    return ConjugateResult{kPlusInfinity, ConjugateStatus::UnboundedDetected, 0};
}

ConjugateResult exact(double value) {
    if (value == 0.0) value = 0.0;  // normalize -0.0
    return ConjugateResult{value, ConjugateStatus::Exact, 0};
}

// Descending partial sums of y divided by n: the largest values that
// E[1_E Y] can take over subsets E of each cardinality.
std::vector<double> top_partial_means(const RandomVariable& y) {
    std::vector<double> v(y.values());
    std::sort(v.begin(), v.end(), std::greater<>());
    std::vector<double> sums(v.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        acc += v[k];
        sums[k] = acc / static_cast<double>(v.size());
    }
    return sums;
}

ConjugateResult closed_form_conjugate(const Functional& phi, const RandomVariable& y,
                                      const Tolerances& tol) {
    const double eps = membership_tol(y, tol);
    const int n = y.size();

    if (const auto* form = std::get_if<MeanAffineForm>(&phi.closed_form())) {
        for (double v : y.values()) {
            if (std::abs(v - form->a) > eps) return unbounded();
        }
        return exact(-form->b);
    }

    if (const auto* form = std::get_if<ShortfallForm>(&phi.closed_form())) {
        // dual set: -1/alpha <= Y <= 0 with E[Y] = -1
        for (double v : y.values()) {
            if (v > eps || v < -1.0 / form->alpha - eps) return unbounded();
        }
        if (std::abs(expectation(y) + 1.0) > eps) return unbounded();
        return exact(0.0);
    }

    if (const auto* form = std::get_if<EntropicForm>(&phi.closed_form())) {
        // scaled relative entropy of the density -Y
        double mean = 0.0;
        for (double v : y.values()) {
            if (v > eps) return unbounded();
            mean += v;
        }
        mean /= n;
        if (std::abs(mean + 1.0) > eps) return unbounded();
        double entropy = 0.0;
        for (double v : y.values()) {
            double density = std::max(-v, 0.0);
            if (density > 0.0) entropy += density * std::log(density);
        }
        return exact(entropy / (form->theta * n));
    }

    if (const auto* form = std::get_if<ChoquetDistortionForm>(&phi.closed_form())) {
        if (!form->concave) {
            throw std::invalid_argument(
                "closed-form conjugate requires a submodular (concave-distortion) capacity");
        }
        // core membership: every top-k average stays below g(k/n), mean is 1
        auto sums = top_partial_means(y);
        for (int k = 1; k <= n; ++k) {
            if (sums[k - 1] > form->distortion(static_cast<double>(k) / n) + eps) {
                return unbounded();
            }
        }
        if (std::abs(expectation(y) - 1.0) > eps) return unbounded();
        return exact(0.0);
    }

    if (const auto* form = std::get_if<ChoquetTableForm>(&phi.closed_form())) {
        if (!form->submodular) {
            throw std::invalid_argument("closed-form conjugate requires a submodular capacity");
        }
        const Capacity& c = form->capacity;
        for (std::uint32_t mask = 1; mask <= c.full_mask(); ++mask) {
            double q = 0.0;
            for (int i = 0; i < n; ++i) {
                if (mask & (std::uint32_t{1} << i)) q += y[i];
            }
            q /= n;
            if (q > c(mask) + eps) return unbounded();
        }
        if (std::abs(expectation(y) - 1.0) > eps) return unbounded();
        return exact(0.0);
    }

    throw std::invalid_argument("no closed form available for functional '" + phi.label() + "'");
}

ConjugateResult ascent_conjugate(const Functional& phi, const RandomVariable& y,
                                 std::uint64_t seed, const Tolerances& tol) {
    const SampleSpace space = y.space();
    const int n = y.size();
    int evals = 0;
    auto objective = [&](const RandomVariable& x) {
        ++evals;
        double v = phi(x);
        if (std::isinf(v)) return -kPlusInfinity;
        return inner_expectation(x, y) - v;
    };

    // Ray scan: certify +inf when the objective blows past the threshold
    // along any doubling ray.
    std::vector<RandomVariable> directions;
    for (int i = 0; i < n; ++i) {
        directions.push_back(RandomVariable::unit(space, i));
        directions.push_back(-directions.back());
    }
    directions.push_back(RandomVariable::constant(space, 1.0));
    directions.push_back(RandomVariable::constant(space, -1.0));
    if (y.max_abs() > 0.0) {
        directions.push_back((1.0 / y.max_abs()) * y);
        directions.push_back((-1.0 / y.max_abs()) * y);
    }
    CounterRng rng(seed);
    for (int extra = 0; extra < 8; ++extra) {
        std::vector<double> d(n);
        double norm = 0.0;
        for (double& e : d) {
            e = rng.normal(0.0, 1.0);
            norm += e * e;
        }
        norm = std::sqrt(std::max(norm, 1e-12));
        for (double& e : d) e /= norm;
        directions.emplace_back(space, std::move(d));
    }
    for (const auto& d : directions) {
        double t = 1.0;
        for (int k = 0; k <= tol.ray_doublings; ++k, t *= 2.0) {
            double f = objective(t * d);
            if (f == -kPlusInfinity) break;  // left the domain; convexity keeps it out
            if (f > tol.divergence_threshold) {
                return ConjugateResult{kPlusInfinity, ConjugateStatus::UnboundedDetected, evals};
            }
        }
    }

    // Multi-start compass search on the (concave) objective.
    std::vector<RandomVariable> starts;
    starts.push_back(RandomVariable::constant(space, 0.0));
    starts.push_back(y);
    starts.push_back(-y);
    for (const auto& probe : phi.domain_probes()) starts.push_back(probe);
    for (int extra = 0; extra < 4; ++extra) {
        std::vector<double> v(n);
        for (double& e : v) e = rng.uniform(-3.0, 3.0);
        starts.emplace_back(space, std::move(v));
    }

    double best = -kPlusInfinity;
    const int eval_budget = 40000;
    for (const auto& start : starts) {
        double fx = objective(start);
        if (fx == -kPlusInfinity) continue;
        RandomVariable x = start;
        double h = 1.0;
        while (h > 1e-7 && evals < eval_budget) {
            bool improved = false;
            RandomVariable best_neighbor = x;
            double best_value = fx;
            for (int i = 0; i < n; ++i) {
                for (double sign : {1.0, -1.0}) {
                    RandomVariable candidate = x + (sign * h) * RandomVariable::unit(space, i);
                    double f = objective(candidate);
                    if (f > best_value) {
                        best_value = f;
                        best_neighbor = candidate;
                        improved = true;
                    }
                }
            }
            if (improved) {
                x = best_neighbor;
                fx = best_value;
            } else {
                h *= 0.5;
            }
        }
        best = std::max(best, fx);
    }
    if (best == -kPlusInfinity) {
        throw std::invalid_argument(
            "ascent found no start point with finite value for '" + phi.label() + "'");
    }
    return ConjugateResult{best, ConjugateStatus::Numerical, evals};
}

}  // namespace

ConjugateResult conjugate(const Functional& phi, const RandomVariable& y, ConjugateMethod method,
                          std::uint64_t seed, const Tolerances& tol) {
    if (method == ConjugateMethod::ClosedForm) return closed_form_conjugate(phi, y, tol);
    return ascent_conjugate(phi, y, seed, tol);
}

double biconjugate_gap(const Functional& phi, const std::vector<RandomVariable>& test_points,
                       const std::vector<RandomVariable>& dual_grid, const Tolerances& tol) {
    if (test_points.empty() || dual_grid.empty()) {
        throw std::invalid_argument("biconjugate gap needs test points and a dual grid");
    }
    // Conjugate values do not depend on the test point; hoist them.
    std::vector<double> star(dual_grid.size());
    for (std::size_t i = 0; i < dual_grid.size(); ++i) {
        star[i] = conjugate(phi, dual_grid[i], ConjugateMethod::ClosedForm, 0, tol).value;
    }
    double gap = -kPlusInfinity;
    for (const auto& x : test_points) {
        double value = phi(x);
        if (std::isinf(value)) continue;
        double sup = -kPlusInfinity;
        for (std::size_t i = 0; i < dual_grid.size(); ++i) {
            if (std::isinf(star[i])) continue;
            sup = std::max(sup, inner_expectation(x, dual_grid[i]) - star[i]);
        }
        if (sup == -kPlusInfinity) {
            throw std::invalid_argument("dual grid contains no point with finite conjugate");
        }
        gap = std::max(gap, value - sup);
    }
    if (gap == -kPlusInfinity) {
        throw std::invalid_argument("all test points have infinite value");
    }
    return gap;
}

AffineFit affine_slope(const Functional& phi, const RandomVariable& z,
                       std::span<const double> m_grid) {
    bool has_zero = false, has_positive = false, has_negative = false;
    for (double m : m_grid) {
        has_zero |= m == 0.0;
        has_positive |= m > 0.0;
        has_negative |= m < 0.0;
    }
    if (!has_zero || !has_positive || !has_negative) {
        throw std::invalid_argument("affinity grid must contain zero and both signs");
    }

    AffineFit fit;
    double at_zero = phi(RandomVariable::constant(z.space(), 0.0));
    if (std::isinf(at_zero)) {
        fit.infinite_at = 0.0;
        return fit;
    }
    std::vector<std::pair<double, double>> samples;  // (m, phi(mZ) - phi(0))
    for (double m : m_grid) {
        double v = phi(m * z);
        if (std::isinf(v)) {
            fit.infinite_at = m;
            return fit;
        }
        samples.emplace_back(m, v - at_zero);
    }
    double smm = 0.0, smy = 0.0;
    for (auto [m, yv] : samples) {
        smm += m * m;
        smy += m * yv;
    }
    fit.slope = smy / smm;
    for (auto [m, yv] : samples) {
        fit.max_residual = std::max(fit.max_residual, std::abs(yv - fit.slope * m));
    }
    return fit;
}

Verdict affine_representation_check(const Functional& phi,
                                    const std::vector<RandomVariable>& span_basis,
                                    const RandomVariable& y, int trials, std::uint64_t seed,
                                    const Tolerances& tol) {
    if (span_basis.empty()) throw std::invalid_argument("span basis must be nonempty");
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    double at_zero = phi(RandomVariable::constant(y.space(), 0.0));
    if (std::isinf(at_zero)) {
        throw PreconditionError("functional must be finite at zero");
    }

    Verdict verdict;
    verdict.name = "affine_representation";
    verdict.seed = seed;
    CounterRng rng(seed);
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        RandomVariable z = RandomVariable::constant(y.space(), 0.0);
        nlohmann::json coeffs = nlohmann::json::array();
        if (trial < static_cast<int>(span_basis.size())) {
            z = span_basis[trial];
            coeffs.push_back(1.0);
        } else {
            for (const auto& basis : span_basis) {
                double c = rng.uniform(-10.0, 10.0);
                coeffs.push_back(c);
                z = z + c * basis;
            }
        }
        double lhs = phi(z);
        double rhs = inner_expectation(z, y) + at_zero;
        double residual = std::isinf(lhs) ? kPlusInfinity : std::abs(lhs - rhs);
        ++verdict.trials;
        if (!(residual <= tol.check * (1.0 + std::abs(rhs)))) {
            verdict.outcome = Outcome::Fail;
            verdict.witness = nlohmann::json{{"z", z.values()},
                                             {"coefficients", coeffs},
                                             {"phi_z", ext_to_json(lhs)},
                                             {"affine_value", rhs}};
            verdict.max_residual = std::isinf(residual) ? 0.0 : residual;
            return verdict;
        }
        worst = std::max(worst, residual);
    }
    verdict.outcome = Outcome::Pass;
    verdict.max_residual = worst;
    return verdict;
}

}  // namespace lawvar
