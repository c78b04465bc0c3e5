#include "lawvar/capacity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace lawvar {

DistortionFunction::DistortionFunction(std::vector<std::pair<double, double>> knots)
    : knots_(std::move(knots)) {
    if (knots_.size() < 2) throw std::invalid_argument("distortion needs at least two knots");
    if (knots_.front() != std::pair<double, double>{0.0, 0.0} ||
        knots_.back() != std::pair<double, double>{1.0, 1.0}) {
        throw std::invalid_argument("distortion must start at (0,0) and end at (1,1)");
    }
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (!(knots_[i].first > knots_[i - 1].first)) {
            throw std::invalid_argument("distortion knots must have strictly increasing u");
        }
        if (knots_[i].second < knots_[i - 1].second - 1e-15) {
            throw std::invalid_argument("distortion must be nondecreasing");
        }
    }
}

DistortionFunction DistortionFunction::identity() {
    return DistortionFunction({{0.0, 0.0}, {1.0, 1.0}});
}

double DistortionFunction::operator()(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    auto it = std::lower_bound(knots_.begin(), knots_.end(), u,
                               [](const auto& knot, double value) { return knot.first < value; });
    if (it == knots_.begin()) return knots_.front().second;
    if (it == knots_.end()) return knots_.back().second;
    auto [u1, g1] = *it;
    auto [u0, g0] = *(it - 1);
    if (u == u1) return g1;
    return g0 + (g1 - g0) * (u - u0) / (u1 - u0);
}

bool DistortionFunction::is_concave(double tol) const {
    double prev_slope = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        double slope = (knots_[i].second - knots_[i - 1].second) /
                       (knots_[i].first - knots_[i - 1].first);
        if (slope > prev_slope + tol) return false;
        prev_slope = slope;
    }
    return true;
}

void to_json(nlohmann::json& j, const DistortionFunction& g) {
    nlohmann::json knots = nlohmann::json::array();
    for (const auto& [u, gu] : g.knots()) knots.push_back({u, gu});
    j = nlohmann::json{{"knots", knots}};
}

DistortionFunction distortion_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("knots") || !j.at("knots").is_array()) {
        throw std::invalid_argument("distortion JSON must be {\"knots\": [[u, g], ...]}");
    }
    std::vector<std::pair<double, double>> knots;
    for (const auto& k : j.at("knots")) {
        if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number()) {
            throw std::invalid_argument("each distortion knot must be a [u, g] number pair");
        }
        knots.emplace_back(k[0].get<double>(), k[1].get<double>());
    }
    return DistortionFunction(std::move(knots));
}

Capacity::Capacity(int n, std::vector<double> table) : n_(n) {
    if (n < 1 || n > 20) throw std::invalid_argument("explicit capacities support 1..20 atoms");
    if (table.size() != (std::size_t{1} << n)) {
        throw std::invalid_argument("capacity table must have 2^n entries");
    }
    if (std::abs(table.front()) > 1e-12 || std::abs(table.back() - 1.0) > 1e-12) {
        throw std::invalid_argument("capacity must satisfy c(empty) = 0 and c(full) = 1");
    }
    for (std::uint32_t mask = 0; mask < table.size(); ++mask) {
        for (int i = 0; i < n; ++i) {
            std::uint32_t bit = std::uint32_t{1} << i;
            if (mask & bit) continue;
            if (table[mask] > table[mask | bit] + 1e-12) {
                throw std::invalid_argument("capacity must be monotone under inclusion");
            }
        }
    }
    table_ = std::make_shared<const std::vector<double>>(std::move(table));
}

bool Capacity::is_cardinality_based(double tol) const {
    std::vector<double> by_count(n_ + 1, std::numeric_limits<double>::quiet_NaN());
    for (std::uint32_t mask = 0; mask <= full_mask(); ++mask) {
        int k = std::popcount(mask);
        double v = (*table_)[mask];
        if (std::isnan(by_count[k])) {
            by_count[k] = v;
        } else if (std::abs(by_count[k] - v) > tol) {
            return false;
        }
    }
    return true;
}

void to_json(nlohmann::json& j, const Capacity& c) {
    nlohmann::json table = nlohmann::json::object();
    for (std::uint32_t mask = 0; mask <= c.full_mask(); ++mask) {
        table[std::to_string(mask)] = c(mask);
    }
    j = nlohmann::json{{"n", c.n()}, {"table", table}};
}

Capacity capacity_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("table")) {
        throw std::invalid_argument("capacity JSON must be {\"n\": ..., \"table\": {...}}");
    }
    int n = j.at("n").get<int>();
    if (n < 1 || n > 20) throw std::invalid_argument("explicit capacities support 1..20 atoms");
    std::vector<double> table(std::size_t{1} << n, std::numeric_limits<double>::quiet_NaN());
    for (const auto& [key, value] : j.at("table").items()) {
        std::size_t mask = std::stoull(key);
        if (mask >= table.size()) throw std::invalid_argument("capacity table key out of range");
        table[mask] = value.get<double>();
    }
    for (double v : table) {
        if (std::isnan(v)) throw std::invalid_argument("capacity table is missing subsets");
    }
    return Capacity(n, std::move(table));
}

Capacity capacity_from_distortion(const DistortionFunction& g, const SampleSpace& space) {
    int n = space.n();
    if (n > 20) {
        throw std::invalid_argument(
            "explicit capacity tables are limited to 20 atoms; evaluate the Choquet "
            "integral through the distortion form instead");
    }
    std::vector<double> cardinality_value(n + 1);
    for (int k = 0; k <= n; ++k) cardinality_value[k] = g(static_cast<double>(k) / n);
    std::vector<double> table(std::size_t{1} << n);
    for (std::uint32_t mask = 0; mask < table.size(); ++mask) {
        table[mask] = cardinality_value[std::popcount(mask)];
    }
    return Capacity(n, std::move(table));
}

Verdict is_submodular(const Capacity& c, const Tolerances& tol) {
    if (c.n() > 14) throw std::invalid_argument("exhaustive submodularity check is limited to 14 atoms");
    Verdict verdict;
    verdict.name = "is_submodular";
    std::uint32_t full = c.full_mask();
    long long pairs = 0;
    double worst = 0.0;
    for (std::uint32_t e = 0; e <= full; ++e) {
        for (std::uint32_t f = e; f <= full; ++f) {
            ++pairs;
            double excess = c(e | f) + c(e & f) - c(e) - c(f);
            worst = std::max(worst, excess);
            if (excess > tol.exact) {
                verdict.outcome = Outcome::Fail;
                verdict.witness = nlohmann::json{{"E", e},
                                                 {"F", f},
                                                 {"c_union", c(e | f)},
                                                 {"c_intersection", c(e & f)},
                                                 {"c_E", c(e)},
                                                 {"c_F", c(f)},
                                                 {"excess", excess}};
                verdict.max_residual = excess;
                verdict.trials = pairs;
                return verdict;
            }
        }
    }
    verdict.outcome = Outcome::Pass;
    verdict.max_residual = worst;
    verdict.trials = pairs;
    return verdict;
}

namespace {

// Shared telescoping core: cap(k) is the capacity of the k largest atoms.
double telescoped_integral(const RandomVariable& x,
                           const std::function<double(int, const std::vector<int>&)>& cap) {
    int n = x.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return x[a] > x[b]; });
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
        double level = x[order[k]];
        double next = (k + 1 < n) ? x[order[k + 1]] : 0.0;
        if (level != next) total += (level - next) * cap(k + 1, order);
    }
    return total;
}

void require_matching(int capacity_n, const RandomVariable& x) {
    if (capacity_n != x.size()) throw std::invalid_argument("space mismatch");
}

}  // namespace

double choquet_integral(const Capacity& c, const RandomVariable& x) {
    require_matching(c.n(), x);
    return telescoped_integral(x, [&](int k, const std::vector<int>& order) {
        std::uint32_t mask = 0;
        for (int i = 0; i < k; ++i) mask |= std::uint32_t{1} << order[i];
        return c(mask);
    });
}

double choquet_integral(const DistortionFunction& g, const RandomVariable& x) {
    int n = x.size();
    return telescoped_integral(
        x, [&](int k, const std::vector<int>&) { return g(static_cast<double>(k) / n); });
}

namespace {

// Random nondecreasing piecewise-linear map: a constant plus nonnegative
// hinge terms.
std::function<double(double)> sample_monotone_map(CounterRng& rng) {
    int hinges = static_cast<int>(rng.integer(1, 3));
    double base = rng.uniform(-1.0, 1.0);
    std::vector<std::pair<double, double>> terms;  // (slope, knot)
    terms.reserve(hinges);
    for (int i = 0; i < hinges; ++i) {
        terms.emplace_back(rng.uniform(0.0, 2.0), rng.uniform(-3.0, 3.0));
    }
    return [base, terms](double t) {
        double s = base;
        for (const auto& [slope, knot] : terms) s += slope * std::max(t - knot, 0.0);
        return s;
    };
}

template <typename Integral>
Verdict comonotonic_check_impl(int n, int trials, std::uint64_t seed, const Tolerances& tol,
                               Integral&& integral) {
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    Verdict verdict;
    verdict.name = "comonotonic_additivity";
    verdict.seed = seed;
    SampleSpace space(n);
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        CounterRng rng = CounterRng(seed).fork(static_cast<std::uint64_t>(trial));
        std::vector<double> t(n);
        for (double& e : t) e = rng.uniform(-3.0, 3.0);
        auto u = sample_monotone_map(rng);
        auto v = sample_monotone_map(rng);
        std::vector<double> xs(n), ys(n);
        for (int i = 0; i < n; ++i) {
            xs[i] = u(t[i]);
            ys[i] = v(t[i]);
        }
        RandomVariable x(space, xs), y(space, ys);
        double lhs = integral(x + y);
        double rhs = integral(x) + integral(y);
        double residual = std::abs(lhs - rhs);
        worst = std::max(worst, residual);
        if (residual > tol.comonotone) {
            verdict.outcome = Outcome::Fail;
            verdict.witness = nlohmann::json{{"t", t},   {"x", x.values()}, {"y", y.values()},
                                             {"lhs", lhs}, {"rhs", rhs},     {"trial", trial}};
            verdict.max_residual = residual;
            verdict.trials = trial + 1;
            return verdict;
        }
    }
    verdict.outcome = Outcome::Pass;
    verdict.max_residual = worst;
    verdict.trials = trials;
    return verdict;
}

}  // namespace

Verdict comonotonic_additivity_check(const Capacity& c, int trials, std::uint64_t seed,
                                     const Tolerances& tol) {
    return comonotonic_check_impl(c.n(), trials, seed, tol,
                                  [&](const RandomVariable& x) { return choquet_integral(c, x); });
}

Verdict comonotonic_additivity_check(const DistortionFunction& g, const SampleSpace& space,
                                     int trials, std::uint64_t seed, const Tolerances& tol) {
    return comonotonic_check_impl(space.n(), trials, seed, tol,
                                  [&](const RandomVariable& x) { return choquet_integral(g, x); });
}

}  // namespace lawvar
