#include "lawvar/manifest.hpp"

#include <algorithm>
#include <future>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lawvar/collapse.hpp"
#include "lawvar/functional.hpp"

namespace lawvar {

namespace {

const std::set<std::string>& known_checks() {
    static const std::set<std::string> names = {
        "law_invariance",     "convexity",
        "translation_invariance", "sublinear_upgrade",
        "collapse",           "choquet_collapse",
        "pricing_collapse",   "risk_collapse",
        "relevance_dichotomy", "frictionless",
        "relevant",           "strongly_relevant",
        "submodular",         "comonotonic_additivity",
    };
    return names;
}

const std::set<std::string>& functional_checks() {
    static const std::set<std::string> names = {
        "law_invariance", "convexity",        "translation_invariance",
        "sublinear_upgrade", "collapse",       "pricing_collapse",
        "risk_collapse",  "relevance_dichotomy", "frictionless",
        "relevant",       "strongly_relevant",
    };
    return names;
}

void apply_tolerance_overrides(Tolerances& tol, const nlohmann::json& overrides) {
    for (const auto& [key, value] : overrides.items()) {
        if (key == "law") tol.law = value.get<double>();
        else if (key == "constant") tol.constant = value.get<double>();
        else if (key == "rank_rel") tol.rank_rel = value.get<double>();
        else if (key == "zero_mean_rel") tol.zero_mean_rel = value.get<double>();
        else if (key == "collapse_mean_rel") tol.collapse_mean_rel = value.get<double>();
        else if (key == "affine_rel") tol.affine_rel = value.get<double>();
        else if (key == "membership_rel") tol.membership_rel = value.get<double>();
        else if (key == "check") tol.check = value.get<double>();
        else if (key == "exact") tol.exact = value.get<double>();
        else if (key == "comonotone") tol.comonotone = value.get<double>();
        else if (key == "subadditive") tol.subadditive = value.get<double>();
        else if (key == "s_additive") tol.s_additive = value.get<double>();
        else if (key == "weak_duality") tol.weak_duality = value.get<double>();
        else if (key == "bisection") tol.bisection = value.get<double>();
        else if (key == "divergence_threshold") tol.divergence_threshold = value.get<double>();
        else if (key == "ray_doublings") tol.ray_doublings = value.get<int>();
        else throw std::invalid_argument("unknown tolerance override '" + key + "'");
    }
}

std::uint64_t derived_seed(std::uint64_t base, std::size_t index) {
    CounterRng rng(base);
    return rng.fork(0x51D5ULL + index).next_u64();
}

}  // namespace

Manifest Manifest::parse(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("manifest must be a JSON object");
    Manifest manifest;
    manifest.space = sample_space_from_json(j.at("space"));
    if (j.contains("seed")) manifest.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("tolerances")) apply_tolerance_overrides(manifest.tolerances, j.at("tolerances"));

    if (j.contains("functionals")) {
        for (const auto& spec : j.at("functionals")) {
            if (!spec.is_object() || !spec.contains("kind")) {
                throw std::invalid_argument("every functional spec needs a \"kind\"");
            }
            manifest.functional_specs.push_back(spec);
        }
    }

    if (!j.contains("checks") || !j.at("checks").is_array() || j.at("checks").empty()) {
        throw std::invalid_argument("manifest needs a nonempty \"checks\" array");
    }
    for (const auto& check : j.at("checks")) {
        if (!check.is_object() || !check.contains("name")) {
            throw std::invalid_argument("every check needs a \"name\"");
        }
        std::string name = check.at("name").get<std::string>();
        if (!known_checks().count(name)) {
            throw std::invalid_argument("unknown check name '" + name + "'");
        }
        if (functional_checks().count(name) && !check.contains("functional")) {
            throw std::invalid_argument("check '" + name + "' needs a \"functional\" reference");
        }
        manifest.checks.push_back(check);
    }
    return manifest;
}

int Report::exit_code() const {
    return std::any_of(verdicts.begin(), verdicts.end(),
                       [](const Verdict& v) { return v.failed(); })
               ? 1
               : 0;
}

std::string Report::to_markdown() const {
    std::ostringstream out;
    out << "# Verification report\n\n";
    out << "- version: " << version << "\n";
    out << "- seed: " << seed << "\n\n";
    out << "| check | outcome | max residual | trials |\n";
    out << "|---|---|---|---|\n";
    for (const auto& v : verdicts) {
        out << "| " << v.name << " | " << to_string(v.outcome) << " | " << v.max_residual
            << " | " << v.trials << " |\n";
    }
    out << "\n## Summary\n\n";
    for (const auto& [outcome, count] : summary) {
        out << "- " << outcome << ": " << count << "\n";
    }
    return out.str();
}

void to_json(nlohmann::json& j, const Report& r) {
    j = nlohmann::json{
        {"verdicts", r.verdicts},
        {"summary", r.summary},
        {"environment",
         nlohmann::json{{"version", r.version}, {"seed", r.seed}, {"timestamp", r.timestamp}}},
    };
}

void from_json(const nlohmann::json& j, Report& r) {
    r.verdicts = j.at("verdicts").get<std::vector<Verdict>>();
    r.summary = j.at("summary").get<std::map<std::string, long long>>();
    r.version = j.at("environment").at("version").get<std::string>();
    r.seed = j.at("environment").at("seed").get<std::uint64_t>();
    r.timestamp = j.at("environment").at("timestamp");

    std::map<std::string, long long> recount;
    for (const auto& v : r.verdicts) ++recount[to_string(v.outcome)];
    if (recount != r.summary) {
        throw std::invalid_argument("report summary does not match its verdicts");
    }
}

namespace {

struct RunContext {
    const Manifest& manifest;
    SampleSpace space;
    std::vector<Functional> functionals;
    std::vector<std::string> labels;
};

const Functional& resolve_functional(const RunContext& ctx, const nlohmann::json& ref) {
    if (ref.is_number_integer()) {
        auto index = ref.get<long long>();
        if (index < 0 || index >= static_cast<long long>(ctx.functionals.size())) {
            throw std::invalid_argument("functional index out of range");
        }
        return ctx.functionals[index];
    }
    if (ref.is_string()) {
        std::string label = ref.get<std::string>();
        for (std::size_t i = 0; i < ctx.labels.size(); ++i) {
            if (ctx.labels[i] == label) return ctx.functionals[i];
        }
        throw std::invalid_argument("no functional labelled '" + label + "'");
    }
    throw std::invalid_argument("functional reference must be an index or a label");
}

RandomVariable vector_param(const RunContext& ctx, const nlohmann::json& check,
                            const char* key) {
    if (!check.contains(key)) {
        throw std::invalid_argument(std::string("check is missing \"") + key + "\"");
    }
    RandomVariable v = random_variable_from_json(check.at(key));
    if (v.space() != ctx.space) {
        throw std::invalid_argument(std::string("\"") + key + "\" does not match the space");
    }
    return v;
}

Verdict run_check(const RunContext& ctx, const nlohmann::json& check, std::uint64_t seed) {
    const std::string name = check.at("name").get<std::string>();
    const Tolerances& tol = ctx.manifest.tolerances;
    int trials = check.value("trials", 200);

    if (name == "law_invariance") {
        return check_law_invariance(resolve_functional(ctx, check.at("functional")), ctx.space,
                                    trials, seed, tol);
    }
    if (name == "convexity") {
        return check_convexity(resolve_functional(ctx, check.at("functional")), ctx.space,
                               trials, seed, tol);
    }
    if (name == "translation_invariance") {
        return check_translation_invariance_along(
            resolve_functional(ctx, check.at("functional")), vector_param(ctx, check, "z"),
            trials, seed, tol);
    }
    if (name == "sublinear_upgrade") {
        if (!check.contains("s") || !check.at("s").is_array() || check.at("s").empty()) {
            throw std::invalid_argument("sublinear_upgrade needs a nonempty \"s\" array");
        }
        std::vector<RandomVariable> directions;
        for (const auto& entry : check.at("s")) {
            RandomVariable v = random_variable_from_json(entry);
            if (v.space() != ctx.space) {
                throw std::invalid_argument("\"s\" entry does not match the space");
            }
            directions.push_back(std::move(v));
        }
        return check_sublinear_upgrade(resolve_functional(ctx, check.at("functional")),
                                       directions, trials, seed, tol);
    }
    if (name == "collapse") {
        return collapse_verdict(resolve_functional(ctx, check.at("functional")),
                                vector_param(ctx, check, "z"), trials, seed, tol,
                                check.value("require_ti_along_one", false));
    }
    if (name == "choquet_collapse") {
        if (check.contains("distortion")) {
            return choquet_collapse_scan(distortion_from_json(check.at("distortion")), ctx.space,
                                         trials, seed, tol);
        }
        if (check.contains("capacity")) {
            Capacity c = capacity_from_json(check.at("capacity"));
            if (c.n() != ctx.space.n()) {
                throw std::invalid_argument("capacity does not match the space");
            }
            return choquet_collapse_scan(c, trials, seed, tol);
        }
        throw std::invalid_argument("choquet_collapse needs a \"distortion\" or \"capacity\"");
    }
    if (name == "pricing_collapse") {
        return pricing_collapse(resolve_functional(ctx, check.at("functional")),
                                vector_param(ctx, check, "z"), trials, seed, tol);
    }
    if (name == "risk_collapse") {
        EligibleAsset asset(check.at("S0").get<double>(), vector_param(ctx, check, "S1"));
        return risk_collapse(resolve_functional(ctx, check.at("functional")), asset, trials,
                             seed, tol);
    }
    if (name == "relevance_dichotomy") {
        return relevance_dichotomy(resolve_functional(ctx, check.at("functional")), ctx.space,
                                   trials, seed, tol);
    }
    if (name == "frictionless") {
        return is_frictionless(resolve_functional(ctx, check.at("functional")),
                               vector_param(ctx, check, "x"), kDefaultLambdaGrid, tol.check);
    }
    if (name == "relevant") {
        return is_relevant(resolve_functional(ctx, check.at("functional")), ctx.space, trials,
                           seed, tol);
    }
    if (name == "strongly_relevant") {
        return is_strongly_relevant(resolve_functional(ctx, check.at("functional")), ctx.space,
                                    trials, seed, tol);
    }
    if (name == "submodular") {
        if (check.contains("capacity")) {
            return is_submodular(capacity_from_json(check.at("capacity")), tol);
        }
        if (check.contains("distortion")) {
            return is_submodular(
                capacity_from_distortion(distortion_from_json(check.at("distortion")), ctx.space),
                tol);
        }
        throw std::invalid_argument("submodular needs a \"capacity\" or \"distortion\"");
    }
    if (name == "comonotonic_additivity") {
        if (check.contains("distortion")) {
            return comonotonic_additivity_check(distortion_from_json(check.at("distortion")),
                                                ctx.space, trials, seed, tol);
        }
        if (check.contains("capacity")) {
            return comonotonic_additivity_check(capacity_from_json(check.at("capacity")), trials,
                                                seed, tol);
        }
        throw std::invalid_argument(
            "comonotonic_additivity needs a \"capacity\" or \"distortion\"");
    }
    throw std::invalid_argument("unknown check name '" + name + "'");
}

}  // namespace

Report run_manifest(const Manifest& manifest, std::uint64_t seed) {
    RunContext ctx{manifest, manifest.space, {}, {}};
    for (std::size_t i = 0; i < manifest.functional_specs.size(); ++i) {
        const auto& spec = manifest.functional_specs[i];
        Functional f = functional_from_spec(spec, manifest.space, manifest.tolerances);
        ctx.labels.push_back(spec.contains("label") ? spec.at("label").get<std::string>()
                                                    : f.label());
        ctx.functionals.push_back(std::move(f));
    }

    Report report;
    report.seed = seed;

    // Checks run in parallel (evaluators are pure and every check has its
    // own derived seed); the report is assembled in manifest order.
    std::vector<std::future<Verdict>> pending;
    pending.reserve(manifest.checks.size());
    for (std::size_t i = 0; i < manifest.checks.size(); ++i) {
        const auto& check = manifest.checks[i];
        std::uint64_t check_seed = derived_seed(seed, i);
        pending.push_back(std::async(std::launch::async, [&ctx, &check, check_seed]() {
            try {
                return run_check(ctx, check, check_seed);
            } catch (const PreconditionError& e) {
                Verdict refused;
                refused.outcome = Outcome::Refused;
                refused.seed = check_seed;
                refused.details = nlohmann::json{{"reason", e.what()}, {"note", e.note()}};
                return refused;
            }
        }));
    }
    for (std::size_t i = 0; i < manifest.checks.size(); ++i) {
        const auto& check = manifest.checks[i];
        Verdict verdict = pending[i].get();
        std::string display = check.at("name").get<std::string>();
        if (check.contains("functional")) {
            const auto& ref = check.at("functional");
            display += "[" + (ref.is_string()
                                  ? ref.get<std::string>()
                                  : ctx.labels.at(ref.get<std::size_t>())) +
                       "]";
        }
        verdict.name = display;
        report.verdicts.push_back(std::move(verdict));
    }
    for (const auto& v : report.verdicts) ++report.summary[to_string(v.outcome)];
    return report;
}

}  // namespace lawvar
