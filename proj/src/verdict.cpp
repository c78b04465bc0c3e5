#include "lawvar/verdict.hpp"

#include <limits>

namespace lawvar {

std::string to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::Pass: return "Pass";
        case Outcome::Fail: return "Fail";
        case Outcome::CollapseToMean: return "CollapseToMean";
        case Outcome::CollapseThroughMean: return "CollapseThroughMean";
        case Outcome::NoAffineDirection: return "NoAffineDirection";
        case Outcome::Inconsistent: return "Inconsistent";
        case Outcome::Refused: return "Refused";
    }
    throw std::logic_error("unknown outcome");
}

Outcome outcome_from_string(const std::string& s) {
    if (s == "Pass") return Outcome::Pass;
    if (s == "Fail") return Outcome::Fail;
    if (s == "CollapseToMean") return Outcome::CollapseToMean;
    if (s == "CollapseThroughMean") return Outcome::CollapseThroughMean;
    if (s == "NoAffineDirection") return Outcome::NoAffineDirection;
    if (s == "Inconsistent") return Outcome::Inconsistent;
    if (s == "Refused") return Outcome::Refused;
    throw std::invalid_argument("unknown outcome '" + s + "'");
}

void to_json(nlohmann::json& j, const Verdict& v) {
    j = nlohmann::json{
        {"name", v.name},           {"outcome", to_string(v.outcome)},
        {"witness", v.witness},     {"details", v.details},
        {"max_residual", v.max_residual}, {"trials", v.trials},
        {"seed", v.seed},
    };
}

nlohmann::json ext_to_json(double v) {
    if (v == std::numeric_limits<double>::infinity()) return nlohmann::json("inf");
    return nlohmann::json(v);
}

void from_json(const nlohmann::json& j, Verdict& v) {
    v.name = j.at("name").get<std::string>();
    v.outcome = outcome_from_string(j.at("outcome").get<std::string>());
    v.witness = j.at("witness");
    v.details = j.at("details");
    v.max_residual = j.at("max_residual").get<double>();
    v.trials = j.at("trials").get<long long>();
    v.seed = j.at("seed").get<std::uint64_t>();
}

}  // namespace lawvar
