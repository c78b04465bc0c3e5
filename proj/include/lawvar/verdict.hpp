#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace lawvar {

/// Outcome of a property check.  CollapseToMean / CollapseThroughMean /
/// NoAffineDirection are the classifications produced by the collapse
/// engine; Inconsistent marks a premise-vs-conclusion conflict that should
/// be unreachable for correctly claimed functionals.  Refused records a
/// precondition failure when a check is wrapped by the report runner.
enum class Outcome {
    Pass,
    Fail,
    CollapseToMean,
    CollapseThroughMean,
    NoAffineDirection,
    Inconsistent,
    Refused,
};

std::string to_string(Outcome outcome);
Outcome outcome_from_string(const std::string& s);

/// Result record of one check.  Fail and Inconsistent always carry a
/// witness that reproduces the violation standalone; `details` holds
/// auxiliary values (fitted slopes, dichotomy alternatives, minimum
/// spreads) on any outcome.
struct Verdict {
    std::string name;
    Outcome outcome = Outcome::Pass;
    nlohmann::json witness;  // null when absent
    nlohmann::json details;  // null when absent
    double max_residual = 0.0;
    long long trials = 0;
    std::uint64_t seed = 0;

    bool failed() const { return outcome == Outcome::Fail || outcome == Outcome::Inconsistent; }

    bool operator==(const Verdict&) const = default;
};

void to_json(nlohmann::json& j, const Verdict& v);
void from_json(const nlohmann::json& j, Verdict& v);

/// JSON-safe encoding of an extended real: finite values stay numbers,
/// +infinity becomes the string "inf".
nlohmann::json ext_to_json(double v);

/// Thrown when a check's stated preconditions do not hold; the check is
/// refused rather than reported as Fail.  Carries an optional structured
/// note (e.g. the evaluation that broke the precondition).
class PreconditionError : public std::runtime_error {
  public:
    explicit PreconditionError(const std::string& what, nlohmann::json note = nullptr)
        : std::runtime_error(what), note_(std::move(note)) {}

    const nlohmann::json& note() const { return note_; }

  private:
    nlohmann::json note_;
};

}  // namespace lawvar
