#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lawvar/space.hpp"
#include "lawvar/tolerances.hpp"
#include "lawvar/verdict.hpp"

namespace lawvar {

inline constexpr const char* kVersion = "lawvar 0.1.0";

/// Parsed verification manifest: a sample space, a list of functional
/// specs, and a list of named checks with parameters.  Every check name is
/// validated at parse time; vectors are validated against the space.
struct Manifest {
    SampleSpace space{2};
    std::optional<std::uint64_t> seed;
    std::vector<nlohmann::json> functional_specs;
    std::vector<nlohmann::json> checks;
    Tolerances tolerances;

    static Manifest parse(const nlohmann::json& j);
};

/// Ordered verdicts plus summary counts.  The timestamp is null unless the
/// caller stamps it explicitly, so identical inputs serialize to identical
/// bytes.
struct Report {
    std::vector<Verdict> verdicts;
    std::map<std::string, long long> summary;
    std::string version = kVersion;
    std::uint64_t seed = 0;
    nlohmann::json timestamp;  // null by default

    /// 0 when no verdict is Fail or Inconsistent, else 1.
    int exit_code() const;
    std::string to_markdown() const;

    bool operator==(const Report&) const = default;
};

void to_json(nlohmann::json& j, const Report& r);
void from_json(const nlohmann::json& j, Report& r);

/// Runs every check in manifest order with per-check seeds derived from
/// `seed`.  Precondition failures become Refused verdicts; they never
/// affect the exit code.
Report run_manifest(const Manifest& manifest, std::uint64_t seed);

}  // namespace lawvar
