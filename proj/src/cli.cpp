#include "lawvar/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lawvar/collapse.hpp"
#include "lawvar/duality.hpp"
#include "lawvar/manifest.hpp"
#include "lawvar/orbit.hpp"
#include "lawvar/quantile.hpp"

namespace lawvar {

namespace {

constexpr std::uint64_t kDefaultSeed = 1729;

nlohmann::json parse_json_arg(const std::string& text, const char* what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("could not parse ") + what + ": " + e.what());
    }
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("could not open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("could not parse '" + path + "': " + e.what());
    }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag,
                           const std::optional<std::uint64_t>& manifest_seed) {
    if (flag) return *flag;
    if (manifest_seed) return *manifest_seed;
    if (const char* env = std::getenv("LAWVAR_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return kDefaultSeed;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("could not write '" + path + "'");
    out << content;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"verification toolkit for law-invariant convex functionals on finite uniform spaces"};
    app.require_subcommand(1);

    // bounds
    auto* bounds_cmd = app.add_subcommand("bounds", "rearrangement endpoints of E[X'Y]");
    std::string bounds_x, bounds_y;
    bounds_cmd->add_option("--x", bounds_x, "JSON array for X")->required();
    bounds_cmd->add_option("--y", bounds_y, "JSON array for Y")->required();

    // choquet
    auto* choquet_cmd = app.add_subcommand("choquet", "evaluate a Choquet integral");
    std::string choquet_x, choquet_distortion, choquet_capacity;
    choquet_cmd->add_option("--x", choquet_x, "JSON array for X")->required();
    choquet_cmd->add_option("--distortion", choquet_distortion, "distortion JSON");
    choquet_cmd->add_option("--capacity", choquet_capacity, "capacity JSON");

    // orbit-rank
    auto* orbit_cmd = app.add_subcommand("orbit-rank", "span dimension of a permutation orbit");
    std::string orbit_z;
    orbit_cmd->add_option("--z", orbit_z, "JSON array for Z")->required();

    // conjugate
    auto* conj_cmd = app.add_subcommand("conjugate", "dual functional value at Y");
    std::string conj_spec, conj_y, conj_method = "closed_form";
    std::optional<std::uint64_t> conj_seed;
    conj_cmd->add_option("--functional", conj_spec, "functional spec JSON")->required();
    conj_cmd->add_option("--y", conj_y, "JSON array for Y")->required();
    conj_cmd->add_option("--method", conj_method, "closed_form or ascent")
        ->check(CLI::IsMember({"closed_form", "ascent"}));
    conj_cmd->add_option("--seed", conj_seed, "seed for ascent starts");

    // collapse-scan
    auto* scan_cmd = app.add_subcommand("collapse-scan", "collapse classification for one spec");
    std::string scan_spec, scan_z, scan_distortion, scan_capacity;
    int scan_trials = 1000;
    std::optional<std::uint64_t> scan_seed;
    scan_cmd->add_option("--functional", scan_spec, "functional spec JSON");
    scan_cmd->add_option("--z", scan_z, "direction JSON array (with --functional)");
    scan_cmd->add_option("--distortion", scan_distortion, "distortion JSON (Choquet scan)");
    scan_cmd->add_option("--capacity", scan_capacity, "capacity JSON (Choquet scan)");
    scan_cmd->add_option("--trials", scan_trials, "scan trials");
    scan_cmd->add_option("--seed", scan_seed, "seed");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "run a manifest of checks");
    std::string verify_manifest, verify_md;
    std::optional<std::uint64_t> verify_seed;
    verify_cmd->add_option("--manifest", verify_manifest, "manifest JSON file")->required();
    verify_cmd->add_option("--seed", verify_seed, "seed override");
    verify_cmd->add_option("--md", verify_md, "also write a markdown summary to this path");

    // report
    auto* report_cmd = app.add_subcommand("report", "re-emit a report as markdown");
    std::string report_in, report_md;
    report_cmd->add_option("--in", report_in, "report JSON file")->required();
    report_cmd->add_option("--md", report_md, "write markdown to this path instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*bounds_cmd) {
            RandomVariable x = random_variable_from_json(parse_json_arg(bounds_x, "--x"));
            RandomVariable y = random_variable_from_json(parse_json_arg(bounds_y, "--y"));
            auto [lo, hi] = rearrangement_bounds(x, y);
            out << nlohmann::json{{"lo", lo}, {"hi", hi}}.dump() << "\n";
            return 0;
        }
        if (*choquet_cmd) {
            RandomVariable x = random_variable_from_json(parse_json_arg(choquet_x, "--x"));
            double value;
            if (!choquet_distortion.empty() == !choquet_capacity.empty()) {
                throw std::invalid_argument("choquet needs exactly one of --distortion/--capacity");
            }
            if (!choquet_distortion.empty()) {
                value = choquet_integral(
                    distortion_from_json(parse_json_arg(choquet_distortion, "--distortion")), x);
            } else {
                Capacity c = capacity_from_json(parse_json_arg(choquet_capacity, "--capacity"));
                value = choquet_integral(c, x);
            }
            out << nlohmann::json{{"value", value}}.dump() << "\n";
            return 0;
        }
        if (*orbit_cmd) {
            RandomVariable z = random_variable_from_json(parse_json_arg(orbit_z, "--z"));
            nlohmann::json j = orbit_span_dimension(z);
            out << j.dump() << "\n";
            return 0;
        }
        if (*conj_cmd) {
            RandomVariable y = random_variable_from_json(parse_json_arg(conj_y, "--y"));
            Functional phi =
                functional_from_spec(parse_json_arg(conj_spec, "--functional"), y.space());
            ConjugateResult result =
                conjugate(phi, y,
                          conj_method == "ascent" ? ConjugateMethod::Ascent
                                                  : ConjugateMethod::ClosedForm,
                          conj_seed.value_or(kDefaultSeed));
            nlohmann::json j = result;
            out << j.dump() << "\n";
            return 0;
        }
        if (*scan_cmd) {
            std::uint64_t seed = resolve_seed(scan_seed, std::nullopt);
            Verdict verdict;
            if (!scan_spec.empty()) {
                if (scan_z.empty()) {
                    throw std::invalid_argument("collapse-scan with --functional needs --z");
                }
                RandomVariable z = random_variable_from_json(parse_json_arg(scan_z, "--z"));
                Functional phi =
                    functional_from_spec(parse_json_arg(scan_spec, "--functional"), z.space());
                verdict = collapse_verdict(phi, z, scan_trials, seed);
            } else if (!scan_distortion.empty()) {
                nlohmann::json dj = parse_json_arg(scan_distortion, "--distortion");
                if (scan_z.empty()) {
                    throw std::invalid_argument(
                        "collapse-scan with --distortion needs --z for the atom count");
                }
                RandomVariable z = random_variable_from_json(parse_json_arg(scan_z, "--z"));
                verdict = choquet_collapse_scan(distortion_from_json(dj), z.space(), scan_trials,
                                                seed);
            } else if (!scan_capacity.empty()) {
                Capacity c = capacity_from_json(parse_json_arg(scan_capacity, "--capacity"));
                verdict = choquet_collapse_scan(c, scan_trials, seed);
            } else {
                throw std::invalid_argument(
                    "collapse-scan needs --functional, --distortion or --capacity");
            }
            nlohmann::json j = verdict;
            out << j.dump() << "\n";
            return verdict.failed() ? 1 : 0;
        }
        if (*verify_cmd) {
            Manifest manifest = Manifest::parse(load_json_file(verify_manifest));
            std::uint64_t seed = resolve_seed(verify_seed, manifest.seed);
            Report report = run_manifest(manifest, seed);
            nlohmann::json j = report;
            out << j.dump(2) << "\n";
            if (!verify_md.empty()) write_file(verify_md, report.to_markdown());
            return report.exit_code();
        }
        if (*report_cmd) {
            Report report = load_json_file(report_in).get<Report>();
            if (report_md.empty()) {
                out << report.to_markdown();
            } else {
                write_file(report_md, report.to_markdown());
            }
            return report.exit_code();
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << "error: no subcommand\n";
    return 2;
}

}  // namespace lawvar
