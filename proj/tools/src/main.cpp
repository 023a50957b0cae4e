// mcdlab: maximum-confidence discrimination analyzer.
//
// Subcommands:
//   analyze <ensemble.json> [--j N] [--tol X] [--seed S] [--json out.json] [--timings]
//   construct --mode single|family <witness.json ...> --out <ensemble.json> [--seed S] [--json out.json]
//   crosscheck <ensemble.json> --j N [--seed S] [--json out.json]
//   sweep <config.json> --out <table.csv> [--seed S] [--timings] [--json out.json]
//
// Exit codes: 0 success, 2 input validation, 3 solver stall, 4 internal error.

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

int finish(const mcdlab::tool::CommandResult& r, const std::string& json_path) {
    std::cout << r.human;
    if (!json_path.empty()) {
        std::ofstream out(json_path, std::ios::binary);
        if (!out) {
            std::cout << "error (validation): cannot open output file: " << json_path << "\n";
            return mcdlab::tool::kExitValidation;
        }
        out << r.report.dump(2) << "\n";
    }
    return r.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"maximum-confidence discrimination of multipartite state ensembles"};
    app.require_subcommand(1);

    // analyze
    std::string an_file, an_json;
    std::optional<int> an_j;
    double an_tol = 1e-9;
    std::optional<std::uint64_t> an_seed;
    bool an_timings = false;
    CLI::App* analyze = app.add_subcommand(
        "analyze", "compute global and separable confidence bounds for an ensemble");
    analyze->add_option("file", an_file, "ensemble JSON file")->required();
    analyze->add_option("--j", an_j, "1-based outcome index (default: all)");
    analyze->add_option("--tol", an_tol, "numeric tolerance");
    analyze->add_option("--seed", an_seed, "RNG seed (overrides MCDLAB_SEED)");
    analyze->add_option("--json", an_json, "write the full JSON report here");
    analyze->add_flag("--timings", an_timings, "include wall-clock timings in the report");

    // construct
    std::vector<std::string> co_files;
    std::string co_mode, co_out, co_json;
    std::optional<std::uint64_t> co_seed;
    CLI::App* construct = app.add_subcommand(
        "construct", "build an ensemble with a provable confidence gap from witnesses");
    construct->add_option("--mode", co_mode, "single or family")
        ->required()
        ->check(CLI::IsMember({"single", "family"}));
    construct->add_option("witnesses", co_files, "witness operator JSON files")->required();
    construct->add_option("--out", co_out, "output ensemble JSON file")->required();
    construct->add_option("--seed", co_seed, "RNG seed (overrides MCDLAB_SEED)");
    construct->add_option("--json", co_json, "write the full JSON report here");

    // crosscheck
    std::string cc_file, cc_json;
    int cc_j = 0;
    std::optional<std::uint64_t> cc_seed;
    CLI::App* crosscheck = app.add_subcommand(
        "crosscheck", "re-derive a confidence gap through minimum-error discrimination");
    crosscheck->add_option("file", cc_file, "ensemble JSON file")->required();
    crosscheck->add_option("--j", cc_j, "1-based outcome index")->required();
    crosscheck->add_option("--seed", cc_seed, "RNG seed (overrides MCDLAB_SEED)");
    crosscheck->add_option("--json", cc_json, "write the full JSON report here");

    // sweep
    std::string sw_config, sw_out, sw_json;
    std::optional<std::uint64_t> sw_seed;
    bool sw_timings = false;
    CLI::App* sweep = app.add_subcommand(
        "sweep", "analyze a batch of random ensembles and write a CSV table");
    sweep->add_option("config", sw_config, "sweep configuration JSON file")->required();
    sweep->add_option("--out", sw_out, "output CSV file")->required();
    sweep->add_option("--seed", sw_seed, "RNG seed (overrides config and MCDLAB_SEED)");
    sweep->add_flag("--timings", sw_timings, "append a per-row wall-clock column");
    sweep->add_option("--json", sw_json, "write a JSON summary here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e); // prints help or the error message
        return code == 0 ? 0 : mcdlab::tool::kExitValidation;
    }

    try {
        using namespace mcdlab::tool;
        if (*analyze)
            return finish(run_analyze(an_file, an_j, an_tol, resolve_seed(an_seed), an_timings),
                          an_json);
        if (*construct)
            return finish(run_construct(co_files, co_mode, co_out, resolve_seed(co_seed)),
                          co_json);
        if (*crosscheck)
            return finish(run_crosscheck(cc_file, cc_j, resolve_seed(cc_seed)), cc_json);
        if (*sweep) return finish(run_sweep(sw_config, sw_out, sw_seed, sw_timings), sw_json);
        return kExitValidation;
    } catch (const std::exception& e) {
        mcdlab::tool::CommandResult r = mcdlab::tool::error_result(e);
        std::cout << r.human;
        return r.exit_code;
    }
}
