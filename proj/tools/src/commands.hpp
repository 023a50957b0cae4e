#ifndef MCDLAB_TOOLS_COMMANDS_HPP
#define MCDLAB_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcdlab/confidence.hpp"

namespace mcdlab::tool {

// Stable exit-code contract shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitStall = 3;
inline constexpr int kExitInternal = 4;

// Round to 12 significant digits; every number leaving the tool goes
// through this so reruns with identical inputs emit identical bytes.
double sig12(double x);
std::string format12(double x);

// Seed precedence: explicit flag, then MCDLAB_SEED, then 0.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& cli_seed);

// Dense operator serialization shared with the ensemble file schema.
nlohmann::json matrix_json(const HermitianOperator& h);
nlohmann::json vector_json(const VectorXcd& v);
nlohmann::json verdict_json(const ConeVerdict& v);

struct CommandResult {
    int exit_code = kExitOk;
    nlohmann::json report;
    std::string human; // terminal summary, already formatted
};

CommandResult run_analyze(const std::string& path, std::optional<int> j_one_based, double tol,
                          std::uint64_t seed, bool timings);

CommandResult run_construct(const std::vector<std::string>& witness_paths,
                            const std::string& mode, const std::string& out_path,
                            std::uint64_t seed);

CommandResult run_crosscheck(const std::string& path, int j_one_based, std::uint64_t seed);

CommandResult run_sweep(const std::string& config_path, const std::string& out_csv,
                        std::optional<std::uint64_t> cli_seed, bool timings);

// Maps an escaped exception onto the exit-code contract and a JSON error
// object {"error": {"kind": ..., "message": ...}}.
CommandResult error_result(const std::exception& e);

} // namespace mcdlab::tool

#endif
