#pragma once

// Experiment runners behind the command-line tool. Each takes a fully
// populated parameter object, so a manifest's "params" field replays a run.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace hardedge::cli {

using json = nlohmann::ordered_json;

/// Exit statuses of the tool.
enum ExitCode : int { kOk = 0, kCheckFailure = 1, kParameterError = 2, kIoError = 3 };

struct RunContext {
    std::filesystem::path out;
    std::string command_line;
};

/// beta as given on the command line: a positive number or "inf".
double parse_beta(const std::string& text);

json ensemble_defaults();
json sbo_defaults();
json riccati_cdf_defaults();
json transition_defaults();
json validate_defaults();

int run_ensemble(const json& params, const RunContext& ctx);
int run_sbo(const json& params, const RunContext& ctx);
int run_riccati_cdf(const json& params, const RunContext& ctx);
int run_transition(const json& params, const RunContext& ctx);
int run_validate(const json& params, const RunContext& ctx);

/// Dispatches on the manifest's subcommand with its recorded parameters.
int replay(const std::filesystem::path& manifest, const RunContext& ctx);

/// Decimal text with 17 significant digits.
std::string format_number(double x);

}  // namespace hardedge::cli
