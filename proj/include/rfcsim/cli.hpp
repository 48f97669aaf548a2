#pragma once

#include "rfcsim/scenario.hpp"
#include "rfcsim/sim.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rfcsim {

/// Process exit codes of `rfcsim run`.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitScenario = 2,
    kExitInit = 3,
    kExitIntegration = 4,
    kExitUnstable = 5,
};

struct RunConfig {
    std::string scenario;  ///< case1, case2 or a file path
    std::optional<double> dt;
    std::optional<double> t_end;
    std::vector<std::pair<std::string, std::string>> overrides;
    std::filesystem::path out_dir = "out";
    bool emit_plots = false;
    bool dump_ybus = false;
};

/// Split "key=value"; throws ScenarioError if there is no '='.
std::pair<std::string, std::string> split_override(const std::string& kv);

/// Resolve the scenario with all overrides applied and validated.
Scenario resolve_scenario(const RunConfig& cfg);

/// Metric rows written to summary.csv.
std::vector<std::pair<std::string, std::string>> summarize(const Scenario& s, const RunResult& r);

/// gnuplot script plotting the standard figure set from timeseries.csv.
std::string plot_script(const Scenario& s, const TimeSeries& ts);

/// Load, initialize, run, analyze and write outputs. Diagnostics go to `err`.
int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace rfcsim
