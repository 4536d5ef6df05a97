#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "signalflow/equilibrium.hpp"
#include "signalflow/values.hpp"

namespace signalflow::cli {

using json = nlohmann::json;

const char* version();

struct CommandOptions {
  std::string out_dir;          // empty: config output.dir, then "."
  std::string format = "json";  // export only: csv | json
  std::optional<std::uint64_t> seed;
  bool write_files = true;
  std::ostream* log = nullptr;  // human-readable summary, may be null
};

struct CommandResult {
  int exit_code = 0;
  json artifact;
  std::vector<std::string> files;
};

// What solve produced for the configured profile or search.
struct Solved {
  std::shared_ptr<ValueFunction> values;
  std::optional<SwitchedSolution> switched;
  std::optional<SearchResult> search;
  std::optional<ConstructionFailure> failure;
  StrategyProfile profile;
};

Solved solve_config(const RunConfig& cfg);

CommandResult cmd_solve(const RunConfig& cfg, const CommandOptions& opt = {});
CommandResult cmd_verify(const RunConfig& cfg, const CommandOptions& opt = {});
CommandResult cmd_simulate(const RunConfig& cfg, const CommandOptions& opt = {});
CommandResult cmd_discrete(const RunConfig& cfg, const CommandOptions& opt = {});
CommandResult cmd_sweep(const RunConfig& cfg, const CommandOptions& opt = {});
CommandResult cmd_export(const RunConfig& cfg, const CommandOptions& opt = {});

// Plot grid: uniform in l plus the solver nodes.
std::vector<double> export_grid(const ValueFunction& vf);
void write_values_csv(std::ostream& out, const ValueFunction& vf, const std::vector<double>& grid);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(std::istream& in);

json report_json(const EquilibriumReport& r);
json number(double x);

int run(int argc, char** argv);

}  // namespace signalflow::cli
