#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace falsify::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kRuntimeAbort = 3 };

// Command-line values that shadow the campaign file.
struct RunOverrides {
  std::optional<std::size_t> workers;
  std::optional<double> delay;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> budget_samples;
  std::optional<double> budget_seconds;
  std::optional<std::string> sampler;
  std::optional<std::string> output;
  bool dump_trajectories = false;
};

int cmd_run(const std::filesystem::path& config_path, const RunOverrides& overrides, std::ostream& out,
            std::ostream& err);

// Prints the stats document and writes report.json and scatter.csv into the run directory.
int cmd_report(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err);

// Metrics of run `a` relative to run `b`.
int cmd_compare(const std::filesystem::path& a, const std::filesystem::path& b, std::ostream& out,
                std::ostream& err);

// Catalog listing, or an example campaign document for `example`.
int cmd_scenarios(const std::optional<std::string>& example, bool as_json, std::ostream& out, std::ostream& err);

int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace falsify::cli
