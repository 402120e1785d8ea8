#include <fstream>
#include <iomanip>
#include <iostream>
#include <regex>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "falsify/experiments.hpp"

using nlohmann::json;
namespace fb = falsify::bench;

namespace {

std::vector<json> load_suite(const std::filesystem::path& dir, const std::string& pattern) {
  const std::regex re(pattern.empty() ? std::string(".*") : pattern);
  std::vector<json> out;
  for (const auto& path : fb::experiment_files(dir)) {
    std::ifstream in(path);
    json ex = json::parse(in);
    if (std::regex_search(ex.value("name", path.stem().string()), re)) out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiment suite for the falsification framework"};
  app.require_subcommand(1);
  std::string config_dir = FALSIFY_BENCH_CONFIG_DIR;
  app.add_option("--configs", config_dir, "directory of experiment files");

  auto* run = app.add_subcommand("run", "Run experiments whose name matches the pattern");
  std::string pattern;
  std::string report_path = "bench-report.json";
  std::string scratch = "bench-scratch";
  run->add_option("pattern", pattern, "regular expression over experiment names");
  run->add_option("--report", report_path, "JSON report path");
  run->add_option("--scratch", scratch, "directory for intermediate run artifacts");

  auto* list = app.add_subcommand("list", "List experiments");
  CLI11_PARSE(app, argc, argv);

  std::vector<json> suite;
  try {
    suite = load_suite(config_dir, pattern);
  } catch (const std::exception& e) {
    std::cerr << "cannot load experiments from " << config_dir << ": " << e.what() << '\n';
    return 2;
  }

  if (list->parsed()) {
    for (const auto& ex : suite) {
      std::cout << std::left << std::setw(22) << ex.value("name", "?") << ex.value("description", "") << '\n';
    }
    return 0;
  }
  if (suite.empty()) {
    std::cerr << "no experiment matches '" << pattern << "'\n";
    return 2;
  }

  json report = json::array();
  bool all_passed = true;
  for (const auto& ex : suite) {
    std::cout << "running " << ex.value("name", "?") << " ..." << std::endl;
    const auto outcome = fb::run_experiment(ex, std::filesystem::path(scratch) / ex.value("name", "run"));
    all_passed = all_passed && outcome.passed;
    report.push_back(fb::to_json(outcome));
    std::ofstream(report_path) << report.dump(2) << '\n';
  }

  std::cout << '\n' << std::left << std::setw(22) << "experiment" << std::setw(8) << "result" << std::setw(10)
            << "seconds" << "assertions\n";
  for (const auto& r : report) {
    std::cout << std::setw(22) << r["name"].get<std::string>() << std::setw(8)
              << (r["passed"].get<bool>() ? "PASS" : "FAIL") << std::setw(10) << std::fixed << std::setprecision(1)
              << r["seconds"].get<double>();
    bool first = true;
    for (const auto& a : r["assertions"]) {
      if (!first) std::cout << '\n' << std::string(40, ' ');
      first = false;
      std::cout << (a["passed"].get<bool>() ? "ok   " : "FAIL ") << a["assertion"].get<std::string>();
    }
    if (r.contains("error")) std::cout << (first ? "" : "\n" + std::string(40, ' ')) << "error: " << r["error"];
    std::cout << '\n';
  }
  std::cout << "\nreport written to " << report_path << '\n';
  return all_passed ? 0 : 1;
}
