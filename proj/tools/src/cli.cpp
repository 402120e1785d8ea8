#include "falsify/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "falsify/analysis.hpp"
#include "falsify/campaign_io.hpp"
#include "falsify/errors.hpp"
#include "falsify/orchestrator.hpp"

namespace falsify::cli {

using nlohmann::json;

namespace {

void apply(const RunOverrides& o, CampaignFile& file) {
  auto& c = file.config;
  if (o.workers) c.workers = *o.workers;
  if (o.delay) c.delay = *o.delay;
  if (o.seed) {
    c.seed = *o.seed;
    c.sampler.seed = *o.seed;
  }
  if (o.budget_samples) c.budget.max_samples = *o.budget_samples;
  if (o.budget_seconds) c.budget.max_wall_seconds = *o.budget_seconds;
  if (o.sampler) {
    auto kind = sampler_kind_from_string(*o.sampler);
    if (!kind) throw ConfigError("unknown sampler '" + *o.sampler + "'");
    c.sampler.kind = *kind;
  }
  if (o.output) file.output_dir = *o.output;
  if (o.dump_trajectories) {
    if (c.landscape) throw ConfigError("landscape campaigns produce no trajectories");
    c.keep_trajectories = true;
  }
  c.validate();
}

struct RunView {
  RunArtifacts run;
  CampaignStats stats;
  bool has_ci = false;
};

RunView load_view(const std::filesystem::path& dir) {
  RunView v{read_run(dir), {}, false};
  const auto& c = v.run.campaign.config;
  if (v.run.records.empty()) throw ConfigError("run directory " + dir.string() + " holds no completed samples");
  v.stats = coverage_stats(v.run.records, c.space.size(), c.space.bucket_count(),
                           v.run.summary.value("maximal", json::array()).size());
  v.has_ci = !is_adaptive(c.sampler.kind);
  return v;
}

json stats_json(const RunView& v) {
  json doc = to_json(v.stats, v.has_ci);
  doc["sampler"] = to_string(v.run.campaign.config.sampler.kind);
  doc["workers"] = v.run.campaign.config.workers;
  doc["wall_seconds"] = v.run.summary["totals"].value("wall_seconds", 0.0);
  return doc;
}

}  // namespace

int cmd_run(const std::filesystem::path& config_path, const RunOverrides& overrides, std::ostream& out,
            std::ostream& err) {
  std::optional<CampaignFile> loaded;
  std::unique_ptr<SimulationTarget> target;
  try {
    loaded = load_campaign(config_path);
    apply(overrides, *loaded);
    target = make_target(loaded->config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  const CampaignFile& file = *loaded;
  const std::filesystem::path dir = file.output_dir;
  try {
    const CampaignResult result = run_campaign(file.config, *target);
    write_run(dir, file, result);
    out << "samples " << result.totals.completed << ", counterexamples " << result.totals.counterexamples
        << ", failed " << result.totals.failed << ", wall " << std::fixed << std::setprecision(2)
        << result.totals.wall_seconds << " s -> " << dir.string() << '\n';
    return kOk;
  } catch (const CampaignAborted& e) {
    err << "campaign aborted: " << e.what() << '\n';
    try {
      write_run(dir, file, e.partial());
      err << "partial results written to " << dir.string() << '\n';
    } catch (const std::exception& w) {
      err << "could not write partial results: " << w.what() << '\n';
    }
    return kRuntimeAbort;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kRuntimeAbort;
  }
}

int cmd_report(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err) {
  std::optional<RunView> loaded;
  try {
    loaded = load_view(run_dir);
  } catch (const std::exception& e) {
    err << "report: " << e.what() << '\n';
    return kConfigError;
  }
  const RunView& v = *loaded;
  const json doc = stats_json(v);
  try {
    std::ofstream(run_dir / "report.json") << doc.dump(2) << '\n';
    std::ofstream csv(run_dir / "scatter.csv");
    csv.precision(17);
    const auto& space = v.run.campaign.config.space;
    csv << "id";
    for (const auto& d : space.dimensions()) csv << ',' << d.name;
    csv << ",counterexample,falsified\n";
    for (const auto& r : v.run.records) {
      csv << r.id;
      for (double x : r.sample.values) csv << ',' << x;
      csv << ',' << (r.counterexample ? 1 : 0) << ',' << r.b.to_string() << '\n';
    }
  } catch (const std::exception& e) {
    err << "report: " << e.what() << '\n';
    return kRuntimeAbort;
  }
  out << doc.dump(2) << '\n';
  return kOk;
}

int cmd_compare(const std::filesystem::path& a, const std::filesystem::path& b, std::ostream& out,
                std::ostream& err) {
  std::optional<RunView> la, lb;
  try {
    la = load_view(a);
    lb = load_view(b);
  } catch (const std::exception& e) {
    err << "compare: " << e.what() << '\n';
    return kConfigError;
  }
  const RunView& va = *la;
  const RunView& vb = *lb;
  const auto& ca = va.run.campaign.config;
  const auto& cb = vb.run.campaign.config;
  if (va.run.summary.value("scenario", "") != vb.run.summary.value("scenario", "") ||
      metric_names(ca) != metric_names(cb)) {
    err << "compare: runs cover different scenarios or specifications\n";
    return kConfigError;
  }
  if (!(ca.space == cb.space)) {
    err << "compare: runs use different feature spaces\n";
    return kConfigError;
  }
  json doc;
  doc["a"] = stats_json(va);
  doc["b"] = stats_json(vb);
  doc["a"]["run"] = a.string();
  doc["b"]["run"] = b.string();
  doc["speedup_factor"] = speedup_factor(va.stats.samples, vb.stats.samples);
  if (va.has_ci && vb.has_ci && vb.stats.ci.width() > 0.0) {
    doc["ci_width_ratio"] = ci_width_ratio(va.stats, vb.stats);
  } else {
    doc["ci_width_ratio"] = nullptr;
  }
  doc["counterexamples"] = {{"a", va.stats.counterexamples}, {"b", vb.stats.counterexamples}};
  doc["diversity"] = {{"a", va.stats.distinct_combinations}, {"b", vb.stats.distinct_combinations}};
  if (ca.budget != cb.budget) doc["note"] = "runs used different budgets";
  out << doc.dump(2) << '\n';
  return kOk;
}

int cmd_scenarios(const std::optional<std::string>& example, bool as_json, std::ostream& out, std::ostream& err) {
  try {
    if (example) {
      out << example_campaign(*example).dump(2) << '\n';
      return kOk;
    }
    const auto catalog = list_scenarios();
    if (as_json) {
      json doc = json::array();
      for (const auto& s : catalog) {
        json params = json::array();
        for (const auto& p : s.parameters) {
          params.push_back({{"name", p.name}, {"lo", p.lo}, {"hi", p.hi}, {"description", p.description}});
        }
        json agents = json::array();
        for (const auto& ag : s.agents) agents.push_back(ag.name);
        doc.push_back({{"id", s.id}, {"description", s.description}, {"parameters", params}, {"agents", agents}});
      }
      out << doc.dump(2) << '\n';
      return kOk;
    }
    for (const auto& s : catalog) {
      out << s.id << ": " << s.description << '\n';
      if (s.id == "intersection") {
        out << "    ego_speed and, per adversary k, advk_arm advk_distance advk_speed advk_maneuver\n";
        continue;
      }
      for (const auto& p : s.parameters) {
        out << "    " << std::left << std::setw(20) << p.name << " [" << p.lo << ", " << p.hi << "]  "
            << p.description << '\n';
      }
    }
    out << "landscapes:";
    for (const auto& l : landscape_names()) out << ' ' << l;
    out << '\n';
    return kOk;
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kConfigError;
  }
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parallel, rulebook-guided falsification of driving scenarios"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a falsification campaign");
  std::string config_path;
  RunOverrides o;
  run->add_option("config", config_path, "campaign file (JSON)")->required();
  run->add_option("--workers", o.workers, "parallel simulation workers");
  run->add_option("--delay", o.delay, "seconds added to every simulation");
  run->add_option("--seed", o.seed, "master seed");
  run->add_option("--budget-samples", o.budget_samples, "sample budget");
  run->add_option("--budget-seconds", o.budget_seconds, "wall-clock budget in seconds");
  run->add_option("--sampler", o.sampler, "uniform, halton, cross-entropy or mab");
  run->add_option("--output", o.output, "output directory");
  run->add_flag("--dump-trajectories", o.dump_trajectories, "write per-frame agent states");

  auto* report = app.add_subcommand("report", "Summarize a finished run");
  std::string report_dir;
  report->add_option("run_dir", report_dir, "run output directory")->required();

  auto* compare = app.add_subcommand("compare", "Compare two runs (a relative to b)");
  std::string dir_a, dir_b;
  compare->add_option("run_a", dir_a)->required();
  compare->add_option("run_b", dir_b)->required();

  auto* scenarios = app.add_subcommand("scenarios", "List the scenario catalog");
  std::optional<std::string> example;
  bool as_json = false;
  scenarios->add_option("--example", example, "print an example campaign for a scenario or landscape id");
  scenarios->add_flag("--json", as_json, "machine-readable catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kConfigError;
  }

  if (run->parsed()) return cmd_run(config_path, o, out, err);
  if (report->parsed()) return cmd_report(report_dir, out, err);
  if (compare->parsed()) return cmd_compare(dir_a, dir_b, out, err);
  return cmd_scenarios(example, as_json, out, err);
}

}  // namespace falsify::cli
