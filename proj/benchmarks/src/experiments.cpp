#include "falsify/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "falsify/analysis.hpp"
#include "falsify/errors.hpp"
#include "falsify/random.hpp"

namespace falsify::bench {

using nlohmann::json;

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

CampaignFile patched(const json& base, const json& patch) {
  json doc = base;
  doc.merge_patch(patch);
  return parse_campaign(doc);
}

Evaluation FlakyTarget::run(const SampleVector& sample) const {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (double v : sample.values) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    h = mix64(h ^ bits);
  }
  if (static_cast<double>(h >> 11) * 0x1.0p-53 < rate_) throw DomainError("injected simulator failure");
  return inner_.run(sample);
}

std::vector<std::string> mab_invariant_violations(const SamplerSnapshot& snap, const Rulebook& rulebook) {
  std::vector<std::string> out;
  const auto& T = snap.visits;
  for (std::size_t i = 0; i < T.rows(); ++i) {
    std::uint64_t sum = 0;
    for (auto v : T.row(i)) sum += v;
    if (sum != snap.completed) {
      out.push_back("dimension " + std::to_string(i) + " visits sum to " + std::to_string(sum) + ", expected " +
                    std::to_string(snap.completed));
    }
  }
  for (std::size_t k = 0; k < snap.counts.size(); ++k) {
    const auto& c = snap.counts[k];
    if (c.rows() != T.rows() || c.cols() != T.cols()) {
      out.push_back("count matrix " + std::to_string(k) + " has the wrong shape");
      continue;
    }
    for (std::size_t i = 0; i < T.rows(); ++i) {
      for (std::size_t j = 0; j < T.cols(); ++j) {
        if (c(i, j) > T(i, j)) {
          out.push_back("count for " + snap.keys[k].to_string() + " exceeds visits at (" + std::to_string(i) + ", " +
                        std::to_string(j) + ")");
        }
      }
    }
  }
  for (std::size_t a = 0; a < snap.keys.size(); ++a) {
    for (std::size_t b = 0; b < snap.keys.size(); ++b) {
      if (a != b && rulebook.strictly_dominates(snap.keys[a], snap.keys[b])) {
        out.push_back("key " + snap.keys[a].to_string() + " strictly dominates " + snap.keys[b].to_string());
      }
    }
  }
  return out;
}

namespace {

CampaignResult run_config(const CampaignConfig& c) {
  auto target = make_target(c);
  return run_campaign(c, *target);
}

CampaignConfig with_seed(CampaignConfig c, std::uint64_t seed) {
  c.seed = seed;
  c.sampler.seed = seed;
  return c;
}

}  // namespace

SpeedupMeasure measure_speedup(const CampaignFile& base, std::size_t workers) {
  CampaignConfig serial = base.config;
  serial.workers = 1;
  CampaignConfig parallel = base.config;
  parallel.workers = workers;
  SpeedupMeasure m;
  m.serial = run_config(serial).totals.completed;
  m.parallel = run_config(parallel).totals.completed;
  m.ratio = speedup_factor(m.parallel, m.serial);
  return m;
}

std::vector<CiRow> measure_ci_table(const json& base, const std::vector<std::string>& scenarios,
                                    std::size_t workers) {
  std::vector<CiRow> rows;
  for (const auto& id : scenarios) {
    json doc = base;
    doc["scenario"] = {{"id", id}};
    doc.erase("feature_space");
    doc.erase("spec");
    doc.erase("rulebook");
    CampaignConfig c = parse_campaign(doc).config;
    c.workers = 1;
    const auto serial = coverage_stats(run_config(c));
    c.workers = workers;
    const auto parallel = coverage_stats(run_config(c));
    CiRow r;
    r.scenario = id;
    r.serial = serial.samples;
    r.parallel = parallel.samples;
    r.speedup = speedup_factor(parallel.samples, serial.samples);
    r.width_serial = serial.ci.width();
    r.width_parallel = parallel.ci.width();
    r.width_ratio = ci_width_ratio(parallel, serial);
    rows.push_back(r);
  }
  return rows;
}

double synthetic_width_ratio(double proportion, std::uint64_t n_serial, std::uint64_t factor) {
  auto campaign = [&](std::uint64_t n) {
    const auto k = static_cast<std::uint64_t>(std::llround(proportion * static_cast<double>(n)));
    std::vector<SampleRecord> recs(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      recs[i].id = i;
      recs[i].sample = {{0.5}, {0}};
      recs[i].counterexample = i < k;
      recs[i].b.bits = {i < k};
      recs[i].rho.rho = {i < k ? -1.0 : 1.0};
    }
    return coverage_stats(recs, 1, 1, k > 0 ? 1 : 0);
  };
  return ci_width_ratio(campaign(n_serial * factor), campaign(n_serial));
}

ConcentrationMeasure measure_concentration(const CampaignFile& base, std::size_t seeds, std::size_t dim,
                                           std::size_t bucket) {
  ConcentrationMeasure m;
  const std::size_t n = base.config.space.bucket_count();
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    const auto r = run_config(with_seed(base.config, seed));
    const auto& T = r.final_snapshot.visits;
    const double post = static_cast<double>(r.totals.completed) - static_cast<double>(n);
    if (post <= 0.0) throw DomainError("budget does not exceed the initialization round");
    m.shares.push_back((static_cast<double>(T(dim, bucket)) - 1.0) / post);
  }
  return m;
}

std::vector<BalanceRow> measure_balance(const CampaignFile& base, const std::vector<std::string>& samplers,
                                        std::size_t seeds) {
  std::vector<BalanceRow> rows;
  for (const auto& name : samplers) {
    auto kind = sampler_kind_from_string(name);
    if (!kind) throw ConfigError("unknown sampler '" + name + "'");
    BalanceRow row;
    row.sampler = to_string(*kind);
    for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
      CampaignConfig c = with_seed(base.config, seed);
      c.sampler.kind = *kind;
      const auto st = coverage_stats(run_config(c));
      row.counts.push_back(static_cast<double>(st.counterexamples));
      row.diversity.push_back(static_cast<double>(st.distinct_combinations));
    }
    row.median_count = median(row.counts);
    row.median_diversity = median(row.diversity);
    rows.push_back(std::move(row));
  }
  return rows;
}

const VariantRow& MultiObjectiveMeasure::find(const std::string& rulebook, std::size_t workers) const {
  for (const auto& v : variants) {
    if (v.rulebook == rulebook && v.workers == workers) return v;
  }
  throw ConfigError("no variant " + rulebook + "/" + std::to_string(workers));
}

MultiObjectiveMeasure measure_multi_objective(const json& base, const std::map<std::string, json>& rulebooks,
                                              const std::vector<std::pair<std::string, std::size_t>>& variants,
                                              const json& baseline, std::size_t seeds) {
  MultiObjectiveMeasure m;
  for (const auto& [label, workers] : variants) {
    auto rb = rulebooks.find(label);
    if (rb == rulebooks.end()) throw ConfigError("unknown rulebook label '" + label + "'");
    VariantRow row;
    row.rulebook = label;
    row.workers = workers;
    for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
      const auto file = patched(base, {{"rulebook", rb->second}, {"workers", workers}, {"seed", seed}});
      const auto st = coverage_stats(run_config(file.config));
      row.falsified.push_back(static_cast<double>(st.metrics_falsified));
      row.simultaneous.push_back(static_cast<double>(st.max_simultaneous));
      row.samples.push_back(static_cast<double>(st.samples));
    }
    row.median_falsified = median(row.falsified);
    m.variants.push_back(std::move(row));
  }
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    const auto file = patched(baseline, {{"seed", seed}});
    const auto r = run_config(file.config);
    m.baseline_counterexamples.push_back(r.totals.counterexamples);
    m.baseline_samples = r.totals.completed;
  }
  return m;
}

IntegrityMeasure measure_integrity(const CampaignFile& base, double failure_rate) {
  auto inner = make_target(base.config);
  FlakyTarget target(*inner, failure_rate);
  const auto r = run_parallel(base.config, target);
  IntegrityMeasure m;
  m.totals = r.totals;
  std::vector<std::uint64_t> ids;
  for (const auto& rec : r.records()) ids.push_back(rec.id);
  for (const auto& f : r.failed) ids.push_back(f.id);
  std::sort(ids.begin(), ids.end());
  m.ids_accounted = ids.size() == r.totals.dispatched;
  for (std::size_t i = 0; m.ids_accounted && i < ids.size(); ++i) m.ids_accounted = ids[i] == i;
  m.applied_once = r.final_snapshot.completed == r.totals.completed &&
                   r.records().size() == r.totals.completed;
  if (base.config.sampler.kind == SamplerKind::kMab) {
    m.violations = mab_invariant_violations(r.final_snapshot, base.config.rulebook);
  }
  return m;
}

std::string records_without_timestamps(const std::filesystem::path& run_dir) {
  std::ifstream in(run_dir / "records.jsonl");
  if (!in) throw ConfigError("missing records.jsonl in " + run_dir.string());
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    rec.erase("t_dispatch");
    rec.erase("t_complete");
    rec.erase("sim_seconds");
    out += rec.dump();
    out += '\n';
  }
  return out;
}

DeterminismMeasure measure_determinism(const CampaignFile& base, std::size_t workers,
                                       const std::filesystem::path& scratch) {
  DeterminismMeasure m;
  CampaignFile serial = base;
  serial.config.workers = 1;
  const auto a = scratch / "determinism-a";
  const auto b = scratch / "determinism-b";
  write_run(a, serial, run_config(serial.config));
  write_run(b, serial, run_config(serial.config));
  const auto ra = records_without_timestamps(a);
  m.records_identical = !ra.empty() && ra == records_without_timestamps(b);
  m.records = static_cast<std::size_t>(std::count(ra.begin(), ra.end(), '\n'));

  auto halton_values = [&](std::size_t w) {
    CampaignConfig c = base.config;
    c.sampler.kind = SamplerKind::kHalton;
    c.workers = w;
    std::vector<std::vector<double>> values;
    for (const auto& rec : run_config(c).records()) values.push_back(rec.sample.values);
    std::sort(values.begin(), values.end());
    return values;
  };
  const auto h1 = halton_values(1);
  m.halton_multiset_equal = !h1.empty() && h1 == halton_values(workers);
  return m;
}

std::vector<std::filesystem::path> experiment_files(const std::filesystem::path& config_dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(config_dir)) {
    if (e.path().extension() == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void check(ExperimentOutcome& o, std::string name, bool ok) { o.assertions.emplace_back(std::move(name), ok); }

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

void run_kind(const json& ex, const std::filesystem::path& scratch, ExperimentOutcome& o) {
  const auto& expect = ex.value("expect", json::object());
  json& meas = o.measurements;
  if (o.kind == "speedup") {
    const auto file = parse_campaign(ex.at("campaign"));
    const auto m = measure_speedup(file, ex.at("workers").get<std::size_t>());
    meas = {{"serial", m.serial}, {"parallel", m.parallel}, {"speedup", m.ratio}};
    const double lo = expect.value("min", 3.0), hi = expect.value("max", 5.0);
    check(o, "speedup in [" + fmt(lo) + ", " + fmt(hi) + "]", m.ratio >= lo && m.ratio <= hi);
  } else if (o.kind == "ci-table") {
    const auto rows = measure_ci_table(ex.at("campaign"), ex.at("scenarios").get<std::vector<std::string>>(),
                                       ex.at("workers").get<std::size_t>());
    const double speed_min = expect.value("speedup_min", 3.0);
    const double ratio_max = expect.value("width_ratio_max", 0.7);
    meas = json::array();
    for (const auto& r : rows) {
      meas.push_back({{"scenario", r.scenario},
                      {"serial", r.serial},
                      {"parallel", r.parallel},
                      {"speedup", r.speedup},
                      {"ci_width_serial", r.width_serial},
                      {"ci_width_parallel", r.width_parallel},
                      {"ci_width_ratio", r.width_ratio}});
      check(o, "scenario " + r.scenario + " speedup >= " + fmt(speed_min), r.speedup >= speed_min);
      check(o, "scenario " + r.scenario + " width ratio <= " + fmt(ratio_max), r.width_ratio <= ratio_max);
    }
  } else if (o.kind == "ci-scaling") {
    const double lo = expect.value("min", 0.4), hi = expect.value("max", 0.6);
    meas = json::array();
    for (double p : ex.at("proportions").get<std::vector<double>>()) {
      const double r = synthetic_width_ratio(p, ex.at("serial_samples").get<std::uint64_t>(),
                                             ex.at("factor").get<std::uint64_t>());
      meas.push_back({{"proportion", p}, {"ci_width_ratio", r}});
      check(o, "p=" + fmt(p) + " width ratio in [" + fmt(lo) + ", " + fmt(hi) + "]", r >= lo && r <= hi);
    }
  } else if (o.kind == "concentration") {
    const auto file = parse_campaign(ex.at("campaign"));
    const auto m = measure_concentration(file, ex.at("seeds").get<std::size_t>(), ex.at("dimension").get<std::size_t>(),
                                         ex.at("bucket").get<std::size_t>());
    const double share = expect.value("share", 0.5);
    const auto hits = std::count_if(m.shares.begin(), m.shares.end(), [&](double s) { return s > share; });
    meas = {{"shares", m.shares}, {"seeds_above", hits}};
    check(o, "share > " + fmt(share) + " in >= " + std::to_string(expect.value("min_seeds", 8)) + " seeds",
          hits >= expect.value("min_seeds", 8));
  } else if (o.kind == "sampler-balance") {
    const auto file = parse_campaign(ex.at("campaign"));
    const auto rows = measure_balance(file, {"mab", "cross-entropy", "halton"}, ex.at("seeds").get<std::size_t>());
    meas = json::object();
    for (const auto& r : rows) {
      meas[r.sampler] = {{"median_count", r.median_count},
                         {"median_diversity", r.median_diversity},
                         {"counts", r.counts},
                         {"diversity", r.diversity}};
    }
    const double factor = expect.value("count_ratio", 0.7);
    check(o, "mab count >= " + fmt(factor) + " x cross-entropy count",
          rows[0].median_count >= factor * rows[1].median_count);
    check(o, "mab diversity >= cross-entropy diversity", rows[0].median_diversity >= rows[1].median_diversity);
    check(o, "mab count >= halton count", rows[0].median_count >= rows[2].median_count);
  } else if (o.kind == "multi-objective") {
    std::map<std::string, json> rulebooks = ex.at("rulebooks").get<std::map<std::string, json>>();
    std::vector<std::pair<std::string, std::size_t>> variants;
    const std::size_t workers = ex.at("workers").get<std::size_t>();
    for (const auto& [label, rb] : rulebooks) {
      variants.emplace_back(label, 1);
      if (label != "disconnected") variants.emplace_back(label, workers);
    }
    const auto m =
        measure_multi_objective(ex.at("campaign"), rulebooks, variants, ex.at("baseline"), ex.at("seeds").get<std::size_t>());
    meas = {{"variants", json::array()}, {"baseline_counterexamples", m.baseline_counterexamples},
            {"baseline_samples", m.baseline_samples}};
    for (const auto& v : m.variants) {
      meas["variants"].push_back({{"rulebook", v.rulebook},
                                  {"workers", v.workers},
                                  {"median_falsified", v.median_falsified},
                                  {"falsified", v.falsified},
                                  {"max_simultaneous", v.simultaneous},
                                  {"samples", v.samples}});
    }
    const double disc = m.find("disconnected", 1).median_falsified;
    for (const auto& [label, rb] : rulebooks) {
      if (label == "disconnected") continue;
      const double ser = m.find(label, 1).median_falsified;
      const double par = m.find(label, workers).median_falsified;
      check(o, label + " parallel >= " + label + " serial >= disconnected serial", par >= ser && ser >= disc);
      check(o, label + " serial falsifies at least one metric", ser >= 1.0);
    }
    const auto total = std::accumulate(m.baseline_counterexamples.begin(), m.baseline_counterexamples.end(),
                                       std::uint64_t{0});
    check(o, "disjunction baseline finds no counterexample", total == 0);
  } else if (o.kind == "feedback-integrity") {
    const auto file = parse_campaign(ex.at("campaign"));
    const auto m = measure_integrity(file, ex.value("failure_rate", 0.05));
    meas = {{"dispatched", m.totals.dispatched},
            {"completed", m.totals.completed},
            {"failed", m.totals.failed},
            {"violations", m.violations}};
    check(o, "dispatched = completed + failed", m.totals.dispatched == m.totals.completed + m.totals.failed);
    check(o, "every id completed or failed exactly once", m.ids_accounted);
    check(o, "every feedback applied exactly once", m.applied_once);
    check(o, "bandit invariants hold", m.violations.empty());
  } else if (o.kind == "determinism") {
    const auto file = parse_campaign(ex.at("campaign"));
    const auto m = measure_determinism(file, ex.at("workers").get<std::size_t>(), scratch);
    meas = {{"records", m.records}};
    check(o, "serial records identical across runs", m.records_identical);
    check(o, "halton samples independent of worker count", m.halton_multiset_equal);
  } else {
    throw ConfigError("unknown experiment kind '" + o.kind + "'");
  }
}

}  // namespace

ExperimentOutcome run_experiment(const json& experiment, const std::filesystem::path& scratch) {
  ExperimentOutcome o;
  o.name = experiment.value("name", "?");
  o.kind = experiment.value("kind", "?");
  const auto t0 = std::chrono::steady_clock::now();
  try {
    std::filesystem::create_directories(scratch);
    run_kind(experiment, scratch, o);
    o.passed = !o.assertions.empty() &&
               std::all_of(o.assertions.begin(), o.assertions.end(), [](const auto& a) { return a.second; });
  } catch (const std::exception& e) {
    o.error = e.what();
    o.passed = false;
  }
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return o;
}

json to_json(const ExperimentOutcome& o) {
  json asserts = json::array();
  for (const auto& [name, ok] : o.assertions) asserts.push_back({{"assertion", name}, {"passed", ok}});
  json doc = {{"name", o.name},       {"kind", o.kind},     {"passed", o.passed},
              {"seconds", o.seconds}, {"assertions", asserts}, {"measurements", o.measurements}};
  if (!o.error.empty()) doc["error"] = o.error;
  return doc;
}

}  // namespace falsify::bench
