#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "falsify/campaign_io.hpp"
#include "falsify/orchestrator.hpp"

namespace falsify::bench {

double median(std::vector<double> values);

// Campaign document with `patch` merged over it (RFC 7386 merge patch).
CampaignFile patched(const nlohmann::json& base, const nlohmann::json& patch);

// Throws DomainError for every sample whose value hash falls under `rate`.
class FlakyTarget final : public SimulationTarget {
 public:
  FlakyTarget(const SimulationTarget& inner, double rate) : inner_(inner), rate_(rate) {}
  std::size_t metric_count() const override { return inner_.metric_count(); }
  Evaluation run(const SampleVector& sample) const override;

 private:
  const SimulationTarget& inner_;
  double rate_;
};

// Empty when the snapshot satisfies the bandit bookkeeping invariants:
// every dimension's visit row sums to `completed`, every counterexample
// count matrix is bounded by the visits, and no two keys strictly dominate
// one another. Otherwise one message per violation.
std::vector<std::string> mab_invariant_violations(const SamplerSnapshot& snap, const Rulebook& rulebook);

struct SpeedupMeasure {
  std::uint64_t serial = 0;
  std::uint64_t parallel = 0;
  double ratio = 0.0;
};
// Runs `base` serially and with `workers` workers.
SpeedupMeasure measure_speedup(const CampaignFile& base, std::size_t workers);

struct CiRow {
  std::string scenario;
  std::uint64_t serial = 0;
  std::uint64_t parallel = 0;
  double speedup = 0.0;
  double width_serial = 0.0;
  double width_parallel = 0.0;
  double width_ratio = 0.0;
};
// Serial vs parallel per scenario; `base` supplies sampler, delay and budget.
std::vector<CiRow> measure_ci_table(const nlohmann::json& base, const std::vector<std::string>& scenarios,
                                    std::size_t workers);

// Width ratio for synthetic campaigns: n_s samples at `proportion` against
// factor * n_s at the same proportion.
double synthetic_width_ratio(double proportion, std::uint64_t n_serial, std::uint64_t factor);

struct ConcentrationMeasure {
  std::vector<double> shares;  // per seed: unsafe bucket's share of post-initialization visits
};
ConcentrationMeasure measure_concentration(const CampaignFile& base, std::size_t seeds, std::size_t dim,
                                           std::size_t bucket);

struct BalanceRow {
  std::string sampler;
  std::vector<double> counts;
  std::vector<double> diversity;
  double median_count = 0.0;
  double median_diversity = 0.0;
};
std::vector<BalanceRow> measure_balance(const CampaignFile& base, const std::vector<std::string>& samplers,
                                        std::size_t seeds);

struct VariantRow {
  std::string rulebook;
  std::size_t workers = 1;
  std::vector<double> falsified;  // metrics violated at least once, per seed
  std::vector<double> simultaneous;
  std::vector<double> samples;
  double median_falsified = 0.0;
};
struct MultiObjectiveMeasure {
  std::vector<VariantRow> variants;
  std::vector<std::uint64_t> baseline_counterexamples;  // per seed
  std::uint64_t baseline_samples = 0;
  const VariantRow& find(const std::string& rulebook, std::size_t workers) const;
};
// `base` is the intersection campaign; `rulebooks` maps a label to a
// rulebook section; each (label, workers) pair runs for every seed.
MultiObjectiveMeasure measure_multi_objective(const nlohmann::json& base,
                                              const std::map<std::string, nlohmann::json>& rulebooks,
                                              const std::vector<std::pair<std::string, std::size_t>>& variants,
                                              const nlohmann::json& baseline, std::size_t seeds);

struct IntegrityMeasure {
  CampaignTotals totals;
  bool ids_accounted = false;  // completed and failed ids partition 0..dispatched-1
  bool applied_once = false;   // sampler saw exactly `completed` feedbacks
  std::vector<std::string> violations;
};
IntegrityMeasure measure_integrity(const CampaignFile& base, double failure_rate);

struct DeterminismMeasure {
  bool records_identical = false;
  bool halton_multiset_equal = false;
  std::size_t records = 0;
};
// Two serial runs of `base`, then Halton with 1 and `workers` workers.
DeterminismMeasure measure_determinism(const CampaignFile& base, std::size_t workers,
                                       const std::filesystem::path& scratch);

// records.jsonl content with t_dispatch, t_complete and sim_seconds removed.
std::string records_without_timestamps(const std::filesystem::path& run_dir);

// Suite of named experiments, one JSON file per experiment in `config_dir`.
struct ExperimentOutcome {
  std::string name;
  std::string kind;
  bool passed = false;
  double seconds = 0.0;
  nlohmann::json measurements;
  std::vector<std::pair<std::string, bool>> assertions;
  std::string error;
};

std::vector<std::filesystem::path> experiment_files(const std::filesystem::path& config_dir);
ExperimentOutcome run_experiment(const nlohmann::json& experiment, const std::filesystem::path& scratch);
nlohmann::json to_json(const ExperimentOutcome& outcome);

}  // namespace falsify::bench
