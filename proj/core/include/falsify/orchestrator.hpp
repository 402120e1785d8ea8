#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "falsify/feature_space.hpp"
#include "falsify/monitor.hpp"
#include "falsify/rulebook.hpp"
#include "falsify/samplers.hpp"
#include "falsify/scenario.hpp"
#include "falsify/target.hpp"

namespace falsify {

struct Budget {
  std::optional<std::uint64_t> max_samples;
  std::optional<double> max_wall_seconds;

  bool operator==(const Budget&) const = default;
};

struct CampaignConfig {
  FeatureSpace space;
  ScenarioConfig scenario;
  // Set when the target is a named synthetic landscape instead of a scenario.
  std::optional<std::string> landscape;
  Specification spec;
  Rulebook rulebook;
  SamplerOptions sampler;
  Budget budget;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  double delay = 0.0;                   // seconds added to every simulation
  double delay_jitter = 0.0;            // extra uniform [0, jitter) seconds per sample
  std::uint64_t checkpoint_interval = 0;  // completed samples between snapshots; 0 = off
  bool keep_trajectories = false;

  // Throws ConfigError: no budget, zero workers, negative delay or jitter, or a
  // rulebook whose size disagrees with the specification.
  void validate() const;
};

struct SampleRecord {
  std::uint64_t id = 0;
  std::size_t worker = 0;
  double t_dispatch = 0.0;  // seconds since campaign start
  double t_complete = 0.0;
  SampleVector sample;
  ObjectiveVector rho;
  FalsificationVector b;
  bool counterexample = false;
  Termination termination = Termination::kNone;
  double sim_seconds = 0.0;
};

struct FailedSample {
  std::uint64_t id = 0;
  std::size_t worker = 0;
  SampleVector sample;
  std::string error;
};

struct CampaignTotals {
  std::uint64_t dispatched = 0;
  std::uint64_t completed = 0;
  std::uint64_t failed = 0;
  std::uint64_t counterexamples = 0;
  double wall_seconds = 0.0;
};

struct Checkpoint {
  std::uint64_t completed = 0;
  SamplerSnapshot snapshot;
};

struct CampaignResult {
  std::vector<SampleRecord> error_table;  // completion order
  std::vector<SampleRecord> safe_table;
  std::vector<FailedSample> failed;
  std::vector<FalsificationVector> maximal;
  SamplerSnapshot final_snapshot;
  std::vector<Checkpoint> checkpoints;
  std::vector<std::pair<std::uint64_t, Trajectory>> trajectories;
  CampaignTotals totals;

  // Error and safe tables merged and sorted by sample id.
  std::vector<SampleRecord> records() const;
};

// Thrown by run_serial when a simulation or monitor fails; carries every
// record completed before the failure.
class CampaignAborted : public std::runtime_error {
 public:
  CampaignAborted(const std::string& what, CampaignResult partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const CampaignResult& partial() const noexcept { return partial_; }

 private:
  CampaignResult partial_;
};

// Builds the configured scenario (or landscape) target.
std::unique_ptr<SimulationTarget> make_target(const CampaignConfig& config);

// next_sample -> simulate -> evaluate -> update, until the budget runs out.
// Deterministic for a fixed seed when only a sample budget is set.
CampaignResult run_serial(const CampaignConfig& config, const SimulationTarget& target);

// config.workers threads each run simulations; the calling thread owns the
// sampler, dispatches a new sample whenever a worker is idle and applies
// feedback as it arrives. Failed simulations are recorded and skipped.
CampaignResult run_parallel(const CampaignConfig& config, const SimulationTarget& target);

// run_serial for one worker, run_parallel otherwise.
CampaignResult run_campaign(const CampaignConfig& config, const SimulationTarget& target);

}  // namespace falsify
