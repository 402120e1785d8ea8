#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "falsify/feature_space.hpp"
#include "falsify/monitor.hpp"
#include "falsify/rulebook.hpp"
#include "falsify/scenario.hpp"
#include "falsify/trajectory.hpp"

namespace falsify {

struct Evaluation {
  ObjectiveVector rho;
  Termination termination = Termination::kNone;
  std::optional<Trajectory> trajectory;
};

// The system under test: maps a sample to robustness values. run() is
// called concurrently from worker threads and must not touch shared
// mutable state.
class SimulationTarget {
 public:
  virtual ~SimulationTarget() = default;
  virtual std::size_t metric_count() const = 0;
  virtual Evaluation run(const SampleVector& sample) const = 0;
};

// Scenario simulation followed by monitor evaluation.
class ScenarioTarget final : public SimulationTarget {
 public:
  ScenarioTarget(ScenarioConfig config, const FeatureSpace& space, Specification spec, bool keep_trajectory = false);

  std::size_t metric_count() const override { return spec_.size(); }
  Evaluation run(const SampleVector& sample) const override;

  const ScenarioSimulator& simulator() const noexcept { return sim_; }
  const Specification& specification() const noexcept { return spec_; }

 private:
  ScenarioSimulator sim_;
  Specification spec_;
  bool keep_trajectory_;
};

// Closed-form robustness landscapes over the unit cube, for exercising
// samplers without a simulator. A region is an axis-aligned box in
// normalized coordinates; rho = -1 inside any unsafe region, else the
// distance (in normalized units) to the nearest region.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

class LandscapeTarget final : public SimulationTarget {
 public:
  LandscapeTarget(FeatureSpace space, std::vector<Box> unsafe);

  std::size_t metric_count() const override { return 1; }
  Evaluation run(const SampleVector& sample) const override;

  const std::vector<Box>& regions() const noexcept { return unsafe_; }

 private:
  FeatureSpace space_;
  std::vector<Box> unsafe_;
};

// Unsafe exactly when `dim` lands in `bucket`.
class BucketLandscape final : public SimulationTarget {
 public:
  BucketLandscape(const FeatureSpace& space, std::size_t dim, std::size_t bucket);

  std::size_t metric_count() const override { return 1; }
  Evaluation run(const SampleVector& sample) const override;

 private:
  std::size_t dim_;
  std::size_t bucket_;
};

// Named landscapes shipped with the library:
//   "single-bucket"  d=2: unsafe iff dimension 0 falls in bucket 3 of 10.
//   "two-region"     d=2: two disjoint unsafe boxes of unequal size.
// Throws ConfigError for other names or when `space` is not 2-D.
std::unique_ptr<SimulationTarget> make_landscape(const std::string& name, const FeatureSpace& space);
std::vector<std::string> landscape_names();

}  // namespace falsify
