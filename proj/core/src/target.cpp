#include "falsify/target.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "falsify/errors.hpp"

namespace falsify {

ScenarioTarget::ScenarioTarget(ScenarioConfig config, const FeatureSpace& space, Specification spec,
                               bool keep_trajectory)
    : sim_(std::move(config), space), spec_(std::move(spec)), keep_trajectory_(keep_trajectory) {
  if (spec_.metrics.empty()) throw ConfigError("specification has no metrics");
  for (const auto& m : spec_.metrics) {
    for (const auto& name : m.agents) {
      const auto& agents = sim_.info().agents;
      auto found = std::any_of(agents.begin(), agents.end(), [&](const AgentInfo& a) { return a.name == name; });
      if (!found) {
        throw ConfigError("specification references unknown agent '" + name + "' in scenario " + sim_.info().id);
      }
    }
  }
}

Evaluation ScenarioTarget::run(const SampleVector& sample) const {
  Trajectory traj = sim_.simulate(sample);
  Evaluation out;
  out.rho = evaluate(spec_, traj);
  out.termination = traj.termination;
  if (keep_trajectory_) out.trajectory = std::move(traj);
  return out;
}

LandscapeTarget::LandscapeTarget(FeatureSpace space, std::vector<Box> unsafe)
    : space_(std::move(space)), unsafe_(std::move(unsafe)) {
  for (const auto& b : unsafe_) {
    if (b.lo.size() != space_.size() || b.hi.size() != space_.size()) {
      throw ConfigError("landscape region dimension does not match the feature space");
    }
  }
}

Evaluation LandscapeTarget::run(const SampleVector& sample) const {
  const auto unit = space_.normalize(sample.values);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : unsafe_) {
    double sq = 0.0;
    bool inside = true;
    for (std::size_t i = 0; i < unit.size(); ++i) {
      // Half-open boxes so bucket-aligned regions match bucket_index().
      const bool in = unit[i] >= b.lo[i] && (unit[i] < b.hi[i] || (b.hi[i] >= 1.0 && unit[i] <= 1.0));
      inside = inside && in;
      const double gap = std::max({b.lo[i] - unit[i], unit[i] - b.hi[i], 0.0});
      sq += gap * gap;
    }
    best = std::min(best, inside ? -1.0 : std::sqrt(sq));
  }
  Evaluation out;
  out.rho.rho = {best};
  return out;
}

BucketLandscape::BucketLandscape(const FeatureSpace& space, std::size_t dim, std::size_t bucket)
    : dim_(dim), bucket_(bucket) {
  if (dim >= space.size() || bucket >= space.bucket_count()) {
    throw ConfigError("bucket landscape refers to a bucket outside the feature space");
  }
}

Evaluation BucketLandscape::run(const SampleVector& sample) const {
  if (dim_ >= sample.buckets.size()) throw DomainError("sample lacks bucket indices");
  Evaluation out;
  out.rho.rho = {sample.buckets[dim_] == bucket_ ? -1.0 : 1.0};
  return out;
}

std::vector<std::string> landscape_names() { return {"single-bucket", "two-region"}; }

std::unique_ptr<SimulationTarget> make_landscape(const std::string& name, const FeatureSpace& space) {
  if (space.size() != 2) throw ConfigError("landscape '" + name + "' needs a 2-dimensional feature space");
  if (name == "single-bucket") {
    if (space.bucket_count() < 4) throw ConfigError("single-bucket landscape needs at least 4 buckets");
    return std::make_unique<BucketLandscape>(space, 0, 3);
  }
  if (name == "two-region") {
    return std::make_unique<LandscapeTarget>(space, std::vector<Box>{
                                                        {{0.10, 0.10}, {0.30, 0.30}},
                                                        {{0.60, 0.60}, {0.90, 0.90}},
                                                    });
  }
  throw ConfigError("unknown landscape '" + name + "'");
}

}  // namespace falsify
