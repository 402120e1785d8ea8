#pragma once

#include <string>
#include <vector>

#include "falsify/rulebook.hpp"
#include "falsify/trajectory.hpp"

namespace falsify {

enum class MetricKind {
  kMinSeparation,  // min over frames of |ego - agent| - threshold
  kDisjunction,    // max over agents of their min-separation robustness
};

struct MetricSpec {
  MetricKind kind = MetricKind::kMinSeparation;
  std::vector<std::string> agents;  // one agent for kMinSeparation
  double threshold = 5.0;           // meters
  std::string name;                 // defaults to label()

  std::string label() const;
  std::string display_name() const { return name.empty() ? label() : name; }
  bool operator==(const MetricSpec&) const = default;
};

struct Specification {
  std::vector<MetricSpec> metrics;

  std::size_t size() const noexcept { return metrics.size(); }
  bool operator==(const Specification&) const = default;

  // One min-separation metric per listed agent, named after the agent.
  static Specification min_separation(const std::vector<std::string>& agents, double threshold = 5.0);
};

// Center-to-center robustness for each metric. Throws ConfigError when a
// referenced agent is absent from the trajectory.
ObjectiveVector evaluate(const Specification& spec, const Trajectory& traj);

// bits[j] = rho[j] < 0; zero counts as satisfied.
FalsificationVector falsification_vector(const ObjectiveVector& rho);

}  // namespace falsify
