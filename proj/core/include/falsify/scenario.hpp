#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "falsify/feature_space.hpp"
#include "falsify/monitor.hpp"
#include "falsify/trajectory.hpp"

namespace falsify {

// Polyline reference path parameterized by arc length. Positions past the
// end continue along the final segment.
class Path {
 public:
  Path() = default;
  explicit Path(std::vector<Vec2> points);

  double length() const noexcept { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  Vec2 point_at(double s) const;
  double heading_at(double s) const;
  const std::vector<Vec2>& points() const noexcept { return points_; }

 private:
  std::size_t segment_for(double s) const;

  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
};

class PathBuilder {
 public:
  PathBuilder(Vec2 start, double heading);
  PathBuilder& straight(double length);
  // Positive turn is counter-clockwise (left).
  PathBuilder& arc(double radius, double turn, std::size_t segments = 16);
  double length_so_far() const noexcept { return length_; }
  Path build() const { return Path(points_); }

 private:
  std::vector<Vec2> points_;
  double heading_;
  double length_ = 0.0;
};

// Brake at `decel` while another agent sits ahead within `trigger` meters
// and within `band` meters of the heading line.
struct BrakeRule {
  double trigger = 10.0;
  double decel = 7.0;
  double band = 3.0;
  std::vector<std::size_t> watch;  // empty: every other agent
};

// Hold still until `watch` comes within `trigger` meters.
struct StartRule {
  std::size_t watch = 0;
  double trigger = 20.0;
};

// Overtake `lead` by shifting `offset` meters left once it is within
// `trigger_gap` ahead, and shift back once `return_gap` ahead of it.
struct LaneChangeRule {
  std::size_t lead = 0;
  double trigger_gap = 10.0;
  double return_gap = 10.0;
  double offset = 6.0;
  double duration = 2.0;  // seconds for one full shift
  double band = 3.0;
};

// Switch to `speed` once `watch` begins a lane change.
struct SpeedUpRule {
  std::size_t watch = 0;
  double speed = 20.0;
};

struct AgentSpec {
  std::string name;
  AgentRole role = AgentRole::kVehicle;
  Path path;
  double s0 = 0.0;
  double speed = 0.0;         // initial
  double cruise_speed = 0.0;  // tracked when not braking
  double accel = 2.5;
  std::optional<BrakeRule> brake;
  std::optional<StartRule> start;
  std::optional<LaneChangeRule> lane_change;
  std::optional<SpeedUpRule> speed_up;
  std::optional<double> clear_s;     // past this arc length the agent left the conflict zone
  bool clear_after_lane_change = false;
};

// A fully specified initial condition; agent 0 must be the ego.
struct World {
  double timestep = 0.1;
  std::size_t max_timesteps = 300;
  double crash_distance = 0.5;
  std::vector<AgentSpec> agents;
};

// Fixed-step kinematic rollout. Stops at max_timesteps, on a crash (ego
// closer than crash_distance to any agent) or once every agent with a clear
// criterion has met it.
Trajectory run_world(const World& world);

struct ScenarioParameter {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  std::string description;
};

struct ScenarioInfo {
  std::string id;
  std::string description;
  std::vector<ScenarioParameter> parameters;
  std::vector<AgentInfo> agents;
};

struct ScenarioConfig {
  std::string id = "1";
  std::size_t adversaries = 5;  // intersection only
  double lane_width = 6.0;
  double exit_length = 40.0;
  std::size_t max_timesteps = 300;
  double timestep = 0.1;
  // Scenario parameter -> feature dimension name. Unlisted parameters bind
  // to the dimension of the same name.
  std::map<std::string, std::string> bindings;
  // Parameters pinned to a constant instead of a dimension.
  std::map<std::string, double> fixed;

  bool operator==(const ScenarioConfig&) const = default;
};

// The seven pre-crash scenarios ("1".."7") and the m-adversary "intersection".
std::vector<ScenarioInfo> list_scenarios(std::size_t adversaries = 5);
ScenarioInfo scenario_info(std::string_view id, std::size_t adversaries = 5);

// Feature space over all of a scenario's parameters at their default ranges.
FeatureSpace default_feature_space(const ScenarioInfo& info, std::size_t buckets = FeatureSpace::kDefaultBuckets);

// One min-separation metric per non-ego agent.
Specification default_specification(const ScenarioInfo& info, double threshold = 5.0);

class ScenarioSimulator {
 public:
  // Throws ConfigError for an unknown scenario, a parameter with no matching
  // dimension, or invalid geometry.
  ScenarioSimulator(ScenarioConfig config, const FeatureSpace& space);

  const ScenarioConfig& config() const noexcept { return config_; }
  const ScenarioInfo& info() const noexcept { return info_; }

  World build_world(const SampleVector& sample) const;
  Trajectory simulate(const SampleVector& sample) const;
  // Same trajectory; the call lasts at least `delay`.
  Trajectory simulate_with_delay(const SampleVector& sample, std::chrono::duration<double> delay) const;

 private:
  ScenarioConfig config_;
  ScenarioInfo info_;
  std::size_t dims_;
  // Per parameter: feature index or pinned value.
  std::vector<std::optional<std::size_t>> index_;
  std::vector<double> pinned_;
};

Trajectory simulate(const ScenarioConfig& config, const FeatureSpace& space, const SampleVector& sample);

}  // namespace falsify
