#include "falsify/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "falsify/errors.hpp"

namespace falsify {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRoadLength = 600.0;

enum class Turn { kStraight, kLeft, kRight };

Turn turn_from(double encoded) {
  const auto k = std::clamp(static_cast<int>(std::floor(encoded)), 0, 2);
  return static_cast<Turn>(k);
}

Vec2 rotate(Vec2 p, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

struct Route {
  Path path;
  double clear_s = 0.0;
};

// Route through a four-way intersection centred at the origin, entering from
// `arm` (0 south, 1 east, 2 north, 3 west) `approach` meters before the box.
Route intersection_route(int arm, Turn turn, double approach, double lane, double exit) {
  PathBuilder b({lane / 2.0, -lane - approach}, kPi / 2.0);
  b.straight(approach);
  switch (turn) {
    case Turn::kStraight: b.straight(2.0 * lane); break;
    case Turn::kLeft: b.arc(1.5 * lane, kPi / 2.0); break;
    case Turn::kRight: b.arc(0.5 * lane, -kPi / 2.0); break;
  }
  const double box_exit = b.length_so_far();
  b.straight(exit + kRoadLength);
  std::vector<Vec2> pts = b.build().points();
  const double angle = static_cast<double>(arm) * kPi / 2.0;
  for (auto& p : pts) p = rotate(p, angle);
  return {Path(std::move(pts)), box_exit + exit};
}

// Straight road along +x; arc length equals the x coordinate.
Path straight_road(double y) { return Path({{0.0, y}, {kRoadLength, y}}); }

using Params = std::map<std::string, double, std::less<>>;

double get(const Params& p, std::string_view name) {
  auto it = p.find(name);
  if (it == p.end()) throw ConfigError("scenario parameter '" + std::string(name) + "' has no value");
  return it->second;
}

std::string adv(std::size_t k, std::string_view field) {
  return "adv" + std::to_string(k) + "_" + std::string(field);
}

AgentSpec vehicle(std::string name, AgentRole role, Path path, double s0, double speed) {
  AgentSpec a;
  a.name = std::move(name);
  a.role = role;
  a.path = std::move(path);
  a.s0 = s0;
  a.speed = speed;
  a.cruise_speed = speed;
  return a;
}

constexpr double kEgoApproach = 40.0;

World scenario_1(const ScenarioConfig& c, const Params& p) {
  const double w = c.lane_width;
  World world;
  auto ego_route = intersection_route(0, Turn::kStraight, kEgoApproach, w, c.exit_length);
  auto ego = vehicle("ego", AgentRole::kEgo, ego_route.path, 0.0, get(p, "ego_speed"));
  ego.brake = BrakeRule{get(p, "ego_brake_trigger"), 7.0, 1.25 * w, {1}};
  ego.clear_s = ego_route.clear_s;
  auto adv_route = intersection_route(2, Turn::kLeft, get(p, "adv_distance"), w, c.exit_length);
  auto adversary = vehicle("adversary", AgentRole::kVehicle, adv_route.path, 0.0, get(p, "adv_speed"));
  adversary.clear_s = adv_route.clear_s;
  world.agents = {ego, adversary};
  return world;
}

World scenario_2(const ScenarioConfig& c, const Params& p) {
  const double w = c.lane_width;
  World world;
  auto ego_route = intersection_route(0, Turn::kLeft, kEgoApproach, w, c.exit_length);
  auto ego = vehicle("ego", AgentRole::kEgo, ego_route.path, 0.0, get(p, "ego_speed"));
  ego.brake = BrakeRule{get(p, "ego_brake_trigger"), 7.0, 1.25 * w, {1}};
  ego.clear_s = ego_route.clear_s;
  auto adv_route = intersection_route(2, Turn::kStraight, get(p, "adv_distance"), w, c.exit_length);
  auto adversary = vehicle("adversary", AgentRole::kVehicle, adv_route.path, 0.0, get(p, "adv_speed"));
  adversary.clear_s = adv_route.clear_s;
  world.agents = {ego, adversary};
  return world;
}

World scenario_3(const ScenarioConfig& c, const Params& p) {
  const double w = c.lane_width;
  World world;
  auto ego = vehicle("ego", AgentRole::kEgo, straight_road(0.0), 0.0, get(p, "ego_speed"));
  ego.lane_change = LaneChangeRule{1, get(p, "change_trigger"), get(p, "return_gap"), w, 2.0, w / 2.0};
  ego.clear_after_lane_change = true;
  auto lead = vehicle("lead", AgentRole::kVehicle, straight_road(0.0), get(p, "lead_gap"), get(p, "lead_speed"));
  world.agents = {ego, lead};
  return world;
}

World scenario_4(const ScenarioConfig& c, const Params& p) {
  const double w = c.lane_width;
  World world;
  auto ego = vehicle("ego", AgentRole::kEgo, straight_road(0.0), get(p, "adv_gap"), get(p, "ego_speed"));
  auto trailing = vehicle("adversary", AgentRole::kVehicle, straight_road(0.0), 0.0, get(p, "adv_speed"));
  trailing.lane_change = LaneChangeRule{0, get(p, "change_trigger"), get(p, "return_gap"), w, 2.0, w / 2.0};
  trailing.clear_after_lane_change = true;
  world.agents = {ego, trailing};
  return world;
}

World scenario_5(const ScenarioConfig& c, const Params& p) {
  const double w = c.lane_width;
  World world;
  auto ego = vehicle("ego", AgentRole::kEgo, straight_road(0.0), 0.0, get(p, "ego_speed"));
  ego.lane_change = LaneChangeRule{1, get(p, "change_trigger"), 8.0, w, 2.0, w / 2.0};
  ego.brake = BrakeRule{get(p, "ego_brake_trigger"), 6.0, w / 2.0, {2}};
  auto lead = vehicle("lead", AgentRole::kVehicle, straight_road(0.0), get(p, "lead_gap"), get(p, "lead_speed"));
  lead.speed_up = SpeedUpRule{0, get(p, "ego_speed") + 6.0};
  auto lead2 =
      vehicle("lead2", AgentRole::kVehicle, straight_road(w), get(p, "lead2_gap"), get(p, "lead2_speed"));
  world.agents = {ego, lead, lead2};
  return world;
}

AgentSpec crossing_pedestrian(double x, double speed, double trigger) {
  auto ped = vehicle("pedestrian", AgentRole::kPedestrian, Path({{x, -7.0}, {x, 60.0}}), 0.0, speed);
  ped.start = StartRule{0, trigger};
  ped.accel = 1.0;
  ped.clear_s = 14.0;
  return ped;
}

World scenario_6(const ScenarioConfig&, const Params& p) {
  World world;
  const double cross = get(p, "cross_distance");
  auto ego = vehicle("ego", AgentRole::kEgo, straight_road(0.0), 0.0, get(p, "ego_speed"));
  ego.brake = BrakeRule{get(p, "ego_brake_trigger"), 7.0, 6.0, {1}};
  ego.clear_s = cross + 60.0;
  world.agents = {ego, crossing_pedestrian(cross, get(p, "ped_speed"), get(p, "ped_trigger"))};
  return world;
}

World scenario_7(const ScenarioConfig&, const Params& p) {
  World world;
  const double ego_s = get(p, "follow_gap");
  const double cross = ego_s + 40.0;
  auto ego = vehicle("ego", AgentRole::kEgo, straight_road(0.0), ego_s, get(p, "ego_speed"));
  ego.brake = BrakeRule{18.0, 7.0, 6.0, {2}};
  ego.clear_s = cross + 60.0;
  auto follower = vehicle("adversary", AgentRole::kVehicle, straight_road(0.0), 0.0, get(p, "ego_speed"));
  follower.brake = BrakeRule{get(p, "adv_brake_trigger"), 6.0, 2.5, {0}};
  follower.clear_s = cross + 50.0;
  world.agents = {ego, follower, crossing_pedestrian(cross, get(p, "ped_speed"), get(p, "ped_trigger"))};
  return world;
}

World scenario_intersection(const ScenarioConfig& c, const Params& p) {
  const double w = c.lane_width;
  World world;
  auto ego_route = intersection_route(0, Turn::kStraight, kEgoApproach, w, c.exit_length);
  auto ego = vehicle("ego", AgentRole::kEgo, ego_route.path, 0.0, get(p, "ego_speed"));
  ego.clear_s = ego_route.clear_s;
  world.agents.push_back(ego);
  for (std::size_t k = 1; k <= c.adversaries; ++k) {
    // Arms other than the ego's own: east, north, west.
    const int arm = 1 + std::clamp(static_cast<int>(std::floor(get(p, adv(k, "arm")))), 0, 2);
    auto route = intersection_route(arm, turn_from(get(p, adv(k, "maneuver"))), get(p, adv(k, "distance")), w,
                                    c.exit_length);
    auto a = vehicle("adv" + std::to_string(k), AgentRole::kVehicle, route.path, 0.0, get(p, adv(k, "speed")));
    a.clear_s = route.clear_s;
    world.agents.push_back(a);
  }
  return world;
}

World build(const ScenarioConfig& c, const Params& p) {
  if (c.id == "1") return scenario_1(c, p);
  if (c.id == "2") return scenario_2(c, p);
  if (c.id == "3") return scenario_3(c, p);
  if (c.id == "4") return scenario_4(c, p);
  if (c.id == "5") return scenario_5(c, p);
  if (c.id == "6") return scenario_6(c, p);
  if (c.id == "7") return scenario_7(c, p);
  if (c.id == "intersection") return scenario_intersection(c, p);
  throw ConfigError("unknown scenario '" + c.id + "'");
}

}  // namespace

std::vector<ScenarioInfo> list_scenarios(std::size_t adversaries) {
  using P = ScenarioParameter;
  auto vehicle_pair = [](std::string other) {
    return std::vector<AgentInfo>{{"ego", AgentRole::kEgo}, {std::move(other), AgentRole::kVehicle}};
  };
  std::vector<ScenarioInfo> out;
  out.push_back({"1",
                 "Ego drives straight through a 4-way intersection and must brake when an oncoming adversary "
                 "makes an unprotected left turn.",
                 {P{"ego_speed", 6.0, 14.0, "ego cruise speed (m/s)"},
                  P{"ego_brake_trigger", 10.0, 30.0, "distance at which the ego brakes for the adversary (m)"},
                  P{"adv_speed", 4.0, 12.0, "adversary speed (m/s)"},
                  P{"adv_distance", 0.0, 120.0, "adversary start distance before the intersection (m)"}},
                 vehicle_pair("adversary")});
  out.push_back({"2",
                 "Ego makes an unprotected left turn at a 4-way intersection and must brake for an oncoming "
                 "adversary driving straight.",
                 {P{"ego_speed", 5.0, 12.0, "ego cruise speed (m/s)"},
                  P{"ego_brake_trigger", 4.0, 20.0, "distance at which the ego brakes for the adversary (m)"},
                  P{"adv_speed", 6.0, 14.0, "adversary speed (m/s)"},
                  P{"adv_distance", 0.0, 50.0, "adversary start distance before the intersection (m)"}},
                 vehicle_pair("adversary")});
  out.push_back({"3", "Ego changes lanes to bypass a slower leading vehicle, then returns to its lane.",
                 {P{"ego_speed", 10.0, 16.0, "ego cruise speed (m/s)"},
                  P{"lead_speed", 4.0, 8.0, "leading vehicle speed (m/s)"},
                  P{"lead_gap", 50.0, 80.0, "initial gap to the leading vehicle (m)"},
                  P{"change_trigger", 10.0, 45.0, "gap at which the ego starts the lane change (m)"},
                  P{"return_gap", 3.0, 20.0, "lead the ego needs before returning (m)"}},
                 vehicle_pair("lead")});
  out.push_back({"4", "A trailing adversary changes lanes to bypass the ego, then returns to its lane.",
                 {P{"ego_speed", 3.0, 8.0, "ego cruise speed (m/s)"},
                  P{"adv_speed", 10.0, 16.0, "adversary speed (m/s)"},
                  P{"adv_gap", 50.0, 80.0, "initial gap between adversary and ego (m)"},
                  P{"change_trigger", 10.0, 45.0, "gap at which the adversary starts the lane change (m)"},
                  P{"return_gap", 3.0, 20.0, "lead the adversary needs before returning (m)"}},
                 vehicle_pair("adversary")});
  out.push_back({"5",
                 "Ego changes lanes to bypass a leading vehicle that then accelerates, so the ego cannot return "
                 "and must slow for a second vehicle ahead in its new lane.",
                 {P{"ego_speed", 12.0, 18.0, "ego cruise speed (m/s)"},
                  P{"lead_gap", 50.0, 80.0, "initial gap to the leading vehicle (m)"},
                  P{"lead_speed", 4.0, 8.0, "leading vehicle speed before it accelerates (m/s)"},
                  P{"change_trigger", 15.0, 45.0, "gap at which the ego starts the lane change (m)"},
                  P{"lead2_gap", 120.0, 200.0, "gap to the vehicle ahead in the passing lane (m)"},
                  P{"lead2_speed", 3.0, 8.0, "speed of the vehicle ahead in the passing lane (m/s)"},
                  P{"ego_brake_trigger", 10.0, 35.0, "distance at which the ego brakes in the new lane (m)"}},
                 {{"ego", AgentRole::kEgo}, {"lead", AgentRole::kVehicle}, {"lead2", AgentRole::kVehicle}}});
  out.push_back({"6", "Ego must brake suddenly when a pedestrian crosses the road unexpectedly.",
                 {P{"ego_speed", 6.0, 12.0, "ego cruise speed (m/s)"},
                  P{"ego_brake_trigger", 10.0, 35.0, "distance at which the ego brakes for the pedestrian (m)"},
                  P{"cross_distance", 40.0, 80.0, "distance from the ego start to the crossing (m)"},
                  P{"ped_trigger", 15.0, 50.0, "ego distance at which the pedestrian starts crossing (m)"},
                  P{"ped_speed", 0.8, 2.5, "pedestrian walking speed (m/s)"}},
                 {{"ego", AgentRole::kEgo}, {"pedestrian", AgentRole::kPedestrian}}});
  out.push_back({"7",
                 "Ego and a following adversary must both brake suddenly when a pedestrian crosses the road "
                 "unexpectedly.",
                 {P{"ego_speed", 6.0, 12.0, "speed of ego and follower (m/s)"},
                  P{"follow_gap", 10.0, 25.0, "initial gap between follower and ego (m)"},
                  P{"adv_brake_trigger", 8.0, 30.0, "distance at which the follower brakes for the ego (m)"},
                  P{"ped_trigger", 20.0, 60.0, "ego distance at which the pedestrian starts crossing (m)"},
                  P{"ped_speed", 0.8, 2.5, "pedestrian walking speed (m/s)"}},
                 {{"ego", AgentRole::kEgo}, {"adversary", AgentRole::kVehicle},
                  {"pedestrian", AgentRole::kPedestrian}}});

  ScenarioInfo inter{"intersection",
                     "Ego drives straight through a 4-way intersection while " + std::to_string(adversaries) +
                         " adversaries approach from the other arms and go straight or turn.",
                     {P{"ego_speed", 6.0, 12.0, "ego speed (m/s)"}},
                     {{"ego", AgentRole::kEgo}}};
  for (std::size_t k = 1; k <= adversaries; ++k) {
    inter.parameters.push_back({adv(k, "arm"), 0.0, 3.0, "approach arm: 0 east, 1 north, 2 west"});
    inter.parameters.push_back({adv(k, "distance"), 0.0, 100.0, "start distance before the intersection (m)"});
    inter.parameters.push_back({adv(k, "speed"), 4.0, 12.0, "speed (m/s)"});
    inter.parameters.push_back({adv(k, "maneuver"), 0.0, 3.0, "0 straight, 1 left, 2 right"});
    inter.agents.push_back({"adv" + std::to_string(k), AgentRole::kVehicle});
  }
  out.push_back(std::move(inter));
  return out;
}

ScenarioInfo scenario_info(std::string_view id, std::size_t adversaries) {
  for (auto& s : list_scenarios(adversaries)) {
    if (s.id == id) return s;
  }
  throw ConfigError("unknown scenario '" + std::string(id) + "'");
}

FeatureSpace default_feature_space(const ScenarioInfo& info, std::size_t buckets) {
  std::vector<Dimension> dims;
  for (const auto& p : info.parameters) dims.push_back({p.name, p.lo, p.hi});
  return FeatureSpace(std::move(dims), buckets);
}

Specification default_specification(const ScenarioInfo& info, double threshold) {
  std::vector<std::string> names;
  for (const auto& a : info.agents) {
    if (a.role != AgentRole::kEgo) names.push_back(a.name);
  }
  return Specification::min_separation(names, threshold);
}

ScenarioSimulator::ScenarioSimulator(ScenarioConfig config, const FeatureSpace& space)
    : config_(std::move(config)), dims_(space.size()) {
  if (config_.id == "intersection" && config_.adversaries == 0) {
    throw ConfigError("intersection scenario needs at least one adversary");
  }
  if (!(config_.lane_width > 0.0)) throw ConfigError("lane width must be positive");
  if (!(config_.timestep > 0.0)) throw ConfigError("timestep must be positive");
  if (config_.max_timesteps == 0) throw ConfigError("max timesteps must be at least 1");
  info_ = scenario_info(config_.id, config_.adversaries);
  for (const auto& [param, dim] : config_.bindings) {
    auto known = std::any_of(info_.parameters.begin(), info_.parameters.end(),
                             [&](const ScenarioParameter& p) { return p.name == param; });
    if (!known) throw ConfigError("binding for unknown parameter '" + param + "' of scenario " + config_.id);
  }
  for (const auto& p : info_.parameters) {
    if (auto it = config_.fixed.find(p.name); it != config_.fixed.end()) {
      index_.push_back(std::nullopt);
      pinned_.push_back(it->second);
      continue;
    }
    auto b = config_.bindings.find(p.name);
    const std::string& dim = b == config_.bindings.end() ? p.name : b->second;
    auto idx = space.find(dim);
    if (!idx) throw ConfigError("scenario parameter '" + p.name + "' is bound to missing dimension '" + dim + "'");
    index_.push_back(*idx);
    pinned_.push_back(0.0);
  }
}

World ScenarioSimulator::build_world(const SampleVector& sample) const {
  if (sample.values.size() != dims_) throw ConfigError("sample does not match the bound feature space");
  Params params;
  for (std::size_t k = 0; k < info_.parameters.size(); ++k) {
    params.emplace(info_.parameters[k].name, index_[k] ? sample.values[*index_[k]] : pinned_[k]);
  }
  World world = build(config_, params);
  world.timestep = config_.timestep;
  world.max_timesteps = config_.max_timesteps;
  return world;
}

Trajectory ScenarioSimulator::simulate(const SampleVector& sample) const { return run_world(build_world(sample)); }

Trajectory ScenarioSimulator::simulate_with_delay(const SampleVector& sample,
                                                  std::chrono::duration<double> delay) const {
  const auto until = std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::nanoseconds>(delay);
  Trajectory traj = simulate(sample);
  std::this_thread::sleep_until(until);
  return traj;
}

Trajectory simulate(const ScenarioConfig& config, const FeatureSpace& space, const SampleVector& sample) {
  return ScenarioSimulator(config, space).simulate(sample);
}

}  // namespace falsify
