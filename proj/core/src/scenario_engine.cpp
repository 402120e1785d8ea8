#include <algorithm>
#include <cmath>
#include <numbers>

#include "falsify/errors.hpp"
#include "falsify/scenario.hpp"

namespace falsify {

Path::Path(std::vector<Vec2> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw ConfigError("a path needs at least two points");
  cumulative_.resize(points_.size(), 0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double len = distance(points_[i - 1], points_[i]);
    if (!(len > 0.0)) throw ConfigError("path has a zero-length segment");
    cumulative_[i] = cumulative_[i - 1] + len;
  }
}

std::size_t Path::segment_for(double s) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  return std::clamp<std::size_t>(idx, 1, points_.size() - 1) - 1;
}

Vec2 Path::point_at(double s) const {
  const std::size_t k = segment_for(s);
  const Vec2 a = points_[k];
  const Vec2 b = points_[k + 1];
  const double len = cumulative_[k + 1] - cumulative_[k];
  return a + (b - a) * ((s - cumulative_[k]) / len);
}

double Path::heading_at(double s) const {
  const std::size_t k = segment_for(s);
  const Vec2 d = points_[k + 1] - points_[k];
  return std::atan2(d.y, d.x);
}

PathBuilder::PathBuilder(Vec2 start, double heading) : points_{start}, heading_(heading) {}

PathBuilder& PathBuilder::straight(double length) {
  if (!(length > 0.0)) return *this;
  points_.push_back(points_.back() + heading_unit(heading_) * length);
  length_ += length;
  return *this;
}

PathBuilder& PathBuilder::arc(double radius, double turn, std::size_t segments) {
  if (!(radius > 0.0)) throw ConfigError("arc radius must be positive");
  const Vec2 p = points_.back();
  const double side = turn >= 0.0 ? 1.0 : -1.0;
  const Vec2 left{-std::sin(heading_), std::cos(heading_)};
  const Vec2 center = p + left * (radius * side);
  for (std::size_t k = 1; k <= segments; ++k) {
    const double theta = heading_ + turn * static_cast<double>(k) / static_cast<double>(segments);
    points_.push_back(center + Vec2{std::sin(theta), -std::cos(theta)} * (radius * side));
  }
  heading_ += turn;
  length_ += radius * std::abs(turn);
  return *this;
}

namespace {

enum class LaneState { kIdle, kOut, kPassing, kReturning, kDone };

struct Runtime {
  double s = 0.0;
  double v = 0.0;
  double lat = 0.0;
  double lat_target = 0.0;
  double cruise = 0.0;
  double effective_speed = 0.0;
  LaneState lane = LaneState::kIdle;
  bool started = true;
};

Vec2 left_normal(double heading) { return {-std::sin(heading), std::cos(heading)}; }

AgentState state_of(const AgentSpec& spec, const Runtime& rt) {
  const double h = spec.path.heading_at(rt.s);
  return {spec.path.point_at(rt.s) + left_normal(h) * rt.lat, h, rt.effective_speed};
}

// Longitudinal and lateral offset of `other` in the frame of `self`.
std::pair<double, double> relative(const AgentState& self, const AgentState& other) {
  const Vec2 rel = other.position - self.position;
  const Vec2 fwd = heading_unit(self.heading);
  return {rel.dot(fwd), std::abs(fwd.x * rel.y - fwd.y * rel.x)};
}

bool hazard_ahead(const BrakeRule& rule, std::size_t self, const std::vector<AgentState>& states) {
  auto check = [&](std::size_t other) {
    if (other == self) return false;
    const auto [fwd, lat] = relative(states[self], states[other]);
    return fwd > 0.0 && fwd <= rule.trigger && lat < rule.band;
  };
  if (rule.watch.empty()) {
    for (std::size_t o = 0; o < states.size(); ++o) {
      if (check(o)) return true;
    }
    return false;
  }
  return std::any_of(rule.watch.begin(), rule.watch.end(), check);
}

void validate(const World& world) {
  if (world.agents.empty() || world.agents.front().role != AgentRole::kEgo) {
    throw ConfigError("world needs the ego as its first agent");
  }
  if (!(world.timestep > 0.0)) throw ConfigError("timestep must be positive");
  if (world.max_timesteps == 0) throw ConfigError("max timesteps must be at least 1");
  const std::size_t n = world.agents.size();
  for (const auto& a : world.agents) {
    if (a.path.points().size() < 2) throw ConfigError("agent '" + a.name + "' has no path");
    if (a.speed < 0.0 || a.cruise_speed < 0.0) throw ConfigError("agent '" + a.name + "' has a negative speed");
    if (a.brake) {
      if (!(a.brake->decel > 0.0)) throw ConfigError("brake deceleration must be positive");
      if (a.brake->trigger < 0.0) throw ConfigError("brake trigger must be non-negative");
      for (auto w : a.brake->watch) {
        if (w >= n) throw ConfigError("brake rule watches a missing agent");
      }
    }
    if (a.start && (a.start->watch >= n || a.start->trigger < 0.0)) throw ConfigError("invalid start rule");
    if (a.lane_change && (a.lane_change->lead >= n || !(a.lane_change->duration > 0.0))) {
      throw ConfigError("invalid lane-change rule");
    }
    if (a.speed_up && a.speed_up->watch >= n) throw ConfigError("invalid speed-up rule");
  }
}

}  // namespace

Trajectory run_world(const World& world) {
  validate(world);
  const std::size_t n = world.agents.size();
  const double dt = world.timestep;

  Trajectory traj;
  traj.timestep = dt;
  for (const auto& a : world.agents) traj.agents.push_back({a.name, a.role});

  std::vector<Runtime> rt(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = world.agents[i];
    rt[i].s = a.s0;
    rt[i].v = a.start ? 0.0 : a.speed;
    rt[i].cruise = a.cruise_speed;
    rt[i].effective_speed = rt[i].v;
    rt[i].started = !a.start.has_value();
  }

  auto snapshot = [&] {
    std::vector<AgentState> states(n);
    for (std::size_t i = 0; i < n; ++i) states[i] = state_of(world.agents[i], rt[i]);
    return states;
  };

  std::vector<AgentState> states = snapshot();
  traj.frames.push_back({states});

  while (traj.frames.size() < world.max_timesteps) {
    std::vector<Runtime> next = rt;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = world.agents[i];
      auto& nx = next[i];

      double v_prev = rt[i].v;
      if (!nx.started) {
        if (distance(states[i].position, states[a.start->watch].position) > a.start->trigger) {
          nx.v = 0.0;
          nx.effective_speed = 0.0;
          continue;
        }
        nx.started = true;
        v_prev = a.speed;
      }

      if (a.speed_up && rt[a.speed_up->watch].lane != LaneState::kIdle) nx.cruise = a.speed_up->speed;

      if (a.lane_change) {
        const auto& lc = *a.lane_change;
        const auto [gap, lat] = relative(states[i], states[lc.lead]);
        switch (rt[i].lane) {
          case LaneState::kIdle:
            if (gap > 0.0 && gap <= lc.trigger_gap && lat < lc.band) {
              nx.lane = LaneState::kOut;
              nx.lat_target = lc.offset;
            }
            break;
          case LaneState::kOut:
            if (rt[i].lat == lc.offset) nx.lane = LaneState::kPassing;
            break;
          case LaneState::kPassing:
            if (gap <= -lc.return_gap) {
              nx.lane = LaneState::kReturning;
              nx.lat_target = 0.0;
            }
            break;
          case LaneState::kReturning:
            if (rt[i].lat == 0.0) nx.lane = LaneState::kDone;
            break;
          case LaneState::kDone: break;
        }
      }

      const bool braking = a.brake && hazard_ahead(*a.brake, i, states);
      if (braking) {
        nx.v = std::max(0.0, v_prev - a.brake->decel * dt);
      } else if (v_prev < nx.cruise) {
        nx.v = std::min(nx.cruise, v_prev + a.accel * dt);
      } else {
        nx.v = std::max(nx.cruise, v_prev - a.accel * dt);
      }
      nx.s = rt[i].s + nx.v * dt;

      double lat_step = 0.0;
      if (a.lane_change) {
        const double rate = std::abs(a.lane_change->offset) / a.lane_change->duration;
        const double diff = nx.lat_target - rt[i].lat;
        lat_step = std::clamp(diff, -rate * dt, rate * dt);
        nx.lat = std::abs(diff) <= rate * dt ? nx.lat_target : rt[i].lat + lat_step;
      }
      nx.effective_speed = std::hypot(nx.v, lat_step / dt);
    }
    rt = std::move(next);
    states = snapshot();
    traj.frames.push_back({states});

    if (traj.frames.size() >= world.max_timesteps) break;

    bool crash = false;
    for (std::size_t o = 1; o < n && !crash; ++o) {
      crash = distance(states[0].position, states[o].position) < world.crash_distance;
    }
    if (crash) {
      traj.termination = Termination::kCrash;
      break;
    }
    bool any_criterion = false;
    bool cleared = true;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = world.agents[i];
      if (a.clear_s) {
        any_criterion = true;
        cleared = cleared && rt[i].s >= *a.clear_s;
      }
      if (a.clear_after_lane_change) {
        any_criterion = true;
        cleared = cleared && rt[i].lane == LaneState::kDone;
      }
    }
    if (any_criterion && cleared) {
      traj.termination = Termination::kConflictCleared;
      break;
    }
  }
  return traj;
}

}  // namespace falsify
