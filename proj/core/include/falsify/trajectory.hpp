#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace falsify {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const noexcept { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const noexcept { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const noexcept { return {x * s, y * s}; }
  double dot(Vec2 o) const noexcept { return x * o.x + y * o.y; }
  double norm() const noexcept { return std::hypot(x, y); }
  bool operator==(const Vec2&) const = default;
};

inline double distance(Vec2 a, Vec2 b) noexcept { return (a - b).norm(); }
inline Vec2 heading_unit(double heading) noexcept { return {std::cos(heading), std::sin(heading)}; }

enum class AgentRole { kEgo, kVehicle, kPedestrian };

const char* to_string(AgentRole r) noexcept;

struct AgentInfo {
  std::string name;
  AgentRole role = AgentRole::kVehicle;
};

struct AgentState {
  Vec2 position;
  double heading = 0.0;  // radians, counter-clockwise from +x
  double speed = 0.0;    // m/s

  bool operator==(const AgentState&) const = default;
};

struct Frame {
  std::vector<AgentState> agents;  // same order as Trajectory::agents

  bool operator==(const Frame&) const = default;
};

enum class Termination { kNone, kConflictCleared, kCrash };

const char* to_string(Termination t) noexcept;
std::optional<Termination> termination_from_string(std::string_view s) noexcept;

// Time-indexed agent states. Agent 0 is the ego.
struct Trajectory {
  double timestep = 0.1;  // seconds per frame
  std::vector<AgentInfo> agents;
  std::vector<Frame> frames;
  Termination termination = Termination::kNone;

  std::optional<std::size_t> find_agent(std::string_view name) const;
  std::size_t ego_index() const;
};

}  // namespace falsify
