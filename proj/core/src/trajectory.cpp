#include "falsify/trajectory.hpp"

#include "falsify/errors.hpp"

namespace falsify {

const char* to_string(AgentRole r) noexcept {
  switch (r) {
    case AgentRole::kEgo: return "ego";
    case AgentRole::kVehicle: return "vehicle";
    case AgentRole::kPedestrian: return "pedestrian";
  }
  return "unknown";
}

const char* to_string(Termination t) noexcept {
  switch (t) {
    case Termination::kNone: return "none";
    case Termination::kConflictCleared: return "cleared";
    case Termination::kCrash: return "crash";
  }
  return "unknown";
}

std::optional<Termination> termination_from_string(std::string_view s) noexcept {
  if (s == "none") return Termination::kNone;
  if (s == "cleared") return Termination::kConflictCleared;
  if (s == "crash") return Termination::kCrash;
  return std::nullopt;
}

std::optional<std::size_t> Trajectory::find_agent(std::string_view name) const {
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Trajectory::ego_index() const {
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].role == AgentRole::kEgo) return i;
  }
  throw ConfigError("trajectory has no ego agent");
}

}  // namespace falsify
