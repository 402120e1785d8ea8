#include "falsify/monitor.hpp"

#include <algorithm>
#include <limits>

#include "falsify/errors.hpp"

namespace falsify {

std::string MetricSpec::label() const {
  std::string out = kind == MetricKind::kMinSeparation ? "min_separation(" : "disjunction(";
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (i) out += ",";
    out += agents[i];
  }
  return out + ")";
}

Specification Specification::min_separation(const std::vector<std::string>& agents, double threshold) {
  Specification spec;
  for (const auto& a : agents) spec.metrics.push_back({MetricKind::kMinSeparation, {a}, threshold, a});
  return spec;
}

namespace {

double min_separation(const Trajectory& traj, std::size_t ego, std::size_t other) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : traj.frames) {
    best = std::min(best, distance(f.agents[ego].position, f.agents[other].position));
  }
  return best;
}

std::size_t resolve(const Trajectory& traj, const std::string& name) {
  auto idx = traj.find_agent(name);
  if (!idx) throw ConfigError("specification references unknown agent '" + name + "'");
  return *idx;
}

}  // namespace

ObjectiveVector evaluate(const Specification& spec, const Trajectory& traj) {
  if (traj.frames.empty()) throw DomainError("cannot evaluate an empty trajectory");
  const std::size_t ego = traj.ego_index();
  ObjectiveVector out;
  out.rho.reserve(spec.size());
  for (const auto& m : spec.metrics) {
    if (m.agents.empty()) throw ConfigError("metric " + m.label() + " names no agent");
    if (m.kind == MetricKind::kMinSeparation) {
      if (m.agents.size() != 1) throw ConfigError("min_separation takes exactly one agent");
      out.rho.push_back(min_separation(traj, ego, resolve(traj, m.agents[0])) - m.threshold);
    } else {
      double worst = -std::numeric_limits<double>::infinity();
      for (const auto& a : m.agents) {
        worst = std::max(worst, min_separation(traj, ego, resolve(traj, a)) - m.threshold);
      }
      out.rho.push_back(worst);
    }
  }
  return out;
}

FalsificationVector falsification_vector(const ObjectiveVector& rho) {
  FalsificationVector b;
  b.bits.reserve(rho.size());
  for (double r : rho.rho) b.bits.push_back(r < 0.0);
  return b;
}

}  // namespace falsify
