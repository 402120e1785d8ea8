#include "falsify/rulebook.hpp"

#include <algorithm>
#include <functional>

#include "falsify/errors.hpp"

namespace falsify {

bool FalsificationVector::any() const noexcept {
  return std::find(bits.begin(), bits.end(), true) != bits.end();
}

std::size_t FalsificationVector::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
}

std::vector<double> FalsificationVector::embed() const {
  std::vector<double> out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) out[i] = bits[i] ? 0.0 : 1.0;
  return out;
}

std::string FalsificationVector::to_string() const {
  std::string s;
  s.reserve(bits.size());
  for (bool b : bits) s.push_back(b ? 'T' : 'F');
  return s;
}

const char* to_string(Dominance d) noexcept {
  switch (d) {
    case Dominance::kLeftDominates: return "left-dominates";
    case Dominance::kRightDominates: return "right-dominates";
    case Dominance::kEquivalent: return "equivalent";
    case Dominance::kIncomparable: return "incomparable";
  }
  return "unknown";
}

Rulebook::Rulebook(std::size_t n, std::vector<Edge> edges, std::vector<bool> reach)
    : n_(n), edges_(std::move(edges)), reach_(std::move(reach)) {}

Rulebook Rulebook::build(std::size_t metric_count, std::vector<Edge> edges) {
  if (metric_count == 0) throw DomainError("rulebook needs at least one metric");
  std::vector<std::vector<std::size_t>> adj(metric_count);
  for (const auto& [i, j] : edges) {
    if (i >= metric_count || j >= metric_count) {
      throw DomainError("rulebook edge (" + std::to_string(i) + ", " + std::to_string(j) +
                        ") has an endpoint outside [0, " + std::to_string(metric_count) + ")");
    }
    adj[i].push_back(j);
  }

  // Three-colour DFS; a back edge closes a cycle that we report.
  enum class Mark { kWhite, kGrey, kBlack };
  std::vector<Mark> mark(metric_count, Mark::kWhite);
  std::vector<std::size_t> stack;
  std::function<void(std::size_t)> visit = [&](std::size_t u) {
    mark[u] = Mark::kGrey;
    stack.push_back(u);
    for (std::size_t v : adj[u]) {
      if (mark[v] == Mark::kGrey) {
        auto start = std::find(stack.begin(), stack.end(), v);
        std::string cycle;
        for (auto it = start; it != stack.end(); ++it) cycle += std::to_string(*it) + " -> ";
        cycle += std::to_string(v);
        throw ConfigError("rulebook is not acyclic: cycle " + cycle);
      }
      if (mark[v] == Mark::kWhite) visit(v);
    }
    stack.pop_back();
    mark[u] = Mark::kBlack;
  };
  for (std::size_t u = 0; u < metric_count; ++u) {
    if (mark[u] == Mark::kWhite) visit(u);
  }

  std::vector<bool> reach(metric_count * metric_count, false);
  for (std::size_t s = 0; s < metric_count; ++s) {
    std::vector<std::size_t> frontier(adj[s].begin(), adj[s].end());
    while (!frontier.empty()) {
      const std::size_t v = frontier.back();
      frontier.pop_back();
      if (reach[s * metric_count + v]) continue;
      reach[s * metric_count + v] = true;
      frontier.insert(frontier.end(), adj[v].begin(), adj[v].end());
    }
  }

  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return Rulebook(metric_count, std::move(edges), std::move(reach));
}

Rulebook Rulebook::total_order(std::size_t metric_count) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < metric_count; ++i) edges.emplace_back(i, i + 1);
  return build(metric_count, std::move(edges));
}

Rulebook Rulebook::disconnected(std::size_t metric_count) { return build(metric_count, {}); }

void Rulebook::check_index(std::size_t i) const {
  if (i >= n_) throw DomainError("metric index " + std::to_string(i) + " out of range");
}

void Rulebook::check_length(std::size_t a, std::size_t b) const {
  if (a != n_ || b != n_) {
    throw DomainError("objective vectors of length " + std::to_string(a) + " and " + std::to_string(b) +
                      " compared under a rulebook over " + std::to_string(n_) + " metrics");
  }
}

bool Rulebook::precedes(std::size_t i, std::size_t j) const {
  check_index(i);
  check_index(j);
  return reach_[i * n_ + j];
}

bool Rulebook::dominates(std::span<const double> a, std::span<const double> b) const {
  check_length(a.size(), b.size());
  for (std::size_t i = 0; i < n_; ++i) {
    if (!(b[i] < a[i])) continue;
    bool excused = false;
    for (std::size_t j = 0; j < n_ && !excused; ++j) {
      excused = j != i && reach_[j * n_ + i] && a[j] < b[j];
    }
    if (!excused) return false;
  }
  return true;
}

bool Rulebook::dominates(const FalsificationVector& a, const FalsificationVector& b) const {
  return dominates(a.embed(), b.embed());
}

bool Rulebook::strictly_dominates(std::span<const double> a, std::span<const double> b) const {
  return dominates(a, b) && !dominates(b, a);
}

bool Rulebook::strictly_dominates(const FalsificationVector& a, const FalsificationVector& b) const {
  const auto ea = a.embed();
  const auto eb = b.embed();
  return strictly_dominates(ea, eb);
}

Dominance Rulebook::compare(std::span<const double> a, std::span<const double> b) const {
  const bool ab = dominates(a, b);
  const bool ba = dominates(b, a);
  if (ab && ba) return Dominance::kEquivalent;
  if (ab) return Dominance::kLeftDominates;
  if (ba) return Dominance::kRightDominates;
  return Dominance::kIncomparable;
}

MaximalInsert insert_maximal(const Rulebook& rb, std::vector<FalsificationVector>& set,
                             const FalsificationVector& b) {
  if (b.size() != rb.metric_count()) {
    throw DomainError("falsification vector length " + std::to_string(b.size()) +
                      " does not match rulebook over " + std::to_string(rb.metric_count()) + " metrics");
  }
  MaximalInsert out;
  if (std::find(set.begin(), set.end(), b) != set.end()) {
    out.accepted = true;
    return out;
  }
  for (const auto& member : set) {
    if (member.size() != b.size()) throw DomainError("falsification vectors differ in length");
    if (rb.strictly_dominates(member, b)) return out;
  }
  auto keep = std::stable_partition(set.begin(), set.end(),
                                    [&](const FalsificationVector& m) { return !rb.strictly_dominates(b, m); });
  out.evicted.assign(keep, set.end());
  set.erase(keep, set.end());
  set.push_back(b);
  out.accepted = true;
  out.inserted = true;
  return out;
}

}  // namespace falsify
