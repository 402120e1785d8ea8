#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace falsify {

// Per-metric robustness values. Negative means the metric is violated.
struct ObjectiveVector {
  std::vector<double> rho;

  std::size_t size() const noexcept { return rho.size(); }
  bool operator==(const ObjectiveVector&) const = default;
};

// Which metrics a sample falsified.
struct FalsificationVector {
  std::vector<bool> bits;

  std::size_t size() const noexcept { return bits.size(); }
  bool any() const noexcept;
  std::size_t count() const noexcept;
  // Real embedding used for ordering: falsified -> 0, safe -> 1.
  std::vector<double> embed() const;
  std::string to_string() const;  // e.g. "TFT"

  bool operator==(const FalsificationVector&) const = default;
  auto operator<=>(const FalsificationVector& o) const { return bits <=> o.bits; }
};

enum class Dominance { kLeftDominates, kRightDominates, kEquivalent, kIncomparable };

const char* to_string(Dominance d) noexcept;

using Edge = std::pair<std::size_t, std::size_t>;

// Priority DAG over metric indices. An edge (i, j) says metric i outranks
// metric j; precedence is the transitive closure of the edges.
class Rulebook {
 public:
  // Throws DomainError for out-of-range endpoints and ConfigError (naming one
  // cycle) when the edges are not acyclic.
  static Rulebook build(std::size_t metric_count, std::vector<Edge> edges);

  // rho_0 > rho_1 > ... > rho_{n-1}
  static Rulebook total_order(std::size_t metric_count);
  static Rulebook disconnected(std::size_t metric_count);

  std::size_t metric_count() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  // True iff j is reachable from i along at least one edge.
  bool precedes(std::size_t i, std::size_t j) const;

  // The partial order over objective vectors, read as "a is at least as
  // violating as b":
  //   for all i: b_i < a_i  =>  exists j != i: precedes(j, i) and a_j < b_j
  // Reflexive as written.
  bool dominates(std::span<const double> a, std::span<const double> b) const;
  bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) const {
    return dominates(std::span<const double>(a.rho), std::span<const double>(b.rho));
  }
  bool dominates(const FalsificationVector& a, const FalsificationVector& b) const;

  // a dominates b and b does not dominate a.
  bool strictly_dominates(std::span<const double> a, std::span<const double> b) const;
  bool strictly_dominates(const FalsificationVector& a, const FalsificationVector& b) const;

  Dominance compare(std::span<const double> a, std::span<const double> b) const;
  Dominance compare(const ObjectiveVector& a, const ObjectiveVector& b) const {
    return compare(std::span<const double>(a.rho), std::span<const double>(b.rho));
  }

 private:
  Rulebook(std::size_t n, std::vector<Edge> edges, std::vector<bool> reach);
  void check_index(std::size_t i) const;
  void check_length(std::size_t a, std::size_t b) const;

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<bool> reach_;  // n x n, row-major
};

struct MaximalInsert {
  bool accepted = false;  // b is (now) a member of the set
  bool inserted = false;  // b was not a member before
  std::vector<FalsificationVector> evicted;
};

// Offers b to a set of pairwise non-strictly-dominating vectors. b is
// rejected if some member strictly dominates it; otherwise it joins the set
// and every member it strictly dominates is removed.
MaximalInsert insert_maximal(const Rulebook& rb, std::vector<FalsificationVector>& set,
                             const FalsificationVector& b);

}  // namespace falsify
