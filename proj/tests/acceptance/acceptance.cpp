// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.
//
//   falsify_acceptance [--scratch DIR] [--only 1,4,9]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "falsify/analysis.hpp"
#include "falsify/campaign_io.hpp"
#include "falsify/experiments.hpp"
#include "falsify/rulebook.hpp"
#include "falsify/samplers.hpp"

using namespace falsify;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

// adv1 > adv3 > adv5 and adv2 > adv4 > adv5
const json kGraphG =
    json::parse(R"({"type": "graph", "edges": [["adv1", "adv3"], ["adv3", "adv5"], ["adv2", "adv4"], ["adv4", "adv5"]]})");

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Independent reading of the dominance formula over an explicit
// reachability table.
bool formula_dominates(const std::vector<std::vector<bool>>& reach, const std::vector<double>& a,
                       const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(b[i] < a[i])) continue;
    bool excused = false;
    for (std::size_t j = 0; j < a.size() && !excused; ++j) excused = j != i && reach[j][i] && a[j] < b[j];
    if (!excused) return false;
  }
  return true;
}

std::vector<std::vector<bool>> closure(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (const auto& [i, j] : edges) r[i][j] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) r[i][j] = r[i][j] || (r[i][k] && r[k][j]);
  return r;
}

std::vector<Edge> random_dag(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
  const double density = uniform01(rng);
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (uniform01(rng) < density) edges.emplace_back(order[a], order[b]);
  return edges;
}

Verdict c1_worked_example() {
  const auto t0 = Clock::now();
  const auto rb = Rulebook::build(6, {{0, 2}, {0, 1}, {1, 3}, {2, 3}, {4, 2}, {2, 5}});
  const std::vector<double> x2{1, 1, 2, 1, 0, 1}, x1{1, 1, 1, 1, 1, 1};
  const bool forward = rb.dominates(x2, x1);
  const bool reverse = rb.strictly_dominates(x1, x2);
  const double ms = seconds_since(t0) * 1e3;
  return {forward && !reverse && ms < 1.0,
          "dominates=" + std::string(forward ? "true" : "false") + " reverse strict=" + (reverse ? "true" : "false") +
              " in " + fmt(ms, 3) + " ms"};
}

Verdict c2_dominance_oracle() {
  const auto t0 = Clock::now();
  Rng rng(20240601);
  int mismatches = 0;
  const int instances = 10000;
  for (int k = 0; k < instances; ++k) {
    const std::size_t n = 1 + uniform_index(rng, 6);
    const auto edges = random_dag(n, rng);
    const auto rb = Rulebook::build(n, edges);
    const auto reach = closure(n, edges);
    std::vector<double> a(n), b(n);
    for (auto& x : a) x = static_cast<double>(uniform_index(rng, 3));
    for (auto& x : b) x = static_cast<double>(uniform_index(rng, 3));
    const bool ab = formula_dominates(reach, a, b), ba = formula_dominates(reach, b, a);
    const Dominance want = ab && ba ? Dominance::kEquivalent
                           : ab     ? Dominance::kLeftDominates
                           : ba     ? Dominance::kRightDominates
                                    : Dominance::kIncomparable;
    mismatches += rb.compare(a, b) != want;
  }
  const double s = seconds_since(t0);
  return {mismatches == 0 && s < 5.0,
          std::to_string(instances) + " instances, " + std::to_string(mismatches) + " mismatches, " + fmt(s, 3) + " s"};
}

Verdict c3_ucb() {
  const double q = compute_ucb(0.5, 4, 100);
  bool exact = true;
  for (double mu : {0.0, 0.25, 0.5, 0.731, 1.0})
    for (std::uint64_t v : {1, 2, 9, 1000}) exact = exact && compute_ucb(mu, v, 1) == mu;
  return {std::abs(q - 2.01743) <= 1e-5 && exact,
          "compute_ucb(0.5,4,100)=" + fmt(q, 8) + ", t=1 exact: " + (exact ? "yes" : "no")};
}

Verdict c4_mab_invariants() {
  const auto t0 = Clock::now();
  Rng rng(4);
  std::size_t violations = 0;
  const int sequences = 50;
  for (int k = 0; k < sequences; ++k) {
    const std::size_t metrics = 1 + uniform_index(rng, 5);
    const auto rb = Rulebook::build(metrics, random_dag(metrics, rng));
    const std::size_t dims = 1 + uniform_index(rng, 4);
    std::vector<Dimension> d;
    for (std::size_t i = 0; i < dims; ++i) d.push_back({"d" + std::to_string(i), 0.0, 1.0});
    MabSampler m(FeatureSpace(d, 2 + uniform_index(rng, 10)), rb, uniform_index(rng, 1u << 30));
    const double rate = 0.05 + 0.4 * uniform01(rng);
    for (int step = 1; step <= 1000; ++step) {
      const auto s = m.next_sample();
      std::vector<bool> bits(metrics);
      std::vector<double> rho(metrics);
      bool any = false;
      for (std::size_t j = 0; j < metrics; ++j) {
        bits[j] = uniform01(rng) < rate;
        rho[j] = bits[j] ? -1.0 : 1.0;
        any = any || bits[j];
      }
      m.update({s, ObjectiveVector{rho}, FalsificationVector{bits}, any});
      const auto snap = m.snapshot();
      violations += bench::mab_invariant_violations(snap, rb).size();
      violations += snap.completed != static_cast<std::uint64_t>(step);
    }
  }
  const double s = seconds_since(t0);
  return {violations == 0 && s < 10.0, std::to_string(sequences) + " sequences x 1000 steps, " +
                                           std::to_string(violations) + " violations, " + fmt(s, 3) + " s"};
}

Verdict c5_concentration() {
  const auto file = parse_campaign(json{{"scenario", {{"landscape", "single-bucket"}}},
                                        {"sampler", {{"type", "mab"}}},
                                        {"budget", {{"max_samples", 500}}}});
  const auto m = bench::measure_concentration(file, 10, 0, 3);
  const auto above = std::count_if(m.shares.begin(), m.shares.end(), [](double s) { return s > 0.5; });
  std::string shares;
  for (double s : m.shares) shares += fmt(s, 3) + " ";
  return {above >= 8, std::to_string(above) + "/10 seeds above 0.5 (" + shares + ")"};
}

Verdict c6_balance() {
  const auto file = parse_campaign(json{{"scenario", {{"landscape", "two-region"}}},
                                        {"sampler", {{"type", "mab"}}},
                                        {"budget", {{"max_samples", 500}}}});
  const auto rows = bench::measure_balance(file, {"mab", "cross-entropy", "halton"}, 10);
  const auto& mab = rows[0];
  const auto& ce = rows[1];
  const auto& halton = rows[2];
  const bool pass = mab.median_count >= 0.7 * ce.median_count && mab.median_diversity >= ce.median_diversity &&
                    mab.median_count >= halton.median_count;
  return {pass, "median count mab " + fmt(mab.median_count) + " ce " + fmt(ce.median_count) + " halton " +
                    fmt(halton.median_count) + "; diversity mab " + fmt(mab.median_diversity) + " ce " +
                    fmt(ce.median_diversity)};
}

Verdict c7_speedup() {
  const auto file = parse_campaign(json{{"scenario", {{"id", "1"}}},
                                        {"sampler", {{"type", "mab"}}},
                                        {"budget", {{"max_wall_seconds", 60.0}}},
                                        {"delay", 0.2},
                                        {"seed", 1}});
  const auto m = bench::measure_speedup(file, 5);
  return {m.ratio >= 3.0 && m.ratio <= 5.0, "serial " + std::to_string(m.serial) + ", parallel " +
                                                std::to_string(m.parallel) + ", ratio " + fmt(m.ratio)};
}

Verdict c8_integrity() {
  const auto t0 = Clock::now();
  const auto file = parse_campaign(json{
      {"scenario", {{"id", "intersection"}, {"adversaries", 5}}},
      {"rulebook", kGraphG},
      {"sampler", {{"type", "mab"}}},
      {"budget", {{"max_samples", 400}}},
      {"workers", 8},
      {"delay", 0.005},
      {"delay_jitter", 0.03},
      {"seed", 3}});
  const auto m = bench::measure_integrity(file, 0.05);
  const double s = seconds_since(t0);
  const bool pass = m.totals.dispatched == 400 && m.totals.dispatched == m.totals.completed + m.totals.failed &&
                    m.ids_accounted && m.applied_once && m.violations.empty() && s < 60.0;
  return {pass, "dispatched " + std::to_string(m.totals.dispatched) + " = completed " +
                    std::to_string(m.totals.completed) + " + failed " + std::to_string(m.totals.failed) +
                    ", applied once: " + (m.applied_once ? "yes" : "no") + ", invariant violations " +
                    std::to_string(m.violations.size()) + ", " + fmt(s, 3) + " s"};
}

// P(X <= k), X ~ Binomial(n, p).
double binom_cdf(int k, int n, double p) {
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  double total = 0.0;
  for (int i = 0; i <= k; ++i) {
    total += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + i * std::log(p) +
                      (n - i) * std::log1p(-p));
  }
  return total;
}

double bisect(const std::function<double(double)>& f) {
  double lo = 0.0, hi = 1.0;  // f(lo) < 0 < f(hi)
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Verdict c9_clopper_pearson() {
  const auto t0 = Clock::now();
  const auto a = clopper_pearson(0, 10, 0.95);
  const auto b = clopper_pearson(10, 10, 0.95);
  bool pass = a.lo == 0.0 && std::abs(a.hi - 0.30850) <= 1e-4 && std::abs(b.lo - 0.69150) <= 1e-4 && b.hi == 1.0;
  double worst = 0.0;
  for (int n = 1; n <= 50; ++n) {
    for (int k = 0; k <= n; ++k) {
      const auto ci = clopper_pearson(k, n, 0.95);
      const double lo = k == 0 ? 0.0 : bisect([&](double p) { return (1.0 - binom_cdf(k - 1, n, p)) - 0.025; });
      const double hi = k == n ? 1.0 : bisect([&](double p) { return 0.025 - binom_cdf(k, n, p); });
      worst = std::max({worst, std::abs(ci.lo - lo), std::abs(ci.hi - hi)});
    }
  }
  const double s = seconds_since(t0);
  pass = pass && worst <= 1e-6 && s < 5.0;
  return {pass, "(0,10)->(" + fmt(a.lo) + ", " + fmt(a.hi, 6) + "), (10,10)->(" + fmt(b.lo, 6) + ", " + fmt(b.hi) +
                    "), max oracle gap " + fmt(worst, 3) + ", " + fmt(s, 3) + " s"};
}

Verdict c10_width_scaling() {
  bool pass = true;
  std::string detail;
  for (double p : {0.05, 0.1, 0.2, 0.3, 0.5}) {
    for (std::uint64_t n : {100, 200, 500}) {
      const double r = bench::synthetic_width_ratio(p, n, 4);
      pass = pass && r >= 0.4 && r <= 0.6;
      if (n == 200) detail += "p=" + fmt(p) + ":" + fmt(r, 3) + " ";
    }
  }
  return {pass, detail + "(n_s in {100,200,500})"};
}

Verdict c11_multi_objective() {
  const json base{{"scenario", {{"id", "intersection"}, {"adversaries", 5}}},
                  {"sampler", {{"type", "mab"}}},
                  {"budget", {{"max_wall_seconds", 3.0}}},
                  {"delay", 0.05}};
  const std::map<std::string, json> rulebooks{
      {"L", {{"type", "total_order"}, {"metrics", {"adv1", "adv2", "adv3", "adv4", "adv5"}}}},
      {"G", kGraphG},
      {"disconnected", {{"type", "disconnected"}}}};
  const std::vector<std::pair<std::string, std::size_t>> variants{
      {"L", 1}, {"L", 5}, {"G", 1}, {"G", 5}, {"disconnected", 1}};
  const json baseline{
      {"scenario", {{"id", "intersection"}, {"adversaries", 5}}},
      {"spec", json::parse(R"([{"metric": "disjunction", "agents": ["adv1", "adv2", "adv3", "adv4", "adv5"],
                               "name": "any_adversary"}])")},
      {"sampler", {{"type", "cross-entropy"}}},
      {"budget", {{"max_samples", 1500}}}};
  const auto m = bench::measure_multi_objective(base, rulebooks, variants, baseline, 10);
  const double disc = m.find("disconnected", 1).median_falsified;
  bool pass = true;
  std::string detail;
  for (const char* rb : {"L", "G"}) {
    const double ser = m.find(rb, 1).median_falsified, par = m.find(rb, 5).median_falsified;
    pass = pass && par >= ser && ser >= disc;
    detail += std::string(rb) + " par " + fmt(par) + " >= ser " + fmt(ser) + "; ";
  }
  const auto cex = std::accumulate(m.baseline_counterexamples.begin(), m.baseline_counterexamples.end(), 0ull);
  pass = pass && cex == 0;
  return {pass, detail + "disconnected ser " + fmt(disc) + "; disjunction baseline " + std::to_string(cex) +
                    " counterexamples"};
}

Verdict c12_determinism(const std::filesystem::path& scratch) {
  const auto t0 = Clock::now();
  const auto file = parse_campaign(json{{"scenario", {{"id", "3"}}},
                                        {"sampler", {{"type", "mab"}}},
                                        {"budget", {{"max_samples", 300}}},
                                        {"seed", 42}});
  const auto m = bench::measure_determinism(file, 4, scratch / "determinism");
  const double s = seconds_since(t0);
  return {m.records_identical && m.halton_multiset_equal && s < 30.0,
          std::to_string(m.records) + " records identical: " + (m.records_identical ? "yes" : "no") +
              ", halton multiset W=1 vs W=4 equal: " + (m.halton_multiset_equal ? "yes" : "no") + ", " + fmt(s, 3) +
              " s"};
}

}  // namespace

int main(int argc, char** argv) {
  std::filesystem::path scratch = std::filesystem::temp_directory_path() / "falsify-acceptance";
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--scratch" && i + 1 < argc) {
      scratch = argv[++i];
    } else if (a == "--only" && i + 1 < argc) {
      std::stringstream list(argv[++i]);
      for (std::string item; std::getline(list, item, ',');) only.insert(std::stoi(item));
    } else {
      std::fprintf(stderr, "usage: %s [--scratch DIR] [--only 1,2,...]\n", argv[0]);
      return 2;
    }
  }
  std::filesystem::create_directories(scratch);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"partial-order worked example", c1_worked_example},
      {"dominance oracle equivalence", c2_dominance_oracle},
      {"UCB arithmetic", c3_ucb},
      {"MAB bookkeeping invariants", c4_mab_invariants},
      {"MAB concentration", c5_concentration},
      {"sampler balance", c6_balance},
      {"parallel speedup", c7_speedup},
      {"feedback integrity under parallelism", c8_integrity},
      {"Clopper-Pearson", c9_clopper_pearson},
      {"CI width scaling", c10_width_scaling},
      {"multi-objective falsification ordering", c11_multi_objective},
      {"determinism", [&] { return c12_determinism(scratch); }},
  };

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("%s  %2d  %-40s %s\n", v.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
