#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <set>

#include "falsify/campaign_io.hpp"
#include "falsify/errors.hpp"
#include "falsify/experiments.hpp"
#include "falsify/orchestrator.hpp"

using namespace falsify;
using nlohmann::json;

namespace {

CampaignConfig campaign(const std::string& id, const json& patch) {
  return bench::patched(example_campaign(id), patch).config;
}

// Record fields that do not depend on wall-clock timing.
json stable(const SampleRecord& r) {
  json j = to_json(r);
  j.erase("t_dispatch");
  j.erase("t_complete");
  j.erase("sim_seconds");
  return j;
}

std::vector<json> stable(const std::vector<SampleRecord>& records) {
  std::vector<json> out;
  for (const auto& r : records) out.push_back(stable(r));
  return out;
}

std::multiset<std::vector<double>> value_multiset(const CampaignResult& r) {
  std::multiset<std::vector<double>> out;
  for (const auto& rec : r.records()) out.insert(rec.sample.values);
  return out;
}

// Counts calls and fails on a chosen one.
class Tripwire final : public SimulationTarget {
 public:
  Tripwire(const SimulationTarget& inner, int fail_at) : inner_(inner), fail_at_(fail_at) {}
  std::size_t metric_count() const override { return inner_.metric_count(); }
  Evaluation run(const SampleVector& s) const override {
    if (calls_++ == fail_at_) throw DomainError("tripwire");
    return inner_.run(s);
  }

 private:
  const SimulationTarget& inner_;
  int fail_at_;
  mutable std::atomic<int> calls_{0};
};

}  // namespace

TEST_CASE("serial budget partitions the records") {
  const auto c = campaign("1", {{"budget", {{"max_samples", 10}}}});
  const auto r = run_serial(c, *make_target(c));
  CHECK(r.error_table.size() + r.safe_table.size() == 10);
  CHECK(r.totals.completed == 10);
  CHECK(r.totals.dispatched == 10);
  CHECK(r.totals.counterexamples == r.error_table.size());
  for (const auto& rec : r.error_table) CHECK(rec.counterexample);
  for (const auto& rec : r.safe_table) CHECK_FALSE(rec.counterexample);
  const auto all = r.records();
  for (std::size_t i = 0; i < all.size(); ++i) {
    CHECK(all[i].id == i);
    CHECK(all[i].counterexample == all[i].b.any());
  }
}

TEST_CASE("serial runs are deterministic for a seed") {
  const auto c = campaign("3", {{"budget", {{"max_samples", 120}}}, {"seed", 9}});
  const auto a = run_serial(c, *make_target(c));
  const auto b = run_serial(c, *make_target(c));
  CHECK(stable(a.error_table) == stable(b.error_table));
  CHECK(stable(a.records()) == stable(b.records()));
  const auto other = campaign("3", {{"budget", {{"max_samples", 120}}}, {"seed", 10}});
  CHECK(stable(run_serial(other, *make_target(other)).records()) != stable(a.records()));
}

TEST_CASE("uniform sampling finds a scenario 1 counterexample in 200 samples") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto c = campaign("1", {{"sampler", {{"type", "uniform"}}}, {"budget", {{"max_samples", 200}}}, {"seed", seed}});
    CHECK(run_serial(c, *make_target(c)).totals.counterexamples >= 1);
  }
}

TEST_CASE("a single worker pool matches the serial loop") {
  const auto c = campaign("2", {{"budget", {{"max_samples", 80}}}, {"seed", 4}});
  const auto serial = run_serial(c, *make_target(c));
  const auto pool = run_parallel(c, *make_target(c));
  CHECK(stable(serial.records()) == stable(pool.records()));
  CHECK(serial.final_snapshot.visits == pool.final_snapshot.visits);
}

TEST_CASE("non-adaptive samplers generate the same samples for any worker count") {
  for (const char* sampler : {"halton", "uniform"}) {
    CAPTURE(sampler);
    const auto c1 = campaign("1", {{"sampler", {{"type", sampler}}}, {"budget", {{"max_samples", 150}}}, {"seed", 3}});
    const auto c5 = campaign("1", {{"sampler", {{"type", sampler}}},
                                   {"budget", {{"max_samples", 150}}},
                                   {"seed", 3},
                                   {"workers", 5},
                                   {"delay_jitter", 0.003}});
    const auto serial = run_serial(c1, *make_target(c1));
    const auto parallel = run_parallel(c5, *make_target(c5));
    CHECK(value_multiset(serial) == value_multiset(parallel));
  }
}

TEST_CASE("stress: feedback applied exactly once with eight workers") {
  const auto c = campaign("intersection", {{"budget", {{"max_samples", 300}}},
                                           {"workers", 8},
                                           {"delay", 0.001},
                                           {"delay_jitter", 0.01},
                                           {"rulebook", {{"type", "total_order"}}}});
  const auto r = run_parallel(c, *make_target(c));
  CHECK(r.totals.dispatched == 300);
  CHECK(r.totals.dispatched == r.totals.completed + r.totals.failed);
  CHECK(r.final_snapshot.completed == r.totals.completed);
  for (std::size_t d = 0; d < r.final_snapshot.visits.rows(); ++d) {
    std::uint64_t total = 0;
    for (auto v : r.final_snapshot.visits.row(d)) total += v;
    CHECK(total == r.totals.completed);
  }
  CHECK(bench::mab_invariant_violations(r.final_snapshot, c.rulebook).empty());
  std::set<std::size_t> workers;
  for (const auto& rec : r.records()) workers.insert(rec.worker);
  CHECK(workers.size() > 1);
  for (const auto& rec : r.records()) CHECK(rec.t_complete >= rec.t_dispatch);
}

TEST_CASE("serial failure aborts with the partial result") {
  const auto c = campaign("1", {{"budget", {{"max_samples", 20}}}});
  const auto inner = make_target(c);
  const Tripwire target(*inner, 5);
  try {
    run_serial(c, target);
    FAIL("expected an abort");
  } catch (const CampaignAborted& e) {
    CHECK(e.partial().totals.completed == 5);
    CHECK(e.partial().totals.failed == 1);
    CHECK(e.partial().records().size() == 5);
    CHECK(std::string(e.what()).find("tripwire") != std::string::npos);
  }
}

TEST_CASE("parallel failure is recorded and the campaign continues") {
  const auto c = campaign("1", {{"budget", {{"max_samples", 30}}}, {"workers", 3}});
  const auto inner = make_target(c);
  const Tripwire target(*inner, 7);
  const auto r = run_parallel(c, target);
  CHECK(r.totals.failed == 1);
  CHECK(r.totals.completed == 29);
  CHECK(r.failed.size() == 1);
  CHECK(r.failed[0].error == "tripwire");
  CHECK(r.records().size() == 29);
}

TEST_CASE("wall-clock budget stops dispatch") {
  const auto c = campaign("1", {{"budget", {{"max_wall_seconds", 0.5}}}, {"delay", 0.05}});
  const auto r = run_serial(c, *make_target(c));
  CHECK(r.totals.completed >= 8);
  CHECK(r.totals.completed <= 11);
  CHECK(r.totals.wall_seconds < 0.7);
}

TEST_CASE("checkpoints follow the interval") {
  const auto c = campaign("1", {{"budget", {{"max_samples", 50}}}, {"checkpoint_interval", 20}});
  const auto r = run_serial(c, *make_target(c));
  REQUIRE(r.checkpoints.size() == 2);
  CHECK(r.checkpoints[0].completed == 20);
  CHECK(r.checkpoints[1].snapshot.completed == 40);
}

TEST_CASE("config validation") {
  auto c = campaign("1", json::object());
  c.budget = {};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = campaign("1", json::object());
  c.workers = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = campaign("1", json::object());
  c.delay = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = campaign("1", json::object());
  c.rulebook = Rulebook::total_order(2);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = campaign("1", json::object());
  c.budget.max_wall_seconds = 0.0;
  CHECK_THROWS_AS(run_serial(c, *make_target(c)), ConfigError);
}

TEST_CASE("trajectories are kept on request") {
  const auto c = campaign("1", {{"budget", {{"max_samples", 4}}}, {"dump_trajectories", true}});
  const auto r = run_serial(c, *make_target(c));
  REQUIRE(r.trajectories.size() == 4);
  CHECK(r.trajectories[0].second.agents.size() == 2);
  CHECK_FALSE(r.trajectories[0].second.frames.empty());
}
