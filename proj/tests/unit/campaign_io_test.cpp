#include <doctest.h>

#include <sstream>

#include "falsify/campaign_io.hpp"
#include "falsify/errors.hpp"
#include "falsify/experiments.hpp"
#include "temp_dir.hpp"

using namespace falsify;
using nlohmann::json;

namespace {

std::string config_error(const json& doc) {
  try {
    parse_campaign(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

json with(const std::string& id, const json& patch) {
  json doc = example_campaign(id);
  doc.merge_patch(patch);
  return doc;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("every example campaign round trips") {
  std::vector<std::string> ids;
  for (const auto& s : list_scenarios()) ids.push_back(s.id);
  for (const auto& l : landscape_names()) ids.push_back(l);
  for (const auto& id : ids) {
    CAPTURE(id);
    const auto file = parse_campaign(example_campaign(id));
    const auto doc = campaign_to_json(file);
    const auto again = parse_campaign(doc);
    CHECK(campaign_to_json(again) == doc);
    CHECK(again.config.space == file.config.space);
    CHECK(again.config.spec == file.config.spec);
    CHECK(again.config.scenario == file.config.scenario);
    CHECK(again.config.budget == file.config.budget);
    CHECK(again.config.sampler == file.config.sampler);
    CHECK(again.config.rulebook.edges() == file.config.rulebook.edges());
  }
}

TEST_CASE("schema errors") {
  CHECK(config_error(with("1", {{"colour", "red"}})).find("colour") != std::string::npos);
  CHECK(config_error(with("1", {{"sampler", {{"type", "annealing"}}}})).find("annealing") != std::string::npos);
  CHECK_FALSE(config_error(with("1", {{"budget", nullptr}})).empty());
  CHECK_FALSE(config_error(with("1", {{"workers", 0}})).empty());
  CHECK_FALSE(config_error(with("1", {{"workers", -2}})).empty());
  CHECK_FALSE(config_error(with("1", {{"delay", "slow"}})).empty());
  CHECK_FALSE(config_error(with("1", {{"scenario", {{"id", "9"}}}})).empty());
  CHECK_FALSE(config_error(with("1", json::parse(R"({"spec": [{"metric": "min_separation", "agent": "ghost"}]})"))).empty());
  CHECK_FALSE(config_error(with("1", {{"sampler", {{"type", "mab"}, {"buckets", 7}}}})).empty());
  CHECK_FALSE(config_error(with("1", {{"feature_space", {{"bucket_count", 10}, {"dimensions", json::array()}}}})).empty());
  CHECK_FALSE(config_error(with("two-region", {{"scenario", {{"landscape", "three-region"}}}})).empty());
}

TEST_CASE("cyclic rulebook error names the cycle") {
  const auto msg = config_error(with(
      "intersection",
      json::parse(R"({"rulebook": {"type": "graph", "edges": [["adv1", "adv2"], ["adv2", "adv3"], ["adv3", "adv1"]]}})")));
  CHECK(msg.find("cycle") != std::string::npos);
  CHECK(msg.find("0 -> 1 -> 2 -> 0") != std::string::npos);
}

TEST_CASE("rulebook forms") {
  const auto g = parse_campaign(with(
      "intersection",
      json::parse(R"({"rulebook": {"type": "graph", "edges": [["adv1", "adv3"], ["adv3", "adv5"], ["adv2", "adv4"], ["adv4", "adv5"]]}})")));
  const auto& rb = g.config.rulebook;
  CHECK(rb.precedes(0, 4));
  CHECK(rb.precedes(1, 4));
  CHECK_FALSE(rb.precedes(0, 1));
  const auto by_index = parse_campaign(with("intersection", json::parse(R"({"rulebook": {"type": "graph", "edges": [[0, 2], [2, 4]]}})")));
  CHECK(by_index.config.rulebook.precedes(0, 4));
  const auto reordered = parse_campaign(
      with("intersection", {{"rulebook", {{"type", "total_order"}, {"metrics", {"adv5", "adv4", "adv3", "adv2", "adv1"}}}}}));
  CHECK(reordered.config.rulebook.precedes(4, 0));
  CHECK_FALSE(reordered.config.rulebook.precedes(0, 4));
  CHECK_FALSE(config_error(with("intersection", json::parse(R"({"rulebook": {"type": "graph", "edges": [["adv1", "adv9"]]}})"))).empty());
}

TEST_CASE("record and snapshot serialization round trip") {
  auto c = bench::patched(example_campaign("3"), {{"budget", {{"max_samples", 40}}}, {"checkpoint_interval", 10}});
  const auto r = run_serial(c.config, *make_target(c.config));
  for (const auto& rec : r.records()) {
    const auto j = to_json(rec);
    for (const char* key : {"id", "worker", "t_dispatch", "t_complete", "values", "buckets", "rho", "b",
                            "counterexample", "termination", "sim_seconds"}) {
      CHECK(j.contains(key));
    }
    CHECK(to_json(record_from_json(j)) == j);
  }
  const auto snap = to_json(r.final_snapshot);
  CHECK(to_json(snapshot_from_json(snap)) == snap);
  auto restored = restore_sampler(snapshot_from_json(snap), c.config.space, c.config.rulebook);
  CHECK(restored->completed() == 40);
  CHECK_THROWS_AS(snapshot_from_json(json{{"kind", "mab"}}), ConfigError);
}

TEST_CASE("run artifacts are written and re-read") {
  TempDir tmp;
  const auto file =
      bench::patched(example_campaign("1"), {{"budget", {{"max_samples", 30}}}, {"checkpoint_interval", 10}});
  const auto result = run_serial(file.config, *make_target(file.config));
  write_run(tmp.path(), file, result);
  for (const char* f : {"error.csv", "safe.csv", "records.jsonl", "summary.json", "sampler_snapshot.json",
                        "checkpoints.jsonl"}) {
    CHECK(std::filesystem::exists(tmp / f));
  }
  CHECK_FALSE(std::filesystem::exists(tmp / "failed.jsonl"));

  const auto summary = read_json(tmp / "summary.json");
  CHECK(summary["totals"]["samples"] == 30);
  CHECK(summary["totals"]["counterexamples"] == result.totals.counterexamples);

  const auto safe = split_lines(read_text(tmp / "safe.csv"));
  REQUIRE_FALSE(safe.empty());
  CHECK(safe[0].rfind("id,worker,t_dispatch,t_complete", 0) == 0);
  CHECK(safe[0].find("ego_speed") != std::string::npos);
  CHECK(safe.size() == result.safe_table.size() + 1);
  CHECK(split_lines(read_text(tmp / "error.csv")).size() == result.error_table.size() + 1);

  for (const auto& line : split_lines(read_text(tmp / "records.jsonl"))) CHECK_NOTHROW(record_from_json(json::parse(line)));
  CHECK(split_lines(read_text(tmp / "checkpoints.jsonl")).size() == 3);
  CHECK_NOTHROW(snapshot_from_json(read_json(tmp / "sampler_snapshot.json")));

  const auto back = read_run(tmp.path());
  CHECK(back.records.size() == 30);
  CHECK(campaign_to_json(back.campaign) == campaign_to_json(file));
  for (std::size_t i = 0; i < back.records.size(); ++i) CHECK(to_json(back.records[i]) == to_json(result.records()[i]));
}

TEST_CASE("read_run rejects missing artifacts") {
  TempDir tmp;
  CHECK_THROWS_AS(read_run(tmp.path()), ConfigError);
  CHECK_THROWS_AS(read_run(tmp / "absent"), ConfigError);
  tmp.write_json("summary.json", json{{"scenario", "1"}});
  CHECK_THROWS_AS(read_run(tmp.path()), ConfigError);
}

TEST_CASE("stats document with and without a CI") {
  const auto file = bench::patched(example_campaign("1"), {{"budget", {{"max_samples", 30}}}});
  const auto result = run_serial(file.config, *make_target(file.config));
  const auto stats = coverage_stats(result);
  const auto with_ci = to_json(stats, true);
  CHECK(with_ci["ci"]["lo"].get<double>() <= with_ci["proportion"].get<double>());
  CHECK(with_ci["ci"]["width"].get<double>() > 0.0);
  const auto without = to_json(stats, false);
  CHECK(without["ci"].is_null());
  CHECK(without.contains("ci_note"));
}

TEST_CASE("trajectory dump") {
  TempDir tmp;
  const auto file =
      bench::patched(example_campaign("6"), {{"budget", {{"max_samples", 3}}}, {"dump_trajectories", true}});
  write_run(tmp.path(), file, run_serial(file.config, *make_target(file.config)));
  const auto lines = split_lines(read_text(tmp / "trajectories.jsonl"));
  REQUIRE_FALSE(lines.empty());
  const auto first = json::parse(lines[0]);
  CHECK(first.contains("sample"));
  CHECK(first.contains("frame"));
}
