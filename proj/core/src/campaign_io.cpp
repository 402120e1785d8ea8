#include "falsify/campaign_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "falsify/errors.hpp"

namespace falsify {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
T read(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
std::optional<T> read_opt(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return read<T>(obj, key, where);
}

std::uint64_t read_count(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError(where + "." + key + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::optional<std::uint64_t> read_count_opt(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return read_count(obj, key, where);
}

ScenarioConfig parse_scenario(const json& j, std::optional<std::string>& landscape) {
  const std::string where = "scenario";
  check_keys(j, {"id", "landscape", "adversaries", "lane_width", "exit_length", "max_timesteps", "timestep",
                 "bindings", "fixed"},
             where);
  ScenarioConfig c;
  if (j.contains("landscape")) {
    if (j.contains("id")) throw ConfigError("scenario takes either 'id' or 'landscape', not both");
    landscape = read<std::string>(j, "landscape", where);
    const auto names = landscape_names();
    if (std::find(names.begin(), names.end(), *landscape) == names.end()) {
      throw ConfigError("unknown landscape '" + *landscape + "'");
    }
    return c;
  }
  if (!j.contains("id")) throw ConfigError("scenario needs an 'id' or a 'landscape'");
  const auto& id = j.at("id");
  c.id = id.is_number_integer() ? std::to_string(id.get<int>()) : read<std::string>(j, "id", where);
  if (auto v = read_count_opt(j, "adversaries", where)) c.adversaries = *v;
  if (auto v = read_opt<double>(j, "lane_width", where)) c.lane_width = *v;
  if (auto v = read_opt<double>(j, "exit_length", where)) c.exit_length = *v;
  if (auto v = read_count_opt(j, "max_timesteps", where)) c.max_timesteps = *v;
  if (auto v = read_opt<double>(j, "timestep", where)) c.timestep = *v;
  if (j.contains("bindings")) c.bindings = read<std::map<std::string, std::string>>(j, "bindings", where);
  if (j.contains("fixed")) c.fixed = read<std::map<std::string, double>>(j, "fixed", where);
  scenario_info(c.id, c.adversaries);  // rejects unknown ids
  return c;
}

Specification parse_spec(const json& j) {
  if (!j.is_array()) throw ConfigError("spec must be a list of metrics");
  Specification spec;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const auto& m = j[k];
    const std::string where = "spec[" + std::to_string(k) + "]";
    check_keys(m, {"metric", "agent", "agents", "threshold", "name"}, where);
    MetricSpec ms;
    const auto kind = read<std::string>(m, "metric", where);
    if (kind == "min_separation") {
      ms.kind = MetricKind::kMinSeparation;
      if (m.contains("agents")) throw ConfigError(where + ": min_separation takes 'agent'");
      ms.agents = {read<std::string>(m, "agent", where)};
    } else if (kind == "disjunction") {
      ms.kind = MetricKind::kDisjunction;
      if (m.contains("agent")) throw ConfigError(where + ": disjunction takes 'agents'");
      ms.agents = read<std::vector<std::string>>(m, "agents", where);
      if (ms.agents.empty()) throw ConfigError(where + ": disjunction needs at least one agent");
    } else {
      throw ConfigError(where + ": unknown metric '" + kind + "'");
    }
    ms.threshold = read_opt<double>(m, "threshold", where).value_or(5.0);
    ms.name = read_opt<std::string>(m, "name", where).value_or(ms.kind == MetricKind::kMinSeparation
                                                                  ? ms.agents.front()
                                                                  : std::string("disjunction"));
    spec.metrics.push_back(std::move(ms));
  }
  std::set<std::string> names;
  for (const auto& m : spec.metrics) {
    if (!names.insert(m.display_name()).second) throw ConfigError("duplicate metric name '" + m.display_name() + "'");
  }
  return spec;
}

Rulebook parse_rulebook(const json& j, const std::vector<std::string>& metric_names) {
  const std::string where = "rulebook";
  check_keys(j, {"type", "metrics", "edges"}, where);
  const std::size_t n = metric_names.size();
  auto resolve_name = [&](const std::string& name) {
    auto it = std::find(metric_names.begin(), metric_names.end(), name);
    if (it == metric_names.end()) throw ConfigError("rulebook names unknown metric '" + name + "'");
    return static_cast<std::size_t>(it - metric_names.begin());
  };

  // Rulebook position -> specification index.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  if (j.contains("metrics")) {
    const auto listed = read<std::vector<std::string>>(j, "metrics", where);
    if (listed.size() != n) {
      throw ConfigError("rulebook lists " + std::to_string(listed.size()) + " metrics but the specification has " +
                        std::to_string(n));
    }
    std::set<std::size_t> seen;
    for (std::size_t i = 0; i < n; ++i) {
      order[i] = resolve_name(listed[i]);
      if (!seen.insert(order[i]).second) throw ConfigError("rulebook lists metric '" + listed[i] + "' twice");
    }
  }

  const std::string type =
      read_opt<std::string>(j, "type", where).value_or(j.contains("edges") ? "graph" : "disconnected");
  std::vector<Edge> edges;
  if (type == "total_order") {
    if (j.contains("edges")) throw ConfigError("total_order rulebook takes no edges");
    for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(order[i], order[i + 1]);
  } else if (type == "disconnected") {
    if (j.contains("edges")) throw ConfigError("disconnected rulebook takes no edges");
  } else if (type == "graph") {
    if (!j.contains("edges") || !j.at("edges").is_array()) throw ConfigError("graph rulebook needs an 'edges' list");
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw ConfigError("rulebook edges must be pairs");
      std::size_t ends[2];
      for (int k = 0; k < 2; ++k) {
        if (e[k].is_string()) {
          ends[k] = resolve_name(e[k].get<std::string>());
        } else if (e[k].is_number_integer() && e[k].get<std::int64_t>() >= 0) {
          const auto idx = e[k].get<std::size_t>();
          if (idx >= n) throw ConfigError("rulebook edge index " + std::to_string(idx) + " out of range");
          ends[k] = order[idx];
        } else {
          throw ConfigError("rulebook edge endpoints must be metric names or indices");
        }
      }
      edges.emplace_back(ends[0], ends[1]);
    }
  } else {
    throw ConfigError("unknown rulebook type '" + type + "'");
  }
  try {
    return Rulebook::build(n, std::move(edges));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

json matrix_json(const Matrix<double>& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (double v : m.row(r)) row.push_back(std::isfinite(v) ? json(v) : json(nullptr));
    out.push_back(std::move(row));
  }
  return out;
}

json matrix_json(const Matrix<std::uint64_t>& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(std::vector<std::uint64_t>(m.row(r).begin(), m.row(r).end()));
  return out;
}

template <typename T>
Matrix<T> matrix_from(const json& j) {
  if (!j.is_array()) throw ConfigError("matrix must be a list of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? j[0].size() : 0;
  Matrix<T> m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw ConfigError("matrix rows differ in length");
    for (std::size_t c = 0; c < cols; ++c) {
      if constexpr (std::is_floating_point_v<T>) {
        m(r, c) = j[r][c].is_null() ? std::numeric_limits<T>::infinity() : j[r][c].get<T>();
      } else {
        m(r, c) = j[r][c].get<T>();
      }
    }
  }
  return m;
}

FalsificationVector bits_from_string(const std::string& s) {
  FalsificationVector b;
  for (char ch : s) {
    if (ch != 'T' && ch != 'F') throw ConfigError("falsification key must be a string of T/F");
    b.bits.push_back(ch == 'T');
  }
  return b;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out.precision(17);
  return out;
}

}  // namespace

std::vector<std::string> metric_names(const CampaignConfig& config) {
  if (config.landscape) return {"landscape"};
  std::vector<std::string> out;
  for (const auto& m : config.spec.metrics) out.push_back(m.display_name());
  return out;
}

CampaignFile parse_campaign(const json& doc) {
  check_keys(doc, {"feature_space", "scenario", "spec", "rulebook", "sampler", "budget", "workers", "seed", "delay",
                   "delay_jitter", "checkpoint_interval", "output_dir", "dump_trajectories"},
             "campaign");
  if (!doc.contains("scenario")) throw ConfigError("campaign needs a 'scenario' section");
  if (!doc.contains("budget")) throw ConfigError("campaign needs a 'budget' section");

  std::optional<std::string> landscape;
  ScenarioConfig scenario = parse_scenario(doc.at("scenario"), landscape);

  // Sampler options first: they may carry the bucket count.
  SamplerOptions sampler;
  std::optional<std::uint64_t> sampler_buckets;
  if (doc.contains("sampler")) {
    const auto& s = doc.at("sampler");
    check_keys(s, {"type", "buckets", "alpha"}, "sampler");
    const auto type = read_opt<std::string>(s, "type", "sampler").value_or("mab");
    auto kind = sampler_kind_from_string(type);
    if (!kind) throw ConfigError("unknown sampler '" + type + "'");
    sampler.kind = *kind;
    sampler.alpha = read_opt<double>(s, "alpha", "sampler").value_or(0.1);
    if (!(sampler.alpha > 0.0 && sampler.alpha <= 1.0)) throw ConfigError("sampler.alpha must be in (0, 1]");
    sampler_buckets = read_count_opt(s, "buckets", "sampler");
  }

  std::optional<FeatureSpace> space;
  std::size_t buckets = sampler_buckets.value_or(FeatureSpace::kDefaultBuckets);
  try {
    if (doc.contains("feature_space")) {
      const auto& fs = doc.at("feature_space");
      check_keys(fs, {"bucket_count", "dimensions"}, "feature_space");
      if (auto n = read_count_opt(fs, "bucket_count", "feature_space")) {
        if (sampler_buckets && *sampler_buckets != *n) {
          throw ConfigError("feature_space.bucket_count and sampler.buckets disagree");
        }
        buckets = *n;
      }
      if (fs.contains("dimensions")) {
        std::vector<Dimension> dims;
        for (const auto& d : fs.at("dimensions")) {
          check_keys(d, {"name", "lo", "hi"}, "feature_space.dimensions[]");
          dims.push_back({read<std::string>(d, "name", "dimension"), read<double>(d, "lo", "dimension"),
                          read<double>(d, "hi", "dimension")});
        }
        space.emplace(std::move(dims), buckets);
      }
    }
    if (!space) {
      if (landscape) {
        space.emplace(std::vector<Dimension>{{"x", 0.0, 1.0}, {"y", 0.0, 1.0}}, buckets);
      } else {
        space.emplace(default_feature_space(scenario_info(scenario.id, scenario.adversaries), buckets));
      }
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("feature_space: ") + e.what());
  }

  Specification spec;
  if (doc.contains("spec")) {
    if (landscape) throw ConfigError("landscape campaigns take no 'spec'");
    spec = parse_spec(doc.at("spec"));
  } else if (!landscape) {
    spec = default_specification(scenario_info(scenario.id, scenario.adversaries));
  }

  Budget budget;
  {
    const auto& b = doc.at("budget");
    check_keys(b, {"max_samples", "max_wall_seconds"}, "budget");
    budget.max_samples = read_count_opt(b, "max_samples", "budget");
    budget.max_wall_seconds = read_opt<double>(b, "max_wall_seconds", "budget");
  }

  const std::uint64_t seed = doc.contains("seed") ? read_count(doc, "seed", "campaign") : 0;
  sampler.seed = seed;

  CampaignConfig tmp{*space, scenario, landscape, spec, Rulebook::disconnected(1), sampler, budget};
  const auto names = metric_names(tmp);
  Rulebook rulebook = doc.contains("rulebook") ? parse_rulebook(doc.at("rulebook"), names)
                                               : Rulebook::disconnected(names.size());

  CampaignFile file{
      CampaignConfig{std::move(*space), std::move(scenario), std::move(landscape), std::move(spec),
                     std::move(rulebook), sampler, budget},
      read_opt<std::string>(doc, "output_dir", "campaign").value_or("falsify-out")};
  auto& c = file.config;
  c.seed = seed;
  if (doc.contains("workers")) c.workers = read_count(doc, "workers", "campaign");
  if (doc.contains("delay")) c.delay = read<double>(doc, "delay", "campaign");
  if (doc.contains("delay_jitter")) c.delay_jitter = read<double>(doc, "delay_jitter", "campaign");
  if (doc.contains("checkpoint_interval")) c.checkpoint_interval = read_count(doc, "checkpoint_interval", "campaign");
  if (doc.contains("dump_trajectories")) c.keep_trajectories = read<bool>(doc, "dump_trajectories", "campaign");
  if (c.landscape && c.keep_trajectories) throw ConfigError("landscape campaigns produce no trajectories");
  c.validate();
  if (!c.landscape) {
    const ScenarioSimulator sim(c.scenario, c.space);  // checks parameter bindings
    const auto& agents = sim.info().agents;
    for (const auto& m : c.spec.metrics) {
      for (const auto& a : m.agents) {
        const bool known = std::any_of(agents.begin(), agents.end(), [&](const AgentInfo& i) { return i.name == a; });
        if (!known) throw ConfigError("metric " + m.display_name() + " names agent '" + a + "' absent from scenario " + c.scenario.id);
      }
    }
  }
  return file;
}

CampaignFile load_campaign(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read campaign file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("campaign file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_campaign(doc);
}

json campaign_to_json(const CampaignFile& file) {
  const auto& c = file.config;
  json doc;
  json dims = json::array();
  for (const auto& d : c.space.dimensions()) dims.push_back({{"name", d.name}, {"lo", d.lo}, {"hi", d.hi}});
  doc["feature_space"] = {{"bucket_count", c.space.bucket_count()}, {"dimensions", dims}};
  if (c.landscape) {
    doc["scenario"] = {{"landscape", *c.landscape}};
  } else {
    doc["scenario"] = {{"id", c.scenario.id},
                       {"adversaries", c.scenario.adversaries},
                       {"lane_width", c.scenario.lane_width},
                       {"exit_length", c.scenario.exit_length},
                       {"max_timesteps", c.scenario.max_timesteps},
                       {"timestep", c.scenario.timestep},
                       {"bindings", c.scenario.bindings},
                       {"fixed", c.scenario.fixed}};
    json spec = json::array();
    for (const auto& m : c.spec.metrics) {
      json e = {{"threshold", m.threshold}, {"name", m.display_name()}};
      if (m.kind == MetricKind::kMinSeparation) {
        e["metric"] = "min_separation";
        e["agent"] = m.agents.front();
      } else {
        e["metric"] = "disjunction";
        e["agents"] = m.agents;
      }
      spec.push_back(std::move(e));
    }
    doc["spec"] = spec;
  }
  json edges = json::array();
  for (const auto& [i, j] : c.rulebook.edges()) edges.push_back({i, j});
  doc["rulebook"] = {{"type", "graph"}, {"metrics", metric_names(c)}, {"edges", edges}};
  doc["sampler"] = {{"type", to_string(c.sampler.kind)}, {"alpha", c.sampler.alpha}};
  json budget = json::object();
  if (c.budget.max_samples) budget["max_samples"] = *c.budget.max_samples;
  if (c.budget.max_wall_seconds) budget["max_wall_seconds"] = *c.budget.max_wall_seconds;
  doc["budget"] = budget;
  doc["workers"] = c.workers;
  doc["seed"] = c.seed;
  doc["delay"] = c.delay;
  doc["delay_jitter"] = c.delay_jitter;
  doc["checkpoint_interval"] = c.checkpoint_interval;
  doc["dump_trajectories"] = c.keep_trajectories;
  doc["output_dir"] = file.output_dir;
  return doc;
}

json example_campaign(const std::string& id) {
  json doc;
  const auto names = landscape_names();
  if (std::find(names.begin(), names.end(), id) != names.end()) {
    doc["scenario"] = {{"landscape", id}};
  } else {
    const auto info = scenario_info(id);
    doc["scenario"] = {{"id", id}};
    if (id == "intersection") doc["scenario"]["adversaries"] = 5;
    json dims = json::array();
    for (const auto& p : info.parameters) dims.push_back({{"name", p.name}, {"lo", p.lo}, {"hi", p.hi}});
    doc["feature_space"] = {{"bucket_count", 10}, {"dimensions", dims}};
    json spec = json::array();
    for (const auto& a : info.agents) {
      if (a.role != AgentRole::kEgo) spec.push_back({{"metric", "min_separation"}, {"agent", a.name}, {"threshold", 5.0}});
    }
    doc["spec"] = spec;
    doc["rulebook"] = {{"type", "disconnected"}};
  }
  doc["sampler"] = {{"type", "mab"}};
  doc["budget"] = {{"max_samples", 200}};
  doc["workers"] = 1;
  doc["seed"] = 1;
  doc["output_dir"] = "falsify-out";
  return doc;
}

json to_json(const SamplerSnapshot& s) {
  json doc = {{"kind", to_string(s.kind)},
              {"seed", s.seed},
              {"issued", s.issued},
              {"completed", s.completed},
              {"visits", matrix_json(s.visits)}};
  if (s.kind == SamplerKind::kMab) {
    doc["mu_hat"] = matrix_json(s.mu_hat);
    doc["ucb"] = matrix_json(s.ucb);
    json keys = json::array();
    for (std::size_t k = 0; k < s.keys.size(); ++k) {
      keys.push_back({{"b", s.keys[k].to_string()}, {"counts", matrix_json(s.counts[k])}});
    }
    doc["maximal"] = keys;
  }
  if (s.kind == SamplerKind::kCrossEntropy) {
    doc["weights"] = matrix_json(s.weights);
    doc["alpha"] = s.alpha;
  }
  if (s.kind == SamplerKind::kHalton) doc["bases"] = s.bases;
  return doc;
}

SamplerSnapshot snapshot_from_json(const json& doc) {
  try {
    SamplerSnapshot s;
    auto kind = sampler_kind_from_string(doc.at("kind").get<std::string>());
    if (!kind) throw ConfigError("snapshot has an unknown sampler kind");
    s.kind = *kind;
    s.seed = doc.at("seed").get<std::uint64_t>();
    s.issued = doc.at("issued").get<std::uint64_t>();
    s.completed = doc.at("completed").get<std::uint64_t>();
    s.visits = matrix_from<std::uint64_t>(doc.at("visits"));
    if (s.kind == SamplerKind::kMab) {
      s.mu_hat = matrix_from<double>(doc.at("mu_hat"));
      s.ucb = matrix_from<double>(doc.at("ucb"));
      for (const auto& k : doc.at("maximal")) {
        s.keys.push_back(bits_from_string(k.at("b").get<std::string>()));
        s.counts.push_back(matrix_from<std::uint64_t>(k.at("counts")));
      }
    }
    if (s.kind == SamplerKind::kCrossEntropy) {
      s.weights = matrix_from<double>(doc.at("weights"));
      s.alpha = doc.at("alpha").get<double>();
    }
    if (s.kind == SamplerKind::kHalton) s.bases = doc.at("bases").get<std::vector<std::uint64_t>>();
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed sampler snapshot: ") + e.what());
  }
}

json to_json(const SampleRecord& r) {
  return {{"id", r.id},
          {"worker", r.worker},
          {"t_dispatch", r.t_dispatch},
          {"t_complete", r.t_complete},
          {"values", r.sample.values},
          {"buckets", r.sample.buckets},
          {"rho", r.rho.rho},
          {"b", r.b.bits},
          {"counterexample", r.counterexample},
          {"termination", to_string(r.termination)},
          {"sim_seconds", r.sim_seconds}};
}

SampleRecord record_from_json(const json& j) {
  try {
    SampleRecord r;
    r.id = j.at("id").get<std::uint64_t>();
    r.worker = j.at("worker").get<std::size_t>();
    r.t_dispatch = j.at("t_dispatch").get<double>();
    r.t_complete = j.at("t_complete").get<double>();
    r.sample.values = j.at("values").get<std::vector<double>>();
    r.sample.buckets = j.at("buckets").get<std::vector<std::size_t>>();
    r.rho.rho = j.at("rho").get<std::vector<double>>();
    r.b.bits = j.at("b").get<std::vector<bool>>();
    r.counterexample = j.at("counterexample").get<bool>();
    auto t = termination_from_string(j.at("termination").get<std::string>());
    if (!t) throw ConfigError("unknown termination reason");
    r.termination = *t;
    r.sim_seconds = j.at("sim_seconds").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed sample record: ") + e.what());
  }
}

json to_json(const CampaignStats& st, bool include_ci) {
  json hist = json::array();
  for (std::size_t i = 0; i < st.histogram.rows(); ++i) {
    hist.push_back(std::vector<std::uint64_t>(st.histogram.row(i).begin(), st.histogram.row(i).end()));
  }
  json doc = {{"samples", st.samples},
              {"counterexamples", st.counterexamples},
              {"proportion", st.proportion},
              {"bucket_histograms", hist},
              {"distinct_counterexample_combinations", st.distinct_combinations},
              {"distinct_sampled_combinations", st.distinct_sampled},
              {"maximal_set_size", st.maximal_size},
              {"metrics_falsified", st.metrics_falsified},
              {"max_simultaneous_falsified", st.max_simultaneous}};
  if (include_ci) {
    doc["confidence"] = st.confidence;
    doc["ci"] = {{"lo", st.ci.lo}, {"hi", st.ci.hi}, {"width", st.ci.width()}};
  } else {
    doc["ci"] = nullptr;
    doc["ci_note"] =
        "confidence interval omitted: it assumes uniform random sampling, which only the uniform and Halton "
        "samplers approximate";
  }
  return doc;
}

void write_table_csv(std::ostream& out, const FeatureSpace& space, const std::vector<std::string>& metrics,
                     const std::vector<SampleRecord>& table) {
  out << "id,worker,t_dispatch,t_complete";
  for (const auto& d : space.dimensions()) out << ',' << d.name;
  for (const auto& d : space.dimensions()) out << ",bucket_" << d.name;
  for (const auto& m : metrics) out << ",rho_" << m;
  for (const auto& m : metrics) out << ",b_" << m;
  out << ",counterexample,termination,sim_seconds\n";
  for (const auto& r : table) {
    out << r.id << ',' << r.worker << ',' << r.t_dispatch << ',' << r.t_complete;
    for (double v : r.sample.values) out << ',' << v;
    for (auto b : r.sample.buckets) out << ',' << b;
    for (double v : r.rho.rho) out << ',' << v;
    for (bool b : r.b.bits) out << ',' << (b ? 1 : 0);
    out << ',' << (r.counterexample ? 1 : 0) << ',' << to_string(r.termination) << ',' << r.sim_seconds << '\n';
  }
}

void write_run(const std::filesystem::path& dir, const CampaignFile& file, const CampaignResult& result) {
  std::filesystem::create_directories(dir);
  const auto& c = file.config;
  const auto metrics = metric_names(c);
  {
    auto out = open_out(dir / "error.csv");
    write_table_csv(out, c.space, metrics, result.error_table);
  }
  {
    auto out = open_out(dir / "safe.csv");
    write_table_csv(out, c.space, metrics, result.safe_table);
  }
  {
    auto out = open_out(dir / "records.jsonl");
    for (const auto& r : result.records()) out << to_json(r).dump() << '\n';
  }
  {
    auto out = open_out(dir / "sampler_snapshot.json");
    out << to_json(result.final_snapshot).dump(2) << '\n';
  }
  if (!result.checkpoints.empty()) {
    auto out = open_out(dir / "checkpoints.jsonl");
    for (const auto& cp : result.checkpoints) {
      out << json{{"completed", cp.completed}, {"snapshot", to_json(cp.snapshot)}}.dump() << '\n';
    }
  }
  if (!result.failed.empty()) {
    auto out = open_out(dir / "failed.jsonl");
    for (const auto& f : result.failed) {
      out << json{{"id", f.id}, {"worker", f.worker}, {"values", f.sample.values}, {"error", f.error}}.dump() << '\n';
    }
  }
  if (!result.trajectories.empty()) {
    auto out = open_out(dir / "trajectories.jsonl");
    for (const auto& [id, traj] : result.trajectories) {
      for (std::size_t k = 0; k < traj.frames.size(); ++k) {
        json agents = json::array();
        for (std::size_t a = 0; a < traj.agents.size(); ++a) {
          const auto& st = traj.frames[k].agents[a];
          agents.push_back({{"name", traj.agents[a].name},
                            {"x", st.position.x},
                            {"y", st.position.y},
                            {"heading", st.heading},
                            {"speed", st.speed}});
        }
        out << json{{"sample", id}, {"frame", k}, {"t", static_cast<double>(k) * traj.timestep}, {"agents", agents}}
                   .dump()
            << '\n';
      }
    }
  }
  json maximal = json::array();
  for (const auto& b : result.maximal) maximal.push_back(b.to_string());
  const json summary = {
      {"scenario", c.landscape ? *c.landscape : c.scenario.id},
      {"target", c.landscape ? "landscape" : "scenario"},
      {"sampler", to_string(c.sampler.kind)},
      {"workers", c.workers},
      {"seed", c.seed},
      {"delay", c.delay},
      {"metrics", metrics},
      {"totals",
       {{"samples", result.totals.completed},
        {"counterexamples", result.totals.counterexamples},
        {"dispatched", result.totals.dispatched},
        {"failed", result.totals.failed},
        {"wall_seconds", result.totals.wall_seconds}}},
      {"maximal", maximal},
      {"campaign", campaign_to_json(file)},
  };
  auto out = open_out(dir / "summary.json");
  out << summary.dump(2) << '\n';
}

RunArtifacts read_run(const std::filesystem::path& dir) {
  const auto summary_path = dir / "summary.json";
  const auto records_path = dir / "records.jsonl";
  if (!std::filesystem::exists(summary_path) || !std::filesystem::exists(records_path)) {
    throw ConfigError("run directory " + dir.string() + " lacks summary.json or records.jsonl");
  }
  json summary;
  try {
    std::ifstream in(summary_path);
    summary = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed summary.json: " + std::string(e.what()));
  }
  if (!summary.contains("campaign")) throw ConfigError("summary.json lacks the campaign document");
  RunArtifacts run{summary, parse_campaign(summary.at("campaign")), {}};
  std::ifstream in(records_path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      run.records.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ConfigError("malformed records.jsonl line: " + std::string(e.what()));
    }
  }
  return run;
}

}  // namespace falsify
