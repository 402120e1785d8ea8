#include "falsify/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <iostream>
#include <mutex>
#include <thread>

#include "falsify/errors.hpp"

namespace falsify {

void CampaignConfig::validate() const {
  if (!budget.max_samples && !budget.max_wall_seconds) {
    throw ConfigError("campaign needs a sample budget or a wall-clock budget");
  }
  if (budget.max_wall_seconds && !(*budget.max_wall_seconds > 0.0)) {
    throw ConfigError("wall-clock budget must be positive");
  }
  if (workers == 0) throw ConfigError("worker count must be at least 1");
  if (delay < 0.0) throw ConfigError("artificial delay must be non-negative");
  if (delay_jitter < 0.0) throw ConfigError("delay jitter must be non-negative");
  const std::size_t metrics = landscape ? 1 : spec.size();
  if (rulebook.metric_count() != metrics) {
    throw ConfigError("rulebook covers " + std::to_string(rulebook.metric_count()) + " metrics but the specification has " +
                      std::to_string(metrics));
  }
}

std::vector<SampleRecord> CampaignResult::records() const {
  std::vector<SampleRecord> all = error_table;
  all.insert(all.end(), safe_table.begin(), safe_table.end());
  std::sort(all.begin(), all.end(), [](const SampleRecord& a, const SampleRecord& b) { return a.id < b.id; });
  return all;
}

std::unique_ptr<SimulationTarget> make_target(const CampaignConfig& config) {
  if (config.landscape) return make_landscape(*config.landscape, config.space);
  return std::make_unique<ScenarioTarget>(config.scenario, config.space, config.spec, config.keep_trajectories);
}

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kJitterStream = 0x6a09e667f3bcc909ULL;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  Evaluation eval;
  double sim_seconds = 0.0;
};

// One simulation plus the configured artificial delay.
Outcome simulate_one(const SimulationTarget& target, const SampleVector& sample, double delay) {
  const auto t0 = Clock::now();
  Outcome out{target.run(sample), 0.0};
  if (delay > 0.0) {
    std::this_thread::sleep_until(t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(delay)));
  }
  out.sim_seconds = seconds_since(t0);
  return out;
}

// Sampler plus tables; everything the single coordinator mutates.
class Ledger {
 public:
  Ledger(const CampaignConfig& config, std::size_t metric_count)
      : config_(config),
        metric_count_(metric_count),
        sampler_(make_sampler(SamplerOptions{config.sampler.kind, config.sampler.alpha, config.seed}, config.space,
                              config.rulebook)),
        start_(Clock::now()) {
    if (metric_count != config.rulebook.metric_count()) {
      throw ConfigError("target produces " + std::to_string(metric_count) + " metrics but the rulebook covers " +
                        std::to_string(config.rulebook.metric_count()));
    }
  }

  bool can_dispatch() const {
    const auto& b = config_.budget;
    if (b.max_samples && result_.totals.dispatched >= *b.max_samples) return false;
    if (b.max_wall_seconds && seconds_since(start_) >= *b.max_wall_seconds) return false;
    return true;
  }

  std::pair<std::uint64_t, SampleVector> dispatch() {
    const std::uint64_t id = result_.totals.dispatched++;
    return {id, sampler_->next_sample()};
  }

  double delay_for(std::uint64_t id) const {
    if (config_.delay_jitter <= 0.0) return config_.delay;
    Rng rng = make_stream(config_.seed ^ kJitterStream, id);
    return config_.delay + config_.delay_jitter * uniform01(rng);
  }

  double now() const { return seconds_since(start_); }

  void complete(std::uint64_t id, std::size_t worker, double t_dispatch, SampleVector sample, Outcome outcome) {
    if (outcome.eval.rho.size() != metric_count_) {
      throw DomainError("simulation returned " + std::to_string(outcome.eval.rho.size()) + " metrics, expected " +
                        std::to_string(metric_count_));
    }
    SampleRecord rec;
    rec.id = id;
    rec.worker = worker;
    rec.t_dispatch = t_dispatch;
    rec.t_complete = now();
    rec.b = falsification_vector(outcome.eval.rho);
    rec.counterexample = rec.b.any();
    rec.rho = std::move(outcome.eval.rho);
    rec.termination = outcome.eval.termination;
    rec.sim_seconds = outcome.sim_seconds;
    rec.sample = std::move(sample);

    sampler_->update({rec.sample, rec.rho, rec.b, rec.counterexample});
    ++result_.totals.completed;
    if (rec.counterexample) {
      ++result_.totals.counterexamples;
      insert_maximal(config_.rulebook, result_.maximal, rec.b);
    }
    if (outcome.eval.trajectory) result_.trajectories.emplace_back(id, std::move(*outcome.eval.trajectory));
    (rec.counterexample ? result_.error_table : result_.safe_table).push_back(std::move(rec));
    if (config_.checkpoint_interval > 0 && result_.totals.completed % config_.checkpoint_interval == 0) {
      result_.checkpoints.push_back({result_.totals.completed, sampler_->snapshot()});
    }
  }

  void fail(std::uint64_t id, std::size_t worker, SampleVector sample, std::string error) {
    ++result_.totals.failed;
    result_.failed.push_back({id, worker, std::move(sample), std::move(error)});
  }

  CampaignResult finish() {
    result_.final_snapshot = sampler_->snapshot();
    result_.totals.wall_seconds = now();
    return std::move(result_);
  }

 private:
  const CampaignConfig& config_;
  std::size_t metric_count_;
  std::unique_ptr<Sampler> sampler_;
  Clock::time_point start_;
  CampaignResult result_;
};

}  // namespace

CampaignResult run_serial(const CampaignConfig& config, const SimulationTarget& target) {
  config.validate();
  Ledger ledger(config, target.metric_count());
  while (ledger.can_dispatch()) {
    auto [id, sample] = ledger.dispatch();
    const double t_dispatch = ledger.now();
    try {
      auto outcome = simulate_one(target, sample, ledger.delay_for(id));
      ledger.complete(id, 0, t_dispatch, std::move(sample), std::move(outcome));
    } catch (const std::exception& e) {
      const std::string msg = "sample " + std::to_string(id) + " failed: " + e.what();
      ledger.fail(id, 0, std::move(sample), e.what());
      throw CampaignAborted(msg, ledger.finish());
    }
  }
  return ledger.finish();
}

CampaignResult run_parallel(const CampaignConfig& config, const SimulationTarget& target) {
  config.validate();
  Ledger ledger(config, target.metric_count());

  struct Task {
    std::uint64_t id;
    double t_dispatch;
    double delay;
    SampleVector sample;
  };
  struct Done {
    Task task;
    std::size_t worker;
    std::optional<Outcome> outcome;
    std::string error;
  };

  std::mutex mu;
  std::condition_variable task_ready;
  std::condition_variable done_ready;
  std::deque<Task> tasks;
  std::deque<Done> done;
  bool stopping = false;

  auto worker_loop = [&](std::size_t worker) {
    for (;;) {
      Task task;
      {
        std::unique_lock lock(mu);
        task_ready.wait(lock, [&] { return stopping || !tasks.empty(); });
        if (tasks.empty()) return;
        task = std::move(tasks.front());
        tasks.pop_front();
      }
      Done d{std::move(task), worker, std::nullopt, {}};
      try {
        d.outcome = simulate_one(target, d.task.sample, d.task.delay);
      } catch (const std::exception& e) {
        d.error = e.what();
      } catch (...) {
        d.error = "unknown error";
      }
      {
        std::lock_guard lock(mu);
        done.push_back(std::move(d));
      }
      done_ready.notify_one();
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(config.workers);
  for (std::size_t w = 0; w < config.workers; ++w) pool.emplace_back(worker_loop, w);

  auto shutdown = [&] {
    {
      std::lock_guard lock(mu);
      stopping = true;
    }
    task_ready.notify_all();
    pool.clear();  // joins
  };

  try {
    std::size_t in_flight = 0;
    for (;;) {
      while (in_flight < config.workers && ledger.can_dispatch()) {
        auto [id, sample] = ledger.dispatch();
        {
          std::lock_guard lock(mu);
          tasks.push_back({id, ledger.now(), ledger.delay_for(id), std::move(sample)});
        }
        task_ready.notify_one();
        ++in_flight;
      }
      if (in_flight == 0) break;

      std::deque<Done> batch;
      {
        std::unique_lock lock(mu);
        done_ready.wait(lock, [&] { return !done.empty(); });
        batch.swap(done);
      }
      for (auto& d : batch) {
        --in_flight;
        if (d.outcome) {
          try {
            ledger.complete(d.task.id, d.worker, d.task.t_dispatch, std::move(d.task.sample), std::move(*d.outcome));
            continue;
          } catch (const DomainError& e) {
            d.error = e.what();
          }
        }
        std::cerr << "falsify: sample " << d.task.id << " failed on worker " << d.worker << ": " << d.error << '\n';
        ledger.fail(d.task.id, d.worker, std::move(d.task.sample), std::move(d.error));
      }
    }
  } catch (...) {
    shutdown();
    throw;
  }
  shutdown();
  return ledger.finish();
}

CampaignResult run_campaign(const CampaignConfig& config, const SimulationTarget& target) {
  return config.workers <= 1 ? run_serial(config, target) : run_parallel(config, target);
}

}  // namespace falsify
