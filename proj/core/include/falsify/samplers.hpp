#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "falsify/feature_space.hpp"
#include "falsify/matrix.hpp"
#include "falsify/rulebook.hpp"

namespace falsify {

enum class SamplerKind { kUniform, kHalton, kCrossEntropy, kMab };

const char* to_string(SamplerKind k) noexcept;
std::optional<SamplerKind> sampler_kind_from_string(std::string_view s) noexcept;

// Uniform and Halton draws approximate uniform random sampling over the
// space; the others adapt to feedback.
constexpr bool is_adaptive(SamplerKind k) noexcept {
  return k == SamplerKind::kCrossEntropy || k == SamplerKind::kMab;
}

struct SamplerOptions {
  SamplerKind kind = SamplerKind::kMab;
  double alpha = 0.1;  // cross-entropy smoothing rate
  std::uint64_t seed = 0;

  bool operator==(const SamplerOptions&) const = default;
};

struct SampleFeedback {
  SampleVector sample;
  ObjectiveVector rho;
  FalsificationVector b;
  bool is_counterexample = false;
};

// Upper confidence bound  mu_hat + sqrt((2 / visits) * ln t)  with the
// confidence parameter tied to the round, 1/delta = t. Throws DomainError
// for visits == 0 or t == 0.
double compute_ucb(double mu_hat, std::uint64_t visits, std::uint64_t t);

// Van der Corput radical inverse of `index` in `base`.
double radical_inverse(std::uint64_t index, std::uint64_t base);

// The first `count` primes.
std::vector<std::uint64_t> first_primes(std::size_t count);

// Read-only copy of a sampler's state; also the restore format.
struct SamplerSnapshot {
  SamplerKind kind = SamplerKind::kUniform;
  std::uint64_t seed = 0;
  std::uint64_t issued = 0;     // samples handed out
  std::uint64_t completed = 0;  // feedback received
  Matrix<std::uint64_t> visits;

  // multi-armed bandit
  Matrix<double> mu_hat;
  Matrix<double> ucb;
  std::vector<FalsificationVector> keys;
  std::vector<Matrix<std::uint64_t>> counts;  // parallel to keys

  // cross-entropy
  Matrix<double> weights;
  double alpha = 0.0;

  // Halton
  std::vector<std::uint64_t> bases;
};

// Sample-generation strategy. A single logical writer drives it; feedback
// may arrive late and out of order relative to next_sample().
class Sampler {
 public:
  virtual ~Sampler() = default;

  virtual SamplerKind kind() const noexcept = 0;

  // Draws come from a stream derived from (seed, index of this sample).
  virtual SampleVector next_sample() = 0;

  // Throws StateError when the feedback's buckets do not fit this space.
  virtual void update(const SampleFeedback& feedback) = 0;

  virtual SamplerSnapshot snapshot() const;

  // Loads a snapshot taken from a sampler of the same kind, seed and shape.
  // Throws StateError on mismatch.
  virtual void restore(const SamplerSnapshot& snap);

  const FeatureSpace& space() const noexcept { return space_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t issued() const noexcept { return issued_; }
  std::uint64_t completed() const noexcept { return completed_; }
  const Matrix<std::uint64_t>& visits() const noexcept { return visits_; }

 protected:
  Sampler(FeatureSpace space, std::uint64_t seed);

  // Validates the feedback's buckets and counts the visit.
  void record_visit(const SampleFeedback& feedback);
  Rng stream_for_next() const;

  FeatureSpace space_;
  std::uint64_t seed_;
  std::uint64_t issued_ = 0;
  std::uint64_t completed_ = 0;
  Matrix<std::uint64_t> visits_;
};

class UniformSampler final : public Sampler {
 public:
  UniformSampler(FeatureSpace space, std::uint64_t seed);
  SamplerKind kind() const noexcept override { return SamplerKind::kUniform; }
  SampleVector next_sample() override;
  void update(const SampleFeedback& feedback) override;
};

class HaltonSampler final : public Sampler {
 public:
  HaltonSampler(FeatureSpace space, std::uint64_t seed);
  SamplerKind kind() const noexcept override { return SamplerKind::kHalton; }
  SampleVector next_sample() override;
  void update(const SampleFeedback& feedback) override;
  SamplerSnapshot snapshot() const override;

  const std::vector<std::uint64_t>& bases() const noexcept { return bases_; }

 private:
  std::vector<std::uint64_t> bases_;
};

// Bucketized cross-entropy: per-dimension categorical weights over buckets,
// smoothed toward the buckets of each counterexample.
class CrossEntropySampler final : public Sampler {
 public:
  CrossEntropySampler(FeatureSpace space, std::uint64_t seed, double alpha = 0.1);
  SamplerKind kind() const noexcept override { return SamplerKind::kCrossEntropy; }
  SampleVector next_sample() override;
  void update(const SampleFeedback& feedback) override;
  SamplerSnapshot snapshot() const override;

  const Matrix<double>& weights() const noexcept { return weights_; }
  double alpha() const noexcept { return alpha_; }
  void restore(const SamplerSnapshot& snap) override;

 private:
  double alpha_;
  Matrix<double> weights_;
};

// Multi-objective multi-armed bandit over buckets. Each dimension is an
// independent bandit whose arms are its buckets; the reward of an arm is the
// fraction of its visits that produced a currently maximal counterexample.
class MabSampler final : public Sampler {
 public:
  MabSampler(FeatureSpace space, Rulebook rulebook, std::uint64_t seed);
  SamplerKind kind() const noexcept override { return SamplerKind::kMab; }
  SampleVector next_sample() override;
  void update(const SampleFeedback& feedback) override;
  SamplerSnapshot snapshot() const override;

  const Rulebook& rulebook() const noexcept { return rulebook_; }
  const std::vector<FalsificationVector>& maximal_keys() const noexcept { return keys_; }
  const Matrix<std::uint64_t>& counts(const FalsificationVector& key) const;

  // Sum over keys of the count matrices, divided by visits (0 where unvisited).
  Matrix<double> mu_hat() const;
  // Q for round t = issued + 1; +inf where a bucket has no completed visit yet.
  Matrix<double> ucb() const;
  void restore(const SamplerSnapshot& snap) override;

 private:
  Rulebook rulebook_;
  std::vector<FalsificationVector> keys_;
  std::map<FalsificationVector, Matrix<std::uint64_t>> counts_;
};

std::unique_ptr<Sampler> make_sampler(const SamplerOptions& options, const FeatureSpace& space,
                                      const Rulebook& rulebook);

// Rebuilds a sampler whose subsequent output matches the one snapshotted.
std::unique_ptr<Sampler> restore_sampler(const SamplerSnapshot& snap, const FeatureSpace& space,
                                         const Rulebook& rulebook);

}  // namespace falsify
