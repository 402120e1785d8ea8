#include "falsify/samplers.hpp"

#include <cmath>
#include <limits>

#include "falsify/errors.hpp"

namespace falsify {

const char* to_string(SamplerKind k) noexcept {
  switch (k) {
    case SamplerKind::kUniform: return "uniform";
    case SamplerKind::kHalton: return "halton";
    case SamplerKind::kCrossEntropy: return "cross-entropy";
    case SamplerKind::kMab: return "mab";
  }
  return "unknown";
}

std::optional<SamplerKind> sampler_kind_from_string(std::string_view s) noexcept {
  if (s == "uniform") return SamplerKind::kUniform;
  if (s == "halton") return SamplerKind::kHalton;
  if (s == "cross-entropy" || s == "ce") return SamplerKind::kCrossEntropy;
  if (s == "mab") return SamplerKind::kMab;
  return std::nullopt;
}

double compute_ucb(double mu_hat, std::uint64_t visits, std::uint64_t t) {
  if (visits == 0) throw DomainError("compute_ucb: bucket has no visits");
  if (t == 0) throw DomainError("compute_ucb: round index must be at least 1");
  return mu_hat + std::sqrt(2.0 / static_cast<double>(visits) * std::log(static_cast<double>(t)));
}

double radical_inverse(std::uint64_t index, std::uint64_t base) {
  if (base < 2) throw DomainError("radical inverse needs base >= 2");
  double result = 0.0;
  double scale = 1.0 / static_cast<double>(base);
  while (index > 0) {
    result += static_cast<double>(index % base) * scale;
    index /= base;
    scale /= static_cast<double>(base);
  }
  return result;
}

std::vector<std::uint64_t> first_primes(std::size_t count) {
  std::vector<std::uint64_t> primes;
  for (std::uint64_t n = 2; primes.size() < count; ++n) {
    bool prime = true;
    for (auto p : primes) {
      if (p * p > n) break;
      if (n % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(n);
  }
  return primes;
}

// Sampler ------------------------------------------------------------------

Sampler::Sampler(FeatureSpace space, std::uint64_t seed)
    : space_(std::move(space)), seed_(seed), visits_(space_.size(), space_.bucket_count(), 0) {}

Rng Sampler::stream_for_next() const { return make_stream(seed_, issued_); }

void Sampler::record_visit(const SampleFeedback& feedback) {
  const auto& buckets = feedback.sample.buckets;
  if (buckets.size() != space_.size()) {
    throw StateError("feedback carries " + std::to_string(buckets.size()) + " bucket indices, expected " +
                     std::to_string(space_.size()));
  }
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    if (buckets[i] >= space_.bucket_count()) {
      throw StateError("feedback bucket index " + std::to_string(buckets[i]) + " out of range");
    }
  }
  if (feedback.is_counterexample != feedback.b.any()) {
    throw StateError("feedback counterexample flag disagrees with its falsification vector");
  }
  for (std::size_t i = 0; i < buckets.size(); ++i) ++visits_(i, buckets[i]);
  ++completed_;
}

void Sampler::restore(const SamplerSnapshot& snap) {
  if (snap.kind != kind()) throw StateError("snapshot was taken from a different sampler kind");
  if (snap.seed != seed_) throw StateError("snapshot seed differs from the sampler seed");
  if (snap.visits.rows() != space_.size() || snap.visits.cols() != space_.bucket_count()) {
    throw StateError("snapshot does not match the feature space shape");
  }
  issued_ = snap.issued;
  completed_ = snap.completed;
  visits_ = snap.visits;
}

SamplerSnapshot Sampler::snapshot() const {
  SamplerSnapshot s;
  s.kind = kind();
  s.seed = seed_;
  s.issued = issued_;
  s.completed = completed_;
  s.visits = visits_;
  return s;
}

// Uniform ------------------------------------------------------------------

UniformSampler::UniformSampler(FeatureSpace space, std::uint64_t seed) : Sampler(std::move(space), seed) {}

SampleVector UniformSampler::next_sample() {
  Rng rng = stream_for_next();
  std::vector<double> values(space_.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = space_.from_unit(i, uniform01(rng));
  ++issued_;
  return space_.make_sample(std::move(values));
}

void UniformSampler::update(const SampleFeedback& feedback) { record_visit(feedback); }

// Halton -------------------------------------------------------------------

HaltonSampler::HaltonSampler(FeatureSpace space, std::uint64_t seed)
    : Sampler(std::move(space), seed), bases_(first_primes(space_.size())) {}

SampleVector HaltonSampler::next_sample() {
  const std::uint64_t index = issued_ + 1;  // index 0 is the origin
  std::vector<double> values(space_.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = space_.from_unit(i, radical_inverse(index, bases_[i]));
  ++issued_;
  return space_.make_sample(std::move(values));
}

void HaltonSampler::update(const SampleFeedback& feedback) { record_visit(feedback); }

SamplerSnapshot HaltonSampler::snapshot() const {
  auto s = Sampler::snapshot();
  s.bases = bases_;
  return s;
}

// Cross-entropy ------------------------------------------------------------

CrossEntropySampler::CrossEntropySampler(FeatureSpace space, std::uint64_t seed, double alpha)
    : Sampler(std::move(space), seed),
      alpha_(alpha),
      weights_(space_.size(), space_.bucket_count(), 1.0 / static_cast<double>(space_.bucket_count())) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("cross-entropy alpha must be in (0, 1]");
}

SampleVector CrossEntropySampler::next_sample() {
  Rng rng = stream_for_next();
  const std::size_t n = space_.bucket_count();
  SampleVector s;
  s.values.resize(space_.size());
  s.buckets.resize(space_.size());
  for (std::size_t i = 0; i < space_.size(); ++i) {
    const auto row = weights_.row(i);
    double u = uniform01(rng);
    std::size_t bucket = n - 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (u < row[j]) {
        bucket = j;
        break;
      }
      u -= row[j];
    }
    s.buckets[i] = bucket;
    s.values[i] = space_.sample_in_bucket(i, bucket, rng);
  }
  ++issued_;
  return s;
}

void CrossEntropySampler::update(const SampleFeedback& feedback) {
  record_visit(feedback);
  if (!feedback.is_counterexample) return;
  for (std::size_t i = 0; i < space_.size(); ++i) {
    auto row = weights_.row(i);
    double total = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      row[j] = (1.0 - alpha_) * row[j] + (j == feedback.sample.buckets[i] ? alpha_ : 0.0);
      total += row[j];
    }
    for (double& w : row) w /= total;
  }
}

SamplerSnapshot CrossEntropySampler::snapshot() const {
  auto s = Sampler::snapshot();
  s.weights = weights_;
  s.alpha = alpha_;
  return s;
}

void CrossEntropySampler::restore(const SamplerSnapshot& snap) {
  if (snap.weights.rows() != space_.size() || snap.weights.cols() != space_.bucket_count()) {
    throw StateError("snapshot weights do not match the feature space shape");
  }
  Sampler::restore(snap);
  alpha_ = snap.alpha;
  weights_ = snap.weights;
}

// Multi-armed bandit -------------------------------------------------------

MabSampler::MabSampler(FeatureSpace space, Rulebook rulebook, std::uint64_t seed)
    : Sampler(std::move(space), seed), rulebook_(std::move(rulebook)) {}

const Matrix<std::uint64_t>& MabSampler::counts(const FalsificationVector& key) const {
  auto it = counts_.find(key);
  if (it == counts_.end()) throw StateError("no maximal counterexample " + key.to_string());
  return it->second;
}

Matrix<double> MabSampler::mu_hat() const {
  Matrix<double> mu(space_.size(), space_.bucket_count(), 0.0);
  for (std::size_t i = 0; i < mu.rows(); ++i) {
    for (std::size_t j = 0; j < mu.cols(); ++j) {
      if (visits_(i, j) == 0) continue;
      std::uint64_t hits = 0;
      for (const auto& [key, c] : counts_) hits += c(i, j);
      mu(i, j) = static_cast<double>(hits) / static_cast<double>(visits_(i, j));
    }
  }
  return mu;
}

Matrix<double> MabSampler::ucb() const {
  const auto mu = mu_hat();
  const std::uint64_t t = issued_ + 1;
  Matrix<double> q(mu.rows(), mu.cols(), 0.0);
  for (std::size_t i = 0; i < q.rows(); ++i) {
    for (std::size_t j = 0; j < q.cols(); ++j) {
      // Only reachable when initialization feedback is still outstanding.
      q(i, j) = visits_(i, j) == 0 ? std::numeric_limits<double>::infinity() : compute_ucb(mu(i, j), visits_(i, j), t);
    }
  }
  return q;
}

SampleVector MabSampler::next_sample() {
  Rng rng = stream_for_next();
  const std::size_t n = space_.bucket_count();
  SampleVector s;
  s.values.resize(space_.size());
  s.buckets.resize(space_.size());
  if (issued_ < n) {
    // Round-robin initialization: call r visits bucket r in every dimension.
    for (std::size_t i = 0; i < space_.size(); ++i) s.buckets[i] = static_cast<std::size_t>(issued_);
  } else {
    const auto q = ucb();
    std::vector<std::size_t> best;
    for (std::size_t i = 0; i < space_.size(); ++i) {
      const auto row = q.row(i);
      best.clear();
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        if (row[j] > top) {
          top = row[j];
          best.assign(1, j);
        } else if (row[j] == top) {
          best.push_back(j);
        }
      }
      s.buckets[i] = best.size() == 1 ? best.front() : best[uniform_index(rng, best.size())];
    }
  }
  for (std::size_t i = 0; i < space_.size(); ++i) s.values[i] = space_.sample_in_bucket(i, s.buckets[i], rng);
  ++issued_;
  return s;
}

void MabSampler::update(const SampleFeedback& feedback) {
  if (feedback.b.size() != rulebook_.metric_count()) {
    throw DomainError("falsification vector length " + std::to_string(feedback.b.size()) +
                      " does not match rulebook over " + std::to_string(rulebook_.metric_count()) + " metrics");
  }
  record_visit(feedback);
  if (!feedback.is_counterexample) return;
  const auto outcome = insert_maximal(rulebook_, keys_, feedback.b);
  if (!outcome.accepted) return;
  for (const auto& gone : outcome.evicted) counts_.erase(gone);
  auto [it, fresh] = counts_.try_emplace(feedback.b, space_.size(), space_.bucket_count(), 0);
  for (std::size_t i = 0; i < space_.size(); ++i) ++it->second(i, feedback.sample.buckets[i]);
}

SamplerSnapshot MabSampler::snapshot() const {
  auto s = Sampler::snapshot();
  s.mu_hat = mu_hat();
  s.ucb = ucb();
  s.keys = keys_;
  for (const auto& k : keys_) s.counts.push_back(counts_.at(k));
  return s;
}

void MabSampler::restore(const SamplerSnapshot& snap) {
  if (snap.keys.size() != snap.counts.size()) throw StateError("snapshot keys and count matrices differ in number");
  for (std::size_t k = 0; k < snap.keys.size(); ++k) {
    if (snap.keys[k].size() != rulebook_.metric_count()) {
      throw StateError("snapshot key length does not match the rulebook");
    }
    if (snap.counts[k].rows() != space_.size() || snap.counts[k].cols() != space_.bucket_count()) {
      throw StateError("snapshot count matrix does not match the feature space shape");
    }
  }
  Sampler::restore(snap);
  keys_ = snap.keys;
  counts_.clear();
  for (std::size_t k = 0; k < snap.keys.size(); ++k) counts_.emplace(snap.keys[k], snap.counts[k]);
}

// Factories ----------------------------------------------------------------

std::unique_ptr<Sampler> make_sampler(const SamplerOptions& options, const FeatureSpace& space,
                                      const Rulebook& rulebook) {
  switch (options.kind) {
    case SamplerKind::kUniform: return std::make_unique<UniformSampler>(space, options.seed);
    case SamplerKind::kHalton: return std::make_unique<HaltonSampler>(space, options.seed);
    case SamplerKind::kCrossEntropy: return std::make_unique<CrossEntropySampler>(space, options.seed, options.alpha);
    case SamplerKind::kMab: return std::make_unique<MabSampler>(space, rulebook, options.seed);
  }
  throw DomainError("unknown sampler kind");
}

std::unique_ptr<Sampler> restore_sampler(const SamplerSnapshot& snap, const FeatureSpace& space,
                                         const Rulebook& rulebook) {
  auto out = make_sampler({snap.kind, snap.kind == SamplerKind::kCrossEntropy ? snap.alpha : 0.1, snap.seed}, space,
                          rulebook);
  out->restore(snap);
  return out;
}

}  // namespace falsify
