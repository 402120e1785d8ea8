#include "falsify/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "falsify/errors.hpp"

namespace falsify {

namespace {

// Continued fraction for the incomplete beta function, converging for
// x < (a + 1) / (a + b + 2).
double beta_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
  return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double beta_quantile(double p, double a, double b, double tolerance) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("beta quantile needs p in [0, 1]");
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (regularized_incomplete_beta(a, b, mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Interval clopper_pearson(std::uint64_t k, std::uint64_t n, double confidence) {
  if (n == 0) throw DomainError("clopper_pearson needs at least one trial");
  if (k > n) throw DomainError("clopper_pearson: successes exceed trials");
  if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("confidence must be in (0, 1)");
  const double alpha = 1.0 - confidence;
  const auto kd = static_cast<double>(k);
  const auto nd = static_cast<double>(n);
  Interval out;
  out.lo = k == 0 ? 0.0 : beta_quantile(alpha / 2.0, kd, nd - kd + 1.0);
  out.hi = k == n ? 1.0 : beta_quantile(1.0 - alpha / 2.0, kd + 1.0, nd - kd);
  return out;
}

double speedup_factor(std::uint64_t parallel_samples, std::uint64_t serial_samples) {
  if (serial_samples == 0) throw DomainError("speedup factor needs at least one serial sample");
  return static_cast<double>(parallel_samples) / static_cast<double>(serial_samples);
}

double ci_width_ratio(const CampaignStats& parallel, const CampaignStats& serial) {
  if (parallel.confidence != serial.confidence) {
    throw DomainError("confidence intervals were computed at different confidence levels");
  }
  if (!(serial.ci.width() > 0.0)) throw DomainError("serial confidence interval has zero width");
  return parallel.ci.width() / serial.ci.width();
}

CampaignStats coverage_stats(std::span<const SampleRecord> records, std::size_t dims, std::size_t buckets,
                             std::size_t maximal_size, double confidence) {
  if (records.empty()) throw DomainError("coverage statistics need at least one sample");
  CampaignStats st;
  st.samples = records.size();
  st.confidence = confidence;
  st.histogram = Matrix<std::uint64_t>(dims, buckets, 0);
  st.maximal_size = maximal_size;
  std::set<std::vector<std::size_t>> cex_tuples;
  std::set<std::vector<std::size_t>> all_tuples;
  std::vector<bool> ever;
  for (const auto& r : records) {
    if (r.sample.buckets.size() != dims) throw DomainError("record bucket count does not match the feature space");
    for (std::size_t i = 0; i < dims; ++i) {
      if (r.sample.buckets[i] >= buckets) throw DomainError("record bucket index out of range");
      ++st.histogram(i, r.sample.buckets[i]);
    }
    all_tuples.insert(r.sample.buckets);
    if (ever.size() < r.b.size()) ever.resize(r.b.size(), false);
    for (std::size_t j = 0; j < r.b.size(); ++j) ever[j] = ever[j] || r.b.bits[j];
    if (r.counterexample) {
      ++st.counterexamples;
      cex_tuples.insert(r.sample.buckets);
      st.max_simultaneous = std::max(st.max_simultaneous, r.b.count());
    }
  }
  st.proportion = static_cast<double>(st.counterexamples) / static_cast<double>(st.samples);
  st.ci = clopper_pearson(st.counterexamples, st.samples, confidence);
  st.distinct_combinations = cex_tuples.size();
  st.distinct_sampled = all_tuples.size();
  st.metrics_falsified = static_cast<std::size_t>(std::count(ever.begin(), ever.end(), true));
  return st;
}

CampaignStats coverage_stats(const CampaignResult& result, double confidence) {
  const auto records = result.records();
  return coverage_stats(records, result.final_snapshot.visits.rows(), result.final_snapshot.visits.cols(),
                        result.maximal.size(), confidence);
}

}  // namespace falsify
