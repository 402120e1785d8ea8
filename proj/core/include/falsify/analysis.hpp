#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "falsify/matrix.hpp"
#include "falsify/orchestrator.hpp"

namespace falsify {

// I_x(a, b), evaluated with a continued fraction (modified Lentz).
double regularized_incomplete_beta(double a, double b, double x);

// x with I_x(a, b) = p, by bisection to `tolerance`.
double beta_quantile(double p, double a, double b, double tolerance = 1e-10);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double width() const noexcept { return hi - lo; }
};

// Exact binomial interval for k successes in n trials. Throws DomainError
// when k > n, n == 0, or confidence is outside (0, 1).
Interval clopper_pearson(std::uint64_t k, std::uint64_t n, double confidence = 0.95);

// Samples completed in parallel over samples completed serially under the
// same budget.
double speedup_factor(std::uint64_t parallel_samples, std::uint64_t serial_samples);

struct CampaignStats {
  std::uint64_t samples = 0;
  std::uint64_t counterexamples = 0;
  double proportion = 0.0;
  double confidence = 0.95;
  Interval ci;
  Matrix<std::uint64_t> histogram;          // dimension x bucket visit counts
  std::size_t distinct_combinations = 0;    // bucket tuples among counterexamples
  std::size_t distinct_sampled = 0;         // bucket tuples among all samples
  std::size_t maximal_size = 0;
  std::size_t metrics_falsified = 0;        // metrics violated by at least one sample
  std::size_t max_simultaneous = 0;         // most metrics violated by one sample
};

// (hi_p - lo_p) / (hi_s - lo_s). Throws DomainError for a zero-width serial
// interval or mismatched confidence levels.
double ci_width_ratio(const CampaignStats& parallel, const CampaignStats& serial);

// Statistics over completed records. Throws DomainError when empty.
CampaignStats coverage_stats(std::span<const SampleRecord> records, std::size_t dims, std::size_t buckets,
                             std::size_t maximal_size, double confidence = 0.95);
CampaignStats coverage_stats(const CampaignResult& result, double confidence = 0.95);

}  // namespace falsify
