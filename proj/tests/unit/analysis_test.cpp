#include <doctest.h>

#include <cmath>

#include "falsify/analysis.hpp"
#include "falsify/errors.hpp"
#include "falsify/random.hpp"

using namespace falsify;

namespace {

// P(X <= k) for X ~ Binomial(n, p), summed term by term.
double binom_cdf(int k, int n, double p) {
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  double total = 0.0;
  for (int i = 0; i <= k; ++i) {
    const double log_term = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) +
                            i * std::log(p) + (n - i) * std::log1p(-p);
    total += std::exp(log_term);
  }
  return total;
}

// Root of a monotone function on [0, 1] by bisection.
template <typename F>
double bisect(F f, bool increasing) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) < 0.0) == increasing) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

Interval tail_oracle(int k, int n, double confidence) {
  const double a = 1.0 - confidence;
  Interval out;
  // lo: P(X >= k) = a/2, increasing in p.
  out.lo = k == 0 ? 0.0 : bisect([&](double p) { return (1.0 - binom_cdf(k - 1, n, p)) - a / 2; }, true);
  // hi: P(X <= k) = a/2, decreasing in p.
  out.hi = k == n ? 1.0 : bisect([&](double p) { return binom_cdf(k, n, p) - a / 2; }, false);
  return out;
}

CampaignStats stats_with(std::uint64_t k, std::uint64_t n) {
  CampaignStats s;
  s.samples = n;
  s.counterexamples = k;
  s.ci = clopper_pearson(k, n);
  return s;
}

}  // namespace

TEST_CASE("clopper-pearson examples") {
  const auto zero = clopper_pearson(0, 10, 0.95);
  CHECK(zero.lo == 0.0);
  CHECK(zero.hi == doctest::Approx(1.0 - std::pow(0.025, 0.1)).epsilon(1e-9));
  CHECK(std::abs(zero.hi - 0.30850) < 1e-4);

  const auto all = clopper_pearson(10, 10, 0.95);
  CHECK(all.hi == 1.0);
  CHECK(all.lo == doctest::Approx(std::pow(0.025, 0.1)).epsilon(1e-9));
  CHECK(std::abs(all.lo - 0.69150) < 1e-4);

  const auto half = clopper_pearson(5, 10, 0.95);
  CHECK(std::abs(half.lo - 0.18709) < 1e-5);
  CHECK(std::abs(half.hi - 0.81291) < 1e-5);
  CHECK(half.lo == doctest::Approx(1.0 - half.hi).epsilon(1e-9));
}

TEST_CASE("clopper-pearson errors") {
  CHECK_THROWS_AS(clopper_pearson(11, 10), DomainError);
  CHECK_THROWS_AS(clopper_pearson(0, 0), DomainError);
  CHECK_THROWS_AS(clopper_pearson(1, 10, 0.0), DomainError);
  CHECK_THROWS_AS(clopper_pearson(1, 10, 1.0), DomainError);
}

TEST_CASE("property: agrees with the binomial tail oracle for n <= 50") {
  for (int n = 1; n <= 50; ++n) {
    for (int k = 0; k <= n; ++k) {
      for (double conf : {0.95, 0.9}) {
        const auto got = clopper_pearson(k, n, conf);
        const auto want = tail_oracle(k, n, conf);
        REQUIRE(std::abs(got.lo - want.lo) < 1e-6);
        REQUIRE(std::abs(got.hi - want.hi) < 1e-6);
      }
    }
  }
}

TEST_CASE("property: interval contains the proportion and is symmetric") {
  Rng rng(19);
  for (int trial = 0; trial < 500; ++trial) {
    const std::uint64_t n = 1 + uniform_index(rng, 2000);
    const std::uint64_t k = uniform_index(rng, n + 1);
    const auto ci = clopper_pearson(k, n);
    const double p = static_cast<double>(k) / n;
    REQUIRE(ci.lo >= 0.0);
    REQUIRE(ci.lo <= p);
    REQUIRE(p <= ci.hi);
    REQUIRE(ci.hi <= 1.0);
    REQUIRE(std::abs(ci.lo - (1.0 - clopper_pearson(n - k, n).hi)) < 1e-9);
  }
}

TEST_CASE("property: width shrinks with n at fixed proportion") {
  for (std::uint64_t k : {1, 3, 7}) {
    double prev = 2.0;
    for (std::uint64_t m = 1; m <= 40; ++m) {
      const double w = clopper_pearson(k * m, 10 * m).width();
      CHECK(w < prev);
      prev = w;
    }
  }
}

TEST_CASE("incomplete beta and quantile") {
  CHECK(regularized_incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3));
  CHECK(regularized_incomplete_beta(2, 3, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(2, 3, 1.0) == 1.0);
  // I_x(a, 1) = x^a
  CHECK(regularized_incomplete_beta(3.5, 1, 0.6) == doctest::Approx(std::pow(0.6, 3.5)).epsilon(1e-12));
  const double q = beta_quantile(0.4, 2.5, 4.0);
  CHECK(regularized_incomplete_beta(2.5, 4.0, q) == doctest::Approx(0.4).epsilon(1e-9));
}

TEST_CASE("speedup factor") {
  CHECK(speedup_factor(396, 100) == doctest::Approx(3.96));
  CHECK(speedup_factor(100, 100) == 1.0);
  CHECK_THROWS_AS(speedup_factor(10, 0), DomainError);
}

TEST_CASE("ci width ratio") {
  const auto s = stats_with(20, 200);
  CHECK(ci_width_ratio(s, s) == 1.0);
  for (double p : {0.05, 0.1, 0.2, 0.5}) {
    const auto k = static_cast<std::uint64_t>(p * 200);
    const double r = ci_width_ratio(stats_with(4 * k, 800), stats_with(k, 200));
    CHECK(r >= 0.4);
    CHECK(r <= 0.6);
  }
  auto degenerate = stats_with(0, 10);
  degenerate.ci = {0.2, 0.2};
  CHECK_THROWS_AS(ci_width_ratio(s, degenerate), DomainError);
  auto other = stats_with(20, 200);
  other.confidence = 0.9;
  CHECK_THROWS_AS(ci_width_ratio(other, s), DomainError);
}

namespace {

SampleRecord record(std::uint64_t id, std::vector<std::size_t> buckets, bool cex) {
  SampleRecord r;
  r.id = id;
  r.sample.buckets = std::move(buckets);
  r.sample.values.assign(r.sample.buckets.size(), 0.0);
  r.b.bits = {cex, false};
  r.rho.rho = {cex ? -1.0 : 1.0, 1.0};
  r.counterexample = cex;
  return r;
}

}  // namespace

TEST_CASE("coverage stats") {
  std::vector<SampleRecord> one{record(0, {1, 2}, true)};
  const auto single = coverage_stats(one, 2, 3, 1);
  CHECK(single.distinct_combinations == 1);
  CHECK(single.distinct_sampled == 1);
  CHECK(single.histogram(0, 1) == 1);
  CHECK(single.metrics_falsified == 1);

  std::vector<SampleRecord> recs{record(0, {0, 0}, true), record(1, {0, 0}, true), record(2, {1, 0}, true),
                                 record(3, {2, 2}, false)};
  recs[1].b.bits = {true, true};
  recs[1].rho.rho = {-1.0, -0.5};
  const auto st = coverage_stats(recs, 2, 3, 2);
  CHECK(st.samples == 4);
  CHECK(st.counterexamples == 3);
  CHECK(st.proportion == 0.75);
  CHECK(st.distinct_combinations == 2);
  CHECK(st.distinct_sampled == 3);
  CHECK(st.metrics_falsified == 2);
  CHECK(st.max_simultaneous == 2);
  CHECK(st.maximal_size == 2);
  CHECK(st.ci.lo <= 0.75);
  CHECK(st.histogram(1, 0) == 3);

  CHECK_THROWS_AS(coverage_stats(std::vector<SampleRecord>{}, 2, 3, 0), DomainError);
}
