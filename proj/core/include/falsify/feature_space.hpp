#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "falsify/random.hpp"

namespace falsify {

struct Dimension {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;

  double width() const noexcept { return hi - lo; }
  bool operator==(const Dimension&) const = default;
};

// One point of the feature space together with its bucket coordinates.
struct SampleVector {
  std::vector<double> values;
  std::vector<std::size_t> buckets;

  bool operator==(const SampleVector&) const = default;
};

// The sampling domain: an ordered list of continuous dimensions, each split
// into the same number of equal-width buckets. Immutable once built.
class FeatureSpace {
 public:
  static constexpr std::size_t kDefaultBuckets = 10;

  // Throws DomainError on an empty dimension list, duplicate names,
  // non-finite or inverted ranges, or a zero bucket count.
  FeatureSpace(std::vector<Dimension> dims, std::size_t bucket_count = kDefaultBuckets);

  std::size_t size() const noexcept { return dims_.size(); }
  std::size_t bucket_count() const noexcept { return bucket_count_; }
  std::span<const Dimension> dimensions() const noexcept { return dims_; }
  const Dimension& dimension(std::size_t dim) const;
  std::optional<std::size_t> find(std::string_view name) const;

  double bucket_width(std::size_t dim) const;

  // floor(N * (value - lo) / (hi - lo)); the upper endpoint maps into the last
  // bucket so the closed range is covered.
  std::size_t bucket_index(std::size_t dim, double value) const;

  // Uniform draw on [lo + b*w, lo + (b+1)*w); the result always maps back to
  // `bucket` under bucket_index().
  double sample_in_bucket(std::size_t dim, std::size_t bucket, Rng& rng) const;

  // Maps a unit-interval coordinate into the dimension's range.
  double from_unit(std::size_t dim, double unit) const;

  std::vector<double> normalize(std::span<const double> values) const;
  std::vector<double> denormalize(std::span<const double> unit) const;

  // Validates `values` and attaches bucket indices.
  SampleVector make_sample(std::vector<double> values) const;

  bool operator==(const FeatureSpace&) const = default;

 private:
  void check_dim(std::size_t dim) const;
  void check_value(std::size_t dim, double value) const;

  std::vector<Dimension> dims_;
  std::size_t bucket_count_;
};

}  // namespace falsify
