#include "falsify/feature_space.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "falsify/errors.hpp"

namespace falsify {

FeatureSpace::FeatureSpace(std::vector<Dimension> dims, std::size_t bucket_count)
    : dims_(std::move(dims)), bucket_count_(bucket_count) {
  if (dims_.empty()) throw DomainError("feature space needs at least one dimension");
  if (bucket_count_ == 0) throw DomainError("bucket count must be at least 1");
  std::set<std::string_view> seen;
  for (const auto& d : dims_) {
    if (d.name.empty()) throw DomainError("dimension name must not be empty");
    if (!seen.insert(d.name).second) throw DomainError("duplicate dimension name '" + d.name + "'");
    if (!std::isfinite(d.lo) || !std::isfinite(d.hi) || !(d.lo < d.hi)) {
      throw DomainError("dimension '" + d.name + "' needs finite lo < hi");
    }
  }
}

const Dimension& FeatureSpace::dimension(std::size_t dim) const {
  check_dim(dim);
  return dims_[dim];
}

std::optional<std::size_t> FeatureSpace::find(std::string_view name) const {
  auto it = std::find_if(dims_.begin(), dims_.end(), [&](const Dimension& d) { return d.name == name; });
  if (it == dims_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - dims_.begin());
}

double FeatureSpace::bucket_width(std::size_t dim) const {
  return dimension(dim).width() / static_cast<double>(bucket_count_);
}

void FeatureSpace::check_dim(std::size_t dim) const {
  if (dim >= dims_.size()) {
    throw DomainError("dimension index " + std::to_string(dim) + " out of range");
  }
}

void FeatureSpace::check_value(std::size_t dim, double value) const {
  const auto& d = dims_[dim];
  if (!(value >= d.lo && value <= d.hi)) {
    throw DomainError("value " + std::to_string(value) + " outside [" + std::to_string(d.lo) + ", " +
                      std::to_string(d.hi) + "] for dimension '" + d.name + "'");
  }
}

std::size_t FeatureSpace::bucket_index(std::size_t dim, double value) const {
  check_dim(dim);
  check_value(dim, value);
  const auto& d = dims_[dim];
  const double scaled = static_cast<double>(bucket_count_) * (value - d.lo) / d.width();
  const auto idx = static_cast<std::size_t>(std::floor(scaled));
  return std::min(idx, bucket_count_ - 1);
}

double FeatureSpace::sample_in_bucket(std::size_t dim, std::size_t bucket, Rng& rng) const {
  check_dim(dim);
  if (bucket >= bucket_count_) {
    throw DomainError("bucket " + std::to_string(bucket) + " out of range for dimension '" +
                      dims_[dim].name + "'");
  }
  const auto& d = dims_[dim];
  const double w = d.width() / static_cast<double>(bucket_count_);
  const double lo = d.lo + static_cast<double>(bucket) * w;
  const double hi = bucket + 1 == bucket_count_ ? d.hi : d.lo + static_cast<double>(bucket + 1) * w;
  double v = lo + uniform01(rng) * (hi - lo);
  v = std::clamp(v, d.lo, d.hi);
  // Rounding at bucket edges can land one ulp on the wrong side.
  while (bucket_index(dim, v) > bucket) v = std::nextafter(v, d.lo);
  while (bucket_index(dim, v) < bucket) v = std::nextafter(v, d.hi);
  return v;
}

double FeatureSpace::from_unit(std::size_t dim, double unit) const {
  const auto& d = dimension(dim);
  return std::clamp(d.lo + unit * d.width(), d.lo, d.hi);
}

std::vector<double> FeatureSpace::normalize(std::span<const double> values) const {
  if (values.size() != dims_.size()) throw DomainError("value count does not match feature space");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    check_value(i, values[i]);
    out[i] = (values[i] - dims_[i].lo) / dims_[i].width();
  }
  return out;
}

std::vector<double> FeatureSpace::denormalize(std::span<const double> unit) const {
  if (unit.size() != dims_.size()) throw DomainError("value count does not match feature space");
  std::vector<double> out(unit.size());
  for (std::size_t i = 0; i < unit.size(); ++i) {
    if (!(unit[i] >= 0.0 && unit[i] <= 1.0)) {
      throw DomainError("normalized value outside [0, 1] for dimension '" + dims_[i].name + "'");
    }
    out[i] = from_unit(i, unit[i]);
  }
  return out;
}

SampleVector FeatureSpace::make_sample(std::vector<double> values) const {
  if (values.size() != dims_.size()) throw DomainError("value count does not match feature space");
  SampleVector s;
  s.buckets.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) s.buckets[i] = bucket_index(i, values[i]);
  s.values = std::move(values);
  return s;
}

}  // namespace falsify
