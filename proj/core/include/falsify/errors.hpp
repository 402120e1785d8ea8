#pragma once

#include <stdexcept>
#include <string>

namespace falsify {

// A value fell outside the domain an operation accepts (out-of-range feature
// value, bad index, mismatched vector length).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid campaign, scenario, rulebook or specification configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An object was used in a state that does not permit the call.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace falsify
