// SPDX-License-Identifier: Apache-2.0
// mwr-sim: multi-way massive MIMO relay network simulator

#pragma once

#include <stdexcept>
#include <string>

namespace mwr {

/// Operand shapes are incompatible with the requested operation.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A Gram system is numerically degenerate: the (equilibrated) condition
/// estimate exceeds the rejection threshold or the factorization failed.
/// Callers running Monte Carlo loops reject the draw and resample.
class SingularGram : public std::runtime_error {
 public:
  explicit SingularGram(const std::string& what, double condition_estimate = 0.0)
      : std::runtime_error(what), condition_(condition_estimate) {}
  double condition_estimate() const noexcept { return condition_; }

 private:
  double condition_;
};

/// System or experiment parameters violate a documented precondition.
class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Broadcast slot index outside the valid cyclic range.
class InvalidSlot : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A large-scale fading coefficient is zero or negative.
class NonPositiveBeta : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An exact-identity statistical oracle failed its acceptance band.
class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mwr
