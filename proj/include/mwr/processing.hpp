// SPDX-License-Identifier: Apache-2.0
// mwr-sim: multi-way massive MIMO relay network simulator

#pragma once

#include <vector>

#include "mwr/channel.hpp"
#include "mwr/linalg.hpp"

namespace mwr {

/// Linear relay processing scheme.
enum class Scheme { kZeroForcing, kMaximumRatio };

/// Receive combiner, precoder, broadcast permutation and power scale for
/// one channel realization and one broadcast slot.
struct ProcessingSet {
  ComplexMatrix receiver;     // K x M, stored as W^T
  ComplexMatrix precoder;     // M x K
  ComplexMatrix permutation;  // K x K, 0/1 with one 1 per row and column
  double power_scale = 0.0;   // alpha, > 0
};

/// Expected traces behind the relay power constraint.
struct QTriple {
  double q1 = 0.0;  // estimated-channel term
  double q2 = 0.0;  // estimation-error term
  double q3 = 0.0;  // amplified-noise term
};

/// W^T = (Ghat^H Ghat)^{-1} Ghat^H; satisfies W^T Ghat = I.
ComplexMatrix zf_receiver(const ComplexMatrix& estimate);

/// A = Ghat^* (Ghat^T Ghat^*)^{-1}; satisfies Ghat^T A = I.
ComplexMatrix zf_precoder(const ComplexMatrix& estimate);

/// W^T = Ghat^H.
ComplexMatrix mr_receiver(const ComplexMatrix& estimate);

/// A = Ghat^*.
ComplexMatrix mr_precoder(const ComplexMatrix& estimate);

/// Cyclic shift permutation for broadcast slot t: entry (k, k+t mod K) is 1,
/// so user k's slot-t message comes from user k+t. Valid for 1 <= t <= K
/// (t = K is the degenerate full cycle, the identity); the broadcast phase
/// itself uses t = 1..K-1. Throws InvalidSlot outside the range.
ComplexMatrix permutation(int num_users, int slot);

/// Builds the full processing set for one realization.
ProcessingSet make_processing(const ChannelRealization& real, Scheme scheme, int slot,
                              double power_scale);

/// Monte Carlo estimate of the three power-constraint traces using exact
/// per-realization matrices (no large-M shortcut).
QTriple q_terms_mc(const SystemConfig& cfg, const FadingProfile& profile, int n_trials,
                   RngStream rng, Scheme scheme = Scheme::kZeroForcing, int threads = 1);

/// Power normalization from measured traces: Pr / (Pu*q1 + Pu*q2 + q3).
double alpha_mc(const SystemConfig& cfg, const QTriple& q);

/// Closed-form large-M power normalization for zero-forcing.
double alpha_analytic(const SystemConfig& cfg, const FadingProfile& profile);

/// Relay transmit vector for one realization:
/// s = sqrt(alpha) * A * Pi * W^T * (sqrt(Pu) * G * x + n).
std::vector<Complex> relay_transmit(const SystemConfig& cfg, const ChannelRealization& real,
                                    const ProcessingSet& proc, const std::vector<Complex>& symbols,
                                    const std::vector<Complex>& relay_noise);

}  // namespace mwr
