// SPDX-License-Identifier: Apache-2.0
// mwr-sim: multi-way massive MIMO relay network simulator

#pragma once

#include <vector>

#include "mwr/channel.hpp"
#include "mwr/processing.hpp"

namespace mwr {

enum class SeMethod { kClosedForm, kMonteCarlo };

/// Per-user and sum spectral efficiency in bit/s/Hz.
struct SeReport {
  std::vector<double> per_user_se;
  double sum_se = 0.0;
  SeMethod method = SeMethod::kClosedForm;
  int trials = 0;
  std::vector<double> ci_halfwidth;  // 95% half-widths; zeros for closed form
};

/// Term-by-term Monte Carlo decomposition of the effective noise variance
/// for one user. cross_interference[i] holds E|g_k^T b_i|^2 for i outside
/// {k, k+1} and zero at those two slots.
struct NoiseDecomposition {
  double var_desired = 0.0;        // Var(g_k^T b_{k+1})
  double self_interference = 0.0;  // E|g_k^T b_k|^2
  std::vector<double> cross_interference;
  double amplified_noise = 0.0;  // E||g_k^T C||^2
};

/// Large-M interference coefficient between users k and i (cyclic indices).
double interference_coefficient(const FadingProfile& profile, int relay_antennas, int k, int i);

/// Large-M amplified-noise coefficient for user k.
double amplified_noise_coefficient(const FadingProfile& profile, int relay_antennas, int k);

/// Closed-form large-M approximation of the zero-forcing spectral efficiency.
/// Accepts tau == T (empty data phase, zero rate); throws InvalidConfig for
/// tau > T or tau < K.
SeReport se_closed_form(const SystemConfig& cfg, const FadingProfile& profile);

/// Estimates every noise term with literal per-realization matrices
/// B = A*Pi*W^T*G and C = A*Pi*W^T (zero-forcing, first broadcast slot).
std::vector<NoiseDecomposition> noise_decomposition_mc(const SystemConfig& cfg,
                                                       const FadingProfile& profile, double alpha,
                                                       int n_trials, RngStream rng,
                                                       int threads = 1);

/// Monte Carlo spectral efficiency: moments are averaged across realizations
/// first, then combined into one SINR per user (use-and-forget bound).
SeReport se_monte_carlo(const SystemConfig& cfg, const FadingProfile& profile, int n_trials,
                        RngStream rng, Scheme scheme, int threads = 1);

/// Sum of the per-user entries.
double sum_se(const SeReport& report);

}  // namespace mwr
