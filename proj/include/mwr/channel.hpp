// SPDX-License-Identifier: Apache-2.0
// mwr-sim: multi-way massive MIMO relay network simulator

#pragma once

#include <vector>

#include "mwr/linalg.hpp"

namespace mwr {

/// Scalar system parameters shared by every experiment.
///
/// All SNRs are linear (already normalized by the noise power).
struct SystemConfig {
  int relay_antennas = 0;    // M
  int num_users = 0;         // K
  int coherence_length = 0;  // T, symbols per coherence interval
  int training_length = 0;   // tau, pilot symbols
  double uplink_snr = 0.0;   // per-symbol data SNR of each user
  double pilot_snr = 0.0;    // per-symbol pilot SNR
  double relay_snr = 0.0;    // relay transmit SNR budget

  /// Throws InvalidConfig unless M > K, T > tau, tau >= K and all SNRs > 0.
  void validate() const;
};

/// Per-user large-scale coefficients and the derived estimation statistics.
struct FadingProfile {
  std::vector<double> betas;    // large-scale power gain per user
  std::vector<double> sigma2;   // per-entry variance of the channel estimate
  std::vector<double> sigma2e;  // per-entry variance of the estimation error
  double rho = 0.0;             // sum of 1/(sigma2[k] * sigma2[k+1]), cyclic

  int num_users() const noexcept { return static_cast<int>(betas.size()); }
};

/// One sample of the true channel, its estimate and the estimation error.
/// true_channel == estimate + error holds exactly by construction.
struct ChannelRealization {
  ComplexMatrix true_channel;      // M x K
  ComplexMatrix estimate;          // M x K
  ComplexMatrix estimation_error;  // M x K
};

/// Derives the estimation statistics for the given large-scale coefficients:
/// sigma2[k] = tau*Pp*beta^2 / (tau*Pp*beta + 1), sigma2e[k] = beta - sigma2[k].
FadingProfile estimation_stats(const std::vector<double>& betas, int training_length,
                               double pilot_snr);

/// Draws the estimate and error independently with the profile's column
/// variances and assembles the true channel as their sum.
ChannelRealization sample_realization(const SystemConfig& cfg, const FadingProfile& profile,
                                      RngStream& rng);

/// Path-loss/shadowing kernel: beta = shadow / (1 + distance^exponent).
double large_scale_beta(double distance_m, double pathloss_exp, double shadow_linear);

/// Places users uniformly (by area) on a disk around the relay and returns
/// one large-scale coefficient per user. Shadowing is log-normal with the
/// given standard deviation in dB.
std::vector<double> drop_users(int count, double disk_diameter_m, double shadow_std_db,
                               double pathloss_exp, RngStream& rng);

/// Cyclic user index: wraps into [0, num_users).
inline int cyclic_user(int index, int num_users) {
  int r = index % num_users;
  return r < 0 ? r + num_users : r;
}

}  // namespace mwr
