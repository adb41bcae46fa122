// SPDX-License-Identifier: Apache-2.0
// mwr-sim: multi-way massive MIMO relay network simulator

#include "mwr/channel.hpp"

#include <cmath>
#include <string>

namespace mwr {

void SystemConfig::validate() const {
  if (relay_antennas <= num_users)
    throw InvalidConfig("config: relay antenna count must exceed the user count");
  if (num_users < 1) throw InvalidConfig("config: at least one user required");
  if (training_length < num_users)
    throw InvalidConfig("config: training length must cover orthogonal pilots (tau >= K)");
  if (coherence_length <= training_length)
    throw InvalidConfig("config: coherence interval must exceed the training length");
  if (!(uplink_snr > 0.0) || !(pilot_snr > 0.0) || !(relay_snr > 0.0))
    throw InvalidConfig("config: all SNRs must be positive");
}

FadingProfile estimation_stats(const std::vector<double>& betas, int training_length,
                               double pilot_snr) {
  if (betas.empty()) throw InvalidConfig("estimation_stats: empty beta vector");
  if (training_length < 1) throw InvalidConfig("estimation_stats: training length must be >= 1");
  if (!(pilot_snr > 0.0)) throw InvalidConfig("estimation_stats: pilot SNR must be positive");

  FadingProfile profile;
  profile.betas = betas;
  profile.sigma2.resize(betas.size());
  profile.sigma2e.resize(betas.size());
  const double tp = static_cast<double>(training_length) * pilot_snr;
  for (std::size_t k = 0; k < betas.size(); ++k) {
    const double beta = betas[k];
    if (!(beta > 0.0))
      throw NonPositiveBeta("estimation_stats: beta[" + std::to_string(k) +
                            "] must be positive");
    const double estimate_var = tp * beta * beta / (tp * beta + 1.0);
    // Round-trip the split so sigma2 + sigma2e == beta holds bit-exactly.
    const double error_var = beta - estimate_var;
    profile.sigma2[k] = beta - error_var;
    profile.sigma2e[k] = error_var;
  }
  const int K = profile.num_users();
  double rho = 0.0;
  for (int k = 0; k < K; ++k) rho += 1.0 / (profile.sigma2[k] * profile.sigma2[cyclic_user(k + 1, K)]);
  profile.rho = rho;
  return profile;
}

ChannelRealization sample_realization(const SystemConfig& cfg, const FadingProfile& profile,
                                      RngStream& rng) {
  if (profile.num_users() != cfg.num_users)
    throw InvalidConfig("sample_realization: profile size does not match the user count");
  const int M = cfg.relay_antennas;
  const int K = cfg.num_users;

  ChannelRealization real;
  real.estimate = sample_circular_gaussian(M, K, rng);
  real.estimation_error = sample_circular_gaussian(M, K, rng);
  for (int k = 0; k < K; ++k) {
    const double s_hat = std::sqrt(profile.sigma2[k]);
    const double s_err = std::sqrt(profile.sigma2e[k]);
    for (int m = 0; m < M; ++m) {
      real.estimate(m, k) *= s_hat;
      real.estimation_error(m, k) *= s_err;
    }
  }
  real.true_channel = real.estimate;
  real.true_channel += real.estimation_error;
  return real;
}

double large_scale_beta(double distance_m, double pathloss_exp, double shadow_linear) {
  return shadow_linear / (1.0 + std::pow(distance_m, pathloss_exp));
}

std::vector<double> drop_users(int count, double disk_diameter_m, double shadow_std_db,
                               double pathloss_exp, RngStream& rng) {
  if (count < 1) throw InvalidConfig("drop_users: count must be >= 1");
  if (disk_diameter_m < 0.0) throw InvalidConfig("drop_users: disk diameter must be >= 0");

  const double radius = disk_diameter_m / 2.0;
  std::vector<double> betas(count);
  for (int k = 0; k < count; ++k) {
    // Uniform by area: the radial CDF is (d/R)^2.
    const double distance = radius * std::sqrt(rng.uniform());
    const double shadow_db = shadow_std_db * rng.normal();
    const double shadow = std::pow(10.0, shadow_db / 10.0);
    betas[k] = large_scale_beta(distance, pathloss_exp, shadow);
  }
  return betas;
}

}  // namespace mwr
