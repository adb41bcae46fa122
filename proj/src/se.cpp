// SPDX-License-Identifier: Apache-2.0
// mwr-sim: multi-way massive MIMO relay network simulator

#include "mwr/se.hpp"

#include <algorithm>
#include <cmath>

#include "mc_kernel.hpp"
#include "parallel.hpp"

namespace mwr {

namespace {

constexpr int kChunkTrials = 32;
constexpr int kMaxRedraws = 100;
constexpr double kZ95 = 1.959963984540054;

double se_prefactor(const SystemConfig& cfg) {
  const double t = static_cast<double>(cfg.coherence_length);
  const double tau = static_cast<double>(cfg.training_length);
  const double k = static_cast<double>(cfg.num_users);
  return ((t - tau) / t) * ((k - 1.0) / k);
}

void check_se_inputs(const SystemConfig& cfg, const FadingProfile& profile) {
  if (cfg.relay_antennas <= cfg.num_users)
    throw InvalidConfig("spectral efficiency: relay antenna count must exceed the user count");
  if (cfg.num_users < 1) throw InvalidConfig("spectral efficiency: at least one user required");
  if (cfg.training_length < cfg.num_users)
    throw InvalidConfig("spectral efficiency: training length must be at least the user count");
  if (cfg.training_length > cfg.coherence_length)
    throw InvalidConfig("spectral efficiency: training length cannot exceed the coherence interval");
  if (!(cfg.uplink_snr >= 0.0) || !(cfg.pilot_snr > 0.0) || !(cfg.relay_snr > 0.0))
    throw InvalidConfig("spectral efficiency: SNRs must be positive");
  if (profile.num_users() != cfg.num_users)
    throw InvalidConfig("spectral efficiency: profile size does not match the user count");
}

}  // namespace

double interference_coefficient(const FadingProfile& profile, int relay_antennas, int k, int i) {
  const int users = profile.num_users();
  const double m = static_cast<double>(relay_antennas);
  const double gap = m - static_cast<double>(users);
  const double s2_after_k = profile.sigma2[cyclic_user(k + 1, users)];
  const double s2_before_i = profile.sigma2[cyclic_user(i - 1, users)];
  const double err_k = profile.sigma2e[cyclic_user(k, users)];
  const double err_i = profile.sigma2e[cyclic_user(i, users)];
  return err_i / (gap * s2_after_k) + err_k / (gap * s2_before_i) +
         err_k * err_i * profile.rho / (m * gap);
}

double amplified_noise_coefficient(const FadingProfile& profile, int relay_antennas, int k) {
  const int users = profile.num_users();
  const double m = static_cast<double>(relay_antennas);
  const double gap = m - static_cast<double>(users);
  const double s2_after_k = profile.sigma2[cyclic_user(k + 1, users)];
  return (m + s2_after_k * profile.sigma2e[cyclic_user(k, users)] * profile.rho) /
         (m * gap * s2_after_k);
}

SeReport se_closed_form(const SystemConfig& cfg, const FadingProfile& profile) {
  check_se_inputs(cfg, profile);
  const int users = cfg.num_users;
  const double alpha = alpha_analytic(cfg, profile);
  const double prefactor = se_prefactor(cfg);

  SeReport report;
  report.method = SeMethod::kClosedForm;
  report.trials = 0;
  report.per_user_se.resize(users);
  report.ci_halfwidth.assign(users, 0.0);
  for (int k = 0; k < users; ++k) {
    double interference = 0.0;
    for (int i = 0; i < users; ++i)
      interference += interference_coefficient(profile, cfg.relay_antennas, k, i);
    const double noise = amplified_noise_coefficient(profile, cfg.relay_antennas, k);
    const double sinr = alpha * cfg.uplink_snr /
                        (alpha * cfg.uplink_snr * interference + alpha * noise + 1.0);
    report.per_user_se[k] = prefactor * std::log2(1.0 + sinr);
    report.sum_se += report.per_user_se[k];
  }
  return report;
}

std::vector<NoiseDecomposition> noise_decomposition_mc(const SystemConfig& cfg,
                                                       const FadingProfile& profile, double alpha,
                                                       int n_trials, RngStream rng, int threads) {
  check_se_inputs(cfg, profile);
  if (n_trials < 100) throw InvalidConfig("noise_decomposition_mc: need at least 100 trials");
  if (!(alpha > 0.0)) throw InvalidConfig("noise_decomposition_mc: alpha must be positive");
  const int users = cfg.num_users;
  const std::size_t kk = static_cast<std::size_t>(users) * users;

  struct Part {
    std::vector<Complex> gain;
    std::vector<double> gain_abs2;
    std::vector<double> noise;
  };
  const std::int64_t n_chunks = (n_trials + kChunkTrials - 1) / kChunkTrials;
  std::vector<Part> parts(n_chunks);

  detail::parallel_for(n_chunks, threads, [&](std::int64_t chunk) {
    Part part;
    part.gain.assign(kk, Complex(0.0, 0.0));
    part.gain_abs2.assign(kk, 0.0);
    part.noise.assign(users, 0.0);
    const int begin = static_cast<int>(chunk) * kChunkTrials;
    const int end = std::min(n_trials, begin + kChunkTrials);
    for (int t = begin; t < end; ++t) {
      RngStream stream = rng.substream(static_cast<std::uint64_t>(t));
      for (int attempt = 0;; ++attempt) {
        const ChannelRealization real = sample_realization(cfg, profile, stream);
        try {
          // Literal per-realization matrices; this path stays independent of
          // the reduced algebra used by the fast Monte Carlo kernel.
          const ComplexMatrix receiver = zf_receiver(real.estimate);
          const ComplexMatrix precoder = zf_precoder(real.estimate);
          const ComplexMatrix route = permutation(users, 1);
          const ComplexMatrix precoder_routed = matmul(precoder, route);
          const ComplexMatrix combined = matmul(receiver, real.true_channel);
          const ComplexMatrix relay_gain = matmul(precoder_routed, combined);
          const ComplexMatrix gains =
              matmul(real.true_channel, Op::kTranspose, relay_gain, Op::kNone);
          const ComplexMatrix towards =
              matmul(matmul(real.true_channel, Op::kTranspose, precoder_routed, Op::kNone),
                     receiver);
          for (std::size_t i = 0; i < kk; ++i) {
            part.gain[i] += gains.data()[i];
            part.gain_abs2[i] += std::norm(gains.data()[i]);
          }
          for (int u = 0; u < users; ++u) {
            double row = 0.0;
            for (int c = 0; c < towards.cols(); ++c) row += std::norm(towards(u, c));
            part.noise[u] += row;
          }
          break;
        } catch (const SingularGram&) {
          if (attempt + 1 >= kMaxRedraws) throw;
        }
      }
    }
    parts[chunk] = std::move(part);
  });

  std::vector<Complex> gain(kk, Complex(0.0, 0.0));
  std::vector<double> gain_abs2(kk, 0.0);
  std::vector<double> noise(users, 0.0);
  for (const Part& part : parts) {
    for (std::size_t i = 0; i < kk; ++i) {
      gain[i] += part.gain[i];
      gain_abs2[i] += part.gain_abs2[i];
    }
    for (int u = 0; u < users; ++u) noise[u] += part.noise[u];
  }
  const double inv = 1.0 / static_cast<double>(n_trials);

  std::vector<NoiseDecomposition> out(users);
  for (int k = 0; k < users; ++k) {
    NoiseDecomposition& d = out[k];
    const int partner = cyclic_user(k + 1, users);
    const std::size_t desired = static_cast<std::size_t>(k) * users + partner;
    const double mean_abs2 = gain_abs2[desired] * inv;
    const Complex mean = gain[desired] * inv;
    d.var_desired = std::max(0.0, mean_abs2 - std::norm(mean));
    d.self_interference = gain_abs2[static_cast<std::size_t>(k) * users + k] * inv;
    d.cross_interference.assign(users, 0.0);
    for (int i = 0; i < users; ++i) {
      if (i == k || i == partner) continue;
      d.cross_interference[i] = gain_abs2[static_cast<std::size_t>(k) * users + i] * inv;
    }
    d.amplified_noise = noise[k] * inv;
  }
  return out;
}

SeReport se_monte_carlo(const SystemConfig& cfg, const FadingProfile& profile, int n_trials,
                        RngStream rng, Scheme scheme, int threads) {
  check_se_inputs(cfg, profile);
  if (n_trials < 100) throw InvalidConfig("se_monte_carlo: need at least 100 trials");
  detail::KernelRequest request;
  request.zero_forcing = scheme == Scheme::kZeroForcing;
  request.maximum_ratio = scheme == Scheme::kMaximumRatio;
  request.moments = true;
  request.threads = threads;
  const detail::KernelResult result = detail::run_mc_kernel(cfg, profile, n_trials, rng, request);
  return detail::se_from_moments(cfg, scheme == Scheme::kZeroForcing ? *result.zf : *result.mr);
}

double sum_se(const SeReport& report) {
  double total = 0.0;
  for (double v : report.per_user_se) total += v;
  return total;
}

namespace detail {

SeReport se_from_moments(const SystemConfig& cfg, const MomentSet& moments) {
  const int users = moments.users;
  const double n = static_cast<double>(moments.trials);
  const double pu = cfg.uplink_snr;
  const double alpha =
      cfg.relay_snr / (pu * moments.q1 + pu * moments.q2 + moments.q3);
  const double prefactor = se_prefactor(cfg);

  SeReport report;
  report.method = SeMethod::kMonteCarlo;
  report.trials = static_cast<int>(moments.trials);
  report.per_user_se.resize(users);
  report.ci_halfwidth.resize(users);

  for (int k = 0; k < users; ++k) {
    const int partner = cyclic_user(k + 1, users);
    const std::size_t row = static_cast<std::size_t>(k) * users;
    const Complex mean_gain = moments.gain_mean[row + partner];
    const double mean_gain_sq = std::norm(mean_gain);

    double total_abs2 = 0.0;
    double var_of_abs2_means = 0.0;
    for (int i = 0; i < users; ++i) {
      const double s = moments.gain_abs2_mean[row + i];
      total_abs2 += s;
      var_of_abs2_means += std::max(0.0, moments.gain_abs4_mean[row + i] - s * s) / n;
    }
    const double fluctuation = std::max(0.0, total_abs2 - mean_gain_sq);
    const double noise = moments.noise_mean[k];

    const double numerator = alpha * pu * mean_gain_sq;
    const double denominator = alpha * pu * fluctuation + alpha * noise + 1.0;
    const double sinr = numerator / denominator;
    report.per_user_se[k] = prefactor * std::log2(1.0 + sinr);

    // First-order propagation of each moment's Monte Carlo error.
    const double gain_var = std::max(0.0, moments.gain_abs2_mean[row + partner] - mean_gain_sq);
    const double var_mean_sq = 2.0 * mean_gain_sq * gain_var / n;
    const double var_noise_mean =
        std::max(0.0, moments.noise_sq_mean[k] - noise * noise) / n;
    const double num_var = alpha * pu * alpha * pu * var_mean_sq;
    const double den_var = alpha * pu * alpha * pu * (var_of_abs2_means + var_mean_sq) +
                           alpha * alpha * var_noise_mean;
    double rel_sq = 0.0;
    if (numerator > 0.0) rel_sq += num_var / (numerator * numerator);
    rel_sq += den_var / (denominator * denominator);
    const double sinr_sd = sinr * std::sqrt(rel_sq);
    report.ci_halfwidth[k] = kZ95 * prefactor * sinr_sd / ((1.0 + sinr) * std::log(2.0));
  }
  report.sum_se = sum_se(report);
  return report;
}

}  // namespace detail

}  // namespace mwr
