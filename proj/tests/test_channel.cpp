// SPDX-License-Identifier: Apache-2.0
// mwr-sim: multi-way massive MIMO relay network simulator

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mwr/channel.hpp"

using namespace mwr;

namespace {

SystemConfig small_config() {
  SystemConfig cfg;
  cfg.relay_antennas = 16;
  cfg.num_users = 4;
  cfg.coherence_length = 50;
  cfg.training_length = 4;
  cfg.uplink_snr = 1.0;
  cfg.pilot_snr = 1.0;
  cfg.relay_snr = 10.0;
  return cfg;
}

}  // namespace

TEST_CASE("estimation statistics for unit large-scale fading") {
  const FadingProfile profile = estimation_stats({1.0}, 20, 1.0);
  CHECK(profile.sigma2[0] == doctest::Approx(20.0 / 21.0).epsilon(1e-12));
  CHECK(profile.sigma2e[0] == doctest::Approx(1.0 / 21.0).epsilon(1e-12));

  // 20 equal users: rho = K / sigma2^2.
  const FadingProfile many = estimation_stats(std::vector<double>(20, 1.0), 20, 1.0);
  CHECK(many.rho == doctest::Approx(22.05).epsilon(1e-12));
}

TEST_CASE("estimation statistics approach perfect CSI at high pilot SNR") {
  const std::vector<double> betas = {0.5, 1.0, 2.0};
  const FadingProfile profile = estimation_stats(betas, 20, 1e12);
  for (int k = 0; k < 3; ++k) {
    CHECK(profile.sigma2[k] == doctest::Approx(betas[k]).epsilon(1e-9));
    CHECK(profile.sigma2e[k] <= 1e-9);
  }
}

TEST_CASE("estimate and error variances always split the large-scale gain") {
  RngStream rng(3, 0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> betas(6);
    for (auto& b : betas) b = std::exp(4.0 * rng.normal());
    const FadingProfile profile = estimation_stats(betas, 8, 0.37);
    for (int k = 0; k < 6; ++k) {
      CHECK(profile.sigma2[k] + profile.sigma2e[k] == betas[k]);  // exact by construction
      CHECK(profile.sigma2e[k] >= 0.0);
      CHECK(profile.sigma2[k] <= betas[k]);
    }
  }
}

TEST_CASE("estimation quality is monotone in pilot SNR and training length") {
  double previous = 0.0;
  for (double pp : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const double s2 = estimation_stats({1.0}, 10, pp).sigma2[0];
    CHECK(s2 > previous);
    previous = s2;
  }
  previous = 0.0;
  for (int tau : {1, 2, 5, 10, 40}) {
    const double s2 = estimation_stats({1.0}, tau, 0.5).sigma2[0];
    CHECK(s2 > previous);
    previous = s2;
  }
}

TEST_CASE("estimation statistics reject bad inputs") {
  CHECK_THROWS_AS(estimation_stats({1.0, 0.0}, 10, 1.0), NonPositiveBeta);
  CHECK_THROWS_AS(estimation_stats({1.0, -2.0}, 10, 1.0), NonPositiveBeta);
  CHECK_THROWS_AS(estimation_stats({}, 10, 1.0), InvalidConfig);
  CHECK_THROWS_AS(estimation_stats({1.0}, 0, 1.0), InvalidConfig);
  CHECK_THROWS_AS(estimation_stats({1.0}, 10, 0.0), InvalidConfig);
}

TEST_CASE("system config invariants") {
  SystemConfig cfg = small_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.relay_antennas = cfg.num_users;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg = small_config();
  cfg.training_length = cfg.num_users - 1;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg = small_config();
  cfg.coherence_length = cfg.training_length;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg = small_config();
  cfg.relay_snr = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
}

TEST_CASE("sampled realization satisfies the additive decomposition exactly") {
  const SystemConfig cfg = small_config();
  const FadingProfile profile =
      estimation_stats({0.5, 1.0, 2.0, 4.0}, cfg.training_length, cfg.pilot_snr);
  RngStream rng(17, 1);
  const ChannelRealization real = sample_realization(cfg, profile, rng);
  for (int m = 0; m < cfg.relay_antennas; ++m)
    for (int k = 0; k < cfg.num_users; ++k)
      CHECK(real.true_channel(m, k) == real.estimate(m, k) + real.estimation_error(m, k));
}

TEST_CASE("sampled channel matches the per-user large-scale power") {
  const SystemConfig cfg = small_config();
  const std::vector<double> betas = {0.5, 1.0, 2.0, 4.0};
  const FadingProfile profile = estimation_stats(betas, cfg.training_length, cfg.pilot_snr);
  const int draws = 10000;
  RngStream rng(23, 0);
  std::vector<double> power(cfg.num_users, 0.0);
  for (int t = 0; t < draws; ++t) {
    const ChannelRealization real = sample_realization(cfg, profile, rng);
    for (int k = 0; k < cfg.num_users; ++k) {
      double acc = 0.0;
      for (int m = 0; m < cfg.relay_antennas; ++m) acc += std::norm(real.true_channel(m, k));
      power[k] += acc / cfg.relay_antennas;
    }
  }
  for (int k = 0; k < cfg.num_users; ++k)
    CHECK(power[k] / draws == doctest::Approx(betas[k]).epsilon(0.03));
}

TEST_CASE("estimate and error are uncorrelated across draws") {
  const SystemConfig cfg = small_config();
  const FadingProfile profile = estimation_stats(std::vector<double>(cfg.num_users, 1.0),
                                                 cfg.training_length, cfg.pilot_snr);
  const int draws = 10000;
  RngStream rng(29, 0);
  Complex mean(0.0, 0.0);
  double sq = 0.0;
  for (int t = 0; t < draws; ++t) {
    const ChannelRealization real = sample_realization(cfg, profile, rng);
    Complex inner(0.0, 0.0);
    for (int m = 0; m < cfg.relay_antennas; ++m)
      inner += std::conj(real.estimate(m, 0)) * real.estimation_error(m, 0);
    mean += inner;
    sq += std::norm(inner);
  }
  mean /= static_cast<double>(draws);
  sq /= static_cast<double>(draws);
  const double std_error = std::sqrt(std::max(0.0, sq - std::norm(mean)) / draws);
  CHECK(std::abs(mean) <= 3.0 * std_error);
}

TEST_CASE("path-loss kernel values") {
  CHECK(large_scale_beta(0.0, 4.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  const double expected = 1.0 / (1.0 + std::pow(500.0, 4.0));
  CHECK(large_scale_beta(500.0, 4.0, 1.0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(1.6e-11).epsilon(1e-3));
}

TEST_CASE("degenerate drop at the relay with no shadowing gives unit gain") {
  RngStream rng(31, 0);
  const std::vector<double> betas = drop_users(8, 1e-9, 0.0, 4.0, rng);
  for (double b : betas) CHECK(b == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("shadowing generator has the requested dB statistics") {
  RngStream rng(37, 0);
  const int n = 100000;
  // Tiny disk isolates the shadowing term: beta == z.
  const std::vector<double> betas = drop_users(n, 1e-9, 8.0, 4.0, rng);
  double mean_db = 0.0, var_db = 0.0;
  for (double b : betas) mean_db += 10.0 * std::log10(b);
  mean_db /= n;
  for (double b : betas) {
    const double x = 10.0 * std::log10(b) - mean_db;
    var_db += x * x;
  }
  const double std_db = std::sqrt(var_db / n);
  CHECK(std::abs(mean_db) <= 0.1);
  CHECK(std_db == doctest::Approx(8.0).epsilon(0.02));
}

TEST_CASE("kolmogorov-smirnov: user distances are uniform on the disk by area") {
  RngStream rng(41, 0);
  const int n = 100000;
  const double radius = 500.0;
  const std::vector<double> betas = drop_users(n, 2.0 * radius, 0.0, 4.0, rng);
  std::vector<double> distances(n);
  for (int i = 0; i < n; ++i)
    distances[i] = std::pow(1.0 / betas[i] - 1.0, 0.25);  // invert the path-loss model
  std::sort(distances.begin(), distances.end());
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double model = (distances[i] / radius) * (distances[i] / radius);
    const double hi = static_cast<double>(i + 1) / n;
    const double lo = static_cast<double>(i) / n;
    worst = std::max({worst, std::abs(model - hi), std::abs(model - lo)});
  }
  // 1% significance threshold for large n.
  CHECK(worst <= 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("drop_users rejects bad arguments") {
  RngStream rng(1, 1);
  CHECK_THROWS_AS(drop_users(0, 1000.0, 8.0, 4.0, rng), InvalidConfig);
  CHECK_THROWS_AS(drop_users(4, -1.0, 8.0, 4.0, rng), InvalidConfig);
}
