// SPDX-License-Identifier: Apache-2.0
// mwr-sim: multi-way massive MIMO relay network simulator

#include "mwr/oracles.hpp"

#include <cmath>

#include "mwr/processing.hpp"
#include "mwr/se.hpp"

namespace mwr {

namespace {

constexpr int kMaxRedraws = 100;

struct RunningMoments {
  double sum = 0.0;
  double sum_sq = 0.0;
  long count = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++count;
  }
  double mean() const { return sum / static_cast<double>(count); }
  double std_error() const {
    const double m = mean();
    const double var = std::max(0.0, sum_sq / static_cast<double>(count) - m * m);
    return std::sqrt(var / static_cast<double>(count));
  }
};

// Row vector (1 x M) view of a matrix column, without conjugation.
ComplexMatrix column_as_row(const ComplexMatrix& a, int col) {
  ComplexMatrix row(1, a.rows());
  for (int r = 0; r < a.rows(); ++r) row(0, r) = a(r, col);
  return row;
}

Complex dot_with_column(const ComplexMatrix& row, const ComplexMatrix& a, int col) {
  Complex acc(0.0, 0.0);
  for (int r = 0; r < a.rows(); ++r) acc += row(0, r) * a(r, col);
  return acc;
}

}  // namespace

OracleResult make_oracle_result(std::string name, double empirical, double analytic,
                                double mc_std_error, long trials, double tolerance) {
  OracleResult out;
  out.name = std::move(name);
  out.empirical = empirical;
  out.analytic = analytic;
  out.mc_std_error = mc_std_error;
  out.trials = trials;
  out.tolerance = tolerance;
  const double err = std::abs(empirical - analytic);
  out.rel_error = analytic != 0.0 ? err / std::abs(analytic) : err;
  out.pass = err <= std::max(tolerance * std::abs(analytic), 4.0 * mc_std_error);
  return out;
}

OracleResult lemma1_check(int relay_antennas, int num_users, const std::vector<double>& d,
                          const std::vector<double>& d_hat, int n_trials, RngStream rng) {
  if (relay_antennas <= num_users)
    throw InvalidConfig("lemma1_check: need more rows than columns");
  if (static_cast<int>(d.size()) != num_users || static_cast<int>(d_hat.size()) != num_users)
    throw DimensionMismatch("lemma1_check: diagonal sizes must match the column count");
  for (double v : d)
    if (!(v > 0.0)) throw InvalidConfig("lemma1_check: D must be positive");

  std::vector<double> col_scale(num_users);
  for (int k = 0; k < num_users; ++k) col_scale[k] = std::sqrt(d[k]);

  RunningMoments stats;
  for (int t = 0; t < n_trials; ++t) {
    for (int attempt = 0;; ++attempt) {
      ComplexMatrix x = sample_circular_gaussian(relay_antennas, num_users, rng);
      for (int k = 0; k < num_users; ++k)
        for (int r = 0; r < relay_antennas; ++r) x(r, k) *= col_scale[k];
      try {
        const ComplexMatrix gram = matmul(x, Op::kConjTranspose, x, Op::kNone);
        const ComplexMatrix inv = hermitian_solve(gram, ComplexMatrix::identity(num_users));
        double value = 0.0;
        for (int k = 0; k < num_users; ++k) value += d_hat[k] * inv(k, k).real();
        stats.add(value);
        break;
      } catch (const SingularGram&) {
        if (attempt + 1 >= kMaxRedraws) throw;
      }
    }
  }

  double analytic = 0.0;
  for (int k = 0; k < num_users; ++k) analytic += d_hat[k] / d[k];
  analytic /= static_cast<double>(relay_antennas - num_users);

  const double tolerance = (relay_antennas == num_users + 1) ? 0.10 : 0.0;
  return make_oracle_result("lemma1", stats.mean(), analytic, stats.std_error(), n_trials,
                            tolerance);
}

OracleResult lemma2_check(const ComplexMatrix& a, int n_trials, RngStream rng) {
  if (a.rows() != a.cols()) throw DimensionMismatch("lemma2_check: matrix must be square");
  const int m = a.rows();

  RunningMoments stats;
  for (int t = 0; t < n_trials; ++t) {
    ComplexMatrix x = sample_circular_gaussian(m, 1, rng);
    Complex form(0.0, 0.0);
    for (int r = 0; r < m; ++r) {
      Complex acc(0.0, 0.0);
      for (int c = 0; c < m; ++c) acc += a(r, c) * x(c, 0);
      form += x(r, 0) * acc;
    }
    stats.add(std::norm(form));
  }

  // Tr(A A^H) + Tr(A A^*); the sum is real for any square A.
  double analytic = frobenius_norm_sq(a);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) analytic += (a(r, c) * std::conj(a(c, r))).real();

  return make_oracle_result("lemma2", stats.mean(), analytic, stats.std_error(), n_trials, 0.0);
}

std::array<OracleResult, 3> q_asymptotic_check(const SystemConfig& cfg,
                                               const FadingProfile& profile, int n_trials,
                                               RngStream rng) {
  cfg.validate();
  if (profile.num_users() != cfg.num_users)
    throw InvalidConfig("q_asymptotic_check: profile size mismatch");
  const int users = cfg.num_users;

  RunningMoments q1, q2, q3;
  for (int t = 0; t < n_trials; ++t) {
    RngStream stream = rng.substream(static_cast<std::uint64_t>(t));
    for (int attempt = 0;; ++attempt) {
      const ChannelRealization real = sample_realization(cfg, profile, stream);
      try {
        const ComplexMatrix receiver = zf_receiver(real.estimate);
        const ComplexMatrix precoder = zf_precoder(real.estimate);
        const ComplexMatrix routed = matmul(precoder, permutation(users, 1));
        q1.add(frobenius_norm_sq(matmul(routed, matmul(receiver, real.estimate))));
        q2.add(frobenius_norm_sq(matmul(routed, matmul(receiver, real.estimation_error))));
        q3.add(frobenius_norm_sq(matmul(routed, receiver)));
        break;
      } catch (const SingularGram&) {
        if (attempt + 1 >= kMaxRedraws) throw;
      }
    }
  }

  const double m = static_cast<double>(cfg.relay_antennas);
  const double gap = m - static_cast<double>(users);
  double inv_sigma2_sum = 0.0;
  double sigma2e_sum = 0.0;
  for (int k = 0; k < users; ++k) {
    inv_sigma2_sum += 1.0 / profile.sigma2[k];
    sigma2e_sum += profile.sigma2e[k];
  }

  return {make_oracle_result("Q1", q1.mean(), inv_sigma2_sum / gap, q1.std_error(), n_trials,
                             0.03),
          make_oracle_result("Q2", q2.mean(), profile.rho * sigma2e_sum / (m * gap),
                             q2.std_error(), n_trials, 0.05),
          make_oracle_result("Q3", q3.mean(), profile.rho / (m * gap), q3.std_error(), n_trials,
                             0.05)};
}

std::vector<OracleResult> variance_terms_check(const SystemConfig& cfg,
                                               const FadingProfile& profile, int n_trials,
                                               RngStream rng, int user) {
  cfg.validate();
  if (profile.num_users() != cfg.num_users)
    throw InvalidConfig("variance_terms_check: profile size mismatch");
  if (user < 0 || user >= cfg.num_users)
    throw InvalidConfig("variance_terms_check: user index out of range");
  const int users = cfg.num_users;
  const int partner = cyclic_user(user + 1, users);
  const int before = cyclic_user(user - 1, users);

  RunningMoments v1, v2, v3, i1, i2, i3, j;
  for (int t = 0; t < n_trials; ++t) {
    RngStream stream = rng.substream(static_cast<std::uint64_t>(t));
    for (int attempt = 0;; ++attempt) {
      const ChannelRealization real = sample_realization(cfg, profile, stream);
      try {
        const ComplexMatrix receiver = zf_receiver(real.estimate);
        const ComplexMatrix routed = matmul(zf_precoder(real.estimate), permutation(users, 1));
        const ComplexMatrix est_row =
            matmul(matmul(column_as_row(real.estimate, user), routed), receiver);
        const ComplexMatrix err_row =
            matmul(matmul(column_as_row(real.estimation_error, user), routed), receiver);

        v1.add(std::norm(dot_with_column(est_row, real.estimation_error, partner)));
        v2.add(std::norm(dot_with_column(err_row, real.estimate, partner)));
        v3.add(std::norm(dot_with_column(err_row, real.estimation_error, partner)));
        i1.add(std::norm(dot_with_column(est_row, real.estimation_error, user)));
        i2.add(std::norm(dot_with_column(err_row, real.estimate, user)));
        i3.add(std::norm(dot_with_column(err_row, real.estimation_error, user)));
        double amplified = 0.0;
        for (int c = 0; c < est_row.cols(); ++c)
          amplified += std::norm(est_row(0, c) + err_row(0, c));
        j.add(amplified);
        break;
      } catch (const SingularGram&) {
        if (attempt + 1 >= kMaxRedraws) throw;
      }
    }
  }

  const double m = static_cast<double>(cfg.relay_antennas);
  const double gap = m - static_cast<double>(users);
  const double s2_partner = profile.sigma2[partner];
  const double s2_user = profile.sigma2[user];
  const double s2_before = profile.sigma2[before];
  const double err_user = profile.sigma2e[user];
  const double err_partner = profile.sigma2e[partner];

  std::vector<OracleResult> out;
  out.push_back(make_oracle_result("V1", v1.mean(), err_partner / (gap * s2_partner),
                                   v1.std_error(), n_trials, 0.0));
  out.push_back(make_oracle_result("V2", v2.mean(), err_user / (gap * s2_user), v2.std_error(),
                                   n_trials, 0.0));
  out.push_back(make_oracle_result("V3", v3.mean(), err_user * err_partner * profile.rho / (m * gap),
                                   v3.std_error(), n_trials, 0.05));
  out.push_back(make_oracle_result("I1_sq", i1.mean(), err_user / (gap * s2_partner),
                                   i1.std_error(), n_trials, 0.0));
  out.push_back(make_oracle_result("I2_sq", i2.mean(), err_user / (gap * s2_before),
                                   i2.std_error(), n_trials, 0.0));
  out.push_back(make_oracle_result("I3_sq", i3.mean(), err_user * err_user * profile.rho / (m * gap),
                                   i3.std_error(), n_trials, 0.05));
  out.push_back(make_oracle_result("J", j.mean(),
                                   amplified_noise_coefficient(profile, cfg.relay_antennas, user),
                                   j.std_error(), n_trials, 0.05));
  return out;
}

}  // namespace mwr
