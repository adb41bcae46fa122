// SPDX-License-Identifier: Apache-2.0
// mwr-sim: multi-way massive MIMO relay network simulator

#pragma once

#include <array>
#include <string>
#include <vector>

#include "mwr/channel.hpp"
#include "mwr/linalg.hpp"

namespace mwr {

/// Outcome of one statistical identity check.
///
/// pass holds iff |empirical - analytic| <= max(tolerance * |analytic|,
/// 4 * mc_std_error); rel_error is relative to the analytic value, or the
/// absolute error when the analytic value is zero.
struct OracleResult {
  std::string name;
  double empirical = 0.0;
  double analytic = 0.0;
  double rel_error = 0.0;
  double mc_std_error = 0.0;
  double tolerance = 0.0;
  long trials = 0;
  bool pass = false;
};

OracleResult make_oracle_result(std::string name, double empirical, double analytic,
                                double mc_std_error, long trials, double tolerance);

/// Inverse-Wishart trace moment: E{Tr[Dhat (X^H X)^{-1}]} with the rows of
/// X drawn CN(0, D), against (1/(M-K)) * sum Dhat_k / D_k. The tolerance
/// widens to 10% at M = K+1 where the estimator is heavy-tailed.
OracleResult lemma1_check(int relay_antennas, int num_users, const std::vector<double>& d,
                          const std::vector<double>& d_hat, int n_trials, RngStream rng);

/// Quartic Gaussian form: E{|x^T A x|^2} against Tr(A A^H) + Tr(A A^*).
OracleResult lemma2_check(const ComplexMatrix& a, int n_trials, RngStream rng);

/// Power-constraint traces measured with literal zero-forcing matrices
/// against their closed forms (q1 exact, q2/q3 large-M).
std::array<OracleResult, 3> q_asymptotic_check(const SystemConfig& cfg,
                                               const FadingProfile& profile, int n_trials,
                                               RngStream rng);

/// Effective-noise terms for one user (V1..V3, |I1|^2..|I3|^2, J) measured
/// with literal matrices against their closed forms.
std::vector<OracleResult> variance_terms_check(const SystemConfig& cfg,
                                               const FadingProfile& profile, int n_trials,
                                               RngStream rng, int user = 0);

}  // namespace mwr
