// SPDX-License-Identifier: Apache-2.0
// mwr-sim: multi-way massive MIMO relay network simulator

#include "mwr/processing.hpp"

#include <cmath>

#include "mc_kernel.hpp"

namespace mwr {

namespace {

void require_tall(const ComplexMatrix& estimate) {
  if (estimate.rows() <= estimate.cols())
    throw InvalidConfig("zero-forcing needs more relay antennas than users");
}

// y = mat * x
std::vector<Complex> matvec(const ComplexMatrix& mat, const std::vector<Complex>& x) {
  if (static_cast<int>(x.size()) != mat.cols())
    throw DimensionMismatch("matvec: vector length does not match column count");
  std::vector<Complex> y(mat.rows(), Complex(0.0, 0.0));
  for (int r = 0; r < mat.rows(); ++r) {
    Complex acc(0.0, 0.0);
    for (int c = 0; c < mat.cols(); ++c) acc += mat(r, c) * x[c];
    y[r] = acc;
  }
  return y;
}

}  // namespace

ComplexMatrix zf_receiver(const ComplexMatrix& estimate) {
  require_tall(estimate);
  const ComplexMatrix gram = matmul(estimate, Op::kConjTranspose, estimate, Op::kNone);
  HermitianFactor factor(gram);
  return factor.solve(hermitian(estimate));
}

ComplexMatrix zf_precoder(const ComplexMatrix& estimate) {
  require_tall(estimate);
  // Ghat^T Ghat^* is Hermitian positive definite for full column rank.
  const ComplexMatrix gram = matmul(estimate, Op::kTranspose, conj(estimate), Op::kNone);
  HermitianFactor factor(gram);
  return hermitian(factor.solve(transpose(estimate)));
}

ComplexMatrix mr_receiver(const ComplexMatrix& estimate) { return hermitian(estimate); }

ComplexMatrix mr_precoder(const ComplexMatrix& estimate) { return conj(estimate); }

ComplexMatrix permutation(int num_users, int slot) {
  if (num_users < 1) throw InvalidConfig("permutation: need at least one user");
  if (slot < 1 || slot > num_users)
    throw InvalidSlot("permutation: slot must lie in [1, K]");
  ComplexMatrix pi(num_users, num_users);
  for (int k = 0; k < num_users; ++k) pi(k, cyclic_user(k + slot, num_users)) = 1.0;
  return pi;
}

ProcessingSet make_processing(const ChannelRealization& real, Scheme scheme, int slot,
                              double power_scale) {
  if (!(power_scale > 0.0)) throw InvalidConfig("make_processing: power scale must be positive");
  ProcessingSet set;
  if (scheme == Scheme::kZeroForcing) {
    set.receiver = zf_receiver(real.estimate);
    set.precoder = zf_precoder(real.estimate);
  } else {
    set.receiver = mr_receiver(real.estimate);
    set.precoder = mr_precoder(real.estimate);
  }
  set.permutation = permutation(real.estimate.cols(), slot);
  set.power_scale = power_scale;
  return set;
}

QTriple q_terms_mc(const SystemConfig& cfg, const FadingProfile& profile, int n_trials,
                   RngStream rng, Scheme scheme, int threads) {
  if (n_trials < 1) throw InvalidConfig("q_terms_mc: need at least one trial");
  detail::KernelRequest request;
  request.zero_forcing = scheme == Scheme::kZeroForcing;
  request.maximum_ratio = scheme == Scheme::kMaximumRatio;
  request.moments = false;
  request.threads = threads;
  const detail::KernelResult result = detail::run_mc_kernel(cfg, profile, n_trials, rng, request);
  const detail::MomentSet& moments =
      scheme == Scheme::kZeroForcing ? *result.zf : *result.mr;
  return QTriple{moments.q1, moments.q2, moments.q3};
}

double alpha_mc(const SystemConfig& cfg, const QTriple& q) {
  return cfg.relay_snr / (cfg.uplink_snr * q.q1 + cfg.uplink_snr * q.q2 + q.q3);
}

double alpha_analytic(const SystemConfig& cfg, const FadingProfile& profile) {
  const double m = static_cast<double>(cfg.relay_antennas);
  const double k = static_cast<double>(cfg.num_users);
  double inv_sigma2_sum = 0.0;
  double sigma2e_sum = 0.0;
  for (int u = 0; u < profile.num_users(); ++u) {
    inv_sigma2_sum += 1.0 / profile.sigma2[u];
    sigma2e_sum += profile.sigma2e[u];
  }
  const double denom = m * cfg.uplink_snr * inv_sigma2_sum +
                       cfg.uplink_snr * sigma2e_sum * profile.rho + profile.rho;
  return m * (m - k) * cfg.relay_snr / denom;
}

std::vector<Complex> relay_transmit(const SystemConfig& cfg, const ChannelRealization& real,
                                    const ProcessingSet& proc, const std::vector<Complex>& symbols,
                                    const std::vector<Complex>& relay_noise) {
  const int m = real.true_channel.rows();
  const int k = real.true_channel.cols();
  if (static_cast<int>(symbols.size()) != k)
    throw DimensionMismatch("relay_transmit: one symbol per user required");
  if (static_cast<int>(relay_noise.size()) != m)
    throw DimensionMismatch("relay_transmit: one noise sample per relay antenna required");

  const double sqrt_pu = std::sqrt(cfg.uplink_snr);
  std::vector<Complex> received = matvec(real.true_channel, symbols);
  for (int i = 0; i < m; ++i) received[i] = sqrt_pu * received[i] + relay_noise[i];

  std::vector<Complex> combined = matvec(proc.receiver, received);
  std::vector<Complex> routed = matvec(proc.permutation, combined);
  std::vector<Complex> transmit = matvec(proc.precoder, routed);
  const double scale = std::sqrt(proc.power_scale);
  for (auto& v : transmit) v *= scale;
  return transmit;
}

}  // namespace mwr
