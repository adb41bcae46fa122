// SPDX-License-Identifier: Apache-2.0
// mwr-sim: multi-way massive MIMO relay network simulator

#include "mc_kernel.hpp"

#include <cblas.h>

#include <cmath>

#include "parallel.hpp"

namespace mwr::detail {

namespace {

constexpr int kChunkTrials = 32;
constexpr int kMaxRedraws = 100;

// out(r, :) = a(r + shift mod K, :)
ComplexMatrix shift_rows(const ComplexMatrix& a, int shift) {
  const int k = a.rows();
  ComplexMatrix out(k, a.cols());
  for (int r = 0; r < k; ++r) {
    const int src = cyclic_user(r + shift, k);
    for (int c = 0; c < a.cols(); ++c) out(r, c) = a(src, c);
  }
  return out;
}

struct Accumulator {
  std::int64_t trials = 0;
  std::vector<Complex> gain;
  std::vector<double> gain_abs2;
  std::vector<double> gain_abs4;
  std::vector<double> noise;
  std::vector<double> noise_sq;
  double q1 = 0.0, q2 = 0.0, q3 = 0.0;

  void init(int users, bool moments) {
    if (moments) {
      const std::size_t kk = static_cast<std::size_t>(users) * users;
      gain.assign(kk, Complex(0.0, 0.0));
      gain_abs2.assign(kk, 0.0);
      gain_abs4.assign(kk, 0.0);
      noise.assign(users, 0.0);
      noise_sq.assign(users, 0.0);
    }
  }

  void merge(const Accumulator& other) {
    trials += other.trials;
    q1 += other.q1;
    q2 += other.q2;
    q3 += other.q3;
    for (std::size_t i = 0; i < gain.size(); ++i) gain[i] += other.gain[i];
    for (std::size_t i = 0; i < gain_abs2.size(); ++i) gain_abs2[i] += other.gain_abs2[i];
    for (std::size_t i = 0; i < gain_abs4.size(); ++i) gain_abs4[i] += other.gain_abs4[i];
    for (std::size_t i = 0; i < noise.size(); ++i) noise[i] += other.noise[i];
    for (std::size_t i = 0; i < noise_sq.size(); ++i) noise_sq[i] += other.noise_sq[i];
  }

  void add_moments(const ComplexMatrix& zmat, const std::vector<double>& noise_rows) {
    const int k = zmat.rows();
    const Complex* z = zmat.data();
    for (int idx = 0; idx < k * k; ++idx) {
      const double a2 = std::norm(z[idx]);
      gain[idx] += z[idx];
      gain_abs2[idx] += a2;
      gain_abs4[idx] += a2 * a2;
    }
    for (int u = 0; u < k; ++u) {
      noise[u] += noise_rows[u];
      noise_sq[u] += noise_rows[u] * noise_rows[u];
    }
  }
};

// Real part of sum(conj(a) .* b).
double re_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  double acc = 0.0;
  const Complex* pa = a.data();
  const Complex* pb = b.data();
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += pa[i].real() * pb[i].real() + pa[i].imag() * pb[i].imag();
  return acc;
}

// diag entries of R^T * V contracted column-wise: out[c] = Re(sum_j R(j,c) V(j,c)).
std::vector<double> column_contract(const ComplexMatrix& r, const ComplexMatrix& v) {
  const int k = r.rows();
  std::vector<double> out(k, 0.0);
  for (int j = 0; j < k; ++j)
    for (int c = 0; c < k; ++c) out[c] += (r(j, c) * v(j, c)).real();
  return out;
}

void accumulate_zero_forcing(const ComplexMatrix& gram, const ComplexMatrix& cross,
                             const HermitianFactor& factor, bool moments, Accumulator& acc) {
  const int k = gram.rows();
  const ComplexMatrix ginv = factor.inverse();

  // W^T G = I + Gram^{-1} (Ghat^H E); W^T E = Gram^{-1} (Ghat^H E).
  const ComplexMatrix we = factor.solve(cross);
  ComplexMatrix f = we;
  for (int i = 0; i < k; ++i) f(i, i) += 1.0;

  acc.q1 += trace(ginv).real();

  // q2 = Tr[(Pi W^T E)^H (Gram^*)^{-1} (Pi W^T E)]
  const ComplexMatrix y = shift_rows(we, +1);
  const ComplexMatrix z = conj(factor.solve(conj(y)));
  acc.q2 += re_inner(y, z);

  // q3 = Tr[Pi Gram^{-1} Pi^T (Gram^{-1})^*]
  double q3 = 0.0;
  for (int a = 0; a < k; ++a) {
    const int a1 = cyclic_user(a + 1, k);
    for (int b = 0; b < k; ++b) {
      const int b1 = cyclic_user(b + 1, k);
      q3 += (ginv(a1, b1) * std::conj(ginv(b, a))).real();
    }
  }
  acc.q3 += q3;

  if (!moments) return;
  // Effective gains G^T B = F^T Pi F with F = W^T G.
  const ComplexMatrix zmat = matmul(f, Op::kTranspose, shift_rows(f, +1), Op::kNone);
  // ||g_k^T C||^2 = [F^T Pi Gram^{-1} Pi^T F^*]_kk.
  const ComplexMatrix r = shift_rows(f, -1);
  const ComplexMatrix v = matmul(ginv, conj(r));
  acc.add_moments(zmat, column_contract(r, v));
}

void accumulate_maximum_ratio(const ComplexMatrix& gram, const ComplexMatrix& cross, bool moments,
                              Accumulator& acc) {
  const int k = gram.rows();

  // W^T G = Gram + Ghat^H E.
  ComplexMatrix f = gram;
  f += cross;

  // q1 = Tr[(Pi Gram)^H Gram^* (Pi Gram)], q2 likewise with Pi (Ghat^H E).
  const ComplexMatrix y1 = shift_rows(gram, +1);
  acc.q1 += re_inner(y1, conj(matmul(gram, conj(y1))));
  const ComplexMatrix y2 = shift_rows(cross, +1);
  acc.q2 += re_inner(y2, conj(matmul(gram, conj(y2))));

  // q3 = Tr[Gram^* Pi Gram Pi^T] = sum conj(Gram(a,b)) Gram(b+1,a+1)
  double q3 = 0.0;
  for (int a = 0; a < k; ++a) {
    const int a1 = cyclic_user(a + 1, k);
    for (int b = 0; b < k; ++b) {
      const int b1 = cyclic_user(b + 1, k);
      q3 += (std::conj(gram(a, b)) * gram(b1, a1)).real();
    }
  }
  acc.q3 += q3;

  if (!moments) return;
  const ComplexMatrix zmat = matmul(f, Op::kTranspose, shift_rows(f, +1), Op::kNone);
  const ComplexMatrix r = shift_rows(f, -1);
  const ComplexMatrix v = matmul(gram, conj(r));
  acc.add_moments(zmat, column_contract(r, v));
}

MomentSet finalize(const Accumulator& acc, int users, bool moments, int n_trials) {
  MomentSet out;
  out.users = users;
  out.trials = n_trials;
  const double inv = 1.0 / static_cast<double>(n_trials);
  out.q1 = acc.q1 * inv;
  out.q2 = acc.q2 * inv;
  out.q3 = acc.q3 * inv;
  if (moments) {
    const std::size_t kk = static_cast<std::size_t>(users) * users;
    out.gain_mean.resize(kk);
    out.gain_abs2_mean.resize(kk);
    out.gain_abs4_mean.resize(kk);
    out.noise_mean.resize(users);
    out.noise_sq_mean.resize(users);
    for (std::size_t i = 0; i < kk; ++i) {
      out.gain_mean[i] = acc.gain[i] * inv;
      out.gain_abs2_mean[i] = acc.gain_abs2[i] * inv;
      out.gain_abs4_mean[i] = acc.gain_abs4[i] * inv;
    }
    for (int u = 0; u < users; ++u) {
      out.noise_mean[u] = acc.noise[u] * inv;
      out.noise_sq_mean[u] = acc.noise_sq[u] * inv;
    }
  }
  return out;
}

}  // namespace

KernelResult run_mc_kernel(const SystemConfig& cfg, const FadingProfile& profile, int n_trials,
                           RngStream base, const KernelRequest& request) {
  cfg.validate();
  if (profile.num_users() != cfg.num_users)
    throw InvalidConfig("run_mc_kernel: profile size does not match the user count");
  if (n_trials < 1) throw InvalidConfig("run_mc_kernel: need at least one trial");
  if (!request.zero_forcing && !request.maximum_ratio)
    throw InvalidConfig("run_mc_kernel: no scheme requested");

  const int users = cfg.num_users;
  const int threads = request.threads;
  // Trial-level parallelism owns the cores; keep BLAS single-threaded then.
  openblas_set_num_threads(threads > 1 ? 1 : hardware_threads());

  const std::int64_t n_chunks = (n_trials + kChunkTrials - 1) / kChunkTrials;
  std::vector<Accumulator> zf_parts(request.zero_forcing ? n_chunks : 0);
  std::vector<Accumulator> mr_parts(request.maximum_ratio ? n_chunks : 0);

  parallel_for(n_chunks, threads, [&](std::int64_t chunk) {
    Accumulator zf_acc, mr_acc;
    if (request.zero_forcing) zf_acc.init(users, request.moments);
    if (request.maximum_ratio) mr_acc.init(users, request.moments);

    const int begin = static_cast<int>(chunk) * kChunkTrials;
    const int end = std::min(n_trials, begin + kChunkTrials);
    for (int t = begin; t < end; ++t) {
      RngStream rng = base.substream(static_cast<std::uint64_t>(t));
      for (int attempt = 0;; ++attempt) {
        const ChannelRealization real = sample_realization(cfg, profile, rng);
        const ComplexMatrix gram =
            matmul(real.estimate, Op::kConjTranspose, real.estimate, Op::kNone);
        try {
          // One rejection rule for all schemes keeps the draw sequence
          // identical whichever subset of schemes a run requests.
          HermitianFactor factor(gram);
          const ComplexMatrix cross =
              matmul(real.estimate, Op::kConjTranspose, real.estimation_error, Op::kNone);
          if (request.zero_forcing)
            accumulate_zero_forcing(gram, cross, factor, request.moments, zf_acc);
          if (request.maximum_ratio)
            accumulate_maximum_ratio(gram, cross, request.moments, mr_acc);
          break;
        } catch (const SingularGram&) {
          if (attempt + 1 >= kMaxRedraws) throw;
        }
      }
      if (request.zero_forcing) ++zf_acc.trials;
      if (request.maximum_ratio) ++mr_acc.trials;
    }
    if (request.zero_forcing) zf_parts[chunk] = std::move(zf_acc);
    if (request.maximum_ratio) mr_parts[chunk] = std::move(mr_acc);
  });

  KernelResult result;
  if (request.zero_forcing) {
    Accumulator total;
    total.init(users, request.moments);
    for (const auto& part : zf_parts) total.merge(part);
    result.zf = finalize(total, users, request.moments, n_trials);
  }
  if (request.maximum_ratio) {
    Accumulator total;
    total.init(users, request.moments);
    for (const auto& part : mr_parts) total.merge(part);
    result.mr = finalize(total, users, request.moments, n_trials);
  }
  return result;
}

}  // namespace mwr::detail
