// SPDX-License-Identifier: Apache-2.0
// mwr-sim: multi-way massive MIMO relay network simulator

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mwr/channel.hpp"
#include "mwr/processing.hpp"
#include "mwr/se.hpp"

namespace mwr::detail {

/// Monte Carlo means of every moment the spectral-efficiency bound needs,
/// averaged over channel realizations for one processing scheme.
struct MomentSet {
  int users = 0;
  std::int64_t trials = 0;
  // Entry k*K + i holds the statistic of the effective gain g_k^T b_i.
  std::vector<Complex> gain_mean;
  std::vector<double> gain_abs2_mean;
  std::vector<double> gain_abs4_mean;
  // Per user k: ||g_k^T C||^2 statistics (amplified relay noise).
  std::vector<double> noise_mean;
  std::vector<double> noise_sq_mean;
  // Power-constraint traces.
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
};

struct KernelRequest {
  bool zero_forcing = false;
  bool maximum_ratio = false;
  bool moments = true;  // false: only the q-traces are accumulated
  int threads = 1;
};

struct KernelResult {
  std::optional<MomentSet> zf;
  std::optional<MomentSet> mr;
};

/// Shared trial loop. Trial t draws from base.substream(t); both schemes see
/// the same realizations, so a single-scheme run reproduces the matching
/// rows of a combined run exactly. Draws whose Gram system is degenerate
/// are rejected and redrawn from the same stream for every scheme alike.
KernelResult run_mc_kernel(const SystemConfig& cfg, const FadingProfile& profile, int n_trials,
                           RngStream base, const KernelRequest& request);

/// Assembles the worst-case-noise spectral efficiency bound from moment means.
SeReport se_from_moments(const SystemConfig& cfg, const MomentSet& moments);

}  // namespace mwr::detail
