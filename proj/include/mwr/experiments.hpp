// SPDX-License-Identifier: Apache-2.0
// mwr-sim: multi-way massive MIMO relay network simulator

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mwr/oracles.hpp"

namespace mwr {

/// Which processing schemes an experiment evaluates.
enum class RunMode { kZf, kMr, kBoth };

RunMode parse_run_mode(const std::string& text);

/// Full description of one experiment run. Defaults reproduce the two
/// reference experiments; a flat key=value config file and CLI flags
/// override individual fields (flags win).
struct ExperimentSpec {
  std::string name;  // fig1 | fig2 | validate | single
  std::uint64_t seed = 1;
  int trials = 0;   // 0: per-experiment default
  int threads = 0;  // 0: hardware concurrency
  std::string out_path;
  RunMode mode = RunMode::kBoth;

  // Fixed-ratio sweep (fig1): tau = K, beta = 1 for every user.
  std::vector<int> k_grid = {10, 20, 40, 60, 80, 100, 120, 140, 160, 180};
  std::vector<int> ratios = {5, 10};
  int coherence_length = 200;
  double uplink_db = 0.0;
  double pilot_db = 0.0;
  double relay_db = 10.0;

  // Random-drop CDF experiment (fig2) and validate/single geometry.
  int relay_antennas = 100;
  int num_users = 20;
  int drops = 500;
  double disk_diameter_m = 1000.0;
  double shadow_std_db = 8.0;
  double pathloss_exp = 4.0;
  double noise_floor_dbw = -120.0;
  double case1_user_power_w = 0.2;
  double case1_relay_power_w = 1.0;
  double case2_user_power_w = 0.1;
  double case2_relay_power_w = 0.5;

  // validate
  int lemma_trials = 100000;

  // single-row replay
  std::string experiment = "fig1";
  std::string method = "monte_carlo";
  int case_index = 1;
  int drop_index = 0;

  int resolved_trials() const;
  int resolved_threads() const;
  std::string resolved_out_path() const;
  void validate() const;
};

/// One self-describing output row; every row can be replayed alone.
struct ResultRow {
  std::string experiment;
  int relay_antennas = 0;
  int num_users = 0;
  std::string mode;    // zf | mr
  std::string method;  // closed_form | monte_carlo
  int case_index = -1;  // -1: not applicable
  int drop_index = -1;  // -1: not applicable
  double sum_se = 0.0;
  double se_min = 0.0;
  double se_max = 0.0;
  double ci_halfwidth = 0.0;
  std::uint64_t seed = 0;
  int trials = 0;
};

/// Doubles rendered with 9 significant digits, locale-independent.
std::string format_double(double value);
std::string csv_header();
std::string to_csv_row(const ResultRow& row);
std::string rows_to_csv(const std::vector<ResultRow>& rows);

/// Applies `key = value` lines from a UTF-8 file; unknown keys are errors.
void parse_config_file(const std::string& path, ExperimentSpec& spec);
void apply_config_line(const std::string& key, const std::string& value, ExperimentSpec& spec);

void write_text_file(const std::string& path, const std::string& contents);
std::string derive_cdf_path(const std::string& out_path);

/// Sum-SE sweep over (ratio, K) grid points; emits closed-form and Monte
/// Carlo zero-forcing rows plus maximum-ratio Monte Carlo rows per point.
std::vector<ResultRow> run_fig1(const ExperimentSpec& spec);

struct Fig2Output {
  std::vector<ResultRow> rows;
  std::string cdf_csv;  // sorted sum-SE samples per (case, mode)
};

/// Random user drops with path loss and shadowing; one Monte Carlo row per
/// (drop, case, mode) plus an empirical-CDF summary.
Fig2Output run_fig2(const ExperimentSpec& spec);

struct ValidateOutput {
  std::vector<OracleResult> oracles;
  bool exact_all_pass = true;
  std::string csv;
  std::string first_failure;  // name of the first failing exact oracle
};

/// Runs the full oracle suite and reports per-identity results.
ValidateOutput run_validate(const ExperimentSpec& spec);

/// Recomputes one result row from its describing fields.
ResultRow run_single(const ExperimentSpec& spec);

}  // namespace mwr
