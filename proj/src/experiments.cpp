// SPDX-License-Identifier: Apache-2.0
// mwr-sim: multi-way massive MIMO relay network simulator

#include "mwr/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mc_kernel.hpp"
#include "mwr/se.hpp"
#include "parallel.hpp"

namespace mwr {

namespace {

// Stream-id tags; row replay depends on these staying fixed.
constexpr std::uint64_t kTagFig1Cell = 0x6669673143454c4cULL;
constexpr std::uint64_t kTagFig2Drop = 0x6669673244524f50ULL;
constexpr std::uint64_t kTagFig2Cell = 0x6669673243454c4cULL;
constexpr std::uint64_t kTagValidate = 0x56414c4944415445ULL;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

SystemConfig fig1_config(const ExperimentSpec& spec, int ratio, int users) {
  SystemConfig cfg;
  cfg.relay_antennas = ratio * users;
  cfg.num_users = users;
  cfg.coherence_length = spec.coherence_length;
  cfg.training_length = users;
  cfg.uplink_snr = db_to_linear(spec.uplink_db);
  cfg.pilot_snr = db_to_linear(spec.pilot_db);
  cfg.relay_snr = db_to_linear(spec.relay_db);
  return cfg;
}

struct Fig2Case {
  double user_power_w;
  double relay_power_w;
};

Fig2Case fig2_case(const ExperimentSpec& spec, int case_index) {
  if (case_index == 1) return {spec.case1_user_power_w, spec.case1_relay_power_w};
  if (case_index == 2) return {spec.case2_user_power_w, spec.case2_relay_power_w};
  throw InvalidConfig("fig2: case must be 1 or 2");
}

SystemConfig fig2_config(const ExperimentSpec& spec, int case_index) {
  const Fig2Case c = fig2_case(spec, case_index);
  const double noise_w = db_to_linear(spec.noise_floor_dbw);
  SystemConfig cfg;
  cfg.relay_antennas = spec.relay_antennas;
  cfg.num_users = spec.num_users;
  cfg.coherence_length = spec.coherence_length;
  cfg.training_length = spec.num_users;
  cfg.uplink_snr = c.user_power_w / noise_w;
  cfg.pilot_snr = c.user_power_w / noise_w;
  cfg.relay_snr = c.relay_power_w / noise_w;
  return cfg;
}

double sum_ci_halfwidth(const SeReport& report) {
  double acc = 0.0;
  for (double v : report.ci_halfwidth) acc += v * v;
  return std::sqrt(acc);
}

ResultRow report_to_row(const ExperimentSpec& spec, const std::string& experiment,
                        const SystemConfig& cfg, const std::string& mode,
                        const SeReport& report, int case_index, int drop_index) {
  ResultRow row;
  row.experiment = experiment;
  row.relay_antennas = cfg.relay_antennas;
  row.num_users = cfg.num_users;
  row.mode = mode;
  row.method = report.method == SeMethod::kClosedForm ? "closed_form" : "monte_carlo";
  row.case_index = case_index;
  row.drop_index = drop_index;
  row.sum_se = report.sum_se;
  row.se_min = *std::min_element(report.per_user_se.begin(), report.per_user_se.end());
  row.se_max = *std::max_element(report.per_user_se.begin(), report.per_user_se.end());
  row.ci_halfwidth = sum_ci_halfwidth(report);
  row.seed = spec.seed;
  row.trials = report.trials;
  return row;
}

std::vector<int> parse_int_list(const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw InvalidConfig("config: bad integer list entry '" + item + "'");
    }
  }
  if (out.empty()) throw InvalidConfig("config: empty integer list");
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    return std::stoi(value);
  } catch (const std::exception&) {
    throw InvalidConfig("config: key '" + key + "' needs an integer, got '" + value + "'");
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    return std::stod(value);
  } catch (const std::exception&) {
    throw InvalidConfig("config: key '" + key + "' needs a number, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    return std::stoull(value);
  } catch (const std::exception&) {
    throw InvalidConfig("config: key '" + key + "' needs an unsigned integer, got '" + value +
                        "'");
  }
}

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

}  // namespace

RunMode parse_run_mode(const std::string& text) {
  if (text == "zf") return RunMode::kZf;
  if (text == "mr") return RunMode::kMr;
  if (text == "both") return RunMode::kBoth;
  throw InvalidConfig("mode must be one of zf, mr, both");
}

int ExperimentSpec::resolved_trials() const {
  if (trials > 0) return trials;
  if (name == "fig1") return 1000;
  if (name == "fig2") return 200;
  return 2000;
}

int ExperimentSpec::resolved_threads() const {
  return threads > 0 ? threads : detail::hardware_threads();
}

std::string ExperimentSpec::resolved_out_path() const {
  return out_path.empty() ? name + ".csv" : out_path;
}

void ExperimentSpec::validate() const {
  if (name != "fig1" && name != "fig2" && name != "validate" && name != "single")
    throw InvalidConfig("experiment name must be fig1, fig2, validate or single");
  if (resolved_trials() < 100) throw InvalidConfig("experiments need at least 100 trials");
  if (name == "fig1") {
    if (k_grid.empty() || ratios.empty()) throw InvalidConfig("fig1: empty sweep grid");
    for (int k : k_grid) {
      if (k < 2) throw InvalidConfig("fig1: each K must be at least 2");
      if (k >= coherence_length)
        throw InvalidConfig("fig1: training (tau = K) must leave room for data (K < T)");
    }
    for (int r : ratios)
      if (r < 2) throw InvalidConfig("fig1: antenna ratio must be at least 2");
  }
  if (name == "fig2") {
    if (drops < 1) throw InvalidConfig("fig2: need at least one drop");
    if (relay_antennas <= num_users) throw InvalidConfig("fig2: need M > K");
    if (num_users >= coherence_length) throw InvalidConfig("fig2: need K < T");
    if (!(case1_user_power_w > 0.0) || !(case1_relay_power_w > 0.0) ||
        !(case2_user_power_w > 0.0) || !(case2_relay_power_w > 0.0))
      throw InvalidConfig("fig2: case powers must be positive");
    if (disk_diameter_m < 0.0) throw InvalidConfig("fig2: disk diameter must be >= 0");
  }
  if (name == "validate") {
    if (relay_antennas <= num_users) throw InvalidConfig("validate: need M > K");
    if (lemma_trials < 100) throw InvalidConfig("validate: lemma trials too low");
  }
  if (name == "single") {
    if (experiment != "fig1" && experiment != "fig2")
      throw InvalidConfig("single: experiment must be fig1 or fig2");
    if (method != "closed_form" && method != "monte_carlo")
      throw InvalidConfig("single: method must be closed_form or monte_carlo");
    if (mode == RunMode::kBoth) throw InvalidConfig("single: pick one mode (zf or mr)");
    if (method == "closed_form" && mode == RunMode::kMr)
      throw InvalidConfig("single: no closed form is available for maximum-ratio processing");
    if (relay_antennas <= num_users) throw InvalidConfig("single: need M > K");
    if (num_users >= coherence_length) throw InvalidConfig("single: need K < T");
    if (experiment == "fig2" && drop_index < 0)
      throw InvalidConfig("single: drop index must be non-negative");
    if (experiment == "fig2" && case_index != 1 && case_index != 2)
      throw InvalidConfig("single: case must be 1 or 2");
  }
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

std::string csv_header() {
  return "experiment,M,K,mode,method,case,drop,sum_se,se_min,se_max,ci_halfwidth,seed,trials";
}

std::string to_csv_row(const ResultRow& row) {
  std::string out;
  out += row.experiment;
  out += ',';
  out += std::to_string(row.relay_antennas);
  out += ',';
  out += std::to_string(row.num_users);
  out += ',';
  out += row.mode;
  out += ',';
  out += row.method;
  out += ',';
  if (row.case_index >= 0) out += std::to_string(row.case_index);
  out += ',';
  if (row.drop_index >= 0) out += std::to_string(row.drop_index);
  out += ',';
  out += format_double(row.sum_se);
  out += ',';
  out += format_double(row.se_min);
  out += ',';
  out += format_double(row.se_max);
  out += ',';
  out += format_double(row.ci_halfwidth);
  out += ',';
  out += std::to_string(row.seed);
  out += ',';
  out += std::to_string(row.trials);
  return out;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::string out = csv_header();
  out += '\n';
  for (const ResultRow& row : rows) {
    out += to_csv_row(row);
    out += '\n';
  }
  return out;
}

void apply_config_line(const std::string& key, const std::string& value, ExperimentSpec& spec) {
  if (key == "seed") {
    spec.seed = parse_u64(key, value);
  } else if (key == "trials") {
    spec.trials = parse_int(key, value);
  } else if (key == "threads") {
    spec.threads = parse_int(key, value);
  } else if (key == "out") {
    spec.out_path = value;
  } else if (key == "mode") {
    spec.mode = parse_run_mode(value);
  } else if (key == "k_grid") {
    spec.k_grid = parse_int_list(value);
  } else if (key == "ratios") {
    spec.ratios = parse_int_list(value);
  } else if (key == "coherence") {
    spec.coherence_length = parse_int(key, value);
  } else if (key == "pu_db") {
    spec.uplink_db = parse_real(key, value);
  } else if (key == "pp_db") {
    spec.pilot_db = parse_real(key, value);
  } else if (key == "pr_db") {
    spec.relay_db = parse_real(key, value);
  } else if (key == "relay_antennas") {
    spec.relay_antennas = parse_int(key, value);
  } else if (key == "users") {
    spec.num_users = parse_int(key, value);
  } else if (key == "drops") {
    spec.drops = parse_int(key, value);
  } else if (key == "disk_diameter_m") {
    spec.disk_diameter_m = parse_real(key, value);
  } else if (key == "shadow_std_db") {
    spec.shadow_std_db = parse_real(key, value);
  } else if (key == "pathloss_exp") {
    spec.pathloss_exp = parse_real(key, value);
  } else if (key == "noise_floor_dbw") {
    spec.noise_floor_dbw = parse_real(key, value);
  } else if (key == "case1_user_power_w") {
    spec.case1_user_power_w = parse_real(key, value);
  } else if (key == "case1_relay_power_w") {
    spec.case1_relay_power_w = parse_real(key, value);
  } else if (key == "case2_user_power_w") {
    spec.case2_user_power_w = parse_real(key, value);
  } else if (key == "case2_relay_power_w") {
    spec.case2_relay_power_w = parse_real(key, value);
  } else if (key == "lemma_trials") {
    spec.lemma_trials = parse_int(key, value);
  } else if (key == "experiment") {
    spec.experiment = value;
  } else if (key == "method") {
    spec.method = value;
  } else if (key == "case") {
    spec.case_index = parse_int(key, value);
  } else if (key == "drop") {
    spec.drop_index = parse_int(key, value);
  } else {
    throw InvalidConfig("config: unknown key '" + key + "'");
  }
}

void parse_config_file(const std::string& path, ExperimentSpec& spec) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("config: cannot open file '" + path + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw InvalidConfig("config: line " + std::to_string(line_no) + " is not 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) throw InvalidConfig("config: empty key on line " + std::to_string(line_no));
    apply_config_line(key, value, spec);
  }
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidConfig("cannot open output file '" + path + "'");
  out << contents;
  if (!out) throw InvalidConfig("failed writing output file '" + path + "'");
}

std::string derive_cdf_path(const std::string& out_path) {
  const auto dot = out_path.find_last_of('.');
  const auto slash = out_path.find_last_of("/\\");
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return out_path + "_cdf.csv";
  return out_path.substr(0, dot) + "_cdf" + out_path.substr(dot);
}

std::vector<ResultRow> run_fig1(const ExperimentSpec& spec) {
  spec.validate();
  const int trials = spec.resolved_trials();
  const int threads = spec.resolved_threads();
  std::vector<ResultRow> rows;

  for (int ratio : spec.ratios) {
    for (int users : spec.k_grid) {
      const SystemConfig cfg = fig1_config(spec, ratio, users);
      cfg.validate();
      const std::vector<double> betas(users, 1.0);
      const FadingProfile profile = estimation_stats(betas, cfg.training_length, cfg.pilot_snr);

      if (spec.mode != RunMode::kMr) {
        const SeReport closed = se_closed_form(cfg, profile);
        rows.push_back(report_to_row(spec, "fig1", cfg, "zf", closed, -1, -1));
      }

      detail::KernelRequest request;
      request.zero_forcing = spec.mode != RunMode::kMr;
      request.maximum_ratio = spec.mode != RunMode::kZf;
      request.moments = true;
      request.threads = threads;
      // Stream depends only on (seed, M, K) so any row is replayable alone.
      const RngStream base(spec.seed, mix_streams({kTagFig1Cell,
                                                   static_cast<std::uint64_t>(cfg.relay_antennas),
                                                   static_cast<std::uint64_t>(users)}));
      const detail::KernelResult result =
          detail::run_mc_kernel(cfg, profile, trials, base, request);
      if (result.zf)
        rows.push_back(
            report_to_row(spec, "fig1", cfg, "zf", detail::se_from_moments(cfg, *result.zf), -1, -1));
      if (result.mr)
        rows.push_back(
            report_to_row(spec, "fig1", cfg, "mr", detail::se_from_moments(cfg, *result.mr), -1, -1));
    }
  }
  return rows;
}

Fig2Output run_fig2(const ExperimentSpec& spec) {
  spec.validate();
  const int trials = spec.resolved_trials();
  const int threads = spec.resolved_threads();
  const bool want_zf = spec.mode != RunMode::kMr;
  const bool want_mr = spec.mode != RunMode::kZf;
  const int rows_per_cell = (want_zf ? 1 : 0) + (want_mr ? 1 : 0);
  const int rows_per_drop = 2 * rows_per_cell;

  std::vector<ResultRow> rows(static_cast<std::size_t>(spec.drops) * rows_per_drop);

  detail::parallel_for(spec.drops, threads, [&](std::int64_t drop) {
    RngStream drop_rng(spec.seed, mix_streams({kTagFig2Drop, static_cast<std::uint64_t>(drop)}));
    const std::vector<double> betas = drop_users(spec.num_users, spec.disk_diameter_m,
                                                 spec.shadow_std_db, spec.pathloss_exp, drop_rng);
    std::size_t slot = static_cast<std::size_t>(drop) * rows_per_drop;
    for (int case_index = 1; case_index <= 2; ++case_index) {
      const SystemConfig cfg = fig2_config(spec, case_index);
      cfg.validate();
      const FadingProfile profile = estimation_stats(betas, cfg.training_length, cfg.pilot_snr);

      detail::KernelRequest request;
      request.zero_forcing = want_zf;
      request.maximum_ratio = want_mr;
      request.moments = true;
      request.threads = 1;  // drops already run in parallel
      const RngStream base(spec.seed,
                           mix_streams({kTagFig2Cell, static_cast<std::uint64_t>(drop),
                                        static_cast<std::uint64_t>(case_index)}));
      const detail::KernelResult result =
          detail::run_mc_kernel(cfg, profile, trials, base, request);
      if (result.zf)
        rows[slot++] = report_to_row(spec, "fig2", cfg, "zf",
                                     detail::se_from_moments(cfg, *result.zf), case_index,
                                     static_cast<int>(drop));
      if (result.mr)
        rows[slot++] = report_to_row(spec, "fig2", cfg, "mr",
                                     detail::se_from_moments(cfg, *result.mr), case_index,
                                     static_cast<int>(drop));
    }
  });

  Fig2Output out;
  out.rows = std::move(rows);

  std::string cdf = "case,mode,rank,sum_se\n";
  for (int case_index = 1; case_index <= 2; ++case_index) {
    for (const char* mode : {"zf", "mr"}) {
      std::vector<double> sums;
      for (const ResultRow& row : out.rows)
        if (row.case_index == case_index && row.mode == mode) sums.push_back(row.sum_se);
      std::sort(sums.begin(), sums.end());
      for (std::size_t r = 0; r < sums.size(); ++r) {
        cdf += std::to_string(case_index);
        cdf += ',';
        cdf += mode;
        cdf += ',';
        cdf += std::to_string(r + 1);
        cdf += ',';
        cdf += format_double(sums[r]);
        cdf += '\n';
      }
    }
  }
  out.cdf_csv = std::move(cdf);
  return out;
}

ValidateOutput run_validate(const ExperimentSpec& spec) {
  spec.validate();
  const int matrix_trials = spec.resolved_trials();
  const int lemma_trials = spec.lemma_trials;

  SystemConfig cfg;
  cfg.relay_antennas = spec.relay_antennas;
  cfg.num_users = spec.num_users;
  cfg.coherence_length = spec.coherence_length;
  cfg.training_length = spec.num_users;
  cfg.uplink_snr = db_to_linear(spec.uplink_db);
  cfg.pilot_snr = db_to_linear(spec.pilot_db);
  cfg.relay_snr = db_to_linear(spec.relay_db);
  cfg.validate();
  const std::vector<double> betas(cfg.num_users, 1.0);
  const FadingProfile profile = estimation_stats(betas, cfg.training_length, cfg.pilot_snr);

  auto stream = [&](std::uint64_t index) {
    return RngStream(spec.seed, mix_streams({kTagValidate, index}));
  };

  ValidateOutput out;
  auto add = [&](OracleResult result, const std::string& label, bool exact) {
    result.name = label;
    if (exact && !result.pass && out.first_failure.empty()) out.first_failure = label;
    if (exact) out.exact_all_pass = out.exact_all_pass && result.pass;
    out.oracles.push_back(std::move(result));
  };

  {
    RngStream rng = stream(1);
    add(lemma1_check(10, 2, {1.0, 1.0}, {1.0, 1.0}, lemma_trials, rng), "lemma1_ratio", true);
  }
  {
    RngStream rng = stream(2);
    add(lemma1_check(6, 2, {1.0, 2.0}, {2.0, 2.0}, lemma_trials, rng), "lemma1_weighted", true);
  }
  {
    RngStream rng = stream(3);
    add(lemma1_check(3, 2, {1.0, 2.0}, {2.0, 2.0}, lemma_trials, rng), "lemma1_edge", true);
  }
  {
    RngStream rng = stream(4);
    add(lemma2_check(ComplexMatrix::identity(50), lemma_trials, rng), "lemma2_identity", true);
  }
  {
    RngStream rng = stream(5);
    add(lemma2_check(ComplexMatrix::diagonal(std::vector<double>{1.0, 2.0}), lemma_trials, rng),
        "lemma2_diag", true);
  }
  {
    RngStream rng = stream(6);
    ComplexMatrix imag = ComplexMatrix::identity(8);
    imag *= Complex(0.0, 1.0);
    add(lemma2_check(imag, lemma_trials, rng), "lemma2_imaginary", true);
  }
  {
    RngStream rng = stream(7);
    auto q = q_asymptotic_check(cfg, profile, matrix_trials, rng);
    add(q[0], "Q1", true);
    add(q[1], "Q2", false);
    add(q[2], "Q3", false);
  }
  {
    RngStream rng = stream(8);
    auto terms = variance_terms_check(cfg, profile, matrix_trials, rng);
    const bool exact_term[] = {true, true, false, true, true, false, false};
    for (std::size_t i = 0; i < terms.size(); ++i)
      add(terms[i], terms[i].name, exact_term[i]);
  }

  std::string csv = "oracle,M,K,empirical,analytic,rel_error,mc_std_error,trials,tolerance,pass\n";
  for (const OracleResult& o : out.oracles) {
    csv += o.name;
    csv += ',';
    csv += std::to_string(cfg.relay_antennas);
    csv += ',';
    csv += std::to_string(cfg.num_users);
    csv += ',';
    csv += format_double(o.empirical);
    csv += ',';
    csv += format_double(o.analytic);
    csv += ',';
    csv += format_double(o.rel_error);
    csv += ',';
    csv += format_double(o.mc_std_error);
    csv += ',';
    csv += std::to_string(o.trials);
    csv += ',';
    csv += format_double(o.tolerance);
    csv += ',';
    csv += o.pass ? "1" : "0";
    csv += '\n';
  }
  out.csv = std::move(csv);
  return out;
}

ResultRow run_single(const ExperimentSpec& spec) {
  spec.validate();
  const int trials = spec.resolved_trials();
  const int threads = spec.resolved_threads();
  const bool zf = spec.mode == RunMode::kZf;

  SystemConfig cfg;
  FadingProfile profile;
  RngStream base(0, 0);
  int case_index = -1;
  int drop_index = -1;

  if (spec.experiment == "fig1") {
    cfg = fig1_config(spec, 1, spec.num_users);
    cfg.relay_antennas = spec.relay_antennas;  // M given directly, not via ratio
    cfg.validate();
    profile = estimation_stats(std::vector<double>(cfg.num_users, 1.0), cfg.training_length,
                               cfg.pilot_snr);
    base = RngStream(spec.seed, mix_streams({kTagFig1Cell,
                                             static_cast<std::uint64_t>(cfg.relay_antennas),
                                             static_cast<std::uint64_t>(cfg.num_users)}));
  } else {
    cfg = fig2_config(spec, spec.case_index);
    cfg.validate();
    RngStream drop_rng(spec.seed,
                       mix_streams({kTagFig2Drop, static_cast<std::uint64_t>(spec.drop_index)}));
    const std::vector<double> betas = drop_users(cfg.num_users, spec.disk_diameter_m,
                                                 spec.shadow_std_db, spec.pathloss_exp, drop_rng);
    profile = estimation_stats(betas, cfg.training_length, cfg.pilot_snr);
    base = RngStream(spec.seed,
                     mix_streams({kTagFig2Cell, static_cast<std::uint64_t>(spec.drop_index),
                                  static_cast<std::uint64_t>(spec.case_index)}));
    case_index = spec.case_index;
    drop_index = spec.drop_index;
  }

  SeReport report;
  if (spec.method == "closed_form") {
    report = se_closed_form(cfg, profile);
  } else {
    detail::KernelRequest request;
    request.zero_forcing = zf;
    request.maximum_ratio = !zf;
    request.moments = true;
    request.threads = threads;
    const detail::KernelResult result = detail::run_mc_kernel(cfg, profile, trials, base, request);
    report = detail::se_from_moments(cfg, zf ? *result.zf : *result.mr);
  }
  return report_to_row(spec, spec.experiment, cfg, zf ? "zf" : "mr", report, case_index,
                       drop_index);
}

}  // namespace mwr
