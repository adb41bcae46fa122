// SPDX-License-Identifier: Apache-2.0
// mwr-sim: multi-way massive MIMO relay network simulator

#include "mwr/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "mwr/experiments.hpp"

namespace mwr {

namespace {

struct CliOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  int trials = 0;
  int threads = 0;
  std::string out_path;
  std::string mode;
  // single / validate extras
  int relay_antennas = 0;
  int num_users = 0;
  std::string experiment;
  std::string method;
  int case_index = 0;
  int drop_index = -1;
  int lemma_trials = 0;
};

void add_common_options(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--config", opt.config_path, "flat key=value config file");
  cmd->add_option("--seed", opt.seed, "root seed (deterministic)");
  cmd->add_option("--trials", opt.trials, "Monte Carlo trials per point");
  cmd->add_option("--out", opt.out_path, "output CSV path");
  cmd->add_option("--mode", opt.mode, "processing: zf, mr or both")
      ->check(CLI::IsMember({"zf", "mr", "both"}));
  cmd->add_option("--threads", opt.threads, "worker threads (0 = hardware)");
}

ExperimentSpec build_spec(const std::string& name, const CliOptions& opt, const CLI::App* cmd) {
  ExperimentSpec spec;
  spec.name = name;
  if (!opt.config_path.empty()) parse_config_file(opt.config_path, spec);
  // Flags override file values.
  if (cmd->count("--seed") > 0) spec.seed = opt.seed;
  if (cmd->count("--trials") > 0) spec.trials = opt.trials;
  if (cmd->count("--threads") > 0) spec.threads = opt.threads;
  if (cmd->count("--out") > 0) spec.out_path = opt.out_path;
  if (cmd->count("--mode") > 0) spec.mode = parse_run_mode(opt.mode);
  if (cmd->count("--M") > 0) spec.relay_antennas = opt.relay_antennas;
  if (cmd->count("--K") > 0) spec.num_users = opt.num_users;
  if (cmd->count("--experiment") > 0) spec.experiment = opt.experiment;
  if (cmd->count("--method") > 0) spec.method = opt.method;
  if (cmd->count("--case") > 0) spec.case_index = opt.case_index;
  if (cmd->count("--drop") > 0) spec.drop_index = opt.drop_index;
  if (cmd->count("--lemma-trials") > 0) spec.lemma_trials = opt.lemma_trials;
  return spec;
}

int dispatch(const std::string& name, const ExperimentSpec& spec) {
  const std::string out_path = spec.resolved_out_path();
  if (name == "fig1") {
    const std::vector<ResultRow> rows = run_fig1(spec);
    write_text_file(out_path, rows_to_csv(rows));
    std::printf("fig1: wrote %zu rows to %s\n", rows.size(), out_path.c_str());
  } else if (name == "fig2") {
    const Fig2Output out = run_fig2(spec);
    write_text_file(out_path, rows_to_csv(out.rows));
    const std::string cdf_path = derive_cdf_path(out_path);
    write_text_file(cdf_path, out.cdf_csv);
    std::printf("fig2: wrote %zu rows to %s and the CDF summary to %s\n", out.rows.size(),
                out_path.c_str(), cdf_path.c_str());
  } else if (name == "validate") {
    const ValidateOutput out = run_validate(spec);
    write_text_file(out_path, out.csv);
    for (const OracleResult& o : out.oracles)
      std::printf("%-16s empirical=%-14.6g analytic=%-14.6g rel_error=%-10.3g %s\n",
                  o.name.c_str(), o.empirical, o.analytic, o.rel_error,
                  o.pass ? "pass" : "FAIL");
    std::printf("validate: wrote %zu oracle rows to %s\n", out.oracles.size(), out_path.c_str());
    if (!out.exact_all_pass)
      throw OracleFailure("exact-identity oracle failed: " + out.first_failure);
  } else {
    const ResultRow row = run_single(spec);
    write_text_file(out_path, csv_header() + "\n" + to_csv_row(row) + "\n");
    std::printf("%s\n%s\n", csv_header().c_str(), to_csv_row(row).c_str());
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"multi-way massive MIMO relay simulator"};
  app.require_subcommand(1);

  CliOptions opt;
  CLI::App* fig1 = app.add_subcommand("fig1", "sum SE versus K at fixed M/K ratios");
  CLI::App* fig2 = app.add_subcommand("fig2", "sum SE CDF over random user drops");
  CLI::App* validate = app.add_subcommand("validate", "statistical identity oracle suite");
  CLI::App* single = app.add_subcommand("single", "replay one result row");
  for (CLI::App* cmd : {fig1, fig2, validate, single}) add_common_options(cmd, opt);

  for (CLI::App* cmd : {validate, single}) {
    cmd->add_option("--M", opt.relay_antennas, "relay antenna count");
    cmd->add_option("--K", opt.num_users, "user count");
  }
  validate->add_option("--lemma-trials", opt.lemma_trials, "trials for the lemma oracles");
  single->add_option("--experiment", opt.experiment, "row family: fig1 or fig2")
      ->check(CLI::IsMember({"fig1", "fig2"}));
  single->add_option("--method", opt.method, "closed_form or monte_carlo")
      ->check(CLI::IsMember({"closed_form", "monte_carlo"}));
  single->add_option("--case", opt.case_index, "fig2 power case (1 or 2)");
  single->add_option("--drop", opt.drop_index, "fig2 drop index");

  try {
    app.parse(argc, argv);
    CLI::App* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    const ExperimentSpec spec = build_spec(name, opt, cmd);
    return dispatch(name, spec);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const InvalidConfig& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NonPositiveBeta& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const InvalidSlot& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const OracleFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace mwr
