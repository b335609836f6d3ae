#include <iostream>

#include <CLI11.hpp>

#include "xsni/cli.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitInternalError = 3;

void add_common_options(CLI::App* cmd, xsni::cli::RunConfig& config,
                        std::vector<std::string>& relation_args) {
  cmd->add_option("--corpus", config.corpus_dir, "Directory of domain-tree JSON files")
      ->required();
  cmd->add_option("--relations", relation_args,
                  "Relation source, cert=FILE (pair-list JSON) or resumption=FILE (CSV); "
                  "repeatable. Certificate relations default to the corpus certificates.");
  cmd->add_option("--cost-table", config.cost_table, "Cost-table override CSV");
  cmd->add_option("--cutoff", config.histogram_cutoff, "Histogram cutoff bin")
      ->capture_default_str();
  cmd->add_option("--rtt", config.rtt_ms, "RTT in ms for 0-RTT delta figures")
      ->capture_default_str();
  cmd->add_option("--seed", config.seed, "Seed for randomized fixtures (reserved)")
      ->capture_default_str();
  cmd->add_option("--out", config.output, "Output report path (.json)")->required();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"TLS resumption across hostnames: protocol prototype and page-load analytics"};
  app.require_subcommand(1);

  xsni::cli::RunConfig config;
  std::vector<std::string> relation_args;
  std::string policy_arg;
  std::string rule_arg = "path";

  CLI::App* analyze = app.add_subcommand("analyze", "Trust-group statistics per relation source");
  add_common_options(analyze, config, relation_args);

  CLI::App* simulate = app.add_subcommand("simulate", "Page-load simulation report");
  add_common_options(simulate, config, relation_args);
  simulate->add_option("--policy", policy_arg,
                       "Restrict to one policy: none|same|across (default: all three)");
  simulate->add_option("--rule", rule_arg, "Path unlock rule: path|shallow")
      ->capture_default_str();
  simulate->add_flag("!--no-pairwise", config.pairwise, "Skip two-site pairwise means");

  std::filesystem::path report_path;
  CLI::App* report = app.add_subcommand("report", "Print a simulation report as a table");
  report->add_option("report", report_path, "Report JSON produced by simulate")->required();

  std::optional<std::filesystem::path> delta_table;
  double delta_rtt = 60.0;
  double delta_hops = 1.58;
  bool delta_json = false;
  CLI::App* delta = app.add_subcommand("delta", "Resumption-delay interval derivations");
  delta->add_option("--cost-table", delta_table, "Cost-table override CSV");
  delta->add_option("--rtt", delta_rtt, "RTT in ms for the 0-RTT figures")->capture_default_str();
  delta->add_option("--hops", delta_hops, "Resumed hops on the critical path")
      ->capture_default_str();
  delta->add_flag("--json", delta_json, "Machine-readable output");

  std::filesystem::path demo_config;
  std::filesystem::path demo_script;
  std::optional<std::filesystem::path> demo_out;
  CLI::App* demo = app.add_subcommand("protocol-demo", "Replay a client connection script");
  demo->add_option("--config", demo_config, "Server-set configuration JSON")->required();
  demo->add_option("--script", demo_script, "Connection script, one target per line")->required();
  demo->add_option("--out", demo_out, "Also write the transcript log to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    for (const auto& arg : relation_args) {
      config.relation_files.push_back(xsni::cli::parse_relation_spec(arg));
    }
    if (analyze->parsed()) {
      return xsni::cli::cmd_analyze(config);
    }
    if (simulate->parsed()) {
      if (!policy_arg.empty()) {
        config.policy = xsni::sim::policy_from_string(policy_arg);
      }
      config.rule = xsni::sim::rule_from_string(rule_arg);
      return xsni::cli::cmd_simulate(config);
    }
    if (report->parsed()) {
      return xsni::cli::cmd_report(report_path, std::cout);
    }
    if (delta->parsed()) {
      return xsni::cli::cmd_delta(delta_table, delta_rtt, delta_hops, delta_json, std::cout);
    }
    if (demo->parsed()) {
      return xsni::cli::cmd_protocol_demo(demo_config, demo_script, demo_out, std::cout);
    }
    std::cerr << "no subcommand selected\n";
    return kExitInputError;
  } catch (const xsni::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternalError;
  }
}
