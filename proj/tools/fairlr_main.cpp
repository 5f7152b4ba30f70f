// fairlr: generate synthetic data, train fairness-constrained logistic
// regression candidates, audit models and compare them.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fairlr/commands.hpp"
#include "fairlr/error.hpp"

namespace {

using fairlr::ExitCode;

int to_int(ExitCode code) { return static_cast<int>(code); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fairness-constrained logistic regression: generate, train, audit, compare"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string format = "both";

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", config_path, "Run configuration (JSON)");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    cmd->add_option("--seed", seed, "Seed for generation and splitting (overrides config)");
    cmd->add_option("--format", format, "Console/report format")
        ->check(CLI::IsMember({"json", "text", "both"}));
  };

  auto* generate = app.add_subcommand("generate", "Write a synthetic biased dataset");
  add_common(generate, true);
  auto* train = app.add_subcommand("train", "Fit every candidate and write model files");
  add_common(train, true);
  auto* compare = app.add_subcommand("compare", "Train, audit on held-out data and rank candidates");
  add_common(compare, true);

  auto* audit = app.add_subcommand("audit", "Audit a model's predictions on a CSV dataset");
  add_common(audit, false);
  std::string model_path;
  std::string data_path;
  std::optional<double> threshold;
  std::optional<double> top_fraction;
  audit->add_option("--model", model_path, "Model file written by train")
      ->required()->check(CLI::ExistingFile);
  audit->add_option("--data", data_path, "CSV dataset")->required()->check(CLI::ExistingFile);
  auto* t_opt = audit->add_option("--threshold", threshold, "Fixed threshold t: label 1 iff score > t");
  audit->add_option("--top-fraction", top_fraction, "Label the top q fraction by score")
      ->excludes(t_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : to_int(ExitCode::config_error);
  }

  try {
    fairlr::CommandOptions options;
    options.format = fairlr::output_format_from_string(format);
    options.seed = seed;
    options.console = &std::cout;
    if (!out_dir.empty()) options.out_dir = out_dir;

    if (*audit) {
      std::optional<fairlr::ThresholdPolicy> policy;
      if (threshold) policy = fairlr::FixedThreshold{*threshold};
      if (top_fraction) policy = fairlr::TopFraction{*top_fraction};
      if (policy) fairlr::validate(*policy);
      (void)fairlr::cmd_audit(model_path, data_path, policy, options);
      return 0;
    }

    const auto config = fairlr::load_run_config(config_path);
    if (*generate) {
      (void)fairlr::cmd_generate(config, options);
      return 0;
    }
    if (*train) return to_int(fairlr::cmd_train(config, options).exit_code);
    if (*compare) return to_int(fairlr::cmd_compare(config, options).exit_code);
  } catch (const std::exception& e) {
    std::cerr << "fairlr: " << e.what() << '\n';
    return to_int(fairlr::exit_code_for(e));
  }
  return to_int(ExitCode::internal_error);
}
