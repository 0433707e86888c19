// mixfit: class-prevalence, loss-rate and cost forecasts from simple finite
// mixture fits.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "mixfit/cli.hpp"

using mixfit::cli::CliConfig;
using mixfit::cli::Subcommand;

namespace {

struct Raw {
  std::string training, test, report, costs, scenario;
  std::string method = "auto";
  std::string format = "text";
  std::string kind = "prior";
};

void add_common(CLI::App* app, CliConfig& cfg, Raw& raw) {
  app->add_option("--training", raw.training, "Row-level training CSV (feature,class[,weight][,cost])");
  app->add_option("--test", raw.test, "Row-level test CSV (feature[,weight][,cost])");
  app->add_option("--report", raw.report, "Aggregated band report CSV (percent values)");
  app->add_option("--costs", raw.costs, "Per-bin cost CSV (feature,cost)");
  app->add_option("--scenario", raw.scenario, "Scenario JSON, e.g. written by `simulate --format json`");
  app->add_option("--method", raw.method, "Solver: em|newton|gauss-seidel|auto")
      ->check(CLI::IsMember({"em", "newton", "gauss-seidel", "auto"}));
  app->add_option("--tol-grad", cfg.solver.gradient_tolerance, "Gradient sup-norm tolerance");
  app->add_option("--tol-weight", cfg.solver.weight_tolerance, "Successive-weights tolerance");
  app->add_option("--max-iter", cfg.solver.max_iterations, "Iteration cap");
  app->add_option("--format", raw.format, "Output format: text|csv|json")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  app->add_option("--precision", cfg.precision, "Decimals for percent output");
  app->add_option("--seed", cfg.seed, "Random seed");
  app->add_option("--share-tol", cfg.share_tolerance,
                  "Allowed deviation of report share columns from 100% (fraction)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simple finite mixture fits for prevalence, loss-rate and cost forecasts"};
  app.require_subcommand(1);

  CliConfig cfg;
  Raw raw;
  const std::map<std::string, std::pair<Subcommand, std::string>> commands = {
      {"fit", {Subcommand::Fit, "ML mixture weights with diagnostics"}},
      {"quantify", {Subcommand::Quantify, "Covariate-shift, scaled and ML estimates side by side"}},
      {"cost", {Subcommand::Cost, "Per-class cost totals under both shift assumptions"}},
      {"simulate", {Subcommand::Simulate, "Synthetic scenario plus estimator comparison"}},
      {"report", {Subcommand::Report, "Forecast table from an aggregated band report"}},
  };
  std::map<CLI::App*, Subcommand> which;
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.second);
    add_common(sub, cfg, raw);
    if (entry.first == Subcommand::Simulate) {
      sub->add_option("--kind", raw.kind, "Shift kind: prior|covariate")
          ->check(CLI::IsMember({"prior", "covariate"}));
      sub->add_option("--classes", cfg.classes, "Number of classes");
      sub->add_option("--bins", cfg.bins, "Number of feature bins");
    }
    which[sub] = entry.first;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : mixfit::cli::kExitError;
  }

  for (const auto& [sub, cmd] : which)
    if (sub->parsed()) cfg.subcommand = cmd;
  auto path = [](const std::string& s) {
    return s.empty() ? std::optional<std::filesystem::path>{} : std::filesystem::path(s);
  };
  cfg.training = path(raw.training);
  cfg.test = path(raw.test);
  cfg.report = path(raw.report);
  cfg.costs = path(raw.costs);
  cfg.scenario = path(raw.scenario);
  try {
    cfg.solver.method = mixfit::parse_solver_method(raw.method);
    cfg.format = mixfit::io::parse_format(raw.format);
    cfg.kind = mixfit::parse_shift_kind(raw.kind);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return mixfit::cli::kExitError;
  }
  return mixfit::cli::run(cfg, std::cout, std::cerr);
}
