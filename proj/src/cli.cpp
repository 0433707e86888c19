#include "mixfit/cli.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "mixfit/cost.hpp"
#include "mixfit/kernel.hpp"
#include "mixfit/moments.hpp"

namespace mixfit::cli {

using nlohmann::json;

void CliConfig::validate() const {
  solver.validate();
  if (precision < 0 || precision > 17)
    throw Error(ErrorCode::InvalidArgument, "--precision must lie in [0, 17]");
  if (!(share_tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "--share-tol must be positive");
  if (subcommand == Subcommand::Simulate) {
    if (classes < 2 || classes > 8) throw Error(ErrorCode::InvalidArgument, "--classes must lie in [2, 8]");
    if (bins < classes) throw Error(ErrorCode::InvalidArgument, "--bins must be at least --classes");
    return;
  }
  if (subcommand == Subcommand::Report) {
    if (!report) throw Error(ErrorCode::InvalidArgument, "report needs --report PATH");
    return;
  }
  if (!scenario && !report && !training)
    throw Error(ErrorCode::InvalidArgument,
                "an input is required: --scenario, --report, or --training with --test");
  for (const auto* p : {&training, &test, &report, &costs, &scenario})
    if (*p && (*p)->empty()) throw Error(ErrorCode::InvalidArgument, "empty input path");
}

namespace {

struct Problem {
  TrainingModel model;
  BinnedDistribution test;
  std::optional<CostProfile> costs;
  std::optional<SimplexWeights> truth;
  std::optional<io::AggregateReport> report;
};

ShiftScenario load_scenario(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
  // Accept both a bare scenario and the document written by `simulate`.
  if (j.is_object() && j.contains("scenario")) return io::scenario_from_json(j.at("scenario"));
  return io::scenario_from_json(j);
}

Problem load_problem(const CliConfig& config, std::ostream& err) {
  std::optional<TrainingModel> model;
  std::optional<BinnedDistribution> test;
  std::optional<CostProfile> costs;
  std::optional<SimplexWeights> truth;
  std::optional<io::AggregateReport> report;

  if (config.scenario) {
    auto s = load_scenario(*config.scenario);
    model = std::move(s.model);
    test = std::move(s.test);
    truth = std::move(s.truth);
  } else if (config.report) {
    io::AggregateOptions opts;
    opts.share_tolerance = config.share_tolerance;
    auto a = io::parse_aggregate_report(*config.report, opts);
    for (const auto& w : a.warnings) err << "warning: " << w << '\n';
    model = std::move(a.model);
    test = std::move(a.test);
    report = std::move(a.report);
  } else {
    auto t = io::parse_training_csv(*config.training);
    model = std::move(t.model);
    costs = std::move(t.costs);
  }
  for (const auto& w : model->warnings()) err << "warning: " << w << '\n';

  if (config.test) {
    auto t = io::parse_test_csv(*config.test);
    test = std::move(t.test);
    if (t.costs) costs = std::move(t.costs);
  }
  if (!test) throw Error(ErrorCode::InvalidArgument, "no test distribution: pass --test PATH");
  if (config.costs) costs = io::parse_costs_csv(*config.costs);

  return {*model, test->reindexed(model->support()), std::move(costs), std::move(truth),
          std::move(report)};
}

std::string fixed(double v, int precision) {
  if (!std::isfinite(v)) return "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

std::string sci(double v) {
  if (!std::isfinite(v)) return "n/a";
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

int cmd_fit(const CliConfig& config, std::ostream& out, std::ostream& err) {
  const Problem p = load_problem(config, err);
  const auto ratios = build_ratios_from_conditionals(p.model);
  const FitResult r = fit(p.test, ratios, config.solver);
  std::optional<BinaryExistenceCheck> exist;
  if (ratios.class_count() == 2) exist = existence_check_binary(p.test, ratios);
  const bool independent = ratios_independent(ratios, p.test);
  const auto& labels = p.model.class_labels();

  if (config.format == io::Format::Json) {
    json j = io::to_json(r, labels);
    j["ratios_independent"] = independent;
    if (exist)
      j["existence"] = {{"exists", exist->exists},
                        {"mean_X", exist->mean_X},
                        {"mean_inv_X", std::isfinite(exist->mean_inv_X) ? json(exist->mean_inv_X)
                                                                         : json("inf")}};
    if (p.truth) j["truth"] = p.truth->values();
    out << j.dump(2) << '\n';
  } else if (config.format == io::Format::Csv) {
    out << "class,weight_pct\n";
    for (std::size_t i = 0; i < labels.size(); ++i)
      out << labels[i] << ',' << fixed(100.0 * r.weights[i], config.precision) << '\n';
  } else {
    out << "method: " << to_string(r.method) << '\n'
        << "iterations: " << r.iterations << '\n'
        << "weights (%):\n";
    for (std::size_t i = 0; i < labels.size(); ++i)
      out << "  " << labels[i] << ": " << fixed(100.0 * r.weights[i], config.precision) << '\n';
    out << "final gradient norm: " << sci(r.final_gradient_norm) << '\n'
        << "objective: " << fixed(r.objective_value, 10) << '\n'
        << "ratios independent: " << (independent ? "yes" : "no") << '\n';
    if (exist)
      out << "existence: E[X] = " << fixed(exist->mean_X, 6)
          << ", E[1/X] = " << fixed(exist->mean_inv_X, 6) << " -> "
          << (exist->exists ? "interior solution" : "no interior solution") << '\n';
    out << "exact-fit components: " << (r.exact_fit_components ? "yes" : "no") << '\n'
        << "boundary alarm: " << (r.boundary_alarm ? "YES" : "no") << '\n';
  }
  for (const auto& n : r.notes) err << "note: " << n << '\n';
  return r.boundary_alarm ? kExitBoundaryAlarm : kExitOk;
}

int cmd_quantify(const CliConfig& config, std::ostream& out, std::ostream& err) {
  const Problem p = load_problem(config, err);
  ShiftScenario s{p.model, p.test, p.truth, ShiftKind::PriorProbability, config.seed};
  const ComparisonRecord rec = compare_estimators(s, config.solver);
  out << io::write_report(rec, {config.format, config.precision});
  for (const auto& e : rec.estimators)
    for (const auto& n : e.notes) err << "note (" << e.name << "): " << n << '\n';
  return rec.any_boundary_alarm() ? kExitBoundaryAlarm : kExitOk;
}

int cmd_report(const CliConfig& config, std::ostream& out, std::ostream& err) {
  const Problem p = load_problem(config, err);
  const ComparisonRecord rec = compare_estimators(p.model, p.test, config.solver);
  if (config.format == io::Format::Json) {
    json j = io::to_json(rec);
    j["kind"] = "forecast";
    json rows = json::array();
    for (const auto& r : p.report->rows)
      rows.push_back({{"band", r.band},
                      {"train_share", r.exposure_share},
                      {"train_rate", r.class1_rate},
                      {"test_share", r.test_share ? json(*r.test_share) : json(nullptr)}});
    j["report"] = {{"rows", rows},
                   {"all_rate", p.report->all_rate ? json(*p.report->all_rate) : json(nullptr)}};
    out << j.dump(2) << '\n';
  } else if (config.format == io::Format::Csv) {
    out << io::write_report(rec, {config.format, config.precision});
  } else {
    out << "Input report (%)\n";
    std::size_t w = 4;
    for (const auto& r : p.report->rows) w = std::max(w, r.band.size());
    out << std::left << std::setw(static_cast<int>(w)) << "Band" << std::right << "  "
        << std::setw(12) << "train share" << "  " << std::setw(10) << "train rate" << "  "
        << std::setw(11) << "test share" << '\n';
    for (std::size_t b = 0; b < p.report->rows.size(); ++b) {
      const auto& r = p.report->rows[b];
      out << std::left << std::setw(static_cast<int>(w)) << r.band << std::right << "  "
          << std::setw(12) << fixed(100.0 * r.exposure_share, config.precision) << "  "
          << std::setw(10) << fixed(100.0 * r.class1_rate, config.precision) << "  "
          << std::setw(11) << fixed(100.0 * p.test[b], config.precision) << '\n';
    }
    out << "\nForecast (%)\n" << io::write_report(rec, {config.format, config.precision});
  }
  return rec.any_boundary_alarm() ? kExitBoundaryAlarm : kExitOk;
}

int cmd_cost(const CliConfig& config, std::ostream& out, std::ostream& err) {
  const Problem p = load_problem(config, err);
  if (!p.costs)
    throw Error(ErrorCode::InvalidArgument,
                "no costs: pass --costs PATH or include a cost column in the test or training CSV");
  const auto& labels = p.model.class_labels();
  const auto covariate = cost_total_covariate(p.test, *p.costs, p.model);
  const double total = expected_total_cost(p.test, *p.costs);

  const auto ratios = build_ratios_from_conditionals(p.model);
  const FitResult r = fit(p.test, ratios, config.solver);
  std::optional<std::vector<double>> ratio_totals;
  if (!r.boundary_alarm && r.weights.interior())
    ratio_totals = cost_total_density_ratio(p.test, *p.costs, ratios, r.weights);

  if (config.format == io::Format::Json) {
    json j = {{"schema_version", io::kSchemaVersion},
              {"kind", "cost_totals"},
              {"classes", labels},
              {"expected_total", total},
              {"covariate_shift", covariate},
              {"density_ratio", ratio_totals ? json(*ratio_totals) : json(nullptr)},
              {"ml_weights", r.weights.values()},
              {"boundary_alarm", r.boundary_alarm}};
    out << j.dump(2) << '\n';
  } else {
    const bool csv = config.format == io::Format::Csv;
    if (csv) out << "class,covariate_shift,density_ratio\n";
    else out << "Expected cost per unit of test mass, by class\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const std::string ratio_cell =
          ratio_totals ? fixed((*ratio_totals)[i], config.precision) : "n/a";
      if (csv)
        out << labels[i] << ',' << fixed(covariate[i], config.precision) << ',' << ratio_cell << '\n';
      else
        out << "  " << labels[i] << ": covariate shift " << fixed(covariate[i], config.precision)
            << ", density ratio " << ratio_cell << '\n';
    }
    if (csv)
      out << "All," << fixed(total, config.precision) << ','
          << (ratio_totals ? fixed(total, config.precision) : "n/a") << '\n';
    else
      out << "  All: " << fixed(total, config.precision) << '\n';
  }
  if (r.boundary_alarm)
    err << "note: ML fit raised the boundary alarm; density-ratio totals unavailable\n";
  return r.boundary_alarm ? kExitBoundaryAlarm : kExitOk;
}

int cmd_simulate(const CliConfig& config, std::ostream& out, std::ostream&) {
  const ShiftScenario s = random_scenario(config.kind, config.seed, config.classes, config.bins);
  const ComparisonRecord rec = compare_estimators(s, config.solver);
  if (config.format == io::Format::Json) {
    json j = {{"schema_version", io::kSchemaVersion},
              {"kind", "simulation"},
              {"scenario", io::to_json(s)},
              {"comparison", io::to_json(rec)}};
    out << j.dump(2) << '\n';
  } else {
    if (config.format == io::Format::Text)
      out << "Simulated " << to_string(s.shift_kind) << " shift, seed " << s.seed << ", "
          << s.model.class_count() << " classes, " << s.model.bin_count() << " bins\n\n";
    out << io::write_report(rec, {config.format, config.precision});
  }
  return rec.any_boundary_alarm() ? kExitBoundaryAlarm : kExitOk;
}

}  // namespace

int run(const CliConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    switch (config.subcommand) {
      case Subcommand::Fit: return cmd_fit(config, out, err);
      case Subcommand::Quantify: return cmd_quantify(config, out, err);
      case Subcommand::Cost: return cmd_cost(config, out, err);
      case Subcommand::Simulate: return cmd_simulate(config, out, err);
      case Subcommand::Report: return cmd_report(config, out, err);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitError;
}

}  // namespace mixfit::cli
