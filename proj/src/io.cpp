#include "mixfit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace mixfit::io {

using nlohmann::json;

namespace {

[[noreturn]] void parse_error(const std::string& source, std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::Parse, source + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Comma split honouring double quotes ("" escapes a quote).
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      out.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur += c;
    }
  }
  out.push_back(was_quoted ? cur : trim(cur));
  return out;
}

std::optional<double> to_number(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return v;
}

double number_at(const std::vector<std::string>& fields, std::size_t col, const char* what,
                 const std::string& source, std::size_t line) {
  const auto v = to_number(fields[col]);
  if (!v || !std::isfinite(*v))
    parse_error(source, line, std::string("malformed ") + what + " '" + fields[col] + "'");
  return *v;
}

struct CsvTable {
  std::map<std::string, std::size_t> columns;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line, fields)
};

CsvTable read_csv(std::istream& in, const std::string& source,
                  const std::vector<std::string>& required,
                  const std::vector<std::string>& optional) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    if (!header) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const std::string name = fields[i];
        const bool known = std::find(required.begin(), required.end(), name) != required.end() ||
                           std::find(optional.begin(), optional.end(), name) != optional.end();
        if (!known) parse_error(source, lineno, "unexpected column '" + name + "'");
        if (!t.columns.emplace(name, i).second)
          parse_error(source, lineno, "duplicate column '" + name + "'");
      }
      for (const auto& r : required)
        if (!t.columns.contains(r)) parse_error(source, lineno, "missing column '" + r + "'");
      header = true;
      continue;
    }
    if (fields.size() != t.columns.size())
      parse_error(source, lineno,
                  "expected " + std::to_string(t.columns.size()) + " fields, found " +
                      std::to_string(fields.size()));
    t.rows.emplace_back(lineno, std::move(fields));
  }
  if (!header) throw Error(ErrorCode::Parse, source + ": empty file");
  return t;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  return f;
}

// Numeric order when every label is a number, otherwise lexicographic.
std::vector<std::string> sorted_labels(std::vector<std::string> labels) {
  const bool numeric = std::all_of(labels.begin(), labels.end(),
                                   [](const std::string& s) { return to_number(s).has_value(); });
  if (numeric) {
    std::stable_sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) {
      const double x = *to_number(a);
      const double y = *to_number(b);
      return x < y || (x == y && a < b);
    });
  } else {
    std::sort(labels.begin(), labels.end());
  }
  return labels;
}

template <typename Map>
std::vector<std::string> keys_of(const Map& m) {
  std::vector<std::string> out;
  for (const auto& [k, _] : m) out.push_back(k);
  return out;
}

struct WeightedCost {
  double weight = 0.0;
  double cost_sum = 0.0;
};

std::optional<CostProfile> make_costs(const std::map<std::string, WeightedCost>& per_bin,
                                      const std::vector<std::string>& support) {
  std::vector<double> c;
  for (const auto& s : support) {
    const auto& wc = per_bin.at(s);
    c.push_back(wc.weight > 0.0 ? wc.cost_sum / wc.weight : 0.0);
  }
  return CostProfile(support, std::move(c));
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void check_header(const json& j, const char* kind) {
  if (!j.is_object() || j.value("schema_version", "") != kSchemaVersion)
    throw Error(ErrorCode::Parse, std::string("expected a schema_version \"") + kSchemaVersion +
                                      "\" document");
  if (j.value("kind", "") != kind)
    throw Error(ErrorCode::Parse, std::string("expected a document of kind '") + kind + "'");
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  auto f = open(path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

// Training CSV

TrainingData parse_training_csv(std::istream& in, const std::string& source) {
  const auto t = read_csv(in, source, {"feature", "class"}, {"weight", "cost"});
  const std::size_t fcol = t.columns.at("feature");
  const std::size_t ccol = t.columns.at("class");
  const auto wcol = t.columns.contains("weight") ? std::optional(t.columns.at("weight")) : std::nullopt;
  const auto kcol = t.columns.contains("cost") ? std::optional(t.columns.at("cost")) : std::nullopt;

  std::map<std::string, std::map<std::string, double>> mass;  // bin -> class -> weight
  std::map<std::string, double> class_mass;
  std::map<std::string, WeightedCost> costs;
  for (const auto& [line, fields] : t.rows) {
    const std::string& feature = fields[fcol];
    const std::string& cls = fields[ccol];
    if (feature.empty()) parse_error(source, line, "empty feature value");
    if (cls.empty()) parse_error(source, line, "empty class label");
    const double w = wcol ? number_at(fields, *wcol, "weight", source, line) : 1.0;
    if (w < 0.0) parse_error(source, line, "negative weight");
    mass[feature][cls] += w;
    class_mass[cls] += w;
    auto& wc = costs[feature];
    if (kcol) {
      wc.weight += w;
      wc.cost_sum += w * number_at(fields, kcol.value_or(0), "cost", source, line);
    }
  }
  if (class_mass.size() < 2)
    throw Error(ErrorCode::Parse, source + ": at least two classes are required, found " +
                                      std::to_string(class_mass.size()));

  const auto support = sorted_labels(keys_of(mass));
  const auto classes = sorted_labels(keys_of(class_mass));
  double total = 0.0;
  for (const auto& [_, w] : class_mass) total += w;
  if (!(total > 0.0)) throw Error(ErrorCode::Parse, source + ": total weight is zero");

  std::vector<double> priors;
  for (const auto& c : classes) {
    if (!(class_mass[c] > 0.0))
      throw Error(ErrorCode::Parse, source + ": class '" + c + "' has zero total weight");
    priors.push_back(class_mass[c] / total);
  }
  std::vector<double> marginal;
  std::vector<std::vector<double>> cond;
  for (const auto& s : support) {
    const auto& per_class = mass[s];
    const double bin_total =
        std::accumulate(per_class.begin(), per_class.end(), 0.0,
                        [](double acc, const auto& kv) { return acc + kv.second; });
    if (!(bin_total > 0.0))
      throw Error(ErrorCode::Parse, source + ": bin '" + s + "' has zero total weight");
    marginal.push_back(bin_total / total);
    std::vector<double> row;
    for (const auto& c : classes) {
      auto it = per_class.find(c);
      row.push_back(it == per_class.end() ? 0.0 : it->second / bin_total);
    }
    cond.push_back(std::move(row));
  }

  TrainingData data{TrainingModel(support, classes, std::move(priors), std::move(cond),
                                  std::move(marginal), ModelChecks{.marginal_tolerance = 1e-9}),
                    std::nullopt};
  if (kcol) data.costs = make_costs(costs, support);
  return data;
}

TrainingData parse_training_csv(const std::filesystem::path& path) {
  auto f = open(path);
  return parse_training_csv(f, path.string());
}

// Test CSV

TestData parse_test_csv(std::istream& in, const std::string& source) {
  const auto t = read_csv(in, source, {"feature"}, {"weight", "cost"});
  const std::size_t fcol = t.columns.at("feature");
  const auto wcol = t.columns.contains("weight") ? std::optional(t.columns.at("weight")) : std::nullopt;
  const auto kcol = t.columns.contains("cost") ? std::optional(t.columns.at("cost")) : std::nullopt;

  std::map<std::string, double> mass;
  std::map<std::string, WeightedCost> costs;
  double total = 0.0;
  for (const auto& [line, fields] : t.rows) {
    const std::string& feature = fields[fcol];
    if (feature.empty()) parse_error(source, line, "empty feature value");
    const double w = wcol ? number_at(fields, *wcol, "weight", source, line) : 1.0;
    if (w < 0.0) parse_error(source, line, "negative weight");
    mass[feature] += w;
    total += w;
    if (kcol) {
      auto& wc = costs[feature];
      wc.weight += w;
      wc.cost_sum += w * number_at(fields, kcol.value_or(0), "cost", source, line);
    }
  }
  if (!(total > 0.0)) throw Error(ErrorCode::Parse, source + ": test data has no mass");
  const auto support = sorted_labels(keys_of(mass));
  std::vector<double> w;
  for (const auto& s : support) w.push_back(mass[s] / total);
  TestData data{BinnedDistribution(support, std::move(w), 1e-9), std::nullopt};
  if (kcol) data.costs = make_costs(costs, support);
  return data;
}

TestData parse_test_csv(const std::filesystem::path& path) {
  auto f = open(path);
  return parse_test_csv(f, path.string());
}

CostProfile parse_costs_csv(std::istream& in, const std::string& source) {
  const auto t = read_csv(in, source, {"feature", "cost"}, {});
  const std::size_t fcol = t.columns.at("feature");
  const std::size_t ccol = t.columns.at("cost");
  std::map<std::string, WeightedCost> costs;
  for (const auto& [line, fields] : t.rows) {
    if (fields[fcol].empty()) parse_error(source, line, "empty feature value");
    auto& wc = costs[fields[fcol]];
    wc.weight += 1.0;
    wc.cost_sum += number_at(fields, ccol, "cost", source, line);
  }
  return *make_costs(costs, sorted_labels(keys_of(costs)));
}

CostProfile parse_costs_csv(const std::filesystem::path& path) {
  auto f = open(path);
  return parse_costs_csv(f, path.string());
}

// Aggregate reports

AggregateData aggregate_from_report(AggregateReport report, const AggregateOptions& options) {
  if (report.rows.empty()) throw Error(ErrorCode::Parse, "aggregate report has no bands");
  AggregateData out;
  double share_sum = 0.0;
  double pi = 0.0;
  const bool has_test = report.rows.front().test_share.has_value();
  double test_sum = 0.0;
  std::vector<std::string> support;
  std::vector<double> marginal;
  std::vector<double> test;
  std::vector<std::vector<double>> cond;
  for (const auto& r : report.rows) {
    if (r.exposure_share < 0.0)
      throw Error(ErrorCode::Parse, "band '" + r.band + "': negative exposure share");
    if (r.class1_rate < 0.0 || r.class1_rate > 1.0)
      throw Error(ErrorCode::Parse, "band '" + r.band + "': rate outside [0, 100]%");
    if (r.test_share.has_value() != has_test)
      throw Error(ErrorCode::Parse, "band '" + r.band + "': test share column incomplete");
    support.push_back(r.band);
    marginal.push_back(r.exposure_share);
    cond.push_back({r.class1_rate, 1.0 - r.class1_rate});
    share_sum += r.exposure_share;
    pi += r.exposure_share * r.class1_rate;
    if (has_test) {
      if (*r.test_share < 0.0)
        throw Error(ErrorCode::Parse, "band '" + r.band + "': negative test share");
      test.push_back(*r.test_share);
      test_sum += *r.test_share;
    }
  }

  auto check_sum = [&](double sum, const char* which) {
    std::ostringstream os;
    os << std::setprecision(6) << which << " shares sum to " << 100.0 * sum << "%";
    if (std::abs(sum - 1.0) > options.share_tolerance)
      throw Error(ErrorCode::Parse, os.str() + ", beyond the tolerance");
    if (std::abs(sum - 1.0) > 1e-12) out.warnings.push_back(os.str() + " (kept as reported)");
  };
  check_sum(share_sum, "training");
  if (has_test) check_sum(test_sum, "test");

  if (report.all_rate) {
    if (std::abs(*report.all_rate - pi) > 5e-4) {
      std::ostringstream os;
      os << std::fixed << std::setprecision(2) << "reported All=" << 100.0 * *report.all_rate
         << "% differs from the exposure-weighted band rate " << 100.0 * pi << "%";
      out.warnings.push_back(os.str());
    }
  }
  if (!(pi > 0.0 && pi < 1.0))
    throw Error(ErrorCode::Parse, "aggregate report: overall rate must lie strictly in (0, 100)%");

  out.model = TrainingModel(
      support, {options.positive_label, options.negative_label}, {pi, 1.0 - pi}, std::move(cond),
      std::move(marginal),
      ModelChecks{.marginal_tolerance = std::max(options.share_tolerance, 1e-12),
                  .check_consistency = false});
  if (has_test) {
    // Raw shares; the distribution itself must be normalized.
    for (double& v : test) v /= test_sum;
    out.test = BinnedDistribution(support, std::move(test), 1e-9);
  }
  out.report = std::move(report);
  return out;
}

AggregateData parse_aggregate_report(std::istream& in, const AggregateOptions& options,
                                     const std::string& source) {
  const auto t = read_csv(in, source, {"band", "train_share_pct", "train_rate_pct"},
                          {"test_share_pct"});
  const std::size_t bcol = t.columns.at("band");
  const std::size_t scol = t.columns.at("train_share_pct");
  const std::size_t rcol = t.columns.at("train_rate_pct");
  const auto tcol = t.columns.contains("test_share_pct")
                        ? std::optional(t.columns.at("test_share_pct"))
                        : std::nullopt;
  AggregateReport report;
  for (const auto& [line, fields] : t.rows) {
    std::string band = fields[bcol];
    std::string lower = band;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    const double rate = number_at(fields, rcol, "rate", source, line) / 100.0;
    if (lower == "all") {
      report.all_rate = rate;
      continue;
    }
    if (band.empty()) parse_error(source, line, "empty band label");
    AggregateRow row{band, number_at(fields, scol, "share", source, line) / 100.0, rate, {}};
    if (tcol) row.test_share = number_at(fields, tcol.value_or(0), "test share", source, line) / 100.0;
    report.rows.push_back(std::move(row));
  }
  try {
    return aggregate_from_report(std::move(report), options);
  } catch (const Error& e) {
    throw Error(e.code(), source + ": " + e.what());
  }
}

AggregateData parse_aggregate_report(const std::filesystem::path& path,
                                     const AggregateOptions& options) {
  auto f = open(path);
  return parse_aggregate_report(f, options, path.string());
}

// JSON

json to_json(const BinnedDistribution& d) {
  return {{"support", d.support()}, {"weights", d.weights()}};
}

BinnedDistribution distribution_from_json(const json& j) {
  return BinnedDistribution(j.at("support").get<std::vector<std::string>>(),
                            j.at("weights").get<std::vector<double>>(), 1e-9);
}

json to_json(const TrainingModel& m) {
  const double total =
      std::accumulate(m.feature_marginal().begin(), m.feature_marginal().end(), 0.0);
  return {{"schema_version", kSchemaVersion},
          {"kind", "training_model"},
          {"support", m.support()},
          {"classes", m.class_labels()},
          {"priors", m.priors()},
          {"conditionals", m.conditionals()},
          {"feature_marginal", m.feature_marginal()},
          {"marginal_tolerance", std::max(1e-12, 2.0 * std::abs(total - 1.0))}};
}

TrainingModel model_from_json(const json& j) {
  check_header(j, "training_model");
  return TrainingModel(j.at("support").get<std::vector<std::string>>(),
                       j.at("classes").get<std::vector<std::string>>(),
                       j.at("priors").get<std::vector<double>>(),
                       j.at("conditionals").get<std::vector<std::vector<double>>>(),
                       j.at("feature_marginal").get<std::vector<double>>(),
                       ModelChecks{.marginal_tolerance = j.value("marginal_tolerance", 1e-12),
                                   .check_consistency = false});
}

json to_json(const ShiftScenario& s) {
  return {{"schema_version", kSchemaVersion},
          {"kind", "scenario"},
          {"shift_kind", to_string(s.shift_kind)},
          {"seed", s.seed},
          {"model", to_json(s.model)},
          {"test", to_json(s.test)},
          {"truth", s.truth ? json(s.truth->values()) : json(nullptr)}};
}

ShiftScenario scenario_from_json(const json& j) {
  check_header(j, "scenario");
  ShiftScenario s{model_from_json(j.at("model")), distribution_from_json(j.at("test")),
                  std::nullopt, parse_shift_kind(j.at("shift_kind").get<std::string>()),
                  j.value("seed", std::uint64_t{0})};
  if (j.contains("truth") && !j.at("truth").is_null())
    s.truth = SimplexWeights(j.at("truth").get<std::vector<double>>(), 1e-9);
  return s;
}

json to_json(const FitResult& r, const std::vector<std::string>& class_labels) {
  json j = {{"schema_version", kSchemaVersion},
            {"kind", "fit_result"},
            {"classes", class_labels},
            {"weights", r.weights.values()},
            {"interior", r.weights.interior()},
            {"method", to_string(r.method)},
            {"iterations", r.iterations},
            {"final_gradient_norm", num(r.final_gradient_norm)},
            {"boundary_alarm", r.boundary_alarm},
            {"converged", r.converged},
            {"objective_value", num(r.objective_value)},
            {"condition_number", r.condition_number ? num(*r.condition_number) : json(nullptr)},
            {"notes", r.notes}};
  if (r.exact_fit_components) {
    json comps = json::array();
    for (const auto& c : *r.exact_fit_components) comps.push_back(to_json(c));
    j["exact_fit_components"] = comps;
  } else {
    j["exact_fit_components"] = nullptr;
  }
  return j;
}

json to_json(const ComparisonRecord& rec) {
  json est = json::array();
  for (const auto& e : rec.estimators) {
    est.push_back({{"name", e.name},
                   {"weights", e.weights},
                   {"boundary_alarm", e.boundary_alarm},
                   {"error", e.error ? num(*e.error) : json(nullptr)},
                   {"band_rates", e.band_rates},
                   {"notes", e.notes},
                   {"failure", e.failure ? json(*e.failure) : json(nullptr)}});
  }
  return {{"schema_version", kSchemaVersion},
          {"kind", "comparison"},
          {"classes", rec.class_labels},
          {"support", rec.support},
          {"training_marginal", rec.training_marginal},
          {"training_priors", rec.training_priors},
          {"test_weights", rec.test_weights},
          {"truth", rec.truth ? json(rec.truth->values()) : json(nullptr)},
          {"r_squared", rec.r_squared ? num(*rec.r_squared) : json(nullptr)},
          {"interleaving", rec.interleaving ? json(*rec.interleaving) : json(nullptr)},
          {"estimators", est},
          {"ml_fit", rec.ml_fit ? to_json(*rec.ml_fit, rec.class_labels) : json(nullptr)},
          {"warnings", rec.warnings}};
}

Format parse_format(const std::string& name) {
  if (name == "text") return Format::Text;
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw Error(ErrorCode::InvalidArgument, "unknown output format '" + name + "'");
}

namespace {

const char* display_name(const std::string& estimator) {
  if (estimator == "covariate-shift") return "Covariate shift";
  if (estimator == "scaled-probability-average") return "Scaled prob. av.";
  if (estimator == "ml-kl-distance") return "KL distance";
  return estimator.c_str();
}

struct Column {
  std::size_t estimator;
  std::size_t cls;
  std::string title;
  std::string unit;
};

std::vector<Column> report_columns(const ComparisonRecord& rec) {
  // Binary problems show the first class only, as in a loss-rate table.
  const std::size_t shown = rec.class_labels.size() == 2 ? 1 : rec.class_labels.size();
  std::vector<Column> cols;
  for (std::size_t e = 0; e < rec.estimators.size(); ++e)
    for (std::size_t c = 0; c < shown; ++c)
      cols.push_back({e, c, display_name(rec.estimators[e].name), "% " + rec.class_labels[c]});
  return cols;
}

std::string percent(double v, int precision) {
  if (!std::isfinite(v)) return "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << 100.0 * v;
  return os.str();
}

std::string cell(const ComparisonRecord& rec, const Column& col, std::optional<std::size_t> bin,
                 int precision) {
  const auto& e = rec.estimators[col.estimator];
  if (e.failure) return "n/a";
  if (!bin) return percent(e.weights[col.cls], precision);
  if (e.band_rates.empty()) return "n/a";
  return percent(e.band_rates[*bin][col.cls], precision);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

std::string write_report(const ComparisonRecord& rec, const ReportOptions& options) {
  if (options.format == Format::Json) return to_json(rec).dump(2) + "\n";
  const auto cols = report_columns(rec);
  std::ostringstream os;
  const bool empty = rec.support.empty();

  if (options.format == Format::Csv) {
    os << "band";
    for (const auto& c : cols) os << ',' << csv_escape(c.title + " " + c.unit);
    os << '\n';
    if (empty) return os.str();
    for (std::size_t b = 0; b < rec.support.size(); ++b) {
      os << csv_escape(rec.support[b]);
      for (const auto& c : cols) os << ',' << cell(rec, c, b, options.precision);
      os << '\n';
    }
    os << "All";
    for (const auto& c : cols) os << ',' << cell(rec, c, std::nullopt, options.precision);
    os << '\n';
    return os.str();
  }

  std::size_t band_width = 4;
  for (const auto& s : rec.support) band_width = std::max(band_width, s.size());
  std::vector<std::size_t> widths;
  for (const auto& c : cols) widths.push_back(std::max({c.title.size(), c.unit.size(), std::size_t{8}}));

  auto row = [&](const std::string& label, const std::vector<std::string>& cells) {
    os << std::left << std::setw(static_cast<int>(band_width)) << label;
    for (std::size_t i = 0; i < cells.size(); ++i)
      os << "  " << std::right << std::setw(static_cast<int>(widths[i])) << cells[i];
    os << '\n';
  };
  std::vector<std::string> titles;
  std::vector<std::string> units;
  for (const auto& c : cols) {
    titles.push_back(c.title);
    units.push_back(c.unit);
  }
  row("Band", titles);
  row("", units);
  if (empty) return os.str();
  for (std::size_t b = 0; b < rec.support.size(); ++b) {
    std::vector<std::string> cells;
    for (const auto& c : cols) cells.push_back(cell(rec, c, b, options.precision));
    row(rec.support[b], cells);
  }
  std::vector<std::string> all;
  for (const auto& c : cols) all.push_back(cell(rec, c, std::nullopt, options.precision));
  row("All", all);

  os << '\n';
  if (rec.r_squared) os << "R^2 (training): " << percent(*rec.r_squared, options.precision) << "%\n";
  if (rec.interleaving)
    os << "Interleaving (covariate estimate between prior and ML): "
       << (*rec.interleaving ? "yes" : "NO") << '\n';
  for (const auto& e : rec.estimators) {
    if (e.failure) os << display_name(e.name) << ": failed: " << *e.failure << '\n';
    if (e.boundary_alarm) os << display_name(e.name) << ": BOUNDARY ALARM\n";
    if (e.error)
      os << display_name(e.name) << ": error vs truth " << std::scientific << std::setprecision(3)
         << *e.error << std::defaultfloat << '\n';
  }
  return os.str();
}

}  // namespace mixfit::io
