#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mixfit/io.hpp"
#include "mixfit/kernel.hpp"
#include "support.hpp"

using namespace mixfit;
using doctest::Approx;

namespace {

io::TrainingData training(const std::string& text) {
  std::istringstream in(text);
  return io::parse_training_csv(in);
}

io::AggregateData report(const std::string& text, double tol = 1e-6) {
  std::istringstream in(text);
  return io::parse_aggregate_report(in, io::AggregateOptions{.share_tolerance = tol});
}

std::string message_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("training csv") {
  const auto sym = training("feature,class\na,1\na,2\nb,1\nb,2\n");
  CHECK(sym.model.priors() == std::vector<double>{0.5, 0.5});
  CHECK(sym.model.feature_marginal() == std::vector<double>{0.5, 0.5});
  const auto x = build_ratios_from_conditionals(sym.model);
  CHECK(x.ratio(0, 0) == 1.0);
  CHECK(x.ratio(1, 0) == 1.0);
  CHECK_FALSE(sym.costs.has_value());

  const auto a = training("feature,class,weight\na,1,0.4\na,2,0.1\nb,1,0.1\nb,2,0.4\n");
  const auto fix = fixtures::fix_a();
  CHECK(fixtures::sup_diff(a.model.priors(), fix.priors()) < 1e-15);
  for (std::size_t b = 0; b < 2; ++b)
    CHECK(fixtures::sup_diff(a.model.conditionals()[b], fix.conditionals()[b]) < 1e-15);

  CHECK(message_of([] { training("feature,class\na,1\nb,1\n"); }).find("class") != std::string::npos);
  CHECK(message_of([] { training("feature,class,weight\na,1,1\nb,2,-1\n"); }).find(":3:") !=
        std::string::npos);
  CHECK(message_of([] { training("feature,class\na,1\nb\n"); }).find(":3:") != std::string::npos);
  CHECK_THROWS_AS(training("feature,weight\na,1\n"), Error);
}

TEST_CASE("row order does not matter") {
  std::vector<std::string> rows{"x,1,2,5", "y,1,1,7", "x,2,1,3", "y,2,3,1", "z,1,1,2", "z,2,1,2", "x,1,1,9"};
  std::string base = "feature,class,weight,cost\n";
  std::string first = base;
  for (const auto& r : rows) first += r + "\n";
  const auto m1 = training(first);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 5; ++t) {
    std::shuffle(rows.begin(), rows.end(), rng);
    std::string text = base;
    for (const auto& r : rows) text += r + "\n";
    const auto m2 = training(text);
    CHECK(m2.model.support() == m1.model.support());
    CHECK(fixtures::sup_diff(m2.model.priors(), m1.model.priors()) < 1e-15);
    CHECK(fixtures::sup_diff(m2.model.feature_marginal(), m1.model.feature_marginal()) < 1e-15);
    CHECK(fixtures::sup_diff(m2.costs->cost(), m1.costs->cost()) < 1e-12);
  }
  // Weighted mean cost on bin x: (2*5 + 1*3 + 1*9) / 4.
  CHECK(m1.costs->cost()[0] == Approx(5.5));
}

TEST_CASE("numeric labels sort numerically") {
  const auto t = training("feature,class\n10,1\n9,2\n100,1\n9,1\n");
  CHECK(t.model.support() == std::vector<std::string>{"9", "10", "100"});
}

TEST_CASE("test and cost csv") {
  std::istringstream in("feature,weight,cost\nb,3,1.5\na,1,2\nb,1,2.5\n");
  const auto t = io::parse_test_csv(in);
  CHECK(t.test.support() == std::vector<std::string>{"a", "b"});
  CHECK(t.test[1] == Approx(0.8));
  CHECK(t.costs->cost()[1] == Approx(1.75));

  std::istringstream c("feature,cost\na,1\na,3\nb,2\n");
  const auto costs = io::parse_costs_csv(c);
  CHECK(costs.cost() == std::vector<double>{2.0, 2.0});
}

TEST_CASE("aggregate report") {
  const auto data = io::parse_aggregate_report(fixtures::data_path("mortgage.csv"),
                                               io::AggregateOptions{.share_tolerance = 5e-3});
  CHECK(data.model.priors()[0] == Approx(0.024794).epsilon(1e-12));
  CHECK(data.model.priors()[0] * 100 == Approx(2.48).epsilon(1e-3));
  const bool warned = std::any_of(data.warnings.begin(), data.warnings.end(), [](const std::string& w) {
    return w.find("reported All=2.2") != std::string::npos;
  });
  CHECK(warned);
  REQUIRE(data.test.has_value());
  const std::vector<double> expected{0.133, 0.242, 0.128, 0.254, 0.243};
  CHECK(fixtures::sup_diff(data.test->weights(), expected) < 1e-15);
  CHECK(data.report.all_rate == Approx(0.022));

  // Library default tolerance rejects the 100.1% share column.
  CHECK_THROWS_AS(io::parse_aggregate_report(fixtures::data_path("mortgage.csv")), Error);

  CHECK_THROWS_AS(report("band,train_share_pct,train_rate_pct\nA,50,120\nB,50,1\n"), Error);
  const auto model_only = report("band,train_share_pct,train_rate_pct\nA,40,10\nB,60,1\n");
  CHECK_FALSE(model_only.test.has_value());

  const auto single = report("band,train_share_pct,train_rate_pct,test_share_pct\nA,100,5,100\n");
  CHECK_THROWS_AS(fit(*single.test, build_ratios_from_conditionals(single.model)), Error);
}

TEST_CASE("json round trips") {
  const auto s = random_scenario(ShiftKind::PriorProbability, 17, 3, 7);
  const auto back = io::scenario_from_json(nlohmann::json::parse(io::to_json(s).dump()));
  CHECK(back.test.weights() == s.test.weights());
  CHECK(back.truth->values() == s.truth->values());
  CHECK(back.model.priors() == s.model.priors());
  CHECK(back.model.support() == s.model.support());
  for (std::size_t b = 0; b < s.model.bin_count(); ++b)
    CHECK(back.model.conditionals()[b] == s.model.conditionals()[b]);
  CHECK(back.shift_kind == s.shift_kind);
  CHECK(back.seed == s.seed);

  const auto d = io::distribution_from_json(io::to_json(s.test));
  CHECK(d.weights() == s.test.weights());

  auto bad = io::to_json(s);
  bad["schema_version"] = "2";
  CHECK_THROWS_AS(io::scenario_from_json(bad), Error);
  CHECK_THROWS_AS(io::model_from_json(io::to_json(s.test)), Error);
}

TEST_CASE("forecast report") {
  const auto data = io::parse_aggregate_report(fixtures::data_path("mortgage.csv"),
                                               io::AggregateOptions{.share_tolerance = 5e-3});
  const auto rec = compare_estimators(data.model, *data.test);
  const auto text = io::write_report(rec);
  CHECK(text.find("KL distance") != std::string::npos);
  CHECK(text.find("All") != std::string::npos);

  const auto csv = io::write_report(rec, {.format = io::Format::Csv});
  CHECK(csv.find("More than 100%,15.0,35.0,34.3") != std::string::npos);
  CHECK(csv.find("All,2.8,7.2,7.0") != std::string::npos);
  const auto precise = io::write_report(rec, {.format = io::Format::Csv, .precision = 3});
  CHECK(precise.find("All,2.844,") != std::string::npos);

  const auto json = nlohmann::json::parse(io::write_report(rec, {.format = io::Format::Json}));
  CHECK(json["schema_version"] == "1");
  const double ml = json["estimators"][2]["weights"][0].get<double>();
  CHECK(ml == rec.estimators[2].weights[0]);

  ComparisonRecord empty;
  const auto header = io::write_report(empty, {.format = io::Format::Csv});
  CHECK(std::count(header.begin(), header.end(), '\n') == 1);
}
