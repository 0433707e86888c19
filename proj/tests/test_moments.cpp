#include <cmath>
#include <random>

#include "doctest.h"
#include "mixfit/io.hpp"
#include "mixfit/kernel.hpp"
#include "mixfit/moments.hpp"
#include "support.hpp"

using namespace mixfit;
using doctest::Approx;

namespace {

io::AggregateData mortgage() {
  return io::parse_aggregate_report(fixtures::data_path("mortgage.csv"),
                                    io::AggregateOptions{.share_tolerance = 5e-3});
}

TrainingModel perfect() {
  return {{"a", "b", "c"}, {"1", "2"}, {0.3, 0.7}, {{1, 0}, {0, 1}, {0, 1}}, {0.3, 0.3, 0.4}};
}

TrainingModel flat() {
  return {{"a", "b", "c"}, {"1", "2"}, {0.3, 0.7}, {{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}}, {0.2, 0.3, 0.5}};
}

}  // namespace

TEST_CASE("probability average") {
  const auto m = fixtures::fix_a();
  const auto v = probability_average(m.marginal_distribution(), m);
  CHECK(v[0] == Approx(0.5));

  const auto data = mortgage();
  const auto golden = fixtures::golden("mortgage.json");
  const auto all = probability_average(*data.test, data.model);
  CHECK(std::abs(all[0] - golden["covariate_shift"].get<double>()) < 1e-12);
  CHECK(all[0] * 100 == Approx(2.8).epsilon(0.02));

  const BinnedDistribution top(data.model.support(), {1, 0, 0, 0, 0});
  CHECK(probability_average(top, data.model)[0] == Approx(0.15).epsilon(1e-14));

  const BinnedDistribution wrong({"p", "q"}, {0.5, 0.5});
  CHECK_THROWS_AS(probability_average(wrong, m), Error);
}

TEST_CASE("mixing matrix") {
  const auto a = mixing_matrix(fixtures::fix_a());
  CHECK(a.entries(0, 0) == Approx(0.68).epsilon(1e-14));
  CHECK(a.entries(0, 1) == Approx(0.32).epsilon(1e-14));
  CHECK(a.entries(1, 0) == Approx(0.32).epsilon(1e-14));
  CHECK(a.entries(1, 1) == Approx(0.68).epsilon(1e-14));

  CHECK(mixing_matrix(perfect()).entries.isApprox(Eigen::Matrix2d::Identity(), 1e-14));
  const auto z = mixing_matrix(flat());
  CHECK(z.entries(0, 0) == Approx(0.3));
  CHECK(z.entries(0, 1) == Approx(0.3));
  CHECK(z.entries(1, 1) == Approx(0.7));

  std::mt19937_64 rng(1);
  for (int t = 0; t < 30; ++t) {
    const auto m = mixing_matrix(random_model(rng, 2 + t % 4, 5 + t % 6));
    CHECK(m.column_sum_error() < 1e-12);
    CHECK(m.entries.minCoeff() >= 0.0);
  }
}

TEST_CASE("scaled probability average") {
  const auto data = mortgage();
  const auto golden = fixtures::golden("mortgage.json");
  const auto q = scaled_probability_average(*data.test, data.model);
  CHECK(q.method == Method::ClosedForm);
  CHECK(std::abs(q.weights[0] - golden["scaled_probability_average"].get<double>()) < 1e-10);
  CHECK(q.condition_number.has_value());

  const auto p = perfect();
  const BinnedDistribution g(p.support(), {0.5, 0.2, 0.3});
  CHECK(scaled_probability_average(g, p).weights[0] == Approx(0.5).epsilon(1e-14));

  CHECK_THROWS_AS(scaled_probability_average(flat().marginal_distribution(), flat()), Error);

  // Test mass concentrated where class 1 is rarest pushes the solve outside the simplex.
  const auto m = fixtures::fix_a();
  const auto out = scaled_probability_average(BinnedDistribution({"a", "b"}, {0.0, 1.0}), m);
  CHECK(out.boundary_alarm);
  CHECK(out.weights[0] == 0.0);
}

TEST_CASE("R squared") {
  const auto golden = fixtures::golden("mortgage.json");
  const double r2 = r_squared(mortgage().model);
  CHECK(std::abs(r2 - golden["r_squared"].get<double>()) < 1e-12);
  CHECK(r2 * 100 == Approx(7.7).epsilon(0.01));
  CHECK(r_squared(flat()) == Approx(0.0));
  CHECK(r_squared(perfect()) == Approx(1.0).epsilon(1e-14));
  std::mt19937_64 rng(2);
  CHECK_THROWS_AS(r_squared(random_model(rng, 3, 5)), Error);
}

TEST_CASE("binary scaled probability average") {
  const auto m = fixtures::fix_a();
  const double r2 = r_squared(m);
  CHECK(scaled_probability_average_binary(m.marginal_distribution(), m).weights[0] ==
        Approx(0.5).epsilon(1e-14));

  // v1 = prior (1 - R^2) maps to the boundary q1 = 0. Build a test with that average.
  const double v1 = 0.5 * (1 - r2);
  const double a = (v1 - 0.2) / 0.6;  // P(a) such that 0.8 a + 0.2 (1 - a) = v1
  const auto zero = scaled_probability_average_binary(BinnedDistribution({"a", "b"}, {a, 1 - a}), m);
  CHECK(std::abs(zero.weights[0]) < 1e-14);

  const auto data = mortgage();
  const auto b = scaled_probability_average_binary(*data.test, data.model);
  CHECK(b.weights[0] > 0.072);
  CHECK(b.weights[0] < 0.073);

  CHECK_THROWS_AS(scaled_probability_average_binary(flat().marginal_distribution(), flat()), Error);

  std::mt19937_64 rng(8);
  for (int t = 0; t < 40; ++t) {
    const auto model = random_model(rng, 2, 4 + t % 8);
    const BinnedDistribution g(model.support(), sample_dirichlet(rng, model.bin_count()), 1e-9);
    const auto mat = scaled_probability_average(g, model);
    const auto bin = scaled_probability_average_binary(g, model);
    CHECK(std::abs(mat.weights[0] - bin.weights[0]) < 1e-12);
    CHECK(mat.boundary_alarm == bin.boundary_alarm);
  }
}

TEST_CASE("no-shift fixed point") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 20; ++t) {
    const auto model = random_model(rng, 2 + t % 3, 6 + t % 4);
    const auto g = model.marginal_distribution();
    CHECK(fixtures::sup_diff(probability_average(g, model), model.priors()) < 1e-12);
    CHECK(fixtures::sup_diff(scaled_probability_average(g, model).weights.values(), model.priors()) < 1e-10);
    if (model.class_count() == 2)
      CHECK(std::abs(scaled_probability_average_binary(g, model).weights[0] - model.priors()[0]) < 1e-10);
  }
}

TEST_CASE("band rates under prior shift") {
  const auto m = fixtures::fix_a();
  const auto same = band_rates_under_prior_shift(m, SimplexWeights(m.priors()));
  CHECK(same[0][0] == Approx(0.8).epsilon(1e-14));
  CHECK(same[1][1] == Approx(0.8).epsilon(1e-14));

  const auto data = mortgage();
  const auto golden = fixtures::golden("mortgage.json");
  const double p = golden["ml"].get<double>();
  const auto rates = band_rates_under_prior_shift(data.model, SimplexWeights({p, 1 - p}));
  for (std::size_t b = 0; b < 5; ++b) {
    CHECK(std::abs(rates[b][0] - golden["ml_bands"][b].get<double>()) < 1e-10);
    CHECK(rates[b][0] + rates[b][1] == Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("interleaving check") {
  CHECK(interleaving_check(0.025, 0.028, 0.071));
  CHECK(interleaving_check(0.5, 0.5, 0.5));
  CHECK_FALSE(interleaving_check(0.2, 0.5, 0.3));
  CHECK(interleaving_check(0.3, 0.25, 0.2));
}

TEST_CASE("attenuation law on binary prior shifts") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 40; ++t) {
    const auto model = random_model(rng, 2, 4 + t % 9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double q1 = u(rng);
    const auto s = make_prior_shift(model, SimplexWeights({q1, 1 - q1}));
    const double v1 = probability_average(s.test, model)[0];
    const double p1 = model.priors()[0];
    CHECK(std::abs((v1 - p1) - r_squared(model) * (q1 - p1)) < 1e-10);
  }
}

TEST_CASE("projection onto the simplex") {
  const auto p = project_to_simplex(std::vector<double>{1.2, -0.2});
  CHECK(p[0] == Approx(1.0));
  CHECK(p[1] == Approx(0.0));
  const auto q = project_to_simplex(std::vector<double>{0.5, 0.6, -0.1});
  CHECK(q[0] == Approx(0.45));
  CHECK(q[1] == Approx(0.55));
  CHECK(q[2] == 0.0);
}
