#include <random>

#include "doctest.h"
#include "mixfit/io.hpp"
#include "mixfit/kernel.hpp"
#include "mixfit/moments.hpp"
#include "mixfit/simulate.hpp"
#include "support.hpp"

using namespace mixfit;
using doctest::Approx;

TEST_CASE("prior shift scenarios") {
  const auto m = fixtures::fix_a();
  const auto same = make_prior_shift(m, SimplexWeights(m.priors()));
  CHECK(fixtures::sup_diff(same.test.weights(), m.feature_marginal()) < 1e-15);

  const auto s = make_prior_shift(m, SimplexWeights({0.7, 0.3}), 5);
  CHECK(s.test[0] == Approx(0.62).epsilon(1e-14));
  CHECK(s.truth->values() == std::vector<double>{0.7, 0.3});
  CHECK(s.seed == 5);

  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    const auto model = random_model(rng, 2 + t % 3, 5 + t % 5);
    const auto q = random_interior_weights(rng, model.class_count());
    const auto sc = make_prior_shift(model, q);
    const auto dens = model.class_densities();
    for (std::size_t b = 0; b < model.bin_count(); ++b) {
      double v = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) v += q[i] * dens[i][b];
      CHECK(std::abs(v - sc.test[b]) < 1e-15);
    }
  }
}

TEST_CASE("covariate shift scenarios") {
  const auto m = fixtures::fix_a();
  const auto s = make_covariate_shift(m, m.marginal_distribution());
  CHECK(fixtures::sup_diff(s.truth->values(), m.priors()) < 1e-15);
  const auto point = make_covariate_shift(m, BinnedDistribution({"a", "b"}, {1.0, 0.0}));
  CHECK(point.truth->values()[0] == Approx(0.8));

  const auto data = io::parse_aggregate_report(fixtures::data_path("mortgage.csv"),
                                               io::AggregateOptions{.share_tolerance = 5e-3});
  const auto ms = make_covariate_shift(data.model, *data.test);
  CHECK((*ms.truth)[0] * 100 == Approx(2.8).epsilon(0.02));
}

TEST_CASE("grid oracle") {
  const auto r = build_ratios_from_densities(fixtures::fix_a_components());
  CHECK(std::abs(brute_force_oracle(fixtures::on_ab(0.62), r, 1e-3)[0] - 0.7) <= 1e-3);
  CHECK(brute_force_oracle(fixtures::on_ab(0.9), r, 1e-3)[0] >= 1 - 2e-3);

  const auto f = fixtures::three_class_components();
  const auto g = brute_force_oracle(fixtures::mix({0.2, 0.3, 0.5}, f), build_ratios_from_densities(f), 1e-2);
  CHECK(fixtures::sup_diff(g.values(), {0.2, 0.3, 0.5}) <= 1e-2);

  CHECK_THROWS_AS(brute_force_oracle(fixtures::on_ab(0.5), r, 0.5), Error);
  std::mt19937_64 rng(1);
  const auto five = random_components(rng, 5, 8);
  CHECK_THROWS_AS(brute_force_oracle(fixtures::mix({0.2, 0.2, 0.2, 0.2, 0.2}, five),
                                     build_ratios_from_densities(five), 0.1),
                  Error);
}

TEST_CASE("estimator comparison") {
  const auto data = io::parse_aggregate_report(fixtures::data_path("mortgage.csv"),
                                               io::AggregateOptions{.share_tolerance = 5e-3});
  const auto rec = compare_estimators(data.model, *data.test);
  REQUIRE(rec.estimators.size() == 3);
  CHECK(rec.estimators[0].name == "covariate-shift");
  CHECK(rec.estimators[0].weights[0] * 100 == Approx(2.8).epsilon(0.02));
  CHECK(rec.estimators[1].weights[0] * 100 == Approx(7.3).epsilon(0.05));
  CHECK(rec.estimators[2].weights[0] * 100 == Approx(7.1).epsilon(0.05));
  CHECK(rec.interleaving == true);
  CHECK_FALSE(rec.any_boundary_alarm());

  SUBCASE("no shift") {
    std::mt19937_64 rng(3);
    const auto model = random_model(rng, 3, 7);
    const auto r = compare_estimators(make_prior_shift(model, SimplexWeights(model.priors())));
    for (const auto& e : r.estimators) CHECK(*e.error < 1e-10);
  }

  SUBCASE("binary prior shift errors") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 20; ++t) {
      const auto model = random_model(rng, 2, 8);
      const auto q = random_interior_weights(rng, 2);
      const auto r = compare_estimators(make_prior_shift(model, q));
      CHECK(*r.estimators[1].error <= 1e-8);
      CHECK(*r.estimators[2].error <= 1e-8);
      const double expected = (1 - r_squared(model)) * std::abs(q[0] - model.priors()[0]);
      CHECK(std::abs(*r.estimators[0].error - expected) < 1e-12);
    }
  }
}

TEST_CASE("random generation is reproducible") {
  const auto a = random_scenario(ShiftKind::PriorProbability, 7, 3, 9);
  const auto b = random_scenario(ShiftKind::PriorProbability, 7, 3, 9);
  CHECK(a.test.weights() == b.test.weights());
  CHECK(a.truth->values() == b.truth->values());
  CHECK(a.model.class_count() == 3);
  CHECK(a.model.bin_count() == 9);
  CHECK(build_ratios_from_conditionals(a.model).independent());
  const auto c = random_scenario(ShiftKind::PriorProbability, 8, 3, 9);
  CHECK(a.test.weights() != c.test.weights());
  CHECK(parse_shift_kind("covariate") == ShiftKind::Covariate);
  CHECK_THROWS_AS(parse_shift_kind("label"), Error);
}
