#include <random>

#include "doctest.h"
#include "mixfit/cost.hpp"
#include "mixfit/kernel.hpp"
#include "mixfit/moments.hpp"
#include "mixfit/solvers.hpp"
#include "support.hpp"

using namespace mixfit;
using doctest::Approx;

TEST_CASE("covariate-shift cost totals") {
  const auto m = fixtures::fix_a();
  const auto g = fixtures::on_ab(0.5);
  const auto e = cost_total_covariate(g, CostProfile({"a", "b"}, {10, 20}), m);
  CHECK(e[0] == Approx(0.5 * 10 * 0.8 + 0.5 * 20 * 0.2).epsilon(1e-14));
  CHECK(e[0] + e[1] == Approx(15.0).epsilon(1e-14));

  const auto unit = cost_total_covariate(g, CostProfile({"a", "b"}, {1, 1}), m);
  CHECK(fixtures::sup_diff(unit, probability_average(g, m)) == 0.0);
  const auto none = cost_total_covariate(g, CostProfile({"a", "b"}, {0, 0}), m);
  CHECK(none == std::vector<double>{0.0, 0.0});

  CHECK_THROWS_AS(cost_total_covariate(g, CostProfile({"a"}, {1}), m), Error);
}

TEST_CASE("density-ratio cost totals") {
  const auto r = build_ratios_from_densities(fixtures::fix_a_components());
  const auto g = fixtures::on_ab(0.62);
  const SimplexWeights p({0.7, 0.3});
  const CostProfile c({"a", "b"}, {10, 20});
  const auto e = cost_total_density_ratio(g, c, r, p);
  const double e1 = 0.7 * (0.62 * 10 * 4 / (1 + 0.7 * 3) + 0.38 * 20 * 0.25 / (1 + 0.7 * -0.75));
  CHECK(e[0] == Approx(e1).epsilon(1e-14));
  // Generative check: q_1 sum_b f_1 cost.
  CHECK(e[0] == Approx(0.7 * (0.8 * 10 + 0.2 * 20)).epsilon(1e-12));
  CHECK(e[1] == Approx(0.3 * (0.2 * 10 + 0.8 * 20)).epsilon(1e-12));
  CHECK(e[0] + e[1] == Approx(expected_total_cost(g, c)).epsilon(1e-14));

  const auto unit = cost_total_density_ratio(g, CostProfile({"a", "b"}, {1, 1}), r, p);
  CHECK(fixtures::sup_diff(unit, p.values()) < 1e-14);
  const auto three = cost_total_density_ratio(g, CostProfile({"a", "b"}, {3, 3}), r, p);
  CHECK(three[0] == Approx(2.1).epsilon(1e-14));

  CHECK_THROWS_AS(cost_total_density_ratio(g, c, r, SimplexWeights({1.0, 0.0})), Error);
}

TEST_CASE("cost decomposition and generative consistency") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int t = 0; t < 40; ++t) {
    const std::size_t k = 2 + t % 3;
    const auto model = random_model(rng, k, 6 + t % 6);
    const auto truth = random_interior_weights(rng, k);
    const auto s = make_prior_shift(model, truth);
    std::vector<double> cost(model.bin_count());
    for (double& v : cost) v = u(rng);
    const CostProfile c(model.support(), cost);
    const double total = expected_total_cost(s.test, c);

    const auto cov = cost_total_covariate(s.test, c, model);
    double sc = 0.0;
    for (double v : cov) {
      sc += v;
      CHECK(v >= 0.0);
    }
    CHECK(std::abs(sc - total) <= 1e-12 * std::max(1.0, total));

    const auto r = build_ratios_from_conditionals(model);
    const auto w = fit(s.test, r).weights;
    const auto dr = cost_total_density_ratio(s.test, c, r, w);
    double sd = 0.0;
    for (double v : dr) sd += v;
    CHECK(std::abs(sd - total) <= 1e-12 * std::max(1.0, total));

    const auto dens = model.class_densities();
    for (std::size_t i = 0; i < k; ++i) {
      double gen = 0.0;
      for (std::size_t b = 0; b < model.bin_count(); ++b) gen += dens[i][b] * cost[b];
      CHECK(std::abs(dr[i] - truth[i] * gen) <= 1e-10 * std::max(1.0, total));
    }
  }
}
