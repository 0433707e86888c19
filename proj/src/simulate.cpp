#include "mixfit/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "detail.hpp"
#include "mixfit/kernel.hpp"
#include "mixfit/moments.hpp"

namespace mixfit {

const char* to_string(ShiftKind kind) {
  return kind == ShiftKind::PriorProbability ? "prior" : "covariate";
}

ShiftKind parse_shift_kind(const std::string& name) {
  if (name == "prior") return ShiftKind::PriorProbability;
  if (name == "covariate") return ShiftKind::Covariate;
  throw Error(ErrorCode::InvalidArgument, "unknown shift kind '" + name + "'");
}

ShiftScenario make_prior_shift(const TrainingModel& model, const SimplexWeights& new_priors,
                               std::uint64_t seed) {
  if (new_priors.size() != model.class_count())
    throw Error(ErrorCode::InvalidArgument, "new priors: wrong number of classes");
  const auto test = mixture_density(new_priors, model.class_densities());
  return {model, test, new_priors, ShiftKind::PriorProbability, seed};
}

ShiftScenario make_covariate_shift(const TrainingModel& model,
                                   const BinnedDistribution& new_marginal, std::uint64_t seed) {
  auto v = probability_average(new_marginal, model);
  return {model, new_marginal, SimplexWeights::normalized(std::move(v)), ShiftKind::Covariate,
          seed};
}

SimplexWeights brute_force_oracle(const BinnedDistribution& test,
                                  const DensityRatioProfile& ratios, double grid_step) {
  const std::size_t k = ratios.class_count();
  if (k > 4) throw Error(ErrorCode::InvalidArgument, "grid oracle supports at most 4 classes");
  if (!(grid_step > 0.0 && grid_step <= 0.1))
    throw Error(ErrorCode::InvalidArgument, "grid step must lie in (0, 0.1]");
  const auto g = test.aligned_to(ratios.support());
  const auto n = static_cast<int>(std::lround(1.0 / grid_step));
  const double h = 1.0 / n;

  std::vector<double> best;
  double best_f = -std::numeric_limits<double>::infinity();
  std::vector<double> p(k);
  auto consider = [&] {
    const double f = detail::objective_raw(g, ratios, p);
    if (f > best_f) {
      best_f = f;
      best = p;
    }
  };

  // Coarse pass: compositions of n into k positive parts.
  std::function<void(std::size_t, int)> coarse = [&](std::size_t c, int left) {
    if (c + 1 == k) {
      p[c] = left * h;
      consider();
      return;
    }
    for (int m = 1; m <= left - static_cast<int>(k - c - 1); ++m) {
      p[c] = m * h;
      coarse(c + 1, left - m);
    }
  };
  coarse(0, n);

  // Fine pass over the first k-1 coordinates around the coarse optimum.
  const std::vector<double> centre = best;
  const double fine = h / 10.0;
  std::function<void(std::size_t, double)> refine = [&](std::size_t c, double used) {
    if (c + 1 == k) {
      p[c] = 1.0 - used;
      if (p[c] > 0.0) consider();
      return;
    }
    for (int s = -10; s <= 10; ++s) {
      const double v = centre[c] + s * fine;
      if (v <= 0.0 || used + v >= 1.0) continue;
      p[c] = v;
      refine(c + 1, used + v);
    }
  };
  refine(0, 0.0);
  return SimplexWeights::normalized(best);
}

bool ComparisonRecord::any_boundary_alarm() const {
  return std::any_of(estimators.begin(), estimators.end(),
                     [](const EstimatorOutcome& e) { return e.boundary_alarm; });
}

namespace {

double sup_error(std::span<const double> a, const SimplexWeights& truth) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - truth[i]));
  return m;
}

void attach_bands(EstimatorOutcome& out, const TrainingModel& model) {
  try {
    out.band_rates = band_rates_under_prior_shift(model, SimplexWeights::normalized(out.weights));
  } catch (const Error& e) {
    out.notes.emplace_back(std::string("band rates unavailable: ") + e.what());
  }
}

}  // namespace

ComparisonRecord compare_estimators(const TrainingModel& model, const BinnedDistribution& test,
                                    const SolverConfig& config) {
  ComparisonRecord rec;
  rec.class_labels = model.class_labels();
  rec.support = model.support();
  rec.training_marginal = model.feature_marginal();
  rec.training_priors = model.priors();
  rec.test_weights = test.aligned_to(model.support());
  rec.warnings = model.warnings();

  EstimatorOutcome cov;
  cov.name = "covariate-shift";
  cov.weights = probability_average(test, model);
  cov.band_rates = model.conditionals();
  rec.estimators.push_back(std::move(cov));

  EstimatorOutcome spa;
  spa.name = "scaled-probability-average";
  try {
    const FitResult r = scaled_probability_average(test, model);
    spa.weights = r.weights.values();
    spa.boundary_alarm = r.boundary_alarm;
    spa.notes = r.notes;
    attach_bands(spa, model);
  } catch (const Error& e) {
    spa.failure = e.what();
  }
  rec.estimators.push_back(std::move(spa));

  EstimatorOutcome ml;
  ml.name = "ml-kl-distance";
  try {
    const auto ratios = build_ratios_from_conditionals(model);
    FitResult r = fit(test, ratios, config);
    ml.weights = r.weights.values();
    ml.boundary_alarm = r.boundary_alarm;
    ml.notes = r.notes;
    attach_bands(ml, model);
    rec.ml_fit = std::move(r);
  } catch (const Error& e) {
    ml.failure = e.what();
  }
  rec.estimators.push_back(std::move(ml));

  if (model.class_count() == 2) {
    try {
      rec.r_squared = r_squared(model);
    } catch (const Error&) {
    }
    const auto& m = rec.estimators[2];
    if (!m.failure && !m.boundary_alarm)
      rec.interleaving =
          interleaving_check(model.priors()[0], rec.estimators[0].weights[0], m.weights[0]);
  }
  return rec;
}

ComparisonRecord compare_estimators(const ShiftScenario& scenario, const SolverConfig& config) {
  ComparisonRecord rec = compare_estimators(scenario.model, scenario.test, config);
  rec.truth = scenario.truth;
  if (scenario.truth) {
    for (auto& e : rec.estimators)
      if (!e.failure) e.error = sup_error(e.weights, *scenario.truth);
  }
  return rec;
}

std::vector<double> sample_dirichlet(std::mt19937_64& rng, std::size_t n, double alpha) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> x(n);
  double s = 0.0;
  do {
    s = 0.0;
    for (double& v : x) {
      v = gamma(rng);
      s += v;
    }
  } while (!(s > 0.0));
  for (double& v : x) v /= s;
  return x;
}

std::vector<std::string> bin_labels(std::size_t bins) {
  std::vector<std::string> out;
  out.reserve(bins);
  for (std::size_t b = 0; b < bins; ++b) out.push_back("b" + std::to_string(b));
  return out;
}

std::vector<BinnedDistribution> random_components(std::mt19937_64& rng, std::size_t k,
                                                  std::size_t bins) {
  if (k < 2 || bins < k)
    throw Error(ErrorCode::InvalidArgument, "random components need 2 <= k <= bins");
  const auto labels = bin_labels(bins);
  for (;;) {
    std::vector<BinnedDistribution> comps;
    bool positive = true;
    for (std::size_t i = 0; i < k; ++i) {
      auto w = sample_dirichlet(rng, bins);
      positive = positive && std::all_of(w.begin(), w.end(), [](double v) { return v > 1e-300; });
      comps.emplace_back(labels, std::move(w), 1e-9);
    }
    if (!positive) continue;
    if (build_ratios_from_densities(comps).independent()) return comps;
  }
}

SimplexWeights random_interior_weights(std::mt19937_64& rng, std::size_t k, double min_weight) {
  if (min_weight * static_cast<double>(k) >= 1.0)
    throw Error(ErrorCode::InvalidArgument, "min_weight too large for k");
  // Dirichlet draw mapped into the sub-simplex {q_i >= min_weight}.
  auto w = sample_dirichlet(rng, k);
  const double free_mass = 1.0 - min_weight * static_cast<double>(k);
  for (double& v : w) v = min_weight + free_mass * v;
  return SimplexWeights::normalized(std::move(w));
}

TrainingModel random_model(std::mt19937_64& rng, std::size_t k, std::size_t bins,
                           double min_prior) {
  const auto comps = random_components(rng, k, bins);
  const auto priors = random_interior_weights(rng, k, min_prior);
  const auto labels = bin_labels(bins);
  std::vector<double> marg(bins, 0.0);
  std::vector<std::vector<double>> cond(bins, std::vector<double>(k));
  for (std::size_t b = 0; b < bins; ++b) {
    for (std::size_t i = 0; i < k; ++i) marg[b] += priors[i] * comps[i][b];
    for (std::size_t i = 0; i < k; ++i) cond[b][i] = priors[i] * comps[i][b] / marg[b];
  }
  std::vector<std::string> classes;
  for (std::size_t i = 0; i < k; ++i) classes.push_back("c" + std::to_string(i + 1));
  return TrainingModel(labels, classes, priors.values(), std::move(cond), std::move(marg),
                       ModelChecks{.marginal_tolerance = 1e-12, .consistency_tolerance = 1e-12});
}

ShiftScenario random_scenario(ShiftKind kind, std::uint64_t seed, std::size_t k,
                              std::size_t bins) {
  std::mt19937_64 rng(seed);
  const TrainingModel model = random_model(rng, k, bins);
  if (kind == ShiftKind::PriorProbability)
    return make_prior_shift(model, random_interior_weights(rng, k), seed);
  BinnedDistribution marginal(model.support(), sample_dirichlet(rng, bins), 1e-9);
  return make_covariate_shift(model, marginal, seed);
}

}  // namespace mixfit
