// Synthetic dataset-shift scenarios, a grid-search oracle for the ML
// objective, and the side-by-side estimator comparison.

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mixfit/solvers.hpp"
#include "mixfit/types.hpp"

namespace mixfit {

enum class ShiftKind { PriorProbability, Covariate };

const char* to_string(ShiftKind kind);
ShiftKind parse_shift_kind(const std::string& name);

struct ShiftScenario {
  TrainingModel model;
  BinnedDistribution test;
  /// Ground-truth test priors.
  std::optional<SimplexWeights> truth;
  ShiftKind shift_kind = ShiftKind::PriorProbability;
  std::uint64_t seed = 0;
};

/// Test distribution = sum_i q_i P0[. | A_i] for q = new_priors.
ShiftScenario make_prior_shift(const TrainingModel& model, const SimplexWeights& new_priors,
                               std::uint64_t seed = 0);

/// Test distribution = new_marginal with unchanged conditionals; the truth
/// is the probability average under the new marginal.
ShiftScenario make_covariate_shift(const TrainingModel& model,
                                   const BinnedDistribution& new_marginal,
                                   std::uint64_t seed = 0);

/// Argmax of objective_F over the interior lattice of the simplex with the
/// given step, followed by one 10x finer pass around the best point. k <= 4.
SimplexWeights brute_force_oracle(const BinnedDistribution& test,
                                  const DensityRatioProfile& ratios, double grid_step);

struct EstimatorOutcome {
  std::string name;
  std::vector<double> weights;
  bool boundary_alarm = false;
  /// Sup-norm distance to the scenario truth, when known.
  std::optional<double> error;
  /// Per-bin posterior class probabilities implied by the estimate.
  std::vector<std::vector<double>> band_rates;
  std::vector<std::string> notes;
  std::optional<std::string> failure;
};

struct ComparisonRecord {
  std::vector<std::string> class_labels;
  std::vector<std::string> support;
  std::vector<double> training_marginal;
  std::vector<double> training_priors;
  std::vector<double> test_weights;
  std::optional<SimplexWeights> truth;
  /// Covariate shift, Scaled Probability Average, ML (in that order).
  std::vector<EstimatorOutcome> estimators;
  /// Two classes only.
  std::optional<double> r_squared;
  std::optional<bool> interleaving;
  std::optional<FitResult> ml_fit;
  std::vector<std::string> warnings;

  bool any_boundary_alarm() const;
};

ComparisonRecord compare_estimators(const ShiftScenario& scenario, const SolverConfig& config = {});
ComparisonRecord compare_estimators(const TrainingModel& model, const BinnedDistribution& test,
                                    const SolverConfig& config = {});

// Random instance generation. Component densities are symmetric Dirichlet(1)
// draws; draws with linearly dependent ratios are rejected.

std::vector<double> sample_dirichlet(std::mt19937_64& rng, std::size_t n, double alpha = 1.0);

std::vector<std::string> bin_labels(std::size_t bins);

/// k component densities over `bins` bins with independent ratios.
std::vector<BinnedDistribution> random_components(std::mt19937_64& rng, std::size_t k,
                                                  std::size_t bins);

/// Consistent training model built from Dirichlet class densities and priors
/// (each prior at least `min_prior`).
TrainingModel random_model(std::mt19937_64& rng, std::size_t k, std::size_t bins,
                           double min_prior = 0.05);

/// Interior simplex point with every coordinate at least `min_weight`.
SimplexWeights random_interior_weights(std::mt19937_64& rng, std::size_t k,
                                       double min_weight = 0.05);

/// Scenario generator used by the CLI `simulate` command.
ShiftScenario random_scenario(ShiftKind kind, std::uint64_t seed, std::size_t k = 2,
                              std::size_t bins = 8);

}  // namespace mixfit
