// Mathematical kernel for simple finite mixtures: density ratios, mixture
// evaluation, the log-likelihood objective with its gradient and Jacobian,
// exact-fit component reconstruction and KL divergence.
//
// Weights are always full length-k vectors in class order. Gradients and
// Jacobians are taken with respect to the k-1 non-reference weights, in the
// order given by DensityRatioProfile::free_classes(); the reference weight is
// implied by the simplex constraint.

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "mixfit/types.hpp"

namespace mixfit {

/// X_i = (P0[A_i|H] / P0[A_ref|H]) * (P0[A_ref] / P0[A_i]). The reference
/// class defaults to the last class.
DensityRatioProfile build_ratios_from_conditionals(const TrainingModel& model,
                                                   std::optional<std::size_t> reference = {});

DensityRatioProfile build_ratios_from_densities(const std::vector<BinnedDistribution>& components,
                                                std::optional<std::size_t> reference = {});

BinnedDistribution mixture_density(const SimplexWeights& weights,
                                   const std::vector<BinnedDistribution>& components);

/// Rank test of {X_i - 1} weighted by `test`; singular values below
/// 1e-10 of the largest count as zero.
bool ratios_independent(const DensityRatioProfile& ratios, const BinnedDistribution& test);

/// True when X_i == 1 for every class on every bin carrying test mass.
bool ratios_uninformative(const DensityRatioProfile& ratios, const BinnedDistribution& test);

double objective_F(const BinnedDistribution& test, const DensityRatioProfile& ratios,
                   const SimplexWeights& weights);

Eigen::VectorXd gradient_G(const BinnedDistribution& test, const DensityRatioProfile& ratios,
                           const SimplexWeights& weights);

Eigen::MatrixXd jacobian_J(const BinnedDistribution& test, const DensityRatioProfile& ratios,
                           const SimplexWeights& weights);

/// Components g_i = g X_i / (sum_j p_j X_j) of the exact fit. Requires the
/// gradient sup-norm at `weights` to be at most `gradient_tolerance`.
std::vector<BinnedDistribution> exact_fit_components(
    const BinnedDistribution& test, const DensityRatioProfile& ratios,
    const SimplexWeights& weights, double gradient_tolerance = kStationarityTolerance);

/// Same reconstruction without the stationarity guard or normalization
/// check; the returned vectors are raw per-bin values.
std::vector<std::vector<double>> reconstruct_components_raw(const BinnedDistribution& test,
                                                            const DensityRatioProfile& ratios,
                                                            const SimplexWeights& weights);

struct KlResult {
  double value = 0.0;
  /// False when g puts mass where h has none; value is then +inf.
  bool absolutely_continuous = true;
};

KlResult kl_divergence(const BinnedDistribution& g, const BinnedDistribution& h);

}  // namespace mixfit
