// Moment-based prevalence estimators: the covariate-shift probability
// average, the Scaled Probability Average (mixing-matrix and two-class R^2
// forms), posterior band rates under shifted priors, and the interleaving
// diagnostic relating covariate-shift and ML estimates.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mixfit/types.hpp"

namespace mixfit {

/// m_ij = E0[ P0[A_i | H] | A_j ]. Column-stochastic for consistent models.
struct MixingMatrix {
  Eigen::MatrixXd entries;

  /// max_j |sum_i m_ij - 1|.
  double column_sum_error() const;
};

/// v_i = sum_bins test(bin) P0[A_i | bin].
std::vector<double> probability_average(const BinnedDistribution& test,
                                        const TrainingModel& model);

MixingMatrix mixing_matrix(const TrainingModel& model);

/// Solves M q = v with the last equation replaced by sum(q) = 1 (equivalent
/// for column-stochastic M). Solutions outside the simplex are projected onto
/// it and flagged with boundary_alarm.
FitResult scaled_probability_average(const BinnedDistribution& test, const TrainingModel& model);

/// var0(P0[A_1|H]) / (P0[A_1] (1 - P0[A_1])). Two classes only.
double r_squared(const TrainingModel& model);

/// q_1 = (v_1 - P0[A_1] (1 - R^2)) / R^2, clamped to [0, 1] with alarm.
FitResult scaled_probability_average_binary(const BinnedDistribution& test,
                                            const TrainingModel& model);

/// P1[A_i | bin] = p_i X_i / sum_j p_j X_j for every bin; rows sum to one.
std::vector<std::vector<double>> band_rates_under_prior_shift(const TrainingModel& model,
                                                              const SimplexWeights& new_priors);

/// True iff the covariate-shift estimate lies in the closed interval spanned
/// by the training prior and the ML estimate.
bool interleaving_check(double training_prior_1, double covariate_estimate_1,
                        double ml_estimate_1);

/// Euclidean projection onto the probability simplex.
std::vector<double> project_to_simplex(std::span<const double> v);

}  // namespace mixfit
