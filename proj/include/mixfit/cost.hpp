// Per-class expected cost totals on an unlabeled test set.

#pragma once

#include <string>
#include <vector>

#include "mixfit/types.hpp"

namespace mixfit {

/// Per-bin value of a cost attribute that is a function of the features.
class CostProfile {
 public:
  CostProfile() = default;
  CostProfile(std::vector<std::string> support, std::vector<double> cost);

  const std::vector<std::string>& support() const noexcept { return support_; }
  const std::vector<double>& cost() const noexcept { return cost_; }

  /// Costs re-ordered to follow `support`; bins missing here get cost 0.
  std::vector<double> aligned_to(const std::vector<std::string>& support) const;

 private:
  std::vector<std::string> support_;
  std::vector<double> cost_;
};

/// E_i = sum_bins test * cost * P0[A_i | bin], assuming covariate shift.
std::vector<double> cost_total_covariate(const BinnedDistribution& test, const CostProfile& costs,
                                         const TrainingModel& model);

/// E_i = p_i sum_bins test * cost * X_i / sum_j p_j X_j, assuming the density
/// ratios carry over to the test set. `weights` must be interior.
std::vector<double> cost_total_density_ratio(const BinnedDistribution& test,
                                             const CostProfile& costs,
                                             const DensityRatioProfile& ratios,
                                             const SimplexWeights& weights);

/// sum_bins test * cost.
double expected_total_cost(const BinnedDistribution& test, const CostProfile& costs);

}  // namespace mixfit
