#include "mixfit/cost.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "detail.hpp"

namespace mixfit {

CostProfile::CostProfile(std::vector<std::string> support, std::vector<double> cost)
    : support_(std::move(support)), cost_(std::move(cost)) {
  if (support_.size() != cost_.size())
    throw Error(ErrorCode::InvalidArgument, "cost profile: support and costs differ in length");
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (!seen.insert(support_[i]).second)
      throw Error(ErrorCode::InvalidArgument, "cost profile: duplicate bin '" + support_[i] + "'");
    if (!std::isfinite(cost_[i]))
      throw Error(ErrorCode::InvalidArgument,
                  "cost profile: non-finite cost in bin '" + support_[i] + "'");
  }
}

std::vector<double> CostProfile::aligned_to(const std::vector<std::string>& support) const {
  std::unordered_map<std::string, double> by_label;
  for (std::size_t i = 0; i < support_.size(); ++i) by_label.emplace(support_[i], cost_[i]);
  std::vector<double> out(support.size(), 0.0);
  for (std::size_t i = 0; i < support.size(); ++i) {
    auto it = by_label.find(support[i]);
    if (it != by_label.end()) out[i] = it->second;
  }
  for (const auto& label : support_) {
    if (std::find(support.begin(), support.end(), label) == support.end())
      throw Error(ErrorCode::SupportMismatch,
                  "cost profile bin '" + label + "' is not part of the test support");
  }
  return out;
}

namespace {

// Every bin carrying test mass needs a cost.
std::vector<double> costs_for(const BinnedDistribution& test, const CostProfile& costs,
                              const std::vector<std::string>& support) {
  const auto g = test.aligned_to(support);
  std::unordered_set<std::string> known(costs.support().begin(), costs.support().end());
  for (std::size_t b = 0; b < support.size(); ++b) {
    if (g[b] > 0.0 && !known.contains(support[b]))
      throw Error(ErrorCode::SupportMismatch, "no cost given for bin '" + support[b] + "'");
  }
  return costs.aligned_to(support);
}

}  // namespace

double expected_total_cost(const BinnedDistribution& test, const CostProfile& costs) {
  const auto c = costs_for(test, costs, test.support());
  double total = 0.0;
  for (std::size_t b = 0; b < c.size(); ++b) total += test[b] * c[b];
  return total;
}

std::vector<double> cost_total_covariate(const BinnedDistribution& test, const CostProfile& costs,
                                         const TrainingModel& model) {
  const auto g = test.aligned_to(model.support());
  const auto c = costs_for(test, costs, model.support());
  std::vector<double> out(model.class_count(), 0.0);
  for (std::size_t b = 0; b < g.size(); ++b)
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] += g[b] * c[b] * model.conditionals()[b][i];
  return out;
}

std::vector<double> cost_total_density_ratio(const BinnedDistribution& test,
                                             const CostProfile& costs,
                                             const DensityRatioProfile& ratios,
                                             const SimplexWeights& weights) {
  if (weights.size() != ratios.class_count())
    throw Error(ErrorCode::InvalidArgument, "weights length differs from class count");
  if (!weights.interior())
    throw Error(ErrorCode::DomainError,
                "density-ratio cost totals need interior weights from a successful ML fit");
  const auto g = test.aligned_to(ratios.support());
  const auto c = costs_for(test, costs, ratios.support());
  const auto d = detail::denominators(ratios, weights.values());
  std::vector<double> out(ratios.class_count(), 0.0);
  for (std::size_t b = 0; b < g.size(); ++b) {
    if (g[b] == 0.0) continue;
    const double w = g[b] * c[b] / d[b];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += weights[i] * w * ratios.ratio(b, i);
  }
  return out;
}

}  // namespace mixfit
