// Maximum-likelihood / minimum-KL weight estimation for simple finite
// mixtures: solvers for the stationarity system G = 0 on the open simplex
// and the two-class existence test.

#pragma once

#include <optional>

#include "mixfit/kernel.hpp"
#include "mixfit/types.hpp"

namespace mixfit {

enum class SolverMethod { EM, Newton, GaussSeidel, Auto };

const char* to_string(SolverMethod method);
SolverMethod parse_solver_method(const std::string& name);

struct SolverConfig {
  SolverMethod method = SolverMethod::Auto;
  int max_iterations = 10000;
  /// Sup-norm of successive weight vectors.
  double weight_tolerance = 1e-12;
  double gradient_tolerance = kStationarityTolerance;
  /// Any final weight below this raises the boundary alarm.
  double boundary_epsilon = 1e-9;
  /// Defaults to uniform 1/k.
  std::optional<SimplexWeights> initial_weights;
  /// Record objective_F after every iteration into FitResult::objective_trace.
  bool record_trace = false;

  void validate() const;
};

struct BinaryExistenceCheck {
  bool exists = false;
  double mean_X = 0.0;
  /// +inf when some bin with test mass has X = 0.
  double mean_inv_X = 0.0;
};

/// Two-class test for an interior solution: E[X] > 1 and E[1/X] > 1 under
/// the test distribution (and X not almost surely 1).
BinaryExistenceCheck existence_check_binary(const BinnedDistribution& test,
                                            const DensityRatioProfile& ratios);

FitResult solve_binary(const BinnedDistribution& test, const DensityRatioProfile& ratios,
                       const SolverConfig& config = {});

FitResult em_solve(const BinnedDistribution& test, const DensityRatioProfile& ratios,
                   const SolverConfig& config = {});

FitResult newton_solve(const BinnedDistribution& test, const DensityRatioProfile& ratios,
                       const SolverConfig& config = {});

FitResult gauss_seidel_solve(const BinnedDistribution& test, const DensityRatioProfile& ratios,
                             const SolverConfig& config = {});

/// Driver. Auto picks the binary root finder for k = 2 and Newton for k >= 3,
/// falling back to Gauss-Seidel on a singular Jacobian and to EM when an
/// iterative solver ends on the boundary. Exact-fit components are attached
/// whenever an interior stationary point was reached.
FitResult fit(const BinnedDistribution& test, const DensityRatioProfile& ratios,
              const SolverConfig& config = {});

/// Coordinate rescale used by the Gauss-Seidel sweep: q_i <- new_value and
/// q_j <- q_j (1 - new_value) / (1 - q_i) for j != i.
std::vector<double> rescale_coordinate(std::span<const double> q, std::size_t i,
                                       double new_value);

inline constexpr const char* kBoundaryAlarmAdvice =
    "no interior solution found; consider reducing the number of modelled classes";

}  // namespace mixfit
