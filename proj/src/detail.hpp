// Internal helpers shared by the kernel and the solvers.

#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "mixfit/types.hpp"

namespace mixfit::detail {

bool ratios_full_rank(const DensityRatioProfile& ratios, std::span<const double> measure);

/// sum_c p_c X_c(b) per bin.
std::vector<double> denominators(const DensityRatioProfile& ratios, std::span<const double> p);

/// Objective without the interior precondition; -inf if some bin with mass
/// has a zero denominator.
double objective_raw(std::span<const double> g, const DensityRatioProfile& ratios,
                     std::span<const double> p);

/// Gradient without the interior precondition; may contain non-finite values.
Eigen::VectorXd gradient_raw(std::span<const double> g, const DensityRatioProfile& ratios,
                             std::span<const double> p);

Eigen::MatrixXd jacobian_raw(std::span<const double> g, const DensityRatioProfile& ratios,
                             std::span<const double> p);

/// Sup-norm of gradient_raw, NaN if any entry is non-finite.
double gradient_sup_norm(std::span<const double> g, const DensityRatioProfile& ratios,
                         std::span<const double> p);

/// One bin of a two-component problem: mass `g` and ratio `x` (x may be +inf).
struct BinaryTerm {
  double g;
  double x;
};

struct BinaryExistence {
  bool exists;
  double mean_x;
  double mean_inv_x;
};

BinaryExistence binary_existence(std::span<const BinaryTerm> terms);

/// d/dp of sum g log(1 + p (x - 1)).
double binary_gradient(std::span<const BinaryTerm> terms, double p);
double binary_derivative(std::span<const BinaryTerm> terms, double p);

struct BinaryRoot {
  double p;
  int iterations;
  double gradient;
};

/// Bracketed Newton with bisection fallback on [eps, 1 - eps]; assumes an
/// interior root exists.
BinaryRoot binary_root(std::span<const BinaryTerm> terms, double gradient_tolerance,
                       int max_iterations);

}  // namespace mixfit::detail
