// Core value types shared by every mixfit module.
//
// All types validate their invariants on construction and are immutable
// afterwards, so they can be shared freely between threads.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixfit {

inline constexpr double kSimplexTolerance = 1e-12;
inline constexpr double kStationarityTolerance = 1e-10;

enum class ErrorCode {
  InvalidArgument,
  SupportMismatch,
  DomainError,
  NotStationary,
  Degenerate,
  SingularMatrix,
  Parse,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Finite-support probability distribution: opaque bin labels plus
/// nonnegative weights summing to one.
class BinnedDistribution {
 public:
  BinnedDistribution() = default;
  /// `tolerance` bounds |sum(weights) - 1|.
  BinnedDistribution(std::vector<std::string> support, std::vector<double> weights,
                     double tolerance = kSimplexTolerance);

  const std::vector<std::string>& support() const noexcept { return support_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }

  /// Index of `label`, or nullopt.
  std::optional<std::size_t> index_of(const std::string& label) const;

  /// Weights re-ordered to follow `support`. Throws SupportMismatch unless the
  /// two supports contain exactly the same labels.
  std::vector<double> aligned_to(std::span<const std::string> support) const;

  /// Same distribution expressed over `support`, which must contain every
  /// label carrying positive mass here; absent labels get weight 0.
  BinnedDistribution reindexed(const std::vector<std::string>& support) const;

 private:
  std::vector<std::string> support_;
  std::vector<double> weights_;
};

/// A point of the closed probability simplex.
class SimplexWeights {
 public:
  SimplexWeights() = default;
  explicit SimplexWeights(std::vector<double> values, double tolerance = kSimplexTolerance);

  static SimplexWeights uniform(std::size_t k);
  /// Clamps tiny negatives to zero and rescales to sum one. Throws if the
  /// input is further than `tolerance` from the simplex.
  static SimplexWeights normalized(std::vector<double> values, double tolerance = 1e-9);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  bool interior() const noexcept { return interior_; }
  double min() const;

 private:
  std::vector<double> values_;
  bool interior_ = false;
};

/// Options controlling TrainingModel validation.
struct ModelChecks {
  /// Bound on |sum(feature_marginal) - 1|. Aggregated reports with rounded
  /// percentages need a looser value than the default.
  double marginal_tolerance = kSimplexTolerance;
  bool check_consistency = true;
  double consistency_tolerance = 1e-9;
};

/// Training-set description: per-bin conditional class probabilities,
/// class priors and the training feature marginal.
class TrainingModel {
 public:
  TrainingModel() = default;
  /// `conditionals[b][i]` = P0[A_i | bin b]; one row per support entry.
  TrainingModel(std::vector<std::string> support, std::vector<std::string> class_labels,
                std::vector<double> priors, std::vector<std::vector<double>> conditionals,
                std::vector<double> feature_marginal, ModelChecks checks = {});

  const std::vector<std::string>& support() const noexcept { return support_; }
  const std::vector<std::string>& class_labels() const noexcept { return class_labels_; }
  const std::vector<double>& priors() const noexcept { return priors_; }
  const std::vector<std::vector<double>>& conditionals() const noexcept { return conditionals_; }
  const std::vector<double>& feature_marginal() const noexcept { return feature_marginal_; }
  std::size_t class_count() const noexcept { return priors_.size(); }
  std::size_t bin_count() const noexcept { return support_.size(); }

  /// Consistency warnings raised during validation (never fatal).
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  /// Training feature marginal as a distribution (renormalized when the
  /// marginal was accepted under a loose tolerance).
  BinnedDistribution marginal_distribution() const;

  /// Class-conditional feature distributions P0[bin | A_i], each normalized
  /// to sum one.
  std::vector<BinnedDistribution> class_densities() const;

 private:
  std::vector<std::string> support_;
  std::vector<std::string> class_labels_;
  std::vector<double> priors_;
  std::vector<std::vector<double>> conditionals_;
  std::vector<double> feature_marginal_;
  std::vector<std::string> warnings_;
};

/// Per-bin density ratios X_i = f_i / f_ref. The reference column is stored
/// explicitly as 1 so that sum_i p_i X_i is the mixture denominator.
class DensityRatioProfile {
 public:
  DensityRatioProfile() = default;
  /// `ratios[b]` holds k entries; `ratios[b][reference]` must equal 1.
  DensityRatioProfile(std::vector<std::string> support, std::vector<std::vector<double>> ratios,
                      std::size_t reference_class);

  const std::vector<std::string>& support() const noexcept { return support_; }
  std::size_t bin_count() const noexcept { return support_.size(); }
  std::size_t class_count() const noexcept { return class_count_; }
  std::size_t reference_class() const noexcept { return reference_; }
  double ratio(std::size_t bin, std::size_t cls) const { return ratios_[bin][cls]; }
  const std::vector<double>& row(std::size_t bin) const { return ratios_[bin]; }

  /// Non-reference class indices in class order; these index the gradient
  /// and Jacobian.
  const std::vector<std::size_t>& free_classes() const noexcept { return free_; }

  /// Ratios with the reference column dropped, k-1 per bin.
  std::vector<std::vector<double>> reduced() const;

  /// True when {X_i - 1} are linearly independent under the uniform
  /// measure on the support.
  bool independent() const noexcept { return independent_; }

 private:
  std::vector<std::string> support_;
  std::vector<std::vector<double>> ratios_;
  std::vector<std::size_t> free_;
  std::size_t class_count_ = 0;
  std::size_t reference_ = 0;
  bool independent_ = false;
};

enum class Method { EM, Newton, GaussSeidel, BinaryRoot, ClosedForm };

const char* to_string(Method method);

struct FitResult {
  SimplexWeights weights;
  Method method = Method::ClosedForm;
  int iterations = 0;
  /// Sup-norm of the gradient at `weights`; NaN when undefined.
  double final_gradient_norm = 0.0;
  bool boundary_alarm = false;
  bool converged = false;
  std::optional<std::vector<BinnedDistribution>> exact_fit_components;
  /// Objective at `weights`; may be -inf or NaN on the boundary.
  double objective_value = 0.0;
  std::optional<double> condition_number;
  std::vector<double> objective_trace;
  std::vector<std::string> notes;
};

}  // namespace mixfit
