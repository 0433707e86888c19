#include "mixfit/moments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "mixfit/kernel.hpp"

namespace mixfit {

namespace {

void require_binary(const TrainingModel& model, const char* op) {
  if (model.class_count() != 2)
    throw Error(ErrorCode::InvalidArgument, std::string(op) + " needs exactly two classes");
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

double MixingMatrix::column_sum_error() const {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < entries.cols(); ++j)
    worst = std::max(worst, std::abs(entries.col(j).sum() - 1.0));
  return worst;
}

std::vector<double> probability_average(const BinnedDistribution& test,
                                        const TrainingModel& model) {
  const auto g = test.aligned_to(model.support());
  std::vector<double> v(model.class_count(), 0.0);
  for (std::size_t b = 0; b < g.size(); ++b)
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += g[b] * model.conditionals()[b][i];
  return v;
}

MixingMatrix mixing_matrix(const TrainingModel& model) {
  const auto k = static_cast<Eigen::Index>(model.class_count());
  MixingMatrix m{Eigen::MatrixXd::Zero(k, k)};
  const auto& cond = model.conditionals();
  const auto& marg = model.feature_marginal();
  for (std::size_t b = 0; b < model.bin_count(); ++b) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      const double bin_given_j = marg[b] * cond[b][uj] / model.priors()[uj];
      for (Eigen::Index i = 0; i < k; ++i)
        m.entries(i, j) += bin_given_j * cond[b][static_cast<std::size_t>(i)];
    }
  }
  return m;
}

std::vector<double> project_to_simplex(std::span<const double> v) {
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cumulative += u[i];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
  const double s = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& x : out) x /= s;
  return out;
}

namespace {

// Accepts a closed-form solution, projecting it when it leaves the simplex.
FitResult closed_form_result(std::vector<double> q) {
  FitResult r;
  r.method = Method::ClosedForm;
  r.converged = true;
  r.final_gradient_norm = kNaN;
  r.objective_value = kNaN;
  constexpr double slack = kSimplexTolerance;
  const bool inside =
      std::all_of(q.begin(), q.end(), [](double x) { return x >= -slack && x <= 1.0 + slack; });
  if (inside) {
    r.weights = SimplexWeights::normalized(std::move(q), 1e-9);
  } else {
    r.weights = SimplexWeights(project_to_simplex(q), 1e-9);
    r.boundary_alarm = true;
    r.notes.emplace_back(
        "closed-form solution lies outside the simplex; reporting its Euclidean projection");
  }
  return r;
}

}  // namespace

FitResult scaled_probability_average(const BinnedDistribution& test, const TrainingModel& model) {
  const auto k = static_cast<Eigen::Index>(model.class_count());
  const auto v = probability_average(test, model);
  const MixingMatrix m = mixing_matrix(model);

  Eigen::MatrixXd a = m.entries;
  Eigen::VectorXd rhs(k);
  for (Eigen::Index i = 0; i < k; ++i) rhs(i) = v[static_cast<std::size_t>(i)];
  a.row(k - 1).setOnes();
  rhs(k - 1) = 1.0;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(0) <= 0.0 || sv(k - 1) <= 1e-12 * sv(0))
    throw Error(ErrorCode::SingularMatrix,
                "mixing matrix is singular; the classifier cannot separate the classes, use the "
                "ML estimator instead");
  const Eigen::VectorXd q = svd.solve(rhs);

  FitResult r = closed_form_result(std::vector<double>(q.data(), q.data() + q.size()));
  r.condition_number = sv(0) / sv(k - 1);
  return r;
}

double r_squared(const TrainingModel& model) {
  require_binary(model, "R^2");
  const double prior = model.priors()[0];
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t b = 0; b < model.bin_count(); ++b) {
    const double p = model.conditionals()[b][0];
    mean += model.feature_marginal()[b] * p;
    second += model.feature_marginal()[b] * p * p;
  }
  const double var = second - mean * mean;
  return std::clamp(var / (prior * (1.0 - prior)), 0.0, 1.0);
}

FitResult scaled_probability_average_binary(const BinnedDistribution& test,
                                            const TrainingModel& model) {
  require_binary(model, "binary scaled probability average");
  const double r2 = r_squared(model);
  if (r2 <= 1e-14)
    throw Error(ErrorCode::Degenerate, "classifier has no power (R^2 = 0); prevalence unidentifiable");
  const double prior = model.priors()[0];
  const double v1 = probability_average(test, model)[0];
  const double q1 = (v1 - prior * (1.0 - r2)) / r2;

  FitResult r;
  r.method = Method::ClosedForm;
  r.converged = true;
  r.final_gradient_norm = kNaN;
  r.objective_value = kNaN;
  const double clamped = std::clamp(q1, 0.0, 1.0);
  if (clamped != q1) {
    r.boundary_alarm = true;
    r.notes.emplace_back("closed-form solution outside [0, 1]; clamped");
  }
  r.weights = SimplexWeights({clamped, 1.0 - clamped});
  return r;
}

std::vector<std::vector<double>> band_rates_under_prior_shift(const TrainingModel& model,
                                                              const SimplexWeights& new_priors) {
  if (new_priors.size() != model.class_count())
    throw Error(ErrorCode::InvalidArgument, "new priors: wrong number of classes");
  const auto ratios = build_ratios_from_conditionals(model);
  std::vector<std::vector<double>> out(model.bin_count());
  for (std::size_t b = 0; b < model.bin_count(); ++b) {
    const auto& row = ratios.row(b);
    double denom = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) denom += new_priors[i] * row[i];
    if (!(denom > 0.0))
      throw Error(ErrorCode::DomainError,
                  "band rates: zero posterior denominator in bin '" + model.support()[b] + "'");
    out[b].resize(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) out[b][i] = new_priors[i] * row[i] / denom;
  }
  return out;
}

bool interleaving_check(double training_prior_1, double covariate_estimate_1,
                        double ml_estimate_1) {
  const double lo = std::min(training_prior_1, ml_estimate_1);
  const double hi = std::max(training_prior_1, ml_estimate_1);
  return covariate_estimate_1 >= lo && covariate_estimate_1 <= hi;
}

}  // namespace mixfit
