#include "mixfit/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "detail.hpp"

namespace mixfit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sup_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void renormalize(std::vector<double>& p) {
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= s;
}

SimplexWeights initial_point(const SolverConfig& config, std::size_t k) {
  SimplexWeights w = config.initial_weights.value_or(SimplexWeights::uniform(k));
  if (w.size() != k)
    throw Error(ErrorCode::InvalidArgument, "initial weights: wrong number of classes");
  if (!w.interior())
    throw Error(ErrorCode::DomainError, "initial weights must lie in the open simplex");
  return w;
}

// Fills the diagnostics every solver reports.
void finalize(FitResult& r, std::span<const double> g, const DensityRatioProfile& ratios,
              const SolverConfig& config) {
  const auto& p = r.weights.values();
  r.objective_value = detail::objective_raw(g, ratios, p);
  r.final_gradient_norm = r.weights.interior() ? detail::gradient_sup_norm(g, ratios, p) : kNaN;
  if (r.weights.min() < config.boundary_epsilon) r.boundary_alarm = true;
  if (r.boundary_alarm) r.notes.emplace_back(kBoundaryAlarmAdvice);
}

std::vector<detail::BinaryTerm> binary_terms(std::span<const double> g,
                                             const DensityRatioProfile& ratios) {
  const std::size_t c = ratios.free_classes().front();
  std::vector<detail::BinaryTerm> terms;
  terms.reserve(g.size());
  for (std::size_t b = 0; b < g.size(); ++b) terms.push_back({g[b], ratios.ratio(b, c)});
  return terms;
}

void require_informative(const BinnedDistribution& test, const DensityRatioProfile& ratios) {
  if (ratios_uninformative(ratios, test))
    throw Error(ErrorCode::Degenerate,
                "ratios carry no information (X = 1 almost surely); weights are unidentifiable");
}

// Full weight vector from the free coordinates.
std::vector<double> expand(const DensityRatioProfile& ratios, const Eigen::VectorXd& free) {
  std::vector<double> p(ratios.class_count(), 0.0);
  double s = 0.0;
  const auto& idx = ratios.free_classes();
  for (std::size_t j = 0; j < idx.size(); ++j) {
    p[idx[j]] = free(static_cast<Eigen::Index>(j));
    s += p[idx[j]];
  }
  p[ratios.reference_class()] = 1.0 - s;
  return p;
}

Eigen::VectorXd contract(const DensityRatioProfile& ratios, std::span<const double> p) {
  const auto& idx = ratios.free_classes();
  Eigen::VectorXd q(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) q(static_cast<Eigen::Index>(j)) = p[idx[j]];
  return q;
}

bool all_positive(std::span<const double> p) {
  return std::all_of(p.begin(), p.end(), [](double v) { return v > 0.0; });
}

}  // namespace

const char* to_string(SolverMethod method) {
  switch (method) {
    case SolverMethod::EM: return "em";
    case SolverMethod::Newton: return "newton";
    case SolverMethod::GaussSeidel: return "gauss-seidel";
    case SolverMethod::Auto: return "auto";
  }
  return "unknown";
}

SolverMethod parse_solver_method(const std::string& name) {
  if (name == "em") return SolverMethod::EM;
  if (name == "newton") return SolverMethod::Newton;
  if (name == "gauss-seidel") return SolverMethod::GaussSeidel;
  if (name == "auto") return SolverMethod::Auto;
  throw Error(ErrorCode::InvalidArgument, "unknown solver method '" + name + "'");
}

void SolverConfig::validate() const {
  if (max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "max_iterations must be >= 1");
  if (!(weight_tolerance > 0.0) || !(gradient_tolerance > 0.0) || !(boundary_epsilon > 0.0))
    throw Error(ErrorCode::InvalidArgument, "solver tolerances must be positive");
}

std::vector<double> rescale_coordinate(std::span<const double> q, std::size_t i,
                                       double new_value) {
  std::vector<double> out(q.begin(), q.end());
  const double scale = (1.0 - new_value) / (1.0 - q[i]);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = j == i ? new_value : q[j] * scale;
  return out;
}

BinaryExistenceCheck existence_check_binary(const BinnedDistribution& test,
                                            const DensityRatioProfile& ratios) {
  if (ratios.class_count() != 2)
    throw Error(ErrorCode::InvalidArgument, "binary existence check needs exactly two classes");
  const auto g = test.aligned_to(ratios.support());
  const auto e = detail::binary_existence(binary_terms(g, ratios));
  return {e.exists, e.mean_x, e.mean_inv_x};
}

FitResult solve_binary(const BinnedDistribution& test, const DensityRatioProfile& ratios,
                       const SolverConfig& config) {
  config.validate();
  if (ratios.class_count() != 2)
    throw Error(ErrorCode::InvalidArgument, "binary solver needs exactly two classes");
  require_informative(test, ratios);
  const auto g = test.aligned_to(ratios.support());
  const auto terms = binary_terms(g, ratios);
  const auto exist = detail::binary_existence(terms);
  const std::size_t c = ratios.free_classes().front();

  FitResult r;
  r.method = Method::BinaryRoot;
  std::vector<double> p(2, 0.0);
  if (!exist.exists) {
    // F is monotone on (0,1): it decreases when E[X] <= 1, increases otherwise.
    p[c] = exist.mean_x <= 1.0 ? 0.0 : 1.0;
    p[ratios.reference_class()] = 1.0 - p[c];
    r.weights = SimplexWeights(p);
    r.boundary_alarm = true;
    finalize(r, g, ratios, config);
    return r;
  }
  const auto root = detail::binary_root(terms, config.gradient_tolerance, config.max_iterations);
  p[c] = root.p;
  p[ratios.reference_class()] = 1.0 - root.p;
  r.weights = SimplexWeights(p);
  r.iterations = root.iterations;
  finalize(r, g, ratios, config);
  r.converged = r.final_gradient_norm <= config.gradient_tolerance;
  return r;
}

FitResult em_solve(const BinnedDistribution& test, const DensityRatioProfile& ratios,
                   const SolverConfig& config) {
  config.validate();
  const std::size_t k = ratios.class_count();
  const auto g = test.aligned_to(ratios.support());
  std::vector<double> p = initial_point(config, k).values();

  FitResult r;
  r.method = Method::EM;
  if (config.record_trace) r.objective_trace.push_back(detail::objective_raw(g, ratios, p));
  std::vector<double> next(k);
  for (int it = 1; it <= config.max_iterations; ++it) {
    const auto d = detail::denominators(ratios, p);
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t b = 0; b < d.size(); ++b) {
      if (g[b] == 0.0) continue;
      const double w = g[b] / d[b];
      const auto& row = ratios.row(b);
      for (std::size_t c = 0; c < k; ++c) next[c] += w * p[c] * row[c];
    }
    renormalize(next);
    const double diff = sup_diff(next, p);
    p.swap(next);
    r.iterations = it;
    if (config.record_trace) r.objective_trace.push_back(detail::objective_raw(g, ratios, p));
    if (diff <= config.weight_tolerance) {
      r.converged = true;
      break;
    }
  }
  r.weights = SimplexWeights::normalized(p);
  finalize(r, g, ratios, config);
  return r;
}

namespace {

// Undamped Newton steps after convergence, kept only while the gradient
// shrinks. Brings the stationarity residual to rounding level.
void polish_newton(std::span<const double> g, const DensityRatioProfile& ratios,
                   std::vector<double>& p) {
  double norm = detail::gradient_sup_norm(g, ratios, p);
  for (int polish = 0; polish < 3 && norm > 0.0; ++polish) {
    const Eigen::VectorXd grad = detail::gradient_raw(g, ratios, p);
    const Eigen::MatrixXd jac = detail::jacobian_raw(g, ratios, p);
    const Eigen::VectorXd step = -jac.ldlt().solve(grad);
    if (!step.allFinite()) return;
    auto trial = expand(ratios, contract(ratios, p) + step);
    if (!all_positive(trial)) return;
    const double n2 = detail::gradient_sup_norm(g, ratios, trial);
    if (!(n2 < norm)) return;
    p = std::move(trial);
    norm = n2;
  }
}

}  // namespace

FitResult newton_solve(const BinnedDistribution& test, const DensityRatioProfile& ratios,
                       const SolverConfig& config) {
  config.validate();
  const std::size_t k = ratios.class_count();
  const auto g = test.aligned_to(ratios.support());
  std::vector<double> p = initial_point(config, k).values();

  FitResult r;
  r.method = Method::Newton;
  double f = detail::objective_raw(g, ratios, p);
  if (config.record_trace) r.objective_trace.push_back(f);

  int it = 0;
  for (;;) {
    const Eigen::VectorXd grad = detail::gradient_raw(g, ratios, p);
    if (grad.cwiseAbs().maxCoeff() <= config.gradient_tolerance) {
      r.converged = true;
      break;
    }
    if (it >= config.max_iterations) break;
    ++it;

    const Eigen::MatrixXd jac = detail::jacobian_raw(g, ratios, p);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(0) <= 0.0 || sv(sv.size() - 1) <= 1e-12 * sv(0))
      throw Error(ErrorCode::SingularMatrix,
                  "Newton: Jacobian is numerically singular; the density ratios are not "
                  "linearly independent, consider reducing the number of classes");
    const Eigen::VectorXd step = -svd.solve(grad);
    const Eigen::VectorXd q = contract(ratios, p);

    // Backtracking: halve until interior and F does not decrease.
    const double slack = 1e-13 * (1.0 + std::abs(f));
    bool accepted = false;
    bool left_interior = false;
    double lambda = 1.0;
    std::vector<double> trial;
    double f_trial = 0.0;
    for (int h = 0; h <= 60; ++h, lambda *= 0.5) {
      trial = expand(ratios, q + lambda * step);
      if (!all_positive(trial)) {
        left_interior = true;
        continue;
      }
      f_trial = detail::objective_raw(g, ratios, trial);
      if (f_trial >= f - slack) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (left_interior) r.boundary_alarm = true;
      break;
    }
    const double moved = sup_diff(trial, p);
    p = trial;
    f = f_trial;
    if (config.record_trace) r.objective_trace.push_back(f);
    if (*std::min_element(p.begin(), p.end()) < config.boundary_epsilon) {
      r.boundary_alarm = true;
      break;
    }
    if (moved == 0.0) break;
  }
  if (r.converged) polish_newton(g, ratios, p);
  r.iterations = it;
  r.weights = SimplexWeights::normalized(p);
  finalize(r, g, ratios, config);
  return r;
}

FitResult gauss_seidel_solve(const BinnedDistribution& test, const DensityRatioProfile& ratios,
                             const SolverConfig& config) {
  config.validate();
  const std::size_t k = ratios.class_count();
  if (k < 3) {
    FitResult r = solve_binary(test, ratios, config);
    r.notes.emplace_back("two classes: Gauss-Seidel reduces to the binary root finder");
    return r;
  }
  const auto g = test.aligned_to(ratios.support());
  std::vector<double> q = initial_point(config, k).values();

  FitResult r;
  r.method = Method::GaussSeidel;
  if (config.record_trace) r.objective_trace.push_back(detail::objective_raw(g, ratios, q));

  std::vector<detail::BinaryTerm> terms(g.size());
  std::size_t failures = 0;
  for (int sweep = 1; sweep <= config.max_iterations; ++sweep) {
    const std::vector<double> before = q;
    failures = 0;
    for (std::size_t i = 0; i < k; ++i) {
      // Collapse to component i against the mixture of the others.
      for (std::size_t b = 0; b < g.size(); ++b) {
        const auto& row = ratios.row(b);
        double rest = 0.0;
        for (std::size_t j = 0; j < k; ++j)
          if (j != i) rest += q[j] * row[j];
        const double num = row[i] * (1.0 - q[i]);
        terms[b] = {g[b], rest > 0.0 ? num / rest : std::numeric_limits<double>::infinity()};
      }
      if (!detail::binary_existence(terms).exists) {
        ++failures;
        continue;
      }
      const auto root =
          detail::binary_root(terms, 0.1 * config.gradient_tolerance, config.max_iterations);
      q = rescale_coordinate(q, i, root.p);
      renormalize(q);
    }
    r.iterations = sweep;
    if (config.record_trace) r.objective_trace.push_back(detail::objective_raw(g, ratios, q));
    if (failures == k) {
      r.boundary_alarm = true;
      r.notes.emplace_back("binary resolvability condition failed for every class in a sweep");
      break;
    }
    if (sup_diff(q, before) <= config.weight_tolerance) {
      r.converged = true;
      break;
    }
  }
  if (failures > 0 && !r.boundary_alarm) {
    r.boundary_alarm = true;
    r.notes.emplace_back("binary resolvability condition failed for some class in the last sweep");
  }
  r.weights = SimplexWeights::normalized(q);
  finalize(r, g, ratios, config);
  return r;
}

FitResult fit(const BinnedDistribution& test, const DensityRatioProfile& ratios,
              const SolverConfig& config) {
  config.validate();
  require_informative(test, ratios);
  const std::size_t k = ratios.class_count();

  FitResult r;
  switch (config.method) {
    case SolverMethod::EM: r = em_solve(test, ratios, config); break;
    case SolverMethod::Newton: r = newton_solve(test, ratios, config); break;
    case SolverMethod::GaussSeidel: r = gauss_seidel_solve(test, ratios, config); break;
    case SolverMethod::Auto: {
      if (k == 2) {
        r = solve_binary(test, ratios, config);
        break;
      }
      std::vector<std::string> trail;
      try {
        r = newton_solve(test, ratios, config);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularMatrix) throw;
        trail.emplace_back(std::string("newton failed: ") + e.what() + "; using gauss-seidel");
        r = gauss_seidel_solve(test, ratios, config);
      }
      if (r.boundary_alarm || !r.converged) {
        trail.emplace_back(std::string(to_string(r.method)) +
                           " ended without an interior solution; refining with em");
        r = em_solve(test, ratios, config);
      }
      r.notes.insert(r.notes.begin(), trail.begin(), trail.end());
      break;
    }
  }

  if (!r.boundary_alarm && r.weights.interior() &&
      r.final_gradient_norm <= config.gradient_tolerance) {
    r.exact_fit_components =
        exact_fit_components(test, ratios, r.weights, config.gradient_tolerance);
  }
  if (!ratios_independent(ratios, test))
    r.notes.emplace_back(
        "density ratios are linearly dependent on the test support; weights may not be unique");
  return r;
}

}  // namespace mixfit
