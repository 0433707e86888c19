#include "mixfit/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "detail.hpp"

namespace mixfit {

namespace detail {

bool ratios_full_rank(const DensityRatioProfile& ratios, std::span<const double> measure) {
  const auto& free = ratios.free_classes();
  std::vector<std::size_t> rows;
  for (std::size_t b = 0; b < ratios.bin_count(); ++b)
    if (measure[b] > 0.0) rows.push_back(b);
  if (rows.size() < free.size()) return false;

  Eigen::MatrixXd a(rows.size(), free.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double w = std::sqrt(measure[rows[r]]);
    for (std::size_t j = 0; j < free.size(); ++j)
      a(r, j) = w * (ratios.ratio(rows[r], free[j]) - 1.0);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  // Ratios built from conditionals carry rounding noise around 1, so a purely
  // relative cutoff would call noise full rank.
  const double cutoff = std::max(1e-10 * (sv.size() ? sv(0) : 0.0), 1e-12);
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= cutoff) return false;
  return true;
}

std::vector<double> denominators(const DensityRatioProfile& ratios, std::span<const double> p) {
  std::vector<double> d(ratios.bin_count(), 0.0);
  for (std::size_t b = 0; b < ratios.bin_count(); ++b) {
    const auto& row = ratios.row(b);
    double s = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) s += p[c] * row[c];
    d[b] = s;
  }
  return d;
}

double objective_raw(std::span<const double> g, const DensityRatioProfile& ratios,
                     std::span<const double> p) {
  const auto d = denominators(ratios, p);
  double f = 0.0;
  for (std::size_t b = 0; b < d.size(); ++b) {
    if (g[b] == 0.0) continue;
    if (d[b] <= 0.0) return -std::numeric_limits<double>::infinity();
    f += g[b] * std::log(d[b]);
  }
  return f;
}

Eigen::VectorXd gradient_raw(std::span<const double> g, const DensityRatioProfile& ratios,
                             std::span<const double> p) {
  const auto& free = ratios.free_classes();
  const auto d = denominators(ratios, p);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(free.size()));
  for (std::size_t b = 0; b < d.size(); ++b) {
    if (g[b] == 0.0) continue;
    const double w = g[b] / d[b];
    for (std::size_t j = 0; j < free.size(); ++j)
      grad(static_cast<Eigen::Index>(j)) += w * (ratios.ratio(b, free[j]) - 1.0);
  }
  return grad;
}

Eigen::MatrixXd jacobian_raw(std::span<const double> g, const DensityRatioProfile& ratios,
                             std::span<const double> p) {
  const auto& free = ratios.free_classes();
  const auto m = static_cast<Eigen::Index>(free.size());
  const auto d = denominators(ratios, p);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd u(m);
  for (std::size_t b = 0; b < d.size(); ++b) {
    if (g[b] == 0.0) continue;
    for (Eigen::Index j = 0; j < m; ++j)
      u(j) = ratios.ratio(b, free[static_cast<std::size_t>(j)]) - 1.0;
    jac.noalias() -= (g[b] / (d[b] * d[b])) * (u * u.transpose());
  }
  return jac.selfadjointView<Eigen::Lower>();
}

double gradient_sup_norm(std::span<const double> g, const DensityRatioProfile& ratios,
                         std::span<const double> p) {
  const Eigen::VectorXd grad = gradient_raw(g, ratios, p);
  if (!grad.allFinite()) return std::numeric_limits<double>::quiet_NaN();
  return grad.size() == 0 ? 0.0 : grad.cwiseAbs().maxCoeff();
}

BinaryExistence binary_existence(std::span<const BinaryTerm> terms) {
  double mean_x = 0.0;
  double mean_inv = 0.0;
  bool informative = false;
  for (const auto& t : terms) {
    if (t.g == 0.0) continue;
    if (std::abs(t.x - 1.0) > 1e-12) informative = true;
    mean_x += t.g * t.x;
    mean_inv += t.x == 0.0 ? std::numeric_limits<double>::infinity() : t.g / t.x;
  }
  return {informative && mean_x > 1.0 && mean_inv > 1.0, mean_x, mean_inv};
}

double binary_gradient(std::span<const BinaryTerm> terms, double p) {
  double s = 0.0;
  for (const auto& t : terms) {
    if (t.g == 0.0) continue;
    if (std::isinf(t.x))
      s += t.g / p;
    else
      s += t.g * (t.x - 1.0) / (1.0 + p * (t.x - 1.0));
  }
  return s;
}

double binary_derivative(std::span<const BinaryTerm> terms, double p) {
  double s = 0.0;
  for (const auto& t : terms) {
    if (t.g == 0.0) continue;
    if (std::isinf(t.x)) {
      s -= t.g / (p * p);
    } else {
      const double d = 1.0 + p * (t.x - 1.0);
      s -= t.g * (t.x - 1.0) * (t.x - 1.0) / (d * d);
    }
  }
  return s;
}

BinaryRoot binary_root(std::span<const BinaryTerm> terms, double gradient_tolerance,
                       int max_iterations) {
  constexpr double eps = 1e-14;
  double lo = eps;
  double hi = 1.0 - eps;
  double p = 0.5;
  double grad = binary_gradient(terms, p);
  int it = 0;
  while (std::abs(grad) > gradient_tolerance && it < max_iterations) {
    ++it;
    // G is strictly decreasing: positive gradient means the root is above p.
    if (grad > 0.0)
      lo = p;
    else
      hi = p;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(hi, 1e-300)) break;
    const double deriv = binary_derivative(terms, p);
    double next = deriv < 0.0 ? p - grad / deriv : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    p = next;
    grad = binary_gradient(terms, p);
  }
  // The tolerance decides convergence; a few more Newton steps then take the
  // root down to rounding level without counting as iterations.
  for (int polish = 0; polish < 3 && std::abs(grad) <= gradient_tolerance && grad != 0.0; ++polish) {
    const double deriv = binary_derivative(terms, p);
    if (!(deriv < 0.0)) break;
    const double next = p - grad / deriv;
    if (!(next > eps && next < 1.0 - eps)) break;
    const double g2 = binary_gradient(terms, next);
    if (!(std::abs(g2) < std::abs(grad))) break;
    p = next;
    grad = g2;
  }
  return {p, it, grad};
}

}  // namespace detail

namespace {

std::size_t resolve_reference(std::optional<std::size_t> reference, std::size_t k) {
  const std::size_t ref = reference.value_or(k - 1);
  if (ref >= k) throw Error(ErrorCode::InvalidArgument, "reference class index out of range");
  return ref;
}

void require_interior(const SimplexWeights& w, const char* op) {
  if (!w.interior())
    throw Error(ErrorCode::DomainError,
                std::string(op) +
                    ": weights on the simplex boundary; run the existence checks or a solver "
                    "that reports boundary alarms");
}

void require_classes(const DensityRatioProfile& ratios, const SimplexWeights& w) {
  if (w.size() != ratios.class_count())
    throw Error(ErrorCode::InvalidArgument, "weights length differs from class count");
}

}  // namespace

DensityRatioProfile build_ratios_from_conditionals(const TrainingModel& model,
                                                   std::optional<std::size_t> reference) {
  const std::size_t k = model.class_count();
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "density ratios need k >= 2");
  const std::size_t ref = resolve_reference(reference, k);
  const auto& priors = model.priors();
  std::vector<std::vector<double>> rows(model.bin_count(), std::vector<double>(k, 1.0));
  for (std::size_t b = 0; b < model.bin_count(); ++b) {
    const auto& cond = model.conditionals()[b];
    if (!(cond[ref] > 0.0))
      throw Error(ErrorCode::DomainError,
                  "reference class '" + model.class_labels()[ref] +
                      "' has zero conditional probability in bin '" + model.support()[b] + "'");
    for (std::size_t i = 0; i < k; ++i) {
      if (i == ref) continue;
      rows[b][i] = (cond[i] / cond[ref]) * (priors[ref] / priors[i]);
    }
  }
  return DensityRatioProfile(model.support(), std::move(rows), ref);
}

DensityRatioProfile build_ratios_from_densities(const std::vector<BinnedDistribution>& components,
                                                std::optional<std::size_t> reference) {
  const std::size_t k = components.size();
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "density ratios need k >= 2");
  const std::size_t ref = resolve_reference(reference, k);
  const auto& support = components[ref].support();
  std::vector<std::vector<double>> aligned;
  aligned.reserve(k);
  for (const auto& c : components) aligned.push_back(c.aligned_to(support));

  std::vector<std::vector<double>> rows(support.size(), std::vector<double>(k, 1.0));
  for (std::size_t b = 0; b < support.size(); ++b) {
    const double denom = aligned[ref][b];
    if (!(denom > 0.0))
      throw Error(ErrorCode::DomainError,
                  "reference density is zero in bin '" + support[b] + "'");
    for (std::size_t i = 0; i < k; ++i)
      if (i != ref) rows[b][i] = aligned[i][b] / denom;
  }
  return DensityRatioProfile(support, std::move(rows), ref);
}

BinnedDistribution mixture_density(const SimplexWeights& weights,
                                   const std::vector<BinnedDistribution>& components) {
  if (components.empty() || weights.size() != components.size())
    throw Error(ErrorCode::InvalidArgument, "mixture: weights and components differ in length");
  const auto& support = components.front().support();
  std::vector<double> out(support.size(), 0.0);
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto w = components[i].aligned_to(support);
    for (std::size_t b = 0; b < out.size(); ++b) out[b] += weights[i] * w[b];
  }
  return BinnedDistribution(support, std::move(out), 1e-10);
}

bool ratios_independent(const DensityRatioProfile& ratios, const BinnedDistribution& test) {
  const auto g = test.aligned_to(ratios.support());
  return detail::ratios_full_rank(ratios, g);
}

bool ratios_uninformative(const DensityRatioProfile& ratios, const BinnedDistribution& test) {
  const auto g = test.aligned_to(ratios.support());
  for (std::size_t b = 0; b < ratios.bin_count(); ++b) {
    if (g[b] == 0.0) continue;
    for (double x : ratios.row(b))
      if (std::abs(x - 1.0) > 1e-12) return false;
  }
  return true;
}

double objective_F(const BinnedDistribution& test, const DensityRatioProfile& ratios,
                   const SimplexWeights& weights) {
  require_classes(ratios, weights);
  require_interior(weights, "objective");
  const auto g = test.aligned_to(ratios.support());
  const double f = detail::objective_raw(g, ratios, weights.values());
  if (!std::isfinite(f))
    throw Error(ErrorCode::DomainError, "objective: non-positive mixture denominator");
  return f;
}

Eigen::VectorXd gradient_G(const BinnedDistribution& test, const DensityRatioProfile& ratios,
                           const SimplexWeights& weights) {
  require_classes(ratios, weights);
  require_interior(weights, "gradient");
  const auto g = test.aligned_to(ratios.support());
  return detail::gradient_raw(g, ratios, weights.values());
}

Eigen::MatrixXd jacobian_J(const BinnedDistribution& test, const DensityRatioProfile& ratios,
                           const SimplexWeights& weights) {
  require_classes(ratios, weights);
  require_interior(weights, "jacobian");
  const auto g = test.aligned_to(ratios.support());
  return detail::jacobian_raw(g, ratios, weights.values());
}

std::vector<std::vector<double>> reconstruct_components_raw(const BinnedDistribution& test,
                                                            const DensityRatioProfile& ratios,
                                                            const SimplexWeights& weights) {
  require_classes(ratios, weights);
  const auto g = test.aligned_to(ratios.support());
  const auto d = detail::denominators(ratios, weights.values());
  const std::size_t k = ratios.class_count();
  std::vector<std::vector<double>> comps(k, std::vector<double>(ratios.bin_count(), 0.0));
  for (std::size_t b = 0; b < ratios.bin_count(); ++b) {
    if (g[b] == 0.0) continue;
    for (std::size_t i = 0; i < k; ++i) comps[i][b] = g[b] * ratios.ratio(b, i) / d[b];
  }
  return comps;
}

std::vector<BinnedDistribution> exact_fit_components(const BinnedDistribution& test,
                                                     const DensityRatioProfile& ratios,
                                                     const SimplexWeights& weights,
                                                     double gradient_tolerance) {
  require_classes(ratios, weights);
  require_interior(weights, "exact fit");
  if (ratios_uninformative(ratios, test))
    throw Error(ErrorCode::Degenerate, "exact fit: ratios carry no information");
  const auto g = test.aligned_to(ratios.support());
  const double norm = detail::gradient_sup_norm(g, ratios, weights.values());
  if (!(norm <= gradient_tolerance)) {
    std::ostringstream os;
    os << "exact fit: not at stationary point (gradient sup-norm " << norm << ")";
    throw Error(ErrorCode::NotStationary, os.str());
  }
  auto raw = reconstruct_components_raw(test, ratios, weights);
  std::vector<BinnedDistribution> out;
  out.reserve(raw.size());
  for (auto& c : raw) out.emplace_back(ratios.support(), std::move(c), 1e-9);
  return out;
}

KlResult kl_divergence(const BinnedDistribution& g, const BinnedDistribution& h) {
  const auto hw = h.aligned_to(g.support());
  double kl = 0.0;
  for (std::size_t b = 0; b < g.size(); ++b) {
    if (g[b] == 0.0) continue;
    if (hw[b] == 0.0) return {std::numeric_limits<double>::infinity(), false};
    kl += g[b] * std::log(g[b] / hw[b]);
  }
  return {std::max(kl, 0.0), true};
}

}  // namespace mixfit
