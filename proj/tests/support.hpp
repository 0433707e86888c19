// Shared fixtures and small independent oracles for the test binaries.

#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "mixfit/kernel.hpp"
#include "mixfit/simulate.hpp"
#include "mixfit/solvers.hpp"
#include "mixfit/types.hpp"

namespace fixtures {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(MIXFIT_TEST_DATA) / name;
}

inline nlohmann::json golden(const std::string& name) {
  std::ifstream in(std::filesystem::path(MIXFIT_TEST_DATA).parent_path() / "goldens" / name);
  return nlohmann::json::parse(in);
}

// Two bins {a,b}, equal priors, conditionals a:(0.8,0.2), b:(0.2,0.8).
inline mixfit::TrainingModel fix_a() {
  return {{"a", "b"}, {"1", "2"}, {0.5, 0.5}, {{0.8, 0.2}, {0.2, 0.8}}, {0.5, 0.5}};
}

inline std::vector<mixfit::BinnedDistribution> fix_a_components() {
  return {{{"a", "b"}, {0.8, 0.2}}, {{"a", "b"}, {0.2, 0.8}}};
}

inline mixfit::BinnedDistribution on_ab(double g1) { return {{"a", "b"}, {g1, 1.0 - g1}}; }

inline std::vector<mixfit::BinnedDistribution> three_class_components() {
  const std::vector<std::string> s{"x", "y", "z"};
  return {{s, {0.7, 0.2, 0.1}}, {s, {0.2, 0.6, 0.2}}, {s, {0.1, 0.2, 0.7}}};
}

// Mixture weights computed by hand, independent of mixture_density.
inline mixfit::BinnedDistribution mix(const std::vector<double>& q,
                                      const std::vector<mixfit::BinnedDistribution>& f) {
  std::vector<double> g(f[0].size(), 0.0);
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t b = 0; b < g.size(); ++b) g[b] += q[i] * f[i][b];
  double s = 0.0;
  for (double v : g) s += v;
  for (double& v : g) v /= s;
  return {f[0].support(), g, 1e-9};
}

struct Instance {
  std::vector<mixfit::BinnedDistribution> components;
  mixfit::DensityRatioProfile ratios;
  mixfit::SimplexWeights truth;
  mixfit::BinnedDistribution test;
};

// Exact interior mixture of random Dirichlet components.
inline Instance random_instance(std::mt19937_64& rng, std::size_t k, std::size_t bins) {
  Instance in;
  in.components = mixfit::random_components(rng, k, bins);
  in.ratios = mixfit::build_ratios_from_densities(in.components);
  in.truth = mixfit::random_interior_weights(rng, k, 0.05);
  in.test = mix(in.truth.values(), in.components);
  return in;
}

// Plain loop objective in terms of full weights.
inline double direct_objective(const mixfit::BinnedDistribution& g,
                               const mixfit::DensityRatioProfile& r,
                               const std::vector<double>& p) {
  double f = 0.0;
  for (std::size_t b = 0; b < g.size(); ++b) {
    if (g[b] == 0.0) continue;
    double d = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) d += p[c] * r.ratio(b, c);
    f += g[b] * std::log(d);
  }
  return f;
}

// Full weights from the k-1 free coordinates, reference implied.
inline std::vector<double> expand(const mixfit::DensityRatioProfile& r,
                                  const std::vector<double>& free) {
  std::vector<double> p(r.class_count(), 0.0);
  double s = 0.0;
  for (std::size_t j = 0; j < free.size(); ++j) {
    p[r.free_classes()[j]] = free[j];
    s += free[j];
  }
  p[r.reference_class()] = 1.0 - s;
  return p;
}

inline double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace fixtures
