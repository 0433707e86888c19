#include "mixfit/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "detail.hpp"

namespace mixfit {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::SupportMismatch: return "support mismatch";
    case ErrorCode::DomainError: return "domain error";
    case ErrorCode::NotStationary: return "not at stationary point";
    case ErrorCode::Degenerate: return "degenerate input";
    case ErrorCode::SingularMatrix: return "singular matrix";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::Io: return "i/o error";
  }
  return "unknown";
}

const char* to_string(Method method) {
  switch (method) {
    case Method::EM: return "em";
    case Method::Newton: return "newton";
    case Method::GaussSeidel: return "gauss-seidel";
    case Method::BinaryRoot: return "binary-root";
    case Method::ClosedForm: return "closed-form";
  }
  return "unknown";
}

namespace {

void require(bool ok, ErrorCode code, const std::string& msg) {
  if (!ok) throw Error(code, msg);
}

void check_unique(const std::vector<std::string>& labels, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& l : labels) {
    require(seen.insert(l).second, ErrorCode::InvalidArgument,
            std::string("duplicate ") + what + " label '" + l + "'");
  }
}

void check_weight_vector(std::span<const double> w, double tolerance, const char* what) {
  double sum = 0.0;
  for (double v : w) {
    require(std::isfinite(v) && v >= 0.0, ErrorCode::InvalidArgument,
            std::string(what) + ": weights must be finite and nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": weights sum to " << sum << ", expected 1";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

}  // namespace

// BinnedDistribution

BinnedDistribution::BinnedDistribution(std::vector<std::string> support,
                                       std::vector<double> weights, double tolerance)
    : support_(std::move(support)), weights_(std::move(weights)) {
  require(support_.size() == weights_.size(), ErrorCode::InvalidArgument,
          "distribution: support and weights differ in length");
  require(!support_.empty(), ErrorCode::InvalidArgument, "distribution: empty support");
  check_unique(support_, "bin");
  check_weight_vector(weights_, tolerance, "distribution");
}

std::optional<std::size_t> BinnedDistribution::index_of(const std::string& label) const {
  auto it = std::find(support_.begin(), support_.end(), label);
  if (it == support_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - support_.begin());
}

std::vector<double> BinnedDistribution::aligned_to(std::span<const std::string> support) const {
  require(support.size() == support_.size(), ErrorCode::SupportMismatch,
          "supports differ in size (" + std::to_string(support.size()) + " vs " +
              std::to_string(support_.size()) + ")");
  // Fast path: identical order.
  if (std::equal(support.begin(), support.end(), support_.begin())) return weights_;
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < support_.size(); ++i) pos.emplace(support_[i], i);
  std::vector<double> out(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    auto it = pos.find(support[i]);
    require(it != pos.end(), ErrorCode::SupportMismatch,
            "bin '" + support[i] + "' missing from distribution");
    out[i] = weights_[it->second];
  }
  return out;
}

BinnedDistribution BinnedDistribution::reindexed(const std::vector<std::string>& support) const {
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < support.size(); ++i) pos.emplace(support[i], i);
  std::vector<double> w(support.size(), 0.0);
  for (std::size_t i = 0; i < support_.size(); ++i) {
    auto it = pos.find(support_[i]);
    if (it == pos.end()) {
      require(weights_[i] == 0.0, ErrorCode::SupportMismatch,
              "bin '" + support_[i] + "' is not part of the training support");
      continue;
    }
    w[it->second] = weights_[i];
  }
  return BinnedDistribution(support, std::move(w), 1e-9);
}

// SimplexWeights

SimplexWeights::SimplexWeights(std::vector<double> values, double tolerance)
    : values_(std::move(values)) {
  require(!values_.empty(), ErrorCode::InvalidArgument, "simplex weights: empty");
  check_weight_vector(values_, tolerance, "simplex weights");
  interior_ = std::all_of(values_.begin(), values_.end(), [](double v) { return v > 0.0; });
}

SimplexWeights SimplexWeights::uniform(std::size_t k) {
  require(k >= 1, ErrorCode::InvalidArgument, "uniform weights need k >= 1");
  return SimplexWeights(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

SimplexWeights SimplexWeights::normalized(std::vector<double> values, double tolerance) {
  double sum = 0.0;
  for (double& v : values) {
    require(std::isfinite(v) && v >= -tolerance, ErrorCode::InvalidArgument,
            "simplex weights: value outside the simplex");
    v = std::max(v, 0.0);
    sum += v;
  }
  require(std::abs(sum - 1.0) <= tolerance, ErrorCode::InvalidArgument,
          "simplex weights: sum too far from one");
  for (double& v : values) v /= sum;
  return SimplexWeights(std::move(values));
}

double SimplexWeights::min() const { return *std::min_element(values_.begin(), values_.end()); }

// TrainingModel

TrainingModel::TrainingModel(std::vector<std::string> support,
                             std::vector<std::string> class_labels, std::vector<double> priors,
                             std::vector<std::vector<double>> conditionals,
                             std::vector<double> feature_marginal, ModelChecks checks)
    : support_(std::move(support)),
      class_labels_(std::move(class_labels)),
      priors_(std::move(priors)),
      conditionals_(std::move(conditionals)),
      feature_marginal_(std::move(feature_marginal)) {
  const std::size_t k = priors_.size();
  require(k >= 2, ErrorCode::InvalidArgument, "training model needs at least two classes");
  require(class_labels_.size() == k, ErrorCode::InvalidArgument,
          "training model: class label count differs from prior count");
  check_unique(class_labels_, "class");
  require(!support_.empty(), ErrorCode::InvalidArgument, "training model: empty support");
  check_unique(support_, "bin");
  require(conditionals_.size() == support_.size() && feature_marginal_.size() == support_.size(),
          ErrorCode::InvalidArgument, "training model: per-bin arrays differ in length");

  for (double p : priors_) {
    require(std::isfinite(p) && p > 0.0, ErrorCode::InvalidArgument,
            "training model: priors must be strictly positive");
  }
  check_weight_vector(priors_, kSimplexTolerance, "training priors");
  check_weight_vector(feature_marginal_, checks.marginal_tolerance, "training feature marginal");
  for (std::size_t b = 0; b < support_.size(); ++b) {
    require(conditionals_[b].size() == k, ErrorCode::InvalidArgument,
            "training model: bin '" + support_[b] + "' has wrong number of conditionals");
    check_weight_vector(conditionals_[b], 1e-9, ("conditionals of bin '" + support_[b] + "'").c_str());
  }

  if (checks.check_consistency) {
    for (std::size_t i = 0; i < k; ++i) {
      double implied = 0.0;
      for (std::size_t b = 0; b < support_.size(); ++b)
        implied += feature_marginal_[b] * conditionals_[b][i];
      if (std::abs(implied - priors_[i]) > checks.consistency_tolerance) {
        std::ostringstream os;
        os.precision(10);
        os << "class '" << class_labels_[i] << "': prior " << priors_[i]
           << " differs from marginal-weighted conditionals " << implied;
        warnings_.push_back(os.str());
      }
    }
  }
}

BinnedDistribution TrainingModel::marginal_distribution() const {
  const double sum = std::accumulate(feature_marginal_.begin(), feature_marginal_.end(), 0.0);
  std::vector<double> w(feature_marginal_);
  for (double& v : w) v /= sum;
  return BinnedDistribution(support_, std::move(w), 1e-9);
}

std::vector<BinnedDistribution> TrainingModel::class_densities() const {
  std::vector<BinnedDistribution> out;
  out.reserve(class_count());
  for (std::size_t i = 0; i < class_count(); ++i) {
    std::vector<double> f(bin_count());
    double sum = 0.0;
    for (std::size_t b = 0; b < bin_count(); ++b) {
      f[b] = feature_marginal_[b] * conditionals_[b][i];
      sum += f[b];
    }
    require(sum > 0.0, ErrorCode::Degenerate,
            "class '" + class_labels_[i] + "' has no training mass");
    for (double& v : f) v /= sum;
    out.emplace_back(support_, std::move(f), 1e-9);
  }
  return out;
}

// DensityRatioProfile

DensityRatioProfile::DensityRatioProfile(std::vector<std::string> support,
                                         std::vector<std::vector<double>> ratios,
                                         std::size_t reference_class)
    : support_(std::move(support)), ratios_(std::move(ratios)), reference_(reference_class) {
  require(!support_.empty() && support_.size() == ratios_.size(), ErrorCode::InvalidArgument,
          "ratio profile: support and ratio rows differ in length");
  check_unique(support_, "bin");
  class_count_ = ratios_.front().size();
  require(class_count_ >= 2, ErrorCode::InvalidArgument, "ratio profile needs k >= 2");
  require(reference_ < class_count_, ErrorCode::InvalidArgument,
          "ratio profile: reference class out of range");
  for (std::size_t b = 0; b < ratios_.size(); ++b) {
    const auto& row = ratios_[b];
    require(row.size() == class_count_, ErrorCode::InvalidArgument,
            "ratio profile: ragged rows");
    for (double x : row) {
      require(std::isfinite(x) && x >= 0.0, ErrorCode::InvalidArgument,
              "ratio profile: ratios must be finite and nonnegative (bin '" + support_[b] + "')");
    }
    require(row[reference_] == 1.0, ErrorCode::InvalidArgument,
            "ratio profile: reference column must be 1");
  }
  for (std::size_t i = 0; i < class_count_; ++i)
    if (i != reference_) free_.push_back(i);
  std::vector<double> uniform(support_.size(), 1.0);
  independent_ = detail::ratios_full_rank(*this, uniform);
}

std::vector<std::vector<double>> DensityRatioProfile::reduced() const {
  std::vector<std::vector<double>> out;
  out.reserve(ratios_.size());
  for (const auto& row : ratios_) {
    std::vector<double> r;
    r.reserve(free_.size());
    for (std::size_t i : free_) r.push_back(row[i]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace mixfit
