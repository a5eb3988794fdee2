#include "mincond/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mincond {

double normalize_angle(double theta) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("normalize_angle: angle must be finite");
  }
  double r = std::fmod(theta, kPi);
  if (r < 0.0) r += kPi;
  // r + pi can round up to pi for tiny negative r.
  if (r >= kPi) r = 0.0;
  return r;
}

AngleSet::AngleSet(std::vector<double> raw) : raw_(std::move(raw)) {
  angles_.reserve(raw_.size());
  for (double t : raw_) angles_.push_back(normalize_angle(t));
}

AngleSet AngleSet::from_parts(std::vector<double> normalized, std::vector<double> raw) {
  if (normalized.size() != raw.size()) {
    throw std::invalid_argument("AngleSet: normalized and raw sizes differ");
  }
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    const double a = normalized[i];
    if (!(a >= 0.0 && a < kPi)) {
      throw std::invalid_argument("AngleSet: normalized angle outside [0, pi)");
    }
    const double d = std::abs(normalize_angle(raw[i]) - a);
    if (std::min(d, kPi - d) > 1e-9) {
      throw std::invalid_argument("AngleSet: raw angle is not congruent to its normalized value");
    }
  }
  AngleSet out;
  out.angles_ = std::move(normalized);
  out.raw_ = std::move(raw);
  return out;
}

AngleSet AngleSet::shifted(double offset) const {
  std::vector<double> raw(raw_);
  for (double& t : raw) t += offset;
  return AngleSet(std::move(raw));
}

UnitColumnMatrix angles_to_matrix(const AngleSet& angles) {
  UnitColumnMatrix m;
  m.columns.reserve(angles.size());
  for (double t : angles.angles()) m.columns.push_back({std::cos(t), std::sin(t)});
  return m;
}

SubsetSelection::SubsetSelection(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
  for (std::size_t i = 1; i < indices_.size(); ++i) {
    if (indices_[i] <= indices_[i - 1]) {
      throw std::invalid_argument("SubsetSelection: indices must be strictly increasing");
    }
  }
}

void SubsetSelection::check_range(std::size_t n) const {
  if (!indices_.empty() && indices_.back() >= n) {
    throw std::out_of_range("SubsetSelection: index " + std::to_string(indices_.back()) +
                            " out of range for " + std::to_string(n) + " columns");
  }
}

std::string SubsetSelection::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(indices_[i]);
  }
  return s;
}

EigenPair symmetric_eigenvalues(const SymMat2& m) {
  const double half_trace = 0.5 * (m.xx + m.yy);
  const double r = std::hypot(0.5 * (m.xx - m.yy), m.xy);
  return {half_trace - r, half_trace + r};
}

bool SpectralSummary::singular() const noexcept { return std::isinf(gram_condition); }

double pair_term(double theta_a, double theta_b) { return std::cos(2.0 * (theta_b - theta_a)); }

namespace {

double pair_sum_unchecked(std::span<const double> theta, std::span<const std::size_t> idx) {
  double s = 0.0;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    for (std::size_t l = j + 1; l < idx.size(); ++l) {
      s += pair_term(theta[idx[j]], theta[idx[l]]);
    }
  }
  return s;
}

}  // namespace

double pair_cosine_sum(const AngleSet& angles, const SubsetSelection& subset) {
  subset.check_range(angles.size());
  return pair_sum_unchecked(angles.angles(), subset.indices());
}

EigenPair eigenvalues_from_pair_sum(double pair_sum, std::size_t k) {
  const double kd = static_cast<double>(k);
  // K + 2S = |sum_i exp(2 i t_i)|^2 >= 0; negative values are rounding.
  const double radicand = std::max(0.0, kd + 2.0 * pair_sum);
  const double half_root = 0.5 * std::sqrt(radicand);
  return {std::max(0.0, 0.5 * kd - half_root), 0.5 * kd + half_root};
}

EigenPair gram_eigenvalues_closed_form(const AngleSet& angles, const SubsetSelection& subset) {
  return eigenvalues_from_pair_sum(pair_cosine_sum(angles, subset), subset.size());
}

SymMat2 gram_matrix(const AngleSet& angles, const SubsetSelection& subset) {
  subset.check_range(angles.size());
  SymMat2 g;
  for (std::size_t i : subset.indices()) {
    const double c = std::cos(angles[i]);
    const double s = std::sin(angles[i]);
    g.xx += c * c;
    g.xy += c * s;
    g.yy += s * s;
  }
  return g;
}

EigenPair gram_eigenvalues_direct(const AngleSet& angles, const SubsetSelection& subset) {
  return symmetric_eigenvalues(gram_matrix(angles, subset));
}

SpectralSummary summary_from_pair_sum(double pair_sum, std::size_t k) {
  const EigenPair ev = eigenvalues_from_pair_sum(pair_sum, k);
  SpectralSummary out;
  out.lambda_min = ev.min;
  out.lambda_max = ev.max;
  out.pair_cosine_sum = pair_sum;
  if (ev.min <= rank_tolerance(k)) {
    out.gram_condition = std::numeric_limits<double>::infinity();
    out.matrix_condition = std::numeric_limits<double>::infinity();
  } else {
    out.gram_condition = ev.max / ev.min;
    out.matrix_condition = std::sqrt(out.gram_condition);
  }
  return out;
}

SpectralSummary spectral_summary(const AngleSet& angles, const SubsetSelection& subset) {
  return summary_from_pair_sum(pair_cosine_sum(angles, subset), subset.size());
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i stays exact: r is C(n-k+i-1, i-1).
    const std::uint64_t num = n - k + i;
    if (r > std::numeric_limits<std::uint64_t>::max() / num) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    r = r * num / i;
  }
  return r;
}

}  // namespace mincond
