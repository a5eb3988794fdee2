#pragma once

// Geometry and spectra of 2xK submatrices of a 2xN matrix with unit columns.
//
// Column i is a_i = (cos t_i, sin t_i). Since a_i and -a_i give the same
// outer product, angles are only meaningful modulo pi and are stored
// normalized to [0, pi). The Gram matrix of a K-column selection is
//
//   G = sum_i a_i a_i^T,   trace(G) = K,
//
// and its eigenvalues follow from the pair-cosine sum
//
//   S = sum_{j<l} cos 2(t_l - t_j),   lambda = K/2 +- sqrt(K + 2 S) / 2.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace mincond {

inline constexpr double kPi = std::numbers::pi;

using Vec2 = std::array<double, 2>;

/// Reduces theta modulo pi into [0, pi). Throws std::invalid_argument on
/// NaN or infinity.
double normalize_angle(double theta);

/// N column angles, normalized to [0, pi).
///
/// The pre-normalization angles are kept alongside as metadata: the spectra
/// only see the mod-pi class, but a physical sensor placement on a circle
/// needs the full angle.
class AngleSet {
 public:
  AngleSet() = default;

  /// Normalizes every entry; keeps the inputs as raw().
  explicit AngleSet(std::vector<double> raw);

  /// For constructions that know the exact reduced values (e.g. integer
  /// arithmetic on multiples of pi/n). Each normalized[i] must lie in
  /// [0, pi) and agree with normalize_angle(raw[i]) modulo pi.
  static AngleSet from_parts(std::vector<double> normalized, std::vector<double> raw);

  std::size_t size() const noexcept { return angles_.size(); }
  bool empty() const noexcept { return angles_.empty(); }
  double operator[](std::size_t i) const { return angles_[i]; }

  std::span<const double> angles() const noexcept { return angles_; }
  std::span<const double> raw() const noexcept { return raw_; }

  /// Adds offset to every raw angle and renormalizes.
  AngleSet shifted(double offset) const;

 private:
  std::vector<double> angles_;
  std::vector<double> raw_;
};

struct UnitColumnMatrix {
  std::vector<Vec2> columns;

  std::size_t cols() const noexcept { return columns.size(); }
};

UnitColumnMatrix angles_to_matrix(const AngleSet& angles);

/// Strictly increasing column indices.
class SubsetSelection {
 public:
  SubsetSelection() = default;
  /// Throws std::invalid_argument unless indices are strictly increasing.
  explicit SubsetSelection(std::vector<std::size_t> indices);

  /// Throws std::out_of_range if an index is >= n.
  void check_range(std::size_t n) const;

  std::size_t size() const noexcept { return indices_.size(); }
  std::size_t operator[](std::size_t i) const { return indices_[i]; }
  std::span<const std::size_t> indices() const noexcept { return indices_; }
  const std::vector<std::size_t>& to_vector() const noexcept { return indices_; }

  std::string to_string() const;  // e.g. "0 1 2"

  auto operator<=>(const SubsetSelection&) const = default;

 private:
  std::vector<std::size_t> indices_;
};

struct EigenPair {
  double min = 0.0;
  double max = 0.0;
};

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct SymMat2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

/// Eigenvalues from trace and determinant, in the cancellation-free form
/// tr/2 +- hypot((xx - yy)/2, xy).
EigenPair symmetric_eigenvalues(const SymMat2& m);

struct SpectralSummary {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double gram_condition = 1.0;    // lambda_max / lambda_min, +inf if singular
  double matrix_condition = 1.0;  // sigma_max / sigma_min = sqrt(gram_condition)
  double pair_cosine_sum = 0.0;

  bool singular() const noexcept;
};

/// Rank tolerance on lambda_min for a K-column selection.
inline double rank_tolerance(std::size_t k) { return 1e-12 * static_cast<double>(k); }

/// cos 2(t_b - t_a) for one column pair; shared by every routine that sums
/// pair terms so their results agree bit for bit.
double pair_term(double theta_a, double theta_b);

double pair_cosine_sum(const AngleSet& angles, const SubsetSelection& subset);

/// Eigenvalues of A_S A_S^T from the pair-cosine sum.
EigenPair gram_eigenvalues_closed_form(const AngleSet& angles, const SubsetSelection& subset);
EigenPair eigenvalues_from_pair_sum(double pair_sum, std::size_t k);

/// Eigenvalues of A_S A_S^T built explicitly from the columns.
EigenPair gram_eigenvalues_direct(const AngleSet& angles, const SubsetSelection& subset);
SymMat2 gram_matrix(const AngleSet& angles, const SubsetSelection& subset);

SpectralSummary spectral_summary(const AngleSet& angles, const SubsetSelection& subset);
SpectralSummary summary_from_pair_sum(double pair_sum, std::size_t k);

std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Calls fn(std::span<const std::size_t>) for every k-subset of {0..n-1}
/// in lexicographic order. Requires k <= n.
template <typename Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(std::span<const std::size_t>(idx));
    if (k == 0) return;
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) return;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace mincond
