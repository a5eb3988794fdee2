#pragma once

// Worst-case evaluation over all K-column selections, and a brute-force
// minimax optimizer over angle configurations.
//
// The inner maximization is carried out on the pair-cosine sum S rather
// than on the condition number: for fixed K, lambda_min is strictly
// decreasing in S, so both have the same maximizing selection, and S stays
// finite where the condition number is +inf.

#include <cstddef>
#include <cstdint>
#include <span>

#include "mincond/core.hpp"

namespace mincond {

struct WorstCaseReport {
  SubsetSelection worst_subset;
  double objective = 0.0;  // pair_cosine_sum at worst_subset
  SpectralSummary summary;
  std::uint64_t subsets_evaluated = 0;
};

/// Exhaustive over C(N, k) selections. Ties go to the lexicographically
/// smallest index tuple. Throws std::invalid_argument unless 1 <= k <= N.
WorstCaseReport worst_subset(const AngleSet& angles, std::size_t k);

/// max over k-selections of the pair-cosine sum; same value as
/// worst_subset(...).objective.
double worst_objective(std::span<const double> angles, std::size_t k);

struct SigmaMinResult {
  SubsetSelection subset;
  double sigma_min = 0.0;
};

/// Selection with the smallest sigma_min(A_S) = sqrt(lambda_min).
SigmaMinResult worst_sigma_min(const AngleSet& angles, std::size_t k);

struct MinimaxSearchConfig {
  int n = 3;
  int k = 3;
  int grid_points_per_angle = 180;
  int refine_iterations = 200;
  double refine_shrink = 0.5;
  std::uint64_t seed = 0;  // recorded for run manifests; the search is deterministic
  std::uint64_t max_evaluations = 1'000'000'000;
};

struct MinimaxSearchResult {
  AngleSet angles;         // after refinement
  WorstCaseReport report;  // worst case of `angles`
  AngleSet grid_angles;    // best grid point before refinement
  double grid_objective = 0.0;
  std::uint64_t grid_points = 0;
};

/// Objective evaluations (grid points x selections) the search would need.
/// Saturates at UINT64_MAX.
std::uint64_t grid_evaluation_count(const MinimaxSearchConfig& config);

/// Exhaustive grid over angle configurations, then local_refine from the
/// best grid point.
///
/// The objective is invariant under a common rotation and under permuting
/// the angles, so the grid only visits 0 = t_1 <= t_2 <= ... <= t_n < pi
/// with t_i on multiples of pi / grid_points_per_angle. Throws
/// ResourceLimitError when grid_evaluation_count exceeds max_evaluations.
MinimaxSearchResult minimax_grid_search(const MinimaxSearchConfig& config);

/// Coordinate descent on worst_objective. Each sweep visits every angle and
/// tries +step then -step, keeping the first strict improvement; a sweep
/// without any improvement multiplies step by shrink. Never increases the
/// objective; iterations == 0 returns the input unchanged.
AngleSet local_refine(const AngleSet& angles, std::size_t k, int iterations, double shrink,
                      double initial_step);

/// Same, with initial step pi / (4 N).
AngleSet local_refine(const AngleSet& angles, std::size_t k, int iterations, double shrink);

}  // namespace mincond
