#include "mincond/search.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mincond/detail/parallel.hpp"
#include "mincond/errors.hpp"

namespace mincond {

namespace {

void check_k(std::size_t n, std::size_t k) {
  if (k < 1 || k > n) {
    throw std::invalid_argument("subset size k = " + std::to_string(k) +
                                " must satisfy 1 <= k <= N = " + std::to_string(n));
  }
}

// Row-major n x n table of pair_term for a < b.
std::vector<double> pair_table(std::span<const double> theta) {
  const std::size_t n = theta.size();
  std::vector<double> table(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) table[a * n + b] = pair_term(theta[a], theta[b]);
  }
  return table;
}

// Same summation order as pair_cosine_sum.
double subset_sum(const std::vector<double>& table, std::size_t n,
                  std::span<const std::size_t> idx) {
  double s = 0.0;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    for (std::size_t l = j + 1; l < idx.size(); ++l) s += table[idx[j] * n + idx[l]];
  }
  return s;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

}  // namespace

WorstCaseReport worst_subset(const AngleSet& angles, std::size_t k) {
  const std::size_t n = angles.size();
  check_k(n, k);
  const auto table = pair_table(angles.angles());

  WorstCaseReport report;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_idx;
  for_each_subset(n, k, [&](std::span<const std::size_t> idx) {
    const double s = subset_sum(table, n, idx);
    if (s > best) {
      best = s;
      best_idx.assign(idx.begin(), idx.end());
    }
    ++report.subsets_evaluated;
  });
  report.worst_subset = SubsetSelection(std::move(best_idx));
  report.objective = best;
  report.summary = summary_from_pair_sum(best, k);
  return report;
}

double worst_objective(std::span<const double> angles, std::size_t k) {
  const std::size_t n = angles.size();
  check_k(n, k);
  const auto table = pair_table(angles);
  double best = -std::numeric_limits<double>::infinity();
  for_each_subset(n, k, [&](std::span<const std::size_t> idx) {
    best = std::max(best, subset_sum(table, n, idx));
  });
  return best;
}

SigmaMinResult worst_sigma_min(const AngleSet& angles, std::size_t k) {
  const std::size_t n = angles.size();
  check_k(n, k);
  const auto table = pair_table(angles.angles());
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_idx;
  for_each_subset(n, k, [&](std::span<const std::size_t> idx) {
    const double lambda_min = eigenvalues_from_pair_sum(subset_sum(table, n, idx), k).min;
    if (lambda_min < best) {
      best = lambda_min;
      best_idx.assign(idx.begin(), idx.end());
    }
  });
  return {SubsetSelection(std::move(best_idx)), std::sqrt(best)};
}

std::uint64_t grid_evaluation_count(const MinimaxSearchConfig& config) {
  if (config.n < 1 || config.k < 1 || config.k > config.n || config.grid_points_per_angle < 2) {
    return 0;
  }
  const auto n = static_cast<std::uint64_t>(config.n);
  const auto g = static_cast<std::uint64_t>(config.grid_points_per_angle);
  // Non-decreasing (n-1)-tuples over g values: multisets of size n-1.
  const std::uint64_t points = n == 1 ? 1 : binomial(g + n - 2, n - 1);
  return saturating_mul(points, binomial(n, static_cast<std::uint64_t>(config.k)));
}

MinimaxSearchResult minimax_grid_search(const MinimaxSearchConfig& config) {
  if (config.n < 1) throw std::invalid_argument("minimax_grid_search: n must be >= 1");
  check_k(static_cast<std::size_t>(config.n), static_cast<std::size_t>(config.k));
  if (config.grid_points_per_angle < 2) {
    throw std::invalid_argument("minimax_grid_search: grid_points_per_angle must be >= 2");
  }
  if (config.refine_iterations < 0) {
    throw std::invalid_argument("minimax_grid_search: refine_iterations must be >= 0");
  }
  if (!(config.refine_shrink > 0.0 && config.refine_shrink < 1.0)) {
    throw std::invalid_argument("minimax_grid_search: refine_shrink must lie in (0, 1)");
  }
  const std::uint64_t cost = grid_evaluation_count(config);
  if (cost > config.max_evaluations) {
    throw ResourceLimitError("minimax grid search needs " + std::to_string(cost) +
                             " objective evaluations (limit " +
                             std::to_string(config.max_evaluations) +
                             "); reduce grid_points_per_angle or n");
  }

  const auto n = static_cast<std::size_t>(config.n);
  const auto k = static_cast<std::size_t>(config.k);
  const auto g = static_cast<std::size_t>(config.grid_points_per_angle);

  std::vector<double> cos_table(g);
  for (std::size_t d = 0; d < g; ++d) {
    cos_table[d] = std::cos(2.0 * kPi * static_cast<double>(d) / static_cast<double>(g));
  }
  std::vector<std::vector<std::size_t>> subsets;
  for_each_subset(n, k, [&](std::span<const std::size_t> idx) {
    subsets.emplace_back(idx.begin(), idx.end());
  });

  struct Best {
    double value = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> point;
    std::uint64_t visited = 0;
  };

  // Grid point idx[0..n-1] with idx[0] = 0 and idx non-decreasing; the
  // outer loop over idx[1] is split across workers.
  auto scan = [&](std::size_t first) {
    Best best;
    std::vector<std::size_t> idx(n, 0);
    if (n >= 2) {
      for (std::size_t i = 1; i < n; ++i) idx[i] = first;
    }
    std::vector<double> table(n * n, 0.0);
    while (true) {
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) table[a * n + b] = cos_table[idx[b] - idx[a]];
      }
      double worst = -std::numeric_limits<double>::infinity();
      for (const auto& s : subsets) {
        worst = std::max(worst, subset_sum(table, n, s));
        if (worst >= best.value) break;  // cannot beat the incumbent
      }
      ++best.visited;
      if (worst < best.value) {
        best.value = worst;
        best.point = idx;
      }
      // Odometer over idx[2..n-1], each in [idx[pos-1], g).
      std::size_t pos = n;
      while (pos > 2 && idx[pos - 1] + 1 >= g) --pos;
      if (pos <= 2) break;
      ++idx[pos - 1];
      for (std::size_t j = pos; j < n; ++j) idx[j] = idx[pos - 1];
    }
    return best;
  };

  const std::size_t outer = n >= 2 ? g : 1;
  std::vector<Best> slots(outer);
  detail::parallel_for(outer, [&](std::size_t v) { slots[v] = scan(v); });

  Best best;
  std::uint64_t visited = 0;
  for (auto& slot : slots) {
    visited += slot.visited;
    if (slot.value < best.value) best = std::move(slot);
  }

  std::vector<double> grid_angles(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid_angles[i] = kPi * static_cast<double>(best.point[i]) / static_cast<double>(g);
  }

  MinimaxSearchResult result;
  result.grid_angles = AngleSet(grid_angles);
  result.grid_objective = worst_objective(result.grid_angles.angles(), k);
  result.grid_points = visited;
  result.angles = local_refine(result.grid_angles, k, config.refine_iterations,
                               config.refine_shrink, kPi / static_cast<double>(g));
  result.report = worst_subset(result.angles, k);
  return result;
}

AngleSet local_refine(const AngleSet& angles, std::size_t k, int iterations, double shrink,
                      double initial_step) {
  check_k(angles.size(), k);
  if (iterations < 0) throw std::invalid_argument("local_refine: iterations must be >= 0");
  if (!(shrink > 0.0 && shrink < 1.0)) {
    throw std::invalid_argument("local_refine: shrink must lie in (0, 1)");
  }
  if (!(initial_step > 0.0) || !std::isfinite(initial_step)) {
    throw std::invalid_argument("local_refine: initial step must be positive and finite");
  }

  std::vector<double> theta(angles.angles().begin(), angles.angles().end());
  double current = worst_objective(theta, k);
  double step = initial_step;
  bool moved = false;

  for (int sweep = 0; sweep < iterations; ++sweep) {
    bool improved = false;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      for (double dir : {1.0, -1.0}) {
        const double saved = theta[i];
        theta[i] = normalize_angle(saved + dir * step);
        const double value = worst_objective(theta, k);
        if (value < current) {
          current = value;
          improved = true;
          break;
        }
        theta[i] = saved;
      }
    }
    moved = moved || improved;
    if (!improved) step *= shrink;
  }
  return moved ? AngleSet(std::move(theta)) : angles;
}

AngleSet local_refine(const AngleSet& angles, std::size_t k, int iterations, double shrink) {
  const double n = static_cast<double>(std::max<std::size_t>(1, angles.size()));
  return local_refine(angles, k, iterations, shrink, kPi / (4.0 * n));
}

}  // namespace mincond
