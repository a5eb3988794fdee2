#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mincond/designs.hpp"
#include "mincond/errors.hpp"
#include "mincond/search.hpp"

using namespace mincond;

namespace {
constexpr double pi = kPi;
}

TEST_CASE("worst_subset examples") {
  const auto five = worst_subset(design_small_odd(5), 3);
  CHECK(five.objective == doctest::Approx(-0.19098300562505244).epsilon(1e-13));
  CHECK(five.worst_subset == SubsetSelection({0, 1, 2}));
  CHECK(five.subsets_evaluated == 10);

  // lambda = 3/2 +- sqrt(5)/2
  const auto seven = worst_subset(design_large_odd(7), 3);
  CHECK(seven.objective == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(seven.summary.lambda_min == doctest::Approx(1.5 - std::sqrt(5.0) / 2));
  CHECK(seven.summary.gram_condition == doctest::Approx((3 + std::sqrt(5.0)) / (3 - std::sqrt(5.0))));
  CHECK(seven.summary.gram_condition == doctest::Approx(6.8541019662496856).epsilon(1e-12));
  CHECK(seven.subsets_evaluated == 35);

  const auto tight = worst_subset(AngleSet({0, pi / 3, 2 * pi / 3}), 3);
  CHECK(tight.objective == doctest::Approx(-1.5));
  CHECK(tight.summary.gram_condition == doctest::Approx(1.0));

  CHECK_THROWS_AS(worst_subset(design_small_odd(3), 4), std::invalid_argument);
  CHECK_THROWS_AS(worst_subset(design_small_odd(3), 0), std::invalid_argument);
}

TEST_CASE("worst_subset objective is the pair sum of the reported subset") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, pi);
  for (int draw = 0; draw < 50; ++draw) {
    std::vector<double> raw(9);
    for (double& t : raw) t = u(rng);
    const AngleSet a(raw);
    const auto r = worst_subset(a, 3);
    CHECK(r.objective == pair_cosine_sum(a, r.worst_subset));
    CHECK(r.subsets_evaluated == binomial(9, 3));
    CHECK(r.objective == worst_objective(a.angles(), 3));
  }
}

TEST_CASE("random subset sampling never beats the exhaustive maximum") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, pi);
  std::vector<double> raw(14);
  for (double& t : raw) t = u(rng);
  const AngleSet a(raw);
  for (std::size_t k : {2u, 3u, 4u}) {
    const double best = worst_subset(a, k).objective;
    for (int i = 0; i < 10000; ++i) {
      std::vector<std::size_t> pool(14);
      for (std::size_t j = 0; j < 14; ++j) pool[j] = j;
      std::shuffle(pool.begin(), pool.end(), rng);
      pool.resize(k);
      std::sort(pool.begin(), pool.end());
      REQUIRE(pair_cosine_sum(a, SubsetSelection(pool)) <= best);
    }
  }
}

TEST_CASE("worst_sigma_min") {
  const auto r = worst_sigma_min(AngleSet({0, 0, pi / 2, pi / 2}), 3);
  CHECK(r.sigma_min == doctest::Approx(1.0));
  CHECK(r.subset == SubsetSelection({0, 1, 2}));

  CHECK(worst_sigma_min(design_small_odd(3), 3).sigma_min == doctest::Approx(std::sqrt(1.5)));
  CHECK(worst_sigma_min(AngleSet({0.4, 1.0, 0.4, 2.0, 0.4}), 3).sigma_min == 0.0);
  CHECK_THROWS_AS(worst_sigma_min(design_small_odd(3), 5), std::invalid_argument);
}

TEST_CASE("grid search recovers the optimal designs for small n") {
  struct Case {
    int n;
    double optimum;
  };
  for (const Case c : {Case{3, -1.5}, Case{4, -1.0}, Case{5, -0.19098300562505244}}) {
    CAPTURE(c.n);
    MinimaxSearchConfig cfg;
    cfg.n = c.n;
    const auto res = minimax_grid_search(cfg);
    CHECK(res.report.objective == doctest::Approx(c.optimum).epsilon(1e-10));
    CHECK(res.report.objective <= res.grid_objective);
    CHECK(std::abs(res.report.objective - worst_subset(design_optimal(c.n), 3).objective) <=
          1e-4);
    CHECK(res.grid_points == binomial(180 + c.n - 2, c.n - 1));

    // Rotating the result does not change its worst case.
    CHECK(std::abs(worst_subset(res.angles.shifted(0.731), 3).objective -
                   res.report.objective) <= 1e-10);
  }
}

TEST_CASE("grid search input validation and resource guard") {
  MinimaxSearchConfig cfg;
  cfg.n = 6;
  CHECK(grid_evaluation_count(cfg) > 1'000'000'000ULL);
  CHECK_THROWS_AS(minimax_grid_search(cfg), ResourceLimitError);

  cfg.n = 5;
  CHECK(grid_evaluation_count(cfg) == 45212895ULL * 10);

  cfg.grid_points_per_angle = 1;
  CHECK_THROWS_AS(minimax_grid_search(cfg), std::invalid_argument);
  cfg.grid_points_per_angle = 180;
  cfg.refine_shrink = 1.0;
  CHECK_THROWS_AS(minimax_grid_search(cfg), std::invalid_argument);
  cfg.refine_shrink = 0.5;
  cfg.k = 6;
  CHECK_THROWS_AS(minimax_grid_search(cfg), std::invalid_argument);
}

TEST_CASE("grid search is deterministic and k-generic") {
  MinimaxSearchConfig cfg;
  cfg.n = 4;
  cfg.k = 2;
  cfg.grid_points_per_angle = 60;
  const auto a = minimax_grid_search(cfg);
  const auto b = minimax_grid_search(cfg);
  CHECK(std::ranges::equal(a.angles.angles(), b.angles.angles()));
  CHECK(a.report.worst_subset == b.report.worst_subset);
  // Four lines at 45 degree spacing: worst pair has cos(pi/2) = 0.
  CHECK(a.report.objective == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("local_refine") {
  SUBCASE("theorem designs are not improved") {
    for (int n = 3; n <= 10; ++n) {
      CAPTURE(n);
      const AngleSet d = design_optimal(n);
      const double before = worst_subset(d, 3).objective;
      const double after = worst_subset(local_refine(d, 3, 200, 0.5), 3).objective;
      CHECK(after <= before);
      CHECK(after >= before - 1e-9);
    }
  }
  SUBCASE("zero iterations returns the input") {
    const AngleSet d = baseline_semicircle(7);
    const AngleSet r = local_refine(d, 3, 0, 0.5);
    CHECK(std::ranges::equal(r.angles(), d.angles()));
    CHECK(std::ranges::equal(r.raw(), d.raw()));
  }
  SUBCASE("uniform semicircle for n = 7 is a local minimax point") {
    // No single-angle move helps: each angle touches only 3 of the 7 tied
    // worst triples. The objective must not increase.
    const AngleSet d = baseline_semicircle(7);
    const double before = worst_subset(d, 3).objective;
    const double after = worst_subset(local_refine(d, 3, 200, 0.5), 3).objective;
    CHECK(after <= before);
  }
  SUBCASE("a perturbed start improves strictly and never gets worse") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> jitter(0.0, 0.15);
    for (int trial = 0; trial < 10; ++trial) {
      const AngleSet base = design_large_odd(7);
      std::vector<double> raw(base.angles().begin(), base.angles().end());
      for (double& t : raw) t += jitter(rng);
      const AngleSet start(raw);
      const double before = worst_subset(start, 3).objective;
      const double after = worst_subset(local_refine(start, 3, 300, 0.5), 3).objective;
      CHECK(after < before);
    }
  }
  CHECK_THROWS_AS(local_refine(design_small_odd(3), 3, -1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(local_refine(design_small_odd(3), 3, 1, 0.0), std::invalid_argument);
}

TEST_CASE("large odd designs beat the semicircle for n = 7..15") {
  for (int n = 7; n <= 15; n += 2) {
    CAPTURE(n);
    CHECK(worst_subset(design_large_odd(n), 3).objective <
          worst_subset(baseline_semicircle(n), 3).objective);
  }
}
