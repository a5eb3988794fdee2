#pragma once

// Monte Carlo experiments on top of the designs:
//
//  * linear estimation y = A_S^T x + w from the worst K-column selection,
//    solved by least squares;
//  * source monitoring from received signal strength under log-normal
//    shadowing,
//
//      ln s_i = ln A - beta ln |x_i - z| + w_i,   w_i ~ N(0, sigma^2),
//
//    with the Fisher information
//
//      G = c * sum_i (x_i - z)(x_i - z)^T / |x_i - z|^4
//
//    and a grid-plus-pattern-search maximum likelihood locator.
//
// Every trial draws from its own generator seeded by (seed, stream, trial),
// so results do not depend on evaluation order or thread count.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "mincond/core.hpp"

namespace mincond {

inline constexpr std::string_view kRngAlgorithm =
    "std::mt19937_64 seeded with std::seed_seq{seed_lo, seed_hi, stream, trial_lo, trial_hi}; "
    "std::normal_distribution<double>";

/// Generator for one trial of one experiment stream.
std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial);

// ---------------------------------------------------------------------------
// Linear estimation

struct EstimationScenario {
  AngleSet angles;
  std::size_t k = 3;
  Vec2 signal{9.0, 9.0};
  double noise_std = 1.0;
  int trials = 2000;
  std::uint64_t seed = 0;
};

/// x_hat = (A_S A_S^T)^{-1} A_S y. Throws SingularityError when
/// lambda_min <= rank_tolerance(K), std::invalid_argument when y has the
/// wrong length.
Vec2 least_squares_estimate(const AngleSet& angles, const SubsetSelection& subset,
                            std::span<const double> y);

struct ErrorBound {
  double error = 0.0;  // |x_hat - x|
  double bound = 0.0;  // |w| / sigma_min
  bool holds() const noexcept { return error <= bound + 1e-10; }
};

/// Estimation error for noise w against the |w| / sigma_min bound.
ErrorBound error_bound_check(const AngleSet& angles, const SubsetSelection& subset,
                             std::span<const double> noise, Vec2 signal = {9.0, 9.0});

struct MseEstimate {
  SubsetSelection subset;
  double mse = 0.0;           // mean |x_hat - x|^2
  double std_error = 0.0;     // standard error of mse
  double expected_mse = 0.0;  // noise_std^2 * trace((A_S A_S^T)^{-1})
  Vec2 mean_error{0.0, 0.0};
  Vec2 mean_error_se{0.0, 0.0};
  int trials = 0;
};

/// MSE on a fixed selection.
MseEstimate simulate_subset_mse(const EstimationScenario& scenario, const SubsetSelection& subset);

/// MSE on the worst selection of the scenario's design (chosen once; the
/// noise does not change the selection's spectrum).
MseEstimate simulate_worst_case_mse(const EstimationScenario& scenario);

// ---------------------------------------------------------------------------
// Source monitoring

enum class FimScale {
  NaturalLog,  // beta^2 / sigma^2, matching natural-log shadowing noise
  Base10,      // beta^2 / (sigma^2 (ln 10)^2)
  Unit,        // 1
};

struct RssScenario {
  Vec2 source{0.0, 0.0};
  double sensor_radius = 1.0;
  std::vector<Vec2> sensors;
  double amplitude = 1.0;
  double path_loss = 2.0;
  double shadow_std = 0.1;
  int trials = 2000;
  std::uint64_t seed = 0;
  FimScale fim_scale = FimScale::NaturalLog;
  int locator_grid = 101;               // points per axis of the coarse ML grid
  double locator_region_factor = 2.0;   // ML search disc radius / sensor_radius
};

/// Sensor i at center + radius * (cos r_i, sin r_i), r_i the raw design angle.
std::vector<Vec2> place_on_circle(const AngleSet& design, double radius, Vec2 center = {0.0, 0.0});

/// Throws std::invalid_argument on non-positive parameters, a sensor on top
/// of the source, or a sensor closer than sensor_radius (1e-9 slack).
void validate(const RssScenario& scenario);

/// Noise-free log-RSS at every sensor for an emitter at `emitter`.
std::vector<double> rss_noiseless(const RssScenario& scenario, Vec2 emitter);
/// One noisy draw from an emitter at `emitter`.
std::vector<double> rss_sample(const RssScenario& scenario, Vec2 emitter, std::mt19937_64& rng);
/// One noisy draw from scenario.source using trial_stream(seed, 0, trial).
std::vector<double> rss_sample(const RssScenario& scenario, std::uint64_t trial = 0);

struct FimSummary {
  SymMat2 matrix;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double prefactor = 1.0;

  double condition() const noexcept;  // +inf when lambda_min <= 0
};

double fim_prefactor(const RssScenario& scenario);
FimSummary fim(const RssScenario& scenario);
FimSummary fim(const RssScenario& scenario, const SubsetSelection& subset);

/// Selection of k sensors with the largest FIM condition number
/// (lexicographic tie-break).
SubsetSelection worst_fim_subset(const RssScenario& scenario, std::size_t k = 3);

struct LocateResult {
  Vec2 position{0.0, 0.0};
  double residual = 0.0;
  bool on_boundary = false;  // minimizer pinned to the search disc edge
};

/// Least-squares fit of the log-distance model over the active sensors,
/// which is the ML estimate under Gaussian shadowing. Searches a disc of
/// radius locator_region_factor * sensor_radius about scenario.source:
/// coarse grid, then compass search from the best grid-local minima.
/// Throws DegenerateGeometryError for fewer than three or collinear active
/// sensors.
LocateResult ml_locate(const RssScenario& scenario, std::span<const double> samples,
                       const SubsetSelection& active);

/// Reference power for the SNR axis: beta^2, so SNR(dB) = 10 log10(beta^2 / sigma^2).
double snr_reference_power(const RssScenario& scenario);
double shadow_std_for_snr(const RssScenario& scenario, double snr_db);
inline constexpr std::string_view kSnrConvention =
    "SNR_dB = 10*log10(path_loss^2 / shadow_std^2)";

struct MonitoringPoint {
  double snr_db = 0.0;
  double shadow_std = 0.0;
  SubsetSelection subset;
  double mse = 0.0;  // mean |z_hat - z|^2
  double std_error = 0.0;
  double mse_db = 0.0;     // 10 log10(mse)
  double mse_db_se = 0.0;  // delta-method standard error of mse_db
  int boundary_hits = 0;
  int trials = 0;
};

/// For each SNR point: localize the source from the worst-conditioned
/// sensor triple over `trials` shadowing draws.
std::vector<MonitoringPoint> simulate_monitoring(const RssScenario& scenario,
                                                 std::span<const double> snr_grid_db, int trials);

}  // namespace mincond
