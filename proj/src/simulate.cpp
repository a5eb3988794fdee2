#include "mincond/simulate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mincond/detail/parallel.hpp"
#include "mincond/errors.hpp"
#include "mincond/search.hpp"

namespace mincond {

namespace {

// Streams keep the estimation and monitoring experiments independent.
constexpr std::uint64_t kEstimationStream = 1;
constexpr std::uint64_t kRssSampleStream = 0;
constexpr std::uint64_t kMonitoringStreamBase = 1000;

double norm(Vec2 v) { return std::hypot(v[0], v[1]); }
Vec2 sub(Vec2 a, Vec2 b) { return {a[0] - b[0], a[1] - b[1]}; }

// Normal equations for one fixed selection.
class LinearEstimator {
 public:
  LinearEstimator(const AngleSet& angles, const SubsetSelection& subset) {
    subset.check_range(angles.size());
    const SymMat2 g = gram_matrix(angles, subset);
    const EigenPair ev = symmetric_eigenvalues(g);
    if (ev.min <= rank_tolerance(subset.size())) {
      throw SingularityError("singular Gram matrix for columns {" + subset.to_string() + "}",
                             subset.to_vector());
    }
    lambda_min_ = ev.min;
    const double det = g.xx * g.yy - g.xy * g.xy;
    inv_ = {g.yy / det, -g.xy / det, g.xx / det};
    columns_.reserve(subset.size());
    for (std::size_t i : subset.indices()) {
      columns_.push_back({std::cos(angles[i]), std::sin(angles[i])});
    }
  }

  std::size_t k() const { return columns_.size(); }
  double sigma_min() const { return std::sqrt(lambda_min_); }
  double trace_inverse() const { return inv_.xx + inv_.yy; }

  double measure(std::size_t j, Vec2 x) const {
    return columns_[j][0] * x[0] + columns_[j][1] * x[1];
  }

  Vec2 solve(std::span<const double> y) const {
    double bx = 0.0, by = 0.0;
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      bx += columns_[j][0] * y[j];
      by += columns_[j][1] * y[j];
    }
    return {inv_.xx * bx + inv_.xy * by, inv_.xy * bx + inv_.yy * by};
  }

 private:
  std::vector<Vec2> columns_;
  SymMat2 inv_;
  double lambda_min_ = 0.0;
};

struct Moments {
  double mean = 0.0;
  double std_error = 0.0;
};

Moments moments(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  Moments m;
  if (values.empty()) return m;
  m.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return m;
}

}  // namespace

std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(trial),
                    static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

// ---------------------------------------------------------------------------
// Linear estimation

Vec2 least_squares_estimate(const AngleSet& angles, const SubsetSelection& subset,
                            std::span<const double> y) {
  if (y.size() != subset.size()) {
    throw std::invalid_argument("least_squares_estimate: expected " +
                                std::to_string(subset.size()) + " measurements, got " +
                                std::to_string(y.size()));
  }
  return LinearEstimator(angles, subset).solve(y);
}

ErrorBound error_bound_check(const AngleSet& angles, const SubsetSelection& subset,
                             std::span<const double> noise, Vec2 signal) {
  const LinearEstimator est(angles, subset);
  if (noise.size() != est.k()) {
    throw std::invalid_argument("error_bound_check: noise length must equal subset size");
  }
  std::vector<double> y(est.k());
  double w2 = 0.0;
  for (std::size_t j = 0; j < est.k(); ++j) {
    y[j] = est.measure(j, signal) + noise[j];
    w2 += noise[j] * noise[j];
  }
  const Vec2 x_hat = est.solve(y);
  return {norm(sub(x_hat, signal)), std::sqrt(w2) / est.sigma_min()};
}

MseEstimate simulate_subset_mse(const EstimationScenario& scenario,
                                const SubsetSelection& subset) {
  if (scenario.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(scenario.noise_std > 0.0)) throw std::invalid_argument("noise_std must be > 0");
  const LinearEstimator est(scenario.angles, subset);
  const auto trials = static_cast<std::size_t>(scenario.trials);

  std::vector<double> sq(trials), ex(trials), ey(trials);
  detail::parallel_for(trials, [&](std::size_t t) {
    auto rng = trial_stream(scenario.seed, kEstimationStream, t);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> y(est.k());
    for (std::size_t j = 0; j < est.k(); ++j) {
      y[j] = est.measure(j, scenario.signal) + scenario.noise_std * normal(rng);
    }
    const Vec2 e = sub(est.solve(y), scenario.signal);
    ex[t] = e[0];
    ey[t] = e[1];
    sq[t] = e[0] * e[0] + e[1] * e[1];
  });

  const Moments m = moments(sq), mx = moments(ex), my = moments(ey);
  MseEstimate out;
  out.subset = subset;
  out.mse = m.mean;
  out.std_error = m.std_error;
  out.expected_mse = scenario.noise_std * scenario.noise_std * est.trace_inverse();
  out.mean_error = {mx.mean, my.mean};
  out.mean_error_se = {mx.std_error, my.std_error};
  out.trials = scenario.trials;
  return out;
}

MseEstimate simulate_worst_case_mse(const EstimationScenario& scenario) {
  const WorstCaseReport worst = worst_subset(scenario.angles, scenario.k);
  return simulate_subset_mse(scenario, worst.worst_subset);
}

// ---------------------------------------------------------------------------
// Source monitoring

std::vector<Vec2> place_on_circle(const AngleSet& design, double radius, Vec2 center) {
  std::vector<Vec2> out;
  out.reserve(design.size());
  for (double r : design.raw()) {
    out.push_back({center[0] + radius * std::cos(r), center[1] + radius * std::sin(r)});
  }
  return out;
}

void validate(const RssScenario& s) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string(name) + " must be positive and finite");
    }
  };
  positive(s.sensor_radius, "sensor_radius");
  positive(s.amplitude, "amplitude");
  positive(s.path_loss, "path_loss");
  positive(s.locator_region_factor, "locator_region_factor");
  if (!(s.shadow_std >= 0.0) || !std::isfinite(s.shadow_std)) {
    throw std::invalid_argument("shadow_std must be non-negative and finite");
  }
  if (s.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (s.locator_grid < 3) throw std::invalid_argument("locator_grid must be >= 3");
  for (std::size_t i = 0; i < s.sensors.size(); ++i) {
    const double d = norm(sub(s.sensors[i], s.source));
    if (d < 1e-12) {
      throw std::invalid_argument("sensor " + std::to_string(i) + " coincides with the source");
    }
    if (d < s.sensor_radius - 1e-9) {
      throw std::invalid_argument("sensor " + std::to_string(i) +
                                  " is closer to the source than sensor_radius");
    }
  }
}

std::vector<double> rss_noiseless(const RssScenario& s, Vec2 emitter) {
  std::vector<double> out(s.sensors.size());
  const double log_a = std::log(s.amplitude);
  for (std::size_t i = 0; i < s.sensors.size(); ++i) {
    const double d = norm(sub(s.sensors[i], emitter));
    if (d < 1e-12) {
      throw std::invalid_argument("sensor " + std::to_string(i) + " coincides with the emitter");
    }
    out[i] = log_a - s.path_loss * std::log(d);
  }
  return out;
}

std::vector<double> rss_sample(const RssScenario& s, Vec2 emitter, std::mt19937_64& rng) {
  std::vector<double> out = rss_noiseless(s, emitter);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : out) v += s.shadow_std * normal(rng);
  return out;
}

std::vector<double> rss_sample(const RssScenario& s, std::uint64_t trial) {
  validate(s);
  auto rng = trial_stream(s.seed, kRssSampleStream, trial);
  return rss_sample(s, s.source, rng);
}

double FimSummary::condition() const noexcept {
  if (!(lambda_min > 0.0) || lambda_min <= 1e-12 * lambda_max) {
    return std::numeric_limits<double>::infinity();
  }
  return lambda_max / lambda_min;
}

double fim_prefactor(const RssScenario& s) {
  if (s.fim_scale == FimScale::Unit) return 1.0;
  if (!(s.shadow_std > 0.0)) {
    throw std::invalid_argument("FIM prefactor needs shadow_std > 0 (or FimScale::Unit)");
  }
  const double base = s.path_loss * s.path_loss / (s.shadow_std * s.shadow_std);
  if (s.fim_scale == FimScale::Base10) {
    const double ln10 = std::log(10.0);
    return base / (ln10 * ln10);
  }
  return base;
}

FimSummary fim(const RssScenario& s, const SubsetSelection& subset) {
  validate(s);
  subset.check_range(s.sensors.size());
  FimSummary out;
  out.prefactor = fim_prefactor(s);
  for (std::size_t i : subset.indices()) {
    const Vec2 r = sub(s.sensors[i], s.source);
    const double d2 = r[0] * r[0] + r[1] * r[1];
    const double w = out.prefactor / (d2 * d2);
    out.matrix.xx += w * r[0] * r[0];
    out.matrix.xy += w * r[0] * r[1];
    out.matrix.yy += w * r[1] * r[1];
  }
  const EigenPair ev = symmetric_eigenvalues(out.matrix);
  // Rounding can push the smaller eigenvalue of a rank-1 sum slightly negative.
  out.lambda_min = std::max(0.0, ev.min);
  out.lambda_max = ev.max;
  return out;
}

FimSummary fim(const RssScenario& s) {
  std::vector<std::size_t> all(s.sensors.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return fim(s, SubsetSelection(std::move(all)));
}

SubsetSelection worst_fim_subset(const RssScenario& s, std::size_t k) {
  validate(s);
  const std::size_t n = s.sensors.size();
  if (k < 1 || k > n) throw std::invalid_argument("worst_fim_subset: need 1 <= k <= N");
  RssScenario unit = s;
  unit.fim_scale = FimScale::Unit;
  double best = -1.0;
  std::vector<std::size_t> best_idx;
  for_each_subset(n, k, [&](std::span<const std::size_t> idx) {
    const double c = fim(unit, SubsetSelection({idx.begin(), idx.end()})).condition();
    if (c > best) {
      best = c;
      best_idx.assign(idx.begin(), idx.end());
    }
  });
  return SubsetSelection(std::move(best_idx));
}

LocateResult ml_locate(const RssScenario& s, std::span<const double> samples,
                       const SubsetSelection& active) {
  validate(s);
  active.check_range(s.sensors.size());
  if (samples.size() != s.sensors.size()) {
    throw std::invalid_argument("ml_locate: expected one sample per sensor");
  }
  if (active.size() < 3) {
    throw DegenerateGeometryError("ml_locate: at least three active sensors are required");
  }
  {
    Vec2 mean{0.0, 0.0};
    for (std::size_t i : active.indices()) {
      mean[0] += s.sensors[i][0];
      mean[1] += s.sensors[i][1];
    }
    mean[0] /= static_cast<double>(active.size());
    mean[1] /= static_cast<double>(active.size());
    SymMat2 scatter;
    for (std::size_t i : active.indices()) {
      const Vec2 r = sub(s.sensors[i], mean);
      scatter.xx += r[0] * r[0];
      scatter.xy += r[0] * r[1];
      scatter.yy += r[1] * r[1];
    }
    const EigenPair ev = symmetric_eigenvalues(scatter);
    if (ev.min <= 1e-12 * ev.max) {
      throw DegenerateGeometryError("ml_locate: active sensors {" + active.to_string() +
                                    "} are collinear");
    }
  }

  const double log_a = std::log(s.amplitude);
  const double beta = s.path_loss;
  const Vec2 c = s.source;
  const double radius = s.locator_region_factor * s.sensor_radius;

  auto residual = [&](Vec2 p) {
    double f = 0.0;
    for (std::size_t i : active.indices()) {
      const double d = norm(sub(s.sensors[i], p));
      if (d == 0.0) return std::numeric_limits<double>::infinity();
      const double r = samples[i] - log_a + beta * std::log(d);
      f += r * r;
    }
    return f;
  };
  auto inside = [&](Vec2 p) { return norm(sub(p, c)) <= radius; };

  const int g = s.locator_grid;
  const double h = 2.0 * radius / (g - 1);
  auto point = [&](int i, int j) { return Vec2{c[0] - radius + i * h, c[1] - radius + j * h}; };
  std::vector<double> f(static_cast<std::size_t>(g) * g, std::numeric_limits<double>::infinity());
  auto at = [&](int i, int j) -> double& { return f[static_cast<std::size_t>(i) * g + j]; };
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const Vec2 p = point(i, j);
      if (inside(p)) at(i, j) = residual(p);
    }
  }

  struct Candidate {
    double value;
    int i, j;
  };
  std::vector<Candidate> minima;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const double v = at(i, j);
      if (!std::isfinite(v)) continue;
      bool local = true;
      for (int di = -1; di <= 1 && local; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          const int a = i + di, b = j + dj;
          if ((di || dj) && a >= 0 && a < g && b >= 0 && b < g && at(a, b) < v) {
            local = false;
            break;
          }
        }
      }
      if (local) minima.push_back({v, i, j});
    }
  }
  if (minima.empty()) {
    throw DegenerateGeometryError("ml_locate: residual is not finite anywhere on the grid");
  }
  std::stable_sort(minima.begin(), minima.end(),
                   [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
  constexpr std::size_t kStarts = 4;
  if (minima.size() > kStarts) minima.resize(kStarts);

  static const double kDiag = std::sqrt(0.5);
  static const std::array<Vec2, 8> kDirections{{{1, 0}, {-1, 0}, {0, 1}, {0, -1},
                                                {kDiag, kDiag}, {-kDiag, -kDiag},
                                                {kDiag, -kDiag}, {-kDiag, kDiag}}};
  LocateResult best;
  best.residual = std::numeric_limits<double>::infinity();
  for (const Candidate& start : minima) {
    Vec2 p = point(start.i, start.j);
    double fp = start.value;
    double step = h;
    for (int iter = 0; iter < 200000 && step > 1e-13 * radius; ++iter) {
      bool improved = false;
      for (const Vec2& d : kDirections) {
        const Vec2 q{p[0] + step * d[0], p[1] + step * d[1]};
        if (!inside(q)) continue;
        const double fq = residual(q);
        if (fq < fp) {
          p = q;
          fp = fq;
          improved = true;
          break;
        }
      }
      if (!improved) step *= 0.5;
    }
    if (fp < best.residual) {
      best.position = p;
      best.residual = fp;
    }
  }
  best.on_boundary = norm(sub(best.position, c)) > radius - h;
  return best;
}

double snr_reference_power(const RssScenario& s) { return s.path_loss * s.path_loss; }

double shadow_std_for_snr(const RssScenario& s, double snr_db) {
  if (!std::isfinite(snr_db)) throw std::invalid_argument("SNR must be finite");
  return std::sqrt(snr_reference_power(s) / std::pow(10.0, snr_db / 10.0));
}

std::vector<MonitoringPoint> simulate_monitoring(const RssScenario& scenario,
                                                 std::span<const double> snr_grid_db,
                                                 int trials) {
  validate(scenario);
  if (scenario.sensors.size() < 3) {
    throw std::invalid_argument("simulate_monitoring: need at least three sensors");
  }
  if (trials < 1) throw std::invalid_argument("simulate_monitoring: trials must be >= 1");
  const SubsetSelection subset = worst_fim_subset(scenario, 3);
  const auto n_trials = static_cast<std::size_t>(trials);

  std::vector<MonitoringPoint> out;
  out.reserve(snr_grid_db.size());
  for (std::size_t p = 0; p < snr_grid_db.size(); ++p) {
    RssScenario s = scenario;
    s.shadow_std = shadow_std_for_snr(scenario, snr_grid_db[p]);
    const std::vector<double> clean = rss_noiseless(s, s.source);

    std::vector<double> sq(n_trials);
    std::vector<char> boundary(n_trials, 0);
    detail::parallel_for(n_trials, [&](std::size_t t) {
      // Noise is drawn for the active sensors only, in index order, so two
      // designs run with the same seed see the same noise vectors.
      auto rng = trial_stream(s.seed, kMonitoringStreamBase + p, t);
      std::normal_distribution<double> normal(0.0, 1.0);
      std::vector<double> samples = clean;
      for (std::size_t i : subset.indices()) samples[i] += s.shadow_std * normal(rng);
      const LocateResult r = ml_locate(s, samples, subset);
      const Vec2 e = sub(r.position, s.source);
      sq[t] = e[0] * e[0] + e[1] * e[1];
      boundary[t] = r.on_boundary ? 1 : 0;
    });

    const Moments m = moments(sq);
    MonitoringPoint pt;
    pt.snr_db = snr_grid_db[p];
    pt.shadow_std = s.shadow_std;
    pt.subset = subset;
    pt.mse = m.mean;
    pt.std_error = m.std_error;
    pt.mse_db = 10.0 * std::log10(m.mean);
    pt.mse_db_se = m.mean > 0.0 ? 10.0 / std::log(10.0) * m.std_error / m.mean : 0.0;
    pt.boundary_hits = static_cast<int>(std::count(boundary.begin(), boundary.end(), 1));
    pt.trials = trials;
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace mincond
