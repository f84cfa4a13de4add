#include "amlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "amlab/quadrature.hpp"
#include "amlab/stats.hpp"

namespace amlab {

ConcentrationEstimate concentration_function(const std::vector<double>& sorted,
                                             double lambda) {
  if (sorted.empty()) {
    throw std::invalid_argument("concentration_function: empty sample");
  }
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("concentration_function: lambda must be > 0");
  }
  if (!std::is_sorted(sorted.begin(), sorted.end())) {
    throw std::invalid_argument("concentration_function: input must be sorted");
  }
  const std::size_t n = sorted.size();
  std::size_t best = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (j < i) j = i;
    while (j + 1 < n && sorted[j + 1] <= sorted[i] + lambda) ++j;
    best = std::max(best, j - i + 1);
  }
  ConcentrationEstimate est;
  est.lambda = lambda;
  est.n_samples = n;
  est.q_hat = static_cast<double>(best) / static_cast<double>(n);
  return est;
}

KrScalingCheck kr_scaling_check(const TemplateKind& tmpl, double theta,
                                const std::vector<std::int64_t>& step_counts,
                                double window, std::int64_t trials,
                                std::uint64_t seed, int workers) {
  if (step_counts.size() < 3) {
    throw std::invalid_argument(
        "kr_scaling_check: need at least 3 step counts spanning two decades");
  }
  const auto [mn, mx] =
      std::minmax_element(step_counts.begin(), step_counts.end());
  if (*mn < 1 || *mx < 100 * *mn) {
    throw std::invalid_argument(
        "kr_scaling_check: step counts must span at least two decades");
  }
  if (workers < 1) workers = 1;

  KrScalingCheck check;
  check.step_counts = step_counts;
  std::vector<double> log_n, log_q;
  for (std::size_t idx = 0; idx < step_counts.size(); ++idx) {
    const std::int64_t n = step_counts[idx];
    std::vector<double> sums(static_cast<std::size_t>(trials));
    // deterministic block split across workers, one stream per block
    std::vector<std::thread> pool;
    const std::int64_t block = (trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::int64_t lo = w * block;
      const std::int64_t hi = std::min<std::int64_t>(trials, lo + block);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi, w, idx]() {
        Rng rng(stream_seed(seed, idx * 1000 + static_cast<std::size_t>(w)));
        for (std::int64_t t = lo; t < hi; ++t) {
          double sum = 0.0;
          for (std::int64_t k = 0; k < n; ++k) {
            sum += theta * sample_template(tmpl, 1, rng)[0];
          }
          sums[static_cast<std::size_t>(t)] = sum;
        }
      });
    }
    for (auto& th : pool) th.join();
    std::sort(sums.begin(), sums.end());
    const auto est = concentration_function(sums, window);
    check.q_hat.push_back(est.q_hat);
    if (est.q_hat * static_cast<double>(trials) < 100.0) {
      check.precision_warning = true;
    }
    log_n.push_back(std::log(static_cast<double>(n)));
    log_q.push_back(std::log(est.q_hat));
  }
  check.slope = linear_fit(log_n, log_q).slope;
  check.passed = std::abs(check.slope + 0.5) <= 0.05;
  return check;
}

namespace {

void require_laplace(const TargetDensity& target, const char* where) {
  if (target.kind() != TargetDensity::Kind::Laplace) {
    throw std::invalid_argument(std::string(where) +
                                ": requires a 1-d Laplace target");
  }
}

// Integrate over [cuts.front(), cuts.back()] with forced breakpoints. The
// breakpoints pin the scales of the integrand so no feature can fall between
// the nodes of a single wide panel.
double integrate_segments(const std::function<double(double)>& f,
                          std::vector<double> cuts, double lo, double hi,
                          double tol) {
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  int segments = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i] < lo || cuts[i + 1] > hi || !(cuts[i + 1] > cuts[i])) continue;
    ++segments;
  }
  const double seg_tol = tol / std::max(segments, 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i] < lo || cuts[i + 1] > hi || !(cuts[i + 1] > cuts[i])) continue;
    total += integrate(f, cuts[i], cuts[i + 1], seg_tol, 0.0).value;
  }
  return total;
}

// breakpoints at signed multiples of a scale around a center
void add_scale_cuts(std::vector<double>& cuts, double center, double scale) {
  for (double k : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    cuts.push_back(center - k * scale);
    cuts.push_back(center + k * scale);
  }
}

}  // namespace

double laplace_drift_v(const TargetDensity& laplace, double x) {
  require_laplace(laplace, "laplace_drift_v");
  return std::exp(std::abs(x - laplace.laplace_m()) / (2.0 * laplace.laplace_b()));
}

double drift_gap_at(double x, double s, double theta,
                    const TargetDensity& laplace, double quad_tol) {
  require_laplace(laplace, "drift_gap_at");
  const double m = laplace.laplace_m();
  const double b = laplace.laplace_b();
  const double sigma = theta * std::sqrt(s);
  // 1 - P_s V(x)/V(x) = int q(z) min{1, pi(y)/pi(x)} (1 - V(y)/V(x)) dz, y = x+z
  const auto integrand = [&](double z) {
    const double y = x + z;
    const double ax = std::abs(x - m), ay = std::abs(y - m);
    const double log_ratio = (ax - ay) / b;
    const double accept = std::exp(std::min(0.0, log_ratio));
    const double v_ratio = std::exp((ay - ax) / (2.0 * b));
    return normal_pdf(z, 0.0, sigma) * accept * (1.0 - v_ratio);
  };
  const double radius = std::max(50.0 * b, 10.0 * sigma);
  // breakpoints: proposal scale around the origin, target scale around the
  // kinks (the density peak y = m and the reflection point |y-m| = |x-m|)
  std::vector<double> cuts;
  add_scale_cuts(cuts, 0.0, sigma);
  for (double kink : {m - x, 2.0 * (m - x)}) {
    add_scale_cuts(cuts, kink, b);
  }
  return integrate_segments(integrand, std::move(cuts), -radius, radius,
                            quad_tol);
}

double drift_gap_split(double x, double s, double theta,
                       const TargetDensity& laplace, double quad_tol) {
  require_laplace(laplace, "drift_gap_split");
  const double m = laplace.laplace_m();
  const double b = laplace.laplace_b();
  const double sigma = theta * std::sqrt(s);
  const double xr = std::abs(x - m);  // work in centered coordinates
  const double xc = x - m;
  const auto gain = [&](double y) {  // |y| <= |x|: 1 - sqrt(pi(x)/pi(y))
    return (1.0 - std::exp(-(xr - std::abs(y)) / (2.0 * b))) *
           normal_pdf(y - xc, 0.0, sigma);
  };
  const auto loss = [&](double y) {  // |y| > |x|
    const double t = std::exp(-(std::abs(y) - xr) / (2.0 * b));
    return t * (1.0 - t) * normal_pdf(y - xc, 0.0, sigma);
  };
  const double radius = std::max(50.0 * b, 10.0 * sigma) + xr;
  std::vector<double> cuts;
  add_scale_cuts(cuts, xc, sigma);   // proposal mass sits around y = x
  add_scale_cuts(cuts, 0.0, b);      // |y| kink at the density peak
  add_scale_cuts(cuts, xr, b);       // reflection points
  add_scale_cuts(cuts, -xr, b);
  double total = 0.0;
  total += integrate_segments(gain, cuts, -xr, 0.0, quad_tol);
  total += integrate_segments(gain, cuts, 0.0, xr, quad_tol);
  total -= integrate_segments(loss, cuts, xr, radius, quad_tol);
  total -= integrate_segments(loss, cuts, -radius, -xr, quad_tol);
  return total;
}

DriftReport drift_profile(double s, double theta, const TargetDensity& laplace,
                          const std::vector<double>& x_grid,
                          double tail_threshold, double quad_tol) {
  require_laplace(laplace, "drift_profile");
  if (x_grid.empty()) throw std::invalid_argument("drift_profile: empty grid");
  const double m = laplace.laplace_m();
  DriftReport rep;
  rep.s = s;
  rep.theta = theta;
  rep.tail_threshold = tail_threshold;
  rep.grid_x = x_grid;
  rep.inf_tail = std::numeric_limits<double>::infinity();
  bool tail_seen = false;
  for (double x : x_grid) {
    const double gap = drift_gap_at(x, s, theta, laplace, quad_tol);
    rep.drift_gap.push_back(gap);
    if (std::abs(x - m) >= tail_threshold) {
      rep.inf_tail = std::min(rep.inf_tail, gap);
      tail_seen = true;
    }
  }
  if (!tail_seen) {
    throw std::invalid_argument("drift_profile: grid has no tail points");
  }
  rep.lambda_s = 1.0 - rep.inf_tail;
  // b in P_s V <= lambda_s V + b 1_C, from the grid: V(x)(1 - gap - lambda_s)
  const double b = laplace.laplace_b();
  double drift_b = 0.0;
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double v = std::exp(std::abs(x_grid[i] - m) / (2.0 * b));
    drift_b = std::max(drift_b, v * (rep.inf_tail - rep.drift_gap[i]));
  }
  rep.drift_b = drift_b;
  rep.delta_s =
      minorization_estimate(s, theta, laplace, tail_threshold).delta_s;
  return rep;
}

MinorizationEstimate minorization_estimate(double s, double theta,
                                           const TargetDensity& laplace,
                                           double tail_threshold,
                                           std::size_t grid_points) {
  require_laplace(laplace, "minorization_estimate");
  if (!(tail_threshold > 0.0)) {
    throw std::invalid_argument("minorization_estimate: M must be > 0");
  }
  const double m = laplace.laplace_m();
  const double b = laplace.laplace_b();
  const double big_m = tail_threshold;
  const double sigma = theta * std::sqrt(s);
  const double length = 2.0 * big_m;
  // analytic inner bound: proposal density at the largest in-set distance
  // times the worst density ratio over C
  const double q_floor = normal_pdf(2.0 * big_m, 0.0, sigma);
  const double ratio_floor = std::exp(-big_m / b);
  MinorizationEstimate est;
  est.delta_s = length * q_floor * ratio_floor;
  // grid evaluation of |C| inf_{x,y in C} q(y-x) min{1, pi(y)/pi(x)}
  double grid_inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= grid_points; ++i) {
    const double x = m - big_m + length * static_cast<double>(i) /
                                     static_cast<double>(grid_points);
    for (std::size_t j = 0; j <= grid_points; ++j) {
      const double y = m - big_m + length * static_cast<double>(j) /
                                       static_cast<double>(grid_points);
      const double log_ratio = (std::abs(x - m) - std::abs(y - m)) / b;
      const double val =
          normal_pdf(y - x, 0.0, sigma) * std::exp(std::min(0.0, log_ratio));
      grid_inf = std::min(grid_inf, val);
    }
  }
  est.grid_value = length * grid_inf;
  return est;
}

namespace {

std::function<double(double)> lookup_functional(const std::string& f_id) {
  if (f_id == "identity") return [](double x) { return x; };
  if (f_id == "square") return [](double x) { return x * x; };
  if (f_id.rfind("exp_abs:", 0) == 0) {
    const double gamma = std::stod(f_id.substr(8));
    if (!(gamma < 0.5)) {
      throw std::invalid_argument(
          "ergodic_average: exp_abs growth rate must stay below 1/2");
    }
    return [gamma](double x) { return std::exp(gamma * std::abs(x)); };
  }
  if (f_id.rfind("indicator:", 0) == 0) {
    const std::string rest = f_id.substr(10);
    const auto comma = rest.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("ergodic_average: indicator needs a,b");
    }
    const double a = std::stod(rest.substr(0, comma));
    const double b = std::stod(rest.substr(comma + 1));
    return [a, b](double x) { return (x >= a && x <= b) ? 1.0 : 0.0; };
  }
  throw std::invalid_argument("ergodic_average: unregistered functional " + f_id);
}

}  // namespace

SllnReport ergodic_average(const ChainTrace& trace, const std::string& f_id,
                           const TargetDensity& target) {
  if (trace.dim != 1) {
    throw std::invalid_argument("ergodic_average: needs a 1-d trace");
  }
  if (trace.record_every != 1) {
    throw insufficient_resolution(
        "ergodic_average: trace was thinned; rerun with record_every = 1");
  }
  if (target.kind() == TargetDensity::Kind::ImproperUniform) {
    throw std::invalid_argument(
        "ergodic_average: reference integral needs a proper 1-d target");
  }
  const auto f = lookup_functional(f_id);
  SllnReport rep;
  rep.f_id = f_id;

  // reference = int f dpi by quadrature, split at the density kink when known
  double center = 0.0, width = 1.0;
  if (target.kind() == TargetDensity::Kind::Laplace) {
    center = target.laplace_m();
    width = target.laplace_b();
  }
  const double radius = 50.0 * width;
  const auto integrand = [&](double x) {
    return f(x) * std::exp(target.log_density({x}));
  };
  rep.reference =
      integrate(integrand, center - radius, center, 1e-9, 0.0).value +
      integrate(integrand, center, center + radius, 1e-9, 0.0).value;

  const std::size_t count = trace.record_count();
  rep.running_means.reserve(count + 1);
  double sum = f(trace.initial.x[0]);
  rep.running_means.push_back(sum);
  for (std::size_t i = 0; i < count; ++i) {
    sum += f(trace.rec_x[i]);
    rep.running_means.push_back(sum / static_cast<double>(i + 2));
  }
  rep.final_error = std::abs(rep.running_means.back() - rep.reference);
  return rep;
}

EigenFloorReport eigen_floor(const std::vector<ChainTrace>& traces,
                             std::int64_t first_step, std::int64_t last_step) {
  if (traces.empty()) throw std::invalid_argument("eigen_floor: no traces");
  if (first_step < 1 || last_step <= first_step) {
    throw std::invalid_argument("eigen_floor: bad window");
  }
  EigenFloorReport rep;
  rep.trend_ratio = std::numeric_limits<double>::infinity();
  for (const auto& trace : traces) {
    if (last_step > trace.steps_completed) {
      throw std::invalid_argument("eigen_floor: window outside trace");
    }
    const std::int64_t mid = first_step + (last_step - first_step) / 2;
    double log_min_first = std::numeric_limits<double>::infinity();
    double log_min_second = std::numeric_limits<double>::infinity();
    for (std::int64_t k = first_step; k <= last_step; ++k) {
      const double ll = trace.log_lambda_min_at_step(k);
      if (k <= mid) {
        log_min_first = std::min(log_min_first, ll);
      } else {
        log_min_second = std::min(log_min_second, ll);
      }
    }
    const double log_min = std::min(log_min_first, log_min_second);
    rep.per_trace_log_min.push_back(log_min);
    rep.per_trace_min_lambda_min.push_back(std::exp(log_min));
    const double log_ratio = log_min_second - log_min_first;
    rep.per_trace_log_trend_ratio.push_back(log_ratio);
    const double ratio = std::exp(std::min(700.0, log_ratio));
    rep.per_trace_trend_ratio.push_back(ratio);
    rep.trend_ratio = std::min(rep.trend_ratio, ratio);
  }
  return rep;
}

}  // namespace amlab
