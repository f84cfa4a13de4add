#include "amlab/chain.hpp"

#include <cmath>
#include <stdexcept>

namespace amlab {

namespace {

constexpr double kRescaleTrigger = 0x1.0p300;
constexpr int kRescaleShift = 256;  // divide x,m by 2^256 and S by 2^512
constexpr double kRescaleFactor = 0x1.0p-256;

}  // namespace

AmState make_initial_state(Vector x1, Matrix s1) {
  Vector m1 = x1;
  return make_initial_state(std::move(x1), std::move(m1), std::move(s1));
}

AmState make_initial_state(Vector x1, Vector m1, Matrix s1) {
  AmState st;
  st.n = 1;
  st.x = std::move(x1);
  st.m = std::move(m1);
  st.s = std::move(s1);
  if (st.m.size() != st.x.size() || st.s.rows() != st.x.size() ||
      st.s.cols() != st.x.size()) {
    throw std::invalid_argument("initial state: dimension mismatch");
  }
  return st;
}

StepResult metropolis_step(const AmState& state, const ProposalSpec& spec,
                           const TargetDensity& target, Rng& rng) {
  if (target.dim() != state.x.size()) {
    throw std::invalid_argument("metropolis_step: target dimension mismatch");
  }
  const CovFactor factor = cholesky_factor(state.s);
  const MixtureDraw draw = propose_mixture(state.x, factor, spec, rng);
  StepResult res;
  res.used_fixed = draw.used_fixed;
  if (target.always_accepts()) {
    res.accepted = true;
    res.x_next = draw.y;
    return res;
  }
  const double delta = log_acceptance_ratio(target, state.x, draw.y);
  const double u = rng.uniform_pos();
  res.accepted = (delta >= 0.0) || (std::log(u) < delta);
  res.x_next = res.accepted ? draw.y : state.x;
  return res;
}

AmState am_update(const AmState& state, const Vector& x_next, double eta_next) {
  if (!(eta_next > 0.0) || !(eta_next < 1.0)) {
    throw std::invalid_argument("am_update: eta must lie in (0,1)");
  }
  const std::size_t d = state.x.size();
  AmState next;
  next.n = state.n + 1;
  next.x = x_next;
  next.m.resize(d);
  next.s = Matrix(d, d);
  // S uses the displacement from the old mean
  Vector v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = x_next[i] - state.m[i];
  for (std::size_t i = 0; i < d; ++i) {
    next.m[i] = (1.0 - eta_next) * state.m[i] + eta_next * x_next[i];
    for (std::size_t j = 0; j < d; ++j) {
      next.s(i, j) = (1.0 - eta_next) * state.s(i, j) + eta_next * v[i] * v[j];
    }
  }
  return next;
}

Vector ChainTrace::record_x(std::size_t i) const {
  return Vector(rec_x.begin() + static_cast<std::ptrdiff_t>(i * dim),
                rec_x.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
}

Vector ChainTrace::record_m(std::size_t i) const {
  return Vector(rec_m.begin() + static_cast<std::ptrdiff_t>(i * dim),
                rec_m.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
}

Matrix ChainTrace::record_s(std::size_t i) const {
  Matrix s(dim, dim);
  std::size_t idx = i * dim * (dim + 1) / 2;
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = r; c < dim; ++c) {
      s(r, c) = rec_s_upper[idx];
      s(c, r) = rec_s_upper[idx];
      ++idx;
    }
  }
  return s;
}

double ChainTrace::acceptance_rate() const {
  if (accepted.empty()) return 0.0;
  std::size_t count = 0;
  for (auto a : accepted) count += a;
  return static_cast<double>(count) / static_cast<double>(accepted.size());
}

double ChainTrace::log_lambda_min_at_step(std::int64_t k) const {
  const auto idx = static_cast<std::size_t>(k - 1);
  return std::log(lambda_min[idx]) +
         2.0 * static_cast<double>(log2_scale[idx]) * std::log(2.0);
}

namespace {

struct Recorder {
  ChainTrace& trace;
  std::int64_t record_every;
  std::int64_t n_steps;
  std::size_t d;

  void reserve() {
    const auto steps = static_cast<std::size_t>(n_steps);
    trace.lambda_min.reserve(steps);
    trace.log2_scale.reserve(steps);
    trace.accepted.reserve(steps);
    trace.used_fixed.reserve(steps);
    trace.m_dense.reserve(steps * d);
    trace.s_diag_dense.reserve(steps * d);
    const auto records = static_cast<std::size_t>(n_steps / record_every + 2);
    trace.rec_n.reserve(records);
    trace.rec_x.reserve(records * d);
    trace.rec_m.reserve(records * d);
    trace.rec_s_upper.reserve(records * d * (d + 1) / 2);
    trace.rec_lambda_min.reserve(records);
    trace.rec_log2_scale.reserve(records);
    trace.rec_accepted.reserve(records);
    trace.rec_used_fixed.reserve(records);
  }

  void dense(double lam, std::int32_t scale, bool acc, bool fixed,
             const Vector& m, const Matrix& s) {
    trace.lambda_min.push_back(lam);
    trace.log2_scale.push_back(scale);
    trace.accepted.push_back(acc ? 1 : 0);
    trace.used_fixed.push_back(fixed ? 1 : 0);
    for (std::size_t i = 0; i < d; ++i) trace.m_dense.push_back(m[i]);
    for (std::size_t i = 0; i < d; ++i) trace.s_diag_dense.push_back(s(i, i));
  }

  bool due(std::int64_t step) const {
    return step % record_every == 0 || step == n_steps;
  }

  void full(std::int64_t n, const Vector& x, const Vector& m, const Matrix& s,
            double lam, std::int32_t scale, bool acc, bool fixed) {
    trace.rec_n.push_back(n);
    for (std::size_t i = 0; i < d; ++i) trace.rec_x.push_back(x[i]);
    for (std::size_t i = 0; i < d; ++i) trace.rec_m.push_back(m[i]);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = r; c < d; ++c) trace.rec_s_upper.push_back(s(r, c));
    trace.rec_lambda_min.push_back(lam);
    trace.rec_log2_scale.push_back(scale);
    trace.rec_accepted.push_back(acc ? 1 : 0);
    trace.rec_used_fixed.push_back(fixed ? 1 : 0);
  }
};

// General-target engine: S stored as a full matrix, refactored every step so
// that a loss of positive definiteness is detected exactly where it happens.
void run_raw(ChainTrace& trace, const TargetDensity& target,
             const ProposalSpec& spec, const WeightSchedule& schedule,
             std::int64_t n_steps, Rng& rng) {
  const std::size_t d = trace.dim;
  Recorder rec{trace, trace.record_every, n_steps, d};
  rec.reserve();
  AmState state = trace.initial;
  CovFactor factor;
  try {
    factor = cholesky_factor(state.s);
  } catch (const not_positive_definite& e) {
    trace.collapse = CollapseDiagnostic{0, state.s, e.what()};
    return;
  }
  for (std::int64_t step = 1; step <= n_steps; ++step) {
    const MixtureDraw draw = propose_mixture(state.x, factor, spec, rng);
    bool acc;
    Vector x_next;
    if (target.always_accepts()) {
      acc = true;
      x_next = draw.y;
    } else {
      const double delta = log_acceptance_ratio(target, state.x, draw.y);
      const double u = rng.uniform_pos();
      acc = (delta >= 0.0) || (std::log(u) < delta);
      x_next = acc ? draw.y : state.x;
    }
    const double eta = schedule.weight(state.n + 1);
    state = am_update(state, x_next, eta);
    try {
      factor = cholesky_factor(state.s);
    } catch (const not_positive_definite& e) {
      trace.collapse = CollapseDiagnostic{step, state.s, e.what()};
      trace.steps_completed = step - 1;
      return;
    }
    const double lam = lambda_min_from_factor(factor.lower);
    rec.dense(lam, 0, acc, draw.used_fixed, state.m, state.s);
    if (rec.due(step)) {
      rec.full(state.n, state.x, state.m, state.s, lam, 0, acc, draw.used_fixed);
    }
    trace.steps_completed = step;
  }
}

// Always-accept engine for improper uniform targets. S is carried as its
// Cholesky factor (updated by QR) because the uniform-target chain grows S
// exponentially and raw matrix entries lose the small eigenvalues to
// cancellation long before the run ends. Rescaling by exact powers of two
// keeps every quantity inside double range without changing any mantissa.
void run_factored(ChainTrace& trace, const ProposalSpec& spec,
                  const WeightSchedule& schedule, std::int64_t n_steps,
                  Rng& rng) {
  const std::size_t d = trace.dim;
  Recorder rec{trace, trace.record_every, n_steps, d};
  rec.reserve();

  Vector x = trace.initial.x;
  Vector m = trace.initial.m;
  Matrix lower;
  try {
    lower = cholesky(trace.initial.s);
  } catch (const not_positive_definite& e) {
    trace.collapse = CollapseDiagnostic{0, trace.initial.s, e.what()};
    return;
  }
  std::int64_t n = trace.initial.n;
  std::int32_t scale = 0;

  const auto reconstruct = [&](const Matrix& l) {
    Matrix s(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        double sum = 0.0;
        for (std::size_t k = 0; k <= j; ++k) sum += l(i, k) * l(j, k);
        s(i, j) = sum;
        s(j, i) = sum;
      }
    return s;
  };

  Vector v(d);
  for (std::int64_t step = 1; step <= n_steps; ++step) {
    const MixtureDraw draw = propose_mixture(x, CovFactor{lower}, spec, rng);
    const Vector& y = draw.y;
    const double eta = schedule.weight(n + 1);
    for (std::size_t i = 0; i < d; ++i) v[i] = y[i] - m[i];
    for (std::size_t i = 0; i < d; ++i) m[i] = (1.0 - eta) * m[i] + eta * y[i];
    x = y;
    lower = factored_rank_one_update(lower, v, 1.0 - eta, eta);
    ++n;

    double lam;
    try {
      lam = lambda_min_from_factor(lower);
    } catch (const not_positive_definite& e) {
      trace.collapse = CollapseDiagnostic{step, reconstruct(lower), e.what()};
      trace.steps_completed = step - 1;
      return;
    }

    double max_abs = 0.0;
    for (double e : lower.data()) max_abs = std::max(max_abs, std::abs(e));
    if (max_abs > kRescaleTrigger) {
      for (auto& e : lower.data()) e *= kRescaleFactor;
      for (auto& e : x) e *= kRescaleFactor;
      for (auto& e : m) e *= kRescaleFactor;
      lam *= kRescaleFactor * kRescaleFactor;
      scale += kRescaleShift;
    }

    Matrix s_diag_only(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      double sum = 0.0;
      for (std::size_t k = 0; k <= i; ++k) sum += lower(i, k) * lower(i, k);
      s_diag_only(i, i) = sum;
    }
    rec.dense(lam, scale, true, draw.used_fixed, m, s_diag_only);
    if (rec.due(step)) {
      rec.full(n, x, m, reconstruct(lower), lam, scale, true, draw.used_fixed);
    }
    trace.steps_completed = step;
  }
}

}  // namespace

ChainTrace run_am(const TargetDensity& target, const ProposalSpec& spec,
                  const WeightSchedule& schedule, const AmState& init,
                  std::int64_t n_steps, std::int64_t record_every,
                  std::uint64_t seed) {
  if (n_steps < 1) throw std::invalid_argument("run_am: n_steps must be >= 1");
  if (record_every < 1) {
    throw std::invalid_argument("run_am: record_every must be >= 1");
  }
  if (target.dim() != init.x.size()) {
    throw std::invalid_argument("run_am: target dimension mismatch");
  }
  spec.validate();
  ChainTrace trace;
  trace.dim = init.x.size();
  trace.seed = seed;
  trace.record_every = record_every;
  trace.initial = init;
  trace.theta = spec.theta;
  trace.schedule = schedule;
  Rng rng(seed);
  if (target.always_accepts()) {
    run_factored(trace, spec, schedule, n_steps, rng);
  } else {
    run_raw(trace, target, spec, schedule, n_steps, rng);
  }
  return trace;
}

ChainTrace run_adaptive_random_walk(const ProposalSpec& spec,
                                    const WeightSchedule& schedule,
                                    const AmState& init, std::int64_t n_steps,
                                    std::int64_t record_every,
                                    std::uint64_t seed) {
  return run_am(TargetDensity::improper_uniform(init.x.size()), spec, schedule,
                init, n_steps, record_every, seed);
}

ZSeries z_sequence(const ChainTrace& trace, const Vector& u) {
  if (trace.record_every != 1) {
    throw insufficient_resolution(
        "z_sequence: trace was thinned; rerun with record_every = 1");
  }
  if (u.size() != trace.dim) {
    throw std::invalid_argument("z_sequence: direction dimension mismatch");
  }
  const double norm = std::sqrt(dot(u, u));
  if (std::abs(norm - 1.0) > 1e-12) {
    throw std::invalid_argument("z_sequence: direction must be a unit vector");
  }

  ZSeries zs;
  zs.u = u;
  const std::size_t count = trace.record_count();
  zs.z.reserve(count);
  zs.cum_log_growth.reserve(count);
  double cum = 0.0;
  Vector m_prev = trace.initial.m;
  Matrix s_prev = trace.initial.s;
  std::int32_t scale_prev = 0;
  std::int64_t n_prev = trace.initial.n;
  for (std::size_t i = 0; i < count; ++i) {
    const Vector x_next = trace.record_x(i);
    const std::int32_t scale_next = trace.rec_log2_scale[i];
    // bring X_{n+1} to the scale of (M_n, S_n); exponent steps are exact
    const double rescale = std::ldexp(1.0, scale_next - scale_prev);
    double disp = 0.0;
    for (std::size_t j = 0; j < trace.dim; ++j) {
      disp += u[j] * (x_next[j] * rescale - m_prev[j]);
    }
    const double denom2 = quadratic_form(s_prev, u);
    if (!(denom2 > 0.0)) {
      throw not_positive_definite(0, denom2);
    }
    const double z = disp / std::sqrt(denom2);
    zs.z.push_back(z);
    const double eta = trace.schedule.weight(n_prev + 1);
    cum += std::log1p(eta * (z * z - 1.0));
    zs.cum_log_growth.push_back(cum);

    m_prev = trace.record_m(i);
    s_prev = trace.record_s(i);
    scale_prev = scale_next;
    n_prev = trace.rec_n[i];
  }
  return zs;
}

}  // namespace amlab
