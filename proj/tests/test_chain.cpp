#include <cmath>

#include "doctest.h"

#include "amlab/chain.hpp"
#include "amlab/stats.hpp"

using namespace amlab;

namespace {

ProposalSpec gaussian_spec(double theta) {
  ProposalSpec spec;
  spec.theta = theta;
  spec.tmpl = TemplateKind::gaussian();
  spec.beta = 0.0;
  return spec;
}

AmState unit_initial(std::size_t d) {
  return make_initial_state(Vector(d, 0.0), Matrix::identity(d));
}

bool traces_identical(const ChainTrace& a, const ChainTrace& b) {
  return a.rec_n == b.rec_n && a.rec_x == b.rec_x && a.rec_m == b.rec_m &&
         a.rec_s_upper == b.rec_s_upper && a.lambda_min == b.lambda_min &&
         a.log2_scale == b.log2_scale && a.accepted == b.accepted &&
         a.used_fixed == b.used_fixed && a.m_dense == b.m_dense &&
         a.s_diag_dense == b.s_diag_dense;
}

// scale-aware relative check of u^T S_{n+1} u = [1 + eta (Z^2 - 1)] u^T S_n u
void check_z_identity(const ChainTrace& trace, Rng& dir_rng, int n_dirs,
                      double tol) {
  for (int rep = 0; rep < n_dirs; ++rep) {
    Vector u(trace.dim);
    double norm2 = 0.0;
    for (auto& v : u) {
      v = dir_rng.normal();
      norm2 += v * v;
    }
    for (auto& v : u) v /= std::sqrt(norm2);
    const ZSeries zs = z_sequence(trace, u);

    Matrix s_prev = trace.initial.s;
    std::int32_t scale_prev = 0;
    std::int64_t n_prev = trace.initial.n;
    for (std::size_t i = 0; i < trace.record_count(); ++i) {
      const Matrix s_next = trace.record_s(i);
      const std::int32_t scale_next = trace.rec_log2_scale[i];
      const double eta = trace.schedule.weight(n_prev + 1);
      const double z = zs.z[i];
      const double log_lhs = std::log(quadratic_form(s_next, u)) +
                             2.0 * scale_next * std::log(2.0);
      const double log_rhs = std::log(quadratic_form(s_prev, u)) +
                             2.0 * scale_prev * std::log(2.0) +
                             std::log1p(eta * (z * z - 1.0));
      CHECK(std::abs(log_lhs - log_rhs) <= tol);
      s_prev = s_next;
      scale_prev = scale_next;
      n_prev = trace.rec_n[i];
    }
  }
}

}  // namespace

TEST_CASE("am_update recursion arithmetic") {
  // no displacement: the rank-one term vanishes
  AmState st = unit_initial(2);
  st.x = {1.0, -1.0};
  st.m = {0.5, 0.5};
  const AmState next = am_update(st, st.m, 0.3);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(next.s(i, j) == doctest::Approx(0.7 * st.s(i, j)).epsilon(1e-15));

  // hand example in one dimension
  AmState one = make_initial_state({0.0}, Matrix::identity(1));
  const AmState upd = am_update(one, {2.0}, 0.5);
  CHECK(upd.s(0, 0) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(upd.m[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(upd.n == 2);

  // eta -> 0 leaves the statistics unchanged
  const AmState tiny = am_update(one, {2.0}, 1e-13);
  CHECK(std::abs(tiny.s(0, 0) - 1.0) < 1e-11);
  CHECK(std::abs(tiny.m[0]) < 1e-11);

  CHECK_THROWS_AS(am_update(one, {2.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(am_update(one, {2.0}, 1.0), std::invalid_argument);
}

TEST_CASE("metropolis step accepts everything on a uniform target") {
  const auto target = TargetDensity::improper_uniform(2);
  AmState st = unit_initial(2);
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const auto res = metropolis_step(st, gaussian_spec(1.0), target, rng);
    CHECK(res.accepted);
    st.x = res.x_next;
  }
}

TEST_CASE("acceptance rate lands in a sane band for a fixed-spread proposal") {
  const auto target = TargetDensity::laplace(0.0, 1.0);
  AmState st = make_initial_state({0.0}, Matrix(1, 1));
  st.s(0, 0) = 2.0;
  Rng rng(23);
  int accepted = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto res = metropolis_step(st, gaussian_spec(2.4), target, rng);
    accepted += res.accepted ? 1 : 0;
    st.x = res.x_next;  // covariance held fixed on purpose
  }
  const double rate = static_cast<double>(accepted) / n;
  CHECK(rate > 0.2);
  CHECK(rate < 0.7);
}

TEST_CASE("runs are deterministic given the seed") {
  const auto target = TargetDensity::laplace(0.0, 1.0);
  const auto sched = WeightSchedule::power(1.0, 1.0);
  const auto t1 =
      run_am(target, gaussian_spec(2.4), sched, unit_initial(1), 2000, 7, 99);
  const auto t2 =
      run_am(target, gaussian_spec(2.4), sched, unit_initial(1), 2000, 7, 99);
  CHECK(traces_identical(t1, t2));
  const auto t3 =
      run_am(target, gaussian_spec(2.4), sched, unit_initial(1), 2000, 7, 100);
  CHECK_FALSE(traces_identical(t1, t3));
}

TEST_CASE("uniform-target fast path equals the explicit random-walk runner") {
  const auto sched = WeightSchedule::power(1.0, 0.9);
  const auto spec = gaussian_spec(0.7);
  const auto a = run_adaptive_random_walk(spec, sched, unit_initial(2), 3000, 1, 5);
  const auto b = run_am(TargetDensity::improper_uniform(2), spec, sched,
                        unit_initial(2), 3000, 1, 5);
  CHECK(traces_identical(a, b));
}

TEST_CASE("single-step run records exactly the post-step state") {
  const auto sched = WeightSchedule::power(1.0, 1.0);
  const auto trace = run_am(TargetDensity::laplace(0.0, 1.0), gaussian_spec(1.0),
                            sched, unit_initial(1), 1, 1, 3);
  CHECK(trace.record_count() == 1);
  CHECK(trace.rec_n.front() == 2);
  CHECK(trace.steps_completed == 1);
}

TEST_CASE("thinning cadence keeps every record_every-th state plus the final") {
  const auto sched = WeightSchedule::power(1.0, 1.0);
  const auto trace = run_am(TargetDensity::laplace(0.0, 1.0), gaussian_spec(1.0),
                            sched, unit_initial(1), 10, 3, 3);
  CHECK(trace.rec_n == std::vector<std::int64_t>{4, 7, 10, 11});
  CHECK(trace.lambda_min.size() == 10);
  CHECK(trace.m_dense.size() == 10);
}

TEST_CASE("rejected steps freeze X but still adapt M and S") {
  const auto target = TargetDensity::laplace(0.0, 1.0);
  const auto sched = WeightSchedule::power(1.0, 0.8);
  const auto trace =
      run_am(target, gaussian_spec(3.0), sched, unit_initial(1), 3000, 1, 11);
  int rejects_seen = 0;
  for (std::size_t i = 1; i < trace.record_count(); ++i) {
    if (!trace.rec_accepted[i]) {
      ++rejects_seen;
      CHECK(trace.rec_x[i] == trace.rec_x[i - 1]);
      CHECK(trace.rec_m[i] != trace.rec_m[i - 1]);
      CHECK(trace.rec_s_upper[i] != trace.rec_s_upper[i - 1]);
    }
  }
  CHECK(rejects_seen > 100);
}

TEST_CASE("positive definiteness is preserved along proper-target runs") {
  const auto sched = WeightSchedule::power(1.0, 1.0);
  for (std::size_t d : {1u, 2u, 3u}) {
    const auto target =
        d == 1 ? TargetDensity::laplace(0.0, 1.0)
               : TargetDensity::gaussian(Vector(d, 0.0), Matrix::identity(d));
    const auto trace = run_am(target, gaussian_spec(2.4 / std::sqrt(double(d))),
                              sched, unit_initial(d), 10000, 10000, d);
    CHECK_FALSE(trace.collapse.has_value());
    for (double lam : trace.lambda_min) CHECK(lam > 0.0);
  }
}

TEST_CASE("a singular initial covariance raises a collapse diagnostic") {
  Matrix s(2, 2);
  s(0, 0) = 1.0; s(0, 1) = 1.0; s(1, 0) = 1.0; s(1, 1) = 1.0;
  const auto trace = run_am(TargetDensity::gaussian({0.0, 0.0}, Matrix::identity(2)),
                            gaussian_spec(1.0), WeightSchedule::power(1.0, 1.0),
                            make_initial_state({0.0, 0.0}, s), 10, 1, 1);
  REQUIRE(trace.collapse.has_value());
  CHECK(trace.collapse->step == 0);
  CHECK(trace.steps_completed == 0);
}

TEST_CASE("covariance identity along the Z process holds at every step") {
  const auto sched = WeightSchedule::power(1.0, 1.0);
  Rng dir_rng(2024);
  for (std::size_t d : {1u, 2u, 3u}) {
    const auto gauss =
        TargetDensity::gaussian(Vector(d, 0.0), Matrix::identity(d));
    const auto am = run_am(gauss, gaussian_spec(1.0), sched, unit_initial(d),
                           2000, 1, 7 + d);
    check_z_identity(am, dir_rng, 5, 1e-10);
    const auto arw = run_adaptive_random_walk(gaussian_spec(0.5),
                                              WeightSchedule::power(1.0, 0.9),
                                              unit_initial(d), 2000, 1, 70 + d);
    check_z_identity(arw, dir_rng, 5, 1e-10);
  }
}

TEST_CASE("z identity survives power-of-two rescaling on fast-growing runs") {
  // large theta forces the growth through several rescale boundaries
  const auto trace = run_adaptive_random_walk(
      gaussian_spec(20.0), WeightSchedule::power(1.0, 0.6), unit_initial(1),
      10000, 1, 12);
  CHECK(trace.log2_scale.back() > 0);
  Rng dir_rng(55);
  check_z_identity(trace, dir_rng, 2, 1e-10);
  CHECK(trace.log_lambda_min_at_step(trace.steps_completed) > 100.0);
}

TEST_CASE("the engine matches the composed public step operations bit for bit") {
  const auto target = TargetDensity::laplace(0.0, 1.0);
  const auto sched = WeightSchedule::power(1.0, 0.8);
  const auto spec = gaussian_spec(2.0);
  const std::uint64_t seed = 321;
  const auto trace = run_am(target, spec, sched, unit_initial(1), 200, 1, seed);

  Rng rng(seed);
  AmState state = unit_initial(1);
  for (std::size_t i = 0; i < trace.record_count(); ++i) {
    const StepResult res = metropolis_step(state, spec, target, rng);
    state = am_update(state, res.x_next, sched.weight(state.n + 1));
    CHECK(trace.rec_x[i] == state.x[0]);
    CHECK(trace.rec_m[i] == state.m[0]);
    CHECK(trace.rec_s_upper[i] == state.s(0, 0));
    CHECK(trace.rec_accepted[i] == (res.accepted ? 1 : 0));
  }
}

TEST_CASE("tiny theta produces an initial decrease phase of S") {
  const auto trace = run_adaptive_random_walk(
      gaussian_spec(0.01), WeightSchedule::power(1.0, 1.0), unit_initial(1),
      10000, 10000, 19);
  // S_1 = 1; ten thousand steps in, the path is still below its start
  CHECK(trace.log_lambda_min_at_step(trace.steps_completed) < 0.0);
}

TEST_CASE("z sequence demands an unthinned trace and unit directions") {
  const auto sched = WeightSchedule::power(1.0, 1.0);
  const auto thinned = run_am(TargetDensity::laplace(0.0, 1.0), gaussian_spec(1.0),
                              sched, unit_initial(1), 100, 2, 1);
  CHECK_THROWS_AS(z_sequence(thinned, {1.0}), insufficient_resolution);
  const auto dense = run_am(TargetDensity::laplace(0.0, 1.0), gaussian_spec(1.0),
                            sched, unit_initial(1), 100, 1, 1);
  CHECK_THROWS_AS(z_sequence(dense, {0.5}), std::invalid_argument);
}

TEST_CASE("z equals one exactly when the displacement matches the scale") {
  // hand-built one-transition trace: X_2 - M_1 = S_1^{1/2} u with S_1 = 4
  ChainTrace trace;
  trace.dim = 1;
  trace.record_every = 1;
  trace.steps_completed = 1;
  trace.schedule = WeightSchedule::power(1.0, 1.0);
  trace.initial = make_initial_state({0.0}, Matrix(1, 1));
  trace.initial.s(0, 0) = 4.0;
  trace.rec_n = {2};
  trace.rec_x = {2.0};  // displacement 2 = sqrt(4)
  trace.rec_m = {1.0};
  trace.rec_s_upper = {4.0};
  trace.rec_lambda_min = {4.0};
  trace.rec_log2_scale = {0};
  trace.rec_accepted = {1};
  trace.rec_used_fixed = {0};
  const ZSeries zs = z_sequence(trace, {1.0});
  CHECK(zs.z.size() == 1);
  CHECK(zs.z[0] == 1.0);
  CHECK(zs.cum_log_growth[0] == 0.0);  // Z = 1 leaves u^T S u unchanged
}

TEST_CASE("reconstructed template draws behind the Z recursion look gaussian") {
  // uniform target, d = 1: W~_{n+1} = (Z_{n+1} - U_n Z_n) / theta should be
  // standard normal when the template is gaussian
  const double theta = 0.8;
  const auto trace = run_adaptive_random_walk(
      gaussian_spec(theta), WeightSchedule::power(1.0, 1.0), unit_initial(1),
      10000, 1, 31);
  const ZSeries zs = z_sequence(trace, {1.0});
  std::vector<double> w;
  for (std::size_t i = 1; i < zs.z.size(); ++i) {
    const std::int64_t n = trace.initial.n + static_cast<std::int64_t>(i);
    const double eta = trace.schedule.weight(n);  // eta_n for transition n->n+1
    const double z_prev = zs.z[i - 1];
    const double u_n =
        (1.0 - eta) / std::sqrt(1.0 + eta * (z_prev * z_prev - 1.0));
    w.push_back((zs.z[i] - u_n * z_prev) / theta);
  }
  const double d = ks_statistic(w, [](double x) { return normal_cdf(x); });
  CHECK(ks_pvalue(d, w.size()) > 0.01);
}
