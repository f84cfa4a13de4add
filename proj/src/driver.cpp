#include "amlab/driver.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "amlab/analysis.hpp"
#include "amlab/chain.hpp"
#include "amlab/coupling.hpp"
#include "amlab/recursion_lab.hpp"
#include "amlab/stats.hpp"
#include "amlab/svg.hpp"
#include "amlab/trace_io.hpp"

namespace amlab {

namespace {

namespace fs = std::filesystem;

void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << j.dump(2) << "\n";
}

nlohmann::json base_report(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["config_digest"] = cfg.digest();
  j["seeds"] = cfg.resolved_seeds();
  j["subcommand"] = cfg.subcommand;
  j["thresholds"] = cfg.thresholds;
  return j;
}

AmState default_initial(const ExperimentConfig& cfg) {
  return make_initial_state(Vector(cfg.dim, 0.0), Matrix::identity(cfg.dim));
}

int run_chain_family(const ExperimentConfig& cfg, bool force_uniform) {
  const TargetDensity target = force_uniform
                                   ? TargetDensity::improper_uniform(cfg.dim)
                                   : cfg.build_target();
  const ProposalSpec spec = cfg.build_proposal();
  const WeightSchedule schedule = cfg.build_schedule();
  nlohmann::json report = base_report(cfg);
  report["runs"] = nlohmann::json::array();
  bool collapsed = false;
  for (std::uint64_t seed : cfg.resolved_seeds()) {
    ChainTrace trace = run_am(target, spec, schedule, default_initial(cfg),
                              cfg.n_steps, cfg.record_every, seed);
    trace.config_digest = cfg.digest();
    const std::string csv =
        cfg.output_dir + "/trace_" + std::to_string(seed) + ".csv";
    write_trace_csv(trace, csv);
    nlohmann::json run_row;
    run_row["seed"] = seed;
    run_row["steps_completed"] = trace.steps_completed;
    run_row["acceptance_rate"] = trace.acceptance_rate();
    run_row["final_log_lambda_min"] =
        trace.steps_completed > 0
            ? trace.log_lambda_min_at_step(trace.steps_completed)
            : 0.0;
    if (trace.collapse) {
      collapsed = true;
      run_row["collapse_step"] = trace.collapse->step;
      run_row["collapse_what"] = trace.collapse->what;
      const std::string dump_path =
          cfg.output_dir + "/collapse_" + std::to_string(seed) + ".json";
      nlohmann::json dump;
      dump["step"] = trace.collapse->step;
      dump["what"] = trace.collapse->what;
      dump["s"] = trace.collapse->s.data();
      write_json(dump, dump_path);
      run_row["collapse_dump"] = dump_path;
    }
    report["runs"].push_back(run_row);
    if (cfg.plot && !trace.lambda_min.empty()) {
      PlotSeries series;
      series.name = "log lambda_min, seed " + std::to_string(seed);
      const std::size_t stride =
          std::max<std::size_t>(1, trace.lambda_min.size() / 4000);
      for (std::size_t k = 0; k < trace.lambda_min.size(); k += stride) {
        series.x.push_back(static_cast<double>(k + 1));
        series.y.push_back(
            trace.log_lambda_min_at_step(static_cast<std::int64_t>(k + 1)));
      }
      PlotOptions opt;
      opt.title = "smallest eigenvalue (log)";
      emit_plot({series}, cfg.output_dir + "/plot_" + std::to_string(seed) + ".svg",
                opt);
    }
  }
  write_json(report, cfg.output_dir + "/summary.json");
  return collapsed ? kExitCollapse : kExitOk;
}

int run_expectation(const ExperimentConfig& cfg) {
  const double theta = cfg.build_proposal().theta;
  const RecursionSeries series = expectation_series(
      theta, cfg.build_schedule(), cfg.threshold("a1", 0.0),
      cfg.threshold("b1", 1.0), cfg.n_steps);
  write_expectation_csv(series, cfg.output_dir + "/expectation.csv",
                        cfg.digest(), cfg.record_every);
  nlohmann::json report = base_report(cfg);
  report["n"] = cfg.n_steps;
  report["final_log_b"] = series.log_b.back();
  write_json(report, cfg.output_dir + "/summary.json");
  if (cfg.plot) {
    PlotSeries ps;
    ps.name = "log E[S_n]";
    ps.x.reserve(series.log_b.size());
    ps.y.reserve(series.log_b.size());
    for (std::size_t i = 0; i < series.log_b.size(); ++i) {
      ps.x.push_back(static_cast<double>(i + 1));
      ps.y.push_back(series.log_b[i]);
    }
    PlotOptions opt;
    opt.title = "expected covariance growth";
    opt.mark_minimum = true;
    emit_plot({ps}, cfg.output_dir + "/plot.svg", opt);
  }
  return kExitOk;
}

int run_dip(const ExperimentConfig& cfg) {
  const double theta = cfg.build_proposal().theta;
  const DipProfile dip =
      dip_profile(theta, cfg.build_schedule(), cfg.threshold("a1", 0.0),
                  cfg.threshold("b1", 1.0), cfg.n_steps);
  nlohmann::json report = base_report(cfg);
  report["argmin_index"] = dip.argmin_index;
  report["min_value"] = dip.min_value;
  report["min_log_b"] = dip.min_log_b;
  if (dip.first_exceed_index) {
    report["first_exceed_index"] = *dip.first_exceed_index;
  } else {
    report["first_exceed_index"] = nullptr;
  }
  const double argmin_floor = cfg.threshold("argmin_exceeds", 27000.0);
  const double crossing_floor = cfg.threshold("crossing_exceeds", 750000.0);
  const bool ok = dip.argmin_index > argmin_floor &&
                  dip.first_exceed_index.has_value() &&
                  static_cast<double>(*dip.first_exceed_index) > crossing_floor;
  report["passed"] = ok;
  write_json(report, cfg.output_dir + "/dip.json");
  if (cfg.plot) {
    const RecursionSeries series =
        expectation_series(theta, cfg.build_schedule(), cfg.threshold("a1", 0.0),
                           cfg.threshold("b1", 1.0), cfg.n_steps);
    PlotSeries ps;
    ps.name = "log E[S_n]";
    ps.x.reserve(series.log_b.size());
    ps.y.reserve(series.log_b.size());
    for (std::size_t i = 0; i < series.log_b.size(); ++i) {
      ps.x.push_back(static_cast<double>(i + 1));
      ps.y.push_back(series.log_b[i]);
    }
    PlotOptions opt;
    opt.title = "expected covariance dip";
    opt.mark_minimum = true;
    emit_plot({ps}, cfg.output_dir + "/plot.svg", opt);
  }
  return ok ? kExitOk : kExitThresholdFailure;
}

int run_gn(const ExperimentConfig& cfg) {
  const double theta = cfg.build_proposal().theta;
  const WeightSchedule schedule = cfg.build_schedule();
  const double g_init = cfg.threshold("g_init", 0.0);
  const GnSeries series = g_series(theta, schedule, g_init, 2, cfg.n_steps);
  const double gap = std::abs(series.g.back() - theta);
  const double tol = cfg.threshold("tolerance", 1e-3);
  nlohmann::json report = base_report(cfg);
  report["theta_tilde"] = theta;
  report["g_init"] = g_init;
  report["g_final"] = series.g.back();
  report["gap"] = gap;
  report["fixed_point_final"] = series.fixed_points.back();
  report["passed"] = gap <= tol;
  write_json(report, cfg.output_dir + "/gn.json");
  return gap <= tol ? kExitOk : kExitThresholdFailure;
}

int run_growth_check(const ExperimentConfig& cfg) {
  const double theta = cfg.build_proposal().theta;
  const auto n = static_cast<std::int64_t>(cfg.threshold("n", 100000.0));
  const auto k = static_cast<std::int64_t>(cfg.threshold("k", 10000.0));
  const double lambda = cfg.threshold("lambda", 1.1);
  const RecursionSeries series =
      expectation_series(theta, cfg.build_schedule(), 0.0, 1.0, n + k);
  const GrowthBoundCheck check = growth_bound_check(series, lambda, n, k);
  nlohmann::json report = base_report(cfg);
  report["lhs"] = check.lhs;
  report["mid"] = check.mid;
  report["rhs"] = check.rhs;
  report["passed"] = check.passed;
  write_json(report, cfg.output_dir + "/growth.json");
  return check.passed ? kExitOk : kExitThresholdFailure;
}

int run_coupling_test(const ExperimentConfig& cfg) {
  const double mean1 = cfg.threshold("mean1", 0.0);
  const double sd1 = cfg.threshold("sd1", 1.0);
  const double mean2 = cfg.threshold("mean2", 1.0);
  const double sd2 = cfg.threshold("sd2", 1.0);
  const auto trials = static_cast<std::int64_t>(cfg.threshold("trials", 1e5));
  CouplingSpec spec;
  const double lo = std::min(mean1 - 10.0 * sd1, mean2 - 10.0 * sd2);
  const double hi = std::max(mean1 + 10.0 * sd1, mean2 + 10.0 * sd2);
  spec.lo = lo;
  spec.hi = hi;
  spec.p = [=](double x) { return normal_pdf(x, mean1, sd1); };
  spec.q = [=](double x) { return normal_pdf(x, mean2, sd2); };

  const double tv_quadrature = total_variation_1d(spec);
  // closed form for equal spreads: 2 Phi(|mu1-mu2| / (2 sd)) - 1
  const double tv_oracle =
      (sd1 == sd2)
          ? 2.0 * normal_cdf(std::abs(mean1 - mean2) / (2.0 * sd1)) - 1.0
          : tv_quadrature;

  const MaximalCoupler coupler(spec);
  Rng rng(cfg.resolved_seeds().front());
  std::int64_t coupled = 0;
  std::vector<double> ys(static_cast<std::size_t>(trials));
  for (std::int64_t t = 0; t < trials; ++t) {
    const double x = mean1 + sd1 * rng.normal();
    const CoupleResult res = coupler.couple(x, rng);
    ys[static_cast<std::size_t>(t)] = res.y;
    coupled += res.coupled ? 1 : 0;
  }
  const double coupled_freq =
      static_cast<double>(coupled) / static_cast<double>(trials);
  const double ks = ks_statistic(
      ys, [=](double x) { return normal_cdf(x, mean2, sd2); });
  const double ks_p = ks_pvalue(ks, ys.size());

  const double freq_tol = cfg.threshold("freq_tol", 0.01);
  const double ks_floor = cfg.threshold("ks_pvalue_floor", 0.01);
  const bool ok =
      std::abs(coupled_freq - (1.0 - tv_oracle)) <= freq_tol && ks_p > ks_floor;

  nlohmann::json report = base_report(cfg);
  report["tv_oracle"] = tv_oracle;
  report["tv_quadrature"] = tv_quadrature;
  report["coupled_freq"] = coupled_freq;
  report["trials"] = trials;
  report["ks_pvalue"] = ks_p;
  report["passed"] = ok;
  write_json(report, cfg.output_dir + "/coupling.json");
  return ok ? kExitOk : kExitThresholdFailure;
}

int run_drift_check(const ExperimentConfig& cfg) {
  const double theta = cfg.threshold("theta", 1.0);
  const double big_m = cfg.threshold("M", 10.0);
  const double slope_tol = cfg.threshold("slope_tol", 0.1);
  std::vector<double> s_values{1.0, 10.0, 100.0};
  if (cfg.thresholds.contains("s_values")) {
    s_values.clear();
    for (const auto& v : cfg.thresholds["s_values"]) {
      s_values.push_back(v.get<double>());
    }
  }
  const TargetDensity laplace = TargetDensity::laplace(0.0, 1.0);
  const std::vector<double> grid{-100.0, -50.0, -30.0, -20.0, -15.0, -12.0,
                                 -10.0,  -5.0,  -2.0,  0.0,   2.0,   5.0,
                                 10.0,   12.0,  15.0,  20.0,  30.0,  50.0,
                                 100.0};
  nlohmann::json report = base_report(cfg);
  report["reports"] = nlohmann::json::array();
  std::vector<double> log_s, log_inf, log_delta;
  bool positive = true, simple_bound = true;
  for (double s : s_values) {
    const DriftReport rep = drift_profile(s, theta, laplace, grid, big_m);
    positive = positive && rep.inf_tail > 0.0;
    for (double gap : rep.drift_gap) {
      // P_s V <= 2 V  iff  1 - P_s V / V >= -1
      simple_bound = simple_bound && gap >= -1.0;
    }
    log_s.push_back(std::log(s));
    log_inf.push_back(std::log(rep.inf_tail));
    log_delta.push_back(std::log(rep.delta_s));
    nlohmann::json row;
    row["s"] = s;
    row["inf_tail"] = rep.inf_tail;
    row["lambda_s"] = rep.lambda_s;
    row["drift_b"] = rep.drift_b;
    row["delta_s"] = rep.delta_s;
    report["reports"].push_back(row);
  }
  const double inf_slope = linear_fit(log_s, log_inf).slope;
  const double delta_slope = linear_fit(log_s, log_delta).slope;
  const bool slopes_ok = std::abs(inf_slope + 0.5) <= slope_tol &&
                         std::abs(delta_slope + 0.5) <= slope_tol;
  const bool ok = positive && simple_bound && slopes_ok;
  report["inf_tail_slope"] = inf_slope;
  report["delta_slope"] = delta_slope;
  report["inf_tail_positive"] = positive;
  report["simple_bound_holds"] = simple_bound;
  report["passed"] = ok;
  write_json(report, cfg.output_dir + "/drift.json");
  return ok ? kExitOk : kExitThresholdFailure;
}

int run_kr_check(const ExperimentConfig& cfg) {
  const double window = cfg.threshold("L", 1.0);
  const auto trials = static_cast<std::int64_t>(cfg.threshold("trials", 1e5));
  std::vector<std::int64_t> steps{100, 1000, 10000};
  if (cfg.thresholds.contains("step_counts")) {
    steps.clear();
    for (const auto& v : cfg.thresholds["step_counts"]) {
      steps.push_back(v.get<std::int64_t>());
    }
  }
  const ProposalSpec spec = cfg.build_proposal();
  const KrScalingCheck check =
      kr_scaling_check(spec.tmpl, spec.theta, steps, window, trials,
                       cfg.resolved_seeds().front());
  nlohmann::json report = base_report(cfg);
  report["step_counts"] = steps;
  report["q_hat"] = check.q_hat;
  report["slope"] = check.slope;
  report["precision_warning"] = check.precision_warning;
  report["passed"] = check.passed;
  write_json(report, cfg.output_dir + "/kr.json");
  return check.passed ? kExitOk : kExitThresholdFailure;
}

int run_slln(const ExperimentConfig& cfg) {
  const TargetDensity target = cfg.build_target();
  if (target.kind() != TargetDensity::Kind::Laplace) {
    throw config_error("slln: target must be laplace");
  }
  const ProposalSpec spec = cfg.build_proposal();
  const WeightSchedule schedule = cfg.build_schedule();
  const std::string f_id = cfg.thresholds.value("f_id", "exp_abs:0.4");
  const double m_tol = cfg.threshold("m_tol", 0.1);
  const double s_tol = cfg.threshold("s_tol", 0.2);
  const double s_limit = cfg.threshold("s_limit", 2.0);
  const double f_tol = cfg.threshold("f_tol", 0.1);
  const auto min_pass = static_cast<int>(cfg.threshold(
      "min_pass",
      std::ceil(0.8 * static_cast<double>(cfg.resolved_seeds().size()))));

  nlohmann::json report = base_report(cfg);
  report["runs"] = nlohmann::json::array();
  int passes = 0;
  for (std::uint64_t seed : cfg.resolved_seeds()) {
    ChainTrace trace = run_am(target, spec, schedule, default_initial(cfg),
                              cfg.n_steps, 1, seed);
    trace.config_digest = cfg.digest();
    if (trace.collapse) return kExitCollapse;
    const SllnReport slln = ergodic_average(trace, f_id, target);
    const std::size_t last = trace.lambda_min.size() - 1;
    const double m_final = trace.m_dense[last];  // dim == 1
    const double s_final = trace.s_diag_dense[last];
    const bool ok = std::abs(m_final) <= m_tol &&
                    std::abs(s_final - s_limit) <= s_tol &&
                    slln.final_error <= f_tol;
    passes += ok ? 1 : 0;
    nlohmann::json row;
    row["seed"] = seed;
    row["m_final"] = m_final;
    row["s_final"] = s_final;
    row["f_id"] = f_id;
    row["reference"] = slln.reference;
    row["ergodic_error"] = slln.final_error;
    row["passed"] = ok;
    report["runs"].push_back(row);
  }
  report["passes"] = passes;
  report["min_pass"] = min_pass;
  const bool ok = passes >= min_pass;
  report["passed"] = ok;
  write_json(report, cfg.output_dir + "/slln.json");
  return ok ? kExitOk : kExitThresholdFailure;
}

int run_eigen_floor(const ExperimentConfig& cfg) {
  const TargetDensity target = cfg.build_target();
  const ProposalSpec spec = cfg.build_proposal();
  const WeightSchedule schedule = cfg.build_schedule();
  const auto lo = static_cast<std::int64_t>(cfg.threshold(
      "window_lo", static_cast<double>(std::max<std::int64_t>(1, cfg.n_steps / 10))));
  const auto hi = static_cast<std::int64_t>(
      cfg.threshold("window_hi", static_cast<double>(cfg.n_steps)));
  const double trend_min = cfg.threshold("trend_min", 0.5);
  const auto min_pass = static_cast<int>(cfg.threshold(
      "min_pass",
      std::ceil(0.95 * static_cast<double>(cfg.resolved_seeds().size()))));

  std::vector<ChainTrace> traces;
  for (std::uint64_t seed : cfg.resolved_seeds()) {
    traces.push_back(run_am(target, spec, schedule, default_initial(cfg),
                            cfg.n_steps, cfg.n_steps, seed));
    if (traces.back().collapse) return kExitCollapse;
  }
  const EigenFloorReport rep = eigen_floor(traces, lo, hi);
  int passes = 0;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const bool ok = rep.per_trace_min_lambda_min[i] > 0.0 &&
                    rep.per_trace_trend_ratio[i] >= trend_min;
    passes += ok ? 1 : 0;
    nlohmann::json row;
    row["seed"] = traces[i].seed;
    row["min_lambda_min"] = rep.per_trace_min_lambda_min[i];
    row["trend_ratio"] = rep.per_trace_trend_ratio[i];
    row["passed"] = ok;
    rows.push_back(row);
  }
  nlohmann::json report = base_report(cfg);
  report["runs"] = rows;
  report["window"] = {lo, hi};
  report["passes"] = passes;
  const bool ok = passes >= min_pass;
  report["passed"] = ok;
  write_json(report, cfg.output_dir + "/eigen_floor.json");
  return ok ? kExitOk : kExitThresholdFailure;
}

int run_check_schedule(const ExperimentConfig& cfg) {
  const WeightSchedule schedule = cfg.build_schedule();
  const auto n_max = std::max<std::int64_t>(cfg.n_steps, 1000);
  const AssumptionReport a1 = check_assumption_A1(schedule, 2, n_max);
  const AssumptionReport a2 =
      check_assumption_A2(schedule, n_max, cfg.threshold("a2_tol", 1e-3));
  const AssumptionReport a3 = check_assumption_A3(schedule, n_max);
  nlohmann::json report = base_report(cfg);
  const auto to_json = [](const AssumptionReport& r) {
    nlohmann::json j;
    j["assumption"] = r.assumption_id;
    j["horizon"] = r.horizon;
    j["passed"] = r.passed;
    j["caveat"] = r.caveat;
    auto w = nlohmann::json::array();
    for (const auto& [idx, val] : r.witnesses) w.push_back({idx, val});
    j["witnesses"] = w;
    return j;
  };
  report["A1"] = to_json(a1);
  report["A2"] = to_json(a2);
  report["A3"] = to_json(a3);
  report["admissible_box"] = schedule.admissible();
  const bool ok =
      a1.passed && a2.passed && a3.passed && schedule.admissible();
  report["passed"] = ok;
  write_json(report, cfg.output_dir + "/schedule.json");
  return ok ? kExitOk : kExitThresholdFailure;
}

}  // namespace

int run(const ExperimentConfig& cfg) {
  try {
    fs::create_directories(cfg.output_dir);
    write_json(cfg.to_json(), cfg.output_dir + "/config.json");
    if (cfg.subcommand == "am-run") return run_chain_family(cfg, false);
    if (cfg.subcommand == "arw-run") return run_chain_family(cfg, true);
    if (cfg.subcommand == "expectation") return run_expectation(cfg);
    if (cfg.subcommand == "dip") return run_dip(cfg);
    if (cfg.subcommand == "gn") return run_gn(cfg);
    if (cfg.subcommand == "growth-check") return run_growth_check(cfg);
    if (cfg.subcommand == "coupling-test") return run_coupling_test(cfg);
    if (cfg.subcommand == "drift-check") return run_drift_check(cfg);
    if (cfg.subcommand == "kr-check") return run_kr_check(cfg);
    if (cfg.subcommand == "slln") return run_slln(cfg);
    if (cfg.subcommand == "eigen-floor") return run_eigen_floor(cfg);
    if (cfg.subcommand == "check-schedule") return run_check_schedule(cfg);
    throw config_error("unknown subcommand " + cfg.subcommand);
  } catch (const config_error&) {
    throw;  // caller reports with exit 1
  } catch (const not_positive_definite& e) {
    std::cerr << "collapse: " << e.what() << "\n";
    return kExitCollapse;
  }
}

}  // namespace amlab
