#include "echolab/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "echolab/errors.hpp"
#include "echolab/fock.hpp"
#include "echolab/gaussian.hpp"

namespace echolab::sweep {

// ---------------------------------------------------------------------------
// names

Engine engine_from_string(const std::string& name) {
  if (name == "analytic") return Engine::analytic;
  if (name == "gaussian_oracle") return Engine::gaussian_oracle;
  if (name == "fock_oracle") return Engine::fock_oracle;
  if (name == "crosscheck") return Engine::crosscheck;
  throw config::ConfigError("unknown engine '" + name +
                            "' (expected analytic, gaussian_oracle, "
                            "fock_oracle or crosscheck)");
}

std::string to_string(Engine engine) {
  switch (engine) {
    case Engine::analytic: return "analytic";
    case Engine::gaussian_oracle: return "gaussian_oracle";
    case Engine::fock_oracle: return "fock_oracle";
    case Engine::crosscheck: return "crosscheck";
  }
  return "?";
}

AxisKey axis_key_from_string(const std::string& name) {
  if (name == "alpha0_abs") return AxisKey::alpha0_abs;
  if (name == "nbar") return AxisKey::nbar;
  if (name == "mbar") return AxisKey::mbar;
  if (name == "q_factor") return AxisKey::q_factor;
  if (name == "kappa") return AxisKey::kappa;
  if (name == "t1_us") return AxisKey::t1_us;
  if (name == "tf_us") return AxisKey::tf_us;
  if (name == "t_us") return AxisKey::t_us;
  throw config::ConfigError("unknown sweep axis '" + name + "'");
}

std::string to_string(AxisKey key) {
  switch (key) {
    case AxisKey::alpha0_abs: return "alpha0_abs";
    case AxisKey::nbar: return "nbar";
    case AxisKey::mbar: return "mbar";
    case AxisKey::q_factor: return "q_factor";
    case AxisKey::kappa: return "kappa";
    case AxisKey::t1_us: return "t1_us";
    case AxisKey::tf_us: return "tf_us";
    case AxisKey::t_us: return "t_us";
  }
  return "?";
}

double AxisSpec::value_at(int i) const {
  if (count <= 1) return start;
  return start + (stop - start) * double(i) / double(count - 1);
}

// ---------------------------------------------------------------------------
// worker pool size

int resolve_worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ECHOLAB_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v <= 0)
      throw config::ConfigError(
          "ECHOLAB_WORKERS must be a positive integer, got '" +
          std::string(env) + "'");
    return int(v);
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? int(hc) : 1;
#endif
}

// ---------------------------------------------------------------------------
// formatting

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

const std::vector<std::string> kAllowedOutputs = {
    "envelope", "p_plus", "trace_re", "trace_im", "theta_re", "theta_im"};

double output_value(const std::string& name, const analytic::SignalPoint& s) {
  if (name == "envelope") return s.envelope;
  if (name == "p_plus") return s.p_plus;
  if (name == "trace_re") return s.trace_plus_minus.real();
  if (name == "trace_im") return s.trace_plus_minus.imag();
  if (name == "theta_re") return s.theta.real();
  if (name == "theta_im") return s.theta.imag();
  throw config::ConfigError("unknown output column '" + name + "'");
}

void apply_axis(AxisKey key, double v, model::DeviceParams& dev,
                model::PulseSchedule& sched) {
  switch (key) {
    case AxisKey::alpha0_abs: {
      const double phase =
          std::abs(dev.alpha0) > 0.0 ? std::arg(dev.alpha0) : 0.0;
      dev.alpha0 = std::polar(v, phase);
      break;
    }
    case AxisKey::nbar: dev.nbar = v; break;
    case AxisKey::mbar: dev.mbar = v; break;
    case AxisKey::q_factor: dev.q_factor = v; break;
    case AxisKey::kappa: dev.coupling_kappa = v; break;
    case AxisKey::t1_us:
      sched = model::PulseSchedule::echo(v * 1e-6, v * 1e-6);
      break;
    case AxisKey::tf_us:
      sched = model::PulseSchedule::echo(0.5 * v * 1e-6, 0.5 * v * 1e-6);
      break;
    case AxisKey::t_us: {
      const double t = v * 1e-6;
      if (sched.kind == model::PulseSchedule::Kind::ramsey || t <= sched.t1_s)
        sched = model::PulseSchedule::ramsey(t);
      else
        sched = model::PulseSchedule::echo(sched.t1_s, t - sched.t1_s);
      break;
    }
  }
}

} // namespace

// ---------------------------------------------------------------------------
// engines

analytic::SignalPoint eval_engine(Engine engine, const model::DeviceParams& dev,
                                  const model::PulseSchedule& schedule,
                                  const SweepSpec& spec) {
  const model::DerivedParams derived = model::derive(dev);
  switch (engine) {
    case Engine::analytic:
      return schedule.kind == model::PulseSchedule::Kind::ramsey
                 ? analytic::ramsey_damped(derived, dev, schedule.t_s)
                 : analytic::echo_damped(derived, dev, schedule.t1_s,
                                         schedule.t2_s);
    case Engine::gaussian_oracle: {
      gaussian::IntegrateOptions opt;
      opt.tol = spec.gaussian_tol;
      return gaussian::signal(dev, derived, schedule, opt);
    }
    case Engine::fock_oracle: {
      int dim = spec.fock_dim;
      if (dim <= 0) {
        // automatic: big enough for the state and for the truncation leak
        // accumulated over this run
        dim = fock::leak_safe_dim(dev.alpha0, dev.mbar, dev.nbar,
                                  derived.gamma_rad, schedule.total_time_s());
      }
      fock::EvolveOptions opt;
      opt.rel_tol = spec.fock_tol;
      opt.enforce_dim_rule = spec.fock_enforce_dim_rule;
      opt.policy = fock::ExecPolicy::parallel; // engages only for large dims
      return fock::run_sequence(dev, schedule, dim, opt).point;
    }
    case Engine::crosscheck:
      throw config::ConfigError("crosscheck is handled by run_sweep");
  }
  throw config::ConfigError("bad engine");
}

// ---------------------------------------------------------------------------
// config -> spec

SweepSpec spec_from_config(const config::KeyValues& cfg) {
  SweepSpec spec;
  model::DeviceParams& dev = spec.base;
  dev.qubit_splitting_hz = cfg.get_double("device.qubit_splitting_ghz", 5.0) * 1e9;
  dev.mech_freq_hz = cfg.get_double("device.mech_freq_mhz", 50.0) * 1e6;
  dev.coupling_kappa = cfg.get_double("device.kappa", 0.2);
  dev.q_factor = cfg.get_double("device.q_factor", model::infinite);
  if (cfg.has("device.nbar") && cfg.has("device.bath_temp_mk"))
    cfg.fail("device.nbar", "specify either nbar or bath_temp_mk, not both");
  if (cfg.has("device.bath_temp_mk"))
    dev.nbar = model::occupation_from_temperature(
        cfg.require_double("device.bath_temp_mk") * 1e-3, dev.mech_freq_hz);
  else
    dev.nbar = cfg.get_double("device.nbar", 0.0);
  if (cfg.has("device.mbar") && cfg.has("device.init_temp_mk"))
    cfg.fail("device.mbar", "specify either mbar or init_temp_mk, not both");
  if (cfg.has("device.init_temp_mk"))
    dev.mbar = model::occupation_from_temperature(
        cfg.require_double("device.init_temp_mk") * 1e-3, dev.mech_freq_hz);
  else
    dev.mbar = cfg.get_double("device.mbar", 0.0);
  dev.t2_s = cfg.get_double("device.t2_us", model::infinite) * 1e-6;
  dev.alpha0 = model::cplx(cfg.get_double("device.alpha0_re", 0.0),
                           cfg.get_double("device.alpha0_im", 0.0));
  if (cfg.has("device.beam_mass_kg"))
    dev.beam_mass_kg = cfg.require_double("device.beam_mass_kg");

  const std::string kind = cfg.get_string("schedule.kind", "ramsey");
  if (kind == "ramsey") {
    spec.schedule =
        model::PulseSchedule::ramsey(cfg.get_double("schedule.t_us", 0.0) * 1e-6);
  } else if (kind == "echo") {
    const double t1 = cfg.get_double("schedule.t1_us", 0.0) * 1e-6;
    spec.schedule = model::PulseSchedule::echo(
        t1, cfg.get_double("schedule.t2_us",
                           cfg.get_double("schedule.t1_us", 0.0)) * 1e-6);
  } else {
    cfg.fail("schedule.kind", "must be 'ramsey' or 'echo'");
  }

  spec.engine = engine_from_string(cfg.get_string("sweep.engine", "analytic"));
  for (const std::string axis : {"sweep.axis1", "sweep.axis2"}) {
    if (!cfg.has(axis + ".key")) continue;
    AxisSpec a;
    a.key = axis_key_from_string(*cfg.get(axis + ".key"));
    a.start = cfg.require_double(axis + ".start");
    a.stop = cfg.require_double(axis + ".stop");
    a.count = cfg.get_int(axis + ".count", 1);
    if (a.count < 1) cfg.fail(axis + ".count", "must be >= 1");
    if (a.stop < a.start) cfg.fail(axis + ".stop", "must be >= start");
    spec.axes.push_back(a);
  }
  if (spec.axes.empty() && cfg.has("sweep.axis2.key"))
    cfg.fail("sweep.axis2.key", "axis2 given without axis1");

  if (const auto out = cfg.get("sweep.outputs")) {
    std::istringstream ss(*out);
    std::string col;
    while (std::getline(ss, col, ',')) {
      col.erase(std::remove_if(col.begin(), col.end(), ::isspace), col.end());
      if (col.empty()) continue;
      if (std::find(kAllowedOutputs.begin(), kAllowedOutputs.end(), col) ==
          kAllowedOutputs.end())
        cfg.fail("sweep.outputs", "unknown output column '" + col + "'");
      spec.outputs.push_back(col);
    }
  }
  spec.crosscheck_tol = cfg.get_double("crosscheck.tol", 1e-6);
  spec.fock_dim = cfg.get_int("fock.dim", 0);
  spec.fock_enforce_dim_rule = cfg.get_bool("fock.enforce_dim_rule", true);
  spec.fock_tol = cfg.get_double("fock.tol", 1e-9);
  spec.gaussian_tol = cfg.get_double("gaussian.tol", 1e-10);

  const auto unused = cfg.unused_keys();
  if (!unused.empty()) {
    std::string msg = cfg.origin() + ": unknown key(s):";
    for (const auto& k : unused) msg += " " + k;
    throw config::ConfigError(msg);
  }
  return spec;
}

// ---------------------------------------------------------------------------
// run_sweep

namespace {

struct RowResult {
  std::vector<double> values;
  std::string error;
  bool regime_ok = true;
  std::string regime_msg;
};

std::string grid_point_label(const SweepSpec& spec,
                             const std::vector<double>& axis_values) {
  std::string s;
  for (std::size_t a = 0; a < spec.axes.size(); ++a) {
    if (!s.empty()) s += ", ";
    s += to_string(spec.axes[a].key) + "=" + fmt(axis_values[a]);
  }
  return s.empty() ? "single point" : s;
}

} // namespace

SweepResult run_sweep(const SweepSpec& spec, int worker_count) {
  if (spec.axes.size() > 2)
    throw config::ConfigError("at most 2 sweep axes are supported");
  for (const auto& a : spec.axes) {
    if (a.count < 1) throw config::ConfigError("axis count must be >= 1");
    if (a.stop < a.start) throw config::ConfigError("axis stop must be >= start");
  }
  const std::vector<std::string> outputs =
      spec.outputs.empty() ? std::vector<std::string>{"envelope", "p_plus"}
                           : spec.outputs;

  const int c1 = spec.axes.size() >= 1 ? spec.axes[0].count : 1;
  const int c2 = spec.axes.size() >= 2 ? spec.axes[1].count : 1;
  const int npoints = c1 * c2;
  std::vector<RowResult> rows(npoints);
  const bool cross = spec.engine == Engine::crosscheck;
#ifdef _OPENMP
  const int workers = npoints > 1 ? resolve_worker_count(worker_count) : 1;
#pragma omp parallel for schedule(dynamic) num_threads(workers) if (npoints > 1)
#else
  (void)worker_count;
#endif
  for (int idx = 0; idx < npoints; ++idx) {
    RowResult& row = rows[idx];
    try {
      std::vector<double> axis_values;
      model::DeviceParams dev = spec.base;
      model::PulseSchedule sched = spec.schedule;
      if (!spec.axes.empty()) {
        const int i1 = idx / c2;
        axis_values.push_back(spec.axes[0].value_at(i1));
        apply_axis(spec.axes[0].key, axis_values.back(), dev, sched);
        if (spec.axes.size() >= 2) {
          const int i2 = idx % c2;
          axis_values.push_back(spec.axes[1].value_at(i2));
          apply_axis(spec.axes[1].key, axis_values.back(), dev, sched);
        }
      }
      const model::RegimeReport regime = model::validate_regime(dev);
      row.regime_ok = regime.all_pass;
      if (!regime.all_pass)
        row.regime_msg = grid_point_label(spec, axis_values) + "\n" +
                         regime.summary();
      row.values = axis_values;
      if (cross) {
        const analytic::SignalPoint a =
            eval_engine(Engine::analytic, dev, sched, spec);
        const analytic::SignalPoint g =
            eval_engine(Engine::gaussian_oracle, dev, sched, spec);
        const analytic::SignalPoint f =
            eval_engine(Engine::fock_oracle, dev, sched, spec);
        for (const auto& name : outputs) {
          row.values.push_back(output_value(name, a));
          row.values.push_back(output_value(name, g));
          row.values.push_back(output_value(name, f));
        }
        const double d_ag = std::abs(a.trace_plus_minus - g.trace_plus_minus);
        const double d_af = std::abs(a.trace_plus_minus - f.trace_plus_minus);
        const double d_gf = std::abs(g.trace_plus_minus - f.trace_plus_minus);
        row.values.push_back(std::max({d_ag, d_af, d_gf}));
      } else {
        const analytic::SignalPoint s = eval_engine(spec.engine, dev, sched, spec);
        for (const auto& name : outputs)
          row.values.push_back(output_value(name, s));
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }

  SweepResult res;
  for (int idx = 0; idx < npoints; ++idx) {
    if (!rows[idx].error.empty()) {
      std::vector<double> axis_values;
      if (!spec.axes.empty()) {
        axis_values.push_back(spec.axes[0].value_at(idx / c2));
        if (spec.axes.size() >= 2)
          axis_values.push_back(spec.axes[1].value_at(idx % c2));
      }
      throw NumericalError("sweep failed at grid point (" +
                           grid_point_label(spec, axis_values) +
                           "): " + rows[idx].error);
    }
    if (!rows[idx].regime_ok) {
      ++res.regime_failures;
      if (res.first_regime_failure.empty())
        res.first_regime_failure = rows[idx].regime_msg;
    }
  }

  std::ostringstream csv;
  csv << "# echolab v1\n";
  bool first_col = true;
  auto col = [&csv, &first_col](const std::string& name) {
    if (!first_col) csv << ',';
    csv << name;
    first_col = false;
  };
  for (const auto& a : spec.axes) col(to_string(a.key));
  for (const auto& name : outputs) {
    if (cross) {
      col(name + "_analytic");
      col(name + "_gaussian");
      col(name + "_fock");
    } else {
      col(name);
    }
  }
  if (cross) col("max_abs_discrepancy");
  csv << '\n';

  for (int idx = 0; idx < npoints; ++idx) {
    const auto& vals = rows[idx].values;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (i) csv << ',';
      csv << fmt(vals[i]);
    }
    csv << '\n';
    if (cross) {
      const double disc = vals.back();
      res.max_crosscheck_discrepancy =
          std::max(res.max_crosscheck_discrepancy, disc);
    }
  }
  res.crosscheck_ok =
      !cross || res.max_crosscheck_discrepancy <= spec.crosscheck_tol;
  res.rows = npoints;
  res.csv = csv.str();
  return res;
}

// ---------------------------------------------------------------------------
// figure presets

namespace {

enum class PresetAxis { elapsed_t_us, tf_us, alpha0_abs, nbar_and_mbar };

struct PresetCurve {
  std::string column;
  model::DeviceParams dev;
  bool reference = false; // uncoupled / no-dissipation analytic reference
};

struct PresetFileDef {
  std::string file_base; // "fig1", "fig3_nbar", ...
  std::string x_column;
  std::string x_label;
  PresetAxis axis;
  double x_start = 0.0, x_stop = 0.0;
  int default_points = 0;
  model::PulseSchedule schedule; // base (pi pulse position for elapsed axes)
  std::vector<PresetCurve> curves;
};

model::DeviceParams reference_device() {
  model::DeviceParams d;
  d.qubit_splitting_hz = 5e9;
  d.mech_freq_hz = 50e6;
  d.coupling_kappa = 0.2;
  d.q_factor = model::infinite;
  d.nbar = 0.0;
  d.mbar = 0.0;
  d.t2_s = 0.5e-6;
  d.alpha0 = 25.0;
  return d;
}

std::vector<PresetFileDef> preset_defs(const std::string& id) {
  const double t1 = 0.2e-6;
  std::vector<PresetFileDef> defs;
  if (id == "fig1") {
    PresetFileDef f;
    f.file_base = "fig1";
    f.x_column = "t_us";
    f.x_label = "t [us]";
    f.axis = PresetAxis::elapsed_t_us;
    f.x_start = 0.0;
    f.x_stop = 0.4;
    f.default_points = 401;
    f.schedule = model::PulseSchedule::echo(t1, 0.0);
    auto dev = reference_device();
    dev.nbar = 10;
    dev.mbar = 10;
    dev.q_factor = 3000;
    f.curves.push_back({"env_nm10_q3000", dev, false});
    dev.q_factor = model::infinite;
    f.curves.push_back({"env_nm10_qinf", dev, false});
    dev.mbar = 0;
    dev.q_factor = 3000;
    f.curves.push_back({"env_m0_q3000", dev, false});
    dev.q_factor = model::infinite;
    f.curves.push_back({"env_m0_qinf", dev, false});
    f.curves.push_back({"env_uncoupled", reference_device(), true});
    defs.push_back(std::move(f));
  } else if (id == "fig2") {
    PresetFileDef f;
    f.file_base = "fig2";
    f.x_column = "alpha0_abs";
    f.x_label = "alpha0";
    f.axis = PresetAxis::alpha0_abs;
    f.x_start = 0.0;
    f.x_stop = 25.0;
    f.default_points = 251;
    f.schedule = model::PulseSchedule::echo(t1, t1);
    auto dev = reference_device();
    dev.q_factor = 1e4;
    dev.nbar = 10;
    dev.mbar = 10;
    f.curves.push_back({"env_n10_meqn", dev, false});
    dev.mbar = 0;
    f.curves.push_back({"env_n10_m0", dev, false});
    dev.nbar = 20;
    dev.mbar = 20;
    f.curves.push_back({"env_n20_meqn", dev, false});
    dev.mbar = 0;
    f.curves.push_back({"env_n20_m0", dev, false});
    defs.push_back(std::move(f));
  } else if (id == "fig3") {
    PresetFileDef fn;
    fn.file_base = "fig3_nbar";
    fn.x_column = "nbar";
    fn.x_label = "nbar (= mbar)";
    fn.axis = PresetAxis::nbar_and_mbar;
    fn.x_start = 0.0;
    fn.x_stop = 25.0;
    fn.default_points = 251;
    fn.schedule = model::PulseSchedule::echo(t1, t1);
    auto dev = reference_device();
    dev.alpha0 = 10.0;
    dev.q_factor = 1e3;
    fn.curves.push_back({"env_q1e3", dev, false});
    dev.q_factor = 1e4;
    fn.curves.push_back({"env_q1e4", dev, false});
    fn.curves.push_back({"env_no_dissipation", dev, true});
    defs.push_back(std::move(fn));

    PresetFileDef fa;
    fa.file_base = "fig3_alpha0";
    fa.x_column = "alpha0_abs";
    fa.x_label = "alpha0";
    fa.axis = PresetAxis::alpha0_abs;
    fa.x_start = 0.0;
    fa.x_stop = 25.0;
    fa.default_points = 251;
    fa.schedule = model::PulseSchedule::echo(t1, t1);
    auto dev2 = reference_device();
    dev2.nbar = 10;
    dev2.mbar = 10;
    dev2.q_factor = 1e3;
    fa.curves.push_back({"env_q1e3", dev2, false});
    dev2.q_factor = 1e4;
    fa.curves.push_back({"env_q1e4", dev2, false});
    fa.curves.push_back({"env_no_dissipation", dev2, true});
    defs.push_back(std::move(fa));
  } else if (id == "fig4") {
    PresetFileDef f;
    f.file_base = "fig4";
    f.x_column = "tf_us";
    f.x_label = "t_f [us]";
    f.axis = PresetAxis::tf_us;
    f.x_start = 0.0;
    f.x_stop = 0.4;
    f.default_points = 401;
    f.schedule = model::PulseSchedule::echo(t1, t1);
    auto dev = reference_device();
    dev.nbar = 10;
    dev.mbar = 10;
    dev.coupling_kappa = 0.1;
    dev.q_factor = 1e3;
    f.curves.push_back({"env_k0p1_q1e3", dev, false});
    dev.q_factor = 1e4;
    f.curves.push_back({"env_k0p1_q1e4", dev, false});
    dev.coupling_kappa = 0.2;
    dev.q_factor = 1e3;
    f.curves.push_back({"env_k0p2_q1e3", dev, false});
    dev.q_factor = 1e4;
    f.curves.push_back({"env_k0p2_q1e4", dev, false});
    f.curves.push_back({"env_no_dissipation", dev, true});
    defs.push_back(std::move(f));
  } else {
    throw config::ConfigError("unknown preset '" + id +
                              "' (expected fig1, fig2, fig3 or fig4)");
  }
  return defs;
}

void preset_point(const PresetFileDef& def, double x,
                  const model::DeviceParams& base, model::DeviceParams& dev,
                  model::PulseSchedule& sched) {
  dev = base;
  sched = def.schedule;
  switch (def.axis) {
    case PresetAxis::elapsed_t_us:
      apply_axis(AxisKey::t_us, x, dev, sched);
      break;
    case PresetAxis::tf_us:
      apply_axis(AxisKey::tf_us, x, dev, sched);
      break;
    case PresetAxis::alpha0_abs:
      apply_axis(AxisKey::alpha0_abs, x, dev, sched);
      break;
    case PresetAxis::nbar_and_mbar:
      dev.nbar = x;
      dev.mbar = x;
      break;
  }
}

std::string expected_header(const PresetFileDef& def) {
  std::string h = def.x_column;
  for (const auto& c : def.curves) h += "," + c.column;
  return h;
}

} // namespace

std::vector<std::string> preset_ids() { return {"fig1", "fig2", "fig3", "fig4"}; }

PresetResult run_preset(const std::string& id, Engine engine, int worker_count,
                        int points) {
  if (engine == Engine::crosscheck)
    throw config::ConfigError(
        "presets accept analytic, gaussian_oracle or fock_oracle engines");
  PresetResult result;
  result.id = id;
  SweepSpec engine_spec; // carries oracle knobs at their defaults
#ifndef _OPENMP
  (void)worker_count;
#endif

  for (const PresetFileDef& def : preset_defs(id)) {
    const int n = points > 0 ? points : def.default_points;
    const int ncurves = int(def.curves.size());
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i)
      grid[i] = n == 1 ? def.x_start
                       : def.x_start + (def.x_stop - def.x_start) * double(i) /
                             double(n - 1);

    std::vector<double> values(std::size_t(n) * ncurves);
    std::vector<std::string> errors(std::size_t(n) * ncurves);
    const int total = n * ncurves;
#ifdef _OPENMP
    const int workers = resolve_worker_count(worker_count);
#pragma omp parallel for schedule(dynamic) num_threads(workers)
#endif
    for (int job = 0; job < total; ++job) {
      const int i = job / ncurves;
      const int c = job % ncurves;
      try {
        model::DeviceParams dev;
        model::PulseSchedule sched;
        preset_point(def, grid[i], def.curves[c].dev, dev, sched);
        if (def.curves[c].reference) {
          const double total_t = sched.total_time_s();
          values[job] = 0.5 + 0.5 * (std::isinf(dev.t2_s)
                                         ? 1.0
                                         : std::exp(-total_t / dev.t2_s));
        } else {
          values[job] = eval_engine(engine, dev, sched, engine_spec).envelope;
        }
      } catch (const std::exception& e) {
        errors[job] = e.what();
      }
    }
    for (int job = 0; job < total; ++job) {
      if (!errors[job].empty())
        throw NumericalError("preset " + def.file_base + " failed at " +
                             def.x_column + "=" + fmt(grid[job / ncurves]) +
                             ", curve " + def.curves[job % ncurves].column +
                             ": " + errors[job]);
    }

    std::ostringstream csv;
    csv << "# echolab v1\n" << expected_header(def) << '\n';
    for (int i = 0; i < n; ++i) {
      csv << fmt(grid[i]);
      for (int c = 0; c < ncurves; ++c)
        csv << ',' << fmt(values[std::size_t(i) * ncurves + c]);
      csv << '\n';
    }
    result.files.push_back({def.file_base + ".csv", csv.str()});
  }
  return result;
}

std::vector<std::string> write_preset_files(const PresetResult& preset,
                                            const std::string& out_dir) {
  std::vector<std::string> paths;
  for (const auto& f : preset.files) {
    const std::filesystem::path p = std::filesystem::path(out_dir) / f.name;
    std::ofstream out(p);
    if (!out)
      throw config::ConfigError("cannot write '" + p.string() + "'");
    out << f.csv;
    paths.push_back(p.string());
  }
  return paths;
}

// ---------------------------------------------------------------------------
// plot scripts

namespace {

void check_csv_against(const PresetFileDef& def, const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw config::ConfigError("plot script: cannot open CSV '" + path + "'");
  std::string line1, line2, line3;
  std::getline(in, line1);
  std::getline(in, line2);
  const bool has_data = bool(std::getline(in, line3)) && !line3.empty();
  if (line1 != "# echolab v1")
    throw config::ConfigError("plot script: '" + path +
                              "' is not an echolab v1 CSV");
  if (line2 != expected_header(def))
    throw config::ConfigError("plot script: '" + path +
                              "' schema mismatch: expected header '" +
                              expected_header(def) + "', got '" + line2 + "'");
  if (!has_data)
    throw config::ConfigError("plot script: '" + path + "' has no data rows");
}

} // namespace

std::string emit_plot_script(const std::string& csv_path,
                             const std::string& preset_id) {
  const std::vector<PresetFileDef> defs = preset_defs(preset_id);
  std::vector<std::string> paths;
  if (defs.size() == 1) {
    paths.push_back(csv_path);
  } else {
    // fig3: expect the *_nbar.csv path; its sibling holds the alpha0 sweep.
    const std::string marker = "_nbar.csv";
    const std::size_t pos = csv_path.rfind(marker);
    if (pos == std::string::npos)
      throw config::ConfigError("plot script: preset fig3 expects the "
                                "*_nbar.csv path, got '" + csv_path + "'");
    paths.push_back(csv_path);
    paths.push_back(csv_path.substr(0, pos) + "_alpha0.csv" +
                    csv_path.substr(pos + marker.size()));
  }
  for (std::size_t i = 0; i < defs.size(); ++i)
    check_csv_against(defs[i], paths[i]);

  std::ostringstream gp;
  gp << "# gnuplot script generated by echolab (preset " << preset_id << ")\n"
     << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set key outside right\n"
     << "set ylabel 'envelope of P_+'\n"
     << "set yrange [0.5:1]\n"
     << "set grid\n";
  gp << "set xlabel '" << defs[0].x_label << "'\n";
  gp << "plot ";
  bool first = true;
  for (std::size_t i = 0; i < defs.size(); ++i) {
    for (std::size_t c = 0; c < defs[i].curves.size(); ++c) {
      if (!first) gp << ", \\\n     ";
      first = false;
      std::string title = defs[i].curves[c].column;
      if (defs.size() > 1)
        title = defs[i].x_column + ": " + title;
      gp << "'" << paths[i] << "' using 1:" << (c + 2) << " with lines title '"
         << title << "'";
    }
  }
  gp << "\n";
  return gp.str();
}

void write_plot_script(const std::string& csv_path,
                       const std::string& preset_id,
                       const std::string& script_path) {
  const std::string script = emit_plot_script(csv_path, preset_id);
  std::ofstream out(script_path);
  if (!out)
    throw config::ConfigError("cannot write plot script '" + script_path + "'");
  out << script;
}

} // namespace echolab::sweep
