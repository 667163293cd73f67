// echolab command-line front end.
//
// Subcommands:
//   sweep <config>       parameter sweep -> CSV
//   preset <figN>        figure-reproduction presets -> CSV (+ plot script)
//   crosscheck <config>  run all three engines, compare traces
//   validate <config>    dispersive-regime report for the configured device
//
// Exit codes: 0 success, 1 usage/config error, 2 regime-validation failure
// under --strict, 3 crosscheck tolerance failure, 4 numerical failure.

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "echolab/config.hpp"
#include "echolab/errors.hpp"
#include "echolab/fock.hpp"
#include "echolab/model.hpp"
#include "echolab/sweep.hpp"

namespace {

using namespace echolab;

constexpr const char* kUsage = R"(usage: echolab <command> [options]

commands:
  sweep <config>        run the sweep described by a key-value config file,
                        write CSV to --out=FILE (default stdout)
  preset <id>           figure presets fig1..fig4; writes <id>*.csv into
                        --out-dir=DIR (default .); --plot also writes a
                        gnuplot script <id>.gp
  crosscheck <config>   force the crosscheck engine (analytic vs both
                        oracles); --tol=X overrides crosscheck.tol
  validate <config>     print derived scales and the dispersive-regime report

common options:
  --workers=N           worker pool size (default: ECHOLAB_WORKERS or all cores)
  --strict              make regime-validation failures fatal (exit 2)
  --engine=E            analytic | gaussian_oracle | fock_oracle (preset/sweep)
  --points=N            override preset grid density
  --KEY=VALUE           override any config key, e.g. --device.kappa=0.25

exit codes: 0 ok, 1 usage/config, 2 regime (--strict), 3 crosscheck, 4 numerical
)";

struct CommonArgs {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::optional<std::string> out;
  std::string out_dir = ".";
  std::optional<std::string> engine;
  std::optional<double> tol;
  int workers = 0;
  int points = 0;
  bool strict = false;
  bool plot = false;
};

CommonArgs parse_args(int argc, char** argv, int first, bool wants_config) {
  CommonArgs args;
  for (int i = first; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--", 0) != 0) {
      if (args.config_path.empty()) {
        args.config_path = arg;
        continue;
      }
      throw config::ConfigError("unexpected argument '" + arg + "'");
    }
    const std::string body = arg.substr(2);
    const std::size_t eq = body.find('=');
    const std::string key = body.substr(0, eq == std::string::npos ? body.size() : eq);
    const std::string val = eq == std::string::npos ? "" : body.substr(eq + 1);
    if (key == "strict") {
      args.strict = true;
    } else if (key == "plot") {
      args.plot = true;
    } else if (key == "out") {
      args.out = val;
    } else if (key == "out-dir") {
      args.out_dir = val;
    } else if (key == "engine") {
      args.engine = val;
    } else if (key == "tol") {
      args.tol = config::parse_double(val, "--tol");
    } else if (key == "workers") {
      args.workers = int(config::parse_double(val, "--workers"));
    } else if (key == "points") {
      args.points = int(config::parse_double(val, "--points"));
    } else if (key.find('.') != std::string::npos) {
      if (eq == std::string::npos)
        throw config::ConfigError("config override '" + arg +
                                  "' needs =VALUE");
      args.overrides.emplace_back(key, val);
    } else {
      throw config::ConfigError("unknown option '" + arg + "'");
    }
  }
  if (wants_config && args.config_path.empty())
    throw config::ConfigError("missing <config> argument");
  return args;
}

config::KeyValues load_config(const CommonArgs& args) {
  config::KeyValues cfg = config::KeyValues::from_file(args.config_path);
  for (const auto& [k, v] : args.overrides) cfg.set(k, v);
  return cfg;
}

void write_output(const std::string& text, const std::optional<std::string>& out) {
  if (!out) {
    std::cout << text;
    return;
  }
  std::ofstream f(*out);
  if (!f) throw config::ConfigError("cannot write '" + *out + "'");
  f << text;
}

int cmd_sweep(const CommonArgs& args, bool force_crosscheck) {
  const config::KeyValues cfg = load_config(args);
  sweep::SweepSpec spec = sweep::spec_from_config(cfg);
  if (args.engine) spec.engine = sweep::engine_from_string(*args.engine);
  if (force_crosscheck) spec.engine = sweep::Engine::crosscheck;
  if (args.tol) spec.crosscheck_tol = *args.tol;
  spec.strict = args.strict;

  const sweep::SweepResult res = sweep::run_sweep(spec, args.workers);
  write_output(res.csv, args.out);
  if (res.regime_failures > 0) {
    std::cerr << "warning: " << res.regime_failures
              << " grid point(s) outside the dispersive regime; first:\n"
              << res.first_regime_failure;
    if (args.strict) return 2;
  }
  if (spec.engine == sweep::Engine::crosscheck) {
    std::cerr << "crosscheck: max |trace| discrepancy "
              << res.max_crosscheck_discrepancy << " (tolerance "
              << spec.crosscheck_tol << ")\n";
    if (!res.crosscheck_ok) return 3;
  }
  return 0;
}

int cmd_preset(const CommonArgs& args) {
  if (args.config_path.empty())
    throw config::ConfigError("missing preset id (fig1..fig4)");
  const std::string id = args.config_path;
  const sweep::Engine engine =
      args.engine ? sweep::engine_from_string(*args.engine)
                  : sweep::Engine::analytic;
  if (engine == sweep::Engine::fock_oracle) {
    const int dim = fock::recommended_dim(25.0, 20.0);
    std::cerr << "note: fock_oracle at preset amplitudes needs dim ~" << dim
              << "; this can take a while\n";
  }
  const sweep::PresetResult preset =
      sweep::run_preset(id, engine, args.workers, args.points);
  const std::vector<std::string> paths =
      sweep::write_preset_files(preset, args.out_dir);
  for (const auto& p : paths) std::cout << p << '\n';
  if (args.plot) {
    const std::string script_path =
        (std::string(args.out_dir) + "/" + id + ".gp");
    sweep::write_plot_script(paths.front(), id, script_path);
    std::cout << script_path << '\n';
  }
  return 0;
}

int cmd_validate(const CommonArgs& args) {
  const config::KeyValues cfg = load_config(args);
  const sweep::SweepSpec spec = sweep::spec_from_config(cfg);
  const model::DeviceParams& dev = spec.base;
  const model::DerivedParams derived = model::derive(dev);
  std::printf("device: nu_a = %.6g GHz, omega/2pi = %.6g MHz, kappa = %.6g\n",
              dev.qubit_splitting_hz / 1e9, dev.mech_freq_hz / 1e6,
              dev.coupling_kappa);
  std::printf("        Q = %g, nbar = %.6g, mbar = %.6g, T2 = %g us, "
              "|alpha0| = %.6g\n",
              dev.q_factor, dev.nbar, dev.mbar, dev.t2_s * 1e6,
              std::abs(dev.alpha0));
  std::printf("derived: omega1 = %.10g rad/s, gamma = %.10g rad/s\n",
              derived.omega1_rad, derived.gamma_rad);
  std::printf("         beta = %.10g%+.10gi, M = %.10g%+.10gi\n",
              derived.beta.real(), derived.beta.imag(), derived.big_m.real(),
              derived.big_m.imag());
  std::printf("         delta = %.10g\n", derived.delta_validity);
  if (derived.x_zp_m)
    std::printf("         x_zp = %.6g m\n", *derived.x_zp_m);
  std::printf("thermal uncertainty diameter (nbar): %.6g\n",
              model::thermal_uncertainty_diameter(dev.nbar));
  if (spec.schedule.kind == model::PulseSchedule::Kind::echo &&
      spec.schedule.t1_s > 0)
    std::printf("separation at t1 (small-time): %.6g\n",
                analytic::separation_small_time(dev.alpha0, derived.omega1_rad,
                                                spec.schedule.t1_s));
  const model::RegimeReport report = model::validate_regime(dev);
  std::printf("dispersive-regime checks:\n%s", report.summary().c_str());
  if (!report.all_pass && args.strict) return 2;
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fputs(kUsage, stderr);
    return 1;
  }
  const std::string cmd = argv[1];
  try {
    if (cmd == "sweep") return cmd_sweep(parse_args(argc, argv, 2, true), false);
    if (cmd == "crosscheck")
      return cmd_sweep(parse_args(argc, argv, 2, true), true);
    if (cmd == "preset") return cmd_preset(parse_args(argc, argv, 2, false));
    if (cmd == "validate") return cmd_validate(parse_args(argc, argv, 2, true));
    if (cmd == "help" || cmd == "--help" || cmd == "-h") {
      std::fputs(kUsage, stdout);
      return 0;
    }
    std::cerr << "unknown command '" << cmd << "'\n";
    std::fputs(kUsage, stderr);
    return 1;
  } catch (const config::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const model::ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
