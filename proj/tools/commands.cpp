#include "commands.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>

#include "mdsr/fitting.hpp"
#include "mdsr/pumping.hpp"
#include "mdsr/spectrum_io.hpp"
#include "mdsr/text_format.hpp"
#include "mdsr/validation.hpp"

namespace mdsr::cli {
namespace {

void print_warnings(const ExperimentModel& model, std::ostream& err) {
  for (const std::string& w : model.warnings()) err << "warning: " << w << '\n';
}

const char* polarization_name(int q) {
  switch (q) {
    case -1: return "sigma-";
    case 0: return "pi";
    default: return "sigma+";
  }
}

std::string pct(double fraction) { return format_fixed(100.0 * fraction, 1); }

}  // namespace

RunConfig resolve_config(const CommonOptions& options) {
  std::vector<std::string> overrides = options.overrides;
  if (options.seed) overrides.push_back("synth.seed=" + std::to_string(*options.seed));
  if (options.noise) overrides.push_back("synth.noise=" + format_double(*options.noise));
  return options.config_path ? load_config(*options.config_path, overrides) : parse_config("", overrides);
}

std::vector<double> parse_triple(const std::string& text) {
  std::vector<double> values;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view field = rest.substr(0, comma);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
      throw std::invalid_argument("expected three comma-separated numbers, got '" + text + "'");
    }
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (values.size() != 3) throw std::invalid_argument("expected three comma-separated numbers, got '" + text + "'");
  return values;
}

int cmd_synth(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const ExperimentModel model = make_experiment_model(config.experiment);
  print_warnings(model, err);
  const auto grid = make_grid(config.scan.start, config.scan.stop, config.scan.step);
  const Spectrum clean = synth_spectrum(model, config.synth.pops, grid);
  write_spectrum(clean, config.output.spectrum);
  out << "populations (%): " << pct(config.synth.pops.p_minus) << ' ' << pct(config.synth.pops.p_zero) << ' '
      << pct(config.synth.pops.p_plus) << '\n';
  out << "wrote " << clean.size() << " points to " << config.output.spectrum << '\n';
  if (config.synth.noise > 0.0) {
    const Spectrum noisy = add_noise(clean, config.synth.noise, config.synth.seed);
    write_spectrum(noisy, config.output.noisy_spectrum);
    out << "wrote noisy copy (sigma " << format_double(config.synth.noise) << ", seed " << config.synth.seed
        << ") to " << config.output.noisy_spectrum << '\n';
  }
  return 0;
}

int cmd_fit(const RunConfig& config, const std::string& input, std::ostream& out, std::ostream& err) {
  const ExperimentModel model = make_experiment_model(config.experiment);
  print_warnings(model, err);
  FitProblem problem = FitProblem::from(read_spectrum(input), model);
  problem.fit_density = config.fit.fit_density;
  problem.init_pops = config.fit.init;
  problem.init_density = config.fit.init_density;
  problem.density_min = config.fit.density_min;
  problem.density_max = config.fit.density_max;
  problem.multi_start = config.fit.multi_start;
  problem.max_iterations = config.fit.max_iterations;
  const FitResult r = fit_populations(problem);

  out << "parameter        value\n";
  out << "P(a_-1) %        " << pct(r.pops.p_minus) << '\n';
  out << "P(a_0)  %        " << pct(r.pops.p_zero) << '\n';
  out << "P(a_+1) %        " << pct(r.pops.p_plus) << '\n';
  out << "N_F1 cm^-3       " << format_double(r.n_f1) << (config.fit.fit_density ? "" : " (fixed)") << '\n';
  out << "residual rms     " << format_double(r.residual_rms) << '\n';
  out << "iterations       " << r.iterations << '\n';
  out << "converged        " << (r.converged ? "yes" : "no") << '\n';
  write_fit_result(r, config.output.fit_result);
  out << "wrote " << config.output.fit_result << '\n';
  if (r.jacobian_condition > 1e12) {
    err << "warning: Jacobian condition number " << format_double(r.jacobian_condition)
        << "; the data barely constrain the populations\n";
  }
  if (!r.converged) err << "warning: fit did not converge\n";
  return r.converged ? 0 : 2;
}

int cmd_pump_design(const RunConfig& config, const PopulationDistribution& target,
                    const std::optional<std::string>& report_path, std::ostream& out, std::ostream&) {
  const LevelScheme scheme = build_level_scheme(config.experiment.magnetic_field, true);
  const LaserField coupling = pumping_coupling(scheme, config.experiment.omega_c2, config.experiment.coupling_detuning);
  PumpDesignOptions options;
  options.beam_diameter_mm = config.pump.beam_diameter_mm;
  const PumpPlan plan = design_pump(target, scheme, coupling, config.pump.duration_ms, options);

  out << "target (%)        " << pct(target.p_minus) << ' ' << pct(target.p_zero) << ' ' << pct(target.p_plus) << '\n';
  out << "polarization      " << polarization_name(plan.polarization) << '\n';
  out << "power (mW)        " << format_fixed(plan.power_mw, 4) << '\n';
  out << "duration (ms)     " << format_double(config.pump.duration_ms) << '\n';
  out << "predicted (%)     " << pct(plan.predicted.p_minus) << ' ' << pct(plan.predicted.p_zero) << ' '
      << pct(plan.predicted.p_plus) << '\n';
  out << "L1 distance       " << format_fixed(plan.target_distance, 4) << '\n';
  if (report_path) {
    std::string text;
    text += "polarization = " + std::to_string(plan.polarization) + "\n";
    text += "power_mw = " + format_double17(plan.power_mw) + "\n";
    text += "duration_ms = " + format_double17(config.pump.duration_ms) + "\n";
    text += "p_minus = " + format_double17(plan.predicted.p_minus) + "\n";
    text += "p_zero = " + format_double17(plan.predicted.p_zero) + "\n";
    text += "p_plus = " + format_double17(plan.predicted.p_plus) + "\n";
    text += "target_distance = " + format_double17(plan.target_distance) + "\n";
    write_text_file(*report_path, text);
  }
  return 0;
}

int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream&) {
  const auto checks = run_invariant_suite(config.experiment);
  bool all = true;
  for (const CheckResult& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    all = all && c.passed;
  }
  out << (all ? "all checks passed" : "some checks failed") << '\n';
  return all ? 0 : 1;
}

}  // namespace mdsr::cli
