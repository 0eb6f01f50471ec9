#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "mdsr/spectrum_io.hpp"
#include "mdsr/text_format.hpp"

namespace {

void add_common(CLI::App* cmd, mdsr::cli::CommonOptions& o, const std::string& out_help) {
  cmd->add_option("--config", o.config_path, "config file ([section] key = value)");
  cmd->add_option("--set", o.overrides, "override, e.g. --set scan.step=0.5 (repeatable)");
  cmd->add_option("--out", o.out, out_help);
  cmd->add_option("--seed", o.seed, "noise seed");
  cmd->add_option("--noise", o.noise, "transmission noise sigma");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-dark-state resonance spectra: synthesis, population fitting, pump design"};
  app.require_subcommand(1);

  mdsr::cli::CommonOptions common;
  std::string pops;
  std::string input;
  std::string target;

  CLI::App* synth = app.add_subcommand("synth", "write a transmission spectrum CSV");
  add_common(synth, common, "spectrum CSV path");
  synth->add_option("--pops", pops, "F=1 populations in percent, e.g. 32,36,32");

  CLI::App* fit = app.add_subcommand("fit", "fit populations to a spectrum CSV");
  add_common(fit, common, "fit result path");
  fit->add_option("input", input, "spectrum CSV")->required();

  CLI::App* pump = app.add_subcommand("pump-design", "choose pump polarization and power");
  add_common(pump, common, "plan report path");
  pump->add_option("--target", target, "target populations in percent, e.g. 0,100,0")->required();

  CLI::App* validate = app.add_subcommand("validate", "run the physical invariant suite");
  add_common(validate, common, "unused");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      if (!pops.empty()) {
        const auto p = mdsr::cli::parse_triple(pops);
        common.overrides.push_back("synth.p_minus=" + mdsr::format_double(p[0]));
        common.overrides.push_back("synth.p_zero=" + mdsr::format_double(p[1]));
        common.overrides.push_back("synth.p_plus=" + mdsr::format_double(p[2]));
      }
      if (common.out) common.overrides.push_back("output.spectrum=" + *common.out);
      return mdsr::cli::cmd_synth(mdsr::cli::resolve_config(common), std::cout, std::cerr);
    }
    if (fit->parsed()) {
      if (common.out) common.overrides.push_back("output.fit_result=" + *common.out);
      return mdsr::cli::cmd_fit(mdsr::cli::resolve_config(common), input, std::cout, std::cerr);
    }
    if (pump->parsed()) {
      const auto t = mdsr::cli::parse_triple(target);
      const auto dist = mdsr::PopulationDistribution::from_percent(t[0], t[1], t[2]);
      return mdsr::cli::cmd_pump_design(mdsr::cli::resolve_config(common), dist, common.out, std::cout, std::cerr);
    }
    return mdsr::cli::cmd_validate(mdsr::cli::resolve_config(common), std::cout, std::cerr);
  } catch (const mdsr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const mdsr::SpectrumFormatError& e) {
    std::cerr << "spectrum error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 1;
}
