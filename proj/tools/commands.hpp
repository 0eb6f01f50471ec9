#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mdsr/config.hpp"

namespace mdsr::cli {

/// Flags shared by every subcommand. Flags win over the config file.
struct CommonOptions {
  std::optional<std::string> config_path;
  std::vector<std::string> overrides;  ///< --set section.key=value
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<double> noise;
};

/// Loads the config (defaults when no file is given) and applies the flag overrides.
RunConfig resolve_config(const CommonOptions& options);

/// "32,36,32" -> the three numbers. Throws std::invalid_argument.
std::vector<double> parse_triple(const std::string& text);

/// Writes the clean spectrum to output.spectrum (or --out) and, with noise > 0,
/// a noisy copy to output.noisy_spectrum.
int cmd_synth(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Fits `input` and writes the key-value result to output.fit_result (or --out).
/// Returns 0 when converged, 2 otherwise.
int cmd_fit(const RunConfig& config, const std::string& input, std::ostream& out, std::ostream& err);

/// Best pump polarization and power for a target F=1 distribution (fractions).
int cmd_pump_design(const RunConfig& config, const PopulationDistribution& target,
                    const std::optional<std::string>& report_path, std::ostream& out, std::ostream& err);

/// Runs the invariant suite; 0 if every check passes, 1 otherwise.
int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace mdsr::cli
