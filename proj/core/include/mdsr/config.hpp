#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mdsr/pumping.hpp"
#include "mdsr/spectrum.hpp"

namespace mdsr {

/// Configuration problem: a syntax error (line > 0) or an invalid field value.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::string field, int line = 0)
      : std::runtime_error(message), field_(std::move(field)), line_(line) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

struct ScanConfig {
  double start = -80.0;  ///< MHz
  double stop = 80.0;
  double step = 1.0;
};

struct SynthOptions {
  PopulationDistribution pops = PopulationDistribution::from_percent(32.0, 36.0, 32.0);
  double noise = 0.0;
  std::uint64_t seed = 1;
};

struct FitOptions {
  bool fit_density = true;
  PopulationDistribution init = PopulationDistribution::uniform();
  double init_density = 1.2e11;
  double density_min = 1e9;
  double density_max = 1e13;
  bool multi_start = true;
  int max_iterations = 200;
};

struct OutputPaths {
  std::string spectrum = "spectrum.csv";
  std::string noisy_spectrum = "spectrum_noisy.csv";
  std::string fit_result = "fit_result.txt";
};

/// Everything a CLI run needs. Defaults reproduce the reference parameter set.
struct RunConfig {
  ModelParameters experiment;
  ScanConfig scan;
  SynthOptions synth;
  FitOptions fit;
  PumpConfig pump;
  OutputPaths output;

  /// Throws ConfigError naming the offending field, e.g. "scan.step".
  void validate() const;
};

/// Parses `[section]` / `key = value` text (# or ; comments, whole-line or after
/// whitespace). Keys may also be
/// written fully qualified at the top, e.g. `scan.step = 0.5`. Each override is
/// `section.key=value` and wins over the text. The result is validated.
RunConfig parse_config(std::string_view text, std::span<const std::string> overrides = {});

/// parse_config on a file's contents. Throws ConfigError if it cannot be read.
RunConfig load_config(const std::filesystem::path& path, std::span<const std::string> overrides = {});

/// Serialises every field in the parse_config format.
std::string to_config_text(const RunConfig& config);

}  // namespace mdsr
