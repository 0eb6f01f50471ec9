#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mdsr/fitting.hpp"
#include "mdsr/spectrum.hpp"

namespace mdsr {

/// Malformed spectrum text. row() is the 1-based line number (header = 1), 0 if not row specific.
class SpectrumFormatError : public std::runtime_error {
 public:
  SpectrumFormatError(const std::string& message, std::size_t row)
      : std::runtime_error(message), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

inline constexpr std::string_view kSpectrumHeader = "detuning_mhz,transmission";

/// CSV text: the header line, then one `detuning,transmission` row per point with
/// 17 significant digits, LF line endings.
std::string format_spectrum_csv(const Spectrum& spectrum);

/// Inverse of format_spectrum_csv. Accepts a trailing CR per line. Throws
/// SpectrumFormatError for a bad header or row, std::invalid_argument if the
/// parsed spectrum is invalid (non-increasing detunings, transmission outside [0, 1]).
Spectrum parse_spectrum_csv(std::string_view text);

void write_spectrum(const Spectrum& spectrum, const std::filesystem::path& path);
/// Throws std::runtime_error when the file cannot be opened.
Spectrum read_spectrum(const std::filesystem::path& path);

/// Flat `key = value` report of a fit: percentages to 0.1 pp, then full precision values.
std::string format_fit_result(const FitResult& result);
void write_fit_result(const FitResult& result, const std::filesystem::path& path);

/// Parses `key = value` lines (blank lines and # comments skipped).
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Whole file as a string; throws std::runtime_error when it cannot be read.
std::string read_text_file(const std::filesystem::path& path);
/// Writes bytes verbatim; throws std::runtime_error on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace mdsr
