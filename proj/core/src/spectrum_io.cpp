#include "mdsr/spectrum_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "mdsr/text_format.hpp"

namespace mdsr {
namespace {

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_field(std::string_view field, std::size_t row, const char* name) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    throw SpectrumFormatError("row " + std::to_string(row) + ": bad " + name + " '" + std::string(field) + "'", row);
  }
  return value;
}

}  // namespace

std::string format_spectrum_csv(const Spectrum& spectrum) {
  spectrum.validate();
  std::string out(kSpectrumHeader);
  out += '\n';
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    out += format_double17(spectrum.detunings[i]);
    out += ',';
    out += format_double17(spectrum.transmission[i]);
    out += '\n';
  }
  return out;
}

Spectrum parse_spectrum_csv(std::string_view text) {
  Spectrum s;
  std::size_t row = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = strip_cr(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++row;
    if (!header_seen) {
      if (trim(line) != kSpectrumHeader) {
        throw SpectrumFormatError("row 1: expected header '" + std::string(kSpectrumHeader) + "'", 1);
      }
      header_seen = true;
      continue;
    }
    if (trim(line).empty()) {
      if (text.empty()) break;  // final blank line
      throw SpectrumFormatError("row " + std::to_string(row) + ": empty row", row);
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw SpectrumFormatError("row " + std::to_string(row) + ": expected two comma-separated fields", row);
    }
    s.detunings.push_back(parse_field(line.substr(0, comma), row, "detuning"));
    s.transmission.push_back(parse_field(line.substr(comma + 1), row, "transmission"));
  }
  if (!header_seen) throw SpectrumFormatError("missing header", 1);
  s.validate();
  return s;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_spectrum(const Spectrum& spectrum, const std::filesystem::path& path) {
  write_text_file(path, format_spectrum_csv(spectrum));
}

Spectrum read_spectrum(const std::filesystem::path& path) { return parse_spectrum_csv(read_text_file(path)); }

std::string format_fit_result(const FitResult& r) {
  std::string out;
  auto kv = [&out](std::string_view key, const std::string& value) {
    out.append(key).append(" = ").append(value).append("\n");
  };
  kv("p_minus_percent", format_fixed(100.0 * r.pops.p_minus, 1));
  kv("p_zero_percent", format_fixed(100.0 * r.pops.p_zero, 1));
  kv("p_plus_percent", format_fixed(100.0 * r.pops.p_plus, 1));
  kv("n_f1_cm3", format_double17(r.n_f1));
  kv("residual_rms", format_double17(r.residual_rms));
  kv("converged", r.converged ? "true" : "false");
  kv("iterations", std::to_string(r.iterations));
  kv("start_index", std::to_string(r.start_index));
  kv("jacobian_condition", format_double17(r.jacobian_condition));
  kv("p_minus", format_double17(r.pops.p_minus));
  kv("p_zero", format_double17(r.pops.p_zero));
  kv("p_plus", format_double17(r.pops.p_plus));
  return out;
}

void write_fit_result(const FitResult& result, const std::filesystem::path& path) {
  write_text_file(path, format_fit_result(result));
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t row = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = trim(strip_cr(text.substr(0, nl)));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++row;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw SpectrumFormatError("line " + std::to_string(row) + ": expected key = value", row);
    }
    out[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

}  // namespace mdsr
