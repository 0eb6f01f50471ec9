#include "mdsr/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mdsr/text_format.hpp"

namespace mdsr {
namespace {

double parse_double(const std::string& field, const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw ConfigError(field + ": not a number: '" + text + "'", field);
  return value;
}

std::int64_t parse_int(const std::string& field, const std::string& text) {
  std::int64_t value = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw ConfigError(field + ": not an integer: '" + text + "'", field);
  return value;
}

bool parse_bool(const std::string& field, const std::string& text) {
  if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
  if (text == "false" || text == "no" || text == "off" || text == "0") return false;
  throw ConfigError(field + ": not a boolean: '" + text + "'", field);
}

// `value  ; note` -> `value`. A comment marker must follow whitespace.
std::string strip_inline_comment(const std::string& value) {
  for (std::size_t i = 1; i < value.size(); ++i) {
    if ((value[i] == ';' || value[i] == '#') && (value[i - 1] == ' ' || value[i - 1] == '\t')) {
      const auto end = value.find_last_not_of(" \t", i - 1);
      return end == std::string::npos ? std::string{} : value.substr(0, end + 1);
    }
  }
  return value;
}

struct PercentTriple {
  double minus, zero, plus;
};

using Setter = std::function<void(RunConfig&, PercentTriple&, PercentTriple&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto real = [&t](const std::string& key, std::function<double&(RunConfig&)> ref) {
      t[key] = [ref](RunConfig& c, PercentTriple&, PercentTriple&, const std::string& f, const std::string& v) {
        ref(c) = parse_double(f, v);
      };
    };
    real("experiment.omega_c2", [](RunConfig& c) -> double& { return c.experiment.omega_c2; });
    real("experiment.omega_p2", [](RunConfig& c) -> double& { return c.experiment.omega_p2; });
    real("experiment.coupling_detuning", [](RunConfig& c) -> double& { return c.experiment.coupling_detuning; });
    real("experiment.gamma_ab", [](RunConfig& c) -> double& { return c.experiment.gamma_ab; });
    real("experiment.gamma_ac", [](RunConfig& c) -> double& { return c.experiment.gamma_ac; });
    real("experiment.magnetic_field", [](RunConfig& c) -> double& { return c.experiment.magnetic_field; });
    real("experiment.n_f1", [](RunConfig& c) -> double& { return c.experiment.n_f1; });
    real("experiment.path_length", [](RunConfig& c) -> double& { return c.experiment.path_length; });
    real("experiment.wavelength", [](RunConfig& c) -> double& { return c.experiment.wavelength; });
    real("scan.start", [](RunConfig& c) -> double& { return c.scan.start; });
    real("scan.stop", [](RunConfig& c) -> double& { return c.scan.stop; });
    real("scan.step", [](RunConfig& c) -> double& { return c.scan.step; });
    real("synth.noise", [](RunConfig& c) -> double& { return c.synth.noise; });
    real("fit.init_density", [](RunConfig& c) -> double& { return c.fit.init_density; });
    real("fit.density_min", [](RunConfig& c) -> double& { return c.fit.density_min; });
    real("fit.density_max", [](RunConfig& c) -> double& { return c.fit.density_max; });
    real("pump.power", [](RunConfig& c) -> double& { return c.pump.power_mw; });
    real("pump.beam_diameter", [](RunConfig& c) -> double& { return c.pump.beam_diameter_mm; });
    real("pump.duration", [](RunConfig& c) -> double& { return c.pump.duration_ms; });

    auto percent = [&t](const std::string& key, bool init, double PercentTriple::*slot) {
      t[key] = [init, slot](RunConfig&, PercentTriple& synth, PercentTriple& fit, const std::string& f,
                            const std::string& v) {
        // GCC 11 drops the store in `(init ? fit : synth).*slot = ...`.
        PercentTriple& target = init ? fit : synth;
        target.*slot = parse_double(f, v);
      };
    };
    percent("synth.p_minus", false, &PercentTriple::minus);
    percent("synth.p_zero", false, &PercentTriple::zero);
    percent("synth.p_plus", false, &PercentTriple::plus);
    percent("fit.init_p_minus", true, &PercentTriple::minus);
    percent("fit.init_p_zero", true, &PercentTriple::zero);
    percent("fit.init_p_plus", true, &PercentTriple::plus);

    t["synth.seed"] = [](RunConfig& c, PercentTriple&, PercentTriple&, const std::string& f, const std::string& v) {
      const auto seed = parse_int(f, v);
      if (seed < 0) throw ConfigError(f + " must be >= 0, got " + v, f);
      c.synth.seed = static_cast<std::uint64_t>(seed);
    };
    t["fit.max_iterations"] = [](RunConfig& c, PercentTriple&, PercentTriple&, const std::string& f,
                                 const std::string& v) {
      const auto n = parse_int(f, v);
      if (n < 1 || n > 1'000'000) throw ConfigError(f + " must be in [1, 1000000], got " + v, f);
      c.fit.max_iterations = static_cast<int>(n);
    };
    t["pump.polarization"] = [](RunConfig& c, PercentTriple&, PercentTriple&, const std::string& f,
                                const std::string& v) {
      if (v == "sigma-" || v == "-1") c.pump.polarization = -1;
      else if (v == "pi" || v == "0") c.pump.polarization = 0;
      else if (v == "sigma+" || v == "+1" || v == "1") c.pump.polarization = 1;
      else throw ConfigError(f + ": expected sigma-, pi or sigma+, got '" + v + "'", f);
    };
    t["fit.fit_density"] = [](RunConfig& c, PercentTriple&, PercentTriple&, const std::string& f,
                              const std::string& v) { c.fit.fit_density = parse_bool(f, v); };
    t["fit.multi_start"] = [](RunConfig& c, PercentTriple&, PercentTriple&, const std::string& f,
                              const std::string& v) { c.fit.multi_start = parse_bool(f, v); };
    t["output.spectrum"] = [](RunConfig& c, PercentTriple&, PercentTriple&, const std::string&,
                              const std::string& v) { c.output.spectrum = v; };
    t["output.noisy_spectrum"] = [](RunConfig& c, PercentTriple&, PercentTriple&, const std::string&,
                                    const std::string& v) { c.output.noisy_spectrum = v; };
    t["output.fit_result"] = [](RunConfig& c, PercentTriple&, PercentTriple&, const std::string&,
                                const std::string& v) { c.output.fit_result = v; };
    return t;
  }();
  return table;
}

void require(bool ok, const std::string& field, const std::string& rule, double value) {
  if (!ok) throw ConfigError(field + " must be " + rule + ", got " + format_double(value), field);
}

PopulationDistribution percent_distribution(const PercentTriple& p, const std::string& section) {
  for (auto [name, v] : {std::pair{"p_minus", p.minus}, {"p_zero", p.zero}, {"p_plus", p.plus}}) {
    const std::string field = section + name;
    require(v >= 0.0 && v <= 100.0, field, "in [0, 100] percent", v);
  }
  const double sum = p.minus + p.zero + p.plus;
  if (std::abs(sum - 100.0) > 1e-6) {
    throw ConfigError(section + "p_*: percentages must sum to 100, got " + format_double(sum), section + "p_minus");
  }
  return PopulationDistribution::from_percent(p.minus, p.zero, p.plus);
}

}  // namespace

void RunConfig::validate() const {
  const ModelParameters& e = experiment;
  require(e.omega_c2 >= 0.0 && e.omega_c2 <= 500.0, "experiment.omega_c2", "in [0, 500] MHz", e.omega_c2);
  require(e.omega_p2 >= 0.0 && e.omega_p2 <= 500.0, "experiment.omega_p2", "in [0, 500] MHz", e.omega_p2);
  require(std::abs(e.coupling_detuning) <= 500.0, "experiment.coupling_detuning", "in [-500, 500] MHz",
          e.coupling_detuning);
  require(e.gamma_ab >= 0.0 && e.gamma_ab <= 500.0, "experiment.gamma_ab", "in [0, 500] MHz", e.gamma_ab);
  require(e.gamma_ac > e.gamma_ab && e.gamma_ac <= 500.0, "experiment.gamma_ac",
          "greater than gamma_ab and at most 500 MHz", e.gamma_ac);
  require(e.magnetic_field >= 0.0 && e.magnetic_field <= 10.0, "experiment.magnetic_field", "in [0, 10] G",
          e.magnetic_field);
  require(e.n_f1 >= 1e9 && e.n_f1 <= 1e13, "experiment.n_f1", "in [1e9, 1e13] cm^-3", e.n_f1);
  require(e.path_length > 0.0 && e.path_length <= 1e4, "experiment.path_length", "in (0, 1e4] mm", e.path_length);
  require(e.wavelength > 0.0, "experiment.wavelength", "> 0 nm", e.wavelength);

  require(std::isfinite(scan.start), "scan.start", "finite", scan.start);
  require(scan.step > 0.0 && std::isfinite(scan.step), "scan.step", "> 0", scan.step);
  require(scan.stop > scan.start && std::isfinite(scan.stop), "scan.stop", "greater than scan.start", scan.stop);
  require((scan.stop - scan.start) / scan.step <= 1e7, "scan.step", "coarse enough for at most 1e7 points",
          scan.step);

  require(synth.noise >= 0.0 && synth.noise <= 1.0, "synth.noise", "in [0, 1]", synth.noise);

  require(fit.density_min >= 1e9 && fit.density_min < fit.density_max, "fit.density_min",
          "in [1e9, density_max)", fit.density_min);
  require(fit.density_max <= 1e13, "fit.density_max", "at most 1e13 cm^-3", fit.density_max);
  require(fit.init_density >= fit.density_min && fit.init_density <= fit.density_max, "fit.init_density",
          "within [density_min, density_max]", fit.init_density);
  require(fit.max_iterations >= 1, "fit.max_iterations", ">= 1", fit.max_iterations);

  require(pump.polarization >= -1 && pump.polarization <= 1, "pump.polarization", "-1, 0 or +1",
          pump.polarization);
  require(pump.power_mw >= 0.0 && pump.power_mw <= 1e4, "pump.power", "in [0, 1e4] mW", pump.power_mw);
  require(pump.beam_diameter_mm > 0.0, "pump.beam_diameter", "> 0 mm", pump.beam_diameter_mm);
  require(pump.duration_ms > 0.0 && pump.duration_ms <= 1e6, "pump.duration", "in (0, 1e6] ms", pump.duration_ms);
}

RunConfig parse_config(std::string_view text, std::span<const std::string> overrides) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    const int line = static_cast<int>(e.line());
    throw ConfigError("config line " + std::to_string(line) + ": " + e.message(), "", line);
  }

  // Flatten into ordered (qualified key, value) pairs; overrides come last.
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      entries.emplace_back(key, strip_inline_comment(node.data()));
      continue;
    }
    for (const auto& [sub, leaf] : node) {
      if (!leaf.empty()) throw ConfigError("nested section in " + key + "." + sub, key + "." + sub);
      entries.emplace_back(key + "." + sub, strip_inline_comment(leaf.data()));
    }
  }
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must be key=value, got '" + o + "'", o);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    entries.emplace_back(trim(o.substr(0, eq)), trim(o.substr(eq + 1)));
  }

  RunConfig config;
  const SynthOptions default_synth;
  PercentTriple synth_pct{100.0 * default_synth.pops.p_minus, 100.0 * default_synth.pops.p_zero,
                          100.0 * default_synth.pops.p_plus};
  PercentTriple init_pct{100.0 / 3.0, 100.0 / 3.0, 100.0 / 3.0};
  bool synth_set = false;
  bool init_set = false;
  for (const auto& [key, value] : entries) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'", key);
    it->second(config, synth_pct, init_pct, key, value);
    synth_set = synth_set || key.starts_with("synth.p_");
    init_set = init_set || key.starts_with("fit.init_p_");
  }
  if (synth_set) config.synth.pops = percent_distribution(synth_pct, "synth.");
  if (init_set) config.fit.init = percent_distribution(init_pct, "fit.init_");
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path, std::span<const std::string> overrides) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot read config file " + path.string(), "");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_config(buffer.str(), overrides);
}

std::string to_config_text(const RunConfig& c) {
  std::ostringstream out;
  auto kv = [&out](const char* key, const std::string& value) { out << key << " = " << value << '\n'; };
  auto num = [&kv](const char* key, double v) { kv(key, format_double(v)); };
  out << "[experiment]\n";
  num("omega_c2", c.experiment.omega_c2);
  num("omega_p2", c.experiment.omega_p2);
  num("coupling_detuning", c.experiment.coupling_detuning);
  num("gamma_ab", c.experiment.gamma_ab);
  num("gamma_ac", c.experiment.gamma_ac);
  num("magnetic_field", c.experiment.magnetic_field);
  num("n_f1", c.experiment.n_f1);
  num("path_length", c.experiment.path_length);
  num("wavelength", c.experiment.wavelength);
  out << "\n[scan]\n";
  num("start", c.scan.start);
  num("stop", c.scan.stop);
  num("step", c.scan.step);
  out << "\n[synth]\n";
  num("p_minus", 100.0 * c.synth.pops.p_minus);
  num("p_zero", 100.0 * c.synth.pops.p_zero);
  num("p_plus", 100.0 * c.synth.pops.p_plus);
  num("noise", c.synth.noise);
  kv("seed", std::to_string(c.synth.seed));
  out << "\n[fit]\n";
  kv("fit_density", c.fit.fit_density ? "true" : "false");
  num("init_p_minus", 100.0 * c.fit.init.p_minus);
  num("init_p_zero", 100.0 * c.fit.init.p_zero);
  num("init_p_plus", 100.0 * c.fit.init.p_plus);
  num("init_density", c.fit.init_density);
  num("density_min", c.fit.density_min);
  num("density_max", c.fit.density_max);
  kv("multi_start", c.fit.multi_start ? "true" : "false");
  kv("max_iterations", std::to_string(c.fit.max_iterations));
  out << "\n[pump]\n";
  kv("polarization", std::to_string(c.pump.polarization));
  num("power", c.pump.power_mw);
  num("beam_diameter", c.pump.beam_diameter_mm);
  num("duration", c.pump.duration_ms);
  out << "\n[output]\n";
  kv("spectrum", c.output.spectrum);
  kv("noisy_spectrum", c.output.noisy_spectrum);
  kv("fit_result", c.output.fit_result);
  return out.str();
}

}  // namespace mdsr
