#include "mdsr/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mdsr/physical_constants.hpp"

namespace mdsr {
namespace {

constexpr Sublevel kCouplingReferenceLower{Manifold::G2, -2};
constexpr Sublevel kCouplingReferenceUpper{Manifold::E2, -2};
constexpr Sublevel kProbeReferenceLower{Manifold::G1, -1};
constexpr Sublevel kProbeReferenceUpper{Manifold::E2, -2};

}  // namespace

PopulationDistribution PopulationDistribution::from_percent(double minus, double zero, double plus) {
  const double total = minus + zero + plus;
  if (!(total > 0.0) || minus < 0.0 || zero < 0.0 || plus < 0.0) {
    throw std::invalid_argument("population percentages must be non-negative with a positive sum");
  }
  return {minus / total, zero / total, plus / total};
}

double PopulationDistribution::operator[](int m) const {
  switch (m) {
    case -1: return p_minus;
    case 0: return p_zero;
    case 1: return p_plus;
    default: throw std::out_of_range("F=1 sublevel index must be -1, 0 or +1");
  }
}

bool PopulationDistribution::is_valid() const {
  for (double p : as_array()) {
    if (!(p >= 0.0 && p <= 1.0)) return false;
  }
  return std::abs(p_minus + p_zero + p_plus - 1.0) <= kSumTolerance;
}

void PopulationDistribution::validate() const {
  if (!is_valid()) {
    throw std::invalid_argument("populations must lie in [0,1] and sum to 1, got (" +
                                std::to_string(p_minus) + ", " + std::to_string(p_zero) + ", " +
                                std::to_string(p_plus) + ")");
  }
}

void ExperimentModel::validate() const {
  coupling.validate();
  probe.validate();
  decay.validate();
  if (coupling.ground != Manifold::G2 || coupling.excited != Manifold::E2) {
    throw std::invalid_argument("coupling field must drive G2 -> E2");
  }
  if (probe.ground != Manifold::G1 || probe.excited != Manifold::E2) {
    throw std::invalid_argument("probe field must drive G1 -> E2");
  }
  for (Manifold m : {Manifold::G1, Manifold::G2, Manifold::E2}) {
    if (!scheme.contains(m)) throw std::invalid_argument("level scheme lacks manifold " + std::string(manifold_name(m)));
  }
  if (!(n_f1 >= 0.0)) throw std::invalid_argument("n_f1 must be >= 0");
  if (!(path_length > 0.0)) throw std::invalid_argument("path_length must be > 0");
  if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be > 0");
}

std::vector<std::string> ExperimentModel::warnings() const {
  std::vector<std::string> out;
  if (probe.rabi_scale > 0.1 * coupling.rabi_scale) {
    out.push_back("probe Rabi scale " + std::to_string(probe.rabi_scale) +
                  " MHz is not much weaker than the coupling " + std::to_string(coupling.rabi_scale) +
                  " MHz; the weak-probe susceptibility may be inaccurate");
  }
  return out;
}

ExperimentModel ExperimentModel::with_density(double density) const {
  ExperimentModel copy = *this;
  copy.n_f1 = density;
  return copy;
}

ExperimentModel make_experiment_model(const ModelParameters& params) {
  if (!(params.omega_c2 >= 0.0) || !(params.omega_p2 >= 0.0)) {
    throw std::invalid_argument("Rabi frequencies must be >= 0");
  }
  LevelScheme scheme = build_level_scheme(params.magnetic_field, false);
  const double coupling_ref = std::abs(scheme.coupling(kCouplingReferenceLower, kCouplingReferenceUpper, 0));
  const double probe_ref = std::abs(scheme.coupling(kProbeReferenceLower, kProbeReferenceUpper, -1));

  ExperimentModel model{
      .scheme = std::move(scheme),
      .coupling = {.q = 0, .rabi_scale = params.omega_c2 / coupling_ref, .detuning = params.coupling_detuning,
                   .ground = Manifold::G2, .excited = Manifold::E2},
      .probe = {.q = -1, .rabi_scale = params.omega_p2 / probe_ref, .detuning = 0.0,
                .ground = Manifold::G1, .excited = Manifold::E2},
      .decay = {.gamma_ab = params.gamma_ab, .gamma_ac = params.gamma_ac},
      .n_f1 = params.n_f1,
      .path_length = params.path_length,
      .wavelength = params.wavelength,
  };
  model.validate();
  return model;
}

void Spectrum::validate() const {
  if (detunings.size() != transmission.size()) {
    throw std::invalid_argument("spectrum detuning and transmission lengths differ");
  }
  for (std::size_t i = 1; i < detunings.size(); ++i) {
    if (!(detunings[i] > detunings[i - 1])) {
      throw std::invalid_argument("spectrum detunings must be strictly increasing (at point " +
                                  std::to_string(i) + ")");
    }
  }
  for (std::size_t i = 0; i < transmission.size(); ++i) {
    if (!(transmission[i] >= 0.0 && transmission[i] <= 1.0)) {
      throw std::invalid_argument("transmission outside [0,1] at point " + std::to_string(i));
    }
  }
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be >= 0");
}

std::vector<TransitionTerm> probe_transitions(const ExperimentModel& model) {
  const LevelScheme& scheme = model.scheme;
  const int f_excited = hyperfine_f(model.probe.excited);
  const int f_partner = hyperfine_f(model.coupling.ground);
  std::vector<TransitionTerm> terms;
  for (int m = -1; m <= 1; ++m) {
    TransitionTerm t;
    t.ground = {model.probe.ground, m};
    const int m_up = m + model.probe.q;
    if (std::abs(m_up) > f_excited) {
      terms.push_back(t);  // no upper state: the line is absent
      continue;
    }
    t.excited = {model.probe.excited, m_up};
    t.probe_rabi = model.probe.rabi_frequency(scheme, t.ground, t.excited);
    t.probe_detuning_offset = scheme.shift(t.excited) - scheme.shift(t.ground);
    const int m_partner = m_up - model.coupling.q;
    if (model.coupling.excited == model.probe.excited && std::abs(m_partner) <= f_partner) {
      t.partner = {model.coupling.ground, m_partner};
      t.coupling_rabi = model.coupling.rabi_frequency(scheme, t.partner, t.excited);
      t.coupling_detuning_offset = scheme.shift(t.excited) - scheme.shift(t.partner);
    }
    terms.push_back(t);
  }
  return terms;
}

double susceptibility_prefactor(double density_cm3, double dipole_si, double probe_rabi_mhz) {
  const double density_si = density_cm3 * 1e6;
  return density_si * dipole_si * dipole_si /
         (constants::kHbar * constants::kEpsilon0 * constants::mhz_to_angular_per_second(probe_rabi_mhz));
}

namespace {

// chi of each line per unit population.
std::array<std::complex<double>, 3> line_susceptibilities(const ExperimentModel& model, double delta_p) {
  std::array<std::complex<double>, 3> chi{};
  if (model.n_f1 == 0.0) return chi;
  const auto terms = probe_transitions(model);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const TransitionTerm& t = terms[k];
    const double amplitude = model.scheme.coupling(t.ground, t.excited, model.probe.q);
    if (amplitude == 0.0) continue;
    const double dipole = model.scheme.reduced_dipole() * amplitude;
    // The coherence is linear in the probe Rabi frequency, so a zero-amplitude
    // probe is evaluated per unit Rabi frequency.
    const double rabi = t.probe_rabi != 0.0 ? t.probe_rabi : 1.0;
    const std::complex<double> coherence = lambda_coherence_analytic(
        rabi, t.coupling_rabi, delta_p - t.probe_detuning_offset,
        model.coupling.detuning - t.coupling_detuning_offset, model.decay.gamma_ac, model.decay.gamma_ab);
    chi[k] = susceptibility_prefactor(model.n_f1, dipole, rabi) * coherence;
  }
  return chi;
}

double wavenumber_times_length(const ExperimentModel& model) {
  return 2.0 * std::numbers::pi / (model.wavelength * 1e-9) * model.path_length * 1e-3;
}

}  // namespace

std::array<std::complex<double>, 3> susceptibility_terms(const ExperimentModel& model,
                                                         const PopulationDistribution& pops,
                                                         double delta_p) {
  auto chi = line_susceptibilities(model, delta_p);
  for (int m = -1; m <= 1; ++m) chi[static_cast<std::size_t>(m + 1)] *= pops[m];
  return chi;
}

std::array<double, 3> unit_optical_depths(const ExperimentModel& model, double delta_p) {
  const auto chi = line_susceptibilities(model.with_density(1.0), delta_p);
  const double kl = wavenumber_times_length(model);
  return {kl * chi[0].imag(), kl * chi[1].imag(), kl * chi[2].imag()};
}

std::complex<double> susceptibility(const ExperimentModel& model, const PopulationDistribution& pops,
                                    double delta_p) {
  const auto terms = susceptibility_terms(model, pops, delta_p);
  return terms[0] + terms[1] + terms[2];
}

double transmission(std::complex<double> chi, const ExperimentModel& model) {
  if (chi.imag() < -1e-12) {
    throw std::invalid_argument("negative Im chi (gain) is outside the transmission model");
  }
  return std::exp(-wavenumber_times_length(model) * std::max(chi.imag(), 0.0));
}

Spectrum synth_spectrum(const ExperimentModel& model, const PopulationDistribution& pops,
                        std::span<const double> grid) {
  pops.validate();
  Spectrum s;
  s.detunings.assign(grid.begin(), grid.end());
  s.transmission.reserve(grid.size());
  for (double delta : grid) s.transmission.push_back(transmission(susceptibility(model, pops, delta), model));
  s.validate();
  return s;
}

Spectrum add_noise(const Spectrum& spectrum, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
  Spectrum noisy = spectrum;
  noisy.noise_sigma = sigma;
  if (sigma == 0.0) return noisy;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  for (double& t : noisy.transmission) t = std::clamp(t + gauss(rng), 0.0, 1.0);
  return noisy;
}

std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be > 0");
  if (!(stop >= start)) throw std::invalid_argument("grid stop must be >= start");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-6)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = start + static_cast<double>(i) * step;
  return grid;
}

}  // namespace mdsr
