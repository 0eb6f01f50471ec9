#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdsr/bloch.hpp"
#include "mdsr/level_scheme.hpp"

namespace mdsr {

/// Ground-state populations of a_-1, a_0, a_+1 (fractions of the F=1 manifold).
struct PopulationDistribution {
  static constexpr double kSumTolerance = 1e-9;

  double p_minus = 1.0 / 3.0;
  double p_zero = 1.0 / 3.0;
  double p_plus = 1.0 / 3.0;

  static PopulationDistribution uniform() { return {}; }
  /// From percentages, e.g. {32, 36, 32}. Rescaled to sum exactly to 1.
  static PopulationDistribution from_percent(double minus, double zero, double plus);

  /// Population of a_m for m in {-1, 0, +1}.
  double operator[](int m) const;
  std::array<double, 3> as_array() const { return {p_minus, p_zero, p_plus}; }

  bool is_valid() const;
  /// Throws std::invalid_argument if any entry is outside [0,1] or the sum is off by > 1e-9.
  void validate() const;

  friend bool operator==(const PopulationDistribution&, const PopulationDistribution&) = default;
};

/// Plain parameter set for the probe-transmission experiment, in the units
/// they are usually quoted in.
struct ModelParameters {
  double omega_c2 = 78.0;           ///< MHz, coupling Rabi frequency on b_-2 <-> c_-2
  double omega_p2 = 1.0;            ///< MHz, probe Rabi frequency on a_-1 <-> c_-2
  double coupling_detuning = 0.0;   ///< MHz
  double gamma_ab = 2.0;            ///< MHz
  double gamma_ac = 4.0;            ///< MHz
  double magnetic_field = 0.15;     ///< G
  double n_f1 = 1.2e11;             ///< cm^-3
  double path_length = 2.0;         ///< mm
  double wavelength = 795.0;        ///< nm
};

/// Complete forward model: pi coupling on G2 -> E2, sigma- probe on G1 -> E2.
struct ExperimentModel {
  LevelScheme scheme;
  LaserField coupling;
  LaserField probe;
  DecayModel decay;
  double n_f1 = 1.2e11;        ///< cm^-3
  double path_length = 2.0;    ///< mm
  double wavelength = 795.0;   ///< nm

  /// Throws std::invalid_argument on invalid physical parameters.
  void validate() const;
  /// Non-fatal diagnostics, e.g. a probe that is not weak relative to the coupling.
  std::vector<std::string> warnings() const;

  ExperimentModel with_density(double density) const;
};

/// Builds the model with the coupling and probe Rabi scales chosen so that
/// the b_-2 <-> c_-2 and a_-1 <-> c_-2 Rabi frequencies equal omega_c2 and omega_p2.
ExperimentModel make_experiment_model(const ModelParameters& params);

/// Probe-detuning scan with transmission values.
struct Spectrum {
  std::vector<double> detunings;     ///< MHz, strictly increasing
  std::vector<double> transmission;  ///< each in [0, 1]
  double noise_sigma = 0.0;

  std::size_t size() const { return detunings.size(); }
  bool empty() const { return detunings.empty(); }
  /// Throws std::invalid_argument on length mismatch, non-increasing detunings
  /// or transmission outside [0, 1].
  void validate() const;

  friend bool operator==(const Spectrum&, const Spectrum&) = default;
};

/// Contribution of one probe transition a_m -> c_{m+q} to the susceptibility.
struct TransitionTerm {
  Sublevel ground;
  Sublevel excited;
  Sublevel partner;            ///< G2 sublevel sharing `excited` through the coupling
  double probe_rabi = 0.0;     ///< MHz
  double coupling_rabi = 0.0;  ///< MHz, 0 when the coupling leg is forbidden
  double probe_detuning_offset = 0.0;     ///< MHz, Zeeman shift of this line
  double coupling_detuning_offset = 0.0;  ///< MHz, Zeeman shift of the coupling leg
};

/// The three probe lines and their coupling partners (a_-1->c_-2 with b_-2,
/// a_0->c_-1 with b_-1, a_+1->c_0 with b_0 for the default sigma- probe).
std::vector<TransitionTerm> probe_transitions(const ExperimentModel& model);

/// Prefactor N |mu|^2 / (hbar eps0 Omega_p) in SI, with Omega_p given in MHz.
/// Multiplies a coherence to give a dimensionless susceptibility.
double susceptibility_prefactor(double density_cm3, double dipole_si, double probe_rabi_mhz);

/// Per-line susceptibilities chi_{a_m c_m'}; index 0, 1, 2 = a_-1, a_0, a_+1.
std::array<std::complex<double>, 3> susceptibility_terms(const ExperimentModel& model,
                                                         const PopulationDistribution& pops,
                                                         double delta_p);

/// Optical depth k L Im chi of each line (a_-1, a_0, a_+1) per unit population
/// at a density of 1 cm^-3. The total optical depth is n_f1 * sum_k P_k * od_k,
/// because the susceptibility is linear in every population and in the density.
std::array<double, 3> unit_optical_depths(const ExperimentModel& model, double delta_p);

/// Total probe susceptibility (sum of the three lines). Im chi >= 0 is absorption.
std::complex<double> susceptibility(const ExperimentModel& model, const PopulationDistribution& pops,
                                    double delta_p);

/// Beer-Lambert transmission exp(-k L Im chi), k = 2 pi / wavelength.
double transmission(std::complex<double> chi, const ExperimentModel& model);

/// Clean spectrum on a strictly increasing detuning grid.
Spectrum synth_spectrum(const ExperimentModel& model, const PopulationDistribution& pops,
                        std::span<const double> grid);

/// Adds i.i.d. Gaussian noise of standard deviation `sigma` to the transmission,
/// clamped to [0, 1]. Deterministic for a given seed.
Spectrum add_noise(const Spectrum& spectrum, double sigma, std::uint64_t seed);

/// start, start + step, ... up to and including stop (within step/1e6).
std::vector<double> make_grid(double start, double stop, double step);

}  // namespace mdsr
