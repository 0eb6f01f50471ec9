#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mdsr/bloch.hpp"
#include "mdsr/level_scheme.hpp"
#include "mdsr/spectrum.hpp"

namespace mdsr {

/// Optical pumping beam on G1 -> E1.
struct PumpConfig {
  int polarization = -1;        ///< q in {-1, 0, +1}
  double power_mw = 13.6;
  double beam_diameter_mm = 2.0;
  double duration_ms = 0.1;

  /// Top-hat intensity in mW/cm^2.
  double intensity() const;
  /// I / I_sat.
  double saturation() const;
  void validate() const;
};

/// Populations of every sublevel of a 16-level scheme.
class PopulationState {
 public:
  static constexpr double kTotalTolerance = 1e-9;

  PopulationState(const LevelScheme& scheme, Eigen::VectorXd populations);

  const std::vector<Sublevel>& sublevels() const { return levels_; }

  const Eigen::VectorXd& vector() const { return p_; }
  double operator[](Sublevel s) const;
  double total() const { return p_.sum(); }
  double manifold_total(Manifold m) const;
  /// a_-1, a_0, a_+1 normalised to the G1 total. Throws std::domain_error if G1 is empty.
  PopulationDistribution g1_distribution() const;
  double min() const { return p_.minCoeff(); }

  /// Throws std::invalid_argument on a negative entry (beyond 1e-12) or a total off by > 1e-9.
  void validate() const;

 private:
  std::vector<Sublevel> levels_;
  Eigen::VectorXd p_;
};

/// All population uniformly in the three G1 sublevels (the unpumped start).
PopulationState uniform_g1_state(const LevelScheme& scheme);
/// All population in one sublevel.
PopulationState pure_state(const LevelScheme& scheme, Sublevel s);

/// Generator R (1/ms) of dp/dt = R p over the scheme's sublevels.
/// Column j holds the rates out of level j; columns sum to zero.
///   - spontaneous decay of each excited sublevel at Gamma_nat with branching rel^2 / 3
///   - pump on G1 -> E1 with component q: absorption and stimulated emission at
///     (Gamma/2) s_ij / (1 + s_ij), s_ij = (I / I_sat) rel_ij^2 / 3
///   - coupling on its manifolds with component q_c: s_ij = 2 (Omega_ij / Gamma)^2,
///     saturating the same way, Lorentzian-suppressed by its detuning.
/// Throws std::invalid_argument when the scheme has no E1 manifold.
Eigen::MatrixXd pump_rate_matrix(const LevelScheme& scheme, const PumpConfig& pump, const LaserField& coupling);

/// Rate matrix with only spontaneous decay and the coupling beam.
Eigen::MatrixXd coupling_only_rate_matrix(const LevelScheme& scheme, const LaserField& coupling);

/// p(t) = exp(R t) p0. Throws std::invalid_argument for t < 0.
PopulationState evolve_populations(const LevelScheme& scheme, const Eigen::MatrixXd& rates,
                                   const PopulationState& state0, double t_ms);

struct SteadyPopulations {
  static constexpr double kRateTolerance = 1e-12;  ///< 1/ms, on max |dp/dt|

  PopulationState state;
  double time_ms = 0.0;  ///< evolution time reached
  double rate_norm = 0.0;
  bool converged = false;
};

/// Long-time limit by repeated time doubling from 1 us; population trapped in
/// dark sublevels keeps the share it acquires on the way.
SteadyPopulations steady_populations(const LevelScheme& scheme, const Eigen::MatrixXd& rates,
                                     const PopulationState& state0, double max_time_ms = 1e6);

struct PumpPlan {
  int polarization = 0;
  double power_mw = 0.0;
  PopulationDistribution predicted;
  double target_distance = 0.0;  ///< L1 distance between predicted and target
};

struct PumpDesignOptions {
  double max_power_mw = 20.0;
  int grid_points = 61;  ///< log-spaced from 1e-4 mW, plus zero
  double beam_diameter_mm = 2.0;
};

/// Predicted G1 distribution after pumping for `duration` from the uniform G1 start.
PopulationDistribution predict_distribution(const LevelScheme& scheme, const PumpConfig& pump,
                                            const LaserField& coupling);

/// Searches q in {-1, 0, +1} and power in [0, max_power] for the pump whose
/// predicted G1 distribution is closest (L1) to `target`. Grid search then
/// golden-section refinement around an isolated best grid point. Distances
/// within 1e-6 count as ties: within one q the highest tied power wins (the
/// saturated end of a plateau), across q the order -1, 0, +1 decides.
PumpPlan design_pump(const PopulationDistribution& target, const LevelScheme& scheme,
                     const LaserField& coupling, double duration_ms, const PumpDesignOptions& options = {});

double l1_distance(const PopulationDistribution& a, const PopulationDistribution& b);

/// Pumping-model coupling beam: pi on G2 -> E2 with the b_-2 <-> c_-2 Rabi frequency omega_c2 (MHz).
LaserField pumping_coupling(const LevelScheme& scheme, double omega_c2, double detuning = 0.0);

}  // namespace mdsr
