#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mdsr/level_scheme.hpp"

namespace mdsr {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// One laser beam driving a single ground -> excited manifold pair.
struct LaserField {
  int q = 0;                 ///< polarization component: -1 (sigma-), 0 (pi), +1 (sigma+)
  double rabi_scale = 0.0;   ///< MHz, Rabi frequency on a unit-amplitude transition
  double detuning = 0.0;     ///< MHz, from the zero-field line centre of ground -> excited
  Manifold ground = Manifold::G2;
  Manifold excited = Manifold::E2;

  /// rabi_scale * relative dipole of (lower -> upper) in `scheme`.
  double rabi_frequency(const LevelScheme& scheme, Sublevel lower, Sublevel upper) const;
  void validate() const;
};

/// Effective coherence decay rates (MHz). The Lindblad model realises them
/// as excited-state decay Gamma = 2 (gamma_ac - gamma_ab) plus pure dephasing
/// gamma_ab on every level, which yields exactly gamma_ab on ground-ground
/// coherences and gamma_ac on optical coherences.
struct DecayModel {
  double gamma_ab = 2.0;
  double gamma_ac = 4.0;

  double excited_decay_rate() const { return 2.0 * (gamma_ac - gamma_ab); }
  /// Throws std::invalid_argument unless gamma_ac > gamma_ab >= 0.
  void validate() const;
};

/// Hermitian, unit-trace, positive semidefinite matrix (checked on construction).
class DensityMatrix {
 public:
  static constexpr double kHermiticityTolerance = 1e-10;
  static constexpr double kTraceTolerance = 1e-9;
  static constexpr double kPositivityTolerance = 1e-9;

  explicit DensityMatrix(ComplexMatrix rho);

  /// Diagonal state with the given sublevel populations (normalised to 1).
  static DensityMatrix from_populations(const LevelScheme& scheme,
                                        std::span<const std::pair<Sublevel, double>> populations);

  std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }
  const ComplexMatrix& matrix() const { return rho_; }
  std::complex<double> operator()(std::size_t i, std::size_t j) const {
    return rho_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  double population(std::size_t i) const { return (*this)(i, i).real(); }

  double hermiticity_error() const;
  double trace_error() const;
  double min_eigenvalue() const;

 private:
  ComplexMatrix rho_;
};

/// Lindblad jump operator sqrt(rate) |to><from|.
struct DecayChannel {
  std::size_t from = 0;
  std::size_t to = 0;
  double rate = 0.0;
};

/// Dense superoperator acting on column-stacked density matrices:
/// vec(rho)[i + n j] = rho(i, j).
class Liouvillian {
 public:
  Liouvillian(ComplexMatrix generator, std::size_t dim);

  std::size_t dim() const { return dim_; }
  const ComplexMatrix& generator() const { return generator_; }
  ComplexMatrix apply(const ComplexMatrix& rho) const;

  static ComplexVector vec(const ComplexMatrix& rho);
  static ComplexMatrix unvec(const ComplexVector& v, std::size_t dim);

 private:
  ComplexMatrix generator_;
  std::size_t dim_;
};

/// Rotating-wave Hamiltonian in MHz. Every manifold gets a frame offset such
/// that offset(excited) - offset(ground) = -detuning for each field, so the
/// diagonal holds the frame offset plus the Zeeman shift and two-photon
/// detunings appear between ground manifolds. Each coupled pair carries -Omega/2.
/// Throws std::invalid_argument for two fields on one manifold pair, a field
/// whose manifolds are absent, or detunings that cannot share one frame.
ComplexMatrix build_hamiltonian(const LevelScheme& scheme, std::span<const LaserField> fields);

/// Spontaneous emission from every excited sublevel at `total_rate`, branched
/// to ground sublevels in proportion to |relative dipole|^2.
std::vector<DecayChannel> spontaneous_decay_channels(const LevelScheme& scheme, double total_rate);

/// Generic Lindblad generator: -i[H, .] + jumps + per-level dephasing
/// (operator sqrt(dephasing[k]) |k><k|).
Liouvillian build_liouvillian(const ComplexMatrix& hamiltonian, std::span<const DecayChannel> jumps,
                              std::span<const double> dephasing);

/// Lindblad generator for the level scheme under `decay`. Throws
/// std::invalid_argument when Gamma = 2 (gamma_ac - gamma_ab) <= 0.
Liouvillian build_liouvillian(const ComplexMatrix& hamiltonian, const LevelScheme& scheme,
                              const DecayModel& decay);

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct SteadyStateOptions {
  double tolerance = 1e-9;        ///< on ||L rho|| / ||L||_F
  double rank_threshold = 1e-10;  ///< relative pivot threshold for the kernel test
  int max_doublings = 80;
};

/// Number of independent stationary states of `liouvillian`.
std::size_t kernel_dimension(const Liouvillian& liouvillian, double rank_threshold = 1e-10);

/// Steady state of d rho/dt = L rho. A one-dimensional kernel is solved
/// directly from [L; trace] x = [0; 1] and does not depend on rho0. Larger
/// kernels (dark or decoupled sublevels) are handled by propagating rho0
/// with exp(L t), doubling t, until ||L rho|| is below tolerance.
/// Throws ConvergenceError carrying the final residual.
DensityMatrix steady_state(const Liouvillian& liouvillian, const DensityMatrix& rho0,
                           const SteadyStateOptions& options = {});

/// First-order probe coherence of a Lambda system in the weak-probe limit:
///   (i omega_p / 2) / [ (gamma_ac + i delta_p) + (omega_c^2 / 4) / (gamma_ab + i (delta_p - delta_c)) ]
/// Im > 0 is absorption. All arguments in MHz. With omega_c = 0 this is the
/// bare two-level Lorentzian; at exact two-photon resonance with gamma_ab = 0
/// it vanishes (dark state).
std::complex<double> lambda_coherence_analytic(double omega_p, double omega_c, double delta_p,
                                               double delta_c, double gamma_ac, double gamma_ab);

/// Probe coherence read from a density matrix in the same convention as
/// lambda_coherence_analytic. With -Omega/2 couplings that is -rho(lower, upper).
std::complex<double> probe_coherence(const ComplexMatrix& rho, std::size_t lower, std::size_t upper);

/// Linear response of the full Liouvillian to a weak probe. The unperturbed
/// state is the steady state of coupling + decay reached from rho0; the
/// first-order part solves L0 rho1 = -L1 rho0, where L1 is the probe's
/// commutator. Populations are frozen at zeroth order, which is the regime
/// in which per-sublevel susceptibilities are additive.
struct WeakProbeResponse {
  DensityMatrix unperturbed;
  ComplexMatrix first_order;
  double residual = 0.0;  ///< ||L0 rho1 + L1 rho0||
};

WeakProbeResponse weak_probe_response(const LevelScheme& scheme, const LaserField& coupling,
                                      const LaserField& probe, const DecayModel& decay,
                                      const DensityMatrix& rho0);

}  // namespace mdsr
