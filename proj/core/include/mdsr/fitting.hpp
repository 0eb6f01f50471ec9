#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mdsr/spectrum.hpp"

namespace mdsr {

/// Inverse problem: recover a_-1/a_0/a_+1 populations (and optionally the
/// F=1 density) from a transmission spectrum. All other model parameters are
/// held at their values in `model_template`.
struct FitProblem {
  Spectrum observed;
  ExperimentModel model_template;
  bool fit_density = true;
  PopulationDistribution init_pops = PopulationDistribution::uniform();
  double init_density = 1.2e11;  ///< cm^-3; the fixed value when fit_density is false
  double density_min = 1e9;      ///< cm^-3
  double density_max = 1e13;     ///< cm^-3
  bool multi_start = true;
  int max_iterations = 200;

  /// Problem with the template's density as the initial guess.
  static FitProblem from(Spectrum observed, ExperimentModel model);

  void validate() const;
};

struct FitResult {
  PopulationDistribution pops;
  double n_f1 = 0.0;
  double residual_rms = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  double jacobian_condition = 0.0;  ///< in the unconstrained fit coordinates
  std::size_t start_index = 0;      ///< which multi-start produced the result
  std::vector<double> norm_history;
};

/// Element-wise model transmission minus observed transmission.
std::vector<double> residuals(const FitProblem& problem, const PopulationDistribution& pops, double n_f1);

/// Damped Gauss-Newton fit over the simplex. Populations are the softmax of
/// logits (u_minus, 0, u_plus); the density, when fitted, is mapped into
/// [density_min, density_max] through a logistic function of log-density.
/// Starts: the problem's init, then (with multi_start) the softened vertices
/// (0.9, 0.05, 0.05), (0.05, 0.9, 0.05), (0.05, 0.05, 0.9). The lowest
/// residual wins; ties within 1e-12 go to the earlier start.
FitResult fit_populations(const FitProblem& problem);

/// Starting distributions used by fit_populations, in order.
std::vector<PopulationDistribution> fit_starts(const FitProblem& problem);

enum class FitParameter { PMinus, PZero, PPlus, Density };

const char* parameter_name(FitParameter p);

struct ProfilePoint {
  double value = 0.0;
  double residual_norm = 0.0;
  bool converged = false;
  FitResult fit;
};

struct Profile {
  static constexpr double kFlatTolerance = 1e-9;

  FitParameter parameter = FitParameter::PMinus;
  std::vector<ProfilePoint> points;
  double spread = 0.0;         ///< max - min residual norm over the grid
  bool identifiable = true;    ///< false when the profile is flat within kFlatTolerance
  bool all_converged = true;
};

/// Profile likelihood style scan: `param` is pinned at each grid value and
/// the remaining parameters are refitted. Throws std::invalid_argument on an
/// empty grid, a population outside [0,1] or a non-positive density.
Profile profile_scan(const FitProblem& problem, FitParameter param, std::span<const double> grid);

}  // namespace mdsr
