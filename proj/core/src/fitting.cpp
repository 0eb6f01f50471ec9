#include "mdsr/fitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "mdsr/least_squares.hpp"

namespace mdsr {
namespace {

constexpr double kMinPopulation = 1e-12;

// Per-line optical depths at every observed detuning, per unit population
// and unit density. Transmission is exp(-n * sum_k P_k * od_k).
struct OpticalDepthTable {
  std::vector<std::array<double, 3>> rows;

  OpticalDepthTable(const ExperimentModel& model, const std::vector<double>& detunings) {
    rows.reserve(detunings.size());
    for (double d : detunings) rows.push_back(unit_optical_depths(model, d));
  }

  Eigen::VectorXd residuals(const std::array<double, 3>& pops, double density,
                            const std::vector<double>& observed) const {
    Eigen::VectorXd r(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double od = density * (pops[0] * rows[i][0] + pops[1] * rows[i][1] + pops[2] * rows[i][2]);
      r(static_cast<Eigen::Index>(i)) = std::exp(-od) - observed[i];
    }
    return r;
  }
};

std::array<double, 3> softmax(double u_minus, double u_zero, double u_plus) {
  const double top = std::max({u_minus, u_zero, u_plus});
  std::array<double, 3> e{std::exp(u_minus - top), std::exp(u_zero - top), std::exp(u_plus - top)};
  const double sum = e[0] + e[1] + e[2];
  return {e[0] / sum, e[1] / sum, e[2] / sum};
}

double safe_log(double p) { return std::log(std::max(p, kMinPopulation)); }

double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

double logit(double s) {
  s = std::clamp(s, 1e-9, 1.0 - 1e-9);
  return std::log(s / (1.0 - s));
}

// Density <-> unconstrained coordinate via log-density in [log lo, log hi].
struct DensityMap {
  double log_lo;
  double log_hi;
  double to_density(double v) const { return std::exp(log_lo + (log_hi - log_lo) * logistic(v)); }
  double to_coordinate(double n) const { return logit((std::log(n) - log_lo) / (log_hi - log_lo)); }
};

PopulationDistribution to_distribution(const std::array<double, 3>& p) { return {p[0], p[1], p[2]}; }

// Parameterisation of one fit: which quantities are free, and how the
// unconstrained vector maps back to (populations, density).
struct Parameterisation {
  // Free: two logits (u_minus, u_plus) relative to a_0, or, when one
  // population is pinned, a single logit splitting the remainder.
  std::optional<int> pinned_population;  // index 0..2
  double pinned_value = 0.0;
  bool density_free = true;
  double fixed_density = 0.0;
  DensityMap density_map{};

  Eigen::Index population_dims() const { return pinned_population ? 1 : 2; }
  Eigen::Index dims() const { return population_dims() + (density_free ? 1 : 0); }

  std::array<double, 3> populations(const Eigen::VectorXd& x) const {
    if (!pinned_population) return softmax(x(0), 0.0, x(1));
    const int k = *pinned_population;
    const double rest = 1.0 - pinned_value;
    const double share = logistic(x(0));
    std::array<double, 3> p{};
    p[static_cast<std::size_t>(k)] = pinned_value;
    const int a = (k + 1) % 3;
    const int b = (k + 2) % 3;
    p[static_cast<std::size_t>(std::min(a, b))] = rest * share;
    p[static_cast<std::size_t>(std::max(a, b))] = rest * (1.0 - share);
    return p;
  }

  double density(const Eigen::VectorXd& x) const {
    return density_free ? density_map.to_density(x(population_dims())) : fixed_density;
  }

  Eigen::VectorXd coordinates(const PopulationDistribution& start, double density) const {
    Eigen::VectorXd x(dims());
    const auto p = start.as_array();
    if (!pinned_population) {
      x(0) = safe_log(p[0]) - safe_log(p[1]);
      x(1) = safe_log(p[2]) - safe_log(p[1]);
    } else {
      const int k = *pinned_population;
      const int a = std::min((k + 1) % 3, (k + 2) % 3);
      const int b = std::max((k + 1) % 3, (k + 2) % 3);
      const double pa = std::max(p[static_cast<std::size_t>(a)], kMinPopulation);
      const double pb = std::max(p[static_cast<std::size_t>(b)], kMinPopulation);
      x(0) = logit(pa / (pa + pb));
    }
    if (density_free) x(population_dims()) = density_map.to_coordinate(density);
    return x;
  }
};

struct Candidate {
  LeastSquaresResult ls;
  std::size_t start_index;
};

FitResult run_fit(const FitProblem& problem, const OpticalDepthTable& table, const Parameterisation& param) {
  const auto& observed = problem.observed.transmission;
  const ResidualFunction f = [&](const Eigen::VectorXd& x) {
    return table.residuals(param.populations(x), param.density(x), observed);
  };

  LeastSquaresOptions options;
  options.max_iterations = problem.max_iterations;

  const double start_density = param.density_free
                                   ? std::clamp(problem.init_density, problem.density_min, problem.density_max)
                                   : param.fixed_density;
  const auto starts = fit_starts(problem);
  std::optional<Candidate> best;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    Candidate c{levenberg_marquardt(f, param.coordinates(starts[s], start_density), options), s};
    const bool better = !best || c.ls.residual_norm < best->ls.residual_norm - 1e-12 ||
                        (c.ls.converged && !best->ls.converged &&
                         c.ls.residual_norm <= best->ls.residual_norm + 1e-12);
    if (better) best = std::move(c);
  }

  const LeastSquaresResult& ls = best->ls;
  FitResult result;
  result.pops = to_distribution(param.populations(ls.parameters));
  result.n_f1 = param.density(ls.parameters);
  result.residual_norm = ls.residual_norm;
  result.residual_rms =
      observed.empty() ? 0.0 : ls.residual_norm / std::sqrt(static_cast<double>(observed.size()));
  result.iterations = ls.iterations;
  result.converged = ls.converged;
  result.jacobian_condition = condition_number(ls.jacobian);
  result.start_index = best->start_index;
  result.norm_history = ls.norm_history;
  return result;
}

Parameterisation base_parameterisation(const FitProblem& problem) {
  Parameterisation p;
  p.density_free = problem.fit_density;
  p.fixed_density = problem.init_density;
  p.density_map = {std::log(problem.density_min), std::log(problem.density_max)};
  return p;
}

}  // namespace

FitProblem FitProblem::from(Spectrum observed, ExperimentModel model) {
  FitProblem p{.observed = std::move(observed), .model_template = std::move(model)};
  p.init_density = p.model_template.n_f1;
  return p;
}

void FitProblem::validate() const {
  observed.validate();
  if (observed.empty()) throw std::invalid_argument("fit needs a non-empty observed spectrum");
  model_template.validate();
  init_pops.validate();
  if (!(init_density > 0.0)) throw std::invalid_argument("initial density must be > 0");
  if (!(density_min > 0.0 && density_max > density_min)) {
    throw std::invalid_argument("density bounds must satisfy 0 < density_min < density_max");
  }
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
}

std::vector<double> residuals(const FitProblem& problem, const PopulationDistribution& pops, double n_f1) {
  pops.validate();
  const OpticalDepthTable table(problem.model_template, problem.observed.detunings);
  const Eigen::VectorXd r = table.residuals(pops.as_array(), n_f1, problem.observed.transmission);
  return {r.data(), r.data() + r.size()};
}

std::vector<PopulationDistribution> fit_starts(const FitProblem& problem) {
  std::vector<PopulationDistribution> starts{problem.init_pops};
  if (problem.multi_start) {
    starts.push_back({0.9, 0.05, 0.05});
    starts.push_back({0.05, 0.9, 0.05});
    starts.push_back({0.05, 0.05, 0.9});
  }
  return starts;
}

FitResult fit_populations(const FitProblem& problem) {
  problem.validate();
  const OpticalDepthTable table(problem.model_template, problem.observed.detunings);
  return run_fit(problem, table, base_parameterisation(problem));
}

const char* parameter_name(FitParameter p) {
  switch (p) {
    case FitParameter::PMinus: return "p_minus";
    case FitParameter::PZero: return "p_zero";
    case FitParameter::PPlus: return "p_plus";
    case FitParameter::Density: return "n_f1";
  }
  return "?";
}

Profile profile_scan(const FitProblem& problem, FitParameter param, std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("profile grid must be non-empty");
  problem.validate();
  const OpticalDepthTable table(problem.model_template, problem.observed.detunings);

  Profile profile;
  profile.parameter = param;
  for (double value : grid) {
    Parameterisation p = base_parameterisation(problem);
    if (param == FitParameter::Density) {
      if (!(value > 0.0)) throw std::invalid_argument("profile density must be > 0");
      p.density_free = false;
      p.fixed_density = value;
    } else {
      if (!(value >= 0.0 && value <= 1.0)) throw std::invalid_argument("profile population must be in [0,1]");
      p.pinned_population = static_cast<int>(param);
      p.pinned_value = value;
    }
    FitResult fit = run_fit(problem, table, p);
    profile.all_converged = profile.all_converged && fit.converged;
    profile.points.push_back({value, fit.residual_norm, fit.converged, std::move(fit)});
  }

  const auto [lo, hi] = std::minmax_element(profile.points.begin(), profile.points.end(),
                                            [](const ProfilePoint& a, const ProfilePoint& b) {
                                              return a.residual_norm < b.residual_norm;
                                            });
  profile.spread = hi->residual_norm - lo->residual_norm;
  profile.identifiable = profile.points.size() < 2 || profile.spread > Profile::kFlatTolerance;
  return profile;
}

}  // namespace mdsr
