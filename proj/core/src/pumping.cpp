#include "mdsr/pumping.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "mdsr/physical_constants.hpp"

namespace mdsr {
namespace {

constexpr double kNegativeTolerance = 1e-12;

double natural_rate_per_ms() { return constants::mhz_to_angular_per_ms(constants::kD1NaturalLinewidth); }

// Sum of rel^2 over all decay channels of one excited sublevel (3 for either F').
constexpr double kBranchingNorm = 3.0;

double saturated_rate(double s, double detuning_mhz = 0.0) {
  const double x = 2.0 * detuning_mhz / constants::kD1NaturalLinewidth;
  return 0.5 * natural_rate_per_ms() * s / (1.0 + s + x * x);
}

void add_exchange(Eigen::MatrixXd& r, std::size_t g, std::size_t e, double rate) {
  const auto gi = static_cast<Eigen::Index>(g);
  const auto ei = static_cast<Eigen::Index>(e);
  r(ei, gi) += rate;
  r(gi, gi) -= rate;
  r(gi, ei) += rate;
  r(ei, ei) -= rate;
}

Eigen::MatrixXd decay_and_coupling(const LevelScheme& scheme, const LaserField& coupling) {
  coupling.validate();
  const std::size_t n = scheme.size();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const double gamma = natural_rate_per_ms();
  for (const auto& [key, amp] : scheme.couplings()) {
    const std::size_t g = scheme.index(key.lower);
    const std::size_t e = scheme.index(key.upper);
    const double w = amp * amp / kBranchingNorm;
    r(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(e)) += gamma * w;
    r(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(e)) -= gamma * w;
    if (key.lower.manifold == coupling.ground && key.upper.manifold == coupling.excited && key.q == coupling.q) {
      const double omega = coupling.rabi_scale * amp;
      const double s = 2.0 * (omega / constants::kD1NaturalLinewidth) * (omega / constants::kD1NaturalLinewidth);
      if (s > 0.0) add_exchange(r, g, e, saturated_rate(s, coupling.detuning));
    }
  }
  return r;
}

}  // namespace

double PumpConfig::intensity() const {
  const double radius_cm = 0.05 * beam_diameter_mm;
  return power_mw / (std::numbers::pi * radius_cm * radius_cm);
}

double PumpConfig::saturation() const { return intensity() / constants::kSaturationIntensity; }

void PumpConfig::validate() const {
  if (polarization < -1 || polarization > 1) {
    throw std::invalid_argument("pump polarization must be -1, 0 or +1, got " + std::to_string(polarization));
  }
  if (!(power_mw >= 0.0)) throw std::invalid_argument("pump power must be >= 0");
  if (!(beam_diameter_mm > 0.0)) throw std::invalid_argument("pump beam diameter must be > 0");
  if (!(duration_ms > 0.0)) throw std::invalid_argument("pump duration must be > 0");
}

PopulationState::PopulationState(const LevelScheme& scheme, Eigen::VectorXd populations)
    : levels_(scheme.sublevels()), p_(std::move(populations)) {
  if (static_cast<std::size_t>(p_.size()) != levels_.size()) {
    throw std::invalid_argument("population vector size does not match the level scheme");
  }
}

double PopulationState::operator[](Sublevel s) const {
  const auto it = std::find(levels_.begin(), levels_.end(), s);
  if (it == levels_.end()) throw std::out_of_range("sublevel " + s.label() + " not in population state");
  return p_(it - levels_.begin());
}

double PopulationState::manifold_total(Manifold m) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i].manifold == m) sum += p_(static_cast<Eigen::Index>(i));
  }
  return sum;
}

PopulationDistribution PopulationState::g1_distribution() const {
  const double total = manifold_total(Manifold::G1);
  if (!(total > 0.0)) throw std::domain_error("no population in F=1");
  auto share = [&](int m) { return std::max((*this)[{Manifold::G1, m}], 0.0) / total; };
  PopulationDistribution d{share(-1), share(0), share(1)};
  // Renormalise away clamped round-off.
  const double sum = d.p_minus + d.p_zero + d.p_plus;
  return {d.p_minus / sum, d.p_zero / sum, d.p_plus / sum};
}

void PopulationState::validate() const {
  if (p_.minCoeff() < -kNegativeTolerance) {
    throw std::invalid_argument("negative population " + std::to_string(p_.minCoeff()));
  }
  if (std::abs(total() - 1.0) > kTotalTolerance) {
    throw std::invalid_argument("populations sum to " + std::to_string(total()) + ", not 1");
  }
}

PopulationState uniform_g1_state(const LevelScheme& scheme) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(scheme.size()));
  for (int m = -1; m <= 1; ++m) p(static_cast<Eigen::Index>(scheme.index({Manifold::G1, m}))) = 1.0 / 3.0;
  return {scheme, std::move(p)};
}

PopulationState pure_state(const LevelScheme& scheme, Sublevel s) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(scheme.size()));
  p(static_cast<Eigen::Index>(scheme.index(s))) = 1.0;
  return {scheme, std::move(p)};
}

Eigen::MatrixXd coupling_only_rate_matrix(const LevelScheme& scheme, const LaserField& coupling) {
  return decay_and_coupling(scheme, coupling);
}

Eigen::MatrixXd pump_rate_matrix(const LevelScheme& scheme, const PumpConfig& pump, const LaserField& coupling) {
  if (!scheme.contains(Manifold::E1)) {
    throw std::invalid_argument("pumping needs the 16-level scheme including F'=1");
  }
  pump.validate();
  Eigen::MatrixXd r = decay_and_coupling(scheme, coupling);
  const double s0 = pump.saturation();
  if (s0 == 0.0) return r;
  for (const auto& [key, amp] : scheme.couplings()) {
    if (key.lower.manifold != Manifold::G1 || key.upper.manifold != Manifold::E1 || key.q != pump.polarization) {
      continue;
    }
    const double s = s0 * amp * amp / kBranchingNorm;
    if (s > 0.0) add_exchange(r, scheme.index(key.lower), scheme.index(key.upper), saturated_rate(s));
  }
  return r;
}

namespace {

// exp(R t) for a generator with zero column sums. Scaling and squaring done
// here so each squared factor can be pulled back onto unit column sums;
// otherwise the total drifts by ~2^s eps over s squarings.
Eigen::MatrixXd stochastic_exp(const Eigen::MatrixXd& rates, double t) {
  const Eigen::MatrixXd scaled = rates * t;
  const double norm = scaled.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const auto unit_columns = [](Eigen::MatrixXd& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j) /= m.col(j).sum();
  };
  Eigen::MatrixXd e = (scaled / std::ldexp(1.0, squarings)).exp();
  unit_columns(e);
  for (int k = 0; k < squarings; ++k) {
    e = (e * e).eval();
    unit_columns(e);
  }
  return e;
}

}  // namespace

PopulationState evolve_populations(const LevelScheme& scheme, const Eigen::MatrixXd& rates,
                                   const PopulationState& state0, double t_ms) {
  if (!(t_ms >= 0.0)) throw std::invalid_argument("evolution time must be >= 0");
  if (rates.rows() != rates.cols() || static_cast<std::size_t>(rates.rows()) != scheme.size()) {
    throw std::invalid_argument("rate matrix size does not match the level scheme");
  }
  if (t_ms == 0.0) return state0;
  // Only levels reachable from the initial support can change; exponentiating
  // that block alone keeps isolated (trapped) populations exact.
  const auto n = rates.rows();
  std::vector<Eigen::Index> active;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (state0.vector()(i) != 0.0) {
      seen[static_cast<std::size_t>(i)] = true;
      active.push_back(i);
    }
  }
  for (std::size_t k = 0; k < active.size(); ++k) {
    const Eigen::Index from = active[k];
    for (Eigen::Index to = 0; to < n; ++to) {
      if (!seen[static_cast<std::size_t>(to)] && rates(to, from) != 0.0) {
        seen[static_cast<std::size_t>(to)] = true;
        active.push_back(to);
      }
    }
  }
  std::sort(active.begin(), active.end());
  const auto m = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd block(m, m);
  Eigen::VectorXd p0(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    p0(i) = state0.vector()(active[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < m; ++j) {
      block(i, j) = rates(active[static_cast<std::size_t>(i)], active[static_cast<std::size_t>(j)]);
    }
  }
  const Eigen::VectorXd p1 = stochastic_exp(block, t_ms) * p0;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) p(active[static_cast<std::size_t>(i)]) = p1(i);
  return {scheme, std::move(p)};
}

SteadyPopulations steady_populations(const LevelScheme& scheme, const Eigen::MatrixXd& rates,
                                     const PopulationState& state0, double max_time_ms) {
  PopulationState state = state0;
  double t = 0.0;
  double step = 1e-3;
  double norm = (rates * state.vector()).cwiseAbs().maxCoeff();
  while (norm >= SteadyPopulations::kRateTolerance && t < max_time_ms) {
    state = evolve_populations(scheme, rates, state, step);
    t += step;
    step *= 2.0;
    norm = (rates * state.vector()).cwiseAbs().maxCoeff();
  }
  return {state, t, norm, norm < SteadyPopulations::kRateTolerance};
}

double l1_distance(const PopulationDistribution& a, const PopulationDistribution& b) {
  return std::abs(a.p_minus - b.p_minus) + std::abs(a.p_zero - b.p_zero) + std::abs(a.p_plus - b.p_plus);
}

PopulationDistribution predict_distribution(const LevelScheme& scheme, const PumpConfig& pump,
                                            const LaserField& coupling) {
  const Eigen::MatrixXd r = pump_rate_matrix(scheme, pump, coupling);
  return evolve_populations(scheme, r, uniform_g1_state(scheme), pump.duration_ms).g1_distribution();
}

PumpPlan design_pump(const PopulationDistribution& target, const LevelScheme& scheme, const LaserField& coupling,
                     double duration_ms, const PumpDesignOptions& options) {
  target.validate();
  if (!(options.max_power_mw > 0.0) || options.grid_points < 2) {
    throw std::invalid_argument("pump design needs max_power > 0 and at least 2 grid points");
  }
  constexpr double kMinPower = 1e-4;
  constexpr double kTie = 1e-6;

  auto evaluate = [&](int q, double power) {
    const PumpConfig pump{q, power, options.beam_diameter_mm, duration_ms};
    const PopulationDistribution predicted = predict_distribution(scheme, pump, coupling);
    return PumpPlan{q, power, predicted, l1_distance(predicted, target)};
  };
  auto better = [&](const PumpPlan& a, const PumpPlan& b) {
    return a.target_distance < b.target_distance - kTie;
  };

  std::vector<double> powers{0.0};
  const double ratio = std::log(options.max_power_mw / kMinPower) / (options.grid_points - 1);
  for (int i = 0; i < options.grid_points; ++i) powers.push_back(kMinPower * std::exp(ratio * i));
  powers.back() = options.max_power_mw;

  PumpPlan best{};
  bool have = false;
  for (int q : {-1, 0, 1}) {
    std::vector<PumpPlan> scan;
    for (double p : powers) scan.push_back(evaluate(q, p));
    const double d_min = std::min_element(scan.begin(), scan.end(), [](const PumpPlan& a, const PumpPlan& b) {
                           return a.target_distance < b.target_distance;
                         })->target_distance;
    // Saturated plateaus give many near-equal powers; take the strongest of them.
    std::size_t best_i = 0;
    std::size_t tied = 0;
    for (std::size_t i = 0; i < scan.size(); ++i) {
      if (scan[i].target_distance <= d_min + kTie) {
        best_i = i;
        ++tied;
      }
    }
    PumpPlan local = scan[best_i];
    if (tied == 1 && best_i > 0) {
      // Golden-section refinement in log-power between the neighbouring grid points.
      double lo = std::log(best_i > 1 ? powers[best_i - 1] : powers[1] / 10.0);
      double hi = std::log(powers[std::min(best_i + 1, powers.size() - 1)]);
      const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
      for (int it = 0; it < 40 && hi - lo > 1e-9; ++it) {
        const double x1 = hi - phi * (hi - lo);
        const double x2 = lo + phi * (hi - lo);
        const PumpPlan p1 = evaluate(q, std::exp(x1));
        const PumpPlan p2 = evaluate(q, std::exp(x2));
        if (p1.target_distance < local.target_distance) local = p1;
        if (p2.target_distance < local.target_distance) local = p2;
        if (p1.target_distance <= p2.target_distance) {
          hi = x2;
        } else {
          lo = x1;
        }
      }
    }
    if (!have || better(local, best)) {
      best = local;
      have = true;
    }
  }
  return best;
}

LaserField pumping_coupling(const LevelScheme& scheme, double omega_c2, double detuning) {
  const double ref = std::abs(scheme.coupling({Manifold::G2, -2}, {Manifold::E2, -2}, 0));
  return {.q = 0, .rabi_scale = omega_c2 / ref, .detuning = detuning, .ground = Manifold::G2, .excited = Manifold::E2};
}

}  // namespace mdsr
