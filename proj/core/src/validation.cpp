#include "mdsr/validation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "mdsr/fitting.hpp"
#include "mdsr/pumping.hpp"
#include "mdsr/text_format.hpp"

namespace mdsr {
namespace {

DensityMatrix uniform_g1_density(const LevelScheme& scheme) {
  const std::pair<Sublevel, double> pops[] = {
      {{Manifold::G1, -1}, 1.0}, {{Manifold::G1, 0}, 1.0}, {{Manifold::G1, 1}, 1.0}};
  return DensityMatrix::from_populations(scheme, pops);
}

CheckResult check(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

// Runs one check, turning an unexpected exception into a failure.
void add(std::vector<CheckResult>& out, const std::string& name, const std::function<CheckResult()>& body) {
  try {
    out.push_back(body());
  } catch (const std::exception& e) {
    out.push_back(check(name, false, std::string("threw: ") + e.what()));
  }
}

}  // namespace

OracleComparison compare_with_analytic(const ExperimentModel& model, std::span<const double> detunings,
                                       double im_floor) {
  OracleComparison result;
  const DensityMatrix rho0 = uniform_g1_density(model.scheme);
  const auto terms = probe_transitions(model);
  for (double delta : detunings) {
    LaserField probe = model.probe;
    probe.detuning = delta;
    const WeakProbeResponse response = weak_probe_response(model.scheme, model.coupling, probe, model.decay, rho0);
    std::size_t lines = 0;
    for (const TransitionTerm& t : terms) {
      if (t.probe_rabi == 0.0) continue;
      ++lines;
      const std::size_t a = model.scheme.index(t.ground);
      const std::size_t c = model.scheme.index(t.excited);
      const double pop = response.unperturbed.population(a);
      const std::complex<double> numeric = probe_coherence(response.first_order, a, c) / pop;
      const std::complex<double> analytic = lambda_coherence_analytic(
          t.probe_rabi, t.coupling_rabi, delta - t.probe_detuning_offset,
          model.coupling.detuning - t.coupling_detuning_offset, model.decay.gamma_ac, model.decay.gamma_ab);
      if (std::abs(analytic.imag()) <= im_floor) continue;
      const double rel = std::abs(numeric.imag() - analytic.imag()) / std::abs(analytic.imag());
      ++result.compared_points;
      if (rel > result.max_relative_error) {
        result.max_relative_error = rel;
        result.worst_detuning = delta;
      }
    }
    result.line_count = lines;
  }
  return result;
}

std::vector<CheckResult> run_invariant_suite(const ModelParameters& params) {
  std::vector<CheckResult> out;
  const ExperimentModel model = make_experiment_model(params);
  const auto grid = make_grid(-80.0, 80.0, 1.0);
  const std::array<PopulationDistribution, 4> reference_pops{
      PopulationDistribution::from_percent(32, 36, 32), PopulationDistribution::from_percent(96, 2, 2),
      PopulationDistribution::from_percent(1, 1, 98), PopulationDistribution::from_percent(1, 98, 1)};

  add(out, "oracle equivalence", [&] {
    const auto cmp = compare_with_analytic(model, grid);
    return check("oracle equivalence", cmp.compared_points > 0 && cmp.max_relative_error <= 0.01,
                 "max relative Im error " + format_double(cmp.max_relative_error) + " over " +
                     std::to_string(cmp.compared_points) + " points (limit 0.01)");
  });

  add(out, "density matrix validity", [&] {
    const LaserField fields[] = {model.coupling, model.probe};
    const Liouvillian l = build_liouvillian(build_hamiltonian(model.scheme, fields), model.scheme, model.decay);
    const DensityMatrix start = uniform_g1_density(model.scheme);
    // A transient state (0.2 us) and the stationary one.
    const ComplexVector transient = (l.generator() * 0.2 * 2.0 * std::numbers::pi).exp() * Liouvillian::vec(start.matrix());
    const DensityMatrix mid(Liouvillian::unvec(transient, model.scheme.size()));
    const DensityMatrix end = steady_state(l, start);
    double herm = 0, tr = 0, eig = 0;
    for (const DensityMatrix* d : {&mid, &end}) {
      herm = std::max(herm, d->hermiticity_error());
      tr = std::max(tr, d->trace_error());
      eig = std::min(eig, d->min_eigenvalue());
    }
    return check("density matrix validity", true,
                 "hermiticity " + format_double(herm) + ", trace " + format_double(tr) + ", min eigenvalue " +
                     format_double(eig));
  });

  add(out, "absorptive susceptibility", [&] {
    double worst = 0.0;
    for (const auto& pops : reference_pops) {
      for (double d : grid) worst = std::min(worst, susceptibility(model, pops, d).imag());
    }
    return check("absorptive susceptibility", worst >= 0.0, "min Im chi " + format_double(worst));
  });

  add(out, "sign convention invariance", [&] {
    ExperimentModel flipped = model;
    flipped.scheme = model.scheme.with_flipped_coupling_signs();
    double diff = 0.0;
    for (const auto& pops : reference_pops) {
      const auto a = synth_spectrum(model, pops, grid);
      const auto b = synth_spectrum(flipped, pops, grid);
      for (std::size_t i = 0; i < grid.size(); ++i) diff = std::max(diff, std::abs(a.transmission[i] - b.transmission[i]));
    }
    return check("sign convention invariance", diff <= 1e-12, "max transmission change " + format_double(diff));
  });

  const LevelScheme full = build_level_scheme(params.magnetic_field, true);

  add(out, "forbidden transitions", [&] {
    const double b0c0 = relative_dipole({Manifold::G2, 0}, {Manifold::E2, 0}, 0);
    const double a0e0 = relative_dipole({Manifold::G1, 0}, {Manifold::E1, 0}, 0);
    const double wrong_q = relative_dipole({Manifold::G1, 0}, {Manifold::E2, 1}, 0);
    const bool no_dark_target = !full.find({Manifold::E1, -2}).has_value();
    return check("forbidden transitions", b0c0 == 0.0 && a0e0 == 0.0 && wrong_q == 0.0 && no_dark_target,
                 "b0-c0 " + format_double(b0c0) + ", a0-e0 " + format_double(a0e0) + ", dm mismatch " +
                     format_double(wrong_q));
  });

  add(out, "coupling ratio", [&] {
    const double r = relative_dipole({Manifold::G2, -2}, {Manifold::E2, -2}, 0) /
                     relative_dipole({Manifold::G2, -1}, {Manifold::E2, -1}, 0);
    return check("coupling ratio", std::abs(std::abs(r) - 2.0) <= 1e-12, "Omega_c2 / Omega_c1 = " + format_double(std::abs(r)));
  });

  add(out, "dipole sum rule", [&] {
    double worst = 0.0;
    for (const Sublevel& e : full.sublevels()) {
      if (is_ground(e.manifold)) continue;
      double sum = 0.0;
      for (const Sublevel& g : full.sublevels()) {
        if (!is_ground(g.manifold)) continue;
        const double a = relative_dipole(g, e, e.m - g.m);
        sum += a * a;
      }
      worst = std::max(worst, std::abs(sum - 3.0));
    }
    return check("dipole sum rule", worst <= 1e-12, "max deviation from 3: " + format_double(worst));
  });

  add(out, "b0 trap stationarity", [&] {
    const LaserField fields[] = {model.coupling, model.probe};
    const Liouvillian l = build_liouvillian(build_hamiltonian(model.scheme, fields), model.scheme, model.decay);
    const std::pair<Sublevel, double> b0[] = {{{Manifold::G2, 0}, 1.0}};
    const double drift = l.apply(DensityMatrix::from_populations(model.scheme, b0).matrix()).norm();
    const LaserField coupling = pumping_coupling(full, params.omega_c2);
    const Eigen::MatrixXd r = coupling_only_rate_matrix(full, coupling);
    const PopulationState after = evolve_populations(full, r, pure_state(full, {Manifold::G2, 0}), 10.0);
    const double moved = 1.0 - after[{Manifold::G2, 0}];
    return check("b0 trap stationarity", drift <= 1e-12 && std::abs(moved) <= 1e-12,
                 "|L rho_b0| " + format_double(drift) + ", rate-model loss " + format_double(moved));
  });

  add(out, "rate equation conservation", [&] {
    const LaserField coupling = pumping_coupling(full, params.omega_c2);
    double worst_total = 0.0, worst_min = 0.0, worst_column = 0.0;
    for (int q : {-1, 0, 1}) {
      const Eigen::MatrixXd r = pump_rate_matrix(full, {q, 13.6, 2.0, 0.1}, coupling);
      worst_column = std::max(worst_column, r.colwise().sum().cwiseAbs().maxCoeff() / r.cwiseAbs().maxCoeff());
      for (double t : {1e-4, 1e-2, 1.0, 10.0}) {
        const PopulationState s = evolve_populations(full, r, uniform_g1_state(full), t);
        worst_total = std::max(worst_total, std::abs(s.total() - 1.0));
        worst_min = std::min(worst_min, s.min());
      }
    }
    return check("rate equation conservation", worst_total <= 1e-9 && worst_min >= -1e-12 && worst_column <= 1e-14,
                 "max |total - 1| " + format_double(worst_total) + ", min population " + format_double(worst_min));
  });

  add(out, "pump dark-state limits", [&] {
    const LaserField coupling = pumping_coupling(full, params.omega_c2);
    double worst = 1.0;
    for (int q : {-1, 0, 1}) {
      const auto d = predict_distribution(full, {q, 20.0, 2.0, 10.0}, coupling);
      worst = std::min(worst, d[q]);
    }
    return check("pump dark-state limits", worst >= 0.999, "min dark-sublevel share " + format_double(worst));
  });

  add(out, "pump purity monotone in power", [&] {
    const LaserField coupling = pumping_coupling(full, params.omega_c2);
    double prev = 0.0, worst_drop = 0.0;
    for (double p = 0.0; p <= 15.0 + 1e-9; p += 0.5) {
      const double share = predict_distribution(full, {-1, p, 2.0, 1e-4}, coupling).p_minus;
      worst_drop = std::max(worst_drop, prev - share);
      prev = share;
    }
    return check("pump purity monotone in power", worst_drop <= 1e-12, "largest decrease " + format_double(worst_drop));
  });

  add(out, "fit round trip", [&] {
    double worst_pp = 0.0;
    bool monotone = true;
    for (const auto& pops : reference_pops) {
      FitProblem problem = FitProblem::from(synth_spectrum(model, pops, grid), model);
      problem.init_density = model.n_f1 * 0.8;
      const FitResult r = fit_populations(problem);
      const auto a = r.pops.as_array();
      const auto b = pops.as_array();
      for (std::size_t k = 0; k < 3; ++k) worst_pp = std::max(worst_pp, 100.0 * std::abs(a[k] - b[k]));
      monotone = monotone && std::is_sorted(r.norm_history.rbegin(), r.norm_history.rend());
      monotone = monotone && r.pops.is_valid();
    }
    return check("fit round trip", worst_pp <= 0.5 && monotone,
                 "max population error " + format_double(worst_pp) + " pp, residual history monotone: " +
                     (monotone ? "yes" : "no"));
  });

  return out;
}

}  // namespace mdsr
