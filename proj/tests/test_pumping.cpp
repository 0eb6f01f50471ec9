#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mdsr/pumping.hpp"

using namespace mdsr;

namespace {

const LevelScheme kScheme = build_level_scheme(0.15, true);
const LaserField kCoupling = pumping_coupling(kScheme, 78.0);
const LaserField kNoCoupling = pumping_coupling(kScheme, 0.0);

Eigen::Index at(Sublevel s) { return static_cast<Eigen::Index>(kScheme.index(s)); }

// Rates added by the pump alone.
Eigen::MatrixXd pump_part(int q, double power) {
  return pump_rate_matrix(kScheme, {q, power, 2.0, 0.1}, kCoupling) - coupling_only_rate_matrix(kScheme, kCoupling);
}

}  // namespace

TEST_CASE("pump intensity and saturation") {
  const PumpConfig p{-1, 13.6, 2.0, 0.1};
  CHECK(p.intensity() == doctest::Approx(13.6 / (std::numbers::pi * 0.01)));
  CHECK(p.saturation() == doctest::Approx(p.intensity() / 1.496));
  CHECK_THROWS_AS((PumpConfig{2, 1.0, 2.0, 0.1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((PumpConfig{0, -1.0, 2.0, 0.1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((PumpConfig{0, 1.0, 0.0, 0.1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((PumpConfig{0, 1.0, 2.0, 0.0}.validate()), std::invalid_argument);
}

TEST_CASE("rate matrix structure") {
  for (int q : {-1, 0, 1}) {
    const Eigen::MatrixXd r = pump_rate_matrix(kScheme, {q, 5.0, 2.0, 0.1}, kCoupling);
    CHECK(r.colwise().sum().cwiseAbs().maxCoeff() <= 1e-9);
    for (Eigen::Index i = 0; i < r.rows(); ++i)
      for (Eigen::Index j = 0; j < r.cols(); ++j)
        if (i != j) CHECK(r(i, j) >= 0.0);
  }
  CHECK_THROWS_AS(pump_rate_matrix(build_level_scheme(0.15, false), {-1, 1.0, 2.0, 0.1}, kCoupling),
                  std::invalid_argument);
}

TEST_CASE("dark sublevels get no pump excitation") {
  CHECK(pump_part(-1, 13.6).col(at({Manifold::G1, -1})).cwiseAbs().maxCoeff() == 0.0);
  CHECK(pump_part(0, 13.6).col(at({Manifold::G1, 0})).cwiseAbs().maxCoeff() == 0.0);
  CHECK(pump_part(1, 13.6).col(at({Manifold::G1, 1})).cwiseAbs().maxCoeff() == 0.0);
  CHECK(pump_part(-1, 13.6).col(at({Manifold::G1, 0})).cwiseAbs().maxCoeff() > 0.0);
  CHECK(pump_part(-1, 0.0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pumping saturates at half the natural rate") {
  const double gamma = 2.0 * std::numbers::pi * 5.75e3;  // 1/ms
  const Eigen::MatrixXd r = pump_part(1, 1e6);
  // a_0 -> e_+1 absorption, rel^2 = 1/4.
  CHECK(r(at({Manifold::E1, 1}), at({Manifold::G1, 0})) == doctest::Approx(gamma / 2.0).epsilon(1e-4));
  const Eigen::MatrixXd weak = pump_part(1, 1e-6);
  const double s = PumpConfig{1, 1e-6, 2.0, 0.1}.saturation() * 0.25 / 3.0;
  CHECK(weak(at({Manifold::E1, 1}), at({Manifold::G1, 0})) == doctest::Approx(gamma / 2.0 * s).epsilon(1e-6));
}

TEST_CASE("evolution basics") {
  const PopulationState u = uniform_g1_state(kScheme);
  const Eigen::MatrixXd r = pump_rate_matrix(kScheme, {-1, 13.6, 2.0, 0.1}, kCoupling);
  CHECK(evolve_populations(kScheme, r, u, 0.0).vector() == u.vector());
  CHECK_THROWS_AS(evolve_populations(kScheme, r, u, -1.0), std::invalid_argument);
  const PopulationState after = evolve_populations(kScheme, r, u, 0.1);
  CHECK(after.g1_distribution().p_minus >= 0.99);
  CHECK_NOTHROW(after.validate());
}

TEST_CASE("b_0 is a trap for the coupling beam") {
  const PopulationState b0 = pure_state(kScheme, {Manifold::G2, 0});
  const PopulationState after = evolve_populations(kScheme, coupling_only_rate_matrix(kScheme, kCoupling), b0, 10.0);
  CHECK(after.vector() == b0.vector());
}

TEST_CASE("b_0 population never decreases with pump and coupling on") {
  const Eigen::MatrixXd r = pump_rate_matrix(kScheme, {-1, 13.6, 2.0, 0.1}, kCoupling);
  double prev = 0.0;
  for (double t = 0.0; t <= 1.0; t += 0.01) {
    const double b0 = evolve_populations(kScheme, r, uniform_g1_state(kScheme), t)[{Manifold::G2, 0}];
    CHECK(b0 >= prev - 1e-12);
    prev = b0;
  }
  CHECK(prev > 0.1);
}

TEST_CASE("probability is conserved") {
  for (int q : {-1, 0, 1}) {
    const Eigen::MatrixXd r = pump_rate_matrix(kScheme, {q, 20.0, 2.0, 0.1}, kCoupling);
    for (double t : {1e-5, 1e-3, 0.1, 10.0, 1000.0, 1e6}) {
      const PopulationState s = evolve_populations(kScheme, r, uniform_g1_state(kScheme), t);
      CHECK(std::abs(s.total() - 1.0) <= 1e-9);
      CHECK(s.min() >= -1e-12);
    }
  }
}

TEST_CASE("steady state reaches each dark sublevel") {
  for (int q : {-1, 0, 1}) {
    const Eigen::MatrixXd r = pump_rate_matrix(kScheme, {q, 13.6, 2.0, 0.1}, kCoupling);
    const SteadyPopulations s = steady_populations(kScheme, r, uniform_g1_state(kScheme));
    CHECK(s.converged);
    CHECK(s.rate_norm < SteadyPopulations::kRateTolerance);
    CHECK(s.state.g1_distribution()[q] == doctest::Approx(1.0).epsilon(1e-9));
  }
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(16, 16);
  const PopulationState u = uniform_g1_state(kScheme);
  const SteadyPopulations s = steady_populations(kScheme, zero, u);
  CHECK(s.converged);
  CHECK(s.state.vector() == u.vector());
}

TEST_CASE("dark-state limit at 20 mW and 10 ms") {
  for (int q : {-1, 0, 1}) CHECK(predict_distribution(kScheme, {q, 20.0, 2.0, 10.0}, kCoupling)[q] >= 0.999);
}

TEST_CASE("sigma- purity is non-decreasing in power") {
  for (double duration : {1e-4, 1e-3, 0.1}) {
    double prev = 0.0;
    for (double p = 0.0; p <= 15.0 + 1e-9; p += 0.25) {
      const double share = predict_distribution(kScheme, {-1, p, 2.0, duration}, kCoupling).p_minus;
      CHECK(share >= prev - 1e-12);
      prev = share;
    }
  }
}

TEST_CASE("no pump leaves the uniform distribution") {
  const auto d = predict_distribution(kScheme, {-1, 0.0, 2.0, 0.1}, kCoupling);
  CHECK(d.p_minus == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(d.p_plus == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("pump design") {
  const PumpPlan to_minus = design_pump({1.0, 0.0, 0.0}, kScheme, kCoupling, 0.1);
  CHECK(to_minus.polarization == -1);
  CHECK(to_minus.power_mw >= 5.0);
  CHECK(to_minus.target_distance < 0.02);

  const PumpPlan to_zero = design_pump({0.0, 1.0, 0.0}, kScheme, kCoupling, 0.1);
  CHECK(to_zero.polarization == 0);
  CHECK(to_zero.target_distance < 0.02);

  const PumpPlan to_plus = design_pump({0.0, 0.0, 1.0}, kScheme, kCoupling, 0.1);
  CHECK(to_plus.polarization == 1);

  const PumpPlan none = design_pump(PopulationDistribution::uniform(), kScheme, kCoupling, 0.1);
  CHECK(none.power_mw <= 1e-3);
  CHECK(none.target_distance < 0.01);

  // An intermediate target is met by refining between grid powers.
  const auto mid_target = predict_distribution(kScheme, {-1, 0.05, 2.0, 1e-4}, kCoupling);
  const PumpPlan mid = design_pump(mid_target, kScheme, kCoupling, 1e-4);
  CHECK(mid.polarization == -1);
  CHECK(mid.target_distance < 1e-4);
  CHECK(mid.power_mw == doctest::Approx(0.05).epsilon(0.02));

  CHECK(l1_distance({1, 0, 0}, {0, 1, 0}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(design_pump({0.9, 0.9, 0.9}, kScheme, kCoupling, 0.1), std::invalid_argument);
}

TEST_CASE("population state accessors") {
  const PopulationState u = uniform_g1_state(kScheme);
  CHECK(u.manifold_total(Manifold::G1) == doctest::Approx(1.0));
  CHECK(u.manifold_total(Manifold::G2) == 0.0);
  CHECK(u[{Manifold::G1, 0}] == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(pure_state(kScheme, {Manifold::G2, 0}).g1_distribution(), std::domain_error);
  Eigen::VectorXd bad = u.vector();
  bad(0) = 0.9;
  CHECK_THROWS_AS(PopulationState(kScheme, bad).validate(), std::invalid_argument);
  CHECK_THROWS_AS(PopulationState(kScheme, Eigen::VectorXd::Zero(3)), std::invalid_argument);
  CHECK(kNoCoupling.rabi_scale == 0.0);
}
