#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mdsr/fitting.hpp"
#include "mdsr/least_squares.hpp"

using namespace mdsr;

namespace {

const ExperimentModel kModel = make_experiment_model({});
const std::vector<double> kGrid = make_grid(-80.0, 80.0, 1.0);

FitProblem problem_for(const PopulationDistribution& truth, double sigma = 0.0, std::uint64_t seed = 1) {
  Spectrum s = synth_spectrum(kModel, truth, kGrid);
  if (sigma > 0.0) s = add_noise(s, sigma, seed);
  return FitProblem::from(std::move(s), kModel);
}

double norm(const std::vector<double>& r) {
  double s = 0.0;
  for (double x : r) s += x * x;
  return std::sqrt(s);
}

double max_pp_error(const PopulationDistribution& a, const PopulationDistribution& b) {
  return 100.0 * std::max({std::abs(a.p_minus - b.p_minus), std::abs(a.p_zero - b.p_zero),
                           std::abs(a.p_plus - b.p_plus)});
}

}  // namespace

TEST_CASE("residuals vanish on the generating parameters") {
  const auto truth = PopulationDistribution::from_percent(32, 36, 32);
  const FitProblem p = problem_for(truth);
  for (double r : residuals(p, truth, kModel.n_f1)) CHECK(std::abs(r) <= 1e-15);
}

TEST_CASE("residuals with zero density are 1 - observed") {
  const FitProblem p = problem_for(PopulationDistribution::from_percent(32, 36, 32));
  const auto r = residuals(p, PopulationDistribution::uniform(), 0.0);
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] == doctest::Approx(1.0 - p.observed.transmission[i]));
}

TEST_CASE("perturbing a population raises the residual") {
  const auto truth = PopulationDistribution::from_percent(96, 2, 2);
  const FitProblem p = problem_for(truth);
  const double at_truth = norm(residuals(p, truth, kModel.n_f1));
  const double moved = norm(residuals(p, {0.97, 0.01, 0.02}, kModel.n_f1));
  CHECK(moved > at_truth);
  CHECK(moved > 1e-3);
}

TEST_CASE("swapping p_minus and p_plus is not a symmetry") {
  const auto truth = PopulationDistribution::from_percent(96, 2, 2);
  const FitProblem p = problem_for(truth);
  CHECK(norm(residuals(p, {0.02, 0.02, 0.96}, kModel.n_f1)) > norm(residuals(p, truth, kModel.n_f1)) + 0.1);
}

TEST_CASE("noiseless round trip from the uniform start") {
  for (const auto& truth : {PopulationDistribution::from_percent(32, 36, 32), PopulationDistribution::from_percent(96, 2, 2),
                            PopulationDistribution::from_percent(1, 1, 98), PopulationDistribution::from_percent(1, 98, 1)}) {
    FitProblem p = problem_for(truth);
    p.init_density = 0.7e11;
    const FitResult r = fit_populations(p);
    CHECK(r.converged);
    CHECK(max_pp_error(r.pops, truth) <= 0.5);
    CHECK(std::abs(r.n_f1 / kModel.n_f1 - 1.0) <= 0.01);
    CHECK(r.pops.is_valid());
    CHECK(r.residual_rms >= 0.0);
  }
}

TEST_CASE("noisy round trip with a fixed seed") {
  const auto truth = PopulationDistribution::from_percent(96, 2, 2);
  const FitResult r = fit_populations(problem_for(truth, 0.01, 2024));
  CHECK(r.converged);
  CHECK(max_pp_error(r.pops, truth) <= 2.0);
}

TEST_CASE("starting at the truth converges immediately") {
  const auto truth = PopulationDistribution::from_percent(32, 36, 32);
  FitProblem p = problem_for(truth);
  p.init_pops = truth;
  p.init_density = kModel.n_f1;
  const FitResult r = fit_populations(p);
  CHECK(r.converged);
  CHECK(r.iterations <= 2);
  CHECK(r.residual_rms < 1e-10);
  CHECK(r.start_index == 0);
}

TEST_CASE("accepted steps never increase the residual norm") {
  FitProblem p = problem_for(PopulationDistribution::from_percent(1, 98, 1), 0.01, 5);
  p.multi_start = false;
  const FitResult r = fit_populations(p);
  REQUIRE(r.norm_history.size() >= 2);
  for (std::size_t i = 1; i < r.norm_history.size(); ++i) CHECK(r.norm_history[i] <= r.norm_history[i - 1]);
}

TEST_CASE("fixed density fit") {
  const auto truth = PopulationDistribution::from_percent(1, 1, 98);
  FitProblem p = problem_for(truth);
  p.fit_density = false;
  const FitResult r = fit_populations(p);
  CHECK(r.n_f1 == kModel.n_f1);
  CHECK(max_pp_error(r.pops, truth) <= 0.5);
}

TEST_CASE("iteration limit yields an unconverged result instead of throwing") {
  FitProblem p = problem_for(PopulationDistribution::from_percent(96, 2, 2), 0.01, 3);
  p.max_iterations = 1;
  p.multi_start = false;
  p.init_pops = {0.05, 0.05, 0.9};
  FitResult r;
  CHECK_NOTHROW(r = fit_populations(p));
  CHECK_FALSE(r.converged);
  CHECK(r.pops.is_valid());
}

TEST_CASE("constant data are flagged by the Jacobian condition") {
  const std::vector<double> far = make_grid(1e9, 1e9 + 160.0, 1.0);
  Spectrum flat{far, std::vector<double>(far.size(), 1.0)};
  const FitResult r = fit_populations(FitProblem::from(flat, kModel));
  CHECK(r.jacobian_condition > 1e8);
}

TEST_CASE("fits are deterministic") {
  const FitProblem p = problem_for(PopulationDistribution::from_percent(32, 36, 32), 0.01, 9);
  const FitResult a = fit_populations(p);
  const FitResult b = fit_populations(p);
  CHECK(a.pops == b.pops);
  CHECK(a.n_f1 == b.n_f1);
  CHECK(a.start_index == b.start_index);
}

TEST_CASE("multi-start list") {
  FitProblem p = problem_for(PopulationDistribution::uniform());
  CHECK(fit_starts(p).size() == 4);
  CHECK(fit_starts(p)[2] == PopulationDistribution{0.05, 0.9, 0.05});
  p.multi_start = false;
  CHECK(fit_starts(p).size() == 1);
}

TEST_CASE("problem validation") {
  FitProblem p = problem_for(PopulationDistribution::uniform());
  p.observed = Spectrum{};
  CHECK_THROWS_AS(fit_populations(p), std::invalid_argument);
  p = problem_for(PopulationDistribution::uniform());
  p.init_pops = {0.9, 0.9, 0.9};
  CHECK_THROWS_AS(fit_populations(p), std::invalid_argument);
  p = problem_for(PopulationDistribution::uniform());
  p.density_max = p.density_min;
  CHECK_THROWS_AS(fit_populations(p), std::invalid_argument);
}

TEST_CASE("profile over p_minus has its minimum at the truth") {
  const auto truth = PopulationDistribution::from_percent(32, 36, 32);
  const FitProblem p = problem_for(truth);
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.27 + 0.01 * i);
  const Profile prof = profile_scan(p, FitParameter::PMinus, grid);
  REQUIRE(prof.points.size() == grid.size());
  const auto best = std::min_element(prof.points.begin(), prof.points.end(),
                                     [](const auto& a, const auto& b) { return a.residual_norm < b.residual_norm; });
  CHECK(best->value == doctest::Approx(0.32).epsilon(1e-9));
  CHECK(prof.identifiable);
  CHECK(prof.all_converged);
  for (const auto& pt : prof.points) CHECK(pt.fit.pops.p_minus == doctest::Approx(pt.value));
}

TEST_CASE("single-point profile at the truth equals the global best") {
  const auto truth = PopulationDistribution::from_percent(1, 98, 1);
  const FitProblem p = problem_for(truth, 0.01, 4);
  const FitResult global = fit_populations(p);
  const double at[] = {global.pops.p_zero};
  const Profile prof = profile_scan(p, FitParameter::PZero, at);
  CHECK(prof.points[0].residual_norm == doctest::Approx(global.residual_norm).epsilon(1e-6));
}

TEST_CASE("density profile on absorption-free data is flagged flat") {
  const std::vector<double> far = make_grid(1e9, 1e9 + 160.0, 1.0);
  const FitProblem p = FitProblem::from(Spectrum{far, std::vector<double>(far.size(), 1.0)}, kModel);
  const double densities[] = {1e10, 1e11, 1e12};
  const Profile prof = profile_scan(p, FitParameter::Density, densities);
  CHECK_FALSE(prof.identifiable);
  CHECK(prof.spread <= Profile::kFlatTolerance);
}

TEST_CASE("profile argument checks") {
  const FitProblem p = problem_for(PopulationDistribution::uniform());
  CHECK_THROWS_AS(profile_scan(p, FitParameter::PMinus, std::span<const double>{}), std::invalid_argument);
  const double bad[] = {1.5};
  CHECK_THROWS_AS(profile_scan(p, FitParameter::PPlus, bad), std::invalid_argument);
  const double neg[] = {-1.0};
  CHECK_THROWS_AS(profile_scan(p, FitParameter::Density, neg), std::invalid_argument);
  CHECK(std::string(parameter_name(FitParameter::Density)) == "n_f1");
}

TEST_CASE("Levenberg-Marquardt on a textbook exponential") {
  // y = 2 exp(-0.5 t) sampled exactly.
  const ResidualFunction f = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(10);
    for (int i = 0; i < 10; ++i) r(i) = x(0) * std::exp(-x(1) * i) - 2.0 * std::exp(-0.5 * i);
    return r;
  };
  Eigen::VectorXd x0(2);
  x0 << 1.0, 1.0;
  const LeastSquaresResult r = levenberg_marquardt(f, x0);
  CHECK(r.converged);
  CHECK(r.parameters(0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(r.parameters(1) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(condition_number(Eigen::MatrixXd::Zero(3, 2)) == std::numeric_limits<double>::infinity());
}
