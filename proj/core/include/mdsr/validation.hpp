#pragma once

#include <span>
#include <string>
#include <vector>

#include "mdsr/spectrum.hpp"

namespace mdsr {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct OracleComparison {
  double max_relative_error = 0.0;  ///< over points with |Im| above the floor
  double worst_detuning = 0.0;
  std::size_t compared_points = 0;
  std::size_t line_count = 0;
};

/// Full-Liouvillian weak-probe coherence of every probe line (population
/// frozen uniformly in F=1) against the analytic Lambda formula at the
/// Zeeman-shifted detunings. Compares Im parts where |Im| > im_floor.
OracleComparison compare_with_analytic(const ExperimentModel& model, std::span<const double> detunings,
                                       double im_floor = 1e-6);

/// Physical invariants of every module for the given parameters. Each check
/// reports pass/fail and a one-line measured value.
std::vector<CheckResult> run_invariant_suite(const ModelParameters& params);

}  // namespace mdsr
