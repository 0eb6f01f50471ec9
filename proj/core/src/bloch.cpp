#include "mdsr/bloch.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace mdsr {
namespace {

using Index = Eigen::Index;
constexpr std::complex<double> kI{0.0, 1.0};

Index idx(std::size_t i) { return static_cast<Index>(i); }

std::string describe(const LaserField& f) {
  return std::string(manifold_name(f.ground)) + "->" + manifold_name(f.excited);
}

// Frame offset (MHz) of every manifold. Fields tie offsets together;
// disconnected manifolds sit at 0.
std::map<Manifold, double> frame_offsets(const LevelScheme& scheme, std::span<const LaserField> fields) {
  std::map<Manifold, std::optional<double>> offset;
  for (Manifold m : {Manifold::G1, Manifold::G2, Manifold::E1, Manifold::E2}) {
    if (scheme.contains(m)) offset[m] = std::nullopt;
  }

  for (Manifold root : {Manifold::G1, Manifold::G2, Manifold::E1, Manifold::E2}) {
    if (!offset.contains(root) || offset[root]) continue;
    offset[root] = 0.0;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const LaserField& f : fields) {
        auto& g = offset[f.ground];
        auto& e = offset[f.excited];
        if (g && !e) {
          e = *g - f.detuning;
          changed = true;
        } else if (e && !g) {
          g = *e + f.detuning;
          changed = true;
        } else if (g && e && std::abs((*e - *g) + f.detuning) > 1e-9) {
          throw std::invalid_argument("field " + describe(f) +
                                      " closes a loop of inconsistent detunings");
        }
      }
    }
  }

  std::map<Manifold, double> result;
  for (const auto& [m, value] : offset) result[m] = value.value_or(0.0);
  return result;
}

}  // namespace

double LaserField::rabi_frequency(const LevelScheme& scheme, Sublevel lower, Sublevel upper) const {
  if (lower.manifold != ground || upper.manifold != excited) return 0.0;
  return rabi_scale * scheme.coupling(lower, upper, q);
}

void LaserField::validate() const {
  if (q < -1 || q > 1) throw std::invalid_argument("polarization q must be -1, 0 or +1");
  if (!(rabi_scale >= 0.0)) throw std::invalid_argument("rabi_scale must be >= 0");
  if (!std::isfinite(detuning)) throw std::invalid_argument("detuning must be finite");
  if (!is_ground(ground) || is_ground(excited)) {
    throw std::invalid_argument("field must drive a ground manifold to an excited manifold");
  }
}

void DecayModel::validate() const {
  if (!(gamma_ab >= 0.0)) throw std::invalid_argument("gamma_ab must be >= 0");
  if (!(gamma_ac > gamma_ab)) {
    throw std::invalid_argument("gamma_ac must exceed gamma_ab (excited decay 2(gamma_ac - gamma_ab) > 0)");
  }
}

DensityMatrix::DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
    throw std::invalid_argument("density matrix must be square and non-empty");
  }
  if (hermiticity_error() > kHermiticityTolerance) {
    throw std::invalid_argument("density matrix not Hermitian: error " + std::to_string(hermiticity_error()));
  }
  if (trace_error() > kTraceTolerance) {
    throw std::invalid_argument("density matrix trace != 1: error " + std::to_string(trace_error()));
  }
  if (min_eigenvalue() < -kPositivityTolerance) {
    throw std::invalid_argument("density matrix not positive: eigenvalue " + std::to_string(min_eigenvalue()));
  }
}

DensityMatrix DensityMatrix::from_populations(const LevelScheme& scheme,
                                              std::span<const std::pair<Sublevel, double>> populations) {
  ComplexMatrix rho = ComplexMatrix::Zero(idx(scheme.size()), idx(scheme.size()));
  double total = 0.0;
  for (const auto& [level, p] : populations) {
    if (p < 0.0) throw std::invalid_argument("negative population for " + level.label());
    const Index i = idx(scheme.index(level));
    rho(i, i) += p;
    total += p;
  }
  if (!(total > 0.0)) throw std::invalid_argument("populations sum to zero");
  return DensityMatrix(rho / total);
}

double DensityMatrix::hermiticity_error() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::trace_error() const {
  return std::abs(rho_.trace() - 1.0);
}

double DensityMatrix::min_eigenvalue() const {
  const ComplexMatrix h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

Liouvillian::Liouvillian(ComplexMatrix generator, std::size_t dim)
    : generator_(std::move(generator)), dim_(dim) {
  if (generator_.rows() != idx(dim * dim) || generator_.cols() != idx(dim * dim)) {
    throw std::invalid_argument("Liouvillian size does not match dim^2");
  }
}

ComplexMatrix Liouvillian::apply(const ComplexMatrix& rho) const {
  return unvec(generator_ * vec(rho), dim_);
}

ComplexVector Liouvillian::vec(const ComplexMatrix& rho) {
  return Eigen::Map<const ComplexVector>(rho.data(), rho.size());
}

ComplexMatrix Liouvillian::unvec(const ComplexVector& v, std::size_t dim) {
  return Eigen::Map<const ComplexMatrix>(v.data(), idx(dim), idx(dim));
}

ComplexMatrix build_hamiltonian(const LevelScheme& scheme, std::span<const LaserField> fields) {
  for (std::size_t a = 0; a < fields.size(); ++a) {
    fields[a].validate();
    if (!scheme.contains(fields[a].ground) || !scheme.contains(fields[a].excited)) {
      throw std::invalid_argument("field " + describe(fields[a]) + " targets a manifold not in the scheme");
    }
    for (std::size_t b = 0; b < a; ++b) {
      if (fields[a].ground == fields[b].ground && fields[a].excited == fields[b].excited) {
        throw std::invalid_argument("two fields on transition " + describe(fields[a]) +
                                    " (rotating frame ambiguous)");
      }
    }
  }

  const auto offsets = frame_offsets(scheme, fields);
  const auto& levels = scheme.sublevels();
  const Index n = idx(levels.size());
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const Sublevel& s = levels[static_cast<std::size_t>(i)];
    h(i, i) = offsets.at(s.manifold) + scheme.shift(s);
  }

  for (const LaserField& f : fields) {
    for (const auto& [key, amplitude] : scheme.couplings()) {
      if (key.lower.manifold != f.ground || key.upper.manifold != f.excited || key.q != f.q) continue;
      const double half_rabi = 0.5 * f.rabi_scale * amplitude;
      const Index lo = idx(scheme.index(key.lower));
      const Index up = idx(scheme.index(key.upper));
      h(up, lo) -= half_rabi;
      h(lo, up) -= half_rabi;
    }
  }
  return h;
}

std::vector<DecayChannel> spontaneous_decay_channels(const LevelScheme& scheme, double total_rate) {
  std::vector<DecayChannel> channels;
  const auto& levels = scheme.sublevels();
  for (const Sublevel& upper : levels) {
    if (is_ground(upper.manifold)) continue;
    double strength = 0.0;
    std::vector<std::pair<std::size_t, double>> branches;
    for (const Sublevel& lower : levels) {
      if (!is_ground(lower.manifold)) continue;
      const int q = upper.m - lower.m;
      const double amplitude = scheme.coupling(lower, upper, q);
      if (amplitude == 0.0) continue;
      branches.emplace_back(scheme.index(lower), amplitude * amplitude);
      strength += amplitude * amplitude;
    }
    for (const auto& [lower, weight] : branches) {
      channels.push_back({scheme.index(upper), lower, total_rate * weight / strength});
    }
  }
  return channels;
}

Liouvillian build_liouvillian(const ComplexMatrix& hamiltonian, std::span<const DecayChannel> jumps,
                              std::span<const double> dephasing) {
  const Index n = hamiltonian.rows();
  if (hamiltonian.cols() != n) throw std::invalid_argument("Hamiltonian must be square");
  if (!dephasing.empty() && idx(dephasing.size()) != n) {
    throw std::invalid_argument("dephasing rates must be empty or one per level");
  }
  auto at = [n](Index i, Index j) { return i + n * j; };
  ComplexMatrix gen = ComplexMatrix::Zero(n * n, n * n);

  // -i (H rho - rho H)
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      for (Index k = 0; k < n; ++k) {
        if (hamiltonian(i, k) != 0.0) gen(at(i, j), at(k, j)) += -kI * hamiltonian(i, k);
        if (hamiltonian(k, j) != 0.0) gen(at(i, j), at(i, k)) += kI * hamiltonian(k, j);
      }
    }
  }

  // rate (|t><f| rho |f><t| - {|f><f|, rho} / 2)
  auto add_projector_loss = [&](Index f, double rate) {
    for (Index j = 0; j < n; ++j) {
      gen(at(f, j), at(f, j)) -= 0.5 * rate;
      gen(at(j, f), at(j, f)) -= 0.5 * rate;
    }
  };
  for (const DecayChannel& c : jumps) {
    if (c.rate < 0.0) throw std::invalid_argument("negative decay rate");
    const Index f = idx(c.from);
    const Index t = idx(c.to);
    if (f >= n || t >= n) throw std::invalid_argument("decay channel index out of range");
    gen(at(t, t), at(f, f)) += c.rate;
    add_projector_loss(f, c.rate);
  }
  for (Index k = 0; k < idx(dephasing.size()); ++k) {
    const double rate = dephasing[static_cast<std::size_t>(k)];
    if (rate < 0.0) throw std::invalid_argument("negative dephasing rate");
    gen(at(k, k), at(k, k)) += rate;
    add_projector_loss(k, rate);
  }
  return Liouvillian(std::move(gen), static_cast<std::size_t>(n));
}

Liouvillian build_liouvillian(const ComplexMatrix& hamiltonian, const LevelScheme& scheme,
                              const DecayModel& decay) {
  if (hamiltonian.rows() != idx(scheme.size())) {
    throw std::invalid_argument("Hamiltonian dimension does not match level scheme");
  }
  const double gamma = decay.excited_decay_rate();
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("excited-state decay 2(gamma_ac - gamma_ab) must be positive");
  }
  decay.validate();
  const auto jumps = spontaneous_decay_channels(scheme, gamma);
  const std::vector<double> dephasing(scheme.size(), decay.gamma_ab);
  return build_liouvillian(hamiltonian, jumps, dephasing);
}

std::size_t kernel_dimension(const Liouvillian& liouvillian, double rank_threshold) {
  Eigen::FullPivLU<ComplexMatrix> lu(liouvillian.generator());
  lu.setThreshold(rank_threshold);
  return static_cast<std::size_t>(liouvillian.generator().cols() - lu.rank());
}

DensityMatrix steady_state(const Liouvillian& liouvillian, const DensityMatrix& rho0,
                           const SteadyStateOptions& options) {
  const std::size_t n = liouvillian.dim();
  if (rho0.dim() != n) throw std::invalid_argument("rho0 dimension does not match Liouvillian");
  const ComplexMatrix& gen = liouvillian.generator();
  const Index n2 = gen.rows();
  const double scale = std::max(gen.norm(), 1e-300);

  auto residual = [&](const ComplexVector& x) { return (gen * x).norm() / scale; };
  auto trace = [n](const ComplexVector& x) {
    std::complex<double> t = 0.0;
    for (std::size_t i = 0; i < n; ++i) t += x(idx(i + n * i));
    return t;
  };
  auto finish = [n](const ComplexVector& x) {
    ComplexMatrix rho = Liouvillian::unvec(x, n);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    return DensityMatrix(rho);
  };

  ComplexVector x = Liouvillian::vec(rho0.matrix());
  if (residual(x) < options.tolerance) return finish(x);

  if (kernel_dimension(liouvillian, options.rank_threshold) <= 1) {
    ComplexMatrix a(n2 + 1, n2);
    a.topRows(n2) = gen;
    a.row(n2).setZero();
    for (std::size_t i = 0; i < n; ++i) a(n2, idx(i + n * i)) = 1.0;
    ComplexVector b = ComplexVector::Zero(n2 + 1);
    b(n2) = 1.0;
    x = a.colPivHouseholderQr().solve(b);
    const double r = residual(x);
    if (r >= options.tolerance) {
      throw ConvergenceError("direct steady-state solve left residual " + std::to_string(r), r);
    }
    return finish(x);
  }

  // Degenerate kernel: long-time limit from rho0 by repeated squaring of the propagator.
  const double norm_inf = gen.cwiseAbs().rowwise().sum().maxCoeff();
  ComplexMatrix propagator = (gen * (1.0 / norm_inf)).exp();
  double r = residual(x);
  for (int k = 0; k < options.max_doublings; ++k) {
    x = propagator * x;
    x /= trace(x);
    r = residual(x);
    if (r < options.tolerance) return finish(x);
    propagator = (propagator * propagator).eval();
  }
  throw ConvergenceError("time evolution did not reach a steady state; residual " + std::to_string(r), r);
}

std::complex<double> lambda_coherence_analytic(double omega_p, double omega_c, double delta_p,
                                               double delta_c, double gamma_ac, double gamma_ab) {
  std::complex<double> denominator = gamma_ac + kI * delta_p;
  if (omega_c != 0.0) {
    const std::complex<double> two_photon = gamma_ab + kI * (delta_p - delta_c);
    if (two_photon == 0.0) return 0.0;
    denominator += (0.25 * omega_c * omega_c) / two_photon;
  }
  return (0.5 * kI * omega_p) / denominator;
}

std::complex<double> probe_coherence(const ComplexMatrix& rho, std::size_t lower, std::size_t upper) {
  return -rho(idx(lower), idx(upper));
}

WeakProbeResponse weak_probe_response(const LevelScheme& scheme, const LaserField& coupling,
                                      const LaserField& probe, const DecayModel& decay,
                                      const DensityMatrix& rho0) {
  LaserField dark_probe = probe;
  dark_probe.rabi_scale = 0.0;
  const LaserField with_probe[] = {coupling, probe};
  const LaserField without_probe[] = {coupling, dark_probe};

  const ComplexMatrix h_full = build_hamiltonian(scheme, with_probe);
  const ComplexMatrix h0 = build_hamiltonian(scheme, without_probe);
  const Liouvillian l0 = build_liouvillian(h0, scheme, decay);
  DensityMatrix unperturbed = steady_state(l0, rho0);

  const ComplexMatrix v = h_full - h0;
  const ComplexMatrix& r0 = unperturbed.matrix();
  const ComplexMatrix source = -kI * (v * r0 - r0 * v);
  const ComplexVector rhs = -Liouvillian::vec(source);

  const ComplexVector x = l0.generator().completeOrthogonalDecomposition().solve(rhs);
  const double residual = (l0.generator() * x - rhs).norm();
  return {std::move(unperturbed), Liouvillian::unvec(x, scheme.size()), residual};
}

}  // namespace mdsr
