#include "mdsr/level_scheme.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "mdsr/angular_momentum.hpp"
#include "mdsr/physical_constants.hpp"

namespace mdsr {
namespace {

constexpr HalfInteger kJg = HalfInteger::from_twice(static_cast<int>(2.0 * constants::kGroundJ));
constexpr HalfInteger kJe = HalfInteger::from_twice(static_cast<int>(2.0 * constants::kExcitedJ));
constexpr HalfInteger kI = HalfInteger::from_twice(static_cast<int>(2.0 * constants::kNuclearSpin));

// <F' m'| d_q |F m> in units of <J'||d||J>, Condon-Shortley phases.
double wigner_eckart_amplitude(int f, int m, int f_up, int m_up, int q) {
  const double three_j = wigner3j(f_up, 1, f, -m_up, q, m);
  if (three_j == 0.0) return 0.0;
  const double six_j = wigner6j(kJe, f_up, kI, f, kJg, 1);
  if (six_j == 0.0) return 0.0;
  const HalfInteger reduction_phase = kJe + kI + HalfInteger(f) + HalfInteger(1);
  const int phase = ((f_up - m_up) + reduction_phase.twice() / 2) % 2 == 0 ? 1 : -1;
  return phase * three_j * std::sqrt((2.0 * f + 1.0) * (2.0 * f_up + 1.0)) * six_j;
}

double reference_amplitude() {
  static const double value = wigner_eckart_amplitude(2, -2, 2, -2, 0);
  return value;
}

double g_j(Manifold manifold) {
  return is_ground(manifold) ? constants::kGroundLandeGj : constants::kExcitedLandeGj;
}

double j_of(Manifold manifold) {
  return is_ground(manifold) ? constants::kGroundJ : constants::kExcitedJ;
}

}  // namespace

int hyperfine_f(Manifold manifold) {
  switch (manifold) {
    case Manifold::G1:
    case Manifold::E1:
      return 1;
    case Manifold::G2:
    case Manifold::E2:
      return 2;
  }
  return 0;
}

bool is_ground(Manifold manifold) {
  return manifold == Manifold::G1 || manifold == Manifold::G2;
}

const char* manifold_name(Manifold manifold) {
  switch (manifold) {
    case Manifold::G1: return "G1";
    case Manifold::G2: return "G2";
    case Manifold::E1: return "E1";
    case Manifold::E2: return "E2";
  }
  return "?";
}

std::string Sublevel::label() const {
  static constexpr const char* letters[] = {"a", "b", "e", "c"};
  std::string sign = m > 0 ? "+" : "";
  return std::string(letters[static_cast<int>(manifold)]) + "_" + sign + std::to_string(m);
}

Sublevel make_sublevel(Manifold manifold, int m) {
  if (std::abs(m) > hyperfine_f(manifold)) {
    throw std::invalid_argument("|m| exceeds F for manifold " + std::string(manifold_name(manifold)) +
                                ": m=" + std::to_string(m));
  }
  return Sublevel{manifold, m};
}

double lande_g_factor(Manifold manifold) {
  const double f = hyperfine_f(manifold);
  const double j = j_of(manifold);
  const double i = constants::kNuclearSpin;
  return g_j(manifold) * (f * (f + 1) + j * (j + 1) - i * (i + 1)) / (2.0 * f * (f + 1));
}

double zeeman_shift(Sublevel s, double field_gauss) {
  if (field_gauss < 0.0) throw std::invalid_argument("magnetic field must be >= 0");
  if (s.m == 0) return 0.0;
  return lande_g_factor(s.manifold) * constants::kBohrMagneton * field_gauss * s.m;
}

double relative_dipole(Sublevel lower, Sublevel upper, int q) {
  if (!is_ground(lower.manifold) || is_ground(upper.manifold)) return 0.0;
  if (q < -1 || q > 1 || upper.m - lower.m != q) return 0.0;
  const int f = hyperfine_f(lower.manifold);
  const int f_up = hyperfine_f(upper.manifold);
  if (std::abs(lower.m) > f || std::abs(upper.m) > f_up) return 0.0;
  return wigner_eckart_amplitude(f, lower.m, f_up, upper.m, q) / reference_amplitude();
}

LevelScheme::LevelScheme(std::vector<Sublevel> sublevels, double field_gauss, double reduced_dipole)
    : sublevels_(std::move(sublevels)), field_gauss_(field_gauss), reduced_dipole_(reduced_dipole) {
  for (std::size_t i = 0; i < sublevels_.size(); ++i) {
    const Sublevel s = make_sublevel(sublevels_[i].manifold, sublevels_[i].m);
    if (!index_.emplace(s, i).second) {
      throw std::invalid_argument("duplicate sublevel " + s.label());
    }
    shifts_[s] = zeeman_shift(s, field_gauss_);
  }
  for (const Sublevel& lower : sublevels_) {
    if (!is_ground(lower.manifold)) continue;
    for (const Sublevel& upper : sublevels_) {
      if (is_ground(upper.manifold)) continue;
      const int q = upper.m - lower.m;
      if (q < -1 || q > 1) continue;
      const double amplitude = relative_dipole(lower, upper, q);
      if (amplitude != 0.0) couplings_[{lower, upper, q}] = amplitude;
    }
  }
}

bool LevelScheme::contains(Manifold manifold) const {
  for (const Sublevel& s : sublevels_) {
    if (s.manifold == manifold) return true;
  }
  return false;
}

std::optional<std::size_t> LevelScheme::find(Sublevel s) const {
  if (auto it = index_.find(s); it != index_.end()) return it->second;
  return std::nullopt;
}

std::size_t LevelScheme::index(Sublevel s) const {
  if (auto i = find(s)) return *i;
  throw std::out_of_range("sublevel " + s.label() + " not in level scheme");
}

double LevelScheme::shift(Sublevel s) const {
  if (auto it = shifts_.find(s); it != shifts_.end()) return it->second;
  throw std::out_of_range("sublevel " + s.label() + " not in level scheme");
}

double LevelScheme::coupling(Sublevel lower, Sublevel upper, int q) const {
  if (auto it = couplings_.find({lower, upper, q}); it != couplings_.end()) return it->second;
  return 0.0;
}

LevelScheme LevelScheme::with_flipped_coupling_signs() const {
  LevelScheme flipped = *this;
  for (auto& [key, amplitude] : flipped.couplings_) amplitude = -amplitude;
  return flipped;
}

LevelScheme build_level_scheme(double field_gauss, bool include_e1) {
  std::vector<Sublevel> levels;
  auto add_manifold = [&levels](Manifold manifold) {
    const int f = hyperfine_f(manifold);
    for (int m = -f; m <= f; ++m) levels.push_back({manifold, m});
  };
  add_manifold(Manifold::G1);
  add_manifold(Manifold::G2);
  if (include_e1) add_manifold(Manifold::E1);
  add_manifold(Manifold::E2);
  return LevelScheme(std::move(levels), field_gauss, constants::kD1ReducedDipole);
}

}  // namespace mdsr
