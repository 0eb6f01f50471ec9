#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mdsr {

/// Hyperfine manifolds of the 87Rb D1 line.
///   G1: 5S1/2 F=1   (sublevels a_m)
///   G2: 5S1/2 F=2   (sublevels b_m)
///   E1: 5P1/2 F'=1  (only present when optical pumping is modelled)
///   E2: 5P1/2 F'=2  (sublevels c_m)
enum class Manifold { G1, G2, E1, E2 };

int hyperfine_f(Manifold manifold);
bool is_ground(Manifold manifold);
const char* manifold_name(Manifold manifold);

struct Sublevel {
  Manifold manifold = Manifold::G1;
  int m = 0;

  friend auto operator<=>(const Sublevel&, const Sublevel&) = default;

  /// a_-1, b_0, c_+2, e_0 style label.
  std::string label() const;
};

/// Throws std::invalid_argument if |m| > F.
Sublevel make_sublevel(Manifold manifold, int m);

/// Lande g_F of a manifold (nuclear g-factor neglected): -1/2, +1/2, -1/6, +1/6.
double lande_g_factor(Manifold manifold);

/// Linear Zeeman shift g_F mu_B B m in MHz for a field in gauss.
double zeeman_shift(Sublevel s, double field_gauss);

/// Relative dipole amplitude <upper| d_q |lower> for absorption from `lower`
/// (ground) to `upper` (excited) with polarization component q = m_upper - m_lower.
/// Computed from the Wigner-Eckart theorem and the hyperfine 6-j reduction
/// (Condon-Shortley phases), then divided by <c_-2| d_0 |b_-2> so that this
/// largest pi amplitude on F=2 -> F'=2 is exactly +1. Forbidden combinations return exactly 0.
double relative_dipole(Sublevel lower, Sublevel upper, int q);

struct CouplingKey {
  Sublevel lower;
  Sublevel upper;
  int q = 0;
  friend auto operator<=>(const CouplingKey&, const CouplingKey&) = default;
};

/// Enumerated Zeeman sublevels with their shifts and dipole couplings.
/// Immutable after construction.
class LevelScheme {
 public:
  LevelScheme(std::vector<Sublevel> sublevels, double field_gauss, double reduced_dipole);

  const std::vector<Sublevel>& sublevels() const { return sublevels_; }
  std::size_t size() const { return sublevels_.size(); }
  bool contains(Manifold manifold) const;
  std::optional<std::size_t> find(Sublevel s) const;
  /// Throws std::out_of_range for a sublevel not in the scheme.
  std::size_t index(Sublevel s) const;

  double magnetic_field() const { return field_gauss_; }
  double reduced_dipole() const { return reduced_dipole_; }

  /// Zeeman shift (MHz) of a sublevel in this scheme.
  double shift(Sublevel s) const;
  /// Relative dipole amplitude; 0 when no coupling entry exists.
  double coupling(Sublevel lower, Sublevel upper, int q) const;
  const std::map<CouplingKey, double>& couplings() const { return couplings_; }

  /// Same scheme with every coupling amplitude negated. Observable quantities
  /// depend only on |amplitude|^2 or products along a single path, so this
  /// copy must reproduce every spectrum exactly.
  LevelScheme with_flipped_coupling_signs() const;

 private:
  std::vector<Sublevel> sublevels_;
  std::map<Sublevel, std::size_t> index_;
  std::map<Sublevel, double> shifts_;
  std::map<CouplingKey, double> couplings_;
  double field_gauss_ = 0.0;
  double reduced_dipole_ = 0.0;
};

/// G1 (3) + G2 (5) + E2 (5) = 13 sublevels, or 16 with E1.
/// Ordering: G1, G2, [E1], E2, each with ascending m.
LevelScheme build_level_scheme(double field_gauss, bool include_e1);

}  // namespace mdsr
