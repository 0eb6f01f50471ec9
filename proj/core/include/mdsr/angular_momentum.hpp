#pragma once

#include <compare>
#include <string>

namespace mdsr {

/// Angular-momentum quantum number stored as twice its value, so that
/// half-integral arguments stay exact.
class HalfInteger {
 public:
  constexpr HalfInteger() = default;
  constexpr HalfInteger(int whole) : twice_(2 * whole) {}  // NOLINT: implicit from int is intended

  static constexpr HalfInteger from_twice(int twice) {
    HalfInteger h;
    h.twice_ = twice;
    return h;
  }

  /// Throws std::invalid_argument unless `value` is an exact multiple of 1/2.
  static HalfInteger from_double(double value);

  constexpr int twice() const { return twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }
  constexpr double value() const { return 0.5 * twice_; }

  constexpr HalfInteger operator-() const { return from_twice(-twice_); }
  friend constexpr HalfInteger operator+(HalfInteger a, HalfInteger b) {
    return from_twice(a.twice_ + b.twice_);
  }
  friend constexpr HalfInteger operator-(HalfInteger a, HalfInteger b) {
    return from_twice(a.twice_ - b.twice_);
  }
  friend constexpr auto operator<=>(HalfInteger, HalfInteger) = default;

  std::string to_string() const;

 private:
  int twice_ = 0;
};

/// Wigner 3-j symbol
///   ( j1 j2 j3 )
///   ( m1 m2 m3 )
/// from the Racah closed form. The sum is carried out in exact rational
/// arithmetic and only the final square root is taken in floating point.
/// Returns 0 whenever a selection rule fails (m-sum, triangle, |m| > j,
/// mismatched parity of j and m).
double wigner3j(HalfInteger j1, HalfInteger j2, HalfInteger j3,
                HalfInteger m1, HalfInteger m2, HalfInteger m3);

/// Wigner 6-j symbol { j1 j2 j3 ; j4 j5 j6 } (Racah formula). Returns 0 if
/// any of the four triads (j1 j2 j3), (j1 j5 j6), (j4 j2 j6), (j4 j5 j3)
/// violates the triangle rule or has a half-integral sum.
double wigner6j(HalfInteger j1, HalfInteger j2, HalfInteger j3,
                HalfInteger j4, HalfInteger j5, HalfInteger j6);

/// True when (a, b, c) can couple: |a-b| <= c <= a+b with a+b+c integral.
bool triangle(HalfInteger a, HalfInteger b, HalfInteger c);

}  // namespace mdsr
