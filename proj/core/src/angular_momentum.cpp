#include "mdsr/angular_momentum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace mdsr {
namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

cpp_int factorial(int n) {
  cpp_int r = 1;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

// All arguments passed here are known to be integral; `twice / 2` is exact.
int whole(HalfInteger h) { return h.twice() / 2; }

// Squared triangle coefficient (a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!.
cpp_rational triangle_coefficient(HalfInteger a, HalfInteger b, HalfInteger c) {
  return cpp_rational(factorial(whole(a + b - c)) * factorial(whole(a - b + c)) *
                          factorial(whole(b + c - a)),
                      factorial(whole(a + b + c) + 1));
}

// sign * sqrt(magnitude_squared) with magnitude_squared exact until here.
double signed_root(int sign, const cpp_rational& magnitude_squared) {
  return sign * std::sqrt(static_cast<double>(magnitude_squared));
}

}  // namespace

HalfInteger HalfInteger::from_double(double value) {
  const double twice = 2.0 * value;
  if (!std::isfinite(twice) || twice != std::round(twice)) {
    throw std::invalid_argument("not a half-integer: " + std::to_string(value));
  }
  return from_twice(static_cast<int>(twice));
}

std::string HalfInteger::to_string() const {
  if (is_integer()) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

bool triangle(HalfInteger a, HalfInteger b, HalfInteger c) {
  if (a.twice() < 0 || b.twice() < 0 || c.twice() < 0) return false;
  if (!(a + b + c).is_integer()) return false;
  const int lo = std::abs(a.twice() - b.twice());
  return lo <= c.twice() && c.twice() <= a.twice() + b.twice();
}

double wigner3j(HalfInteger j1, HalfInteger j2, HalfInteger j3,
                HalfInteger m1, HalfInteger m2, HalfInteger m3) {
  if ((m1 + m2 + m3).twice() != 0) return 0.0;
  if (!triangle(j1, j2, j3)) return 0.0;
  const HalfInteger js[3] = {j1, j2, j3};
  const HalfInteger ms[3] = {m1, m2, m3};
  for (int i = 0; i < 3; ++i) {
    if (std::abs(ms[i].twice()) > js[i].twice()) return 0.0;
    if (!(js[i] - ms[i]).is_integer()) return 0.0;
  }

  // Summation limits for k: every factorial argument must be >= 0.
  const int a1 = whole(j3 - j2 + m1);  // k + a1 >= 0
  const int a2 = whole(j3 - j1 - m2);  // k + a2 >= 0
  const int b1 = whole(j1 + j2 - j3);  // b1 - k >= 0
  const int b2 = whole(j1 - m1);
  const int b3 = whole(j2 + m2);
  const int k_min = std::max({0, -a1, -a2});
  const int k_max = std::min({b1, b2, b3});

  cpp_rational sum = 0;
  for (int k = k_min; k <= k_max; ++k) {
    const cpp_int denom = factorial(k) * factorial(a1 + k) * factorial(a2 + k) *
                          factorial(b1 - k) * factorial(b2 - k) * factorial(b3 - k);
    const cpp_rational term(1, denom);
    sum += (k % 2 == 0) ? term : cpp_rational(-term);
  }
  if (sum == 0) return 0.0;

  const cpp_rational prefactor =
      triangle_coefficient(j1, j2, j3) *
      cpp_rational(factorial(whole(j1 + m1)) * factorial(whole(j1 - m1)) *
                   factorial(whole(j2 + m2)) * factorial(whole(j2 - m2)) *
                   factorial(whole(j3 + m3)) * factorial(whole(j3 - m3)));

  const int phase_exponent = whole(j1 - j2 - m3);
  int sign = (phase_exponent % 2 == 0) ? 1 : -1;
  if (sum < 0) sign = -sign;
  return signed_root(sign, prefactor * sum * sum);
}

double wigner6j(HalfInteger j1, HalfInteger j2, HalfInteger j3,
                HalfInteger j4, HalfInteger j5, HalfInteger j6) {
  if (!triangle(j1, j2, j3) || !triangle(j1, j5, j6) || !triangle(j4, j2, j6) ||
      !triangle(j4, j5, j3)) {
    return 0.0;
  }
  const int t1 = whole(j1 + j2 + j3);
  const int t2 = whole(j1 + j5 + j6);
  const int t3 = whole(j4 + j2 + j6);
  const int t4 = whole(j4 + j5 + j3);
  const int u1 = whole(j1 + j2 + j4 + j5);
  const int u2 = whole(j2 + j3 + j5 + j6);
  const int u3 = whole(j3 + j1 + j6 + j4);
  const int t_min = std::max({t1, t2, t3, t4});
  const int t_max = std::min({u1, u2, u3});

  cpp_rational sum = 0;
  for (int t = t_min; t <= t_max; ++t) {
    const cpp_int denom = factorial(t - t1) * factorial(t - t2) * factorial(t - t3) *
                          factorial(t - t4) * factorial(u1 - t) * factorial(u2 - t) *
                          factorial(u3 - t);
    const cpp_rational term(factorial(t + 1), denom);
    sum += (t % 2 == 0) ? term : cpp_rational(-term);
  }
  if (sum == 0) return 0.0;

  const cpp_rational prefactor = triangle_coefficient(j1, j2, j3) * triangle_coefficient(j1, j5, j6) *
                                 triangle_coefficient(j4, j2, j6) * triangle_coefficient(j4, j5, j3);
  return signed_root(sum < 0 ? -1 : 1, prefactor * sum * sum);
}

}  // namespace mdsr
