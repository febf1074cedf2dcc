#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace dimer {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;

/** \brief Neumaier compensated accumulator for long real sums. */
class compensated_sum {
 public:
  void add(double x) {
    double t = s_ + x;
    if (std::abs(s_) >= std::abs(x))
      c_ += (s_ - t) + x;
    else
      c_ += (x - t) + s_;
    s_ = t;
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

/**
 * \brief e^{2*pi*i*num/den} with exact values at quarter turns.
 *
 * The angle is reduced in integer arithmetic to [0, 1/4) plus a quadrant
 * count, so num/den = 0, 1/4, 1/2, 3/4 give exactly (1,0), (0,1), (-1,0),
 * (0,-1). Small residual angles keep full relative accuracy near the zeros
 * of the real and imaginary parts.
 */
inline cplx unit_root(std::int64_t num, std::int64_t den) {
  num %= den;
  if (num < 0) num += den;
  std::int64_t q = (4 * num) / den;        // quadrant 0..3
  std::int64_t r = 4 * num - q * den;      // 4*num = q*den + r, 0 <= r < den
  double phi = (pi / 2.0) * static_cast<double>(r) / static_cast<double>(den);
  double c = std::cos(phi), s = std::sin(phi);
  switch (q) {
    case 0: return {c, s};
    case 1: return {-s, c};
    case 2: return {-c, -s};
    default: return {s, -c};
  }
}

/** \brief z^k for integer k, z != 0 when k < 0. */
inline cplx ipow(cplx z, long k) {
  if (k < 0) return 1.0 / ipow(z, -k);
  cplx r = 1.0;
  while (k > 0) {
    if (k & 1) r *= z;
    z *= z;
    k >>= 1;
  }
  return r;
}

/** \brief The n roots of (-1)^{theta2}, i.e. e^{2*pi*i*(k + theta2/2)/n}. */
inline std::vector<cplx> sector_roots(int n, int theta2) {
  std::vector<cplx> w(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) w[static_cast<std::size_t>(k)] = unit_root(2 * k + theta2, 2 * n);
  return w;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

/** \brief splitmix64, used to derive independent per-batch RNG seeds. */
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace detail {

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/** \brief Adaptive Simpson on [a,b] to absolute tolerance tol. */
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int max_depth = 52) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/**
 * \brief Adaptive integral of f over [a,b] split at the given interior points.
 *
 * Splits isolate integrable near-singularities (log of a nearly vanishing
 * factor) at panel endpoints, where bisection converges quickly.
 */
inline double adaptive_integral(const std::function<double(double)>& f, double a, double b,
                                std::vector<double> splits, double tol) {
  splits.push_back(a);
  splits.push_back(b);
  std::sort(splits.begin(), splits.end());
  double total = 0.0;
  int panels = 0;
  for (std::size_t i = 0; i + 1 < splits.size(); ++i)
    if (splits[i] >= a && splits[i + 1] <= b && splits[i + 1] > splits[i]) ++panels;
  if (panels == 0) return 0.0;
  for (std::size_t i = 0; i + 1 < splits.size(); ++i) {
    double lo = splits[i], hi = splits[i + 1];
    if (lo < a || hi > b || hi <= lo) continue;
    total += adaptive_simpson(f, lo, hi, tol / panels);
  }
  return total;
}

}  // namespace dimer
