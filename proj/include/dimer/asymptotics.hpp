#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "dimer/errors.hpp"
#include "dimer/numeric.hpp"

namespace dimer {

/**
 * \brief |prod_{j=0}^{m-1} (1 + e^{2 pi i (j+theta1/2)/m} + z/m)|.
 *
 * Evaluated as exp of a compensated sum of log magnitudes. Returns exactly 0
 * when a factor vanishes; the root phases are computed with quarter-turn
 * exact reduction so the vanishing factor at z = 0, theta1 = 0, even m is
 * hit exactly.
 */
inline double finite_root_product(int m, int theta1, cplx z) {
  if (m < 1) throw std::invalid_argument("m must be positive");
  cplx shift = z / static_cast<double>(m);
  compensated_sum lm;
  for (int j = 0; j < m; ++j) {
    cplx f = 1.0 + unit_root(2 * j + theta1, 2 * m) + shift;
    double a = std::abs(f);
    if (a == 0.0) return 0.0;
    lm.add(std::log(a));
  }
  return std::exp(lm.value());
}

/** \brief Limit of the finite root product: |e^z - (-1)^{theta1}|. */
inline double root_product_limit(int theta1, cplx z) {
  return std::abs(std::exp(z) - (theta1 % 2 == 0 ? 1.0 : -1.0));
}

namespace detail {

inline double log_abs_clamped(cplx v) {
  double a = std::abs(v);
  return std::log(a < 1e-300 ? 1e-300 : a);
}

}  // namespace detail

/**
 * \brief Integral part of the log product: m * int_0^1 log|1 + e^{2 pi i phi} + z/m| dphi.
 *
 * The integrand dips sharply near phi = 1/2 where 1 + e^{2 pi i phi}
 * vanishes; the quadrature splits there. Absolute tolerance 1e-10 on the
 * integral.
 */
inline double product_log_integral(int m, cplx z) {
  cplx shift = z / static_cast<double>(m);
  auto f = [shift](double phi) {
    return detail::log_abs_clamped(1.0 + std::polar(1.0, 2.0 * pi * phi) + shift);
  };
  double integral = adaptive_integral(f, 0.0, 1.0, {0.25, 0.5, 0.75}, 1e-10);
  return m * integral;
}

/// max(Re z, 0): the limit of the integral part.
inline double product_log_integral_limit(cplx z) { return std::max(z.real(), 0.0); }

/**
 * \brief Sum-minus-integral part of the log product:
 *   sum_j [ log|f(j)| - int_{-1/2}^{1/2} log|f(j+u)| du ],
 * where f(t) = 1 + e^{2 pi i (t+theta1/2)/m} + z/m. Together with the
 * integral part this reconstructs log of the finite root product.
 */
inline double product_log_correction(int m, int theta1, cplx z) {
  cplx shift = z / static_cast<double>(m);
  double half = 0.5 * theta1;
  auto f = [&](double t) {
    return detail::log_abs_clamped(1.0 + std::polar(1.0, 2.0 * pi * (t + half) / m) + shift);
  };
  // f's factor nearly vanishes where (t + theta1/2)/m crosses 1/2.
  double tstar = 0.5 * m - half;
  compensated_sum total;
  double inner_tol = 1e-9 / m;
  for (int j = 0; j < m; ++j) {
    double lo = j - 0.5, hi = j + 0.5;
    std::vector<double> splits;
    if (tstar > lo && tstar < hi) splits.push_back(tstar);
    double integral = adaptive_integral(f, lo, hi, splits, inner_tol);
    total.add(f(static_cast<double>(j)) - integral);
  }
  return total.value();
}

namespace detail {

/// log|2 sin(pi (p + i q))|, stable for large q.
inline double log_abs_two_sin(double p, double q) {
  double b = 2.0 * pi * std::abs(q);
  if (b > 30.0)
    return pi * std::abs(q) + 0.5 * std::log1p(-2.0 * std::cos(2.0 * pi * p) * std::exp(-b) +
                                               std::exp(-2.0 * b));
  double v = 2.0 * (std::cosh(b) - std::cos(2.0 * pi * p));
  if (v <= 0.0) return -std::numeric_limits<double>::infinity();
  return 0.5 * std::log(v);
}

}  // namespace detail

/**
 * \brief Closed form of the lattice-sum defect: log|2 sin(pi(p + i q))| - pi q,
 * for q > 0 (1-periodic in p). Vanishes as q grows.
 */
inline double sum_integral_limit(double p, double q) {
  if (q <= 0.0) throw std::invalid_argument("q must be positive");
  return detail::log_abs_two_sin(p, q) - pi * q;
}

/**
 * \brief Series evaluation of the same defect:
 *   (1/2) sum_k [ log(1 + ((p+k)/q)^2) - int_{-1/2}^{1/2} log(1 + ((p+k+u)/q)^2) du ],
 * truncated at |k| <= kmax with an Euler-Maclaurin tail correction. The
 * inner integral has the exact antiderivative q [X log(1+X^2) - 2X + 2 atan X].
 */
inline double sum_integral_series(double p, double q, int kmax = 10000) {
  if (q <= 0.0) throw std::invalid_argument("q must be positive");
  auto g = [&](double u) {
    double r = (p + u) / q;
    return 0.5 * std::log1p(r * r);
  };
  auto anti = [](double x) { return x * std::log1p(x * x) - 2.0 * x + 2.0 * std::atan(x); };
  compensated_sum total;
  for (int k = -kmax; k <= kmax; ++k) {
    double xm = (p + k - 0.5) / q, xp = (p + k + 0.5) / q;
    double integral = 0.5 * q * (anti(xp) - anti(xm));
    total.add(g(static_cast<double>(k)) - integral);
  }
  auto gp = [&](double u) { return (p + u) / (q * q + (p + u) * (p + u)); };
  total.add((gp(static_cast<double>(kmax)) - gp(static_cast<double>(-kmax))) / 24.0);
  return total.value();
}

/**
 * \brief Limit of the correction term: with z = x + i y,
 *   C(theta1, z) = log|2 sin(pi theta1/2 + y/2 + i x/2)| - |x|/2,
 * the defect at p = theta1/2 + y/(2 pi), q = |x|/(2 pi).
 */
inline double correction_limit(int theta1, cplx z) {
  if (z.real() == 0.0) throw std::invalid_argument("Re z must be nonzero");
  double p = 0.5 * theta1 + z.imag() / (2.0 * pi);
  double q = std::abs(z.real()) / (2.0 * pi);
  return sum_integral_limit(p, q);
}

inline double correction_limit_series(int theta1, cplx z, int kmax = 10000) {
  if (z.real() == 0.0) throw std::invalid_argument("Re z must be nonzero");
  double p = 0.5 * theta1 + z.imag() / (2.0 * pi);
  double q = std::abs(z.real()) / (2.0 * pi);
  return sum_integral_series(p, q, kmax);
}

/**
 * \brief Partial Fourier sum: sum over j in {-n..n} of
 *   e^{2 pi i (j+offset) s} / (z + 2 pi i (j+offset)),
 * offset 0 or 1/2 (half-integer modes). Throws pole_error when a
 * denominator vanishes.
 */
inline cplx fourier_partial_sum(cplx z, double s, int n, bool half_offset = false) {
  double off = half_offset ? 0.5 : 0.0;
  compensated_sum re, im;
  for (int j = -n; j <= n; ++j) {
    double jo = j + off;
    cplx den = z + cplx(0.0, 2.0 * pi * jo);
    if (std::abs(den) < 1e-14) throw pole_error("z + 2 pi i j vanishes at j = " + std::to_string(jo));
    double turns = jo * s;
    turns -= std::floor(turns);
    cplx term = std::polar(1.0, 2.0 * pi * turns) / den;
    re.add(term.real());
    im.add(term.imag());
  }
  return {re.value(), im.value()};
}

/**
 * \brief Closed form of the full Fourier sum.
 *
 * Integer modes: e^{-z s}/(1 - e^{-z}) for s in (0,1) and the symmetric
 * value (1/2)(1 + e^{-z})/(1 - e^{-z}) at s = 0. Half-integer modes:
 * e^{-z s}/(1 + e^{-z}) for s in (0,1) and (1/2)(1 - e^{-z})/(1 + e^{-z})
 * at s = 0 (the boundary average of the antiperiodic extension).
 */
inline cplx fourier_sum_limit(cplx z, double s, bool half_offset = false) {
  if (s < 0.0 || s >= 1.0) throw std::invalid_argument("s must lie in [0, 1)");
  cplx ez = std::exp(-z);
  cplx den = half_offset ? 1.0 + ez : 1.0 - ez;
  if (std::abs(den) < 1e-14) throw pole_error("1 -/+ e^{-z} vanishes");
  if (s == 0.0) return 0.5 * (half_offset ? (1.0 - ez) : (1.0 + ez)) / den;
  return std::exp(-z * s) / den;
}

/**
 * \brief Finite inverse-kernel Fourier sum
 *   (-1)^{floor(s m)} (1/m) sum_{j=0}^{m-1}
 *       e^{-2 pi i (j+theta1/2) floor(s m)/m} / (1 + e^{2 pi i (j+theta1/2)/m} + z/m)
 * for even m and s in (-1, 1).
 */
inline cplx inverse_kernel_sum_finite(int m, int theta1, double s, cplx z) {
  if (m < 2 || m % 2 != 0) throw std::invalid_argument("m must be even and positive");
  if (s <= -1.0 || s >= 1.0) throw std::invalid_argument("s must lie in (-1, 1)");
  long k = static_cast<long>(std::floor(s * m));
  cplx shift = z / static_cast<double>(m);
  compensated_sum re, im;
  for (int j = 0; j < m; ++j) {
    cplx den = 1.0 + unit_root(2 * j + theta1, 2 * m) + shift;
    if (std::abs(den) < 1e-300)
      throw pole_error("vanishing denominator at mode j = " + std::to_string(j));
    cplx num = unit_root(-static_cast<std::int64_t>(2 * j + theta1) * k, 2 * m);
    cplx term = num / den;
    re.add(term.real());
    im.add(term.imag());
  }
  double sign = ((k % 2) + 2) % 2 == 0 ? 1.0 : -1.0;
  return sign / static_cast<double>(m) * cplx(re.value(), im.value());
}

/** \brief Variant with the mode exponent fixed to -1 and no leading sign. */
inline cplx inverse_kernel_sum_finite_delta(int m, int theta1, cplx z) {
  if (m < 2 || m % 2 != 0) throw std::invalid_argument("m must be even and positive");
  cplx shift = z / static_cast<double>(m);
  compensated_sum re, im;
  for (int j = 0; j < m; ++j) {
    cplx den = 1.0 + unit_root(2 * j + theta1, 2 * m) + shift;
    if (std::abs(den) < 1e-300)
      throw pole_error("vanishing denominator at mode j = " + std::to_string(j));
    cplx term = unit_root(2 * j + theta1, 2 * m) / den;
    re.add(term.real());
    im.add(term.imag());
  }
  return cplx(re.value(), im.value()) / static_cast<double>(m);
}

/**
 * \brief Large-m limit of the inverse-kernel sum:
 *   (-1)^{theta1 [s<0]} e^{-z(s + [s<0])} / (1 - (-1)^{theta1} e^{-z}).
 * Re z != 0 is required at s = 0.
 */
inline cplx inverse_kernel_sum_limit(int theta1, double s, cplx z) {
  if (s <= -1.0 || s >= 1.0) throw std::invalid_argument("s must lie in (-1, 1)");
  if (s == 0.0 && z.real() == 0.0) throw std::invalid_argument("s = 0 requires Re z != 0");
  double pm = theta1 % 2 == 0 ? 1.0 : -1.0;
  cplx den = 1.0 - pm * std::exp(-z);
  if (std::abs(den) < 1e-14) throw pole_error("1 - (-1)^{theta1} e^{-z} vanishes");
  if (s < 0.0) return pm * std::exp(-z * (s + 1.0)) / den;
  return std::exp(-z * s) / den;
}

/**
 * \brief Limit of the exponent -1 variant: (-1)^{theta1+1} e^{-z} / (1 - (-1)^{theta1} e^{-z}),
 * for Re z != 0.
 */
inline cplx inverse_kernel_sum_limit_delta(int theta1, cplx z) {
  if (z.real() == 0.0) throw std::invalid_argument("the shifted variant requires Re z != 0");
  double pm = theta1 % 2 == 0 ? 1.0 : -1.0;
  cplx den = 1.0 - pm * std::exp(-z);
  if (std::abs(den) < 1e-14) throw pole_error("1 - (-1)^{theta1} e^{-z} vanishes");
  return -pm * std::exp(-z) / den;
}

/** \brief One row of a finite-size versus limit comparison. */
struct sweep_row {
  long m = 0;
  cplx finite;
  cplx limit;
  double abs_err = 0.0;
  double rel_err = 0.0;
};

struct sweep_result {
  std::vector<sweep_row> rows;
  bool errors_nonincreasing = true;   // every step
  bool endpoint_decreased = true;     // last error below first
};

inline sweep_result make_sweep(const std::function<cplx(long)>& finite_eval, cplx limit,
                               const std::vector<long>& ms) {
  sweep_result r;
  for (long m : ms) {
    sweep_row row;
    row.m = m;
    row.finite = finite_eval(m);
    row.limit = limit;
    row.abs_err = std::abs(row.finite - limit);
    double scale = std::abs(limit);
    row.rel_err = scale > 0 ? row.abs_err / scale : row.abs_err;
    r.rows.push_back(row);
  }
  for (std::size_t i = 1; i < r.rows.size(); ++i)
    if (r.rows[i].rel_err > r.rows[i - 1].rel_err * (1.0 + 1e-12)) r.errors_nonincreasing = false;
  if (r.rows.size() >= 2 && r.rows.back().rel_err >= r.rows.front().rel_err)
    r.endpoint_decreased = false;
  return r;
}

}  // namespace dimer
