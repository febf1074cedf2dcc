#pragma once

#include <cmath>
#include <complex>
#include <limits>

#include "dimer/numeric.hpp"

namespace dimer {

/**
 * \brief A nonzero complex number stored as log-magnitude plus phase.
 *
 * Products of thousands of factors (sector determinants, Fourier products)
 * overflow double range well before their ratios or signed sums become
 * meaningless; keeping log|z| and arg(z) separately makes those products
 * exact up to rounding. Zero is represented by log_mag = -inf.
 */
class log_complex {
 public:
  log_complex() : log_mag_(-std::numeric_limits<double>::infinity()), phase_(0.0) {}
  log_complex(double log_mag, double phase) : log_mag_(log_mag), phase_(wrap(phase)) {}

  static log_complex from(cplx z) {
    double a = std::abs(z);
    if (a == 0.0) return log_complex();
    return log_complex(std::log(a), std::arg(z));
  }
  static log_complex one() { return log_complex(0.0, 0.0); }
  static log_complex real(double x) {
    if (x == 0.0) return log_complex();
    return log_complex(std::log(std::abs(x)), x > 0 ? 0.0 : pi);
  }

  bool is_zero() const { return std::isinf(log_mag_) && log_mag_ < 0; }
  double log_mag() const { return log_mag_; }
  /// Phase in (-pi, pi].
  double phase() const { return phase_; }

  /// Value as an ordinary complex number; overflows to inf past double range.
  cplx value() const {
    if (is_zero()) return {0.0, 0.0};
    return std::exp(log_mag_) * cplx(std::cos(phase_), std::sin(phase_));
  }

  log_complex& operator*=(const log_complex& o) {
    if (is_zero() || o.is_zero()) {
      *this = log_complex();
    } else {
      log_mag_ += o.log_mag_;
      phase_ = wrap(phase_ + o.phase_);
    }
    return *this;
  }
  log_complex& operator*=(cplx z) { return *this *= from(z); }
  log_complex& operator/=(const log_complex& o) {
    log_mag_ -= o.log_mag_;
    phase_ = wrap(phase_ - o.phase_);
    return *this;
  }

  friend log_complex operator*(log_complex a, const log_complex& b) { return a *= b; }
  friend log_complex operator/(log_complex a, const log_complex& b) { return a /= b; }

  /// Sum, evaluated by factoring out the larger magnitude. Exact zero when
  /// both terms are zero.
  friend log_complex operator+(const log_complex& a, const log_complex& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const log_complex& big = a.log_mag_ >= b.log_mag_ ? a : b;
    const log_complex& small = a.log_mag_ >= b.log_mag_ ? b : a;
    cplx rest = 1.0 + std::exp(small.log_mag_ - big.log_mag_) *
                          cplx(std::cos(small.phase_ - big.phase_),
                               std::sin(small.phase_ - big.phase_));
    return big * from(rest);
  }

 private:
  static double wrap(double p) {
    while (p > pi) p -= 2.0 * pi;
    while (p <= -pi) p += 2.0 * pi;
    return p;
  }
  double log_mag_;
  double phase_;
};

}  // namespace dimer
