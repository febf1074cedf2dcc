#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "dimer/logcomplex.hpp"
#include "dimer/matrix.hpp"
#include "dimer/numeric.hpp"
#include "dimer/torus.hpp"

namespace dimer {

/// Boundary-condition sector. The four sectors flip the sign of matrix
/// entries whose move exits through the corresponding periodic boundary.
struct theta {
  int t1 = 0;
  int t2 = 0;
  friend bool operator==(const theta&, const theta&) = default;
};

inline constexpr std::array<theta, 4> all_sectors{{{0, 0}, {1, 0}, {0, 1}, {1, 1}}};
inline int sector_index(theta th) { return th.t1 + 2 * th.t2; }

/** \brief Per-site weight triple (stay, step1, step2). */
struct site_weights {
  cplx alpha{1.0, 0.0};
  cplx beta{1.0, 0.0};
  cplx gamma{1.0, 0.0};
};

/** \brief Weight field over a torus, one triple per site. */
struct weight_field {
  torus_shape shape;
  std::vector<site_weights> w;  // indexed by shape.index

  weight_field() = default;
  explicit weight_field(torus_shape s) : shape(s), w(static_cast<std::size_t>(s.sites())) {}
  weight_field(torus_shape s, site_weights constant)
      : shape(s), w(static_cast<std::size_t>(s.sites()), constant) {}

  const site_weights& at(site x) const { return w[static_cast<std::size_t>(shape.index(x))]; }
  site_weights& at(site x) { return w[static_cast<std::size_t>(shape.index(x))]; }

  cplx move_weight(site x, move m) const {
    const site_weights& sw = at(x);
    return m == move::stay ? sw.alpha : (m == move::step1 ? sw.beta : sw.gamma);
  }
};

inline cplx weight_of_matching(const weight_field& a, const matching& m) {
  cplx w = 1.0;
  for (int i = 0; i < a.shape.sites(); ++i)
    w *= a.move_weight(a.shape.at(i), m.moves[static_cast<std::size_t>(i)]);
  return w;
}

/**
 * \brief The weighted adjacency operator: row x holds the stay weight at x,
 * the step1 weight at the step1 target, the step2 weight at the step2
 * target. On degenerate tori coinciding targets accumulate.
 */
inline cmatrix weight_matrix(const weight_field& a) {
  int n = a.shape.sites();
  cmatrix m(n);
  for (int i = 0; i < n; ++i) {
    site x = a.shape.at(i);
    const site_weights& sw = a.at(x);
    m(i, a.shape.index(x)) += sw.alpha;
    m(i, a.shape.index(a.shape.step(x, move::step1))) += sw.beta;
    m(i, a.shape.index(a.shape.step(x, move::step2))) += sw.gamma;
  }
  return m;
}

/**
 * \brief Sector-signed operator: each move contribution picks up a factor
 * (-1)^{theta_i} when it exits through boundary i. The sign is applied per
 * contribution, so on degenerate tori a wrapping step keeps its sign even
 * when its target coincides with the stay target.
 */
inline cmatrix kasteleyn_matrix(const weight_field& a, theta th) {
  int n = a.shape.sites();
  cmatrix m(n);
  for (int i = 0; i < n; ++i) {
    site x = a.shape.at(i);
    const site_weights& sw = a.at(x);
    m(i, a.shape.index(x)) += sw.alpha;
    double s1 = (th.t1 == 1 && a.shape.wraps(x, move::step1)) ? -1.0 : 1.0;
    m(i, a.shape.index(a.shape.step(x, move::step1))) += s1 * sw.beta;
    double s2 = (th.t2 == 1 && a.shape.wraps(x, move::step2)) ? -1.0 : 1.0;
    m(i, a.shape.index(a.shape.step(x, move::step2))) += s2 * sw.gamma;
  }
  return m;
}

/// Sign in front of the sector determinant: (-1)^{(theta1+m1+1)(theta2+m2+1)}.
inline double sector_prefactor(torus_shape shape, theta th) {
  long e = static_cast<long>(th.t1 + shape.m1 + 1) * (th.t2 + shape.m2 + 1);
  return e % 2 == 0 ? 1.0 : -1.0;
}

/** \brief One sector's signed half-determinant, in log form. */
inline log_complex sector_partition_log(const weight_field& a, theta th) {
  log_complex d = det_log(kasteleyn_matrix(a, th));
  return d * log_complex::real(0.5 * sector_prefactor(a.shape, th));
}

inline cplx sector_partition(const weight_field& a, theta th) {
  return sector_partition_log(a, th).value();
}

/** \brief Partition function as the sum of the four sector values. */
inline log_complex partition_log(const weight_field& a) {
  log_complex z;
  for (theta th : all_sectors) z = z + sector_partition_log(a, th);
  return z;
}

inline cplx partition(const weight_field& a) { return partition_log(a).value(); }

/** \brief Partition function by exhaustive enumeration (small shapes only). */
inline cplx partition_by_enumeration(const weight_field& a) {
  cplx total = 0.0;
  for (const matching& m : enumerate_matchings(a.shape)) total += weight_of_matching(a, m);
  return total;
}

/// Constant-weight sector eigenvalue at mode (j1, j2):
///   alpha + beta e^{2 pi i (j1+theta1/2)/m1} + gamma e^{2 pi i (j2+theta2/2)/m2}.
inline cplx sector_eigenvalue(torus_shape shape, site_weights w, theta th, int j1, int j2) {
  return w.alpha + w.beta * unit_root(2 * j1 + th.t1, 2 * shape.m1) +
         w.gamma * unit_root(2 * j2 + th.t2, 2 * shape.m2);
}

/** \brief Sector value for constant weights via the eigenvalue product. */
inline log_complex sector_partition_constant_log(torus_shape shape, site_weights w, theta th) {
  log_complex prod = log_complex::one();
  compensated_sum lm;
  double ph = 0.0;
  for (int j2 = 0; j2 < shape.m2; ++j2)
    for (int j1 = 0; j1 < shape.m1; ++j1) {
      cplx ev = sector_eigenvalue(shape, w, th, j1, j2);
      double a = std::abs(ev);
      if (a == 0.0) return log_complex();
      lm.add(std::log(a));
      ph += std::arg(ev);
      if (ph > pi) ph -= 2.0 * pi;
      if (ph <= -pi) ph += 2.0 * pi;
    }
  prod = log_complex(lm.value(), ph);
  return prod * log_complex::real(0.5 * sector_prefactor(shape, th));
}

inline log_complex partition_constant_log(torus_shape shape, site_weights w) {
  log_complex z;
  for (theta th : all_sectors) z = z + sector_partition_constant_log(shape, w, th);
  return z;
}

inline cplx partition_constant(torus_shape shape, site_weights w) {
  return partition_constant_log(shape, w).value();
}

/// Triangle test (non-strict) for a positive real weight triple.
inline bool satisfies_triangle(double alpha, double beta, double gamma) {
  return alpha > 0 && beta > 0 && gamma > 0 && alpha <= beta + gamma && beta <= gamma + alpha &&
         gamma <= alpha + beta;
}

/**
 * \brief Check that a constant real sector determinant has the predicted sign.
 *
 * For positive real weights obeying the triangle inequalities the sector
 * determinant is real with sign (-1)^{(theta1+m1+1)(theta2+m2+1)}. Evaluated
 * through the eigenvalue product in log form; a zero determinant or a
 * non-real phase fails the check.
 */
inline bool sector_sign_matches(torus_shape shape, double alpha, double beta, double gamma,
                                theta th) {
  if (!satisfies_triangle(alpha, beta, gamma))
    throw std::invalid_argument("weights must be positive and satisfy the triangle inequalities");
  log_complex prod = log_complex::one();
  for (int j2 = 0; j2 < shape.m2; ++j2)
    for (int j1 = 0; j1 < shape.m1; ++j1)
      prod *= sector_eigenvalue(shape, {alpha, beta, gamma}, th, j1, j2);
  if (prod.is_zero()) return false;
  double ph = std::abs(prod.phase());
  bool negative;
  if (ph < 1e-8)
    negative = false;
  else if (std::abs(ph - pi) < 1e-8)
    negative = true;
  else
    return false;  // determinant of a real matrix should have real phase
  return (sector_prefactor(shape, th) < 0) == negative;
}

}  // namespace dimer
