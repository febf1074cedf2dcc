#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "dimer/kasteleyn.hpp"
#include "dimer/matrix.hpp"
#include "dimer/torus.hpp"

namespace dimer {

/** \brief The event "site x is assigned this move label". */
struct edge_event {
  site x;
  move mv = move::stay;
};

/// Boundary wrap counts (g1, g2) of an event list: step1 events with
/// x1 = m1-1 and step2 events with x2 = m2-1. On degenerate tori every
/// step1 (m1 = 1) or step2 (m2 = 1) event wraps.
inline std::array<int, 2> event_wrap_counts(torus_shape shape, const std::vector<edge_event>& ev) {
  std::array<int, 2> g{0, 0};
  for (const edge_event& e : ev) {
    if (e.mv == move::stay) continue;
    if (shape.wraps(e.x, e.mv)) g[e.mv == move::step1 ? 0 : 1] += 1;
  }
  return g;
}

inline void require_distinct_sites(torus_shape shape, const std::vector<edge_event>& ev) {
  for (std::size_t i = 0; i < ev.size(); ++i)
    for (std::size_t j = i + 1; j < ev.size(); ++j)
      if (shape.index(ev[i].x) == shape.index(ev[j].x))
        throw std::invalid_argument("event sites must be pairwise distinct");
}

/** \brief Sector inverse with residual check and conditioning warning. */
inline inverse_result kasteleyn_inverse(const weight_field& a, theta th) {
  inverse_result r = invert(kasteleyn_matrix(a, th));
  if (r.residual > 1e-9)
    throw singular_matrix_error("inverse residual " + std::to_string(r.residual) +
                                " exceeds 1e-9; sector determinant too close to zero");
  return r;
}

/**
 * \brief Constant-weight inverse entry by Fourier sum.
 *
 * Depends on the integer displacement y - x only:
 *   (1/(m1 m2)) sum_j e^{-2 pi i [(j1+t1/2)(y1-x1)/m1 + (j2+t2/2)(y2-x2)/m2]}
 *               / eigenvalue(j).
 * In an antiperiodic direction the entry flips sign under dx -> dx + m, so
 * pass the raw difference of coordinates, not its nonnegative residue.
 * Throws pole_error naming the mode when an eigenvalue vanishes.
 */
inline cplx translation_inverse_entry(torus_shape shape, site_weights w, theta th, int dx1,
                                      int dx2) {
  cplx sum = 0.0;
  double scale = std::abs(w.alpha) + std::abs(w.beta) + std::abs(w.gamma);
  for (int j2 = 0; j2 < shape.m2; ++j2)
    for (int j1 = 0; j1 < shape.m1; ++j1) {
      cplx ev = sector_eigenvalue(shape, w, th, j1, j2);
      if (std::abs(ev) <= 1e-14 * scale)
        throw pole_error("vanishing eigenvalue at mode (" + std::to_string(j1) + "," +
                         std::to_string(j2) + ")");
      cplx phase = unit_root(-static_cast<std::int64_t>(2 * j1 + th.t1) * dx1, 2 * shape.m1) *
                   unit_root(-static_cast<std::int64_t>(2 * j2 + th.t2) * dx2, 2 * shape.m2);
      sum += phase / ev;
    }
  return sum / static_cast<double>(shape.sites());
}

inline cplx kasteleyn_inverse_constant(torus_shape shape, site_weights w, theta th, site x,
                                       site y) {
  return translation_inverse_entry(shape, w, th, y.x1 - x.x1, y.x2 - x.x2);
}

/** \brief Sector weights mu_theta = sector value / partition function. */
struct sector_weight_set {
  std::array<cplx, 4> mu;  // indexed by sector_index
  cplx total;              // partition function

  cplx at(theta th) const { return mu[static_cast<std::size_t>(sector_index(th))]; }
};

inline sector_weight_set sector_weights(const weight_field& a) {
  std::array<log_complex, 4> zs;
  log_complex total;
  double top = -std::numeric_limits<double>::infinity();
  for (theta th : all_sectors) {
    const log_complex& z = zs[static_cast<std::size_t>(sector_index(th))] = sector_partition_log(a, th);
    total = total + z;
    if (!z.is_zero()) top = std::max(top, z.log_mag());
  }
  // A total below 1e-14 of the largest sector is cancellation residue, not a
  // partition function; dividing by it would produce meaningless weights.
  if (total.is_zero() || total.log_mag() < top + std::log(1e-14))
    throw zero_partition_error("partition function vanishes");
  sector_weight_set s;
  s.total = total.value();
  for (int i = 0; i < 4; ++i) s.mu[static_cast<std::size_t>(i)] = (zs[static_cast<std::size_t>(i)] / total).value();
  return s;
}

namespace detail {

inline cplx event_minor_det(const cmatrix& kinv, torus_shape shape,
                            const std::vector<edge_event>& ev) {
  int p = static_cast<int>(ev.size());
  cmatrix m(p);
  for (int i = 0; i < p; ++i) {
    site yi = shape.step(ev[static_cast<std::size_t>(i)].x, ev[static_cast<std::size_t>(i)].mv);
    for (int j = 0; j < p; ++j)
      m(i, j) = kinv(shape.index(yi), shape.index(ev[static_cast<std::size_t>(j)].x));
  }
  return p == 0 ? cplx(1.0, 0.0) : det(m);
}

inline cplx event_weight_product(const weight_field& a, const std::vector<edge_event>& ev) {
  cplx w = 1.0;
  for (const edge_event& e : ev) w *= a.move_weight(e.x, e.mv);
  return w;
}

}  // namespace detail

/**
 * \brief Probability of a joint move-label event under one sector measure:
 *   (-1)^{t1 g1 + t2 g2} * prod_i weight(x_i, move_i)
 *       * det[ Kinv(y_i, x_j) ]_{i,j}
 * with y_i the move target of x_i. The empty event has probability 1.
 */
inline cplx sector_edge_probability(const weight_field& a, theta th,
                                    const std::vector<edge_event>& ev) {
  require_distinct_sites(a.shape, ev);
  if (ev.empty()) return 1.0;
  cmatrix kinv = kasteleyn_inverse(a, th).inv;
  std::array<int, 2> g = event_wrap_counts(a.shape, ev);
  double sign = (th.t1 * g[0] + th.t2 * g[1]) % 2 == 0 ? 1.0 : -1.0;
  return sign * detail::event_weight_product(a, ev) * detail::event_minor_det(kinv, a.shape, ev);
}

/** \brief Event probability under the full measure: sector mixture with mu weights. */
inline cplx edge_probability(const weight_field& a, const std::vector<edge_event>& ev) {
  require_distinct_sites(a.shape, ev);
  if (ev.empty()) return 1.0;
  sector_weight_set mu = sector_weights(a);
  cplx total = 0.0;
  for (theta th : all_sectors) {
    cmatrix kinv = kasteleyn_inverse(a, th).inv;
    std::array<int, 2> g = event_wrap_counts(a.shape, ev);
    double sign = (th.t1 * g[0] + th.t2 * g[1]) % 2 == 0 ? 1.0 : -1.0;
    total += mu.at(th) * sign * detail::event_minor_det(kinv, a.shape, ev);
  }
  return detail::event_weight_product(a, ev) * total;
}

/** \brief Oracle: event probability by exhaustive enumeration. */
inline cplx edge_probability_by_enumeration(const weight_field& a,
                                            const std::vector<edge_event>& ev) {
  require_distinct_sites(a.shape, ev);
  cplx hit = 0.0, total = 0.0;
  for (const matching& m : enumerate_matchings(a.shape)) {
    cplx w = weight_of_matching(a, m);
    total += w;
    bool all = true;
    for (const edge_event& e : ev)
      if (m.at(e.x) != e.mv) {
        all = false;
        break;
      }
    if (all) hit += w;
  }
  if (total == cplx(0.0, 0.0)) throw zero_partition_error("partition function vanishes");
  return hit / total;
}

}  // namespace dimer
