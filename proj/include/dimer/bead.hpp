#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "dimer/asymptotics.hpp"
#include "dimer/correlations.hpp"
#include "dimer/errors.hpp"
#include "dimer/kasteleyn.hpp"
#include "dimer/numeric.hpp"

namespace dimer {

/** \brief A bead: a time t in [0,1) on string h in Z_n. */
struct bead_point {
  double t = 0.0;
  int h = 0;
};

/// Sign in front of a continuum sector product: (-1)^{(theta1+1)(theta2+n+1)}.
inline double continuum_sector_prefactor(int n, theta th) {
  long e = static_cast<long>(th.t1 + 1) * (th.t2 + n + 1);
  return e % 2 == 0 ? 1.0 : -1.0;
}

/** \brief One sector of the continuum partition function:
 *   (1/2) (-1)^{(theta1+1)(theta2+n+1)} prod_{w^n = (-1)^{theta2}} (e^{Tw} - (-1)^{theta1} e^{-lambda}).
 */
inline cplx bead_partition_sector(int n, double lambda, double temp, theta th) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  double pm = th.t1 % 2 == 0 ? 1.0 : -1.0;
  cplx prod = 1.0;
  for (const cplx& w : sector_roots(n, th.t2)) prod *= std::exp(temp * w) - pm * std::exp(-lambda);
  return 0.5 * continuum_sector_prefactor(n, th) * prod;
}

/** \brief Continuum partition function: sum of the four sector values. */
inline cplx bead_partition(int n, double lambda, double temp) {
  cplx z = 0.0;
  for (theta th : all_sectors) z += bead_partition_sector(n, lambda, temp, th);
  return z;
}

/** \brief Sector weights Z_theta / Z of the continuum model. */
inline std::array<cplx, 4> bead_sector_weights(int n, double lambda, double temp) {
  cplx z = bead_partition(n, lambda, temp);
  if (std::abs(z) == 0.0) throw zero_partition_error("continuum partition function vanishes");
  std::array<cplx, 4> mu;
  for (theta th : all_sectors)
    mu[static_cast<std::size_t>(sector_index(th))] = bead_partition_sector(n, lambda, temp, th) / z;
  return mu;
}

/**
 * \brief Configuration volumes from the partition function's double series.
 *
 * Expands each sector product as a truncated power series in the
 * temperature (orders 0..n*kmax) with polynomial coefficients in
 * u = e^{-lambda} (degrees 0..n). Only temperature powers that are
 * multiples of n survive; vol[k][l] is (nk)! times the coefficient of
 * T^{nk} u^l. Residual imaginary parts and off-grid powers are asserted
 * below 1e-10 and discarded; volumes below -1e-9 raise an error.
 */
struct bead_volume_series {
  int n = 0;
  int kmax = 0;
  std::vector<std::vector<double>> vol;  // vol[k][l], k <= kmax, l <= n

  double at(int k, int l) const { return vol[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)]; }
};

inline bead_volume_series bead_partition_series(int n, int kmax) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (kmax < 0 || kmax > 6) throw std::invalid_argument("kmax must lie in 0..6");
  int rmax = n * kmax;
  auto idx = [&](int r, int l) { return static_cast<std::size_t>(r) * (n + 1) + l; };
  std::vector<cplx> total(static_cast<std::size_t>((rmax + 1) * (n + 1)), cplx(0.0, 0.0));

  for (theta th : all_sectors) {
    double pm = th.t1 % 2 == 0 ? 1.0 : -1.0;
    std::vector<cplx> poly(static_cast<std::size_t>((rmax + 1) * (n + 1)), cplx(0.0, 0.0));
    poly[idx(0, 0)] = 1.0;
    int used_l = 0;
    for (const cplx& w : sector_roots(n, th.t2)) {
      // factor = sum_r T^r w^r / r!  -  (-1)^{theta1} u
      std::vector<cplx> next(static_cast<std::size_t>((rmax + 1) * (n + 1)), cplx(0.0, 0.0));
      cplx wr = 1.0;
      std::vector<cplx> wpow(static_cast<std::size_t>(rmax + 1));
      for (int r = 0; r <= rmax; ++r) {
        wpow[static_cast<std::size_t>(r)] = wr / factorial(r);
        wr *= w;
      }
      for (int r = 0; r <= rmax; ++r)
        for (int l = 0; l <= used_l; ++l) {
          cplx c = poly[idx(r, l)];
          if (c == cplx(0.0, 0.0)) continue;
          for (int dr = 0; r + dr <= rmax; ++dr) next[idx(r + dr, l)] += c * wpow[static_cast<std::size_t>(dr)];
          next[idx(r, l + 1)] -= pm * c;
        }
      ++used_l;
      poly.swap(next);
    }
    double sign = 0.5 * continuum_sector_prefactor(n, th);
    for (std::size_t i = 0; i < poly.size(); ++i) total[i] += sign * poly[i];
  }

  bead_volume_series s;
  s.n = n;
  s.kmax = kmax;
  s.vol.assign(static_cast<std::size_t>(kmax + 1), std::vector<double>(static_cast<std::size_t>(n + 1), 0.0));
  for (int r = 0; r <= rmax; ++r)
    for (int l = 0; l <= n; ++l) {
      cplx c = total[idx(r, l)];
      if (std::abs(c.imag()) > 1e-10)
        throw std::logic_error("series coefficient has imaginary residue above 1e-10");
      if (r % n != 0) {
        if (std::abs(c) > 1e-10)
          throw std::logic_error("temperature power not a multiple of n fails to cancel");
        continue;
      }
      double v = c.real() * factorial(r);
      // Rounding residue in the convolution is amplified by r! here, so the
      // negativity check must scale with it; genuine sign errors are far larger.
      if (v < -std::max(1e-9, 1e-12 * factorial(r)))
        throw std::logic_error("negative configuration volume");
      s.vol[static_cast<std::size_t>(r / n)][static_cast<std::size_t>(l)] = v;
    }
  return s;
}

/**
 * \brief Cyclic interlacing test between neighbouring strings.
 *
 * Requires every string to carry the same count k >= 1 of beads, pairwise
 * distinct in time per string. For each pair of neighbouring strings
 * (h, h+1 mod n) with sorted times t (lower) and t' (upper), one of
 *   t_1 <= t'_1 < t_2 <= t'_2 < ... < t_k <= t'_k
 *   t'_1 < t_1 <= t'_2 < t_2 <= ... <= t'_k < t_k
 * must hold. Returns (k, occupation count l) for valid configurations.
 */
inline std::optional<std::pair<int, int>> interlace_check(int n, const std::vector<bead_point>& pts);

/**
 * \brief Occupation structure of a valid bead configuration.
 *
 * Each bead occupies the string above its own, from its time to the next
 * bead time on that upper string (cyclically). The number of occupied
 * strings is the same at every non-bead time; that count is l.
 */
struct occupation_profile {
  int ell = 0;
  // Per string: cyclic occupied intervals [lo, hi) with lo, hi in [0,1);
  // lo == hi means the whole string (a bead directly below the only bead above).
  struct interval {
    double lo, hi;
    int string;
  };
  std::vector<interval> intervals;
};

namespace detail {

inline bool in_cyclic(double t, double lo, double hi) {
  if (lo == hi) return true;  // full circle
  if (lo < hi) return t >= lo && t < hi;
  return t >= lo || t < hi;
}

inline std::vector<std::vector<double>> strings_sorted(int n, const std::vector<bead_point>& pts) {
  std::vector<std::vector<double>> per(static_cast<std::size_t>(n));
  for (const bead_point& p : pts) {
    if (p.h < 0 || p.h >= n) throw std::invalid_argument("string index out of range");
    if (p.t < 0.0 || p.t >= 1.0) throw std::invalid_argument("bead time must lie in [0,1)");
    per[static_cast<std::size_t>(p.h)].push_back(p.t);
  }
  for (auto& v : per) std::sort(v.begin(), v.end());
  return per;
}

}  // namespace detail

inline occupation_profile occupation_from_beads(int n, const std::vector<bead_point>& pts) {
  if (pts.empty()) throw invalid_config_error("occupation needs at least one bead");
  auto per = detail::strings_sorted(n, pts);
  occupation_profile prof;
  for (int h = 0; h < n; ++h) {
    const auto& lower = per[static_cast<std::size_t>(h)];
    const auto& upper = per[static_cast<std::size_t>((h + 1) % n)];
    if (upper.empty() && !lower.empty())
      throw invalid_config_error("bead with no bead on the string above");
    for (double t : lower) {
      // Release at the first bead on the string above strictly after t,
      // wrapping a full period when none (so a lone bead above itself,
      // n = 1, keeps its string occupied for all time).
      auto it = std::upper_bound(upper.begin(), upper.end(), t);
      double tnext = it == upper.end() ? upper.front() : *it;
      prof.intervals.push_back({t, tnext, (h + 1) % n});
    }
  }
  // The occupied-string count must be constant between bead times.
  std::vector<double> times;
  for (const bead_point& p : pts) times.push_back(p.t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  int ell = -1;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double a = times[i];
    double b = i + 1 < times.size() ? times[i + 1] : times[0] + 1.0;
    double mid = 0.5 * (a + b);
    if (mid >= 1.0) mid -= 1.0;
    std::vector<bool> occ(static_cast<std::size_t>(n), false);
    for (const auto& iv : prof.intervals)
      if (detail::in_cyclic(mid, iv.lo, iv.hi)) occ[static_cast<std::size_t>(iv.string)] = true;
    int count = static_cast<int>(std::count(occ.begin(), occ.end(), true));
    if (ell == -1)
      ell = count;
    else if (ell != count)
      throw invalid_config_error("occupied-string count is not constant in time");
  }
  prof.ell = ell;
  return prof;
}

inline std::optional<std::pair<int, int>> interlace_check(int n, const std::vector<bead_point>& pts) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (pts.empty()) return std::nullopt;
  auto per = detail::strings_sorted(n, pts);
  std::size_t k = per[0].size();
  for (const auto& v : per)
    if (v.size() != k || k == 0) return std::nullopt;
  for (const auto& v : per)
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
      if (v[i] == v[i + 1]) return std::nullopt;  // coincident beads on one string
  for (int h = 0; h < n; ++h) {
    const auto& t = per[static_cast<std::size_t>(h)];
    const auto& u = per[static_cast<std::size_t>((h + 1) % n)];
    bool a = true, b = true;
    for (std::size_t i = 0; i < k; ++i) {
      if (!(t[i] <= u[i])) a = false;
      if (i + 1 < k && !(u[i] < t[i + 1])) a = false;
      if (!(u[i] < t[i])) b = false;
      if (i + 1 < k && !(t[i] <= u[i + 1])) b = false;
    }
    if (!a && !b) return std::nullopt;
  }
  occupation_profile prof;
  try {
    prof = occupation_from_beads(n, pts);
  } catch (const invalid_config_error&) {
    return std::nullopt;
  }
  return std::make_pair(static_cast<int>(k), prof.ell);
}

/** \brief Sector-signed configuration weight:
 *   (1/2) (-1)^{(theta1+k+1)(theta2+n+l+1)} e^{-lambda l}
 * for a valid (n,k,l) configuration, else 0.
 */
inline double sector_config_weight(int n, double lambda, theta th,
                                   const std::vector<bead_point>& pts) {
  auto kl = interlace_check(n, pts);
  if (!kl) return 0.0;
  long e = static_cast<long>(th.t1 + kl->first + 1) * (th.t2 + n + kl->second + 1);
  return 0.5 * (e % 2 == 0 ? 1.0 : -1.0) * std::exp(-lambda * kl->second);
}

/** \brief Unsigned configuration weight e^{-lambda l}, or 0 when invalid. */
inline double config_weight(int n, double lambda, const std::vector<bead_point>& pts) {
  auto kl = interlace_check(n, pts);
  return kl ? std::exp(-lambda * kl->second) : 0.0;
}

/** \brief Monte Carlo estimate of the configuration volumes for one (n, k). */
struct volume_estimate {
  int n = 0;
  int k = 0;
  long samples = 0;
  std::vector<double> value;      // per l in 0..n
  std::vector<double> std_error;  // binomial standard error, same scale
};

/**
 * \brief Estimates vol[k][l] as n^{nk} times the probability that nk
 * uniform labeled points on the semi-discrete torus form a valid (n,k,l)
 * configuration.
 *
 * Sampling runs in batches of 1e5 with batch seeds derived from the given
 * seed by splitmix64, so results are byte-identical for a fixed seed
 * regardless of thread count.
 */
inline volume_estimate bead_volume_mc(int n, int k, long samples, std::uint64_t seed,
                                      int threads = 1) {
  if (n < 1 || k < 1) throw std::invalid_argument("n and k must be positive");
  if (samples < 1) throw std::invalid_argument("sample count must be positive");
  const long batch_size = 100000;
  long batches = (samples + batch_size - 1) / batch_size;
  std::vector<std::vector<long>> counts(static_cast<std::size_t>(batches),
                                        std::vector<long>(static_cast<std::size_t>(n + 1), 0));

  auto run_batch = [&](long b) {
    std::mt19937_64 rng(splitmix64(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(b)));
    long lo = b * batch_size;
    long hi = std::min(samples, lo + batch_size);
    int npts = n * k;
    std::vector<bead_point> pts(static_cast<std::size_t>(npts));
    std::vector<int> per_string(static_cast<std::size_t>(n));
    for (long s = lo; s < hi; ++s) {
      std::fill(per_string.begin(), per_string.end(), 0);
      bool overfull = false;
      for (int i = 0; i < npts; ++i) {
        double u1 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        int h = std::min(n - 1, static_cast<int>(u1 * n));
        pts[static_cast<std::size_t>(i)] = {u2, h};
        if (++per_string[static_cast<std::size_t>(h)] > k) overfull = true;
      }
      if (overfull) continue;
      auto kl = interlace_check(n, pts);
      if (kl && kl->first == k) counts[static_cast<std::size_t>(b)][static_cast<std::size_t>(kl->second)] += 1;
    }
  };

  if (threads <= 1) {
    for (long b = 0; b < batches; ++b) run_batch(b);
  } else {
    std::vector<std::thread> pool;
    std::atomic<long> next{0};
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (long b = next.fetch_add(1); b < batches; b = next.fetch_add(1)) run_batch(b);
      });
    for (auto& th : pool) th.join();
  }

  volume_estimate est;
  est.n = n;
  est.k = k;
  est.samples = samples;
  est.value.assign(static_cast<std::size_t>(n + 1), 0.0);
  est.std_error.assign(static_cast<std::size_t>(n + 1), 0.0);
  double scale = std::pow(static_cast<double>(n), n * k);
  for (int l = 0; l <= n; ++l) {
    long total = 0;
    for (long b = 0; b < batches; ++b) total += counts[static_cast<std::size_t>(b)][static_cast<std::size_t>(l)];
    double p = static_cast<double>(total) / static_cast<double>(samples);
    est.value[static_cast<std::size_t>(l)] = scale * p;
    est.std_error[static_cast<std::size_t>(l)] =
        scale * std::sqrt(std::max(p * (1.0 - p), 1.0 / static_cast<double>(samples)) /
                          static_cast<double>(samples));
  }
  return est;
}

/** \brief A query point for correlation densities. */
enum class point_class { bead, occupied, unoccupied };

struct query_point {
  double t = 0.0;
  int h = 0;
  point_class cls = point_class::bead;
};

namespace detail {

/// t' - t shifted into [0, 1).
inline double cyclic_gap(double t, double tp) {
  double d = tp - t;
  if (d < 0.0) d += 1.0;
  return d;
}

}  // namespace detail

/**
 * \brief Bead kernel:
 *   H(y, y') = (T/n) sum_{z^n = (-1)^{theta2}} z^{1+h-h'}
 *              e^{-(lambda + theta1 pi i + T z)[t'-t]} / (1 - e^{-(lambda + theta1 pi i + T z)}),
 * with [t'-t] the cyclic gap in [0,1).
 */
inline cplx bead_kernel_h(int n, double lambda, double temp, theta th, bead_point y,
                          bead_point yp) {
  double d = detail::cyclic_gap(y.t, yp.t);
  cplx sum = 0.0;
  for (const cplx& z : sector_roots(n, th.t2)) {
    cplx mu = cplx(lambda, th.t1 * pi) + temp * z;
    cplx den = 1.0 - std::exp(-mu);
    if (std::abs(den) < 1e-14) throw pole_error("1 - e^{-(lambda + theta1 pi i + T z)} vanishes");
    sum += ipow(z, 1 + y.h - yp.h) * std::exp(-mu * d) / den;
  }
  return temp / static_cast<double>(n) * sum;
}

/**
 * \brief Occupation kernel:
 *   K(y, y') = -(1/n) sum_{z^n = (-1)^{theta2}} z^{h-h'}
 *              e^{-(lambda + theta1 pi i + T z)([t'-t] + [t'=t])} / (1 - e^{-(lambda + theta1 pi i + T z)}).
 */
inline cplx bead_kernel_k(int n, double lambda, double temp, theta th, bead_point y,
                          bead_point yp) {
  double d = detail::cyclic_gap(y.t, yp.t) + (y.t == yp.t ? 1.0 : 0.0);
  cplx sum = 0.0;
  for (const cplx& z : sector_roots(n, th.t2)) {
    cplx mu = cplx(lambda, th.t1 * pi) + temp * z;
    cplx den = 1.0 - std::exp(-mu);
    if (std::abs(den) < 1e-14) throw pole_error("1 - e^{-(lambda + theta1 pi i + T z)} vanishes");
    sum += ipow(z, y.h - yp.h) * std::exp(-mu * d) / den;
  }
  return -sum / static_cast<double>(n);
}

/**
 * \brief Sector correlation density of a mixed point set: the determinant
 * with row i given by K (occupied), delta - K (unoccupied) or H (bead)
 * entries. Bead rows carry density (per unit time) units.
 */
inline cplx correlation_density(int n, double lambda, double temp, theta th,
                                const std::vector<query_point>& pts) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (pts[i].t == pts[j].t && pts[i].h == pts[j].h)
        throw std::invalid_argument("query points must be pairwise distinct");
  int p = static_cast<int>(pts.size());
  if (p == 0) return 1.0;
  cmatrix m(p);
  for (int i = 0; i < p; ++i) {
    bead_point yi{pts[static_cast<std::size_t>(i)].t, pts[static_cast<std::size_t>(i)].h};
    for (int j = 0; j < p; ++j) {
      bead_point yj{pts[static_cast<std::size_t>(j)].t, pts[static_cast<std::size_t>(j)].h};
      switch (pts[static_cast<std::size_t>(i)].cls) {
        case point_class::bead:
          m(i, j) = bead_kernel_h(n, lambda, temp, th, yi, yj);
          break;
        case point_class::occupied:
          m(i, j) = bead_kernel_k(n, lambda, temp, th, yi, yj);
          break;
        case point_class::unoccupied:
          m(i, j) = (i == j ? cplx(1.0, 0.0) : cplx(0.0, 0.0)) -
                    bead_kernel_k(n, lambda, temp, th, yi, yj);
          break;
      }
    }
  }
  return det(m);
}

/// Even lattice time for a continuum time: 2 floor(t m / 2) clamped to [0, m-2].
inline int discretize_time(double t, int m) {
  int x1 = 2 * static_cast<int>(std::floor(t * m / 2.0));
  return std::max(0, std::min(m - 2, x1));
}

/**
 * \brief Finite-torus counterpart of the sector correlation density.
 *
 * Maps each query point to the lattice site (discretize_time(t), h) on the
 * (m, n) torus with weights (1, 1 - lambda/m, T/m), turns classes into move
 * events (bead: step2, occupied: step1, unoccupied: stay), and evaluates
 * the sector event probability through the translation-invariant inverse.
 * The value is scaled by m per bead row, which is the normalization under
 * which it converges to correlation_density.
 */
inline cplx discrete_correlation_density(int m, int n, double lambda, double temp, theta th,
                                         const std::vector<query_point>& pts) {
  if (m < 2 || m % 2 != 0) throw std::invalid_argument("m must be even and at least 2");
  torus_shape shape(m, n);
  site_weights w{1.0, 1.0 - lambda / m, temp / m};
  int p = static_cast<int>(pts.size());
  if (p == 0) return 1.0;
  std::vector<site> xs(static_cast<std::size_t>(p));
  std::vector<move> mv(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    xs[static_cast<std::size_t>(i)] = {discretize_time(pts[static_cast<std::size_t>(i)].t, m), pts[static_cast<std::size_t>(i)].h};
    switch (pts[static_cast<std::size_t>(i)].cls) {
      case point_class::bead: mv[static_cast<std::size_t>(i)] = move::step2; break;
      case point_class::occupied: mv[static_cast<std::size_t>(i)] = move::step1; break;
      case point_class::unoccupied: mv[static_cast<std::size_t>(i)] = move::stay; break;
    }
  }
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (shape.index(xs[static_cast<std::size_t>(i)]) == shape.index(xs[static_cast<std::size_t>(j)]))
        throw std::invalid_argument("query points collide on the lattice at this m");

  int g1 = 0, g2 = 0, nbeads = 0;
  cplx wprod = 1.0;
  for (int i = 0; i < p; ++i) {
    site x = xs[static_cast<std::size_t>(i)];
    move mm = mv[static_cast<std::size_t>(i)];
    wprod *= mm == move::stay ? w.alpha : (mm == move::step1 ? w.beta : w.gamma);
    if (mm != move::stay && shape.wraps(x, mm)) (mm == move::step1 ? g1 : g2) += 1;
    if (mm == move::step2) ++nbeads;
  }
  cmatrix minor(p);
  for (int i = 0; i < p; ++i) {
    site yi = shape.step(xs[static_cast<std::size_t>(i)], mv[static_cast<std::size_t>(i)]);
    for (int j = 0; j < p; ++j)
      minor(i, j) = kasteleyn_inverse_constant(shape, w, th, yi, xs[static_cast<std::size_t>(j)]);
  }
  double sign = (th.t1 * g1 + th.t2 * g2) % 2 == 0 ? 1.0 : -1.0;
  return std::pow(static_cast<double>(m), nbeads) * sign * wprod * det(minor);
}

/** \brief Finite-m partition values against the continuum limit. */
inline sweep_result partition_scaling_sweep(int n, double lambda, double temp,
                                            const std::vector<long>& ms) {
  cplx limit = bead_partition(n, lambda, temp);
  return make_sweep(
      [n, lambda, temp](long m) {
        torus_shape shape(static_cast<int>(m), n);
        site_weights w{1.0, 1.0 - lambda / static_cast<double>(m), temp / static_cast<double>(m)};
        return partition_constant_log(shape, w).value();
      },
      limit, ms);
}

}  // namespace dimer
