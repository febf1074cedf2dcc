#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dimer/errors.hpp"

namespace dimer {

/// Largest site count for which exhaustive enumeration is permitted.
inline constexpr int enumeration_site_cap = 16;

struct site {
  int x1 = 0;
  int x2 = 0;
  friend bool operator==(const site&, const site&) = default;
};

/// Per-site move label. A site either keeps its position, steps one unit in
/// the first direction, or steps one unit in the second. On degenerate tori
/// (m1 = 1 or m2 = 1) distinct labels can induce the same map; labels are
/// what is counted and weighted, not induced maps.
enum class move : std::uint8_t { stay = 0, step1 = 1, step2 = 2 };

inline char move_char(move m) { return m == move::stay ? '.' : (m == move::step1 ? '>' : '^'); }

struct torus_shape {
  int m1 = 1;
  int m2 = 1;

  torus_shape() = default;
  torus_shape(int a, int b) : m1(a), m2(b) {
    if (m1 < 1 || m2 < 1) throw std::invalid_argument("torus dimensions must be positive");
  }

  int sites() const { return m1 * m2; }

  /// Site ordering: x2-major, x1-minor.
  int index(site s) const { return s.x2 * m1 + s.x1; }
  site at(int idx) const { return {idx % m1, idx / m1}; }

  site step(site s, move m) const {
    switch (m) {
      case move::stay: return s;
      case move::step1: return {(s.x1 + 1) % m1, s.x2};
      default: return {s.x1, (s.x2 + 1) % m2};
    }
  }

  /// Whether the move exits through the periodic boundary in its direction.
  /// With m1 = 1 (resp. m2 = 1) every step1 (resp. step2) wraps.
  bool wraps(site s, move m) const {
    if (m == move::step1) return s.x1 == m1 - 1;
    if (m == move::step2) return s.x2 == m2 - 1;
    return false;
  }

  friend bool operator==(const torus_shape&, const torus_shape&) = default;
};

/** \brief A labeled matching: one move per site, inducing a bijection. */
struct matching {
  torus_shape shape;
  std::vector<move> moves;  // indexed by shape.index

  move at(site s) const { return moves[static_cast<std::size_t>(shape.index(s))]; }
  site target(site s) const { return shape.step(s, at(s)); }
};

/// Boundary exit counts (h1, h2): how many sites step through the periodic
/// boundary in each direction.
struct matching_exit_counts {
  int h1 = 0;
  int h2 = 0;
  friend bool operator==(const matching_exit_counts&, const matching_exit_counts&) = default;
};

inline matching_exit_counts matching_type(const matching& m) {
  matching_exit_counts t;
  for (int i = 0; i < m.shape.sites(); ++i) {
    site s = m.shape.at(i);
    move mv = m.moves[static_cast<std::size_t>(i)];
    if (mv != move::stay && m.shape.wraps(s, mv)) (mv == move::step1 ? t.h1 : t.h2) += 1;
  }
  return t;
}

/** \brief Sign of the induced permutation. */
inline int matching_sign(const matching& m) {
  int n = m.shape.sites();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  int sign = 1;
  for (int i = 0; i < n; ++i) {
    if (seen[static_cast<std::size_t>(i)]) continue;
    int len = 0;
    int j = i;
    while (!seen[static_cast<std::size_t>(j)]) {
      seen[static_cast<std::size_t>(j)] = true;
      j = m.shape.index(m.target(m.shape.at(j)));
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

/// One nontrivial cycle of the induced permutation, with its per-cycle
/// boundary exit counts. Cycles of one matching all share (q1, q2), and each
/// cycle visits q1*m1 + q2*m2 sites.
struct matching_cycle {
  int length = 0;
  int q1 = 0;
  int q2 = 0;
};

inline std::vector<matching_cycle> matching_cycles(const matching& m) {
  int n = m.shape.sites();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<matching_cycle> out;
  for (int i = 0; i < n; ++i) {
    if (seen[static_cast<std::size_t>(i)]) continue;
    matching_cycle c;
    int j = i;
    while (!seen[static_cast<std::size_t>(j)]) {
      seen[static_cast<std::size_t>(j)] = true;
      site s = m.shape.at(j);
      move mv = m.at(s);
      if (mv != move::stay && m.shape.wraps(s, mv)) (mv == move::step1 ? c.q1 : c.q2) += 1;
      j = m.shape.index(m.target(s));
      ++c.length;
    }
    if (c.length > 1) out.push_back(c);
  }
  return out;
}

/**
 * \brief All labeled matchings of the shape, in a fixed deterministic order.
 *
 * Sites are filled in index order; at each site the moves are tried in the
 * order stay < step1 < step2. Throws above the enumeration cap.
 */
inline std::vector<matching> enumerate_matchings(torus_shape shape) {
  if (shape.sites() > enumeration_site_cap)
    throw shape_too_large_error("enumeration is capped at " +
                                std::to_string(enumeration_site_cap) + " sites");
  int n = shape.sites();
  std::vector<matching> out;
  std::vector<move> cur(static_cast<std::size_t>(n), move::stay);
  std::uint32_t taken = 0;

  auto rec = [&](auto&& self, int i) -> void {
    if (i == n) {
      out.push_back(matching{shape, cur});
      return;
    }
    site s = shape.at(i);
    for (move mv : {move::stay, move::step1, move::step2}) {
      int t = shape.index(shape.step(s, mv));
      std::uint32_t bit = std::uint32_t{1} << t;
      if (taken & bit) continue;
      taken |= bit;
      cur[static_cast<std::size_t>(i)] = mv;
      self(self, i + 1);
      taken &= ~bit;
    }
  };
  rec(rec, 0);
  return out;
}

/**
 * \brief Check the closed-form sign rule against the permutation sign.
 *
 * The sign of the induced permutation must equal
 *   (1/2) * sum over theta in {0,1}^2 of
 *     (-1)^{(m1+theta1+1)(m2+theta2+1)} (-1)^{theta1 h1 + theta2 h2},
 * an integer identity evaluated here exactly.
 */
inline bool sign_formula_holds(const matching& m) {
  matching_exit_counts t = matching_type(m);
  long sum = 0;
  for (int t1 = 0; t1 < 2; ++t1)
    for (int t2 = 0; t2 < 2; ++t2) {
      long e = static_cast<long>(m.shape.m1 + t1 + 1) * (m.shape.m2 + t2 + 1) +
               t1 * t.h1 + t2 * t.h2;
      sum += e % 2 == 0 ? 1 : -1;
    }
  return matching_sign(m) * 2 == sum;
}

/// A matching viewed as bead-model data: step2 sites become beads at
/// (x1 / m1, x2); step1 sites occupy the cell [x1/m1, (x1+1)/m1) on their
/// string x2.
struct bead_shadow {
  struct bead {
    double t;
    int string;
  };
  struct cell {
    double t_lo;
    double t_hi;
    int string;
  };
  std::vector<bead> beads;
  std::vector<cell> occupied;
};

inline bead_shadow matching_to_beads(const matching& m) {
  bead_shadow b;
  for (int i = 0; i < m.shape.sites(); ++i) {
    site s = m.shape.at(i);
    double t = static_cast<double>(s.x1) / m.shape.m1;
    move mv = m.moves[static_cast<std::size_t>(i)];
    if (mv == move::step2)
      b.beads.push_back({t, s.x2});
    else if (mv == move::step1)
      b.occupied.push_back({t, static_cast<double>(s.x1 + 1) / m.shape.m1, s.x2});
  }
  return b;
}

}  // namespace dimer
