#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "dimer/errors.hpp"
#include "dimer/logcomplex.hpp"
#include "dimer/numeric.hpp"

namespace dimer {

/** \brief Dense row-major complex matrix. */
class cmatrix {
 public:
  cmatrix() : n_(0) {}
  explicit cmatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, cplx(0.0, 0.0)) {}

  static cmatrix identity(int n) {
    cmatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int size() const { return n_; }
  cplx& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  cplx operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

  double norm1() const {
    double best = 0.0;
    for (int j = 0; j < n_; ++j) {
      double col = 0.0;
      for (int i = 0; i < n_; ++i) col += std::abs((*this)(i, j));
      best = std::max(best, col);
    }
    return best;
  }

  double max_abs() const {
    double best = 0.0;
    for (const cplx& z : a_) best = std::max(best, std::abs(z));
    return best;
  }

  friend cmatrix operator*(const cmatrix& a, const cmatrix& b) {
    cmatrix c(a.n_);
    for (int i = 0; i < a.n_; ++i)
      for (int k = 0; k < a.n_; ++k) {
        cplx aik = a(i, k);
        if (aik == cplx(0.0, 0.0)) continue;
        for (int j = 0; j < a.n_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

 private:
  int n_;
  std::vector<cplx> a_;
};

/**
 * \brief LU factorization with partial pivoting.
 *
 * Kept as a value so a single factorization serves determinant, solves,
 * inverse and the condition estimate.
 */
class lu_factorization {
 public:
  explicit lu_factorization(cmatrix a) : lu_(std::move(a)), piv_(), pivot_sign_(1) {
    int n = lu_.size();
    piv_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) piv_[static_cast<std::size_t>(i)] = i;
    for (int k = 0; k < n; ++k) {
      int p = k;
      double best = std::abs(lu_(k, k));
      for (int i = k + 1; i < n; ++i) {
        double v = std::abs(lu_(i, k));
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (best == 0.0) {
        singular_ = true;
        continue;  // leave the zero column; determinant is exactly zero
      }
      if (p != k) {
        for (int j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
        std::swap(piv_[static_cast<std::size_t>(k)], piv_[static_cast<std::size_t>(p)]);
        pivot_sign_ = -pivot_sign_;
      }
      for (int i = k + 1; i < n; ++i) {
        cplx f = lu_(i, k) / lu_(k, k);
        lu_(i, k) = f;
        if (f == cplx(0.0, 0.0)) continue;
        for (int j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
      }
    }
  }

  bool singular() const { return singular_; }

  /** \brief Determinant as log-magnitude plus phase. Zero for singular input. */
  log_complex det_log() const {
    if (singular_) return log_complex();
    int n = lu_.size();
    compensated_sum lm;
    double ph = 0.0;
    for (int i = 0; i < n; ++i) {
      cplx d = lu_(i, i);
      double a = std::abs(d);
      if (a == 0.0) return log_complex();
      lm.add(std::log(a));
      ph += std::arg(d);
      if (ph > pi) ph -= 2.0 * pi;
      if (ph <= -pi) ph += 2.0 * pi;
    }
    if (pivot_sign_ < 0) ph += ph > 0 ? -pi : pi;
    return log_complex(lm.value(), ph);
  }

  cplx det() const { return det_log().value(); }

  /// Solve A x = b in place. Requires a nonsingular factorization.
  void solve(std::vector<cplx>& b) const {
    require_nonsingular();
    int n = lu_.size();
    std::vector<cplx> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(piv_[static_cast<std::size_t>(i)])];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) x[static_cast<std::size_t>(i)] -= lu_(i, j) * x[static_cast<std::size_t>(j)];
    for (int i = n - 1; i >= 0; --i) {
      for (int j = i + 1; j < n; ++j) x[static_cast<std::size_t>(i)] -= lu_(i, j) * x[static_cast<std::size_t>(j)];
      x[static_cast<std::size_t>(i)] /= lu_(i, i);
    }
    b = std::move(x);
  }

  /// Solve A^H x = b in place (for the 1-norm condition estimate).
  void solve_adjoint(std::vector<cplx>& b) const {
    require_nonsingular();
    int n = lu_.size();
    std::vector<cplx> x = b;
    // A = P^T L U, so A^H = U^H L^H P: forward with U^H, back with L^H, then unpermute.
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < i; ++j) x[static_cast<std::size_t>(i)] -= std::conj(lu_(j, i)) * x[static_cast<std::size_t>(j)];
      x[static_cast<std::size_t>(i)] /= std::conj(lu_(i, i));
    }
    for (int i = n - 1; i >= 0; --i)
      for (int j = i + 1; j < n; ++j) x[static_cast<std::size_t>(i)] -= std::conj(lu_(j, i)) * x[static_cast<std::size_t>(j)];
    std::vector<cplx> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(piv_[static_cast<std::size_t>(i)])] = x[static_cast<std::size_t>(i)];
    b = std::move(y);
  }

  cmatrix inverse() const {
    require_nonsingular();
    int n = lu_.size();
    cmatrix inv(n);
    std::vector<cplx> col(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      std::fill(col.begin(), col.end(), cplx(0.0, 0.0));
      col[static_cast<std::size_t>(j)] = 1.0;
      solve(col);
      for (int i = 0; i < n; ++i) inv(i, j) = col[static_cast<std::size_t>(i)];
    }
    return inv;
  }

  /**
   * \brief Hager-style power iteration estimating norm1(A^{-1}).
   *
   * Uses only LU solves; a handful of iterations gives the usual
   * order-of-magnitude estimate, which is all the ill-conditioning warning
   * threshold needs.
   */
  double inverse_norm1_estimate() const {
    require_nonsingular();
    int n = lu_.size();
    std::vector<cplx> x(static_cast<std::size_t>(n), cplx(1.0 / n, 0.0));
    double est = 0.0;
    for (int iter = 0; iter < 5; ++iter) {
      std::vector<cplx> y = x;
      solve(y);
      double norm = 0.0;
      for (cplx v : y) norm += std::abs(v);
      if (norm <= est && iter > 0) break;
      est = norm;
      std::vector<cplx> xi(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        double a = std::abs(y[static_cast<std::size_t>(i)]);
        xi[static_cast<std::size_t>(i)] = a == 0.0 ? cplx(1.0, 0.0) : y[static_cast<std::size_t>(i)] / a;
      }
      solve_adjoint(xi);
      int best = 0;
      double bestv = 0.0;
      for (int i = 0; i < n; ++i) {
        double v = std::abs(xi[static_cast<std::size_t>(i)]);
        if (v > bestv) {
          bestv = v;
          best = i;
        }
      }
      std::fill(x.begin(), x.end(), cplx(0.0, 0.0));
      x[static_cast<std::size_t>(best)] = 1.0;
    }
    return est;
  }

 private:
  void require_nonsingular() const {
    if (singular_) throw singular_matrix_error("matrix is singular to working precision");
  }
  cmatrix lu_;
  std::vector<int> piv_;
  int pivot_sign_;
  bool singular_ = false;
};

inline log_complex det_log(const cmatrix& a) { return lu_factorization(a).det_log(); }
inline cplx det(const cmatrix& a) { return det_log(a).value(); }

struct inverse_result {
  cmatrix inv;
  double condition_estimate;  // norm1(A) * estimated norm1(A^{-1})
  bool ill_conditioned;       // condition_estimate above the warning threshold
  double residual;            // max entry of A*inv - I
};

inline constexpr double condition_warn_threshold = 1e12;

/** \brief Inverse with condition warning and residual check. */
inline inverse_result invert(const cmatrix& a) {
  lu_factorization lu(a);
  if (lu.singular()) throw singular_matrix_error("matrix is singular, cannot invert");
  inverse_result r;
  r.inv = lu.inverse();
  r.condition_estimate = a.norm1() * lu.inverse_norm1_estimate();
  r.ill_conditioned = r.condition_estimate > condition_warn_threshold;
  cmatrix prod = a * r.inv;
  double worst = 0.0;
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < a.size(); ++j) {
      cplx want = i == j ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
      worst = std::max(worst, std::abs(prod(i, j) - want));
    }
  r.residual = worst;
  return r;
}

namespace detail {

inline cmatrix submatrix_excluding(const cmatrix& m, const std::vector<int>& rows_out,
                                   const std::vector<int>& cols_out) {
  int n = m.size();
  std::vector<bool> rskip(static_cast<std::size_t>(n), false), cskip(static_cast<std::size_t>(n), false);
  for (int r : rows_out) rskip[static_cast<std::size_t>(r)] = true;
  for (int c : cols_out) cskip[static_cast<std::size_t>(c)] = true;
  cmatrix s(n - static_cast<int>(rows_out.size()));
  int si = 0;
  for (int i = 0; i < n; ++i) {
    if (rskip[static_cast<std::size_t>(i)]) continue;
    int sj = 0;
    for (int j = 0; j < n; ++j) {
      if (cskip[static_cast<std::size_t>(j)]) continue;
      s(si, sj) = m(i, j);
      ++sj;
    }
    ++si;
  }
  return s;
}

inline cmatrix submatrix_selecting(const cmatrix& m, const std::vector<int>& rows,
                                   const std::vector<int>& cols) {
  cmatrix s(static_cast<int>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      s(static_cast<int>(i), static_cast<int>(j)) = m(rows[i], cols[j]);
  return s;
}

}  // namespace detail

/**
 * \brief Check the complementary-minor determinant identity.
 *
 * For index sets X, Y of equal size,
 *   det(M with rows X and cols Y removed)
 *     = (-1)^{sum X + sum Y} det(M) det(M^{-1}[Y, X]),
 * where M^{-1}[Y, X] selects rows Y and columns X of the inverse. Returns
 * true when both sides agree to rel_tol (absolute below scale*rel_tol when a
 * side is near zero).
 */
inline bool jacobi_identity_holds(const cmatrix& m, const std::vector<int>& x,
                                  const std::vector<int>& y, double rel_tol = 1e-10) {
  if (x.size() != y.size()) throw std::invalid_argument("index sets must have equal size");
  lu_factorization lu(m);
  if (lu.singular()) throw singular_matrix_error("identity check needs nonsingular input");
  cplx lhs = x.size() == static_cast<std::size_t>(m.size())
                 ? cplx(1.0, 0.0)
                 : det(detail::submatrix_excluding(m, x, y));
  long parity = 0;
  for (int v : x) parity += v;
  for (int v : y) parity += v;
  cmatrix inv = lu.inverse();
  cplx minor = x.empty() ? cplx(1.0, 0.0) : det(detail::submatrix_selecting(inv, y, x));
  cplx rhs = (parity % 2 == 0 ? 1.0 : -1.0) * lu.det() * minor;
  double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
  return std::abs(lhs - rhs) <= rel_tol * scale;
}

}  // namespace dimer
