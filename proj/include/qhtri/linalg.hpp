/**
 * @brief Exact integer/rational linear algebra: Hermite and Smith normal forms,
 *        integer linear systems, kernels, and a small extreme-ray enumerator for
 *        cones of the form {Ax = 0, x >= 0}.
 *
 * Everything here works on tiny matrices (tens of rows/cols), so the plain
 * O(n^3)-ish school algorithms with arbitrary precision entries are fine.
 */
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qhtri {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

using IMat = std::vector<std::vector<Int>>;
using IVec = std::vector<Int>;
using QMat = std::vector<std::vector<Rat>>;
using QVec = std::vector<Rat>;

inline IMat imat_zero(std::size_t r, std::size_t c) {
  return IMat(r, IVec(c, Int(0)));
}

inline IMat imat_identity(std::size_t n) {
  IMat m = imat_zero(n, n);
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline std::size_t rows(const IMat& a) { return a.size(); }
inline std::size_t cols(const IMat& a) { return a.empty() ? 0 : a[0].size(); }

inline IVec imat_mul_vec(const IMat& a, const IVec& x) {
  IVec y(rows(a), Int(0));
  for (std::size_t i = 0; i < rows(a); ++i)
    for (std::size_t j = 0; j < cols(a); ++j) y[i] += a[i][j] * x[j];
  return y;
}

inline IMat imat_mul(const IMat& a, const IMat& b) {
  IMat c = imat_zero(rows(a), cols(b));
  for (std::size_t i = 0; i < rows(a); ++i)
    for (std::size_t k = 0; k < cols(a); ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < cols(b); ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

/** Column-style Hermite form: returns unimodular U with A*U lower-triangular-ish
 *  (pivots move left); kernel of A = columns of U past the pivot columns. */
struct HermiteResult {
  IMat h;       ///< A*U
  IMat u;       ///< unimodular
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_rows;  ///< row of the pivot in column k (k < rank)
};

inline HermiteResult hermite_columns(const IMat& a0) {
  HermiteResult res;
  res.h = a0;
  const std::size_t m = rows(a0), n = cols(a0);
  res.u = imat_identity(n);
  std::size_t col = 0;
  for (std::size_t row = 0; row < m && col < n; ++row) {
    // gcd-eliminate this row across columns col..n-1
    std::size_t piv = col;
    bool nonzero = false;
    for (std::size_t j = col; j < n; ++j)
      if (res.h[row][j] != 0) { nonzero = true; break; }
    if (!nonzero) continue;
    for (std::size_t j = col + 1; j < n; ++j) {
      while (res.h[row][j] != 0) {
        if (res.h[row][piv] == 0 ||
            (res.h[row][j] != 0 && abs(res.h[row][j]) < abs(res.h[row][piv]))) {
          for (std::size_t i = 0; i < m; ++i) std::swap(res.h[i][piv], res.h[i][j]);
          for (std::size_t i = 0; i < n; ++i) std::swap(res.u[i][piv], res.u[i][j]);
        }
        if (res.h[row][j] == 0) break;
        Int q = res.h[row][j] / res.h[row][piv];
        for (std::size_t i = 0; i < m; ++i) res.h[i][j] -= q * res.h[i][piv];
        for (std::size_t i = 0; i < n; ++i) res.u[i][j] -= q * res.u[i][piv];
      }
    }
    if (res.h[row][piv] == 0) continue;  // cancelled out entirely
    if (res.h[row][piv] < 0) {
      for (std::size_t i = 0; i < m; ++i) res.h[i][piv] = -res.h[i][piv];
      for (std::size_t i = 0; i < n; ++i) res.u[i][piv] = -res.u[i][piv];
    }
    res.pivot_rows.push_back(row);
    ++col;
  }
  res.rank = col;
  return res;
}

/** Basis of the integer kernel lattice of A (columns x with A x = 0). */
inline std::vector<IVec> integer_kernel(const IMat& a) {
  if (rows(a) == 0) {
    std::vector<IVec> basis;
    for (std::size_t j = 0; j < cols(a); ++j) {
      IVec e(cols(a), Int(0));
      e[j] = 1;
      basis.push_back(e);
    }
    return basis;
  }
  HermiteResult hr = hermite_columns(a);
  std::vector<IVec> basis;
  for (std::size_t j = hr.rank; j < cols(a); ++j) {
    IVec v(cols(a));
    for (std::size_t i = 0; i < cols(a); ++i) v[i] = hr.u[i][j];
    basis.push_back(v);
  }
  return basis;
}

/** One integer solution of A x = b, if any. */
inline std::optional<IVec> integer_solve(const IMat& a, const IVec& b) {
  const std::size_t m = rows(a), n = cols(a);
  HermiteResult hr = hermite_columns(a);
  IVec y(n, Int(0));
  IVec r = b;
  for (std::size_t k = 0; k < hr.rank; ++k) {
    std::size_t row = hr.pivot_rows[k];
    Int num = r[row];
    if (num % hr.h[row][k] != 0) return std::nullopt;
    y[k] = num / hr.h[row][k];
    for (std::size_t i = 0; i < m; ++i) r[i] -= y[k] * hr.h[i][k];
  }
  for (std::size_t i = 0; i < m; ++i)
    if (r[i] != 0) return std::nullopt;
  return imat_mul_vec(hr.u, y);
}

/** Smith normal form: U*A*V = S diagonal with d_i | d_{i+1}. */
struct SmithResult {
  IMat s, u, v;
  std::size_t rank = 0;
};

inline SmithResult smith_normal_form(const IMat& a0) {
  SmithResult res;
  res.s = a0;
  const std::size_t m = rows(a0), n = cols(a0);
  res.u = imat_identity(m);
  res.v = imat_identity(n);
  auto row_sub = [&](std::size_t i, std::size_t k, const Int& q) {
    for (std::size_t j = 0; j < n; ++j) res.s[i][j] -= q * res.s[k][j];
    for (std::size_t j = 0; j < m; ++j) res.u[i][j] -= q * res.u[k][j];
  };
  auto col_sub = [&](std::size_t j, std::size_t k, const Int& q) {
    for (std::size_t i = 0; i < m; ++i) res.s[i][j] -= q * res.s[i][k];
    for (std::size_t i = 0; i < n; ++i) res.v[i][j] -= q * res.v[i][k];
  };
  auto row_swap = [&](std::size_t i, std::size_t k) {
    std::swap(res.s[i], res.s[k]);
    std::swap(res.u[i], res.u[k]);
  };
  auto col_swap = [&](std::size_t j, std::size_t k) {
    for (std::size_t i = 0; i < m; ++i) std::swap(res.s[i][j], res.s[i][k]);
    for (std::size_t i = 0; i < n; ++i) std::swap(res.v[i][j], res.v[i][k]);
  };

  std::size_t t = 0;
  while (t < m && t < n) {
    // find a nonzero pivot
    std::size_t pi = t, pj = t;
    bool found = false;
    for (std::size_t i = t; i < m && !found; ++i)
      for (std::size_t j = t; j < n && !found; ++j)
        if (res.s[i][j] != 0) { pi = i; pj = j; found = true; }
    if (!found) break;
    row_swap(t, pi);
    col_swap(t, pj);
    for (;;) {
      bool dirty = false;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (res.s[i][t] == 0) continue;
        Int q = res.s[i][t] / res.s[t][t];
        row_sub(i, t, q);
        if (res.s[i][t] != 0) { row_swap(t, i); dirty = true; }
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (res.s[t][j] == 0) continue;
        Int q = res.s[t][j] / res.s[t][t];
        col_sub(j, t, q);
        if (res.s[t][j] != 0) { col_swap(t, j); dirty = true; }
      }
      if (!dirty) break;
    }
    ++t;
  }
  // fix signs via U
  for (std::size_t i = 0; i < std::min(m, n); ++i) {
    if (res.s[i][i] < 0) {
      for (std::size_t j = 0; j < n; ++j) res.s[i][j] = -res.s[i][j];
      for (std::size_t j = 0; j < m; ++j) res.u[i][j] = -res.u[i][j];
    }
  }
  // enforce divisibility chain
  for (std::size_t i = 0; i + 1 < std::min(m, n); ++i) {
    for (std::size_t j = i + 1; j < std::min(m, n); ++j) {
      if (res.s[j][j] == 0 || res.s[i][i] == 0) continue;
      if (res.s[j][j] % res.s[i][i] == 0) continue;
      // classic trick: add col j to col i, re-reduce the 2x2 block
      for (std::size_t r2 = 0; r2 < m; ++r2) res.s[r2][i] += res.s[r2][j];
      for (std::size_t r2 = 0; r2 < n; ++r2) res.v[r2][i] += res.v[r2][j];
      // now rerun elimination on the trailing block starting at i
      SmithResult sub = smith_normal_form(res.s);
      sub.u = imat_mul(sub.u, res.u);
      sub.v = imat_mul(res.v, sub.v);
      res = sub;
      i = static_cast<std::size_t>(-1);  // restart
      break;
    }
  }
  res.rank = 0;
  for (std::size_t i = 0; i < std::min(m, n); ++i)
    if (res.s[i][i] != 0) ++res.rank;
  return res;
}

// ---------------------------------------------------------------- rationals

inline QMat qmat_from(const IMat& a) {
  QMat q(rows(a), QVec(cols(a)));
  for (std::size_t i = 0; i < rows(a); ++i)
    for (std::size_t j = 0; j < cols(a); ++j) q[i][j] = Rat(a[i][j]);
  return q;
}

/** In-place reduced row echelon form; returns pivot columns. */
inline std::vector<std::size_t> rref(QMat& a) {
  std::vector<std::size_t> pivots;
  std::size_t m = a.size(), n = a.empty() ? 0 : a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < m; ++c) {
    std::size_t p = r;
    while (p < m && a[p][c] == 0) ++p;
    if (p == m) continue;
    std::swap(a[p], a[r]);
    Rat inv = a[r][c];
    for (std::size_t j = 0; j < n; ++j) a[r][j] /= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rat f = a[i][c];
      for (std::size_t j = 0; j < n; ++j) a[i][j] -= f * a[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  a.resize(r);
  return pivots;
}

/** Row spaces equal as subspaces of Q^n? */
inline bool same_row_space(const QMat& a, const QMat& b) {
  QMat ra = a, rb = b;
  rref(ra);
  rref(rb);
  return ra == rb;
}

/** Rational nullspace basis of an integer matrix, cleared to primitive integer vectors. */
inline std::vector<IVec> rational_kernel_primitive(const IMat& a) {
  // integer_kernel already returns a lattice basis; saturate by clearing gcds.
  std::vector<IVec> k = integer_kernel(a);
  for (auto& v : k) {
    Int g = 0;
    for (auto& x : v) g = gcd(g, x);
    if (g > 1)
      for (auto& x : v) x /= g;
  }
  return k;
}

/** Extreme rays of {x in R^n : A x = 0, x >= 0}, as primitive integer vectors,
 *  sorted lexicographically. Brute-force over active-set candidates; fine for n <= 12. */
inline std::vector<IVec> cone_extreme_rays(const IMat& a) {
  const std::size_t n = cols(a);
  std::vector<IVec> kern = integer_kernel(a);  // basis of the solution subspace
  const std::size_t d = kern.size();
  std::vector<IVec> rays;
  if (d == 0) return rays;
  // Candidate extreme rays: for every subset Z of coordinates forced to zero with
  // |nullspace within subspace after zeroing| == 1, keep the nonnegative generator.
  // Enumerate subsets of coordinates of size up to n (n is tiny: <= 8 in practice).
  if (n > 20) throw std::runtime_error("cone_extreme_rays: too many coordinates");
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    // Solve: x = kern^T t, with x_i = 0 for i in mask. Want solution space dim 1.
    IMat sys;  // rows: one per zeroed coordinate, cols: d
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (1u << i))) continue;
      IVec row(d);
      for (std::size_t k = 0; k < d; ++k) row[k] = kern[k][i];
      sys.push_back(row);
    }
    if (sys.empty()) sys = imat_zero(0, d);
    std::vector<IVec> t = integer_kernel(sys);
    if (t.size() != 1) continue;
    IVec x(n, Int(0));
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t i = 0; i < n; ++i) x[i] += t[0][k] * kern[k][i];
    bool nonneg = true, nonpos = true, zero = true;
    for (const auto& xi : x) {
      if (xi > 0) nonpos = false;
      if (xi < 0) nonneg = false;
      if (xi != 0) zero = false;
    }
    if (zero) continue;
    if (!nonneg && !nonpos) continue;
    if (nonpos)
      for (auto& xi : x) xi = -xi;
    Int g = 0;
    for (auto& xi : x) g = gcd(g, xi);
    if (g > 1)
      for (auto& xi : x) xi /= g;
    rays.push_back(x);
  }
  std::sort(rays.begin(), rays.end());
  rays.erase(std::unique(rays.begin(), rays.end()), rays.end());
  // drop rays that are not extreme (positive combos of others): in a pointed cone an
  // extreme ray's zero set is maximal, so filter by support inclusion.
  std::vector<IVec> out;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    bool extreme = true;
    for (std::size_t j = 0; j < rays.size() && extreme; ++j) {
      if (i == j) continue;
      bool subset = true;
      for (std::size_t k = 0; k < n; ++k)
        if (rays[j][k] != 0 && rays[i][k] == 0) { subset = false; break; }
      if (subset) extreme = false;  // j's support inside i's: i not extreme unless equal
    }
    if (extreme) out.push_back(rays[i]);
  }
  return out.empty() ? rays : out;
}

}  // namespace qhtri
