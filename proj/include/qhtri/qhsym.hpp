/**
 * @brief Quantum-hyperbolic decorations: shape/flattening/charge triples over a
 *        weak branching, validation of the global conditions, quantum shapes,
 *        symmetry defects (bulk and boundary), weights, and a Newton helper for
 *        the gluing equations.
 *
 * Index convention: all per-tet triples are indexed by the opposite-edge pairs of
 * the tet's vertex order beta: pair 0 = {b0 b1, b2 b3}, pair 1 = {b1 b2, b0 b3},
 * pair 2 = {b0 b2, b1 b3} (the diagonal pair of the induced co-orientations).
 */
#pragma once

#include <complex>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <set>
#include <vector>

#include "boundary2d.hpp"
#include "branch.hpp"
#include "tri.hpp"

namespace qhtri {

using Cx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

/** Principal log; shapes within `margin` of the branch cut or of {0,1} are
 *  rejected (the flattening semantics would be ambiguous there). */
inline Cx shape_log(Cx w, double margin = 1e-8) {
  if (std::abs(w) < margin || std::abs(w - 1.0) < margin)
    throw NumericError("degenerate-shape", "shape too close to {0,1}");
  if (w.real() < 0.0 && std::abs(w.imag()) < margin * std::max(1.0, -w.real()))
    throw NumericError("degenerate-shape", "shape on the log branch cut");
  return std::log(w);
}

struct QHDecoration {
  WeakBranching wb;
  std::vector<std::array<Cx, 3>> w;   ///< shapes
  std::vector<std::array<int, 3>> f;  ///< flattenings
  std::vector<std::array<int, 3>> c;  ///< charges
};

struct QHReport {
  double max_cycle = 0;    ///< |w_{j+1} - (1-w_j)^{-1}|
  double max_lsum = 0;     ///< per-tet |l0+l1+l2|
  int max_csum_dev = 0;    ///< per-tet |c0+c1+c2 - 1|
  double max_We = 0;       ///< per-edge |W(e) - 1|
  double max_Le = 0;       ///< per-edge |L(e)|
  int max_Ce_dev = 0;      ///< per-edge |C(e) - 2|
  bool ok(double tol) const {
    return max_cycle < tol && max_lsum < tol && max_csum_dev == 0 && max_We < tol &&
           max_Le < tol && max_Ce_dev == 0;
  }
};

inline std::array<Cx, 3> log_branches(const QHDecoration& d, int t) {
  std::array<Cx, 3> l;
  for (int k = 0; k < 3; ++k)
    l[k] = shape_log(d.w[t][k]) + Cx(0, kPi) * static_cast<double>(d.f[t][k]);
  return l;
}

/** Validate the five global QH conditions. `ham_edges` (optional, relative case)
 *  lists edge classes where C(e) = 0 is required instead of 2. */
inline QHReport validate_qh(const Triangulation& T, const QHDecoration& d,
                            const std::vector<int>* ham_edges = nullptr) {
  QHReport r;
  const int n = T.ntets();
  for (int t = 0; t < n; ++t) {
    for (int k = 0; k < 3; ++k) {
      Cx next = 1.0 / (1.0 - d.w[t][k]);
      r.max_cycle = std::max(r.max_cycle, std::abs(d.w[t][(k + 1) % 3] - next));
    }
    auto l = log_branches(d, t);
    r.max_lsum = std::max(r.max_lsum, std::abs(l[0] + l[1] + l[2]));
    r.max_csum_dev =
        std::max(r.max_csum_dev, std::abs(d.c[t][0] + d.c[t][1] + d.c[t][2] - 1));
  }
  std::set<int> ham;
  if (ham_edges) ham.insert(ham_edges->begin(), ham_edges->end());
  auto ecs = T.edge_classes();
  for (const auto& ec : ecs) {
    Cx W = 1.0, L = 0.0;
    int C = 0;
    for (const auto& ae : ec.around) {
      int k = pair_index(d.wb.order[ae.tet], ae.e);
      int s = tet_sign(d.wb.order[ae.tet]);
      W *= (s > 0) ? d.w[ae.tet][k] : 1.0 / d.w[ae.tet][k];
      L += static_cast<double>(s) * log_branches(d, ae.tet)[k];
      C += d.c[ae.tet][k];
    }
    int want = ham.count(ec.id) ? 0 : 2;
    r.max_We = std::max(r.max_We, std::abs(W - 1.0));
    r.max_Le = std::max(r.max_Le, std::abs(L));
    r.max_Ce_dev = std::max(r.max_Ce_dev, std::abs(C - want));
  }
  return r;
}

/** Exponents mu_k with quantum shape w-hat_k = exp(mu_k). */
inline std::array<Cx, 3> quantum_shape_exponents(const QHDecoration& d, int t, int N) {
  int s = tet_sign(d.wb.order[t]);
  std::array<Cx, 3> mu;
  for (int k = 0; k < 3; ++k)
    mu[k] = (shape_log(d.w[t][k]) +
             Cx(0, kPi) * static_cast<double>((N + 1) * (d.f[t][k] - s * d.c[t][k]))) /
            static_cast<double>(N);
  return mu;
}

inline std::array<Cx, 3> quantum_shapes(const QHDecoration& d, int t, int N) {
  auto mu = quantum_shape_exponents(d, t, N);
  return {std::exp(mu[0]), std::exp(mu[1]), std::exp(mu[2])};
}

/** Local symmetry defect (w-hat_0^{-c1} w-hat_1^{c0})^{(N-1)/2}. */
inline Cx alpha_local(const QHDecoration& d, int t, int N) {
  auto mu = quantum_shape_exponents(d, t, N);
  Cx expo = static_cast<double>(-d.c[t][1]) * mu[0] + static_cast<double>(d.c[t][0]) * mu[1];
  return std::exp(expo * (static_cast<double>(N - 1) / 2.0));
}

inline Cx alpha_global(const Triangulation& T, const QHDecoration& d, int N) {
  Cx a = 1.0;
  for (int t = 0; t < T.ntets(); ++t) a *= alpha_local(d, t, N);
  return a;
}

/** Transport a decoration to different per-tet vertex orders (same pre-branching
 *  per tet is NOT required: any orders inducing a valid weak branching of the
 *  same underlying triangulation work; pair data is re-expressed exactly). */
inline QHDecoration transport_decoration(const QHDecoration& d,
                                         const WeakBranching& to) {
  QHDecoration out;
  out.wb = to;
  const std::size_t n = d.wb.order.size();
  out.w.resize(n);
  out.f.resize(n);
  out.c.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    auto tr = pair_transport(d.wb.order[t], to.order[t]);
    for (int k = 0; k < 3; ++k) {
      int p = tr.pi[k];
      out.w[t][k] = (tr.eps > 0) ? d.w[t][p] : 1.0 / d.w[t][p];
      out.f[t][k] = tr.eps * d.f[t][p];
      out.c[t][k] = d.c[t][p];
    }
  }
  return out;
}

/** Boundary symmetrization factor alpha^0_N: product over the 4*#tets boundary
 *  triangles of the per-triangle factor computed from the decoration transported
 *  to the all-positive normalization of the induced pre-branching. */
inline Cx alpha_boundary(const Triangulation& T, const QHDecoration& d, int N) {
  auto pb = induced_prebranching(T, d.wb);
  auto norm = normalize_weak_branching(T, pb);
  QHDecoration nd = transport_decoration(d, norm);
  Cx a = 1.0;
  for (int t = 0; t < T.ntets(); ++t) {
    // per boundary triangle (one per vertex): corner exponents reuse the tet's
    // pair-ordered data; with *_b = +1 the factor coincides with alpha_local
    std::array<Cx, 3> mu;
    for (int k = 0; k < 3; ++k)
      mu[k] = (shape_log(nd.w[t][k]) +
               Cx(0, kPi) * static_cast<double>((N + 1) * (nd.f[t][k] - nd.c[t][k]))) /
              static_cast<double>(N);
    Cx expo =
        static_cast<double>(-nd.c[t][1]) * mu[0] + static_cast<double>(nd.c[t][0]) * mu[1];
    Cx tri = std::exp(expo * (static_cast<double>(N - 1) / 2.0));
    for (int v = 0; v < 4; ++v) a *= tri;
  }
  return a;
}

/** Boundary weight of the flattening along a normal loop:
 *  k_f([C]) = sum of branching sign * turn index * log branch of the cut edge.
 *  Unlike the charge weight, the per-tet branching sign enters. */
inline Cx flattening_weight(const Triangulation& T, const QHDecoration& d,
                            const NormalLoop& loop) {
  validate_loop(T, loop);
  Cx k = 0;
  for (const LoopStep& s : loop.steps) {
    int e = edge_index(s.v, s.corner());
    int p = pair_index(d.wb.order[s.tet], e);
    int sg = tet_sign(d.wb.order[s.tet]);
    k += static_cast<double>(turn_sign(s) * sg) * log_branches(d, s.tet)[p];
  }
  return k;
}

/** kappa = k_f - i pi k_c for a loop, with the decoration's charge. */
inline Cx kappa_weight(const Triangulation& T, const QHDecoration& d,
                       const NormalLoop& loop) {
  Cx kf = flattening_weight(T, d, loop);
  Cx kc = 0;
  for (const LoopStep& s : loop.steps) {
    int e = edge_index(s.v, s.corner());
    int p = pair_index(d.wb.order[s.tet], e);
    kc += static_cast<double>(turn_sign(s) * d.c[s.tet][p]);
  }
  return kf - Cx(0, kPi) * kc;
}

/** Holonomy of the shapes along a normal loop (log of the linear part d_w):
 *  like k_f but with plain shape logs, no flattening contribution. */
inline Cx shape_holonomy(const Triangulation& T, const QHDecoration& d,
                         const NormalLoop& loop) {
  validate_loop(T, loop);
  Cx k = 0;
  for (const LoopStep& s : loop.steps) {
    int e = edge_index(s.v, s.corner());
    int p = pair_index(d.wb.order[s.tet], e);
    int sg = tet_sign(d.wb.order[s.tet]);
    k += static_cast<double>(turn_sign(s) * sg) * shape_log(d.w[s.tet][p]);
  }
  return k;
}

struct ShapeSystem {
  std::vector<std::array<Cx, 3>> w;  ///< solved shapes per tet
  double residual = 0;               ///< final max log-edge residual
  int iterations = 0;
  bool converged = false;
};

/** Damped Newton on the log-edge gluing equations (per edge class the signed
 *  log shapes sum to 2 pi i), one shape unknown per tetrahedron.  Initial
 *  shapes default to 0.5 + 0.8i on the branching-positive side. */
inline ShapeSystem solve_gluing(const Triangulation& T, const WeakBranching& wb,
                                const std::vector<Cx>& init = {},
                                double tol = 1e-12, int max_iter = 200) {
  const int n = T.ntets();
  auto ecs = T.edge_classes();
  std::vector<Cx> z(n);
  for (int t = 0; t < n; ++t)
    z[t] = init.empty() ? Cx(0.5, 0.8 * tet_sign(wb.order[t])) : init[t];
  auto triple = [](Cx zz) -> std::array<Cx, 3> {
    return {zz, 1.0 / (1.0 - zz), 1.0 - 1.0 / zz};
  };
  auto dlog = [](Cx zz, int k) -> Cx {
    if (k == 0) return 1.0 / zz;
    if (k == 1) return 1.0 / (1.0 - zz);
    return 1.0 / (zz * (zz - 1.0));
  };
  auto residual = [&](const std::vector<Cx>& zz, std::vector<Cx>& r) {
    double mx = 0;
    r.assign(ecs.size(), Cx(0));
    for (const auto& ec : ecs) {
      Cx g = -Cx(0, 2 * kPi);
      for (const auto& ae : ec.around) {
        int k = pair_index(wb.order[ae.tet], ae.e);
        int s = tet_sign(wb.order[ae.tet]);
        g += static_cast<double>(s) * std::log(triple(zz[ae.tet])[k]);
      }
      r[ec.id] = g;
      mx = std::max(mx, std::abs(g));
    }
    return mx;
  };
  ShapeSystem out;
  std::vector<Cx> r, rtry;
  double cur = residual(z, r);
  for (int it = 0; it < max_iter && cur > tol; ++it) {
    // normal equations J^H J dz = -J^H r with a tiny ridge
    std::vector<std::vector<Cx>> J(ecs.size(), std::vector<Cx>(n, Cx(0)));
    for (const auto& ec : ecs)
      for (const auto& ae : ec.around) {
        int k = pair_index(wb.order[ae.tet], ae.e);
        int s = tet_sign(wb.order[ae.tet]);
        J[ec.id][ae.tet] += static_cast<double>(s) * dlog(z[ae.tet], k);
      }
    std::vector<std::vector<Cx>> A(n, std::vector<Cx>(n + 1, Cx(0)));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j)
        for (std::size_t e = 0; e < ecs.size(); ++e)
          A[i][j] += std::conj(J[e][i]) * J[e][j];
      A[i][i] += 1e-14;
      for (std::size_t e = 0; e < ecs.size(); ++e)
        A[i][n] -= std::conj(J[e][i]) * r[e];
    }
    // Gaussian elimination with partial pivoting
    for (int col = 0; col < n; ++col) {
      int piv = col;
      for (int row = col + 1; row < n; ++row)
        if (std::abs(A[row][col]) > std::abs(A[piv][col])) piv = row;
      std::swap(A[col], A[piv]);
      if (std::abs(A[col][col]) < 1e-300) break;
      for (int row = 0; row < n; ++row) {
        if (row == col) continue;
        Cx f = A[row][col] / A[col][col];
        for (int j = col; j <= n; ++j) A[row][j] -= f * A[col][j];
      }
    }
    std::vector<Cx> dz(n);
    for (int i = 0; i < n; ++i)
      dz[i] = (std::abs(A[i][i]) > 1e-300) ? A[i][n] / A[i][i] : Cx(0);
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h < 30; ++h, lambda *= 0.5) {
      std::vector<Cx> ztry(n);
      bool bad = false;
      for (int i = 0; i < n; ++i) {
        ztry[i] = z[i] + lambda * dz[i];
        if (std::abs(ztry[i]) < 1e-12 || std::abs(ztry[i] - 1.0) < 1e-12) bad = true;
      }
      if (bad) continue;
      double nxt = residual(ztry, rtry);
      if (nxt < cur) {
        z = ztry;
        r = rtry;
        cur = nxt;
        accepted = true;
        break;
      }
    }
    out.iterations = it + 1;
    if (!accepted) break;
  }
  out.residual = cur;
  out.converged = cur <= tol;
  out.w.resize(n);
  for (int t = 0; t < n; ++t) out.w[t] = triple(z[t]);
  return out;
}

/** alpha ratio against a reference charge c0 on the same (T, wb, w, f). */
inline Cx normalized_defect(const Triangulation& T, const QHDecoration& d,
                            const std::vector<std::array<int, 3>>& c0, int N) {
  QHDecoration ref = d;
  ref.c = c0;
  return alpha_global(T, d, N) / alpha_global(T, ref, N);
}

}  // namespace qhtri
