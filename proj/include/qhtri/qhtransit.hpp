/**
 * @brief Transit of quantum-hyperbolic decorations (shapes, flattenings,
 *        charges, weak branching) through the elementary moves.
 *
 * Shapes transit geometrically: the move polyhedron is developed in C from the
 * old shapes (three base vertices at fixed generic positions, the rest solved
 * from cross-ratios), and the new tetrahedra read their shapes off the vertex
 * positions.  New flattenings are the integer solution of the log-branch
 * conditions with the kept tetrahedra frozen; new charges come from the charge
 * transit.  Purely destructive moves restrict the decoration and fail if the
 * restriction is not valid.
 */
#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "charge.hpp"
#include "qhsym.hpp"

namespace qhtri {

/** Cross-ratio convention: with vertex order b, the pair-0 shape of a tet with
 *  vertex positions p is cr(p[b0],p[b1],p[b2],p[b3]) below, and the pair cycle
 *  w_{k+1} = 1/(1-w_k) then holds identically in the positions.  Swapping two
 *  arguments within a pair inverts the value; double swaps preserve it. */
inline Cx cross_ratio(Cx a, Cx b, Cx c, Cx d) {
  return ((d - a) * (c - b)) / ((c - a) * (d - b));
}

/** Shape of pair k of a tet with vertex order beta and positions pos. */
inline Cx shape_from_positions(const Perm4& beta, const std::array<Cx, 4>& pos,
                               int k) {
  Cx w = cross_ratio(pos[beta[0]], pos[beta[1]], pos[beta[2]], pos[beta[3]]);
  for (int i = 0; i < k; ++i) w = 1.0 / (1.0 - w);
  return w;
}

namespace detail {

/** Solve cr(a,b,c,d) = w for d. */
inline Cx cross_ratio_solve_d(Cx w, Cx a, Cx b, Cx c) {
  Cx den = (c - b) - w * (c - a);
  if (std::abs(den) < 1e-12)
    throw NumericError("degenerate-transit", "cross-ratio solve is singular");
  return (a * (c - b) - w * b * (c - a)) / den;
}

/** Fill the single missing position of a tet from its pair-0 shape. */
inline void complete_positions(const Perm4& beta, Cx w0,
                               std::array<std::optional<Cx>, 4>& pos) {
  int miss = -1, cnt = 0;
  for (int j = 0; j < 4; ++j)
    if (!pos[beta[j]]) miss = j, ++cnt;
  if (cnt != 1) throw std::logic_error("complete_positions: need one unknown");
  // Klein four-group rearrangements putting the unknown in the last slot
  static constexpr int arr[4][3] = {{3, 2, 1}, {2, 3, 0}, {1, 0, 3}, {0, 1, 2}};
  const int* s = arr[miss];
  pos[beta[miss]] = cross_ratio_solve_d(w0, *pos[beta[s[0]]], *pos[beta[s[1]]],
                                        *pos[beta[s[2]]]);
}

}  // namespace detail

/** Develop the vertex positions of the move polyhedron from the old
 *  decoration: map old tet -> its four vertex positions.  Only the old
 *  tetrahedra referenced by mr.new_tet_verts are developed. */
inline std::map<int, std::array<Cx, 4>> develop_move_polyhedron(
    const Triangulation& T, const QHDecoration& d, const MoveResult& mr) {
  std::set<int> poly;
  for (const auto& nv : mr.new_tet_verts)
    for (const auto& [ot, ov] : nv)
      if (ot >= 0) poly.insert(ot);
  if (poly.empty()) return {};
  std::map<int, std::array<std::optional<Cx>, 4>> pos;
  for (int t : poly) pos[t] = {};
  const int seed = *poly.begin();
  const Perm4& b0 = d.wb.order[seed];
  pos[seed][b0[0]] = Cx(0.0, 0.0);
  pos[seed][b0[1]] = Cx(1.0, 0.0);
  pos[seed][b0[2]] = Cx(0.831, 1.374);
  detail::complete_positions(b0, d.w[seed][0], pos[seed]);
  // propagate across internal faces, then close each partially known tet
  for (bool progress = true; progress;) {
    progress = false;
    for (int t : poly)
      for (int f = 0; f < 4; ++f) {
        // only faces consumed by the move are interior to the polyhedron;
        // surviving sides (in side_map) may join polyhedron tets externally
        if (mr.side_map.count(FaceRef{t, f})) continue;
        const Gluing& g = T.glue[t][f];
        if (!poly.count(g.tet)) continue;
        bool src_ok = true;
        for (int v = 0; v < 4; ++v)
          if (v != f && !pos[t][v]) src_ok = false;
        if (!src_ok) continue;
        for (int v = 0; v < 4; ++v) {
          if (v == f) continue;
          Cx p = *pos[t][v];
          auto& q = pos[g.tet][g.perm[v]];
          if (q) {
            if (std::abs(*q - p) > 1e-6)
              throw NumericError("degenerate-transit",
                                 "developed positions do not close up");
          } else {
            q = p;
            progress = true;
          }
        }
        int missing = 0;
        for (int v = 0; v < 4; ++v)
          if (!pos[g.tet][v]) ++missing;
        if (missing == 1) {
          detail::complete_positions(d.wb.order[g.tet], d.w[g.tet][0], pos[g.tet]);
          progress = true;
        }
      }
  }
  std::map<int, std::array<Cx, 4>> out;
  for (int t : poly) {
    std::array<Cx, 4> a{};
    for (int v = 0; v < 4; ++v) {
      if (!pos[t][v])
        throw std::logic_error("develop: polyhedron tet not fully positioned");
      a[v] = *pos[t][v];
    }
    out[t] = a;
  }
  return out;
}

/** Transit the full decoration through a move towards the chosen
 *  pre-branching pb2 on mr.T2.  Throws NumericError("degenerate-transit") on a
 *  degenerate development and ValidationError("transit-stop") when the
 *  restriction of a destructive move is not a decoration. */
inline QHDecoration transit_qh(const Triangulation& T, const QHDecoration& d,
                               const MoveResult& mr, const PreBranching& pb2) {
  const Triangulation& T2 = mr.T2;
  QHDecoration out;
  out.wb = apply_wb_transit(T, d.wb, mr, pb2);
  out.w.assign(T2.ntets(), {});
  out.f.assign(T2.ntets(), {0, 0, 0});
  out.c.assign(T2.ntets(), {0, 0, 0});
  std::vector<int> old_of(T2.ntets(), -1);
  for (int t = 0; t < T.ntets(); ++t)
    if (mr.tet_map[t] >= 0) old_of[mr.tet_map[t]] = t;
  for (int t2 = 0; t2 < T2.ntets(); ++t2)
    if (old_of[t2] >= 0) {
      out.w[t2] = d.w[old_of[t2]];
      out.f[t2] = d.f[old_of[t2]];
    }
  if (mr.new_tets.empty()) {
    ZCharge cr = transit_charge(T, charge_from_wb(d.c, d.wb), mr)
                     .value_or(ZCharge{});
    if (cr.empty())
      throw ValidationError("transit-stop", "charge does not restrict");
    out.c = charge_to_wb(cr, out.wb);
    std::vector<int> ham;
    if (T2.hamiltonian) ham = *T2.hamiltonian;
    if (!validate_qh(T2, out, T2.hamiltonian ? &ham : nullptr).ok(1e-8))
      throw ValidationError("transit-stop", "decoration does not restrict");
    return out;
  }
  // shapes of the new tetrahedra from the developed polyhedron
  auto pos = develop_move_polyhedron(T, d, mr);
  const Cx apex(-0.647, 0.921);  // the bubble's new interior vertex
  for (std::size_t i = 0; i < mr.new_tets.size(); ++i) {
    int nt = mr.new_tets[i];
    std::array<Cx, 4> p{};
    for (int v = 0; v < 4; ++v) {
      auto [ot, ov] = mr.new_tet_verts[i][v];
      p[v] = (ot >= 0) ? pos.at(ot)[ov] : apex;
    }
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        if (std::abs(p[a] - p[b]) < 1e-9)
          throw NumericError("degenerate-transit", "coincident vertex positions");
    for (int k = 0; k < 3; ++k)
      out.w[nt][k] = shape_from_positions(out.wb.order[nt], p, k);
  }
  // flattenings: integer solve with kept tetrahedra frozen
  {
    std::map<int, int> col;
    for (int t : mr.new_tets) {
      int base = 3 * static_cast<int>(col.size());
      col[t] = base;
    }
    const int ncols = 3 * static_cast<int>(col.size());
    IMat a;
    IVec b;
    auto push_rhs = [&](Cx q, IVec& bb) {
      double re = q.real();
      long long r = std::llround(re);
      if (std::abs(re - static_cast<double>(r)) > 1e-6 || std::abs(q.imag()) > 1e-6)
        throw NumericError("degenerate-transit", "non-integral flattening rhs");
      bb.push_back(Int(r));
    };
    for (int t : mr.new_tets) {
      IVec row(ncols, Int(0));
      for (int k = 0; k < 3; ++k) row[col[t] + k] = 1;
      a.push_back(row);
      Cx s = 0;
      for (int k = 0; k < 3; ++k) s += shape_log(out.w[t][k]);
      push_rhs(-s / Cx(0, kPi), b);
    }
    for (const auto& ec : T2.edge_classes()) {
      IVec row(ncols, Int(0));
      Cx acc = 0;
      bool has_new = false;
      for (const auto& ae : ec.around) {
        int k = pair_index(out.wb.order[ae.tet], ae.e);
        int s = tet_sign(out.wb.order[ae.tet]);
        acc += static_cast<double>(s) * shape_log(out.w[ae.tet][k]);
        if (old_of[ae.tet] >= 0)
          acc += Cx(0, kPi) * static_cast<double>(s * out.f[ae.tet][k]);
        else {
          row[col.at(ae.tet) + k] += s;
          has_new = true;
        }
      }
      if (!has_new) continue;
      a.push_back(row);
      push_rhs(-acc / Cx(0, kPi), b);
    }
    auto sol = integer_solve(a, b);
    if (!sol)
      throw NumericError("degenerate-transit", "no integral flattening transit");
    for (const auto& [t, base] : col)
      for (int k = 0; k < 3; ++k)
        out.f[t][k] = static_cast<int>((*sol)[base + k]);
  }
  // charges
  auto c2 = transit_charge(T, charge_from_wb(d.c, d.wb), mr);
  if (!c2) throw NumericError("degenerate-transit", "no charge transit");
  out.c = charge_to_wb(*c2, out.wb);
  std::vector<int> ham;
  if (T2.hamiltonian) ham = *T2.hamiltonian;
  auto rep = validate_qh(T2, out, T2.hamiltonian ? &ham : nullptr);
  if (!rep.ok(1e-6))
    throw NumericError("degenerate-transit", "transit result fails validation");
  return out;
}

}  // namespace qhtri
