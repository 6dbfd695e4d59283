/**
 * @brief Integer and mod-2 charges on ideal (or distinguished) triangulations:
 *        the defining linear system, lattice solving, tautological charges of
 *        taut pre-branchings, boundary weights along normal loops, and charge
 *        lattices at fixed weights.
 *
 * Charges are stored on absolute opposite-edge pairs: index 0 = {01,23},
 * 1 = {02,13}, 2 = {03,12} (see abs_pair_of_edge).
 */
#pragma once

#include <array>
#include <optional>
#include <vector>

#include "boundary2d.hpp"
#include "branch.hpp"
#include "linalg.hpp"
#include "moves.hpp"
#include "taut.hpp"
#include "tri.hpp"

namespace qhtri {

using ZCharge = std::vector<std::array<int, 3>>;  ///< per tet, absolute pairs

/** Linear system rows: per-tet sum = 1, per-edge C(e) = 2 (0 on Hamiltonian
 *  edges in the relative case). Unknowns: 3 per tet, absolute pair order. */
struct ChargeSystem {
  IMat a;
  IVec b;
};

inline ChargeSystem charge_system(const Triangulation& T, bool relative = false) {
  const int n = T.ntets();
  auto ecs = T.edge_classes();
  ChargeSystem cs;
  cs.a = imat_zero(n + ecs.size(), 3 * n);
  cs.b.assign(n + ecs.size(), Int(0));
  for (int t = 0; t < n; ++t) {
    for (int k = 0; k < 3; ++k) cs.a[t][3 * t + k] = 1;
    cs.b[t] = 1;
  }
  std::set<int> ham;
  if (relative) {
    if (!T.hamiltonian)
      throw ValidationError("missing-hamiltonian", "relative charge system needs H");
    ham.insert(T.hamiltonian->begin(), T.hamiltonian->end());
  }
  for (const auto& ec : ecs) {
    for (const auto& ae : ec.around)
      cs.a[n + ec.id][3 * ae.tet + abs_pair_of_edge(ae.e)] += 1;
    cs.b[n + ec.id] = ham.count(ec.id) ? 0 : 2;
  }
  return cs;
}

inline bool charge_valid(const Triangulation& T, const ZCharge& c,
                         bool relative = false) {
  auto cs = charge_system(T, relative);
  IVec x(3 * T.ntets());
  for (int t = 0; t < T.ntets(); ++t)
    for (int k = 0; k < 3; ++k) x[3 * t + k] = c[t][k];
  return imat_mul_vec(cs.a, x) == cs.b;
}

/** Tautological charge of a taut pre-branching: 1 on the diagonal pair. */
inline ZCharge tautological_charge(const Triangulation& T, const PreBranching& pb) {
  if (taut_verdict(T, pb).verdict != TautVerdict::Taut)
    throw ValidationError("not-taut", "tautological Z-charge needs a taut structure");
  auto roles = edge_roles(T, pb);
  ZCharge c(T.ntets(), {0, 0, 0});
  for (int t = 0; t < T.ntets(); ++t)
    for (int e = 0; e < 6; ++e)
      if (roles[t].role[e] == Role::Diagonal) c[t][abs_pair_of_edge(e)] = 1;
  return c;
}

/** Locally taut mod-2 charge of any pre-branching (diagonal pair mod 2). */
inline ZCharge z2_taut_charge(const Triangulation& T, const PreBranching& pb) {
  auto roles = edge_roles(T, pb);
  ZCharge c(T.ntets(), {0, 0, 0});
  for (int t = 0; t < T.ntets(); ++t)
    for (int e = 0; e < 6; ++e)
      if (roles[t].role[e] == Role::Diagonal) c[t][abs_pair_of_edge(e)] = 1;
  return c;
}

/** Boundary weight of a charge along a normal loop: sum over the loop's turns
 *  of turn sign times the charge of the tetrahedron edge the corner cuts. */
inline Int weight_of_charge(const Triangulation& T, const ZCharge& c,
                            const NormalLoop& loop) {
  validate_loop(T, loop);
  Int k = 0;
  for (const LoopStep& s : loop.steps) {
    int e = edge_index(s.v, s.corner());
    k += Int(turn_sign(s)) * Int(c[s.tet][abs_pair_of_edge(e)]);
  }
  return k;
}

/** Solve for a charge; optional extra weight constraints (loop, target). */
inline std::optional<ZCharge> solve_charge(
    const Triangulation& T,
    const std::vector<std::pair<NormalLoop, Int>>& weights = {},
    bool relative = false) {
  auto cs = charge_system(T, relative);
  IMat a = cs.a;
  IVec b = cs.b;
  for (const auto& [loop, target] : weights) {
    validate_loop(T, loop);
    IVec row(3 * T.ntets(), Int(0));
    for (const LoopStep& s : loop.steps) {
      int e = edge_index(s.v, s.corner());
      row[3 * s.tet + abs_pair_of_edge(e)] += turn_sign(s);
    }
    a.push_back(row);
    b.push_back(target);
  }
  auto sol = integer_solve(a, b);
  if (!sol) return std::nullopt;
  ZCharge c(T.ntets());
  for (int t = 0; t < T.ntets(); ++t)
    for (int k = 0; k < 3; ++k) c[t][k] = static_cast<int>((*sol)[3 * t + k]);
  return c;
}

/** Basis of the lattice of charge differences with all given weights zero:
 *  kernel of the system matrix extended by the loop-weight rows. */
inline std::vector<IVec> charge_kernel(const Triangulation& T,
                                       const std::vector<NormalLoop>& loops = {},
                                       bool relative = false) {
  auto cs = charge_system(T, relative);
  IMat a = cs.a;
  for (const auto& loop : loops) {
    IVec row(3 * T.ntets(), Int(0));
    for (const LoopStep& s : loop.steps) {
      int e = edge_index(s.v, s.corner());
      row[3 * s.tet + abs_pair_of_edge(e)] += turn_sign(s);
    }
    a.push_back(row);
  }
  return integer_kernel(a);
}

/** Charge transit through a move: the new charge agrees with the old one on
 *  common tetrahedra and is globally valid on the new triangulation (relative
 *  validity when a Hamiltonian set is present).  The representative solved for
 *  the new tetrahedra is deterministic; any two transits differ by an element
 *  of the charge kernel supported on the new tetrahedra. */
inline std::optional<ZCharge> transit_charge(const Triangulation& T, const ZCharge& c,
                                             const MoveResult& mr) {
  const Triangulation& T2 = mr.T2;
  std::vector<int> old_of(T2.ntets(), -1);
  for (int t = 0; t < T.ntets(); ++t)
    if (mr.tet_map[t] >= 0) old_of[mr.tet_map[t]] = t;
  if (mr.new_tets.empty()) {  // purely destructive move: restriction must work
    ZCharge out(T2.ntets(), {0, 0, 0});
    for (int t2 = 0; t2 < T2.ntets(); ++t2) out[t2] = c[old_of[t2]];
    if (!charge_valid(T2, out, T2.hamiltonian.has_value())) return std::nullopt;
    return out;
  }
  // unknowns: the 3 pair charges of each new tet
  std::map<int, int> col;  // new tet -> first column
  for (int t : mr.new_tets) {
    int base = static_cast<int>(col.size());
    col[t] = 3 * base;
  }
  const int ncols = 3 * static_cast<int>(col.size());
  auto ecs = T2.edge_classes();
  std::set<int> ham;
  if (T2.hamiltonian) ham.insert(T2.hamiltonian->begin(), T2.hamiltonian->end());
  IMat a;
  IVec b;
  for (int t : mr.new_tets) {
    IVec row(ncols, Int(0));
    for (int k = 0; k < 3; ++k) row[col[t] + k] = 1;
    a.push_back(row);
    b.push_back(Int(1));
  }
  for (const auto& ec : ecs) {
    IVec row(ncols, Int(0));
    Int rhs = ham.count(ec.id) ? 0 : 2;
    for (const auto& ae : ec.around) {
      if (old_of[ae.tet] >= 0)
        rhs -= Int(c[old_of[ae.tet]][abs_pair_of_edge(ae.e)]);
      else
        row[col.at(ae.tet) + abs_pair_of_edge(ae.e)] += 1;
    }
    a.push_back(row);
    b.push_back(rhs);
  }
  auto sol = integer_solve(a, b);
  if (!sol) return std::nullopt;
  ZCharge out(T2.ntets(), {0, 0, 0});
  for (int t2 = 0; t2 < T2.ntets(); ++t2)
    if (old_of[t2] >= 0) out[t2] = c[old_of[t2]];
  for (const auto& [t, base] : col)
    for (int k = 0; k < 3; ++k) out[t][k] = static_cast<int>((*sol)[base + k]);
  return out;
}

/** Convert between absolute-pair charges and weak-branching pair order. */
inline std::vector<std::array<int, 3>> charge_to_wb(const ZCharge& c,
                                                    const WeakBranching& wb) {
  std::vector<std::array<int, 3>> out(c.size());
  for (std::size_t t = 0; t < c.size(); ++t)
    for (int k = 0; k < 3; ++k)
      out[t][k] = c[t][abs_pair_of_edge(pair_edge(wb.order[t], k))];
  return out;
}

inline ZCharge charge_from_wb(const std::vector<std::array<int, 3>>& c,
                              const WeakBranching& wb) {
  ZCharge out(c.size(), {0, 0, 0});
  for (std::size_t t = 0; t < c.size(); ++t)
    for (int k = 0; k < 3; ++k)
      out[t][abs_pair_of_edge(pair_edge(wb.order[t], k))] = c[t][k];
  return out;
}

}  // namespace qhtri
