/**
 * @brief Pre-branchings (face co-orientations), weak/genuine branchings (vertex
 *        orders), derived edge roles (diagonal / A-square / B-square), tet signs,
 *        enumeration and decoration-transport permutations.
 *
 * Orientation rule (derived from the simplicial boundary of [0123]): for a vertex
 * order beta, the face opposite beta[k] is outgoing iff
 *     sign(position permutation of the remaining labels) * (-1)^{beta[k]} = +1,
 * which amounts to: even beta -> out-faces opposite beta[0], beta[2];
 *                   odd  beta -> out-faces opposite beta[1], beta[3].
 * Diagonal edges are {beta0,beta2} and {beta1,beta3}; the square edges form the
 * oriented quadrilateral beta0 -> beta1 -> beta2 -> beta3 -> beta0.  With an even
 * representative, the A-pair is the opposite-edge pair containing {beta3,beta0}.
 * See docs/edge_roles.md for the resulting truth table over all 6 local
 * co-orientation patterns.
 */
#pragma once

#include <algorithm>
#include <array>
#include <bitset>
#include <optional>
#include <vector>

#include "tri.hpp"

namespace qhtri {

enum class Role : std::uint8_t { Diagonal, SquareA, SquareB };

/** Face classes of a triangulation: each is the unordered pair of glued sides.
 *  side(0) is the lexicographically smaller (tet, face). */
struct FaceClass {
  FaceRef side0, side1;
};

inline std::vector<FaceClass> face_classes(const Triangulation& T) {
  std::vector<FaceClass> out;
  for (int t = 0; t < T.ntets(); ++t)
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = T.glue[t][f];
      FaceRef a{t, f}, b{g.tet, g.perm[f]};
      if (a < b) out.push_back({a, b});
    }
  return out;
}

/** face_class_map[4*t+f] = face class id. */
inline std::vector<int> face_class_map(const Triangulation& T) {
  auto fcs = face_classes(T);
  std::vector<int> m(4 * T.ntets(), -1);
  for (std::size_t i = 0; i < fcs.size(); ++i) {
    m[4 * fcs[i].side0.tet + fcs[i].side0.face] = static_cast<int>(i);
    m[4 * fcs[i].side1.tet + fcs[i].side1.face] = static_cast<int>(i);
  }
  return m;
}

/** Pre-branching: for each face class, which side's tetrahedron the transverse
 *  orientation exits through (0 = side0's tet, 1 = side1's tet). */
struct PreBranching {
  std::vector<int> out_side;
  bool operator==(const PreBranching&) const = default;
  auto operator<=>(const PreBranching&) const = default;
};

/** Weak branching: a vertex order per tetrahedron. */
struct WeakBranching {
  std::vector<Perm4> order;
};

/** Out-faces of a single tet under vertex order beta. */
inline std::array<bool, 4> local_out_faces(const Perm4& beta) {
  std::array<bool, 4> out{false, false, false, false};
  if (beta.parity() == +1) {
    out[beta[0]] = out[beta[2]] = true;
  } else {
    out[beta[1]] = out[beta[3]] = true;
  }
  return out;
}

inline int tet_sign(const Perm4& beta) { return beta.parity(); }

/** All vertex orders of one tet inducing the given local out-face pattern.
 *  Always exactly 4 (two even, two odd) for a 2-in/2-out pattern. */
inline std::vector<Perm4> compatible_local_branchings(const std::array<bool, 4>& out) {
  std::vector<Perm4> res;
  Perm4 b;
  std::array<int, 4> v{0, 1, 2, 3};
  do {
    for (int i = 0; i < 4; ++i) b[i] = v[i];
    if (local_out_faces(b) == out) res.push_back(b);
  } while (std::next_permutation(v.begin(), v.end()));
  return res;
}

/** Edge roles of one tet from its local out-face pattern. */
struct LocalRoles {
  std::array<Role, 6> role{};
  /** for square edges: directed endpoints (from, to); for diagonals: {-1,-1}. */
  std::array<std::array<int, 2>, 6> dir{};
};

inline LocalRoles local_edge_roles(const std::array<bool, 4>& out) {
  auto orders = compatible_local_branchings(out);
  if (orders.empty())
    throw ValidationError("orientation-violation", "not a 2-in/2-out pattern");
  Perm4 beta;
  bool found = false;
  for (const auto& o : orders)
    if (o.parity() == +1) { beta = o; found = true; break; }
  if (!found) throw std::logic_error("no even compatible order");
  LocalRoles lr;
  for (auto& d : lr.dir) d = {-1, -1};
  int b0 = beta[0], b1 = beta[1], b2 = beta[2], b3 = beta[3];
  lr.role[edge_index(b0, b2)] = Role::Diagonal;
  lr.role[edge_index(b1, b3)] = Role::Diagonal;
  // square quadrilateral b0 -> b1 -> b2 -> b3 -> b0; A-pair contains {b3,b0}
  auto set_sq = [&](int u, int v, Role r) {
    int e = edge_index(u, v);
    lr.role[e] = r;
    lr.dir[e] = {u, v};
  };
  set_sq(b3, b0, Role::SquareA);
  set_sq(b1, b2, Role::SquareA);
  set_sq(b0, b1, Role::SquareB);
  set_sq(b2, b3, Role::SquareB);
  return lr;
}

/** Local out-face patterns of every tet under a pre-branching. */
inline std::vector<std::array<bool, 4>> out_patterns(const Triangulation& T,
                                                     const PreBranching& pb) {
  auto fcs = face_classes(T);
  std::vector<std::array<bool, 4>> pat(T.ntets(), {false, false, false, false});
  for (std::size_t i = 0; i < fcs.size(); ++i) {
    const FaceRef& s = (pb.out_side[i] == 0) ? fcs[i].side0 : fcs[i].side1;
    pat[s.tet][s.face] = true;
  }
  return pat;
}

inline bool prebranching_valid(const Triangulation& T, const PreBranching& pb) {
  auto pat = out_patterns(T, pb);
  for (const auto& p : pat)
    if (std::count(p.begin(), p.end(), true) != 2) return false;
  return true;
}

/** Per-tet edge roles for (T, omega). */
inline std::vector<LocalRoles> edge_roles(const Triangulation& T,
                                          const PreBranching& pb) {
  auto pat = out_patterns(T, pb);
  std::vector<LocalRoles> out;
  out.reserve(pat.size());
  for (const auto& p : pat) out.push_back(local_edge_roles(p));
  return out;
}

/** omega_{b-tilde}: glue the per-tet patterns; throws if sides disagree. */
inline PreBranching induced_prebranching(const Triangulation& T,
                                         const WeakBranching& wb) {
  auto fcs = face_classes(T);
  std::vector<std::array<bool, 4>> pat;
  pat.reserve(wb.order.size());
  for (const auto& b : wb.order) pat.push_back(local_out_faces(b));
  PreBranching pb;
  pb.out_side.resize(fcs.size());
  for (std::size_t i = 0; i < fcs.size(); ++i) {
    bool o0 = pat[fcs[i].side0.tet][fcs[i].side0.face];
    bool o1 = pat[fcs[i].side1.tet][fcs[i].side1.face];
    if (o0 == o1)
      throw ValidationError("not-a-weak-branching",
                            "local pre-branchings do not glue");
    pb.out_side[i] = o0 ? 0 : 1;
  }
  return pb;
}

/** All-positive weak branching inducing omega (lexicographically smallest even
 *  compatible order per tet). */
inline WeakBranching normalize_weak_branching(const Triangulation& T,
                                              const PreBranching& pb) {
  auto pat = out_patterns(T, pb);
  WeakBranching wb;
  wb.order.reserve(pat.size());
  for (const auto& p : pat) {
    auto orders = compatible_local_branchings(p);
    std::optional<Perm4> best;
    for (const auto& o : orders)
      if (o.parity() == +1 && (!best || o < *best)) best = o;
    wb.order.push_back(*best);
  }
  return wb;
}

inline PreBranching total_inversion(const PreBranching& pb) {
  PreBranching q = pb;
  for (auto& s : q.out_side) s = 1 - s;
  return q;
}

/** All pre-branchings of T (exhaustive over 2^#face-classes). */
inline std::vector<PreBranching> enumerate_prebranchings(const Triangulation& T) {
  auto fcs = face_classes(T);
  const std::size_t nf = fcs.size();
  if (nf > 24) throw ValidationError("too-large", "pre-branching enumeration cap");
  std::vector<PreBranching> out;
  for (std::uint64_t mask = 0; mask < (1ull << nf); ++mask) {
    PreBranching pb;
    pb.out_side.resize(nf);
    for (std::size_t i = 0; i < nf; ++i) pb.out_side[i] = (mask >> i) & 1;
    if (prebranching_valid(T, pb)) out.push_back(pb);
  }
  return out;
}

/** Is the weak branching a genuine branching (edge orientations glue globally)?
 *  beta orients each local edge from the earlier to the later vertex in the order. */
inline bool is_genuine_branching(const Triangulation& T, const WeakBranching& wb) {
  // local edge (a,b) oriented a->b iff beta^{-1}(a) < beta^{-1}(b)
  auto dir_of = [&](int t, int a, int b) {
    Perm4 inv = wb.order[t].inverse();
    return inv[a] < inv[b];  // true: a->b
  };
  for (int t = 0; t < T.ntets(); ++t)
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = T.glue[t][f];
      for (int e = 0; e < 6; ++e) {
        auto [a, b] = kEdgeVerts[e];
        if (a == f || b == f) continue;
        if (dir_of(t, a, b) != dir_of(g.tet, g.perm[a], g.perm[b])) return false;
      }
    }
  return true;
}

// --------------------------------------------------- decoration transport

/** Opposite-edge pair index of local edge e w.r.t. order beta:
 *  pair 0 = {beta0 beta1, beta2 beta3}, 1 = {beta1 beta2, beta0 beta3},
 *  pair 2 = {beta0 beta2, beta1 beta3} (the diagonal pair). */
inline int pair_index(const Perm4& beta, int e) {
  int e01 = edge_index(beta[0], beta[1]);
  int e12 = edge_index(beta[1], beta[2]);
  int e02 = edge_index(beta[0], beta[2]);
  if (e == e01 || e == opposite_edge(e01)) return 0;
  if (e == e12 || e == opposite_edge(e12)) return 1;
  if (e == e02 || e == opposite_edge(e02)) return 2;
  throw std::logic_error("pair_index");
}

/** Representative local edge of pair k w.r.t. beta. */
inline int pair_edge(const Perm4& beta, int k) {
  switch (k) {
    case 0: return edge_index(beta[0], beta[1]);
    case 1: return edge_index(beta[1], beta[2]);
    default: return edge_index(beta[0], beta[2]);
  }
}

/** Transport data for re-expressing a per-tet decoration triple indexed by the
 *  pairs of `from` in the pair-indexing of `to`:
 *    new_k = old_{pi[k]} with exponent/sign eps.  */
struct PairTransport {
  std::array<int, 3> pi{};
  int eps = +1;
};

inline PairTransport pair_transport(const Perm4& from, const Perm4& to) {
  PairTransport tr;
  tr.eps = from.parity() * to.parity();
  for (int k = 0; k < 3; ++k) tr.pi[k] = pair_index(from, pair_edge(to, k));
  return tr;
}

}  // namespace qhtri
