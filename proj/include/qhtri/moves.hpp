/**
 * @brief Triangulation moves (2<->3, 0<->2 lune, 0<->2 bubble) with relabeling
 *        maps, plus the pre-branching transit classification into
 *        non-ambiguous / ambiguous / stop and weak-branching transport.
 *
 * All moves are embedded: 2->3 needs two distinct tetrahedra, 3->2 a valence-3
 * edge with three distinct tetrahedra, the negative lune a valence-2 edge whose
 * two abstract edges lie in two distinct tetrahedra glued along two faces.
 * New tetrahedra always take the highest indices of the result.
 */
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "branch.hpp"
#include "taut.hpp"
#include "tri.hpp"

namespace qhtri {

enum class MoveKind { MP23, MP32, LunePos, LuneNeg, BubblePos, BubbleNeg };

/** Locus encoding per kind:
 *  MP23      a = tet, b = face (the shared face, other tet distinct);
 *  MP32      a = edge class id (valence 3);
 *  LunePos   a = tet, b = local edge e; the move site is the union of the two
 *            faces of tet a containing e;
 *  LuneNeg   a = edge class id (valence 2, pillow pair);
 *  BubblePos a = tet, b = face, c = local edge of the face (the H edge);
 *  BubbleNeg a = tet (one of the two pillow tetrahedra). */
struct MoveSite {
  MoveKind kind{};
  int a = -1, b = -1, c = -1;
  static MoveSite mp23(int tet, int face) { return {MoveKind::MP23, tet, face, -1}; }
  static MoveSite mp32(int ec) { return {MoveKind::MP32, ec, -1, -1}; }
  static MoveSite lune_pos(int tet, int edge) { return {MoveKind::LunePos, tet, edge, -1}; }
  static MoveSite lune_neg(int ec) { return {MoveKind::LuneNeg, ec, -1, -1}; }
  static MoveSite bubble_pos(int tet, int face, int edge) {
    return {MoveKind::BubblePos, tet, face, edge};
  }
  static MoveSite bubble_neg(int tet) { return {MoveKind::BubbleNeg, tet, -1, -1}; }
};

struct MoveResult {
  Triangulation T2;
  std::vector<int> tet_map;    ///< old tet -> new tet, -1 if consumed
  std::vector<int> new_tets;   ///< new tet indices
  /** surviving old face side -> (new side, vertex map old locals -> new locals) */
  std::map<FaceRef, std::pair<FaceRef, Perm4>> side_map;
  int new_edge_class = -1;     ///< central edge class of T2 (MP23, LunePos)
  std::vector<int> edge_from;  ///< T2 edge class id -> old edge class id or -1
  /** for each new tet (same order as new_tets): local vertex -> (old tet, old
   *  local) of a coinciding ideal vertex of the move polyhedron, or (-1,-1)
   *  for a genuinely new vertex (the bubble apex). */
  std::vector<std::array<std::pair<int, int>, 4>> new_tet_verts;
};

namespace detail {

/** Orientation of a labeled tetrahedron embedded in the double-cone model:
 *  vertex codes 0 = top apex, 1 = bottom apex, 2/3/4 = equator E0/E1/E2. */
inline long long bipyramid_orient(const std::array<int, 4>& verts) {
  static constexpr long long co[5][3] = {
      {0, 0, 1}, {0, 0, -1}, {2, 0, 0}, {-1, -1, 0}, {-1, 1, 0}};
  long long m[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = co[verts[i + 1]][j] - co[verts[0]][j];
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

struct PolyFace {
  int new_tet, new_face;  // in T2
  int old_tet, old_face;  // in T
  Perm4 old_to_new;       // old tet locals -> new tet locals
};

/** Glue the boundary faces of the move polyhedron: faces whose old targets lie
 *  outside the polyhedron keep their (relabeled) targets; faces glued to other
 *  polyhedron boundary faces are connected directly. */
inline void resolve_boundary(const Triangulation& T, Triangulation& T2,
                             const std::vector<int>& tet_map,
                             const std::vector<PolyFace>& pf) {
  for (const PolyFace& F : pf) {
    const Gluing& g = T.glue[F.old_tet][F.old_face];
    int ot = g.tet, of = g.perm[F.old_face];
    const PolyFace* F2 = nullptr;
    for (const PolyFace& c : pf)
      if (c.old_tet == ot && c.old_face == of) F2 = &c;
    if (F2) {
      Perm4 p = F2->old_to_new * g.perm * F.old_to_new.inverse();
      T2.glue[F.new_tet][F.new_face] = {F2->new_tet, p};
    } else {
      Perm4 p = g.perm * F.old_to_new.inverse();
      T2.glue[F.new_tet][F.new_face] = {tet_map[ot], p};
      T2.glue[tet_map[ot]][of] = {F.new_tet, p.inverse()};
    }
  }
}

inline void copy_kept(const Triangulation& T, Triangulation& T2,
                      const std::vector<int>& tet_map) {
  for (int t = 0; t < T.ntets(); ++t) {
    if (tet_map[t] < 0) continue;
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = T.glue[t][f];
      T2.glue[tet_map[t]][f] = {tet_map[g.tet] >= 0 ? tet_map[g.tet] : -1, g.perm};
    }
  }
}

inline void add_kept_sides(const Triangulation& T, MoveResult& mr) {
  for (int t = 0; t < T.ntets(); ++t) {
    if (mr.tet_map[t] < 0) continue;
    for (int f = 0; f < 4; ++f)
      mr.side_map[{t, f}] = {FaceRef{mr.tet_map[t], f}, Perm4::identity()};
  }
}

/** edge_from (T2 class -> old class) from the side maps.  Negative lune /
 *  bubble moves merge the two copies of the doubled edge back into one class;
 *  `allow_merge` keeps the smallest old id there instead of failing. */
inline void fill_edge_from(const Triangulation& T, MoveResult& mr,
                           bool allow_merge = false) {
  auto cls_old = T.edge_class_map();
  auto cls_new = mr.T2.edge_class_map();
  auto ecs_new = mr.T2.edge_classes();
  mr.edge_from.assign(ecs_new.size(), -1);
  for (const auto& [olds, entry] : mr.side_map) {
    const auto& [news, perm] = entry;
    for (int e = 0; e < 6; ++e) {
      auto [a, b] = kEdgeVerts[e];
      if (a == olds.face || b == olds.face) continue;
      int ne = edge_index(perm[a], perm[b]);
      int from = cls_old[6 * olds.tet + e];
      int to = cls_new[6 * news.tet + ne];
      if (mr.edge_from[to] >= 0 && mr.edge_from[to] != from) {
        if (!allow_merge) throw std::logic_error("edge correspondence mismatch");
        from = std::min(from, mr.edge_from[to]);
      }
      mr.edge_from[to] = from;
    }
  }
}

inline void remap_hamiltonian(const Triangulation& T, MoveResult& mr) {
  if (!T.hamiltonian) return;
  std::vector<int> h2;
  for (int id : *T.hamiltonian) {
    int found = -1;
    for (std::size_t j = 0; j < mr.edge_from.size(); ++j)
      if (mr.edge_from[j] == id) found = static_cast<int>(j);
    if (found < 0)
      throw ValidationError("invalid-locus", "move consumes a Hamiltonian edge");
    h2.push_back(found);
  }
  std::sort(h2.begin(), h2.end());
  mr.T2.hamiltonian = h2;
}

inline std::vector<int> compact_map(int n, const std::vector<int>& removed) {
  std::vector<int> m(n);
  int k = 0;
  for (int t = 0; t < n; ++t) {
    if (std::find(removed.begin(), removed.end(), t) != removed.end())
      m[t] = -1;
    else
      m[t] = k++;
  }
  return m;
}

}  // namespace detail

// ------------------------------------------------------------ naked moves

inline MoveResult apply_mp23(const Triangulation& T, int t0, int f0) {
  const Gluing& g = T.glue[t0][f0];
  int t1 = g.tet, f1 = g.perm[f0];
  if (t1 == t0) throw ValidationError("invalid-locus", "2->3 needs two distinct tets");
  MoveResult mr;
  mr.tet_map = detail::compact_map(T.ntets(), {t0, t1});
  const int n = T.ntets() + 1;
  mr.T2.glue.resize(n);
  mr.T2.name = T.name;
  mr.new_tets = {n - 3, n - 2, n - 1};
  // equator assignment: t0 local -> E index, oriented so t0 = [A,E0,E1,E2] > 0
  std::array<int, 3> eq0{};
  {
    int k = 0;
    for (int v = 0; v < 4; ++v)
      if (v != f0) eq0[k++] = v;
    // embed: f0 -> apex A, eq0[k] -> E_k; fix orientation by parity
    if (seq_parity({f0, eq0[0], eq0[1], eq0[2]}) < 0) std::swap(eq0[1], eq0[2]);
  }
  std::array<int, 3> eq1{};
  for (int k = 0; k < 3; ++k) eq1[k] = g.perm[eq0[k]];
  if (seq_parity({f1, eq1[0], eq1[1], eq1[2]}) >= 0)
    throw std::logic_error("mp23: glued tet not mirror-embedded");
  // new tet k: locals (0,1,2,3) = (A, B, E_{k+1}, E_{k+2})
  for (int k = 0; k < 3; ++k) {
    int tk = n - 3 + k, tk1 = n - 3 + (k + 1) % 3;
    Perm4 p{{0, 1, 3, 2}};
    mr.T2.glue[tk][2] = {tk1, p};
    mr.T2.glue[tk1][3] = {tk, p};
  }
  std::vector<detail::PolyFace> pf;
  for (int k = 0; k < 3; ++k) {
    Perm4 top, bot;
    top[f0] = 0, top[eq0[k]] = 1, top[eq0[(k + 1) % 3]] = 2, top[eq0[(k + 2) % 3]] = 3;
    bot[f1] = 1, bot[eq1[k]] = 0, bot[eq1[(k + 1) % 3]] = 2, bot[eq1[(k + 2) % 3]] = 3;
    pf.push_back({n - 3 + k, 1, t0, eq0[k], top});
    pf.push_back({n - 3 + k, 0, t1, eq1[k], bot});
  }
  detail::copy_kept(T, mr.T2, mr.tet_map);
  detail::resolve_boundary(T, mr.T2, mr.tet_map, pf);
  mr.T2.validate();
  detail::add_kept_sides(T, mr);
  for (const auto& F : pf)
    mr.side_map[{F.old_tet, F.old_face}] = {FaceRef{F.new_tet, F.new_face}, F.old_to_new};
  detail::fill_edge_from(T, mr);
  for (int k = 0; k < 3; ++k)
    mr.new_tet_verts.push_back({std::pair{t0, f0}, std::pair{t1, f1},
                                std::pair{t0, eq0[(k + 1) % 3]},
                                std::pair{t0, eq0[(k + 2) % 3]}});
  mr.new_edge_class = mr.T2.edge_class_map()[6 * (n - 3) + edge_index(0, 1)];
  if (mr.edge_from[mr.new_edge_class] != -1)
    throw std::logic_error("mp23: central edge not new");
  detail::remap_hamiltonian(T, mr);
  return mr;
}

inline MoveResult apply_mp32(const Triangulation& T, int edge_class) {
  auto ecs = T.edge_classes();
  if (edge_class < 0 || edge_class >= static_cast<int>(ecs.size()))
    throw ValidationError("invalid-locus", "no such edge class");
  const auto& ec = ecs[edge_class];
  if (ec.valence() != 3)
    throw ValidationError("invalid-locus", "3->2 needs a valence-3 edge");
  std::array<int, 3> s{}, ea{}, eb{}, exitf{};
  for (int i = 0; i < 3; ++i) {
    s[i] = ec.around[i].tet;
    int e = ec.around[i].e;
    ea[i] = kEdgeVerts[e][ec.around[i].dir > 0 ? 0 : 1];
    eb[i] = kEdgeVerts[e][ec.around[i].dir > 0 ? 1 : 0];
  }
  if (s[0] == s[1] || s[1] == s[2] || s[0] == s[2])
    throw ValidationError("invalid-locus", "3->2 needs three distinct tets");
  // re-walk to get exit faces (same traversal as edge_classes)
  {
    int t = ec.around[0].tet, e0 = ec.around[0].e;
    int a = kEdgeVerts[e0][0], b = kEdgeVerts[e0][1];
    int exit_face = edge_faces(e0)[0];
    for (int i = 0; i < 3; ++i) {
      int idx = -1;
      for (int j = 0; j < 3; ++j)
        if (s[j] == t) idx = j;
      exitf[idx] = exit_face;
      const Gluing& gg = T.glue[t][exit_face];
      int na = gg.perm[a], nb = gg.perm[b], nf = gg.perm[exit_face];
      t = gg.tet, a = na, b = nb;
      auto fs = edge_faces(edge_index(a, b));
      exit_face = (fs[0] == nf) ? fs[1] : fs[0];
    }
  }
  // outer-vertex classes E0,E1,E2 (Ek absent from tet s_k), via the two
  // internal face gluings
  std::array<std::array<int, 4>, 3> vclass{};  // [i][v] -> 0 A, 1 B, 2+k Ek
  for (int i = 0; i < 3; ++i)
    for (int v = 0; v < 4; ++v) vclass[i][v] = -1;
  for (int i = 0; i < 3; ++i) vclass[i][ea[i]] = 0, vclass[i][eb[i]] = 1;
  // each tet s_i misses exactly one outer class; propagate outer labels
  // starting from s_0's two outer locals
  {
    std::array<int, 2> out0 = edge_faces(edge_index(ea[0], eb[0]));
    // tentative: E1 = the outer vertex NOT on the exit face of s_0 (the exit
    // face towards s_1 contains the vertex shared with s_1, i.e. E-label of
    // the face = the one also in s_1)
    int on_exit = (out0[0] == exitf[0]) ? out0[1] : out0[0];
    int off_exit = (out0[0] == exitf[0]) ? out0[0] : out0[1];
    // s_0 contains E1 and E2; the exit face (towards s_1) contains the vertex
    // also shared with s_1, which is E2 (s_1 misses E1)
    vclass[0][on_exit] = 2 + 2;
    vclass[0][off_exit] = 2 + 1;
    for (int i = 0; i < 2; ++i) {
      const Gluing& gg = T.glue[s[i]][exitf[i]];
      int j = (gg.tet == s[(i + 1) % 3]) ? (i + 1) % 3 : -1;
      if (j < 0) throw std::logic_error("mp32: walk mismatch");
      for (int v = 0; v < 4; ++v) {
        if (v == exitf[i]) continue;
        if (vclass[i][v] >= 2) {
          int w = gg.perm[v];
          if (vclass[j][w] >= 0 && vclass[j][w] != vclass[i][v])
            throw std::logic_error("mp32: vertex class mismatch");
          vclass[j][w] = vclass[i][v];
        }
      }
      // the fresh outer vertex of s_j is the missing label
      std::set<int> have;
      for (int v = 0; v < 4; ++v)
        if (vclass[j][v] >= 0) have.insert(vclass[j][v]);
      for (int v = 0; v < 4; ++v)
        if (vclass[j][v] < 0)
          for (int lab = 2; lab < 5; ++lab)
            if (!have.count(lab) && lab - 2 != j) vclass[j][v] = lab;
    }
  }
  // orientation: each s_k must embed positively; try the 4 relabelings
  auto orient_ok = [&](bool swap_ab, bool swap_e) {
    for (int i = 0; i < 3; ++i) {
      std::array<int, 4> verts{};
      for (int v = 0; v < 4; ++v) {
        int c = vclass[i][v];
        if (swap_ab && c < 2) c = 1 - c;
        if (swap_e && c >= 3) c = 7 - c;  // E1 <-> E2
        verts[v] = c;
      }
      if (detail::bipyramid_orient(verts) <= 0) return false;
    }
    return true;
  };
  bool sab = false, se = false, found = false;
  for (int i = 0; i < 4 && !found; ++i) {
    sab = i & 1, se = (i >> 1) & 1;
    found = orient_ok(sab, se);
  }
  if (!found) throw std::logic_error("mp32: no positive embedding");
  for (int i = 0; i < 3; ++i)
    for (int v = 0; v < 4; ++v) {
      int& c = vclass[i][v];
      if (sab && c < 2) c = 1 - c;
      if (se && c >= 3) c = 7 - c;
    }
  MoveResult mr;
  mr.tet_map = detail::compact_map(T.ntets(), {s[0], s[1], s[2]});
  const int n = T.ntets() - 1;
  mr.T2.glue.resize(n);
  mr.T2.name = T.name;
  mr.new_tets = {n - 2, n - 1};
  const int ttop = n - 2, tbot = n - 1;
  // ttop locals (0..3) = (A,E0,E1,E2); tbot locals = (B,E0,E2,E1)
  auto top_loc = [](int c) { return c == 0 ? 0 : c - 1; };          // A, Ek -> local
  auto bot_loc = [](int c) { return c == 1 ? 0 : (c == 2 ? 1 : (c == 3 ? 3 : 2)); };
  {
    Perm4 p{{0, 1, 3, 2}};
    mr.T2.glue[ttop][0] = {tbot, p};
    mr.T2.glue[tbot][0] = {ttop, p};
  }
  std::vector<detail::PolyFace> pf;
  for (int k = 0; k < 3; ++k) {
    // the tet missing outer vertex E_k carries the k-th top/bottom faces
    int i = -1;
    for (int j = 0; j < 3; ++j) {
      bool has = false;
      for (int v = 0; v < 4; ++v)
        if (vclass[j][v] == 2 + k) has = true;
      if (!has) i = j;
    }
    if (i < 0) throw std::logic_error("mp32: outer vertex class missing");
    int aloc = -1, bloc = -1;
    for (int v = 0; v < 4; ++v) {
      if (vclass[i][v] == 0) aloc = v;
      if (vclass[i][v] == 1) bloc = v;
    }
    Perm4 top, bot;
    for (int v = 0; v < 4; ++v) {
      int c = vclass[i][v];
      top[v] = (c == 1) ? top_loc(2 + k) : top_loc(c);  // B -> opposite slot Ek
      bot[v] = (c == 0) ? bot_loc(2 + k) : bot_loc(c);  // A -> opposite slot Ek
    }
    pf.push_back({ttop, top_loc(2 + k), s[i], bloc, top});
    pf.push_back({tbot, bot_loc(2 + k), s[i], aloc, bot});
  }
  detail::copy_kept(T, mr.T2, mr.tet_map);
  detail::resolve_boundary(T, mr.T2, mr.tet_map, pf);
  mr.T2.validate();
  detail::add_kept_sides(T, mr);
  for (const auto& F : pf)
    mr.side_map[{F.old_tet, F.old_face}] = {FaceRef{F.new_tet, F.new_face}, F.old_to_new};
  detail::fill_edge_from(T, mr);
  {
    // locate one old (tet, local) per outer vertex class
    auto locate = [&](int c) -> std::pair<int, int> {
      for (int i = 0; i < 3; ++i)
        for (int v = 0; v < 4; ++v)
          if (vclass[i][v] == c) return {s[i], v};
      throw std::logic_error("mp32: vertex class not located");
    };
    mr.new_tet_verts.push_back({locate(0), locate(2), locate(3), locate(4)});
    mr.new_tet_verts.push_back({locate(1), locate(2), locate(4), locate(3)});
  }
  detail::remap_hamiltonian(T, mr);
  return mr;
}

inline MoveResult apply_lune_pos(const Triangulation& T, int t, int e) {
  auto [p, q] = kEdgeVerts[e];
  auto rs = edge_faces(e);
  int r = rs[0], s = rs[1];
  MoveResult mr;
  mr.tet_map = detail::compact_map(T.ntets(), {});
  const int n = T.ntets() + 2;
  mr.T2.glue.resize(n);
  mr.T2.name = T.name;
  const int da = n - 2, db = n - 1;
  mr.new_tets = {da, db};
  Perm4 la;  // swap (p q): odd relabeling of the upper pillow tet
  la[p] = q, la[q] = p, la[r] = r, la[s] = s;
  detail::copy_kept(T, mr.T2, mr.tet_map);
  // top copy: tet t's faces r, s re-glued to Da
  mr.T2.glue[mr.tet_map[t]][r] = {da, la};
  mr.T2.glue[mr.tet_map[t]][s] = {da, la};
  mr.T2.glue[da][r] = {mr.tet_map[t], la};
  mr.T2.glue[da][s] = {mr.tet_map[t], la};
  // internal pillow faces (containing the new edge RS)
  mr.T2.glue[da][p] = {db, la};
  mr.T2.glue[da][q] = {db, la};
  mr.T2.glue[db][p] = {da, la};
  mr.T2.glue[db][q] = {da, la};
  // bottom copy keeps the old attachments of t's faces r, s
  std::vector<detail::PolyFace> pf;
  pf.push_back({db, r, t, r, Perm4::identity()});
  pf.push_back({db, s, t, s, Perm4::identity()});
  detail::resolve_boundary(T, mr.T2, mr.tet_map, pf);
  mr.T2.validate();
  detail::add_kept_sides(T, mr);
  // t's sides r and s now bound the top copy (identity vertex map)
  mr.side_map[{t, r}] = {FaceRef{mr.tet_map[t], r}, Perm4::identity()};
  mr.side_map[{t, s}] = {FaceRef{mr.tet_map[t], s}, Perm4::identity()};
  detail::fill_edge_from(T, mr);
  {
    std::array<std::pair<int, int>, 4> va, vb;
    for (int v = 0; v < 4; ++v) {
      va[v] = {t, la[v]};
      vb[v] = {t, v};
    }
    mr.new_tet_verts = {va, vb};
  }
  mr.new_edge_class = mr.T2.edge_class_map()[6 * da + edge_index(r, s)];
  if (mr.edge_from[mr.new_edge_class] != -1)
    throw std::logic_error("lune: central edge not new");
  detail::remap_hamiltonian(T, mr);
  return mr;
}

/** The valence-2 pillow pattern: two distinct tets glued along two faces whose
 *  common edge is the given class. */
inline MoveResult apply_lune_neg(const Triangulation& T, int edge_class) {
  auto ecs = T.edge_classes();
  if (edge_class < 0 || edge_class >= static_cast<int>(ecs.size()))
    throw ValidationError("invalid-locus", "no such edge class");
  const auto& ec = ecs[edge_class];
  if (ec.valence() != 2)
    throw ValidationError("invalid-locus", "negative lune needs a valence-2 edge");
  int da = ec.around[0].tet, db = ec.around[1].tet;
  int eda = ec.around[0].e, edb = ec.around[1].e;
  if (da == db)
    throw ValidationError("invalid-locus", "negative lune needs two distinct tets");
  // the two faces of Da containing the edge must both glue to Db with one map
  auto fa = edge_faces(eda);
  const Gluing& g0 = T.glue[da][fa[0]];
  const Gluing& g1 = T.glue[da][fa[1]];
  if (g0.tet != db || g1.tet != db || !(g0.perm == g1.perm))
    throw ValidationError("invalid-locus", "not a pillow configuration");
  Perm4 m = g0.perm;  // Da locals -> Db locals
  if (edge_index(m[kEdgeVerts[eda][0]], m[kEdgeVerts[eda][1]]) != edb)
    throw std::logic_error("lune-neg: edge mismatch");
  MoveResult mr;
  mr.tet_map = detail::compact_map(T.ntets(), {da, db});
  mr.T2.glue.resize(T.ntets() - 2);
  mr.T2.name = T.name;
  // outer faces of Da are opposite the edge endpoints; reglue their partners
  // to the partners of the matching Db faces
  for (int k = 0; k < 2; ++k) {
    int u = kEdgeVerts[eda][k];
    const Gluing& ga = T.glue[da][u];  // partner of the Da outer face
    const Gluing& gb = T.glue[db][m[u]];
    if (ga.tet == da || ga.tet == db || gb.tet == da || gb.tet == db)
      throw ValidationError("invalid-locus", "self-attached pillow unsupported");
  }
  detail::copy_kept(T, mr.T2, mr.tet_map);
  for (int k = 0; k < 2; ++k) {
    int u = kEdgeVerts[eda][k];
    const Gluing& ga = T.glue[da][u];
    const Gluing& gb = T.glue[db][m[u]];
    Perm4 p = gb.perm * m * ga.perm.inverse();  // ga-target locals -> gb-target
    mr.T2.glue[mr.tet_map[ga.tet]][ga.perm[u]] = {mr.tet_map[gb.tet], p};
    mr.T2.glue[mr.tet_map[gb.tet]][gb.perm[m[u]]] = {mr.tet_map[ga.tet], p.inverse()};
  }
  mr.T2.validate();
  detail::add_kept_sides(T, mr);
  detail::fill_edge_from(T, mr, true);
  detail::remap_hamiltonian(T, mr);
  return mr;
}

inline MoveResult apply_bubble_pos(const Triangulation& T, int t, int f, int e) {
  auto [x, y] = kEdgeVerts[e];
  if (x == f || y == f)
    throw ValidationError("invalid-locus", "edge not on the face");
  MoveResult mr;
  mr.tet_map = detail::compact_map(T.ntets(), {});
  const int n = T.ntets() + 2;
  mr.T2.glue.resize(n);
  mr.T2.name = T.name;
  const int da = n - 2, db = n - 1;
  mr.new_tets = {da, db};
  int z = 0;
  for (int v = 0; v < 4; ++v)
    if (v != f && v != x && v != y) z = v;
  Perm4 la;  // odd relabeling for the upper tet
  la[x] = y, la[y] = x, la[z] = z, la[f] = f;
  detail::copy_kept(T, mr.T2, mr.tet_map);
  mr.T2.glue[mr.tet_map[t]][f] = {da, la};
  mr.T2.glue[da][f] = {mr.tet_map[t], la};
  for (int u : {x, y, z}) {  // internal faces (all contain the new vertex V=f)
    mr.T2.glue[da][la[u]] = {db, la};
    mr.T2.glue[db][u] = {da, la};
  }
  std::vector<detail::PolyFace> pf;
  pf.push_back({db, f, t, f, Perm4::identity()});
  detail::resolve_boundary(T, mr.T2, mr.tet_map, pf);
  mr.T2.validate();
  detail::add_kept_sides(T, mr);
  mr.side_map[{t, f}] = {FaceRef{mr.tet_map[t], f}, Perm4::identity()};
  detail::fill_edge_from(T, mr);
  {
    std::array<std::pair<int, int>, 4> va, vb;
    for (int v = 0; v < 4; ++v) {
      va[v] = (v == f) ? std::pair{-1, -1} : std::pair{t, la[v]};
      vb[v] = (v == f) ? std::pair{-1, -1} : std::pair{t, v};
    }
    mr.new_tet_verts = {va, vb};
  }
  // H' = (H \ e) + e' + e'' where e' = (V,X), e'' = (V,Y) (V has local name f)
  if (T.hamiltonian) {
    auto cls_old = T.edge_class_map();
    auto cls_new = mr.T2.edge_class_map();
    int removed = cls_old[6 * t + e];
    std::vector<int> h2;
    for (int id : *T.hamiltonian) {
      if (id == removed) continue;
      int found = -1;
      for (std::size_t j = 0; j < mr.edge_from.size(); ++j)
        if (mr.edge_from[j] == id) found = static_cast<int>(j);
      if (found < 0) throw std::logic_error("bubble: lost H edge");
      h2.push_back(found);
    }
    if (std::find(T.hamiltonian->begin(), T.hamiltonian->end(), removed) ==
        T.hamiltonian->end())
      throw ValidationError("no-hamiltonian-edge-on-face", "chosen edge not in H");
    h2.push_back(cls_new[6 * db + edge_index(f, x)]);
    h2.push_back(cls_new[6 * db + edge_index(f, y)]);
    std::sort(h2.begin(), h2.end());
    mr.T2.hamiltonian = h2;
  }
  return mr;
}

inline MoveResult apply_bubble_neg(const Triangulation& T, int ta) {
  // find the pillow partner: a tet glued to ta along exactly three faces with
  // one vertex map
  int tb = -1, outer_a = -1;
  Perm4 m;
  for (int f = 0; f < 4; ++f) {
    const Gluing& g = T.glue[ta][f];
    if (g.tet == ta) throw ValidationError("invalid-locus", "degenerate pillow");
  }
  {
    std::map<int, int> cnt;
    for (int f = 0; f < 4; ++f) ++cnt[T.glue[ta][f].tet];
    for (const auto& [t2, c] : cnt)
      if (c == 3) tb = t2;
    if (tb < 0) throw ValidationError("invalid-locus", "not a bubble pillow");
    for (int f = 0; f < 4; ++f)
      if (T.glue[ta][f].tet != tb) outer_a = f;
    m = T.glue[ta][(outer_a + 1) % 4].perm;
    for (int f = 0; f < 4; ++f)
      if (f != outer_a && !(T.glue[ta][f].perm == m))
        throw ValidationError("invalid-locus", "pillow maps disagree");
  }
  int outer_b = m[outer_a];
  const Gluing& ga = T.glue[ta][outer_a];
  const Gluing& gb = T.glue[tb][outer_b];
  if (ga.tet == ta || ga.tet == tb || gb.tet == ta || gb.tet == tb)
    throw ValidationError("invalid-locus", "self-attached pillow unsupported");
  MoveResult mr;
  mr.tet_map = detail::compact_map(T.ntets(), {ta, tb});
  mr.T2.glue.resize(T.ntets() - 2);
  mr.T2.name = T.name;
  detail::copy_kept(T, mr.T2, mr.tet_map);
  Perm4 p = gb.perm * m * ga.perm.inverse();
  mr.T2.glue[mr.tet_map[ga.tet]][ga.perm[outer_a]] = {mr.tet_map[gb.tet], p};
  mr.T2.glue[mr.tet_map[gb.tet]][gb.perm[m[outer_a]]] = {mr.tet_map[ga.tet],
                                                         p.inverse()};
  mr.T2.validate();
  detail::add_kept_sides(T, mr);
  detail::fill_edge_from(T, mr, true);
  // H': drop the two V-edges, restore the face edge
  if (T.hamiltonian) {
    auto cls_old = T.edge_class_map();
    auto cls_new = mr.T2.edge_class_map();
    // V = outer_a viewed from ta (the vertex not on the outer face)
    std::set<int> vedges;
    for (int v = 0; v < 4; ++v)
      if (v != outer_a) vedges.insert(cls_old[6 * ta + edge_index(outer_a, v)]);
    std::vector<int> h2;
    std::set<int> dropped;
    for (int id : *T.hamiltonian) {
      if (vedges.count(id)) {
        dropped.insert(id);
        continue;
      }
      int found = -1;
      for (std::size_t j = 0; j < mr.edge_from.size(); ++j)
        if (mr.edge_from[j] == id) found = static_cast<int>(j);
      if (found < 0) throw std::logic_error("bubble-neg: lost H edge");
      h2.push_back(found);
    }
    if (dropped.size() != 2)
      throw ValidationError("invalid-locus", "H does not cross the bubble");
    // the restored edge: endpoints of the two dropped V-edges on the face
    std::vector<int> ends;
    for (int v = 0; v < 4; ++v)
      if (v != outer_a && dropped.count(cls_old[6 * ta + edge_index(outer_a, v)]))
        ends.push_back(v);
    if (ends.size() != 2) throw std::logic_error("bubble-neg: bad H pattern");
    int e = edge_index(ends[0], ends[1]);
    const Gluing& gouter = T.glue[ta][outer_a];
    int enew = edge_index(gouter.perm[ends[0]], gouter.perm[ends[1]]);
    h2.push_back(cls_new[6 * mr.tet_map[gouter.tet] + enew]);
    (void)e;
    std::sort(h2.begin(), h2.end());
    h2.erase(std::unique(h2.begin(), h2.end()), h2.end());
    mr.T2.hamiltonian = h2;
  }
  return mr;
}

inline MoveResult apply_naked(const Triangulation& T, const MoveSite& site) {
  switch (site.kind) {
    case MoveKind::MP23: return apply_mp23(T, site.a, site.b);
    case MoveKind::MP32: return apply_mp32(T, site.a);
    case MoveKind::LunePos: return apply_lune_pos(T, site.a, site.b);
    case MoveKind::LuneNeg: return apply_lune_neg(T, site.a);
    case MoveKind::BubblePos: return apply_bubble_pos(T, site.a, site.b, site.c);
    case MoveKind::BubbleNeg: return apply_bubble_neg(T, site.a);
  }
  throw std::logic_error("unreachable");
}

// --------------------------------------------------- pre-branching transits

enum class TransitClass { NonAmbiguous, Ambiguous, Stop };

struct TransitOutcome {
  TransitClass cls = TransitClass::Stop;
  MoveResult mr;
  std::vector<PreBranching> results;  ///< pre-branchings on mr.T2
};

/** All pre-branchings of mr.T2 that agree with pb on the surviving faces (in
 *  the "two copies" sense for split faces); empty on conflict. */
inline std::vector<PreBranching> pb_transit_candidates(const Triangulation& T,
                                                       const PreBranching& pb,
                                                       const MoveResult& mr) {
  auto fcs_old = face_classes(T);
  auto fcs_new = face_classes(mr.T2);
  auto find_side = [&](const FaceRef& r) -> std::pair<int, int> {
    for (std::size_t j = 0; j < fcs_new.size(); ++j) {
      if (fcs_new[j].side0 == r) return {static_cast<int>(j), 0};
      if (fcs_new[j].side1 == r) return {static_cast<int>(j), 1};
    }
    throw std::logic_error("side not found");
  };
  std::vector<int> out2(fcs_new.size(), -1);
  for (std::size_t i = 0; i < fcs_old.size(); ++i) {
    for (int sd = 0; sd < 2; ++sd) {
      FaceRef S = (sd == 0) ? fcs_old[i].side0 : fcs_old[i].side1;
      auto it = mr.side_map.find(S);
      if (it == mr.side_map.end()) continue;
      auto [j, k] = find_side(it->second.first);
      int want = (pb.out_side[i] == sd) ? k : 1 - k;
      if (out2[j] >= 0 && out2[j] != want) return {};
      out2[j] = want;
    }
  }
  std::vector<int> free_idx;
  for (std::size_t j = 0; j < fcs_new.size(); ++j)
    if (out2[j] < 0) free_idx.push_back(static_cast<int>(j));
  std::vector<PreBranching> res;
  for (std::uint32_t mask = 0; mask < (1u << free_idx.size()); ++mask) {
    PreBranching q;
    q.out_side.assign(out2.begin(), out2.end());
    for (std::size_t b = 0; b < free_idx.size(); ++b)
      q.out_side[free_idx[b]] = (mask >> b) & 1;
    if (prebranching_valid(mr.T2, q)) res.push_back(q);
  }
  return res;
}

namespace detail {

/** Sort an ambiguous pair so that the A-prevailing enhancement at the central
 *  edge comes first (canonical order when the counts tie, e.g. for negatives). */
inline void order_ambiguous(const Triangulation& T2, std::vector<PreBranching>& v,
                            int central_edge) {
  std::sort(v.begin(), v.end());
  if (v.size() == 2 && central_edge >= 0) {
    auto [a0, b0] = square_color_counts(T2, v[0], central_edge);
    auto [a1, b1] = square_color_counts(T2, v[1], central_edge);
    if (a1 - b1 > a0 - b0) std::swap(v[0], v[1]);
  }
}

}  // namespace detail

/** Shared square edges of the two tets on the common face (MP23 site). */
inline int shared_square_count(const Triangulation& T, const PreBranching& pb,
                               int t0, int f0) {
  const Gluing& g = T.glue[t0][f0];
  auto roles = edge_roles(T, pb);
  int cnt = 0;
  for (int e = 0; e < 6; ++e) {
    auto [a, b] = kEdgeVerts[e];
    if (a == f0 || b == f0) continue;
    int e1 = edge_index(g.perm[a], g.perm[b]);
    Role r0 = roles[t0].role[e], r1 = roles[g.tet].role[e1];
    bool sq0 = r0 != Role::Diagonal, sq1 = r1 != Role::Diagonal;
    if (sq0 && sq1) ++cnt;
  }
  return cnt;
}

inline TransitOutcome classify_pb_mp23(const Triangulation& T, const PreBranching& pb,
                                       int t0, int f0) {
  TransitOutcome out;
  out.mr = apply_mp23(T, t0, f0);
  out.results = pb_transit_candidates(T, pb, out.mr);
  int shared = shared_square_count(T, pb, t0, f0);
  if (shared == 1) {
    if (out.results.size() != 1) throw std::logic_error("NA mp23: expected 1 result");
    out.cls = TransitClass::NonAmbiguous;
  } else if (shared == 2) {
    if (out.results.size() != 2) throw std::logic_error("A mp23: expected 2 results");
    out.cls = TransitClass::Ambiguous;
    detail::order_ambiguous(out.mr.T2, out.results, out.mr.new_edge_class);
  } else {
    throw std::logic_error("mp23: impossible shared square count");
  }
  return out;
}

inline TransitOutcome classify_pb_mp32(const Triangulation& T, const PreBranching& pb,
                                       int edge_class) {
  TransitOutcome out;
  out.mr = apply_mp32(T, edge_class);
  out.results = pb_transit_candidates(T, pb, out.mr);
  if (out.results.empty()) {
    out.cls = TransitClass::Stop;
    return out;
  }
  // NA iff the inverse positive transit is NA: the two result tets share the
  // re-created face; check the shared-square signature there
  bool na = false;
  int ttop = out.mr.new_tets[0];
  for (const auto& cand : out.results)
    if (shared_square_count(out.mr.T2, cand, ttop, 0) == 1) na = true;
  out.cls = na ? TransitClass::NonAmbiguous : TransitClass::Ambiguous;
  detail::order_ambiguous(out.mr.T2, out.results, -1);
  return out;
}

inline TransitOutcome classify_pb_lune_pos(const Triangulation& T,
                                           const PreBranching& pb, int t, int e) {
  TransitOutcome out;
  auto fcm = face_class_map(T);
  auto fcs = face_classes(T);
  auto rs = edge_faces(e);
  if (fcm[4 * t + rs[0]] == fcm[4 * t + rs[1]])
    throw ValidationError("invalid-locus", "lune site is not an embedded disk");
  out.mr = apply_lune_pos(T, t, e);
  out.results = pb_transit_candidates(T, pb, out.mr);
  // NA iff the co-orientations of the two site faces are compatible (both
  // point towards t or both away)
  bool toward[2];
  for (int k = 0; k < 2; ++k) {
    int i = fcm[4 * t + rs[k]];
    FaceRef outside = (pb.out_side[i] == 0) ? fcs[i].side0 : fcs[i].side1;
    toward[k] = !(outside == FaceRef{t, rs[k]});  // arrow exits the out side tet
  }
  if (toward[0] == toward[1]) {
    if (out.results.size() != 1) throw std::logic_error("NA lune: expected 1 result");
    out.cls = TransitClass::NonAmbiguous;
  } else {
    if (out.results.size() != 2) throw std::logic_error("A lune: expected 2 results");
    out.cls = TransitClass::Ambiguous;
    detail::order_ambiguous(out.mr.T2, out.results, out.mr.new_edge_class);
  }
  return out;
}

inline TransitOutcome classify_pb_lune_neg(const Triangulation& T,
                                           const PreBranching& pb, int edge_class) {
  TransitOutcome out;
  out.mr = apply_lune_neg(T, edge_class);
  out.results = pb_transit_candidates(T, pb, out.mr);
  if (out.results.empty()) {
    out.cls = TransitClass::Stop;
    return out;
  }
  auto ecs = T.edge_classes();
  auto roles = edge_roles(T, pb);
  bool alldiag = true;
  for (const auto& ae : ecs[edge_class].around)
    if (roles[ae.tet].role[ae.e] != Role::Diagonal) alldiag = false;
  out.cls = alldiag ? TransitClass::NonAmbiguous : TransitClass::Ambiguous;
  detail::order_ambiguous(out.mr.T2, out.results, -1);
  return out;
}

/** Relative bubble transit: requires the chosen edge of the face in H.  The
 *  returned results hold all pre-branching enhancements, the unique
 *  non-ambiguous one first. */
inline TransitOutcome classify_pb_bubble(const Triangulation& T,
                                         const PreBranching& pb, int t, int f,
                                         int e) {
  TransitOutcome out;
  out.mr = apply_bubble_pos(T, t, f, e);
  auto cands = pb_transit_candidates(T, pb, out.mr);
  if (cands.size() != 3) throw std::logic_error("bubble: expected 3 enhancements");
  // NA: two diagonal abstract edges at e, none at e' = (V,X), e'' = (V,Y)
  auto [x, y] = kEdgeVerts[e];
  int db = out.mr.new_tets[1];
  auto cls = out.mr.T2.edge_class_map();
  auto ecs = out.mr.T2.edge_classes();
  int ce = cls[6 * db + e];
  int ce1 = cls[6 * db + edge_index(f, x)];
  int ce2 = cls[6 * db + edge_index(f, y)];
  std::vector<PreBranching> na, rest;
  for (const auto& cand : cands) {
    auto roles = edge_roles(out.mr.T2, cand);
    auto diag_at = [&](int cid) {
      int d = 0;
      for (const auto& ae : ecs[cid].around) {
        if (ae.tet != out.mr.new_tets[0] && ae.tet != out.mr.new_tets[1]) continue;
        if (roles[ae.tet].role[ae.e] == Role::Diagonal) ++d;
      }
      return d;
    };
    if (diag_at(ce1) == 0 && diag_at(ce2) == 0 && diag_at(ce) == 2)
      na.push_back(cand);
    else
      rest.push_back(cand);
  }
  if (na.size() != 1) throw std::logic_error("bubble: NA enhancement not unique");
  out.cls = TransitClass::NonAmbiguous;
  out.results = na;
  std::sort(rest.begin(), rest.end());
  out.results.insert(out.results.end(), rest.begin(), rest.end());
  return out;
}

inline TransitOutcome classify_pb(const Triangulation& T, const PreBranching& pb,
                                  const MoveSite& site) {
  switch (site.kind) {
    case MoveKind::MP23: return classify_pb_mp23(T, pb, site.a, site.b);
    case MoveKind::MP32: return classify_pb_mp32(T, pb, site.a);
    case MoveKind::LunePos: return classify_pb_lune_pos(T, pb, site.a, site.b);
    case MoveKind::LuneNeg: return classify_pb_lune_neg(T, pb, site.a);
    case MoveKind::BubblePos: return classify_pb_bubble(T, pb, site.a, site.b, site.c);
    case MoveKind::BubbleNeg:
      throw ValidationError("invalid-locus", "negative bubble pb transit unsupported");
  }
  throw std::logic_error("unreachable");
}

/** Transport a weak branching through a classified move: kept tets keep their
 *  orders, new tets take the smallest positive order compatible with the
 *  chosen pre-branching. */
inline WeakBranching apply_wb_transit(const Triangulation& T, const WeakBranching& wb,
                                      const MoveResult& mr, const PreBranching& pb2) {
  WeakBranching out;
  out.order.resize(mr.T2.ntets());
  for (int t = 0; t < T.ntets(); ++t)
    if (mr.tet_map[t] >= 0) out.order[mr.tet_map[t]] = wb.order[t];
  auto pat = out_patterns(mr.T2, pb2);
  for (int t : mr.new_tets) {
    auto orders = compatible_local_branchings(pat[t]);
    std::optional<Perm4> best;
    for (const auto& o : orders)
      if (o.parity() == +1 && (!best || o < *best)) best = o;
    out.order[t] = *best;
  }
  return out;
}

/** Run a script of (site, choice) steps.  choice -1 requires the step to be
 *  non-ambiguous; 0/1 select an ambiguous result (A-prevailing first). */
struct SequenceResult {
  Triangulation T2;
  PreBranching pb;
  bool na_flag = true;
};

inline SequenceResult run_transit_sequence(
    const Triangulation& T, const PreBranching& pb,
    const std::vector<std::pair<MoveSite, int>>& script) {
  SequenceResult st{T, pb, true};
  for (std::size_t i = 0; i < script.size(); ++i) {
    auto outc = classify_pb(st.T2, st.pb, script[i].first);
    if (outc.cls == TransitClass::Stop)
      throw ValidationError("transit-stop",
                            "stop at step " + std::to_string(i));
    int choice = script[i].second;
    if (outc.cls == TransitClass::NonAmbiguous) {
      if (choice > 0) throw ValidationError("invalid-locus", "step is non-ambiguous");
      choice = 0;
    } else {
      st.na_flag = false;
      if (choice < 0)
        throw ValidationError("ambiguous-transit",
                              "step " + std::to_string(i) + " is ambiguous");
    }
    st.pb = outc.results.at(choice);
    st.T2 = outc.mr.T2;
  }
  return st;
}

}  // namespace qhtri
