/**
 * @brief Core data model: oriented ideal triangulations with SnapPea-style face
 *        pairings, JSON (de)serialization, edge classes and vertex links.
 *
 * Conventions:
 *  - local vertices 0..3 of every tetrahedron are declared positively oriented;
 *  - face f of a tetrahedron is the face opposite local vertex f;
 *  - a pairing permutation maps local vertices of this tet to the glued tet and
 *    must be odd (orientation-reversing on the shared face);
 *  - local edges are numbered 01,02,03,12,13,23 -> 0..5.
 */
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace qhtri {

using json = nlohmann::json;  // std::map-backed: object keys come out sorted

/** Error with a stable machine-readable code (used for CLI exit mapping). */
struct ValidationError : std::runtime_error {
  std::string code;
  ValidationError(std::string c, const std::string& msg)
      : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

struct NumericError : std::runtime_error {
  std::string code;
  NumericError(std::string c, const std::string& msg)
      : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

struct Perm4 {
  std::array<int, 4> p{0, 1, 2, 3};

  int operator[](int i) const { return p[i]; }
  int& operator[](int i) { return p[i]; }
  bool operator==(const Perm4&) const = default;
  auto operator<=>(const Perm4&) const = default;

  static Perm4 identity() { return Perm4{}; }

  Perm4 inverse() const {
    Perm4 q;
    for (int i = 0; i < 4; ++i) q.p[p[i]] = i;
    return q;
  }
  /** (a*b)[i] = a[b[i]] : apply b first. */
  friend Perm4 operator*(const Perm4& a, const Perm4& b) {
    Perm4 c;
    for (int i = 0; i < 4; ++i) c.p[i] = a.p[b.p[i]];
    return c;
  }
  int parity() const {  // +1 even, -1 odd
    int s = 1;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (p[i] > p[j]) s = -s;
    return s;
  }
  bool valid() const {
    std::array<bool, 4> seen{};
    for (int i = 0; i < 4; ++i) {
      if (p[i] < 0 || p[i] > 3 || seen[p[i]]) return false;
      seen[p[i]] = true;
    }
    return true;
  }
};

/** Parity of an arbitrary sequence of distinct small ints. */
inline int seq_parity(const std::vector<int>& v) {
  int s = 1;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (v[i] > v[j]) s = -s;
  return s;
}

// local edge <-> endpoint tables
inline constexpr std::array<std::array<int, 2>, 6> kEdgeVerts{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

inline int edge_index(int a, int b) {
  if (a > b) std::swap(a, b);
  static constexpr int tab[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
  int e = tab[a][b];
  if (e < 0) throw std::logic_error("edge_index: degenerate");
  return e;
}

/** The two faces of a tet containing local edge e (= the two vertices not on e). */
inline std::array<int, 2> edge_faces(int e) {
  auto [a, b] = kEdgeVerts[e];
  std::array<int, 2> f{};
  int k = 0;
  for (int v = 0; v < 4; ++v)
    if (v != a && v != b) f[k++] = v;
  return f;
}

/** Opposite local edge (shares no endpoint). */
inline int opposite_edge(int e) {
  auto f = edge_faces(e);
  return edge_index(f[0], f[1]);
}

struct FaceRef {
  int tet = 0;
  int face = 0;  // opposite vertex
  bool operator==(const FaceRef&) const = default;
  auto operator<=>(const FaceRef&) const = default;
};

struct Gluing {
  int tet = -1;   ///< glued tetrahedron
  Perm4 perm;     ///< vertex bijection this-tet -> glued-tet
};

/** One abstract edge: local edge `e` of tetrahedron `tet`; `dir` is the direction
 *  relative to the class representative (+1: kEdgeVerts order, -1: reversed). */
struct AbstractEdge {
  int tet = 0;
  int e = 0;
  int dir = +1;
  bool operator==(const AbstractEdge&) const = default;
};

struct EdgeClass {
  int id = 0;                            ///< index into edge class list (sorted by rep)
  std::vector<AbstractEdge> around;      ///< cyclic walk around the class
  int valence() const { return static_cast<int>(around.size()); }
};

struct VertexLink {
  int id = 0;
  std::vector<std::pair<int, int>> triangles;  ///< (tet, vertex)
  long long euler = 0;
};

class Triangulation {
 public:
  std::string name;
  std::vector<std::array<Gluing, 4>> glue;  ///< glue[t][f]
  std::optional<std::vector<int>> hamiltonian;  ///< edge class ids

  int ntets() const { return static_cast<int>(glue.size()); }

  const Gluing& gluing(int t, int f) const { return glue[t][f]; }

  void validate() const {
    const int n = ntets();
    if (n <= 0) throw ValidationError("malformed-syntax", "no tetrahedra");
    for (int t = 0; t < n; ++t) {
      for (int f = 0; f < 4; ++f) {
        const Gluing& g = glue[t][f];
        if (g.tet < 0 || g.tet >= n)
          throw ValidationError("non-involutive-pairing", "face glued to missing tet");
        if (!g.perm.valid())
          throw ValidationError("malformed-syntax", "invalid permutation");
        if (g.perm.parity() != -1)
          throw ValidationError("orientation-violation",
                                "pairing permutation must be odd");
        int f2 = g.perm[f];
        const Gluing& back = glue[g.tet][f2];
        if (back.tet != t || !(back.perm * g.perm == Perm4::identity()))
          throw ValidationError("non-involutive-pairing", "pairings not involutive");
        if (g.tet == t && f2 == f)
          throw ValidationError("non-involutive-pairing", "face glued to itself");
      }
    }
  }

  /** Cyclic walks around every edge class, sorted by smallest (tet, local edge). */
  std::vector<EdgeClass> edge_classes() const {
    const int n = ntets();
    std::vector<int> cls(6 * n, -1);
    std::vector<EdgeClass> out;
    for (int t0 = 0; t0 < n; ++t0) {
      for (int e0 = 0; e0 < 6; ++e0) {
        if (cls[6 * t0 + e0] >= 0) continue;
        EdgeClass ec;
        ec.id = static_cast<int>(out.size());
        int t = t0, a = kEdgeVerts[e0][0], b = kEdgeVerts[e0][1];
        int exit_face = edge_faces(e0)[0];
        const int start_t = t, start_exit = exit_face;
        const int start_a = a;
        do {
          int e = edge_index(a, b);
          int dir = (kEdgeVerts[e][0] == a) ? +1 : -1;
          if (cls[6 * t + e] >= 0)
            throw ValidationError("malformed-syntax", "edge walk revisits an edge");
          cls[6 * t + e] = ec.id;
          ec.around.push_back({t, e, dir});
          const Gluing& g = glue[t][exit_face];
          int na = g.perm[a], nb = g.perm[b], nf = g.perm[exit_face];
          t = g.tet;
          a = na;
          b = nb;
          // entered through nf; exit through the other face at the edge
          auto fs = edge_faces(edge_index(a, b));
          exit_face = (fs[0] == nf) ? fs[1] : fs[0];
        } while (!(t == start_t && edge_index(a, b) == e0 && exit_face == start_exit));
        if (a != start_a)
          throw ValidationError("orientation-violation",
                                "edge class reverses orientation");
        out.push_back(std::move(ec));
      }
    }
    return out;
  }

  /** cls[6*t+e] = edge class id. */
  std::vector<int> edge_class_map() const {
    auto ecs = edge_classes();
    std::vector<int> cls(6 * ntets(), -1);
    for (const auto& ec : ecs)
      for (const auto& ae : ec.around) cls[6 * ae.tet + ae.e] = ec.id;
    return cls;
  }

  /** Union-find over directed edge *ends*; used for vertex-link vertices.
   *  End (t, e, k) = endpoint kEdgeVerts[e][k] of local edge e of tet t. */
  std::vector<int> edge_end_classes() const {
    const int n = ntets();
    std::vector<int> uf(12 * n);
    for (std::size_t i = 0; i < uf.size(); ++i) uf[i] = static_cast<int>(i);
    auto find = [&](int x) {
      while (uf[x] != x) x = uf[x] = uf[uf[x]];
      return x;
    };
    auto uni = [&](int x, int y) { uf[find(x)] = find(y); };
    auto idx = [&](int t, int e, int k) { return 12 * t + 2 * e + k; };
    for (int t = 0; t < n; ++t)
      for (int f = 0; f < 4; ++f) {
        const Gluing& g = glue[t][f];
        for (int e = 0; e < 6; ++e) {
          auto [a, b] = kEdgeVerts[e];
          if (a == f || b == f) continue;  // edge not on face f
          int na = g.perm[a], nb = g.perm[b];
          int ne = edge_index(na, nb);
          int k0 = (kEdgeVerts[ne][0] == na) ? 0 : 1;
          uni(idx(t, e, 0), idx(g.tet, ne, k0));
          uni(idx(t, e, 1), idx(g.tet, ne, 1 - k0));
        }
      }
    std::vector<int> root(12 * n);
    for (std::size_t i = 0; i < uf.size(); ++i) root[i] = find(static_cast<int>(i));
    return root;
  }

  /** Vertex links with Euler characteristics (chi = V - F/2 on the link). */
  std::vector<VertexLink> vertex_links() const {
    const int n = ntets();
    // components of link triangles (t, v) via side gluings
    std::vector<int> uf(4 * n);
    for (std::size_t i = 0; i < uf.size(); ++i) uf[i] = static_cast<int>(i);
    auto find = [&](int x) {
      while (uf[x] != x) x = uf[x] = uf[uf[x]];
      return x;
    };
    for (int t = 0; t < n; ++t)
      for (int f = 0; f < 4; ++f)
        for (int v = 0; v < 4; ++v) {
          if (v == f) continue;
          const Gluing& g = glue[t][f];
          int x = 4 * t + v, y = 4 * g.tet + g.perm[v];
          uf[find(x)] = find(y);
        }
    // group triangles
    std::map<int, int> comp_id;
    std::vector<VertexLink> links;
    for (int t = 0; t < n; ++t)
      for (int v = 0; v < 4; ++v) {
        int r = find(4 * t + v);
        auto it = comp_id.find(r);
        if (it == comp_id.end()) {
          it = comp_id.emplace(r, static_cast<int>(links.size())).first;
          links.push_back({static_cast<int>(links.size()), {}, 0});
        }
        links[it->second].triangles.push_back({t, v});
      }
    // V per component: edge-end classes located at each link
    auto ends = edge_end_classes();
    std::vector<std::set<int>> vset(links.size());
    for (int t = 0; t < n; ++t)
      for (int e = 0; e < 6; ++e)
        for (int k = 0; k < 2; ++k) {
          int v = kEdgeVerts[e][k];  // the end sits at vertex v -> link triangle (t,v)
          int li = comp_id.at(find(4 * t + v));
          vset[li].insert(ends[12 * t + 2 * e + k]);
        }
    for (auto& l : links) {
      long long F = static_cast<long long>(l.triangles.size());
      long long V = static_cast<long long>(vset[l.id].size());
      l.euler = V - F / 2;  // E = 3F/2
    }
    return links;
  }

  // ------------------------------------------------------------------ JSON

  json to_json() const {
    json j;
    j["name"] = name;
    j["tets"] = ntets();
    json gl = json::array();
    for (int t = 0; t < ntets(); ++t) {
      json row = json::array();
      for (int f = 0; f < 4; ++f) {
        const Gluing& g = glue[t][f];
        row.push_back(json::array({g.tet, json(g.perm.p)}));
      }
      gl.push_back(row);
    }
    j["gluings"] = gl;
    if (hamiltonian) j["hamiltonian"] = *hamiltonian;
    return j;
  }

  static Triangulation from_json(const json& j) {
    Triangulation tr;
    try {
      tr.name = j.value("name", "");
      int n = j.at("tets").get<int>();
      const json& gl = j.at("gluings");
      if (static_cast<int>(gl.size()) != n)
        throw ValidationError("malformed-syntax", "gluings size mismatch");
      tr.glue.resize(n);
      for (int t = 0; t < n; ++t) {
        if (gl[t].size() != 4)
          throw ValidationError("malformed-syntax", "need 4 gluings per tet");
        for (int f = 0; f < 4; ++f) {
          const json& g = gl[t][f];
          tr.glue[t][f].tet = g.at(0).get<int>();
          auto pv = g.at(1).get<std::vector<int>>();
          if (pv.size() != 4) throw ValidationError("malformed-syntax", "perm size");
          for (int i = 0; i < 4; ++i) tr.glue[t][f].perm[i] = pv[i];
        }
      }
      if (j.contains("hamiltonian"))
        tr.hamiltonian = j.at("hamiltonian").get<std::vector<int>>();
    } catch (const json::exception& e) {
      throw ValidationError("malformed-syntax", e.what());
    }
    tr.validate();
    return tr;
  }

  static Triangulation parse(const std::string& text) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ValidationError("malformed-syntax", e.what());
    }
    return from_json(j);
  }

  std::string serialize() const { return to_json().dump(2) + "\n"; }
};

}  // namespace qhtri
