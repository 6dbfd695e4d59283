#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <qhtri/tri.hpp>

#include "helpers.hpp"

using namespace qhtri;

namespace {

/** Independent union-find oracle for edge classes. */
std::vector<int> uf_edge_classes(const Triangulation& T) {
  const int n = T.ntets();
  std::vector<int> uf(6 * n);
  std::iota(uf.begin(), uf.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  for (int t = 0; t < n; ++t)
    for (int f = 0; f < 4; ++f)
      for (int e = 0; e < 6; ++e) {
        auto [a, b] = kEdgeVerts[e];
        if (a == f || b == f) continue;
        const Gluing& g = T.glue[t][f];
        int ne = edge_index(g.perm[a], g.perm[b]);
        uf[find(6 * t + e)] = find(6 * g.tet + ne);
      }
  std::vector<int> root(6 * n);
  for (int i = 0; i < 6 * n; ++i) root[i] = find(i);
  return root;
}

Triangulation doubled_tet() {
  // two tets glued along all four faces, each pairing the odd "swap the first two
  // remaining labels" map
  Triangulation T;
  T.name = "doubled";
  T.glue.resize(2);
  for (int f = 0; f < 4; ++f) {
    std::array<int, 3> rest{};
    int k = 0;
    for (int v = 0; v < 4; ++v)
      if (v != f) rest[k++] = v;
    Perm4 p;
    p[f] = f;
    p[rest[0]] = rest[1];
    p[rest[1]] = rest[0];
    p[rest[2]] = rest[2];
    T.glue[0][f] = {1, p};
    T.glue[1][f] = {0, p.inverse()};
  }
  T.validate();
  return T;
}

}  // namespace

TEST_CASE("perm4 basics") {
  Perm4 p{{1, 0, 2, 3}};
  CHECK(p.parity() == -1);
  CHECK((p * p) == Perm4::identity());
  CHECK(p.inverse() == p);
  CHECK(Perm4::identity().parity() == +1);
}

TEST_CASE("doubled tet edge classes agree with union-find oracle") {
  auto T = doubled_tet();
  auto cls = T.edge_class_map();
  auto uf = uf_edge_classes(T);
  // same partition
  std::map<std::pair<int, int>, int> seen;
  for (std::size_t i = 0; i < cls.size(); ++i)
    for (std::size_t j = 0; j < cls.size(); ++j)
      CHECK((cls[i] == cls[j]) == (uf[i] == uf[j]));
  // valences sum to 6 * ntets
  auto ecs = T.edge_classes();
  int total = 0;
  for (const auto& ec : ecs) total += ec.valence();
  CHECK(total == 6 * T.ntets());
}

TEST_CASE("random triangulations: walk partition equals union-find partition") {
  std::mt19937 rng(20240817);
  for (int trial = 0; trial < 25; ++trial) {
    auto T = testutil::random_triangulation(2 + trial % 3, rng);
    auto cls = T.edge_class_map();
    auto uf = uf_edge_classes(T);
    for (std::size_t i = 0; i < cls.size(); ++i)
      for (std::size_t j = 0; j < cls.size(); ++j)
        REQUIRE((cls[i] == cls[j]) == (uf[i] == uf[j]));
  }
}

TEST_CASE("serialize/parse round trip") {
  auto T = doubled_tet();
  auto T2 = Triangulation::parse(T.serialize());
  CHECK(T2.serialize() == T.serialize());
  CHECK(T2.ntets() == 2);
}

TEST_CASE("validation errors") {
  // unglued face: json with wrong tet index
  json j;
  j["name"] = "bad";
  j["tets"] = 1;
  j["gluings"] = json::array();
  json row = json::array();
  for (int f = 0; f < 4; ++f) row.push_back(json::array({1, json({0, 1, 2, 3})}));
  j["gluings"].push_back(row);
  CHECK_THROWS_AS(Triangulation::from_json(j), ValidationError);

  // even permutation must be rejected
  auto T = doubled_tet();
  json good = T.to_json();
  good["gluings"][0][0][1] = json({0, 1, 2, 3});  // identity (even)
  CHECK_THROWS_AS(Triangulation::from_json(good), ValidationError);
}

TEST_CASE("vertex links of random triangulations have consistent Euler counts") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    auto T = testutil::random_triangulation(3, rng);
    auto links = T.vertex_links();
    int tri_total = 0;
    for (const auto& l : links) {
      tri_total += static_cast<int>(l.triangles.size());
      CHECK(l.euler % 2 == 0);  // closed orientable surface
    }
    CHECK(tri_total == 4 * T.ntets());
  }
}
