/** Shared test utilities: random triangulation generation, fixture loading. */
#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <qhtri/tri.hpp>

namespace qhtri::testutil {

inline std::string fixture_path(const std::string& rel) {
  return std::string(QHTRI_FIXTURE_DIR) + "/" + rel;
}

inline json load_json(const std::string& rel) {
  std::ifstream in(fixture_path(rel));
  if (!in) throw std::runtime_error("missing fixture " + rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return json::parse(ss.str());
}

inline Triangulation load_tri(const std::string& rel) {
  json j = load_json(rel);
  return Triangulation::from_json(j.contains("triangulation") ? j.at("triangulation") : j);
}

/** Random closed oriented pseudo-triangulation: pair up all faces with random odd
 *  permutations. Always validates; edge/vertex topology is arbitrary. */
inline Triangulation random_triangulation(int ntets, std::mt19937& rng) {
  for (;;) {
    Triangulation T;
    T.name = "random";
    T.glue.resize(ntets);
    std::vector<std::pair<int, int>> faces;
    for (int t = 0; t < ntets; ++t)
      for (int f = 0; f < 4; ++f) faces.push_back({t, f});
    std::shuffle(faces.begin(), faces.end(), rng);
    bool ok = true;
    for (std::size_t i = 0; i + 1 < faces.size(); i += 2) {
      auto [t1, f1] = faces[i];
      auto [t2, f2] = faces[i + 1];
      // random odd perm mapping f1 -> f2
      std::array<int, 3> rest1{}, rest2{};
      int k = 0;
      for (int v = 0; v < 4; ++v)
        if (v != f1) rest1[k++] = v;
      k = 0;
      for (int v = 0; v < 4; ++v)
        if (v != f2) rest2[k++] = v;
      std::shuffle(rest2.begin(), rest2.end(), rng);
      Perm4 p;
      p[f1] = f2;
      for (int j = 0; j < 3; ++j) p[rest1[j]] = rest2[j];
      if (p.parity() != -1) std::swap(p[rest1[0]], p[rest1[1]]);
      if (t1 == t2 && f1 == f2) { ok = false; break; }
      T.glue[t1][f1] = {t2, p};
      T.glue[t2][f2] = {t1, p.inverse()};
    }
    if (!ok) continue;
    try {
      T.validate();
      (void)T.edge_classes();
    } catch (const ValidationError&) {
      continue;
    }
    return T;
  }
}

}  // namespace qhtri::testutil
