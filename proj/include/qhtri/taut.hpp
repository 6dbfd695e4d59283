/**
 * @brief Taut / Z2-taut detection, taut pre-branching enumeration, taut angle
 *        structures, veering predicate, and layered triangulations built from
 *        surface flip scripts.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "branch.hpp"
#include "tri.hpp"

namespace qhtri {

enum class TautVerdict { Taut, Z2Taut, Neither };

struct TautCertificate {
  std::vector<int> diag_count;        ///< per edge class
  TautVerdict verdict = TautVerdict::Neither;
  bool relative_ok = true;            ///< H edges have zero diagonals (if H given)
};

inline TautCertificate taut_verdict(const Triangulation& T, const PreBranching& pb,
                                    const std::vector<int>* hamiltonian = nullptr) {
  auto roles = edge_roles(T, pb);
  auto ecs = T.edge_classes();
  TautCertificate cert;
  cert.diag_count.assign(ecs.size(), 0);
  for (const auto& ec : ecs)
    for (const auto& ae : ec.around)
      if (roles[ae.tet].role[ae.e] == Role::Diagonal) ++cert.diag_count[ec.id];
  std::set<int> ham;
  if (hamiltonian) ham.insert(hamiltonian->begin(), hamiltonian->end());
  bool taut = true, z2 = true;
  for (std::size_t i = 0; i < cert.diag_count.size(); ++i) {
    int want = ham.count(static_cast<int>(i)) ? 0 : 2;
    if (cert.diag_count[i] != want) taut = false;
    if (cert.diag_count[i] % 2 != 0) z2 = false;
    if (ham.count(static_cast<int>(i)) && cert.diag_count[i] != 0)
      cert.relative_ok = false;
  }
  cert.verdict = taut ? TautVerdict::Taut : (z2 ? TautVerdict::Z2Taut : TautVerdict::Neither);
  return cert;
}

/** All taut pre-branchings; result.second pairs up total inversions
 *  (index of the inverse partner per entry). */
inline std::pair<std::vector<PreBranching>, std::vector<int>> enumerate_taut(
    const Triangulation& T) {
  std::vector<PreBranching> taut;
  for (const auto& pb : enumerate_prebranchings(T))
    if (taut_verdict(T, pb).verdict == TautVerdict::Taut) taut.push_back(pb);
  std::vector<int> partner(taut.size(), -1);
  for (std::size_t i = 0; i < taut.size(); ++i) {
    auto inv = total_inversion(taut[i]);
    for (std::size_t j = 0; j < taut.size(); ++j)
      if (taut[j] == inv) partner[i] = static_cast<int>(j);
  }
  return {taut, partner};
}

/** Absolute opposite-edge pair index: {01,23} -> 0, {02,13} -> 1, {03,12} -> 2. */
inline int abs_pair_of_edge(int e) {
  switch (e) {
    case 0: case 5: return 0;
    case 1: case 4: return 1;
    default: return 2;
  }
}

/** Taut angle structures: per tet the absolute pair carrying angle pi (value 1),
 *  other pairs 0; per edge class the total must be 2. Enumerates 3^#tets. */
inline std::vector<std::vector<int>> taut_angle_structures(const Triangulation& T) {
  const int n = T.ntets();
  if (n > 14) throw ValidationError("too-large", "taut angle enumeration cap");
  auto cls = T.edge_class_map();
  auto ecs = T.edge_classes();
  std::vector<std::vector<int>> out;
  std::vector<int> pick(n, 0);
  for (long long code = 0; code < static_cast<long long>(std::pow(3.0, n) + 0.5); ++code) {
    long long c = code;
    for (int t = 0; t < n; ++t) {
      pick[t] = static_cast<int>(c % 3);
      c /= 3;
    }
    std::vector<int> tot(ecs.size(), 0);
    for (int t = 0; t < n; ++t)
      for (int e = 0; e < 6; ++e)
        if (abs_pair_of_edge(e) == pick[t]) ++tot[cls[6 * t + e]];
    if (std::all_of(tot.begin(), tot.end(), [](int x) { return x == 2; }))
      out.push_back(pick);
  }
  return out;
}

/** Veering: every edge class monochromatic on its square abstract edges. */
inline bool is_veering(const Triangulation& T, const PreBranching& pb) {
  auto roles = edge_roles(T, pb);
  auto ecs = T.edge_classes();
  for (const auto& ec : ecs) {
    bool a = false, b = false;
    for (const auto& ae : ec.around) {
      Role r = roles[ae.tet].role[ae.e];
      if (r == Role::SquareA) a = true;
      if (r == Role::SquareB) b = true;
    }
    if (a && b) return false;
  }
  return true;
}

/** Color (A/B) multiset of the square abstract edges at an edge class; used by
 *  the transit classifiers. */
inline std::pair<int, int> square_color_counts(const Triangulation& T,
                                               const PreBranching& pb, int edge_class) {
  auto roles = edge_roles(T, pb);
  auto ecs = T.edge_classes();
  int a = 0, b = 0;
  for (const auto& ae : ecs[edge_class].around) {
    Role r = roles[ae.tet].role[ae.e];
    if (r == Role::SquareA) ++a;
    if (r == Role::SquareB) ++b;
  }
  return {a, b};
}

}  // namespace qhtri
