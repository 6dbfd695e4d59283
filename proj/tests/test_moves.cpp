#include <catch2/catch_amalgamated.hpp>

#include <qhtri/moves.hpp>
#include <qhtri/taut.hpp>

#include "helpers.hpp"

using namespace qhtri;
using qhtri::testutil::load_json;
using qhtri::testutil::load_tri;

namespace {

/** Brute-force combinatorial isomorphism test (oriented, label-preserving up to
 *  relabeling); fine for the handful-of-tets cases in this file. */
bool isomorphic(const Triangulation& A, const Triangulation& B) {
  if (A.ntets() != B.ntets()) return false;
  const int n = A.ntets();
  std::array<int, 4> v{0, 1, 2, 3};
  for (int b0 = 0; b0 < n; ++b0) {
    std::array<int, 4> vv = v;
    do {
      Perm4 p0;
      for (int i = 0; i < 4; ++i) p0[i] = vv[i];
      if (p0.parity() != +1) continue;  // orientation-preserving maps only
      // propagate (tet map, vertex perms) from tet 0 of A -> (b0, p0)
      std::vector<int> tmap(n, -1);
      std::vector<Perm4> pmap(n);
      tmap[0] = b0;
      pmap[0] = p0;
      std::vector<int> stack{0};
      bool ok = true;
      while (!stack.empty() && ok) {
        int t = stack.back();
        stack.pop_back();
        for (int f = 0; f < 4; ++f) {
          const Gluing& g = A.glue[t][f];
          const Gluing& h = B.glue[tmap[t]][pmap[t][f]];
          Perm4 q = h.perm * pmap[t] * g.perm.inverse();
          if (tmap[g.tet] < 0) {
            tmap[g.tet] = h.tet;
            pmap[g.tet] = q;
            stack.push_back(g.tet);
          } else if (tmap[g.tet] != h.tet || !(pmap[g.tet] == q)) {
            ok = false;
            break;
          }
        }
      }
      if (ok && std::all_of(tmap.begin(), tmap.end(), [](int x) { return x >= 0; }))
        return true;
    } while (std::next_permutation(vv.begin(), vv.end()));
  }
  return false;
}

std::vector<PreBranching> structure_pbs(const Triangulation& T, const json& fx) {
  std::vector<PreBranching> out;
  for (const auto& [k, v] : fx.at("structures").items()) {
    if (v.contains("orders")) {
      WeakBranching wb;
      for (const auto& o : v.at("orders")) {
        Perm4 p;
        for (int i = 0; i < 4; ++i) p[i] = o.at(i).get<int>();
        wb.order.push_back(p);
      }
      out.push_back(induced_prebranching(T, wb));
    } else {
      PreBranching pb;
      pb.out_side = v.at("prebranching").get<std::vector<int>>();
      out.push_back(pb);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("2->3 on fig8: combinatorics of the result") {
  auto T = load_tri("fig8.json");
  for (int f = 0; f < 4; ++f) {
    auto mr = apply_mp23(T, 0, f);
    CHECK(mr.T2.ntets() == 3);
    auto ecs = mr.T2.edge_classes();
    CHECK(ecs.size() == 3);  // one new edge
    REQUIRE(mr.new_edge_class >= 0);
    CHECK(ecs[mr.new_edge_class].valence() == 3);
    CHECK(mr.edge_from[mr.new_edge_class] == -1);
    int fresh = 0;
    for (int x : mr.edge_from)
      if (x < 0) ++fresh;
    CHECK(fresh == 1);
    for (const auto& vl : mr.T2.vertex_links()) CHECK(vl.euler == 0);
    // the three apex-equator edge pairs gain one abstract edge each and the
    // three equator edges lose one: surviving classes gain 3 in total
    auto old_ecs = T.edge_classes();
    int oldtot = 0, newtot = 0;
    for (const auto& ec : old_ecs) oldtot += ec.valence();
    for (const auto& ec : ecs)
      if (mr.edge_from[ec.id] >= 0) newtot += ec.valence();
    CHECK(newtot == oldtot + 3);
  }
}

TEST_CASE("2->3 then 3->2 is the identity up to isomorphism") {
  auto T = load_tri("fig8.json");
  for (int f = 0; f < 4; ++f) {
    auto mr = apply_mp23(T, 0, f);
    auto back = apply_mp32(mr.T2, mr.new_edge_class);
    CHECK(back.T2.ntets() == 2);
    CHECK(isomorphic(T, back.T2));
  }
  auto S = load_tri("fig8-sister.json");
  auto mr = apply_mp23(S, 0, 2);
  auto back = apply_mp32(mr.T2, mr.new_edge_class);
  CHECK(isomorphic(S, back.T2));
}

TEST_CASE("pre-branching transit through 2->3: counts match the square signature") {
  for (const char* name : {"fig8.json", "fig8-sister.json"}) {
    auto T = load_tri(name);
    for (const auto& pb : enumerate_prebranchings(T)) {
      for (int t = 0; t < T.ntets(); ++t) {
        for (int f = 0; f < 4; ++f) {
          if (T.glue[t][f].tet == t) continue;
          int shared = shared_square_count(T, pb, t, f);
          CHECK((shared == 1 || shared == 2));
          auto outc = classify_pb_mp23(T, pb, t, f);
          if (shared == 1) {
            CHECK(outc.cls == TransitClass::NonAmbiguous);
            REQUIRE(outc.results.size() == 1);
          } else {
            CHECK(outc.cls == TransitClass::Ambiguous);
            REQUIRE(outc.results.size() == 2);
            // the two enhancements have opposite prevailing colors at the
            // central edge
            auto [a0, b0] =
                square_color_counts(outc.mr.T2, outc.results[0], outc.mr.new_edge_class);
            auto [a1, b1] =
                square_color_counts(outc.mr.T2, outc.results[1], outc.mr.new_edge_class);
            CHECK(a0 - b0 > 0);
            CHECK(a1 - b1 < 0);
          }
          for (const auto& q : outc.results)
            CHECK(prebranching_valid(outc.mr.T2, q));
        }
      }
    }
  }
}

TEST_CASE("non-ambiguous 2->3 transit of a taut structure stays taut") {
  auto T = load_tri("fig8.json");
  auto fx = load_json("fig8.json");
  for (const auto& pb : structure_pbs(T, fx)) {
    REQUIRE(taut_verdict(T, pb).verdict == TautVerdict::Taut);
    for (int t = 0; t < T.ntets(); ++t)
      for (int f = 0; f < 4; ++f) {
        auto outc = classify_pb_mp23(T, pb, t, f);
        if (outc.cls != TransitClass::NonAmbiguous) continue;
        CHECK(taut_verdict(outc.mr.T2, outc.results[0]).verdict == TautVerdict::Taut);
      }
  }
}

TEST_CASE("3->2 transit: inverse classification and round trip of the structure") {
  auto T = load_tri("fig8.json");
  for (const auto& pb : enumerate_prebranchings(T)) {
    auto outc = classify_pb_mp23(T, pb, 0, 0);
    for (const auto& q : outc.results) {
      auto back = classify_pb_mp32(outc.mr.T2, q, outc.mr.new_edge_class);
      REQUIRE(back.cls != TransitClass::Stop);
      if (outc.cls == TransitClass::NonAmbiguous)
        CHECK(back.cls == TransitClass::NonAmbiguous);
      // one of the back-transits matches the original structure's role data
      auto roles0 = edge_roles(T, pb);
      bool matched = false;
      for (const auto& r : back.results) {
        auto roles1 = edge_roles(back.mr.T2, r);
        std::multiset<int> sig0, sig1;
        for (const auto& lr : roles0)
          for (int e = 0; e < 6; ++e) sig0.insert(static_cast<int>(lr.role[e]));
        for (const auto& lr : roles1)
          for (int e = 0; e < 6; ++e) sig1.insert(static_cast<int>(lr.role[e]));
        if (sig0 == sig1) matched = true;
      }
      CHECK(matched);
    }
  }
}

TEST_CASE("positive lune: combinatorics, classification, exact round trip") {
  for (const char* name : {"fig8.json", "fig8-sister.json"}) {
    auto T = load_tri(name);
    auto fcm = face_class_map(T);
    for (const auto& pb : enumerate_prebranchings(T)) {
      for (int t = 0; t < T.ntets(); ++t)
        for (int e = 0; e < 6; ++e) {
          auto rs = edge_faces(e);
          if (fcm[4 * t + rs[0]] == fcm[4 * t + rs[1]]) continue;
          auto outc = classify_pb_lune_pos(T, pb, t, e);
          CHECK(outc.mr.T2.ntets() == T.ntets() + 2);
          auto ecs2 = outc.mr.T2.edge_classes();
          CHECK(ecs2[outc.mr.new_edge_class].valence() == 2);
          for (const auto& vl : outc.mr.T2.vertex_links()) CHECK(vl.euler == 0);
          CHECK(outc.results.size() == (outc.cls == TransitClass::NonAmbiguous ? 1 : 2));
          // naked round trip restores the identical gluing table
          auto back = apply_lune_neg(outc.mr.T2, outc.mr.new_edge_class);
          REQUIRE(back.T2.ntets() == T.ntets());
          for (int tt = 0; tt < T.ntets(); ++tt)
            for (int ff = 0; ff < 4; ++ff) {
              CHECK(back.T2.glue[tt][ff].tet == T.glue[tt][ff].tet);
              CHECK(back.T2.glue[tt][ff].perm == T.glue[tt][ff].perm);
            }
          // structure round trip: the negative transit recovers exactly pb
          for (const auto& q : outc.results) {
            auto nb = classify_pb_lune_neg(outc.mr.T2, q, outc.mr.new_edge_class);
            REQUIRE(nb.cls != TransitClass::Stop);
            REQUIRE(nb.results.size() == 1);
            CHECK(nb.results[0] == pb);
            if (outc.cls == TransitClass::NonAmbiguous)
              CHECK(nb.cls == TransitClass::NonAmbiguous);
            else
              CHECK(nb.cls == TransitClass::Ambiguous);
          }
        }
    }
  }
}

TEST_CASE("bubble: enhancements, new sphere vertex, H bookkeeping, round trip") {
  auto T = load_tri("fig8.json");
  T.hamiltonian = std::vector<int>{0};  // single cusp: any edge loop is quasi-regular
  auto cls = T.edge_class_map();
  auto fx = load_json("fig8.json");
  for (const auto& pb : structure_pbs(T, fx)) {
    for (int t = 0; t < T.ntets(); ++t)
      for (int f = 0; f < 4; ++f)
        for (int e = 0; e < 6; ++e) {
          auto [x, y] = kEdgeVerts[e];
          if (x == f || y == f) continue;
          if (cls[6 * t + e] != 0) continue;  // the H edge
          auto outc = classify_pb_bubble(T, pb, t, f, e);
          CHECK(outc.cls == TransitClass::NonAmbiguous);
          CHECK(outc.results.size() == 3);  // NA first, then the other two
          REQUIRE(outc.mr.T2.hamiltonian.has_value());
          CHECK(outc.mr.T2.hamiltonian->size() == 2);
          int spheres = 0, tori = 0;
          for (const auto& vl : outc.mr.T2.vertex_links()) {
            if (vl.euler == 2) ++spheres;
            if (vl.euler == 0) ++tori;
          }
          CHECK(spheres == 1);
          CHECK(tori == 1);
          // relative tautness carries to the NA enhancement for taut input
          auto cert = taut_verdict(outc.mr.T2, outc.results[0],
                                   &*outc.mr.T2.hamiltonian);
          CHECK(cert.relative_ok);
          // exact round trip, including H
          auto back = apply_bubble_neg(outc.mr.T2, outc.mr.new_tets[0]);
          REQUIRE(back.T2.ntets() == T.ntets());
          for (int tt = 0; tt < T.ntets(); ++tt)
            for (int ff = 0; ff < 4; ++ff) {
              CHECK(back.T2.glue[tt][ff].tet == T.glue[tt][ff].tet);
              CHECK(back.T2.glue[tt][ff].perm == T.glue[tt][ff].perm);
            }
          REQUIRE(back.T2.hamiltonian.has_value());
          CHECK(*back.T2.hamiltonian == std::vector<int>{0});
        }
  }
}

TEST_CASE("transit sequences: NA flag and ambiguous choice plumbing") {
  auto T = load_tri("fig8-sister.json");
  auto fx = load_json("fig8-sister.json");
  auto pbs = structure_pbs(T, fx);
  REQUIRE(!pbs.empty());
  // find a structure with one NA site and a structure with an ambiguous site
  int na_t = -1, na_f = -1, am_t = -1, am_f = -1;
  PreBranching pb = pbs[0], am_pb;
  for (int t = 0; t < T.ntets(); ++t)
    for (int f = 0; f < 4; ++f)
      if (na_t < 0 && shared_square_count(T, pb, t, f) == 1) na_t = t, na_f = f;
  for (const auto& cand : enumerate_prebranchings(T))
    for (int t = 0; t < T.ntets(); ++t)
      for (int f = 0; f < 4; ++f)
        if (am_t < 0 && shared_square_count(T, cand, t, f) == 2)
          am_t = t, am_f = f, am_pb = cand;
  REQUIRE(na_t >= 0);
  REQUIRE(am_t >= 0);
  auto seq_na = run_transit_sequence(T, pb, {{MoveSite::mp23(na_t, na_f), -1}});
  CHECK(seq_na.na_flag);
  CHECK(seq_na.T2.ntets() == 3);
  CHECK_THROWS_AS(run_transit_sequence(T, am_pb, {{MoveSite::mp23(am_t, am_f), -1}}),
                  ValidationError);
  auto seq_am = run_transit_sequence(T, am_pb, {{MoveSite::mp23(am_t, am_f), 1}});
  CHECK_FALSE(seq_am.na_flag);
  CHECK(prebranching_valid(seq_am.T2, seq_am.pb));
}
