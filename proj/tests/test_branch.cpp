#include <catch2/catch_amalgamated.hpp>

#include <qhtri/branch.hpp>

#include "helpers.hpp"

using namespace qhtri;

TEST_CASE("every 2-in/2-out pattern has exactly 4 compatible orders, 2 per sign") {
  int patterns = 0;
  for (int m = 0; m < 16; ++m) {
    std::array<bool, 4> out{};
    int c = 0;
    for (int f = 0; f < 4; ++f) {
      out[f] = (m >> f) & 1;
      c += out[f];
    }
    if (c != 2) continue;
    ++patterns;
    auto orders = compatible_local_branchings(out);
    REQUIRE(orders.size() == 4);
    int pos = 0;
    for (const auto& o : orders) {
      if (o.parity() == +1) ++pos;
      CHECK(local_out_faces(o) == out);
    }
    CHECK(pos == 2);
  }
  CHECK(patterns == 6);  // 6 local pre-branchings x 4 orders = 24 = all orders
}

TEST_CASE("edge role counts are (2,2,2) and square cycle is consistent") {
  for (int m = 0; m < 16; ++m) {
    std::array<bool, 4> out{};
    int c = 0;
    for (int f = 0; f < 4; ++f) {
      out[f] = (m >> f) & 1;
      c += out[f];
    }
    if (c != 2) continue;
    auto lr = local_edge_roles(out);
    int d = 0, a = 0, b = 0;
    for (int e = 0; e < 6; ++e) {
      if (lr.role[e] == Role::Diagonal) ++d;
      if (lr.role[e] == Role::SquareA) ++a;
      if (lr.role[e] == Role::SquareB) ++b;
      // opposite edges share roles' pair structure: diagonal opposite diagonal
      if (lr.role[e] == Role::Diagonal) CHECK(lr.role[opposite_edge(e)] == Role::Diagonal);
    }
    CHECK(d == 2);
    CHECK(a == 2);
    CHECK(b == 2);
    // square directions form a single 4-cycle on the 4 non-diagonal vertices
    std::map<int, int> succ;
    for (int e = 0; e < 6; ++e)
      if (lr.role[e] != Role::Diagonal) succ[lr.dir[e][0]] = lr.dir[e][1];
    REQUIRE(succ.size() == 4);
    int v = succ.begin()->first;
    std::set<int> visited;
    for (int i = 0; i < 4; ++i) {
      visited.insert(v);
      v = succ.at(v);
    }
    CHECK(v == succ.begin()->first);
    CHECK(visited.size() == 4);
  }
}

TEST_CASE("roles identical across all 4 compatible orders; A/B swap never happens") {
  for (int m = 0; m < 16; ++m) {
    std::array<bool, 4> out{};
    int c = 0;
    for (int f = 0; f < 4; ++f) {
      out[f] = (m >> f) & 1;
      c += out[f];
    }
    if (c != 2) continue;
    auto lr = local_edge_roles(out);
    for (const auto& o : compatible_local_branchings(out)) {
      // diagonals must be {o0,o2},{o1,o3} regardless of representative
      CHECK(lr.role[edge_index(o[0], o[2])] == Role::Diagonal);
      CHECK(lr.role[edge_index(o[1], o[3])] == Role::Diagonal);
    }
  }
}

TEST_CASE("induced pre-branching round trips and total inversion is an involution") {
  std::mt19937 rng(99);
  int tested = 0;
  for (int trial = 0; trial < 40 && tested < 10; ++trial) {
    auto T = testutil::random_triangulation(2 + trial % 2, rng);
    auto pbs = enumerate_prebranchings(T);
    if (pbs.empty()) continue;
    ++tested;
    for (const auto& pb : pbs) {
      auto wb = normalize_weak_branching(T, pb);
      for (const auto& o : wb.order) CHECK(o.parity() == +1);
      CHECK(induced_prebranching(T, wb) == pb);
      CHECK(total_inversion(total_inversion(pb)) == pb);
      CHECK(prebranching_valid(T, total_inversion(pb)));
      // inversion preserves roles
      auto r1 = edge_roles(T, pb);
      auto r2 = edge_roles(T, total_inversion(pb));
      for (int t = 0; t < T.ntets(); ++t)
        for (int e = 0; e < 6; ++e) CHECK(r1[t].role[e] == r2[t].role[e]);
    }
  }
  CHECK(tested > 0);
}

TEST_CASE("pair transport reproduces the cyclic renaming rule") {
  // sigma = (0123) acting on an even order: new triple = (old1, old0, old2) with eps=-1
  Perm4 id = Perm4::identity();
  Perm4 sigma{{1, 2, 3, 0}};  // order obtained by rotating the identity order
  auto tr = pair_transport(id, sigma);
  CHECK(tr.eps == -1);
  CHECK(tr.pi == std::array<int, 3>{1, 0, 2});
  // tau = (01)(23): fixes everything
  Perm4 tau{{1, 0, 3, 2}};
  auto tr2 = pair_transport(id, tau);
  CHECK(tr2.eps == +1);
  CHECK(tr2.pi == std::array<int, 3>{0, 1, 2});
}
