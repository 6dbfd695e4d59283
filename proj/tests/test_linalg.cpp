#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <qhtri/linalg.hpp>

using namespace qhtri;

namespace {
IMat random_mat(std::mt19937& rng, int m, int n, int lo = -5, int hi = 5) {
  std::uniform_int_distribution<int> d(lo, hi);
  IMat a = imat_zero(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a[i][j] = d(rng);
  return a;
}
}  // namespace

TEST_CASE("hermite: A*U == H and U unimodular") {
  std::mt19937 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = random_mat(rng, 3 + trial % 3, 4 + trial % 2);
    auto hr = hermite_columns(a);
    CHECK(imat_mul(a, hr.u) == hr.h);
    // unimodular: integer inverse exists -> SNF all ones
    auto s = smith_normal_form(hr.u);
    for (std::size_t i = 0; i < hr.u.size(); ++i) CHECK(s.s[i][i] == 1);
  }
}

TEST_CASE("integer_solve finds solutions and detects infeasibility") {
  std::mt19937 rng(2);
  for (int trial = 0; trial < 60; ++trial) {
    auto a = random_mat(rng, 3, 5);
    // feasible by construction
    IVec x0(5);
    std::uniform_int_distribution<int> d(-4, 4);
    for (auto& v : x0) v = d(rng);
    auto b = imat_mul_vec(a, x0);
    auto sol = integer_solve(a, b);
    REQUIRE(sol.has_value());
    CHECK(imat_mul_vec(a, *sol) == b);
  }
  // infeasible: 2x = 1
  IMat a = {{Int(2)}};
  CHECK(!integer_solve(a, {Int(1)}).has_value());
}

TEST_CASE("integer_kernel spans the kernel") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    auto a = random_mat(rng, 2 + trial % 3, 5);
    auto k = integer_kernel(a);
    for (const auto& v : k) {
      auto z = imat_mul_vec(a, v);
      for (const auto& zi : z) CHECK(zi == 0);
    }
    // rank-nullity
    auto hr = hermite_columns(a);
    CHECK(k.size() == cols(a) - hr.rank);
  }
}

TEST_CASE("smith normal form: U*A*V == S, divisibility chain") {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    auto a = random_mat(rng, 3 + trial % 2, 3 + (trial / 2) % 3);
    auto sr = smith_normal_form(a);
    CHECK(imat_mul(imat_mul(sr.u, a), sr.v) == sr.s);
    for (std::size_t i = 0; i + 1 < std::min(rows(a), cols(a)); ++i) {
      if (sr.s[i + 1][i + 1] != 0) {
        REQUIRE(sr.s[i][i] != 0);
        CHECK(sr.s[i + 1][i + 1] % sr.s[i][i] == 0);
      }
    }
    for (std::size_t i = 0; i < std::min(rows(a), cols(a)); ++i)
      for (std::size_t j = 0; j < std::min(rows(a), cols(a)); ++j)
        if (i != j) CHECK(sr.s[i][j] == 0);
  }
}

TEST_CASE("cone extreme rays: first orthant slice") {
  // {x : x0 - x1 = 0, x >= 0} in R^3 -> rays (1,1,0), (0,0,1)
  IMat a = {{Int(1), Int(-1), Int(0)}};
  auto rays = cone_extreme_rays(a);
  REQUIRE(rays.size() == 2);
  CHECK(rays[0] == IVec{Int(0), Int(0), Int(1)});
  CHECK(rays[1] == IVec{Int(1), Int(1), Int(0)});
}

TEST_CASE("cone: trivial when constraints force zero") {
  // x0 + x1 = 0, x >= 0 -> only 0
  IMat a = {{Int(1), Int(1)}};
  auto rays = cone_extreme_rays(a);
  CHECK(rays.empty());
}

TEST_CASE("same_row_space") {
  QMat a = {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
  QMat b = {{Rat(2), Rat(2)}, {Rat(0), Rat(3)}};
  CHECK(same_row_space(a, b));
  QMat c = {{Rat(1), Rat(1)}};
  CHECK(!same_row_space(a, c));
}
