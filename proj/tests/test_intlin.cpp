#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sagbihom/intlin.hpp"

using namespace sagbihom;

namespace {

ZMat from_rows(const std::vector<std::vector<long>>& rows) {
  ZMat m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

void check_snf_contract(const ZMat& a) {
  SNFResult s = smith_normal_form(a);
  CHECK(mul(mul(s.U, a), s.V) == s.D);
  CHECK(abs(det_bareiss(s.U)) == 1);
  CHECK(abs(det_bareiss(s.V)) == 1);
  for (std::size_t i = 0; i + 1 < std::min(a.rows(), a.cols()); ++i) {
    CHECK(s.D(i, i) >= 0);
    if (s.D(i + 1, i + 1) != 0) {
      REQUIRE(s.D(i, i) != 0);
      CHECK(s.D(i + 1, i + 1) % s.D(i, i) == 0);
    }
  }
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) CHECK(s.D(i, j) == 0);
}

}  // namespace

TEST_CASE("smith normal form examples") {
  ZMat d = from_rows({{2, 0, 0}, {0, 2, 0}, {0, 0, 2}});
  SNFResult s = smith_normal_form(d);
  CHECK(s.rank == 3);
  Zint prod = 1;
  for (auto& v : s.divisors()) prod *= v;
  CHECK(prod == 8);
  CHECK(s.D(0, 0) == 2);
  CHECK(s.D(1, 1) == 2);
  CHECK(s.D(2, 2) == 2);

  // hand elimination: det 4, gcd of entries 1, so divisors are 1, 4
  ZMat m = from_rows({{2, 1}, {0, 2}});
  SNFResult s2 = smith_normal_form(m);
  CHECK(s2.rank == 2);
  CHECK(s2.D(0, 0) == 1);
  CHECK(s2.D(1, 1) == 4);
  check_snf_contract(m);

  ZMat z(2, 2);
  SNFResult s3 = smith_normal_form(z);
  CHECK(s3.rank == 0);
  CHECK(s3.D(0, 0) == 0);
  CHECK(s3.D(1, 1) == 0);
}

TEST_CASE("smith normal form on 200 random matrices") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 6), entry(-9, 9);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t r = dim(rng), c = dim(rng);
    ZMat a(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) a(i, j) = entry(rng);
    check_snf_contract(a);
    if (r == c) {
      SNFResult s = smith_normal_form(a);
      Zint prod = 1;
      for (auto& v : s.divisors()) prod *= v;
      if (s.rank == r) CHECK(prod == abs(det_bareiss(a)));
    }
  }
}

TEST_CASE("lattice index") {
  ZMat id = from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  CHECK(lattice_index(id).value() == 1);

  ZMat twice = from_rows({{2, 0, 0}, {0, 2, 0}, {0, 0, 2}});
  CHECK(lattice_index(twice).value() == 8);

  // columns (-1,0), (-1,1) plus a third in their span; SNF oracle gives 1
  ZMat cols = from_rows({{-1, -1, -2}, {0, 1, 1}});
  CHECK(lattice_index(cols).value() == 1);

  ZMat deficient = from_rows({{1, 2}, {0, 0}});
  CHECK(!lattice_index(deficient).has_value());
}

TEST_CASE("lattice index invariances") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> entry(-4, 4);
  for (int trial = 0; trial < 40; ++trial) {
    ZMat a(3, 4);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 4; ++j) a(i, j) = entry(rng);
    auto idx = lattice_index(a);
    // permute columns
    ZMat p(3, 4);
    std::vector<int> perm{2, 0, 3, 1};
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 4; ++j) p(i, j) = a(i, perm[j]);
    auto idx_p = lattice_index(p);
    CHECK((idx.has_value() == idx_p.has_value()));
    if (idx) CHECK(*idx == *idx_p);
    // append a column already in the span (sum of the first two)
    ZMat e(3, 5);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 4; ++j) e(i, j) = a(i, j);
      e(i, 4) = a(i, 0) + a(i, 1);
    }
    auto idx_e = lattice_index(e);
    CHECK((idx.has_value() == idx_e.has_value()));
    if (idx) CHECK(*idx == *idx_e);
  }
}

TEST_CASE("integer kernel basis") {
  ZMat a = from_rows({{1, 1, 1}, {2, 1, 0}});
  auto basis = integer_kernel_basis(a);
  REQUIRE(basis.size() == 1);
  for (std::size_t i = 0; i < 2; ++i) {
    Zint dot = 0;
    for (std::size_t j = 0; j < 3; ++j) dot += a(i, j) * basis[0][j];
    CHECK(dot == 0);
  }
  Zint g = gcd(gcd(abs(basis[0][0]), abs(basis[0][1])), abs(basis[0][2]));
  CHECK(g == 1);
}

TEST_CASE("strict LP feasibility examples") {
  auto r = [](std::initializer_list<long> v) {
    std::vector<Rat> row;
    for (long x : v) row.push_back(Rat(x));
    return row;
  };
  LPWitness w1 = strict_lp_feasible({r({1, 0})}, {});
  REQUIRE(w1.feasible);
  CHECK(w1.certificate[0] > 0);

  LPWitness w2 = strict_lp_feasible({r({1, 0}), r({-1, 0})}, {});
  CHECK(!w2.feasible);

  // "x^2 leads x^2+y^2" and "x^3 leads x^3+z^3" in three variables
  LPWitness w3 = strict_lp_feasible({r({2, -2, 0}), r({3, 0, -3})}, {});
  REQUIRE(w3.feasible);
  CHECK(2 * w3.certificate[0] - 2 * w3.certificate[1] > 0);
  CHECK(3 * w3.certificate[0] - 3 * w3.certificate[2] > 0);
}

TEST_CASE("strict LP agrees with a bounded grid search") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> entry(-3, 3), nrows(1, 4);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + (trial % 2);
    std::vector<std::vector<Rat>> strict;
    int k = nrows(rng);
    for (int i = 0; i < k; ++i) {
      std::vector<Rat> row(n);
      for (auto& v : row) v = Rat(entry(rng));
      strict.push_back(row);
    }
    LPWitness w = strict_lp_feasible(strict, {});
    // brute force over omega in [-6,6]^n
    bool grid_found = false;
    std::vector<int> omega(n, -6);
    for (;;) {
      bool ok = true;
      for (const auto& row : strict) {
        Rat dot = 0;
        for (int i = 0; i < n; ++i) dot += row[i] * omega[i];
        if (!(dot > 0)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        grid_found = true;
        break;
      }
      int i = 0;
      while (i < n && omega[i] == 6) omega[i++] = -6;
      if (i == n) break;
      ++omega[i];
    }
    // exact LP is authoritative; the grid may only miss in one direction
    if (grid_found) CHECK(w.feasible);
    if (!w.feasible) CHECK(!grid_found);
  }
}
