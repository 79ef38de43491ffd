#include <catch2/catch_amalgamated.hpp>

#include "koszul/linalg.hpp"

#include <random>

using namespace koszul;

namespace {

// independent dense Gaussian elimination, used as the rank oracle
template <class K>
std::size_t dense_rank(const SparseMatrix<K>& m) {
  std::vector<std::vector<K>> a(m.n_rows(), std::vector<K>(m.n_cols(), scalar_traits<K>::zero()));
  for (std::size_t j = 0; j < m.n_cols(); ++j)
    for (auto& [i, v] : m.column(j)) a[i][j] = v;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.n_cols() && r < m.n_rows(); ++c) {
    std::size_t p = r;
    while (p < m.n_rows() && is_zero(a[p][c])) ++p;
    if (p == m.n_rows()) continue;
    std::swap(a[p], a[r]);
    for (std::size_t i = 0; i < m.n_rows(); ++i) {
      if (i == r || is_zero(a[i][c])) continue;
      K f = a[i][c] / a[r][c];
      for (std::size_t j = c; j < m.n_cols(); ++j) a[i][j] -= f * a[r][j];
    }
    ++r;
  }
  return r;
}

SparseMatrix<Rational> from_rows(std::vector<std::vector<long>> rows) {
  std::size_t R = rows.size(), C = rows.empty() ? 0 : rows[0].size();
  SparseMatrix<Rational> m(R, C);
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j)
      if (rows[i][j] != 0) m.add_to(i, j, Rational(rows[i][j]));
  return m;
}

SparseMatrix<Integer> int_from_rows(std::vector<std::vector<long>> rows) {
  std::size_t R = rows.size(), C = rows.empty() ? 0 : rows[0].size();
  SparseMatrix<Integer> m(R, C);
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j)
      if (rows[i][j] != 0) m.add_to(i, j, Integer(rows[i][j]));
  return m;
}

// naive oracle for elementary divisors: gcd of k x k minors
Integer minor_gcd(const SparseMatrix<Integer>& m, std::size_t k);

std::vector<Integer> divisor_oracle(const SparseMatrix<Integer>& m) {
  std::vector<Integer> out;
  Integer prev = 1;
  for (std::size_t k = 1; k <= std::min(m.n_rows(), m.n_cols()); ++k) {
    Integer g = minor_gcd(m, k);
    if (g == 0) break;
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

Integer det_dense(std::vector<std::vector<Integer>> a) {
  // fraction-free Bareiss determinant
  std::size_t n = a.size();
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < n && a[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(a[p], a[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return n == 0 ? Integer(1) : Integer(sign) * a[n - 1][n - 1];
}

Integer minor_gcd(const SparseMatrix<Integer>& m, std::size_t k) {
  std::vector<std::size_t> ri(k), ci(k);
  std::vector<std::vector<std::size_t>> row_sets, col_sets;
  std::function<void(std::size_t, std::size_t, std::vector<std::size_t>&, std::size_t,
                     std::vector<std::vector<std::size_t>>&)>
      gen = [&](std::size_t start, std::size_t left, std::vector<std::size_t>& cur,
                std::size_t total, std::vector<std::vector<std::size_t>>& out) {
        if (left == 0) { out.push_back(cur); return; }
        for (std::size_t i = start; i + left <= total; ++i) {
          cur.push_back(i);
          gen(i + 1, left - 1, cur, total, out);
          cur.pop_back();
        }
      };
  std::vector<std::size_t> cur;
  gen(0, k, cur, m.n_rows(), row_sets);
  gen(0, k, cur, m.n_cols(), col_sets);
  Integer g = 0;
  for (auto& rs : row_sets)
    for (auto& cs : col_sets) {
      std::vector<std::vector<Integer>> sub(k, std::vector<Integer>(k, 0));
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) sub[i][j] = m.get(rs[i], cs[j]);
      g = boost::multiprecision::gcd(g, det_dense(sub));
    }
  return g < 0 ? Integer(-g) : g;
}

} // namespace

TEST_CASE("rank: identity and empty") {
  CHECK(rank(SparseMatrix<Rational>::identity(3)) == 3);
  CHECK(rank(SparseMatrix<Rational>(0, 5)) == 0);
}

TEST_CASE("rank: triangle graph boundary over Q is 2") {
  // d1 of the 3-cycle: edges (01),(02),(12)
  auto d1 = from_rows({{-1, -1, 0}, {1, 0, -1}, {0, 1, 1}});
  CHECK(rank(d1) == 2);
  CHECK(dense_rank(d1) == 2);
}

TEST_CASE("rank over Z raises IntegerRankRequest") {
  SparseMatrix<Integer> m = int_from_rows({{2}});
  CHECK_THROWS_AS(rank(m), integer_rank_request);
}

TEST_CASE("kernel: identity, [1 1], and boundary of S^2") {
  CHECK(kernel_basis(SparseMatrix<Rational>::identity(4)).empty());

  SparseMatrix<Rational> m(1, 2);
  m.add_to(0, 0, Rational(1));
  m.add_to(0, 1, Rational(1));
  auto kb = kernel_basis(m);
  REQUIRE(kb.size() == 1);
  CHECK(kb[0][0] + kb[0][1] == Rational(0));
  CHECK(kb[0][0] != Rational(0));

  // d2 of boundary of the 3-simplex: 6 edges x 4 triangles
  // vertices 0..3; edges 01,02,03,12,13,23; triangles 012,013,023,123
  auto d2 = from_rows({
      {1, 1, 0, 0},   // 01
      {-1, 0, 1, 0},  // 02
      {0, -1, -1, 0}, // 03
      {1, 0, 0, 1},   // 12
      {0, 1, 0, -1},  // 13
      {0, 0, 1, 1},   // 23
  });
  CHECK(rank(d2) == 3);
  auto k2 = kernel_basis(d2);
  REQUIRE(k2.size() == 1);
  // kernel vector is the fundamental cycle direction; check d2 * v = 0
  auto img = d2.apply(k2[0]);
  for (auto& x : img) CHECK(x == Rational(0));
}

TEST_CASE("solve: identity, underdetermined, and filling a 1-cycle") {
  auto id = SparseMatrix<Rational>::identity(3);
  std::vector<Rational> b = {Rational(1), Rational(2), Rational(3)};
  auto x = solve(id, b);
  REQUIRE(x);
  CHECK(*x == b);

  SparseMatrix<Rational> m(1, 2);
  m.add_to(0, 0, Rational(1));
  m.add_to(0, 1, Rational(1));
  auto y = solve(m, {Rational(1)});
  REQUIRE(y);
  CHECK((*y)[0] + (*y)[1] == Rational(1));

  // unsolvable system
  SparseMatrix<Rational> z(2, 1);
  z.add_to(0, 0, Rational(1));
  auto no = solve(z, {Rational(0), Rational(1)});
  CHECK(!no);
}

TEST_CASE("solve(M, M x) reproduces the image") {
  std::mt19937 rng(12345);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t R = 1 + rng() % 5, C = 1 + rng() % 5;
    SparseMatrix<Rational> m(R, C);
    for (std::size_t j = 0; j < C; ++j)
      for (std::size_t i = 0; i < R; ++i)
        if (rng() % 3 == 0) m.add_to(i, j, Rational((long)(rng() % 7) - 3));
    std::vector<Rational> x;
    for (std::size_t j = 0; j < C; ++j) x.push_back(Rational((long)(rng() % 5) - 2));
    auto b = m.apply(x);
    auto x2 = solve(m, b);
    REQUIRE(x2);
    CHECK(m.apply(*x2) == b);
  }
}

TEST_CASE("rank + kernel dimension = n_cols on random matrices") {
  std::mt19937 rng(999);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t R = rng() % 6, C = rng() % 6;
    SparseMatrix<Rational> m(R, C);
    for (std::size_t j = 0; j < C; ++j)
      for (std::size_t i = 0; i < R; ++i)
        if (rng() % 2 == 0) m.add_to(i, j, Rational((long)(rng() % 9) - 4));
    auto r = rank(m);
    CHECK(r == dense_rank(m));
    CHECK(r + kernel_basis(m).size() == C);
  }
}

TEST_CASE("rank over F_p") {
  fp_session fp(5);
  SparseMatrix<Fp> m(2, 2);
  m.add_to(0, 0, Fp(1, 5));
  m.add_to(0, 1, Fp(2, 5));
  m.add_to(1, 0, Fp(2, 5));
  m.add_to(1, 1, Fp(4, 5)); // second row = 2x first -> rank 1
  CHECK(rank(m) == 1);
  SparseMatrix<Fp> m2(2, 2);
  m2.add_to(0, 0, Fp(1, 5));
  m2.add_to(1, 1, Fp(3, 5));
  CHECK(rank(m2) == 2);
}

TEST_CASE("smith normal form: diag(2,3) -> diag(1,6)") {
  auto m = int_from_rows({{2, 0}, {0, 3}});
  auto snf = smith_normal_form(m);
  REQUIRE(snf.divisors.size() == 2);
  CHECK(snf.divisors[0] == 1);
  CHECK(snf.divisors[1] == 6);
  CHECK(snf.U * snf.S * snf.V == m);
}

TEST_CASE("smith normal form: zero matrix") {
  auto snf = smith_normal_form(SparseMatrix<Integer>(3, 2));
  CHECK(snf.divisors.empty());
  CHECK(snf.S.is_zero_matrix());
}

TEST_CASE("smith normal form on random small integer matrices") {
  std::mt19937 rng(4242);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t R = 1 + rng() % 4, C = 1 + rng() % 4;
    SparseMatrix<Integer> m(R, C);
    for (std::size_t j = 0; j < C; ++j)
      for (std::size_t i = 0; i < R; ++i)
        if (rng() % 2 == 0) m.add_to(i, j, Integer((long)(rng() % 11) - 5));
    auto snf = smith_normal_form(m);
    // exact factorization
    CHECK(snf.U * snf.S * snf.V == m);
    // unimodular transforms
    std::vector<std::vector<Integer>> ud(R, std::vector<Integer>(R, 0)),
        vd(C, std::vector<Integer>(C, 0));
    for (std::size_t j = 0; j < R; ++j)
      for (auto& [i, v] : snf.U.column(j)) ud[i][j] = v;
    for (std::size_t j = 0; j < C; ++j)
      for (auto& [i, v] : snf.V.column(j)) vd[i][j] = v;
    Integer du = det_dense(ud), dv = det_dense(vd);
    CHECK((du == 1 || du == -1));
    CHECK((dv == 1 || dv == -1));
    // divisibility chain and agreement with the minor-gcd oracle
    for (std::size_t i = 0; i + 1 < snf.divisors.size(); ++i)
      CHECK(snf.divisors[i + 1] % snf.divisors[i] == 0);
    auto oracle = divisor_oracle(m);
    REQUIRE(oracle.size() == snf.divisors.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      Integer d = snf.divisors[i] < 0 ? Integer(-snf.divisors[i]) : snf.divisors[i];
      CHECK(d == oracle[i]);
    }
  }
}
