#pragma once

// Exact sparse linear algebra: rank / kernel / solve over a field by
// streaming column reduction (columns are kept integer-primitive over Q to
// control coefficient growth, in the spirit of fraction-free elimination),
// and Smith normal form over Z with unimodular transform tracking.

#include "koszul/sparse.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <optional>
#include <unordered_map>
#include <vector>

namespace koszul {

struct integer_rank_request : std::runtime_error {
  integer_rank_request()
      : std::runtime_error("rank/kernel/solve over Z: use smith_normal_form") {}
};

using SparseVec = std::vector<std::pair<std::size_t, Rational>>;

namespace detail {

template <class K>
using sparse_col = std::vector<std::pair<std::size_t, K>>;

template <class K>
void axpy(sparse_col<K>& dst, const K& lambda, const sparse_col<K>& src) {
  // dst += lambda * src, keeping sorted sparse form
  sparse_col<K> out;
  out.reserve(dst.size() + src.size());
  auto a = dst.begin();
  auto b = src.begin();
  while (a != dst.end() || b != src.end()) {
    if (b == src.end() || (a != dst.end() && a->first < b->first)) {
      out.push_back(*a++);
    } else if (a == dst.end() || b->first < a->first) {
      K v = lambda * b->second;
      if (!is_zero(v)) out.push_back({b->first, v});
      ++b;
    } else {
      K v = a->second + lambda * b->second;
      if (!is_zero(v)) out.push_back({a->first, v});
      ++a; ++b;
    }
  }
  dst = std::move(out);
}

// rescale c to a canonical primitive form; returns the factor applied
inline Rational make_primitive(sparse_col<Rational>& c) {
  if (c.empty()) return Rational(1);
  Integer den = 1, num = 0;
  for (auto& [r, v] : c) den = boost::multiprecision::lcm(den, v.denominator());
  for (auto& [r, v] : c) {
    Integer n = v.numerator() * (den / v.denominator());
    num = boost::multiprecision::gcd(num, n);
  }
  if (num == 0) return Rational(1);
  Rational s(den, num);
  for (auto& [r, v] : c) v *= s;
  return s;
}
inline Fp make_primitive(sparse_col<Fp>& c) {
  if (c.empty()) return scalar_traits<Fp>::one();
  Fp inv = c.back().second.inverse();
  for (auto& [r, v] : c) v *= inv;
  return inv;
}
inline Integer make_primitive(sparse_col<Integer>&) { return Integer(1); }

} // namespace detail

// Streaming column-echelon reduction.  Columns are reduced against the
// pivot of their lowest row (persistence-style); surviving columns become
// pivots.  Optionally tracks the combination of input columns producing
// each reduced column, which yields kernel vectors and solve().
template <class K>
class Echelon {
public:
  using col = detail::sparse_col<K>;

  explicit Echelon(std::size_t n_rows, bool track = false)
      : n_rows_(n_rows), track_(track) {}

  std::size_t rank() const { return pivots_.size(); }
  std::size_t n_rows() const { return n_rows_; }

  // Feed one column; returns true if it increased the rank.  When
  // tracking, `memo` receives the combination of previously added columns
  // (by their add-order index) that was subtracted, including the column
  // itself with coefficient 1 on success, and the full combination whose
  // image is zero on failure (a kernel combination).
  bool add_column(col c) {
    col memo;
    if (track_) memo.push_back({count_, scalar_traits<K>::one()});
    reduce(c, memo);
    ++count_;
    if (c.empty()) {
      if (track_) kernel_memos_.push_back(std::move(memo));
      return false;
    }
    K scale = detail::make_primitive(c);
    if (track_)
      for (auto& [idx, v] : memo) v *= scale;
    std::size_t low = c.back().first;
    pivot_of_row_[low] = cols_.size();
    pivots_.push_back(low);
    cols_.push_back(std::move(c));
    memos_.push_back(std::move(memo));
    return true;
  }

  // Reduce an arbitrary vector against the current pivots; `memo` returns
  // the combination of stored columns used (by add-order index).
  void reduce(col& c, col& memo) const {
    while (!c.empty()) {
      std::size_t low = c.back().first;
      auto it = pivot_of_row_.find(low);
      if (it == pivot_of_row_.end()) return;
      const col& p = cols_[it->second];
      K lambda = -(c.back().second / p.back().second);
      detail::axpy(c, lambda, p);
      if (track_) {
        for (auto& [idx, v] : memos_[it->second]) {
          K add = lambda * v;
          bool found = false;
          for (auto& [mi, mv] : memo)
            if (mi == idx) { mv += add; found = true; break; }
          if (!found && !is_zero(add)) memo.push_back({idx, add});
        }
      }
    }
  }

  const std::vector<col>& kernel_memos() const { return kernel_memos_; }

private:
  std::size_t n_rows_;
  bool track_;
  std::size_t count_ = 0;
  std::vector<col> cols_;
  std::vector<col> memos_;
  std::vector<col> kernel_memos_;
  std::vector<std::size_t> pivots_;
  std::unordered_map<std::size_t, std::size_t> pivot_of_row_;
};

template <class K>
std::size_t rank(const SparseMatrix<K>& m) {
  if constexpr (!scalar_traits<K>::is_field) throw integer_rank_request();
  Echelon<K> e(m.n_rows());
  for (std::size_t j = 0; j < m.n_cols(); ++j) e.add_column(m.column(j));
  return e.rank();
}

template <class K>
std::vector<std::vector<K>> kernel_basis(const SparseMatrix<K>& m) {
  if constexpr (!scalar_traits<K>::is_field) throw integer_rank_request();
  Echelon<K> e(m.n_rows(), /*track=*/true);
  for (std::size_t j = 0; j < m.n_cols(); ++j) e.add_column(m.column(j));
  std::vector<std::vector<K>> basis;
  for (auto& memo : e.kernel_memos()) {
    std::vector<K> v(m.n_cols(), scalar_traits<K>::zero());
    for (auto& [j, c] : memo) v[j] = c;
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class K>
std::optional<std::vector<K>> solve(const SparseMatrix<K>& m, const std::vector<K>& b) {
  if constexpr (!scalar_traits<K>::is_field) throw integer_rank_request();
  if (b.size() != m.n_rows()) throw dimension_mismatch("solve: rhs length");
  Echelon<K> e(m.n_rows(), /*track=*/true);
  for (std::size_t j = 0; j < m.n_cols(); ++j) e.add_column(m.column(j));
  typename Echelon<K>::col c, memo;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (!is_zero(b[i])) c.push_back({i, b[i]});
  e.reduce(c, memo);
  if (!c.empty()) return std::nullopt;
  std::vector<K> x(m.n_cols(), scalar_traits<K>::zero());
  for (auto& [j, v] : memo) x[j] = -v;
  return x;
}

// ------------------------------------------------------------------- SNF

// Smith normal form of an integer matrix: returns (U, S, V) with
// M = U * S * V, U and V unimodular, S diagonal with d1 | d2 | ...
struct SmithNormalForm {
  SparseMatrix<Integer> U, S, V;
  std::vector<Integer> divisors; // nonzero diagonal entries
};

namespace detail {

class DenseInt {
public:
  DenseInt(std::size_t r, std::size_t c)
      : r_(r), c_(c), a_(r, std::vector<Integer>(c, 0)) {}
  static DenseInt eye(std::size_t n) {
    DenseInt m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  Integer& operator()(std::size_t i, std::size_t j) { return a_[i][j]; }
  const Integer& operator()(std::size_t i, std::size_t j) const { return a_[i][j]; }
  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }

  void row_add(std::size_t i, std::size_t j, const Integer& l) { // R_i += l R_j
    for (std::size_t k = 0; k < c_; ++k) a_[i][k] += l * a_[j][k];
  }
  void col_add(std::size_t i, std::size_t j, const Integer& l) { // C_i += l C_j
    for (std::size_t k = 0; k < r_; ++k) a_[k][i] += l * a_[k][j];
  }
  void row_swap(std::size_t i, std::size_t j) { std::swap(a_[i], a_[j]); }
  void col_swap(std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < r_; ++k) std::swap(a_[k][i], a_[k][j]);
  }
  void row_neg(std::size_t i) { for (auto& x : a_[i]) x = -x; }
  void col_neg(std::size_t j) { for (std::size_t k = 0; k < r_; ++k) a_[k][j] = -a_[k][j]; }

private:
  std::size_t r_, c_;
  std::vector<std::vector<Integer>> a_;
};

} // namespace detail

inline SmithNormalForm smith_normal_form(const SparseMatrix<Integer>& m) {
  using detail::DenseInt;
  const std::size_t R = m.n_rows(), C = m.n_cols();
  DenseInt S(R, C), U = DenseInt::eye(R), V = DenseInt::eye(C);
  for (std::size_t j = 0; j < C; ++j)
    for (auto& [i, v] : m.column(j)) S(i, j) = v;

  // Every row operation S <- E S is mirrored as U <- U E^{-1}; every
  // column operation S <- S F as V <- F^{-1} V, so M = U S V throughout.
  auto row_add = [&](std::size_t i, std::size_t j, const Integer& l) {
    S.row_add(i, j, l);   // E = I + l e_{ij}: R_i += l R_j
    U.col_add(j, i, -l);  // C_j(U) -= l C_i(U)
  };
  auto col_add = [&](std::size_t i, std::size_t j, const Integer& l) {
    S.col_add(i, j, l);   // C_i += l C_j
    V.row_add(j, i, -l);  // R_j(V) -= l R_i(V)
  };
  auto row_swap = [&](std::size_t i, std::size_t j) { S.row_swap(i, j); U.col_swap(i, j); };
  auto col_swap = [&](std::size_t i, std::size_t j) { S.col_swap(i, j); V.row_swap(i, j); };
  auto row_neg = [&](std::size_t i) { S.row_neg(i); U.col_neg(i); };

  const std::size_t n = std::min(R, C);
  std::size_t t = 0;
  for (; t < n; ++t) {
    for (;;) {
      // smallest-magnitude nonzero pivot in the trailing block
      std::size_t pi = t, pj = t;
      Integer best = 0;
      for (std::size_t i = t; i < R; ++i)
        for (std::size_t j = t; j < C; ++j) {
          const Integer& x = S(i, j);
          if (x == 0) continue;
          Integer ax = boost::multiprecision::abs(x);
          if (best == 0 || ax < best) { best = ax; pi = i; pj = j; }
        }
      if (best == 0) goto done;
      row_swap(t, pi);
      col_swap(t, pj);
      if (S(t, t) < 0) row_neg(t);

      // clear column and row t by euclidean division; a nonzero
      // remainder produces a smaller entry and we restart with it
      bool remainder = false;
      for (std::size_t i = t + 1; i < R; ++i)
        if (S(i, t) != 0) {
          row_add(i, t, -(S(i, t) / S(t, t)));
          if (S(i, t) != 0) remainder = true;
        }
      if (remainder) continue;
      for (std::size_t j = t + 1; j < C; ++j)
        if (S(t, j) != 0) {
          col_add(j, t, -(S(t, j) / S(t, t)));
          if (S(t, j) != 0) remainder = true;
        }
      if (remainder) continue;

      // force the pivot to divide the whole trailing block, so the
      // divisibility chain holds by induction
      bool divides_all = true;
      for (std::size_t i = t + 1; i < R && divides_all; ++i)
        for (std::size_t j = t + 1; j < C; ++j)
          if (S(i, j) % S(t, t) != 0) {
            row_add(t, i, 1);
            divides_all = false;
            break;
          }
      if (divides_all) break;
    }
  }
done:;

  SmithNormalForm out{SparseMatrix<Integer>(R, R), SparseMatrix<Integer>(R, C),
                      SparseMatrix<Integer>(C, C), {}};
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < R; ++j)
      if (U(i, j) != 0) out.U.add_to(i, j, U(i, j));
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j)
      if (S(i, j) != 0) out.S.add_to(i, j, S(i, j));
  for (std::size_t i = 0; i < C; ++i)
    for (std::size_t j = 0; j < C; ++j)
      if (V(i, j) != 0) out.V.add_to(i, j, V(i, j));
  for (std::size_t i = 0; i < n; ++i)
    if (S(i, i) != 0) out.divisors.push_back(S(i, i));
  return out;
}

} // namespace koszul
