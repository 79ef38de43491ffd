#pragma once

// Sparse matrices over an exact scalar type.  Column-major storage with
// sorted rows per column; no zero entries are ever stored.

#include "koszul/scalar.hpp"

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

namespace koszul {

struct dimension_mismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class K>
class SparseMatrix {
public:
  using entry = std::pair<std::size_t, K>; // (row, value)

  SparseMatrix() : rows_(0) {}
  SparseMatrix(std::size_t n_rows, std::size_t n_cols)
      : rows_(n_rows), cols_(n_cols) {}

  static SparseMatrix identity(std::size_t n) {
    SparseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.cols_[i].push_back({i, scalar_traits<K>::one()});
    return m;
  }

  std::size_t n_rows() const { return rows_; }
  std::size_t n_cols() const { return cols_.size(); }
  const std::vector<entry>& column(std::size_t j) const { return cols_.at(j); }

  std::size_t nnz() const {
    std::size_t n = 0;
    for (auto& c : cols_) n += c.size();
    return n;
  }

  void add_to(std::size_t i, std::size_t j, const K& v) {
    if (i >= rows_ || j >= n_cols()) throw dimension_mismatch("entry out of range");
    if (is_zero(v)) return;
    auto& col = cols_[j];
    auto it = std::lower_bound(col.begin(), col.end(), i,
                               [](const entry& e, std::size_t r) { return e.first < r; });
    if (it != col.end() && it->first == i) {
      it->second += v;
      if (is_zero(it->second)) col.erase(it);
    } else {
      col.insert(it, {i, v});
    }
  }

  void set(std::size_t i, std::size_t j, const K& v) {
    auto& col = cols_.at(j);
    auto it = std::lower_bound(col.begin(), col.end(), i,
                               [](const entry& e, std::size_t r) { return e.first < r; });
    if (it != col.end() && it->first == i) {
      if (is_zero(v)) col.erase(it); else it->second = v;
    } else if (!is_zero(v)) {
      col.insert(it, {i, v});
    }
  }

  K get(std::size_t i, std::size_t j) const {
    const auto& col = cols_.at(j);
    auto it = std::lower_bound(col.begin(), col.end(), i,
                               [](const entry& e, std::size_t r) { return e.first < r; });
    if (it != col.end() && it->first == i) return it->second;
    return scalar_traits<K>::zero();
  }

  bool is_zero_matrix() const {
    for (auto& c : cols_) if (!c.empty()) return false;
    return true;
  }

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_;
  }

  SparseMatrix operator-() const {
    SparseMatrix r = *this;
    for (auto& c : r.cols_)
      for (auto& e : c) e.second = -e.second;
    return r;
  }

  friend SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.rows_ != b.rows_ || a.n_cols() != b.n_cols())
      throw dimension_mismatch("matrix sum shape mismatch");
    SparseMatrix r = a;
    for (std::size_t j = 0; j < b.n_cols(); ++j)
      for (auto& e : b.cols_[j]) r.add_to(e.first, j, e.second);
    return r;
  }

  friend SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b) {
    return a + (-b);
  }

  friend SparseMatrix operator*(const K& s, const SparseMatrix& a) {
    SparseMatrix r(a.rows_, a.n_cols());
    if (is_zero(s)) return r;
    for (std::size_t j = 0; j < a.n_cols(); ++j)
      for (auto& e : a.cols_[j]) r.add_to(e.first, j, s * e.second);
    return r;
  }

  friend SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.n_cols() != b.rows_) throw dimension_mismatch("matrix product shape mismatch");
    SparseMatrix r(a.rows_, b.n_cols());
    for (std::size_t j = 0; j < b.n_cols(); ++j) {
      std::vector<K> acc; // dense accumulator per column
      acc.assign(a.rows_, scalar_traits<K>::zero());
      std::vector<std::size_t> touched;
      for (auto& [k, bv] : b.cols_[j])
        for (auto& [i, av] : a.cols_[k]) {
          if (is_zero(acc[i])) touched.push_back(i);
          acc[i] += av * bv;
        }
      std::sort(touched.begin(), touched.end());
      for (std::size_t i : touched)
        if (!is_zero(acc[i])) r.cols_[j].push_back({i, acc[i]});
    }
    return r;
  }

  // matrix * dense column vector
  std::vector<K> apply(const std::vector<K>& x) const {
    if (x.size() != n_cols()) throw dimension_mismatch("apply shape mismatch");
    std::vector<K> y(rows_, scalar_traits<K>::zero());
    for (std::size_t j = 0; j < n_cols(); ++j) {
      if (is_zero(x[j])) continue;
      for (auto& [i, v] : cols_[j]) y[i] += v * x[j];
    }
    return y;
  }

  SparseMatrix transpose() const {
    SparseMatrix r(n_cols(), rows_);
    for (std::size_t j = 0; j < n_cols(); ++j)
      for (auto& [i, v] : cols_[j]) r.cols_[i].push_back({j, v});
    return r;
  }

  template <class K2, class F>
  SparseMatrix<K2> map_entries(F f) const {
    SparseMatrix<K2> r(rows_, n_cols());
    for (std::size_t j = 0; j < n_cols(); ++j)
      for (auto& [i, v] : cols_[j]) r.add_to(i, j, f(v));
    return r;
  }

private:
  std::size_t rows_;
  std::vector<std::vector<entry>> cols_;
};

} // namespace koszul
