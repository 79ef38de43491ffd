#pragma once

// Chain complexes with degree -1 differential, chain maps, cones, homology
// with a per-degree trust flag, and windowed quasi-isomorphism testing.

#include "koszul/graded.hpp"
#include "koszul/linalg.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace koszul {

struct differential_not_square_zero : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct not_a_chain_map : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Window {
  int lo = 0, hi = 0;
  bool contains(int n) const { return lo <= n && n <= hi; }
};

// Certificate describing a word-length truncation.  Degree m of a
// truncated complex is trusted when every removed basis element (word
// length > L, each letter of degree >= delta_min) lives in degree > m+1,
// so the tail cannot touch H_m.
struct Truncation {
  bool truncated = false;
  int length_cap = 0;
  int delta_min = 0;
  bool trusted(int m) const {
    if (!truncated) return true;
    return (long long)(length_cap + 1) * delta_min >= (long long)m + 2;
  }
};

template <class K>
class ChainComplex {
public:
  GradedModule basis;
  std::map<int, SparseMatrix<K>> diff; // diff[n] : degree n -> degree n-1
  Truncation truncation;

  const SparseMatrix<K>& d(int n) const {
    auto it = diff.find(n);
    if (it != diff.end()) return it->second;
    static thread_local std::map<std::pair<std::size_t, std::size_t>, SparseMatrix<K>> zeros;
    auto key = std::make_pair(basis.dim(n - 1), basis.dim(n));
    auto z = zeros.find(key);
    if (z == zeros.end())
      z = zeros.emplace(key, SparseMatrix<K>(key.first, key.second)).first;
    return z->second;
  }

  void set_d(int n, SparseMatrix<K> m) {
    if (m.n_cols() != basis.dim(n) || m.n_rows() != basis.dim(n - 1))
      throw dimension_mismatch("differential shape vs basis");
    if (!m.is_zero_matrix()) diff[n] = std::move(m);
  }

  Elem<K> apply_d(const Elem<K>& x) const {
    Elem<K> y;
    for (auto& [k, c] : x.terms()) {
      auto it = diff.find(k.degree);
      if (it == diff.end()) continue;
      for (auto& [row, v] : it->second.column(k.index))
        y.add(BasisKey{k.degree - 1, row}, c * v);
    }
    return y;
  }

  void validate() const {
    for (auto& [n, dn] : diff) {
      auto up = diff.find(n + 1);
      if (up == diff.end()) continue;
      if (!(dn * up->second).is_zero_matrix())
        throw differential_not_square_zero("d^2 != 0 at degree " + std::to_string(n + 1));
    }
  }

  bool d_squared_zero() const {
    try { validate(); } catch (const differential_not_square_zero&) { return false; }
    return true;
  }
};

// build a complex from a basis and a differential rule
template <class K>
ChainComplex<K> make_complex(GradedModule basis,
                             const std::function<Elem<K>(BasisKey)>& dfun) {
  ChainComplex<K> c;
  c.basis = std::move(basis);
  for (int n : c.basis.degrees()) {
    SparseMatrix<K> m(c.basis.dim(n - 1), c.basis.dim(n));
    for (std::size_t j = 0; j < c.basis.dim(n); ++j) {
      Elem<K> img = dfun(BasisKey{n, j});
      for (auto& [k, v] : img.terms()) {
        if (k.degree != n - 1)
          throw dimension_mismatch("differential output in wrong degree for " +
                                   c.basis.label(BasisKey{n, j}));
        m.add_to(k.index, j, v);
      }
    }
    c.set_d(n, std::move(m));
  }
  return c;
}

// ------------------------------------------------------------- homology

struct HomologyEntry {
  std::size_t rank = 0;
  std::vector<Integer> torsion;
  bool trusted = true;
};

using HomologyTable = std::map<int, HomologyEntry>;

template <class K>
HomologyTable homology(const ChainComplex<K>& c, Window w) {
  c.validate();
  HomologyTable table;
  std::map<int, std::size_t> dual_rank; // rank of d(n) per n
  auto rank_of = [&](int n) -> std::size_t {
    auto it = dual_rank.find(n);
    if (it != dual_rank.end()) return it->second;
    std::size_t r;
    if constexpr (scalar_traits<K>::is_field) {
      r = c.basis.dim(n) == 0 || c.basis.dim(n - 1) == 0 ? 0 : rank(c.d(n));
    } else {
      r = smith_normal_form(c.d(n)).divisors.size();
    }
    dual_rank[n] = r;
    return r;
  };
  for (int n = w.lo; n <= w.hi; ++n) {
    HomologyEntry e;
    std::size_t dim = c.basis.dim(n);
    std::size_t rn = rank_of(n), rn1 = rank_of(n + 1);
    e.rank = dim - rn - rn1;
    if constexpr (!scalar_traits<K>::is_field) {
      for (auto& d : smith_normal_form(c.d(n + 1)).divisors) {
        Integer a = d < 0 ? Integer(-d) : d;
        if (a != 1) e.torsion.push_back(a);
      }
    }
    e.trusted = c.truncation.trusted(n);
    table[n] = e;
  }
  return table;
}

template <class K>
bool homology_vanishes(const ChainComplex<K>& c, Window w) {
  auto t = homology(c, w);
  for (auto& [n, e] : t)
    if (e.rank != 0 || !e.torsion.empty()) return false;
  return true;
}

// ------------------------------------------------------------- chain maps

template <class K>
struct ChainMap {
  ChainComplex<K> source;
  ChainComplex<K> target;
  int degree = 0;
  std::map<int, SparseMatrix<K>> components; // f[n] : source_n -> target_{n+degree}

  const SparseMatrix<K>& component(int n) const {
    auto it = components.find(n);
    if (it != components.end()) return it->second;
    static thread_local std::map<std::pair<std::size_t, std::size_t>, SparseMatrix<K>> zeros;
    auto key = std::make_pair(target.basis.dim(n + degree), source.basis.dim(n));
    auto z = zeros.find(key);
    if (z == zeros.end())
      z = zeros.emplace(key, SparseMatrix<K>(key.first, key.second)).first;
    return z->second;
  }

  // d_T f = (-1)^degree f d_S
  bool is_chain_map() const {
    K sign = degree % 2 == 0 ? scalar_traits<K>::one() : -scalar_traits<K>::one();
    std::vector<int> degs = source.basis.degrees();
    for (int n : degs) {
      auto lhs = target.d(n + degree) * component(n);
      auto rhs = sign * (component(n - 1) * source.d(n));
      if (!(lhs - rhs).is_zero_matrix()) return false;
    }
    return true;
  }
};

template <class K>
ChainMap<K> make_chain_map(ChainComplex<K> src, ChainComplex<K> dst, int degree,
                           const std::function<Elem<K>(BasisKey)>& f) {
  ChainMap<K> out;
  out.degree = degree;
  for (int n : src.basis.degrees()) {
    SparseMatrix<K> m(dst.basis.dim(n + degree), src.basis.dim(n));
    for (std::size_t j = 0; j < src.basis.dim(n); ++j) {
      Elem<K> img = f(BasisKey{n, j});
      for (auto& [k, v] : img.terms()) {
        if (k.degree != n + degree)
          throw dimension_mismatch("chain map output in wrong degree");
        m.add_to(k.index, j, v);
      }
    }
    if (!m.is_zero_matrix()) out.components[n] = std::move(m);
  }
  out.source = std::move(src);
  out.target = std::move(dst);
  return out;
}

// identity on a complex
template <class K>
ChainMap<K> identity_map(const ChainComplex<K>& c) {
  ChainMap<K> f;
  f.source = c;
  f.target = c;
  for (int n : c.basis.degrees()) f.components[n] = SparseMatrix<K>::identity(c.basis.dim(n));
  return f;
}

// Cone of a chain map.  For a degree-s map the source is first shifted so
// the map has degree 0; cone_n = target_n + source_{n-1+s} with
// differential [d_T, f; 0, -(-1)^s d_S].
template <class K>
ChainComplex<K> cone(const ChainMap<K>& f) {
  const int s = f.degree;
  ChainComplex<K> c;
  c.truncation = f.target.truncation.truncated ? f.target.truncation : f.source.truncation;
  std::map<int, std::size_t> tdim, sdim;
  int lo = f.target.basis.empty() ? 0 : f.target.basis.min_degree();
  int hi = f.target.basis.empty() ? 0 : f.target.basis.max_degree();
  if (!f.source.basis.empty()) {
    lo = std::min(lo, f.source.basis.min_degree() + s + 1);
    hi = std::max(hi, f.source.basis.max_degree() + s + 1);
  }
  for (int n = lo; n <= hi; ++n) {
    for (auto& lab : f.target.basis.labels(n)) c.basis.add(n, "T·" + lab);
    for (auto& lab : f.source.basis.labels(n - 1 - s)) c.basis.add(n, "S·" + lab);
  }
  K shift_sign = (s % 2 == 0) ? scalar_traits<K>::one() : -scalar_traits<K>::one();
  for (int n = lo; n <= hi; ++n) {
    std::size_t tn = f.target.basis.dim(n), sn = f.source.basis.dim(n - 1 - s);
    std::size_t tn1 = f.target.basis.dim(n - 1), sn1 = f.source.basis.dim(n - 2 - s);
    SparseMatrix<K> m(tn1 + sn1, tn + sn);
    const auto& dt = f.target.d(n);
    for (std::size_t j = 0; j < tn; ++j)
      for (auto& [i, v] : dt.column(j)) m.add_to(i, j, v);
    const auto& fm = f.component(n - 1 - s);
    for (std::size_t j = 0; j < sn; ++j)
      for (auto& [i, v] : fm.column(j)) m.add_to(i, tn + j, v);
    const auto& ds = f.source.d(n - 1 - s);
    for (std::size_t j = 0; j < sn; ++j)
      for (auto& [i, v] : ds.column(j)) m.add_to(tn1 + i, tn + j, -(shift_sign * v));
    c.set_d(n, std::move(m));
  }
  return c;
}

// truncation-aware quasi-isomorphism verdict over a window
struct QuasiIsoVerdict {
  bool holds = true;
  Window window;
  std::vector<int> untrusted_degrees;
  std::optional<std::pair<int, std::size_t>> failure; // degree, cone rank
};

template <class K>
QuasiIsoVerdict is_quasi_iso(const ChainMap<K>& f, Window w) {
  if (!f.is_chain_map()) throw not_a_chain_map("is_quasi_iso: input is not a chain map");
  QuasiIsoVerdict v;
  v.window = w;
  auto c = cone(f);
  auto t = homology(c, w);
  for (auto& [n, e] : t) {
    if (!e.trusted) v.untrusted_degrees.push_back(n);
    if (e.rank != 0 || !e.torsion.empty()) {
      v.holds = false;
      if (!v.failure) v.failure = {n, e.rank};
    }
  }
  return v;
}

} // namespace koszul
