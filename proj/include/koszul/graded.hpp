#pragma once

// Finitely-supported graded modules with labelled bases, and formal linear
// combinations of basis elements.  Labels are opaque structured strings
// (exterior monomials, tensor words, simplex tuples) so that higher
// modules never re-index.

#include "koszul/scalar.hpp"
#include "koszul/sparse.hpp"

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace koszul {

struct BasisKey {
  int degree = 0;
  std::size_t index = 0;
  friend bool operator==(const BasisKey&, const BasisKey&) = default;
  friend auto operator<=>(const BasisKey&, const BasisKey&) = default;
};

class GradedModule {
public:
  GradedModule() = default;

  std::size_t add(int degree, const std::string& label) {
    auto& v = basis_[degree];
    auto [it, fresh] = index_[degree].try_emplace(label, v.size());
    if (!fresh) throw std::runtime_error("duplicate basis label in degree " +
                                         std::to_string(degree) + ": " + label);
    v.push_back(label);
    return it->second;
  }

  std::size_t dim(int degree) const {
    auto it = basis_.find(degree);
    return it == basis_.end() ? 0 : it->second.size();
  }

  std::size_t total_dim() const {
    std::size_t n = 0;
    for (auto& [d, v] : basis_) n += v.size();
    return n;
  }

  bool empty() const { return total_dim() == 0; }

  std::vector<int> degrees() const {
    std::vector<int> out;
    for (auto& [d, v] : basis_)
      if (!v.empty()) out.push_back(d);
    return out;
  }
  int min_degree() const {
    auto ds = degrees();
    return ds.empty() ? 0 : ds.front();
  }
  int max_degree() const {
    auto ds = degrees();
    return ds.empty() ? 0 : ds.back();
  }

  const std::string& label(BasisKey k) const { return basis_.at(k.degree).at(k.index); }
  const std::vector<std::string>& labels(int degree) const {
    static const std::vector<std::string> none;
    auto it = basis_.find(degree);
    return it == basis_.end() ? none : it->second;
  }

  bool has(int degree, const std::string& label) const {
    auto it = index_.find(degree);
    return it != index_.end() && it->second.count(label) > 0;
  }
  BasisKey key(int degree, const std::string& label) const {
    return BasisKey{degree, index_.at(degree).at(label)};
  }

private:
  std::map<int, std::vector<std::string>> basis_;
  std::map<int, std::unordered_map<std::string, std::size_t>> index_;
};

// formal K-linear combination of basis keys, kept normalized
template <class K>
class Elem {
public:
  using term = std::pair<BasisKey, K>;

  Elem() = default;
  Elem(BasisKey k, K c) { add(k, c); }

  void add(BasisKey k, const K& c) {
    if (koszul::is_zero(c)) return;
    auto it = terms_.find(k);
    if (it == terms_.end()) {
      terms_.emplace(k, c);
    } else {
      it->second += c;
      if (koszul::is_zero(it->second)) terms_.erase(it);
    }
  }
  void add(const Elem& o, const K& c) {
    for (auto& [k, v] : o.terms_) add(k, c * v);
  }

  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const std::map<BasisKey, K>& terms() const { return terms_; }
  // iterating the Elem itself is safe on temporaries (the range-for binds
  // the whole object), unlike iterating .terms() of a temporary
  auto begin() const { return terms_.begin(); }
  auto end() const { return terms_.end(); }

  Elem operator*(const K& c) const {
    Elem r;
    for (auto& [k, v] : terms_) r.add(k, c * v);
    return r;
  }
  Elem& operator+=(const Elem& o) {
    add(o, scalar_traits<K>::one());
    return *this;
  }
  Elem& operator-=(const Elem& o) {
    add(o, -scalar_traits<K>::one());
    return *this;
  }
  friend bool operator==(const Elem& a, const Elem& b) { return a.terms_ == b.terms_; }

private:
  std::map<BasisKey, K> terms_;
};

// a degree-homogeneous linear map between graded modules, stored as one
// sparse matrix per source degree; component n maps degree n to n+shift
template <class K>
struct GradedMap {
  int shift = 0;
  std::map<int, SparseMatrix<K>> components;

  const SparseMatrix<K>* component(int degree) const {
    auto it = components.find(degree);
    return it == components.end() ? nullptr : &it->second;
  }

  Elem<K> apply(const Elem<K>& x) const {
    Elem<K> y;
    for (auto& [k, c] : x.terms()) {
      auto* m = component(k.degree);
      if (!m) continue;
      for (auto& [row, v] : m->column(k.index))
        y.add(BasisKey{k.degree + shift, row}, c * v);
    }
    return y;
  }
};

} // namespace koszul
