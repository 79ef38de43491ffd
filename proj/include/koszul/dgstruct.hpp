#pragma once

// Conilpotent dg coalgebras, augmented dg algebras, twisting cochains and
// twisted tensor / hom complexes (one-point case: C_0 = k).
//
// Sign table (fixed once, gated by the d^2 = 0 / Maurer-Cartan / mixed
// identity tests):
//   cobar differential   d(s^-1 c) = -s^-1(dc) - sum (-1)^{|c'|} s^-1 c' | s^-1 c''
//   universal cobar tau  c -> (c), one-letter word, sign +1
//   bar differential     coderivation extension of  s a -> -s(da)  and
//                        s a | s a' -> (-1)^{|a|+1} s(a a')
//   universal bar tau    [a] -> -a
//   Maurer-Cartan        d_A tau + tau d_C + mu (tau x tau) Delta + unit h = 0
//   left twist  (E x M)  e x m -> sum (-1)^{|e0|} e0 x tau(e1) m      (right coaction)
//   right twist (M x E)  m x e -> -(-1)^{|m|} sum m tau(e-1) x e0     (left coaction)
//   wrap twist  (E x M)  e x m -> -sum (-1)^{(|e-1|-1)(|e0|+|m|)} e0 x m tau(e-1)

#include "koszul/complex.hpp"

#include <functional>
#include <string>
#include <tuple>
#include <vector>

namespace koszul {

struct maurer_cartan_violated : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct grading_mismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct not_conilpotent : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct structure_violation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// term of a coproduct: coefficient * (first leg x second leg)
template <class K>
using CoproductTerm = std::tuple<BasisKey, BasisKey, K>;

template <class K>
using Coproduct = std::vector<CoproductTerm<K>>;

// ------------------------------------------------------------ coalgebra

// Conilpotent (pointed, one-point) curved dg coalgebra: only the reduced
// part C-bar is stored; the coaugmentation copy of k is implicit.
template <class K>
struct DGCoalgebra {
  std::string name;
  GradedModule red;                                   // basis of C-bar
  GradedMap<K> d;                                     // degree -1 on C-bar
  std::function<Coproduct<K>(BasisKey)> red_coproduct; // Delta-bar
  std::function<K(BasisKey)> curvature;               // degree -2, null = 0
  bool cocommutative = false;

  Coproduct<K> delta_bar(BasisKey c) const { return red_coproduct(c); }
  K h(BasisKey c) const { return curvature ? curvature(c) : scalar_traits<K>::zero(); }
  bool curved() const {
    if (!curvature) return false;
    for (int n : red.degrees())
      for (std::size_t i = 0; i < red.dim(n); ++i)
        if (!is_zero(curvature(BasisKey{n, i}))) return true;
    return false;
  }
};

// ------------------------------------------------------------- algebra

// element of the full algebra A = k.1 + A-bar
template <class K>
struct AlgElem {
  K unit = scalar_traits<K>::zero();
  Elem<K> red;

  bool is_zero() const { return koszul::is_zero(unit) && red.is_zero(); }
  AlgElem& operator+=(const AlgElem& o) {
    unit += o.unit;
    red += o.red;
    return *this;
  }
  AlgElem operator*(const K& c) const { return {unit * c, red * c}; }
};

// Augmented dg algebra: the augmentation ideal A-bar is stored, the unit is
// implicit.  mul multiplies two ideal basis elements (the ideal is closed
// under multiplication).
template <class K>
struct DGAlgebra {
  std::string name;
  GradedModule aug;                                     // basis of A-bar
  GradedMap<K> d;                                       // degree -1 on A-bar
  std::function<Elem<K>(BasisKey, BasisKey)> mul;

  Elem<K> product(BasisKey a, BasisKey b) const { return mul(a, b); }

  AlgElem<K> product_full(const AlgElem<K>& x, const AlgElem<K>& y) const {
    AlgElem<K> r;
    r.unit = x.unit * y.unit;
    r.red += x.red * y.unit;
    r.red += y.red * x.unit;
    for (auto& [ka, ca] : x.red.terms())
      for (auto& [kb, cb] : y.red.terms()) r.red.add(mul(ka, kb), ca * cb);
    return r;
  }
};

// --------------------------------------------------------- verification

template <class K>
void check_coassociative(const DGCoalgebra<K>& C) {
  // (Delta-bar x 1) Delta-bar = (1 x Delta-bar) Delta-bar on each basis element
  using Word3 = std::tuple<BasisKey, BasisKey, BasisKey>;
  for (int n : C.red.degrees())
    for (std::size_t i = 0; i < C.red.dim(n); ++i) {
      BasisKey c{n, i};
      std::map<Word3, K> lhs, rhs;
      auto acc = [](std::map<Word3, K>& m, Word3 w, const K& v) {
        auto it = m.find(w);
        if (it == m.end()) m.emplace(w, v);
        else {
          it->second += v;
          if (is_zero(it->second)) m.erase(it);
        }
      };
      for (auto& [c1, c2, v] : C.delta_bar(c)) {
        for (auto& [c11, c12, w] : C.delta_bar(c1)) acc(lhs, {c11, c12, c2}, v * w);
        for (auto& [c21, c22, w] : C.delta_bar(c2)) acc(rhs, {c1, c21, c22}, v * w);
      }
      if (lhs != rhs)
        throw structure_violation("coassociativity fails on " + C.red.label(c) +
                                  " in " + C.name);
    }
}

template <class K>
void check_conilpotent(const DGCoalgebra<K>& C) {
  // the iterated reduced coproduct of each basis element vanishes at a
  // finite stage <= rank(C-bar) + 1
  std::size_t cap = C.red.total_dim() + 1;
  for (int n : C.red.degrees())
    for (std::size_t i = 0; i < C.red.dim(n); ++i) {
      std::vector<std::pair<std::vector<BasisKey>, K>> words = {{{BasisKey{n, i}}, scalar_traits<K>::one()}};
      bool vanished = false;
      for (std::size_t stage = 0; stage < cap; ++stage) {
        std::map<std::vector<BasisKey>, K> next;
        for (auto& [w, v] : words)
          for (auto& [c1, c2, u] : C.delta_bar(w[0])) {
            std::vector<BasisKey> nw = {c1, c2};
            nw.insert(nw.end(), w.begin() + 1, w.end());
            auto it = next.find(nw);
            if (it == next.end()) next.emplace(std::move(nw), v * u);
            else {
              it->second += v * u;
              if (is_zero(it->second)) next.erase(it);
            }
          }
        if (next.empty()) { vanished = true; break; }
        words.assign(next.begin(), next.end());
      }
      if (!vanished)
        throw not_conilpotent("conilpotency fails on " + C.red.label(BasisKey{n, i}));
    }
}

template <class K>
void check_coderivation(const DGCoalgebra<K>& C) {
  // Delta-bar d = (d x 1 + 1 x d) Delta-bar
  using Word2 = std::pair<BasisKey, BasisKey>;
  for (int n : C.red.degrees())
    for (std::size_t i = 0; i < C.red.dim(n); ++i) {
      BasisKey c{n, i};
      std::map<Word2, K> lhs, rhs;
      auto acc = [](std::map<Word2, K>& m, Word2 w, const K& v) {
        if (is_zero(v)) return;
        auto it = m.find(w);
        if (it == m.end()) m.emplace(w, v);
        else {
          it->second += v;
          if (is_zero(it->second)) m.erase(it);
        }
      };
      Elem<K> dc = C.d.apply(Elem<K>(c, scalar_traits<K>::one()));
      for (auto& [k, v] : dc.terms())
        for (auto& [c1, c2, u] : C.delta_bar(k)) acc(lhs, {c1, c2}, v * u);
      for (auto& [c1, c2, v] : C.delta_bar(c)) {
        Elem<K> d1 = C.d.apply(Elem<K>(c1, scalar_traits<K>::one()));
        for (auto& [k, u] : d1.terms()) acc(rhs, {k, c2}, v * u);
        Elem<K> d2 = C.d.apply(Elem<K>(c2, scalar_traits<K>::one()));
        K sgn = c1.degree % 2 == 0 ? scalar_traits<K>::one() : -scalar_traits<K>::one();
        for (auto& [k, u] : d2.terms()) acc(rhs, {c1, k}, v * u * sgn);
      }
      if (lhs != rhs)
        throw structure_violation("coderivation fails on " + C.red.label(c) + " in " + C.name);
    }
}

template <class K>
void check_cocommutative(const DGCoalgebra<K>& C) {
  using Word2 = std::pair<BasisKey, BasisKey>;
  for (int n : C.red.degrees())
    for (std::size_t i = 0; i < C.red.dim(n); ++i) {
      std::map<Word2, K> lhs, swapped;
      for (auto& [c1, c2, v] : C.delta_bar(BasisKey{n, i})) {
        auto add = [](std::map<Word2, K>& m, Word2 w, const K& v2) {
          auto it = m.find(w);
          if (it == m.end()) m.emplace(w, v2);
          else {
            it->second += v2;
            if (is_zero(it->second)) m.erase(it);
          }
        };
        add(lhs, {c1, c2}, v);
        K sgn = (c1.degree * c2.degree) % 2 == 0 ? scalar_traits<K>::one()
                                                 : -scalar_traits<K>::one();
        add(swapped, {c2, c1}, v * sgn);
      }
      if (lhs != swapped)
        throw structure_violation("cocommutativity fails on " +
                                  C.red.label(BasisKey{n, i}) + " in " + C.name);
    }
}

// d^2 = 0 for the stored differential (curvature zero case)
template <class K, class Owner>
void check_d_squared(const Owner& X, const GradedModule& basis, const GradedMap<K>& d,
                     const std::string& what) {
  for (int n : basis.degrees())
    for (std::size_t i = 0; i < basis.dim(n); ++i) {
      Elem<K> dd = d.apply(d.apply(Elem<K>(BasisKey{n, i}, scalar_traits<K>::one())));
      if (!dd.is_zero())
        throw structure_violation("d^2 != 0 on " + basis.label(BasisKey{n, i}) + " in " + what);
    }
}

template <class K>
void check_algebra(const DGAlgebra<K>& A, std::size_t assoc_sample_cap = 20000) {
  check_d_squared<K>(A, A.aug, A.d, A.name);
  // Leibniz: d(ab) = (da)b + (-1)^{|a|} a (db)
  std::vector<BasisKey> keys;
  for (int n : A.aug.degrees())
    for (std::size_t i = 0; i < A.aug.dim(n); ++i) keys.push_back({n, i});
  auto mul_elem = [&](const Elem<K>& x, const Elem<K>& y) {
    Elem<K> r;
    for (auto& [ka, ca] : x.terms())
      for (auto& [kb, cb] : y.terms()) r.add(A.mul(ka, kb), ca * cb);
    return r;
  };
  for (auto a : keys)
    for (auto b : keys) {
      Elem<K> ea(a, scalar_traits<K>::one()), eb(b, scalar_traits<K>::one());
      Elem<K> lhs = A.d.apply(A.mul(a, b));
      Elem<K> rhs = mul_elem(A.d.apply(ea), eb);
      K sgn = a.degree % 2 == 0 ? scalar_traits<K>::one() : -scalar_traits<K>::one();
      rhs.add(mul_elem(ea, A.d.apply(eb)), sgn);
      if (!(lhs == rhs))
        throw structure_violation("Leibniz fails on " + A.aug.label(a) + "," +
                                  A.aug.label(b) + " in " + A.name);
    }
  // associativity (sampled deterministically when the triple count is large)
  std::size_t total = keys.size() * keys.size() * keys.size();
  std::size_t stride = total > assoc_sample_cap ? total / assoc_sample_cap + 1 : 1;
  std::size_t idx = 0;
  for (auto a : keys)
    for (auto b : keys)
      for (auto c : keys) {
        if (idx++ % stride != 0) continue;
        Elem<K> lhs = mul_elem(A.mul(a, b), Elem<K>(c, scalar_traits<K>::one()));
        Elem<K> rhs = mul_elem(Elem<K>(a, scalar_traits<K>::one()), A.mul(b, c));
        if (!(lhs == rhs))
          throw structure_violation("associativity fails in " + A.name);
      }
}

template <class K>
void check_coalgebra(const DGCoalgebra<K>& C) {
  check_coassociative(C);
  check_conilpotent(C);
  check_coderivation(C);
  if (!C.curved()) check_d_squared<K>(C, C.red, C.d, C.name);
  if (C.cocommutative) check_cocommutative(C);
}

// -------------------------------------------------------- (co)modules

// Left/right dg comodule over a coalgebra; reduced coaction only, the
// counit part 1 x m is implicit.
template <class K>
struct DGComodule {
  std::string name;
  GradedModule basis;
  GradedMap<K> d;
  // m -> sum (c, m', coef) in C-bar x M
  std::function<Coproduct<K>(BasisKey)> coact_left;
  // m -> sum (m', c, coef) in M x C-bar
  std::function<Coproduct<K>(BasisKey)> coact_right;

  Coproduct<K> left(BasisKey m) const {
    return coact_left ? coact_left(m) : Coproduct<K>{};
  }
  Coproduct<K> right(BasisKey m) const {
    return coact_right ? coact_right(m) : Coproduct<K>{};
  }
};

// dg module over an augmented algebra; the unit acts as identity
template <class K>
struct DGModule {
  std::string name;
  GradedModule basis;
  GradedMap<K> d;
  std::function<Elem<K>(BasisKey, BasisKey)> act_left;  // (A-bar, M) -> M
  std::function<Elem<K>(BasisKey, BasisKey)> act_right; // (M, A-bar) -> M
};

// The unit of k.1 + X-bar sits at degree 0 index 0, so translating between
// reduced keys and full-module keys is index arithmetic.
inline BasisKey unit_key() { return BasisKey{0, 0}; }
inline BasisKey red_to_full(BasisKey k) {
  return BasisKey{k.degree, k.index + (k.degree == 0 ? 1 : 0)};
}
inline BasisKey full_to_red(BasisKey k) {
  return BasisKey{k.degree, k.index - (k.degree == 0 ? 1 : 0)};
}
inline bool is_unit(BasisKey k) { return k == unit_key(); }

template <class K>
GradedModule full_module_basis(const GradedModule& red) {
  GradedModule out;
  out.add(0, "1");
  for (int n : red.degrees())
    for (auto& lab : red.labels(n)) out.add(n, lab);
  return out;
}

template <class K>
GradedMap<K> full_module_diff(const GradedModule& red, const GradedMap<K>& d) {
  GradedMap<K> out;
  out.shift = -1;
  for (int n : red.degrees()) {
    auto* comp = d.component(n);
    if (!comp) continue;
    std::size_t rows = red.dim(n - 1) + (n - 1 == 0 ? 1 : 0);
    std::size_t cols = red.dim(n) + (n == 0 ? 1 : 0);
    SparseMatrix<K> m(rows, cols);
    for (std::size_t j = 0; j < red.dim(n); ++j) {
      std::size_t jf = red_to_full(BasisKey{n, j}).index;
      for (auto& [i, v] : comp->column(j))
        m.add_to(red_to_full(BasisKey{n - 1, i}).index, jf, v);
    }
    if (!m.is_zero_matrix()) out.components[n] = std::move(m);
  }
  return out;
}

// C considered as a comodule over itself (both coactions); underlying
// module is k.1 + C-bar with the unit labelled "1".  C must outlive the
// returned comodule.
template <class K>
DGComodule<K> comodule_of_coalgebra(const DGCoalgebra<K>& C) {
  DGComodule<K> M;
  M.name = C.name;
  M.basis = full_module_basis<K>(C.red);
  M.d = full_module_diff<K>(C.red, C.d);
  const DGCoalgebra<K>* Cp = &C;
  M.coact_left = [Cp](BasisKey mk) {
    Coproduct<K> out;
    if (is_unit(mk)) return out;
    BasisKey c = full_to_red(mk);
    out.push_back({c, unit_key(), scalar_traits<K>::one()});
    for (auto& [c1, c2, v] : Cp->delta_bar(c)) out.push_back({c1, red_to_full(c2), v});
    return out;
  };
  M.coact_right = [Cp](BasisKey mk) {
    Coproduct<K> out;
    if (is_unit(mk)) return out;
    BasisKey c = full_to_red(mk);
    out.push_back({unit_key(), c, scalar_traits<K>::one()});
    for (auto& [c1, c2, v] : Cp->delta_bar(c)) out.push_back({red_to_full(c1), c2, v});
    return out;
  };
  return M;
}

// A considered as a module over itself; underlying k.1 + A-bar.  A must
// outlive the returned module.
template <class K>
DGModule<K> module_of_algebra(const DGAlgebra<K>& A) {
  DGModule<K> M;
  M.name = A.name;
  M.basis = full_module_basis<K>(A.aug);
  M.d = full_module_diff<K>(A.aug, A.d);
  const DGAlgebra<K>* Ap = &A;
  M.act_left = [Ap](BasisKey a, BasisKey mk) {
    Elem<K> out;
    if (is_unit(mk)) {
      out.add(red_to_full(a), scalar_traits<K>::one());
      return out;
    }
    for (auto& [k, v] : Ap->mul(a, full_to_red(mk))) out.add(red_to_full(k), v);
    return out;
  };
  M.act_right = [Ap](BasisKey mk, BasisKey a) {
    Elem<K> out;
    if (is_unit(mk)) {
      out.add(red_to_full(a), scalar_traits<K>::one());
      return out;
    }
    for (auto& [k, v] : Ap->mul(full_to_red(mk), a)) out.add(red_to_full(k), v);
    return out;
  };
  return M;
}

// ------------------------------------------------------ twisting cochain

template <class K>
struct TwistingCochain {
  const DGCoalgebra<K>* C = nullptr;
  const DGAlgebra<K>* A = nullptr;
  std::function<AlgElem<K>(BasisKey)> tau; // degree -1 map C-bar -> A

  AlgElem<K> operator()(BasisKey c) const { return tau(c); }
};

// Maurer-Cartan: d_A tau + tau d_C + mu(tau x tau) Delta-bar + unit.h = 0
template <class K>
bool check_mc(const TwistingCochain<K>& tw) {
  const auto& C = *tw.C;
  const auto& A = *tw.A;
  for (int n : C.red.degrees())
    for (std::size_t i = 0; i < C.red.dim(n); ++i) {
      BasisKey c{n, i};
      AlgElem<K> acc = {C.h(c), Elem<K>{}};
      AlgElem<K> tc = tw(c);
      acc.red += A.d.apply(tc.red); // d_A tau(c); the unit part is killed by d
      Elem<K> dc = C.d.apply(Elem<K>(c, scalar_traits<K>::one()));
      for (auto& [k, v] : dc.terms()) acc += tw(k) * v;
      for (auto& [c1, c2, v] : C.delta_bar(c)) {
        K sgn = c1.degree % 2 == 0 ? scalar_traits<K>::one() : -scalar_traits<K>::one();
        acc += A.product_full(tw(c1), tw(c2)) * (sgn * v);
      }
      if (!acc.is_zero()) return false;
    }
  return true;
}

} // namespace koszul
