#pragma once

// Twisted tensor products, enveloping algebras/bimodules and twisted hom
// complexes.  All builders materialize only degrees inside the requested
// window extended by one on each side, so homology over the window is
// computable from what is built.

#include "koszul/dgstruct.hpp"

#include <string>

namespace koszul {

namespace detail {

template <class K>
K parity(long exponent) {
  return exponent % 2 == 0 ? scalar_traits<K>::one() : -scalar_traits<K>::one();
}

// act with a full-algebra element on a module element, from the left
template <class K>
Elem<K> act_alg_left(const DGModule<K>& M, const AlgElem<K>& w, BasisKey m) {
  Elem<K> out;
  out.add(m, w.unit);
  for (auto& [a, c] : w.red.terms()) out.add(M.act_left(a, m), c);
  return out;
}
template <class K>
Elem<K> act_alg_right(const DGModule<K>& M, BasisKey m, const AlgElem<K>& w) {
  Elem<K> out;
  out.add(m, w.unit);
  for (auto& [a, c] : w.red.terms()) out.add(M.act_right(m, a), c);
  return out;
}

} // namespace detail

// ----------------------------------------------------- one-sided twists

// E (x)^tau M with the comodule factor on the left; uses the right
// coaction of E.  d(e@m) = de@m + (-1)^{|e|} e@dm + sum (-1)^{|e0|} e0 @ tau(e1) m
template <class K>
ChainComplex<K> twisted_tensor_left(const DGComodule<K>& E, const DGModule<K>& M,
                                    const TwistingCochain<K>& tau, Window w,
                                    Truncation trunc = {}) {
  if (check_mc(tau) == false) throw maurer_cartan_violated("twisted_tensor_left");
  GradedModule basis;
  std::vector<std::pair<BasisKey, BasisKey>> keys;
  for (int ne : E.basis.degrees())
    for (int nm : M.basis.degrees()) {
      int n = ne + nm;
      if (n < w.lo - 1 || n > w.hi + 1) continue;
      for (std::size_t i = 0; i < E.basis.dim(ne); ++i)
        for (std::size_t j = 0; j < M.basis.dim(nm); ++j)
          keys.push_back({{ne, i}, {nm, j}});
    }
  std::sort(keys.begin(), keys.end(), [](auto& a, auto& b) {
    int da = a.first.degree + a.second.degree, db = b.first.degree + b.second.degree;
    return std::tie(da, a.first, a.second) < std::tie(db, b.first, b.second);
  });
  for (auto& [e, m] : keys)
    basis.add(e.degree + m.degree, E.basis.label(e) + "⊗" + M.basis.label(m));

  auto key_of = [&basis, &E, &M](BasisKey e, BasisKey m) {
    return basis.key(e.degree + m.degree, E.basis.label(e) + "⊗" + M.basis.label(m));
  };

  ChainComplex<K> c;
  c.basis = basis;
  c.truncation = trunc;
  // assemble differential matrices degree by degree
  std::map<int, SparseMatrix<K>> mats;
  for (int n : c.basis.degrees()) {
    SparseMatrix<K> mat(c.basis.dim(n - 1), c.basis.dim(n));
    mats.emplace(n, std::move(mat));
  }
  auto emit = [&](BasisKey src, const Elem<K>& img) {
    auto it = mats.find(src.degree);
    if (it == mats.end()) return;
    for (auto& [t, v] : img.terms()) {
      if (t.degree != src.degree - 1) continue; // outside materialized window edge
      it->second.add_to(t.index, src.index, v);
    }
  };
  for (auto& [e, m] : keys) {
    BasisKey src = key_of(e, m);
    Elem<K> img;
    // d_E e (x) m
    for (auto& [de, v] : E.d.apply(Elem<K>(e, scalar_traits<K>::one())))
      if (c.basis.has(de.degree + m.degree, E.basis.label(de) + "⊗" + M.basis.label(m)))
        img.add(key_of(de, m), v);
    // (-1)^{|e|} e (x) d_M m
    K se = detail::parity<K>(e.degree);
    for (auto& [dm, v] : M.d.apply(Elem<K>(m, scalar_traits<K>::one())))
      if (c.basis.has(e.degree + dm.degree, E.basis.label(e) + "⊗" + M.basis.label(dm)))
        img.add(key_of(e, dm), se * v);
    // twist: sum (-1)^{|e0|} e0 (x) tau(e1) m
    for (auto& [e0, c1, v] : E.right(e)) {
      AlgElem<K> t = tau(c1);
      Elem<K> acted = detail::act_alg_left(M, t, m);
      K s = detail::parity<K>(e0.degree);
      for (auto& [mm, u] : acted.terms())
        if (c.basis.has(e0.degree + mm.degree, E.basis.label(e0) + "⊗" + M.basis.label(mm)))
          img.add(key_of(e0, mm), s * v * u);
    }
    emit(src, img);
  }
  for (auto& [n, m] : mats) c.set_d(n, std::move(m));
  return c;
}

// M (x)^tau E with the module on the left; uses the left coaction of E.
// d(m@e) = dm@e + (-1)^{|m|} m@de - (-1)^{|m|} sum m tau(e-1) @ e0
template <class K>
ChainComplex<K> twisted_tensor_right(const DGModule<K>& M, const DGComodule<K>& E,
                                     const TwistingCochain<K>& tau, Window w,
                                     Truncation trunc = {}) {
  if (check_mc(tau) == false) throw maurer_cartan_violated("twisted_tensor_right");
  ChainComplex<K> c;
  c.truncation = trunc;
  std::vector<std::pair<BasisKey, BasisKey>> keys;
  for (int nm : M.basis.degrees())
    for (int ne : E.basis.degrees()) {
      int n = nm + ne;
      if (n < w.lo - 1 || n > w.hi + 1) continue;
      for (std::size_t i = 0; i < M.basis.dim(nm); ++i)
        for (std::size_t j = 0; j < E.basis.dim(ne); ++j)
          keys.push_back({{nm, i}, {ne, j}});
    }
  std::sort(keys.begin(), keys.end(), [](auto& a, auto& b) {
    int da = a.first.degree + a.second.degree, db = b.first.degree + b.second.degree;
    return std::tie(da, a.first, a.second) < std::tie(db, b.first, b.second);
  });
  for (auto& [m, e] : keys)
    c.basis.add(m.degree + e.degree, M.basis.label(m) + "⊗" + E.basis.label(e));
  auto key_of = [&c, &E, &M](BasisKey m, BasisKey e) {
    return c.basis.key(m.degree + e.degree, M.basis.label(m) + "⊗" + E.basis.label(e));
  };
  auto has = [&c, &E, &M](BasisKey m, BasisKey e) {
    return c.basis.has(m.degree + e.degree, M.basis.label(m) + "⊗" + E.basis.label(e));
  };
  std::map<int, SparseMatrix<K>> mats;
  for (int n : c.basis.degrees())
    mats.emplace(n, SparseMatrix<K>(c.basis.dim(n - 1), c.basis.dim(n)));
  for (auto& [m, e] : keys) {
    BasisKey src = key_of(m, e);
    auto it = mats.find(src.degree);
    if (it == mats.end()) continue;
    auto put = [&](BasisKey mm, BasisKey ee, const K& v) {
      if (is_zero(v) || !has(mm, ee)) return;
      BasisKey t = key_of(mm, ee);
      if (t.degree != src.degree - 1) return;
      it->second.add_to(t.index, src.index, v);
    };
    for (auto& [dm, v] : M.d.apply(Elem<K>(m, scalar_traits<K>::one()))) put(dm, e, v);
    K sm = detail::parity<K>(m.degree);
    for (auto& [de, v] : E.d.apply(Elem<K>(e, scalar_traits<K>::one())))
      put(m, de, sm * v);
    for (auto& [c1, e0, v] : E.left(e)) {
      AlgElem<K> t = tau(c1);
      Elem<K> acted = detail::act_alg_right(M, m, t);
      for (auto& [mm, u] : acted.terms()) put(mm, e0, -(sm * v * u));
    }
  }
  for (auto& [n, m2] : mats) c.set_d(n, std::move(m2));
  return c;
}

// E (x)^{tau^e} M for a bicomodule E and a bimodule M:
// d(e@m) = de@m + (-1)^{|e|} e@dm
//        + sum (-1)^{|e0|} e0 @ tau(e1) m                (standard twist)
//        - sum (-1)^{(|e-1|-1)(|e0|+|m|)} e0 @ m tau(e-1) (wrap twist)
template <class K>
ChainComplex<K> twisted_tensor_two_sided_general(const DGComodule<K>& E,
                                                 const DGModule<K>& M,
                                                 const TwistingCochain<K>& tau, Window w,
                                                 Truncation trunc = {}) {
  ChainComplex<K> c;
  c.truncation = trunc;
  std::vector<std::pair<BasisKey, BasisKey>> keys;
  for (int ne : E.basis.degrees())
    for (int nm : M.basis.degrees()) {
      int n = ne + nm;
      if (n < w.lo - 1 || n > w.hi + 1) continue;
      for (std::size_t i = 0; i < E.basis.dim(ne); ++i)
        for (std::size_t j = 0; j < M.basis.dim(nm); ++j)
          keys.push_back({{ne, i}, {nm, j}});
    }
  std::sort(keys.begin(), keys.end(), [](auto& a, auto& b) {
    int da = a.first.degree + a.second.degree, db = b.first.degree + b.second.degree;
    return std::tie(da, a.first, a.second) < std::tie(db, b.first, b.second);
  });
  for (auto& [e, m] : keys)
    c.basis.add(e.degree + m.degree, E.basis.label(e) + "⊗" + M.basis.label(m));
  auto has = [&](BasisKey e, BasisKey m) {
    return c.basis.has(e.degree + m.degree, E.basis.label(e) + "⊗" + M.basis.label(m));
  };
  auto key_of = [&](BasisKey e, BasisKey m) {
    return c.basis.key(e.degree + m.degree, E.basis.label(e) + "⊗" + M.basis.label(m));
  };
  std::map<int, SparseMatrix<K>> mats;
  for (int n : c.basis.degrees())
    mats.emplace(n, SparseMatrix<K>(c.basis.dim(n - 1), c.basis.dim(n)));
  for (auto& [e, m] : keys) {
    BasisKey src = key_of(e, m);
    auto it = mats.find(src.degree);
    if (it == mats.end()) continue;
    auto put = [&](BasisKey ee, BasisKey mm, const K& v) {
      if (is_zero(v) || !has(ee, mm)) return;
      BasisKey t = key_of(ee, mm);
      if (t.degree != src.degree - 1) return;
      it->second.add_to(t.index, src.index, v);
    };
    for (auto& [de, v] : E.d.apply(Elem<K>(e, scalar_traits<K>::one()))) put(de, m, v);
    K se = detail::parity<K>(e.degree);
    for (auto& [dm, v] : M.d.apply(Elem<K>(m, scalar_traits<K>::one())))
      put(e, dm, se * v);
    for (auto& [e0, c1, v] : E.right(e)) {
      AlgElem<K> t = tau(c1);
      Elem<K> acted = detail::act_alg_left(M, t, m);
      K s = detail::parity<K>(e0.degree);
      for (auto& [mm, u] : acted.terms()) put(e0, mm, s * v * u);
    }
    for (auto& [c1, e0, v] : E.left(e)) {
      AlgElem<K> t = tau(c1);
      Elem<K> acted = detail::act_alg_right(M, m, t);
      K s = detail::parity<K>((long)(c1.degree - 1) * (e0.degree + m.degree));
      for (auto& [mm, u] : acted.terms()) put(e0, mm, -(s * v * u));
    }
  }
  for (auto& [n, m2] : mats) c.set_d(n, std::move(m2));
  return c;
}

// ------------------------------------------------- enveloping structures

// opposite coalgebra: Delta^op = swap o Delta with Koszul sign
template <class K>
DGCoalgebra<K> opposite_coalgebra(const DGCoalgebra<K>& C) {
  DGCoalgebra<K> op;
  op.name = C.name + "^op";
  op.red = C.red;
  op.d = C.d;
  op.curvature = C.curvature;
  op.cocommutative = C.cocommutative;
  const DGCoalgebra<K>* Cp = &C;
  op.red_coproduct = [Cp](BasisKey c) {
    Coproduct<K> out;
    for (auto& [c1, c2, v] : Cp->delta_bar(c)) {
      K s = detail::parity<K>((long)c1.degree * c2.degree);
      out.push_back({c2, c1, s * v});
    }
    return out;
  };
  return op;
}

// A^e = A (x) A^op as a dg algebra; basis pairs "u⊗v" excluding the unit
// pair, optionally capped by total degree.
template <class K>
DGAlgebra<K> enveloping_algebra(const DGAlgebra<K>& A, int max_degree = 1 << 20) {
  DGAlgebra<K> E;
  E.name = A.name + "^e";
  GradedModule full = full_module_basis<K>(A.aug);
  std::vector<std::pair<BasisKey, BasisKey>> keys;
  for (int nu : full.degrees())
    for (int nv : full.degrees()) {
      if (nu + nv > max_degree) continue;
      for (std::size_t i = 0; i < full.dim(nu); ++i)
        for (std::size_t j = 0; j < full.dim(nv); ++j) {
          BasisKey u{nu, i}, v{nv, j};
          if (is_unit(u) && is_unit(v)) continue;
          keys.push_back({u, v});
        }
    }
  std::sort(keys.begin(), keys.end(), [](auto& a, auto& b) {
    int da = a.first.degree + a.second.degree, db = b.first.degree + b.second.degree;
    return std::tie(da, a.first, a.second) < std::tie(db, b.first, b.second);
  });
  auto lab = [full](BasisKey u, BasisKey v) {
    return full.label(u) + "⊗" + full.label(v);
  };
  for (auto& [u, v] : keys) E.aug.add(u.degree + v.degree, lab(u, v));

  const DGAlgebra<K>* Ap = &A;
  // product in k.1 + A-bar, in full-module coordinates
  auto mul_full = [Ap](BasisKey u, BasisKey u2) {
    AlgElem<K> r;
    if (is_unit(u) && is_unit(u2)) { r.unit = scalar_traits<K>::one(); return r; }
    if (is_unit(u)) { r.red.add(u2, scalar_traits<K>::one()); return r; }
    if (is_unit(u2)) { r.red.add(u, scalar_traits<K>::one()); return r; }
    for (auto& [k, c] : Ap->mul(full_to_red(u), full_to_red(u2)))
      r.red.add(red_to_full(k), c);
    return r;
  };
  // the multiplication needs the final basis for key lookup
  {
    GradedModule eb = E.aug;
    GradedModule fb = full;
    E.mul = [mul_full, eb, fb](BasisKey x, BasisKey y) -> Elem<K> {
      auto split = [&](BasisKey k) {
        const std::string& l = eb.label(k);
        auto pos = l.find("⊗");
        std::string lu = l.substr(0, pos), lv = l.substr(pos + 3);
        // find degrees by scanning full basis
        for (int nu : fb.degrees())
          if (fb.has(nu, lu)) {
            BasisKey u = fb.key(nu, lu);
            int nv = k.degree - nu;
            if (fb.has(nv, lv)) return std::make_pair(u, fb.key(nv, lv));
          }
        throw std::runtime_error("enveloping key not found: " + l);
      };
      auto [u, v] = split(x);
      auto [u2, v2] = split(y);
      // (u(x)v)(u2(x)v2) = (-1)^{|v|(|u2|+|v2|)} (u u2) (x) (v2 v)
      K s = detail::parity<K>((long)v.degree * (u2.degree + v2.degree));
      AlgElem<K> uu = mul_full(u, u2);
      AlgElem<K> vv = mul_full(v2, v);
      Elem<K> out;
      auto emit = [&](BasisKey a, BasisKey b, const K& c) {
        if (is_unit(a) && is_unit(b)) return; // unit of A^e: dropped from ideal
        out.add(eb.key(a.degree + b.degree, fb.label(a) + "⊗" + fb.label(b)), c);
      };
      K uunit = uu.unit, vunit = vv.unit;
      if (!is_zero(uunit) && !is_zero(vunit)) emit(unit_key(), unit_key(), s * uunit * vunit);
      if (!is_zero(uunit))
        for (auto& [b, cb] : vv.red.terms()) emit(unit_key(), b, s * uunit * cb);
      if (!is_zero(vunit))
        for (auto& [a, ca] : uu.red.terms()) emit(a, unit_key(), s * ca * vunit);
      for (auto& [a, ca] : uu.red.terms())
        for (auto& [b, cb] : vv.red.terms()) emit(a, b, s * ca * cb);
      return out;
    };
    // differential d(u (x) v) = du (x) v + (-1)^{|u|} u (x) dv
    GradedMap<K> fd = full_module_diff<K>(A.aug, A.d);
    E.d.shift = -1;
    for (int n : E.aug.degrees()) {
      SparseMatrix<K> m(E.aug.dim(n - 1), E.aug.dim(n));
      for (std::size_t j = 0; j < E.aug.dim(n); ++j) {
        const std::string& l = E.aug.labels(n)[j];
        auto pos = l.find("⊗");
        std::string lu = l.substr(0, pos), lv = l.substr(pos + 3);
        BasisKey u{-1, 0}, v{-1, 0};
        for (int nu : fb.degrees())
          if (fb.has(nu, lu) && fb.has(n - nu, lv)) {
            u = fb.key(nu, lu);
            v = fb.key(n - nu, lv);
            break;
          }
        Elem<K> du = fd.apply(Elem<K>(u, scalar_traits<K>::one()));
        for (auto& [k, c] : du.terms())
          if (E.aug.has(k.degree + v.degree, fb.label(k) + "⊗" + fb.label(v)))
            m.add_to(E.aug.key(k.degree + v.degree, fb.label(k) + "⊗" + fb.label(v)).index, j, c);
        K su = detail::parity<K>(u.degree);
        Elem<K> dv = fd.apply(Elem<K>(v, scalar_traits<K>::one()));
        for (auto& [k, c] : dv.terms())
          if (E.aug.has(u.degree + k.degree, fb.label(u) + "⊗" + fb.label(k)))
            m.add_to(E.aug.key(u.degree + k.degree, fb.label(u) + "⊗" + fb.label(k)).index, j,
                     su * c);
      }
      if (!m.is_zero_matrix()) E.d.components[n] = std::move(m);
    }
  }
  return E;
}

// A (x) A as an A-bimodule (outer actions), capped by total degree
template <class K>
DGModule<K> enveloping_bimodule(const DGAlgebra<K>& A, int max_degree) {
  DGModule<K> M;
  M.name = A.name + "⊗" + A.name;
  GradedModule full = full_module_basis<K>(A.aug);
  std::vector<std::pair<BasisKey, BasisKey>> keys;
  for (int nu : full.degrees())
    for (int nv : full.degrees()) {
      if (nu + nv > max_degree) continue;
      for (std::size_t i = 0; i < full.dim(nu); ++i)
        for (std::size_t j = 0; j < full.dim(nv); ++j)
          keys.push_back({{nu, i}, {nv, j}});
    }
  std::sort(keys.begin(), keys.end(), [](auto& a, auto& b) {
    int da = a.first.degree + a.second.degree, db = b.first.degree + b.second.degree;
    return std::tie(da, a.first, a.second) < std::tie(db, b.first, b.second);
  });
  GradedModule fb = full;
  for (auto& [u, v] : keys) M.basis.add(u.degree + v.degree, fb.label(u) + "⊗" + fb.label(v));

  const DGAlgebra<K>* Ap = &A;
  GradedModule mb = M.basis;
  auto split = [fb, mb](BasisKey k) {
    const std::string& l = mb.label(k);
    auto pos = l.find("⊗");
    std::string lu = l.substr(0, pos), lv = l.substr(pos + 3);
    for (int nu : fb.degrees())
      if (fb.has(nu, lu) && fb.has(k.degree - nu, lv))
        return std::make_pair(fb.key(nu, lu), fb.key(k.degree - nu, lv));
    throw std::runtime_error("bimodule key not found: " + l);
  };
  auto mul_full = [Ap](BasisKey u, BasisKey u2) {
    AlgElem<K> r;
    if (is_unit(u) && is_unit(u2)) { r.unit = scalar_traits<K>::one(); return r; }
    if (is_unit(u)) { r.red.add(u2, scalar_traits<K>::one()); return r; }
    if (is_unit(u2)) { r.red.add(u, scalar_traits<K>::one()); return r; }
    for (auto& [k, c] : Ap->mul(full_to_red(u), full_to_red(u2)))
      r.red.add(red_to_full(k), c);
    return r;
  };
  auto emit_pair = [fb, mb](Elem<K>& out, const AlgElem<K>& x, BasisKey fixed, bool left,
                            const K& coef) {
    auto add1 = [&](BasisKey a, const K& c) {
      BasisKey u = left ? a : fixed, v = left ? fixed : a;
      std::string l = fb.label(u) + "⊗" + fb.label(v);
      if (mb.has(u.degree + v.degree, l)) out.add(mb.key(u.degree + v.degree, l), c);
    };
    if (!is_zero(x.unit)) add1(unit_key(), coef * x.unit);
    for (auto& [a, c] : x.red.terms()) add1(a, coef * c);
  };
  M.act_left = [split, mul_full, emit_pair](BasisKey a, BasisKey mk) {
    auto [u, v] = split(mk);
    Elem<K> out;
    AlgElem<K> au = mul_full(red_to_full(a), u);
    emit_pair(out, au, v, true, scalar_traits<K>::one());
    return out;
  };
  M.act_right = [split, mul_full, emit_pair](BasisKey mk, BasisKey a) {
    auto [u, v] = split(mk);
    Elem<K> out;
    AlgElem<K> va = mul_full(v, red_to_full(a));
    emit_pair(out, va, u, false, scalar_traits<K>::one());
    return out;
  };
  GradedMap<K> fd = full_module_diff<K>(A.aug, A.d);
  M.d.shift = -1;
  for (int n : M.basis.degrees()) {
    SparseMatrix<K> m(M.basis.dim(n - 1), M.basis.dim(n));
    for (std::size_t j = 0; j < M.basis.dim(n); ++j) {
      auto [u, v] = split(BasisKey{n, j});
      for (auto& [k, c] : fd.apply(Elem<K>(u, scalar_traits<K>::one()))) {
        std::string l = fb.label(k) + "⊗" + fb.label(v);
        if (M.basis.has(k.degree + v.degree, l))
          m.add_to(M.basis.key(k.degree + v.degree, l).index, j, c);
      }
      K su = detail::parity<K>(u.degree);
      for (auto& [k, c] : fd.apply(Elem<K>(v, scalar_traits<K>::one()))) {
        std::string l = fb.label(u) + "⊗" + fb.label(k);
        if (M.basis.has(u.degree + k.degree, l))
          m.add_to(M.basis.key(u.degree + k.degree, l).index, j, su * c);
      }
    }
    if (!m.is_zero_matrix()) M.d.components[n] = std::move(m);
  }
  return M;
}

// ------------------------------------------------------- twisted hom

struct infinite_rank_source : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// uHom^tau(M, A (x)^tau N) for comodules M (finite rank), N over C with
// A = truncated cobar.  Basis functionals m* -> w (x) n with w in k.1+A-bar.
// The differential is the hom differential of A-module maps
// A (x)^tau M -> A (x)^tau N restricted along m -> 1 (x) m:
//   D(f)(m) = d_{A(x)N}(f m) - (-1)^{|f|} f(d_M m)
//             + (-1)^{|f||c|} sum tau(c) . f(m0)   over left coactions c(x)m0 of m
template <class K>
ChainComplex<K> twisted_hom(const DGComodule<K>& M, const DGComodule<K>& N,
                            const DGAlgebra<K>& A, const TwistingCochain<K>& tau, Window w,
                            Truncation trunc = {}) {
  if (M.basis.total_dim() == 0)
    throw infinite_rank_source("twisted_hom: empty source comodule");
  GradedModule afull = full_module_basis<K>(A.aug);
  GradedMap<K> ad = full_module_diff<K>(A.aug, A.d);

  ChainComplex<K> c;
  c.truncation = trunc;
  struct Gen { BasisKey m, a, n; };
  std::vector<Gen> gens;
  for (int nm : M.basis.degrees())
    for (int na : afull.degrees())
      for (int nn : N.basis.degrees()) {
        int deg = na + nn - nm;
        if (deg < w.lo - 1 || deg > w.hi + 1) continue;
        for (std::size_t i = 0; i < M.basis.dim(nm); ++i)
          for (std::size_t j = 0; j < afull.dim(na); ++j)
            for (std::size_t l = 0; l < N.basis.dim(nn); ++l)
              gens.push_back({{nm, i}, {na, j}, {nn, l}});
      }
  auto lab = [&](const Gen& g) {
    return M.basis.label(g.m) + "*↦" + afull.label(g.a) + "⊗" + N.basis.label(g.n);
  };
  auto deg_of = [](const Gen& g) { return g.a.degree + g.n.degree - g.m.degree; };
  std::sort(gens.begin(), gens.end(), [&](const Gen& a, const Gen& b) {
    return std::tie(a.m, a.a, a.n) < std::tie(b.m, b.a, b.n);
  });
  for (auto& g : gens) c.basis.add(deg_of(g), lab(g));

  auto has = [&](const Gen& g) { return c.basis.has(deg_of(g), lab(g)); };
  auto key = [&](const Gen& g) { return c.basis.key(deg_of(g), lab(g)); };

  auto mul_full = [&A](BasisKey u, BasisKey u2) {
    AlgElem<K> r;
    if (is_unit(u) && is_unit(u2)) { r.unit = scalar_traits<K>::one(); return r; }
    if (is_unit(u)) { r.red.add(u2, scalar_traits<K>::one()); return r; }
    if (is_unit(u2)) { r.red.add(u, scalar_traits<K>::one()); return r; }
    for (auto& [k2, c2] : A.mul(full_to_red(u), full_to_red(u2)))
      r.red.add(red_to_full(k2), c2);
    return r;
  };

  std::map<int, SparseMatrix<K>> mats;
  for (int n : c.basis.degrees())
    mats.emplace(n, SparseMatrix<K>(c.basis.dim(n - 1), c.basis.dim(n)));
  for (auto& g : gens) {
    BasisKey src = key(g);
    auto it = mats.find(src.degree);
    if (it == mats.end()) continue;
    auto put = [&](const Gen& t, const K& v) {
      if (is_zero(v) || !has(t)) return;
      BasisKey tk = key(t);
      if (tk.degree != src.degree - 1) return;
      it->second.add_to(tk.index, src.index, v);
    };
    const int fdeg = deg_of(g);
    // d_A w (x) n
    for (auto& [k2, v] : ad.apply(Elem<K>(g.a, scalar_traits<K>::one())))
      put({g.m, k2, g.n}, v);
    // (-1)^{|w|} w (x) d_N n
    K sw = detail::parity<K>(g.a.degree);
    for (auto& [k2, v] : N.d.apply(Elem<K>(g.n, scalar_traits<K>::one())))
      put({g.m, g.a, k2}, sw * v);
    // N-side twist: -(-1)^{|w|} sum w tau(n-1) (x) n0
    for (auto& [c1, n0, v] : N.left(g.n)) {
      AlgElem<K> t = tau(c1);
      if (!is_zero(t.unit)) put({g.m, g.a, n0}, -(sw * v * t.unit));
      for (auto& [a2, u] : t.red.terms()) {
        AlgElem<K> prod = mul_full(g.a, red_to_full(a2));
        if (!is_zero(prod.unit)) put({g.m, unit_key(), n0}, -(sw * v * u * prod.unit));
        for (auto& [pk, pv] : prod.red.terms()) put({g.m, pk, n0}, -(sw * v * u * pv));
      }
    }
    // pre-composition: -(-1)^{|f|} f o d_M: output functional at m' for dm' = m
    for (int nm : M.basis.degrees())
      for (std::size_t i = 0; i < M.basis.dim(nm); ++i) {
        BasisKey mp{nm, i};
        Elem<K> dmp = M.d.apply(Elem<K>(mp, scalar_traits<K>::one()));
        for (auto& [k2, v] : dmp.terms())
          if (k2 == g.m) put({mp, g.a, g.n}, -detail::parity<K>(fdeg) * v);
        // M-side twist: (-1)^{|f||c|} tau(c) . (w (x) n) at m' with (c, m) in left coaction
        for (auto& [c1, m0, v] : M.left(mp)) {
          if (!(m0 == g.m)) continue;
          K s = detail::parity<K>((long)fdeg * c1.degree);
          AlgElem<K> t = tau(c1);
          if (!is_zero(t.unit)) put({mp, g.a, g.n}, s * v * t.unit);
          for (auto& [a2, u] : t.red.terms()) {
            AlgElem<K> prod = mul_full(red_to_full(a2), g.a);
            if (!is_zero(prod.unit)) put({mp, unit_key(), g.n}, s * v * u * prod.unit);
            for (auto& [pk, pv] : prod.red.terms()) put({mp, pk, g.n}, s * v * u * pv);
          }
        }
      }
  }
  for (auto& [n, m2] : mats) c.set_d(n, std::move(m2));
  return c;
}

} // namespace koszul
