#pragma once

// Truncated cobar and bar constructions with their universal twisting
// cochains, and the counit resolution.
//
// Cobar words (c1|...|ck) carry degree sum(|ci| - 1); the differential is
// the derivation extension of  s c -> -s(dc) - sum (-1)^{|c'|} (c'|c'').
// Bar words [a1|...|ak] carry degree sum(|ai| + 1); the differential is
// the coderivation extension of  s a -> -s(da) and
// (sa|sa') -> (-1)^{|a|+1} s(aa').  Words beyond the length cap are a
// differential ideal (cobar) / the complement of a subcoalgebra (bar), so
// the truncations are honest dg objects.

#include "koszul/twist.hpp"

#include <memory>
#include <numeric>

namespace koszul {

struct not_augmented : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct curved_not_supported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Word = std::vector<BasisKey>;

// word bookkeeping shared by cobar and bar; held by shared_ptr so that the
// structure-map closures stay valid when the owning object is moved
struct WordIndex {
  // words stored per (degree -> index -> letters)
  std::map<int, std::vector<Word>> words;

  void add(int degree, const Word& w) { words[degree].push_back(w); }
  const Word& word(BasisKey k) const { return words.at(k.degree).at(k.index); }
};

template <class K>
struct CobarAlgebra {
  DGAlgebra<K> alg;       // the truncated cobar as a dg algebra
  std::shared_ptr<const WordIndex> index; // letters of each basis word (C-bar keys)
  std::shared_ptr<const GradedModule> letters; // snapshot of C-bar labels
  std::shared_ptr<const GradedModule> words;   // snapshot of the word basis
  const DGCoalgebra<K>* base = nullptr;
  int length_cap = 0;
  int delta_min = 0;      // minimal letter degree
  Truncation truncation() const { return Truncation{true, length_cap, delta_min}; }
};

template <class K>
struct BarCoalgebra {
  DGCoalgebra<K> coa;     // the truncated bar as a dg coalgebra
  std::shared_ptr<const WordIndex> index; // letters of each basis word (A-bar keys)
  std::shared_ptr<const GradedModule> letters;
  std::shared_ptr<const GradedModule> words;
  const DGAlgebra<K>* base = nullptr;
  int length_cap = 0;
  int delta_min = 0;
  Truncation truncation() const { return Truncation{true, length_cap, delta_min}; }
};

namespace detail {

inline std::string join_word(const GradedModule& letters, const Word& w, char open,
                             char close) {
  std::string s(1, open);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += "|";
    s += letters.label(w[i]);
  }
  s += close;
  return s;
}

} // namespace detail

// ----------------------------------------------------------------- cobar

template <class K>
CobarAlgebra<K> cobar(const DGCoalgebra<K>& C, int L) {
  check_conilpotent(C);
  if (C.curved())
    throw curved_not_supported(
        "cobar of a curved coalgebra: the one-letter curvature term leaves the "
        "augmentation ideal; all shipped pipelines have h = 0");
  CobarAlgebra<K> out;
  out.base = &C;
  out.length_cap = L;
  out.alg.name = "Ω≤" + std::to_string(L) + "(" + C.name + ")";

  std::vector<BasisKey> letters;
  for (int n : C.red.degrees())
    for (std::size_t i = 0; i < C.red.dim(n); ++i) letters.push_back({n, i});
  int dmin = letters.empty() ? 0 : letters[0].degree - 1;
  for (auto& l : letters) dmin = std::min(dmin, l.degree - 1);
  out.delta_min = letters.empty() ? 0 : dmin;

  // generate words by length, lexicographic in letter keys
  std::vector<Word> frontier = {{}};
  auto word_degree = [](const Word& w) {
    int d = 0;
    for (auto& l : w) d += l.degree - 1;
    return d;
  };
  std::vector<std::pair<int, Word>> all;
  for (int len = 1; len <= L; ++len) {
    std::vector<Word> next;
    for (auto& w : frontier)
      for (auto& l : letters) {
        Word nw = w;
        nw.push_back(l);
        next.push_back(std::move(nw));
      }
    for (auto& w : next) all.push_back({word_degree(w), w});
    frontier = std::move(next);
  }
  std::stable_sort(all.begin(), all.end(),
                   [](auto& a, auto& b) { return a.first < b.first; });
  auto idx = std::make_shared<WordIndex>();
  for (auto& [deg, w] : all) {
    out.alg.aug.add(deg, detail::join_word(C.red, w, '(', ')'));
    idx->add(deg, w);
  }
  out.index = idx;
  auto letter_basis = std::make_shared<GradedModule>(C.red);
  auto word_basis = std::make_shared<GradedModule>(out.alg.aug);
  out.letters = letter_basis;
  out.words = word_basis;

  const DGCoalgebra<K>* Cp = &C;
  int cap = L;

  auto key_of_word = [letter_basis, word_basis, word_degree](const Word& w) {
    return word_basis->key(word_degree(w), detail::join_word(*letter_basis, w, '(', ')'));
  };

  out.alg.mul = [idx, cap, key_of_word](BasisKey a, BasisKey b) -> Elem<K> {
    const Word& wa = idx->word(a);
    const Word& wb = idx->word(b);
    Elem<K> r;
    if (wa.size() + wb.size() > static_cast<std::size_t>(cap)) return r;
    Word w = wa;
    w.insert(w.end(), wb.begin(), wb.end());
    r.add(key_of_word(w), scalar_traits<K>::one());
    return r;
  };

  // differential
  out.alg.d.shift = -1;
  std::map<int, SparseMatrix<K>> mats;
  for (int n : out.alg.aug.degrees())
    mats.emplace(n, SparseMatrix<K>(out.alg.aug.dim(n - 1), out.alg.aug.dim(n)));
  for (auto& [ndeg, vec] : idx->words) {
    for (std::size_t j = 0; j < vec.size(); ++j) {
      const Word& w = vec[j];
      auto it = mats.find(ndeg);
      if (it == mats.end()) continue;
      auto put = [&](const Word& nw, const K& v) {
        if (is_zero(v) || nw.size() > static_cast<std::size_t>(cap)) return;
        BasisKey t = key_of_word(nw);
        it->second.add_to(t.index, j, v);
      };
      long eps = 0; // sum of cobar degrees of the letters to the left
      for (std::size_t i = 0; i < w.size(); ++i) {
        K sgn = detail::parity<K>(eps);
        // internal: -(s^-1 d c_i)
        Elem<K> dc = Cp->d.apply(Elem<K>(w[i], scalar_traits<K>::one()));
        for (auto& [k, v] : dc.terms()) {
          Word nw = w;
          nw[i] = k;
          put(nw, -(sgn * v));
        }
        // splitting: -(-1)^{|c'|} (c'|c'')
        for (auto& [c1, c2, v] : Cp->delta_bar(w[i])) {
          Word nw;
          nw.reserve(w.size() + 1);
          nw.insert(nw.end(), w.begin(), w.begin() + i);
          nw.push_back(c1);
          nw.push_back(c2);
          nw.insert(nw.end(), w.begin() + i + 1, w.end());
          K s2 = detail::parity<K>(c1.degree);
          put(nw, -(sgn * s2 * v));
        }
        eps += w[i].degree - 1;
      }
    }
  }
  for (auto& [n, m] : mats) out.alg.d.components[n] = std::move(m);
  for (auto it = out.alg.d.components.begin(); it != out.alg.d.components.end();) {
    if (it->second.is_zero_matrix()) it = out.alg.d.components.erase(it);
    else ++it;
  }
  return out;
}

template <class K>
TwistingCochain<K> universal_tau(const CobarAlgebra<K>& W) {
  TwistingCochain<K> t;
  t.C = W.base;
  t.A = &W.alg;
  auto letters = W.letters;
  auto words = W.words;
  t.tau = [letters, words](BasisKey c) {
    AlgElem<K> r;
    std::string lab = "(" + letters->label(c) + ")";
    r.red.add(words->key(c.degree - 1, lab), scalar_traits<K>::one());
    return r;
  };
  return t;
}

// ------------------------------------------------------------------- bar

template <class K>
BarCoalgebra<K> bar(const DGAlgebra<K>& A, int L) {
  BarCoalgebra<K> out;
  out.base = &A;
  out.length_cap = L;
  out.coa.name = "B≤" + std::to_string(L) + "(" + A.name + ")";

  std::vector<BasisKey> letters;
  for (int n : A.aug.degrees())
    for (std::size_t i = 0; i < A.aug.dim(n); ++i) letters.push_back({n, i});
  int dmin = letters.empty() ? 0 : letters[0].degree + 1;
  for (auto& l : letters) dmin = std::min(dmin, l.degree + 1);
  out.delta_min = letters.empty() ? 0 : dmin;

  auto word_degree = [](const Word& w) {
    int d = 0;
    for (auto& l : w) d += l.degree + 1;
    return d;
  };
  std::vector<Word> frontier = {{}};
  std::vector<std::pair<int, Word>> all;
  for (int len = 1; len <= L; ++len) {
    std::vector<Word> next;
    for (auto& w : frontier)
      for (auto& l : letters) {
        Word nw = w;
        nw.push_back(l);
        next.push_back(std::move(nw));
      }
    for (auto& w : next) all.push_back({word_degree(w), w});
    frontier = std::move(next);
  }
  std::stable_sort(all.begin(), all.end(),
                   [](auto& a, auto& b) { return a.first < b.first; });
  const DGAlgebra<K>* Ap = &A;
  auto idx = std::make_shared<WordIndex>();
  for (auto& [deg, w] : all) {
    out.coa.red.add(deg, detail::join_word(A.aug, w, '[', ']'));
    idx->add(deg, w);
  }
  out.index = idx;
  auto letter_basis = std::make_shared<GradedModule>(A.aug);
  auto word_basis = std::make_shared<GradedModule>(out.coa.red);
  out.letters = letter_basis;
  out.words = word_basis;

  auto key_of_word = [letter_basis, word_basis, word_degree](const Word& w) {
    return word_basis->key(word_degree(w), detail::join_word(*letter_basis, w, '[', ']'));
  };

  out.coa.red_coproduct = [idx, key_of_word](BasisKey k) {
    const Word& w = idx->word(k);
    Coproduct<K> out2;
    for (std::size_t i = 1; i < w.size(); ++i) {
      Word w1(w.begin(), w.begin() + i), w2(w.begin() + i, w.end());
      out2.push_back({key_of_word(w1), key_of_word(w2), scalar_traits<K>::one()});
    }
    return out2;
  };

  out.coa.d.shift = -1;
  std::map<int, SparseMatrix<K>> mats;
  for (int n : out.coa.red.degrees())
    mats.emplace(n, SparseMatrix<K>(out.coa.red.dim(n - 1), out.coa.red.dim(n)));
  for (auto& [ndeg, vec] : idx->words) {
    for (std::size_t j = 0; j < vec.size(); ++j) {
      const Word& w = vec[j];
      auto it = mats.find(ndeg);
      if (it == mats.end()) continue;
      auto put = [&](const Word& nw, const K& v) {
        if (is_zero(v)) return;
        BasisKey t = key_of_word(nw);
        it->second.add_to(t.index, j, v);
      };
      long eps = 0; // sum of bar degrees of the letters to the left
      for (std::size_t i = 0; i < w.size(); ++i) {
        K sgn = detail::parity<K>(eps);
        // internal: -(s d a_i)
        Elem<K> da = Ap->d.apply(Elem<K>(w[i], scalar_traits<K>::one()));
        for (auto& [k, v] : da.terms()) {
          Word nw = w;
          nw[i] = k;
          put(nw, -(sgn * v));
        }
        // merge with the next letter: (-1)^{|a_i|+1} s(a_i a_{i+1})
        if (i + 1 < w.size()) {
          Elem<K> prod = Ap->mul(w[i], w[i + 1]);
          K s2 = detail::parity<K>(w[i].degree + 1);
          for (auto& [k, v] : prod.terms()) {
            Word nw;
            nw.reserve(w.size() - 1);
            nw.insert(nw.end(), w.begin(), w.begin() + i);
            nw.push_back(k);
            nw.insert(nw.end(), w.begin() + i + 2, w.end());
            put(nw, sgn * s2 * v);
          }
        }
        eps += w[i].degree + 1;
      }
    }
  }
  for (auto& [n, m] : mats)
    if (!m.is_zero_matrix()) out.coa.d.components[n] = std::move(m);
  return out;
}

template <class K>
TwistingCochain<K> universal_tau(const BarCoalgebra<K>& W) {
  TwistingCochain<K> t;
  t.C = &W.coa;
  t.A = W.base;
  auto idx = W.index;
  t.tau = [idx](BasisKey k) {
    AlgElem<K> r;
    const Word& w = idx->word(k);
    if (w.size() == 1) r.red.add(w[0], -scalar_traits<K>::one());
    return r;
  };
  return t;
}

// -------------------------------------------------------- plain complexes

// the underlying chain complex of an algebra (k.1 + A-bar) or module
template <class K>
ChainComplex<K> complex_of_algebra(const DGAlgebra<K>& A, Truncation trunc = {}) {
  ChainComplex<K> c;
  c.basis = full_module_basis<K>(A.aug);
  auto d = full_module_diff<K>(A.aug, A.d);
  for (auto& [n, m] : d.components) c.set_d(n, std::move(m));
  c.truncation = trunc;
  return c;
}

template <class K>
ChainComplex<K> complex_of_module(const DGModule<K>& M, Truncation trunc = {}) {
  ChainComplex<K> c;
  c.basis = M.basis;
  for (auto& [n, m] : M.d.components) c.set_d(n, m);
  c.truncation = trunc;
  return c;
}

// -------------------------------------------------- counit resolution

struct window_not_trusted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A (x)^tau C (x)^tau M together with the counit map to M
// (a (x) c (x) m -> eps(c) a m).
template <class K>
ChainMap<K> counit_resolution(const CobarAlgebra<K>& W, const DGModule<K>& M, Window w) {
  const DGCoalgebra<K>& C = *W.base;
  const DGAlgebra<K>& A = W.alg;
  TwistingCochain<K> tau = universal_tau(W);
  if (!check_mc(tau)) throw maurer_cartan_violated("counit_resolution");

  GradedModule afull = full_module_basis<K>(A.aug);
  GradedMap<K> ad = full_module_diff<K>(A.aug, A.d);
  GradedModule cfull = full_module_basis<K>(C.red);
  GradedMap<K> cd = full_module_diff<K>(C.red, C.d);
  DGComodule<K> CM = comodule_of_coalgebra(C);

  ChainComplex<K> R;
  R.truncation = W.truncation();
  struct Gen { BasisKey a, c, m; };
  std::vector<Gen> gens;
  for (int na : afull.degrees())
    for (int nc : cfull.degrees())
      for (int nm : M.basis.degrees()) {
        int n = na + nc + nm;
        if (n < w.lo - 1 || n > w.hi + 1) continue;
        for (std::size_t i = 0; i < afull.dim(na); ++i)
          for (std::size_t j = 0; j < cfull.dim(nc); ++j)
            for (std::size_t l = 0; l < M.basis.dim(nm); ++l)
              gens.push_back({{na, i}, {nc, j}, {nm, l}});
      }
  std::sort(gens.begin(), gens.end(), [](const Gen& x, const Gen& y) {
    int dx = x.a.degree + x.c.degree + x.m.degree;
    int dy = y.a.degree + y.c.degree + y.m.degree;
    return std::tie(dx, x.a, x.c, x.m) < std::tie(dy, y.a, y.c, y.m);
  });
  auto lab = [&](const Gen& g) {
    return afull.label(g.a) + "⊗" + cfull.label(g.c) + "⊗" + M.basis.label(g.m);
  };
  auto deg = [](const Gen& g) { return g.a.degree + g.c.degree + g.m.degree; };
  for (auto& g : gens) R.basis.add(deg(g), lab(g));
  auto has = [&](const Gen& g) { return R.basis.has(deg(g), lab(g)); };
  auto key = [&](const Gen& g) { return R.basis.key(deg(g), lab(g)); };

  auto mul_full = [&A](BasisKey u, BasisKey u2) {
    AlgElem<K> r;
    if (is_unit(u) && is_unit(u2)) { r.unit = scalar_traits<K>::one(); return r; }
    if (is_unit(u)) { r.red.add(u2, scalar_traits<K>::one()); return r; }
    if (is_unit(u2)) { r.red.add(u, scalar_traits<K>::one()); return r; }
    for (auto& [k, c] : A.mul(full_to_red(u), full_to_red(u2)))
      r.red.add(red_to_full(k), c);
    return r;
  };

  std::map<int, SparseMatrix<K>> mats;
  for (int n : R.basis.degrees())
    mats.emplace(n, SparseMatrix<K>(R.basis.dim(n - 1), R.basis.dim(n)));
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
    for (auto& [k, v] : ad.apply(Elem<K>(g.a, scalar_traits<K>::one())))
      put({k, g.c, g.m}, v);
    K sa = detail::parity<K>(g.a.degree);
    for (auto& [k, v] : cd.apply(Elem<K>(g.c, scalar_traits<K>::one())))
      put({g.a, k, g.m}, sa * v);
    K sac = detail::parity<K>(g.a.degree + g.c.degree);
    for (auto& [k, v] : M.d.apply(Elem<K>(g.m, scalar_traits<K>::one())))
      put({g.a, g.c, k}, sac * v);
    // left twist (module-comodule pair A, C): -(-1)^{|a|} a tau(c-1) (x) c0 (x) m
    for (auto& [c1, c0, v] : CM.left(g.c)) {
      AlgElem<K> t = tau(c1);
      if (!is_zero(t.unit)) put({g.a, c0, g.m}, -(sa * v * t.unit));
      for (auto& [a2, u] : t.red.terms()) {
        AlgElem<K> prod = mul_full(g.a, red_to_full(a2));
        if (!is_zero(prod.unit)) put({unit_key(), c0, g.m}, -(sa * v * u * prod.unit));
        for (auto& [pk, pv] : prod.red.terms()) put({pk, c0, g.m}, -(sa * v * u * pv));
      }
    }
    // right twist (comodule-module pair C, M): (-1)^{|a|+|c0|} a (x) c0 (x) tau(c1) m
    for (auto& [c0, c1, v] : CM.right(g.c)) {
      AlgElem<K> t = tau(c1);
      K s = detail::parity<K>(g.a.degree + c0.degree);
      Elem<K> acted;
      acted.add(g.m, t.unit);
      for (auto& [a2, u] : t.red.terms()) acted.add(M.act_left(a2, g.m), u);
      for (auto& [mk, mv] : acted.terms()) put({g.a, c0, mk}, s * v * mv);
    }
  }
  for (auto& [n, m] : mats) R.set_d(n, std::move(m));

  // the counit map a (x) c (x) m -> eps(c) a.m
  ChainComplex<K> Mc = complex_of_module(M, W.truncation());
  ChainMap<K> out;
  out.degree = 0;
  std::map<int, SparseMatrix<K>> comps;
  for (int n : R.basis.degrees())
    comps.emplace(n, SparseMatrix<K>(Mc.basis.dim(n), R.basis.dim(n)));
  for (auto& g : gens) {
    if (!is_unit(g.c)) continue;
    BasisKey src = key(g);
    auto it = comps.find(src.degree);
    if (it == comps.end()) continue;
    Elem<K> img;
    if (is_unit(g.a)) {
      img.add(g.m, scalar_traits<K>::one());
    } else {
      img = M.act_left(full_to_red(g.a), g.m);
    }
    for (auto& [k, v] : img.terms()) {
      if (k.degree != src.degree) continue;
      it->second.add_to(k.index, src.index, v);
    }
  }
  for (auto& [n, m] : comps)
    if (!m.is_zero_matrix()) out.components[n] = std::move(m);
  out.source = std::move(R);
  out.target = std::move(Mc);
  return out;
}

} // namespace koszul
