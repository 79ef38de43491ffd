#pragma once

// Hochschild complex of a truncated dg algebra, coHochschild complex of a
// conilpotent coalgebra, mixed-complex structure (b, B), cyclic and
// negative-cyclic truncations, and lifting Hochschild cycles to negative
// cyclic cycles.
//
// Conventions (gated by the mixed identities and the comparison tests):
//   CH(A) = A (x) B(A):  b = d_A on the front slot
//                            + (-1)^{|a0|} (bar differential on the word)
//                            + (-1)^{|a0|} a0 a1 (x) [a2|...]
//                            - (-1)^{<an>(|a0|+deg')} an a0 (x) [a1|...]
//   B(a0 [a1|...|an]) = sum of cyclic rotations with a0 inserted as a
//   letter and 1 in the front slot (zero when a0 = 1).
//   coCH(C) = C (x) Omega C: b = slot/word differentials + the standard and
//   wrap twists from twist.hpp; B extracts the first letter of each cyclic
//   rotation into the (counit) slot and is zero off the counit slot.
//   Connes B has degree +1 in both cases.

#include "koszul/barcobar.hpp"

#include <unordered_map>

namespace koszul {

struct not_a_cycle : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class K>
struct MixedComplex {
  ChainComplex<K> cx;                      // operator b as the differential
  std::map<int, SparseMatrix<K>> connes_B; // degree n -> degree n+1

  const SparseMatrix<K>& B(int n) const {
    auto it = connes_B.find(n);
    if (it != connes_B.end()) return it->second;
    static thread_local std::map<std::pair<std::size_t, std::size_t>, SparseMatrix<K>> zeros;
    auto key = std::make_pair(cx.basis.dim(n + 1), cx.basis.dim(n));
    auto z = zeros.find(key);
    if (z == zeros.end()) z = zeros.emplace(key, SparseMatrix<K>(key.first, key.second)).first;
    return z->second;
  }

  Elem<K> apply_B(const Elem<K>& x) const {
    Elem<K> y;
    for (auto& [k, c] : x.terms()) {
      const auto& m = B(k.degree);
      for (auto& [row, v] : m.column(k.index)) y.add(BasisKey{k.degree + 1, row}, c * v);
    }
    return y;
  }

  // b^2 = 0, B^2 = 0, bB + Bb = 0 inside the materialized range
  void verify(Window w) const {
    cx.validate();
    for (int n = w.lo - 1; n <= w.hi; ++n) {
      if (cx.basis.dim(n) == 0) continue;
      if (cx.basis.dim(n + 2) > 0) {
        auto bb = B(n + 1) * B(n);
        if (!bb.is_zero_matrix())
          throw structure_violation("B^2 != 0 at degree " + std::to_string(n));
      }
      // bB + Bb : degree n -> n
      auto lhs = cx.d(n + 1) * B(n);
      auto rhs = B(n - 1) * cx.d(n);
      if (!(lhs + rhs).is_zero_matrix())
        throw structure_violation("bB + Bb != 0 at degree " + std::to_string(n));
    }
  }
};

// --------------------------------------------------------- coHochschild

// coCH(C) with Omega truncated at L, materialized over the window
template <class K>
MixedComplex<K> cohochschild_complex(const DGCoalgebra<K>& C, const CobarAlgebra<K>& W,
                                     Window w) {
  check_conilpotent(C);
  const DGAlgebra<K>& A = W.alg;
  TwistingCochain<K> tau = universal_tau(W);

  MixedComplex<K> out;
  out.cx.truncation = W.truncation();
  GradedModule cfull = full_module_basis<K>(C.red);
  GradedMap<K> cd = full_module_diff<K>(C.red, C.d);
  GradedModule afull = full_module_basis<K>(A.aug); // includes the empty word "1"
  GradedMap<K> ad = full_module_diff<K>(A.aug, A.d);

  struct Gen { BasisKey c, a; };
  std::vector<Gen> gens;
  for (int nc : cfull.degrees())
    for (int na : afull.degrees()) {
      int n = nc + na;
      if (n < w.lo - 1 || n > w.hi + 2) continue; // +2: room for B then b checks
      for (std::size_t i = 0; i < cfull.dim(nc); ++i)
        for (std::size_t j = 0; j < afull.dim(na); ++j) gens.push_back({{nc, i}, {na, j}});
    }
  std::sort(gens.begin(), gens.end(), [](const Gen& x, const Gen& y) {
    return std::tie(x.c, x.a) < std::tie(y.c, y.a);
  });
  auto lab = [&](const Gen& g) { return cfull.label(g.c) + "⊗" + afull.label(g.a); };
  auto deg = [](const Gen& g) { return g.c.degree + g.a.degree; };
  for (auto& g : gens) out.cx.basis.add(deg(g), lab(g));
  auto has = [&](const Gen& g) { return out.cx.basis.has(deg(g), lab(g)); };
  auto key = [&](const Gen& g) { return out.cx.basis.key(deg(g), lab(g)); };

  // word utilities in full-A coordinates
  auto word_of = [&](BasisKey a) -> Word {
    if (is_unit(a)) return {};
    return W.index->word(full_to_red(a));
  };
  auto key_of_word = [&](const Word& wd) -> std::optional<BasisKey> {
    if (wd.size() > static_cast<std::size_t>(W.length_cap)) return std::nullopt;
    if (wd.empty()) return unit_key();
    int d = 0;
    for (auto& l : wd) d += l.degree - 1;
    return red_to_full(W.words->key(d, detail::join_word(*W.letters, wd, '(', ')')));
  };

  // b
  std::map<int, SparseMatrix<K>> mats;
  for (int n : out.cx.basis.degrees())
    mats.emplace(n, SparseMatrix<K>(out.cx.basis.dim(n - 1), out.cx.basis.dim(n)));
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
    // slot differential
    for (auto& [k2, v] : cd.apply(Elem<K>(g.c, scalar_traits<K>::one()))) put({k2, g.a}, v);
    // word differential
    K sc = detail::parity<K>(g.c.degree);
    for (auto& [k2, v] : ad.apply(Elem<K>(g.a, scalar_traits<K>::one()))) put({g.c, k2}, sc * v);
    if (is_unit(g.c)) continue; // twists vanish on the counit slot
    BasisKey cred = full_to_red(g.c);
    Word wd = word_of(g.a);
    // standard twist: sum over Delta c with tau on the second leg
    // term 1 (x) c: prepend (c) to the word
    {
      Word nw;
      nw.push_back(cred);
      nw.insert(nw.end(), wd.begin(), wd.end());
      if (auto nk = key_of_word(nw)) put({unit_key(), *nk}, scalar_traits<K>::one());
    }
    for (auto& [c1, c2, v] : C.delta_bar(cred)) {
      Word nw;
      nw.push_back(c2);
      nw.insert(nw.end(), wd.begin(), wd.end());
      if (auto nk = key_of_word(nw))
        put({red_to_full(c1), *nk}, detail::parity<K>(c1.degree) * v);
    }
    // wrap twist: -(-1)^{(|c1|-1)(|c2|+|w|)} c2 (x) w.(c1)
    {
      Word nw = wd;
      nw.push_back(cred);
      if (auto nk = key_of_word(nw)) {
        K s = detail::parity<K>((long)(cred.degree - 1) * g.a.degree);
        put({unit_key(), *nk}, -s);
      }
    }
    for (auto& [c1, c2, v] : C.delta_bar(cred)) {
      Word nw = wd;
      nw.push_back(c1);
      if (auto nk = key_of_word(nw)) {
        K s = detail::parity<K>((long)(c1.degree - 1) * (c2.degree + g.a.degree));
        put({red_to_full(c2), *nk}, -(s * v));
      }
    }
  }
  for (auto& [n, m] : mats) out.cx.set_d(n, std::move(m));

  // B: extraction of letters into the counit slot, zero off the slot
  std::map<int, SparseMatrix<K>> bmats;
  for (int n : out.cx.basis.degrees())
    bmats.emplace(n, SparseMatrix<K>(out.cx.basis.dim(n + 1), out.cx.basis.dim(n)));
  for (auto& g : gens) {
    if (!is_unit(g.c) || is_unit(g.a)) continue;
    BasisKey src = key(g);
    auto it = bmats.find(src.degree);
    if (it == bmats.end()) continue;
    Word wd = word_of(g.a);
    long total = 0;
    for (auto& l : wd) total += l.degree - 1;
    long prefix = 0;
    for (std::size_t i = 0; i < wd.size(); ++i) {
      // rotate so that letter i comes first, then extract it to the slot
      K s = detail::parity<K>(prefix * (total - prefix));
      Word rot;
      rot.insert(rot.end(), wd.begin() + i + 1, wd.end());
      rot.insert(rot.end(), wd.begin(), wd.begin() + i);
      if (auto nk = key_of_word(rot)) {
        Gen t{red_to_full(wd[i]), *nk};
        if (has(t)) {
          BasisKey tk = key(t);
          if (tk.degree == src.degree + 1) it->second.add_to(tk.index, src.index, s);
        }
      }
      prefix += wd[i].degree - 1;
    }
  }
  for (auto& [n, m] : bmats)
    if (!m.is_zero_matrix()) out.connes_B[n] = std::move(m);
  return out;
}

// ---------------------------------------------------------- Hochschild

// CH(A) = A (x) B(A), materialized over the window.  A-bar must be
// non-negatively graded so that each degree slice is finite.
template <class K>
MixedComplex<K> hochschild_complex(const DGAlgebra<K>& A, Window w, Truncation trunc = {}) {
  if (!A.aug.empty() && A.aug.min_degree() < 0)
    throw window_not_trusted("hochschild_complex: negatively graded algebra");

  GradedModule afull = full_module_basis<K>(A.aug);
  GradedMap<K> ad = full_module_diff<K>(A.aug, A.d);
  std::vector<BasisKey> letters;
  for (int n : A.aug.degrees())
    for (std::size_t i = 0; i < A.aug.dim(n); ++i) letters.push_back({n, i});

  MixedComplex<K> out;
  out.cx.truncation = trunc;
  struct Gen { BasisKey a0; Word wd; };
  std::vector<Gen> gens;
  int cap = w.hi + 2;
  std::function<void(Word&, int)> grow = [&](Word& wd, int wdeg) {
    for (int n0 : afull.degrees()) {
      if (n0 + wdeg >= w.lo - 1 && n0 + wdeg <= cap)
        for (std::size_t i = 0; i < afull.dim(n0); ++i) gens.push_back({{n0, i}, wd});
    }
    for (auto& l : letters) {
      int nd = wdeg + l.degree + 1;
      if (nd > cap) continue;
      wd.push_back(l);
      grow(wd, nd);
      wd.pop_back();
    }
  };
  Word empty;
  grow(empty, 0);

  auto lab = [&](const Gen& g) {
    return afull.label(g.a0) + "·" + detail::join_word(A.aug, g.wd, '[', ']');
  };
  auto deg = [&](const Gen& g) {
    int d = g.a0.degree;
    for (auto& l : g.wd) d += l.degree + 1;
    return d;
  };
  std::stable_sort(gens.begin(), gens.end(),
                   [&](const Gen& x, const Gen& y) { return deg(x) < deg(y); });
  for (auto& g : gens) out.cx.basis.add(deg(g), lab(g));
  auto key = [&](const Gen& g) { return out.cx.basis.key(deg(g), lab(g)); };
  auto has = [&](const Gen& g) { return out.cx.basis.has(deg(g), lab(g)); };

  auto mul_full = [&A](BasisKey u, BasisKey u2) {
    AlgElem<K> r;
    if (is_unit(u) && is_unit(u2)) { r.unit = scalar_traits<K>::one(); return r; }
    if (is_unit(u)) { r.red.add(u2, scalar_traits<K>::one()); return r; }
    if (is_unit(u2)) { r.red.add(u, scalar_traits<K>::one()); return r; }
    for (auto& [k, c] : A.mul(full_to_red(u), full_to_red(u2)).terms())
      r.red.add(red_to_full(k), c);
    return r;
  };

  std::map<int, SparseMatrix<K>> mats;
  for (int n : out.cx.basis.degrees())
    mats.emplace(n, SparseMatrix<K>(out.cx.basis.dim(n - 1), out.cx.basis.dim(n)));
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
    // d_A a0
    for (auto& [k2, v] : ad.apply(Elem<K>(g.a0, scalar_traits<K>::one()))) put({k2, g.wd}, v);
    K s0 = detail::parity<K>(g.a0.degree);
    // bar differential on the word
    long eps = 0;
    for (std::size_t i = 0; i < g.wd.size(); ++i) {
      K sgn = detail::parity<K>(eps);
      for (auto& [k2, v] : A.d.apply(Elem<K>(g.wd[i], scalar_traits<K>::one()))) {
        Word nw = g.wd;
        nw[i] = k2;
        put({g.a0, nw}, -(s0 * sgn * v));
      }
      if (i + 1 < g.wd.size()) {
        K s2 = detail::parity<K>(g.wd[i].degree + 1);
        for (auto& [k2, v] : A.mul(g.wd[i], g.wd[i + 1])) {
          Word nw;
          nw.insert(nw.end(), g.wd.begin(), g.wd.begin() + i);
          nw.push_back(k2);
          nw.insert(nw.end(), g.wd.begin() + i + 2, g.wd.end());
          put({g.a0, nw}, s0 * sgn * s2 * v);
        }
      }
      eps += g.wd[i].degree + 1;
    }
    if (g.wd.empty()) continue;
    // standard twist: +(-1)^{|a0|} (a0 a1) (x) [a2|...]
    {
      AlgElem<K> prod = mul_full(g.a0, red_to_full(g.wd[0]));
      Word rest(g.wd.begin() + 1, g.wd.end());
      if (!is_zero(prod.unit)) put({unit_key(), rest}, s0 * prod.unit);
      for (auto& [k2, v] : prod.red.terms()) put({k2, rest}, s0 * v);
    }
    // wrap twist: -(-1)^{<an>(|a0| + deg rest)} (an a0) (x) [a1|...|a_{n-1}]
    {
      BasisKey an = g.wd.back();
      Word rest(g.wd.begin(), g.wd.end() - 1);
      long rest_deg = g.a0.degree;
      for (auto& l : rest) rest_deg += l.degree + 1;
      K s = detail::parity<K>((long)(an.degree + 1) * rest_deg);
      AlgElem<K> prod = mul_full(red_to_full(an), g.a0);
      if (!is_zero(prod.unit)) put({unit_key(), rest}, -(s * prod.unit));
      for (auto& [k2, v] : prod.red.terms()) put({k2, rest}, -(s * v));
    }
  }
  for (auto& [n, m] : mats) out.cx.set_d(n, std::move(m));

  // B: insert a0 as a letter over all cyclic rotations; zero when a0 = 1
  std::map<int, SparseMatrix<K>> bmats;
  for (int n : out.cx.basis.degrees())
    bmats.emplace(n, SparseMatrix<K>(out.cx.basis.dim(n + 1), out.cx.basis.dim(n)));
  for (auto& g : gens) {
    if (is_unit(g.a0)) continue;
    BasisKey src = key(g);
    auto it = bmats.find(src.degree);
    if (it == bmats.end()) continue;
    Word withA;
    withA.push_back(full_to_red(g.a0));
    withA.insert(withA.end(), g.wd.begin(), g.wd.end());
    long total = 0;
    for (auto& l : withA) total += l.degree + 1;
    long prefix = 0;
    for (std::size_t i = 0; i < withA.size(); ++i) {
      // rotation starting at letter i (letter 0 is a0 itself)
      K s = detail::parity<K>(prefix * (total - prefix));
      Word rot;
      rot.insert(rot.end(), withA.begin() + i, withA.end());
      rot.insert(rot.end(), withA.begin(), withA.begin() + i);
      Gen t{unit_key(), rot};
      if (has(t)) {
        BasisKey tk = key(t);
        if (tk.degree == src.degree + 1) it->second.add_to(tk.index, src.index, s);
      }
      prefix += withA[i].degree + 1;
    }
  }
  for (auto& [n, m] : bmats)
    if (!m.is_zero_matrix()) out.connes_B[n] = std::move(m);
  return out;
}

// Streaming Betti numbers of CH(A) over a window, without materializing
// basis labels (used when the word count is large).
template <class K>
std::map<int, std::size_t> hochschild_betti(const DGAlgebra<K>& A, Window w) {
  if (!A.aug.empty() && A.aug.min_degree() < 0)
    throw window_not_trusted("hochschild_betti: negatively graded algebra");
  GradedModule afull = full_module_basis<K>(A.aug);
  GradedMap<K> ad = full_module_diff<K>(A.aug, A.d);
  std::vector<BasisKey> letters;
  for (int n : A.aug.degrees())
    for (std::size_t i = 0; i < A.aug.dim(n); ++i) letters.push_back({n, i});

  // encode a generator as a flat integer vector for hashing
  using Code = std::vector<std::uint32_t>;
  struct CodeHash {
    std::size_t operator()(const Code& c) const {
      std::size_t h = 1469598103934665603ull;
      for (auto x : c) { h ^= x; h *= 1099511628211ull; }
      return h;
    }
  };
  auto encode = [&](BasisKey a0, const Word& wd) {
    Code c;
    c.reserve(2 + 2 * wd.size());
    c.push_back(static_cast<std::uint32_t>(a0.degree));
    c.push_back(static_cast<std::uint32_t>(a0.index));
    for (auto& l : wd) {
      c.push_back(static_cast<std::uint32_t>(l.degree));
      c.push_back(static_cast<std::uint32_t>(l.index));
    }
    return c;
  };

  // index maps per degree for lo-1 .. hi (rows of the streamed matrices)
  std::map<int, std::unordered_map<Code, std::size_t, CodeHash>> idx;
  std::map<int, std::size_t> dims;
  auto visit_degree = [&](int target, auto&& f) {
    // enumerate all (a0, word) of the given total degree
    Word wd;
    std::function<void(int)> rec = [&](int wdeg) {
      for (int n0 : afull.degrees()) {
        if (n0 + wdeg == target)
          for (std::size_t i = 0; i < afull.dim(n0); ++i) f(BasisKey{n0, i}, wd);
      }
      for (auto& l : letters) {
        int nd = wdeg + l.degree + 1;
        if (nd > target) continue;
        wd.push_back(l);
        rec(nd);
        wd.pop_back();
      }
    };
    rec(0);
  };
  for (int n = w.lo - 1; n <= w.hi; ++n) {
    auto& m = idx[n];
    std::size_t count = 0;
    visit_degree(n, [&](BasisKey a0, const Word& wd) { m.emplace(encode(a0, wd), count++); });
    dims[n] = count;
  }
  std::size_t hi1 = 0;
  visit_degree(w.hi + 1, [&](BasisKey, const Word&) { ++hi1; });
  dims[w.hi + 1] = hi1;

  auto mul_full = [&A](BasisKey u, BasisKey u2) {
    AlgElem<K> r;
    if (is_unit(u) && is_unit(u2)) { r.unit = scalar_traits<K>::one(); return r; }
    if (is_unit(u)) { r.red.add(u2, scalar_traits<K>::one()); return r; }
    if (is_unit(u2)) { r.red.add(u, scalar_traits<K>::one()); return r; }
    for (auto& [k, c] : A.mul(full_to_red(u), full_to_red(u2)).terms())
      r.red.add(red_to_full(k), c);
    return r;
  };

  // b applied to one generator, expressed in row indices of degree tgt-1
  auto apply_b = [&](BasisKey a0, const Word& g,
                     const std::unordered_map<Code, std::size_t, CodeHash>& rows) {
    std::vector<std::pair<std::size_t, K>> out;
    auto put = [&](BasisKey b0, const Word& nw, const K& v) {
      if (is_zero(v)) return;
      auto itr = rows.find(encode(b0, nw));
      if (itr == rows.end()) return;
      out.push_back({itr->second, v});
    };
    for (auto& [k2, v] : ad.apply(Elem<K>(a0, scalar_traits<K>::one()))) put(k2, g, v);
    K s0 = detail::parity<K>(a0.degree);
    long eps = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      K sgn = detail::parity<K>(eps);
      for (auto& [k2, v] : A.d.apply(Elem<K>(g[i], scalar_traits<K>::one()))) {
        Word nw = g;
        nw[i] = k2;
        put(a0, nw, -(s0 * sgn * v));
      }
      if (i + 1 < g.size()) {
        K s2 = detail::parity<K>(g[i].degree + 1);
        for (auto& [k2, v] : A.mul(g[i], g[i + 1])) {
          Word nw;
          nw.insert(nw.end(), g.begin(), g.begin() + i);
          nw.push_back(k2);
          nw.insert(nw.end(), g.begin() + i + 2, g.end());
          put(a0, nw, s0 * sgn * s2 * v);
        }
      }
      eps += g[i].degree + 1;
    }
    if (!g.empty()) {
      {
        AlgElem<K> prod = mul_full(a0, red_to_full(g[0]));
        Word rest(g.begin() + 1, g.end());
        if (!is_zero(prod.unit)) put(unit_key(), rest, s0 * prod.unit);
        for (auto& [k2, v] : prod.red.terms()) put(k2, rest, s0 * v);
      }
      {
        BasisKey an = g.back();
        Word rest(g.begin(), g.end() - 1);
        long rest_deg = a0.degree;
        for (auto& l : rest) rest_deg += l.degree + 1;
        K s = detail::parity<K>((long)(an.degree + 1) * rest_deg);
        AlgElem<K> prod = mul_full(red_to_full(an), a0);
        if (!is_zero(prod.unit)) put(unit_key(), rest, -(s * prod.unit));
        for (auto& [k2, v] : prod.red.terms()) put(k2, rest, -(s * v));
      }
    }
    // merge duplicate rows
    std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.first < b.first; });
    std::vector<std::pair<std::size_t, K>> merged;
    for (auto& [r, v] : out) {
      if (!merged.empty() && merged.back().first == r) {
        merged.back().second += v;
        if (is_zero(merged.back().second)) merged.pop_back();
      } else {
        merged.push_back({r, v});
      }
    }
    return merged;
  };

  // rank of b from degree n to n-1 for n in [lo, hi+1]
  std::map<int, std::size_t> rank_b;
  for (int n = w.lo; n <= w.hi + 1; ++n) {
    auto rows_it = idx.find(n - 1);
    if (rows_it == idx.end() || dims[n] == 0 || rows_it->second.empty()) {
      rank_b[n] = 0;
      continue;
    }
    Echelon<K> ech(rows_it->second.size());
    visit_degree(n, [&](BasisKey a0, const Word& wd) {
      ech.add_column(apply_b(a0, wd, rows_it->second));
    });
    rank_b[n] = ech.rank();
  }
  std::map<int, std::size_t> betti;
  for (int n = w.lo; n <= w.hi; ++n) betti[n] = dims[n] - rank_b[n] - rank_b[n + 1];
  return betti;
}

// ------------------------------------------------ cyclic truncations

template <class K>
struct CyclicComplexes {
  ChainComplex<K> negative_cyclic; // base[[u]]/u^N with b + uB
  ChainComplex<K> cyclic;          // base[u^{-1}], powers u^{-j}, j < N
  int u_truncation = 0;
};

template <class K>
CyclicComplexes<K> cyclic_complexes(const MixedComplex<K>& M, int N, Window w) {
  CyclicComplexes<K> out;
  out.u_truncation = N;
  // |u| = -2; negative cyclic uses powers u^j, cyclic uses u^{-j}, j < N
  auto build = [&](bool negative) {
    ChainComplex<K> c;
    c.truncation = M.cx.truncation;
    auto base_degree = [&](int n, int j) { return negative ? n + 2 * j : n - 2 * j; };
    for (int n = w.lo - 1; n <= w.hi + 1; ++n)
      for (int j = 0; j < N; ++j) {
        int base = base_degree(n, j);
        for (std::size_t i = 0; i < M.cx.basis.dim(base); ++i)
          c.basis.add(n, M.cx.basis.label(BasisKey{base, i}) + "·u^" +
                             (negative || j == 0 ? "" : "-") + std::to_string(j));
      }
    auto row_offset = [&](int n, int j) {
      std::size_t off = 0;
      for (int j2 = 0; j2 < j; ++j2) off += M.cx.basis.dim(base_degree(n, j2));
      return off;
    };
    for (int n = w.lo; n <= w.hi + 1; ++n) {
      SparseMatrix<K> m(c.basis.dim(n - 1), c.basis.dim(n));
      std::size_t col = 0;
      for (int j = 0; j < N; ++j) {
        int base = base_degree(n, j);
        for (std::size_t i = 0; i < M.cx.basis.dim(base); ++i, ++col) {
          // b x at the same power
          std::size_t row0 = row_offset(n - 1, j);
          for (auto& [r, v] : M.cx.d(base).column(i)) m.add_to(row0 + r, col, v);
          // uB x at power j+1 (negative cyclic) / j-1 (cyclic)
          int jb = negative ? j + 1 : j - 1;
          if (jb >= 0 && jb < N) {
            std::size_t rowb = row_offset(n - 1, jb);
            for (auto& [r, v] : M.B(base).column(i)) m.add_to(rowb + r, col, v);
          }
        }
      }
      c.set_d(n, std::move(m));
    }
    return c;
  };
  out.negative_cyclic = build(true);
  out.cyclic = build(false);
  return out;
}

// ------------------------------------------------ negative cyclic lift

template <class K>
struct NegativeCyclicLift {
  bool ok = false;
  std::vector<Elem<K>> stages; // x_0 = z, x_1, ..., x_{N-1}
  int obstruction_stage = -1;  // stage at which the solve failed
  int obstruction_degree = 0;
};

// Solve b x_{i+1} = -B x_i successively; x_0 = z must be a b-cycle.
template <class K>
NegativeCyclicLift<K> lift_to_negative_cyclic(const MixedComplex<K>& M, const Elem<K>& z,
                                              int N) {
  if (!M.cx.apply_d(z).is_zero())
    throw not_a_cycle("lift_to_negative_cyclic: input is not a b-cycle");
  NegativeCyclicLift<K> out;
  out.stages.push_back(z);
  for (int i = 0; i + 1 < N; ++i) {
    Elem<K> rhs = M.apply_B(out.stages.back()) * (-scalar_traits<K>::one());
    if (rhs.is_zero()) {
      out.stages.push_back(Elem<K>{});
      continue;
    }
    int deg = rhs.terms().begin()->first.degree; // homogeneous by construction
    const auto& b = M.cx.d(deg + 1);
    std::vector<K> vec(b.n_rows(), scalar_traits<K>::zero());
    for (auto& [k, v] : rhs.terms()) vec[k.index] = v;
    auto x = solve(b, vec);
    if (!x) {
      out.obstruction_stage = i + 1;
      out.obstruction_degree = deg + 1;
      return out;
    }
    Elem<K> xe;
    for (std::size_t j = 0; j < x->size(); ++j)
      xe.add(BasisKey{deg + 1, j}, (*x)[j]);
    out.stages.push_back(std::move(xe));
  }
  out.ok = true;
  return out;
}

// ----------------------------------------------------- Betti comparison

struct BettiComparison {
  struct Row {
    std::size_t co_rank = 0, hh_rank = 0;
    bool equal = false;
    bool trusted = false;
  };
  std::map<int, Row> rows;
  bool all_equal = true;
};

// per-degree homology ranks of coCH(C) vs CH(Omega^{<=L} C)
template <class K>
BettiComparison betti_compare(const DGCoalgebra<K>& C, int L, Window w,
                              std::size_t stream_threshold = 400) {
  auto W = cobar(C, L);
  auto coch = cohochschild_complex(C, W, w);
  auto co_betti = homology(coch.cx, w);
  std::map<int, std::size_t> hh;
  if (W.alg.aug.total_dim() > stream_threshold) {
    hh = hochschild_betti(W.alg, w);
  } else {
    auto hhm = hochschild_complex(W.alg, w, W.truncation());
    for (auto& [n, e] : homology(hhm.cx, w)) hh[n] = e.rank;
  }
  BettiComparison out;
  for (int n = w.lo; n <= w.hi; ++n) {
    BettiComparison::Row r;
    r.co_rank = co_betti.at(n).rank;
    r.hh_rank = hh.at(n);
    r.equal = r.co_rank == r.hh_rank;
    r.trusted = coch.cx.truncation.trusted(n);
    if (!r.equal) out.all_equal = false;
    out.rows[n] = r;
  }
  return out;
}

} // namespace koszul
