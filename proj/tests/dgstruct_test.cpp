#include <catch2/catch_amalgamated.hpp>

#include "koszul/barcobar.hpp"

using namespace koszul;
using Q = Rational;

namespace {

Q one() { return Q(1); }

// reduced model of S^2: one class in degree 2, no coproduct, no differential
DGCoalgebra<Q> sphere_model() {
  DGCoalgebra<Q> C;
  C.name = "S2";
  C.red.add(2, "σ");
  C.red_coproduct = [](BasisKey) { return Coproduct<Q>{}; };
  C.cocommutative = true;
  return C;
}

// exterior coalgebra on one degree-1 class (Chevalley-Eilenberg chains of
// the 1-dimensional abelian Lie algebra)
DGCoalgebra<Q> exterior_point() {
  DGCoalgebra<Q> C;
  C.name = "Λ(y)";
  C.red.add(1, "y");
  C.red_coproduct = [](BasisKey) { return Coproduct<Q>{}; };
  C.cocommutative = true;
  return C;
}

// two-cell disc: a, b in degree 1, t in degree 2 with
// Delta-bar t = a (x) b and d t = b - a
DGCoalgebra<Q> disc_model() {
  DGCoalgebra<Q> C;
  C.name = "disc";
  C.red.add(1, "a");
  C.red.add(1, "b");
  C.red.add(2, "t");
  SparseMatrix<Q> d2(2, 1);
  d2.add_to(1, 0, Q(1));
  d2.add_to(0, 0, Q(-1));
  C.d.shift = -1;
  C.d.components[2] = d2;
  C.red_coproduct = [](BasisKey k) {
    Coproduct<Q> out;
    if (k.degree == 2) out.push_back({BasisKey{1, 0}, BasisKey{1, 1}, Q(1)});
    return out;
  };
  return C;
}

// contractible pair: x deg 1, y deg 2, d y = x, no coproduct
DGCoalgebra<Q> contractible_pair() {
  DGCoalgebra<Q> C;
  C.name = "pair";
  C.red.add(1, "x");
  C.red.add(2, "y");
  SparseMatrix<Q> d2(1, 1);
  d2.add_to(0, 0, Q(1));
  C.d.shift = -1;
  C.d.components[2] = d2;
  C.red_coproduct = [](BasisKey) { return Coproduct<Q>{}; };
  C.cocommutative = true;
  return C;
}

// k[x]/x^2 with |x| = 0 as an augmented algebra
DGAlgebra<Q> dual_numbers() {
  DGAlgebra<Q> A;
  A.name = "k[x]/x²";
  A.aug.add(0, "x");
  A.mul = [](BasisKey, BasisKey) { return Elem<Q>{}; };
  return A;
}

// exterior algebra on one degree-1 generator
DGAlgebra<Q> exterior_line() {
  DGAlgebra<Q> A;
  A.name = "Λ(e)";
  A.aug.add(1, "e");
  A.mul = [](BasisKey, BasisKey) { return Elem<Q>{}; };
  return A;
}

std::vector<std::size_t> ranks(const HomologyTable& t, int lo, int hi) {
  std::vector<std::size_t> out;
  for (int n = lo; n <= hi; ++n) out.push_back(t.count(n) ? t.at(n).rank : 0);
  return out;
}

} // namespace

TEST_CASE("coalgebra validation accepts the models") {
  for (auto C : {sphere_model(), exterior_point(), disc_model(), contractible_pair()})
    CHECK_NOTHROW(check_coalgebra(C));
}

TEST_CASE("coassociativity failure is detected") {
  DGCoalgebra<Q> C;
  C.name = "bad";
  C.red.add(1, "a");
  C.red.add(1, "b");
  C.red.add(2, "t");
  // Delta-bar t = a x a + a x b with Delta-bar a = a x a:
  // (D x 1)D t has (a x a) x b, (1 x D)D t does not
  C.red_coproduct = [](BasisKey k) {
    Coproduct<Q> out;
    if (k.degree == 2) {
      out.push_back({BasisKey{1, 0}, BasisKey{1, 0}, Q(1)});
      out.push_back({BasisKey{1, 0}, BasisKey{1, 1}, Q(1)});
    }
    if (k.degree == 1 && k.index == 0)
      out.push_back({BasisKey{1, 0}, BasisKey{1, 0}, Q(1)});
    return out;
  };
  CHECK_THROWS_AS(check_coassociative(C), structure_violation);
  // and conilpotency fails too (a splits forever)
  CHECK_THROWS_AS(check_conilpotent(C), not_conilpotent);
}

TEST_CASE("cobar of the ground field is the ground field") {
  DGCoalgebra<Q> C;
  C.name = "k";
  C.red_coproduct = [](BasisKey) { return Coproduct<Q>{}; };
  auto W = cobar(C, 3);
  CHECK(W.alg.aug.total_dim() == 0);
}

TEST_CASE("cobar of the S^2 model: free algebra on one degree-1 generator") {
  auto C = sphere_model();
  auto W = cobar(C, 5);
  CHECK(W.alg.aug.total_dim() == 5);
  CHECK(W.delta_min == 1);
  check_algebra(W.alg);
  auto cx = complex_of_algebra(W.alg, W.truncation());
  cx.validate();
  auto H = homology(cx, {0, 5});
  CHECK(ranks(H, 0, 5) == std::vector<std::size_t>{1, 1, 1, 1, 1, 1});
  // trusted degrees are exactly [0, L-1]
  for (int m = 0; m <= 4; ++m) CHECK(H.at(m).trusted);
  CHECK(!H.at(5).trusted);
  // universal twisting cochain satisfies Maurer-Cartan
  CHECK(check_mc(universal_tau(W)));
}

TEST_CASE("cobar with differential: contractible pair gives acyclic algebra") {
  auto C = contractible_pair();
  auto W = cobar(C, 3);
  check_algebra(W.alg);
  CHECK(check_mc(universal_tau(W)));
  auto cx = complex_of_algebra(W.alg, W.truncation());
  cx.validate(); // d^2 = 0 with the documented signs
  auto H = homology(cx, {0, 2});
  CHECK(ranks(H, 0, 2) == std::vector<std::size_t>{1, 0, 0});
}

TEST_CASE("cobar of the disc model: circle-like H_0 ball") {
  auto C = disc_model();
  auto W = cobar(C, 4);
  check_algebra(W.alg);
  CHECK(check_mc(universal_tau(W)));
  auto cx = complex_of_algebra(W.alg, W.truncation());
  cx.validate();
  // d(t) = (a) - (b) + (a|b), so b rewrites to a + a^2 + ... ; the degree-0
  // homology of the length-4 truncation is spanned by 1, a, a^2, a^3, a^4
  auto H = homology(cx, {0, 2});
  CHECK(H.at(0).rank == 5);
}

TEST_CASE("PBW dimension in degree zero for the abelian point") {
  auto C = exterior_point();
  auto W = cobar(C, 4);
  auto cx = complex_of_algebra(W.alg, W.truncation());
  auto H = homology(cx, {0, 0});
  CHECK(H.at(0).rank == 5); // monomials of length <= 4 in one variable
}

TEST_CASE("bar of k[x]/x^2: one class per degree (Tor oracle)") {
  auto A = dual_numbers();
  auto B = bar(A, 5);
  check_coalgebra(B.coa);
  CHECK(B.coa.red.total_dim() == 5);
  CHECK(check_mc(universal_tau(B)));
  // homology of k.1 + B-bar: differential vanishes since x.x = 0
  ChainComplex<Q> cx;
  cx.basis = full_module_basis<Q>(B.coa.red);
  for (auto& [n, m] : full_module_diff<Q>(B.coa.red, B.coa.d).components) cx.set_d(n, m);
  auto H = homology(cx, {0, 5});
  CHECK(ranks(H, 0, 5) == std::vector<std::size_t>{1, 1, 1, 1, 1, 1});
}

TEST_CASE("bar of the exterior line: divided powers") {
  auto A = exterior_line();
  auto B = bar(A, 3);
  check_coalgebra(B.coa);
  CHECK(check_mc(universal_tau(B)));
  // words of length l sit in degree 2l and survive (e.e = 0)
  CHECK(B.coa.red.dim(2) == 1);
  CHECK(B.coa.red.dim(4) == 1);
  CHECK(B.coa.red.dim(6) == 1);
}

TEST_CASE("bar with internal differential: d^2 = 0 on B(k[x], dx)") {
  // A-bar: x deg 1, y deg 0 with d x = y, x^2 = 0, x y = y x, y^2 = y^2...
  // keep it square-zero: all products vanish
  DGAlgebra<Q> A;
  A.name = "sq0";
  A.aug.add(1, "x");
  A.aug.add(0, "y");
  SparseMatrix<Q> d1(1, 1);
  d1.add_to(0, 0, Q(1));
  A.d.shift = -1;
  A.d.components[1] = d1;
  A.mul = [](BasisKey, BasisKey) { return Elem<Q>{}; };
  check_algebra(A);
  auto B = bar(A, 3);
  check_coalgebra(B.coa); // includes d^2 = 0
  CHECK(check_mc(universal_tau(B)));
}

TEST_CASE("wrong-sign projection fails Maurer-Cartan") {
  auto C = contractible_pair();
  auto W = cobar(C, 3);
  auto tau = universal_tau(W);
  auto good = tau.tau;
  tau.tau = [good](BasisKey c) {
    AlgElem<Q> r = good(c);
    if (c.degree == 2) return r * Q(-1); // flip the sign on one generator
    return r;
  };
  CHECK(!check_mc(tau));
}

TEST_CASE("twisted tensor with tau = 0 is the plain tensor product") {
  auto C = disc_model();
  auto W = cobar(C, 2);
  TwistingCochain<Q> zero;
  zero.C = &C;
  zero.A = &W.alg;
  zero.tau = [](BasisKey) { return AlgElem<Q>{}; };
  // zero satisfies MC only if dC tau + tau dC + quadratic = h = 0: all
  // terms vanish identically for the zero cochain over an uncurved C
  CHECK(check_mc(zero));
  auto E = comodule_of_coalgebra(C);
  auto M = module_of_algebra(W.alg);
  auto cx = twisted_tensor_left(E, M, zero, {0, 3});
  cx.validate();
  // Kunneth: dims multiply; no twist terms present
  std::size_t dim1 = 0;
  for (int ne : E.basis.degrees())
    dim1 += E.basis.dim(ne) * M.basis.dim(1 - ne);
  CHECK(cx.basis.dim(1) == dim1);
}

TEST_CASE("counit resolution: A (x) C (x) A -> A is a quasi-isomorphism") {
  // the central gate on the twist sign table
  for (auto C : {sphere_model(), exterior_point(), disc_model(), contractible_pair()}) {
    int L = 3;
    auto W = cobar(C, L);
    auto M = module_of_algebra(W.alg);
    auto f = counit_resolution(W, M, {0, 2});
    f.source.validate();
    REQUIRE(f.is_chain_map());
    auto v = is_quasi_iso(f, {0, 1});
    CHECK(v.holds);
  }
}

TEST_CASE("trivial coalgebra counit resolution is the identity-ish map") {
  DGCoalgebra<Q> C;
  C.name = "k";
  C.red_coproduct = [](BasisKey) { return Coproduct<Q>{}; };
  auto W = cobar(C, 2);
  auto M = module_of_algebra(W.alg);
  auto f = counit_resolution(W, M, {0, 1});
  REQUIRE(f.is_chain_map());
  CHECK(is_quasi_iso(f, {0, 0}).holds);
}

TEST_CASE("two-sided twist: coHochschild-type differential squares to zero") {
  for (auto C : {exterior_point(), disc_model(), contractible_pair(), sphere_model()}) {
    auto W = cobar(C, 3);
    auto tau = universal_tau(W);
    auto E = comodule_of_coalgebra(C);
    auto M = module_of_algebra(W.alg);
    auto cx = twisted_tensor_two_sided_general(E, M, tau, {0, 3}, W.truncation());
    cx.validate();
  }
}

TEST_CASE("two-sided twist over the exterior point has zero differential") {
  // C (x)^pi Omega C for C = Λ(y) computes HH(k[t]): both twists cancel
  auto C = exterior_point();
  auto W = cobar(C, 4);
  auto tau = universal_tau(W);
  auto E = comodule_of_coalgebra(C);
  auto M = module_of_algebra(W.alg);
  auto cx = twisted_tensor_two_sided_general(E, M, tau, {0, 2}, W.truncation());
  for (auto& [n, m] : cx.diff) CHECK(m.is_zero_matrix());
}

TEST_CASE("enveloping algebra of k[x]/x^2 is 4-dimensional and commutative") {
  auto A = dual_numbers();
  auto E = enveloping_algebra(A);
  CHECK(E.aug.total_dim() == 3); // 1x1, xx1, xxx minus nothing: unit pair excluded
  check_algebra(E);
  // commutativity on the ideal basis
  for (int n : E.aug.degrees())
    for (std::size_t i = 0; i < E.aug.dim(n); ++i)
      for (std::size_t j = 0; j < E.aug.dim(n); ++j) {
        BasisKey a{n, i}, b{n, j};
        CHECK(E.mul(a, b) == E.mul(b, a));
      }
}

TEST_CASE("enveloping algebra Koszul signs: graded case associativity") {
  auto A = exterior_line();
  auto E = enveloping_algebra(A);
  check_algebra(E); // associativity + Leibniz with the (-1)^{|v||u'|+|v||v'|} sign
}

TEST_CASE("cone and quasi-isomorphism basics") {
  auto C = sphere_model();
  auto W = cobar(C, 3);
  auto cx = complex_of_algebra(W.alg, W.truncation());
  auto id = identity_map(cx);
  CHECK(is_quasi_iso(id, {0, 2}).holds);
  auto acy = cone(id);
  CHECK(homology_vanishes(acy, {0, 3}));
  // zero map k -> k in degree 0
  ChainComplex<Q> pt;
  pt.basis.add(0, "1");
  ChainMap<Q> z;
  z.source = pt;
  z.target = pt;
  z.degree = 0;
  CHECK(!is_quasi_iso(z, {0, 0}).holds);
  auto cz = cone(z);
  auto H = homology(cz, {0, 1});
  CHECK(H.at(0).rank == 1);
  CHECK(H.at(1).rank == 1);
}

TEST_CASE("twisted hom: trivial cases") {
  auto C = sphere_model();
  auto W = cobar(C, 4);
  auto tau = universal_tau(W);
  // M = N = k: the complex is Omega itself
  DGComodule<Q> k;
  k.name = "k";
  k.basis.add(0, "1");
  auto cx = twisted_hom(k, k, W.alg, tau, {0, 3}, W.truncation());
  cx.validate();
  auto H = homology(cx, {0, 3});
  CHECK(ranks(H, 0, 3) == std::vector<std::size_t>{1, 1, 1, 1});
  // C = k (tau = 0 into the trivial algebra): plain Hom complex
  DGCoalgebra<Q> Ck;
  Ck.name = "k";
  Ck.red_coproduct = [](BasisKey) { return Coproduct<Q>{}; };
  auto Wk = cobar(Ck, 2);
  auto tk = universal_tau(Wk);
  auto E = comodule_of_coalgebra(C); // some comodule, coactions trivial over k
  DGComodule<Q> E2 = E;
  E2.coact_left = nullptr;
  E2.coact_right = nullptr;
  auto hom = twisted_hom(E2, E2, Wk.alg, tk, {-3, 3});
  hom.validate();
  // dim Hom(M, N)_0 = sum dim M_n * dim N_n = 1*1 + 1*1
  CHECK(hom.basis.dim(0) == 2);
}

TEST_CASE("twisted hom differential squares to zero on twisted inputs") {
  auto C = disc_model();
  auto W = cobar(C, 3);
  auto tau = universal_tau(W);
  auto E = comodule_of_coalgebra(C);
  auto cx = twisted_hom(E, E, W.alg, tau, {-2, 3}, W.truncation());
  cx.validate();
}
