#include <gtest/gtest.h>

#include "morita/crossed.hpp"
#include "support.hpp"

using namespace morita;
using namespace morita::test;

namespace {

double cnorm(const Algebra& a, const CVector& x) { return operator_norm(a.to_matrix(x)); }

// Norm of h in a right-Hilbert module: ||<h, h>||^{1/2}.
double module_norm(const RightHilbertBimodule& x, const CVector& h) {
  return std::sqrt(cnorm(*x.right, x.inner_product(h, h)));
}

CMatrix swap2() {
  CMatrix u = CMatrix::Zero(2, 2);
  u(0, 1) = u(1, 0) = 1.0;
  return u;
}

}  // namespace

TEST(CrossedProduct, TrivialGroup) {
  auto c = MatrixAlgebra::canonical({1}, "C");
  auto cp = crossed_product(trivial_action(c, make_group("cyclic(1)")));
  EXPECT_EQ(cp->dim(), 1);
  EXPECT_EQ(cp->structure().block_sizes, (std::vector<Index>{1}));
}

// C[Z_n] is commutative with n characters.
TEST(CrossedProduct, GroupAlgebraOfCyclic) {
  auto c = MatrixAlgebra::canonical({1}, "C");
  for (int n : {2, 3, 4, 6}) {
    auto cp = crossed_product(trivial_action(c, make_group("cyclic(" + std::to_string(n) + ")")));
    EXPECT_EQ(cp->dim(), n);
    EXPECT_EQ(cp->structure().block_sizes, std::vector<Index>(static_cast<std::size_t>(n), 1));
    EXPECT_TRUE(validate_crossed_product(*cp).passed());
  }
}

// C[S_3] = C + C + M_2.
TEST(CrossedProduct, GroupAlgebraOfS3) {
  auto c = MatrixAlgebra::canonical({1}, "C");
  auto cp = crossed_product(trivial_action(c, make_group("symmetric(3)")));
  EXPECT_EQ(cp->structure().block_sizes, (std::vector<Index>{1, 1, 2}));
}

// C(G) x| G = M_|G| by translation.
TEST(CrossedProduct, TranslationGivesFullMatrices) {
  for (int n : {2, 3}) {
    auto g = make_group("cyclic(" + std::to_string(n) + ")");
    auto cp = crossed_product(translation_action(g));
    EXPECT_EQ(cp->dim(), n * n);
    EXPECT_EQ(cp->structure().block_sizes, (std::vector<Index>{n}));
    CheckReport r = validate_crossed_product(*cp);
    EXPECT_TRUE(r.passed()) << r.first_failure();
  }
  auto cp = crossed_product(translation_action(make_group("symmetric(3)")));
  EXPECT_EQ(cp->structure().block_sizes, (std::vector<Index>{6}));
}

// An inner action untwists: M_2 x| Z2 = M_2 (x) C[Z2].
TEST(CrossedProduct, InnerActionUntwists) {
  auto z2 = make_group("cyclic(2)");
  auto cp = crossed_product(inner_cyclic_action(z2, 2, swap2()));
  EXPECT_EQ(cp->dim(), 8);
  EXPECT_EQ(cp->structure().block_sizes, (std::vector<Index>{2, 2}));
}

TEST(CrossedProduct, ConvolutionAndInvolutionFormulas) {
  auto g = make_group("symmetric(3)");
  GroupAction a = translation_action(g);
  auto cp = crossed_product(a);
  Rng rng(3);
  const Index n = a.algebra->dim();
  CVector x = rng.complex_vector(cp->dim()), y = rng.complex_vector(cp->dim());
  auto f = cp->function_view(x), h = cp->function_view(y);
  std::vector<CVector> conv(6, CVector::Zero(n)), inv(6);
  for (int s = 0; s < 6; ++s) {
    for (int t = 0; t < 6; ++t)
      conv[s] += a.algebra->multiply(f[t], a[t](h[(*g)(g->inverse[t], s)]));
    inv[s] = a.algebra->star(a[s](f[g->inverse[s]]));
  }
  EXPECT_LT(max_abs(CVector(cp->multiply(x, y) - cp->from_function(conv))), 1e-12);
  EXPECT_LT(max_abs(CVector(cp->star(x) - cp->from_function(inv))), 1e-12);
  EXPECT_LT(max_abs(CVector(cp->to_coords(cp->to_matrix(x)) - x)), 1e-10);
  EXPECT_THROW(crossed_product(make_action(a.algebra, g, std::vector<CMatrix>(6, identity(6) * 2.0))),
               MoritaError);
}

TEST(IntegrateCovariant, Examples) {
  auto c = MatrixAlgebra::canonical({1}, "C");
  auto triv = crossed_product(trivial_action(c, make_group("cyclic(1)")));
  Representation one = integrate_covariant(triv, Representation::ambient(c), {identity(1)});
  EXPECT_EQ(one.images[0], identity(1));

  // Trivial pi with the regular representation of Z2: both characters once.
  auto cz2 = crossed_product(trivial_action(c, make_group("cyclic(2)")));
  Representation pi{c, 2, {identity(2)}};
  Representation rep = integrate_covariant(cz2, pi, {identity(2), swap2()});
  CVector chi = character(rep);
  EXPECT_NEAR(std::abs(chi(0) - 2.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(chi(1)), 0.0, 1e-12);
  CMatrix plus = (rep.images[0] + rep.images[1]) / 2.0, minus = (rep.images[0] - rep.images[1]) / 2.0;
  EXPECT_EQ(numerical_rank(plus), 1);
  EXPECT_EQ(numerical_rank(minus), 1);
  EXPECT_THROW(integrate_covariant(cz2, pi, {identity(2), identity(2) * 2.0}), MoritaError);

  // pi~ x lambda is faithful.
  auto cp = crossed_product(inner_cyclic_action(make_group("cyclic(2)"), 2, swap2()));
  Representation reg = integrate_covariant(cp, cp->regular_pi(), cp->regular_u());
  CMatrix stacked(reg.dim * reg.dim, cp->dim());
  for (Index k = 0; k < cp->dim(); ++k) stacked.col(k) = flatten(reg.images[k]);
  EXPECT_EQ(numerical_rank(stacked), cp->dim());
  for (Index k = 0; k < cp->dim(); ++k) EXPECT_LT(max_abs(CMatrix(reg.images[k] - cp->basis_matrix(k))), 1e-12);
}

// Any covariant pair integrates to a contraction of the crossed-product norm.
TEST(IntegrateCovariant, UniversalNormBound) {
  auto z2 = make_group("cyclic(2)");
  GroupAction a = inner_cyclic_action(z2, 2, swap2());
  auto cp = crossed_product(a);
  Representation rep = integrate_covariant(cp, Representation::ambient(a.algebra), {identity(2), swap2()});
  EXPECT_TRUE(validate_representation(rep).passed());
  Rng rng(5);
  for (int k = 0; k < 10; ++k) {
    CVector f = rng.complex_vector(cp->dim());
    EXPECT_LE(operator_norm(rep(f)), cnorm(*cp, f) + 1e-10);
  }
}

TEST(BimoduleCrossedProduct, IdentityAndTrivialGroup) {
  auto g = make_group("cyclic(3)");
  GroupAction tr = translation_action(g);
  CrossedBimodule idc = bimodule_crossed_product(equivariant_identity(tr));
  EXPECT_EQ(idc.carrier->dim, 9);
  CheckReport v = validate_bimodule(*idc.carrier);
  EXPECT_TRUE(v.passed()) << v.first_failure();
  BimoduleMap same{idc.carrier, identity_bimodule(idc.right), identity(9)};
  EXPECT_TRUE(validate_isomorphism(same).passed());

  auto x = block_module({1, 2}, {1, 1}, {{1, 1}, {1, 0}});
  auto e = make_group("cyclic(1)");
  CrossedBimodule cx = bimodule_crossed_product(trivially_equivariant(x, e));
  ASSERT_EQ(cx.carrier->dim, x->dim);
  for (std::size_t k = 0; k < x->inner.size(); ++k) EXPECT_LT(max_abs(CMatrix(cx.carrier->inner[k] - x->inner[k])), 1e-14);
  for (std::size_t k = 0; k < x->left_action.size(); ++k)
    EXPECT_LT(max_abs(CMatrix(cx.carrier->left_action[k] - x->left_action[k])), 1e-14);
}

TEST(BimoduleCrossedProduct, ValidatesAndPairing) {
  auto z2 = make_group("cyclic(2)");
  GroupAction tr = translation_action(z2);
  auto c = MatrixAlgebra::canonical({1}, "C");
  EquivariantBimodule x = equivariant_from_hom(hom(c, tr.algebra, CMatrix::Ones(2, 1)), trivial_action(c, z2), tr);
  CrossedBimodule cx = bimodule_crossed_product(x);
  EXPECT_EQ(cx.carrier->dim, x.carrier->dim * 2);
  CheckReport v = validate_bimodule(*cx.carrier);
  EXPECT_TRUE(v.passed()) << v.first_failure();
  CheckReport p = check_pairing_identity(cx);
  EXPECT_TRUE(p.passed()) << p.first_failure();
  EXPECT_LT(p.max_defect(), 1e-9);

  auto s3 = make_group("symmetric(3)");
  CMatrix u = random_unitary(3, 4);
  auto y = trivially_equivariant(conjugated(block_module({1, 2}, {1, 1}, {{1, 1}, {1, 0}}), random_unitary(4, 2)), s3);
  CrossedBimodule cy = bimodule_crossed_product(y);
  EXPECT_TRUE(validate_bimodule(*cy.carrier).passed());
  EXPECT_TRUE(check_pairing_identity(cy).passed());
}

TEST(BimoduleCrossedProduct, NormBounds) {
  auto z3 = make_group("cyclic(3)");
  CrossedBimodule cx = bimodule_crossed_product(equivariant_identity(translation_action(z3)));
  const auto& x = *cx.carrier;
  auto base = cx.base.carrier;
  Rng rng(9);
  for (int k = 0; k < 8; ++k) {
    CVector f = rng.complex_vector(cx.left->dim()), h = rng.complex_vector(x.dim);
    double l1 = 0.0;
    for (int s = 0; s < 3; ++s) l1 += module_norm(*base, h.segment(s * base->dim, base->dim));
    EXPECT_LE(module_norm(x, h), l1 + 1e-10);
    EXPECT_LE(module_norm(x, x.act_left(f) * h), cnorm(*cx.left, f) * module_norm(x, h) + 1e-10);
  }
}

TEST(HomCrossedProduct, Examples) {
  auto z2 = make_group("cyclic(2)");
  GroupAction tr = translation_action(z2);
  auto cp = crossed_product(tr);
  StarHom id = hom_crossed_product(StarHom::identity(tr.algebra), cp, cp);
  EXPECT_EQ(id.map, identity(4));

  auto c = MatrixAlgebra::canonical({1}, "C");
  auto cz2 = crossed_product(trivial_action(c, z2));
  StarHom phi = hom(c, tr.algebra, CMatrix::Ones(2, 1));
  StarHom big = hom_crossed_product(phi, cz2, cp);
  EXPECT_TRUE(validate_star_hom(big).passed());
  // delta_s goes to the flip of l^2(Z2) (x) C^2 acting on the group factor.
  CMatrix flip = cp->to_matrix(big(cz2->i_g(1)));
  EXPECT_LT(max_abs(CMatrix(flip - kron(swap2(), identity(2)))), 1e-14);
  EXPECT_LT(max_abs(CMatrix(cp->to_matrix(big(cz2->i_g(0))) - identity(4))), 1e-14);

  CMatrix bad = CMatrix::Zero(2, 1);
  bad(0, 0) = 1.0;
  EXPECT_THROW(hom_crossed_product(hom(c, tr.algebra, bad), cz2, cp), MoritaError);

  // bimodule_from_hom(phi x G) is the crossed product of C_phi.
  EquivariantBimodule cphi = equivariant_from_hom(phi, trivial_action(c, z2), tr);
  CrossedBimodule cx = bimodule_crossed_product(cphi, cz2, cp);
  BimoduleMap m{cx.carrier, bimodule_from_hom(big), identity(4)};
  EXPECT_TRUE(validate_isomorphism(m).passed());
}

// (Ad u o phi) x G = Ad i_C(u) o (phi x G) for an invariant unitary u.
TEST(HomCrossedProduct, InnerTwist) {
  auto z3 = make_group("cyclic(3)");
  auto cc = MatrixAlgebra::canonical({1, 1}, "C+C");
  auto m2 = MatrixAlgebra::canonical({2}, "M2");
  CMatrix phi = CMatrix::Zero(4, 2);
  phi(0, 0) = phi(3, 1) = 1.0;
  CMatrix u = random_unitary(2, 7);
  CMatrix ad(4, 2);
  for (Index k = 0; k < 2; ++k) ad.col(k) = flatten(u * m2->to_matrix(phi.col(k)) * u.adjoint());
  auto src = crossed_product(trivial_action(cc, z3)), dst = crossed_product(trivial_action(m2, z3));
  StarHom lhs = hom_crossed_product(hom(cc, m2, ad), src, dst);
  StarHom rhs = hom_crossed_product(hom(cc, m2, phi), src, dst);
  CMatrix iu = dst->to_matrix(dst->i_a()(flatten(u)));
  for (Index k = 0; k < src->dim(); ++k)
    EXPECT_LT(max_abs(CMatrix(dst->to_matrix(lhs.map.col(k)) - iu * dst->to_matrix(rhs.map.col(k)) * iu.adjoint())),
              1e-12);
}

TEST(Functor, CompositionOfHoms) {
  auto z2 = make_group("cyclic(2)");
  auto c = MatrixAlgebra::canonical({1}, "C");
  GroupAction tr = translation_action(z2);
  auto m2 = MatrixAlgebra::canonical({2}, "M2");
  GroupAction inner = inner_cyclic_action(z2, 2, swap2());
  // C(Z2) -> M2 as diagonal matrices; the flip intertwines translation and Ad swap.
  CMatrix diag = CMatrix::Zero(4, 2);
  diag(0, 0) = diag(3, 1) = 1.0;
  EquivariantBimodule x = equivariant_from_hom(hom(c, tr.algebra, CMatrix::Ones(2, 1)), trivial_action(c, z2), tr);
  EquivariantBimodule y = equivariant_from_hom(hom(tr.algebra, m2, diag), tr, inner);
  FunctorComposition fc = functor_composition(x, y);
  CheckReport r = validate_isomorphism(fc.psi);
  EXPECT_TRUE(r.passed()) << r.first_failure();

  CheckReport all = check_functor({x, y, equivariant_identity(tr), equivariant_identity(inner)});
  EXPECT_TRUE(all.passed()) << all.first_failure();
}

TEST(Functor, GeneralBimodules) {
  auto s3 = make_group("symmetric(3)");
  auto x = trivially_equivariant(conjugated(block_module({1, 1}, {2}, {{1}, {1}}), random_unitary(4, 8)), s3);
  auto m2 = MatrixAlgebra::canonical({2}, "M2");
  CheckReport r = check_functor({x, equivariant_identity(trivial_action(m2, s3))});
  EXPECT_TRUE(r.passed()) << r.first_failure();

  // C^2 over C with a sign in gamma, composed with itself.
  auto z2 = make_group("cyclic(2)");
  auto y = trivially_equivariant(scalar_module(2), z2);
  y.gamma[1](1, 1) = -1.0;
  FunctorComposition fc = functor_composition(y, y);
  EXPECT_EQ(fc.xy.carrier->dim, 8);
  CheckReport v = validate_isomorphism(fc.psi);
  EXPECT_TRUE(v.passed()) << v.first_failure();
}
