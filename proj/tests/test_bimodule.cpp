#include <gtest/gtest.h>

#include "morita/bimodule.hpp"
#include "support.hpp"

using namespace morita;
using namespace morita::test;


TEST(ValidateBimodule, Examples) {
  auto m2 = MatrixAlgebra::canonical({2}, "M2");
  EXPECT_TRUE(validate_bimodule(*identity_bimodule(m2)).passed());
  auto col = column_module(2);
  EXPECT_TRUE(validate_bimodule(*col).passed());
  auto neg = make_bimodule(col->left, col->right, col->left_action, col->right_action,
                           {CMatrix(-identity(2))});
  CheckReport r = validate_bimodule(*neg);
  EXPECT_FALSE(r.passed());
  bool positivity_failed = false;
  for (const auto& e : r.entries())
    if (e.name == "positivity") positivity_failed = !e.passed;
  EXPECT_TRUE(positivity_failed);
}

TEST(ValidateBimodule, ZeroDimensionalRejected) {
  auto c = MatrixAlgebra::canonical({1}, "C");
  auto z = make_bimodule(c, c, {CMatrix(0, 0)}, {CMatrix(0, 0)}, {CMatrix(0, 0)});
  EXPECT_FALSE(validate_bimodule(*z).passed());
}

TEST(ValidateBimodule, BlockModulesAndConjugates) {
  auto x = block_module({1, 2}, {1, 2}, {{1, 2}, {1, 1}});
  EXPECT_TRUE(validate_bimodule(*x).passed()) << validate_bimodule(*x).first_failure();
  auto y = conjugated(x, random_unitary(x->dim, 3));
  EXPECT_TRUE(validate_bimodule(*y).passed());
}

TEST(IdentityBimodule, Examples) {
  auto c = MatrixAlgebra::canonical({1}, "C");
  auto ic = identity_bimodule(c);
  EXPECT_EQ(ic->dim, 1);
  EXPECT_NEAR(std::abs(ic->inner[0](0, 0) - 1.0), 0.0, 1e-12);
  auto m2 = MatrixAlgebra::canonical({2}, "M2");
  auto im = identity_bimodule(m2);
  EXPECT_EQ(im->dim, 4);
  EXPECT_TRUE(validate_bimodule(*im).passed());
}

TEST(IdentityBimodule, UnitLaws) {
  auto x = conjugated(block_module({1, 2}, {2}, {{1}, {1}}), random_unitary(6, 5));
  auto ia = identity_bimodule(x->left);
  auto ib = identity_bimodule(x->right);
  TensorProduct left = tensor_product(ia, x);
  TensorProduct right = tensor_product(x, ib);
  EXPECT_EQ(left.result->dim, x->dim);
  EXPECT_EQ(right.result->dim, x->dim);
  EXPECT_TRUE(validate_bimodule(*left.result).passed());
  BimoduleMap lu = left_unitor(left, StarHom::identity(x->left));
  BimoduleMap lu_x{left.result, x, lu.map};
  EXPECT_TRUE(validate_isomorphism(lu_x).passed()) << validate_isomorphism(lu_x).first_failure();
  EXPECT_TRUE(validate_isomorphism(right_unitor(right)).passed());
  EXPECT_TRUE(find_isomorphism(left.result, x));
  EXPECT_TRUE(find_isomorphism(right.result, x));
}

TEST(BimoduleFromHom, Examples) {
  auto m2 = MatrixAlgebra::canonical({2}, "M2");
  auto c = MatrixAlgebra::canonical({1}, "C");
  auto id = bimodule_from_hom(StarHom::identity(m2));
  EXPECT_TRUE(find_isomorphism(id, identity_bimodule(m2)));
  CMatrix m = CMatrix::Zero(4, 1);
  m(0, 0) = m(3, 0) = 1.0;
  auto x = bimodule_from_hom(hom(c, m2, m));
  EXPECT_EQ(x->dim, 4);
  EXPECT_TRUE(validate_bimodule(*x).passed());
  CMatrix bad = CMatrix::Zero(4, 1);
  bad(0, 0) = 2.0;
  EXPECT_THROW(bimodule_from_hom(hom(c, m2, bad)), MoritaError);
}

TEST(BimoduleFromHom, ClassesMatchUnitaryEquivalence) {
  auto cc = MatrixAlgebra::canonical({1, 1}, "C+C");
  auto m2 = MatrixAlgebra::canonical({2}, "M2");
  StarHom phi = diagonal_hom(cc, m2, 0, 1);
  StarHom swapped = diagonal_hom(cc, m2, 1, 0);
  StarHom doubled = diagonal_hom(cc, m2, 0, 0);
  auto xp = bimodule_from_hom(phi);
  EXPECT_TRUE(hom_unitary_equivalence(phi, swapped).unitary.has_value());
  EXPECT_TRUE(find_isomorphism(xp, bimodule_from_hom(swapped)));
  EXPECT_FALSE(hom_unitary_equivalence(phi, doubled).unitary.has_value());
  IsomorphismSearch s = find_isomorphism(xp, bimodule_from_hom(doubled));
  EXPECT_FALSE(s);
  EXPECT_FALSE(s.obstruction.empty());
}

TEST(Tensor, ScalarDimensions) {
  for (Index m = 1; m <= 3; ++m)
    for (Index n = 1; n <= 3; ++n) EXPECT_EQ(tensor(scalar_module(m), scalar_module(n))->dim, m * n);
}

TEST(Tensor, MiddleMismatch) {
  auto col = column_module(2);
  EXPECT_THROW(tensor(col, col), MoritaError);
}

TEST(Tensor, Associativity) {
  auto x = conjugated(block_module({1, 1}, {2}, {{1}, {1}}), random_unitary(4, 7));
  auto y = conjugated(block_module({2}, {1, 2}, {{1, 1}}), random_unitary(6, 8));
  auto z = conjugated(block_module({1, 2}, {1}, {{2}, {1}}), random_unitary(4, 9));
  TensorProduct xy = tensor_product(x, y);
  TensorProduct xy_z = tensor_product(xy.result, z);
  TensorProduct yz = tensor_product(y, z);
  TensorProduct x_yz = tensor_product(x, yz.result);
  EXPECT_TRUE(validate_bimodule(*xy_z.result).passed());
  BimoduleMap a = associator(xy, xy_z, yz, x_yz);
  CheckReport r = validate_isomorphism(a);
  EXPECT_TRUE(r.passed()) << r.first_failure();
  EXPECT_TRUE(find_isomorphism(xy_z.result, x_yz.result));
}

TEST(Tensor, Balancing) {
  auto x = conjugated(block_module({1, 1}, {2}, {{1}, {1}}), random_unitary(4, 11));
  auto y = conjugated(block_module({2}, {1, 1}, {{1, 2}}), random_unitary(6, 12));
  TensorProduct t = tensor_product(x, y);
  Rng rng(13);
  CVector b = rng.complex_vector(4);
  CVector u = rng.complex_vector(x->dim), v = rng.complex_vector(y->dim);
  CVector lhs = kron(CMatrix(x->act_right(b) * u), CMatrix(v));
  CVector rhs = kron(CMatrix(u), CMatrix(y->act_left(b) * v));
  EXPECT_LT(max_abs(CVector(t.quotient.adjoint() * (lhs - rhs))), 1e-9);
}

TEST(StandardForm, Examples) {
  auto m2 = MatrixAlgebra::canonical({2}, "M2");
  StandardForm s = standard_form(*identity_bimodule(m2));
  EXPECT_EQ(s.multiplicities, std::vector<Index>{2});
  EXPECT_TRUE(validate_star_hom(s.kappa).passed());
  StandardForm col = standard_form(*column_module(2));
  EXPECT_EQ(col.multiplicities, std::vector<Index>{2});
  EXPECT_EQ(col.table, (std::vector<std::vector<Index>>{{1}}));
  StandardForm two = standard_form(*scalar_module(2));
  EXPECT_EQ(two.multiplicities, std::vector<Index>{2});
  EXPECT_LT(max_abs(CMatrix(two.compact_canonical->to_matrix(two.kappa.map.col(0)) - identity(2))), 1e-9);
}

TEST(StandardForm, RecoversBlockMultiplicities) {
  auto x = conjugated(block_module({1, 2}, {1, 2, 1}, {{1, 0, 2}, {1, 1, 0}}), random_unitary(9, 21));
  StandardForm s = standard_form(*x);
  // Canonical algebras keep their block order.
  ASSERT_EQ(x->right->structure().block_sizes, (std::vector<Index>{1, 2, 1}));
  EXPECT_EQ(s.multiplicities, (std::vector<Index>{3, 2, 2}));
  std::vector<std::vector<Index>> table{{1, 0, 2}, {1, 1, 0}};
  EXPECT_EQ(s.table, table);
  EXPECT_LT(max_abs(CMatrix(s.basis * s.basis_inverse - identity(x->dim))), 1e-9);
  EXPECT_TRUE(validate_star_hom(s.kappa).passed());
}

TEST(FindIsomorphism, SelfAndConjugate) {
  auto x = block_module({1, 2}, {1, 2}, {{1, 1}, {1, 1}});
  auto self = find_isomorphism(x, x);
  ASSERT_TRUE(self);
  EXPECT_TRUE(validate_isomorphism(*self.map).passed());
  for (std::uint64_t seed = 30; seed < 33; ++seed) {
    auto y = conjugated(x, random_unitary(x->dim, seed));
    auto s = find_isomorphism(x, y);
    ASSERT_TRUE(s) << s.obstruction;
    EXPECT_LE(s.defect, kTol.bound(10.0));
  }
}

TEST(FindIsomorphism, DifferentTables) {
  auto x = block_module({1, 1}, {1}, {{2}, {0}});
  auto y = block_module({1, 1}, {1}, {{1}, {1}});
  ASSERT_EQ(x->dim, y->dim);
  auto s = find_isomorphism(x, y);
  EXPECT_FALSE(s);
  EXPECT_NE(s.obstruction.find("multiplicity"), std::string::npos);
}

TEST(Compacts, Examples) {
  EXPECT_EQ(compact_operators(scalar_module(3)).algebra->dim(), 9);
  auto b = MatrixAlgebra::canonical({1, 2}, "B");
  auto cb = compact_operators(identity_bimodule(b));
  EXPECT_EQ(cb.algebra->dim(), 5);
  EXPECT_EQ(numerical_rank(cb.kappa.map), 5);
  auto cc = MatrixAlgebra::canonical({1, 1}, "C+C");
  auto m2 = MatrixAlgebra::canonical({2}, "M2");
  auto x = bimodule_from_hom(diagonal_hom(cc, m2, 0, 1));
  auto co = compact_operators(x);
  EXPECT_EQ(co.algebra->dim(), 4);
  EXPECT_EQ(co.algebra->structure().block_sizes, std::vector<Index>{2});
  EXPECT_TRUE(validate_star_hom(co.kappa).passed());
}

TEST(Imprimitivity, Examples) {
  EXPECT_TRUE(is_imprimitivity(column_module(3)).flag);
  auto s = is_imprimitivity(scalar_module(2));
  EXPECT_FALSE(s.flag);
  EXPECT_FALSE(s.reason.empty());
  auto m2 = MatrixAlgebra::canonical({2}, "M2");
  auto cc = MatrixAlgebra::canonical({1, 1}, "C+C");
  EXPECT_FALSE(is_imprimitivity(bimodule_from_hom(diagonal_hom(cc, m2, 0, 1))).flag);
  Rng rng(40);
  CMatrix u = polar_unitary(rng.complex_matrix(2, 2));
  CMatrix auto_map(4, 4);
  for (Index k = 0; k < 4; ++k) auto_map.col(k) = flatten(u * m2->basis_matrix(k) * u.adjoint());
  EXPECT_TRUE(is_imprimitivity(bimodule_from_hom(hom(m2, m2, auto_map))).flag);
}

TEST(Imprimitivity, ReverseGivesInverse) {
  auto x = conjugated(block_module({1, 2}, {1, 1}, {{1, 0}, {0, 1}}), random_unitary(3, 41));
  Imprimitivity imp = is_imprimitivity(x);
  ASSERT_TRUE(imp.flag) << imp.reason;
  EXPECT_TRUE(validate_bimodule(*imp.reverse).passed());
  auto xr = tensor(x, imp.reverse);
  auto rx = tensor(imp.reverse, x);
  EXPECT_TRUE(find_isomorphism(xr, identity_bimodule(x->left)));
  EXPECT_TRUE(find_isomorphism(rx, identity_bimodule(x->right)));
}

TEST(Imprimitivity, InverseWitnessImpliesFlag) {
  auto col = column_module(2);
  Imprimitivity imp = is_imprimitivity(col);
  ASSERT_TRUE(imp.flag);
  auto y = imp.reverse;
  bool both = static_cast<bool>(find_isomorphism(tensor(col, y), identity_bimodule(col->left))) &&
              static_cast<bool>(find_isomorphism(tensor(y, col), identity_bimodule(col->right)));
  EXPECT_TRUE(both);
  EXPECT_TRUE(is_imprimitivity(y).flag);
  // A module without a two-sided inverse: C^2 over C - C.
  auto s = scalar_module(2);
  auto back = scalar_module(2);
  EXPECT_FALSE(find_isomorphism(tensor(s, back), identity_bimodule(s->left)));
}

TEST(Factorization, Examples) {
  auto f = factor_morphism(scalar_module(2));
  EXPECT_TRUE(f.report.passed()) << f.report.first_failure();
  EXPECT_EQ(f.algebra->dim(), 4);
  EXPECT_LT(max_abs(CMatrix(f.algebra->to_matrix(f.phi.map.col(0)) - identity(2))), 1e-9);
  EXPECT_EQ(f.imprimitivity->dim, 2);

  auto col = column_module(2);
  auto g = factor_morphism(col);
  EXPECT_TRUE(g.report.passed());
  EXPECT_EQ(numerical_rank(g.phi.map), 4);

  auto cc = MatrixAlgebra::canonical({1, 1}, "C+C");
  auto m2 = MatrixAlgebra::canonical({2}, "M2");
  auto h = factor_morphism(bimodule_from_hom(diagonal_hom(cc, m2, 0, 1)));
  EXPECT_TRUE(h.report.passed());
  EXPECT_EQ(h.algebra->dim(), 4);
}

TEST(Factorization, RandomModule) {
  auto x = conjugated(block_module({1, 2}, {1, 2}, {{1, 2}, {1, 0}}), random_unitary(7, 50));
  auto f = factor_morphism(x);
  EXPECT_TRUE(f.report.passed()) << f.report.first_failure();
}

TEST(Induction, IdentityModule) {
  auto b = MatrixAlgebra::canonical({1, 2}, "B");
  Representation pb = Representation::ambient(b);
  auto r = induce_representation(identity_bimodule(b), pb);
  EXPECT_TRUE(validate_bimodule_representation(r).passed());
  EXPECT_TRUE(unitary_intertwiner(r.pi_a, pb).has_value());
}

TEST(Induction, ColumnModule) {
  auto col = column_module(2);
  auto r = induce_representation(col, Representation::ambient(col->right));
  EXPECT_EQ(r.pi_a.dim, 2);
  EXPECT_TRUE(unitary_intertwiner(r.pi_a, Representation::ambient(col->left)).has_value());
}

TEST(Induction, DimensionCountAndCompacts) {
  auto x = conjugated(block_module({1, 2}, {1, 2}, {{1, 2}, {1, 0}}), random_unitary(7, 60));
  // pi_B with block multiplicities (2, 1).
  std::vector<CMatrix> imgs;
  for (Index k = 0; k < x->right->dim(); ++k) {
    CMatrix m = x->right->basis_matrix(k);
    CMatrix big = CMatrix::Zero(4, 4);
    big(0, 0) = m(0, 0);
    big(1, 1) = m(0, 0);
    big.bottomRightCorner(2, 2) = m.bottomRightCorner(2, 2);
    imgs.push_back(big);
  }
  Representation pb{x->right, 4, imgs};
  auto r = induce_representation(x, pb);
  // k = [3, 2] over B-blocks of sizes [1, 2].
  EXPECT_EQ(r.pi_a.dim, 3 * 2 + 2 * 1);
  CheckReport rep = validate_bimodule_representation(r);
  EXPECT_TRUE(rep.passed()) << rep.first_failure();
  bool lemma = false;
  for (const auto& e : rep.entries()) lemma = lemma || e.name == "rank-one operators";
  EXPECT_TRUE(lemma);
}

TEST(Linking, Examples) {
  auto b = MatrixAlgebra::canonical({1, 2}, "B");
  auto l1 = linking_algebra(identity_bimodule(b));
  EXPECT_EQ(l1.algebra->dim(), 4 * b->dim());
  auto col = column_module(2);
  auto l2 = linking_algebra(col);
  EXPECT_EQ(l2.algebra->dim(), 9);
  EXPECT_EQ(l2.algebra->structure().block_sizes, std::vector<Index>{3});
  for (const auto* l : {&l1, &l2}) {
    EXPECT_LT(max_abs(CVector(l->p + l->q - l->algebra->unit())), 1e-9);
    auto z = identity_bimodule(l->algebra);
    EXPECT_NO_THROW(corner(z, l->p, l->q));
    // The corner embeddings are multiplicative and *-preserving but send the
    // units to p and q.
    StarHom el = l->embed_left(), er = l->embed_right();
    EXPECT_LT(max_abs(CVector(el(el.source->unit()) - l->p)), 1e-12);
    EXPECT_LT(max_abs(CVector(er(er.source->unit()) - l->q)), 1e-12);
    for (const StarHom* h : {&el, &er})
      for (Index i = 0; i < h->source->dim(); ++i)
        for (Index j = 0; j < h->source->dim(); ++j) {
          CVector a = h->source->basis_vector(i), b = h->source->basis_vector(j);
          EXPECT_LT(max_abs(CVector((*h)(h->source->multiply(a, b)) -
                                    l->algebra->multiply((*h)(a), (*h)(b)))),
                    1e-9);
        }
    EXPECT_TRUE(is_imprimitivity(linking_module(*l)).flag);
  }
  EXPECT_THROW(linking_algebra(scalar_module(2)), MoritaError);
}

TEST(Corner, Examples) {
  auto x = conjugated(block_module({1, 2}, {1, 1}, {{1, 0}, {0, 1}}), random_unitary(3, 70));
  auto l = linking_algebra(x);
  auto z = identity_bimodule(l.algebra);
  const AlgebraPtr& la = l.algebra;
  Corner whole = corner(z, la->unit(), la->unit());
  EXPECT_EQ(whole.module->dim, z->dim);
  EXPECT_TRUE(validate_bimodule(*whole.module).passed());

  Index total = 0;
  for (const auto* pp : {&l.p, &l.q})
    for (const auto* qq : {&l.p, &l.q}) total += corner_along(z, StarHom::identity(la), StarHom::identity(la), *pp, *qq).module->dim;
  EXPECT_EQ(total, z->dim);

  Corner pq = corner_along(z, l.embed_left(), l.embed_right(), l.p, l.q);
  EXPECT_LT(pq.inner_defect, 1e-9);
  EXPECT_TRUE(validate_bimodule(*pq.module).passed());
  EXPECT_TRUE(find_isomorphism(pq.module, x));
  EXPECT_THROW(corner(z, CVector(l.embed_left().map * x->left->basis_vector(0)), l.q), MoritaError);
}

TEST(Corner, CornerTensorIdentities) {
  auto x = conjugated(block_module({1, 2}, {1, 1}, {{1, 0}, {0, 1}}), random_unitary(3, 80));
  auto y = column_module(2);
  auto lx = linking_algebra(x);
  auto ly = linking_algebra(y);
  // Z = L(X) as an L(X)-L(X) bimodule, for two different X.
  auto zx = identity_bimodule(lx.algebra);
  auto zy = identity_bimodule(ly.algebra);
  for (const auto& [l, z, base] : {std::tuple{&lx, zx, x}, std::tuple{&ly, zy, BimodulePtr(y)}}) {
    Corner qq = corner_along(z, l->embed_right(), l->embed_right(), l->q, l->q);
    Corner pq = corner_along(z, l->embed_left(), l->embed_right(), l->p, l->q);
    Corner pp = corner_along(z, l->embed_left(), l->embed_left(), l->p, l->p);
    TensorProduct t1 = tensor_product(base, qq.module);
    // x (x) z -> x . z
    CMatrix e1(pq.module->dim, base->dim * qq.module->dim);
    for (Index i = 0; i < base->dim; ++i) {
      CMatrix act = pq.embed.adjoint() * z->act_left(l->embed_module(CVector::Unit(base->dim, i))) * qq.embed;
      for (Index c = 0; c < qq.module->dim; ++c) e1.col(i * qq.module->dim + c) = act.col(c);
    }
    BimoduleMap phi = descend(t1, pq.module, e1);
    CheckReport r1 = validate_isomorphism(phi);
    EXPECT_TRUE(r1.passed()) << r1.first_failure();
    TensorProduct t2 = tensor_product(pp.module, base);
    // w (x) y -> w . y
    CMatrix e2(pq.module->dim, pp.module->dim * base->dim);
    for (Index j = 0; j < base->dim; ++j) {
      CMatrix act = pq.embed.adjoint() * z->act_right(l->embed_module(CVector::Unit(base->dim, j))) * pp.embed;
      for (Index w = 0; w < pp.module->dim; ++w) e2.col(w * base->dim + j) = act.col(w);
    }
    BimoduleMap psi = descend(t2, pq.module, e2);
    CheckReport r2 = validate_isomorphism(psi);
    EXPECT_TRUE(r2.passed()) << r2.first_failure();
  }
}
