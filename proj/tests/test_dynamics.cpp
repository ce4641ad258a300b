#include <gtest/gtest.h>

#include "morita/dynamics.hpp"
#include "support.hpp"

using namespace morita;
using namespace morita::test;

namespace {

// C -> C(Z2) as constants, equivariant for the trivial and translation
// actions.
StarHom constants(const AlgebraPtr& c, const AlgebraPtr& c2) {
  CMatrix m = CMatrix::Ones(2, 1);
  return hom(c, c2, m);
}

}  // namespace

TEST(Groups, Examples) {
  EXPECT_EQ(FiniteGroup::cyclic(1).order, 1);
  auto z4 = FiniteGroup::cyclic(4);
  EXPECT_EQ(z4.order, 4);
  EXPECT_TRUE(z4.abelian());
  auto s3 = FiniteGroup::symmetric(3);
  EXPECT_EQ(s3.order, 6);
  EXPECT_FALSE(s3.abelian());
  // (0 1) is permutation 2 = [1,0,2]; the 3-cycle [1,2,0] is 3.
  EXPECT_NE(s3(2, 3), s3(3, 2));
  auto d4 = FiniteGroup::dihedral(4);
  EXPECT_EQ(d4.order, 8);
  EXPECT_FALSE(d4.abelian());
  EXPECT_EQ(make_group("symmetric(3)")->mult, s3.mult);
  EXPECT_THROW(make_group("cyclic 3"), MoritaError);
  EXPECT_THROW(FiniteGroup::from_table({{0, 1}, {0, 1}}), MoritaError);
  EXPECT_THROW(FiniteGroup::from_table({{0, 1, 2}, {1, 2, 0}, {2, 1, 0}}), MoritaError);
}

TEST(Subgroups, CosetsAndCounts) {
  auto s3 = make_group("symmetric(3)");
  EXPECT_EQ(all_subgroups(s3).size(), 6u);
  EXPECT_EQ(all_subgroups(make_group("cyclic(4)")).size(), 3u);
  EXPECT_EQ(all_subgroups(make_group("dihedral(4)")).size(), 10u);
  EXPECT_EQ(all_subgroups(make_group("cyclic(6)")).size(), 4u);
  for (const auto& h : all_subgroups(s3)) {
    EXPECT_EQ(h.index() * static_cast<int>(h.elements.size()), 6);
    std::vector<int> count(static_cast<std::size_t>(h.index()), 0);
    for (int t = 0; t < 6; ++t) ++count[static_cast<std::size_t>(h.coset_of[t])];
    for (int c : count) EXPECT_EQ(c, static_cast<int>(h.elements.size()));
    for (int c = 0; c < h.index(); ++c) {
      int t = h.transversal[static_cast<std::size_t>(c)];
      for (int u = 0; u < t; ++u) EXPECT_NE(h.coset_of[u], c);
    }
  }
  EXPECT_THROW(make_subgroup(s3, {0, 2, 3}), MoritaError);
}

TEST(Actions, TranslationAndInner) {
  auto z3 = make_group("cyclic(3)");
  EXPECT_TRUE(validate_action(translation_action(z3)).passed());
  CMatrix u = CMatrix::Zero(2, 2);
  u(0, 0) = 1.0;
  u(1, 1) = -1.0;
  auto z2 = make_group("cyclic(2)");
  EXPECT_TRUE(validate_action(inner_cyclic_action(z2, 2, u)).passed());
  GroupAction broken = translation_action(z3);
  broken.maps[1].map *= 2.0;
  EXPECT_FALSE(validate_action(broken).passed());
}

TEST(Restrict, Examples) {
  auto s3 = make_group("symmetric(3)");
  GroupAction a = translation_action(s3);
  GroupAction all = restrict(a, whole_group(s3));
  for (int s = 0; s < 6; ++s) EXPECT_EQ(all[s].map, a[s].map);
  GroupAction triv = restrict(a, trivial_subgroup(s3));
  ASSERT_EQ(triv.maps.size(), 1u);
  EXPECT_EQ(triv[0].map, identity(6));
  EXPECT_TRUE(validate_action(restrict(a, all_subgroups(s3)[2])).passed());
}

TEST(ValidateEquivariant, Examples) {
  auto z2 = make_group("cyclic(2)");
  auto m2 = MatrixAlgebra::canonical({2}, "M2");
  EXPECT_TRUE(validate_equivariant(trivially_equivariant(identity_bimodule(m2), z2)).passed());
  GroupAction tr = translation_action(z2);
  auto c = MatrixAlgebra::canonical({1}, "C");
  EquivariantBimodule x = equivariant_from_hom(constants(c, tr.algebra), trivial_action(c, z2), tr);
  EXPECT_TRUE(validate_equivariant(x).passed());
  x.gamma[1] *= 2.0;
  CheckReport r = validate_equivariant(x);
  EXPECT_FALSE(r.passed());
  bool inner_failed = false;
  for (const auto& e : r.entries())
    if (e.name == "inner product") inner_failed = !e.passed;
  EXPECT_TRUE(inner_failed);
  CMatrix bad = CMatrix::Zero(2, 1);
  bad(0, 0) = 1.0;
  EXPECT_THROW(equivariant_from_hom(hom(c, tr.algebra, bad), trivial_action(c, z2), tr), MoritaError);
}

TEST(EquivariantTensor, ActionsCompose) {
  auto z3 = make_group("cyclic(3)");
  GroupAction tr = translation_action(z3);
  auto c = MatrixAlgebra::canonical({1}, "C");
  EquivariantBimodule x = equivariant_from_hom(constants(c, tr.algebra).map.rows() == 3
                                                   ? constants(c, tr.algebra)
                                                   : hom(c, tr.algebra, CMatrix::Ones(3, 1)),
                                               trivial_action(c, z3), tr);
  EquivariantBimodule idb = equivariant_identity(tr);
  EquivariantTensor t = equivariant_tensor(x, idb);
  CheckReport r = validate_equivariant(t.result);
  EXPECT_TRUE(r.passed()) << r.first_failure();
  BimoduleMap ru = right_unitor(t.product);
  EXPECT_TRUE(validate_equivariant_map(ru, t.result, x).passed());

  auto y = trivially_equivariant(scalar_module(2), z3);
  auto yy = equivariant_tensor(y, y);
  for (const auto& g : yy.result.gamma) EXPECT_LT(max_abs(CMatrix(g - identity(4))), 1e-12);
}

TEST(EquivariantTensor, Associator) {
  auto z2 = make_group("cyclic(2)");
  CMatrix u = CMatrix::Zero(2, 2);
  u(0, 1) = u(1, 0) = 1.0;
  GroupAction inner = inner_cyclic_action(z2, 2, u);
  EquivariantBimodule a = equivariant_identity(inner);
  EquivariantTensor ab = equivariant_tensor(a, a);
  EquivariantTensor ab_c = equivariant_tensor(ab.result, a);
  EquivariantTensor bc = equivariant_tensor(a, a);
  EquivariantTensor a_bc = equivariant_tensor(a, bc.result);
  BimoduleMap as = associator(ab.product, ab_c.product, bc.product, a_bc.product);
  CheckReport r = validate_equivariant_map(as, ab_c.result, a_bc.result);
  EXPECT_TRUE(r.passed()) << r.first_failure();
  EXPECT_TRUE(find_equivariant_isomorphism(ab_c.result, a_bc.result));
}

TEST(FindEquivariantIsomorphism, DistinguishesActions) {
  auto z2 = make_group("cyclic(2)");
  auto x = trivially_equivariant(scalar_module(2), z2);
  auto y = x;
  y.gamma[1] = CMatrix::Identity(2, 2);
  y.gamma[1](1, 1) = -1.0;
  EXPECT_TRUE(validate_equivariant(y).passed());
  EXPECT_TRUE(find_isomorphism(x.carrier, y.carrier));
  IsomorphismSearch s = find_equivariant_isomorphism(x, y);
  EXPECT_FALSE(s);
  auto z = x;
  CMatrix swap = CMatrix::Zero(2, 2);
  swap(0, 1) = swap(1, 0) = 1.0;
  z.gamma[1] = swap;
  // swap and diag(1, -1) are conjugate, so these are equivariantly isomorphic.
  IsomorphismSearch t = find_equivariant_isomorphism(y, z);
  EXPECT_TRUE(t) << t.obstruction;
}

TEST(EquivariantFactor, Examples) {
  auto z2 = make_group("cyclic(2)");
  auto col = trivially_equivariant(column_module(2), z2);
  EquivariantFactorization f = equivariant_factor(col);
  EXPECT_TRUE(f.report.passed()) << f.report.first_failure();
  for (const auto& e : f.epsilon.maps) EXPECT_LT(max_abs(CMatrix(e.map - identity(4))), 1e-9);

  GroupAction tr = translation_action(z2);
  auto c = MatrixAlgebra::canonical({1}, "C");
  EquivariantBimodule x = equivariant_from_hom(constants(c, tr.algebra), trivial_action(c, z2), tr);
  EquivariantFactorization g = equivariant_factor(x);
  EXPECT_TRUE(g.report.passed()) << g.report.first_failure();
  // epsilon is beta transported to K(X) = C(Z2): the nontrivial element moves.
  EXPECT_GT(max_abs(CMatrix(g.epsilon[1].map - identity(2))), 0.5);
}

TEST(EquivariantImprimitivity, LeftInnerEquivariance) {
  auto z2 = make_group("cyclic(2)");
  GroupAction tr = translation_action(z2);
  EquivariantImprimitivity e = equivariant_imprimitivity(equivariant_identity(tr));
  EXPECT_TRUE(e.flag) << e.report.first_failure();
  ASSERT_TRUE(e.reverse.has_value());
  EquivariantTensor t = equivariant_tensor(equivariant_identity(tr), *e.reverse);
  EXPECT_TRUE(find_equivariant_isomorphism(t.result, equivariant_identity(tr)));

  // Same carrier with gamma not matching alpha on the left: fails (ii).
  EquivariantBimodule bad = equivariant_identity(tr);
  bad.alpha = trivial_action(tr.algebra, z2);
  EXPECT_FALSE(equivariant_imprimitivity(bad).flag);
}

TEST(Functions, Examples) {
  auto z2 = make_group("cyclic(2)");
  auto c = MatrixAlgebra::canonical({1}, "C");
  FunctionAmplification f = tensor_with_functions(trivial_action(c, z2), trivial_subgroup(z2));
  EXPECT_EQ(f.algebra->dim(), 2);
  EXPECT_EQ(f.action[1].map, translation_action(z2)[1].map);
  EXPECT_TRUE(validate_action(f.action).passed());

  auto s3 = make_group("symmetric(3)");
  GroupAction tr = translation_action(s3);
  FunctionAmplification whole = tensor_with_functions(tr, whole_group(s3));
  EXPECT_EQ(whole.algebra->dim(), 6);
  for (int s = 0; s < 6; ++s) EXPECT_EQ(whole.action[s].map, tr[s].map);
  for (const auto& h : all_subgroups(s3)) {
    FunctionAmplification a = tensor_with_functions(tr, h);
    EXPECT_EQ(a.algebra->dim(), 6 * h.index());
    EXPECT_TRUE(validate_action(a.action).passed());
    EXPECT_LT(equivariance_defect(a.diagonal, tr, a.action), 1e-12);
  }
}

TEST(Functions, FunctorOnBimodulesAndHoms) {
  auto z3 = make_group("cyclic(3)");
  GroupAction tr = translation_action(z3);
  auto c = MatrixAlgebra::canonical({1}, "C");
  GroupAction triv = trivial_action(c, z3);
  StarHom phi = hom(c, tr.algebra, CMatrix::Ones(3, 1));
  Subgroup h = trivial_subgroup(z3);
  FunctionAmplification fc = tensor_with_functions(triv, h);
  FunctionAmplification ft = tensor_with_functions(tr, h);
  StarHom amp = tensor_with_functions(phi, fc, ft);
  EXPECT_TRUE(validate_star_hom(amp).passed());
  EXPECT_LT(equivariance_defect(amp, fc.action, ft.action), 1e-12);

  EquivariantBimodule x = equivariant_from_hom(phi, triv, tr);
  EquivariantBimodule xa = tensor_with_functions(x, h, fc, ft);
  EXPECT_TRUE(validate_equivariant(xa).passed());
  EquivariantBimodule ida = tensor_with_functions(equivariant_identity(tr), h, ft, ft);
  EXPECT_TRUE(find_equivariant_isomorphism(ida, equivariant_identity(ft.action)));
  EquivariantTensor t = equivariant_tensor(x, equivariant_identity(tr));
  EquivariantBimodule ta = tensor_with_functions(t.result, h, fc, ft);
  EquivariantTensor at = equivariant_tensor(xa, ida);
  EXPECT_TRUE(find_equivariant_isomorphism(ta, at.result));
}
