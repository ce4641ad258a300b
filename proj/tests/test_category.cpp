#include <gtest/gtest.h>

#include "morita/category.hpp"
#include "support.hpp"

using namespace morita;
using namespace morita::test;

TEST(Compose, UnitLaws) {
  auto x = conjugated(block_module({1, 2}, {1, 1}, {{1, 1}, {1, 0}}), random_unitary(4, 1));
  Morphism f = make_morphism(x);
  EXPECT_TRUE(equal(compose(identity_morphism(f.source), f), f).flag);
  EXPECT_TRUE(equal(compose(f, identity_morphism(f.target)), f).flag);
}

TEST(Compose, ReverseIsInverse) {
  Morphism f = make_morphism(column_module(3));
  auto g = inverse(f);
  ASSERT_TRUE(g.has_value());
  EXPECT_TRUE(equal(compose(f, *g), identity_morphism(f.source)).flag);
  EXPECT_TRUE(equal(compose(*g, f), identity_morphism(f.target)).flag);
}

TEST(Compose, MiddleMismatch) {
  Morphism f = make_morphism(column_module(2));
  EXPECT_THROW(compose(f, f), MoritaError);
}

TEST(Equal, Examples) {
  auto x = block_module({1, 1}, {2}, {{1}, {1}});
  Morphism f = make_morphism(x);
  Equality self = equal(f, f);
  ASSERT_TRUE(self.flag);
  // Self-isomorphisms of X are only fixed up to a phase per block.
  EXPECT_TRUE(validate_isomorphism(*self.witness).passed());
  CMatrix w = self.witness->map;
  EXPECT_LT(max_abs(CMatrix(w.adjoint() * w - identity(x->dim))), 1e-8);

  auto cc = MatrixAlgebra::canonical({1, 1}, "C+C");
  auto m3 = MatrixAlgebra::canonical({3}, "M3");
  CMatrix phi = CMatrix::Zero(9, 2);
  phi(0, 0) = 1.0;
  phi(4, 1) = phi(8, 1) = 1.0;
  CMatrix u = random_unitary(3, 2);
  CMatrix ad(9, 2);
  for (Index k = 0; k < 2; ++k) ad.col(k) = flatten(u * m3->to_matrix(phi.col(k)) * u.adjoint());
  EXPECT_TRUE(equal(hom_morphism(hom(cc, m3, phi)), hom_morphism(hom(cc, m3, ad))).flag);

  Equality diff = equal(make_morphism(scalar_module(2)), make_morphism(scalar_module(3)));
  EXPECT_FALSE(diff.flag);
  EXPECT_NE(diff.obstruction.find("dimension"), std::string::npos);
}

TEST(IsIsomorphism, Examples) {
  auto m2 = MatrixAlgebra::canonical({2}, "M2");
  EXPECT_TRUE(is_isomorphism(identity_morphism(m2)));
  EXPECT_TRUE(is_isomorphism(make_morphism(column_module(2))));
  EXPECT_FALSE(is_isomorphism(make_morphism(scalar_module(2))));
}

TEST(MakeMorphism, RejectsInvalidCarrier) {
  auto col = column_module(2);
  auto neg = make_bimodule(col->left, col->right, col->left_action, col->right_action,
                           {CMatrix(-identity(2))});
  EXPECT_THROW(make_morphism(neg), MoritaError);
}

TEST(CategoryLaws, RandomTriples) {
  auto x = conjugated(block_module({1, 1}, {2}, {{1}, {2}}), random_unitary(6, 10));
  auto y = conjugated(block_module({2}, {1, 2}, {{1, 1}}), random_unitary(6, 11));
  auto z = conjugated(block_module({1, 2}, {1}, {{1}, {1}}), random_unitary(3, 12));
  CheckReport r = check_category_laws(make_morphism(x), make_morphism(y), make_morphism(z));
  EXPECT_TRUE(r.passed()) << r.first_failure();
  EXPECT_LE(r.max_defect(), 1e-8);
}

TEST(Invertibility, BothDirections) {
  auto imp = conjugated(block_module({1, 2}, {1, 1}, {{1, 0}, {0, 1}}), random_unitary(3, 20));
  CheckReport a = check_invertibility(make_morphism(imp));
  EXPECT_TRUE(a.passed()) << a.first_failure();
  CheckReport b = check_invertibility(make_morphism(block_module({1, 1}, {1}, {{2}, {1}})));
  EXPECT_TRUE(b.passed()) << b.first_failure();
  EXPECT_FALSE(is_isomorphism(make_morphism(block_module({1, 1}, {1}, {{2}, {1}}))));
}
