#include <gtest/gtest.h>

#include "morita/green.hpp"
#include "support.hpp"

using namespace morita;
using namespace morita::test;

namespace {

CMatrix swap2() {
  CMatrix u = CMatrix::Zero(2, 2);
  u(0, 1) = u(1, 0) = 1.0;
  return u;
}

AlgebraPtr scalars() { return MatrixAlgebra::canonical({1}, "C"); }

// The 3-cycles of S_3 in lexicographic order are 3 = [1,2,0] and 4 = [2,0,1].
Subgroup z3_in_s3(const GroupPtr& s3) { return make_subgroup(s3, {0, 3, 4}); }

}  // namespace

TEST(Green, WholeGroupIsIdentity) {
  auto z2 = make_group("cyclic(2)");
  GroupAction a = inner_cyclic_action(z2, 2, swap2());
  GreenBimodule gb = green_bimodule(a, whole_group(z2));
  EXPECT_EQ(gb.carrier->dim, 8);
  CheckReport v = validate_green(gb);
  EXPECT_TRUE(v.passed()) << v.first_failure();
  IsomorphismSearch s = find_isomorphism(gb.carrier, identity_bimodule(gb.big));
  EXPECT_TRUE(s) << s.obstruction;
  EXPECT_TRUE(check_green_imprimitivity(gb).passed());
}

TEST(Green, ScalarsOverTrivialSubgroup) {
  auto z2 = make_group("cyclic(2)");
  GreenBimodule gb = green_bimodule(trivial_action(scalars(), z2), trivial_subgroup(z2));
  EXPECT_EQ(gb.carrier->dim, 2);
  EXPECT_EQ(gb.small->dim(), 1);
  EXPECT_EQ(compact_blocks(gb), (std::vector<Index>{2}));
  CheckReport v = validate_green(gb);
  EXPECT_TRUE(v.passed()) << v.first_failure();
  CheckReport r = check_green_imprimitivity(gb);
  EXPECT_TRUE(r.passed()) << r.first_failure();
  // C(Z2) x| Z2 = M_2.
  EXPECT_EQ(gb.extended_algebra->structure().block_sizes, (std::vector<Index>{2}));
}

// C(G/H) x| G = M_[G:H] (x) C*(H): for Z3 in S3 this is M2 + M2 + M2.
TEST(Green, S3OverZ3) {
  auto s3 = make_group("symmetric(3)");
  GreenBimodule gb = green_bimodule(trivial_action(scalars(), s3), z3_in_s3(s3));
  EXPECT_EQ(gb.carrier->dim, 6);
  EXPECT_EQ(gb.extended_algebra->dim(), 12);
  EXPECT_EQ(gb.extended_algebra->structure().block_sizes, (std::vector<Index>{2, 2, 2}));
  CheckReport r = check_green_imprimitivity(gb);
  EXPECT_TRUE(r.passed()) << r.first_failure();
  EXPECT_EQ(standard_form(*gb.extended).compact_dim(), 12);
}

TEST(Green, CatalogImprimitivity) {
  std::vector<GroupPtr> groups = {make_group("cyclic(2)"), make_group("cyclic(3)"), make_group("cyclic(4)"),
                                  make_group("symmetric(3)")};
  for (const auto& g : groups) {
    std::vector<GroupAction> actions = {trivial_action(scalars(), g), translation_action(g)};
    if (g->order % 2 == 0 && g->abelian()) {
      // Z_{2m} acting on M2 through Z2 by Ad of the flip.
      std::vector<CMatrix> maps;
      auto m2 = MatrixAlgebra::canonical({2}, "M2");
      for (int s = 0; s < g->order; ++s) {
        CMatrix u = (s % 2) ? swap2() : identity(2);
        CMatrix m(4, 4);
        for (Index k = 0; k < 4; ++k) m.col(k) = flatten(u * m2->basis_matrix(k) * u.adjoint());
        maps.push_back(m);
      }
      actions.push_back(make_action(m2, g, maps));
    }
    for (const auto& a : actions) {
      ASSERT_TRUE(validate_action(a).passed());
      for (const auto& h : all_subgroups(g)) {
        GreenBimodule gb = green_bimodule(a, h);
        EXPECT_EQ(gb.carrier->dim, a.algebra->dim() * g->order);
        CheckReport v = validate_green(gb);
        EXPECT_TRUE(v.passed()) << g->name << " " << a.algebra->name() << " |H|=" << h.elements.size() << " "
                                << v.first_failure();
        CheckReport r = check_green_imprimitivity(gb);
        EXPECT_TRUE(r.passed()) << g->name << " " << a.algebra->name() << " |H|=" << h.elements.size() << " "
                                << r.first_failure();
      }
    }
  }
}

TEST(Induce, RegularAndFrobenius) {
  for (const char* spec : {"cyclic(4)", "symmetric(3)"}) {
    auto g = make_group(spec);
    GreenBimodule gb = green_bimodule(trivial_action(scalars(), g), trivial_subgroup(g));
    Representation rho{gb.small, 1, {identity(1)}};
    Representation ind = induce(gb, rho);
    EXPECT_EQ(ind.dim, g->order);
    CVector chi = character(ind);
    // The regular character: |G| at e and 0 elsewhere.
    for (int s = 0; s < g->order; ++s)
      EXPECT_NEAR(std::abs(chi(s) - (s == g->identity ? double(g->order) : 0.0)), 0.0, 1e-9);
  }
  auto s3 = make_group("symmetric(3)");
  Subgroup h = z3_in_s3(s3);
  GreenBimodule gb = green_bimodule(trivial_action(scalars(), s3), h);
  // omega on the generator 3 of Z3; local indices follow the sorted elements {0, 3, 4}.
  const Complex w = std::polar(1.0, 2.0 * M_PI / 3.0);
  std::vector<CMatrix> im(3, CMatrix(1, 1));
  im[0](0, 0) = 1.0;
  im[1](0, 0) = w;
  im[2](0, 0) = w * w;
  ASSERT_EQ((*s3)(3, 3), 4);
  Representation rho{gb.small, 1, im};
  ASSERT_TRUE(validate_representation(rho).passed());
  Representation ind = induce(gb, rho);
  EXPECT_EQ(ind.dim, 2);
  CVector chi = character(ind);
  // Classes: e; 3-cycles {3, 4}; transpositions {1, 2, 5}.
  EXPECT_NEAR(std::abs(chi(0) - 2.0), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(chi(3) + 1.0), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(chi(4) + 1.0), 0.0, 1e-9);
  for (int s : {1, 2, 5}) EXPECT_NEAR(std::abs(chi(s)), 0.0, 1e-9);
  Representation bad{gb.small, 1, {identity(1) * 2.0, identity(1), identity(1)}};
  EXPECT_THROW(induce(gb, bad), MoritaError);
}

TEST(HomNaturality, Examples) {
  auto z2 = make_group("cyclic(2)");
  GroupAction tr = translation_action(z2);
  HomNaturality idn = hom_naturality_iso(StarHom::identity(tr.algebra), tr, tr, trivial_subgroup(z2));
  EXPECT_TRUE(idn.report.passed()) << idn.report.first_failure();

  GroupAction triv = trivial_action(scalars(), z2);
  StarHom phi = hom(scalars(), tr.algebra, CMatrix::Ones(2, 1));
  HomNaturality hn = hom_naturality_iso(phi, triv, tr, trivial_subgroup(z2));
  EXPECT_TRUE(hn.report.passed()) << hn.report.first_failure();
  EXPECT_EQ(hn.source.result->dim, 4);
  EXPECT_EQ(hn.target.result->dim, 4);
  EXPECT_LT(hn.report.max_defect(), 1e-9);

  auto s3 = make_group("symmetric(3)");
  GroupAction trs = translation_action(s3);
  HomNaturality hs = hom_naturality_iso(hom(scalars(), trs.algebra, CMatrix::Ones(6, 1)),
                                        trivial_action(scalars(), s3), trs, z3_in_s3(s3));
  EXPECT_TRUE(hs.report.passed()) << hs.report.first_failure();

  CMatrix bad = CMatrix::Zero(2, 1);
  bad(0, 0) = 1.0;
  EXPECT_THROW(hom_naturality_iso(hom(scalars(), tr.algebra, bad), triv, tr, trivial_subgroup(z2)),
               MoritaError);
}

TEST(LinkingCrossed, IdentityAndRandom) {
  auto z2 = make_group("cyclic(2)");
  auto m2 = MatrixAlgebra::canonical({2}, "M2");
  LinkingCrossed lc = linking_crossed_iso(equivariant_identity(trivial_action(m2, z2)));
  EXPECT_TRUE(lc.report.passed()) << lc.report.first_failure();
  EXPECT_EQ(lc.crossed->dim(), lc.linking.algebra->dim() * 2);
  EXPECT_EQ(lc.crossed_linking.algebra->dim(), lc.crossed->dim());

  // Column module C^2 over M2 - C with gamma = Ad-compatible flip.
  GroupAction inner = inner_cyclic_action(z2, 2, swap2());
  EquivariantBimodule col{column_module(2), inner, trivial_action(scalars(), z2), {identity(2), swap2()}};
  ASSERT_TRUE(validate_equivariant(col).passed());
  LinkingCrossed lc2 = linking_crossed_iso(col);
  EXPECT_TRUE(lc2.report.passed()) << lc2.report.first_failure();

  auto s3 = make_group("symmetric(3)");
  EquivariantBimodule y = trivially_equivariant(conjugated(column_module(2), random_unitary(2, 3)), s3);
  LinkingCrossed lc3 = linking_crossed_iso(y);
  EXPECT_TRUE(lc3.report.passed()) << lc3.report.first_failure();

  EXPECT_THROW(linking_crossed_iso(trivially_equivariant(scalar_module(2), z2)), MoritaError);
}

TEST(NaturalitySquare, IdentityAndHom) {
  auto z2 = make_group("cyclic(2)");
  GroupAction tr = translation_action(z2);
  for (SquareVariant v : {SquareVariant::Mor, SquareVariant::Iso}) {
    NaturalitySquare sq = check_naturality_square(equivariant_identity(tr), trivial_subgroup(z2), v);
    EXPECT_TRUE(sq.passed()) << sq.report.first_failure();
    EXPECT_LE(sq.defect, 1e-8);
    NaturalitySquare hs = check_naturality_square(hom(scalars(), tr.algebra, CMatrix::Ones(2, 1)),
                                                  trivial_action(scalars(), z2), tr, whole_group(z2), v);
    EXPECT_TRUE(hs.passed()) << hs.report.first_failure();
    EXPECT_TRUE(hs.direct);
  }
}

TEST(NaturalitySquare, Imprimitivity) {
  auto z2 = make_group("cyclic(2)");
  GroupAction inner = inner_cyclic_action(z2, 2, swap2());
  EquivariantBimodule col{column_module(2), inner, trivial_action(scalars(), z2), {identity(2), swap2()}};
  for (SquareVariant v : {SquareVariant::Mor, SquareVariant::Iso}) {
    NaturalitySquare sq = check_naturality_square(col, trivial_subgroup(z2), v);
    EXPECT_TRUE(sq.passed()) << sq.report.first_failure();
    EXPECT_LE(sq.defect, 1e-8);
    EXPECT_TRUE(sq.direct) << sq.direct.obstruction;
  }
}

TEST(NaturalitySquare, GeneralBimodule) {
  auto z3 = make_group("cyclic(3)");
  GroupAction tr = translation_action(z3);
  // C^3 as a C - C(Z3) bimodule: neither a hom bimodule nor imprimitive.
  auto x = block_module({1}, {1, 1, 1}, {{1, 1, 1}});
  EquivariantBimodule xe{x, trivial_action(scalars(), z3), tr, {}};
  for (int s = 0; s < 3; ++s) xe.gamma.push_back(tr[s].map);
  ASSERT_TRUE(validate_equivariant(xe).passed()) << validate_equivariant(xe).first_failure();
  NaturalitySquare sq = check_naturality_square(xe, trivial_subgroup(z3), SquareVariant::Mor);
  EXPECT_TRUE(sq.passed()) << sq.report.first_failure();
}

TEST(InductionCompatibility, Examples) {
  auto z2 = make_group("cyclic(2)");
  GroupAction inner = inner_cyclic_action(z2, 2, swap2());
  GroupAction triv = trivial_action(scalars(), z2);
  EquivariantBimodule col{column_module(2), inner, triv, {identity(2), swap2()}};
  Subgroup e = trivial_subgroup(z2);
  auto bh = crossed_product(restrict(triv, e));
  Representation rho{bh, 1, {identity(1)}};
  CheckReport r = check_induction_compatibility(col, e, rho);
  EXPECT_TRUE(r.passed()) << r.first_failure();

  auto bg = crossed_product(triv);
  Representation sign{bg, 1, {identity(1), -identity(1)}};
  CheckReport r2 = check_induction_compatibility(equivariant_identity(triv), whole_group(z2), sign);
  EXPECT_TRUE(r2.passed()) << r2.first_failure();
}
