#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "morita/algebra.hpp"

using namespace morita;

namespace {

// Permutation matrix of the left regular representation of a group given by
// its multiplication table: e_h -> e_{gh}.
CMatrix regular_matrix(const std::vector<std::vector<int>>& table, int g) {
  const int n = static_cast<int>(table.size());
  CMatrix m = CMatrix::Zero(n, n);
  for (int h = 0; h < n; ++h) m(table[g][h], h) = 1.0;
  return m;
}

std::vector<std::vector<int>> cyclic_table(int n) {
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[a][b] = (a + b) % n;
  return t;
}

// S_3 as permutations of {0,1,2}, composed as functions.
std::vector<std::vector<int>> s3_table() {
  std::vector<std::array<int, 3>> perms;
  std::array<int, 3> p{0, 1, 2};
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  std::vector<std::vector<int>> t(6, std::vector<int>(6));
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      std::array<int, 3> c{};
      for (int i = 0; i < 3; ++i) c[i] = perms[a][perms[b][i]];
      t[a][b] = static_cast<int>(std::find(perms.begin(), perms.end(), c) - perms.begin());
    }
  return t;
}

std::shared_ptr<const MatrixAlgebra> group_algebra(const std::vector<std::vector<int>>& table) {
  std::vector<CMatrix> basis;
  for (int g = 0; g < static_cast<int>(table.size()); ++g) basis.push_back(regular_matrix(table, g));
  return MatrixAlgebra::create(basis, "group algebra");
}

std::shared_ptr<const MatrixAlgebra> diagonal2() {
  CMatrix a = CMatrix::Zero(2, 2), b = CMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  b(1, 1) = 1.0;
  return MatrixAlgebra::create({a, b}, "diag2");
}

}  // namespace

TEST(ValidateAlgebra, Examples) {
  EXPECT_TRUE(validate_algebra(*diagonal2()).passed());

  CMatrix e12 = CMatrix::Zero(2, 2);
  e12(0, 1) = 1.0;
  const auto nil = MatrixAlgebra::candidate({e12}, "nil");
  const CheckReport r = validate_algebra(*nil);
  EXPECT_FALSE(r.passed());
  EXPECT_NE(r.first_failure().find("basis pair (0,0)"), std::string::npos);
  EXPECT_FALSE(nil->has_unit());
  EXPECT_THROW(MatrixAlgebra::create({e12}, "nil"), MoritaError);

  const auto z3 = group_algebra(cyclic_table(3));
  EXPECT_TRUE(validate_algebra(*z3).passed());
}

TEST(Wedderburn, DiagonalAndFullMatrix) {
  EXPECT_EQ(wedderburn_decompose(diagonal2()).block_sizes, (std::vector<Index>{1, 1}));
  std::vector<CMatrix> units;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      CMatrix e = CMatrix::Zero(3, 3);
      e(p, q) = 1.0;
      units.push_back(e);
    }
  // Scramble the basis so the fast canonical path is not used.
  Rng rng(5);
  const CMatrix u = polar_unitary(rng.complex_matrix(3, 3));
  for (auto& e : units) e = u * e * u.adjoint();
  const auto m3 = MatrixAlgebra::create(units, "M3");
  EXPECT_EQ(wedderburn_decompose(m3).block_sizes, (std::vector<Index>{3}));
}

TEST(Wedderburn, S3RegularRepresentation) {
  const auto a = group_algebra(s3_table());
  const StructureIso s = wedderburn_decompose(a);
  // Oracle: S_3 has irreducibles of degrees 1, 1, 2 and 1 + 1 + 4 = 6.
  EXPECT_EQ(s.block_sizes, (std::vector<Index>{1, 1, 2}));
  EXPECT_EQ(s.ambient_multiplicity, (std::vector<Index>{1, 1, 2}));
  EXPECT_TRUE(validate_star_iso(s.forward, s.backward).passed());
  // Round trip on every basis element.
  for (Index k = 0; k < a->dim(); ++k) {
    const CVector e = a->basis_vector(k);
    EXPECT_LT(max_abs(CVector(s.backward(s.forward(e)) - e)), 1e-9);
  }
}

TEST(Wedderburn, RoundTripRandomBlockAlgebra) {
  // Concrete algebra u (M2 (x) I3 + C) u* with blocks [1,2] in ambient dimension 7.
  Rng rng(21);
  const CMatrix u = polar_unitary(rng.complex_matrix(7, 7));
  std::vector<CMatrix> basis;
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) {
      CMatrix e = CMatrix::Zero(7, 7);
      for (int c = 0; c < 3; ++c) e(2 * c + p, 2 * c + q) = 1.0;
      basis.push_back(u * e * u.adjoint());
    }
  CMatrix one = CMatrix::Zero(7, 7);
  one(6, 6) = 1.0;
  basis.push_back(u * one * u.adjoint());
  const auto a = MatrixAlgebra::create(basis, "A");
  const auto s = wedderburn_decompose(a);
  EXPECT_EQ(s.block_sizes, (std::vector<Index>{1, 2}));
  EXPECT_EQ(s.ambient_multiplicity, (std::vector<Index>{1, 3}));
  EXPECT_LT(max_abs(CMatrix(s.backward.map * s.forward.map - identity(5))), 1e-9);
  EXPECT_TRUE(validate_star_hom(s.forward).passed());
  EXPECT_TRUE(validate_star_hom(s.backward).passed());
}

TEST(CanonicalTrace, Examples) {
  const auto m2 = MatrixAlgebra::canonical({2});
  EXPECT_NEAR(std::abs(canonical_trace(m2).dot(m2->unit()) - 2.0), 0.0, 1e-12);
  const auto c2 = MatrixAlgebra::canonical({1, 1});
  EXPECT_NEAR(std::abs((canonical_trace(c2).transpose() * c2->unit()).value() - 2.0), 0.0, 1e-12);
  // Group algebra of Z/3: three characters, each contributing 1 at the unit.
  const auto z3 = group_algebra(cyclic_table(3));
  const Complex t = (canonical_trace(z3).transpose() * z3->unit()).value();
  EXPECT_NEAR(std::abs(t - 3.0), 0.0, 1e-9);
}

TEST(CanonicalTrace, Faithful) {
  const auto a = group_algebra(s3_table());
  const CVector tau = canonical_trace(a);
  double c = 1e300;
  for (Index k = 0; k < a->dim(); ++k) {
    const CVector e = a->basis_vector(k);
    const Complex v = (tau.transpose() * a->multiply(a->star(e), e)).value();
    EXPECT_NEAR(v.imag(), 0.0, 1e-9);
    c = std::min(c, v.real());
  }
  EXPECT_GT(c, 0.1);
}

TEST(UnitaryEquivalence, Examples) {
  const auto c2 = MatrixAlgebra::canonical({1, 1});
  const auto m2 = MatrixAlgebra::canonical({2});
  CMatrix diag = CMatrix::Zero(4, 2), flip = CMatrix::Zero(4, 2), scalar = CMatrix::Zero(4, 2);
  diag(0, 0) = 1.0;  // e11 <- first summand
  diag(3, 1) = 1.0;
  flip(3, 0) = 1.0;
  flip(0, 1) = 1.0;
  scalar(0, 0) = scalar(3, 0) = 1.0;
  const StarHom phi{c2, m2, diag}, psi{c2, m2, flip}, chi{c2, m2, scalar};

  const auto same = hom_unitary_equivalence(phi, phi);
  ASSERT_TRUE(same.unitary);
  EXPECT_LT(same.defect, 1e-9);

  const auto sw = hom_unitary_equivalence(phi, psi);
  ASSERT_TRUE(sw.unitary);
  // Oracle: u is the swap matrix up to a diagonal phase.
  const CMatrix u = m2->to_matrix(*sw.unitary);
  EXPECT_LT(std::abs(u(0, 0)) + std::abs(u(1, 1)), 1e-9);
  EXPECT_NEAR(std::abs(u(0, 1)), 1.0, 1e-9);

  const auto none = hom_unitary_equivalence(phi, chi);
  EXPECT_FALSE(none.unitary);
  // Multiplicities (1,1) and (2,0): sum m m' = 2, sum m^2 = 2, sum m'^2 = 4.
  EXPECT_EQ(none.intertwiner_dim, 2);
  EXPECT_EQ(none.self_dim_phi, 2);
  EXPECT_EQ(none.self_dim_psi, 4);
}

TEST(UnitaryEquivalence, RecoversRandomConjugation) {
  // A = C + M2 into C = M5 with multiplicities (1, 2).
  const auto a = MatrixAlgebra::canonical({1, 2});
  const auto c = MatrixAlgebra::canonical({5});
  CMatrix map = CMatrix::Zero(25, 5);
  auto at = [](int i, int j) { return i * 5 + j; };
  map(at(0, 0), 0) = 1.0;
  for (int copy = 0; copy < 2; ++copy)
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) map(at(1 + 2 * copy + p, 1 + 2 * copy + q), 1 + p * 2 + q) = 1.0;
  const StarHom phi{a, c, map};
  ASSERT_TRUE(validate_star_hom(phi).passed());
  Rng rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix w = polar_unitary(rng.complex_matrix(5, 5));
    CMatrix conj(25, 5);
    for (Index k = 0; k < 5; ++k) conj.col(k) = flatten(w * c->to_matrix(map.col(k)) * w.adjoint());
    const StarHom psi{a, c, conj};
    const auto r = hom_unitary_equivalence(phi, psi);
    ASSERT_TRUE(r.unitary) << r.obstruction << " " << r.defect;
    EXPECT_LT(r.defect, 1e-8);
  }
}

TEST(Representation, IntertwinerAndCharacter) {
  const auto a = group_algebra(cyclic_table(3));
  const Representation amb = Representation::ambient(a);
  EXPECT_TRUE(validate_representation(amb).passed());
  const CVector ch = character(amb);
  EXPECT_NEAR(std::abs(ch(0) - 3.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(ch(1)), 0.0, 1e-12);
  Rng rng(1);
  const CMatrix w = polar_unitary(rng.complex_matrix(3, 3));
  Representation other = amb;
  for (auto& m : other.images) m = w * m * w.adjoint();
  const auto u = unitary_intertwiner(amb, other);
  ASSERT_TRUE(u);
  for (Index k = 0; k < 3; ++k)
    EXPECT_LT(max_abs(CMatrix(*u * amb.images[k] * u->adjoint() - other.images[k])), 1e-9);
}
