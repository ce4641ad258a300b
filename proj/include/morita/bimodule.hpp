#pragma once

// Right-Hilbert bimodules: a left A-action, a right B-action and a B-valued
// inner product on C^d, stored as matrices.
//
//   left_action[k]  : x -> a_k . x
//   right_action[m] : x -> x . b_m
//   inner[m]        : <x, y>_B = sum_m (x^* inner[m] y) b_m

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "morita/algebra.hpp"

namespace morita {

struct RightHilbertBimodule;
using BimodulePtr = std::shared_ptr<const RightHilbertBimodule>;

struct RightHilbertBimodule {
  AlgebraPtr left;
  AlgebraPtr right;
  Index dim = 0;
  std::vector<CMatrix> left_action;
  std::vector<CMatrix> right_action;
  std::vector<CMatrix> inner;
  std::string name;

  CMatrix act_left(const CVector& a) const;
  CMatrix act_right(const CVector& b) const;
  CVector inner_product(const CVector& x, const CVector& y) const;
  /// sum_m t_m inner[m]; with t a faithful positive functional this is the
  /// scalarized Gram matrix.
  CMatrix scalar_gram(const CVector& t) const;
};

/// Shape checks only; throws MoritaError("ShapeMismatch").
BimodulePtr make_bimodule(AlgebraPtr left, AlgebraPtr right, std::vector<CMatrix> left_action,
                          std::vector<CMatrix> right_action, std::vector<CMatrix> inner,
                          std::string name = {});

/// Every axiom with its defect: module laws, compatibility of the actions,
/// B-linearity and symmetry of the inner product, the adjoint relation,
/// positivity, definiteness and fullness. Exhaustive over basis elements for
/// small data, otherwise on random combinations drawn from `seed`.
CheckReport validate_bimodule(const RightHilbertBimodule& x, const Tolerance& tol = {},
                              std::uint64_t seed = kStructureSeed);

BimodulePtr identity_bimodule(const AlgebraPtr& b);
/// C as an A-C bimodule with a . c = phi(a) c. Throws MoritaError("InvalidHom").
BimodulePtr bimodule_from_hom(const StarHom& phi, const Tolerance& tol = {});
/// C^n as an M_n - C bimodule (the column module).
BimodulePtr column_module(Index n);
/// The same space and right structure with the left action pulled back along
/// psi: E -> (left algebra of z).
BimodulePtr pullback_left(const BimodulePtr& z, const StarHom& psi);

struct BimoduleMap {
  BimodulePtr source;
  BimodulePtr target;
  CMatrix map;  // target.dim x source.dim

  static BimoduleMap identity(const BimodulePtr& x);
  BimoduleMap after(const BimoduleMap& first) const;
  BimoduleMap inverse() const;
};

/// Bijective, left-linear, right-linear and inner-product preserving.
CheckReport validate_isomorphism(const BimoduleMap& f, const Tolerance& tol = {},
                                 std::uint64_t seed = kStructureSeed);

// ---- balanced tensor product --------------------------------------------

/// X (x)_B Y as a quotient of C^{dx} (x) C^{dy} (row-major, x index major).
/// `quotient` has orthonormal columns spanning the complement of the null
/// space; quotient coordinates of an elementary vector v are quotient^* v.
struct TensorProduct {
  BimodulePtr first;
  BimodulePtr second;
  BimodulePtr result;
  CMatrix quotient;
};

TensorProduct tensor_product(const BimodulePtr& x, const BimodulePtr& y, const Tolerance& tol = {});
BimodulePtr tensor(const BimodulePtr& x, const BimodulePtr& y, const Tolerance& tol = {});

/// f (x) g : X (x) Y -> X' (x) Y'.
BimoduleMap tensor_map(const TensorProduct& src, const TensorProduct& dst, const BimoduleMap& f,
                       const BimoduleMap& g);
/// (X (x) Y) (x) Z -> X (x) (Y (x) Z), x (x) y (x) z -> x (x) (y (x) z).
BimoduleMap associator(const TensorProduct& xy, const TensorProduct& xy_z, const TensorProduct& yz,
                       const TensorProduct& x_yz);
/// A linear map defined on elementary tensors (target.dim x dx*dy) pushed
/// down to the quotient.
BimoduleMap descend(const TensorProduct& src, const BimodulePtr& target, const CMatrix& elementary);
/// c (x) z -> c . z from C_psi (x) Z onto Z with the left action pulled back
/// along psi. `c_psi` must be bimodule_from_hom(psi).
BimoduleMap left_unitor(const TensorProduct& c_psi_z, const StarHom& psi);
/// x (x) b -> x . b from X (x) B onto X.
BimoduleMap right_unitor(const TensorProduct& x_b);

// Helpers acting on row-major flattened d1 x d2 arrays, column by column.
/// (A (x) I_{d2}) V
CMatrix apply_first_factor(const CMatrix& a, const CMatrix& v, Index d2);
/// (I_{d1} (x) B) V
CMatrix apply_second_factor(const CMatrix& b, const CMatrix& v, Index d1);

// ---- standard form, compacts, isomorphism search ------------------------

/// X = sum_j C^{k_j} (x) (row module of M_{n_j}), over the right algebra's
/// blocks. The basis vector (j, i, q) is w^{(j)}_i . e^{(j)}_{1q}.
struct StandardForm {
  std::vector<Index> block_sizes;     // n_j of the right algebra
  std::vector<Index> multiplicities;  // k_j
  std::vector<CMatrix> generators;    // per block: d x k_j, the w^{(j)}_i
  CMatrix basis;                      // d x d, columns (j, i, q)
  CMatrix basis_inverse;
  /// kappa-hat: left algebra -> sum_j M_{k_j} (blocks with k_j > 0).
  std::shared_ptr<const MatrixAlgebra> compact_canonical;
  StarHom kappa;
  /// table[i][j]: multiplicity of the i-th block of A inside M_{k_j}.
  std::vector<std::vector<Index>> table;
  /// Per block, the functional picking the e^{(j)}_{11} coefficient.
  std::vector<CVector> corner_functionals;

  Index compact_dim() const;
};

StandardForm standard_form(const RightHilbertBimodule& x, const Tolerance& tol = {});

struct IsomorphismSearch {
  std::optional<BimoduleMap> map;
  double defect = 0.0;
  std::string obstruction;
  explicit operator bool() const { return map.has_value(); }
};

/// Constructive decision of X = Y: an explicit isomorphism, or the invariant
/// that differs.
IsomorphismSearch find_isomorphism(const BimodulePtr& x, const BimodulePtr& y,
                                   const Tolerance& tol = {}, std::uint64_t seed = kStructureSeed);

struct CompactOperators {
  std::shared_ptr<const MatrixAlgebra> algebra;  // span of Theta_{x,y}, acting on C^d
  StarHom kappa;                                 // left algebra -> algebra
  StandardForm form;
  /// Coordinates of Theta_{x,y} in `algebra`.
  CVector theta(const CVector& x, const CVector& y) const;
  /// The operator Theta_{x,y} as a d x d matrix.
  CMatrix theta_matrix(const CVector& x, const CVector& y) const;
  const RightHilbertBimodule* module = nullptr;
  BimodulePtr owner;
};

CompactOperators compact_operators(const BimodulePtr& x, const Tolerance& tol = {});

struct Imprimitivity {
  bool flag = false;
  std::string reason;
  /// Coordinate k of A<e_i, e_j> is left_inner[k](i, j); the form is linear
  /// in the first slot and conjugate-linear in the second.
  std::vector<CMatrix> left_inner;
  BimodulePtr reverse;
  CheckReport report;
};

Imprimitivity is_imprimitivity(const BimodulePtr& x, const Tolerance& tol = {},
                               std::uint64_t seed = kStructureSeed);

struct Factorization {
  std::shared_ptr<const MatrixAlgebra> algebra;  // C = K(X_B)
  StarHom phi;                                   // A -> C
  BimodulePtr hom_module;                        // C_phi
  BimodulePtr imprimitivity;                     // Y: C - B
  TensorProduct composite;                       // C_phi (x) Y
  BimoduleMap iso;                               // composite -> X
  CheckReport report;
};

Factorization factor_morphism(const BimodulePtr& x, const Tolerance& tol = {},
                              std::uint64_t seed = kStructureSeed);

// ---- representations ------------------------------------------------------

struct BimoduleRepresentation {
  BimodulePtr module;
  Representation pi_a;
  Representation pi_b;
  std::vector<CMatrix> pi_x;  // per basis vector of X: H_B -> H_A
  /// Orthonormalized quotient data: H_A coordinates of x (x) xi are
  /// embed^* (x (x) xi).
  CMatrix embed;
};

/// Rieffel induction: H_A = X (x)_B H_B with its inner product made standard.
BimoduleRepresentation induce_representation(const BimodulePtr& x, const Representation& pi_b,
                                             const Tolerance& tol = {});

/// Conditions (i)-(iii) of a bimodule representation, and, when pi_B is
/// faithful, equality of the represented compacts with span pi_X(X) pi_X(X)^*.
CheckReport validate_bimodule_representation(const BimoduleRepresentation& r,
                                             const Tolerance& tol = {},
                                             std::uint64_t seed = kStructureSeed);

// ---- linking algebra and corners ------------------------------------------

struct LinkingAlgebra {
  BimodulePtr base;
  std::shared_ptr<const MatrixAlgebra> algebra;
  CVector p, q;
  // Coordinate offsets of the four blocks (a, x, x~, b).
  Index a_offset = 0, x_offset = 0, xt_offset = 0, b_offset = 0;
  BimoduleRepresentation rep;

  StarHom embed_left() const;   // A -> L
  StarHom embed_right() const;  // B -> L
  /// Coordinates of x (resp. x~) in L.
  CVector embed_module(const CVector& x) const;
  CVector embed_reverse(const CVector& x) const;
};

LinkingAlgebra linking_algebra(const BimodulePtr& x, const Tolerance& tol = {},
                               std::uint64_t seed = kStructureSeed);

/// L(X) = K((X + B)_B): X + B as an L(X) - B bimodule.
BimodulePtr linking_module(const LinkingAlgebra& l);

/// P Z Q as a bimodule over sub-algebras E' -> E and F' -> F identified with
/// the corners P E P and Q F Q by injective homomorphisms.
struct Corner {
  BimodulePtr module;
  CMatrix embed;  // Z.dim x corner dim, orthonormal columns spanning P Z Q
  double inner_defect = 0.0;  // distance of corner inner products from iota_F(F')
};

Corner corner_along(const BimodulePtr& z, const StarHom& iota_e, const StarHom& iota_f,
                    const CVector& p, const CVector& q, const Tolerance& tol = {});

/// P Z Q over the corner algebras P E P and Q F Q realized as spans of
/// ambient matrices. Throws MoritaError("NotFull") if P or Q is not full.
Corner corner(const BimodulePtr& z, const CVector& p, const CVector& q, const Tolerance& tol = {});

}  // namespace morita
