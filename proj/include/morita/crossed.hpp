#pragma once

// Crossed products A x| G by finite groups, their bimodule analogues and the
// crossed-product functor. Haar measure is counting measure and the modular
// function is 1, so every integral over G is a finite sum.
//
// Coordinates of A x| G are group-major: index s * dim(A) + k is a_k delta_s,
// i.e. i_A(a_k) i_G(s). The tuple (f(s))_s of an element is its function view.

#include <memory>
#include <vector>

#include "morita/dynamics.hpp"

namespace morita {

class CrossedProductAlgebra;
using CrossedPtr = std::shared_ptr<const CrossedProductAlgebra>;

/// Realized on H_A (x) l^2(G) by the regular representation of the ambient
/// representation of A: block (t, u) of f is pi(alpha_{t^-1}(f(t u^-1))).
class CrossedProductAlgebra final : public Algebra {
 public:
  static CrossedPtr create(const GroupAction& alpha);

  CVector multiply(const CVector& x, const CVector& y) const override;
  CVector star(const CVector& x) const override;
  Index ambient_dim() const override { return base_->ambient_dim() * group_->order; }
  CMatrix to_matrix(const CVector& x) const override;
  CVector to_coords(const CMatrix& m) const override;
  CVector trace_functional() const override;
  bool equals(const Algebra& other) const override;

  const GroupAction& action() const { return alpha_; }
  const AlgebraPtr& base() const { return base_; }
  const FiniteGroup& group() const { return *group_; }
  Index base_dim() const { return base_->dim(); }
  Index coord(int s, Index k) const { return s * base_->dim() + k; }

  std::vector<CVector> function_view(const CVector& x) const;
  CVector from_function(const std::vector<CVector>& f) const;
  /// a -> a delta_e.
  StarHom i_a() const;
  /// Coordinates of delta_s.
  CVector i_g(int s) const;
  /// The regular covariant pair (pi~, lambda) on H_A (x) l^2(G); its
  /// integrated form is to_matrix.
  Representation regular_pi() const;
  std::vector<CMatrix> regular_u() const;

  struct PassKey {};
  CrossedProductAlgebra(PassKey, GroupAction alpha);

 private:
  GroupAction alpha_;
  AlgebraPtr base_;
  GroupPtr group_;
};

/// Validates the action first; throws MoritaError("ActionInvalid").
CrossedPtr crossed_product(const GroupAction& alpha, const Tolerance& tol = {},
                           std::uint64_t seed = kStructureSeed);

/// Covariance of (i_A, i_G), product and involution of the function view
/// against the concrete matrices, spanning and dimension.
CheckReport validate_crossed_product(const CrossedProductAlgebra& cp, const Tolerance& tol = {},
                                     std::uint64_t seed = kStructureSeed);

/// pi(alpha_s(a)) = U_s pi(a) U_s^*, each U_s unitary and s -> U_s a homomorphism.
double covariance_defect(const Representation& pi, const std::vector<CMatrix>& u,
                         const GroupAction& alpha);

/// pi x U on the basis: a_k delta_s -> pi(a_k) U_s. Throws
/// MoritaError("NotCovariant").
Representation integrate_covariant(const CrossedPtr& cp, const Representation& pi,
                                   const std::vector<CMatrix>& u, const Tolerance& tol = {});

// ---- bimodules ------------------------------------------------------------------

/// X x| G over (A x| G) - (B x| G) on tuples (x_s), index s * dim(X) + i:
///   (f.h)(s)  = sum_t f(t) . gamma_t(h(t^-1 s))
///   (h.g)(s)  = sum_t h(t) . beta_t(g(t^-1 s))
///   <h, k>(s) = sum_t beta_{t^-1}(<h(t), k(ts)>)
struct CrossedBimodule {
  EquivariantBimodule base;
  CrossedPtr left;
  CrossedPtr right;
  BimodulePtr carrier;
};

/// Throws MoritaError("ActionInvalid").
CrossedBimodule bimodule_crossed_product(const EquivariantBimodule& x, const Tolerance& tol = {},
                                         std::uint64_t seed = kStructureSeed);
/// Same, over crossed products already built for the two actions.
CrossedBimodule bimodule_crossed_product(const EquivariantBimodule& x, const CrossedPtr& left,
                                         const CrossedPtr& right);

/// <omega_{k,eta}, omega_{h,xi}> = <eta, (pi x U)(<k, h>) xi> with
/// omega_{h,xi} = sum_s h(s) (x) U_s xi, computed in X (x)_B H for the
/// regular covariant pair of the right crossed product; random h, k, xi, eta.
CheckReport check_pairing_identity(const CrossedBimodule& x, const Tolerance& tol = {},
                                   std::uint64_t seed = kStructureSeed);

/// phi x G: a delta_s -> phi(a) delta_s. Throws MoritaError("NotEquivariant").
StarHom hom_crossed_product(const StarHom& phi, const CrossedPtr& source, const CrossedPtr& target,
                            const Tolerance& tol = {});

/// f x G for an equivariant bimodule map f: X -> Y.
BimoduleMap crossed_map(const BimoduleMap& f, const CrossedBimodule& src, const CrossedBimodule& dst);

/// Psi: (X x| G) (x) (Y x| G) -> (X (x) Y) x| G,
/// Psi(h (x) k)(s) = sum_t h(t) (x) eta_t(k(t^-1 s)).
struct FunctorComposition {
  CrossedBimodule x, y, xy;  // xy is the crossed product of the equivariant tensor
  TensorProduct crossed_tensor;  // (X x| G) (x) (Y x| G)
  TensorProduct base_tensor;     // X (x) Y
  BimoduleMap psi;
};

FunctorComposition functor_composition(const EquivariantBimodule& x, const EquivariantBimodule& y,
                                       const Tolerance& tol = {});
FunctorComposition functor_composition(const CrossedBimodule& x, const CrossedBimodule& y,
                                       const Tolerance& tol = {});

/// Identity goes to identity and Psi is an isomorphism, for every consecutive
/// composable pair of the list; each item's crossed product is validated.
CheckReport check_functor(const std::vector<EquivariantBimodule>& items, const Tolerance& tol = {},
                          std::uint64_t seed = kStructureSeed);

}  // namespace morita
