#pragma once

// Green's bimodule X_H^G(A) = functions G -> A as an (A x| G) - (A x| H)
// right-Hilbert bimodule, induction through it, and the naturality squares
// of A -> [X_H^G(A)] checked by explicit isomorphisms.
//
// Tuple coordinates: index t * dim(A) + k is a_k placed at t.
//   (f.x)(t)     = sum_s f(s) alpha_s(x(s^-1 t))
//   (x.g)(t)     = sum_{h in H} x(th) alpha_{th}(g(h^-1))
//   <x, y>(h)    = sum_s alpha_s(x(s^-1)^* y(s^-1 h))
//   (c.x)(t)     = c(tH) x(t)
//   (F.x)(t)     = sum_s F(s)(tH) alpha_s(x(s^-1 t))  for F in (A (x) C(G/H)) x| G

#include <optional>

#include "morita/crossed.hpp"

namespace morita {

struct GreenBimodule {
  GroupAction alpha;
  Subgroup subgroup;
  CrossedPtr big;    // A x| G
  CrossedPtr small;  // A x| H
  FunctionAmplification amplified;  // A (x) C(G/H), alpha (x) tau
  CrossedPtr extended_algebra;      // (A (x) C(G/H)) x| G
  BimodulePtr carrier;              // A x| G - A x| H
  BimodulePtr extended;             // same space, left action of extended_algebra

  /// The operator x -> c.x for c in C(G/H), one coefficient per coset.
  CMatrix function_action(const CVector& c) const;
};

/// Throws MoritaError("ActionInvalid").
GreenBimodule green_bimodule(const GroupAction& alpha, const Subgroup& h, const Tolerance& tol = {},
                             std::uint64_t seed = kStructureSeed);
/// Over crossed products already built for alpha and its restriction to H.
GreenBimodule green_bimodule(const GroupAction& alpha, const Subgroup& h, const CrossedPtr& big,
                             const CrossedPtr& small);

/// Both carriers validate, the A x| G action factors through
/// (a -> a (x) 1) x G, the two covariance relations of the C(G/H) action,
/// and definiteness of the inner product.
CheckReport validate_green(const GreenBimodule& gb, const Tolerance& tol = {},
                           std::uint64_t seed = kStructureSeed);

/// Imprimitivity of the extended carrier over (A (x) C(G/H)) x| G - A x| H.
CheckReport check_green_imprimitivity(const GreenBimodule& gb, const Tolerance& tol = {},
                                      std::uint64_t seed = kStructureSeed);

/// Block sizes of K(X_B) for the carrier, e.g. {2} for C, Z/2, {e}.
std::vector<Index> compact_blocks(const GreenBimodule& gb, const Tolerance& tol = {});

/// Rieffel induction of rho (a representation of A x| H) to A x| G. Throws
/// MoritaError("InvalidRepresentation").
Representation induce(const GreenBimodule& gb, const Representation& rho, const Tolerance& tol = {});

// ---- the hom leg -----------------------------------------------------------------

struct HomNaturality {
  TensorProduct source;  // X_H^G(A) (x) (C x| H)_{phi x H}
  TensorProduct target;  // (C x| G)_{phi x G} (x) X_H^G(C)
  /// Psi(x (x) g)(t) = sum_{h in H} phi(x(th)) epsilon_{th}(g(h^-1)) on
  /// elementary tensors, with values in X_H^G(C).
  CMatrix elementary;
  BimoduleMap iso;  // source.result -> target.result
  CheckReport report;
};

/// Throws MoritaError("NotEquivariant").
HomNaturality hom_naturality_iso(const StarHom& phi, const GroupAction& alpha,
                                 const GroupAction& epsilon, const Subgroup& h,
                                 const Tolerance& tol = {}, std::uint64_t seed = kStructureSeed);
/// With the two hom bimodules given; their coordinates must be those of
/// C x| H and C x| G.
HomNaturality hom_naturality_iso(const GreenBimodule& xa, const GreenBimodule& xc,
                                 const StarHom& phi, const BimodulePtr& phi_h,
                                 const BimodulePtr& phi_g, const Tolerance& tol = {},
                                 std::uint64_t seed = kStructureSeed);

// ---- the linking technique -------------------------------------------------------

/// For an equivariant imprimitivity bimodule (Y, eta) over (C, epsilon) - (B, beta):
/// delta = (epsilon eta; eta~ beta) on L(Y), and L(Y x| G) = L(Y) x| G.
struct LinkingCrossed {
  LinkingAlgebra linking;        // L(Y)
  GroupAction delta;
  CrossedPtr crossed;            // L(Y) x| G
  CrossedBimodule y_crossed;     // Y x| G
  LinkingAlgebra crossed_linking;  // L(Y x| G)
  StarHom iso;                   // L(Y x| G) -> L(Y) x| G
  StarHom iso_inverse;
  CheckReport report;

  /// Y x| G coordinates -> L(Y) x| G coordinates, through iso.
  CVector module_image(const CVector& h) const;
  /// C x| G -> L(Y) x| G and B x| G -> L(Y) x| G, through iso.
  StarHom left_corner() const;
  StarHom right_corner() const;
};

/// Throws MoritaError("NotImprimitivity").
LinkingCrossed linking_crossed_iso(const EquivariantBimodule& y, const Tolerance& tol = {},
                                   std::uint64_t seed = kStructureSeed);
/// Reusing crossed products of the two coefficient actions.
LinkingCrossed linking_crossed_iso(const EquivariantBimodule& y, const CrossedPtr& left,
                                   const CrossedPtr& right, const Tolerance& tol = {},
                                   std::uint64_t seed = kStructureSeed);

/// (Y x| G) (x) X_H^G(B) = X_H^G(C) (x) (Y x| H) through the corner p Z q of
/// Z = X_H^G(L(Y)): Phi(h (x) x) = h.x and Psi(z (x) g) = z.g.
struct LinkingNaturality {
  LinkingCrossed g_side, h_side;
  GreenBimodule z;
  Corner corner;
  TensorProduct upper;  // (Y x| G) (x) X_H^G(B)
  TensorProduct lower;  // X_H^G(C) (x) (Y x| H)
  BimoduleMap phi;      // upper -> corner
  BimoduleMap psi;      // lower -> corner
  BimoduleMap iso;      // upper -> lower
  CheckReport report;
};

LinkingNaturality linking_naturality(const EquivariantBimodule& y, const Subgroup& h,
                                     const GreenBimodule& xc, const GreenBimodule& xb,
                                     const CrossedBimodule& y_g, const CrossedBimodule& y_h,
                                     const Tolerance& tol = {}, std::uint64_t seed = kStructureSeed);

// ---- the squares -----------------------------------------------------------------

enum class SquareVariant { Mor, Iso };

struct NaturalitySquare {
  EquivariantBimodule morphism;
  Subgroup subgroup;
  SquareVariant variant = SquareVariant::Mor;
  /// Corners: source and target over G (amplified for Iso) and over H.
  AlgebraPtr source_g, target_g, source_h, target_h;
  TensorProduct upper;  // [X x| G] then [X_H^G(B)]
  TensorProduct lower;  // [X_H^G(A)] then [X x| H]
  std::optional<BimoduleMap> witness;  // upper.result -> lower.result
  double defect = 0.0;
  IsomorphismSearch direct;
  CheckReport report;

  bool passed() const { return witness.has_value() && report.passed(); }
};

/// Factors the morphism, builds the hom leg and the linking leg, composes
/// them into one witness and validates it; cross-checked by find_isomorphism.
/// Throws MoritaError("FactorizationFailed") or
/// MoritaError("WitnessDefectExceeded").
NaturalitySquare check_naturality_square(const EquivariantBimodule& m, const Subgroup& h,
                                         SquareVariant variant, const Tolerance& tol = {},
                                         std::uint64_t seed = kStructureSeed);
/// The square of an equivariant homomorphism, through C_phi.
NaturalitySquare check_naturality_square(const StarHom& phi, const GroupAction& alpha,
                                         const GroupAction& epsilon, const Subgroup& h,
                                         SquareVariant variant, const Tolerance& tol = {},
                                         std::uint64_t seed = kStructureSeed);

/// (Y x| G)-Ind(Ind_H^G(rho x V)) and X_H^G(C)-Ind((Y x| H)-Ind(rho x V))
/// are unitarily equivalent; rho x V must be a representation of B x| H.
CheckReport check_induction_compatibility(const EquivariantBimodule& y, const Subgroup& h,
                                          const Representation& rho_v, const Tolerance& tol = {},
                                          std::uint64_t seed = kStructureSeed);

}  // namespace morita
