#pragma once

// Bimodules as morphisms: [X]: A -> B for a right-Hilbert A-B bimodule X,
// composed by the balanced tensor product.

#include "morita/bimodule.hpp"

namespace morita {

struct Morphism {
  AlgebraPtr source;
  AlgebraPtr target;
  BimodulePtr carrier;
};

/// Validates the carrier; throws MoritaError("InvalidBimodule").
Morphism make_morphism(const BimodulePtr& carrier, const Tolerance& tol = {});
Morphism identity_morphism(const AlgebraPtr& a);
Morphism hom_morphism(const StarHom& phi, const Tolerance& tol = {});

/// [X]: A -> B followed by [Y]: B -> C is [X (x)_B Y]. Throws
/// MoritaError("MiddleMismatch").
Morphism compose(const Morphism& f, const Morphism& g, const Tolerance& tol = {});

struct Equality {
  bool flag = false;
  std::optional<BimoduleMap> witness;
  std::string obstruction;
  double defect = 0.0;
};

Equality equal(const Morphism& f, const Morphism& g, const Tolerance& tol = {},
               std::uint64_t seed = kStructureSeed);

bool is_isomorphism(const Morphism& f, const Tolerance& tol = {});

/// [reverse of X] when X is an imprimitivity bimodule.
std::optional<Morphism> inverse(const Morphism& f, const Tolerance& tol = {});

/// Unit laws and associativity for a composable triple, each decided by an
/// explicit isomorphism (unitors, associator) and cross-checked by search.
CheckReport check_category_laws(const Morphism& f, const Morphism& g, const Morphism& h,
                                const Tolerance& tol = {}, std::uint64_t seed = kStructureSeed);

/// Both directions of the invertibility criterion: an imprimitivity carrier
/// has a two-sided inverse, and a carrier that is not imprimitive has none
/// (the composite with any candidate differs from the identity by an
/// invariant).
CheckReport check_invertibility(const Morphism& f, const Tolerance& tol = {},
                                std::uint64_t seed = kStructureSeed);

}  // namespace morita
