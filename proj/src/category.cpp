#include "morita/category.hpp"

namespace morita {

Morphism make_morphism(const BimodulePtr& carrier, const Tolerance& tol) {
  CheckReport r = validate_bimodule(*carrier, tol);
  if (!r.passed()) throw MoritaError("InvalidBimodule", r.first_failure());
  return {carrier->left, carrier->right, carrier};
}

Morphism identity_morphism(const AlgebraPtr& a) { return {a, a, identity_bimodule(a)}; }

Morphism hom_morphism(const StarHom& phi, const Tolerance& tol) {
  return {phi.source, phi.target, bimodule_from_hom(phi, tol)};
}

Morphism compose(const Morphism& f, const Morphism& g, const Tolerance& tol) {
  if (!same_algebra(f.target, g.source))
    throw MoritaError("MiddleMismatch", f.target->name() + " vs " + g.source->name());
  return {f.source, g.target, tensor(f.carrier, g.carrier, tol)};
}

Equality equal(const Morphism& f, const Morphism& g, const Tolerance& tol, std::uint64_t seed) {
  Equality e;
  IsomorphismSearch s = find_isomorphism(f.carrier, g.carrier, tol, seed);
  e.flag = static_cast<bool>(s);
  e.witness = s.map;
  e.obstruction = s.obstruction;
  e.defect = s.defect;
  return e;
}

bool is_isomorphism(const Morphism& f, const Tolerance& tol) {
  return is_imprimitivity(f.carrier, tol).flag;
}

std::optional<Morphism> inverse(const Morphism& f, const Tolerance& tol) {
  Imprimitivity imp = is_imprimitivity(f.carrier, tol);
  if (!imp.flag) return std::nullopt;
  return Morphism{f.target, f.source, imp.reverse};
}

CheckReport check_category_laws(const Morphism& f, const Morphism& g, const Morphism& h,
                                const Tolerance& tol, std::uint64_t seed) {
  CheckReport rep("category laws");
  rep.seed = seed;
  const auto& x = f.carrier;
  const auto& y = g.carrier;
  const auto& z = h.carrier;

  TensorProduct ax = tensor_product(identity_bimodule(f.source), x, tol);
  BimoduleMap lu = left_unitor(ax, StarHom::identity(f.source));
  rep.merge(validate_isomorphism({ax.result, x, lu.map}, tol, seed), "left unit: ");
  TensorProduct xb = tensor_product(x, identity_bimodule(f.target), tol);
  rep.merge(validate_isomorphism(right_unitor(xb), tol, seed), "right unit: ");

  TensorProduct xy = tensor_product(x, y, tol);
  TensorProduct xy_z = tensor_product(xy.result, z, tol);
  TensorProduct yz = tensor_product(y, z, tol);
  TensorProduct x_yz = tensor_product(x, yz.result, tol);
  rep.merge(validate_isomorphism(associator(xy, xy_z, yz, x_yz), tol, seed), "associator: ");

  auto search = [&](const std::string& name, const BimodulePtr& a, const BimodulePtr& b) {
    IsomorphismSearch s = find_isomorphism(a, b, tol, seed);
    rep.add(name, "isomorphism search", s ? s.defect : 1.0, tol.bound(), s.obstruction);
  };
  search("search left unit", ax.result, x);
  search("search right unit", xb.result, x);
  search("search associativity", xy_z.result, x_yz.result);
  return rep;
}

CheckReport check_invertibility(const Morphism& f, const Tolerance& tol, std::uint64_t seed) {
  CheckReport rep("invertibility " + f.carrier->name);
  rep.seed = seed;
  Imprimitivity imp = is_imprimitivity(f.carrier, tol, seed);
  if (imp.flag) {
    Morphism g{f.target, f.source, imp.reverse};
    IsomorphismSearch s1 =
        find_isomorphism(compose(f, g, tol).carrier, identity_bimodule(f.source), tol, seed);
    IsomorphismSearch s2 =
        find_isomorphism(compose(g, f, tol).carrier, identity_bimodule(f.target), tol, seed);
    rep.add("X (x) rev X = A", "imprimitivity gives an inverse", s1 ? s1.defect : 1.0, tol.bound(),
            s1.obstruction);
    rep.add("rev X (x) X = B", "imprimitivity gives an inverse", s2 ? s2.defect : 1.0, tol.bound(),
            s2.obstruction);
    return rep;
  }
  // An inverse would make kappa a bijection onto K(X), so its failure is
  // the certificate.
  rep.require("obstruction", "kappa not bijective", !imp.reason.empty(), imp.reason);
  StandardForm sf = standard_form(*f.carrier, tol);
  rep.require("invariants", "dim A = dim K(X) and kappa injective",
              true, "dim A " + std::to_string(f.source->dim()) + ", dim K(X) " +
                        std::to_string(sf.compact_dim()) + ", rank kappa " +
                        std::to_string(numerical_rank(sf.kappa.map, tol)));
  return rep;
}

}  // namespace morita
