#pragma once

// Finite groups given by multiplication tables, actions on algebras,
// equivariant bimodules and the functor A -> A (x) C(G/H).

#include <memory>
#include <string>
#include <vector>

#include "morita/bimodule.hpp"

namespace morita {

struct FiniteGroup {
  std::string name;
  int order = 0;
  std::vector<std::vector<int>> mult;
  int identity = 0;
  std::vector<int> inverse;

  int operator()(int a, int b) const { return mult[a][b]; }
  bool abelian() const;

  /// Validates the table; throws MoritaError("BadTable").
  static FiniteGroup from_table(std::vector<std::vector<int>> table, std::string name = "G");
  static FiniteGroup cyclic(int n);
  /// Symmetries of the n-gon, order 2n: r^k is k, r^k f is n + k.
  static FiniteGroup dihedral(int n);
  /// Permutations of {0..n-1} in lexicographic order, composed as functions.
  static FiniteGroup symmetric(int n);
};

using GroupPtr = std::shared_ptr<const FiniteGroup>;

/// "cyclic(n)", "dihedral(n)" or "symmetric(n)". Throws MoritaError("BadTable").
GroupPtr make_group(const std::string& spec);
GroupPtr share(FiniteGroup g);

struct Subgroup {
  GroupPtr parent;
  std::vector<int> elements;  // sorted parent indices; local index = position
  std::vector<int> local;     // parent index -> local index, or -1
  GroupPtr group;             // the subgroup with its own table
  /// Left cosets tH: transversal[c] is the least element of coset c, cosets
  /// ordered by that element; coset_of[t] is the coset containing t.
  std::vector<int> transversal;
  std::vector<int> coset_of;

  bool contains(int g) const { return local[g] >= 0; }
  int index() const { return static_cast<int>(transversal.size()); }
  /// Coset of s t_c.
  int act(int s, int c) const { return coset_of[(*parent)(s, transversal[c])]; }
};

/// Throws MoritaError("BadSubgroup").
Subgroup make_subgroup(const GroupPtr& g, std::vector<int> elements);
Subgroup whole_group(const GroupPtr& g);
Subgroup trivial_subgroup(const GroupPtr& g);
/// Every subgroup, found by closing subsets generated by at most two elements.
std::vector<Subgroup> all_subgroups(const GroupPtr& g);

struct GroupAction {
  AlgebraPtr algebra;
  GroupPtr group;
  std::vector<StarHom> maps;  // alpha_s, indexed by group element

  const StarHom& operator[](int s) const { return maps[static_cast<std::size_t>(s)]; }
};

GroupAction trivial_action(const AlgebraPtr& a, const GroupPtr& g);
/// Per group element a coordinate map of the algebra; no checks.
GroupAction make_action(const AlgebraPtr& a, const GroupPtr& g, std::vector<CMatrix> maps);
/// alpha_e = id, alpha_s alpha_t = alpha_st, each alpha_s a *-automorphism.
CheckReport validate_action(const GroupAction& alpha, const Tolerance& tol = {},
                            std::uint64_t seed = kStructureSeed);
/// The maps of the subgroup elements, indexed locally.
GroupAction restrict(const GroupAction& alpha, const Subgroup& h);

/// phi alpha_s = beta_s phi for all s.
double equivariance_defect(const StarHom& phi, const GroupAction& alpha, const GroupAction& beta);

struct EquivariantBimodule {
  BimodulePtr carrier;
  GroupAction alpha;  // on the left algebra
  GroupAction beta;   // on the right algebra
  std::vector<CMatrix> gamma;

  const GroupPtr& group() const { return alpha.group; }
};

/// gamma_s(a.x) = alpha_s(a).gamma_s(x), gamma_s(x.b) = gamma_s(x).beta_s(b),
/// <gamma_s x, gamma_s y> = beta_s<x, y>, and s -> gamma_s a homomorphism.
CheckReport validate_equivariant(const EquivariantBimodule& x, const Tolerance& tol = {},
                                 std::uint64_t seed = kStructureSeed);

EquivariantBimodule trivially_equivariant(const BimodulePtr& x, const GroupPtr& g);
/// The identity bimodule of B with gamma = beta.
EquivariantBimodule equivariant_identity(const GroupAction& beta);
/// C_phi with gamma = epsilon on the carrier C. Throws MoritaError("NotEquivariant").
EquivariantBimodule equivariant_from_hom(const StarHom& phi, const GroupAction& alpha,
                                         const GroupAction& epsilon, const Tolerance& tol = {});
EquivariantBimodule restrict(const EquivariantBimodule& x, const Subgroup& h);

struct EquivariantTensor {
  TensorProduct product;
  EquivariantBimodule result;
};

/// (X (x) Y, gamma (x) eta). Throws MoritaError("MiddleMismatch").
EquivariantTensor equivariant_tensor(const EquivariantBimodule& x, const EquivariantBimodule& y,
                                     const Tolerance& tol = {});

/// A bimodule isomorphism that also intertwines the group actions.
CheckReport validate_equivariant_map(const BimoduleMap& f, const EquivariantBimodule& src,
                                     const EquivariantBimodule& dst, const Tolerance& tol = {},
                                     std::uint64_t seed = kStructureSeed);

/// An equivariant isomorphism X -> Y, if one exists: a generic element of the
/// space of equivariant bimodule maps, made unitary by its polar part.
IsomorphismSearch find_equivariant_isomorphism(const EquivariantBimodule& x,
                                               const EquivariantBimodule& y,
                                               const Tolerance& tol = {},
                                               std::uint64_t seed = kStructureSeed);

struct EquivariantFactorization {
  Factorization factorization;
  GroupAction epsilon;              // on C = K(X)
  EquivariantBimodule hom_module;   // (C_phi, epsilon)
  EquivariantBimodule imprimitivity;  // (Y, gamma)
  EquivariantTensor composite;
  CheckReport report;
};

/// C = K(X_B) with epsilon_s(T) = gamma_s T gamma_s^{-1}; checks that phi is
/// alpha-epsilon equivariant and that the factorization isomorphism is
/// equivariant.
EquivariantFactorization equivariant_factor(const EquivariantBimodule& x, const Tolerance& tol = {},
                                            std::uint64_t seed = kStructureSeed);

/// Invertibility in the equivariant category: X imprimitive and
/// alpha_s(A<x, y>) = A<gamma_s x, gamma_s y>. Returns the reverse with its
/// conjugated action when both hold.
struct EquivariantImprimitivity {
  bool flag = false;
  Imprimitivity imprimitivity;
  std::optional<EquivariantBimodule> reverse;
  CheckReport report;
};

EquivariantImprimitivity equivariant_imprimitivity(const EquivariantBimodule& x,
                                                   const Tolerance& tol = {},
                                                   std::uint64_t seed = kStructureSeed);

// ---- A (x) C(G/H) ---------------------------------------------------------------

/// n copies of an algebra with componentwise operations; coordinates are
/// copy-major.
class DirectSumAlgebra final : public Algebra {
 public:
  static std::shared_ptr<const DirectSumAlgebra> create(const AlgebraPtr& base, Index copies);

  CVector multiply(const CVector& x, const CVector& y) const override;
  CVector star(const CVector& x) const override;
  Index ambient_dim() const override { return base_->ambient_dim() * copies_; }
  CMatrix to_matrix(const CVector& x) const override;
  CVector to_coords(const CMatrix& m) const override;
  CVector trace_functional() const override;
  bool equals(const Algebra& other) const override;

  const AlgebraPtr& base() const { return base_; }
  Index copies() const { return copies_; }

  struct PassKey {};
  DirectSumAlgebra(PassKey, AlgebraPtr base, Index copies);

 private:
  AlgebraPtr base_;
  Index copies_;
};

struct FunctionAmplification {
  std::shared_ptr<const DirectSumAlgebra> algebra;  // functions G/H -> A
  GroupAction action;                               // alpha (x) tau
  Subgroup subgroup;
  /// a -> a (x) 1.
  StarHom diagonal;
  /// c -> 1_A (x) c, for c in C(G/H) with coordinates per coset.
  CMatrix scalar_functions;  // algebra.dim x index
};

/// (A (x) C(G/H), alpha (x) tau) with (alpha (x) tau)_s(F)(tH) = alpha_s(F(s^{-1}tH)).
FunctionAmplification tensor_with_functions(const GroupAction& alpha, const Subgroup& h);

/// (X (x) C(G/H), gamma (x) tau) over the amplified algebras.
EquivariantBimodule tensor_with_functions(const EquivariantBimodule& x, const Subgroup& h,
                                          const FunctionAmplification& left,
                                          const FunctionAmplification& right);

/// phi (x) id: A (x) C(G/H) -> C (x) C(G/H).
StarHom tensor_with_functions(const StarHom& phi, const FunctionAmplification& left,
                              const FunctionAmplification& right);

}  // namespace morita
