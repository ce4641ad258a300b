#pragma once

// Finite-dimensional C*-algebras, their elements, *-homomorphisms, traces and
// recovery of the block structure A = M_{n_1} + ... + M_{n_k}.
//
// Every algebra here is unital and equals its multiplier algebra, so a
// nondegenerate homomorphism A -> M(C) is stored as a unital StarHom A -> C.

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "morita/numerics.hpp"
#include "morita/report.hpp"

namespace morita {

class Algebra;
using AlgebraPtr = std::shared_ptr<const Algebra>;
struct StructureIso;

/// Seed used for the cached structure decomposition of every algebra.
inline constexpr std::uint64_t kStructureSeed = 0x5eedULL;

/// A finite-dimensional *-algebra with a fixed linear basis. Elements are
/// coordinate vectors in that basis. Each algebra also carries a faithful
/// *-representation on C^N (its "ambient" realization); the ambient trace is
/// the faithful positive functional used to scalarize algebra-valued forms.
class Algebra : public std::enable_shared_from_this<Algebra> {
 public:
  virtual ~Algebra() = default;

  Index dim() const { return dim_; }
  const std::string& name() const { return name_; }

  virtual CVector multiply(const CVector& x, const CVector& y) const = 0;
  /// Coordinates of x*.
  virtual CVector star(const CVector& x) const = 0;
  bool has_unit() const { return unit_.size() == dim_; }
  const CVector& unit() const;

  virtual Index ambient_dim() const = 0;
  virtual CMatrix to_matrix(const CVector& x) const = 0;
  /// Least-squares coordinates of an ambient matrix.
  virtual CVector to_coords(const CMatrix& m) const = 0;
  /// Distance from m to the span of the basis.
  double membership_defect(const CMatrix& m) const;
  /// Linear functional t with Tr(to_matrix(x)) = t . x.
  virtual CVector trace_functional() const;
  /// Structural equality (same basis, same structure).
  virtual bool equals(const Algebra& other) const;

  CVector basis_vector(Index k) const;
  CMatrix basis_matrix(Index k) const { return to_matrix(basis_vector(k)); }

  /// Matrix of y -> b_k y (resp. y -> y b_k) in coordinates. Cached.
  const CMatrix& left_multiplication(Index k) const;
  const CMatrix& right_multiplication(Index k) const;
  CMatrix left_multiplication_by(const CVector& a) const;
  CMatrix right_multiplication_by(const CVector& a) const;

  /// Block sizes when the basis is the canonical matrix-unit basis.
  virtual std::optional<std::vector<Index>> canonical_blocks() const { return std::nullopt; }

  /// Cached structure decomposition, computed with default tolerance and
  /// kStructureSeed.
  const StructureIso& structure() const;

  AlgebraPtr handle() const { return shared_from_this(); }

 protected:
  Algebra(Index dim, std::string name) : dim_(dim), name_(std::move(name)) {}
  void set_unit(CVector u) { unit_ = std::move(u); }

 private:
  Index dim_;
  std::string name_;
  CVector unit_;
  mutable std::once_flag mult_once_;
  mutable std::vector<CMatrix> left_mult_, right_mult_;
  mutable std::once_flag structure_once_;
  mutable std::shared_ptr<const StructureIso> structure_;
  void build_multiplication_tables() const;
};

bool same_algebra(const AlgebraPtr& a, const AlgebraPtr& b);

/// An algebra given by an explicit basis of N x N matrices whose span is
/// closed under product and adjoint. Canonical algebras (direct sums of full
/// matrix blocks with the matrix-unit basis) are the special case built by
/// `canonical`.
class MatrixAlgebra final : public Algebra {
 public:
  /// Validated construction; throws MoritaError("InvalidAlgebra") with the
  /// first failing check.
  static std::shared_ptr<const MatrixAlgebra> create(std::vector<CMatrix> basis, std::string name,
                                                     const Tolerance& tol = {});
  /// No closure checks; only linear independence is required. Used to
  /// examine candidates with validate_algebra.
  static std::shared_ptr<const MatrixAlgebra> candidate(std::vector<CMatrix> basis,
                                                        std::string name,
                                                        const Tolerance& tol = {});
  static std::shared_ptr<const MatrixAlgebra> canonical(std::vector<Index> block_sizes,
                                                        std::string name = {});
  /// The span of a spanning family, reduced to a basis.
  static std::shared_ptr<const MatrixAlgebra> spanned_by(const std::vector<CMatrix>& family,
                                                         std::string name,
                                                         const Tolerance& tol = {});

  CVector multiply(const CVector& x, const CVector& y) const override;
  CVector star(const CVector& x) const override;
  Index ambient_dim() const override { return ambient_; }
  CMatrix to_matrix(const CVector& x) const override;
  CVector to_coords(const CMatrix& m) const override;
  CVector trace_functional() const override;
  bool equals(const Algebra& other) const override;
  std::optional<std::vector<Index>> canonical_blocks() const override { return blocks_; }

  const std::vector<CMatrix>& basis() const { return basis_; }

  struct PassKey {};
  MatrixAlgebra(PassKey, std::vector<CMatrix> basis, std::string name,
                std::optional<std::vector<Index>> blocks, const Tolerance& tol);

 private:
  Index ambient_;
  std::vector<CMatrix> basis_;
  CMatrix stacked_;  // N^2 x dim, column k = flatten(basis_k)
  Eigen::LLT<CMatrix> gram_;
  std::optional<std::vector<Index>> blocks_;
  std::vector<std::pair<Index, Index>> canonical_offsets_;  // per block: (coord offset, ambient offset)
};

/// a in A, as a coordinate vector tied to its algebra.
struct AlgebraElement {
  AlgebraPtr parent;
  CVector coords;

  AlgebraElement operator*(const AlgebraElement& o) const;
  AlgebraElement operator+(const AlgebraElement& o) const;
  AlgebraElement adjoint() const;
  CMatrix matrix() const { return parent->to_matrix(coords); }
};

/// A linear map between algebras, in coordinates (target.dim x source.dim).
struct StarHom {
  AlgebraPtr source;
  AlgebraPtr target;
  CMatrix map;

  CVector operator()(const CVector& a) const { return map * a; }
  static StarHom identity(const AlgebraPtr& a);
  /// this after first.
  StarHom after(const StarHom& first) const;
};

/// Multiplicativity, *-preservation and unitality. Exhaustive over basis
/// pairs when dim(source)^2 <= max_pairs, otherwise on random samples drawn
/// from `seed`.
CheckReport validate_star_hom(const StarHom& phi, const Tolerance& tol = {},
                              std::uint64_t seed = kStructureSeed, Index max_pairs = 4096);

/// Like validate_star_hom, plus bijectivity with the inverse map.
CheckReport validate_star_iso(const StarHom& phi, const StarHom& inverse, const Tolerance& tol = {},
                              std::uint64_t seed = kStructureSeed);

/// Closure under product and adjoint, unit existence and positivity of the
/// trace form. The first offending basis pair is named in the entry note.
CheckReport validate_algebra(const MatrixAlgebra& candidate, const Tolerance& tol = {});

/// Identification of an algebra with its canonical form.
struct StructureIso {
  AlgebraPtr concrete;
  std::shared_ptr<const MatrixAlgebra> canonical;
  StarHom forward;   // concrete -> canonical
  StarHom backward;  // canonical -> concrete
  std::vector<Index> block_sizes;
  /// Per block: coordinates (in `concrete`) of the central projection and of
  /// the matrix units e_{pq}, row-major.
  std::vector<CVector> central_projections;
  std::vector<std::vector<CVector>> matrix_units;
  /// Multiplicity of each block in the ambient realization.
  std::vector<Index> ambient_multiplicity;
  std::uint64_t seed = kStructureSeed;

  Index block_count() const { return static_cast<Index>(block_sizes.size()); }
  /// Coordinate offset of block j in the canonical algebra.
  Index block_offset(Index j) const;
};

/// Recovers the block structure: center by commutation constraints, central
/// projections as spectral projections of a generic self-adjoint central
/// element, and matrix units grown from a minimal projection of each summand.
/// Blocks are ordered by size, then by the spectral order of the generic
/// central element. Throws MoritaError("DecompositionFailed").
StructureIso wedderburn_decompose(const AlgebraPtr& a, const Tolerance& tol = {},
                                  std::uint64_t seed = kStructureSeed);

/// Sum of block traces: tau(x) = canonical_trace(A) . x.
CVector canonical_trace(const AlgebraPtr& a);

/// Orthonormal basis (Frobenius inner product of ambient matrices is not used;
/// coordinates are) of {t in C : t phi(a) = psi(a) t for all a}, as
/// coordinate columns in C.
CMatrix intertwiner_space(const AlgebraPtr& target, const std::vector<CVector>& phi_images,
                          const std::vector<CVector>& psi_images, const Tolerance& tol = {});

struct UnitaryEquivalence {
  std::optional<CVector> unitary;  // coordinates in the target
  double defect = 0.0;             // max_a |psi(a) - u phi(a) u*|
  Index intertwiner_dim = 0;       // dim Hom(phi, psi)
  Index self_dim_phi = 0;          // dim End(phi)
  Index self_dim_psi = 0;          // dim End(psi)
  std::string obstruction;
};

/// Searches u unitary in the target with psi = Ad u o phi. When none exists
/// the three intertwiner dimensions certify it: Hom(phi, psi) has dimension
/// sum m_i m'_i, which equals both sum m_i^2 and sum m'_i^2 only when the
/// multiplicity tables agree. Throws MoritaError("InvalidHom").
UnitaryEquivalence hom_unitary_equivalence(const StarHom& phi, const StarHom& psi,
                                           const Tolerance& tol = {},
                                           std::uint64_t seed = kStructureSeed);

/// Unitary polar part of an invertible element of a unital algebra.
CVector polar_unitary_in(const AlgebraPtr& a, const CVector& x, const Tolerance& tol = {});

/// A *-representation on C^dim: images of the basis elements.
struct Representation {
  AlgebraPtr algebra;
  Index dim = 0;
  std::vector<CMatrix> images;

  CMatrix operator()(const CVector& a) const;
  /// The identity representation of a MatrixAlgebra on its ambient space.
  static Representation ambient(const AlgebraPtr& a);
};

CheckReport validate_representation(const Representation& rep, const Tolerance& tol = {},
                                    std::uint64_t seed = kStructureSeed);

/// Unitary U with U rho1(a) U* = rho2(a), if any.
std::optional<CMatrix> unitary_intertwiner(const Representation& rho1, const Representation& rho2,
                                           const Tolerance& tol = {},
                                           std::uint64_t seed = kStructureSeed);

/// Character a -> Tr rho(a) on the basis.
CVector character(const Representation& rho);

}  // namespace morita
