#pragma once

// Dense complex linear algebra kernel and the tolerance policy shared by every
// check in the library.

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace morita {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base of every error thrown by the library. `kind()` is a stable tag that
/// the CLI prints and tests match on.
class MoritaError : public std::runtime_error {
 public:
  MoritaError(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct Tolerance {
  double eps_abs = 1e-9;
  double eps_rel = 1e-8;

  Tolerance() = default;
  Tolerance(double abs, double rel);

  /// Threshold applied to a defect measured against data of magnitude `scale`.
  double bound(double scale = 1.0) const { return eps_abs + eps_rel * scale; }
  bool accepts(double defect, double scale = 1.0) const { return defect <= bound(scale); }
  /// Singular values (relative to the largest) below this are treated as zero
  /// when computing ranks and kernels.
  double rank_cutoff() const { return 1e3 * eps_abs; }
};

/// Seeded source for every "generic element" choice. Reports record the seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}
  double normal();
  Complex complex_normal();
  CVector complex_vector(Index n);
  RVector real_vector(Index n);
  CMatrix complex_matrix(Index rows, Index cols);
  std::size_t index(std::size_t bound);
  std::uint64_t seed() const { return seed_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

// ---- elementary helpers ---------------------------------------------------

CMatrix identity(Index n);
/// Largest absolute entry; the norm every defect in the library is reported in.
double max_abs(const CMatrix& m);
double max_abs(const CVector& v);
double hermitian_defect(const CMatrix& m);
double unitary_defect(const CMatrix& u);
double operator_norm(const CMatrix& m);
CMatrix kron(const CMatrix& a, const CMatrix& b);
/// Row-major flattening: entry (i, j) goes to i * cols + j.
CVector flatten(const CMatrix& m);
CMatrix unflatten(const CVector& v, Index rows, Index cols);
/// Direct sum of square blocks.
CMatrix block_diagonal(const std::vector<CMatrix>& blocks);

// ---- decompositions -------------------------------------------------------

struct EigenDecomposition {
  RVector values;   // ascending
  CMatrix vectors;  // unitary, columns are eigenvectors
};

/// Eigendecomposition of a Hermitian matrix: m = V diag(values) V*.
/// Throws MoritaError("NotHermitian") or ("NonConvergence").
EigenDecomposition hermitian_eigendecomposition(const CMatrix& m, const Tolerance& tol = {});

/// Unitary polar factor m (m* m)^{-1/2}. Throws MoritaError("Singular") when the
/// smallest singular value is at most eps_abs.
CMatrix polar_unitary(const CMatrix& m, const Tolerance& tol = {});

/// Positive square root and inverse square root of a positive definite matrix.
CMatrix psd_sqrt(const CMatrix& m);
CMatrix pd_inverse_sqrt(const CMatrix& m, const Tolerance& tol = {});

/// Orthonormal basis (columns) of the column space of m.
CMatrix range_basis(const CMatrix& m, const Tolerance& tol = {});
/// Orthonormal basis (columns) of the kernel of m.
CMatrix kernel_basis(const CMatrix& m, const Tolerance& tol = {});
Index numerical_rank(const CMatrix& m, const Tolerance& tol = {});
double smallest_singular_value(const CMatrix& m);

// ---- homogeneous linear problems over an unknown matrix -------------------

/// One term L * X * R of a linear constraint on an unknown matrix X.
struct SylvesterTerm {
  CMatrix left;
  CMatrix right;
  Complex coeff{1.0, 0.0};
};

/// A homogeneous linear constraint sum_t coeff_t * L_t X R_t = 0.
struct LinearConstraint {
  std::vector<SylvesterTerm> terms;

  /// X * a - b * X = 0.
  static LinearConstraint intertwines(const CMatrix& a, const CMatrix& b);
  /// The vacuous constraint X - X = 0.
  static LinearConstraint vacuous(Index rows, Index cols);
  CMatrix apply(const CMatrix& x) const;
  /// Matrix acting on the row-major flattening of X.
  CMatrix as_matrix(Index rows, Index cols) const;
};

/// Orthonormal basis (Frobenius inner product) of the joint kernel of the
/// constraints, each element an unknown of shape rows x cols.
std::vector<CMatrix> solve_linear_space(Index rows, Index cols,
                                        const std::vector<LinearConstraint>& constraints,
                                        const Tolerance& tol = {});

/// Kernel of a linear operator given as a matrix, restricted to the span of
/// `basis` (columns); returns an orthonormal basis of the solutions in the
/// ambient coordinates.
CMatrix restrict_kernel(const CMatrix& op, const CMatrix& basis, const Tolerance& tol = {});

/// Clusters sorted real values: groups consecutive values closer than
/// `merge_gap`; throws DecompositionFailed if some gap lies in the ambiguous
/// range [merge_gap, separation).
std::vector<std::vector<Index>> cluster_sorted(const RVector& values, double merge_gap,
                                               double separation);

}  // namespace morita
