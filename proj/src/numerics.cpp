#include "morita/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace morita {

Tolerance::Tolerance(double abs, double rel) : eps_abs(abs), eps_rel(rel) {
  if (!(abs > 0.0) || !(rel > 0.0)) {
    throw MoritaError("InvalidTolerance", "eps_abs and eps_rel must be strictly positive");
  }
}

double Rng::normal() {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re, im};
}

CVector Rng::complex_vector(Index n) {
  CVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = complex_normal();
  return v;
}

RVector Rng::real_vector(Index n) {
  RVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

CMatrix Rng::complex_matrix(Index rows, Index cols) {
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = complex_normal();
  return m;
}

std::size_t Rng::index(std::size_t bound) {
  std::uniform_int_distribution<std::size_t> dist(0, bound - 1);
  return dist(engine_);
}

CMatrix identity(Index n) { return CMatrix::Identity(n, n); }

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
double max_abs(const CVector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

double hermitian_defect(const CMatrix& m) { return max_abs(CMatrix(m - m.adjoint())); }

double unitary_defect(const CMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return std::max(max_abs(CMatrix(u * u.adjoint() - identity(u.rows()))),
                  max_abs(CMatrix(u.adjoint() * u - identity(u.rows()))));
}

double operator_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CVector flatten(const CMatrix& m) {
  CVector v(m.size());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

CMatrix unflatten(const CVector& v, Index rows, Index cols) {
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = v(i * cols + j);
  return m;
}

CMatrix block_diagonal(const std::vector<CMatrix>& blocks) {
  Index n = 0;
  for (const auto& b : blocks) n += b.rows();
  CMatrix out = CMatrix::Zero(n, n);
  Index at = 0;
  for (const auto& b : blocks) {
    out.block(at, at, b.rows(), b.cols()) = b;
    at += b.rows();
  }
  return out;
}

EigenDecomposition hermitian_eigendecomposition(const CMatrix& m, const Tolerance& tol) {
  if (m.rows() != m.cols()) throw MoritaError("NotHermitian", "matrix is not square");
  const double scale = std::max(1.0, max_abs(m));
  if (hermitian_defect(m) > tol.bound(scale)) {
    throw MoritaError("NotHermitian", "||m - m*|| exceeds tolerance");
  }
  const CMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw MoritaError("NonConvergence", "Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix polar_unitary(const CMatrix& m, const Tolerance& tol) {
  if (m.rows() != m.cols()) throw MoritaError("Singular", "polar part needs a square matrix");
  if (m.size() == 0) return m;
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  if (s(s.size() - 1) <= tol.eps_abs) {
    throw MoritaError("Singular", "smallest singular value " + std::to_string(s(s.size() - 1)) +
                                      " is below eps_abs");
  }
  // m = U S V*  =>  m (m*m)^{-1/2} = U V*.
  return svd.matrixU() * svd.matrixV().adjoint();
}

CMatrix psd_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (m + m.adjoint()));
  RVector vals = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * vals.cast<Complex>().asDiagonal() *
         solver.eigenvectors().adjoint();
}

CMatrix pd_inverse_sqrt(const CMatrix& m, const Tolerance& tol) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (m + m.adjoint()));
  const RVector& ev = solver.eigenvalues();
  if (ev.size() > 0 && ev(0) <= tol.eps_abs) {
    throw MoritaError("Singular", "matrix is not positive definite");
  }
  RVector vals = ev.cwiseSqrt().cwiseInverse();
  return solver.eigenvectors() * vals.cast<Complex>().asDiagonal() *
         solver.eigenvectors().adjoint();
}

namespace {

Index rank_from_singular_values(const RVector& s, const Tolerance& tol) {
  if (s.size() == 0) return 0;
  const double cutoff = tol.rank_cutoff() * std::max(1.0, s(0));
  Index r = 0;
  while (r < s.size() && s(r) > cutoff) ++r;
  return r;
}

}  // namespace

// BDCSVD in Eigen 3.4.0 occasionally returns inaccurate singular vectors, so
// tall inputs are first reduced by Householder QR and then handed to JacobiSVD.
CMatrix range_basis(const CMatrix& m, const Tolerance& tol) {
  if (m.size() == 0) return CMatrix(m.rows(), 0);
  if (m.cols() > m.rows()) {
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU);
    const Index r = rank_from_singular_values(svd.singularValues(), tol);
    return svd.matrixU().leftCols(r);
  }
  Eigen::HouseholderQR<CMatrix> qr(m);
  const CMatrix rmat = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<CMatrix> svd(rmat, Eigen::ComputeFullU);
  const Index r = rank_from_singular_values(svd.singularValues(), tol);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(m.rows(), m.cols());
  return q * svd.matrixU().leftCols(r);
}

CMatrix kernel_basis(const CMatrix& m, const Tolerance& tol) {
  const Index n = m.cols();
  if (n == 0) return CMatrix(0, 0);
  if (m.rows() == 0) return identity(n);
  CMatrix work;
  if (m.rows() > n) {
    Eigen::HouseholderQR<CMatrix> qr(m);
    work = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  } else {
    work = CMatrix::Zero(n, n);
    work.topRows(m.rows()) = m;
  }
  Eigen::JacobiSVD<CMatrix> svd(work, Eigen::ComputeFullV);
  const Index r = rank_from_singular_values(svd.singularValues(), tol);
  return svd.matrixV().rightCols(n - r);
}

Index numerical_rank(const CMatrix& m, const Tolerance& tol) {
  if (m.size() == 0) return 0;
  if (m.rows() > m.cols()) {
    Eigen::HouseholderQR<CMatrix> qr(m);
    const CMatrix rmat = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
    return rank_from_singular_values(Eigen::JacobiSVD<CMatrix>(rmat).singularValues(), tol);
  }
  return rank_from_singular_values(Eigen::JacobiSVD<CMatrix>(m).singularValues(), tol);
}

double smallest_singular_value(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

LinearConstraint LinearConstraint::intertwines(const CMatrix& a, const CMatrix& b) {
  // X is b.rows() x a.rows().
  LinearConstraint c;
  c.terms.push_back({identity(b.rows()), a, {1.0, 0.0}});
  c.terms.push_back({b, identity(a.rows()), {-1.0, 0.0}});
  return c;
}

LinearConstraint LinearConstraint::vacuous(Index rows, Index cols) {
  LinearConstraint c;
  c.terms.push_back({identity(rows), identity(cols), {1.0, 0.0}});
  c.terms.push_back({identity(rows), identity(cols), {-1.0, 0.0}});
  return c;
}

CMatrix LinearConstraint::apply(const CMatrix& x) const {
  CMatrix out;
  for (const auto& t : terms) {
    CMatrix term = t.coeff * (t.left * x * t.right);
    if (out.size() == 0) {
      out = term;
    } else {
      out += term;
    }
  }
  return out;
}

CMatrix LinearConstraint::as_matrix(Index rows, Index cols) const {
  CMatrix op;
  for (const auto& t : terms) {
    if (t.left.cols() != rows || t.right.rows() != cols) {
      throw MoritaError("ShapeMismatch", "constraint term does not fit the unknown");
    }
    CMatrix k = t.coeff * kron(t.left, t.right.transpose());
    if (op.size() == 0) {
      op = k;
    } else {
      op += k;
    }
  }
  return op;
}

std::vector<CMatrix> solve_linear_space(Index rows, Index cols,
                                        const std::vector<LinearConstraint>& constraints,
                                        const Tolerance& tol) {
  const Index n = rows * cols;
  std::vector<CMatrix> ops;
  Index total_rows = 0;
  for (const auto& c : constraints) {
    ops.push_back(c.as_matrix(rows, cols));
    total_rows += ops.back().rows();
  }
  CMatrix stacked(total_rows, n);
  Index at = 0;
  for (const auto& op : ops) {
    stacked.middleRows(at, op.rows()) = op;
    at += op.rows();
  }
  const CMatrix kernel = constraints.empty() ? identity(n) : kernel_basis(stacked, tol);
  std::vector<CMatrix> out;
  for (Index k = 0; k < kernel.cols(); ++k) out.push_back(unflatten(kernel.col(k), rows, cols));
  return out;
}

CMatrix restrict_kernel(const CMatrix& op, const CMatrix& basis, const Tolerance& tol) {
  if (basis.cols() == 0) return basis;
  const CMatrix coeffs = kernel_basis(op * basis, tol);
  if (coeffs.cols() == 0) return CMatrix(basis.rows(), 0);
  // Re-orthonormalize in case `basis` was not orthonormal.
  return range_basis(basis * coeffs, tol);
}

std::vector<std::vector<Index>> cluster_sorted(const RVector& values, double merge_gap,
                                               double separation) {
  std::vector<std::vector<Index>> clusters;
  for (Index i = 0; i < values.size(); ++i) {
    if (i == 0) {
      clusters.push_back({0});
      continue;
    }
    const double gap = values(i) - values(i - 1);
    if (gap < merge_gap) {
      clusters.back().push_back(i);
    } else if (gap < separation) {
      throw MoritaError("DecompositionFailed",
                        "eigenvalue gap " + std::to_string(gap) +
                            " is ambiguous at this tolerance; retry with a smaller eps");
    } else {
      clusters.push_back({i});
    }
  }
  return clusters;
}

}  // namespace morita
