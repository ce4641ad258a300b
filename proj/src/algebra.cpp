#include "morita/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace morita {

namespace {

constexpr Index kTableLimit = 160;


CVector rand_coords(Rng& rng, Index n) { return rng.complex_vector(n); }

std::string pair_name(Index i, Index j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

// ---- Algebra --------------------------------------------------------------

const CVector& Algebra::unit() const {
  if (!has_unit()) throw MoritaError("InvalidAlgebra", name_ + " has no unit");
  return unit_;
}

double Algebra::membership_defect(const CMatrix& m) const {
  return max_abs(CMatrix(m - to_matrix(to_coords(m))));
}

CVector Algebra::trace_functional() const {
  CVector t(dim_);
  for (Index k = 0; k < dim_; ++k) t(k) = basis_matrix(k).trace();
  return t;
}

bool Algebra::equals(const Algebra& other) const { return this == &other; }

CVector Algebra::basis_vector(Index k) const {
  CVector v = CVector::Zero(dim_);
  v(k) = 1.0;
  return v;
}

void Algebra::build_multiplication_tables() const {
  left_mult_.assign(dim_, CMatrix(dim_, dim_));
  right_mult_.assign(dim_, CMatrix(dim_, dim_));
  for (Index k = 0; k < dim_; ++k) {
    const CVector ek = basis_vector(k);
    for (Index i = 0; i < dim_; ++i) {
      const CVector ei = basis_vector(i);
      left_mult_[k].col(i) = multiply(ek, ei);
      right_mult_[k].col(i) = multiply(ei, ek);
    }
  }
}

const CMatrix& Algebra::left_multiplication(Index k) const {
  std::call_once(mult_once_, [this] { build_multiplication_tables(); });
  return left_mult_[k];
}

const CMatrix& Algebra::right_multiplication(Index k) const {
  std::call_once(mult_once_, [this] { build_multiplication_tables(); });
  return right_mult_[k];
}

CMatrix Algebra::left_multiplication_by(const CVector& a) const {
  CMatrix out = CMatrix::Zero(dim_, dim_);
  if (dim_ <= kTableLimit) {
    for (Index k = 0; k < dim_; ++k)
      if (a(k) != Complex(0.0)) out += a(k) * left_multiplication(k);
    return out;
  }
  for (Index i = 0; i < dim_; ++i) out.col(i) = multiply(a, basis_vector(i));
  return out;
}

CMatrix Algebra::right_multiplication_by(const CVector& a) const {
  CMatrix out = CMatrix::Zero(dim_, dim_);
  if (dim_ <= kTableLimit) {
    for (Index k = 0; k < dim_; ++k)
      if (a(k) != Complex(0.0)) out += a(k) * right_multiplication(k);
    return out;
  }
  for (Index i = 0; i < dim_; ++i) out.col(i) = multiply(basis_vector(i), a);
  return out;
}

const StructureIso& Algebra::structure() const {
  std::call_once(structure_once_, [this] {
    structure_ = std::make_shared<const StructureIso>(wedderburn_decompose(handle()));
  });
  return *structure_;
}

bool same_algebra(const AlgebraPtr& a, const AlgebraPtr& b) {
  if (!a || !b) return false;
  if (a == b) return true;
  return a->dim() == b->dim() && a->equals(*b);
}

// ---- MatrixAlgebra --------------------------------------------------------

MatrixAlgebra::MatrixAlgebra(PassKey, std::vector<CMatrix> basis, std::string name,
                             std::optional<std::vector<Index>> blocks, const Tolerance& tol)
    : Algebra(static_cast<Index>(basis.size()), std::move(name)),
      ambient_(basis.empty() ? 0 : basis.front().rows()),
      basis_(std::move(basis)),
      blocks_(std::move(blocks)) {
  if (basis_.empty()) throw MoritaError("InvalidAlgebra", "empty basis");
  for (const auto& b : basis_) {
    if (b.rows() != ambient_ || b.cols() != ambient_) {
      throw MoritaError("InvalidAlgebra", "basis matrices must be square of equal size");
    }
  }
  if (blocks_) {
    Index coord = 0, amb = 0;
    for (Index n : *blocks_) {
      canonical_offsets_.emplace_back(coord, amb);
      coord += n * n;
      amb += n;
    }
    set_unit(to_coords(identity(ambient_)));
    return;
  }
  stacked_.resize(ambient_ * ambient_, dim());
  for (Index k = 0; k < dim(); ++k) stacked_.col(k) = flatten(basis_[k]);
  const CMatrix gram = stacked_.adjoint() * stacked_;
  gram_.compute(gram);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(gram);
  const double top = es.eigenvalues().maxCoeff();
  if (gram_.info() != Eigen::Success || es.eigenvalues().minCoeff() <= tol.rank_cutoff() * top) {
    throw MoritaError("InvalidAlgebra", "basis of " + this->name() + " is linearly dependent");
  }
  // Candidate unit: projection onto the joint range of the basis and its adjoints.
  CMatrix ranges(ambient_, 2 * ambient_ * dim());
  for (Index k = 0; k < dim(); ++k) {
    ranges.middleCols(2 * k * ambient_, ambient_) = basis_[k];
    ranges.middleCols((2 * k + 1) * ambient_, ambient_) = basis_[k].adjoint();
  }
  const CMatrix q = range_basis(ranges, tol);
  const CMatrix p = q * q.adjoint();
  if (membership_defect(p) <= tol.bound(1.0)) set_unit(to_coords(p));
}

std::shared_ptr<const MatrixAlgebra> MatrixAlgebra::candidate(std::vector<CMatrix> basis,
                                                              std::string name,
                                                              const Tolerance& tol) {
  return std::make_shared<const MatrixAlgebra>(PassKey{}, std::move(basis), std::move(name),
                                               std::nullopt, tol);
}

std::shared_ptr<const MatrixAlgebra> MatrixAlgebra::create(std::vector<CMatrix> basis,
                                                           std::string name,
                                                           const Tolerance& tol) {
  auto a = candidate(std::move(basis), std::move(name), tol);
  const CheckReport rep = validate_algebra(*a, tol);
  if (!rep.passed()) throw MoritaError("InvalidAlgebra", rep.first_failure());
  return a;
}

std::shared_ptr<const MatrixAlgebra> MatrixAlgebra::canonical(std::vector<Index> block_sizes,
                                                              std::string name) {
  if (block_sizes.empty()) throw MoritaError("InvalidAlgebra", "no blocks");
  Index n = 0;
  for (Index b : block_sizes) {
    if (b <= 0) throw MoritaError("InvalidAlgebra", "block sizes must be positive");
    n += b;
  }
  if (name.empty()) {
    for (std::size_t i = 0; i < block_sizes.size(); ++i) {
      name += (i ? "+M" : "M") + std::to_string(block_sizes[i]);
    }
  }
  std::vector<CMatrix> basis;
  Index off = 0;
  for (Index b : block_sizes) {
    for (Index p = 0; p < b; ++p)
      for (Index q = 0; q < b; ++q) {
        CMatrix e = CMatrix::Zero(n, n);
        e(off + p, off + q) = 1.0;
        basis.push_back(std::move(e));
      }
    off += b;
  }
  return std::make_shared<const MatrixAlgebra>(PassKey{}, std::move(basis), std::move(name),
                                               std::move(block_sizes), Tolerance{});
}

std::shared_ptr<const MatrixAlgebra> MatrixAlgebra::spanned_by(const std::vector<CMatrix>& family,
                                                               std::string name,
                                                               const Tolerance& tol) {
  if (family.empty()) throw MoritaError("InvalidAlgebra", "empty spanning family");
  const Index n = family.front().rows();
  CMatrix stacked(n * n, static_cast<Index>(family.size()));
  for (std::size_t k = 0; k < family.size(); ++k) stacked.col(static_cast<Index>(k)) = flatten(family[k]);
  const CMatrix r = range_basis(stacked, tol);
  std::vector<CMatrix> basis;
  for (Index k = 0; k < r.cols(); ++k) basis.push_back(unflatten(r.col(k), n, n));
  return create(std::move(basis), std::move(name), tol);
}

CVector MatrixAlgebra::multiply(const CVector& x, const CVector& y) const {
  if (!blocks_) return to_coords(to_matrix(x) * to_matrix(y));
  CVector out(dim());
  for (std::size_t j = 0; j < blocks_->size(); ++j) {
    const Index b = (*blocks_)[j];
    const Index off = canonical_offsets_[j].first;
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> xm(
        x.data() + off, b, b);
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> ym(
        y.data() + off, b, b);
    Eigen::Map<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> om(
        out.data() + off, b, b);
    om = xm * ym;
  }
  return out;
}

CVector MatrixAlgebra::star(const CVector& x) const {
  if (!blocks_) return to_coords(to_matrix(x).adjoint());
  CVector out(dim());
  for (std::size_t j = 0; j < blocks_->size(); ++j) {
    const Index b = (*blocks_)[j];
    const Index off = canonical_offsets_[j].first;
    for (Index p = 0; p < b; ++p)
      for (Index q = 0; q < b; ++q) out(off + p * b + q) = std::conj(x(off + q * b + p));
  }
  return out;
}

CMatrix MatrixAlgebra::to_matrix(const CVector& x) const {
  if (x.size() != dim()) throw MoritaError("ShapeMismatch", "coordinate length mismatch");
  CMatrix m = CMatrix::Zero(ambient_, ambient_);
  if (blocks_) {
    for (std::size_t j = 0; j < blocks_->size(); ++j) {
      const Index b = (*blocks_)[j];
      const auto [off, amb] = canonical_offsets_[j];
      for (Index p = 0; p < b; ++p)
        for (Index q = 0; q < b; ++q) m(amb + p, amb + q) = x(off + p * b + q);
    }
    return m;
  }
  return unflatten(stacked_ * x, ambient_, ambient_);
}

CVector MatrixAlgebra::to_coords(const CMatrix& m) const {
  if (m.rows() != ambient_ || m.cols() != ambient_) {
    throw MoritaError("ShapeMismatch", "ambient matrix has the wrong size");
  }
  if (blocks_) {
    CVector x(dim());
    for (std::size_t j = 0; j < blocks_->size(); ++j) {
      const Index b = (*blocks_)[j];
      const auto [off, amb] = canonical_offsets_[j];
      for (Index p = 0; p < b; ++p)
        for (Index q = 0; q < b; ++q) x(off + p * b + q) = m(amb + p, amb + q);
    }
    return x;
  }
  return gram_.solve(stacked_.adjoint() * flatten(m));
}

CVector MatrixAlgebra::trace_functional() const {
  CVector t(dim());
  for (Index k = 0; k < dim(); ++k) t(k) = basis_[k].trace();
  return t;
}

bool MatrixAlgebra::equals(const Algebra& other) const {
  if (this == &other) return true;
  const auto* o = dynamic_cast<const MatrixAlgebra*>(&other);
  if (!o || o->dim() != dim() || o->ambient_ != ambient_) return false;
  for (Index k = 0; k < dim(); ++k)
    if (max_abs(CMatrix(basis_[k] - o->basis_[k])) > 1e-12) return false;
  return true;
}

// ---- elements and homomorphisms ------------------------------------------

AlgebraElement AlgebraElement::operator*(const AlgebraElement& o) const {
  if (!same_algebra(parent, o.parent)) throw MoritaError("ShapeMismatch", "different algebras");
  return {parent, parent->multiply(coords, o.coords)};
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const {
  if (!same_algebra(parent, o.parent)) throw MoritaError("ShapeMismatch", "different algebras");
  return {parent, coords + o.coords};
}

AlgebraElement AlgebraElement::adjoint() const { return {parent, parent->star(coords)}; }

StarHom StarHom::identity(const AlgebraPtr& a) { return {a, a, morita::identity(a->dim())}; }

StarHom StarHom::after(const StarHom& first) const {
  if (!same_algebra(first.target, source)) {
    throw MoritaError("ShapeMismatch", "composed homomorphisms are not composable");
  }
  return {first.source, target, map * first.map};
}

CheckReport validate_star_hom(const StarHom& phi, const Tolerance& tol, std::uint64_t seed,
                              Index max_pairs) {
  CheckReport rep("star-hom " + phi.source->name() + " -> " + phi.target->name());
  rep.seed = seed;
  const auto& s = *phi.source;
  const auto& t = *phi.target;
  if (phi.map.rows() != t.dim() || phi.map.cols() != s.dim()) {
    rep.require("shape", "homomorphism", false, "map has the wrong shape");
    return rep;
  }
  Rng rng(seed);
  std::vector<CVector> xs, ys;
  if (s.dim() * s.dim() <= max_pairs) {
    for (Index i = 0; i < s.dim(); ++i)
      for (Index j = 0; j < s.dim(); ++j) {
        xs.push_back(s.basis_vector(i));
        ys.push_back(s.basis_vector(j));
      }
  } else {
    for (int k = 0; k < 24; ++k) {
      xs.push_back(rand_coords(rng, s.dim()));
      ys.push_back(rand_coords(rng, s.dim()));
    }
  }
  double mult = 0.0, scale = 1.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const CVector lhs = phi(s.multiply(xs[k], ys[k]));
    const CVector rhs = t.multiply(phi(xs[k]), phi(ys[k]));
    mult = std::max(mult, max_abs(CVector(lhs - rhs)));
    scale = std::max(scale, max_abs(rhs));
  }
  rep.add("multiplicative", "homomorphism", mult, tol.bound(scale));
  double st = 0.0;
  for (std::size_t k = 0; k < xs.size() && k < 64; ++k) {
    st = std::max(st, max_abs(CVector(phi(s.star(ys[k])) - t.star(phi(ys[k])))));
  }
  if (s.dim() * s.dim() <= max_pairs) {
    st = 0.0;
    for (Index i = 0; i < s.dim(); ++i) {
      const CVector e = s.basis_vector(i);
      st = std::max(st, max_abs(CVector(phi(s.star(e)) - t.star(phi(e)))));
    }
  }
  rep.add("star-preserving", "homomorphism", st, tol.bound(scale));
  const double un = max_abs(CVector(phi(s.unit()) - t.unit()));
  rep.add("unital", "nondegenerate homomorphism", un, tol.bound(1.0));
  return rep;
}

CheckReport validate_star_iso(const StarHom& phi, const StarHom& inverse, const Tolerance& tol,
                              std::uint64_t seed) {
  CheckReport rep = validate_star_hom(phi, tol, seed);
  rep.set_subject("star-iso " + phi.source->name() + " -> " + phi.target->name());
  if (inverse.map.rows() != phi.map.cols() || inverse.map.cols() != phi.map.rows()) {
    rep.require("inverse shape", "isomorphism", false);
    return rep;
  }
  const double a = max_abs(CMatrix(inverse.map * phi.map - identity(phi.map.cols())));
  const double b = max_abs(CMatrix(phi.map * inverse.map - identity(phi.map.rows())));
  rep.add("bijective", "isomorphism", std::max(a, b),
          tol.bound(std::max(1.0, max_abs(phi.map) * max_abs(inverse.map))));
  return rep;
}

CheckReport validate_algebra(const MatrixAlgebra& a, const Tolerance& tol) {
  CheckReport rep("algebra " + a.name());
  const auto& basis = a.basis();
  const Index n = a.dim();
  double prod = 0.0, scale = 1.0;
  std::string prod_note;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const CMatrix p = basis[i] * basis[j];
      const double d = a.membership_defect(p);
      scale = std::max(scale, max_abs(p));
      if (d > prod) {
        if (prod_note.empty() && d > tol.bound(scale)) prod_note = "basis pair " + pair_name(i, j);
        prod = d;
      }
    }
  rep.add("closed under product", "C*-algebra", prod, tol.bound(scale), prod_note);
  double adj = 0.0;
  std::string adj_note;
  for (Index i = 0; i < n; ++i) {
    const double d = a.membership_defect(basis[i].adjoint());
    if (d > tol.bound(scale) && adj_note.empty()) adj_note = "basis element " + std::to_string(i);
    adj = std::max(adj, d);
  }
  if (!adj_note.empty()) {
    // Name a pair witnessing it: b_i^* b_j outside the span.
    for (Index i = 0; i < n && adj_note.rfind("basis element", 0) == 0; ++i)
      for (Index j = 0; j < n; ++j)
        if (a.membership_defect(basis[i].adjoint() * basis[j]) > tol.bound(scale)) {
          adj_note = "basis pair " + pair_name(i, j) + ": b_i* b_j is outside the span";
          break;
        }
  }
  rep.add("closed under adjoint", "C*-algebra", adj, tol.bound(scale), adj_note);
  if (!a.has_unit()) {
    rep.require("unit exists", "unital algebra", false, "projection onto the joint range is not in the span");
  } else {
    const CMatrix u = a.to_matrix(a.unit());
    double d = 0.0;
    for (const auto& b : basis) {
      d = std::max(d, max_abs(CMatrix(u * b - b)));
      d = std::max(d, max_abs(CMatrix(b * u - b)));
    }
    rep.add("unit exists", "unital algebra", d, tol.bound(scale));
  }
  CMatrix gram(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) gram(i, j) = (basis[i].adjoint() * basis[j]).trace();
  const RVector ev = hermitian_eigendecomposition(gram, tol).values;
  const double lo = ev(0);
  char note[64];
  std::snprintf(note, sizeof note, "c = %.3e", lo);
  rep.add("trace form positive definite", "faithful trace", lo > 0 ? 0.0 : -lo + 1.0,
          tol.bound(1.0), note);
  return rep;
}

// ---- structure recovery ---------------------------------------------------

Index StructureIso::block_offset(Index j) const {
  Index off = 0;
  for (Index i = 0; i < j; ++i) off += block_sizes[i] * block_sizes[i];
  return off;
}

namespace {

struct Summand {
  CVector projection;
  std::vector<CVector> units;  // row-major n x n
  Index size = 0;
  Index multiplicity = 0;
  double order_key = 0.0;
};

// Kernel of the commutation constraints with two generic elements, confirmed
// against every basis element.
CMatrix center_basis(const Algebra& a, Rng& rng, const Tolerance& tol) {
  const Index n = a.dim();
  std::vector<CMatrix> ops;
  for (int k = 0; k < 2; ++k) {
    const CVector r = rand_coords(rng, n);
    ops.push_back(a.left_multiplication_by(r) - a.right_multiplication_by(r));
  }
  CMatrix stacked(2 * n, n);
  stacked << ops[0], ops[1];
  CMatrix z = kernel_basis(stacked, tol);
  for (Index k = 0; k < n && z.cols() > 0; ++k) {
    const CVector e = a.basis_vector(k);
    CMatrix op(n, z.cols());
    for (Index c = 0; c < z.cols(); ++c) {
      const CVector zc = z.col(c);
      op.col(c) = a.multiply(e, zc) - a.multiply(zc, e);
    }
    if (max_abs(op) > tol.bound(1.0)) {
      z = restrict_kernel(a.left_multiplication_by(e) - a.right_multiplication_by(e), z, tol);
    }
  }
  return z;
}

std::vector<std::vector<Index>> spectral_clusters(const RVector& values, const Tolerance& tol) {
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  return cluster_sorted(values, 10.0 * tol.eps_abs * scale, tol.rank_cutoff() * scale);
}

CMatrix columns(const CMatrix& vecs, const std::vector<Index>& idx) {
  CMatrix out(vecs.rows(), static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Index>(k)) = vecs.col(idx[k]);
  return out;
}

}  // namespace

StructureIso wedderburn_decompose(const AlgebraPtr& aptr, const Tolerance& tol,
                                  std::uint64_t seed) {
  const Algebra& a = *aptr;
  const Index n = a.dim();
  StructureIso out;
  out.concrete = aptr;
  out.seed = seed;

  if (auto blocks = a.canonical_blocks()) {
    out.block_sizes = *blocks;
    out.canonical = MatrixAlgebra::canonical(*blocks);
    out.forward = {aptr, out.canonical, identity(n)};
    out.backward = {out.canonical, aptr, identity(n)};
    Index off = 0;
    for (Index b : *blocks) {
      CVector p = CVector::Zero(n);
      std::vector<CVector> units;
      for (Index i = 0; i < b; ++i)
        for (Index j = 0; j < b; ++j) {
          CVector e = CVector::Zero(n);
          e(off + i * b + j) = 1.0;
          if (i == j) p(off + i * b + j) = 1.0;
          units.push_back(std::move(e));
        }
      out.central_projections.push_back(std::move(p));
      out.matrix_units.push_back(std::move(units));
      out.ambient_multiplicity.push_back(1);
      off += b * b;
    }
    return out;
  }

  if (!a.has_unit()) throw MoritaError("DecompositionFailed", a.name() + " has no unit");
  Rng rng(seed);
  const CMatrix zb = center_basis(a, rng, tol);
  const Index zdim = zb.cols();
  if (zdim == 0) throw MoritaError("DecompositionFailed", "trivial center");

  const CMatrix support = range_basis(a.to_matrix(a.unit()), tol);
  const CVector z = zb * rng.complex_vector(zdim);
  const CVector h = z + a.star(z);
  const CMatrix hs = support.adjoint() * a.to_matrix(h) * support;
  const EigenDecomposition eh = hermitian_eigendecomposition(hs, tol);
  const auto clusters = spectral_clusters(eh.values, tol);
  if (static_cast<Index>(clusters.size()) != zdim) {
    throw MoritaError("DecompositionFailed",
                      "central element has " + std::to_string(clusters.size()) +
                          " eigenvalues but the center has dimension " + std::to_string(zdim) +
                          "; retry with a smaller eps");
  }

  const CVector trace = a.trace_functional();

  std::vector<Summand> summands;
  for (const auto& cl : clusters) {
    Summand s;
    s.order_key = eh.values(cl.front());
    const CMatrix qj = support * columns(eh.vectors, cl);
    const CMatrix pj = qj * qj.adjoint();
    if (a.membership_defect(pj) > tol.bound(1.0) * 1e2) {
      throw MoritaError("DecompositionFailed", "spectral projection is not in the algebra");
    }
    s.projection = a.to_coords(pj);
    const Index dj = numerical_rank(a.left_multiplication_by(s.projection), tol);
    const Index nj = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(dj))));
    if (nj * nj != dj) {
      throw MoritaError("DecompositionFailed", "summand dimension " + std::to_string(dj) +
                                                   " is not a square");
    }
    s.size = nj;

    // Minimal projection from a generic self-adjoint element of the summand.
    const CVector x = rand_coords(rng, n);
    const CVector y = a.multiply(s.projection, a.multiply(x + a.star(x), s.projection));
    const CMatrix ys = qj.adjoint() * a.to_matrix(y) * qj;
    const EigenDecomposition ey = hermitian_eigendecomposition(ys, tol);
    const auto yc = spectral_clusters(ey.values, tol);
    if (static_cast<Index>(yc.size()) != nj) {
      throw MoritaError("DecompositionFailed", "generic element of a summand has " +
                                                   std::to_string(yc.size()) +
                                                   " eigenvalues, expected " + std::to_string(nj));
    }
    const CMatrix fq = qj * columns(ey.vectors, yc.front());
    const CVector f = a.to_coords(fq * fq.adjoint());
    s.multiplicity = fq.cols();
    const Complex tf = (trace.transpose() * f).value();

    // Orthonormal basis of A f for the form x*y = <x,y> f.
    CMatrix af = range_basis(a.right_multiplication_by(f), tol);
    if (af.cols() != nj) {
      throw MoritaError("DecompositionFailed", "column space A f has the wrong dimension");
    }
    // Start the basis at f itself so e_11 = f.
    {
      CMatrix seeded(n, nj);
      seeded.col(0) = f;
      Index filled = 1;
      for (Index c = 0; c < af.cols() && filled < nj; ++c) {
        CMatrix trial = seeded.leftCols(filled + 1);
        trial.col(filled) = af.col(c);
        if (numerical_rank(trial, tol) == filled + 1) seeded.col(filled++) = af.col(c);
      }
      af = seeded;
    }
    CMatrix gram(nj, nj);
    std::vector<CVector> stars(nj);
    for (Index p = 0; p < nj; ++p) stars[p] = a.star(af.col(p));
    for (Index p = 0; p < nj; ++p)
      for (Index q = 0; q < nj; ++q) {
        gram(p, q) = (trace.transpose() * a.multiply(stars[p], af.col(q))).value() / tf;
      }
    Eigen::LLT<CMatrix> llt(0.5 * (gram + gram.adjoint()));
    if (llt.info() != Eigen::Success) {
      throw MoritaError("DecompositionFailed", "column Gram matrix is not positive definite");
    }
    const CMatrix lower = llt.matrixL();
    const CMatrix v = af * lower.adjoint().inverse();
    for (Index p = 0; p < nj; ++p) {
      const CVector vp = v.col(p);
      for (Index q = 0; q < nj; ++q) s.units.push_back(a.multiply(vp, a.star(v.col(q))));
    }
    summands.push_back(std::move(s));
  }

  std::stable_sort(summands.begin(), summands.end(),
                   [](const Summand& l, const Summand& r) { return l.size < r.size; });

  Index total = 0;
  for (const auto& s : summands) total += s.size * s.size;
  if (total != n) {
    throw MoritaError("DecompositionFailed", "block dimensions sum to " + std::to_string(total) +
                                                 ", algebra has dimension " + std::to_string(n));
  }

  for (const auto& s : summands) {
    out.block_sizes.push_back(s.size);
    out.central_projections.push_back(s.projection);
    out.matrix_units.push_back(s.units);
    out.ambient_multiplicity.push_back(s.multiplicity);
  }
  out.canonical = MatrixAlgebra::canonical(out.block_sizes);
  CMatrix back(n, n);
  Index off = 0;
  for (const auto& s : summands) {
    const Index b = s.size;
    for (Index p = 0; p < b * b; ++p) back.col(off + p) = s.units[p];
    off += b * b;
  }
  Eigen::PartialPivLU<CMatrix> lu(back);
  const CMatrix fwd = lu.inverse();
  out.forward = {aptr, out.canonical, fwd};
  out.backward = {out.canonical, aptr, back};
  const double rt = max_abs(CMatrix(back * fwd - identity(n)));
  if (rt > 1e3 * tol.bound(1.0)) {
    throw MoritaError("DecompositionFailed", "structure maps are not mutually inverse");
  }
  return out;
}

CVector canonical_trace(const AlgebraPtr& a) {
  const StructureIso& s = a->structure();
  CVector diag = CVector::Zero(a->dim());
  Index off = 0;
  for (Index b : s.block_sizes) {
    for (Index p = 0; p < b; ++p) diag(off + p * b + p) = 1.0;
    off += b * b;
  }
  return s.forward.map.transpose() * diag;
}

// ---- unitary equivalence --------------------------------------------------

CMatrix intertwiner_space(const AlgebraPtr& target, const std::vector<CVector>& phi_images,
                          const std::vector<CVector>& psi_images, const Tolerance& tol) {
  const Index n = target->dim();
  CMatrix stacked(n * static_cast<Index>(phi_images.size()), n);
  for (std::size_t k = 0; k < phi_images.size(); ++k) {
    stacked.middleRows(static_cast<Index>(k) * n, n) =
        target->right_multiplication_by(phi_images[k]) -
        target->left_multiplication_by(psi_images[k]);
  }
  return kernel_basis(stacked, tol);
}

CVector polar_unitary_in(const AlgebraPtr& a, const CVector& x, const Tolerance& tol) {
  const CMatrix support = range_basis(a->to_matrix(a->unit()), tol);
  const CMatrix m = support.adjoint() * a->to_matrix(x) * support;
  const CMatrix u = polar_unitary(m, tol);
  return a->to_coords(support * u * support.adjoint());
}

namespace {

// Generators for an intertwiner solve: two generic elements and their adjoints.
std::vector<CVector> generic_generators(const Algebra& a, Rng& rng) {
  std::vector<CVector> g;
  for (int k = 0; k < 2; ++k) {
    CVector r = rand_coords(rng, a.dim());
    g.push_back(a.star(r));
    g.push_back(std::move(r));
  }
  return g;
}

CMatrix hom_space(const StarHom& phi, const StarHom& psi, const std::vector<CVector>& gens,
                  const Tolerance& tol) {
  std::vector<CVector> pi, qi;
  for (const auto& g : gens) {
    pi.push_back(phi(g));
    qi.push_back(psi(g));
  }
  CMatrix t = intertwiner_space(phi.target, pi, qi, tol);
  const auto& c = *phi.target;
  const double bound = tol.bound(1.0) * 10.0;
  for (Index k = 0; k < phi.source->dim() && t.cols() > 0; ++k) {
    const CVector e = phi.source->basis_vector(k);
    const CVector pe = phi(e), qe = psi(e);
    double d = 0.0;
    for (Index col = 0; col < t.cols(); ++col) {
      const CVector tc = t.col(col);
      d = std::max(d, max_abs(CVector(c.multiply(tc, pe) - c.multiply(qe, tc))));
    }
    if (d > bound) {
      t = restrict_kernel(c.right_multiplication_by(pe) - c.left_multiplication_by(qe), t, tol);
    }
  }
  return t;
}

// For a canonical block target the intertwiners are counted by the
// multiplicities of the source's minimal projections in each target block, and
// a generic one is the average sum_p psi(e_p1) w phi(e_1p) of a random w.
std::optional<UnitaryEquivalence> block_equivalence(const StarHom& phi, const StarHom& psi,
                                                    const std::vector<Index>& blocks, Rng& rng,
                                                    const Tolerance& tol) {
  const StructureIso& s = phi.source->structure();
  const auto& c = *phi.target;
  const CMatrix one = identity(c.ambient_dim());
  const CMatrix pphi = c.to_matrix(phi(phi.source->unit()));
  const CMatrix ppsi = c.to_matrix(psi(psi.source->unit()));
  // Ranks of projections restricted to each block.
  auto ranks = [&](const CMatrix& p) {
    std::vector<Index> r;
    Index off = 0;
    for (Index b : blocks) {
      const double tr = p.block(off, off, b, b).trace().real();
      r.push_back(static_cast<Index>(std::llround(tr)));
      if (std::abs(tr - static_cast<double>(r.back())) > 1e-6) r.back() = -1;
      off += b;
    }
    return r;
  };
  std::vector<std::vector<Index>> mphi, mpsi;
  std::vector<CMatrix> e11phi, e11psi;
  for (Index i = 0; i < s.block_count(); ++i) {
    const CVector& e11 = s.matrix_units[static_cast<std::size_t>(i)][0];
    mphi.push_back(ranks(c.to_matrix(phi(e11))));
    mpsi.push_back(ranks(c.to_matrix(psi(e11))));
  }
  mphi.push_back(ranks(CMatrix(one - pphi)));
  mpsi.push_back(ranks(CMatrix(one - ppsi)));
  UnitaryEquivalence out;
  for (std::size_t i = 0; i < mphi.size(); ++i)
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      if (mphi[i][j] < 0 || mpsi[i][j] < 0) return std::nullopt;
      out.intertwiner_dim += mphi[i][j] * mpsi[i][j];
      out.self_dim_phi += mphi[i][j] * mphi[i][j];
      out.self_dim_psi += mpsi[i][j] * mpsi[i][j];
    }
  if (out.intertwiner_dim != out.self_dim_phi || out.intertwiner_dim != out.self_dim_psi) {
    out.obstruction = "dim Hom(phi,psi) = " + std::to_string(out.intertwiner_dim) +
                      ", dim End(phi) = " + std::to_string(out.self_dim_phi) +
                      ", dim End(psi) = " + std::to_string(out.self_dim_psi) +
                      ": multiplicity tables differ";
    return out;
  }
  const CMatrix w = c.to_matrix(rand_coords(rng, c.dim()));
  CMatrix t = (one - ppsi) * w * (one - pphi);
  for (Index i = 0; i < s.block_count(); ++i) {
    const Index b = s.block_sizes[static_cast<std::size_t>(i)];
    const auto& units = s.matrix_units[static_cast<std::size_t>(i)];
    for (Index p = 0; p < b; ++p)
      t += c.to_matrix(psi(units[static_cast<std::size_t>(p * b)])) * w *
           c.to_matrix(phi(units[static_cast<std::size_t>(p)]));
  }
  try {
    out.unitary = polar_unitary_in(phi.target, c.to_coords(t), tol);
  } catch (const MoritaError& e) {
    out.obstruction = std::string("generic intertwiner is singular: ") + e.what();
  }
  return out;
}

UnitaryEquivalence finish_equivalence(const StarHom& phi, const StarHom& psi, UnitaryEquivalence out,
                                      const Tolerance& tol) {
  const auto& c = *phi.target;
  const CVector u = *out.unitary;
  const CVector ustar = c.star(u);
  double d = 0.0;
  for (Index k = 0; k < phi.source->dim(); ++k) {
    const CVector e = phi.source->basis_vector(k);
    d = std::max(d, max_abs(CVector(psi(e) - c.multiply(u, c.multiply(phi(e), ustar)))));
  }
  out.defect = d;
  if (d > tol.bound(1.0) * 10.0) {
    out.unitary.reset();
    out.obstruction = "polar part of the generic intertwiner fails to conjugate";
  }
  return out;
}

}  // namespace

UnitaryEquivalence hom_unitary_equivalence(const StarHom& phi, const StarHom& psi,
                                           const Tolerance& tol, std::uint64_t seed) {
  if (!same_algebra(phi.source, psi.source) || !same_algebra(phi.target, psi.target)) {
    throw MoritaError("InvalidHom", "homomorphisms do not share source and target");
  }
  for (const StarHom* h : {&phi, &psi}) {
    const CheckReport r = validate_star_hom(*h, tol, seed);
    if (!r.passed()) throw MoritaError("InvalidHom", r.first_failure());
  }
  Rng rng(seed);
  UnitaryEquivalence out;
  const auto& c = *phi.target;
  std::optional<UnitaryEquivalence> fast;
  if (auto blocks = c.canonical_blocks()) fast = block_equivalence(phi, psi, *blocks, rng, tol);
  if (fast) {
    out = *fast;
    if (!out.unitary) return out;
    return finish_equivalence(phi, psi, std::move(out), tol);
  }
  const auto gens = generic_generators(*phi.source, rng);
  const CMatrix hom = hom_space(phi, psi, gens, tol);
  out.intertwiner_dim = hom.cols();
  out.self_dim_phi = hom_space(phi, phi, gens, tol).cols();
  out.self_dim_psi = hom_space(psi, psi, gens, tol).cols();
  if (out.intertwiner_dim != out.self_dim_phi || out.intertwiner_dim != out.self_dim_psi) {
    out.obstruction = "dim Hom(phi,psi) = " + std::to_string(out.intertwiner_dim) +
                      ", dim End(phi) = " + std::to_string(out.self_dim_phi) +
                      ", dim End(psi) = " + std::to_string(out.self_dim_psi) +
                      ": multiplicity tables differ";
    return out;
  }
  const CVector t = hom * rng.complex_vector(hom.cols());
  try {
    out.unitary = polar_unitary_in(phi.target, t, tol);
  } catch (const MoritaError& e) {
    out.obstruction = std::string("generic intertwiner is singular: ") + e.what();
    return out;
  }
  return finish_equivalence(phi, psi, std::move(out), tol);
}

// ---- representations ------------------------------------------------------

CMatrix Representation::operator()(const CVector& a) const {
  CMatrix out = CMatrix::Zero(dim, dim);
  for (std::size_t k = 0; k < images.size(); ++k)
    if (a(static_cast<Index>(k)) != Complex(0.0)) out += a(static_cast<Index>(k)) * images[k];
  return out;
}

Representation Representation::ambient(const AlgebraPtr& a) {
  Representation r{a, a->ambient_dim(), {}};
  for (Index k = 0; k < a->dim(); ++k) r.images.push_back(a->basis_matrix(k));
  return r;
}

CheckReport validate_representation(const Representation& rep, const Tolerance& tol,
                                    std::uint64_t seed) {
  CheckReport out("representation of " + rep.algebra->name());
  out.seed = seed;
  const auto& a = *rep.algebra;
  if (static_cast<Index>(rep.images.size()) != a.dim()) {
    out.require("shape", "representation", false, "one image per basis element expected");
    return out;
  }
  Rng rng(seed);
  std::vector<CVector> xs, ys;
  if (a.dim() <= 24) {
    for (Index i = 0; i < a.dim(); ++i)
      for (Index j = 0; j < a.dim(); ++j) {
        xs.push_back(a.basis_vector(i));
        ys.push_back(a.basis_vector(j));
      }
  } else {
    for (int k = 0; k < 16; ++k) {
      xs.push_back(rand_coords(rng, a.dim()));
      ys.push_back(rand_coords(rng, a.dim()));
    }
  }
  double mult = 0.0, st = 0.0, scale = 1.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const CMatrix px = rep(xs[k]), py = rep(ys[k]);
    mult = std::max(mult, max_abs(CMatrix(rep(a.multiply(xs[k], ys[k])) - px * py)));
    st = std::max(st, max_abs(CMatrix(rep(a.star(xs[k])) - px.adjoint())));
    scale = std::max(scale, max_abs(px) * max_abs(py));
  }
  out.add("multiplicative", "representation", mult, tol.bound(scale));
  out.add("star-preserving", "representation", st, tol.bound(scale));
  out.add("nondegenerate", "representation",
          max_abs(CMatrix(rep(a.unit()) - identity(rep.dim))), tol.bound(1.0));
  return out;
}

std::optional<CMatrix> unitary_intertwiner(const Representation& rho1, const Representation& rho2,
                                           const Tolerance& tol, std::uint64_t seed) {
  if (rho1.dim != rho2.dim) return std::nullopt;
  const auto& a = *rho1.algebra;
  Rng rng(seed);
  const auto gens = generic_generators(a, rng);
  std::vector<LinearConstraint> cons;
  for (const auto& g : gens) cons.push_back(LinearConstraint::intertwines(rho1(g), rho2(g)));
  auto space = solve_linear_space(rho1.dim, rho1.dim, cons, tol);
  if (space.empty()) return std::nullopt;
  CMatrix t = CMatrix::Zero(rho1.dim, rho1.dim);
  for (const auto& s : space) t += rng.complex_normal() * s;
  CMatrix u;
  try {
    u = polar_unitary(t, tol);
  } catch (const MoritaError&) {
    return std::nullopt;
  }
  for (Index k = 0; k < a.dim(); ++k) {
    const double scale = std::max(1.0, max_abs(rho1.images[k]));
    if (max_abs(CMatrix(u * rho1.images[k] * u.adjoint() - rho2.images[k])) > tol.bound(scale) * 10) {
      return std::nullopt;
    }
  }
  return u;
}

CVector character(const Representation& rho) {
  CVector c(static_cast<Index>(rho.images.size()));
  for (std::size_t k = 0; k < rho.images.size(); ++k) c(static_cast<Index>(k)) = rho.images[k].trace();
  return c;
}

}  // namespace morita
