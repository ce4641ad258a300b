#include "morita/bimodule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace morita {

namespace {

constexpr Index kExhaustiveDim = 16;
constexpr Index kExhaustiveModule = 48;
constexpr Index kSampleCount = 6;
constexpr Index kBlockGramLimit = 400;

using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<CVector> element_samples(const Algebra& a, Rng& rng) {
  std::vector<CVector> out;
  if (a.dim() <= kExhaustiveDim) {
    for (Index k = 0; k < a.dim(); ++k) out.push_back(a.basis_vector(k));
  } else {
    for (Index s = 0; s < kSampleCount; ++s) out.push_back(rng.complex_vector(a.dim()));
  }
  return out;
}

double family_scale(const std::vector<CMatrix>& ms) {
  double s = 0.0;
  for (const auto& m : ms) s = std::max(s, max_abs(m));
  return s;
}

CMatrix combine(const std::vector<CMatrix>& ms, const CVector& c, Index rows, Index cols) {
  CMatrix out = CMatrix::Zero(rows, cols);
  for (std::size_t k = 0; k < ms.size(); ++k) {
    if (c(static_cast<Index>(k)) != Complex(0.0, 0.0)) out += c(static_cast<Index>(k)) * ms[k];
  }
  return out;
}

// Eigenpairs of a Hermitian PSD matrix above the rank cutoff.
struct PositivePart {
  RVector values;
  CMatrix vectors;
};

PositivePart positive_part(const CMatrix& s, const Tolerance& tol) {
  CMatrix h = CMatrix(0.5 * (s + s.adjoint()));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw MoritaError("NonConvergence", "Gram eigensolver failed");
  const RVector& ev = es.eigenvalues();
  double top = ev.size() ? std::max(1.0, ev.maxCoeff()) : 1.0;
  double cut = tol.rank_cutoff() * top;
  std::vector<Index> keep;
  for (Index i = 0; i < ev.size(); ++i)
    if (ev(i) > cut) keep.push_back(i);
  PositivePart out;
  out.values.resize(static_cast<Index>(keep.size()));
  out.vectors.resize(h.rows(), static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    out.values(static_cast<Index>(c)) = ev(keep[c]);
    out.vectors.col(static_cast<Index>(c)) = es.eigenvectors().col(keep[c]);
  }
  return out;
}

// A . mat . B^T on each column of v viewed as a row-major d1 x d2 array.
CMatrix apply_both(const CMatrix& a, const CMatrix& b, const CMatrix& v, Index d1, Index d2) {
  CMatrix out(a.rows() * b.rows(), v.cols());
  for (Index c = 0; c < v.cols(); ++c) {
    CVector col = v.col(c);
    Eigen::Map<const RowMat> m(col.data(), d1, d2);
    RowMat r = a * m * b.transpose();
    out.col(c) = Eigen::Map<const CVector>(r.data(), r.size());
  }
  return out;
}

// Theta_{e_i, e_j} = sum_m R_m e_i e_j^T G_m.
CMatrix theta_basis(const RightHilbertBimodule& x, Index i, Index j) {
  CMatrix out = CMatrix::Zero(x.dim, x.dim);
  for (std::size_t m = 0; m < x.inner.size(); ++m) out += x.right_action[m].col(i) * x.inner[m].row(j);
  return out;
}

std::string index_list(const std::vector<Index>& v) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << "]";
  return os.str();
}

}  // namespace

// ---- RightHilbertBimodule ---------------------------------------------------

CMatrix RightHilbertBimodule::act_left(const CVector& a) const {
  return combine(left_action, a, dim, dim);
}

CMatrix RightHilbertBimodule::act_right(const CVector& b) const {
  return combine(right_action, b, dim, dim);
}

CVector RightHilbertBimodule::inner_product(const CVector& x, const CVector& y) const {
  CVector out(static_cast<Index>(inner.size()));
  for (std::size_t m = 0; m < inner.size(); ++m)
    out(static_cast<Index>(m)) = x.dot(inner[m] * y);
  return out;
}

CMatrix RightHilbertBimodule::scalar_gram(const CVector& t) const {
  return combine(inner, t, dim, dim);
}

BimodulePtr make_bimodule(AlgebraPtr left, AlgebraPtr right, std::vector<CMatrix> left_action,
                          std::vector<CMatrix> right_action, std::vector<CMatrix> inner,
                          std::string name) {
  if (!left || !right) throw MoritaError("ShapeMismatch", "missing algebra");
  if (static_cast<Index>(left_action.size()) != left->dim())
    throw MoritaError("ShapeMismatch", "left action count differs from dim A");
  if (static_cast<Index>(right_action.size()) != right->dim() ||
      static_cast<Index>(inner.size()) != right->dim())
    throw MoritaError("ShapeMismatch", "right action or inner product count differs from dim B");
  Index d = right_action.empty() ? 0 : right_action.front().rows();
  auto square = [d](const std::vector<CMatrix>& ms) {
    for (const auto& m : ms)
      if (m.rows() != d || m.cols() != d) return false;
    return true;
  };
  if (!square(left_action) || !square(right_action) || !square(inner))
    throw MoritaError("ShapeMismatch", "action or inner product matrix is not d x d");
  auto x = std::make_shared<RightHilbertBimodule>();
  x->left = std::move(left);
  x->right = std::move(right);
  x->dim = d;
  x->left_action = std::move(left_action);
  x->right_action = std::move(right_action);
  x->inner = std::move(inner);
  x->name = std::move(name);
  return x;
}

CheckReport validate_bimodule(const RightHilbertBimodule& x, const Tolerance& tol,
                              std::uint64_t seed) {
  CheckReport rep("bimodule " + x.name);
  rep.seed = seed;
  const Algebra& A = *x.left;
  const Algebra& B = *x.right;
  const Index d = x.dim;
  if (d == 0) {
    rep.require("fullness", "full module", false, "zero-dimensional module");
    return rep;
  }
  Rng rng(seed);
  auto sa = element_samples(A, rng);
  auto sb = element_samples(B, rng);
  const double scale = 1.0 + std::max({family_scale(x.left_action), family_scale(x.right_action),
                                       family_scale(x.inner)});
  const CMatrix I = identity(d);

  std::vector<CMatrix> la, rb;
  for (const auto& a : sa) la.push_back(x.act_left(a));
  for (const auto& b : sb) rb.push_back(x.act_right(b));

  double lm = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i)
    for (std::size_t j = 0; j < sa.size(); ++j)
      lm = std::max(lm, max_abs(CMatrix(x.act_left(A.multiply(sa[i], sa[j])) - la[i] * la[j])));
  rep.add("left module", "a.(a'.x) = (aa').x", lm, tol.bound(scale * scale));
  rep.add("left unit", "1.x = x", max_abs(CMatrix(x.act_left(A.unit()) - I)), tol.bound(scale));

  double rm = 0.0;
  for (std::size_t i = 0; i < sb.size(); ++i)
    for (std::size_t j = 0; j < sb.size(); ++j)
      rm = std::max(rm, max_abs(CMatrix(x.act_right(B.multiply(sb[i], sb[j])) - rb[j] * rb[i])));
  rep.add("right module", "(x.b).b' = x.(bb')", rm, tol.bound(scale * scale));
  rep.add("right unit", "x.1 = x", max_abs(CMatrix(x.act_right(B.unit()) - I)), tol.bound(scale));

  double cm = 0.0;
  for (const auto& l : la)
    for (const auto& r : rb) cm = std::max(cm, max_abs(CMatrix(l * r - r * l)));
  rep.add("associativity", "a.(x.b) = (a.x).b", cm, tol.bound(scale * scale));

  // Functionals on B used to test B-valued identities.
  std::vector<CVector> functionals;
  if (B.dim() <= kExhaustiveDim) {
    for (Index k = 0; k < B.dim(); ++k) functionals.push_back(CVector::Unit(B.dim(), k));
  } else {
    for (Index s = 0; s < kSampleCount; ++s) functionals.push_back(rng.complex_vector(B.dim()));
  }
  CMatrix sigma(B.dim(), B.dim());
  for (Index m = 0; m < B.dim(); ++m) sigma.col(m) = B.star(B.basis_vector(m));

  double lin = 0.0;
  for (std::size_t s = 0; s < sb.size(); ++s) {
    CMatrix rmul = B.right_multiplication_by(sb[s]);
    for (const auto& w : functionals) {
      CMatrix lhs = x.scalar_gram(w) * rb[s];
      CMatrix rhs = x.scalar_gram(rmul.transpose() * w);
      lin = std::max(lin, max_abs(CMatrix(lhs - rhs)));
    }
  }
  rep.add("right linearity", "<x, y.b> = <x, y> b", lin, tol.bound(scale * scale));

  double sym = 0.0;
  for (const auto& w : functionals) {
    CVector v = sigma.transpose() * w;
    CMatrix rhs = CMatrix::Zero(d, d);
    for (Index m = 0; m < B.dim(); ++m)
      if (v(m) != Complex(0.0, 0.0)) rhs += v(m) * x.inner[static_cast<std::size_t>(m)].adjoint();
    sym = std::max(sym, max_abs(CMatrix(x.scalar_gram(w) - rhs)));
  }
  rep.add("symmetry", "<x, y>* = <y, x>", sym, tol.bound(scale));

  double adj = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    CMatrix las = x.act_left(A.star(sa[i]));
    for (const auto& w : functionals) {
      CMatrix g = x.scalar_gram(w);
      adj = std::max(adj, max_abs(CMatrix(la[i].adjoint() * g - g * las)));
    }
  }
  rep.add("adjoint relation", "<a.x, y> = <x, a*.y>", adj, tol.bound(scale * scale));

  Representation pib = Representation::ambient(x.right);
  const Index nb = pib.dim;
  double neg = 0.0;
  if (d * nb <= kBlockGramLimit) {
    CMatrix p = CMatrix::Zero(d * nb, d * nb);
    for (Index m = 0; m < B.dim(); ++m) p += kron(x.inner[static_cast<std::size_t>(m)], pib.images[static_cast<std::size_t>(m)]);
    p = CMatrix(0.5 * (p + p.adjoint()));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(p, Eigen::EigenvaluesOnly);
    neg = std::max(0.0, -es.eigenvalues().minCoeff());
  } else {
    for (Index s = 0; s < 2 * kSampleCount; ++s) {
      CVector v = rng.complex_vector(d);
      CMatrix g = pib(x.inner_product(v, v));
      g = CMatrix(0.5 * (g + g.adjoint()));
      Eigen::SelfAdjointEigenSolver<CMatrix> es(g, Eigen::EigenvaluesOnly);
      neg = std::max(neg, -es.eigenvalues().minCoeff() / std::max(1.0, v.squaredNorm()));
    }
  }
  rep.add("positivity", "<x, x> >= 0", neg, tol.bound(scale));

  CMatrix t = x.scalar_gram(B.trace_functional());
  t = CMatrix(0.5 * (t + t.adjoint()));
  Eigen::SelfAdjointEigenSolver<CMatrix> ts(t, Eigen::EigenvaluesOnly);
  double tmin = ts.eigenvalues().minCoeff();
  double tmax = std::max(1.0, ts.eigenvalues().maxCoeff());
  rep.add("definiteness", "<x, x> = 0 only for x = 0",
          std::max(0.0, tol.rank_cutoff() * tmax - tmin), 0.0,
          "smallest scalarized Gram eigenvalue " + std::to_string(tmin));

  CMatrix f(d * d, B.dim());
  for (Index m = 0; m < B.dim(); ++m) f.col(m) = flatten(x.inner[static_cast<std::size_t>(m)]);
  Index rank = numerical_rank(f, tol);
  rep.require("fullness", "span <X, X> = B", rank == B.dim(),
              "rank " + std::to_string(rank) + " of " + std::to_string(B.dim()));
  return rep;
}

BimodulePtr identity_bimodule(const AlgebraPtr& b) {
  const Index n = b->dim();
  std::vector<CMatrix> left, right, inner(static_cast<std::size_t>(n), CMatrix(n, n));
  for (Index k = 0; k < n; ++k) {
    left.push_back(b->left_multiplication(k));
    right.push_back(b->right_multiplication(k));
  }
  for (Index i = 0; i < n; ++i) {
    CMatrix li = b->left_multiplication_by(b->star(b->basis_vector(i)));
    for (Index m = 0; m < n; ++m) inner[static_cast<std::size_t>(m)].row(i) = li.row(m);
  }
  return make_bimodule(b, b, std::move(left), std::move(right), std::move(inner),
                       "id(" + b->name() + ")");
}

BimodulePtr bimodule_from_hom(const StarHom& phi, const Tolerance& tol) {
  CheckReport r = validate_star_hom(phi, tol);
  if (!r.passed()) throw MoritaError("InvalidHom", r.first_failure());
  BimodulePtr id = identity_bimodule(phi.target);
  std::vector<CMatrix> left;
  for (Index k = 0; k < phi.source->dim(); ++k)
    left.push_back(phi.target->left_multiplication_by(phi.map.col(k)));
  return make_bimodule(phi.source, phi.target, std::move(left), id->right_action, id->inner,
                       phi.target->name() + "_hom");
}

BimodulePtr column_module(Index n) {
  auto mn = MatrixAlgebra::canonical({n}, "M" + std::to_string(n));
  auto c = MatrixAlgebra::canonical({1}, "C");
  std::vector<CMatrix> left;
  for (Index k = 0; k < n * n; ++k) left.push_back(mn->basis_matrix(k));
  return make_bimodule(mn, c, std::move(left), {identity(n)}, {identity(n)},
                       "C" + std::to_string(n));
}

BimodulePtr pullback_left(const BimodulePtr& z, const StarHom& psi) {
  std::vector<CMatrix> left;
  for (Index k = 0; k < psi.source->dim(); ++k) left.push_back(z->act_left(psi.map.col(k)));
  return make_bimodule(psi.source, z->right, std::move(left), z->right_action, z->inner,
                       z->name + "^" + psi.source->name());
}

// ---- maps -------------------------------------------------------------------

BimoduleMap BimoduleMap::identity(const BimodulePtr& x) {
  return {x, x, morita::identity(x->dim)};
}

BimoduleMap BimoduleMap::after(const BimoduleMap& first) const {
  if (first.target->dim != source->dim) throw MoritaError("ShapeMismatch", "maps do not compose");
  return {first.source, target, map * first.map};
}

BimoduleMap BimoduleMap::inverse() const {
  if (map.rows() != map.cols()) throw MoritaError("Singular", "map is not square");
  Eigen::FullPivLU<CMatrix> lu(map);
  if (!lu.isInvertible()) throw MoritaError("Singular", "map is not invertible");
  return {target, source, lu.inverse()};
}

CheckReport validate_isomorphism(const BimoduleMap& f, const Tolerance& tol, std::uint64_t seed) {
  CheckReport rep("isomorphism " + f.source->name + " -> " + f.target->name);
  rep.seed = seed;
  const auto& X = *f.source;
  const auto& Y = *f.target;
  if (!same_algebra(X.left, Y.left) || !same_algebra(X.right, Y.right)) {
    rep.require("algebras", "same coefficient algebras", false);
    return rep;
  }
  if (f.map.rows() != Y.dim || f.map.cols() != X.dim || X.dim != Y.dim) {
    rep.require("bijective", "square map", false, "shape mismatch");
    return rep;
  }
  double smin = X.dim ? smallest_singular_value(f.map) : 1.0;
  rep.add("bijective", "smallest singular value", std::max(0.0, tol.rank_cutoff() - smin), 0.0,
          "sigma_min " + std::to_string(smin));
  Rng rng(seed);
  double scale = 1.0 + max_abs(f.map);
  auto sa = element_samples(*X.left, rng);
  auto sb = element_samples(*X.right, rng);
  double ld = 0.0, rd = 0.0;
  for (const auto& a : sa)
    ld = std::max(ld, max_abs(CMatrix(f.map * X.act_left(a) - Y.act_left(a) * f.map)));
  for (const auto& b : sb)
    rd = std::max(rd, max_abs(CMatrix(f.map * X.act_right(b) - Y.act_right(b) * f.map)));
  rep.add("left linear", "Phi(a.x) = a.Phi(x)", ld, tol.bound(scale * scale));
  rep.add("right linear", "Phi(x.b) = Phi(x).b", rd, tol.bound(scale * scale));
  double id = 0.0;
  for (std::size_t m = 0; m < X.inner.size(); ++m)
    id = std::max(id, max_abs(CMatrix(f.map.adjoint() * Y.inner[m] * f.map - X.inner[m])));
  rep.add("inner product", "<Phi x, Phi y> = <x, y>", id, tol.bound(scale * scale));
  return rep;
}

// ---- tensor products --------------------------------------------------------

CMatrix apply_first_factor(const CMatrix& a, const CMatrix& v, Index d2) {
  CMatrix out(a.rows() * d2, v.cols());
  const Index d1 = a.cols();
  for (Index c = 0; c < v.cols(); ++c) {
    CVector col = v.col(c);
    Eigen::Map<const RowMat> m(col.data(), d1, d2);
    RowMat r = a * m;
    out.col(c) = Eigen::Map<const CVector>(r.data(), r.size());
  }
  return out;
}

CMatrix apply_second_factor(const CMatrix& b, const CMatrix& v, Index d1) {
  CMatrix out(d1 * b.rows(), v.cols());
  const Index d2 = b.cols();
  for (Index c = 0; c < v.cols(); ++c) {
    CVector col = v.col(c);
    Eigen::Map<const RowMat> m(col.data(), d1, d2);
    RowMat r = m * b.transpose();
    out.col(c) = Eigen::Map<const CVector>(r.data(), r.size());
  }
  return out;
}

TensorProduct tensor_product(const BimodulePtr& x, const BimodulePtr& y, const Tolerance& tol) {
  if (!same_algebra(x->right, y->left))
    throw MoritaError("MiddleMismatch", x->right->name() + " vs " + y->left->name());
  const Index dx = x->dim, dy = y->dim;
  const Algebra& B = *x->right;
  CMatrix ty = y->scalar_gram(y->right->trace_functional());
  CMatrix s = CMatrix::Zero(dx * dy, dx * dy);
  for (Index m = 0; m < B.dim(); ++m) {
    const CMatrix& g = x->inner[static_cast<std::size_t>(m)];
    if (max_abs(g) == 0.0) continue;
    s += kron(g, CMatrix(ty * y->left_action[static_cast<std::size_t>(m)]));
  }
  PositivePart pp = positive_part(s, tol);
  const CMatrix& v = pp.vectors;
  const CMatrix vh = v.adjoint();

  std::vector<CMatrix> left, right, inner;
  for (const auto& l : x->left_action) left.push_back(vh * apply_first_factor(l, v, dy));
  for (const auto& r : y->right_action) right.push_back(vh * apply_second_factor(r, v, dx));
  CMatrix u = CMatrix::Zero(dx * dy, v.cols());
  for (Index m = 0; m < B.dim(); ++m) {
    const CMatrix& g = x->inner[static_cast<std::size_t>(m)];
    if (max_abs(g) == 0.0) continue;
    u += apply_both(g, y->left_action[static_cast<std::size_t>(m)], v, dx, dy);
  }
  for (const auto& g : y->inner) inner.push_back(vh * apply_second_factor(g, u, dx));

  TensorProduct t;
  t.first = x;
  t.second = y;
  t.result = make_bimodule(x->left, y->right, std::move(left), std::move(right), std::move(inner),
                           "(" + x->name + "*" + y->name + ")");
  t.quotient = v;
  return t;
}

BimodulePtr tensor(const BimodulePtr& x, const BimodulePtr& y, const Tolerance& tol) {
  return tensor_product(x, y, tol).result;
}

BimoduleMap tensor_map(const TensorProduct& src, const TensorProduct& dst, const BimoduleMap& f,
                       const BimoduleMap& g) {
  CMatrix step = apply_second_factor(g.map, src.quotient, src.first->dim);
  step = apply_first_factor(f.map, step, dst.second->dim);
  return {src.result, dst.result, dst.quotient.adjoint() * step};
}

BimoduleMap associator(const TensorProduct& xy, const TensorProduct& xy_z, const TensorProduct& yz,
                       const TensorProduct& x_yz) {
  const Index dz = xy_z.second->dim;
  const Index dx = xy.first->dim;
  CMatrix step = apply_first_factor(xy.quotient, xy_z.quotient, dz);
  step = apply_second_factor(yz.quotient.adjoint(), step, dx);
  return {xy_z.result, x_yz.result, x_yz.quotient.adjoint() * step};
}

BimoduleMap descend(const TensorProduct& src, const BimodulePtr& target, const CMatrix& elementary) {
  return {src.result, target, elementary * src.quotient};
}

BimoduleMap left_unitor(const TensorProduct& c_psi_z, const StarHom& psi) {
  const auto& z = *c_psi_z.second;
  const Index dc = c_psi_z.first->dim, dz = z.dim;
  CMatrix e(dz, dc * dz);
  for (Index l = 0; l < dc; ++l)
    e.middleCols(l * dz, dz) = z.left_action[static_cast<std::size_t>(l)];
  return descend(c_psi_z, pullback_left(c_psi_z.second, psi), e);
}

BimoduleMap right_unitor(const TensorProduct& x_b) {
  const auto& x = *x_b.first;
  const Index dx = x.dim, db = x_b.second->dim;
  CMatrix e(dx, dx * db);
  for (Index i = 0; i < dx; ++i)
    for (Index m = 0; m < db; ++m) e.col(i * db + m) = x.right_action[static_cast<std::size_t>(m)].col(i);
  return descend(x_b, x_b.first, e);
}

// ---- standard form ----------------------------------------------------------

Index StandardForm::compact_dim() const {
  Index s = 0;
  for (Index k : multiplicities) s += k * k;
  return s;
}

StandardForm standard_form(const RightHilbertBimodule& x, const Tolerance& tol) {
  const StructureIso& st = x.right->structure();
  const Index d = x.dim;
  StandardForm sf;
  sf.block_sizes = st.block_sizes;
  std::vector<CMatrix> qs;
  std::vector<CMatrix> columns;
  for (Index j = 0; j < st.block_count(); ++j) {
    CVector fj = st.forward.map.row(st.block_offset(j)).transpose();
    CMatrix q = x.scalar_gram(fj);
    CMatrix w = range_basis(x.act_right(st.matrix_units[static_cast<std::size_t>(j)][0]), tol);
    const Index k = w.cols();
    if (k > 0) {
      CMatrix gram = w.adjoint() * q * w;
      gram = CMatrix(0.5 * (gram + gram.adjoint()));
      Eigen::LLT<CMatrix> llt(gram);
      if (llt.info() != Eigen::Success)
        throw MoritaError("DecompositionFailed", "corner form is not positive definite");
      CMatrix linv = llt.matrixL().solve(identity(k));
      w = w * linv.adjoint();
    }
    const Index n = st.block_sizes[static_cast<std::size_t>(j)];
    for (Index i = 0; i < k; ++i)
      for (Index qq = 0; qq < n; ++qq)
        columns.push_back(x.act_right(st.matrix_units[static_cast<std::size_t>(j)][static_cast<std::size_t>(qq)]) *
                          w.col(i));
    sf.multiplicities.push_back(k);
    sf.generators.push_back(w);
    sf.corner_functionals.push_back(fj);
    qs.push_back(q);
  }
  if (static_cast<Index>(columns.size()) != d)
    throw MoritaError("DecompositionFailed", "module does not split into row modules (" +
                                                 std::to_string(columns.size()) + " of " +
                                                 std::to_string(d) + ")");
  sf.basis.resize(d, d);
  for (Index c = 0; c < d; ++c) sf.basis.col(c) = columns[static_cast<std::size_t>(c)];
  Eigen::FullPivLU<CMatrix> lu(sf.basis);
  if (!lu.isInvertible()) throw MoritaError("DecompositionFailed", "standard basis is singular");
  sf.basis_inverse = lu.inverse();

  std::vector<Index> ks;
  for (Index k : sf.multiplicities)
    if (k > 0) ks.push_back(k);
  sf.compact_canonical = MatrixAlgebra::canonical(ks, "K(" + x.name + ")");
  CMatrix kmap(sf.compact_dim(), x.left->dim());
  for (Index a = 0; a < x.left->dim(); ++a) {
    const CMatrix& l = x.left_action[static_cast<std::size_t>(a)];
    Index row = 0;
    for (std::size_t j = 0; j < sf.generators.size(); ++j) {
      const CMatrix& w = sf.generators[j];
      if (w.cols() == 0) continue;
      CMatrix blk = w.adjoint() * qs[j] * l * w;
      for (Index i = 0; i < w.cols(); ++i)
        for (Index i2 = 0; i2 < w.cols(); ++i2) kmap(row++, a) = blk(i, i2);
    }
  }
  sf.kappa = {x.left, sf.compact_canonical, kmap};

  const StructureIso& sa = x.left->structure();
  sf.table.assign(static_cast<std::size_t>(sa.block_count()),
                  std::vector<Index>(sf.multiplicities.size(), 0));
  for (Index i = 0; i < sa.block_count(); ++i) {
    CVector img = kmap * sa.central_projections[static_cast<std::size_t>(i)];
    Index row = 0;
    for (std::size_t j = 0; j < sf.multiplicities.size(); ++j) {
      const Index k = sf.multiplicities[j];
      Complex tr = 0.0;
      for (Index p = 0; p < k; ++p) tr += img(row + p * k + p);
      row += k * k;
      double m = tr.real() / static_cast<double>(sa.block_sizes[static_cast<std::size_t>(i)]);
      sf.table[static_cast<std::size_t>(i)][j] = static_cast<Index>(std::llround(m));
    }
  }
  return sf;
}

IsomorphismSearch find_isomorphism(const BimodulePtr& x, const BimodulePtr& y, const Tolerance& tol,
                                   std::uint64_t seed) {
  IsomorphismSearch out;
  if (!same_algebra(x->left, y->left) || !same_algebra(x->right, y->right)) {
    out.obstruction = "coefficient algebras differ";
    return out;
  }
  if (x->dim != y->dim) {
    out.obstruction = "dimensions differ: " + std::to_string(x->dim) + " vs " + std::to_string(y->dim);
    return out;
  }
  StandardForm sx = standard_form(*x, tol);
  StandardForm sy = standard_form(*y, tol);
  if (sx.multiplicities != sy.multiplicities || sx.table != sy.table) {
    std::string tx, ty;
    for (const auto& r : sx.table) tx += index_list(r);
    for (const auto& r : sy.table) ty += index_list(r);
    out.obstruction = "multiplicity tables differ: k " + index_list(sx.multiplicities) + " table " +
                      tx + " vs k " + index_list(sy.multiplicities) + " table " + ty;
    return out;
  }
  StarHom ky{sy.kappa.source, sx.kappa.target, sy.kappa.map};
  UnitaryEquivalence ue = hom_unitary_equivalence(sx.kappa, ky, tol, seed);
  if (!ue.unitary) {
    out.obstruction = "left multiplicity tables differ: " + ue.obstruction;
    return out;
  }
  CMatrix umat = sx.compact_canonical->to_matrix(*ue.unitary);
  std::vector<CMatrix> blocks;
  Index off = 0;
  for (std::size_t j = 0; j < sx.multiplicities.size(); ++j) {
    const Index k = sx.multiplicities[j];
    if (k == 0) continue;
    blocks.push_back(kron(umat.block(off, off, k, k), identity(sx.block_sizes[j])));
    off += k;
  }
  CMatrix dmat = block_diagonal(blocks);
  BimoduleMap phi{x, y, sy.basis * dmat * sx.basis_inverse};
  CheckReport r = validate_isomorphism(phi, tol, seed);
  out.defect = r.max_defect();
  if (!r.passed()) {
    out.obstruction = "constructed map fails: " + r.first_failure();
    return out;
  }
  out.map = phi;
  return out;
}

// ---- compacts and imprimitivity --------------------------------------------

CMatrix CompactOperators::theta_matrix(const CVector& x, const CVector& y) const {
  const auto& m = *module;
  CMatrix out = CMatrix::Zero(m.dim, m.dim);
  for (std::size_t k = 0; k < m.inner.size(); ++k)
    out += (m.right_action[k] * x) * (y.adjoint() * m.inner[k]);
  return out;
}

CVector CompactOperators::theta(const CVector& x, const CVector& y) const {
  return algebra->to_coords(theta_matrix(x, y));
}

CompactOperators compact_operators(const BimodulePtr& x, const Tolerance& tol) {
  CompactOperators co;
  co.owner = x;
  co.module = x.get();
  co.form = standard_form(*x, tol);
  std::vector<CMatrix> basis;
  for (const auto& w : co.form.generators)
    for (Index i = 0; i < w.cols(); ++i)
      for (Index i2 = 0; i2 < w.cols(); ++i2) basis.push_back(co.theta_matrix(w.col(i), w.col(i2)));
  co.algebra = MatrixAlgebra::create(std::move(basis), "K(" + x->name + ")", tol);
  co.kappa = {x->left, co.algebra, co.form.kappa.map};
  return co;
}

Imprimitivity is_imprimitivity(const BimodulePtr& xp, const Tolerance& tol, std::uint64_t seed) {
  Imprimitivity out;
  out.report = CheckReport("imprimitivity " + xp->name);
  out.report.seed = seed;
  const auto& x = *xp;
  const Index d = x.dim;
  StandardForm sf = standard_form(x, tol);
  const Index da = x.left->dim();
  Index rank = numerical_rank(sf.kappa.map, tol);
  bool injective = rank == da;
  bool onto = sf.compact_dim() == da;
  bool full = std::all_of(sf.multiplicities.begin(), sf.multiplicities.end(),
                          [](Index k) { return k > 0; });
  out.report.require("kappa injective", "kernel of A -> K(X)", injective,
                     "rank " + std::to_string(rank) + " of " + std::to_string(da));
  out.report.require("kappa onto", "dim A = dim K(X)", onto,
                     std::to_string(da) + " vs " + std::to_string(sf.compact_dim()));
  out.report.require("full", "every block of B occurs", full, index_list(sf.multiplicities));
  if (!(injective && onto && full)) {
    out.reason = out.report.first_failure();
    return out;
  }

  // A<e_i, e_j> = kappa^{-1}(Theta_{e_i, e_j}), with Theta read in the
  // matrix-unit coordinates of each block.
  const Index kd = sf.compact_dim();
  std::vector<CMatrix> cmats(static_cast<std::size_t>(kd), CMatrix::Zero(d, d));
  {
    Index row = 0;
    for (std::size_t j = 0; j < sf.generators.size(); ++j) {
      const CMatrix& w = sf.generators[j];
      CMatrix q = x.scalar_gram(sf.corner_functionals[j]);
      for (Index p = 0; p < w.cols(); ++p) {
        CVector wq = (w.col(p).adjoint() * q).transpose();
        for (Index p2 = 0; p2 < w.cols(); ++p2) {
          CMatrix& c = cmats[static_cast<std::size_t>(row++)];
          for (std::size_t m = 0; m < x.inner.size(); ++m) {
            CVector a = x.right_action[m].transpose() * wq;
            CVector b = x.inner[m] * w.col(p2);
            c += a * b.transpose();
          }
        }
      }
    }
  }
  CMatrix kinv = sf.kappa.map.fullPivLu().inverse();
  out.left_inner.assign(static_cast<std::size_t>(da), CMatrix::Zero(d, d));
  for (Index k = 0; k < da; ++k)
    for (Index r = 0; r < kd; ++r)
      if (kinv(k, r) != Complex(0.0, 0.0))
        out.left_inner[static_cast<std::size_t>(k)] += kinv(k, r) * cmats[static_cast<std::size_t>(r)];

  Rng rng(seed);
  std::vector<std::pair<Index, Index>> pairs;
  if (d <= kExhaustiveModule) {
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) pairs.emplace_back(i, j);
  } else {
    for (Index s = 0; s < 64; ++s)
      pairs.emplace_back(static_cast<Index>(rng.index(static_cast<std::size_t>(d))),
                         static_cast<Index>(rng.index(static_cast<std::size_t>(d))));
  }
  double scale = 1.0 + family_scale(x.inner) + family_scale(x.left_action);
  double c1 = 0.0, c2 = 0.0;
  std::vector<CVector> sb = element_samples(*x.right, rng);
  for (auto [i, j] : pairs) {
    CVector coeffs(da);
    for (Index k = 0; k < da; ++k) coeffs(k) = out.left_inner[static_cast<std::size_t>(k)](i, j);
    c1 = std::max(c1, max_abs(CMatrix(x.act_left(coeffs) - theta_basis(x, i, j))));
    // A<x.b, y> = A<x, y.b*>
    for (const auto& b : sb) {
      CMatrix rb = x.act_right(b);
      CMatrix rbs = x.act_right(x.right->star(b));
      for (Index k = 0; k < da; ++k) {
        const CMatrix& h = out.left_inner[static_cast<std::size_t>(k)];
        Complex lhs = (rb.col(i).transpose() * h.col(j)).value();
        Complex rhs = (h.row(i) * rbs.col(j).conjugate()).value();
        c2 = std::max(c2, std::abs(lhs - rhs));
      }
    }
  }
  out.report.add("left compatibility", "A<x, y>.z = x.<y, z>B", c1, tol.bound(scale * scale * scale));
  out.report.add("right compatibility", "A<x.b, y> = A<x, y.b*>", c2, tol.bound(scale * scale * scale));

  std::vector<CMatrix> rl, rr;
  for (Index m = 0; m < x.right->dim(); ++m)
    rl.push_back(x.act_right(x.right->star(x.right->basis_vector(m))).conjugate());
  for (Index k = 0; k < da; ++k)
    rr.push_back(x.act_left(x.left->star(x.left->basis_vector(k))).conjugate());
  out.reverse = make_bimodule(x.right, x.left, std::move(rl), std::move(rr), out.left_inner,
                              "rev(" + x.name + ")");
  out.report.merge(validate_bimodule(*out.reverse, tol, seed), "reverse: ");
  out.flag = out.report.passed();
  if (!out.flag) out.reason = out.report.first_failure();
  return out;
}

Factorization factor_morphism(const BimodulePtr& x, const Tolerance& tol, std::uint64_t seed) {
  Factorization f;
  f.report = CheckReport("factorization " + x->name);
  f.report.seed = seed;
  CompactOperators co = compact_operators(x, tol);
  f.algebra = co.algebra;
  f.phi = co.kappa;
  f.report.merge(validate_star_hom(f.phi, tol, seed), "phi: ");
  std::vector<CMatrix> left = co.algebra->basis();
  f.imprimitivity = make_bimodule(co.algebra, x->right, std::move(left), x->right_action, x->inner,
                                  "K" + x->name);
  Imprimitivity imp = is_imprimitivity(f.imprimitivity, tol, seed);
  f.report.require("imprimitivity", "Y is a C-B imprimitivity bimodule", imp.flag, imp.reason);
  f.hom_module = bimodule_from_hom(f.phi, tol);
  f.composite = tensor_product(f.hom_module, f.imprimitivity, tol);
  BimoduleMap u = left_unitor(f.composite, f.phi);
  f.iso = {f.composite.result, x, u.map};
  f.report.merge(validate_isomorphism(f.iso, tol, seed), "unitor: ");
  IsomorphismSearch s = find_isomorphism(f.composite.result, x, tol, seed);
  f.report.require("search", "C_phi (x) Y = X", static_cast<bool>(s), s.obstruction);
  return f;
}

// ---- representations --------------------------------------------------------

BimoduleRepresentation induce_representation(const BimodulePtr& x, const Representation& pi_b,
                                             const Tolerance& tol) {
  CheckReport vr = validate_representation(pi_b, tol);
  if (!vr.passed()) throw MoritaError("InvalidRepresentation", vr.first_failure());
  if (!same_algebra(pi_b.algebra, x->right))
    throw MoritaError("InvalidRepresentation", "representation of the wrong algebra");
  const Index d = x->dim, nb = pi_b.dim;
  CMatrix s = CMatrix::Zero(d * nb, d * nb);
  for (Index m = 0; m < x->right->dim(); ++m)
    s += kron(x->inner[static_cast<std::size_t>(m)], pi_b.images[static_cast<std::size_t>(m)]);
  PositivePart pp = positive_part(s, tol);
  const Index na = pp.values.size();
  RVector sq = pp.values.cwiseSqrt();
  RVector isq = sq.cwiseInverse();
  BimoduleRepresentation r;
  r.module = x;
  r.pi_b = pi_b;
  r.embed = pp.vectors * sq.cast<Complex>().asDiagonal();
  CMatrix vh = pp.vectors.adjoint();
  r.pi_a.algebra = x->left;
  r.pi_a.dim = na;
  for (const auto& l : x->left_action) {
    CMatrix m = apply_first_factor(l, pp.vectors, nb);
    r.pi_a.images.push_back(sq.cast<Complex>().asDiagonal() * (vh * m) *
                            isq.cast<Complex>().asDiagonal());
  }
  for (Index i = 0; i < d; ++i)
    r.pi_x.push_back(sq.cast<Complex>().asDiagonal() * vh.middleCols(i * nb, nb));
  return r;
}

CheckReport validate_bimodule_representation(const BimoduleRepresentation& r, const Tolerance& tol,
                                             std::uint64_t seed) {
  CheckReport rep("bimodule representation " + r.module->name);
  rep.seed = seed;
  const auto& x = *r.module;
  const Index d = x.dim;
  rep.merge(validate_representation(r.pi_a, tol, seed), "pi_A: ");
  rep.merge(validate_representation(r.pi_b, tol, seed), "pi_B: ");
  double scale = 1.0 + family_scale(r.pi_x) + family_scale(x.left_action) + family_scale(x.right_action);
  auto pix = [&](const CVector& v) { return combine(r.pi_x, v, r.pi_a.dim, r.pi_b.dim); };
  double d1 = 0.0, d2 = 0.0, d3 = 0.0;
  for (Index k = 0; k < x.left->dim(); ++k) {
    const CMatrix& l = x.left_action[static_cast<std::size_t>(k)];
    for (Index i = 0; i < d; ++i)
      d1 = std::max(d1, max_abs(CMatrix(pix(l.col(i)) - r.pi_a.images[static_cast<std::size_t>(k)] *
                                                           r.pi_x[static_cast<std::size_t>(i)])));
  }
  for (Index m = 0; m < x.right->dim(); ++m) {
    const CMatrix& rm = x.right_action[static_cast<std::size_t>(m)];
    for (Index i = 0; i < d; ++i)
      d2 = std::max(d2, max_abs(CMatrix(pix(rm.col(i)) - r.pi_x[static_cast<std::size_t>(i)] *
                                                            r.pi_b.images[static_cast<std::size_t>(m)])));
  }
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      CMatrix g = CMatrix::Zero(r.pi_b.dim, r.pi_b.dim);
      for (Index m = 0; m < x.right->dim(); ++m)
        g += x.inner[static_cast<std::size_t>(m)](i, j) * r.pi_b.images[static_cast<std::size_t>(m)];
      d3 = std::max(d3, max_abs(CMatrix(g - r.pi_x[static_cast<std::size_t>(i)].adjoint() *
                                                r.pi_x[static_cast<std::size_t>(j)])));
    }
  rep.add("left covariance", "pi_X(a.x) = pi_A(a) pi_X(x)", d1, tol.bound(scale * scale));
  rep.add("right covariance", "pi_X(x.b) = pi_X(x) pi_B(b)", d2, tol.bound(scale * scale));
  rep.add("inner product", "pi_B(<x, y>) = pi_X(x)* pi_X(y)", d3, tol.bound(scale * scale));

  CMatrix stacked(r.pi_b.dim * r.pi_b.dim, x.right->dim());
  for (Index m = 0; m < x.right->dim(); ++m)
    stacked.col(m) = flatten(r.pi_b.images[static_cast<std::size_t>(m)]);
  bool faithful = numerical_rank(stacked, tol) == x.right->dim();
  if (faithful && d > 0) {
    StandardForm sf = standard_form(x, tol);
    const Index nb = r.pi_b.dim;
    CMatrix eh = r.embed.adjoint();
    CMatrix ginv = CMatrix(eh * r.embed).inverse();
    double lem = 0.0;
    std::vector<CMatrix> products;
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) {
        CMatrix prod = r.pi_x[static_cast<std::size_t>(i)] * r.pi_x[static_cast<std::size_t>(j)].adjoint();
        products.push_back(prod);
        // pi_K(Theta) computed through the quotient, as pi_A is.
        CMatrix t = theta_basis(x, i, j);
        CMatrix rep_t = eh * apply_first_factor(t, r.embed, nb) * ginv;
        lem = std::max(lem, max_abs(CMatrix(rep_t - prod)));
      }
    rep.add("rank-one operators", "pi(Theta_{x,y}) = pi_X(x) pi_X(y)*", lem, tol.bound(scale * scale * scale));
    CMatrix span(r.pi_a.dim * r.pi_a.dim, static_cast<Index>(products.size()));
    for (std::size_t c = 0; c < products.size(); ++c) span.col(static_cast<Index>(c)) = flatten(products[c]);
    Index rk = numerical_rank(span, tol);
    rep.require("compacts span", "dim span pi_X(X) pi_X(X)* = dim K(X)", rk == sf.compact_dim(),
                std::to_string(rk) + " vs " + std::to_string(sf.compact_dim()));
  }
  return rep;
}

// ---- linking algebra --------------------------------------------------------

StarHom LinkingAlgebra::embed_left() const {
  const Index da = base->left->dim();
  CMatrix m = CMatrix::Zero(algebra->dim(), da);
  m.block(a_offset, 0, da, da) = identity(da);
  return {base->left, algebra, m};
}

StarHom LinkingAlgebra::embed_right() const {
  const Index db = base->right->dim();
  CMatrix m = CMatrix::Zero(algebra->dim(), db);
  m.block(b_offset, 0, db, db) = identity(db);
  return {base->right, algebra, m};
}

CVector LinkingAlgebra::embed_module(const CVector& x) const {
  CVector out = CVector::Zero(algebra->dim());
  out.segment(x_offset, x.size()) = x;
  return out;
}

CVector LinkingAlgebra::embed_reverse(const CVector& x) const {
  CVector out = CVector::Zero(algebra->dim());
  out.segment(xt_offset, x.size()) = x.conjugate();
  return out;
}

LinkingAlgebra linking_algebra(const BimodulePtr& x, const Tolerance& tol, std::uint64_t seed) {
  Imprimitivity imp = is_imprimitivity(x, tol, seed);
  if (!imp.flag) throw MoritaError("NotImprimitivity", imp.reason);
  LinkingAlgebra l;
  l.base = x;
  l.rep = induce_representation(x, Representation::ambient(x->right), tol);
  const Index na = l.rep.pi_a.dim, nb = l.rep.pi_b.dim, n = na + nb;
  const Index da = x->left->dim(), db = x->right->dim(), d = x->dim;
  std::vector<CMatrix> basis;
  for (const auto& m : l.rep.pi_a.images) {
    CMatrix e = CMatrix::Zero(n, n);
    e.topLeftCorner(na, na) = m;
    basis.push_back(e);
  }
  for (const auto& m : l.rep.pi_x) {
    CMatrix e = CMatrix::Zero(n, n);
    e.topRightCorner(na, nb) = m;
    basis.push_back(e);
  }
  for (const auto& m : l.rep.pi_x) {
    CMatrix e = CMatrix::Zero(n, n);
    e.bottomLeftCorner(nb, na) = m.adjoint();
    basis.push_back(e);
  }
  for (const auto& m : l.rep.pi_b.images) {
    CMatrix e = CMatrix::Zero(n, n);
    e.bottomRightCorner(nb, nb) = m;
    basis.push_back(e);
  }
  l.a_offset = 0;
  l.x_offset = da;
  l.xt_offset = da + d;
  l.b_offset = da + 2 * d;
  l.algebra = MatrixAlgebra::create(std::move(basis), "L(" + x->name + ")", tol);
  l.p = CVector::Zero(l.algebra->dim());
  l.p.segment(l.a_offset, da) = x->left->unit();
  l.q = CVector::Zero(l.algebra->dim());
  l.q.segment(l.b_offset, db) = x->right->unit();
  return l;
}

BimodulePtr linking_module(const LinkingAlgebra& l) {
  const auto& x = *l.base;
  const Algebra& B = *x.right;
  const Index d = x.dim, db = B.dim(), n = d + db;
  BimodulePtr bb = identity_bimodule(x.right);
  std::vector<CMatrix> left;
  for (const auto& m : x.left_action) {
    CMatrix e = CMatrix::Zero(n, n);
    e.topLeftCorner(d, d) = m;
    left.push_back(e);
  }
  for (Index i = 0; i < d; ++i) {
    CMatrix e = CMatrix::Zero(n, n);
    for (Index m = 0; m < db; ++m) e.block(0, d + m, d, 1) = x.right_action[static_cast<std::size_t>(m)].col(i);
    left.push_back(e);
  }
  for (Index i = 0; i < d; ++i) {
    CMatrix e = CMatrix::Zero(n, n);
    for (Index m = 0; m < db; ++m) e.block(d + m, 0, 1, d) = x.inner[static_cast<std::size_t>(m)].row(i);
    left.push_back(e);
  }
  for (const auto& m : bb->left_action) {
    CMatrix e = CMatrix::Zero(n, n);
    e.bottomRightCorner(db, db) = m;
    left.push_back(e);
  }
  std::vector<CMatrix> right, inner;
  for (Index m = 0; m < db; ++m) {
    right.push_back(block_diagonal({x.right_action[static_cast<std::size_t>(m)], bb->right_action[static_cast<std::size_t>(m)]}));
    inner.push_back(block_diagonal({x.inner[static_cast<std::size_t>(m)], bb->inner[static_cast<std::size_t>(m)]}));
  }
  return make_bimodule(l.algebra, x.right, std::move(left), std::move(right), std::move(inner),
                       x.name + "+" + B.name());
}

// ---- corners ------------------------------------------------------------------

Corner corner_along(const BimodulePtr& z, const StarHom& iota_e, const StarHom& iota_f,
                    const CVector& p, const CVector& q, const Tolerance& tol) {
  CMatrix proj = z->act_left(p) * z->act_right(q);
  Corner c;
  c.embed = range_basis(proj, tol);
  const CMatrix& w = c.embed;
  const CMatrix wh = w.adjoint();
  std::vector<CMatrix> left, right, raw;
  for (Index k = 0; k < iota_e.source->dim(); ++k) left.push_back(wh * z->act_left(iota_e.map.col(k)) * w);
  for (Index m = 0; m < iota_f.source->dim(); ++m) right.push_back(wh * z->act_right(iota_f.map.col(m)) * w);
  for (const auto& g : z->inner) raw.push_back(wh * g * w);
  // Pull the inner products back along iota_F by least squares.
  Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(iota_f.map);
  CMatrix pinv = cod.pseudoInverse();
  CMatrix resid = identity(iota_f.map.rows()) - iota_f.map * pinv;
  const Index dc = w.cols();
  std::vector<CMatrix> inner;
  for (Index k = 0; k < iota_f.source->dim(); ++k) {
    CVector row = pinv.row(k).transpose();
    inner.push_back(combine(raw, row, dc, dc));
  }
  double defect = 0.0;
  for (Index n = 0; n < resid.rows(); ++n) {
    CVector row = resid.row(n).transpose();
    defect = std::max(defect, max_abs(combine(raw, row, dc, dc)));
  }
  c.inner_defect = defect;
  c.module = make_bimodule(iota_e.source, iota_f.source, std::move(left), std::move(right),
                           std::move(inner), "corner(" + z->name + ")");
  return c;
}

namespace {

std::shared_ptr<const MatrixAlgebra> corner_algebra(const Algebra& e, const CVector& p,
                                                    const std::string& name, const Tolerance& tol) {
  CMatrix pm = e.to_matrix(p);
  std::vector<CMatrix> family;
  for (Index k = 0; k < e.dim(); ++k) family.push_back(pm * e.basis_matrix(k) * pm);
  // E P E must span E.
  CMatrix span(e.dim(), e.dim() * e.dim());
  for (Index i = 0; i < e.dim(); ++i)
    for (Index j = 0; j < e.dim(); ++j)
      span.col(i * e.dim() + j) = e.multiply(e.basis_vector(i), e.multiply(p, e.basis_vector(j)));
  Index rk = numerical_rank(span, tol);
  if (rk != e.dim())
    throw MoritaError("NotFull", "projection in " + e.name() + " spans " + std::to_string(rk) +
                                     " of " + std::to_string(e.dim()));
  return MatrixAlgebra::spanned_by(family, name, tol);
}

}  // namespace

Corner corner(const BimodulePtr& z, const CVector& p, const CVector& q, const Tolerance& tol) {
  const Algebra& e = *z->left;
  const Algebra& f = *z->right;
  auto ep = corner_algebra(e, p, "P" + e.name() + "P", tol);
  auto fq = corner_algebra(f, q, "Q" + f.name() + "Q", tol);
  CMatrix ie(e.dim(), ep->dim()), jf(f.dim(), fq->dim());
  for (Index k = 0; k < ep->dim(); ++k) ie.col(k) = e.to_coords(ep->basis()[static_cast<std::size_t>(k)]);
  for (Index k = 0; k < fq->dim(); ++k) jf.col(k) = f.to_coords(fq->basis()[static_cast<std::size_t>(k)]);
  return corner_along(z, {ep, z->left, ie}, {fq, z->right, jf}, p, q, tol);
}

}  // namespace morita
