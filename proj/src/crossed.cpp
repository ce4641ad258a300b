#include "morita/crossed.hpp"

#include <algorithm>

namespace morita {

namespace {

constexpr Index kExhaustivePairs = 1024;
constexpr int kSamples = 6;

bool same_action(const GroupAction& a, const GroupAction& b) {
  if (!same_algebra(a.algebra, b.algebra)) return false;
  if (a.group != b.group && a.group->mult != b.group->mult) return false;
  for (std::size_t s = 0; s < a.maps.size(); ++s)
    if (max_abs(CMatrix(a.maps[s].map - b.maps[s].map)) > 1e-12) return false;
  return true;
}

std::vector<std::pair<CVector, CVector>> sample_pairs(const Algebra& a, std::uint64_t seed) {
  std::vector<std::pair<CVector, CVector>> out;
  const Index n = a.dim();
  if (n * n <= kExhaustivePairs) {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) out.emplace_back(a.basis_vector(i), a.basis_vector(j));
    return out;
  }
  Rng rng(seed);
  for (int k = 0; k < 4 * kSamples; ++k) out.emplace_back(rng.complex_vector(n), rng.complex_vector(n));
  return out;
}

}  // namespace

// ---- the algebra ----------------------------------------------------------------

CrossedProductAlgebra::CrossedProductAlgebra(PassKey, GroupAction alpha)
    : Algebra(alpha.algebra->dim() * alpha.group->order,
              alpha.algebra->name() + "x|" + alpha.group->name),
      alpha_(std::move(alpha)),
      base_(alpha_.algebra),
      group_(alpha_.group) {
  CVector u = CVector::Zero(dim());
  u.segment(coord(group_->identity, 0), base_->dim()) = base_->unit();
  set_unit(u);
}

CrossedPtr CrossedProductAlgebra::create(const GroupAction& alpha) {
  if (static_cast<int>(alpha.maps.size()) != alpha.group->order)
    throw MoritaError("ActionInvalid", "one automorphism per group element is required");
  return std::make_shared<const CrossedProductAlgebra>(PassKey{}, alpha);
}

CVector CrossedProductAlgebra::multiply(const CVector& x, const CVector& y) const {
  const Index n = base_->dim();
  const FiniteGroup& g = *group_;
  CVector out = CVector::Zero(dim());
  for (int s = 0; s < g.order; ++s) {
    CVector xs = x.segment(coord(s, 0), n);
    if (max_abs(xs) == 0.0) continue;
    CMatrix ls = base_->left_multiplication_by(xs) * alpha_[s].map;
    for (int t = 0; t < g.order; ++t) {
      auto yt = y.segment(coord(t, 0), n);
      out.segment(coord(g(s, t), 0), n) += ls * yt;
    }
  }
  return out;
}

CVector CrossedProductAlgebra::star(const CVector& x) const {
  const Index n = base_->dim();
  const FiniteGroup& g = *group_;
  CVector out(dim());
  for (int s = 0; s < g.order; ++s) {
    int si = g.inverse[s];
    out.segment(coord(s, 0), n) = base_->star(alpha_[s].map * x.segment(coord(si, 0), n));
  }
  return out;
}

CMatrix CrossedProductAlgebra::to_matrix(const CVector& x) const {
  const Index n = base_->dim(), na = base_->ambient_dim();
  const FiniteGroup& g = *group_;
  CMatrix out = CMatrix::Zero(ambient_dim(), ambient_dim());
  for (int s = 0; s < g.order; ++s) {
    CVector xs = x.segment(coord(s, 0), n);
    if (max_abs(xs) == 0.0) continue;
    for (int t = 0; t < g.order; ++t) {
      int ti = g.inverse[t];
      int u = g(g.inverse[s], t);  // t u^-1 = s
      out.block(t * na, u * na, na, na) = base_->to_matrix(alpha_[ti].map * xs);
    }
  }
  return out;
}

CVector CrossedProductAlgebra::to_coords(const CMatrix& m) const {
  const Index n = base_->dim(), na = base_->ambient_dim();
  const FiniteGroup& g = *group_;
  const int e = g.identity;
  CVector out(dim());
  for (int s = 0; s < g.order; ++s)
    out.segment(coord(s, 0), n) = base_->to_coords(m.block(e * na, g.inverse[s] * na, na, na));
  return out;
}

CVector CrossedProductAlgebra::trace_functional() const {
  const Index n = base_->dim();
  CVector t = CVector::Zero(dim());
  CVector ta = base_->trace_functional();
  CVector sum = CVector::Zero(n);
  for (int s = 0; s < group_->order; ++s) sum += alpha_[s].map.transpose() * ta;
  t.segment(coord(group_->identity, 0), n) = sum;
  return t;
}

bool CrossedProductAlgebra::equals(const Algebra& other) const {
  if (this == &other) return true;
  auto* o = dynamic_cast<const CrossedProductAlgebra*>(&other);
  return o && same_action(alpha_, o->alpha_);
}

std::vector<CVector> CrossedProductAlgebra::function_view(const CVector& x) const {
  std::vector<CVector> f;
  for (int s = 0; s < group_->order; ++s) f.push_back(x.segment(coord(s, 0), base_->dim()));
  return f;
}

CVector CrossedProductAlgebra::from_function(const std::vector<CVector>& f) const {
  CVector x(dim());
  for (int s = 0; s < group_->order; ++s) x.segment(coord(s, 0), base_->dim()) = f[static_cast<std::size_t>(s)];
  return x;
}

StarHom CrossedProductAlgebra::i_a() const {
  CMatrix m = CMatrix::Zero(dim(), base_->dim());
  m.middleRows(coord(group_->identity, 0), base_->dim()) = identity(base_->dim());
  return {base_, handle(), m};
}

CVector CrossedProductAlgebra::i_g(int s) const {
  CVector x = CVector::Zero(dim());
  x.segment(coord(s, 0), base_->dim()) = base_->unit();
  return x;
}

Representation CrossedProductAlgebra::regular_pi() const {
  const Index na = base_->ambient_dim();
  const FiniteGroup& g = *group_;
  Representation r{base_, ambient_dim(), {}};
  for (Index k = 0; k < base_->dim(); ++k) {
    CMatrix m = CMatrix::Zero(ambient_dim(), ambient_dim());
    for (int t = 0; t < g.order; ++t)
      m.block(t * na, t * na, na, na) = base_->to_matrix(alpha_[g.inverse[t]].map.col(k));
    r.images.push_back(m);
  }
  return r;
}

std::vector<CMatrix> CrossedProductAlgebra::regular_u() const {
  const Index na = base_->ambient_dim();
  const FiniteGroup& g = *group_;
  std::vector<CMatrix> out;
  for (int s = 0; s < g.order; ++s) {
    CMatrix m = CMatrix::Zero(ambient_dim(), ambient_dim());
    for (int t = 0; t < g.order; ++t) m.block(t * na, g(g.inverse[s], t) * na, na, na) = identity(na);
    out.push_back(m);
  }
  return out;
}

CrossedPtr crossed_product(const GroupAction& alpha, const Tolerance& tol, std::uint64_t seed) {
  CheckReport r = validate_action(alpha, tol, seed);
  if (!r.passed()) throw MoritaError("ActionInvalid", r.first_failure());
  return CrossedProductAlgebra::create(alpha);
}

CheckReport validate_crossed_product(const CrossedProductAlgebra& cp, const Tolerance& tol,
                                     std::uint64_t seed) {
  CheckReport r("crossed product " + cp.name());
  r.seed = seed;
  const FiniteGroup& g = cp.group();
  const AlgebraPtr& a = cp.base();
  const Index n = a->dim();

  double cov = 0.0, cov_scale = 1.0;
  for (int s = 0; s < g.order; ++s) {
    CMatrix u = cp.to_matrix(cp.i_g(s));
    for (Index k = 0; k < n; ++k) {
      CVector ak = a->basis_vector(k);
      CMatrix lhs = cp.to_matrix(cp.i_a()(cp.action()[s](ak)));
      CMatrix rhs = u * cp.to_matrix(cp.i_a()(ak)) * u.adjoint();
      cov = std::max(cov, max_abs(CMatrix(lhs - rhs)));
      cov_scale = std::max(cov_scale, max_abs(rhs));
    }
  }
  r.add("covariance", "i_A(alpha_s(a)) = i_G(s) i_A(a) i_G(s)*", cov, tol.bound(cov_scale));

  double prod = 0.0, inv = 0.0, scale = 1.0;
  for (const auto& [x, y] : sample_pairs(cp, seed)) {
    CMatrix mx = cp.to_matrix(x), my = cp.to_matrix(y);
    CMatrix expect = mx * my;
    prod = std::max(prod, max_abs(CMatrix(cp.to_matrix(cp.multiply(x, y)) - expect)));
    inv = std::max(inv, max_abs(CMatrix(cp.to_matrix(cp.star(x)) - mx.adjoint())));
    scale = std::max(scale, max_abs(expect));
  }
  r.add("convolution", "function view is multiplicative", prod, tol.bound(scale));
  r.add("involution", "f*(s) = alpha_s(f(s^-1))*", inv, tol.bound(scale));
  r.add("unit", "delta_e is the identity",
        max_abs(CMatrix(cp.to_matrix(cp.unit()) - identity(cp.ambient_dim()))), tol.bound());

  CMatrix stacked(cp.ambient_dim() * cp.ambient_dim(), cp.dim());
  for (Index k = 0; k < cp.dim(); ++k) stacked.col(k) = flatten(cp.basis_matrix(k));
  Index rank = numerical_rank(stacked, tol);
  r.require("spanning", "i_A(a) i_G(s) span the crossed product", rank == cp.dim(),
            "rank " + std::to_string(rank));
  r.require("dimension", "dim = dim A |G|", cp.dim() == n * g.order);
  return r;
}

double covariance_defect(const Representation& pi, const std::vector<CMatrix>& u,
                         const GroupAction& alpha) {
  const FiniteGroup& g = *alpha.group;
  double d = 0.0;
  for (int s = 0; s < g.order; ++s) {
    const CMatrix& us = u[static_cast<std::size_t>(s)];
    d = std::max(d, unitary_defect(us));
    for (int t = 0; t < g.order; ++t)
      d = std::max(d, max_abs(CMatrix(us * u[static_cast<std::size_t>(t)] -
                                      u[static_cast<std::size_t>(g(s, t))])));
    for (Index k = 0; k < alpha.algebra->dim(); ++k) {
      CMatrix lhs = pi(alpha[s].map.col(k));
      CMatrix rhs = us * pi.images[static_cast<std::size_t>(k)] * us.adjoint();
      d = std::max(d, max_abs(CMatrix(lhs - rhs)));
    }
  }
  return d;
}

Representation integrate_covariant(const CrossedPtr& cp, const Representation& pi,
                                   const std::vector<CMatrix>& u, const Tolerance& tol) {
  if (!same_algebra(pi.algebra, cp->base()))
    throw MoritaError("NotCovariant", "representation of a different algebra");
  if (static_cast<int>(u.size()) != cp->group().order)
    throw MoritaError("NotCovariant", "one unitary per group element is required");
  double scale = 1.0;
  for (const auto& m : pi.images) scale = std::max(scale, max_abs(m));
  double d = covariance_defect(pi, u, cp->action());
  if (!tol.accepts(d, scale))
    throw MoritaError("NotCovariant", "covariance defect " + std::to_string(d));
  Representation r{cp, pi.dim, {}};
  for (int s = 0; s < cp->group().order; ++s)
    for (Index k = 0; k < cp->base_dim(); ++k)
      r.images.push_back(pi.images[static_cast<std::size_t>(k)] * u[static_cast<std::size_t>(s)]);
  return r;
}

// ---- bimodules ------------------------------------------------------------------

CrossedBimodule bimodule_crossed_product(const EquivariantBimodule& x, const Tolerance& tol,
                                         std::uint64_t seed) {
  CheckReport r = validate_equivariant(x, tol, seed);
  if (!r.passed()) throw MoritaError("ActionInvalid", r.first_failure());
  return bimodule_crossed_product(x, crossed_product(x.alpha, tol, seed),
                                  crossed_product(x.beta, tol, seed));
}

CrossedBimodule bimodule_crossed_product(const EquivariantBimodule& x, const CrossedPtr& left,
                                         const CrossedPtr& right) {
  if (!same_action(x.alpha, left->action()) || !same_action(x.beta, right->action()))
    throw MoritaError("ActionInvalid", "crossed products built from other actions");
  const auto& c = *x.carrier;
  const FiniteGroup& g = *x.group();
  const int n = g.order;
  const Index d = c.dim, dn = d * n, da = c.left->dim(), db = c.right->dim();
  std::vector<CMatrix> left_action, right_action, inner;
  for (int s = 0; s < n; ++s)
    for (Index k = 0; k < da; ++k) {
      CMatrix m = CMatrix::Zero(dn, dn);
      CMatrix lk = c.left_action[static_cast<std::size_t>(k)] * x.gamma[static_cast<std::size_t>(s)];
      for (int u = 0; u < n; ++u) m.block(u * d, g(g.inverse[s], u) * d, d, d) = lk;
      left_action.push_back(m);
    }
  for (int s = 0; s < n; ++s)
    for (Index k = 0; k < db; ++k) {
      CMatrix m = CMatrix::Zero(dn, dn);
      for (int u = 0; u < n; ++u) {
        int w = g(u, g.inverse[s]);
        m.block(u * d, w * d, d, d) = c.act_right(x.beta[w].map.col(k));
      }
      right_action.push_back(m);
    }
  for (int s = 0; s < n; ++s)
    for (Index k = 0; k < db; ++k) {
      CMatrix m = CMatrix::Zero(dn, dn);
      for (int t = 0; t < n; ++t) {
        const CMatrix& bt = x.beta[g.inverse[t]].map;
        CMatrix blk = CMatrix::Zero(d, d);
        for (Index j = 0; j < db; ++j)
          if (bt(k, j) != Complex(0.0)) blk += bt(k, j) * c.inner[static_cast<std::size_t>(j)];
        m.block(t * d, g(t, s) * d, d, d) = blk;
      }
      inner.push_back(m);
    }
  CrossedBimodule out{x, left, right, {}};
  out.carrier = make_bimodule(left, right, std::move(left_action), std::move(right_action),
                              std::move(inner), c.name + "x|" + g.name);
  return out;
}

CheckReport check_pairing_identity(const CrossedBimodule& x, const Tolerance& tol,
                                   std::uint64_t seed) {
  CheckReport r("pairing identity for " + x.carrier->name);
  r.seed = seed;
  const auto& base = *x.base.carrier;
  const CrossedProductAlgebra& cp = *x.right;
  const FiniteGroup& g = cp.group();
  Representation pi = cp.regular_pi();
  std::vector<CMatrix> u = cp.regular_u();
  Representation integrated = integrate_covariant(x.right, pi, u, tol);
  const Index d = base.dim, h = pi.dim;
  CMatrix s = CMatrix::Zero(d * h, d * h);
  for (std::size_t m = 0; m < base.inner.size(); ++m) s += kron(base.inner[m], pi.images[m]);

  Rng rng(seed);
  auto omega = [&](const CVector& f, const CVector& xi) {
    CVector w = CVector::Zero(d * h);
    for (int t = 0; t < g.order; ++t) {
      CVector us = u[static_cast<std::size_t>(t)] * xi;
      w += kron(CMatrix(f.segment(t * d, d)), CMatrix(us)).col(0);
    }
    return w;
  };
  double defect = 0.0, scale = 1.0;
  for (int k = 0; k < kSamples; ++k) {
    CVector hv = rng.complex_vector(x.carrier->dim), kv = rng.complex_vector(x.carrier->dim);
    CVector xi = rng.complex_vector(h), eta = rng.complex_vector(h);
    Complex lhs = omega(kv, eta).dot(s * omega(hv, xi));
    Complex rhs = eta.dot(integrated(x.carrier->inner_product(kv, hv)) * xi);
    defect = std::max(defect, std::abs(lhs - rhs));
    scale = std::max(scale, std::abs(rhs));
  }
  r.add("pairing", "(pi x U(<k, h>) xi | eta) = (omega_{h,xi} | omega_{k,eta})", defect,
        tol.bound(scale));
  return r;
}

StarHom hom_crossed_product(const StarHom& phi, const CrossedPtr& source, const CrossedPtr& target,
                            const Tolerance& tol) {
  if (!same_algebra(phi.source, source->base()) || !same_algebra(phi.target, target->base()))
    throw MoritaError("NotEquivariant", "homomorphism between other algebras");
  double d = equivariance_defect(phi, source->action(), target->action());
  if (!tol.accepts(d, std::max(1.0, max_abs(phi.map))))
    throw MoritaError("NotEquivariant", "equivariance defect " + std::to_string(d));
  return {source, target, kron(identity(source->group().order), phi.map)};
}

BimoduleMap crossed_map(const BimoduleMap& f, const CrossedBimodule& src, const CrossedBimodule& dst) {
  return {src.carrier, dst.carrier, kron(identity(src.left->group().order), f.map)};
}

FunctorComposition functor_composition(const EquivariantBimodule& x, const EquivariantBimodule& y,
                                       const Tolerance& tol) {
  CrossedPtr a = crossed_product(x.alpha, tol), b = crossed_product(x.beta, tol),
             c = crossed_product(y.beta, tol);
  return functor_composition(bimodule_crossed_product(x, a, b), bimodule_crossed_product(y, b, c),
                             tol);
}

FunctorComposition functor_composition(const CrossedBimodule& x, const CrossedBimodule& y,
                                       const Tolerance& tol) {
  FunctorComposition out;
  out.x = x;
  out.y = y;
  EquivariantTensor et = equivariant_tensor(x.base, y.base, tol);
  out.base_tensor = et.product;
  out.xy = bimodule_crossed_product(et.result, x.left, y.right);
  out.crossed_tensor = tensor_product(x.carrier, y.carrier, tol);
  const FiniteGroup& g = x.left->group();
  const int n = g.order;
  const Index dx = x.base.carrier->dim, dy = y.base.carrier->dim;
  const Index dxy = et.result.carrier->dim;
  const CMatrix qa = out.base_tensor.quotient.adjoint();
  CMatrix e = CMatrix::Zero(dxy * n, dx * n * dy * n);
  for (int t = 0; t < n; ++t) {
    // columns of X (x) Y for e_i (x) eta_t e_j
    CMatrix images = qa * kron(identity(dx), y.base.gamma[static_cast<std::size_t>(t)]);
    for (int u = 0; u < n; ++u) {
      const Index row = g(t, u) * dxy;
      for (Index i = 0; i < dx; ++i)
        for (Index j = 0; j < dy; ++j)
          e.block(row, (t * dx + i) * dy * n + u * dy + j, dxy, 1) = images.col(i * dy + j);
    }
  }
  out.psi = descend(out.crossed_tensor, out.xy.carrier, e);
  return out;
}

CheckReport check_functor(const std::vector<EquivariantBimodule>& items, const Tolerance& tol,
                          std::uint64_t seed) {
  CheckReport r("crossed-product functor");
  r.seed = seed;
  std::vector<CrossedBimodule> crossed;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string tag = "item " + std::to_string(i) + " ";
    const auto& x = items[i];
    CrossedBimodule cx = bimodule_crossed_product(x, tol, seed);
    CheckReport v = validate_bimodule(*cx.carrier, tol, seed);
    r.merge(v, tag + "crossed bimodule: ");
    r.merge(check_pairing_identity(cx, tol, seed), tag);
    CrossedBimodule idc = bimodule_crossed_product(equivariant_identity(x.beta), cx.right, cx.right);
    BimoduleMap id{idc.carrier, identity_bimodule(cx.right), identity(idc.carrier->dim)};
    CheckReport vi = validate_isomorphism(id, tol, seed);
    r.merge(vi, tag + "identity goes to identity: ");
    crossed.push_back(cx);
  }
  for (std::size_t i = 0; i < items.size(); ++i)
    for (std::size_t j = 0; j < items.size(); ++j) {
      if (!same_action(items[i].beta, items[j].alpha)) continue;
      // Share the middle crossed product so the tensor product sees one algebra.
      CrossedBimodule y = bimodule_crossed_product(items[j], crossed[i].right, crossed[j].right);
      FunctorComposition fc = functor_composition(crossed[i], y, tol);
      CheckReport v = validate_isomorphism(fc.psi, tol, seed);
      r.merge(v, "pair " + std::to_string(i) + "," + std::to_string(j) + " Psi: ");
    }
  return r;
}

}  // namespace morita
