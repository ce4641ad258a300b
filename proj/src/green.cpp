#include "morita/green.hpp"

#include <algorithm>

namespace morita {

namespace {

constexpr int kSamples = 6;

std::string sub_name(const Subgroup& h) {
  return "H" + std::to_string(h.elements.size()) + "<" + h.parent->name;
}

TensorProduct tp(const BimodulePtr& x, const BimodulePtr& y, const Tolerance& tol) {
  return tensor_product(x, y, tol);
}

}  // namespace

// ---- the bimodule -----------------------------------------------------------------

CMatrix GreenBimodule::function_action(const CVector& c) const {
  const Index da = alpha.algebra->dim();
  const int n = alpha.group->order;
  CMatrix m = CMatrix::Zero(da * n, da * n);
  for (int t = 0; t < n; ++t)
    m.block(t * da, t * da, da, da) = c(subgroup.coset_of[t]) * identity(da);
  return m;
}

GreenBimodule green_bimodule(const GroupAction& alpha, const Subgroup& h, const Tolerance& tol,
                             std::uint64_t seed) {
  CrossedPtr big = crossed_product(alpha, tol, seed);
  CrossedPtr small = crossed_product(restrict(alpha, h), tol, seed);
  return green_bimodule(alpha, h, big, small);
}

GreenBimodule green_bimodule(const GroupAction& alpha, const Subgroup& h, const CrossedPtr& big,
                             const CrossedPtr& small) {
  GreenBimodule gb;
  gb.alpha = alpha;
  gb.subgroup = h;
  gb.big = big;
  gb.small = small;
  const Algebra& a = *alpha.algebra;
  const FiniteGroup& g = *alpha.group;
  const int n = g.order;
  const Index da = a.dim(), d = da * n;
  const int q = h.index();

  std::vector<CMatrix> left, right, inner, ext;
  for (int s = 0; s < n; ++s)
    for (Index k = 0; k < da; ++k) {
      CMatrix lk = a.left_multiplication(k) * alpha[s].map;
      CMatrix m = CMatrix::Zero(d, d);
      for (int t = 0; t < n; ++t) m.block(t * da, g(g.inverse[s], t) * da, da, da) = lk;
      left.push_back(m);
    }

  gb.amplified = tensor_with_functions(alpha, h);
  gb.extended_algebra = CrossedProductAlgebra::create(gb.amplified.action);
  for (int s = 0; s < n; ++s)
    for (int c = 0; c < q; ++c)
      for (Index k = 0; k < da; ++k) {
        CMatrix lk = a.left_multiplication(k) * alpha[s].map;
        CMatrix m = CMatrix::Zero(d, d);
        for (int t = 0; t < n; ++t)
          if (h.coset_of[t] == c) m.block(t * da, g(g.inverse[s], t) * da, da, da) = lk;
        ext.push_back(m);
      }

  for (std::size_t hl = 0; hl < h.elements.size(); ++hl) {
    const int hinv = g.inverse[h.elements[hl]];
    for (Index k = 0; k < da; ++k) {
      CMatrix m = CMatrix::Zero(d, d);
      for (int t = 0; t < n; ++t) {
        const int w = g(t, hinv);
        m.block(t * da, w * da, da, da) = a.right_multiplication_by(alpha[w].map.col(k));
      }
      right.push_back(m);
    }
  }

  // a_i^* a_j, then moved by alpha_{u^-1}.
  std::vector<CVector> prods(static_cast<std::size_t>(da * da));
  for (Index i = 0; i < da; ++i)
    for (Index j = 0; j < da; ++j)
      prods[static_cast<std::size_t>(i * da + j)] = a.multiply(a.star(a.basis_vector(i)), a.basis_vector(j));
  inner.assign(static_cast<std::size_t>(h.elements.size() * da), CMatrix::Zero(d, d));
  for (int u = 0; u < n; ++u) {
    const CMatrix& au = alpha[g.inverse[u]].map;
    for (std::size_t hl = 0; hl < h.elements.size(); ++hl) {
      const int v = g(u, h.elements[hl]);
      for (Index i = 0; i < da; ++i)
        for (Index j = 0; j < da; ++j) {
          CVector val = au * prods[static_cast<std::size_t>(i * da + j)];
          for (Index k = 0; k < da; ++k)
            inner[hl * static_cast<std::size_t>(da) + static_cast<std::size_t>(k)](u * da + i, v * da + j) = val(k);
        }
    }
  }

  const std::string name = "X(" + a.name() + "," + sub_name(h) + ")";
  gb.carrier = make_bimodule(big, small, std::move(left), right, inner, name);
  gb.extended = make_bimodule(gb.extended_algebra, small, std::move(ext), std::move(right),
                              std::move(inner), name + "~");
  return gb;
}

CheckReport validate_green(const GreenBimodule& gb, const Tolerance& tol, std::uint64_t seed) {
  CheckReport r("Green bimodule " + gb.carrier->name);
  r.seed = seed;
  r.merge(validate_bimodule(*gb.carrier, tol, seed), "carrier");
  r.merge(validate_bimodule(*gb.extended, tol, seed), "extended");

  const FiniteGroup& g = *gb.alpha.group;
  const Subgroup& h = gb.subgroup;
  const Index da = gb.alpha.algebra->dim();
  StarHom dg = hom_crossed_product(gb.amplified.diagonal, gb.big, gb.extended_algebra, tol);
  double fac = 0.0;
  for (Index k = 0; k < gb.big->dim(); ++k)
    fac = std::max(fac, max_abs(CMatrix(gb.extended->act_left(dg.map.col(k)) -
                                        gb.carrier->left_action[static_cast<std::size_t>(k)])));
  r.add("factoring", "A x| G acts through (a -> a (x) 1) x G", fac, tol.bound());

  double cov1 = 0.0, cov2 = 0.0;
  for (int c = 0; c < h.index(); ++c) {
    CVector dc = CVector::Zero(h.index());
    dc(c) = 1.0;
    CMatrix fc = gb.function_action(dc);
    for (Index k = 0; k < da; ++k) {
      const CMatrix& la = gb.carrier->left_action[static_cast<std::size_t>(gb.big->coord(g.identity, k))];
      cov1 = std::max(cov1, max_abs(CMatrix(fc * la - la * fc)));
    }
    for (int s = 0; s < g.order; ++s) {
      CVector us = gb.big->i_g(s);
      CMatrix lhs = gb.carrier->act_left(us) * fc * gb.carrier->act_left(gb.big->star(us));
      CVector tc = CVector::Zero(h.index());
      tc(h.act(s, c)) = 1.0;
      cov2 = std::max(cov2, max_abs(CMatrix(lhs - gb.function_action(tc))));
    }
  }
  r.add("functions commute with A", "c.(i_A(a).x) = i_A(a).(c.x)", cov1, tol.bound());
  r.add("functions covariant", "i_G(s).(c.(i_G(s)*.x)) = tau_s(c).x", cov2, tol.bound());

  CMatrix gram = gb.carrier->scalar_gram(gb.small->trace_functional());
  EigenDecomposition eig = hermitian_eigendecomposition(gram, tol);
  const double lo = eig.values.minCoeff(), hi = std::max(1.0, eig.values.maxCoeff());
  r.add("positive inner product", "Gram eigenvalues >= 0", std::max(0.0, -lo), tol.bound(hi));
  r.require("definite inner product", "trivial kernel", lo > tol.rank_cutoff() * hi,
            "smallest eigenvalue " + std::to_string(lo));
  return r;
}

CheckReport check_green_imprimitivity(const GreenBimodule& gb, const Tolerance& tol,
                                      std::uint64_t seed) {
  CheckReport r("Green imprimitivity " + gb.extended->name);
  r.seed = seed;
  Imprimitivity imp = is_imprimitivity(gb.extended, tol, seed);
  r.merge(imp.report, "extended");
  r.require("imprimitivity", "(A (x) C(G/H)) x| G = K(X_H^G)", imp.flag, imp.reason);
  return r;
}

std::vector<Index> compact_blocks(const GreenBimodule& gb, const Tolerance& tol) {
  StandardForm sf = standard_form(*gb.carrier, tol);
  return *sf.compact_canonical->canonical_blocks();
}

Representation induce(const GreenBimodule& gb, const Representation& rho, const Tolerance& tol) {
  if (!same_algebra(rho.algebra, gb.small))
    throw MoritaError("InvalidRepresentation", "not a representation of " + gb.small->name());
  CheckReport r = validate_representation(rho, tol);
  if (!r.passed()) throw MoritaError("InvalidRepresentation", r.first_failure());
  return induce_representation(gb.carrier, rho, tol).pi_a;
}

// ---- the hom leg -----------------------------------------------------------------

HomNaturality hom_naturality_iso(const StarHom& phi, const GroupAction& alpha,
                                 const GroupAction& epsilon, const Subgroup& h,
                                 const Tolerance& tol, std::uint64_t seed) {
  CrossedPtr ag = crossed_product(alpha, tol, seed), ah = crossed_product(restrict(alpha, h), tol, seed);
  CrossedPtr cg = crossed_product(epsilon, tol, seed), ch = crossed_product(restrict(epsilon, h), tol, seed);
  GreenBimodule xa = green_bimodule(alpha, h, ag, ah), xc = green_bimodule(epsilon, h, cg, ch);
  BimodulePtr phi_h = bimodule_from_hom(hom_crossed_product(phi, ah, ch, tol), tol);
  BimodulePtr phi_g = bimodule_from_hom(hom_crossed_product(phi, ag, cg, tol), tol);
  return hom_naturality_iso(xa, xc, phi, phi_h, phi_g, tol, seed);
}

HomNaturality hom_naturality_iso(const GreenBimodule& xa, const GreenBimodule& xc,
                                 const StarHom& phi, const BimodulePtr& phi_h,
                                 const BimodulePtr& phi_g, const Tolerance& tol,
                                 std::uint64_t seed) {
  HomNaturality out;
  out.report = CheckReport("hom leg " + xa.carrier->name + " -> " + xc.carrier->name);
  out.report.seed = seed;
  StarHom phig = hom_crossed_product(phi, xa.big, xc.big, tol);
  StarHom phih = hom_crossed_product(phi, xa.small, xc.small, tol);
  out.source = tp(xa.carrier, phi_h, tol);
  out.target = tp(phi_g, xc.carrier, tol);

  const FiniteGroup& g = *xa.alpha.group;
  const Subgroup& h = xa.subgroup;
  const Algebra& c = *xc.alpha.algebra;
  const Index da = xa.alpha.algebra->dim(), dc = c.dim();
  const Index nh = static_cast<Index>(h.elements.size());
  const Index dph = phi_h->dim, dxa = xa.carrier->dim, dxc = xc.carrier->dim;
  if (dph != dc * nh) throw MoritaError("ShapeMismatch", "hom bimodule is not on C x| H");
  CMatrix e = CMatrix::Zero(dxc, dxa * dph);
  for (int u = 0; u < g.order; ++u)
    for (Index i = 0; i < da; ++i) {
      CMatrix blk = c.left_multiplication_by(phi.map.col(i)) * xc.alpha[u].map;
      for (Index hl = 0; hl < nh; ++hl) {
        const int t = g(u, h.elements[static_cast<std::size_t>(hl)]);
        for (Index m = 0; m < dc; ++m)
          e.block(t * dc, (u * da + i) * dph + hl * dc + m, dc, 1) = blk.col(m);
      }
    }
  out.elementary = e;
  BimoduleMap raw = descend(out.source, pullback_left(xc.carrier, phig), e);
  BimoduleMap unitor = left_unitor(out.target, phig);
  out.iso = unitor.inverse().after(raw);
  out.report.merge(validate_isomorphism(out.iso, tol, seed), "Psi");

  // C(G/H) acts on the first factor of the source and on X_H^G(C).
  double fdef = 0.0;
  const CMatrix& qs = out.source.quotient;
  for (int cc = 0; cc < h.index(); ++cc) {
    CVector dcv = CVector::Zero(h.index());
    dcv(cc) = 1.0;
    CMatrix sc = qs.adjoint() * apply_first_factor(xa.function_action(dcv), qs, dph);
    fdef = std::max(fdef, max_abs(CMatrix(raw.map * sc - xc.function_action(dcv) * raw.map)));
  }
  out.report.add("C(G/H) action", "Psi respects the left action of C(G/H)", fdef,
                 tol.bound(1.0 + max_abs(raw.map)));

  Rng rng(seed);
  double idef = 0.0, scale = 1.0;
  const auto& ch = *xc.small;
  for (int k = 0; k < kSamples; ++k) {
    CVector x = rng.complex_vector(dxa), y = rng.complex_vector(dxa);
    CVector gv = rng.complex_vector(dph), fv = rng.complex_vector(dph);
    CVector px = e * kron(CMatrix(x), CMatrix(gv)).col(0);
    CVector py = e * kron(CMatrix(y), CMatrix(fv)).col(0);
    CVector lhs = xc.carrier->inner_product(px, py);
    CVector rhs = ch.multiply(ch.star(gv), ch.multiply(phih(xa.carrier->inner_product(x, y)), fv));
    idef = std::max(idef, max_abs(CVector(lhs - rhs)));
    scale = std::max(scale, max_abs(rhs));
  }
  out.report.add("inner product conversion", "<Psi(x(x)g), Psi(y(x)f)> = (phi x H(<y, x>) g)* f",
                 idef, tol.bound(scale));
  return out;
}

// ---- the linking technique -------------------------------------------------------

CVector LinkingCrossed::module_image(const CVector& h) const {
  return iso.map * crossed_linking.embed_module(h);
}

StarHom LinkingCrossed::left_corner() const {
  StarHom e = crossed_linking.embed_left();
  return {e.source, crossed, iso.map * e.map};
}

StarHom LinkingCrossed::right_corner() const {
  StarHom e = crossed_linking.embed_right();
  return {e.source, crossed, iso.map * e.map};
}

LinkingCrossed linking_crossed_iso(const EquivariantBimodule& y, const Tolerance& tol,
                                   std::uint64_t seed) {
  return linking_crossed_iso(y, crossed_product(y.alpha, tol, seed),
                             crossed_product(y.beta, tol, seed), tol, seed);
}

LinkingCrossed linking_crossed_iso(const EquivariantBimodule& y, const CrossedPtr& left,
                                   const CrossedPtr& right, const Tolerance& tol,
                                   std::uint64_t seed) {
  EquivariantImprimitivity ei = equivariant_imprimitivity(y, tol, seed);
  if (!ei.flag) throw MoritaError("NotImprimitivity", ei.report.first_failure());
  LinkingCrossed out;
  out.report = CheckReport("linking algebra of " + y.carrier->name + " x| " + y.group()->name);
  out.report.seed = seed;
  out.linking = linking_algebra(y.carrier, tol, seed);
  const LinkingAlgebra& l = out.linking;
  const Index dl = l.algebra->dim(), dc = y.carrier->left->dim(), dy = y.carrier->dim,
              db = y.carrier->right->dim();
  const FiniteGroup& g = *y.group();
  const int n = g.order;

  std::vector<CMatrix> maps;
  for (int s = 0; s < n; ++s) {
    CMatrix m = CMatrix::Zero(dl, dl);
    m.block(l.a_offset, l.a_offset, dc, dc) = y.alpha[s].map;
    m.block(l.x_offset, l.x_offset, dy, dy) = y.gamma[static_cast<std::size_t>(s)];
    m.block(l.xt_offset, l.xt_offset, dy, dy) = y.gamma[static_cast<std::size_t>(s)].conjugate();
    m.block(l.b_offset, l.b_offset, db, db) = y.beta[s].map;
    maps.push_back(m);
  }
  out.delta = make_action(l.algebra, y.group(), std::move(maps));
  out.report.merge(validate_action(out.delta, tol, seed), "delta");
  out.crossed = CrossedProductAlgebra::create(out.delta);
  out.y_crossed = bimodule_crossed_product(y, left, right);
  out.crossed_linking = linking_algebra(out.y_crossed.carrier, tol, seed);
  const LinkingAlgebra& big = out.crossed_linking;

  CMatrix iso = CMatrix::Zero(dl * n, dl * n);
  for (int s = 0; s < n; ++s) {
    const int si = g.inverse[s];
    for (Index k = 0; k < dc; ++k) iso(s * dl + l.a_offset + k, big.a_offset + s * dc + k) = 1.0;
    for (Index i = 0; i < dy; ++i) {
      iso(s * dl + l.x_offset + i, big.x_offset + s * dy + i) = 1.0;
      // (y delta_s)^* = eta_{s^-1}(y)~ delta_{s^-1}
      iso.block(si * dl + l.xt_offset, big.xt_offset + s * dy + i, dy, 1) =
          y.gamma[static_cast<std::size_t>(si)].conjugate().col(i);
    }
    for (Index m = 0; m < db; ++m) iso(s * dl + l.b_offset + m, big.b_offset + s * db + m) = 1.0;
  }
  out.iso = {big.algebra, out.crossed, iso};
  out.iso_inverse = {out.crossed, big.algebra, CMatrix(iso.inverse())};
  out.report.require("dimension", "dim L(Y) |G| = dim L(Y x| G)", big.algebra->dim() == dl * n);
  out.report.merge(validate_star_iso(out.iso, out.iso_inverse, tol, seed), "iso");

  // Corners land where the embeddings of L(Y) x G put them.
  const CrossedProductAlgebra& lg = *out.crossed;
  double cdef = 0.0;
  StarHom lc = out.left_corner(), rc = out.right_corner();
  StarHom el = l.embed_left(), er = l.embed_right();
  for (int s = 0; s < n; ++s) {
    for (Index k = 0; k < dc; ++k) {
      CVector expect = lg.multiply(lg.i_a()(el.map.col(k)), lg.i_g(s));
      cdef = std::max(cdef, max_abs(CVector(lc.map.col(s * dc + k) - expect)));
    }
    for (Index m = 0; m < db; ++m) {
      CVector expect = lg.multiply(lg.i_a()(er.map.col(m)), lg.i_g(s));
      cdef = std::max(cdef, max_abs(CVector(rc.map.col(s * db + m) - expect)));
    }
    for (Index i = 0; i < dy; ++i) {
      CVector yi = CVector::Zero(dy);
      yi(i) = 1.0;
      CVector expect = lg.multiply(lg.i_a()(l.embed_module(yi)), lg.i_g(s));
      CVector h = CVector::Zero(out.y_crossed.carrier->dim);
      h(s * dy + i) = 1.0;
      cdef = std::max(cdef, max_abs(CVector(out.module_image(h) - expect)));
    }
  }
  out.report.add("corners", "C x| G -> pLp, B x| G -> qLq, Y x| G -> pLq", cdef, tol.bound());
  return out;
}

LinkingNaturality linking_naturality(const EquivariantBimodule& y, const Subgroup& h,
                                     const GreenBimodule& xc, const GreenBimodule& xb,
                                     const CrossedBimodule& y_g, const CrossedBimodule& y_h,
                                     const Tolerance& tol, std::uint64_t seed) {
  LinkingNaturality out;
  out.report = CheckReport("linking leg for " + y.carrier->name);
  out.report.seed = seed;
  out.g_side = linking_crossed_iso(y, y_g.left, y_g.right, tol, seed);
  out.h_side = linking_crossed_iso(restrict(y, h), y_h.left, y_h.right, tol, seed);
  out.report.merge(out.g_side.report, "G");
  out.report.merge(out.h_side.report, "H");
  out.z = green_bimodule(out.g_side.delta, h, out.g_side.crossed, out.h_side.crossed);

  const LinkingAlgebra& l = out.g_side.linking;
  const Index dl = l.algebra->dim();
  CVector p = out.g_side.crossed->i_a()(l.p);
  CVector q = out.h_side.crossed->i_a()(l.q);
  out.corner = corner_along(out.z.carrier, out.g_side.left_corner(), out.h_side.right_corner(), p, q, tol);
  out.report.add("corner inner products", "<pZq, pZq> lies in B x| H", out.corner.inner_defect,
                 tol.bound());

  out.upper = tp(y_g.carrier, xb.carrier, tol);
  out.lower = tp(xc.carrier, y_h.carrier, tol);
  const auto& z = *out.z.carrier;
  const CMatrix wh = out.corner.embed.adjoint();
  const CMatrix leak_proj = identity(z.dim) - out.corner.embed * wh;
  const Index db = xb.alpha.algebra->dim(), dc = xc.alpha.algebra->dim();
  const Index dyg = y_g.carrier->dim, dxb = xb.carrier->dim, dxc = xc.carrier->dim, dyh = y_h.carrier->dim;
  auto slot = [&](Index tuple_index, Index base_dim, Index offset) {
    return (tuple_index / base_dim) * dl + offset + tuple_index % base_dim;
  };
  double leak = 0.0;
  CMatrix ephi(wh.rows(), dyg * dxb);
  for (Index a = 0; a < dyg; ++a) {
    CVector ea = CVector::Zero(dyg);
    ea(a) = 1.0;
    CMatrix op = z.act_left(out.g_side.module_image(ea));
    for (Index b = 0; b < dxb; ++b) {
      CVector v = op.col(slot(b, db, l.b_offset));
      ephi.col(a * dxb + b) = wh * v;
      leak = std::max(leak, max_abs(CVector(leak_proj * v)));
    }
  }
  CMatrix epsi(wh.rows(), dxc * dyh);
  for (Index gi = 0; gi < dyh; ++gi) {
    CVector eg = CVector::Zero(dyh);
    eg(gi) = 1.0;
    CMatrix op = z.act_right(out.h_side.module_image(eg));
    for (Index zi = 0; zi < dxc; ++zi) {
      CVector v = op.col(slot(zi, dc, l.a_offset));
      epsi.col(zi * dyh + gi) = wh * v;
      leak = std::max(leak, max_abs(CVector(leak_proj * v)));
    }
  }
  out.report.add("corner membership", "h.x and z.g lie in pZq", leak, tol.bound());
  out.phi = descend(out.upper, out.corner.module, ephi);
  out.psi = descend(out.lower, out.corner.module, epsi);
  out.report.merge(validate_isomorphism(out.phi, tol, seed), "Phi");
  out.report.merge(validate_isomorphism(out.psi, tol, seed), "Psi");
  out.iso = out.psi.inverse().after(out.phi);
  out.report.merge(validate_isomorphism(out.iso, tol, seed), "Psi^-1 Phi");
  return out;
}

// ---- the squares -----------------------------------------------------------------

NaturalitySquare check_naturality_square(const EquivariantBimodule& m, const Subgroup& h,
                                         SquareVariant variant, const Tolerance& tol,
                                         std::uint64_t seed) {
  CheckReport vm = validate_equivariant(m, tol, seed);
  if (!vm.passed()) throw MoritaError("ActionInvalid", vm.first_failure());
  NaturalitySquare sq;
  sq.morphism = m;
  sq.subgroup = h;
  sq.variant = variant;
  sq.report = CheckReport(std::string(variant == SquareVariant::Mor ? "mor" : "iso") +
                          " square for " + m.carrier->name + " over " + sub_name(h));
  sq.report.seed = seed;

  EquivariantFactorization f = equivariant_factor(m, tol, seed);
  if (!f.report.passed()) throw MoritaError("FactorizationFailed", f.report.first_failure());
  sq.report.require("factorization", "[X, gamma] = [Y, eta] o [phi, epsilon]", true,
                    "max defect " + std::to_string(f.report.max_defect()));

  const int n = m.group()->order;
  const Index nh = static_cast<Index>(h.elements.size());
  CrossedPtr ag = crossed_product(m.alpha, tol, seed), bg = crossed_product(m.beta, tol, seed),
             cg = crossed_product(f.epsilon, tol, seed);
  CrossedPtr ah = crossed_product(restrict(m.alpha, h), tol, seed),
             bh = crossed_product(restrict(m.beta, h), tol, seed),
             ch = crossed_product(restrict(f.epsilon, h), tol, seed);
  GreenBimodule xa = green_bimodule(m.alpha, h, ag, ah), xb = green_bimodule(m.beta, h, bg, bh),
                xc = green_bimodule(f.epsilon, h, cg, ch);
  CrossedBimodule xg = bimodule_crossed_product(m, ag, bg);
  CrossedBimodule xh = bimodule_crossed_product(restrict(m, h), ah, bh);
  TensorProduct u0 = tp(xg.carrier, xb.carrier, tol);
  TensorProduct lower = tp(xa.carrier, xh.carrier, tol);

  const EquivariantBimodule& pm = f.hom_module;
  const EquivariantBimodule& ym = f.imprimitivity;
  CrossedBimodule pg = bimodule_crossed_product(pm, ag, cg);
  CrossedBimodule ph = bimodule_crossed_product(restrict(pm, h), ah, ch);
  CrossedBimodule yg = bimodule_crossed_product(ym, cg, bg);
  CrossedBimodule yh = bimodule_crossed_product(restrict(ym, h), ch, bh);
  FunctorComposition fg = functor_composition(pg, yg, tol);
  FunctorComposition fh = functor_composition(ph, yh, tol);

  // C_phi (x) Y -> X, as computed by the factorization.
  const CMatrix fiso = left_unitor(f.composite.product, f.factorization.phi).map;
  sq.report.add("composite quotient", "same balanced tensor product",
                max_abs(CMatrix(fg.base_tensor.quotient - f.composite.product.quotient)), tol.bound());

  auto id = [](const BimodulePtr& x) { return BimoduleMap::identity(x); };
  // (X x| G) (x) X(B) -> ((C_phi (x) Y) x| G) (x) X(B)
  BimoduleMap m1{xg.carrier, fg.xy.carrier, kron(identity(n), CMatrix(fiso.inverse()))};
  TensorProduct u1 = tp(fg.xy.carrier, xb.carrier, tol);
  BimoduleMap s1 = tensor_map(u0, u1, m1, id(xb.carrier));
  // -> ((C_phi x| G) (x) (Y x| G)) (x) X(B)
  TensorProduct u2 = tp(fg.crossed_tensor.result, xb.carrier, tol);
  BimoduleMap s2 = tensor_map(u1, u2, fg.psi.inverse(), id(xb.carrier));
  // -> (C_phi x| G) (x) ((Y x| G) (x) X(B))
  LinkingNaturality ln = linking_naturality(ym, h, xc, xb, yg, yh, tol, seed);
  sq.report.merge(ln.report, "linking leg");
  TensorProduct u3 = tp(pg.carrier, ln.upper.result, tol);
  BimoduleMap s3 = associator(fg.crossed_tensor, u2, ln.upper, u3);
  // -> (C_phi x| G) (x) (X(C) (x) (Y x| H))
  TensorProduct u4 = tp(pg.carrier, ln.lower.result, tol);
  BimoduleMap s4 = tensor_map(u3, u4, id(pg.carrier), ln.iso);
  // -> ((C_phi x| G) (x) X(C)) (x) (Y x| H)
  HomNaturality hn = hom_naturality_iso(xa, xc, f.factorization.phi, ph.carrier, pg.carrier, tol, seed);
  sq.report.merge(hn.report, "hom leg");
  TensorProduct u5 = tp(hn.target.result, yh.carrier, tol);
  BimoduleMap s5 = associator(hn.target, u5, ln.lower, u4).inverse();
  // -> (X(A) (x) (C_phi x| H)) (x) (Y x| H)
  TensorProduct u6 = tp(hn.source.result, yh.carrier, tol);
  BimoduleMap s6 = tensor_map(u5, u6, hn.iso.inverse(), id(yh.carrier));
  // -> X(A) (x) ((C_phi x| H) (x) (Y x| H))
  TensorProduct u7 = tp(xa.carrier, fh.crossed_tensor.result, tol);
  BimoduleMap s7 = associator(hn.source, u6, fh.crossed_tensor, u7);
  // -> X(A) (x) ((C_phi (x) Y) x| H) -> X(A) (x) (X x| H)
  TensorProduct u8 = tp(xa.carrier, fh.xy.carrier, tol);
  BimoduleMap s8 = tensor_map(u7, u8, id(xa.carrier), fh.psi);
  BimoduleMap m9{fh.xy.carrier, xh.carrier, kron(identity(nh), fiso)};
  BimoduleMap s9 = tensor_map(u8, lower, id(xa.carrier), m9);
  BimoduleMap w = s9.after(s8.after(s7.after(s6.after(s5.after(s4.after(s3.after(s2.after(s1))))))));

  if (variant == SquareVariant::Mor) {
    sq.source_g = ag;
    sq.target_g = bg;
    sq.upper = u0;
    sq.lower = lower;
  } else {
    // Same witness read through x delta_s (x) z -> (x (x) 1) delta_s (x) z.
    EquivariantBimodule amp = tensor_with_functions(m, h, xa.amplified, xb.amplified);
    CrossedBimodule ampg = bimodule_crossed_product(amp, xa.extended_algebra, xb.extended_algebra);
    TensorProduct ue = tp(ampg.carrier, xb.extended, tol);
    TensorProduct le = tp(xa.extended, xh.carrier, tol);
    const Index dx = m.carrier->dim, q = h.index(), dxb = xb.carrier->dim;
    CMatrix e = CMatrix::Zero(dx * q * n * dxb, dx * n * dxb);
    for (int t = 0; t < n; ++t)
      for (Index i = 0; i < dx; ++i)
        for (Index c = 0; c < q; ++c)
          for (Index zb = 0; zb < dxb; ++zb)
            e(((t * q + c) * dx + i) * dxb + zb, (t * dx + i) * dxb + zb) = 1.0;
    BimoduleMap jl = descend(u0, ue.result, ue.quotient.adjoint() * e);
    BimoduleMap relabel{lower.result, le.result, le.quotient.adjoint() * lower.quotient};
    w = relabel.after(w.after(jl.inverse()));
    sq.source_g = xa.extended_algebra;
    sq.target_g = xb.extended_algebra;
    sq.upper = ue;
    sq.lower = le;
  }
  sq.source_h = ah;
  sq.target_h = bh;

  CheckReport vw = validate_isomorphism(w, tol, seed);
  sq.report.merge(vw, "witness");
  sq.defect = vw.max_defect();
  if (!vw.passed()) throw MoritaError("WitnessDefectExceeded", vw.first_failure());
  sq.witness = w;
  sq.direct = find_isomorphism(sq.upper.result, sq.lower.result, tol, seed);
  sq.report.require("direct search", "both composites are isomorphic", sq.direct.map.has_value(),
                    sq.direct.obstruction);
  return sq;
}

NaturalitySquare check_naturality_square(const StarHom& phi, const GroupAction& alpha,
                                         const GroupAction& epsilon, const Subgroup& h,
                                         SquareVariant variant, const Tolerance& tol,
                                         std::uint64_t seed) {
  return check_naturality_square(equivariant_from_hom(phi, alpha, epsilon, tol), h, variant, tol, seed);
}

CheckReport check_induction_compatibility(const EquivariantBimodule& y, const Subgroup& h,
                                          const Representation& rho_v, const Tolerance& tol,
                                          std::uint64_t seed) {
  CheckReport r("induction compatibility for " + y.carrier->name);
  r.seed = seed;
  auto bh = std::dynamic_pointer_cast<const CrossedProductAlgebra>(rho_v.algebra);
  if (!bh) throw MoritaError("InvalidRepresentation", "not a representation of a crossed product");
  CrossedPtr cg = crossed_product(y.alpha, tol, seed), bg = crossed_product(y.beta, tol, seed);
  CrossedPtr ch = crossed_product(restrict(y.alpha, h), tol, seed);
  GreenBimodule xb = green_bimodule(y.beta, h, bg, bh), xc = green_bimodule(y.alpha, h, cg, ch);
  CrossedBimodule yg = bimodule_crossed_product(y, cg, bg);
  CrossedBimodule yh = bimodule_crossed_product(restrict(y, h), ch, bh);

  Representation up = induce_representation(yg.carrier, induce(xb, rho_v, tol), tol).pi_a;
  Representation mid = induce_representation(yh.carrier, rho_v, tol).pi_a;
  Representation down = induce(xc, mid, tol);
  r.require("dimension", "[G:H] dim of the Y-induced representation",
            up.dim == down.dim && down.dim == h.index() * mid.dim,
            std::to_string(up.dim) + " vs " + std::to_string(down.dim));
  std::optional<CMatrix> u = unitary_intertwiner(up, down, tol, seed);
  double defect = 1.0;
  if (u) {
    defect = 0.0;
    for (std::size_t k = 0; k < up.images.size(); ++k)
      defect = std::max(defect, max_abs(CMatrix(*u * up.images[k] * u->adjoint() - down.images[k])));
  }
  r.add("unitary equivalence", "(Y x| G)-Ind Ind(rho x V) = Ind (Y x| H)-Ind(rho x V)", defect,
        u ? tol.bound() : 0.0, u ? "" : "no unitary intertwiner");
  return r;
}

}  // namespace morita
