#include "morita/dynamics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

namespace morita {

namespace {

constexpr Index kExhaustiveDim = 16;

[[noreturn]] void bad_table(const std::string& what) { throw MoritaError("BadTable", what); }

std::vector<CVector> samples(const Algebra& a, Rng& rng) {
  std::vector<CVector> out;
  if (a.dim() <= kExhaustiveDim) {
    for (Index k = 0; k < a.dim(); ++k) out.push_back(a.basis_vector(k));
  } else {
    for (int s = 0; s < 6; ++s) out.push_back(rng.complex_vector(a.dim()));
  }
  return out;
}

double scale_of(const std::vector<CMatrix>& ms) {
  double s = 0.0;
  for (const auto& m : ms) s = std::max(s, max_abs(m));
  return s;
}

CMatrix combine(const std::vector<CMatrix>& ms, const CVector& c, Index n) {
  CMatrix out = CMatrix::Zero(n, n);
  for (std::size_t k = 0; k < ms.size(); ++k)
    if (c(static_cast<Index>(k)) != Complex(0.0, 0.0)) out += c(static_cast<Index>(k)) * ms[k];
  return out;
}

bool same_action(const GroupAction& a, const GroupAction& b, const Tolerance& tol) {
  if (!same_algebra(a.algebra, b.algebra) || a.maps.size() != b.maps.size()) return false;
  for (std::size_t s = 0; s < a.maps.size(); ++s)
    if (max_abs(CMatrix(a.maps[s].map - b.maps[s].map)) > tol.bound(1.0)) return false;
  return true;
}

}  // namespace

// ---- groups ---------------------------------------------------------------------

bool FiniteGroup::abelian() const {
  for (int a = 0; a < order; ++a)
    for (int b = 0; b < order; ++b)
      if (mult[a][b] != mult[b][a]) return false;
  return true;
}

FiniteGroup FiniteGroup::from_table(std::vector<std::vector<int>> table, std::string name) {
  const int n = static_cast<int>(table.size());
  if (n == 0) bad_table("empty table");
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != n) bad_table("table is not square");
    for (int v : row)
      if (v < 0 || v >= n) bad_table("entry out of range");
  }
  int e = -1;
  for (int a = 0; a < n && e < 0; ++a) {
    bool ok = true;
    for (int b = 0; b < n && ok; ++b) ok = table[a][b] == b && table[b][a] == b;
    if (ok) e = a;
  }
  if (e < 0) bad_table("no identity element");
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (table[table[a][b]][c] != table[a][table[b][c]])
          bad_table("not associative at (" + std::to_string(a) + "," + std::to_string(b) + "," +
                    std::to_string(c) + ")");
  std::vector<int> inv(static_cast<std::size_t>(n), -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b)
      if (table[a][b] == e && table[b][a] == e) inv[static_cast<std::size_t>(a)] = b;
    if (inv[static_cast<std::size_t>(a)] < 0) bad_table("element " + std::to_string(a) + " has no inverse");
  }
  FiniteGroup g;
  g.name = std::move(name);
  g.order = n;
  g.mult = std::move(table);
  g.identity = e;
  g.inverse = std::move(inv);
  return g;
}

FiniteGroup FiniteGroup::cyclic(int n) {
  if (n < 1) bad_table("cyclic order must be positive");
  std::vector<std::vector<int>> t(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[a][b] = (a + b) % n;
  return from_table(std::move(t), "Z" + std::to_string(n));
}

FiniteGroup FiniteGroup::dihedral(int n) {
  if (n < 1) bad_table("dihedral parameter must be positive");
  const int m = 2 * n;
  std::vector<std::vector<int>> t(static_cast<std::size_t>(m), std::vector<int>(static_cast<std::size_t>(m)));
  auto mod = [n](int k) { return ((k % n) + n) % n; };
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      int ra = a % n, rb = b % n;
      bool fa = a >= n, fb = b >= n;
      int r = fa ? mod(ra - rb) : mod(ra + rb);
      t[a][b] = (fa != fb) ? n + r : r;
    }
  return from_table(std::move(t), "D" + std::to_string(n));
}

FiniteGroup FiniteGroup::symmetric(int n) {
  if (n < 1 || n > 5) bad_table("symmetric degree must be in 1..5");
  std::vector<std::vector<int>> perms;
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  const int m = static_cast<int>(perms.size());
  std::map<std::vector<int>, int> index;
  for (int i = 0; i < m; ++i) index[perms[static_cast<std::size_t>(i)]] = i;
  std::vector<std::vector<int>> t(static_cast<std::size_t>(m), std::vector<int>(static_cast<std::size_t>(m)));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      std::vector<int> c(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) c[i] = perms[a][perms[b][i]];
      t[a][b] = index[c];
    }
  return from_table(std::move(t), "S" + std::to_string(n));
}

GroupPtr share(FiniteGroup g) { return std::make_shared<const FiniteGroup>(std::move(g)); }

GroupPtr make_group(const std::string& spec) {
  char kind[32] = {0};
  int n = 0;
  char close = 0;
  if (std::sscanf(spec.c_str(), "%31[a-z](%d%c", kind, &n, &close) != 3 || close != ')')
    bad_table("cannot parse group spec '" + spec + "'");
  std::string k(kind);
  if (k == "cyclic") return share(FiniteGroup::cyclic(n));
  if (k == "dihedral") return share(FiniteGroup::dihedral(n));
  if (k == "symmetric") return share(FiniteGroup::symmetric(n));
  bad_table("unknown group family '" + k + "'");
}

Subgroup make_subgroup(const GroupPtr& g, std::vector<int> elements) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  Subgroup h;
  h.parent = g;
  h.local.assign(static_cast<std::size_t>(g->order), -1);
  for (std::size_t i = 0; i < elements.size(); ++i) {
    int e = elements[i];
    if (e < 0 || e >= g->order) throw MoritaError("BadSubgroup", "element out of range");
    h.local[static_cast<std::size_t>(e)] = static_cast<int>(i);
  }
  if (elements.empty() || h.local[static_cast<std::size_t>(g->identity)] < 0)
    throw MoritaError("BadSubgroup", "identity missing");
  for (int a : elements) {
    if (h.local[static_cast<std::size_t>(g->inverse[a])] < 0)
      throw MoritaError("BadSubgroup", "not closed under inverse");
    for (int b : elements)
      if (h.local[static_cast<std::size_t>((*g)(a, b))] < 0)
        throw MoritaError("BadSubgroup", "not closed under multiplication");
  }
  const int m = static_cast<int>(elements.size());
  std::vector<std::vector<int>> t(static_cast<std::size_t>(m), std::vector<int>(static_cast<std::size_t>(m)));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) t[a][b] = h.local[static_cast<std::size_t>((*g)(elements[a], elements[b]))];
  h.group = share(FiniteGroup::from_table(std::move(t), g->name + "_sub"));
  h.coset_of.assign(static_cast<std::size_t>(g->order), -1);
  for (int s = 0; s < g->order; ++s) {
    if (h.coset_of[static_cast<std::size_t>(s)] >= 0) continue;
    int c = static_cast<int>(h.transversal.size());
    h.transversal.push_back(s);
    for (int e : elements) h.coset_of[static_cast<std::size_t>((*g)(s, e))] = c;
  }
  h.elements = std::move(elements);
  return h;
}

Subgroup whole_group(const GroupPtr& g) {
  std::vector<int> all(static_cast<std::size_t>(g->order));
  std::iota(all.begin(), all.end(), 0);
  return make_subgroup(g, all);
}

Subgroup trivial_subgroup(const GroupPtr& g) { return make_subgroup(g, {g->identity}); }

std::vector<Subgroup> all_subgroups(const GroupPtr& g) {
  std::set<std::vector<int>> found;
  for (int a = 0; a < g->order; ++a)
    for (int b = a; b < g->order; ++b) {
      std::set<int> s{g->identity, a, b};
      bool grew = true;
      while (grew) {
        grew = false;
        std::vector<int> cur(s.begin(), s.end());
        for (int x : cur)
          for (int y : cur)
            if (s.insert((*g)(x, y)).second) grew = true;
      }
      found.insert(std::vector<int>(s.begin(), s.end()));
    }
  std::vector<std::vector<int>> sorted(found.begin(), found.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& x, const auto& y) { return x.size() < y.size(); });
  std::vector<Subgroup> out;
  for (auto& s : sorted) out.push_back(make_subgroup(g, s));
  return out;
}

// ---- actions ----------------------------------------------------------------------

GroupAction trivial_action(const AlgebraPtr& a, const GroupPtr& g) {
  GroupAction act{a, g, {}};
  for (int s = 0; s < g->order; ++s) act.maps.push_back(StarHom::identity(a));
  return act;
}

GroupAction make_action(const AlgebraPtr& a, const GroupPtr& g, std::vector<CMatrix> maps) {
  if (static_cast<int>(maps.size()) != g->order)
    throw MoritaError("ShapeMismatch", "one map per group element expected");
  GroupAction act{a, g, {}};
  for (auto& m : maps) {
    if (m.rows() != a->dim() || m.cols() != a->dim())
      throw MoritaError("ShapeMismatch", "action map has wrong shape");
    act.maps.push_back({a, a, std::move(m)});
  }
  return act;
}

CheckReport validate_action(const GroupAction& alpha, const Tolerance& tol, std::uint64_t seed) {
  CheckReport rep("action on " + alpha.algebra->name());
  rep.seed = seed;
  const FiniteGroup& g = *alpha.group;
  if (static_cast<int>(alpha.maps.size()) != g.order) {
    rep.require("shape", "one automorphism per element", false);
    return rep;
  }
  const Index n = alpha.algebra->dim();
  double scale = 1.0;
  for (const auto& m : alpha.maps) scale = std::max(scale, max_abs(m.map));
  rep.add("identity", "alpha_e = id", max_abs(CMatrix(alpha[g.identity].map - identity(n))), tol.bound(scale));
  double hom = 0.0;
  for (int s = 0; s < g.order; ++s)
    for (int t = 0; t < g.order; ++t)
      hom = std::max(hom, max_abs(CMatrix(alpha[s].map * alpha[t].map - alpha[g(s, t)].map)));
  rep.add("homomorphism", "alpha_s alpha_t = alpha_st", hom, tol.bound(scale * scale));
  double worst = 0.0;
  std::string note;
  for (int s = 0; s < g.order; ++s) {
    CheckReport r = validate_star_hom(alpha[s], tol, seed);
    if (!r.passed() && note.empty()) note = "element " + std::to_string(s) + ": " + r.first_failure();
    worst = std::max(worst, r.passed() ? 0.0 : 1.0);
  }
  rep.add("automorphisms", "each alpha_s a *-automorphism", worst, 0.5, note);
  return rep;
}

GroupAction restrict(const GroupAction& alpha, const Subgroup& h) {
  GroupAction out{alpha.algebra, h.group, {}};
  for (int e : h.elements) out.maps.push_back(alpha[e]);
  return out;
}

double equivariance_defect(const StarHom& phi, const GroupAction& alpha, const GroupAction& beta) {
  double d = 0.0;
  for (std::size_t s = 0; s < alpha.maps.size(); ++s)
    d = std::max(d, max_abs(CMatrix(phi.map * alpha.maps[s].map - beta.maps[s].map * phi.map)));
  return d;
}

// ---- equivariant bimodules ---------------------------------------------------------

CheckReport validate_equivariant(const EquivariantBimodule& x, const Tolerance& tol,
                                 std::uint64_t seed) {
  CheckReport rep("equivariant " + x.carrier->name);
  rep.seed = seed;
  const auto& c = *x.carrier;
  const FiniteGroup& g = *x.alpha.group;
  rep.merge(validate_action(x.alpha, tol, seed), "alpha: ");
  rep.merge(validate_action(x.beta, tol, seed), "beta: ");
  bool shapes = x.beta.group->order == g.order && static_cast<int>(x.gamma.size()) == g.order &&
                same_algebra(x.alpha.algebra, c.left) && same_algebra(x.beta.algebra, c.right);
  for (const auto& m : x.gamma) shapes = shapes && m.rows() == c.dim && m.cols() == c.dim;
  rep.require("shapes", "gamma per element on the carrier", shapes);
  if (!shapes) return rep;
  Rng rng(seed);
  auto sa = samples(*c.left, rng);
  auto sb = samples(*c.right, rng);
  double scale = 1.0 + std::max({scale_of(x.gamma), scale_of(c.left_action), scale_of(c.inner)});
  double dl = 0.0, dr = 0.0, di = 0.0, dh = 0.0;
  for (int s = 0; s < g.order; ++s) {
    const CMatrix& gs = x.gamma[static_cast<std::size_t>(s)];
    for (const auto& a : sa)
      dl = std::max(dl, max_abs(CMatrix(gs * c.act_left(a) - c.act_left(x.alpha[s](a)) * gs)));
    for (const auto& b : sb)
      dr = std::max(dr, max_abs(CMatrix(gs * c.act_right(b) - c.act_right(x.beta[s](b)) * gs)));
    const CMatrix& bs = x.beta[s].map;
    for (Index n = 0; n < c.right->dim(); ++n) {
      CMatrix rhs = combine(c.inner, bs.row(n).transpose(), c.dim);
      di = std::max(di, max_abs(CMatrix(gs.adjoint() * c.inner[static_cast<std::size_t>(n)] * gs - rhs)));
    }
    for (int t = 0; t < g.order; ++t)
      dh = std::max(dh, max_abs(CMatrix(gs * x.gamma[static_cast<std::size_t>(t)] -
                                        x.gamma[static_cast<std::size_t>(g(s, t))])));
  }
  rep.add("left compatibility", "gamma_s(a.x) = alpha_s(a).gamma_s(x)", dl, tol.bound(scale * scale));
  rep.add("right compatibility", "gamma_s(x.b) = gamma_s(x).beta_s(b)", dr, tol.bound(scale * scale));
  rep.add("inner product", "<gamma_s x, gamma_s y> = beta_s<x, y>", di, tol.bound(scale * scale * scale));
  rep.add("homomorphism", "gamma_s gamma_t = gamma_st", dh, tol.bound(scale * scale));
  return rep;
}

EquivariantBimodule trivially_equivariant(const BimodulePtr& x, const GroupPtr& g) {
  EquivariantBimodule e{x, trivial_action(x->left, g), trivial_action(x->right, g), {}};
  for (int s = 0; s < g->order; ++s) e.gamma.push_back(identity(x->dim));
  return e;
}

EquivariantBimodule equivariant_identity(const GroupAction& beta) {
  EquivariantBimodule e{identity_bimodule(beta.algebra), beta, beta, {}};
  for (const auto& m : beta.maps) e.gamma.push_back(m.map);
  return e;
}

EquivariantBimodule equivariant_from_hom(const StarHom& phi, const GroupAction& alpha,
                                         const GroupAction& epsilon, const Tolerance& tol) {
  double d = equivariance_defect(phi, alpha, epsilon);
  if (d > tol.bound(1.0 + max_abs(phi.map)))
    throw MoritaError("NotEquivariant", "phi alpha_s != epsilon_s phi (defect " + std::to_string(d) + ")");
  EquivariantBimodule e{bimodule_from_hom(phi, tol), alpha, epsilon, {}};
  for (const auto& m : epsilon.maps) e.gamma.push_back(m.map);
  return e;
}

EquivariantBimodule restrict(const EquivariantBimodule& x, const Subgroup& h) {
  EquivariantBimodule out{x.carrier, restrict(x.alpha, h), restrict(x.beta, h), {}};
  for (int e : h.elements) out.gamma.push_back(x.gamma[static_cast<std::size_t>(e)]);
  return out;
}

EquivariantTensor equivariant_tensor(const EquivariantBimodule& x, const EquivariantBimodule& y,
                                     const Tolerance& tol) {
  EquivariantTensor t;
  t.product = tensor_product(x.carrier, y.carrier, tol);
  const CMatrix& v = t.product.quotient;
  t.result = {t.product.result, x.alpha, y.beta, {}};
  for (std::size_t s = 0; s < x.gamma.size(); ++s) {
    CMatrix step = apply_second_factor(y.gamma[s], v, x.carrier->dim);
    step = apply_first_factor(x.gamma[s], step, y.carrier->dim);
    t.result.gamma.push_back(v.adjoint() * step);
  }
  return t;
}

CheckReport validate_equivariant_map(const BimoduleMap& f, const EquivariantBimodule& src,
                                     const EquivariantBimodule& dst, const Tolerance& tol,
                                     std::uint64_t seed) {
  CheckReport rep = validate_isomorphism(f, tol, seed);
  double d = 0.0;
  double scale = 1.0 + max_abs(f.map) + scale_of(src.gamma) + scale_of(dst.gamma);
  if (src.gamma.size() != dst.gamma.size()) {
    rep.require("equivariance", "same group", false);
    return rep;
  }
  for (std::size_t s = 0; s < src.gamma.size(); ++s)
    d = std::max(d, max_abs(CMatrix(f.map * src.gamma[s] - dst.gamma[s] * f.map)));
  rep.add("equivariance", "Phi gamma_s = gamma'_s Phi", d, tol.bound(scale * scale));
  return rep;
}

IsomorphismSearch find_equivariant_isomorphism(const EquivariantBimodule& x,
                                               const EquivariantBimodule& y, const Tolerance& tol,
                                               std::uint64_t seed) {
  IsomorphismSearch out;
  if (!same_action(x.alpha, y.alpha, tol) || !same_action(x.beta, y.beta, tol)) {
    out.obstruction = "coefficient actions differ";
    return out;
  }
  IsomorphismSearch plain = find_isomorphism(x.carrier, y.carrier, tol, seed);
  if (!plain) {
    out.obstruction = plain.obstruction;
    return out;
  }
  const CMatrix& phi0 = plain.map->map;
  const auto& c = *x.carrier;
  const Index d = c.dim;
  // Bimodule endomorphisms of X from the commutant of kappa-hat.
  StandardForm sf = standard_form(c, tol);
  std::vector<CVector> imgs;
  for (Index k = 0; k < c.left->dim(); ++k) imgs.push_back(sf.kappa.map.col(k));
  CMatrix comm = intertwiner_space(sf.compact_canonical, imgs, imgs, tol);
  std::vector<CMatrix> ends;
  for (Index l = 0; l < comm.cols(); ++l) {
    CMatrix u = sf.compact_canonical->to_matrix(comm.col(l));
    std::vector<CMatrix> blocks;
    Index off = 0;
    for (std::size_t j = 0; j < sf.multiplicities.size(); ++j) {
      const Index k = sf.multiplicities[j];
      if (k == 0) continue;
      blocks.push_back(kron(u.block(off, off, k, k), identity(sf.block_sizes[j])));
      off += k;
    }
    ends.push_back(phi0 * sf.basis * block_diagonal(blocks) * sf.basis_inverse);
  }
  const std::size_t ng = x.gamma.size();
  CMatrix cons(static_cast<Index>(ng) * d * d, static_cast<Index>(ends.size()));
  for (std::size_t l = 0; l < ends.size(); ++l)
    for (std::size_t s = 0; s < ng; ++s)
      cons.block(static_cast<Index>(s) * d * d, static_cast<Index>(l), d * d, 1) =
          flatten(CMatrix(ends[l] * x.gamma[s] - y.gamma[s] * ends[l]));
  CMatrix sol = kernel_basis(cons, tol);
  if (sol.cols() == 0) {
    out.obstruction = "no equivariant bimodule map";
    return out;
  }
  Rng rng(seed);
  CVector coef = sol * rng.complex_vector(sol.cols());
  CMatrix t = CMatrix::Zero(d, d);
  for (std::size_t l = 0; l < ends.size(); ++l) t += coef(static_cast<Index>(l)) * ends[l];
  if (smallest_singular_value(t) <= tol.rank_cutoff() * std::max(1.0, operator_norm(t))) {
    out.obstruction = "equivariant maps are not invertible";
    return out;
  }
  // Polar part with respect to a beta-invariant faithful trace.
  CVector tau = CVector::Zero(c.right->dim());
  CVector base = c.right->trace_functional();
  for (const auto& b : x.beta.maps) tau += b.map.transpose() * base;
  tau /= static_cast<double>(ng);
  CMatrix sx = x.carrier->scalar_gram(tau), sy = y.carrier->scalar_gram(tau);
  sx = CMatrix(0.5 * (sx + sx.adjoint()));
  sy = CMatrix(0.5 * (sy + sy.adjoint()));
  CMatrix sxh = psd_sqrt(sx), sxih = pd_inverse_sqrt(sx, tol);
  CMatrix h = sxh * (sx.inverse() * t.adjoint() * sy * t) * sxih;
  h = CMatrix(0.5 * (h + h.adjoint()));
  CMatrix pinv = sxih * pd_inverse_sqrt(h, tol) * sxh;
  BimoduleMap u{x.carrier, y.carrier, t * pinv};
  CheckReport r = validate_equivariant_map(u, x, y, tol, seed);
  out.defect = r.max_defect();
  if (!r.passed()) {
    out.obstruction = "constructed map fails: " + r.first_failure();
    return out;
  }
  out.map = u;
  return out;
}

EquivariantFactorization equivariant_factor(const EquivariantBimodule& x, const Tolerance& tol,
                                            std::uint64_t seed) {
  EquivariantFactorization ef;
  ef.report = CheckReport("equivariant factorization " + x.carrier->name);
  ef.report.seed = seed;
  ef.factorization = factor_morphism(x.carrier, tol, seed);
  ef.report.merge(ef.factorization.report, "factorization: ");
  const auto& k = ef.factorization.algebra;
  std::vector<CMatrix> emaps;
  for (const auto& gs : x.gamma) {
    CMatrix ginv = gs.inverse();
    CMatrix m(k->dim(), k->dim());
    for (Index j = 0; j < k->dim(); ++j) m.col(j) = k->to_coords(gs * k->basis()[static_cast<std::size_t>(j)] * ginv);
    emaps.push_back(m);
  }
  ef.epsilon = make_action(k, x.group(), std::move(emaps));
  ef.report.merge(validate_action(ef.epsilon, tol, seed), "epsilon: ");
  const StarHom& phi = ef.factorization.phi;
  ef.report.add("phi equivariant", "kappa alpha_s = epsilon_s kappa",
                equivariance_defect(phi, x.alpha, ef.epsilon), tol.bound(1.0 + max_abs(phi.map)));
  ef.hom_module = {ef.factorization.hom_module, x.alpha, ef.epsilon, {}};
  for (const auto& m : ef.epsilon.maps) ef.hom_module.gamma.push_back(m.map);
  ef.imprimitivity = {ef.factorization.imprimitivity, ef.epsilon, x.beta, x.gamma};
  ef.report.merge(validate_equivariant(ef.imprimitivity, tol, seed), "Y: ");
  ef.composite = equivariant_tensor(ef.hom_module, ef.imprimitivity, tol);
  BimoduleMap iso{ef.composite.result.carrier, x.carrier,
                  left_unitor(ef.composite.product, phi).map};
  ef.report.merge(validate_equivariant_map(iso, ef.composite.result, x, tol, seed), "iso: ");
  return ef;
}

EquivariantImprimitivity equivariant_imprimitivity(const EquivariantBimodule& x,
                                                   const Tolerance& tol, std::uint64_t seed) {
  EquivariantImprimitivity out;
  out.report = CheckReport("equivariant imprimitivity " + x.carrier->name);
  out.report.seed = seed;
  out.imprimitivity = is_imprimitivity(x.carrier, tol, seed);
  out.report.require("imprimitivity", "kappa bijective", out.imprimitivity.flag,
                     out.imprimitivity.reason);
  if (!out.imprimitivity.flag) return out;
  const auto& h = out.imprimitivity.left_inner;
  double d = 0.0, scale = 1.0 + scale_of(h) + scale_of(x.gamma);
  for (std::size_t s = 0; s < x.gamma.size(); ++s) {
    const CMatrix& gs = x.gamma[s];
    const CMatrix& as = x.alpha.maps[s].map;
    for (Index k = 0; k < as.rows(); ++k) {
      CMatrix lhs = CMatrix::Zero(x.carrier->dim, x.carrier->dim);
      for (Index m = 0; m < as.cols(); ++m)
        if (as(k, m) != Complex(0.0, 0.0)) lhs += as(k, m) * h[static_cast<std::size_t>(m)];
      CMatrix rhs = gs.transpose() * h[static_cast<std::size_t>(k)] * gs.conjugate();
      d = std::max(d, max_abs(CMatrix(lhs - rhs)));
    }
  }
  out.report.add("left inner equivariance", "alpha_s(A<x, y>) = A<gamma_s x, gamma_s y>", d,
                 tol.bound(scale * scale * scale));
  EquivariantBimodule rev{out.imprimitivity.reverse, x.beta, x.alpha, {}};
  for (const auto& gs : x.gamma) rev.gamma.push_back(gs.conjugate());
  out.report.merge(validate_equivariant(rev, tol, seed), "reverse: ");
  out.flag = out.report.passed();
  if (out.flag) out.reverse = rev;
  return out;
}

// ---- direct sums and C(G/H) -----------------------------------------------------------

DirectSumAlgebra::DirectSumAlgebra(PassKey, AlgebraPtr base, Index copies)
    : Algebra(base->dim() * copies, base->name() + "^" + std::to_string(copies)),
      base_(std::move(base)),
      copies_(copies) {
  CVector u(dim());
  for (Index c = 0; c < copies_; ++c) u.segment(c * base_->dim(), base_->dim()) = base_->unit();
  set_unit(u);
}

std::shared_ptr<const DirectSumAlgebra> DirectSumAlgebra::create(const AlgebraPtr& base, Index copies) {
  if (copies < 1) throw MoritaError("ShapeMismatch", "direct sum needs at least one copy");
  return std::make_shared<const DirectSumAlgebra>(PassKey{}, base, copies);
}

CVector DirectSumAlgebra::multiply(const CVector& x, const CVector& y) const {
  const Index n = base_->dim();
  CVector out(dim());
  for (Index c = 0; c < copies_; ++c)
    out.segment(c * n, n) = base_->multiply(x.segment(c * n, n), y.segment(c * n, n));
  return out;
}

CVector DirectSumAlgebra::star(const CVector& x) const {
  const Index n = base_->dim();
  CVector out(dim());
  for (Index c = 0; c < copies_; ++c) out.segment(c * n, n) = base_->star(x.segment(c * n, n));
  return out;
}

CMatrix DirectSumAlgebra::to_matrix(const CVector& x) const {
  const Index n = base_->dim(), a = base_->ambient_dim();
  CMatrix out = CMatrix::Zero(ambient_dim(), ambient_dim());
  for (Index c = 0; c < copies_; ++c) out.block(c * a, c * a, a, a) = base_->to_matrix(x.segment(c * n, n));
  return out;
}

CVector DirectSumAlgebra::to_coords(const CMatrix& m) const {
  const Index n = base_->dim(), a = base_->ambient_dim();
  CVector out(dim());
  for (Index c = 0; c < copies_; ++c) out.segment(c * n, n) = base_->to_coords(m.block(c * a, c * a, a, a));
  return out;
}

CVector DirectSumAlgebra::trace_functional() const {
  const Index n = base_->dim();
  CVector t = base_->trace_functional();
  CVector out(dim());
  for (Index c = 0; c < copies_; ++c) out.segment(c * n, n) = t;
  return out;
}

bool DirectSumAlgebra::equals(const Algebra& other) const {
  if (this == &other) return true;
  auto* o = dynamic_cast<const DirectSumAlgebra*>(&other);
  return o && o->copies_ == copies_ && base_->equals(*o->base_);
}

FunctionAmplification tensor_with_functions(const GroupAction& alpha, const Subgroup& h) {
  FunctionAmplification f;
  f.subgroup = h;
  const Index n = alpha.algebra->dim(), q = h.index();
  f.algebra = DirectSumAlgebra::create(alpha.algebra, q);
  const FiniteGroup& g = *alpha.group;
  std::vector<CMatrix> maps;
  for (int s = 0; s < g.order; ++s) {
    CMatrix m = CMatrix::Zero(n * q, n * q);
    int sinv = g.inverse[s];
    for (int c = 0; c < q; ++c) m.block(c * n, h.act(sinv, c) * n, n, n) = alpha[s].map;
    maps.push_back(m);
  }
  f.action = make_action(f.algebra, alpha.group, std::move(maps));
  CMatrix diag(n * q, n);
  for (int c = 0; c < q; ++c) diag.block(c * n, 0, n, n) = identity(n);
  f.diagonal = {alpha.algebra, f.algebra, diag};
  f.scalar_functions = CMatrix::Zero(n * q, q);
  for (int c = 0; c < q; ++c) f.scalar_functions.block(c * n, c, n, 1) = alpha.algebra->unit();
  return f;
}

EquivariantBimodule tensor_with_functions(const EquivariantBimodule& x, const Subgroup& h,
                                          const FunctionAmplification& left,
                                          const FunctionAmplification& right) {
  const auto& c = *x.carrier;
  const Index d = c.dim, q = h.index();
  auto spread = [&](const std::vector<CMatrix>& ms) {
    std::vector<CMatrix> out;
    for (Index b = 0; b < q; ++b)
      for (const auto& m : ms) {
        CMatrix big = CMatrix::Zero(d * q, d * q);
        big.block(b * d, b * d, d, d) = m;
        out.push_back(big);
      }
    return out;
  };
  BimodulePtr carrier = make_bimodule(left.algebra, right.algebra, spread(c.left_action),
                                      spread(c.right_action), spread(c.inner),
                                      c.name + "(x)C(G/H)");
  EquivariantBimodule out{carrier, left.action, right.action, {}};
  const FiniteGroup& g = *x.group();
  for (int s = 0; s < g.order; ++s) {
    CMatrix m = CMatrix::Zero(d * q, d * q);
    for (int b = 0; b < q; ++b) m.block(b * d, h.act(g.inverse[s], b) * d, d, d) = x.gamma[static_cast<std::size_t>(s)];
    out.gamma.push_back(m);
  }
  return out;
}

StarHom tensor_with_functions(const StarHom& phi, const FunctionAmplification& left,
                              const FunctionAmplification& right) {
  const Index q = left.subgroup.index();
  CMatrix m = CMatrix::Zero(phi.map.rows() * q, phi.map.cols() * q);
  for (Index b = 0; b < q; ++b) m.block(b * phi.map.rows(), b * phi.map.cols(), phi.map.rows(), phi.map.cols()) = phi.map;
  return {left.algebra, right.algebra, m};
}

}  // namespace morita
