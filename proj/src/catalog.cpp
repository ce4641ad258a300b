#include "morita/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "json.hpp"

namespace morita {

namespace {

using Table = std::vector<std::vector<Index>>;

// Bound on the dimension of the composites in the random category catalog.
constexpr Index kMaxComposite = 24;

AlgebraPtr scalars() { return MatrixAlgebra::canonical({1}, "C"); }

Index square_sum(const std::vector<Index>& blocks) {
  Index d = 0;
  for (Index b : blocks) d += b * b;
  return d;
}

std::string blocks_name(const std::vector<Index>& blocks) {
  std::string s;
  for (std::size_t i = 0; i < blocks.size(); ++i) s += (i ? "+M" : "M") + std::to_string(blocks[i]);
  return s;
}

std::string table_name(const Table& t) {
  std::string s = "[";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ";";
    for (std::size_t j = 0; j < t[i].size(); ++j) s += (j ? "," : "") + std::to_string(t[i][j]);
  }
  return s + "]";
}

std::vector<Index> column_sizes(const std::vector<Index>& a_blocks, const Table& mult) {
  std::vector<Index> n(mult.empty() ? 0 : mult.front().size(), 0);
  for (std::size_t i = 0; i < a_blocks.size(); ++i)
    for (std::size_t j = 0; j < n.size(); ++j) n[j] += mult[i][j] * a_blocks[i];
  return n;
}

Index module_dim(const std::vector<Index>& a_blocks, const std::vector<Index>& b_blocks, const Table& mult) {
  auto k = column_sizes(a_blocks, mult);
  Index d = 0;
  for (std::size_t j = 0; j < k.size(); ++j) d += k[j] * b_blocks[j];
  return d;
}

bool is_permutation(const Table& t) {
  if (t.empty() || t.size() != t.front().size()) return false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    Index row = 0, col = 0;
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (t[i][j] > 1) return false;
      row += t[i][j];
      col += t[j][i];
    }
    if (row != 1 || col != 1) return false;
  }
  return true;
}

// Algebras of dimension at most 6 given by their blocks.
const std::vector<std::vector<Index>>& algebra_pool() {
  static const std::vector<std::vector<Index>> pool = {
      {1}, {1, 1}, {2}, {1, 1, 1}, {2, 1}, {1, 1, 1, 1}, {2, 1, 1}, {1, 1, 1, 1, 1}};
  return pool;
}

const std::vector<Index>& pick(Rng& rng, const std::vector<std::vector<Index>>& pool) {
  return pool[rng.index(pool.size())];
}

// Random multiplicity table with entries in {0, 1, 2}, every column hit and
// the module dimension bounded; falls back to the sparsest table.
Table random_table(Rng& rng, const std::vector<Index>& a, const std::vector<Index>& b, Index max_dim,
                   const std::function<bool(const Table&)>& accept = {}) {
  for (int attempt = 0; attempt < 400; ++attempt) {
    Table t(a.size(), std::vector<Index>(b.size(), 0));
    for (auto& row : t)
      for (auto& e : row) e = static_cast<Index>(rng.index(3)) == 2 ? 2 : static_cast<Index>(rng.index(2));
    bool full = true;
    for (std::size_t j = 0; j < b.size(); ++j) {
      Index c = 0;
      for (std::size_t i = 0; i < a.size(); ++i) c += t[i][j];
      full = full && c > 0;
    }
    if (!full || module_dim(a, b, t) > max_dim) continue;
    if (accept && !accept(t)) continue;
    return t;
  }
  Table t(a.size(), std::vector<Index>(b.size(), 0));
  const auto smallest = std::min_element(a.begin(), a.end()) - a.begin();
  for (std::size_t j = 0; j < b.size(); ++j) t[static_cast<std::size_t>(smallest)][j] = 1;
  return t;
}

BimodulePtr random_module(Rng& rng, const std::vector<Index>& a, const std::vector<Index>& b,
                          Index max_dim) {
  Table t = random_table(rng, a, b, max_dim);
  BimodulePtr x = block_bimodule(a, b, t, blocks_name(a) + "->" + blocks_name(b) + " " + table_name(t));
  return conjugate_bimodule(x, random_unitary(rng, x->dim));
}

Table table_product(const Table& x, const Table& y) {
  Table out(x.size(), std::vector<Index>(y.front().size(), 0));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j)
      for (std::size_t l = 0; l < y[j].size(); ++l) out[i][l] += x[i][j] * y[j][l];
  return out;
}

// Composable X: A -> B, Y: B -> C, Z: C -> D over algebras of dimension at
// most 6 whose composites stay within max_composite dimensions.
std::vector<BimodulePtr> random_triple(Rng& rng, Index max_dim, Index max_composite) {
  for (;;) {
    std::vector<std::vector<Index>> blocks;
    for (int k = 0; k < 4; ++k) blocks.push_back(pick(rng, algebra_pool()));
    std::vector<Table> t;
    for (int k = 0; k < 3; ++k) t.push_back(random_table(rng, blocks[k], blocks[k + 1], max_dim));
    const Table xy = table_product(t[0], t[1]);
    if (module_dim(blocks[0], blocks[2], xy) > max_composite ||
        module_dim(blocks[1], blocks[3], table_product(t[1], t[2])) > max_composite ||
        module_dim(blocks[0], blocks[3], table_product(xy, t[2])) > max_composite)
      continue;
    std::vector<BimodulePtr> out;
    AlgebraPtr left;
    for (int k = 0; k < 3; ++k) {
      BimodulePtr x = block_bimodule(blocks[k], blocks[k + 1], t[k],
                                     blocks_name(blocks[k]) + "->" + blocks_name(blocks[k + 1]) + " " + table_name(t[k]));
      x = conjugate_bimodule(x, random_unitary(rng, x->dim));
      // Share the middle algebras between consecutive modules.
      if (left) x = make_bimodule(left, x->right, x->left_action, x->right_action, x->inner, x->name);
      left = x->right;
      out.push_back(x);
    }
    return out;
  }
}

Subgroup first_subgroup_of_order(const GroupPtr& g, std::size_t order) {
  for (const auto& h : all_subgroups(g))
    if (h.elements.size() == order) return h;
  throw MoritaError("BadSubgroup", g->name + " has no subgroup of order " + std::to_string(order));
}

std::optional<Subgroup> index_two_subgroup(const GroupPtr& g) {
  if (g->order % 2) return std::nullopt;
  for (const auto& h : all_subgroups(g))
    if (h.index() == 2) return h;
  return std::nullopt;
}

// A proper nontrivial subgroup of smallest order, if any.
std::optional<Subgroup> small_subgroup(const GroupPtr& g) {
  std::optional<Subgroup> best;
  for (const auto& h : all_subgroups(g)) {
    const auto n = h.elements.size();
    if (n > 1 && static_cast<int>(n) < g->order && (!best || n < best->elements.size())) best = h;
  }
  return best;
}

std::string subgroup_name(const Subgroup& h) {
  std::string s = "{";
  for (std::size_t i = 0; i < h.elements.size(); ++i) s += (i ? "," : "") + std::to_string(h.elements[i]);
  return s + "}";
}

std::string group_label(const GroupPtr& g) { return g->name; }

StarHom ones_hom(const GroupAction& target) {
  return {scalars(), target.algebra, target.algebra->unit()};
}

// M_2 with Ad diag(1, chi(s)); the column module C^2 over it with gamma_s = u_s.
struct ColumnSystem {
  GroupAction inner;
  EquivariantBimodule column;
};

ColumnSystem column_system(const GroupPtr& g) {
  auto u = character_unitaries(g);
  auto m2 = MatrixAlgebra::canonical({2}, "M2");
  GroupAction inner = unitary_action(m2, g, u);
  EquivariantBimodule col{column_module(2), inner, trivial_action(scalars(), g), u};
  return {inner, col};
}

// C^[G:K] as a C - C(G/K) bimodule with gamma = translation: not a hom
// bimodule and not imprimitive once [G:K] > 1.
EquivariantBimodule coset_vectors(const Subgroup& k) {
  GroupAction tr = translation_action(k);
  const Index n = k.index();
  BimodulePtr x = block_bimodule({1}, std::vector<Index>(static_cast<std::size_t>(n), 1),
                                 {std::vector<Index>(static_cast<std::size_t>(n), 1)}, "C^" + std::to_string(n));
  EquivariantBimodule e{x, trivial_action(scalars(), k.parent), tr, {}};
  for (int s = 0; s < k.parent->order; ++s) e.gamma.push_back(tr[s].map);
  return e;
}

// C + C -> M_2 diagonally, equivariant for (swap or trivial) and Ad diag(1, chi).
StarHom diagonal_into_m2(const AlgebraPtr& cc, const AlgebraPtr& m2) {
  CMatrix m = CMatrix::Zero(4, 2);
  m(0, 0) = 1.0;
  m(3, 1) = 1.0;
  return {cc, m2, m};
}

// The action on C + C matching Ad diag(1, chi) or Ad of the flip on the diagonal.
GroupAction diagonal_action(const GroupPtr& g, const std::vector<CMatrix>& u) {
  auto cc = MatrixAlgebra::canonical({1, 1}, "C+C");
  std::vector<CMatrix> maps;
  for (int s = 0; s < g->order; ++s) {
    const bool swaps = std::abs(u[static_cast<std::size_t>(s)](0, 0)) < 0.5;
    CMatrix m = CMatrix::Zero(2, 2);
    if (swaps) {
      m(0, 1) = m(1, 0) = 1.0;
    } else {
      m = identity(2);
    }
    maps.push_back(m);
  }
  return make_action(cc, g, maps);
}

std::vector<CMatrix> flip_unitaries(const GroupPtr& g, const Subgroup& k) {
  CMatrix flip = CMatrix::Zero(2, 2);
  flip(0, 1) = flip(1, 0) = 1.0;
  std::vector<CMatrix> u;
  for (int s = 0; s < g->order; ++s) u.push_back(k.contains(s) ? identity(2) : flip);
  return u;
}

CheckReport failed_item(const std::string& subject, const std::string& reference, const MoritaError& e) {
  CheckReport r(subject);
  r.require("completed", reference, false, e.what());
  return r;
}

template <typename F>
CheckReport guarded(const std::string& subject, const std::string& reference, F&& f) {
  try {
    CheckReport r = f();
    r.set_subject(subject);
    return r;
  } catch (const MoritaError& e) {
    return failed_item(subject, reference, e);
  }
}

// ---- sections ------------------------------------------------------------------

CatalogSection category_section(const CatalogOptions& opt) {
  CatalogSection sec{1, "category laws on random composable triples", {}, 50};
  Rng rng(opt.seed);
  for (int n = 0; n < 50; ++n) {
    auto m = random_triple(rng, opt.max_dim, kMaxComposite);
    const std::string subject = "triple " + std::to_string(n) + ": " + m[0]->name + " | " + m[1]->name + " | " + m[2]->name;
    sec.items.push_back(guarded(subject, "category laws", [&] {
      return check_category_laws(make_morphism(m[0], opt.tol), make_morphism(m[1], opt.tol),
                                 make_morphism(m[2], opt.tol), opt.tol, opt.seed);
    }));
  }
  return sec;
}

CatalogSection hom_equality_section(const CatalogOptions& opt) {
  CatalogSection sec{2, "equality of hom morphisms up to unitary conjugation", {}, 30};
  Rng rng(opt.seed + 2);
  const std::vector<std::vector<Index>> sources = {{1}, {1, 1}, {2}, {1, 1, 1}, {2, 1}, {1, 1, 2}};
  for (int n = 0; n < 20; ++n) {
    const auto& a = pick(rng, sources);
    const std::size_t nb = 1 + rng.index(2);
    const std::vector<Index> shape(nb, 1);
    Table t = random_table(rng, a, shape, 36, [&](const Table& tt) {
      return square_sum(column_sizes(a, tt)) <= 36;
    });
    StarHom phi = block_hom(a, t);
    auto b = phi.target;
    // u block-diagonal unitary in B.
    CMatrix u = CMatrix::Zero(b->ambient_dim(), b->ambient_dim());
    Index off = 0;
    for (Index nj : column_sizes(a, t)) {
      u.block(off, off, nj, nj) = random_unitary(rng, nj);
      off += nj;
    }
    StarHom psi{phi.source, b, CMatrix(b->dim(), phi.source->dim())};
    for (Index k = 0; k < phi.source->dim(); ++k)
      psi.map.col(k) = b->to_coords(u * b->to_matrix(phi.map.col(k)) * u.adjoint());
    const std::string subject = "[phi] = [Ad u o phi], " + blocks_name(a) + " " + table_name(t);
    sec.items.push_back(guarded(subject, "hom morphisms equal iff unitarily conjugate", [&] {
      CheckReport r(subject);
      r.seed = opt.seed;
      Equality eq = equal(hom_morphism(phi, opt.tol), hom_morphism(psi, opt.tol), opt.tol, opt.seed);
      r.require("equality certified", "[phi] = [Ad u o phi]", eq.flag, eq.obstruction);
      if (eq.witness) r.merge(validate_isomorphism(*eq.witness, opt.tol, opt.seed), "witness: ");
      UnitaryEquivalence ue = hom_unitary_equivalence(phi, psi, opt.tol, opt.seed);
      r.require("unitary recovered", "psi = Ad u o phi", ue.unitary.has_value(), ue.obstruction);
      if (ue.unitary) {
        const CMatrix w = b->to_matrix(*ue.unitary);
        r.add("recovered unitary", "u* u = 1", unitary_defect(w), 1e-8);
        r.add("conjugation defect", "psi = Ad u o phi", ue.defect, 1e-8);
      }
      return r;
    }));
  }
  // Same source and target, different multiplicity tables: two equal-size
  // blocks of A with their rows exchanged.
  const std::vector<std::vector<Index>> twins = {{1, 1}, {2, 2}, {1, 1, 2}, {1, 1, 1}};
  for (int n = 0; n < 10; ++n) {
    const auto& a = twins[static_cast<std::size_t>(n) % twins.size()];
    const std::vector<Index> shape(2, 1);
    Table t = random_table(rng, a, shape, 64, [&](const Table& tt) {
      return tt[0] != tt[1] && square_sum(column_sizes(a, tt)) <= 36;
    });
    if (t[0] == t[1]) t = {{2, 1}, {1, 2}};
    Table s = t;
    std::swap(s[0], s[1]);
    for (std::size_t i = 2; i < a.size(); ++i) s[i] = t[i];
    StarHom phi = block_hom(a, t);
    StarHom psi = block_hom(a, s);
    psi.target = phi.target;
    const std::string subject = "[phi] != [psi], " + blocks_name(a) + " " + table_name(t) + " vs " + table_name(s);
    sec.items.push_back(guarded(subject, "hom morphisms equal iff unitarily conjugate", [&] {
      CheckReport r(subject);
      r.seed = opt.seed;
      Equality eq = equal(hom_morphism(phi, opt.tol), hom_morphism(psi, opt.tol), opt.tol, opt.seed);
      r.require("inequality certified", "multiplicity tables differ", !eq.flag && !eq.obstruction.empty(),
                eq.obstruction);
      UnitaryEquivalence ue = hom_unitary_equivalence(phi, psi, opt.tol, opt.seed);
      r.require("no unitary", "multiplicity tables differ", !ue.unitary && !ue.obstruction.empty(),
                ue.obstruction);
      return r;
    }));
  }
  return sec;
}

CatalogSection invertibility_section(const CatalogOptions& opt) {
  CatalogSection sec{3, "invertibility criterion in both directions", {}, 20};
  Rng rng(opt.seed + 3);
  for (int n = 0; n < 24; ++n) {
    const bool imprimitive = n % 2 == 0;
    std::vector<Index> a = pick(rng, algebra_pool());
    std::vector<Index> b;
    Table t;
    if (imprimitive) {
      // B's blocks are A's in a shuffled order, each A block once.
      std::vector<std::size_t> order(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) order[i] = i;
      for (std::size_t i = a.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
      t.assign(a.size(), std::vector<Index>(a.size(), 0));
      std::vector<Index> sizes = {1, 2};
      for (std::size_t j = 0; j < a.size(); ++j) {
        t[order[j]][j] = 1;
        b.push_back(sizes[rng.index(2)]);
      }
      if (module_dim(a, b, t) > opt.max_dim)
        for (auto& x : b) x = 1;
    } else {
      b = pick(rng, algebra_pool());
      t = random_table(rng, a, b, opt.max_dim, [](const Table& tt) { return !is_permutation(tt); });
      if (is_permutation(t)) {
        b = {1};
        t.assign(a.size(), {1});
        t[0][0] = 2;
      }
    }
    BimodulePtr x = block_bimodule(a, b, t, blocks_name(a) + "->" + blocks_name(b) + " " + table_name(t));
    x = conjugate_bimodule(x, random_unitary(rng, x->dim));
    const std::string subject = std::string(imprimitive ? "imprimitive " : "not imprimitive ") + x->name;
    sec.items.push_back(guarded(subject, "invertible iff imprimitivity bimodule", [&] {
      Morphism f = make_morphism(x, opt.tol);
      CheckReport r = check_invertibility(f, opt.tol, opt.seed);
      r.require("expected direction", imprimitive ? "imprimitive => invertible" : "not imprimitive => no inverse",
                is_isomorphism(f, opt.tol) == imprimitive && is_permutation(t) == imprimitive);
      return r;
    }));
  }
  return sec;
}

CatalogSection factorization_section(const CatalogOptions& opt) {
  CatalogSection sec{4, "factorization [X] = [Y] o [phi]", {}, 50};
  Rng rng(opt.seed);  // the category catalog's modules, regenerated
  for (int n = 0; n < 50; ++n) {
    for (const auto& x : random_triple(rng, opt.max_dim, kMaxComposite)) {
      const std::string subject = "factor " + x->name;
      sec.items.push_back(guarded(subject, "X = C_phi (x) Y", [&] {
        Factorization f = factor_morphism(x, opt.tol, opt.seed);
        CheckReport r(subject);
        r.merge(f.report);
        r.merge(validate_isomorphism(f.iso, opt.tol, opt.seed), "iso: ");
        r.add("reproduction defect", "C_phi (x) Y = X", r.max_defect(), 1e-8);
        Imprimitivity imp = is_imprimitivity(f.imprimitivity, opt.tol, opt.seed);
        r.require("Y imprimitive", "Y is a K(X)-B imprimitivity bimodule", imp.flag, imp.reason);
        return r;
      }));
    }
  }
  return sec;
}

// Conjugacy classes counted from the table: the number of irreducible
// representations of G.
Index class_count(const FiniteGroup& g) {
  std::vector<int> cls(static_cast<std::size_t>(g.order), -1);
  Index count = 0;
  for (int x = 0; x < g.order; ++x) {
    if (cls[static_cast<std::size_t>(x)] >= 0) continue;
    for (int s = 0; s < g.order; ++s) cls[static_cast<std::size_t>(g(g(s, x), g.inverse[static_cast<std::size_t>(s)]))] = static_cast<int>(count);
    ++count;
  }
  return count;
}

CatalogSection crossed_oracle_section(const CatalogOptions& opt) {
  CatalogSection sec{5, "crossed products against character and Stone-von Neumann oracles", {}, 0};
  for (int n : {2, 3, 4, 6}) {
    if (n > opt.max_group_order) continue;
    auto g = make_group("cyclic(" + std::to_string(n) + ")");
    const std::string subject = "C x| Z" + std::to_string(n);
    sec.items.push_back(guarded(subject, "C*(G) = sum over irreducibles", [&] {
      CheckReport r(subject);
      auto cp = crossed_product(trivial_action(scalars(), g), opt.tol, opt.seed);
      r.merge(validate_crossed_product(*cp, opt.tol, opt.seed));
      const auto& blocks = cp->structure().block_sizes;
      Index squares = 0;
      for (Index b : blocks) squares += b * b;
      const bool ones = std::all_of(blocks.begin(), blocks.end(), [](Index b) { return b == 1; });
      r.require("block count", "one block per conjugacy class",
                static_cast<Index>(blocks.size()) == class_count(*g), std::to_string(blocks.size()) + " blocks");
      r.require("abelian blocks", "abelian group: all irreducibles one-dimensional", ones);
      r.require("dimension", "dim A x| G = dim A |G|", cp->dim() == n && squares == n);
      return r;
    }));
  }
  for (int n : {2, 3}) {
    if (n > opt.max_group_order) continue;
    auto g = make_group("cyclic(" + std::to_string(n) + ")");
    const std::string subject = "C(Z" + std::to_string(n) + ") x| Z" + std::to_string(n);
    sec.items.push_back(guarded(subject, "C(G) x| G = K(l^2 G)", [&] {
      CheckReport r(subject);
      auto cp = crossed_product(translation_action(trivial_subgroup(g)), opt.tol, opt.seed);
      r.merge(validate_crossed_product(*cp, opt.tol, opt.seed));
      const auto& blocks = cp->structure().block_sizes;
      r.require("single block", "C(G) x| G = M_|G|", blocks == std::vector<Index>{static_cast<Index>(n)},
                blocks_name(blocks));
      r.require("dimension", "dim A x| G = dim A |G|", cp->dim() == n * n);
      return r;
    }));
  }
  for (const auto& g : catalog_groups(opt.max_group_order)) {
    if (g->abelian()) continue;
    const std::string subject = "C x| " + group_label(g);
    sec.items.push_back(guarded(subject, "C*(G) = sum over irreducibles", [&] {
      CheckReport r(subject);
      auto cp = crossed_product(trivial_action(scalars(), g), opt.tol, opt.seed);
      const auto& blocks = cp->structure().block_sizes;
      Index squares = 0;
      for (Index b : blocks) squares += b * b;
      r.require("block count", "one block per conjugacy class",
                static_cast<Index>(blocks.size()) == class_count(*g), blocks_name(blocks));
      r.require("dimension", "dim A x| G = dim A |G|", cp->dim() == g->order && squares == g->order);
      return r;
    }));
  }
  return sec;
}

std::vector<EquivariantBimodule> functor_items(const GroupPtr& g, Rng& rng) {
  std::vector<EquivariantBimodule> items;
  // C(G/K) with K trivial for small groups.
  Subgroup k = g->order <= 6 ? trivial_subgroup(g) : *small_subgroup(g);
  GroupAction tr = translation_action(k);
  GroupAction triv = trivial_action(scalars(), g);
  items.push_back(equivariant_from_hom(ones_hom(tr), triv, tr));
  items.push_back(equivariant_identity(tr));
  ColumnSystem cs = column_system(g);
  items.push_back(cs.column);
  items.push_back(equivariant_identity(triv));
  BimodulePtr x = random_module(rng, {1, 1}, {2}, 8);
  items.push_back(trivially_equivariant(x, g));
  return items;
}

CatalogSection functor_section(const CatalogOptions& opt) {
  CatalogSection sec{6, "crossed-product functor", {}, 0};
  Rng rng(opt.seed + 6);
  std::size_t count = 0;
  for (const auto& g : catalog_groups(opt.max_group_order)) {
    auto items = functor_items(g, rng);
    count += items.size();
    const std::string subject = "functor over " + group_label(g);
    sec.items.push_back(guarded(subject, "X -> X x| G is a functor", [&] {
      CheckReport r = check_functor(items, opt.tol, opt.seed);
      for (const auto& e : r.entries())
        if (e.name.find("pairing") != std::string::npos && e.defect > 1e-9)
          r.add("pairing bound", "pairing identity to 1e-9", e.defect, 1e-9, e.name);
      return r;
    }));
  }
  CheckReport size("catalog size");
  size.require("equivariant items", "at least 20 items with |G| <= 8", count >= 20 || opt.max_group_order < 8,
               std::to_string(count) + " items");
  sec.items.push_back(size);
  return sec;
}

std::vector<GroupAction> green_actions(const GroupPtr& g) {
  std::vector<GroupAction> out;
  out.push_back(trivial_action(scalars(), g));
  if (auto k = index_two_subgroup(g)) {
    out.push_back(translation_action(*k));
  } else {
    out.push_back(trivial_action(MatrixAlgebra::canonical({1, 1}, "C+C"), g));
  }
  out.push_back(unitary_action(MatrixAlgebra::canonical({2}, "M2"), g, character_unitaries(g)));
  if (g->order <= 6) out.push_back(translation_action(trivial_subgroup(g)));
  if (auto k = small_subgroup(g)) out.push_back(translation_action(*k));
  return out;
}

CatalogSection green_section(const CatalogOptions& opt) {
  CatalogSection sec{7, "Green imprimitivity theorem", {}, 0};
  for (const auto& g : catalog_groups(opt.max_group_order)) {
    for (const auto& a : green_actions(g)) {
      for (const auto& h : all_subgroups(g)) {
        const std::string subject = group_label(g) + " on " + a.algebra->name() + ", H = " + subgroup_name(h);
        sec.items.push_back(guarded(subject, "Green imprimitivity", [&] {
          CheckReport r(subject);
          r.seed = opt.seed;
          r.merge(validate_action(a, opt.tol, opt.seed), "action: ");
          GreenBimodule gb = green_bimodule(a, h, opt.tol, opt.seed);
          r.merge(validate_green(gb, opt.tol, opt.seed), "green: ");
          r.merge(check_green_imprimitivity(gb, opt.tol, opt.seed), "imprimitivity: ");
          r.require("dimension law", "dim X = dim A |G|", gb.carrier->dim == a.algebra->dim() * g->order);
          return r;
        }));
      }
    }
  }
  for (const char* spec : {"cyclic(2)", "cyclic(3)", "cyclic(4)", "cyclic(6)", "symmetric(3)"}) {
    auto g = make_group(spec);
    const int n = g->order;
    if (n > opt.max_group_order) continue;
    {
      const std::string subject = "C(" + group_label(g) + ") x| " + group_label(g) + " = M" + std::to_string(n);
      sec.items.push_back(guarded(subject, "C(G) x| G = K(l^2 G)", [&] {
        CheckReport r(subject);
        GreenBimodule gb = green_bimodule(trivial_action(scalars(), g), trivial_subgroup(g), opt.tol, opt.seed);
        r.merge(check_green_imprimitivity(gb, opt.tol, opt.seed), "imprimitivity: ");
        const auto& blocks = gb.extended_algebra->structure().block_sizes;
        r.require("single block", "C(G) x| G = M_|G|", blocks == std::vector<Index>{static_cast<Index>(n)},
                  blocks_name(blocks));
        r.require("compacts", "K(X) = M_|G|", compact_blocks(gb, opt.tol) == std::vector<Index>{static_cast<Index>(n)});
        return r;
      }));
    }
  }
  return sec;
}

CatalogSection induction_section(const CatalogOptions& opt) {
  CatalogSection sec{8, "induction oracles", {}, 0};
  for (const char* spec : {"cyclic(4)", "symmetric(3)"}) {
    auto g = make_group(spec);
    if (g->order > opt.max_group_order) continue;
    const std::string subject = std::string("Ind_e^G 1 for ") + group_label(g);
    sec.items.push_back(guarded(subject, "induced trivial representation is regular", [&] {
      CheckReport r(subject);
      GreenBimodule gb = green_bimodule(trivial_action(scalars(), g), trivial_subgroup(g), opt.tol, opt.seed);
      Representation rho{gb.small, 1, {identity(1)}};
      Representation ind = induce(gb, rho, opt.tol);
      r.merge(validate_representation(ind, opt.tol, opt.seed), "induced: ");
      CVector chi = character(ind);
      double d = 0.0;
      for (int s = 0; s < g->order; ++s)
        d = std::max(d, std::abs(chi(s) - (s == g->identity ? double(g->order) : 0.0)));
      r.add("regular character", "chi(e) = |G|, chi(s) = 0 otherwise", d, 1e-9);
      r.require("dimension", "dim Ind = [G:H] dim rho", ind.dim == g->order);
      return r;
    }));
  }
  auto s3 = make_group("symmetric(3)");
  if (s3->order <= opt.max_group_order) {
    const std::string subject = "Ind_Z3^S3 omega";
    sec.items.push_back(guarded(subject, "Frobenius: induced character", [&] {
      CheckReport r(subject);
      Subgroup h = first_subgroup_of_order(s3, 3);
      GreenBimodule gb = green_bimodule(trivial_action(scalars(), s3), h, opt.tol, opt.seed);
      const Complex w = std::polar(1.0, 2.0 * M_PI / 3.0);
      // Local order follows the sorted elements; the second is a generator.
      std::vector<CMatrix> im(3, CMatrix(1, 1));
      const int gen = h.elements[1];
      im[0](0, 0) = 1.0;
      im[1](0, 0) = w;
      im[2](0, 0) = w * w;
      if ((*s3)(gen, gen) != h.elements[2]) std::swap(im[1], im[2]);
      Representation rho{gb.small, 1, im};
      Representation ind = induce(gb, rho, opt.tol);
      CVector chi = character(ind);
      // Frobenius: chi(s) = sum over cosets tH with t^-1 s t in H of omega(t^-1 s t).
      double d = 0.0;
      for (int s = 0; s < 6; ++s) {
        Complex expect = 0.0;
        for (int c = 0; c < h.index(); ++c) {
          const int t = h.transversal[static_cast<std::size_t>(c)];
          const int x = (*s3)((*s3)(s3->inverse[static_cast<std::size_t>(t)], s), t);
          if (h.contains(x)) expect += im[static_cast<std::size_t>(h.local[static_cast<std::size_t>(x)])](0, 0);
        }
        d = std::max(d, std::abs(chi(s) - expect));
      }
      r.add("Frobenius character", "Ind chi = (2, -1, 0) on classes", d, 1e-9);
      r.require("dimension", "dim Ind = [G:H] dim rho", ind.dim == 2);
      r.add("irreducible", "Ind omega is the 2-dimensional irreducible", std::abs(chi.squaredNorm() - 6.0), 1e-9);
      return r;
    }));
  }
  return sec;
}

struct SquareItem {
  std::string name;
  std::function<NaturalitySquare(const Subgroup&, SquareVariant)> run;
  GroupPtr group;
};

std::vector<Subgroup> square_subgroups(const GroupPtr& g) {
  std::vector<Subgroup> out = {trivial_subgroup(g)};
  if (auto k = small_subgroup(g)) {
    out.push_back(*k);
  } else {
    out.push_back(whole_group(g));
  }
  return out;
}

std::vector<SquareItem> square_items(const GroupPtr& g) {
  std::vector<SquareItem> items;
  const auto u = character_unitaries(g);
  auto m2 = MatrixAlgebra::canonical({2}, "M2");
  GroupAction inner = unitary_action(m2, g, u);
  GroupAction triv = trivial_action(scalars(), g);
  // A small G-set: the cosets of an index-2 subgroup, else G itself.
  Subgroup k = index_two_subgroup(g) ? *index_two_subgroup(g) : trivial_subgroup(g);
  GroupAction tr = translation_action(k);
  items.push_back({"hom C -> C(G/K)", [=](const Subgroup& h, SquareVariant v) {
                     return check_naturality_square(ones_hom(tr), triv, tr, h, v);
                   }, g});
  const auto u2 = index_two_subgroup(g) ? flip_unitaries(g, *index_two_subgroup(g)) : u;
  GroupAction diag = diagonal_action(g, u2);
  GroupAction inner2 = unitary_action(m2, g, u2);
  // Through M2 the amplified squares grow with |G|^2; kept to the small groups.
  if (g->order <= 4)
    items.push_back({"hom C+C -> M2", [=](const Subgroup& h, SquareVariant v) {
                       return check_naturality_square(diagonal_into_m2(diag.algebra, m2), diag, inner2, h, v);
                     }, g});
  items.push_back({"identity of C(G/K)", [=](const Subgroup& h, SquareVariant v) {
                     return check_naturality_square(equivariant_identity(tr), h, v);
                   }, g});
  ColumnSystem cs = column_system(g);
  items.push_back({"column module C^2 over M2 - C", [=](const Subgroup& h, SquareVariant v) {
                     return check_naturality_square(cs.column, h, v);
                   }, g});
  EquivariantBimodule cv = coset_vectors(k);
  items.push_back({"coset vectors C^[G:K] over C - C(G/K)", [=](const Subgroup& h, SquareVariant v) {
                     return check_naturality_square(cv, h, v);
                   }, g});
  EquivariantBimodule two = trivially_equivariant(block_bimodule({1}, {1}, {{2}}, "C^2"), g);
  items.push_back({"C^2 over C - C", [=](const Subgroup& h, SquareVariant v) {
                     return check_naturality_square(two, h, v);
                   }, g});
  return items;
}

CatalogSection naturality_section(const CatalogOptions& opt) {
  CatalogSection sec{9, "naturality of Green's bimodule", {}, 0};
  std::size_t morphisms = 0;
  for (const auto& g : catalog_groups(std::min(opt.max_group_order, 6))) {
    for (const auto& item : square_items(g)) {
      ++morphisms;
      for (const auto& h : square_subgroups(g)) {
        for (SquareVariant v : {SquareVariant::Mor, SquareVariant::Iso}) {
          const std::string subject = group_label(g) + " " + item.name + ", H = " + subgroup_name(h) +
                                      (v == SquareVariant::Mor ? ", mor" : ", iso");
          sec.items.push_back(guarded(subject, "natural transformation A -> [X_H^G(A)]", [&] {
            NaturalitySquare sq = item.run(h, v);
            CheckReport r(subject);
            r.merge(sq.report);
            r.require("witness", "linking-technique witness exists", sq.witness.has_value());
            r.add("witness defect", "square commutes", sq.defect, 1e-8);
            r.require("direct search", "find_isomorphism certifies the square", static_cast<bool>(sq.direct),
                      sq.direct.obstruction);
            return r;
          }));
        }
      }
    }
  }
  CheckReport size("catalog size");
  size.require("morphisms", "at least 15 morphisms, two subgroups each", morphisms >= 15 || opt.max_group_order < 6,
               std::to_string(morphisms) + " morphisms");
  sec.items.push_back(size);
  return sec;
}

CatalogSection compatibility_section(const CatalogOptions& opt) {
  CatalogSection sec{10, "induction in stages through the square", {}, 0};
  auto add = [&](const std::string& subject, const EquivariantBimodule& y, const Subgroup& h,
                 std::function<Representation(const CrossedPtr&)> rep) {
    sec.items.push_back(guarded(subject, "Ind through both paths of the square agree", [&] {
      auto bh = crossed_product(restrict(y.beta, h), opt.tol, opt.seed);
      return check_induction_compatibility(y, h, rep(bh), opt.tol, opt.seed);
    }));
  };
  auto ambient = [](const CrossedPtr& bh) { return Representation::ambient(bh); };
  for (const auto& g : catalog_groups(std::min(opt.max_group_order, 6))) {
    ColumnSystem cs = column_system(g);
    add(group_label(g) + " column module, H = {e}", cs.column, trivial_subgroup(g), ambient);
    Subgroup k = index_two_subgroup(g) ? *index_two_subgroup(g) : whole_group(g);
    add(group_label(g) + " coset vectors, H = " + subgroup_name(k), coset_vectors(k), k, ambient);
  }
  auto z2 = make_group("cyclic(2)");
  GroupAction triv = trivial_action(scalars(), z2);
  add("Z2 identity, sign of Z2", equivariant_identity(triv), whole_group(z2), [](const CrossedPtr& bh) {
    return Representation{bh, 1, {identity(1), CMatrix(-identity(1))}};
  });
  if (opt.max_group_order >= 6) sec.required = 5;
  return sec;
}

}  // namespace

// ---- named actions ---------------------------------------------------------------

GroupAction translation_action(const Subgroup& k) {
  const GroupPtr& g = k.parent;
  const Index n = k.index();
  auto a = MatrixAlgebra::canonical(std::vector<Index>(static_cast<std::size_t>(n), 1),
                                    n == g->order ? "C(" + g->name + ")" : "C(" + g->name + "/K)");
  std::vector<CMatrix> maps;
  for (int s = 0; s < g->order; ++s) {
    CMatrix m = CMatrix::Zero(n, n);
    for (int c = 0; c < n; ++c) m(k.act(s, c), c) = 1.0;
    maps.push_back(m);
  }
  return make_action(a, g, maps);
}

GroupAction unitary_action(const AlgebraPtr& a, const GroupPtr& g, const std::vector<CMatrix>& u) {
  if (static_cast<int>(u.size()) != g->order)
    throw MoritaError("ActionInvalid", "one unitary per group element expected");
  std::vector<CMatrix> maps;
  for (const auto& us : u) {
    if (us.rows() != a->ambient_dim() || us.cols() != a->ambient_dim())
      throw MoritaError("ActionInvalid", "unitary does not act on the ambient space");
    CMatrix m(a->dim(), a->dim());
    for (Index k = 0; k < a->dim(); ++k) m.col(k) = a->to_coords(us * a->basis_matrix(k) * us.adjoint());
    maps.push_back(m);
  }
  return make_action(a, g, maps);
}

GroupAction block_permutation_action(const AlgebraPtr& a, const GroupPtr& g,
                                     const std::vector<std::vector<Index>>& perm,
                                     const std::vector<std::vector<CMatrix>>& unitaries) {
  auto blocks = a->canonical_blocks();
  if (!blocks) throw MoritaError("ActionInvalid", "block permutation needs a canonical block algebra");
  if (static_cast<int>(perm.size()) != g->order || static_cast<int>(unitaries.size()) != g->order)
    throw MoritaError("ActionInvalid", "one permutation and unitary list per group element expected");
  std::vector<Index> offs;
  Index n = 0;
  for (Index b : *blocks) {
    offs.push_back(n);
    n += b;
  }
  std::vector<CMatrix> w;
  for (int s = 0; s < g->order; ++s) {
    const auto& p = perm[static_cast<std::size_t>(s)];
    const auto& us = unitaries[static_cast<std::size_t>(s)];
    if (p.size() != blocks->size() || us.size() != blocks->size())
      throw MoritaError("ActionInvalid", "permutation of the wrong length");
    CMatrix m = CMatrix::Zero(n, n);
    for (std::size_t j = 0; j < p.size(); ++j) {
      const auto t = static_cast<std::size_t>(p[j]);
      if (t >= blocks->size() || (*blocks)[t] != (*blocks)[j] || us[j].rows() != (*blocks)[j] ||
          us[j].cols() != (*blocks)[j])
        throw MoritaError("ActionInvalid", "block " + std::to_string(j) + " cannot be carried to block " +
                                               std::to_string(t));
      m.block(offs[t], offs[j], (*blocks)[j], (*blocks)[j]) = us[j];
    }
    w.push_back(m);
  }
  return unitary_action(a, g, w);
}

std::vector<CMatrix> character_unitaries(const GroupPtr& g) {
  std::vector<CMatrix> u;
  for (int x = 0; x < g->order; ++x) {
    // A generator: the powers of x exhaust G.
    std::vector<int> power(static_cast<std::size_t>(g->order), -1);
    int p = g->identity;
    for (int k = 0; k < g->order; ++k) {
      if (power[static_cast<std::size_t>(p)] >= 0) break;
      power[static_cast<std::size_t>(p)] = k;
      p = (*g)(x, p);
    }
    if (std::any_of(power.begin(), power.end(), [](int e) { return e < 0; })) continue;
    for (int s = 0; s < g->order; ++s) {
      CMatrix d = identity(2);
      d(1, 1) = std::polar(1.0, 2.0 * M_PI * power[static_cast<std::size_t>(s)] / g->order);
      u.push_back(d);
    }
    return u;
  }
  if (auto k = index_two_subgroup(g)) {
    for (int s = 0; s < g->order; ++s) {
      CMatrix d = identity(2);
      if (!k->contains(s)) d(1, 1) = -1.0;
      u.push_back(d);
    }
  }
  return u;
}

// ---- generated systems -----------------------------------------------------------

BimodulePtr block_bimodule(const std::vector<Index>& a_blocks, const std::vector<Index>& b_blocks,
                           const std::vector<std::vector<Index>>& mult, std::string name) {
  auto A = MatrixAlgebra::canonical(a_blocks);
  auto B = MatrixAlgebra::canonical(b_blocks);
  const auto ks = column_sizes(a_blocks, mult);
  std::vector<Index> offs;
  Index d = 0;
  for (std::size_t j = 0; j < b_blocks.size(); ++j) {
    offs.push_back(d);
    d += ks[j] * b_blocks[j];
  }
  auto unit = [](Index n, Index p, Index q) {
    CMatrix e = CMatrix::Zero(n, n);
    e(p, q) = 1.0;
    return e;
  };
  std::vector<CMatrix> left, right, inner;
  for (std::size_t i = 0; i < a_blocks.size(); ++i)
    for (Index p = 0; p < a_blocks[i]; ++p)
      for (Index q = 0; q < a_blocks[i]; ++q) {
        CMatrix l = CMatrix::Zero(d, d);
        for (std::size_t j = 0; j < b_blocks.size(); ++j) {
          if (ks[j] == 0) continue;
          Index base = 0;
          for (std::size_t i2 = 0; i2 < i; ++i2) base += mult[i2][j] * a_blocks[i2];
          CMatrix kj = CMatrix::Zero(ks[j], ks[j]);
          for (Index c = 0; c < mult[i][j]; ++c) kj(base + c * a_blocks[i] + p, base + c * a_blocks[i] + q) = 1.0;
          const Index sz = ks[j] * b_blocks[j];
          l.block(offs[j], offs[j], sz, sz) = kron(kj, identity(b_blocks[j]));
        }
        left.push_back(l);
      }
  for (std::size_t j = 0; j < b_blocks.size(); ++j)
    for (Index p = 0; p < b_blocks[j]; ++p)
      for (Index q = 0; q < b_blocks[j]; ++q) {
        CMatrix r = CMatrix::Zero(d, d), g = CMatrix::Zero(d, d);
        const Index n = b_blocks[j], sz = ks[j] * n;
        if (sz > 0) {
          r.block(offs[j], offs[j], sz, sz) = kron(identity(ks[j]), unit(n, q, p));
          g.block(offs[j], offs[j], sz, sz) = kron(identity(ks[j]), unit(n, p, q));
        }
        right.push_back(r);
        inner.push_back(g);
      }
  return make_bimodule(A, B, left, right, inner, std::move(name));
}

BimodulePtr conjugate_bimodule(const BimodulePtr& x, const CMatrix& u) {
  auto conj = [&](const std::vector<CMatrix>& ms) {
    std::vector<CMatrix> out;
    for (const auto& m : ms) out.push_back(u * m * u.adjoint());
    return out;
  };
  return make_bimodule(x->left, x->right, conj(x->left_action), conj(x->right_action), conj(x->inner),
                       x->name);
}

StarHom block_hom(const std::vector<Index>& a_blocks, const std::vector<std::vector<Index>>& mult) {
  auto A = MatrixAlgebra::canonical(a_blocks);
  const auto ns = column_sizes(a_blocks, mult);
  auto B = MatrixAlgebra::canonical(ns);
  CMatrix m = CMatrix::Zero(B->dim(), A->dim());
  Index col = 0;
  for (std::size_t i = 0; i < a_blocks.size(); ++i)
    for (Index p = 0; p < a_blocks[i]; ++p)
      for (Index q = 0; q < a_blocks[i]; ++q, ++col) {
        Index off = 0;
        for (std::size_t j = 0; j < ns.size(); ++j) {
          Index base = 0;
          for (std::size_t i2 = 0; i2 < i; ++i2) base += mult[i2][j] * a_blocks[i2];
          for (Index c = 0; c < mult[i][j]; ++c) {
            const Index r = base + c * a_blocks[i] + p, s = base + c * a_blocks[i] + q;
            m(off + r * ns[j] + s, col) = 1.0;
          }
          off += ns[j] * ns[j];
        }
      }
  return {A, B, m};
}

CMatrix random_unitary(Rng& rng, Index n) { return polar_unitary(rng.complex_matrix(n, n)); }

// ---- catalog ---------------------------------------------------------------------

bool CatalogSection::passed() const {
  if (items.size() < required) return false;
  return std::all_of(items.begin(), items.end(), [](const CheckReport& r) { return r.passed(); });
}

double CatalogSection::max_defect() const {
  double d = 0.0;
  for (const auto& r : items) d = std::max(d, r.max_defect());
  return d;
}

std::string CatalogSection::failure() const {
  if (items.size() < required)
    return std::to_string(items.size()) + " items, at least " + std::to_string(required) + " required";
  for (const auto& r : items)
    if (!r.passed()) return r.subject() + ": " + r.first_failure();
  return {};
}

std::vector<GroupPtr> catalog_groups(int max_group_order, bool with_z6) {
  std::vector<GroupPtr> out;
  std::vector<std::string> specs = {"cyclic(2)", "cyclic(3)", "cyclic(4)", "symmetric(3)"};
  if (with_z6) specs.push_back("cyclic(6)");
  specs.push_back("dihedral(4)");
  for (const auto& s : specs) {
    auto g = make_group(s);
    if (g->order <= max_group_order) out.push_back(g);
  }
  return out;
}

CatalogSection catalog_section(int criterion, const CatalogOptions& opt) {
  switch (criterion) {
    case 1: return category_section(opt);
    case 2: return hom_equality_section(opt);
    case 3: return invertibility_section(opt);
    case 4: return factorization_section(opt);
    case 5: return crossed_oracle_section(opt);
    case 6: return functor_section(opt);
    case 7: return green_section(opt);
    case 8: return induction_section(opt);
    case 9: return naturality_section(opt);
    case 10: return compatibility_section(opt);
    default: throw MoritaError("BadCriterion", "no catalog section " + std::to_string(criterion));
  }
}

std::vector<CatalogSection> run_catalog(const CatalogOptions& opt) {
  std::vector<CatalogSection> out;
  for (int c = 1; c <= 10; ++c) out.push_back(catalog_section(c, opt));
  return out;
}

namespace {

nlohmann::ordered_json entry_json(const CheckEntry& e) {
  nlohmann::ordered_json j;
  j["name"] = e.name;
  j["reference"] = e.reference;
  j["status"] = e.passed ? "pass" : "fail";
  j["max_defect"] = e.defect;
  j["tolerance"] = e.tolerance;
  if (!e.note.empty()) j["note"] = e.note;
  return j;
}

nlohmann::ordered_json check_json(const CheckReport& r, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["subject"] = r.subject();
  j["status"] = r.passed() ? "pass" : "fail";
  j["max_defect"] = r.max_defect();
  j["seed"] = r.seed.value_or(seed);
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& e : r.entries()) j["checks"].push_back(entry_json(e));
  return j;
}

nlohmann::ordered_json options_json(const CatalogOptions& opt) {
  nlohmann::ordered_json j;
  j["seed"] = opt.seed;
  j["eps_abs"] = opt.tol.eps_abs;
  j["eps_rel"] = opt.tol.eps_rel;
  j["max_group_order"] = opt.max_group_order;
  j["max_dim"] = opt.max_dim;
  return j;
}

}  // namespace

std::string catalog_json(const std::vector<CatalogSection>& sections, const CatalogOptions& opt) {
  nlohmann::ordered_json j;
  j["command"] = "catalog";
  j["options"] = options_json(opt);
  bool all = true;
  j["sections"] = nlohmann::ordered_json::array();
  for (const auto& s : sections) {
    nlohmann::ordered_json js;
    js["criterion"] = s.criterion;
    js["title"] = s.title;
    js["status"] = s.passed() ? "pass" : "fail";
    js["items"] = s.items.size();
    js["max_defect"] = s.max_defect();
    js["reports"] = nlohmann::ordered_json::array();
    for (const auto& r : s.items) js["reports"].push_back(check_json(r, opt.seed));
    all = all && s.passed();
    j["sections"].push_back(js);
  }
  j["status"] = all ? "pass" : "fail";
  return j.dump(2) + "\n";
}

std::string report_json(const std::vector<CheckReport>& reports, const std::string& command,
                        const CatalogOptions& opt) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["options"] = options_json(opt);
  bool all = true;
  j["reports"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    j["reports"].push_back(check_json(r, opt.seed));
    all = all && r.passed();
  }
  j["status"] = all ? "pass" : "fail";
  return j.dump(2) + "\n";
}

}  // namespace morita
