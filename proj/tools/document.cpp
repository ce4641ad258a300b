#include "document.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace morita::cli {

using nlohmann::json;

namespace {

std::string at(const std::string& base, const std::string& key) { return base + "." + key; }
std::string at(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw DocumentError(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw DocumentError(where, "missing field '" + key + "'");
  return *it;
}

std::string string_field(const json& j, const std::string& key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_string()) throw DocumentError(at(where, key), "expected a string");
  return v.get<std::string>();
}

std::string optional_string(const json& j, const std::string& key, const std::string& fallback,
                            const std::string& where) {
  if (!j.contains(key)) return fallback;
  return string_field(j, key, where);
}

const json& array_field(const json& j, const std::string& key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_array()) throw DocumentError(at(where, key), "expected an array");
  return v;
}

Index read_index(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw DocumentError(where, "expected an integer");
  return v.get<Index>();
}

std::vector<Index> read_indices(const json& v, const std::string& where) {
  if (!v.is_array()) throw DocumentError(where, "expected an array of integers");
  std::vector<Index> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(read_index(v[i], at(where, i)));
  return out;
}

std::vector<std::vector<Index>> read_table(const json& v, const std::string& where) {
  if (!v.is_array()) throw DocumentError(where, "expected an array of rows");
  std::vector<std::vector<Index>> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(read_indices(v[i], at(where, i)));
  return out;
}

Complex read_complex(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw DocumentError(where, "expected a number or an [re, im] pair");
}

CMatrix read_matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty() || !v[0].is_array())
    throw DocumentError(where, "expected a matrix (array of rows)");
  const std::size_t cols = v[0].size();
  CMatrix m(static_cast<Index>(v.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array() || v[i].size() != cols)
      throw DocumentError(at(where, i), "row length differs from row 0");
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Index>(i), static_cast<Index>(j)) = read_complex(v[i][j], at(at(where, i), j));
  }
  return m;
}

std::vector<CMatrix> read_matrices(const json& v, const std::string& where) {
  if (!v.is_array()) throw DocumentError(where, "expected an array of matrices");
  std::vector<CMatrix> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(read_matrix(v[i], at(where, i)));
  return out;
}

void expect_shapes(const std::vector<CMatrix>& ms, std::size_t count, Index rows, Index cols,
                   const std::string& where) {
  if (ms.size() != count)
    throw DocumentError(where, "expected " + std::to_string(count) + " matrices, got " +
                                   std::to_string(ms.size()));
  for (std::size_t i = 0; i < ms.size(); ++i)
    if (ms[i].rows() != rows || ms[i].cols() != cols)
      throw DocumentError(at(where, i), "expected a " + std::to_string(rows) + " x " +
                                            std::to_string(cols) + " matrix");
}

template <typename T>
const T& lookup(const std::vector<Named<T>>& items, const json& j, const std::string& key,
                const std::string& where, const char* what) {
  const std::string name = string_field(j, key, where);
  for (const auto& it : items)
    if (it.name == name) return it.value;
  throw DocumentError(at(where, key), std::string("unknown ") + what + " '" + name + "'");
}

template <typename T>
void add_named(std::vector<Named<T>>& items, std::string name, T value, const std::string& where) {
  for (const auto& it : items)
    if (it.name == name) throw DocumentError(where, "duplicate name '" + name + "'");
  items.push_back({std::move(name), std::move(value)});
}

/// The algebra a canonical-block constructor produced, moved onto the
/// document's algebra of the same blocks.
AlgebraPtr expect_blocks(const AlgebraPtr& a, const std::vector<Index>& blocks, const std::string& where) {
  auto b = a->canonical_blocks();
  if (!b || *b != blocks)
    throw DocumentError(where, "algebra '" + a->name() + "' is not the canonical block algebra " +
                                   blocks_text(blocks));
  return a;
}

// Runs a construction, turning library errors into located document errors.
template <typename F>
auto located(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const DocumentError&) {
    throw;
  } catch (const MoritaError& e) {
    throw DocumentError(where, e.what());
  }
}

class Loader {
 public:
  Loader(SystemDocument& doc, const Tolerance& tol, std::uint64_t seed) : doc_(doc), tol_(tol), seed_(seed) {}

  void load(const json& j) {
    if (!j.is_object()) throw DocumentError("$", "a document is a JSON object");
    static const std::set<std::string> known{"groups",     "subgroups",   "algebras",  "actions",
                                              "homs",       "bimodules",   "equivariant", "morphisms",
                                              "representations", "name"};
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!known.count(it.key())) throw DocumentError("$." + it.key(), "unknown section");
    section(j, "groups", &Loader::group);
    section(j, "subgroups", &Loader::subgroup);
    section(j, "algebras", &Loader::algebra);
    section(j, "actions", &Loader::action);
    section(j, "homs", &Loader::hom);
    section(j, "bimodules", &Loader::bimodule);
    section(j, "equivariant", &Loader::equivariant);
    section(j, "morphisms", &Loader::morphism);
    section(j, "representations", &Loader::representation);
  }

 private:
  SystemDocument& doc_;
  Tolerance tol_;
  std::uint64_t seed_;

  void section(const json& j, const std::string& key, void (Loader::*f)(const json&, const std::string&)) {
    if (!j.contains(key)) return;
    const std::string where = "$." + key;
    const json& arr = j.at(key);
    if (!arr.is_array()) throw DocumentError(where, "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) (this->*f)(arr[i], at(where, i));
  }

  void record(CheckReport r, const std::string& where, const std::string& name) {
    r.set_subject(where + " '" + name + "': " + r.subject());
    if (!r.seed) r.seed = seed_;
    doc_.load_reports.push_back(std::move(r));
  }

  GroupPtr group_ref(const json& j, const std::string& where) {
    return lookup(doc_.groups, j, "group", where, "group");
  }

  AlgebraPtr algebra_ref(const json& j, const std::string& key, const std::string& where) {
    return lookup(doc_.algebras, j, key, where, "algebra");
  }

  Subgroup subgroup_ref(const json& j, const GroupPtr& g, const std::string& where) {
    if (!j.contains("subgroup")) return trivial_subgroup(g);
    const json& v = j.at("subgroup");
    const std::string w = at(where, "subgroup");
    if (v.is_array()) {
      std::vector<int> els;
      for (Index e : read_indices(v, w)) els.push_back(static_cast<int>(e));
      return located(w, [&] { return make_subgroup(g, els); });
    }
    if (v.is_string() && v.get<std::string>() == "trivial") return trivial_subgroup(g);
    if (v.is_string() && v.get<std::string>() == "whole") return whole_group(g);
    const Subgroup& h = lookup(doc_.subgroups, j, "subgroup", where, "subgroup");
    if (h.parent != g) throw DocumentError(w, "subgroup of a different group");
    return h;
  }

  void group(const json& j, const std::string& where) {
    const std::string name = string_field(j, "name", where);
    GroupPtr g;
    if (j.contains("spec")) {
      g = located(at(where, "spec"), [&] { return make_group(string_field(j, "spec", where)); });
    } else {
      std::vector<std::vector<int>> table;
      for (const auto& row : read_table(array_field(j, "table", where), at(where, "table")))
        table.emplace_back(row.begin(), row.end());
      g = located(at(where, "table"), [&] { return share(FiniteGroup::from_table(table, name)); });
    }
    add_named(doc_.groups, name, g, where);
  }

  void subgroup(const json& j, const std::string& where) {
    const std::string name = string_field(j, "name", where);
    GroupPtr g = group_ref(j, where);
    std::vector<int> els;
    for (Index e : read_indices(array_field(j, "elements", where), at(where, "elements")))
      els.push_back(static_cast<int>(e));
    add_named(doc_.subgroups, name, located(at(where, "elements"), [&] { return make_subgroup(g, els); }),
              where);
  }

  void algebra(const json& j, const std::string& where) {
    const std::string name = string_field(j, "name", where);
    AlgebraPtr a;
    if (j.contains("blocks")) {
      auto blocks = read_indices(j.at("blocks"), at(where, "blocks"));
      if (blocks.empty() || std::any_of(blocks.begin(), blocks.end(), [](Index b) { return b < 1; }))
        throw DocumentError(at(where, "blocks"), "block sizes must be positive");
      a = MatrixAlgebra::canonical(blocks, name);
    } else {
      auto basis = read_matrices(array_field(j, "basis", where), at(where, "basis"));
      if (basis.empty()) throw DocumentError(at(where, "basis"), "empty basis");
      expect_shapes(basis, basis.size(), basis[0].rows(), basis[0].rows(), at(where, "basis"));
      auto c = located(at(where, "basis"), [&] { return MatrixAlgebra::candidate(basis, name, tol_); });
      CheckReport r = validate_algebra(*c, tol_);
      const bool ok = r.passed();
      record(std::move(r), where, name);
      a = c;
      if (!ok) {
        // Keep the name resolvable but refuse to build on it.
        doc_.algebras.push_back({name, nullptr});
        return;
      }
    }
    add_named(doc_.algebras, name, a, where);
  }

  AlgebraPtr usable_algebra(const json& j, const std::string& key, const std::string& where) {
    AlgebraPtr a = algebra_ref(j, key, where);
    if (!a) throw DocumentError(at(where, key), "algebra failed validation");
    return a;
  }

  void action(const json& j, const std::string& where) {
    const std::string name = string_field(j, "name", where);
    const std::string kind = string_field(j, "kind", where);
    GroupPtr g = group_ref(j, where);
    GroupAction alpha;
    if (kind == "translation") {
      Subgroup k = subgroup_ref(j, g, where);
      GroupAction t = translation_action(k);
      if (j.contains("algebra")) {
        AlgebraPtr a = usable_algebra(j, "algebra", where);
        expect_blocks(a, std::vector<Index>(static_cast<std::size_t>(k.index()), 1), at(where, "algebra"));
        std::vector<CMatrix> maps;
        for (const auto& m : t.maps) maps.push_back(m.map);
        t = make_action(a, g, maps);
      } else {
        add_named(doc_.algebras, name + ".algebra", t.algebra, where);
      }
      alpha = t;
    } else {
      AlgebraPtr a = usable_algebra(j, "algebra", where);
      const auto order = static_cast<std::size_t>(g->order);
      if (kind == "trivial") {
        alpha = trivial_action(a, g);
      } else if (kind == "unitary") {
        const std::string w = at(where, "unitaries");
        auto u = read_matrices(array_field(j, "unitaries", where), w);
        expect_shapes(u, order, a->ambient_dim(), a->ambient_dim(), w);
        alpha = located(w, [&] { return unitary_action(a, g, u); });
      } else if (kind == "permutation") {
        const std::string wp = at(where, "permutations");
        const std::string wu = at(where, "unitaries");
        auto perm = read_table(array_field(j, "permutations", where), wp);
        const json& uj = array_field(j, "unitaries", where);
        std::vector<std::vector<CMatrix>> us;
        for (std::size_t s = 0; s < uj.size(); ++s) us.push_back(read_matrices(uj[s], at(wu, s)));
        if (perm.size() != order) throw DocumentError(wp, "one permutation per group element expected");
        alpha = located(where, [&] { return block_permutation_action(a, g, perm, us); });
      } else if (kind == "matrices") {
        const std::string w = at(where, "maps");
        auto maps = read_matrices(array_field(j, "maps", where), w);
        expect_shapes(maps, order, a->dim(), a->dim(), w);
        alpha = make_action(a, g, maps);
      } else {
        throw DocumentError(at(where, "kind"), "unknown action kind '" + kind + "'");
      }
    }
    record(validate_action(alpha, tol_, seed_), where, name);
    add_named(doc_.actions, name, alpha, where);
  }

  void hom(const json& j, const std::string& where) {
    const std::string name = string_field(j, "name", where);
    AlgebraPtr src = usable_algebra(j, "source", where);
    AlgebraPtr dst = usable_algebra(j, "target", where);
    StarHom phi;
    if (j.contains("mult")) {
      const std::string w = at(where, "mult");
      auto sb = src->canonical_blocks();
      if (!sb) throw DocumentError(at(where, "source"), "block homs need a canonical block source");
      auto mult = read_table(j.at("mult"), w);
      StarHom b = located(w, [&] { return block_hom(*sb, mult); });
      expect_blocks(dst, *b.target->canonical_blocks(), at(where, "target"));
      phi = {src, dst, b.map};
    } else {
      const std::string w = at(where, "map");
      CMatrix m = read_matrix(field(j, "map", where), w);
      if (m.rows() != dst->dim() || m.cols() != src->dim())
        throw DocumentError(w, "expected a dim(target) x dim(source) matrix");
      phi = {src, dst, m};
    }
    record(validate_star_hom(phi, tol_, seed_), where, name);
    add_named(doc_.homs, name, phi, where);
  }

  void bimodule(const json& j, const std::string& where) {
    const std::string name = string_field(j, "name", where);
    const std::string kind = optional_string(j, "kind", "explicit", where);
    BimodulePtr x;
    if (kind == "identity") {
      AlgebraPtr a = usable_algebra(j, "algebra", where);
      x = identity_bimodule(a);
    } else if (kind == "hom") {
      const StarHom& phi = lookup(doc_.homs, j, "hom", where, "hom");
      x = located(where, [&] { return bimodule_from_hom(phi, tol_); });
    } else if (kind == "blocks") {
      AlgebraPtr a = usable_algebra(j, "left", where);
      AlgebraPtr b = usable_algebra(j, "right", where);
      auto ab = a->canonical_blocks();
      auto bb = b->canonical_blocks();
      if (!ab || !bb) throw DocumentError(where, "block bimodules need canonical block algebras");
      const std::string w = at(where, "table");
      auto table = read_table(field(j, "table", where), w);
      BimodulePtr y = located(w, [&] { return block_bimodule(*ab, *bb, table, name); });
      x = make_bimodule(a, b, y->left_action, y->right_action, y->inner, name);
    } else if (kind == "explicit") {
      AlgebraPtr a = usable_algebra(j, "left", where);
      AlgebraPtr b = usable_algebra(j, "right", where);
      const Index d = read_index(field(j, "dim", where), at(where, "dim"));
      if (d < 1) throw DocumentError(at(where, "dim"), "dimension must be positive");
      auto la = read_matrices(array_field(j, "left_action", where), at(where, "left_action"));
      auto ra = read_matrices(array_field(j, "right_action", where), at(where, "right_action"));
      auto in = read_matrices(array_field(j, "inner", where), at(where, "inner"));
      expect_shapes(la, static_cast<std::size_t>(a->dim()), d, d, at(where, "left_action"));
      expect_shapes(ra, static_cast<std::size_t>(b->dim()), d, d, at(where, "right_action"));
      expect_shapes(in, static_cast<std::size_t>(b->dim()), d, d, at(where, "inner"));
      x = located(where, [&] { return make_bimodule(a, b, la, ra, in, name); });
    } else {
      throw DocumentError(at(where, "kind"), "unknown bimodule kind '" + kind + "'");
    }
    record(validate_bimodule(*x, tol_, seed_), where, name);
    add_named(doc_.bimodules, name, x, where);
  }

  void equivariant(const json& j, const std::string& where) {
    const std::string name = string_field(j, "name", where);
    EquivariantBimodule e;
    if (j.contains("identity")) {
      e = equivariant_identity(lookup(doc_.actions, j, "identity", where, "action"));
    } else if (j.contains("hom")) {
      const StarHom& phi = lookup(doc_.homs, j, "hom", where, "hom");
      const GroupAction& alpha = lookup(doc_.actions, j, "left_action", where, "action");
      const GroupAction& eps = lookup(doc_.actions, j, "right_action", where, "action");
      e = located(where, [&] { return equivariant_from_hom(phi, alpha, eps, tol_); });
    } else {
      const BimodulePtr& x = lookup(doc_.bimodules, j, "bimodule", where, "bimodule");
      const GroupAction& alpha = lookup(doc_.actions, j, "left_action", where, "action");
      const GroupAction& beta = lookup(doc_.actions, j, "right_action", where, "action");
      if (alpha.group != beta.group) throw DocumentError(where, "the two actions use different groups");
      if (!same_algebra(alpha.algebra, x->left) || !same_algebra(beta.algebra, x->right))
        throw DocumentError(where, "actions are not on the bimodule's algebras");
      const json& gj = field(j, "gamma", where);
      std::vector<CMatrix> gamma;
      if (gj.is_string() && gj.get<std::string>() == "identity") {
        gamma.assign(static_cast<std::size_t>(alpha.group->order), identity(x->dim));
      } else {
        gamma = read_matrices(gj, at(where, "gamma"));
        expect_shapes(gamma, static_cast<std::size_t>(alpha.group->order), x->dim, x->dim, at(where, "gamma"));
      }
      e = {x, alpha, beta, gamma};
    }
    record(validate_equivariant(e, tol_, seed_), where, name);
    add_named(doc_.equivariant, name, e, where);
  }

  void morphism(const json& j, const std::string& where) {
    MorphismDecl d;
    d.name = string_field(j, "name", where);
    d.kind = string_field(j, "kind", where);
    if (d.kind == "hom") {
      d.hom = lookup(doc_.homs, j, "hom", where, "hom");
      d.morphism = located(where, [&] { return hom_morphism(*d.hom, tol_); });
    } else if (d.kind == "bimodule") {
      const BimodulePtr& x = lookup(doc_.bimodules, j, "bimodule", where, "bimodule");
      d.morphism = located(where, [&] { return make_morphism(x, tol_); });
    } else if (d.kind == "composite") {
      const json& parts = array_field(j, "parts", where);
      if (parts.size() < 2) throw DocumentError(at(where, "parts"), "a composite needs two parts");
      std::optional<Morphism> acc;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string w = at(at(where, "parts"), i);
        if (!parts[i].is_string()) throw DocumentError(w, "expected a morphism name");
        const MorphismDecl* p = nullptr;
        for (const auto& m : doc_.morphisms)
          if (m.name == parts[i].get<std::string>()) p = &m;
        if (!p) throw DocumentError(w, "unknown morphism '" + parts[i].get<std::string>() + "'");
        acc = acc ? located(w, [&] { return compose(*acc, p->morphism, tol_); }) : p->morphism;
      }
      d.morphism = *acc;
    } else {
      throw DocumentError(at(where, "kind"), "unknown morphism kind '" + d.kind + "'");
    }
    for (const auto& m : doc_.morphisms)
      if (m.name == d.name) throw DocumentError(where, "duplicate name '" + d.name + "'");
    doc_.morphisms.push_back(std::move(d));
  }

  void representation(const json& j, const std::string& where) {
    RepresentationDecl r;
    r.name = string_field(j, "name", where);
    r.action = string_field(j, "action", where);
    const GroupAction& alpha = lookup(doc_.actions, j, "action", where, "action");
    r.subgroup = subgroup_ref(j, alpha.group, where);
    r.kind = string_field(j, "kind", where);
    const Index basis = alpha.algebra->dim() * static_cast<Index>(r.subgroup.elements.size());
    if (r.kind == "trivial" || r.kind == "character") {
      if (alpha.algebra->dim() != 1)
        throw DocumentError(at(where, "kind"), "characters need the one-dimensional coefficient algebra");
      if (r.kind == "trivial") {
        r.values.assign(r.subgroup.elements.size(), Complex(1.0, 0.0));
      } else {
        const json& v = array_field(j, "values", where);
        if (v.size() != r.subgroup.elements.size())
          throw DocumentError(at(where, "values"), "one value per subgroup element expected");
        for (std::size_t i = 0; i < v.size(); ++i) r.values.push_back(read_complex(v[i], at(at(where, "values"), i)));
      }
      r.dim = 1;
    } else if (r.kind == "matrices") {
      const std::string w = at(where, "images");
      r.images = read_matrices(array_field(j, "images", where), w);
      if (r.images.empty()) throw DocumentError(w, "no images");
      r.dim = r.images[0].rows();
      expect_shapes(r.images, static_cast<std::size_t>(basis), r.dim, r.dim, w);
    } else if (r.kind != "ambient") {
      throw DocumentError(at(where, "kind"), "unknown representation kind '" + r.kind + "'");
    }
    for (const auto& m : doc_.representations)
      if (m.name == r.name) throw DocumentError(where, "duplicate name '" + r.name + "'");
    doc_.representations.push_back(std::move(r));
  }
};

}  // namespace

bool SystemDocument::valid() const {
  return std::all_of(load_reports.begin(), load_reports.end(), [](const CheckReport& r) { return r.passed(); });
}

std::vector<Subgroup> SystemDocument::subgroups_of(const GroupPtr& g) const {
  std::vector<Subgroup> out;
  for (const auto& s : subgroups)
    if (s.value.parent == g) out.push_back(s.value);
  return out.empty() ? all_subgroups(g) : out;
}

std::string SystemDocument::subgroup_name(const Subgroup& h) const {
  for (const auto& s : subgroups)
    if (s.value.parent == h.parent && s.value.elements == h.elements) return s.name;
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < h.elements.size(); ++i) os << (i ? "," : "") << h.elements[i];
  os << "}";
  return os.str();
}

SystemDocument load_document(const json& j, const Tolerance& tol, std::uint64_t seed, const std::string& path) {
  SystemDocument doc;
  doc.path = path;
  Loader(doc, tol, seed).load(j);
  return doc;
}

SystemDocument load_document_file(const std::string& path, const Tolerance& tol, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw DocumentError(path, "cannot open file");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw DocumentError(path + " (byte " + std::to_string(e.byte) + ")", "not valid JSON");
  }
  return load_document(j, tol, seed, path);
}

std::string blocks_text(const std::vector<Index>& blocks) {
  std::string s;
  for (std::size_t i = 0; i < blocks.size(); ++i) s += (i ? " ⊕ M_" : "M_") + std::to_string(blocks[i]);
  return s.empty() ? "0" : s;
}

}  // namespace morita::cli
