#pragma once

// SystemDocument: a JSON description of groups, algebras, actions, bimodules,
// equivariant structures, morphisms and representations. Complex numbers are
// [re, im] pairs (plain numbers are read as real), matrices are row-major
// nested arrays, group elements are indices into the group's table.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "morita/catalog.hpp"

namespace morita::cli {

/// A malformed document: `where` is the JSON path of the offending value.
class DocumentError : public std::runtime_error {
 public:
  DocumentError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

template <typename T>
struct Named {
  std::string name;
  T value;
};

struct MorphismDecl {
  std::string name;
  std::string kind;  // hom | bimodule | composite
  Morphism morphism;
  std::optional<StarHom> hom;
};

struct RepresentationDecl {
  std::string name;
  std::string action;
  Subgroup subgroup;
  std::string kind;  // trivial | ambient | character | matrices
  std::vector<CMatrix> images;  // per basis element of A x| H, when given
  std::vector<Complex> values;  // per subgroup element, for characters
  Index dim = 0;
};

struct SystemDocument {
  std::string path;
  std::vector<Named<GroupPtr>> groups;
  std::vector<Named<Subgroup>> subgroups;
  std::vector<Named<AlgebraPtr>> algebras;
  std::vector<Named<GroupAction>> actions;
  std::vector<Named<StarHom>> homs;
  std::vector<Named<BimodulePtr>> bimodules;
  std::vector<Named<EquivariantBimodule>> equivariant;
  std::vector<MorphismDecl> morphisms;
  std::vector<RepresentationDecl> representations;
  /// Every validation run while loading, in declaration order.
  std::vector<CheckReport> load_reports;

  bool valid() const;
  /// Declared subgroups of g, or all of them when none is declared.
  std::vector<Subgroup> subgroups_of(const GroupPtr& g) const;
  std::string subgroup_name(const Subgroup& h) const;
};

/// Parses and validates; throws DocumentError for malformed or unresolved
/// entries. Failed validations are recorded in load_reports rather than thrown.
SystemDocument load_document(const nlohmann::json& j, const Tolerance& tol, std::uint64_t seed,
                             const std::string& path = "<document>");
SystemDocument load_document_file(const std::string& path, const Tolerance& tol, std::uint64_t seed);

/// "M_2 ⊕ M_1"
std::string blocks_text(const std::vector<Index>& blocks);

}  // namespace morita::cli
