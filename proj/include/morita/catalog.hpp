#pragma once

// Named action constructors, generated systems, and the built-in catalog
// behind the acceptance suite and the `catalog` command.

#include <string>
#include <vector>

#include "morita/category.hpp"
#include "morita/green.hpp"

namespace morita {

// ---- named actions ---------------------------------------------------------------

/// G acting on C(G/K) = C^[G:K] by translation of cosets: delta_c -> delta_{s c}.
GroupAction translation_action(const Subgroup& k);
/// alpha_s = Ad u_s on a matrix algebra, u_s unitary on its ambient space.
/// Not validated.
GroupAction unitary_action(const AlgebraPtr& a, const GroupPtr& g, const std::vector<CMatrix>& u);
/// On a canonical block algebra, alpha_s carries block j onto block
/// perm[s][j] by Ad unitaries[s][j]. Throws MoritaError("ActionInvalid") on
/// shape errors; the action laws are left to validate_action.
GroupAction block_permutation_action(const AlgebraPtr& a, const GroupPtr& g,
                                     const std::vector<std::vector<Index>>& perm,
                                     const std::vector<std::vector<CMatrix>>& unitaries);
/// s -> diag(1, chi(s)) for a nontrivial character chi of G: through a
/// generator when G is cyclic, otherwise the sign of an index-2 subgroup.
/// Empty when G has neither.
std::vector<CMatrix> character_unitaries(const GroupPtr& g);

// ---- generated systems -----------------------------------------------------------

/// sum_j C^{k_j} (x) (row vectors of M_{n_j}) over sum_i M_{a_i} - sum_j M_{n_j},
/// block i of A sitting mult[i][j] times in M_{k_j}.
BimodulePtr block_bimodule(const std::vector<Index>& a_blocks, const std::vector<Index>& b_blocks,
                           const std::vector<std::vector<Index>>& mult, std::string name = "X");
/// Every structure matrix conjugated by the unitary u.
BimodulePtr conjugate_bimodule(const BimodulePtr& x, const CMatrix& u);
/// Unital embedding sum_i M_{a_i} -> sum_j M_{n_j}, n_j = sum_i mult[i][j] a_i.
StarHom block_hom(const std::vector<Index>& a_blocks, const std::vector<std::vector<Index>>& mult);
CMatrix random_unitary(Rng& rng, Index n);

// ---- the catalog -----------------------------------------------------------------

struct CatalogOptions {
  Tolerance tol;
  std::uint64_t seed = 1;
  int max_group_order = 8;
  Index max_dim = 8;  // module dimension bound of the random catalogs
};

struct CatalogSection {
  int criterion = 0;
  std::string title;
  std::vector<CheckReport> items;
  /// Minimum item count; 0 when the options shrink the catalog below it.
  std::size_t required = 0;

  bool passed() const;
  double max_defect() const;
  std::string failure() const;
};

/// Z/2, Z/3, Z/4, S_3, D_4 (and Z/6 where asked) up to the order bound.
std::vector<GroupPtr> catalog_groups(int max_group_order, bool with_z6 = false);

/// Criteria 1 to 10, one section each.
CatalogSection catalog_section(int criterion, const CatalogOptions& opt = {});
std::vector<CatalogSection> run_catalog(const CatalogOptions& opt = {});

/// Deterministic JSON rendering: sections, items and entries in run order,
/// no timings.
std::string catalog_json(const std::vector<CatalogSection>& sections, const CatalogOptions& opt);
std::string report_json(const std::vector<CheckReport>& reports, const std::string& command,
                        const CatalogOptions& opt);

}  // namespace morita
