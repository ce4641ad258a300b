// morita: load SystemDocuments and run named check suites over them, or run
// the built-in catalog.
//
// Exit status: 0 when every check passes, 1 when one fails, 2 for usage
// errors and malformed documents.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "document.hpp"

using namespace morita;
using namespace morita::cli;

namespace {

struct Flags {
  double eps = 1e-9;
  double eps_rel = 1e-8;
  std::uint64_t seed = 1;
  std::string json_path;
  Index max_dim = 8;
  int max_group_order = 8;
  std::string variant = "mor";
  std::vector<std::string> paths;

  CatalogOptions options() const {
    CatalogOptions o;
    o.tol = Tolerance(eps, eps_rel);
    o.seed = seed;
    o.max_dim = max_dim;
    o.max_group_order = max_group_order;
    return o;
  }
};

std::string fmt(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", d);
  return buf;
}

void print_report(const CheckReport& r) {
  std::cout << (r.passed() ? "PASS " : "FAIL ") << r.subject() << "  (max defect " << fmt(r.max_defect())
            << ")\n";
  std::istringstream lines(r.to_text());
  for (std::string line; std::getline(lines, line);) std::cout << "  " << line << '\n';
}

/// Runs f, turning a library error into a failed report for `subject`.
CheckReport guarded(const std::string& subject, const std::function<CheckReport()>& f) {
  try {
    return f();
  } catch (const MoritaError& e) {
    CheckReport r(subject);
    r.require("completed", e.kind(), false, e.what());
    return r;
  }
}

std::string group_text(const GroupPtr& g) { return g->name + " (order " + std::to_string(g->order) + ")"; }

std::string algebra_name(const SystemDocument& doc, const AlgebraPtr& a) {
  for (const auto& n : doc.algebras)
    if (n.value == a) return n.name;
  return a->name();
}

// ---- commands over documents -------------------------------------------------------

using Command = std::function<void(const SystemDocument&, const Flags&, std::vector<CheckReport>&)>;

void cmd_validate(const SystemDocument&, const Flags&, std::vector<CheckReport>&) {}

void cmd_wedderburn(const SystemDocument& doc, const Flags& f, std::vector<CheckReport>& out) {
  const Tolerance tol = f.options().tol;
  for (const auto& a : doc.algebras) {
    if (!a.value) continue;
    out.push_back(guarded("Wedderburn decomposition of " + a.name, [&] {
      CheckReport r("Wedderburn decomposition of " + a.name);
      StructureIso s = wedderburn_decompose(a.value, tol, f.seed);
      r.merge(validate_star_iso(s.forward, s.backward, tol, f.seed), "structure iso");
      Index sq = 0;
      for (Index n : s.block_sizes) sq += n * n;
      r.require("dimension", "dim A = sum of n_j^2", sq == a.value->dim());
      r.require("blocks", "finite-dimensional C*-algebras are sums of matrix algebras", true,
                a.name + " ≅ " + blocks_text(s.block_sizes));
      return r;
    }));
  }
}

bool group_allowed(const GroupPtr& g, const Flags& f, std::vector<CheckReport>& out, const std::string& what) {
  if (g->order <= f.max_group_order) return true;
  CheckReport r(what);
  r.require("skipped", "group order bound", true,
            "order " + std::to_string(g->order) + " exceeds --max-group-order");
  out.push_back(r);
  return false;
}

void cmd_crossed(const SystemDocument& doc, const Flags& f, std::vector<CheckReport>& out) {
  const Tolerance tol = f.options().tol;
  for (const auto& a : doc.actions) {
    const std::string subject = algebra_name(doc, a.value.algebra) + " ⋊ " + a.value.group->name + " (" + a.name + ")";
    if (!group_allowed(a.value.group, f, out, subject)) continue;
    out.push_back(guarded(subject, [&] {
      CheckReport r(subject);
      CrossedPtr cp = crossed_product(a.value, tol, f.seed);
      r.merge(validate_crossed_product(*cp, tol, f.seed), "crossed product");
      r.require("dimension", "dim(A ⋊ G) = dim A · |G|",
                cp->dim() == a.value.algebra->dim() * a.value.group->order,
                std::to_string(cp->dim()));
      StructureIso s = wedderburn_decompose(cp, tol, f.seed);
      r.require("blocks", "Wedderburn decomposition of the crossed product", true,
                "A ⋊ G ≅ " + blocks_text(s.block_sizes));
      return r;
    }));
  }
}

template <typename F>
void over_green(const SystemDocument& doc, const Flags& f, std::vector<CheckReport>& out, const std::string& what,
                F&& body) {
  for (const auto& a : doc.actions) {
    for (const Subgroup& h : doc.subgroups_of(a.value.group)) {
      const std::string subject = what + " for " + a.name + ", H = " + doc.subgroup_name(h);
      if (!group_allowed(a.value.group, f, out, subject)) break;
      out.push_back(guarded(subject, [&] {
        CheckReport r(subject);
        GreenBimodule gb = green_bimodule(a.value, h, f.options().tol, f.seed);
        body(gb, r);
        return r;
      }));
    }
  }
}

void cmd_green(const SystemDocument& doc, const Flags& f, std::vector<CheckReport>& out) {
  const Tolerance tol = f.options().tol;
  over_green(doc, f, out, "Green bimodule", [&](const GreenBimodule& gb, CheckReport& r) {
    r.merge(validate_green(gb, tol, f.seed), "green");
    const Index expect = gb.alpha.algebra->dim() * gb.alpha.group->order;
    r.require("dimension", "dim X_H^G(A) = |G| · dim A", gb.carrier->dim == expect, std::to_string(gb.carrier->dim));
    r.require("compacts", "compact operators on X_H^G(A)", true, "K ≅ " + blocks_text(compact_blocks(gb, tol)));
  });
}

void cmd_imprimitivity(const SystemDocument& doc, const Flags& f, std::vector<CheckReport>& out) {
  const Tolerance tol = f.options().tol;
  over_green(doc, f, out, "Green imprimitivity", [&](const GreenBimodule& gb, CheckReport& r) {
    r.merge(check_green_imprimitivity(gb, tol, f.seed));
  });
}

void cmd_induce(const SystemDocument& doc, const Flags& f, std::vector<CheckReport>& out) {
  const Tolerance tol = f.options().tol;
  for (const auto& rep : doc.representations) {
    const GroupAction* alpha = nullptr;
    for (const auto& a : doc.actions)
      if (a.name == rep.action) alpha = &a.value;
    const std::string subject = "Ind_H^G of " + rep.name;
    if (!group_allowed(alpha->group, f, out, subject)) continue;
    out.push_back(guarded(subject, [&] {
      CheckReport r(subject);
      GreenBimodule gb = green_bimodule(*alpha, rep.subgroup, tol, f.seed);
      Representation rho;
      if (rep.kind == "ambient") {
        rho = Representation::ambient(gb.small);
      } else if (rep.kind == "matrices") {
        rho = {gb.small, rep.dim, rep.images};
      } else {
        rho = {gb.small, 1, {}};
        for (const Complex& v : rep.values) rho.images.push_back(CMatrix::Constant(1, 1, v));
      }
      r.merge(validate_representation(rho, tol, f.seed), "rho");
      Representation ind = induce(gb, rho, tol);
      r.merge(validate_representation(ind, tol, f.seed), "induced");
      r.require("dimension", "dim Ind = [G:H] · dim rho", ind.dim == rep.subgroup.index() * rho.dim,
                std::to_string(ind.dim));
      const CVector chi = character(ind);
      const CVector& unit = gb.alpha.algebra->unit();
      std::ostringstream os;
      os << "character on delta_s:";
      for (int s = 0; s < gb.alpha.group->order; ++s) {
        Complex v = 0.0;
        for (Index k = 0; k < unit.size(); ++k) v += unit(k) * chi(gb.big->coord(s, k));
        const double re = std::abs(v.real()) < 1e-12 ? 0.0 : v.real();
        const double im = std::abs(v.imag()) < 1e-12 ? 0.0 : v.imag();
        os << ' ' << re;
        if (im != 0.0) os << (im > 0 ? "+" : "") << im << 'i';
      }
      r.require("character", "character of the induced representation", true, os.str());
      return r;
    }));
  }
}

void cmd_category(const SystemDocument& doc, const Flags& f, std::vector<CheckReport>& out) {
  const Tolerance tol = f.options().tol;
  const auto& ms = doc.morphisms;
  bool any_triple = false;
  for (const auto& a : ms)
    for (const auto& b : ms)
      for (const auto& c : ms) {
        if (!same_algebra(a.morphism.target, b.morphism.source) ||
            !same_algebra(b.morphism.target, c.morphism.source))
          continue;
        any_triple = true;
        const std::string subject = "category laws for (" + a.name + ", " + b.name + ", " + c.name + ")";
        out.push_back(guarded(subject, [&] {
          CheckReport r = check_category_laws(a.morphism, b.morphism, c.morphism, tol, f.seed);
          r.set_subject(subject);
          return r;
        }));
      }
  if (!any_triple) {
    for (const auto& a : ms) {
      const std::string subject = "category laws for (" + a.name + ", id, id)";
      out.push_back(guarded(subject, [&] {
        Morphism id = identity_morphism(a.morphism.target);
        CheckReport r = check_category_laws(a.morphism, id, id, tol, f.seed);
        r.set_subject(subject);
        return r;
      }));
    }
  }
  for (const auto& a : ms) {
    out.push_back(guarded("invertibility of " + a.name, [&] {
      CheckReport r = check_invertibility(a.morphism, tol, f.seed);
      r.set_subject("invertibility of " + a.name);
      return r;
    }));
    out.push_back(guarded("factorization of " + a.name, [&] {
      Factorization fz = factor_morphism(a.morphism.carrier, tol, f.seed);
      CheckReport r("factorization of " + a.name);
      r.merge(fz.report);
      r.merge(validate_isomorphism(fz.iso, tol, f.seed), "iso");
      r.merge(is_imprimitivity(fz.imprimitivity, tol, f.seed).report, "imprimitivity");
      return r;
    }));
  }
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      if (!ms[i].hom || !ms[j].hom || !same_algebra(ms[i].hom->source, ms[j].hom->source) ||
          !same_algebra(ms[i].hom->target, ms[j].hom->target))
        continue;
      const std::string subject = "[" + ms[i].name + "] = [" + ms[j].name + "]";
      out.push_back(guarded(subject, [&] {
        CheckReport r(subject);
        Equality eq = equal(ms[i].morphism, ms[j].morphism, tol, f.seed);
        UnitaryEquivalence ue = hom_unitary_equivalence(*ms[i].hom, *ms[j].hom, tol, f.seed);
        r.require("agreement", "[phi] = [psi] iff psi = Ad u ∘ phi", eq.flag == ue.unitary.has_value(),
                  eq.flag ? "equal" : "not equal: " + eq.obstruction);
        if (eq.witness) r.merge(validate_isomorphism(*eq.witness, tol, f.seed), "witness");
        if (ue.unitary) r.add("unitary", "psi = Ad u ∘ phi", ue.defect, tol.bound());
        return r;
      }));
    }
}

void cmd_functor(const SystemDocument& doc, const Flags& f, std::vector<CheckReport>& out) {
  const Tolerance tol = f.options().tol;
  for (const auto& g : doc.groups) {
    std::vector<EquivariantBimodule> items;
    for (const auto& e : doc.equivariant)
      if (e.value.group() == g.value) items.push_back(e.value);
    if (items.empty()) continue;
    const std::string subject = "crossed-product functor over " + group_text(g.value);
    if (!group_allowed(g.value, f, out, subject)) continue;
    out.push_back(guarded(subject, [&] {
      CheckReport r = check_functor(items, tol, f.seed);
      r.set_subject(subject);
      return r;
    }));
  }
}

void cmd_naturality(const SystemDocument& doc, const Flags& f, std::vector<CheckReport>& out) {
  const Tolerance tol = f.options().tol;
  const SquareVariant v = f.variant == "iso" ? SquareVariant::Iso : SquareVariant::Mor;
  for (const auto& e : doc.equivariant) {
    for (const Subgroup& h : doc.subgroups_of(e.value.group())) {
      const std::string subject = "naturality square (" + f.variant + ") for " + e.name + ", H = " +
                                  doc.subgroup_name(h);
      if (!group_allowed(e.value.group(), f, out, subject)) break;
      out.push_back(guarded(subject, [&] {
        NaturalitySquare sq = check_naturality_square(e.value, h, v, tol, f.seed);
        CheckReport r(subject);
        r.merge(sq.report);
        r.require("witness", "A -> [X_H^G(A)] is natural", sq.witness.has_value());
        return r;
      }));
    }
  }
}

int run_document_command(const Flags& f, const std::string& name, const Command& cmd) {
  const Tolerance tol = f.options().tol;
  std::vector<CheckReport> reports;
  for (const auto& path : f.paths) {
    SystemDocument doc;
    try {
      doc = load_document_file(path, tol, f.seed);
    } catch (const DocumentError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
    std::vector<CheckReport> here = doc.load_reports;
    if (name == "validate" || !doc.valid()) {
      if (!doc.valid()) std::cerr << "error: " << path << ": document rejected at load\n";
    } else {
      here.clear();
      cmd(doc, f, here);
    }
    for (auto& r : here) {
      if (!r.seed) r.seed = f.seed;
      if (f.paths.size() > 1) r.set_subject(path + ": " + r.subject());
      reports.push_back(std::move(r));
    }
  }
  bool all = true;
  for (const auto& r : reports) {
    print_report(r);
    if (!r.passed()) {
      all = false;
      std::cerr << "error: " << r.subject() << ": " << r.first_failure() << '\n';
    }
  }
  std::cout << (all ? "all checks passed" : "some checks failed") << " (" << reports.size() << " reports)\n";
  if (!f.json_path.empty()) {
    std::ofstream o(f.json_path);
    o << report_json(reports, name, f.options());
  }
  return all ? 0 : 1;
}

int run_catalog_command(const Flags& f) {
  const CatalogOptions opt = f.options();
  std::vector<CatalogSection> sections;
  bool all = true;
  for (int c = 1; c <= 10; ++c) {
    CatalogSection s = catalog_section(c, opt);
    std::cout << "criterion " << c << ": " << (s.passed() ? "PASS" : "FAIL") << "  " << s.title << "  ("
              << s.items.size() << " items, max defect " << fmt(s.max_defect()) << ")\n";
    if (!s.passed()) {
      std::cout << "  " << s.failure() << '\n';
      all = false;
    }
    sections.push_back(std::move(s));
  }
  if (!f.json_path.empty()) {
    std::ofstream o(f.json_path);
    o << catalog_json(sections, opt);
  }
  std::cout << (all ? "catalog passed" : "catalog failed") << '\n';
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-dimensional C*-algebras, right-Hilbert bimodules and Green induction"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--eps", f.eps, "absolute tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--eps-rel", f.eps_rel, "relative tolerance")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", f.seed, "seed for generic choices");
    sub->add_option("--json", f.json_path, "write the machine-readable report here");
    sub->add_option("--max-dim", f.max_dim, "module dimension bound (catalog)")->check(CLI::PositiveNumber);
    sub->add_option("--max-group-order", f.max_group_order, "skip groups larger than this")
        ->check(CLI::PositiveNumber);
  };

  struct Entry {
    const char* name;
    const char* help;
    Command cmd;
  };
  const std::vector<Entry> commands{
      {"validate", "load documents and run the axiom checks", cmd_validate},
      {"wedderburn", "block decomposition of every algebra", cmd_wedderburn},
      {"crossed-product", "crossed product of every action", cmd_crossed},
      {"green", "Green bimodule of every action and subgroup", cmd_green},
      {"induce", "induce every representation", cmd_induce},
      {"check-category", "category laws, invertibility, factorization, hom equality", cmd_category},
      {"check-functor", "the crossed-product functor on the equivariant bimodules", cmd_functor},
      {"check-imprimitivity", "Green's imprimitivity theorem", cmd_imprimitivity},
      {"check-naturality", "naturality squares of the equivariant bimodules", cmd_naturality},
  };
  std::vector<std::pair<CLI::App*, const Entry*>> subs;
  for (const auto& e : commands) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    common(sub);
    sub->add_option("paths", f.paths, "SystemDocument JSON files")->required()->check(CLI::ExistingFile);
    if (std::string(e.name) == "check-naturality")
      sub->add_option("--variant", f.variant, "mor or iso")->check(CLI::IsMember({"mor", "iso"}));
    subs.emplace_back(sub, &e);
  }
  CLI::App* catalog = app.add_subcommand("catalog", "run the built-in acceptance catalog");
  common(catalog);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*catalog) return run_catalog_command(f);
    for (const auto& [sub, e] : subs)
      if (*sub) return run_document_command(f, e->name, e->cmd);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
