#pragma once

// Subcommands of the autfix tool. Every subcommand reads one document and
// writes a line-oriented report; `run` returns the process exit status.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "autfix/document.hpp"
#include "autfix/engine.hpp"
#include "autfix/nielsen.hpp"
#include "autfix/stallings.hpp"

namespace autfix::cli {

inline constexpr int kExitError = 1;

struct Invocation {
  std::string command;                 ///< fix | intersect | witness | normalize | npaths | verify | render
  std::optional<std::string> input;    ///< document path
  std::optional<std::string> text;     ///< inline document; ';' separates lines
  int depth = 8;                       ///< oracle word length L
  int bound = 6;                       ///< |γ| bound for Nielsen path searches
  int loops = 6;                       ///< loop length for fixed-loop cross-checks
  std::string format = "text";         ///< text | dot
  std::optional<std::string> output;
  std::optional<std::string> witness;  ///< automorphism name for `verify`
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"fix", "intersect", "witness", "normalize", "npaths", "verify", "render"};
  return names;
}

namespace detail {

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

inline std::string words(const std::vector<Word>& ws) {
  return ws.empty() ? "(none)" : to_string(std::span<const Word>(ws));
}

inline std::string map_text(const FilteredGraph& G, const UpperTriangularMap& f) {
  std::string out;
  for (int i = 1; i <= G.edge_count(); ++i) {
    if (i > 1) out += "; ";
    out += G.edge(i).name + " = " + G.to_string(G.edge_path(i) * f.suffix(i));
  }
  return out;
}

inline void graph_lines(std::ostream& out, const FilteredGraph& G, const std::string& indent) {
  for (int i = 1; i <= G.edge_count(); ++i) {
    out << indent << G.edge(i).name << ": " << G.vertex_name(G.edge(i).tail) << " -> " << G.vertex_name(G.edge(i).head) << "\n";
  }
}

inline std::string height_text(const FilteredGraph& G, const HeightRecord& rec) {
  std::ostringstream s;
  s << "height " << rec.height << " (" << G.edge(rec.height).name << "): " << to_string(rec.form);
  if (rec.beta) s << ", beta " << G.to_string(*rec.beta);
  if (rec.form == InpForm::Conjugate) s << ", r_f " << rec.r_f << ", r_g " << rec.r_g;
  s << ", bound " << rec.bound;
  if (rec.form != InpForm::None) s << ", inps " << rec.inps_found << ", unique " << yes_no(rec.unique_up_to_power);
  if (rec.budget_exhausted) s << ", budget exhausted";
  if (!rec.note.empty()) s << " [" << rec.note << "]";
  return s.str();
}

struct Pair {
  const NamedAutomorphism* phi = nullptr;
  const NamedAutomorphism* psi = nullptr;
};

inline Pair pair_of(const Document& doc, const std::optional<std::string>& skip = std::nullopt) {
  Pair p;
  for (const auto& a : doc.automorphisms) {
    if (skip && a.name == *skip) continue;
    if (!p.phi) {
      p.phi = &a;
    } else if (!p.psi) {
      p.psi = &a;
    }
  }
  if (!p.psi) throw Error("this subcommand needs two automorphisms" + std::string(skip ? " besides the witness" : ""));
  return p;
}

inline std::optional<Representative> supplied_representative(const Document& doc) {
  for (const NamedGraph& g : doc.graphs) {
    if (g.maps.size() >= 2) return Representative{g.graph, g.maps[0].map, g.maps[1].map, "graph " + g.name};
  }
  return std::nullopt;
}

inline void report_lines(std::ostream& out, const WitnessReport& r, const FilteredGraph* heights_graph) {
  out << "  phi: " << to_string(r.phi) << "\n";
  out << "  psi: " << to_string(r.psi) << "\n";
  out << "  fix phi basis: " << words(r.fix_phi) << "\n";
  out << "  fix psi basis: " << words(r.fix_psi) << "\n";
  out << "  intersection rank: " << r.common.rank() << "\n";
  out << "  intersection basis: " << words(r.common.basis()) << "\n";
  out << "  route: " << r.route << "\n";
  if (r.heights && heights_graph) {
    for (const HeightRecord& rec : *r.heights) out << "  " << height_text(*heights_graph, rec) << "\n";
  }
  if (r.k0) out << "  k0: " << *r.k0 << "\n";
  for (const Attempt& a : r.attempts) {
    out << "  attempt";
    if (a.k) out << " k=" << *a.k;
    out << " depth " << a.depth << ": " << (a.equal ? "equal" : "unequal");
    if (a.distinguishing) out << ", distinguishing " << to_string(*a.distinguishing);
    if (!a.contains_common) out << ", misses a common fixed word";
    if (a.exact) out << ", fixed loops " << (*a.exact ? "equal" : "differ");
    if (a.stable) out << ", depth " << a.depth + 2 << " " << (*a.stable ? "stable" : "unstable");
    out << "\n";
    out << "    chi: " << to_string(a.chi) << "\n";
  }
  if (r.k) {
    for (const ExponentRow& row : r.table) {
      if (row.form != InpForm::Conjugate) continue;
      out << "  exponents height " << row.height << ": r_f " << row.r_f << ", r_g " << row.r_g << ", r_f+k*r_g " << row.combined
          << (row.matches ? "" : " (suffix mismatch)") << "\n";
    }
  }
  if (r.chi) {
    out << "  witness: " << to_string(*r.chi) << "\n";
    if (r.k) out << "  k: " << *r.k << "\n";
  }
  if (r.smallest_distinguishing) out << "  smallest distinguishing word: " << to_string(*r.smallest_distinguishing) << "\n";
  for (const std::string& n : r.notes) out << "  note: " << n << "\n";
  out << "  verdict: " << to_string(r.verdict) << "\n";
}

inline EngineOptions engine_options(const Invocation& inv) {
  EngineOptions opt;
  opt.depth = inv.depth;
  opt.loop_length = inv.loops;
  opt.normalize.bound = inv.bound;
  return opt;
}

inline int run_fix(const Invocation& inv, const Document& doc, std::ostream& out) {
  if (doc.automorphisms.empty()) throw Error("fix needs at least one automorphism");
  for (const auto& a : doc.automorphisms) {
    const FixedSubgroupReport r = fixed_subgroup_oracle(a.aut, inv.depth);
    if (inv.format == "dot") {
      out << r.graph.to_dot("fix_" + a.name);
      continue;
    }
    out << "fix " << a.name << " depth " << inv.depth << "\n";
    out << "  images: " << to_string(a.aut) << "\n";
    out << "  rank: " << r.rank << "\n";
    out << "  basis: " << words(r.generators) << "\n";
    out << "  saturated at depth " << inv.depth - 2 << ": " << yes_no(r.saturated) << "\n";
  }
  return 0;
}

inline int run_intersect(const Invocation& inv, const Document& doc, std::ostream& out) {
  struct Operand {
    std::string label;
    SubgroupGraph graph;
  };
  std::vector<Operand> ops;
  for (const auto& s : doc.subgroups) ops.push_back({"subgroup " + s.name, fold(s.generators, s.rank)});
  for (const auto& a : doc.automorphisms) ops.push_back({"fix " + a.name, fixed_subgroup_oracle(a.aut, inv.depth).graph});
  if (ops.empty()) throw Error("intersect needs at least one subgroup or automorphism");
  SubgroupGraph acc = ops.front().graph;
  for (std::size_t i = 1; i < ops.size(); ++i) {
    if (ops[i].graph.ambient_rank() != acc.ambient_rank()) throw RankMismatch(acc.ambient_rank(), ops[i].graph.ambient_rank());
    acc = intersect(acc, ops[i].graph);
  }
  if (inv.format == "dot") {
    out << acc.to_dot("intersection");
    return 0;
  }
  out << "intersect depth " << inv.depth << "\n";
  for (const Operand& o : ops) out << "  operand " << o.label << ": " << words(o.graph.basis()) << "\n";
  out << "  rank: " << acc.rank() << "\n";
  out << "  basis: " << words(acc.basis()) << "\n";
  return 0;
}

inline int run_witness(const Invocation& inv, const Document& doc, std::ostream& out) {
  const Pair p = pair_of(doc);
  const auto rep = supplied_representative(doc);
  const WitnessReport r = find_witness(p.phi->aut, p.psi->aut, engine_options(inv), rep);
  std::optional<Representative> shown = rep;
  if (!shown && r.heights) shown = triangular_rose(p.phi->aut, p.psi->aut);
  out << "witness " << p.phi->name << " " << p.psi->name << " depth " << inv.depth << " bound " << inv.bound << "\n";
  report_lines(out, r, shown ? &shown->graph : nullptr);
  return exit_code(r.verdict);
}

inline int run_verify(const Invocation& inv, const Document& doc, std::ostream& out) {
  if (!inv.witness) throw Error("verify needs --witness NAME");
  const NamedAutomorphism* chi = doc.find_automorphism(*inv.witness);
  if (!chi) throw Error("no automorphism named '" + *inv.witness + "'");
  const Pair p = pair_of(doc, inv.witness);
  const WitnessReport r = verify_witness(p.phi->aut, p.psi->aut, chi->aut, engine_options(inv));
  out << "verify " << chi->name << " against " << p.phi->name << " " << p.psi->name << " depth " << inv.depth << "\n";
  report_lines(out, r, nullptr);
  return exit_code(r.verdict);
}

inline const NamedGraph& graph_with_maps(const NamedGraph& g) {
  if (g.maps.empty()) throw Error("graph '" + g.name + "' defines no maps");
  return g;
}

inline UpperTriangularMap second_map(const NamedGraph& g) {
  return g.maps.size() > 1 ? g.maps[1].map : UpperTriangularMap::identity(g.graph);
}

inline int run_normalize(const Invocation& inv, const Document& doc, std::ostream& out) {
  if (doc.graphs.empty()) throw Error("normalize needs a graph");
  for (const NamedGraph& ng : doc.graphs) {
    graph_with_maps(ng);
    const FilteredGraph& G = ng.graph;
    const UpperTriangularMap g = second_map(ng);
    NormalizeOptions opt;
    opt.bound = inv.bound;
    const NormalForm nf = normalize(G, ng.maps[0].map, g, opt);
    if (inv.format == "dot") {
      out << nf.graph.to_dot(ng.name + "_normal");
      continue;
    }
    out << "normalize " << ng.name << " bound " << inv.bound << "\n";
    out << "  f: " << map_text(G, ng.maps[0].map) << "\n";
    out << "  g: " << map_text(G, g) << "\n";
    out << "  marked f: " << to_string(marked_automorphism(G, ng.maps[0].map)) << "\n";
    out << "  marked g: " << to_string(marked_automorphism(G, g)) << "\n";
    for (const HeightRecord& rec : nf.heights) out << "  " << height_text(nf.graph, rec) << "\n";
    out << "  normal form holds: " << yes_no(satisfies_normal_form(nf)) << "\n";
    out << "  normalized graph:\n";
    graph_lines(out, nf.graph, "    ");
    out << "  normalized f: " << map_text(nf.graph, nf.f) << "\n";
    out << "  normalized g: " << map_text(nf.graph, nf.g) << "\n";
    for (int i = 1; i <= G.edge_count(); ++i) {
      const EdgePath& t = nf.tau.image(i);
      if (t != G.edge_path(i)) out << "  slide: " << G.edge(i).name << " -> " << nf.graph.to_string(t) << "\n";
    }
    const FixedLoopReport loops = fixed_loop_subgroup(nf, nf.graph.base(), inv.loops);
    out << "  fixed loop rank: " << loops.graph.rank() << "\n";
    out << "  basis: " << words(loops.basis) << "\n";
    out << "  search to length " << inv.loops << ": " << loops.loops_checked << " loops, " << loops.fixed_loops << " fixed, "
        << (loops.agrees ? "all generated" : "some not generated") << "\n";
  }
  return 0;
}

inline int run_npaths(const Invocation& inv, const Document& doc, std::ostream& out) {
  if (doc.graphs.empty()) throw Error("npaths needs a graph");
  for (const NamedGraph& ng : doc.graphs) {
    graph_with_maps(ng);
    const FilteredGraph& G = ng.graph;
    const UpperTriangularMap g = second_map(ng);
    out << "npaths " << ng.name << " bound " << inv.bound << "\n";
    for (int r = 1; r <= G.edge_count(); ++r) {
      const INPSearch s = common_INPs_at_height(G, ng.maps[0].map, g, r, inv.bound);
      out << "  height " << r << " (" << G.edge(r).name << "): " << s.inps.size() << " found, " << s.candidates << " candidates"
          << (s.budget_exhausted ? ", budget exhausted" : "") << "\n";
      for (const CommonINP& p : s.inps) out << "    " << to_string(p.form) << ": " << G.to_string(p.path) << "\n";
    }
  }
  return 0;
}

inline int run_render(const Invocation& inv, const Document& doc, std::ostream& out) {
  bool any = false;
  for (const NamedGraph& g : doc.graphs) {
    out << g.graph.to_dot(g.name);
    any = true;
  }
  for (const NamedSubgroup& s : doc.subgroups) {
    out << fold(s.generators, s.rank).to_dot(s.name);
    any = true;
  }
  for (const NamedAutomorphism& a : doc.automorphisms) {
    out << fixed_subgroup_oracle(a.aut, inv.depth).graph.to_dot("fix_" + a.name);
    any = true;
  }
  if (!any) throw Error("render: the document defines nothing to draw");
  return 0;
}

inline std::string document_text(const Invocation& inv) {
  if (inv.text) {
    std::string t = *inv.text;
    for (char& c : t) {
      if (c == ';') c = '\n';
    }
    return t;
  }
  if (!inv.input) throw Error("no input: give a document path or --text");
  std::ifstream in(*inv.input, std::ios::binary);
  if (!in) throw Error("cannot read " + *inv.input);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace detail

/// Checks the invocation itself; throws Error naming the bad field.
inline void validate(const Invocation& inv) {
  if (std::find(commands().begin(), commands().end(), inv.command) == commands().end()) {
    throw Error("unknown subcommand '" + inv.command + "'");
  }
  if (inv.depth < 1 || inv.bound < 1 || inv.loops < 1) throw Error("depth, bound and loop length must be positive");
  if (inv.format != "text" && inv.format != "dot") throw Error("format must be text or dot");
  if (inv.input && inv.text) throw Error("give either an input path or --text, not both");
}

/// Runs one subcommand. Reports go to `out` (or to inv.output), diagnostics
/// to `err`. Returns 0, 2, 3 or 4 as reported, 1 on any error.
inline int run(const Invocation& inv, std::ostream& out, std::ostream& err) {
  try {
    validate(inv);
    const Document doc = parse_document(detail::document_text(inv));
    std::ostringstream report;
    int status = 0;
    if (inv.command == "fix") status = detail::run_fix(inv, doc, report);
    if (inv.command == "intersect") status = detail::run_intersect(inv, doc, report);
    if (inv.command == "witness") status = detail::run_witness(inv, doc, report);
    if (inv.command == "verify") status = detail::run_verify(inv, doc, report);
    if (inv.command == "normalize") status = detail::run_normalize(inv, doc, report);
    if (inv.command == "npaths") status = detail::run_npaths(inv, doc, report);
    if (inv.command == "render") status = detail::run_render(inv, doc, report);
    if (inv.output) {
      std::ofstream file(*inv.output, std::ios::binary);
      if (!file) throw Error("cannot write " + *inv.output);
      file << report.str();
    } else {
      out << report.str();
    }
    return status;
  } catch (const ParseError& e) {
    err << "autfix: " << (inv.input ? *inv.input + ":" : std::string()) << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "autfix: " << e.what() << "\n";
  }
  return kExitError;
}

}  // namespace autfix::cli
