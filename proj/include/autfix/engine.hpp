#pragma once

// Witness search: given φ, ψ find one automorphism χ with
// Fix χ = Fix φ ∩ Fix ψ, checked against the word oracle.

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "autfix/automorphism.hpp"
#include "autfix/filtered_graph.hpp"
#include "autfix/nielsen.hpp"
#include "autfix/stallings.hpp"

namespace autfix {

enum class Verdict { Equal, Unequal, OutOfScope, BoundExhausted };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Equal: return "equal";
    case Verdict::Unequal: return "unequal";
    case Verdict::OutOfScope: return "out-of-scope";
    case Verdict::BoundExhausted: return "bound-exhausted";
  }
  return "?";
}

inline int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Equal: return 0;
    case Verdict::Unequal: return 2;
    case Verdict::OutOfScope: return 3;
    case Verdict::BoundExhausted: return 4;
  }
  return 1;
}

/// Smallest k >= 1 with r_f + k r_g != 0 at every height where (r_f, r_g) != 0.
inline int choose_k(const NielsenData& nd) {
  int k = 1;
  for (const HeightRecord& rec : nd) {
    if (rec.r_g == 0) continue;
    const int a = std::abs(rec.r_f);
    const int b = std::abs(rec.r_g);
    k = std::max(k, 1 + (a + b - 1) / b);
  }
  return k;
}

struct ExponentRow {
  int height = 0;
  InpForm form = InpForm::None;
  int r_f = 0;
  int r_g = 0;
  int combined = 0;     ///< r_f + k r_g
  bool matches = true;  ///< suffix of f g^k at this height is β^combined
};

struct Witness {
  int k = 1;
  UpperTriangularMap h;  ///< f g^k, g^k first
  Automorphism chi;
  std::vector<ExponentRow> table;
};

inline Witness build_witness(const NormalForm& nf, int k) {
  if (k < 1) throw Error("witness exponent k must be positive");
  const FilteredGraph& G = nf.graph;
  Witness w{k, compose(G, nf.f, power(G, nf.g, k)), Automorphism::identity(G.rank()), {}};
  w.chi = marked_automorphism(G, w.h);
  for (const HeightRecord& rec : nf.heights) {
    ExponentRow row{rec.height, rec.form, rec.r_f, rec.r_g, rec.r_f + k * rec.r_g, true};
    const EdgePath& u = w.h.suffix(rec.height);
    if (rec.form == InpForm::Edge) row.matches = u.is_trivial();
    if (rec.form == InpForm::Conjugate) row.matches = u == rec.beta->pow(row.combined);
    w.table.push_back(row);
  }
  return w;
}

/// Automorphism on F_n acting as χ_H on the letters in `letters` (χ_H is on
/// F_r, r = letters.size(), letter j standing for letters[j-1]) and inverting
/// the remaining letters.
inline Automorphism extend_by_inversion(const Automorphism& chi_h, const std::vector<int>& letters, int n) {
  if (static_cast<int>(letters.size()) != chi_h.rank()) throw Error("extend_by_inversion: letter list does not match the rank");
  std::vector<Word> images;
  std::vector<int> slot(static_cast<std::size_t>(n + 1), 0);
  for (std::size_t j = 0; j < letters.size(); ++j) {
    if (letters[j] < 1 || letters[j] > n) throw Error("extend_by_inversion: letter out of range");
    slot[static_cast<std::size_t>(letters[j])] = static_cast<int>(j) + 1;
  }
  for (int i = 1; i <= n; ++i) {
    const int j = slot[static_cast<std::size_t>(i)];
    if (j == 0) {
      images.push_back(Word::generator(n, i, -1));
      continue;
    }
    std::vector<Letter> out;
    for (Letter l : chi_h.image(j).letters()) out.push_back({letters[static_cast<std::size_t>(l.index - 1)], l.sign});
    images.push_back(Word(n, out));
  }
  return Automorphism(std::move(images));
}

/// χ_H given on the first r letters.
inline Automorphism extend_by_inversion(const Automorphism& chi_h, int n) {
  if (chi_h.rank() > n) throw Error("extend_by_inversion: rank exceeds the ambient rank");
  std::vector<int> letters;
  for (int i = 1; i <= chi_h.rank(); ++i) letters.push_back(i);
  return extend_by_inversion(chi_h, letters, n);
}

/// φ restricted to the subgroup generated by `letters`, relabelled onto
/// F_r; nullopt when some image leaves that subgroup.
inline std::optional<Automorphism> restrict_to_letters(const Automorphism& phi, const std::vector<int>& letters) {
  const int r = static_cast<int>(letters.size());
  std::map<int, int> slot;
  for (int j = 0; j < r; ++j) slot[letters[static_cast<std::size_t>(j)]] = j + 1;
  std::vector<Word> images;
  for (int i : letters) {
    std::vector<Letter> out;
    for (Letter l : phi.image(i).letters()) {
      auto it = slot.find(l.index);
      if (it == slot.end()) return std::nullopt;
      out.push_back({it->second, l.sign});
    }
    images.push_back(Word(r, out));
  }
  return Automorphism(std::move(images));
}

// --- certificates -------------------------------------------------------------

/// Filtered-graph representatives of φ and ψ on one graph.
struct Representative {
  FilteredGraph graph;
  UpperTriangularMap f;
  UpperTriangularMap g;
  std::string source;
};

/// Throws unless f and g induce exactly φ and ψ through the marking.
inline void check_representative(const Representative& rep, const Automorphism& phi, const Automorphism& psi) {
  if (rep.graph.rank() != phi.rank()) throw RankMismatch(phi.rank(), rep.graph.rank());
  if (marked_automorphism(rep.graph, rep.f) != phi) {
    throw Error("representative does not induce the first automorphism: it gives " + to_string(marked_automorphism(rep.graph, rep.f)));
  }
  if (marked_automorphism(rep.graph, rep.g) != psi) {
    throw Error("representative does not induce the second automorphism: it gives " + to_string(marked_automorphism(rep.graph, rep.g)));
  }
}

/// The rose on the basis letters, ordered so that both maps send every letter
/// a to a·u with u a word in earlier letters. Nullopt when no such order exists.
inline std::optional<Representative> triangular_rose(const Automorphism& phi, const Automorphism& psi) {
  const int n = phi.rank();
  if (psi.rank() != n) throw RankMismatch(n, psi.rank());
  std::vector<std::set<int>> needs(static_cast<std::size_t>(n + 1));
  for (const Automorphism* m : {&phi, &psi}) {
    for (int i = 1; i <= n; ++i) {
      const Word& w = m->image(i);
      if (w.is_identity() || w[0] != Letter{i, 1}) return std::nullopt;
      for (std::size_t j = 1; j < w.length(); ++j) {
        if (w[j].index == i) return std::nullopt;
        needs[static_cast<std::size_t>(i)].insert(w[j].index);
      }
    }
  }
  // Kahn's algorithm, smallest letter first.
  std::vector<int> order;
  std::vector<bool> placed(static_cast<std::size_t>(n + 1), false);
  while (static_cast<int>(order.size()) < n) {
    int next = 0;
    for (int i = 1; i <= n && next == 0; ++i) {
      if (placed[static_cast<std::size_t>(i)]) continue;
      const auto& req = needs[static_cast<std::size_t>(i)];
      if (std::all_of(req.begin(), req.end(), [&](int j) { return placed[static_cast<std::size_t>(j)]; })) next = i;
    }
    if (next == 0) return std::nullopt;
    placed[static_cast<std::size_t>(next)] = true;
    order.push_back(next);
  }
  std::vector<int> edge_of(static_cast<std::size_t>(n + 1));
  std::vector<std::string> names;
  for (int e = 1; e <= n; ++e) {
    edge_of[static_cast<std::size_t>(order[static_cast<std::size_t>(e - 1)])] = e;
    names.push_back(letter_name(n, order[static_cast<std::size_t>(e - 1)]));
  }
  std::vector<GraphEdge> edges;
  for (const std::string& s : names) edges.push_back({s, 0, 0});
  std::vector<int> basis;
  for (int i = 1; i <= n; ++i) basis.push_back(edge_of[static_cast<std::size_t>(i)]);
  FilteredGraph G({"v"}, std::move(edges), 0, {}, basis);
  auto lift = [&](const Automorphism& m) {
    std::vector<EdgePath> suffixes;
    for (int e = 1; e <= n; ++e) {
      const Word& w = m.image(order[static_cast<std::size_t>(e - 1)]);
      std::vector<int> steps;
      for (std::size_t j = 1; j < w.length(); ++j) steps.push_back(w[j].sign * edge_of[static_cast<std::size_t>(w[j].index)]);
      suffixes.push_back(G.path(0, std::move(steps)));
    }
    return UpperTriangularMap(G, std::move(suffixes));
  };
  Representative rep{G, lift(phi), lift(psi), "triangular rose"};
  check_representative(rep, phi, psi);
  return rep;
}

// --- verification -------------------------------------------------------------

struct Comparison {
  bool equal = false;
  bool contains_common = true;  ///< Fix φ ∩ Fix ψ ⊆ Fix χ at this depth
  std::optional<Word> distinguishing;
  SubgroupGraph fix;
};

/// Oracle Fix χ at depth L against `common`. The distinguishing word is the
/// shortlex-first fixed word outside `common`, else the first basis word of
/// `common` that χ moves.
inline Comparison compare_fixed(const Automorphism& chi, const SubgroupGraph& common, int depth) {
  const int n = chi.rank();
  struct Shard {
    Folder folder;
    std::vector<Word> added;
    std::optional<Word> outside;
  };
  auto shards = enumerate_words<Shard>(
      n, depth, std::span<const Automorphism>(&chi, 1), [n] { return Shard{Folder(n), {}, std::nullopt}; },
      [&](Shard& s, std::span<const Letter> w, std::span<const std::span<const Letter>> img) {
        if (!same_letters(w, img[0])) return;
        const bool known = s.folder.accepts(w);
        const bool inside = common.accepts(w);
        if (known && inside) return;
        Word word = Word::from_reduced(n, {w.begin(), w.end()});
        if (!inside && (!s.outside || word < *s.outside)) s.outside = word;
        if (!known) {
          s.folder.add(word);
          s.added.push_back(std::move(word));
        }
      });
  Comparison c;
  Folder folder(n);
  for (const Shard& s : shards) {
    for (const Word& w : s.added) folder.add(w);
    if (s.outside && (!c.distinguishing || *s.outside < *c.distinguishing)) c.distinguishing = s.outside;
  }
  c.fix = folder.finish();
  for (const Word& b : common.basis()) {
    if (chi.apply(b) != b) {
      c.contains_common = false;
      if (!c.distinguishing) c.distinguishing = b;
    }
  }
  c.equal = !c.distinguishing && equal_subgroups(c.fix, common);
  return c;
}

struct Attempt {
  std::optional<int> k;
  Automorphism chi = Automorphism::identity(0);
  int depth = 0;
  bool equal = false;
  bool contains_common = true;
  std::optional<Word> distinguishing;
  std::optional<bool> exact;  ///< fixed loops of f g^k equal the common fixed loops
  std::optional<bool> stable; ///< still equal at depth + 2
};

struct WitnessReport {
  Automorphism phi = Automorphism::identity(0);
  Automorphism psi = Automorphism::identity(0);
  int depth = 0;
  std::vector<Word> fix_phi;
  std::vector<Word> fix_psi;
  SubgroupGraph common;
  std::string route;
  Verdict verdict = Verdict::OutOfScope;
  std::optional<int> k0;
  std::optional<int> k;
  std::optional<Automorphism> chi;
  std::vector<ExponentRow> table;
  std::optional<NielsenData> heights;
  std::vector<Attempt> attempts;
  std::optional<Word> smallest_distinguishing;
  std::vector<std::string> notes;
};

struct EngineOptions {
  int depth = 8;
  int tries = 8;
  int loop_length = 6;  ///< brute-force cross-check of the fixed-loop subgroups
  bool stability = true;
  NormalizeOptions normalize;
};

namespace detail {

struct Oracles {
  FixedSubgroupReport phi;
  FixedSubgroupReport psi;
  SubgroupGraph common;
};

inline Oracles oracles(const Automorphism& phi, const Automorphism& psi, int depth) {
  Oracles o{fixed_subgroup_oracle(phi, depth), fixed_subgroup_oracle(psi, depth), {}};
  o.common = intersect(o.phi.graph, o.psi.graph);
  return o;
}

inline WitnessReport start_report(const Automorphism& phi, const Automorphism& psi, int depth, const Oracles& o) {
  WitnessReport r;
  r.phi = phi;
  r.psi = psi;
  r.depth = depth;
  r.fix_phi = o.phi.generators;
  r.fix_psi = o.psi.generators;
  r.common = o.common;
  return r;
}

/// Oracle check of one candidate at depth L and, when it passes, at L + 2.
inline Attempt try_candidate(const Automorphism& phi, const Automorphism& psi, const Automorphism& chi,
                             const SubgroupGraph& common, const EngineOptions& opt) {
  Attempt a;
  a.chi = chi;
  a.depth = opt.depth;
  Comparison c = compare_fixed(chi, common, opt.depth);
  a.equal = c.equal;
  a.contains_common = c.contains_common;
  a.distinguishing = c.distinguishing;
  if (a.equal && opt.stability) {
    const Oracles deeper = oracles(phi, psi, opt.depth + 2);
    const Comparison d = compare_fixed(chi, deeper.common, opt.depth + 2);
    a.stable = d.equal;
    if (!d.equal) {
      a.equal = false;
      a.depth = opt.depth + 2;
      a.distinguishing = d.distinguishing;
      a.contains_common = d.contains_common;
    }
  }
  return a;
}

inline void record_failure(WitnessReport& r, const Attempt& a) {
  if (!a.distinguishing) return;
  if (!r.smallest_distinguishing || *a.distinguishing < *r.smallest_distinguishing) r.smallest_distinguishing = a.distinguishing;
}

inline void accept(WitnessReport& r, const Attempt& a) {
  r.verdict = Verdict::Equal;
  r.chi = a.chi;
  r.k = a.k;
}

}  // namespace detail

/// Checks a claimed χ against the oracle intersection.
inline WitnessReport verify_witness(const Automorphism& phi, const Automorphism& psi, const Automorphism& chi,
                                    const EngineOptions& opt = {}) {
  if (opt.depth < 4) throw Error("oracle depth must be at least 4");
  if (phi.rank() != psi.rank()) throw RankMismatch(phi.rank(), psi.rank());
  if (chi.rank() != phi.rank()) throw RankMismatch(phi.rank(), chi.rank());
  const detail::Oracles o = detail::oracles(phi, psi, opt.depth);
  WitnessReport r = detail::start_report(phi, psi, opt.depth, o);
  r.route = "claimed";
  const Attempt a = detail::try_candidate(phi, psi, chi, o.common, opt);
  r.attempts.push_back(a);
  if (a.equal) {
    detail::accept(r, a);
  } else {
    r.verdict = Verdict::Unequal;
    detail::record_failure(r, a);
  }
  return r;
}

/// Tries χ = φψ^k for k = k0, k0+1, ... (opt.tries values). With a normal
/// form, acceptance also needs the fixed loops of f g^k to equal the common
/// fixed loops of f and g.
inline WitnessReport escalate(const Automorphism& phi, const Automorphism& psi, int k0, const EngineOptions& opt = {},
                              const NormalForm* nf = nullptr) {
  if (opt.depth < 4) throw Error("oracle depth must be at least 4");
  if (phi.rank() != psi.rank()) throw RankMismatch(phi.rank(), psi.rank());
  const detail::Oracles o = detail::oracles(phi, psi, opt.depth);
  WitnessReport r = detail::start_report(phi, psi, opt.depth, o);
  r.route = "escalate";
  r.k0 = k0;
  r.verdict = Verdict::BoundExhausted;
  std::optional<FixedLoopReport> common_loops;
  if (nf) {
    common_loops = fixed_loop_subgroup(*nf, nf->graph.base(), opt.loop_length);
    if (!common_loops->agrees) r.notes.push_back("common fixed loops miss a brute-force fixed loop");
    if (!equal_subgroups(common_loops->graph, o.common)) {
      r.notes.push_back("fixed loops of f and g differ from the oracle intersection at depth " + std::to_string(opt.depth));
    }
    r.heights = nf->heights;
  }
  Automorphism psi_k = power(psi, k0);
  for (int k = k0; k < k0 + opt.tries; ++k, psi_k = compose(psi, psi_k)) {
    const Automorphism chi = compose(phi, psi_k);
    Attempt a = detail::try_candidate(phi, psi, chi, o.common, opt);
    a.k = k;
    if (nf) {
      const Witness w = build_witness(*nf, k);
      if (w.chi != chi) r.notes.push_back("marked f g^" + std::to_string(k) + " differs from the composite automorphism");
      const NormalForm self = normalize(nf->graph, w.h, w.h, opt.normalize);
      const FixedLoopReport loops = fixed_loop_subgroup(self, self.graph.base(), opt.loop_length);
      a.exact = loops.agrees && equal_subgroups(loops.graph, common_loops->graph);
      if (!*a.exact && a.equal) {
        a.equal = false;
        r.notes.push_back("k=" + std::to_string(k) + ": oracle agrees but the fixed loops of f g^k are larger");
      }
      if (a.equal) r.table = w.table;
    }
    r.attempts.push_back(a);
    if (a.equal) {
      detail::accept(r, a);
      return r;
    }
    detail::record_failure(r, a);
  }
  r.notes.push_back("no k in [" + std::to_string(k0) + ", " + std::to_string(k0 + opt.tries - 1) + "] passed");
  return r;
}

// --- dispatcher ----------------------------------------------------------------

namespace detail {

inline std::vector<Automorphism> fixed_point_free_candidates(int n) {
  std::vector<Automorphism> out;
  std::vector<Word> inv;
  std::vector<Word> cyc;
  std::vector<Word> both;
  for (int i = 1; i <= n; ++i) {
    inv.push_back(Word::generator(n, i, -1));
    cyc.push_back(Word::generator(n, i % n + 1));
    both.push_back(Word::generator(n, i % n + 1, -1));
  }
  out.emplace_back(inv);
  if (n > 1) {
    out.emplace_back(cyc);
    out.emplace_back(both);
  }
  return out;
}

inline std::vector<int> letters_of(const std::vector<Word>& words) {
  std::set<int> s;
  for (const Word& w : words) {
    for (Letter l : w.letters()) s.insert(l.index);
  }
  return {s.begin(), s.end()};
}

}  // namespace detail

inline WitnessReport find_witness(const Automorphism& phi, const Automorphism& psi, const EngineOptions& opt = {},
                                  const std::optional<Representative>& supplied = std::nullopt);

namespace detail {

/// Both maps preserve a proper letter free factor containing the intersection:
/// solve there and invert the other letters.
inline std::optional<WitnessReport> free_factor_route(const Automorphism& phi, const Automorphism& psi,
                                                      const Oracles& o, const EngineOptions& opt) {
  const int n = phi.rank();
  const std::vector<int> letters = letters_of(o.common.basis());
  if (letters.empty() || static_cast<int>(letters.size()) >= n) return std::nullopt;
  const auto phi_s = restrict_to_letters(phi, letters);
  const auto psi_s = restrict_to_letters(psi, letters);
  if (!phi_s || !psi_s) return std::nullopt;
  const WitnessReport inner_report = find_witness(*phi_s, *psi_s, opt);
  WitnessReport r = start_report(phi, psi, opt.depth, o);
  std::string names;
  for (int i : letters) names += (names.empty() ? "" : ",") + letter_name(n, i);
  r.route = "free-factor <" + names + ">";
  r.notes.push_back("restricted pair solved by route " + inner_report.route + " with verdict " + to_string(inner_report.verdict));
  r.k0 = inner_report.k0;
  r.table = inner_report.table;
  r.heights = inner_report.heights;
  if (inner_report.verdict != Verdict::Equal) {
    r.verdict = inner_report.verdict;
    return r;
  }
  Attempt a = try_candidate(phi, psi, extend_by_inversion(*inner_report.chi, letters, n), o.common, opt);
  a.k = inner_report.k;
  r.attempts.push_back(a);
  if (a.equal) {
    accept(r, a);
  } else {
    r.verdict = Verdict::Unequal;
    record_failure(r, a);
  }
  return r;
}

}  // namespace detail

/// Dispatches on the rank of H = Fix φ ∩ Fix ψ (oracle, depth L): rank 0 tries
/// fixed-point-free candidates, rank 1 the inner automorphism by the root of
/// the generator, rank >= 2 the normalization pipeline on a certificate,
/// falling back to a preserved letter free factor.
inline WitnessReport find_witness(const Automorphism& phi, const Automorphism& psi, const EngineOptions& opt,
                                  const std::optional<Representative>& supplied) {
  if (opt.depth < 4) throw Error("oracle depth must be at least 4");
  if (phi.rank() != psi.rank()) throw RankMismatch(phi.rank(), psi.rank());
  const int n = phi.rank();
  const detail::Oracles o = detail::oracles(phi, psi, opt.depth);
  const int rank = o.common.rank();

  if (rank == 0) {
    WitnessReport r = detail::start_report(phi, psi, opt.depth, o);
    r.route = "fixed-point-free";
    r.verdict = Verdict::Unequal;
    for (const Automorphism& chi : detail::fixed_point_free_candidates(n)) {
      Attempt a = detail::try_candidate(phi, psi, chi, o.common, opt);
      r.attempts.push_back(a);
      if (a.equal) {
        detail::accept(r, a);
        break;
      }
      detail::record_failure(r, a);
    }
    return r;
  }

  if (rank == 1) {
    WitnessReport r = detail::start_report(phi, psi, opt.depth, o);
    const Word root = primitive_root(o.common.basis().front()).root;
    r.route = "inner " + to_string(root);
    Attempt a = detail::try_candidate(phi, psi, inner(root), o.common, opt);
    r.attempts.push_back(a);
    if (a.equal) {
      detail::accept(r, a);
    } else {
      r.verdict = Verdict::Unequal;
      detail::record_failure(r, a);
    }
    return r;
  }

  std::optional<Representative> rep = supplied;
  if (rep) {
    check_representative(*rep, phi, psi);
  } else {
    rep = triangular_rose(phi, psi);
  }
  std::optional<WitnessReport> pipeline;
  if (rep) {
    const NormalForm nf = normalize(rep->graph, rep->f, rep->g, opt.normalize);
    pipeline = escalate(phi, psi, choose_k(nf.heights), opt, &nf);
    pipeline->route = "pipeline (" + rep->source + ")";
    if (pipeline->verdict == Verdict::Equal) return *pipeline;
  }
  if (auto ff = detail::free_factor_route(phi, psi, o, opt)) {
    if (pipeline) {
      std::string tried = pipeline->route + " gave " + to_string(pipeline->verdict);
      if (pipeline->smallest_distinguishing) tried += ", distinguishing " + to_string(*pipeline->smallest_distinguishing);
      ff->notes.insert(ff->notes.begin(), tried);
    }
    if (ff->verdict == Verdict::Equal || !pipeline) return *ff;
  }
  if (pipeline) return *pipeline;

  WitnessReport r = detail::start_report(phi, psi, opt.depth, o);
  r.route = "none";
  r.verdict = Verdict::OutOfScope;
  r.notes.push_back("no upper triangular representative: exponential growth or an unrecognized polynomial pair is out of scope");
  for (const auto& [name, m] : {std::pair{"first", &phi}, std::pair{"second", &psi}}) {
    if (!is_unipotent(abelianization(*m))) r.notes.push_back(std::string(name) + " automorphism is not unipotent on the abelianization");
  }
  return r;
}

}  // namespace autfix
