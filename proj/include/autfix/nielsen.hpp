#pragma once

// Common Nielsen paths of a pair of upper triangular maps, sliding moves,
// the normal form in which every height carries a single INP up to power,
// and the fixed loop subgroup read off that normal form.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "autfix/filtered_graph.hpp"
#include "autfix/paths.hpp"
#include "autfix/stallings.hpp"

namespace autfix {

inline bool is_NP(const UpperTriangularMap& f, const EdgePath& rho) { return f.apply(rho) == rho; }

/// f(ρ)_# = ρ = g(ρ)_# for a reduced path ρ.
inline bool is_common_NP(const UpperTriangularMap& f, const UpperTriangularMap& g, const EdgePath& rho) {
  return rho.is_reduced() && is_NP(f, rho) && is_NP(g, rho);
}

/// A common NP that is not the concatenation of two nontrivial common NPs.
/// Since vertices are fixed, it is enough that no proper prefix is an NP.
inline bool is_common_INP(const FilteredGraph& G, const UpperTriangularMap& f, const UpperTriangularMap& g, const EdgePath& rho) {
  if (rho.is_trivial() || !is_common_NP(f, g, rho)) return false;
  for (std::size_t k = 1; k < rho.length(); ++k) {
    if (is_common_NP(f, g, subpath(G, rho, 0, k))) return false;
  }
  return true;
}

enum class BasicForm { Initial, Terminal, Both };

inline const char* to_string(BasicForm f) {
  switch (f) {
    case BasicForm::Initial: return "E gamma";
    case BasicForm::Terminal: return "gamma E^-1";
    case BasicForm::Both: return "E gamma E^-1";
  }
  return "?";
}

struct CommonINP {
  EdgePath path;
  BasicForm form;
  EdgePath gamma;  ///< the lower part, as a path from the head of E_r for Initial and Both
};

struct INPSearch {
  std::vector<CommonINP> inps;
  int bound = 0;
  std::size_t candidates = 0;
  bool budget_exhausted = false;

  bool has(BasicForm form) const {
    return std::any_of(inps.begin(), inps.end(), [form](const CommonINP& p) { return p.form == form; });
  }
  const CommonINP* first(BasicForm form) const {
    for (const CommonINP& p : inps) {
      if (p.form == form) return &p;
    }
    return nullptr;
  }
};

inline constexpr std::size_t kDefaultCandidateBudget = 200'000;

/// Common INPs of height r with |γ| <= bound, in the forms E_r γ, γ Ē_r and
/// E_r γ Ē_r. Ordered by form, then by γ in path order.
inline INPSearch common_INPs_at_height(const FilteredGraph& G, const UpperTriangularMap& f, const UpperTriangularMap& g,
                                       int r, int bound, std::size_t budget = kDefaultCandidateBudget) {
  INPSearch out;
  out.bound = bound;
  const int h = G.edge(r).head;
  const EdgePath& u = f.suffix(r);
  const EdgePath& v = g.suffix(r);
  const EdgePath er = G.edge_path(r);
  std::vector<CommonINP> initial;
  std::vector<CommonINP> both;
  auto consider = [&](const EdgePath& gamma) {
    ++out.candidates;
    // E_r γ is an NP iff (u f(γ))_# = γ, likewise for g.
    if (u * f.apply(gamma) == gamma && v * g.apply(gamma) == gamma) {
      const EdgePath rho = er * gamma;
      if (is_common_INP(G, f, g, rho)) initial.push_back({rho, BasicForm::Initial, gamma});
    }
    if (gamma.is_loop() && !gamma.is_trivial()) {
      if (u * f.apply(gamma) * u.inverse() == gamma && v * g.apply(gamma) * v.inverse() == gamma) {
        const EdgePath rho = er * gamma * er.inverse();
        if (is_common_INP(G, f, g, rho)) both.push_back({rho, BasicForm::Both, gamma});
      }
    }
  };
  consider(EdgePath::trivial(h));
  for_each_reduced_path(G, h, r - 1, bound, [&](const std::vector<int>& steps, int) {
    if (out.candidates >= budget) {
      out.budget_exhausted = true;
      return false;
    }
    consider(G.path(h, steps));
    return true;
  });
  auto by_gamma = [](const CommonINP& a, const CommonINP& b) { return a.gamma < b.gamma; };
  std::sort(initial.begin(), initial.end(), by_gamma);
  std::sort(both.begin(), both.end(), by_gamma);
  for (const auto& p : initial) out.inps.push_back(p);
  for (const auto& p : initial) out.inps.push_back({p.path.inverse(), BasicForm::Terminal, p.gamma});
  for (const auto& p : both) out.inps.push_back(p);
  return out;
}

struct Slide {
  FilteredGraph graph;
  UpperTriangularMap f;
  UpperTriangularMap g;
  EdgeSubstitution tau;  ///< old graph -> new graph, E_r' ↦ E_r δ̄
};

/// Slides E_r along δ, a path of height < r leaving the head of E_r. The
/// marking is carried along, so the marked automorphisms do not change.
inline Slide slide(const FilteredGraph& G, const UpperTriangularMap& f, const UpperTriangularMap& g, int r, const EdgePath& delta_in) {
  if (r < 1 || r > G.edge_count()) throw Error("slide: height out of range");
  const EdgePath delta = delta_in.reduced();
  if (delta.start() != G.edge(r).head) throw Error("slide: δ must start at the terminal vertex of " + G.edge(r).name);
  if (delta.height() >= r) throw Error("slide: δ must have height below " + std::to_string(r));
  if (delta.is_trivial()) return {G, f, g, EdgeSubstitution::identity(G)};

  std::vector<EdgePath> tau_images;
  for (int i = 1; i <= G.edge_count(); ++i) {
    if (i != r) {
      tau_images.push_back(G.edge_path(i));
    } else {
      tau_images.push_back(EdgePath(G.edge(r).tail, delta.end(), {r}) * delta.inverse());
    }
  }
  const EdgeSubstitution tau(std::move(tau_images));
  std::vector<EdgePath> loops;
  for (const EdgePath& l : G.basis_loops()) loops.push_back(tau.apply(l));
  FilteredGraph H = G.with_head(r, delta.end(), G.edge_words()[static_cast<std::size_t>(r - 1)] * G.read(delta), std::move(loops));

  auto carry = [&](const UpperTriangularMap& m) {
    std::vector<EdgePath> s;
    for (int i = 1; i <= G.edge_count(); ++i) {
      if (i < r) {
        s.push_back(m.suffix(i));
      } else if (i == r) {
        s.push_back(delta.inverse() * m.suffix(r) * m.apply(delta));
      } else {
        s.push_back(tau.apply(m.suffix(i)));
      }
    }
    return UpperTriangularMap(H, std::move(s));
  };
  return {H, carry(f), carry(g), tau};
}

enum class InpForm { Edge, Conjugate, None };

inline const char* to_string(InpForm f) {
  switch (f) {
    case InpForm::Edge: return "edge";
    case InpForm::Conjugate: return "conjugate";
    case InpForm::None: return "none";
  }
  return "?";
}

/// Normal-form data at one height.
struct HeightRecord {
  int height = 0;
  InpForm form = InpForm::None;
  std::optional<EdgePath> beta;  ///< common NP of lower height; cyclically reduced, G-reduced, not a proper power
  int r_f = 0;
  int r_g = 0;
  int bound = 0;                 ///< |γ| bound of the last search at this height
  std::size_t inps_found = 0;    ///< INPs at this height after normalization, all forms
  bool unique_up_to_power = true;
  bool budget_exhausted = false;
  std::string note;
};

using NielsenData = std::vector<HeightRecord>;

struct NormalForm {
  FilteredGraph graph;
  UpperTriangularMap f;
  UpperTriangularMap g;
  EdgeSubstitution tau;  ///< input graph -> normalized graph
  NielsenData heights;
};

struct NormalizeOptions {
  int bound = 6;
  int escalations = 3;
  std::size_t budget = kDefaultCandidateBudget;
};

namespace detail {

/// k with loop == β^k, if any.
inline std::optional<int> exponent_of(const EdgePath& loop, const EdgePath& beta) {
  if (loop.is_trivial()) return 0;
  if (beta.is_trivial() || loop.length() % beta.length() != 0) return std::nullopt;
  const int k = static_cast<int>(loop.length() / beta.length());
  if (beta.pow(k) == loop) return k;
  if (beta.pow(-k) == loop) return -k;
  return std::nullopt;
}

/// Every INP at height r is E_r^{±1}, or every one is E_r β^k Ē_r.
inline bool inps_unique(const INPSearch& s, const HeightRecord& rec) {
  for (const CommonINP& p : s.inps) {
    if (rec.form == InpForm::Edge) {
      if (p.path.length() != 1) return false;
    } else if (rec.form == InpForm::Conjugate) {
      if (p.form != BasicForm::Both) return false;
      const auto k = exponent_of(p.gamma, *rec.beta);
      if (!k || *k == 0) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Normalizes one height in place.
inline HeightRecord normalize_height(NormalForm& nf, int r, const NormalizeOptions& opt) {
  HeightRecord rec;
  rec.height = r;
  int bound = opt.bound;
  for (int attempt = 0; attempt <= opt.escalations; ++attempt, bound *= 2) {
    rec.bound = bound;
    const INPSearch search = common_INPs_at_height(nf.graph, nf.f, nf.g, r, bound, opt.budget);
    rec.budget_exhausted = search.budget_exhausted;
    if (const CommonINP* a = search.first(BasicForm::Initial)) {
      Slide s = slide(nf.graph, nf.f, nf.g, r, a->gamma);
      nf = {s.graph, s.f, s.g, s.tau.after(nf.tau), nf.heights};
      rec.form = InpForm::Edge;
      break;
    }
    if (const CommonINP* b = search.first(BasicForm::Both)) {
      const GReduction red = make_G_reduced(nf.graph, b->gamma);
      const EdgePath beta = path_root(nf.graph, red.beta).first;
      Slide s = slide(nf.graph, nf.f, nf.g, r, red.delta);
      nf = {s.graph, s.f, s.g, s.tau.after(nf.tau), nf.heights};
      rec.form = InpForm::Conjugate;
      rec.beta = beta;
      const auto kf = detail::exponent_of(nf.f.suffix(r), beta);
      const auto kg = detail::exponent_of(nf.g.suffix(r), beta);
      if (!kf || !kg) {
        rec.note = "suffix after sliding is not a power of beta";
      } else {
        rec.r_f = *kf;
        rec.r_g = *kg;
      }
      if (!is_common_NP(nf.f, nf.g, beta)) rec.note = "beta is not a common Nielsen path";
      break;
    }
    if (search.budget_exhausted) break;
  }
  if (rec.form == InpForm::None) {
    rec.note = "no common Nielsen path of height " + std::to_string(r) + " with |gamma| <= " + std::to_string(rec.bound);
    return rec;
  }
  // Post-check at the final bound; an E_r γ appearing now is slid away too.
  INPSearch after = common_INPs_at_height(nf.graph, nf.f, nf.g, r, rec.bound, opt.budget);
  if (rec.form == InpForm::Conjugate) {
    if (const CommonINP* a = after.first(BasicForm::Initial)) {
      Slide s = slide(nf.graph, nf.f, nf.g, r, a->gamma);
      nf = {s.graph, s.f, s.g, s.tau.after(nf.tau), nf.heights};
      rec = HeightRecord{r, InpForm::Edge, std::nullopt, 0, 0, rec.bound, 0, true, false, "re-slid after an edge-form INP appeared"};
      after = common_INPs_at_height(nf.graph, nf.f, nf.g, r, rec.bound, opt.budget);
    } else if (rec.r_f == 0 && rec.r_g == 0 && rec.note.empty()) {
      rec.form = InpForm::Edge;
      rec.beta.reset();
    }
  }
  rec.inps_found = after.inps.size();
  rec.unique_up_to_power = detail::inps_unique(after, rec);
  rec.budget_exhausted = rec.budget_exhausted || after.budget_exhausted;
  return rec;
}

/// Slides edges bottom-up so that every height with a common NP has
/// f(E_r) = E_r β_r^{r_f}, g(E_r) = E_r β_r^{r_g}. Heights without a common NP
/// within the bound are recorded with form None.
inline NormalForm normalize(const FilteredGraph& G, const UpperTriangularMap& f, const UpperTriangularMap& g,
                            const NormalizeOptions& opt = {}) {
  NormalForm nf{G, f, g, EdgeSubstitution::identity(G), {}};
  for (int r = 1; r <= G.edge_count(); ++r) nf.heights.push_back(normalize_height(nf, r, opt));
  return nf;
}

/// Checks f(E_r) = E_r β^{r_f}, g(E_r) = E_r β^{r_g} and β a common NP for each
/// recorded height.
inline bool satisfies_normal_form(const NormalForm& nf) {
  for (const HeightRecord& rec : nf.heights) {
    const int r = rec.height;
    if (rec.form == InpForm::Edge) {
      if (!nf.f.suffix(r).is_trivial() || !nf.g.suffix(r).is_trivial()) return false;
    } else if (rec.form == InpForm::Conjugate) {
      const EdgePath& b = *rec.beta;
      if (b.height() >= r || !is_common_NP(nf.f, nf.g, b)) return false;
      if (nf.f.suffix(r) != b.pow(rec.r_f) || nf.g.suffix(r) != b.pow(rec.r_g)) return false;
    }
  }
  return true;
}

// --- fixed loops ------------------------------------------------------------

struct FixedLoopReport {
  SubgroupGraph graph;
  std::vector<EdgePath> generators;  ///< loops at v built from common INPs
  std::vector<Word> basis;
  int vertex = 0;
  int search_length = 0;
  std::size_t loops_checked = 0;
  std::size_t fixed_loops = 0;
  std::vector<EdgePath> missed;  ///< fixed loops the INP subgroup does not contain
  bool agrees = true;
};

/// Subgroup of pi_1(G, v), read through the marking, of loops fixed by both
/// maps: generated by loops in the graph whose edges are the common INPs E_r
/// (edge form) and E_r β_r Ē_r (conjugate form). Cross-checked against every
/// reduced loop at v of length <= search_length.
inline FixedLoopReport fixed_loop_subgroup(const NormalForm& nf, int v, int search_length) {
  const FilteredGraph& G = nf.graph;
  FixedLoopReport rep;
  rep.vertex = v;
  rep.search_length = search_length;
  // Spanning tree of the edge-form INPs from v.
  std::vector<std::optional<EdgePath>> to(static_cast<std::size_t>(G.vertex_count()));
  to[static_cast<std::size_t>(v)] = EdgePath::trivial(v);
  std::vector<int> order{v};
  std::vector<bool> tree_edge(static_cast<std::size_t>(G.edge_count() + 1), false);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const int x = order[i];
    for (int s : G.out_steps(x)) {
      const HeightRecord& rec = nf.heights[static_cast<std::size_t>(std::abs(s) - 1)];
      if (rec.form != InpForm::Edge) continue;
      const int t = G.target(s);
      if (to[static_cast<std::size_t>(t)]) continue;
      to[static_cast<std::size_t>(t)] = *to[static_cast<std::size_t>(x)] * G.edge_path(s);
      tree_edge[static_cast<std::size_t>(std::abs(s))] = true;
      order.push_back(t);
    }
  }
  for (const HeightRecord& rec : nf.heights) {
    const int r = rec.height;
    const auto& tail = to[static_cast<std::size_t>(G.edge(r).tail)];
    if (!tail) continue;
    if (rec.form == InpForm::Edge && !tree_edge[static_cast<std::size_t>(r)]) {
      const auto& head = to[static_cast<std::size_t>(G.edge(r).head)];
      if (head) rep.generators.push_back(*tail * G.edge_path(r) * head->inverse());
    } else if (rec.form == InpForm::Conjugate) {
      const EdgePath er = G.edge_path(r);
      rep.generators.push_back(*tail * er * *rec.beta * er.inverse() * tail->inverse());
    }
  }
  Folder folder(G.rank());
  for (const EdgePath& p : rep.generators) {
    if (!is_common_NP(nf.f, nf.g, p)) {
      rep.agrees = false;
      rep.missed.push_back(p);
    }
    folder.add(G.read(p));
  }
  rep.graph = folder.finish();
  rep.basis = rep.graph.basis();

  for_each_reduced_path(G, v, G.edge_count(), search_length, [&](const std::vector<int>& steps, int end) {
    if (end != v) return true;
    ++rep.loops_checked;
    const EdgePath loop = G.path(v, steps);
    if (is_common_NP(nf.f, nf.g, loop)) {
      ++rep.fixed_loops;
      if (!rep.graph.accepts(G.read(loop))) {
        rep.agrees = false;
        if (rep.missed.size() < 8) rep.missed.push_back(loop);
      }
    }
    return true;
  });
  return rep;
}

// --- common conjugator ------------------------------------------------------

struct ConjugatorResult {
  EdgePath delta;
  bool by_construction = false;  ///< the proof's construction produced δ
  bool construction_failed = false;  ///< construction gave no valid δ but the search did
  std::string note;
};

/// δ with f(δ) ≃ δ μ̄ and g(δ) ≃ δ ν̄, given loops α_1, α_2 at v generating a
/// rank-2 subgroup with f(α_i) ≃ μ α_i μ̄ and g(α_i) ≃ ν α_i ν̄.
inline ConjugatorResult find_common_conjugator(const FilteredGraph& G, const UpperTriangularMap& f, const UpperTriangularMap& g,
                                               const EdgePath& alpha1, const EdgePath& alpha2, const EdgePath& mu,
                                               const EdgePath& nu, int bound) {
  const int v = alpha1.start();
  if (!alpha1.is_loop() || !alpha2.is_loop() || alpha2.start() != v) throw Error("find_common_conjugator: α_1, α_2 must be loops at one vertex");
  if (!mu.is_loop() || !nu.is_loop() || mu.start() != v || nu.start() != v) throw Error("find_common_conjugator: μ, ν must be loops at the base of α_i");
  const EdgePath a1 = alpha1.reduced();
  const EdgePath a2 = alpha2.reduced();
  for (const EdgePath& a : {a1, a2}) {
    if (f.apply(a) != mu * a * mu.inverse() || g.apply(a) != nu * a * nu.inverse()) {
      throw Error("find_common_conjugator: f(α_i) ≃ μ α_i μ̄ and g(α_i) ≃ ν α_i ν̄ must hold");
    }
  }
  if (!loops_generate_rank_two(G, a1, a2)) throw Error("find_common_conjugator: [α_1], [α_2] must generate a free group of rank 2");
  const int max_height = std::max(a1.height(), a2.height());
  auto works = [&](const EdgePath& d) {
    return d.end() == v && d.height() <= max_height && f.apply(d) == d * mu.inverse() && g.apply(d) == d * nu.inverse();
  };

  ConjugatorResult result;
  std::optional<EdgePath> constructed;
  try {
    // Elements of <α_1, α_2> as loops: all products of at most four factors.
    std::vector<EdgePath> elements{EdgePath::trivial(v)};
    std::vector<EdgePath> frontier = elements;
    for (int depth = 0; depth < 4; ++depth) {
      std::vector<EdgePath> next;
      for (const EdgePath& e : frontier) {
        for (const EdgePath& gen : {a1, a1.inverse(), a2, a2.inverse()}) {
          EdgePath p = e * gen;
          if (std::find(elements.begin(), elements.end(), p) == elements.end() &&
              std::find(next.begin(), next.end(), p) == next.end()) {
            next.push_back(p);
          }
        }
      }
      elements.insert(elements.end(), next.begin(), next.end());
      frontier = std::move(next);
    }
    elements.erase(elements.begin());
    // α: G-reduced conjugate of minimal height, then length, not a proper power.
    std::optional<EdgePath> alpha_prime;
    GReduction best;
    for (const EdgePath& e : elements) {
      GReduction red = make_G_reduced(G, e);
      red.beta = path_root(G, red.beta).first;
      if (!alpha_prime || std::make_pair(red.beta.height(), red.beta.length()) < std::make_pair(best.beta.height(), best.beta.length())) {
        alpha_prime = e;
        best = red;
      }
    }
    const EdgePath& alpha = best.beta;
    const EdgePath& delta0 = best.delta;  // α' ≃ δ_0 α δ̄_0
    std::optional<EdgePath> beta_prime;
    for (const EdgePath& e : elements) {
      if (loops_generate_rank_two(G, *alpha_prime, e)) {
        beta_prime = e;
        break;
      }
    }
    if (!beta_prime) throw Error("no second generator found");
    const EdgePath beta = delta0.inverse() * *beta_prime * delta0;
    const int r = beta.height();
    if (r > alpha.height()) {
      const auto pieces = basic_decomposition(G, beta);
      constructed = pieces.size() == 1 ? delta0.inverse() : pieces.back() * delta0.inverse();
    } else {
      constructed = delta0.inverse();
    }
    if (!works(*constructed)) constructed.reset();
  } catch (const Error&) {
    constructed.reset();
  }
  if (constructed) {
    result.delta = *constructed;
    result.by_construction = true;
    return result;
  }
  // Exhaustive: paths δ ending at v, enumerated as δ̄ leaving v.
  std::optional<EdgePath> found;
  if (works(EdgePath::trivial(v))) found = EdgePath::trivial(v);
  if (!found) {
    for_each_reduced_path(G, v, max_height, bound, [&](const std::vector<int>& steps, int) {
      if (found) return false;
      const EdgePath d = G.path(v, steps).inverse();
      if (works(d)) found = d;
      return !found;
    });
  }
  if (!found) throw BoundExhausted("find_common_conjugator: no δ of length <= " + std::to_string(bound) + " although the preconditions hold");
  result.delta = *found;
  result.construction_failed = true;
  result.note = "construction did not yield a valid delta; exhaustive search did";
  return result;
}

}  // namespace autfix
