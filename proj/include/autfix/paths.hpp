#pragma once

// Path calculus on a filtered graph: heights, basic decompositions, G-reduced
// loops and the (p, q) search that keeps α^p β α^q G-reduced.

#include <optional>
#include <utility>
#include <vector>

#include "autfix/filtered_graph.hpp"
#include "autfix/stallings.hpp"

namespace autfix {

inline int height(const EdgePath& a) { return a.height(); }

/// Steps [from, to) of `a` as a path.
inline EdgePath subpath(const FilteredGraph& g, const EdgePath& a, std::size_t from, std::size_t to) {
  int v = a.start();
  for (std::size_t i = 0; i < from; ++i) v = g.target(a[i]);
  return g.path(v, std::vector<int>(a.steps().begin() + static_cast<std::ptrdiff_t>(from),
                                    a.steps().begin() + static_cast<std::ptrdiff_t>(to)));
}

/// The unique decomposition of a reduced path into the fewest pieces that are
/// basic of height r = ht(α) (E_r γ, γ Ē_r, E_r γ Ē_r) or of height < r.
inline std::vector<EdgePath> basic_decomposition(const FilteredGraph& g, const EdgePath& a) {
  if (a.is_trivial()) throw Error("basic_decomposition needs a nontrivial path");
  if (!a.is_reduced()) throw Error("basic_decomposition needs a reduced path");
  const int r = a.height();
  const std::size_t n = a.length();
  // A unit is one or two occurrences of E_r^±1: E_r … Ē_r pairs when possible.
  struct Unit {
    std::size_t lo, hi;  // inclusive step range
    bool open_right;     // unpaired E_r: may absorb the lower segment after it
    bool open_left;      // unpaired Ē_r: may absorb the lower segment before it
  };
  std::vector<std::size_t> tops;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(a[i]) == r) tops.push_back(i);
  }
  std::vector<Unit> units;
  for (std::size_t t = 0; t < tops.size(); ++t) {
    const std::size_t i = tops[t];
    if (a[i] == r && t + 1 < tops.size() && a[tops[t + 1]] == -r) {
      units.push_back({i, tops[t + 1], false, false});
      ++t;
    } else {
      units.push_back({i, i, a[i] == r, a[i] == -r});
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> pieces;  // half-open
  std::size_t pos = 0;
  for (std::size_t u = 0; u <= units.size(); ++u) {
    const std::size_t seg_end = u < units.size() ? units[u].lo : n;
    if (pos < seg_end) {
      if (u > 0 && units[u - 1].open_right) {
        pieces.back().second = seg_end;
      } else if (u < units.size() && units[u].open_left) {
        units[u].lo = pos;
      } else {
        pieces.emplace_back(pos, seg_end);
      }
    }
    if (u < units.size()) {
      pieces.emplace_back(units[u].lo, units[u].hi + 1);
      pos = units[u].hi + 1;
    }
  }
  std::vector<EdgePath> out;
  for (const auto& [lo, hi] : pieces) out.push_back(subpath(g, a, lo, hi));
  return out;
}

/// Tag of a piece in a basic decomposition of height r.
enum class PieceKind { Lower, Initial, Terminal, Both };

inline PieceKind piece_kind(const EdgePath& piece, int r) {
  const bool starts = !piece.is_trivial() && piece.front() == r;
  const bool ends = !piece.is_trivial() && piece.back() == -r;
  if (starts && ends) return PieceKind::Both;
  if (starts) return PieceKind::Initial;
  if (ends) return PieceKind::Terminal;
  return PieceKind::Lower;
}

inline bool is_cyclically_reduced(const EdgePath& a) {
  return a.is_loop() && a.is_reduced() && (a.length() < 2 || a.front() != -a.back());
}

/// Cyclically reduced loop of height r beginning with E_r or ending with Ē_r.
inline bool is_G_reduced(const EdgePath& a) {
  if (a.is_trivial() || !is_cyclically_reduced(a)) return false;
  const int r = a.height();
  return a.front() == r || a.back() == -r;
}

struct CyclicPath {
  EdgePath core;
  EdgePath conjugator;  ///< a = conjugator · core · conjugator̄
};

inline CyclicPath cyclically_reduce(const FilteredGraph& g, const EdgePath& a) {
  if (!a.is_loop()) throw Error("only loops can be cyclically reduced");
  const EdgePath r = a.reduced();
  std::size_t lo = 0;
  std::size_t hi = r.length();
  while (hi - lo >= 2 && r[lo] == -r[hi - 1]) {
    ++lo;
    --hi;
  }
  return {subpath(g, r, lo, hi), subpath(g, r, 0, lo)};
}

struct GReduction {
  EdgePath delta;  ///< β = (δ̄ γ δ)_#
  EdgePath beta;
};

/// Conjugates a nontrivial loop to a G-reduced loop by the first working
/// cyclic rotation of its cyclic reduction.
inline GReduction make_G_reduced(const FilteredGraph& g, const EdgePath& gamma) {
  if (!gamma.is_loop()) throw Error("make_G_reduced needs a loop");
  const auto [core, c] = cyclically_reduce(g, gamma);
  if (core.is_trivial()) throw Error("make_G_reduced: a null-homotopic loop has no G-reduced conjugate");
  for (std::size_t k = 0; k < core.length(); ++k) {
    const EdgePath head = subpath(g, core, 0, k);
    const EdgePath rotated = subpath(g, core, k, core.length()) * head;
    if (is_G_reduced(rotated)) return {c * head, rotated};
  }
  throw Error("make_G_reduced: no rotation is G-reduced (internal error)");
}

/// Root ρ and exponent with loop = ρ^k for a cyclically reduced loop.
inline std::pair<EdgePath, int> path_root(const FilteredGraph& g, const EdgePath& loop) {
  const std::size_t n = loop.length();
  for (std::size_t d = 1; d <= n; ++d) {
    if (n % d != 0) continue;
    bool periodic = true;
    for (std::size_t i = d; i < n && periodic; ++i) periodic = loop[i] == loop[i - d];
    if (periodic && g.target(loop[d - 1]) == loop.start()) return {subpath(g, loop, 0, d), static_cast<int>(n / d)};
  }
  return {loop, 1};
}

/// Holds for every upper triangular f when α is G-reduced.
template <class Map>
bool stays_G_reduced_check(const Map& f, const EdgePath& a) {
  return is_G_reduced(f.apply(a));
}

inline bool loops_generate_rank_two(const FilteredGraph& g, const EdgePath& a, const EdgePath& b) {
  // Loops at any vertex read injectively through the marking.
  return fold({g.read(a), g.read(b)}, g.rank()).rank() == 2;
}

/// Exhaustive scan over p + q = 2, 3, ... with p, q <= bound.
inline std::optional<std::pair<int, int>> scan_pq(const EdgePath& alpha, const EdgePath& beta, int bound) {
  for (int sum = 2; sum <= 2 * bound; ++sum) {
    for (int p = std::max(1, sum - bound); p <= std::min(bound, sum - 1); ++p) {
      const int q = sum - p;
      if (is_G_reduced(alpha.pow(p) * beta * alpha.pow(q))) return std::make_pair(p, q);
    }
  }
  return std::nullopt;
}

/// Positive p, q <= bound with (α^p β α^q)_# G-reduced. Tries p = |β|+1,
/// q = |α^{p+1} β|+1 first, then scans.
inline std::pair<int, int> find_pq(const FilteredGraph& g, const EdgePath& alpha, const EdgePath& beta, int bound) {
  if (!is_G_reduced(alpha)) throw Error("find_pq: α must be G-reduced");
  if (!beta.is_loop() || beta.start() != alpha.start()) throw Error("find_pq: β must be a loop at the base of α");
  if (alpha.height() != beta.reduced().height()) throw Error("find_pq: α and β must have the same height");
  if (!loops_generate_rank_two(g, alpha, beta)) throw Error("find_pq: [α] and [β] do not generate a free group of rank 2");
  const int p = static_cast<int>(beta.reduced().length()) + 1;
  const int q = static_cast<int>((alpha.pow(p + 1) * beta).length()) + 1;
  if (p <= bound && q <= bound && is_G_reduced(alpha.pow(p) * beta * alpha.pow(q))) return {p, q};
  if (auto pq = scan_pq(alpha, beta, bound)) return *pq;
  throw BoundExhausted("find_pq: no (p, q) up to " + std::to_string(bound));
}

/// Depth-first enumeration of reduced paths leaving `start` that use edges of
/// height at most `max_height`, in edge order, up to `max_length` steps.
/// `visit(steps, end_vertex)` returns false to prune below that path.
template <class Visit>
void for_each_reduced_path(const FilteredGraph& g, int start, int max_height, int max_length, Visit&& visit) {
  std::vector<int> steps;
  std::vector<int> vertex{start};
  std::vector<std::size_t> next{0};
  while (!next.empty()) {
    const int v = vertex.back();
    const auto& out = g.out_steps(v);
    std::size_t& i = next.back();
    bool descended = false;
    while (i < out.size()) {
      const int s = out[i++];
      if (std::abs(s) > max_height) continue;
      if (!steps.empty() && steps.back() == -s) continue;
      if (static_cast<int>(steps.size()) >= max_length) break;
      steps.push_back(s);
      if (visit(static_cast<const std::vector<int>&>(steps), g.target(s))) {
        vertex.push_back(g.target(s));
        next.push_back(0);
        descended = true;
        break;
      }
      steps.pop_back();
    }
    if (descended) continue;
    next.pop_back();
    vertex.pop_back();
    if (!steps.empty()) steps.pop_back();
  }
}

}  // namespace autfix
