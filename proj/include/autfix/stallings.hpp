#pragma once

// Folded subgroup graphs (Stallings graphs) of finitely generated subgroups
// of F_n: membership, rank, basis and pullback intersection.

#include <deque>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "autfix/free_group.hpp"

namespace autfix {

/// A folded core graph with basepoint 0. Vertices are numbered in breadth-first
/// order from the basepoint, exploring labels in alphabet order, so two graphs
/// of the same subgroup are identical.
class SubgroupGraph {
 public:
  SubgroupGraph() = default;

  /// Trivial subgroup of F_rank: the basepoint alone.
  explicit SubgroupGraph(int rank) : rank_(rank), table_(static_cast<std::size_t>(2 * rank), kNone) {}

  int ambient_rank() const { return rank_; }
  int vertex_count() const { return rank_ == 0 ? 1 : static_cast<int>(table_.size()) / (2 * rank_); }

  /// Number of positively labelled edges.
  int edge_count() const {
    int e = 0;
    for (int v = 0; v < vertex_count(); ++v)
      for (int i = 1; i <= rank_; ++i) e += target(v, Letter{i, 1}) != kNone;
    return e;
  }

  /// Target of the edge leaving `vertex` with label `l`, or -1.
  int target(int vertex, Letter l) const {
    return table_[static_cast<std::size_t>(vertex * 2 * rank_ + l.key())];
  }

  bool accepts(std::span<const Letter> w) const {
    int v = 0;
    for (Letter l : w) {
      v = target(v, l);
      if (v == kNone) return false;
    }
    return v == 0;
  }

  bool accepts(const Word& w) const {
    if (w.rank() != rank_) throw RankMismatch(rank_, w.rank());
    return accepts(w.letters());
  }

  int rank() const { return edge_count() - vertex_count() + 1; }

  /// Free basis read off a breadth-first spanning tree: one generator per
  /// non-tree edge, ordered by (source vertex, label).
  std::vector<Word> basis() const {
    const int nv = vertex_count();
    std::vector<std::vector<Letter>> prefix(static_cast<std::size_t>(nv));
    std::vector<bool> seen(static_cast<std::size_t>(nv), false);
    // tree_edge[v] = (parent, key) used to discover v.
    std::vector<std::pair<int, int>> tree_edge(static_cast<std::size_t>(nv), {-1, -1});
    std::deque<int> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (int key = 0; key < 2 * rank_; ++key) {
        const int t = target(v, Letter::from_key(key));
        if (t == kNone || seen[static_cast<std::size_t>(t)]) continue;
        seen[static_cast<std::size_t>(t)] = true;
        prefix[static_cast<std::size_t>(t)] = prefix[static_cast<std::size_t>(v)];
        prefix[static_cast<std::size_t>(t)].push_back(Letter::from_key(key));
        tree_edge[static_cast<std::size_t>(t)] = {v, key};
        queue.push_back(t);
      }
    }
    std::vector<Word> out;
    for (int v = 0; v < nv; ++v) {
      for (int i = 1; i <= rank_; ++i) {
        const Letter l{i, 1};
        const int t = target(v, l);
        if (t == kNone) continue;
        const auto& te = tree_edge[static_cast<std::size_t>(t)];
        const auto& back = tree_edge[static_cast<std::size_t>(v)];
        const bool is_tree = (te.first == v && te.second == l.key()) ||
                             (back.first == t && back.second == l.inverse().key());
        if (is_tree) continue;
        Word w(rank_, prefix[static_cast<std::size_t>(v)]);
        w *= Word(rank_, {l});
        w *= Word(rank_, prefix[static_cast<std::size_t>(t)]).inverse();
        out.push_back(std::move(w));
      }
    }
    return out;
  }

  /// One directed edge per positive-letter transition; basepoint double-circled.
  std::string to_dot(std::string_view name = "subgroup") const {
    std::ostringstream out;
    out << "digraph " << name << " {\n  rankdir=LR;\n  node [shape=circle];\n";
    for (int v = 0; v < vertex_count(); ++v) {
      out << "  " << v << (v == 0 ? " [shape=doublecircle];\n" : ";\n");
    }
    for (int v = 0; v < vertex_count(); ++v) {
      for (int i = 1; i <= rank_; ++i) {
        const int t = target(v, Letter{i, 1});
        if (t != kNone) out << "  " << v << " -> " << t << " [label=\"" << letter_name(rank_, i) << "\"];\n";
      }
    }
    out << "}\n";
    return out.str();
  }

  friend bool operator==(const SubgroupGraph&, const SubgroupGraph&) = default;

  static constexpr int kNone = -1;

  /// Cores and renumbers an arbitrary folded transition table whose basepoint is
  /// `base`. Vertices unreachable from the basepoint are dropped.
  static SubgroupGraph canonical(int rank, std::vector<std::vector<int>> trans, int base) {
    const int width = 2 * rank;
    const int nv = static_cast<int>(trans.size());
    std::vector<bool> alive(static_cast<std::size_t>(nv), true);
    auto degree = [&](int v) {
      int d = 0;
      for (int k = 0; k < width; ++k) d += trans[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)] != kNone;
      return d;
    };
    std::deque<int> prune;
    for (int v = 0; v < nv; ++v) {
      if (v != base && degree(v) <= 1) prune.push_back(v);
    }
    while (!prune.empty()) {
      const int v = prune.front();
      prune.pop_front();
      if (!alive[static_cast<std::size_t>(v)] || degree(v) > 1) continue;
      alive[static_cast<std::size_t>(v)] = false;
      for (int k = 0; k < width; ++k) {
        int& t = trans[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)];
        if (t == kNone) continue;
        trans[static_cast<std::size_t>(t)][static_cast<std::size_t>(k ^ 1)] = kNone;
        if (t != base && degree(t) <= 1) prune.push_back(t);
        t = kNone;
      }
    }
    std::vector<int> number(static_cast<std::size_t>(nv), kNone);
    std::vector<int> order{base};
    number[static_cast<std::size_t>(base)] = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (int k = 0; k < width; ++k) {
        const int t = trans[static_cast<std::size_t>(order[i])][static_cast<std::size_t>(k)];
        if (t != kNone && number[static_cast<std::size_t>(t)] == kNone) {
          number[static_cast<std::size_t>(t)] = static_cast<int>(order.size());
          order.push_back(t);
        }
      }
    }
    SubgroupGraph g(rank);
    g.table_.assign(order.size() * static_cast<std::size_t>(width), kNone);
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (int k = 0; k < width; ++k) {
        const int t = trans[static_cast<std::size_t>(order[i])][static_cast<std::size_t>(k)];
        if (t != kNone) g.table_[i * static_cast<std::size_t>(width) + static_cast<std::size_t>(k)] = number[static_cast<std::size_t>(t)];
      }
    }
    return g;
  }

 private:
  int rank_ = 0;
  std::vector<int> table_;
};

/// Incremental Stallings folding. Words are attached as loops at the basepoint
/// and folded immediately, so `accepts` is exact after every `add`.
class Folder {
 public:
  explicit Folder(int rank) : rank_(rank) { new_vertex(); }

  int rank() const { return rank_; }

  void add(const Word& w) {
    if (w.rank() != rank_) throw RankMismatch(rank_, w.rank());
    if (w.is_identity()) return;
    int v = find(0);
    for (std::size_t i = 0; i < w.length(); ++i) {
      const int next = i + 1 == w.length() ? find(0) : new_vertex();
      link(v, w[i].key(), next);
      drain();
      v = find(next);
    }
  }

  bool accepts(std::span<const Letter> w) const {
    int v = find(0);
    for (Letter l : w) {
      const int t = trans_[static_cast<std::size_t>(v)][static_cast<std::size_t>(l.key())];
      if (t == SubgroupGraph::kNone) return false;
      v = find(t);
    }
    return v == find(0);
  }

  bool accepts(const Word& w) const { return accepts(w.letters()); }

  SubgroupGraph finish() const {
    const int nv = static_cast<int>(parent_.size());
    std::vector<int> id(static_cast<std::size_t>(nv), SubgroupGraph::kNone);
    std::vector<int> reps;
    for (int v = 0; v < nv; ++v) {
      if (find(v) == v) {
        id[static_cast<std::size_t>(v)] = static_cast<int>(reps.size());
        reps.push_back(v);
      }
    }
    std::vector<std::vector<int>> trans(reps.size(), std::vector<int>(static_cast<std::size_t>(2 * rank_), SubgroupGraph::kNone));
    for (std::size_t i = 0; i < reps.size(); ++i) {
      for (int k = 0; k < 2 * rank_; ++k) {
        const int t = trans_[static_cast<std::size_t>(reps[i])][static_cast<std::size_t>(k)];
        if (t != SubgroupGraph::kNone) trans[i][static_cast<std::size_t>(k)] = id[static_cast<std::size_t>(find(t))];
      }
    }
    return SubgroupGraph::canonical(rank_, std::move(trans), id[static_cast<std::size_t>(find(0))]);
  }

 private:
  int new_vertex() {
    parent_.push_back(static_cast<int>(parent_.size()));
    trans_.emplace_back(static_cast<std::size_t>(2 * rank_), SubgroupGraph::kNone);
    return static_cast<int>(parent_.size()) - 1;
  }

  int find(int v) const {
    while (parent_[static_cast<std::size_t>(v)] != v) v = parent_[static_cast<std::size_t>(v)];
    return v;
  }

  int find_compress(int v) {
    int root = find(v);
    while (parent_[static_cast<std::size_t>(v)] != root) {
      int next = parent_[static_cast<std::size_t>(v)];
      parent_[static_cast<std::size_t>(v)] = root;
      v = next;
    }
    return root;
  }

  // Records u --key--> v and its reverse, queueing merges for conflicts.
  void link(int u, int key, int v) {
    u = find_compress(u);
    v = find_compress(v);
    int& fwd = trans_[static_cast<std::size_t>(u)][static_cast<std::size_t>(key)];
    if (fwd == SubgroupGraph::kNone) {
      fwd = v;
    } else if (find_compress(fwd) != v) {
      pending_.emplace_back(find_compress(fwd), v);
    }
    int& rev = trans_[static_cast<std::size_t>(v)][static_cast<std::size_t>(key ^ 1)];
    if (rev == SubgroupGraph::kNone) {
      rev = u;
    } else if (find_compress(rev) != u) {
      pending_.emplace_back(find_compress(rev), u);
    }
  }

  void drain() {
    while (!pending_.empty()) {
      auto [a, b] = pending_.front();
      pending_.pop_front();
      a = find_compress(a);
      b = find_compress(b);
      if (a == b) continue;
      if (b < a) std::swap(a, b);  // keep the smaller id, so the basepoint stays a root
      parent_[static_cast<std::size_t>(b)] = a;
      const std::vector<int> moved = trans_[static_cast<std::size_t>(b)];
      for (int k = 0; k < 2 * rank_; ++k) {
        if (moved[static_cast<std::size_t>(k)] != SubgroupGraph::kNone) link(a, k, moved[static_cast<std::size_t>(k)]);
      }
    }
  }

  int rank_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> trans_;
  std::deque<std::pair<int, int>> pending_;
};

inline SubgroupGraph fold(std::span<const Word> generators, int rank) {
  Folder folder(rank);
  for (const Word& w : generators) folder.add(w);
  return folder.finish();
}

inline SubgroupGraph fold(std::initializer_list<Word> generators, int rank) {
  return fold(std::span<const Word>(generators.begin(), generators.size()), rank);
}

inline bool member(const SubgroupGraph& g, const Word& w) { return g.accepts(w); }
inline int rank(const SubgroupGraph& g) { return g.rank(); }
inline std::vector<Word> basis(const SubgroupGraph& g) { return g.basis(); }

/// Pullback restricted to the component of the basepoint pair: the graph of G ∩ H.
inline SubgroupGraph intersect(const SubgroupGraph& g, const SubgroupGraph& h) {
  if (g.ambient_rank() != h.ambient_rank()) throw RankMismatch(g.ambient_rank(), h.ambient_rank());
  const int n = g.ambient_rank();
  std::map<std::pair<int, int>, int> id{{{0, 0}, 0}};
  std::vector<std::pair<int, int>> pairs{{0, 0}};
  std::vector<std::vector<int>> trans;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    trans.emplace_back(static_cast<std::size_t>(2 * n), SubgroupGraph::kNone);
    const auto [a, b] = pairs[i];
    for (int k = 0; k < 2 * n; ++k) {
      const Letter l = Letter::from_key(k);
      const int ta = g.target(a, l);
      const int tb = h.target(b, l);
      if (ta == SubgroupGraph::kNone || tb == SubgroupGraph::kNone) continue;
      auto [it, inserted] = id.try_emplace({ta, tb}, static_cast<int>(pairs.size()));
      if (inserted) pairs.emplace_back(ta, tb);
      trans[i][static_cast<std::size_t>(k)] = it->second;
    }
  }
  return SubgroupGraph::canonical(n, std::move(trans), 0);
}

/// Mutual membership of bases.
inline bool equal_subgroups(const SubgroupGraph& g, const SubgroupGraph& h) {
  if (g.ambient_rank() != h.ambient_rank()) throw RankMismatch(g.ambient_rank(), h.ambient_rank());
  for (const Word& w : g.basis()) {
    if (!h.accepts(w)) return false;
  }
  for (const Word& w : h.basis()) {
    if (!g.accepts(w)) return false;
  }
  return true;
}

/// Every basis element of `small` lies in `big`.
inline bool contains(const SubgroupGraph& big, const SubgroupGraph& small) {
  for (const Word& w : small.basis()) {
    if (!big.accepts(w)) return false;
  }
  return true;
}

}  // namespace autfix
