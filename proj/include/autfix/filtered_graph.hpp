#pragma once

// Filtered graphs E_1 < ... < E_m with a marking pi_1(G, base) = F_n, edge
// paths, and upper triangular maps f(E_i) = E_i u_i.

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdlib>
#include <deque>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "autfix/automorphism.hpp"
#include "autfix/free_group.hpp"

namespace autfix {

/// A bounded search ran out of room before finding what the theory promises.
class BoundExhausted : public Error {
 public:
  using Error::Error;
};

struct GraphEdge {
  std::string name;
  int tail = 0;
  int head = 0;
};

/// Position of a signed edge step in the order E_1 < Ē_1 < E_2 < Ē_2 < ...
inline int step_key(int s) { return 2 * (std::abs(s) - 1) + (s < 0 ? 1 : 0); }

/// A sequence of signed edge steps (+i for E_i, -i for Ē_i) with its endpoints.
/// Incidence is validated by FilteredGraph::path; the trivial path at v has
/// no steps and start == end == v.
class EdgePath {
 public:
  EdgePath() = default;
  EdgePath(int start, int end, std::vector<int> steps) : start_(start), end_(end), steps_(std::move(steps)) {}

  static EdgePath trivial(int vertex) { return EdgePath(vertex, vertex, {}); }

  int start() const { return start_; }
  int end() const { return end_; }
  const std::vector<int>& steps() const { return steps_; }
  std::size_t length() const { return steps_.size(); }
  bool is_trivial() const { return steps_.empty(); }
  bool is_loop() const { return start_ == end_; }
  int front() const { return steps_.front(); }
  int back() const { return steps_.back(); }
  int operator[](std::size_t i) const { return steps_[i]; }

  EdgePath inverse() const {
    std::vector<int> s(steps_.rbegin(), steps_.rend());
    for (int& v : s) v = -v;
    return EdgePath(end_, start_, std::move(s));
  }

  bool is_reduced() const {
    for (std::size_t i = 0; i + 1 < steps_.size(); ++i) {
      if (steps_[i] == -steps_[i + 1]) return false;
    }
    return true;
  }

  EdgePath reduced() const {
    EdgePath out = trivial(start_);
    out.end_ = end_;
    for (int s : steps_) out.push(s);
    return out;
  }

  /// Concatenation followed by reduction at the junction. Both operands are
  /// expected to be reduced.
  EdgePath& operator*=(const EdgePath& rhs) {
    if (end_ != rhs.start_) throw Error("paths are not composable: end and start vertices differ");
    for (int s : rhs.steps_) push(s);
    end_ = rhs.end_;
    return *this;
  }

  friend EdgePath operator*(EdgePath lhs, const EdgePath& rhs) { return lhs *= rhs; }

  EdgePath pow(int k) const {
    if (!is_loop()) throw Error("only loops have powers");
    EdgePath base = k < 0 ? inverse() : *this;
    EdgePath out = trivial(start_);
    for (int i = 0; i < std::abs(k); ++i) out *= base;
    return out;
  }

  int height() const {
    int h = 0;
    for (int s : steps_) h = std::max(h, std::abs(s));
    return h;
  }

  bool crosses(int edge) const {
    return std::any_of(steps_.begin(), steps_.end(), [edge](int s) { return std::abs(s) == edge; });
  }

  friend bool operator==(const EdgePath&, const EdgePath&) = default;

  /// Length first, then steps in edge order, then start vertex.
  friend std::strong_ordering operator<=>(const EdgePath& a, const EdgePath& b) {
    if (a.steps_.size() != b.steps_.size()) return a.steps_.size() <=> b.steps_.size();
    for (std::size_t i = 0; i < a.steps_.size(); ++i) {
      if (a.steps_[i] != b.steps_[i]) return step_key(a.steps_[i]) <=> step_key(b.steps_[i]);
    }
    if (a.start_ != b.start_) return a.start_ <=> b.start_;
    return a.end_ <=> b.end_;
  }

 private:
  void push(int s) {
    if (!steps_.empty() && steps_.back() == -s) {
      steps_.pop_back();
    } else {
      steps_.push_back(s);
    }
  }

  int start_ = 0;
  int end_ = 0;
  std::vector<int> steps_;
};

class FilteredGraph {
 public:
  FilteredGraph() = default;

  /// `tree` lists the spanning-tree edges (1-based). The remaining edges give
  /// the basis x_1..x_n of pi_1(G, base), in edge order unless `basis` names
  /// them explicitly.
  FilteredGraph(std::vector<std::string> vertex_names, std::vector<GraphEdge> edges, int base,
                std::vector<int> tree, std::vector<int> basis = {})
      : vertex_names_(std::move(vertex_names)), edges_(std::move(edges)), base_(base) {
    const int nv = vertex_count();
    if (nv == 0) throw Error("a filtered graph needs at least one vertex");
    if (base_ < 0 || base_ >= nv) throw Error("base vertex out of range");
    for (const GraphEdge& e : edges_) {
      if (e.tail < 0 || e.tail >= nv || e.head < 0 || e.head >= nv) {
        throw Error("edge " + e.name + " has an endpoint outside the vertex set");
      }
    }
    if (nv > 1) {
      std::vector<bool> touched(static_cast<std::size_t>(nv), false);
      for (const GraphEdge& e : edges_) touched[static_cast<std::size_t>(e.tail)] = touched[static_cast<std::size_t>(e.head)] = true;
      for (int v = 0; v < nv; ++v) {
        if (!touched[static_cast<std::size_t>(v)]) throw Error("vertex " + vertex_names_[static_cast<std::size_t>(v)] + " lies on no edge");
      }
    }
    build_adjacency();
    build_marking(std::move(tree), std::move(basis));
  }

  int vertex_count() const { return static_cast<int>(vertex_names_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int base() const { return base_; }
  /// Rank of pi_1(G), the rank of the marked free group.
  int rank() const { return edge_count() - vertex_count() + 1; }

  const GraphEdge& edge(int i) const { return edges_.at(static_cast<std::size_t>(i - 1)); }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  const std::string& vertex_name(int v) const { return vertex_names_.at(static_cast<std::size_t>(v)); }
  const std::vector<std::string>& vertex_names() const { return vertex_names_; }

  /// Vertex a signed step leaves from / arrives at.
  int source(int step) const { return step > 0 ? edge(step).tail : edge(-step).head; }
  int target(int step) const { return step > 0 ? edge(step).head : edge(-step).tail; }

  /// Signed steps leaving `v`, in edge order.
  const std::vector<int>& out_steps(int v) const { return out_.at(static_cast<std::size_t>(v)); }

  std::optional<int> find_edge(std::string_view name) const {
    for (int i = 1; i <= edge_count(); ++i) {
      if (edge(i).name == name) return i;
    }
    return std::nullopt;
  }

  std::optional<int> find_vertex(std::string_view name) const {
    for (int v = 0; v < vertex_count(); ++v) {
      if (vertex_names_[static_cast<std::size_t>(v)] == name) return v;
    }
    return std::nullopt;
  }

  /// Validates incidence; does not reduce.
  EdgePath path(int start, std::vector<int> steps) const {
    int v = start;
    for (int s : steps) {
      if (s == 0 || std::abs(s) > edge_count()) throw Error("edge index out of range");
      if (source(s) != v) throw Error("path is not incident at " + step_name(s));
      v = target(s);
    }
    return EdgePath(start, v, std::move(steps));
  }

  EdgePath edge_path(int step) const { return path(source(step), {step}); }

  std::string step_name(int s) const {
    std::string n = edge(std::abs(s)).name;
    return s > 0 ? n : n + "^-1";
  }

  std::string to_string(const EdgePath& p) const {
    if (p.is_trivial()) return "1";
    std::string out;
    for (std::size_t i = 0; i < p.length(); ++i) {
      if (i > 0) out += ' ';
      out += step_name(p[i]);
    }
    return out;
  }

  /// Parses edge names separated by whitespace, each optionally followed by
  /// `^k`. `1` is the trivial path at `start`, which is then required.
  EdgePath parse_path(std::string_view text, std::optional<int> start = std::nullopt) const {
    std::vector<int> steps;
    std::vector<std::size_t> columns;
    std::size_t i = 0;
    bool identity = false;
    while (i < text.size()) {
      if (std::isspace(static_cast<unsigned char>(text[i]))) {
        ++i;
        continue;
      }
      const std::size_t tok = i;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '^') ++i;
      std::string name(text.substr(tok, i - tok));
      int exponent = 1;
      if (i < text.size() && text[i] == '^') {
        const std::size_t num = ++i;
        if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
        const std::size_t digits = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (digits == i) throw ParseError("expected an integer exponent", 0, static_cast<int>(num + 1));
        exponent = std::stoi(std::string(text.substr(num, i - num)));
      }
      if (name == "1") {
        identity = true;
        continue;
      }
      auto e = find_edge(name);
      if (!e) throw ParseError("unknown edge '" + name + "'", 0, static_cast<int>(tok + 1));
      for (int k = 0; k < std::abs(exponent); ++k) {
        steps.push_back(exponent < 0 ? -*e : *e);
        columns.push_back(tok);
      }
    }
    if (steps.empty()) {
      if (!identity) throw ParseError("empty path", 0, static_cast<int>(text.size()));
      if (!start) throw ParseError("the trivial path needs a known vertex", 0, 1);
      return EdgePath::trivial(*start);
    }
    const int first = start.value_or(source(steps.front()));
    int v = first;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      if (source(steps[k]) != v) {
        throw ParseError("edge " + step_name(steps[k]) + " does not start at " + vertex_name(v), 0, static_cast<int>(columns[k] + 1));
      }
      v = target(steps[k]);
    }
    return path(first, std::move(steps)).reduced();
  }

  // --- marking ------------------------------------------------------------

  /// Word read along a path. Restricted to loops at the base this is the
  /// marking isomorphism pi_1(G, base) -> F_rank.
  Word read(const EdgePath& p) const {
    Word out(rank());
    for (int s : p.steps()) {
      const Word& w = edge_words_[static_cast<std::size_t>(std::abs(s) - 1)];
      out *= s > 0 ? w : w.inverse();
    }
    return out;
  }

  /// Inverse of the marking: the reduced loop at the base reading to `w`.
  EdgePath loop_of(const Word& w) const {
    if (w.rank() != rank()) throw RankMismatch(rank(), w.rank());
    EdgePath out = EdgePath::trivial(base_);
    for (Letter l : w.letters()) {
      const EdgePath& loop = basis_loops_[static_cast<std::size_t>(l.index - 1)];
      out *= l.sign > 0 ? loop : loop.inverse();
    }
    return out;
  }

  const std::vector<Word>& edge_words() const { return edge_words_; }
  const std::vector<EdgePath>& basis_loops() const { return basis_loops_; }

  /// The same graph with E_r re-attached to end at `head`; used by sliding.
  FilteredGraph with_head(int r, int head, Word edge_word, std::vector<EdgePath> basis_loops) const {
    FilteredGraph g = *this;
    g.edges_[static_cast<std::size_t>(r - 1)].head = head;
    g.edge_words_[static_cast<std::size_t>(r - 1)] = std::move(edge_word);
    g.basis_loops_ = std::move(basis_loops);
    g.build_adjacency();
    return g;
  }

  /// Edges coloured by height on a blue-to-red ramp; base double-circled.
  std::string to_dot(std::string_view name = "G") const {
    std::ostringstream out;
    out << "digraph " << name << " {\n  node [shape=circle];\n";
    for (int v = 0; v < vertex_count(); ++v) {
      out << "  \"" << vertex_name(v) << "\"" << (v == base_ ? " [shape=doublecircle]" : "") << ";\n";
    }
    const int m = std::max(1, edge_count() - 1);
    for (int i = 1; i <= edge_count(); ++i) {
      const double hue = 0.66 * (1.0 - static_cast<double>(i - 1) / m);
      out << "  \"" << vertex_name(edge(i).tail) << "\" -> \"" << vertex_name(edge(i).head) << "\" [label=\""
          << edge(i).name << "\", color=\"" << hue << " 0.9 0.8\"];\n";
    }
    out << "}\n";
    return out.str();
  }

  friend bool operator==(const FilteredGraph& a, const FilteredGraph& b) {
    if (a.vertex_names_ != b.vertex_names_ || a.base_ != b.base_ || a.edges_.size() != b.edges_.size()) return false;
    for (std::size_t i = 0; i < a.edges_.size(); ++i) {
      if (a.edges_[i].name != b.edges_[i].name || a.edges_[i].tail != b.edges_[i].tail || a.edges_[i].head != b.edges_[i].head) return false;
    }
    return a.edge_words_ == b.edge_words_ && a.basis_loops_ == b.basis_loops_;
  }

 private:
  void build_adjacency() {
    out_.assign(static_cast<std::size_t>(vertex_count()), {});
    for (int i = 1; i <= edge_count(); ++i) {
      out_[static_cast<std::size_t>(edge(i).tail)].push_back(i);
      out_[static_cast<std::size_t>(edge(i).head)].push_back(-i);
    }
    for (auto& steps : out_) std::sort(steps.begin(), steps.end(), [](int a, int b) { return step_key(a) < step_key(b); });
  }

  void build_marking(std::vector<int> tree, std::vector<int> basis) {
    const int nv = vertex_count();
    const int m = edge_count();
    std::vector<bool> in_tree(static_cast<std::size_t>(m + 1), false);
    for (int e : tree) {
      if (e < 1 || e > m) throw Error("tree edge out of range");
      if (in_tree[static_cast<std::size_t>(e)]) throw Error("tree edge " + edge(e).name + " listed twice");
      in_tree[static_cast<std::size_t>(e)] = true;
    }
    if (static_cast<int>(tree.size()) != nv - 1) {
      throw Error("a spanning tree needs " + std::to_string(nv - 1) + " edges, got " + std::to_string(tree.size()));
    }
    // Tree path from the base to every vertex.
    std::vector<std::optional<EdgePath>> to(static_cast<std::size_t>(nv));
    to[static_cast<std::size_t>(base_)] = EdgePath::trivial(base_);
    std::deque<int> queue{base_};
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (int s : out_steps(v)) {
        if (!in_tree[static_cast<std::size_t>(std::abs(s))]) continue;
        const int t = target(s);
        if (to[static_cast<std::size_t>(t)]) continue;
        to[static_cast<std::size_t>(t)] = *to[static_cast<std::size_t>(v)] * edge_path(s);
        queue.push_back(t);
      }
    }
    for (int v = 0; v < nv; ++v) {
      if (!to[static_cast<std::size_t>(v)]) throw Error("tree does not span the graph; " + vertex_name(v) + " is unreachable");
    }
    if (basis.empty()) {
      for (int e = 1; e <= m; ++e) {
        if (!in_tree[static_cast<std::size_t>(e)]) basis.push_back(e);
      }
    }
    if (static_cast<int>(basis.size()) != rank()) throw Error("basis must list every non-tree edge exactly once");
    std::vector<bool> used(static_cast<std::size_t>(m + 1), false);
    edge_words_.assign(static_cast<std::size_t>(m), Word(rank()));
    basis_loops_.clear();
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const int e = basis[j];
      if (e < 1 || e > m || in_tree[static_cast<std::size_t>(e)] || used[static_cast<std::size_t>(e)]) {
        throw Error("basis must list every non-tree edge exactly once");
      }
      used[static_cast<std::size_t>(e)] = true;
      edge_words_[static_cast<std::size_t>(e - 1)] = Word::generator(rank(), static_cast<int>(j) + 1);
      basis_loops_.push_back(*to[static_cast<std::size_t>(edge(e).tail)] * edge_path(e) *
                             to[static_cast<std::size_t>(edge(e).head)]->inverse());
    }
  }

  std::vector<std::string> vertex_names_;
  std::vector<GraphEdge> edges_;
  int base_ = 0;
  std::vector<std::vector<int>> out_;
  std::vector<Word> edge_words_;
  std::vector<EdgePath> basis_loops_;
};

/// One vertex with a loop per name; the marking sends the i-th loop to x_i.
inline FilteredGraph rose(const std::vector<std::string>& edge_names) {
  std::vector<GraphEdge> edges;
  for (const std::string& n : edge_names) edges.push_back({n, 0, 0});
  return FilteredGraph({"v"}, std::move(edges), 0, {});
}

/// f(E_i) = E_i u_i with u_i a reduced loop at the head of E_i of height < i.
/// Every vertex is fixed.
class UpperTriangularMap {
 public:
  UpperTriangularMap() = default;

  UpperTriangularMap(const FilteredGraph& g, std::vector<EdgePath> suffixes) : suffixes_(std::move(suffixes)) {
    if (static_cast<int>(suffixes_.size()) != g.edge_count()) throw Error("an upper triangular map needs one suffix per edge");
    for (int i = 1; i <= g.edge_count(); ++i) {
      tails_.push_back(g.edge(i).tail);
      const EdgePath& u = suffixes_[static_cast<std::size_t>(i - 1)];
      const std::string name = g.edge(i).name;
      if (u.start() != g.edge(i).head || u.end() != g.edge(i).head) {
        throw Error("suffix of " + name + " must be a loop at " + g.vertex_name(g.edge(i).head) + " (vertices are fixed)");
      }
      if (!u.is_reduced()) throw Error("suffix of " + name + " is not reduced");
      if (u.height() >= i) throw Error("suffix of " + name + " has height " + std::to_string(u.height()) + "; upper triangular needs height < " + std::to_string(i));
    }
  }

  static UpperTriangularMap identity(const FilteredGraph& g) {
    std::vector<EdgePath> s;
    for (int i = 1; i <= g.edge_count(); ++i) s.push_back(EdgePath::trivial(g.edge(i).head));
    return UpperTriangularMap(g, std::move(s));
  }

  /// Builds the map from full edge images. An image must be E_i followed by
  /// a loop; a nontrivial prefix is rejected rather than subdivided away.
  static UpperTriangularMap from_images(const FilteredGraph& g, const std::vector<EdgePath>& images) {
    std::vector<EdgePath> s;
    for (int i = 1; i <= g.edge_count(); ++i) {
      const EdgePath img = images.at(static_cast<std::size_t>(i - 1)).reduced();
      if (img.is_trivial() || img.front() != i) {
        throw Error("image of " + g.edge(i).name + " must begin with " + g.edge(i).name +
                    "; a nontrivial prefix needs the edge to be subdivided first");
      }
      std::vector<int> rest(img.steps().begin() + 1, img.steps().end());
      s.push_back(g.path(g.edge(i).head, std::move(rest)));
    }
    return UpperTriangularMap(g, std::move(s));
  }

  int edge_count() const { return static_cast<int>(suffixes_.size()); }
  const EdgePath& suffix(int i) const { return suffixes_.at(static_cast<std::size_t>(i - 1)); }
  const std::vector<EdgePath>& suffixes() const { return suffixes_; }

  bool is_identity() const {
    return std::all_of(suffixes_.begin(), suffixes_.end(), [](const EdgePath& u) { return u.is_trivial(); });
  }

  /// f(α)_#. Works on any incident path; the result is reduced.
  EdgePath apply(const EdgePath& a) const {
    EdgePath out = EdgePath::trivial(a.start());
    for (int s : a.steps()) {
      const EdgePath& u = suffix(std::abs(s));
      if (s > 0) {
        out *= EdgePath(out.end(), u.start(), {s});
        out *= u;
      } else {
        out *= u.inverse();
        out *= EdgePath(u.start(), tails_[static_cast<std::size_t>(-s - 1)], {s});
      }
    }
    return out;
  }

  EdgePath operator()(const EdgePath& a) const { return apply(a); }

  friend bool operator==(const UpperTriangularMap&, const UpperTriangularMap&) = default;

 private:
  std::vector<EdgePath> suffixes_;
  std::vector<int> tails_;
};

/// Applies f to a reduced path; unreduced input is rejected.
inline EdgePath apply_path(const UpperTriangularMap& f, const EdgePath& a) {
  if (!a.is_reduced()) throw Error("apply_path expects a reduced path");
  return f.apply(a);
}

/// f∘h, h first: the suffix of E_i is (u_i f(v_i))_#.
inline UpperTriangularMap compose(const FilteredGraph& g, const UpperTriangularMap& f, const UpperTriangularMap& h) {
  std::vector<EdgePath> s;
  for (int i = 1; i <= g.edge_count(); ++i) s.push_back(f.suffix(i) * f.apply(h.suffix(i)));
  return UpperTriangularMap(g, std::move(s));
}

inline UpperTriangularMap power(const FilteredGraph& g, const UpperTriangularMap& f, int k) {
  if (k < 0) throw std::invalid_argument("negative power of a graph map");
  UpperTriangularMap out = UpperTriangularMap::identity(g);
  for (int i = 0; i < k; ++i) out = compose(g, f, out);
  return out;
}

/// x_i ↦ p̄ f(ℓ_i) p read through the marking, ℓ_i the basis loops.
inline Automorphism marked_automorphism(const FilteredGraph& g, const UpperTriangularMap& f, const EdgePath& p) {
  if (p.start() != g.base() || p.end() != g.base()) throw Error("marked_automorphism needs a loop at the base vertex");
  std::vector<Word> images;
  for (const EdgePath& loop : g.basis_loops()) images.push_back(g.read(p.inverse() * f.apply(loop) * p));
  return Automorphism(std::move(images));
}

inline Automorphism marked_automorphism(const FilteredGraph& g, const UpperTriangularMap& f) {
  return marked_automorphism(g, f, EdgePath::trivial(g.base()));
}

/// Edge-to-path substitution between two graphs on the same vertex set that
/// fixes vertices, such as the homotopy equivalence of a slide.
class EdgeSubstitution {
 public:
  EdgeSubstitution() = default;
  explicit EdgeSubstitution(std::vector<EdgePath> images) : images_(std::move(images)) {}

  static EdgeSubstitution identity(const FilteredGraph& g) {
    std::vector<EdgePath> images;
    for (int i = 1; i <= g.edge_count(); ++i) images.push_back(g.edge_path(i));
    return EdgeSubstitution(std::move(images));
  }

  const EdgePath& image(int i) const { return images_.at(static_cast<std::size_t>(i - 1)); }
  const std::vector<EdgePath>& images() const { return images_; }

  EdgePath apply(const EdgePath& a) const {
    EdgePath out = EdgePath::trivial(a.start());
    for (int s : a.steps()) out *= s > 0 ? image(s) : image(-s).inverse();
    return out;
  }

  /// this∘first: `first` is applied first.
  EdgeSubstitution after(const EdgeSubstitution& first) const {
    std::vector<EdgePath> images;
    for (const EdgePath& p : first.images_) images.push_back(apply(p));
    return EdgeSubstitution(std::move(images));
  }

  friend bool operator==(const EdgeSubstitution&, const EdgeSubstitution&) = default;

 private:
  std::vector<EdgePath> images_;
};

}  // namespace autfix
