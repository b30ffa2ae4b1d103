#pragma once

// Input documents:
//
//   autfix-format 1
//   # comment
//   aut phi:
//     x -> x
//     y -> y x
//     inverse:            (optional; checked)
//       x -> x
//       y -> y X
//   subgroup K rank 2:
//     x y, y^2
//   graph G:
//     vertices v w
//     E1: v -> v
//     E2: v -> w
//     E3: w -> v
//     base v
//     tree E2
//     f E3 = E3 E2^-1 E1 E2
//
// Graph maps are named by their first token and listed in order of first
// appearance; edges a map does not mention are fixed.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "autfix/automorphism.hpp"
#include "autfix/filtered_graph.hpp"

namespace autfix {

struct NamedAutomorphism {
  std::string name;
  Automorphism aut;
  int line = 0;
};

struct NamedSubgroup {
  std::string name;
  int rank = 0;
  std::vector<Word> generators;
  int line = 0;
};

struct NamedMap {
  std::string name;
  UpperTriangularMap map;
};

struct NamedGraph {
  std::string name;
  FilteredGraph graph;
  std::vector<NamedMap> maps;
  int line = 0;
};

struct Document {
  std::vector<NamedAutomorphism> automorphisms;
  std::vector<NamedSubgroup> subgroups;
  std::vector<NamedGraph> graphs;

  const NamedAutomorphism* find_automorphism(std::string_view name) const {
    for (const auto& a : automorphisms) {
      if (a.name == name) return &a;
    }
    return nullptr;
  }
};

namespace detail {

struct SourceLine {
  int number = 0;
  std::string text;  ///< comment stripped
  std::size_t indent = 0;
};

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool is_name(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; });
}

/// Whitespace- or comma-separated tokens with their 1-based columns.
inline std::vector<std::pair<std::string, int>> tokens(const SourceLine& l, std::size_t from = 0) {
  std::vector<std::pair<std::string, int>> out;
  std::size_t i = from;
  const std::string& t = l.text;
  while (i < t.size()) {
    if (std::isspace(static_cast<unsigned char>(t[i])) || t[i] == ',') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < t.size() && !std::isspace(static_cast<unsigned char>(t[i])) && t[i] != ',') ++i;
    out.emplace_back(t.substr(start, i - start), static_cast<int>(start) + 1);
  }
  return out;
}

/// Reruns a column-only parser and moves its error to (line, offset + column).
template <class F>
auto located(int line, std::size_t offset, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw ParseError(e.message(), line, static_cast<int>(offset) + std::max(e.column(), 1));
  } catch (const Error& e) {
    throw ParseError(e.what(), line, static_cast<int>(offset) + 1);
  }
}

/// x, y, z or aN; 0 if the token is neither.
inline int letter_index(std::string_view tok) {
  if (tok.size() == 1 && tok[0] >= 'x' && tok[0] <= 'z') return tok[0] - 'x' + 1;
  if (tok.size() >= 2 && tok[0] == 'a' && std::all_of(tok.begin() + 1, tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    return std::stoi(std::string(tok.substr(1)));
  }
  return 0;
}

struct ImageLine {
  int index;
  std::size_t rhs;  ///< offset of the right-hand side in the line
  const SourceLine* line;
};

inline std::vector<Word> images_of(const std::vector<ImageLine>& lines, int rank, const SourceLine& header, const char* what) {
  std::vector<std::optional<Word>> out(static_cast<std::size_t>(rank));
  for (const ImageLine& il : lines) {
    if (rank > 3 && il.index <= 3 && il.line->text.find_first_of("xyz") < il.rhs) {
      throw ParseError("letters x, y, z are only defined up to rank 3", il.line->number, static_cast<int>(il.line->indent) + 1);
    }
    if (il.index < 1 || il.index > rank) {
      throw ParseError(std::string(what) + " has " + std::to_string(rank) + " lines, so its letters are " + letter_name(rank, 1) +
                           ".." + letter_name(rank, rank),
                       il.line->number, static_cast<int>(il.line->indent) + 1);
    }
    auto& slot = out[static_cast<std::size_t>(il.index - 1)];
    if (slot) throw ParseError("letter " + letter_name(rank, il.index) + " given twice", il.line->number, static_cast<int>(il.line->indent) + 1);
    slot = located(il.line->number, il.rhs, [&] { return parse_word(std::string_view(il.line->text).substr(il.rhs), rank); });
  }
  std::vector<Word> words;
  for (auto& w : out) {
    if (!w) throw ParseError(std::string(what) + " does not give an image for every letter", header.number, 1);
    words.push_back(*w);
  }
  return words;
}

class Parser {
 public:
  explicit Parser(std::string_view text) {
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t nl = text.find('\n', pos);
      std::string line(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
      ++number;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
      if (!trim(line).empty()) {
        const std::size_t indent = line.find_first_not_of(" \t");
        lines_.push_back({number, line, indent});
      }
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
  }

  Document parse() {
    if (lines_.empty()) throw ParseError("empty document; expected 'autfix-format 1'", 1, 1);
    const auto head = tokens(lines_[0]);
    if (head.size() != 2 || head[0].first != "autfix-format") {
      throw ParseError("expected header 'autfix-format 1'", lines_[0].number, static_cast<int>(lines_[0].indent) + 1);
    }
    if (head[1].first != "1") throw ParseError("unsupported format version " + head[1].first, lines_[0].number, head[1].second);
    std::size_t i = 1;
    while (i < lines_.size()) {
      const SourceLine& l = lines_[i];
      const std::size_t end = block_end(i);
      const auto toks = tokens(l);
      const std::string& kw = toks[0].first;
      if (l.text.back() != ':' || (kw != "aut" && kw != "subgroup" && kw != "graph")) {
        throw ParseError("expected a block header 'aut NAME:', 'subgroup NAME rank N:' or 'graph NAME:'", l.number, static_cast<int>(l.indent) + 1);
      }
      if (kw == "aut") parse_aut(i, end);
      if (kw == "subgroup") parse_subgroup(i, end);
      if (kw == "graph") parse_graph(i, end);
      i = end;
    }
    return std::move(doc_);
  }

 private:
  /// A block runs until the next line that starts in column 1.
  std::size_t block_end(std::size_t header) const {
    std::size_t j = header + 1;
    while (j < lines_.size() && lines_[j].indent > 0) ++j;
    return j;
  }

  std::string header_name(const SourceLine& l, std::size_t expected_tokens) {
    std::string body = l.text.substr(0, l.text.size() - 1);
    SourceLine copy{l.number, body, l.indent};
    const auto toks = tokens(copy);
    if (toks.size() != expected_tokens || toks.size() < 2 || !is_name(toks[1].first)) {
      throw ParseError("malformed block header", l.number, static_cast<int>(l.indent) + 1);
    }
    const std::string& name = toks[1].first;
    if (!names_.emplace(name, l.number).second) {
      throw ParseError("name '" + name + "' already defined on line " + std::to_string(names_[name]), l.number, toks[1].second);
    }
    return name;
  }

  void parse_aut(std::size_t header, std::size_t end) {
    const SourceLine& h = lines_[header];
    const std::string name = header_name(h, 2);
    std::vector<ImageLine> forward;
    std::vector<ImageLine> backward;
    std::vector<ImageLine>* into = &forward;
    const SourceLine* inverse_header = nullptr;
    for (std::size_t j = header + 1; j < end; ++j) {
      const SourceLine& l = lines_[j];
      if (trim(l.text) == "inverse:") {
        if (inverse_header) throw ParseError("second 'inverse:' section", l.number, static_cast<int>(l.indent) + 1);
        inverse_header = &l;
        into = &backward;
        continue;
      }
      const std::size_t arrow = l.text.find("->");
      if (arrow == std::string::npos) throw ParseError("expected 'LETTER -> WORD'", l.number, static_cast<int>(l.indent) + 1);
      const std::string lhs(trim(std::string_view(l.text).substr(0, arrow)));
      const int index = letter_index(lhs);
      if (index == 0) throw ParseError("'" + lhs + "' is not a basis letter", l.number, static_cast<int>(l.indent) + 1);
      into->push_back({index, arrow + 2, &l});
    }
    if (forward.empty()) throw ParseError("automorphism '" + name + "' has no images", h.number, 1);
    const int rank = static_cast<int>(forward.size());
    std::vector<Word> images = images_of(forward, rank, h, "automorphism");
    if (!inverse_header) {
      doc_.automorphisms.push_back({name, Automorphism(std::move(images)), h.number});
      return;
    }
    if (static_cast<int>(backward.size()) != rank) {
      throw ParseError("inverse has " + std::to_string(backward.size()) + " lines, expected " + std::to_string(rank),
                       inverse_header->number, static_cast<int>(inverse_header->indent) + 1);
    }
    std::vector<Word> inverse = images_of(backward, rank, *inverse_header, "inverse");
    Automorphism a = located(inverse_header->number, inverse_header->indent, [&] { return Automorphism(images, inverse); });
    doc_.automorphisms.push_back({name, std::move(a), h.number});
  }

  void parse_subgroup(std::size_t header, std::size_t end) {
    const SourceLine& h = lines_[header];
    const std::string name = header_name(h, 4);
    const auto toks = tokens(h);
    if (toks[2].first != "rank") throw ParseError("expected 'subgroup NAME rank N:'", h.number, toks[2].second);
    std::string r = toks[3].first;
    r.pop_back();
    if (r.empty() || !std::all_of(r.begin(), r.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      throw ParseError("ambient rank must be a non-negative integer", h.number, toks[3].second);
    }
    NamedSubgroup s{name, std::stoi(r), {}, h.number};
    for (std::size_t j = header + 1; j < end; ++j) {
      const SourceLine& l = lines_[j];
      auto words = located(l.number, 0, [&] { return parse_word_list(l.text, s.rank); });
      s.generators.insert(s.generators.end(), words.begin(), words.end());
    }
    doc_.subgroups.push_back(std::move(s));
  }

  void parse_graph(std::size_t header, std::size_t end) {
    const SourceLine& h = lines_[header];
    const std::string name = header_name(h, 2);
    std::vector<std::string> vertices;
    bool declared = false;
    struct EdgeLine {
      std::string name, tail, head;
      const SourceLine* line;
    };
    struct MapLine {
      std::string map, edge;
      std::size_t rhs;
      const SourceLine* line;
    };
    std::vector<EdgeLine> edges;
    std::vector<MapLine> maps;
    std::optional<std::pair<std::string, const SourceLine*>> base;
    std::optional<std::pair<std::vector<std::pair<std::string, int>>, const SourceLine*>> tree;
    std::optional<std::pair<std::vector<std::pair<std::string, int>>, const SourceLine*>> basis;

    for (std::size_t j = header + 1; j < end; ++j) {
      const SourceLine& l = lines_[j];
      const auto toks = tokens(l);
      const std::string& kw = toks[0].first;
      const int col = static_cast<int>(l.indent) + 1;
      if (kw == "vertices") {
        if (declared) throw ParseError("second 'vertices' line", l.number, col);
        declared = true;
        for (std::size_t t = 1; t < toks.size(); ++t) {
          if (!is_name(toks[t].first)) throw ParseError("bad vertex name '" + toks[t].first + "'", l.number, toks[t].second);
          if (std::find(vertices.begin(), vertices.end(), toks[t].first) != vertices.end()) {
            throw ParseError("vertex " + toks[t].first + " listed twice", l.number, toks[t].second);
          }
          vertices.push_back(toks[t].first);
        }
      } else if (kw == "base") {
        if (toks.size() != 2) throw ParseError("expected 'base VERTEX'", l.number, col);
        base = {toks[1].first, &l};
      } else if (kw == "tree" || kw == "basis") {
        auto& slot = kw == "tree" ? tree : basis;
        if (slot) throw ParseError("second '" + kw + "' line", l.number, col);
        slot = {std::vector<std::pair<std::string, int>>(toks.begin() + 1, toks.end()), &l};
      } else if (auto colon = l.text.find(':'); colon != std::string::npos && l.text.find('=') == std::string::npos) {
        const std::string ename(trim(std::string_view(l.text).substr(0, colon)));
        if (!is_name(ename)) throw ParseError("bad edge name '" + ename + "'", l.number, col);
        const std::string rest(l.text.substr(colon + 1));
        const auto arrow = rest.find("->");
        if (arrow == std::string::npos) throw ParseError("expected 'EDGE: TAIL -> HEAD'", l.number, static_cast<int>(colon) + 2);
        edges.push_back({ename, std::string(trim(std::string_view(rest).substr(0, arrow))),
                         std::string(trim(std::string_view(rest).substr(arrow + 2))), &l});
      } else if (auto eq = l.text.find('='); eq != std::string::npos) {
        if (toks.size() < 3 || !is_name(toks[0].first) || toks[2].first != "=" ) {
          throw ParseError("expected 'MAP EDGE = PATH'", l.number, col);
        }
        maps.push_back({toks[0].first, toks[1].first, eq + 1, &l});
      } else {
        throw ParseError("unrecognized graph line", l.number, col);
      }
    }
    if (edges.empty()) throw ParseError("graph '" + name + "' has no edges", h.number, 1);
    if (!declared) {
      for (const EdgeLine& e : edges) {
        for (const std::string* v : {&e.tail, &e.head}) {
          if (std::find(vertices.begin(), vertices.end(), *v) == vertices.end()) vertices.push_back(*v);
        }
      }
    }
    auto vertex = [&](const std::string& v, const SourceLine& l) {
      auto it = std::find(vertices.begin(), vertices.end(), v);
      if (it == vertices.end()) throw ParseError("unknown vertex '" + v + "'", l.number, static_cast<int>(l.indent) + 1);
      return static_cast<int>(it - vertices.begin());
    };
    std::vector<GraphEdge> gedges;
    for (const EdgeLine& e : edges) {
      for (const GraphEdge& g : gedges) {
        if (g.name == e.name) throw ParseError("edge " + e.name + " defined twice", e.line->number, static_cast<int>(e.line->indent) + 1);
      }
      gedges.push_back({e.name, vertex(e.tail, *e.line), vertex(e.head, *e.line)});
    }
    auto edge_index = [&](const std::pair<std::string, int>& tok, const SourceLine& l) {
      for (std::size_t k = 0; k < gedges.size(); ++k) {
        if (gedges[k].name == tok.first) return static_cast<int>(k) + 1;
      }
      throw ParseError("unknown edge '" + tok.first + "'", l.number, tok.second);
    };
    const int b = base ? vertex(base->first, *base->second) : 0;
    std::vector<int> tree_edges;
    std::vector<int> basis_edges;
    if (tree) {
      for (const auto& t : tree->first) tree_edges.push_back(edge_index(t, *tree->second));
    }
    if (basis) {
      for (const auto& t : basis->first) basis_edges.push_back(edge_index(t, *basis->second));
    }
    const SourceLine& where = tree ? *tree->second : h;
    FilteredGraph G = located(where.number, where.indent, [&] {
      return FilteredGraph(vertices, gedges, b, tree_edges, basis_edges);
    });

    NamedGraph out{name, G, {}, h.number};
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::optional<std::pair<EdgePath, const SourceLine*>>>> images;
    for (const MapLine& m : maps) {
      if (!images.count(m.map)) {
        if (m.map == "vertices" || m.map == "base" || m.map == "tree" || m.map == "basis") {
          throw ParseError("'" + m.map + "' cannot name a map", m.line->number, static_cast<int>(m.line->indent) + 1);
        }
        order.push_back(m.map);
        images[m.map].resize(static_cast<std::size_t>(G.edge_count()));
      }
      const auto toks = tokens(*m.line);
      const int e = edge_index(toks[1], *m.line);
      auto& slot = images[m.map][static_cast<std::size_t>(e - 1)];
      if (slot) throw ParseError("image of " + m.edge + " under " + m.map + " given twice", m.line->number, toks[1].second);
      EdgePath p = located(m.line->number, m.rhs, [&] {
        return G.parse_path(std::string_view(m.line->text).substr(m.rhs), G.edge(e).tail);
      });
      slot = {std::move(p), m.line};
    }
    for (const std::string& mname : order) {
      std::vector<EdgePath> suffixes;
      for (int e = 1; e <= G.edge_count(); ++e) {
        const auto& slot = images[mname][static_cast<std::size_t>(e - 1)];
        if (!slot) {
          suffixes.push_back(EdgePath::trivial(G.edge(e).head));
          continue;
        }
        const SourceLine& l = *slot->second;
        const EdgePath& img = slot->first;
        if (img.is_trivial() || img.front() != e) {
          throw ParseError("image of " + G.edge(e).name + " must begin with " + G.edge(e).name +
                               "; a nontrivial prefix needs the edge to be subdivided first",
                           l.number, static_cast<int>(l.indent) + 1);
        }
        suffixes.push_back(G.path(G.edge(e).head, std::vector<int>(img.steps().begin() + 1, img.steps().end())));
      }
      const SourceLine* first = nullptr;
      for (const MapLine& m : maps) {
        if (m.map == mname && !first) first = m.line;
      }
      UpperTriangularMap f = located(first->number, first->indent, [&] { return UpperTriangularMap(G, suffixes); });
      out.maps.push_back({mname, std::move(f)});
    }
    doc_.graphs.push_back(std::move(out));
  }

  std::vector<SourceLine> lines_;
  std::map<std::string, int> names_;
  Document doc_;
};

}  // namespace detail

inline Document parse_document(std::string_view text) { return detail::Parser(text).parse(); }

}  // namespace autfix
