#pragma once

// Slow reference implementations used to cross-check the library. They work on
// plain integer sequences (+i for x_i, -i for its inverse) and share no code
// with autfix beyond the conversions at the boundary.

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <vector>

#include "autfix/free_group.hpp"

namespace oracle {

using Seq = std::vector<int>;

/// Repeatedly deletes the first cancelling pair until none remain.
inline Seq naive_reduce(Seq s) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (s[i] == -s[i + 1]) {
        s.erase(s.begin() + static_cast<long>(i), s.begin() + static_cast<long>(i) + 2);
        changed = true;
        break;
      }
    }
  }
  return s;
}

inline Seq mul(const Seq& a, const Seq& b) {
  Seq s = a;
  s.insert(s.end(), b.begin(), b.end());
  return naive_reduce(s);
}

inline Seq inv(const Seq& a) {
  Seq s(a.rbegin(), a.rend());
  for (int& v : s) v = -v;
  return s;
}

inline Seq to_seq(const autfix::Word& w) {
  Seq s;
  for (auto l : w.letters()) s.push_back(l.sign * l.index);
  return s;
}

inline autfix::Word to_word(const Seq& s, int rank) {
  std::vector<autfix::Letter> raw;
  for (int v : s) raw.push_back({std::abs(v), v > 0 ? 1 : -1});
  return autfix::Word(rank, raw);
}

/// Every reduced sequence of length at most `len`, by filtering all sequences.
inline std::vector<Seq> all_reduced(int rank, int len) {
  std::vector<Seq> out{{}};
  std::vector<Seq> frontier{{}};
  for (int d = 1; d <= len; ++d) {
    std::vector<Seq> next;
    for (const Seq& s : frontier) {
      for (int i = -rank; i <= rank; ++i) {
        if (i == 0) continue;
        Seq t = s;
        t.push_back(i);
        if (naive_reduce(t).size() == t.size()) next.push_back(t);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

/// Substitution of images into a sequence.
inline Seq substitute(const std::vector<Seq>& images, const Seq& s) {
  Seq out;
  for (int v : s) {
    const Seq& img = images[static_cast<std::size_t>(std::abs(v) - 1)];
    Seq piece = v > 0 ? img : inv(img);
    out.insert(out.end(), piece.begin(), piece.end());
  }
  return naive_reduce(out);
}

/// All elements of length at most `max_len` reachable as products of at most
/// `factors` generators or their inverses.
inline std::set<Seq> products(const std::vector<Seq>& gens, int factors, std::size_t max_len) {
  std::set<Seq> out{{}};
  std::set<Seq> frontier{{}};
  for (int d = 0; d < factors; ++d) {
    std::set<Seq> next;
    for (const Seq& s : frontier) {
      for (const Seq& g : gens) {
        for (const Seq& h : {g, inv(g)}) {
          Seq t = mul(s, h);
          if (!out.count(t)) next.insert(t);
        }
      }
    }
    for (const Seq& s : next) out.insert(s);
    frontier = std::move(next);
  }
  std::set<Seq> bounded;
  for (const Seq& s : out) {
    if (s.size() <= max_len) bounded.insert(s);
  }
  return bounded;
}

}  // namespace oracle
