#pragma once

// Automorphisms of F_n given by basis images, and the brute-force word
// enumeration used as the fixed-subgroup oracle.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <future>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "autfix/free_group.hpp"
#include "autfix/stallings.hpp"

namespace autfix {

class Automorphism {
 public:
  /// No invertibility check is made; supply inverse images when that matters.
  explicit Automorphism(std::vector<Word> images) : images_(std::move(images)) {
    rank_ = static_cast<int>(images_.size());
    for (const Word& w : images_) {
      if (w.rank() != rank_) throw RankMismatch(rank_, w.rank());
    }
    cache_letter_images();
  }

  /// Verifies that the two image lists are mutually inverse on every basis letter.
  Automorphism(std::vector<Word> images, std::vector<Word> inverse_images)
      : Automorphism(std::move(images)) {
    if (inverse_images.size() != images_.size()) {
      throw Error("inverse has " + std::to_string(inverse_images.size()) +
                                  " images, expected " + std::to_string(rank_));
    }
    for (const Word& w : inverse_images) {
      if (w.rank() != rank_) throw RankMismatch(rank_, w.rank());
    }
    Automorphism inv(inverse_images);
    for (int i = 1; i <= rank_; ++i) {
      const Word x = Word::generator(rank_, i);
      if (apply(inv.apply(x)) != x || inv.apply(apply(x)) != x) {
        throw Error("inverse images do not invert the automorphism on " + to_string(x));
      }
    }
    inverse_images_ = std::move(inverse_images);
  }

  static Automorphism identity(int rank) {
    std::vector<Word> images;
    for (int i = 1; i <= rank; ++i) images.push_back(Word::generator(rank, i));
    return Automorphism(images, images);
  }

  int rank() const { return rank_; }
  const std::vector<Word>& images() const { return images_; }
  const Word& image(int index) const { return images_.at(static_cast<std::size_t>(index - 1)); }
  const std::optional<std::vector<Word>>& inverse_images() const { return inverse_images_; }
  bool has_inverse() const { return inverse_images_.has_value(); }

  /// Image of a single signed letter, as a reduced letter sequence.
  std::span<const Letter> letter_image(Letter l) const { return letter_images_[static_cast<std::size_t>(l.key())]; }

  Word apply(const Word& w) const {
    if (w.rank() != rank_) throw RankMismatch(rank_, w.rank());
    std::vector<Letter> out;
    out.reserve(w.length() * 2);
    for (Letter l : w.letters()) append_reduced(out, letter_image(l));
    return Word::from_reduced(rank_, std::move(out));
  }

  Word operator()(const Word& w) const { return apply(w); }

  Automorphism inverse() const {
    if (!inverse_images_) throw std::logic_error("automorphism has no verified inverse");
    return Automorphism(*inverse_images_, images_);
  }

  bool is_identity() const {
    for (int i = 1; i <= rank_; ++i) {
      if (image(i) != Word::generator(rank_, i)) return false;
    }
    return true;
  }

  friend bool operator==(const Automorphism& a, const Automorphism& b) { return a.images_ == b.images_; }

 private:
  void cache_letter_images() {
    letter_images_.assign(static_cast<std::size_t>(2 * rank_), {});
    for (int i = 1; i <= rank_; ++i) {
      const auto& img = images_[static_cast<std::size_t>(i - 1)].letters();
      letter_images_[static_cast<std::size_t>(Letter{i, 1}.key())].assign(img.begin(), img.end());
      auto& inv = letter_images_[static_cast<std::size_t>(Letter{i, -1}.key())];
      for (auto it = img.rbegin(); it != img.rend(); ++it) inv.push_back(it->inverse());
    }
  }

  int rank_ = 0;
  std::vector<Word> images_;
  std::optional<std::vector<Word>> inverse_images_;
  std::vector<std::vector<Letter>> letter_images_;
};

inline Word apply(const Automorphism& phi, const Word& w) { return phi.apply(w); }

/// The composite "psi first, then phi", i.e. phi o psi.
inline Automorphism compose(const Automorphism& phi, const Automorphism& psi) {
  if (phi.rank() != psi.rank()) throw RankMismatch(phi.rank(), psi.rank());
  std::vector<Word> images;
  for (const Word& w : psi.images()) images.push_back(phi.apply(w));
  if (phi.has_inverse() && psi.has_inverse()) {
    std::vector<Word> inverse;
    const Automorphism psi_inv = psi.inverse();
    for (const Word& w : *phi.inverse_images()) inverse.push_back(psi_inv.apply(w));
    return Automorphism(std::move(images), std::move(inverse));
  }
  return Automorphism(std::move(images));
}

/// phi^k; negative k needs a verified inverse.
inline Automorphism power(const Automorphism& phi, int k) {
  Automorphism base = k < 0 ? phi.inverse() : phi;
  Automorphism out = Automorphism::identity(phi.rank());
  for (int i = 0; i < (k < 0 ? -k : k); ++i) out = compose(base, out);
  return out;
}

/// The inner automorphism w -> g^-1 w g.
inline Automorphism inner(const Word& g) {
  const int n = g.rank();
  std::vector<Word> images;
  std::vector<Word> inverse;
  for (int i = 1; i <= n; ++i) {
    const Word x = Word::generator(n, i);
    images.push_back(conjugate(x, g));
    inverse.push_back(conjugate(x, g.inverse()));
  }
  return Automorphism(std::move(images), std::move(inverse));
}

/// "x -> img; y -> img; ..." on one line.
inline std::string to_string(const Automorphism& phi) {
  std::string out;
  for (int i = 1; i <= phi.rank(); ++i) {
    if (i > 1) out += "; ";
    out += letter_name(phi.rank(), i) + " -> " + to_string(phi.image(i));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Abelianization.

/// Square integer matrix; column j is the exponent vector of the image of x_j.
class IntMatrix {
 public:
  explicit IntMatrix(int n) : n_(n), data_(static_cast<std::size_t>(n * n), 0) {}

  static IntMatrix identity(int n) {
    IntMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  int size() const { return n_; }
  std::int64_t& operator()(int row, int col) { return data_[static_cast<std::size_t>(row * n_ + col)]; }
  std::int64_t operator()(int row, int col) const { return data_[static_cast<std::size_t>(row * n_ + col)]; }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](std::int64_t v) { return v == 0; });
  }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    IntMatrix c(a.n_);
    for (int i = 0; i < a.n_; ++i)
      for (int k = 0; k < a.n_; ++k)
        for (int j = 0; j < a.n_; ++j) c(i, j) += a(i, k) * b(k, j);
    return c;
  }

  friend IntMatrix operator-(const IntMatrix& a, const IntMatrix& b) {
    IntMatrix c(a.n_);
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] = a.data_[i] - b.data_[i];
    return c;
  }

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

 private:
  int n_;
  std::vector<std::int64_t> data_;
};

inline IntMatrix abelianization(const Automorphism& phi) {
  IntMatrix m(phi.rank());
  for (int j = 1; j <= phi.rank(); ++j) {
    for (Letter l : phi.image(j).letters()) m(l.index - 1, j - 1) += l.sign;
  }
  return m;
}

/// (Id - M)^n == 0.
inline bool is_unipotent(const IntMatrix& m) {
  const IntMatrix nil = IntMatrix::identity(m.size()) - m;
  IntMatrix acc = IntMatrix::identity(m.size());
  for (int i = 0; i < m.size(); ++i) acc = acc * nil;
  return acc.is_zero();
}

// ---------------------------------------------------------------------------
// Brute-force enumeration of reduced words.

/// Depth-first walk over all nonempty reduced words of length <= max_length,
/// tracking the reduced image of the current word under every map in `maps`.
/// The walk is split into one shard per first letter; `make_state` builds the
/// per-shard accumulator and `visit(state, word, images)` is called for every
/// word. Shards may run on separate threads and are returned in letter order.
template <class State, class MakeState, class Visit>
std::vector<State> enumerate_words(int rank, int max_length, std::span<const Automorphism> maps,
                                   MakeState make_state, Visit visit) {
  for (const Automorphism& m : maps) {
    if (m.rank() != rank) throw RankMismatch(rank, m.rank());
  }
  const int shards = 2 * rank;
  auto run_shard = [&](int first_key) {
    State state = make_state();
    if (max_length < 1) return state;
    std::vector<Letter> word;
    word.reserve(static_cast<std::size_t>(max_length));
    // images[m][d] is the image of the length-d prefix under maps[m].
    std::vector<std::vector<std::vector<Letter>>> images(
        maps.size(), std::vector<std::vector<Letter>>(static_cast<std::size_t>(max_length) + 1));
    std::vector<std::span<const Letter>> view(maps.size());
    std::vector<int> next_key(static_cast<std::size_t>(max_length) + 1, 0);

    auto push = [&](Letter l) {
      const std::size_t d = word.size();
      word.push_back(l);
      for (std::size_t m = 0; m < maps.size(); ++m) {
        auto& dst = images[m][d + 1];
        dst = images[m][d];
        append_reduced(dst, maps[m].letter_image(l));
        view[m] = dst;
      }
      visit(state, std::span<const Letter>(word), std::span<const std::span<const Letter>>(view));
    };

    push(Letter::from_key(first_key));
    next_key[1] = 0;
    while (!word.empty()) {
      const std::size_t d = word.size();
      int& k = next_key[d];
      if (d >= static_cast<std::size_t>(max_length) || k >= shards) {
        word.pop_back();
        continue;
      }
      const Letter l = Letter::from_key(k++);
      if (l == word.back().inverse()) continue;
      push(l);
      next_key[d + 1] = 0;
    }
    return state;
  };

  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(shards));
  const unsigned workers = std::thread::hardware_concurrency();
  if (workers > 1 && max_length >= 7) {
    std::vector<std::future<State>> futures;
    for (int key = 0; key < shards; ++key) futures.push_back(std::async(std::launch::async, run_shard, key));
    for (auto& f : futures) out.push_back(f.get());
  } else {
    for (int key = 0; key < shards; ++key) out.push_back(run_shard(key));
  }
  return out;
}

inline bool same_letters(std::span<const Letter> a, std::span<const Letter> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

/// Every reduced word of length <= max_length fixed by phi, in shortlex order
/// (the identity first).
inline std::vector<Word> fixed_words_up_to(const Automorphism& phi, int max_length) {
  const int n = phi.rank();
  auto shards = enumerate_words<std::vector<Word>>(
      n, max_length, std::span<const Automorphism>(&phi, 1), [] { return std::vector<Word>{}; },
      [n](std::vector<Word>& acc, std::span<const Letter> w, std::span<const std::span<const Letter>> img) {
        if (same_letters(w, img[0])) acc.push_back(Word::from_reduced(n, {w.begin(), w.end()}));
      });
  std::vector<Word> out{Word(n)};
  for (auto& s : shards) out.insert(out.end(), s.begin(), s.end());
  std::sort(out.begin(), out.end());
  return out;
}

/// Depth-bounded lower approximation of Fix phi.
struct FixedSubgroupReport {
  std::vector<Word> generators;
  int rank = 0;
  int search_depth = 0;
  SubgroupGraph graph;
  /// The subgroup found at depth L-2 already equals the one at depth L. A hint, not a proof.
  bool saturated = false;
};

/// Folds the words of length <= max_length fixed by every map. Words of length
/// <= max_length - 2 are folded separately to compute the saturation flag.
inline FixedSubgroupReport common_fixed_subgroup_oracle(std::span<const Automorphism> maps, int max_length) {
  if (maps.empty()) throw std::invalid_argument("no automorphisms given");
  if (max_length < 1) throw std::invalid_argument("search depth must be at least 1");
  const int n = maps.front().rank();
  struct ShardState {
    Folder full;
    Folder shallow;
    std::vector<Word> added_full;
    std::vector<Word> added_shallow;
  };
  const std::size_t shallow_limit = max_length >= 2 ? static_cast<std::size_t>(max_length - 2) : 0;
  auto shards = enumerate_words<ShardState>(
      n, max_length, maps, [n] { return ShardState{Folder(n), Folder(n), {}, {}}; },
      [&](ShardState& s, std::span<const Letter> w, std::span<const std::span<const Letter>> img) {
        for (const auto& i : img) {
          if (!same_letters(w, i)) return;
        }
        if (!s.full.accepts(w)) {
          Word word = Word::from_reduced(n, {w.begin(), w.end()});
          s.full.add(word);
          s.added_full.push_back(word);
        }
        if (w.size() <= shallow_limit && !s.shallow.accepts(w)) {
          Word word = Word::from_reduced(n, {w.begin(), w.end()});
          s.shallow.add(word);
          s.added_shallow.push_back(word);
        }
      });
  Folder full(n);
  Folder shallow(n);
  for (const auto& s : shards) {
    for (const Word& w : s.added_full) full.add(w);
    for (const Word& w : s.added_shallow) shallow.add(w);
  }
  FixedSubgroupReport report;
  report.graph = full.finish();
  report.generators = report.graph.basis();
  report.rank = report.graph.rank();
  report.search_depth = max_length;
  report.saturated = shallow.finish() == report.graph;
  return report;
}

inline FixedSubgroupReport fixed_subgroup_oracle(const Automorphism& phi, int max_length) {
  return common_fixed_subgroup_oracle(std::span<const Automorphism>(&phi, 1), max_length);
}

/// Words w with |w| <= max_length such that phi^k(w) = w for some 2 <= k <= k_max
/// but phi(w) != w, in shortlex order. Empty for UPG automorphisms.
inline std::vector<Word> periodic_implies_fixed_check(const Automorphism& phi, int k_max, int max_length) {
  const int n = phi.rank();
  std::vector<Automorphism> powers;
  for (int k = 1; k <= k_max; ++k) powers.push_back(k == 1 ? phi : compose(phi, powers.back()));
  auto shards = enumerate_words<std::vector<Word>>(
      n, max_length, powers, [] { return std::vector<Word>{}; },
      [n](std::vector<Word>& acc, std::span<const Letter> w, std::span<const std::span<const Letter>> img) {
        if (same_letters(w, img[0])) return;
        for (std::size_t k = 1; k < img.size(); ++k) {
          if (same_letters(w, img[k])) {
            acc.push_back(Word::from_reduced(n, {w.begin(), w.end()}));
            return;
          }
        }
      });
  std::vector<Word> out;
  for (auto& s : shards) out.insert(out.end(), s.begin(), s.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace autfix
