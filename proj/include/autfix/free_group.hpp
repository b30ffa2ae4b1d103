#pragma once

// Reduced words in a free group F_n with a fixed ordered basis x_1, ..., x_n.

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace autfix {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RankMismatch : public Error {
 public:
  RankMismatch(int a, int b)
      : Error("rank mismatch: F_" + std::to_string(a) + " vs F_" + std::to_string(b)) {}
};

/// Raised by every text parser. `line` is 0 when the input had no line structure.
class ParseError : public Error {
 public:
  ParseError(std::string message, int line, int column)
      : Error(locate(line, column) + message), message_(std::move(message)), line_(line), column_(column) {}

  /// The message without the location prefix.
  const std::string& message() const { return message_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string locate(int line, int column) {
    if (line > 0) return std::to_string(line) + ":" + std::to_string(column) + ": ";
    if (column > 0) return "column " + std::to_string(column) + ": ";
    return {};
  }
  std::string message_;
  int line_;
  int column_;
};

/// Basis letter x_index^sign.
struct Letter {
  int index = 1;
  int sign = 1;

  constexpr Letter inverse() const { return {index, -sign}; }

  /// Position in the alphabet order x_1 < x_1^-1 < x_2 < x_2^-1 < ...
  constexpr int key() const { return 2 * (index - 1) + (sign < 0 ? 1 : 0); }
  static constexpr Letter from_key(int key) { return {key / 2 + 1, key % 2 == 0 ? 1 : -1}; }

  friend constexpr bool operator==(Letter, Letter) = default;
  friend constexpr std::strong_ordering operator<=>(Letter a, Letter b) {
    return a.key() <=> b.key();
  }
};

/// Appends `l` to a freely reduced sequence, cancelling against the last letter.
inline void append_reduced(std::vector<Letter>& acc, Letter l) {
  if (!acc.empty() && acc.back() == l.inverse()) {
    acc.pop_back();
  } else {
    acc.push_back(l);
  }
}

inline void append_reduced(std::vector<Letter>& acc, std::span<const Letter> tail) {
  for (Letter l : tail) append_reduced(acc, l);
}

/// A freely reduced word. The empty word is the identity.
class Word {
 public:
  Word() = default;
  explicit Word(int rank) : rank_(rank) { check_rank(rank); }

  Word(int rank, std::span<const Letter> raw) : rank_(rank) {
    check_rank(rank);
    letters_.reserve(raw.size());
    for (Letter l : raw) {
      check_letter(l);
      append_reduced(letters_, l);
    }
  }

  Word(int rank, std::initializer_list<Letter> raw)
      : Word(rank, std::span<const Letter>(raw.begin(), raw.size())) {}

  static Word generator(int rank, int index, int sign = 1) {
    return Word(rank, {Letter{index, sign}});
  }

  int rank() const { return rank_; }
  std::span<const Letter> letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool is_identity() const { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  Letter front() const { return letters_.front(); }
  Letter back() const { return letters_.back(); }

  Word inverse() const {
    Word out(rank_);
    out.letters_.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) out.letters_.push_back(it->inverse());
    return out;
  }

  Word& operator*=(const Word& rhs) {
    if (rank_ != rhs.rank_) throw RankMismatch(rank_, rhs.rank_);
    append_reduced(letters_, rhs.letters_);
    return *this;
  }

  friend Word operator*(Word lhs, const Word& rhs) { return lhs *= rhs; }

  Word pow(int k) const {
    Word base = k < 0 ? inverse() : *this;
    Word out(rank_);
    for (int i = 0; i < (k < 0 ? -k : k); ++i) out *= base;
    return out;
  }

  /// Sub-word of letters [from, to); already reduced.
  Word slice(std::size_t from, std::size_t to) const {
    Word out(rank_);
    out.letters_.assign(letters_.begin() + static_cast<std::ptrdiff_t>(from),
                        letters_.begin() + static_cast<std::ptrdiff_t>(to));
    return out;
  }

  friend bool operator==(const Word& a, const Word& b) {
    return a.rank_ == b.rank_ && a.letters_ == b.letters_;
  }

  /// Shortlex order: length first, then lexicographic in the alphabet order.
  friend std::strong_ordering operator<=>(const Word& a, const Word& b) {
    if (a.letters_.size() != b.letters_.size()) return a.letters_.size() <=> b.letters_.size();
    return std::lexicographical_compare_three_way(a.letters_.begin(), a.letters_.end(),
                                                  b.letters_.begin(), b.letters_.end());
  }

  /// Builds a word from letters the caller guarantees to be reduced and in range.
  static Word from_reduced(int rank, std::vector<Letter> letters) {
    Word out(rank);
    out.letters_ = std::move(letters);
    return out;
  }

 private:
  static void check_rank(int rank) {
    if (rank < 0) throw std::invalid_argument("negative rank");
  }
  void check_letter(Letter l) const {
    if (l.index < 1 || l.index > rank_ || (l.sign != 1 && l.sign != -1)) {
      throw std::invalid_argument("letter outside the basis of F_" + std::to_string(rank_));
    }
  }

  int rank_ = 0;
  std::vector<Letter> letters_;
};

inline Word reduce(int rank, std::span<const Letter> raw) { return Word(rank, raw); }
inline Word concat(const Word& a, const Word& b) { return a * b; }
inline Word invert(const Word& w) { return w.inverse(); }

/// g^-1 w g.
inline Word conjugate(const Word& w, const Word& g) { return g.inverse() * w * g; }

struct CyclicReduction {
  Word core;
  Word conjugator;
};

/// Returns (core, c) with w = c core c^-1 and core cyclically reduced.
inline CyclicReduction cyclically_reduce(const Word& w) {
  std::size_t lo = 0;
  std::size_t hi = w.length();
  while (hi - lo >= 2 && w[lo] == w[hi - 1].inverse()) {
    ++lo;
    --hi;
  }
  return {w.slice(lo, hi), w.slice(0, lo)};
}

inline bool is_cyclically_reduced(const Word& w) {
  return w.length() < 2 || w.front() != w.back().inverse();
}

struct PrimitiveRoot {
  Word root;
  int exponent = 1;
};

/// Writes w = root^exponent with root not a proper power.
inline PrimitiveRoot primitive_root(const Word& w) {
  if (w.is_identity()) throw std::invalid_argument("the identity has no primitive root");
  auto [core, c] = cyclically_reduce(w);
  const std::size_t n = core.length();
  for (std::size_t d = 1; d <= n; ++d) {
    if (n % d != 0) continue;
    bool periodic = true;
    for (std::size_t i = d; i < n && periodic; ++i) periodic = core[i] == core[i - d];
    if (periodic) {
      return {c * core.slice(0, d) * c.inverse(), static_cast<int>(n / d)};
    }
  }
  return {w, 1};  // unreachable: d == n always succeeds
}

// ---------------------------------------------------------------------------
// Text syntax. Letters are x, y, z when the rank is at most 3 and a1..an in
// every rank; an uppercase name is the inverse letter. A letter may carry an
// integer exponent `^k`. Letters are separated by whitespace, `*` or `.`, or
// simply juxtaposed. The identity is written `1`.

inline std::string letter_name(int rank, int index) {
  if (rank <= 3) return std::string(1, static_cast<char>('x' + index - 1));
  return "a" + std::to_string(index);
}

inline std::string to_string(Letter l, int rank) {
  std::string s = letter_name(rank, l.index);
  if (l.sign < 0) s += "^-1";
  return s;
}

inline std::string to_string(const Word& w) {
  if (w.is_identity()) return "1";
  std::string out;
  for (std::size_t i = 0; i < w.length(); ++i) {
    if (i > 0) out += ' ';
    out += to_string(w[i], w.rank());
  }
  return out;
}

inline std::string to_string(std::span<const Word> words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(words[i]);
  }
  return out;
}

namespace detail {

inline bool is_separator(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0 || c == '*' || c == '.';
}

}  // namespace detail

/// Parses one word. Column numbers in errors are 1-based offsets into `text`.
inline Word parse_word(std::string_view text, int rank) {
  std::vector<Letter> raw;
  std::size_t i = 0;
  bool saw_identity = false;
  bool saw_letter = false;
  auto fail = [&](const std::string& msg, std::size_t at) -> void {
    throw ParseError(msg, 0, static_cast<int>(at + 1));
  };
  while (i < text.size()) {
    char c = text[i];
    if (detail::is_separator(c)) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (c == '1') {
      saw_identity = true;
      ++i;
      continue;
    }
    int index = 0;
    int sign = std::isupper(static_cast<unsigned char>(c)) ? -1 : 1;
    char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == 'a') {
      ++i;
      std::size_t digits = i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (digits == i) fail("expected a digit after 'a'", start);
      index = std::stoi(std::string(text.substr(digits, i - digits)));
    } else if (lower == 'x' || lower == 'y' || lower == 'z') {
      if (rank > 3) fail("letters x, y, z are only defined up to rank 3; use a1..a" + std::to_string(rank), start);
      index = lower - 'x' + 1;
      ++i;
    } else {
      fail(std::string("unexpected character '") + c + "'", start);
    }
    if (index < 1 || index > rank) fail("letter outside the basis of F_" + std::to_string(rank), start);
    int exponent = 1;
    if (i < text.size() && text[i] == '^') {
      ++i;
      std::size_t num = i;
      if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
      std::size_t digits = i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (digits == i) fail("expected an integer exponent", num);
      exponent = std::stoi(std::string(text.substr(num, i - num)));
    }
    const Letter l{index, exponent < 0 ? -sign : sign};
    for (int k = 0; k < (exponent < 0 ? -exponent : exponent); ++k) raw.push_back(l);
    saw_letter = true;
  }
  if (!saw_letter && !saw_identity) fail("empty word", text.size() > 0 ? text.size() - 1 : 0);
  return Word(rank, raw);
}

/// Parses a comma-separated list of words.
inline std::vector<Word> parse_word_list(std::string_view text, int rank) {
  std::vector<Word> out;
  std::size_t offset = 0;
  while (offset <= text.size()) {
    std::size_t comma = text.find(',', offset);
    std::string_view item = text.substr(offset, comma == std::string_view::npos ? std::string_view::npos : comma - offset);
    bool blank = std::all_of(item.begin(), item.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
    if (!blank) {
      try {
        out.push_back(parse_word(item, rank));
      } catch (const ParseError& e) {
        throw ParseError(e.message(), 0, static_cast<int>(offset) + e.column());
      }
    } else if (comma != std::string_view::npos) {
      throw ParseError("empty list item", 0, static_cast<int>(offset + 1));
    }
    if (comma == std::string_view::npos) break;
    offset = comma + 1;
  }
  return out;
}

}  // namespace autfix
