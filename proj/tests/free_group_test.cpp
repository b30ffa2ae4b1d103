#include <gtest/gtest.h>

#include <random>

#include "autfix/free_group.hpp"
#include "support/oracles.hpp"
#include "support/random_instances.hpp"

using namespace autfix;

namespace {

Word w2(std::string_view s) { return parse_word(s, 2); }
Word w3(std::string_view s) { return parse_word(s, 3); }

}  // namespace

TEST(Word, ReduceCancelsAdjacentPairs) {
  EXPECT_EQ(reduce(3, std::vector<Letter>{{1, 1}, {2, 1}, {2, -1}, {1, 1}}), w3("x x"));
  EXPECT_TRUE(reduce(3, std::vector<Letter>{}).is_identity());
  EXPECT_TRUE(reduce(3, std::vector<Letter>{{1, 1}, {1, -1}}).is_identity());
}

TEST(Word, ReduceMatchesNaiveOracle) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> letter(-3, 3);
  for (int trial = 0; trial < 2000; ++trial) {
    oracle::Seq raw;
    for (int i = 0; i < 12; ++i) {
      int v = letter(rng);
      if (v != 0) raw.push_back(v);
    }
    Word w = oracle::to_word(raw, 3);
    EXPECT_EQ(oracle::to_seq(w), oracle::naive_reduce(raw));
    EXPECT_EQ(reduce(3, w.letters()), w);
  }
}

TEST(Word, ConcatInvertConjugate) {
  EXPECT_EQ(invert(w2("x y")), w2("Y X"));
  EXPECT_EQ(conjugate(w2("y"), w2("x")), w2("X y x"));
  EXPECT_EQ(concat(w2("x y"), w2("Y")), w2("x"));
  EXPECT_THROW(w2("x") * w3("x"), RankMismatch);
}

TEST(Word, ConcatLengthBound) {
  std::mt19937 rng(11);
  for (int i = 0; i < 1000; ++i) {
    auto u = sample::random_word(rng, 3, 10);
    auto v = sample::random_word(rng, 3, 10);
    EXPECT_LE(concat(u, v).length(), u.length() + v.length());
  }
}

TEST(Word, CyclicReduction) {
  auto a = cyclically_reduce(w2("x y X"));
  EXPECT_EQ(a.core, w2("y"));
  EXPECT_EQ(a.conjugator, w2("x"));
  auto b = cyclically_reduce(w2("x y"));
  EXPECT_EQ(b.core, w2("x y"));
  EXPECT_TRUE(b.conjugator.is_identity());
  const Word w = w2("Y x y y");
  auto c = cyclically_reduce(w);
  EXPECT_EQ(c.core, w2("x y"));
  EXPECT_EQ(c.conjugator, w2("Y"));
  EXPECT_EQ(oracle::to_seq(c.conjugator * c.core * c.conjugator.inverse()), oracle::to_seq(w));
}

TEST(Word, CyclicCoreIsShortestConjugate) {
  auto all = oracle::all_reduced(2, 8);
  std::mt19937 rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    auto w = sample::random_word(rng, 2, 8);
    auto seq = oracle::to_seq(w);
    std::size_t best = seq.size();
    for (const auto& g : all) {
      if (g.size() > seq.size()) continue;
      best = std::min(best, oracle::mul(oracle::mul(oracle::inv(g), seq), g).size());
    }
    EXPECT_EQ(cyclically_reduce(w).core.length(), best) << to_string(w);
  }
}

TEST(Word, PrimitiveRoot) {
  auto a = primitive_root(w2("x y x y x y"));
  EXPECT_EQ(a.root, w2("x y"));
  EXPECT_EQ(a.exponent, 3);
  auto b = primitive_root(w2("x"));
  EXPECT_EQ(b.root, w2("x"));
  EXPECT_EQ(b.exponent, 1);
  auto c = primitive_root(w2("y x x Y y x x Y"));
  EXPECT_EQ(c.exponent, 4);
  EXPECT_EQ(c.root, w2("y x Y"));
  EXPECT_THROW(primitive_root(Word(2)), std::invalid_argument);
}

TEST(Word, PrimitiveRootAgreesWithBruteForce) {
  // A word is a proper power iff some shorter word's power equals it.
  auto all = oracle::all_reduced(2, 10);
  std::mt19937 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    Word w = sample::random_nontrivial_word(rng, 2, 10);
    if (trial % 3 == 0) w = w.pow(2 + trial % 3);
    if (w.length() > 10) continue;
    auto seq = oracle::to_seq(w);
    int best = 1;
    for (const auto& g : all) {
      if (g.empty() || g.size() >= seq.size()) continue;
      oracle::Seq p = g;
      for (int k = 2; k <= 10; ++k) {
        p = oracle::mul(p, g);
        if (p == seq) best = std::max(best, k);
        if (p.size() > seq.size()) break;
      }
    }
    auto pr = primitive_root(w);
    EXPECT_EQ(pr.exponent, best) << to_string(w);
    EXPECT_EQ(pr.root.pow(pr.exponent), w);
  }
}

TEST(Word, ShortlexOrder) {
  EXPECT_LT(w2("x"), w2("X"));
  EXPECT_LT(w2("X"), w2("y"));
  EXPECT_LT(w2("y"), w2("x x"));
  EXPECT_LT(Word(2), w2("x"));
}

TEST(Syntax, RoundTrip) {
  std::mt19937 rng(9);
  for (int i = 0; i < 500; ++i) {
    auto w = sample::random_word(rng, 3, 12);
    EXPECT_EQ(parse_word(to_string(w), 3), w);
    auto v = sample::random_word(rng, 5, 12);
    EXPECT_EQ(parse_word(to_string(v), 5), v);
  }
  EXPECT_EQ(to_string(w3("y x^2 Z")), "y x x z^-1");
  EXPECT_EQ(w3("yx^-1"), w3("y X"));
  EXPECT_EQ(parse_word("a1 a4^-1", 4), Word(4, {Letter{1, 1}, Letter{4, -1}}));
  EXPECT_TRUE(parse_word("1", 2).is_identity());
}

TEST(Syntax, ErrorsCarryColumns) {
  try {
    parse_word("x y q", 2);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.column(), 5);
  }
  EXPECT_THROW(parse_word("z", 2), ParseError);
  EXPECT_THROW(parse_word("", 2), ParseError);
  EXPECT_THROW(parse_word("x^", 2), ParseError);
  try {
    parse_word_list("x, y, w", 2);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.column(), 7);
  }
  auto list = parse_word_list("x, y x Y", 2);
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(to_string(list), "x, y x y^-1");
}
