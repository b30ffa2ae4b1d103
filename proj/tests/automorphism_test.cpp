#include <gtest/gtest.h>

#include <random>

#include "autfix/automorphism.hpp"
#include "support/oracles.hpp"
#include "support/random_instances.hpp"

using namespace autfix;

namespace {

Automorphism aut(int rank, std::initializer_list<const char*> images) {
  std::vector<Word> out;
  for (const char* s : images) out.push_back(parse_word(s, rank));
  return Automorphism(out);
}

std::vector<oracle::Seq> seq_images(const Automorphism& phi) {
  std::vector<oracle::Seq> out;
  for (const Word& w : phi.images()) out.push_back(oracle::to_seq(w));
  return out;
}

}  // namespace

TEST(Automorphism, Apply) {
  auto phi = aut(2, {"x", "y x"});
  EXPECT_EQ(phi(parse_word("y x Y", 2)), parse_word("y x Y", 2));
  EXPECT_EQ(phi(parse_word("y", 2)), parse_word("y x", 2));
  auto id = Automorphism::identity(3);
  EXPECT_EQ(id(parse_word("x y Z", 3)), parse_word("x y Z", 3));
  EXPECT_THROW(phi(parse_word("x", 3)), RankMismatch);
}

TEST(Automorphism, ApplyIsHomomorphism) {
  std::mt19937 rng(1);
  for (int t = 0; t < 300; ++t) {
    auto phi = sample::random_triangular(rng, 3, 3);
    auto u = sample::random_word(rng, 3, 8);
    auto v = sample::random_word(rng, 3, 8);
    EXPECT_EQ(phi(u * v), phi(u) * phi(v));
    EXPECT_EQ(oracle::to_seq(phi(u)), oracle::substitute(seq_images(phi), oracle::to_seq(u)));
  }
}

TEST(Automorphism, CompositionOrder) {
  auto phi = aut(3, {"x", "y x", "z"});
  auto psi = aut(3, {"x", "y", "z x"});
  EXPECT_EQ(compose(phi, Automorphism::identity(3)), phi);
  EXPECT_EQ(compose(phi, psi), aut(3, {"x", "y x", "z x"}));
  // Asymmetric pair: a = (x -> x y), b = (y -> y x).
  auto a = aut(2, {"x y", "y"});
  auto b = aut(2, {"x", "y x"});
  auto w = parse_word("x", 2);
  EXPECT_EQ(compose(a, b)(w), a(b(w)));
  EXPECT_NE(compose(a, b), compose(b, a));
  EXPECT_EQ(inner(parse_word("x", 2))(parse_word("x", 2)), parse_word("x", 2));
  EXPECT_EQ(inner(parse_word("x", 2))(parse_word("y", 2)), parse_word("X y x", 2));
  EXPECT_EQ(power(phi, 3), aut(3, {"x", "y x x x", "z"}));
  EXPECT_EQ(power(phi, 0), Automorphism::identity(3));
}

TEST(Automorphism, InverseIsVerified) {
  std::mt19937 rng(2);
  for (int t = 0; t < 100; ++t) {
    auto phi = sample::random_triangular(rng, 3, 4);
    ASSERT_TRUE(phi.has_inverse());
    EXPECT_TRUE(compose(phi, phi.inverse()).is_identity());
    EXPECT_TRUE(compose(phi.inverse(), phi).is_identity());
  }
  std::vector<Word> images{parse_word("x", 2), parse_word("y x", 2)};
  std::vector<Word> wrong{parse_word("x", 2), parse_word("y x", 2)};
  EXPECT_THROW(Automorphism(images, wrong), Error);
}

TEST(Automorphism, Abelianization) {
  auto m = abelianization(aut(2, {"x", "y x"}));
  EXPECT_EQ(m(0, 0), 1);
  EXPECT_EQ(m(0, 1), 1);
  EXPECT_EQ(m(1, 0), 0);
  EXPECT_EQ(m(1, 1), 1);
  EXPECT_TRUE(is_unipotent(m));
  EXPECT_TRUE(is_unipotent(abelianization(Automorphism::identity(3))));
  auto fib = abelianization(aut(2, {"x y", "x"}));
  EXPECT_EQ(fib(1, 0), 1);
  EXPECT_EQ(fib(1, 1), 0);
  EXPECT_FALSE(is_unipotent(fib));
  auto d = IntMatrix::identity(2) - fib;
  EXPECT_FALSE((d * d).is_zero());
}

TEST(Oracle, FixedWordsMatchNaiveEnumeration) {
  std::mt19937 rng(4);
  auto all = oracle::all_reduced(2, 6);
  for (int t = 0; t < 20; ++t) {
    auto phi = sample::random_triangular(rng, 2, 3);
    auto imgs = seq_images(phi);
    std::vector<Word> expected;
    for (const auto& s : all) {
      if (oracle::substitute(imgs, s) == s) expected.push_back(oracle::to_word(s, 2));
    }
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(fixed_words_up_to(phi, 6), expected);
  }
}

TEST(Oracle, FixedSubgroupExamples) {
  auto r = fixed_subgroup_oracle(aut(2, {"x", "y x"}), 6);
  EXPECT_EQ(to_string(r.generators), "x, y x y^-1");
  EXPECT_EQ(r.rank, 2);
  EXPECT_TRUE(r.saturated);
  auto id = fixed_subgroup_oracle(Automorphism::identity(3), 2);
  EXPECT_EQ(id.rank, 3);
  auto c = fixed_subgroup_oracle(inner(parse_word("x y X Y", 2)), 8);
  EXPECT_EQ(c.rank, 1);
  EXPECT_TRUE(c.graph.accepts(parse_word("x y X Y", 2)));
  EXPECT_FALSE(c.graph.accepts(parse_word("x", 2)));
}

TEST(Oracle, FixIsASubgroup) {
  std::mt19937 rng(6);
  for (int t = 0; t < 10; ++t) {
    auto phi = sample::random_triangular(rng, 3, 2);
    auto words = fixed_words_up_to(phi, 5);
    auto g = fold(words, 3);
    for (std::size_t i = 0; i < words.size(); i += 7) {
      for (std::size_t j = 0; j < words.size(); j += 5) {
        EXPECT_TRUE(g.accepts(words[i] * words[j].inverse()));
        EXPECT_EQ(phi(words[i] * words[j]), words[i] * words[j]);
      }
    }
  }
}

TEST(Oracle, InertiaRankBound) {
  std::mt19937 rng(8);
  for (int t = 0; t < 30; ++t) {
    const int n = 2 + t % 2;
    auto phi = sample::random_triangular(rng, n, 3);
    auto fix = fixed_subgroup_oracle(phi, n == 2 ? 8 : 6);
    EXPECT_LE(fix.rank, n);
    std::vector<Word> k;
    for (int i = 0; i < 1 + t % 3; ++i) k.push_back(sample::random_nontrivial_word(rng, n, 5));
    auto kg = fold(k, n);
    EXPECT_LE(intersect(fix.graph, kg).rank(), kg.rank());
  }
}

TEST(Oracle, PeriodicImpliesFixed) {
  EXPECT_TRUE(periodic_implies_fixed_check(aut(2, {"x", "y x"}), 6, 8).empty());
  EXPECT_TRUE(periodic_implies_fixed_check(Automorphism::identity(2), 3, 4).empty());
  auto swap = periodic_implies_fixed_check(aut(2, {"y", "x"}), 2, 4);
  EXPECT_NE(std::find(swap.begin(), swap.end(), parse_word("x y", 2)), swap.end());
}

TEST(Oracle, ShardedEnumerationIsDeterministic) {
  auto phi = aut(3, {"x", "y x", "z x x"});
  auto a = fixed_subgroup_oracle(phi, 7);
  auto b = fixed_subgroup_oracle(phi, 7);
  EXPECT_EQ(a.generators, b.generators);
  EXPECT_EQ(a.graph, b.graph);
}
