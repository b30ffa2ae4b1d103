#pragma once

#include <random>
#include <vector>

#include "autfix/automorphism.hpp"
#include "autfix/free_group.hpp"

namespace sample {

inline autfix::Word random_word(std::mt19937& rng, int rank, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<int> index(1, rank);
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<autfix::Letter> raw;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) raw.push_back({index(rng), coin(rng) ? 1 : -1});
  return autfix::Word(rank, raw);
}

inline autfix::Word random_nontrivial_word(std::mt19937& rng, int rank, int max_len) {
  for (;;) {
    auto w = random_word(rng, rank, max_len);
    if (!w.is_identity()) return w;
  }
}

/// Upper triangular automorphism of the rose: x_i -> x_i u_i with u_i in
/// <x_1..x_{i-1}>. The inverse x_i -> x_i phi^{-1}(u_i)^{-1} is supplied, so
/// the constructor verifies invertibility.
inline autfix::Automorphism random_triangular(std::mt19937& rng, int rank, int suffix_len) {
  std::vector<autfix::Word> images;
  std::vector<autfix::Word> inverse;
  for (int i = 1; i <= rank; ++i) {
    autfix::Word u(rank);
    if (i > 1) {
      auto small = random_word(rng, i - 1, suffix_len);
      std::vector<autfix::Letter> raw(small.letters().begin(), small.letters().end());
      u = autfix::Word(rank, raw);
    }
    images.push_back(autfix::Word::generator(rank, i) * u);
  }
  // Inverse images are built bottom up: x_i -> x_i * inv(u_i) evaluated under
  // the inverse on lower letters.
  for (int i = 1; i <= rank; ++i) {
    const autfix::Word u = autfix::Word::generator(rank, i).inverse() * images[static_cast<std::size_t>(i - 1)];
    autfix::Word pulled(rank);
    for (auto l : u.letters()) {
      const autfix::Word& img = inverse[static_cast<std::size_t>(l.index - 1)];
      pulled *= l.sign > 0 ? img : img.inverse();
    }
    inverse.push_back(autfix::Word::generator(rank, i) * pulled.inverse());
  }
  return autfix::Automorphism(images, inverse);
}

}  // namespace sample
