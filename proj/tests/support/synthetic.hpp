#pragma once

// Synthetic review corpora with planted sentiment terms.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "grind/corpus.hpp"

namespace grind::testing {

/// Alphabetic pseudo-word: prefix followed by the index in base 26.
inline std::string pseudo_word(const std::string& prefix, std::size_t index) {
  std::string suffix;
  do {
    suffix.insert(suffix.begin(), static_cast<char>('a' + index % 26));
    index /= 26;
  } while (index > 0);
  return prefix + suffix;
}

struct PlantedCorpus {
  std::vector<Review> reviews;
  std::vector<std::string> planted_terms;
  std::vector<double> effects;
};

struct PlantedSpec {
  std::size_t n_reviews = 1000;
  std::size_t n_planted = 20;
  std::size_t planted_per_review = 3;
  std::size_t n_filler = 300;
  std::size_t filler_per_review = 7;
  double base = 90.0;
  double noise_sigma = 1.0;
  std::uint64_t seed = 2024;
};

/// Every review has the same number of distinct tokens: planted terms drawn
/// without replacement plus filler words. score = base + sum of planted
/// effects + N(0, sigma^2); effects have magnitude in [1, 3] and random sign.
inline PlantedCorpus planted_corpus(const PlantedSpec& spec) {
  std::mt19937_64 gen(spec.seed);
  PlantedCorpus out;
  std::uniform_real_distribution<double> magnitude(1.0, 3.0);
  std::bernoulli_distribution sign(0.5);
  for (std::size_t j = 0; j < spec.n_planted; ++j) {
    out.planted_terms.push_back(pseudo_word("plant", j));
    out.effects.push_back((sign(gen) ? 1.0 : -1.0) * magnitude(gen));
  }
  std::vector<std::string> filler;
  for (std::size_t j = 0; j < spec.n_filler; ++j) filler.push_back(pseudo_word("fill", j));

  std::normal_distribution<double> noise(0.0, spec.noise_sigma);
  auto choose = [&](std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(idx[i], idx[pick(gen)]);
    }
    idx.resize(k);
    return idx;
  };

  for (std::size_t r = 0; r < spec.n_reviews; ++r) {
    std::vector<std::string> words;
    double score = spec.base;
    for (auto j : choose(spec.n_planted, spec.planted_per_review)) {
      words.push_back(out.planted_terms[j]);
      score += out.effects[j];
    }
    if (spec.filler_per_review > 0) {
      for (auto j : choose(spec.n_filler, spec.filler_per_review)) words.push_back(filler[j]);
    }
    std::shuffle(words.begin(), words.end(), gen);
    if (spec.noise_sigma > 0.0) score += noise(gen);
    std::string text;
    for (std::size_t w = 0; w < words.size(); ++w) {
      if (w) text += (w % 4 == 0) ? ". " : ", ";
      text += words[w];
    }
    text += '.';
    out.reviews.push_back({"syn" + std::to_string(r), text, score});
  }
  return out;
}

}  // namespace grind::testing
