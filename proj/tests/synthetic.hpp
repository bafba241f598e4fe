#pragma once

// Synthetic feature corpora with known generating parameters.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "texscope/features.hpp"

namespace synthetic {

using texscope::features::FeatureVector;

struct ClassProfile {
  std::string category;
  double multi_file;         // probability
  double no_comments;        // probability of zero comment words
  double comment_words;      // mean over all papers
  double no_packages;        // probability of zero packages
  double packages;           // mean over papers with packages
  double uses_newcommand;    // probability
  double newcommands;        // mean over all papers
  double has_theorems;       // probability
  double theorems;           // mean over papers with theorems
  double words;              // mean
  double authors;            // mean
};

// Means and incidences of the two-class comparison table.
inline ClassProfile cs_profile() { return {"cs", 0.84, 0.047, 772, 0.13, 6.7, 0.64, 39.7, 0.48, 4.85, 9011, 1.72}; }
inline ClassProfile math_profile() { return {"math", 0.34, 0.096, 395, 0.25, 5.0, 0.66, 36.1, 0.71, 5.51, 9345, 1.24}; }

// 1 + Poisson(mean - 1): a count of at least one with the given mean.
inline std::uint64_t at_least_one(std::mt19937_64& rng, double mean) {
  return 1 + std::poisson_distribution<std::uint64_t>(std::max(mean - 1.0, 1e-9))(rng);
}

inline FeatureVector sample(const ClassProfile& p, std::mt19937_64& rng, std::size_t index) {
  std::bernoulli_distribution coin_multi(p.multi_file), coin_nocomment(p.no_comments), coin_nopkg(p.no_packages),
      coin_newcmd(p.uses_newcommand), coin_thm(p.has_theorems);
  FeatureVector fv;
  fv.id = p.category + "-" + std::to_string(index);
  fv.category = p.category;
  fv.multi_file = coin_multi(rng);
  fv.file_count = fv.multi_file ? 3 : 1;
  if (!coin_nocomment(rng)) {
    const double conditional = p.comment_words / (1.0 - p.no_comments);
    fv.comment_word_count = 1 + std::geometric_distribution<std::uint64_t>(1.0 / conditional)(rng);
  }
  if (!coin_nopkg(rng)) fv.package_count = at_least_one(rng, p.packages);
  if (coin_newcmd(rng)) fv.newcommand_count = at_least_one(rng, p.newcommands / p.uses_newcommand);
  if (coin_thm(rng)) fv.theorem_count = at_least_one(rng, p.theorems);
  fv.word_count = static_cast<std::uint64_t>(std::max(0.0, std::normal_distribution<double>(p.words, 4000)(rng)));
  fv.figure_count = std::poisson_distribution<std::uint64_t>(3.0)(rng);
  fv.includegraphics_count = fv.figure_count;
  fv.author_count = at_least_one(rng, p.authors);
  return fv;
}

// Balanced two-class corpus, classes interleaved.
inline std::vector<FeatureVector> table_corpus(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const ClassProfile cs = cs_profile(), math = math_profile();
  std::vector<FeatureVector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample(i % 2 == 0 ? cs : math, rng, i));
  return out;
}

// word_count = slope * x + intercept + N(0, sigma), x drawn uniformly from [0, x_max]; `set_x`
// stores x into the chosen field.
template <class SetX>
std::vector<FeatureVector> linear_corpus(std::size_t n, double slope, double intercept, double sigma, int x_max,
                                         std::uint64_t seed, SetX set_x) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> xs(0, x_max);
  std::normal_distribution<double> noise(0, sigma);
  std::vector<FeatureVector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    FeatureVector fv;
    fv.id = "p" + std::to_string(i);
    fv.category = "cs";
    const int x = xs(rng);
    set_x(fv, static_cast<std::uint64_t>(x));
    fv.word_count = static_cast<std::uint64_t>(std::max(0.0, std::llround(slope * x + intercept + noise(rng)) * 1.0));
    out.push_back(fv);
  }
  return out;
}

}  // namespace synthetic
