#ifndef LOOKAHEAD_SYNTH_HPP
#define LOOKAHEAD_SYNTH_HPP

#include <random>
#include <string>
#include <vector>

#include "lookahead/tree.hpp"

namespace lookahead {

// Seeded PCFG-style generator: a desk-scale substitute corpus with nested
// NP/VP/PP/S structure, unary chains, coordination, and a syllabic
// vocabulary so character models have something to latch onto.
class SynthTreebank {
 public:
  explicit SynthTreebank(std::uint64_t seed) : rng_(seed) {
    const char* syl[] = {"ba", "de", "ki", "lo", "mu",
                         "ne", "po", "ra", "si", "tu"};
    for (const char* a : syl)
      for (const char* b : syl) {
        nouns_.push_back(std::string(a) + b + "na");
        verbs_.push_back(std::string(a) + b + "ve");
      }
    nouns_.resize(40);
    verbs_.resize(20);
    for (const char* a : syl) adjs_.push_back(std::string(a) + "ji");
    for (const char* a : syl) advs_.push_back(std::string(a) + "ly");
    advs_.resize(6);
    nums_ = {"two", "five", "nine", "forty"};
    dets_ = {"the", "a", "this", "some"};
    preps_ = {"of", "on", "in", "under", "with"};
  }

  Tree sentence(int min_words = 5, int max_words = 40) {
    for (int attempt = 0; attempt < 200; ++attempt) {
      Tree t = gen_root();
      const int n = t.word_count();
      if (n >= min_words && n <= max_words) return t;
    }
    // Extremely unlikely with the depth limits below.
    return gen_root();
  }

  std::vector<Tree> corpus(int n, int min_words = 5, int max_words = 40) {
    std::vector<Tree> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(sentence(min_words, max_words));
    return out;
  }

 private:
  std::mt19937_64 rng_;
  std::vector<std::string> nouns_, verbs_, adjs_, advs_, nums_, dets_, preps_;

  double unit() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
  }
  const std::string& pick(const std::vector<std::string>& v) {
    return v[rng_() % v.size()];
  }
  Tree leaf(const std::vector<std::string>& lex, const char* pos) {
    return Tree::make_leaf(pick(lex), pos);
  }

  Tree gen_np(int depth) {
    const double r = unit();
    if (depth < 3 && r < 0.12)
      return Tree::make_node("NP", {gen_np(depth + 1), gen_pp(depth + 1)});
    if (depth < 3 && r < 0.20)
      return Tree::make_node(
          "NP", {Tree::make_node("QP", {leaf(nums_, "CD"), leaf(nouns_, "NNS")})});
    if (r < 0.30)
      return Tree::make_node(
          "NP", {leaf(dets_, "DT"), leaf(adjs_, "JJ"), leaf(nouns_, "NN")});
    if (r < 0.40)
      return Tree::make_node(
          "NP", {leaf(dets_, "DT"), leaf(nouns_, "NN"), leaf(nouns_, "NN")});
    if (r < 0.55) return Tree::make_node("NP", {leaf(nouns_, "NN")});
    return Tree::make_node("NP", {leaf(dets_, "DT"), leaf(nouns_, "NN")});
  }

  Tree gen_pp(int depth) {
    return Tree::make_node("PP", {leaf(preps_, "IN"), gen_np(depth + 1)});
  }

  Tree gen_vp(int depth) {
    const double r = unit();
    if (depth < 2 && r < 0.12)
      return Tree::make_node(
          "VP", {leaf(verbs_, "VB"),
                 Tree::make_node("SBAR", {gen_s(depth + 1, false)})});
    if (r < 0.30)
      return Tree::make_node(
          "VP", {leaf(verbs_, "VB"), gen_np(depth + 1), gen_pp(depth + 1)});
    if (r < 0.42)
      return Tree::make_node(
          "VP", {leaf(advs_, "RB"), leaf(verbs_, "VB"), gen_np(depth + 1)});
    if (r < 0.50) return Tree::make_node("VP", {leaf(verbs_, "VB")});
    return Tree::make_node("VP", {leaf(verbs_, "VB"), gen_np(depth + 1)});
  }

  Tree gen_s(int depth, bool allow_coord) {
    if (allow_coord && depth == 0 && unit() < 0.15)
      return Tree::make_node("S", {gen_s(depth + 1, false),
                                   Tree::make_leaf("and", "CC"),
                                   gen_s(depth + 1, false)});
    if (unit() < 0.10) return Tree::make_node("S", {gen_vp(depth)});
    return Tree::make_node("S", {gen_np(depth), gen_vp(depth)});
  }

  Tree gen_root() { return gen_s(0, true); }
};

inline std::vector<Tree> synth_treebank(std::uint64_t seed, int n) {
  if (n < 1) throw std::invalid_argument("need n >= 1 synthetic trees");
  return SynthTreebank(seed).corpus(n);
}

}  // namespace lookahead

#endif  // LOOKAHEAD_SYNTH_HPP
