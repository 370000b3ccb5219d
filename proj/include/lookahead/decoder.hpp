#ifndef LOOKAHEAD_DECODER_HPP
#define LOOKAHEAD_DECODER_HPP

#include <algorithm>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lookahead/eval.hpp"
#include "lookahead/hierarchy.hpp"
#include "lookahead/parser_model.hpp"
#include "lookahead/transition.hpp"

namespace lookahead {

struct DecodeOptions {
  int beam = 16;
  bool use_averaged = true;
};

namespace detail {

inline FeatureVector state_features(const ParserState& s,
                                    const std::vector<TaggedWord>& sentence,
                                    const SentenceHierarchies* pred) {
  FeatureVector f = extract_baseline(s, sentence);
  if (pred) {
    FeatureVector la = extract_lookahead(s, sentence, *pred);
    f.insert(f.end(), std::make_move_iterator(la.begin()),
             std::make_move_iterator(la.end()));
  }
  return f;
}

struct Candidate {
  std::size_t parent;
  Action action;
  double total;
  std::size_t order;
  bool gold;
};

struct OwnedStep {
  FeatureVector feats;
  std::string action;
};

inline std::vector<LinearModel::Step> as_steps(const std::vector<OwnedStep>& owned) {
  std::vector<LinearModel::Step> steps;
  steps.reserve(owned.size());
  for (const auto& s : owned) steps.push_back({&s.feats, s.action});
  return steps;
}

// Features and actions along the first `len` actions of a derivation.
inline std::vector<OwnedStep> prefix_steps(const std::vector<Action>& actions,
                                           std::size_t len,
                                           const std::vector<TaggedWord>& sentence,
                                           const SentenceHierarchies* pred) {
  std::vector<OwnedStep> steps;
  steps.reserve(len);
  StatePtr s = ParserState::initial();
  for (std::size_t i = 0; i < len; ++i) {
    steps.push_back({state_features(*s, sentence, pred), actions[i].str()});
    s = apply(s, actions[i], sentence);
  }
  return steps;
}

}  // namespace detail

struct BeamResult {
  StatePtr best;
  // Set during training: the step at which the gold derivation left the
  // beam, if it did.
  std::optional<int> gold_fell_at;
  bool best_is_gold = false;
};

// Beam search per the deduction system: every agenda state expands with all
// legal actions each step (completed states take IDLE), the top-k survive,
// and the loop ends when the whole agenda is completed. Ties break by
// insertion order, so decoding is deterministic.
inline BeamResult beam_search(const std::vector<TaggedWord>& sentence,
                              const SentenceHierarchies* pred,
                              const LinearModel& model,
                              const DecodeOptions& opt,
                              const std::vector<Action>* gold = nullptr) {
  if (sentence.empty()) throw std::invalid_argument("empty sentence");
  if (opt.beam < 1) throw std::invalid_argument("beam size must be >= 1");
  const int n = static_cast<int>(sentence.size());

  std::vector<StatePtr> agenda{ParserState::initial()};
  std::vector<bool> is_gold{true};
  BeamResult result;

  for (int step = 0;; ++step) {
    bool all_done = true;
    for (const auto& s : agenda)
      if (!s->completed) { all_done = false; break; }
    if (all_done) break;

    std::vector<detail::Candidate> cands;
    std::vector<FeatureVector> feats(agenda.size());
    for (std::size_t i = 0; i < agenda.size(); ++i) {
      feats[i] = detail::state_features(*agenda[i], sentence, pred);
      for (const Action& a : legal_actions(*agenda[i], n, model.grammar)) {
        const double as = model.score(feats[i], a.str(), opt.use_averaged);
        // Beyond its FINISH the gold derivation continues with IDLE.
        const bool g = gold && is_gold[i] &&
                       (step < static_cast<int>(gold->size())
                            ? a == (*gold)[step]
                            : a.kind == Action::Kind::Idle);
        cands.push_back({i, a, agenda[i]->score + as, cands.size(), g});
      }
    }
    if (cands.empty())
      throw std::runtime_error("beam search dead end (internal error)");
    std::stable_sort(cands.begin(), cands.end(),
                     [](const auto& a, const auto& b) { return a.total > b.total; });
    const std::size_t keep = std::min<std::size_t>(opt.beam, cands.size());

    std::vector<StatePtr> next;
    std::vector<bool> next_gold;
    next.reserve(keep);
    bool gold_survives = false;
    for (std::size_t i = 0; i < keep; ++i) {
      const auto& c = cands[i];
      const double as = c.total - agenda[c.parent]->score;
      next.push_back(apply(agenda[c.parent], c.action, sentence, as));
      next_gold.push_back(c.gold);
      gold_survives = gold_survives || c.gold;
    }
    agenda = std::move(next);
    is_gold = std::move(next_gold);

    if (gold && !gold_survives && !result.gold_fell_at)
      result.gold_fell_at = step + 1;  // prefix length at which gold left
    if (gold && result.gold_fell_at) break;
  }

  // Highest score, earliest insertion on ties (agenda is kept sorted).
  std::size_t best = 0;
  for (std::size_t i = 1; i < agenda.size(); ++i)
    if (agenda[i]->score > agenda[best]->score) best = i;
  result.best = agenda[best];
  result.best_is_gold = !is_gold.empty() && is_gold[best];
  return result;
}

inline Tree beam_parse(const std::vector<TaggedWord>& sentence,
                       const SentenceHierarchies* pred,
                       const LinearModel& model, const DecodeOptions& opt) {
  BeamResult r = beam_search(sentence, pred, model, opt);
  return state_tree(*r.best);
}

// ---------------------------------------------------------------------------
// Training.

struct TrainOptions {
  int beam = 16;
  int epochs = 10;
  std::uint64_t seed = 1;
  bool early_update = true;
  bool log_train_f1 = false;
  std::ostream* log = nullptr;
};

namespace detail {

// Deterministic Fisher-Yates (std::shuffle is implementation-defined).
inline void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[rng() % i]);
}

}  // namespace detail

// Online averaged perceptron with early update. `pred` carries one
// hierarchy prediction per training sentence (null entries or a null
// pointer disable lookahead features).
inline LinearModel train_parser(
    const std::vector<Tree>& treebank,
    const std::vector<const SentenceHierarchies*>* pred,
    const TrainOptions& opt,
    const HeadRules& rules = HeadRules::default_rules()) {
  if (treebank.empty()) throw std::invalid_argument("empty treebank");

  std::vector<std::vector<TaggedWord>> sentences;
  std::vector<BinPtr> binarized;
  std::vector<std::vector<Action>> oracles;
  for (const auto& t : treebank) {
    sentences.push_back(tagged_words(t));
    binarized.push_back(binarize(t, rules));
    oracles.push_back(oracle(binarized.back()));
  }

  LinearModel model;
  model.grammar = Grammar::from_binarized(binarized);

  DecodeOptions dopt;
  dopt.beam = opt.beam;
  dopt.use_averaged = false;  // raw weights during training

  std::mt19937_64 rng(opt.seed);
  std::vector<std::size_t> order(treebank.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    detail::shuffle_indices(order, rng);
    long updates = 0, early = 0;
    for (std::size_t idx : order) {
      const auto& sentence = sentences[idx];
      const SentenceHierarchies* ph = pred ? (*pred)[idx] : nullptr;
      std::vector<Action> gold = oracles[idx];
      BeamResult r = beam_search(sentence, ph, model, dopt,
                                 opt.early_update ? &gold : nullptr);

      if (r.gold_fell_at) {
        const std::size_t len = static_cast<std::size_t>(*r.gold_fell_at);
        while (gold.size() < len) gold.push_back(Action::idle());
        auto gold_steps = detail::prefix_steps(gold, len, sentence, ph);
        auto pred_actions = action_history(*r.best);
        auto pred_steps = detail::prefix_steps(pred_actions, len, sentence, ph);
        model.perceptron_update(detail::as_steps(gold_steps),
                                detail::as_steps(pred_steps));
        ++updates;
        ++early;
        continue;
      }

      auto pred_actions = action_history(*r.best);
      // Pad gold with IDLE so both derivations cover the same steps.
      while (gold.size() < pred_actions.size()) gold.push_back(Action::idle());
      if (gold == pred_actions) continue;
      auto gold_steps = detail::prefix_steps(gold, gold.size(), sentence, ph);
      auto pred_steps =
          detail::prefix_steps(pred_actions, pred_actions.size(), sentence, ph);
      model.perceptron_update(detail::as_steps(gold_steps),
                              detail::as_steps(pred_steps));
      ++updates;
    }
    if (opt.log) {
      *opt.log << "epoch " << epoch + 1 << ": updates=" << updates
               << " early=" << early;
      if (opt.log_train_f1) {
        std::vector<Tree> out;
        for (std::size_t i = 0; i < treebank.size(); ++i) {
          const SentenceHierarchies* ph = pred ? (*pred)[i] : nullptr;
          out.push_back(beam_parse(sentences[i], ph, model, dopt));
        }
        *opt.log << " train_f1=" << bracket_f1(out, treebank).f1;
      }
      *opt.log << '\n';
    }
  }
  return model;
}

}  // namespace lookahead

#endif  // LOOKAHEAD_DECODER_HPP
