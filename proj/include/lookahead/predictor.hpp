#ifndef LOOKAHEAD_PREDICTOR_HPP
#define LOOKAHEAD_PREDICTOR_HPP

#include <algorithm>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lookahead/hierarchy.hpp"
#include "lookahead/tensor.hpp"
#include "lookahead/tree.hpp"

namespace lookahead {

struct PredictorConfig {
  int word_dim = 50;
  int word_win = 2;
  int char_dim = 30;
  int char_win = 2;
  int hidden = 100;       // LSTM hidden layer size, per direction
  int char_hidden = 60;   // output dim of the character composition
  int layers = 2;
  int max_depth = kMaxHierarchyDepth;
  int epochs = 20;
  std::uint64_t seed = 1;
  double lr = 0.01;
  double momentum = 0.9;
  double l2 = 1e-6;
  int unk_cutoff = 1;     // train-time frequency at or below which a word
  double unk_prob = 0.5;  // may be replaced by UNK, with this probability
  bool use_chars = true;  // ablation switches
  bool use_wins = true;

  int input_dim() const { return word_dim + (use_chars ? char_hidden : 0); }
  int window_size() const { return use_wins ? 2 * word_win + 1 : 1; }
  int char_window_size() const { return use_wins ? 2 * char_win + 1 : 1; }

  void validate() const {
    if (word_dim <= 0 || char_dim <= 0 || hidden <= 0 || char_hidden <= 0 ||
        max_depth <= 0 || epochs <= 0 || word_win < 0 || char_win < 0)
      throw std::invalid_argument("predictor config values must be positive");
    if (layers < 1 || layers > 3)
      throw std::invalid_argument("layers must be 1, 2 or 3");
  }
};

struct Vocab {
  std::vector<std::string> items;
  std::map<std::string, int> index;

  int add(const std::string& s) {
    auto it = index.find(s);
    if (it != index.end()) return it->second;
    const int id = static_cast<int>(items.size());
    items.push_back(s);
    index.emplace(s, id);
    return id;
  }
  int get(const std::string& s, int fallback) const {
    auto it = index.find(s);
    return it == index.end() ? fallback : it->second;
  }
  int size() const { return static_cast<int>(items.size()); }
};

inline constexpr int kUnkId = 0;      // words and chars
inline constexpr int kPadCharId = 1;  // chars only
inline constexpr int kNullLabelId = 0;

// Splits a UTF-8 string into codepoint substrings.
inline std::vector<std::string> utf8_chars(const std::string& s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if ((c & 0xE0) == 0xC0) len = 2;
    else if ((c & 0xF0) == 0xE0) len = 3;
    else if ((c & 0xF8) == 0xF0) len = 4;
    len = std::min(len, s.size() - i);
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

struct EncodedSentence {
  std::vector<int> word_ids;
  std::vector<std::vector<int>> char_ids;
};

// Full parameter set of the encoder-decoder: one store per hierarchy type
// (the s- and e-type models are entirely separate).
struct PredictorModel {
  PredictorConfig cfg;
  Vocab words;   // [0] = <unk>
  Vocab chars;   // [0] = <unk>, [1] = <pad>
  Vocab labels;  // [0] = NULL terminator
  ParamStore params_s;
  ParamStore params_e;

  const ParamStore& params(HType t) const {
    return t == HType::Start ? params_s : params_e;
  }
  ParamStore& params(HType t) { return t == HType::Start ? params_s : params_e; }

  EncodedSentence encode_words(const std::vector<std::string>& ws) const {
    EncodedSentence es;
    for (const auto& w : ws) {
      es.word_ids.push_back(words.get(w, kUnkId));
      std::vector<int> cs;
      for (const auto& c : utf8_chars(w)) cs.push_back(chars.get(c, kUnkId));
      es.char_ids.push_back(std::move(cs));
    }
    return es;
  }
};

namespace detail {

inline void init_type_params(ParamStore& p, const PredictorConfig& cfg,
                             int n_words, int n_chars, int n_labels,
                             std::mt19937_64& rng) {
  const int in = cfg.input_dim();
  init_embedding(p.add("word_emb", n_words, cfg.word_dim), rng);
  if (cfg.use_chars) {
    init_embedding(p.add("char_emb", n_chars, cfg.char_dim), rng);
    init_glorot(p.add("char_comp_W", cfg.char_hidden,
                      cfg.char_dim * cfg.char_window_size()), rng);
    p.add("char_comp_b", cfg.char_hidden);
    init_glorot(p.add("catt_W", cfg.char_hidden, cfg.word_dim + cfg.char_hidden),
                rng);
    p.add("catt_b", cfg.char_hidden);
    init_glorot(p.add("catt_v", cfg.char_hidden), rng);
  }
  if (cfg.use_wins) init_embedding(p.add("enc_pad", in), rng);
  for (int l = 0; l < cfg.layers; ++l) {
    const int lin = l == 0 ? in * cfg.window_size() : 2 * cfg.hidden;
    for (const char* dir : {"f", "b"}) {
      const std::string pre = "enc" + std::to_string(l) + dir;
      init_glorot(p.add(pre + ".W1", cfg.hidden, lin), rng);
      init_glorot(p.add(pre + ".W2", cfg.hidden, cfg.hidden), rng);
      init_glorot(p.add(pre + ".W3", cfg.hidden), rng);
      init_glorot(p.add(pre + ".W4", cfg.hidden, lin), rng);
      init_glorot(p.add(pre + ".W5", cfg.hidden, cfg.hidden), rng);
      init_glorot(p.add(pre + ".W6", cfg.hidden, lin), rng);
      init_glorot(p.add(pre + ".W7", cfg.hidden, cfg.hidden), rng);
      init_glorot(p.add(pre + ".W8", cfg.hidden), rng);
      p.add(pre + ".b1", cfg.hidden);
      p.add(pre + ".b2", cfg.hidden);
      p.add(pre + ".b3", cfg.hidden);
    }
  }
  init_glorot(p.add("datt_W", cfg.hidden, 3 * cfg.hidden), rng);
  p.add("datt_b", cfg.hidden);
  init_glorot(p.add("datt_v", cfg.hidden), rng);
  const int din = 4 * cfg.hidden;  // [context; h_i]
  init_glorot(p.add("dec.W1", cfg.hidden, din), rng);
  init_glorot(p.add("dec.W2", cfg.hidden, cfg.hidden), rng);
  init_glorot(p.add("dec.W3", cfg.hidden), rng);
  init_glorot(p.add("dec.W4", cfg.hidden, din), rng);
  init_glorot(p.add("dec.W5", cfg.hidden, cfg.hidden), rng);
  init_glorot(p.add("dec.W6", cfg.hidden, din), rng);
  init_glorot(p.add("dec.W7", cfg.hidden, cfg.hidden), rng);
  init_glorot(p.add("dec.W8", cfg.hidden), rng);
  p.add("dec.b1", cfg.hidden);
  p.add("dec.b2", cfg.hidden);
  p.add("dec.b3", cfg.hidden);
  init_glorot(p.add("out_W", n_labels, cfg.hidden), rng);
}

// Coupled-gate LSTM with peephole connections:
//   i = sigma(W1 x + W2 h' + W3 . c' + b1);  f = 1 - i
//   c~ = tanh(W4 x + W5 h' + b2);            c = f.c' + i.c~
//   o = sigma(W6 x + W7 h' + W8 . c + b3);   h = o . tanh(c)
inline Tape::NodeId lstm_step(Tape& t, const std::string& pre, Tape::NodeId x,
                              Tape::NodeId h_prev, Tape::NodeId c_prev,
                              Tape::NodeId& c_out) {
  auto i = t.sigmoid(t.add({t.matvec(pre + ".W1", x), t.matvec(pre + ".W2", h_prev),
                            t.hadamard(t.param(pre + ".W3"), c_prev),
                            t.param(pre + ".b1")}));
  auto f = t.one_minus(i);
  auto ctil = t.tanh(t.add({t.matvec(pre + ".W4", x),
                            t.matvec(pre + ".W5", h_prev), t.param(pre + ".b2")}));
  auto c = t.add({t.hadamard(f, c_prev), t.hadamard(i, ctil)});
  auto o = t.sigmoid(t.add({t.matvec(pre + ".W6", x), t.matvec(pre + ".W7", h_prev),
                            t.hadamard(t.param(pre + ".W8"), c),
                            t.param(pre + ".b3")}));
  c_out = c;
  return t.hadamard(o, t.tanh(c));
}

// Additive attention score f(a, b) = v . tanh(W [a;b] + b0).
inline Tape::NodeId att_score(Tape& t, const std::string& w, const std::string& b,
                              const std::string& v, Tape::NodeId a,
                              Tape::NodeId bb) {
  return t.dot(t.param(v),
               t.tanh(t.add({t.matvec(w, t.concat({a, bb})), t.param(b)})));
}

// Input layer: word embedding, optionally concatenated with the
// attention-weighted sum of composed character windows.
inline Tape::NodeId embed_word(Tape& t, const PredictorConfig& cfg, int word_id,
                               const std::vector<int>& char_ids) {
  auto xw = t.lookup("word_emb", word_id);
  if (!cfg.use_chars) return xw;
  const int cw = cfg.use_wins ? cfg.char_win : 0;
  std::vector<Tape::NodeId> comps, scores;
  const int len = static_cast<int>(char_ids.size());
  for (int j = 0; j < len; ++j) {
    std::vector<Tape::NodeId> window;
    for (int d = -cw; d <= cw; ++d) {
      const int k = j + d;
      window.push_back(
          t.lookup("char_emb", (k < 0 || k >= len) ? kPadCharId : char_ids[k]));
    }
    auto comp = t.tanh(t.add({t.matvec("char_comp_W", t.concat(window)),
                              t.param("char_comp_b")}));
    comps.push_back(comp);
    scores.push_back(att_score(t, "catt_W", "catt_b", "catt_v", xw, comp));
  }
  auto alpha = t.softmax(t.concat(scores));
  auto c_att = t.weighted_sum(alpha, comps);
  return t.concat({xw, c_att});
}

// Windowed 2-layer bidirectional encoder; returns one node per word
// (concat of final-layer directions, dim 2*hidden).
inline std::vector<Tape::NodeId> encode_sentence(Tape& t,
                                                 const PredictorConfig& cfg,
                                                 const EncodedSentence& es) {
  const int n = static_cast<int>(es.word_ids.size());
  std::vector<Tape::NodeId> xs;
  for (int i = 0; i < n; ++i)
    xs.push_back(embed_word(t, cfg, es.word_ids[i], es.char_ids[i]));

  std::vector<Tape::NodeId> layer_in;
  if (cfg.use_wins) {
    for (int i = 0; i < n; ++i) {
      std::vector<Tape::NodeId> win;
      for (int d = -cfg.word_win; d <= cfg.word_win; ++d) {
        const int k = i + d;
        win.push_back(k < 0 || k >= n ? t.param("enc_pad") : xs[k]);
      }
      layer_in.push_back(t.concat(win));
    }
  } else {
    layer_in = xs;
  }

  for (int l = 0; l < cfg.layers; ++l) {
    const std::string fp = "enc" + std::to_string(l) + "f";
    const std::string bp = "enc" + std::to_string(l) + "b";
    std::vector<Tape::NodeId> fwd(n), bwd(n);
    Tape::NodeId h = t.zeros(cfg.hidden), c = t.zeros(cfg.hidden);
    for (int i = 0; i < n; ++i) {
      h = lstm_step(t, fp, layer_in[i], h, c, c);
      fwd[i] = h;
    }
    h = t.zeros(cfg.hidden);
    c = t.zeros(cfg.hidden);
    for (int i = n - 1; i >= 0; --i) {
      h = lstm_step(t, bp, layer_in[i], h, c, c);
      bwd[i] = h;
    }
    std::vector<Tape::NodeId> out(n);
    for (int i = 0; i < n; ++i) out[i] = t.concat({fwd[i], bwd[i]});
    layer_in = std::move(out);
  }
  return layer_in;
}

// One decoder step for word i: attention context over all encoder states,
// LSTM step on [context; h_i], logits over labels. No label feedback.
inline Tape::NodeId decoder_step(Tape& t, const PredictorConfig& cfg,
                                 const std::vector<Tape::NodeId>& h, int i,
                                 Tape::NodeId& s_prev, Tape::NodeId& c_prev) {
  std::vector<Tape::NodeId> scores;
  scores.reserve(h.size());
  for (auto hk : h)
    scores.push_back(att_score(t, "datt_W", "datt_b", "datt_v", s_prev, hk));
  auto beta = t.softmax(t.concat(scores));
  auto ctx = t.weighted_sum(beta, h);
  auto inp = t.concat({ctx, h[i]});
  Tape::NodeId c_out = 0;
  auto s = lstm_step(t, "dec", inp, s_prev, c_prev, c_out);
  s_prev = s;
  c_prev = c_out;
  return t.matvec("out_W", s);
}

// Teacher-forced loss for word i: exactly |gold|+1 steps, last target NULL.
// Targets are the gold hierarchy bottom-up.
inline Tape::NodeId word_loss(Tape& t, const PredictorConfig& cfg,
                              const std::vector<Tape::NodeId>& h, int i,
                              const std::vector<int>& targets_bottom_up) {
  Tape::NodeId s = t.zeros(cfg.hidden), c = t.zeros(cfg.hidden);
  std::vector<Tape::NodeId> losses;
  for (int target : targets_bottom_up) {
    auto logits = decoder_step(t, cfg, h, i, s, c);
    losses.push_back(t.softmax_xent(logits, target));
  }
  return t.add(losses);
}

inline std::vector<int> bottom_up_targets(const ConstituentHierarchy& gold,
                                          const Vocab& labels) {
  std::vector<int> ts;
  for (auto it = gold.labels.rbegin(); it != gold.labels.rend(); ++it)
    ts.push_back(labels.index.at(*it));
  ts.push_back(kNullLabelId);
  return ts;
}

}  // namespace detail

// Loss of one sentence for one hierarchy type (sum over words and steps;
// the L2 term lives in the optimizer).
inline double sentence_loss(const PredictorModel& m, HType type,
                            const EncodedSentence& es,
                            const SentenceHierarchies& gold,
                            ParamStore* grads = nullptr) {
  const ParamStore& p = m.params(type);
  Tape t(p);
  auto h = detail::encode_sentence(t, m.cfg, es);
  std::vector<Tape::NodeId> losses;
  for (int i = 0; i < static_cast<int>(h.size()); ++i) {
    const auto& gh = type == HType::Start ? gold[i].start : gold[i].end;
    losses.push_back(detail::word_loss(t, m.cfg, h, i,
                                       detail::bottom_up_targets(gh, m.labels)));
  }
  auto total = t.add(losses);
  if (grads) t.backward(total, *grads);
  return t.value(total)(0);
}

struct PredictStats {
  long words = 0;
  long depth_cap_hits = 0;
};

// Greedy bottom-up generation until NULL or the depth cap; stored top-down.
inline ConstituentHierarchy predict_word(const PredictorModel& m, Tape& t,
                                         const std::vector<Tape::NodeId>& h,
                                         int i, PredictStats* stats = nullptr) {
  Tape::NodeId s = t.zeros(m.cfg.hidden), c = t.zeros(m.cfg.hidden);
  std::vector<std::string> bottom_up;
  for (int j = 0;; ++j) {
    if (j >= m.cfg.max_depth) {
      if (stats) ++stats->depth_cap_hits;
      break;
    }
    auto logits = detail::decoder_step(t, m.cfg, h, i, s, c);
    const Vec& v = t.value(logits);
    Eigen::Index best = 0;
    v.maxCoeff(&best);
    if (best == kNullLabelId) break;
    bottom_up.push_back(m.labels.items[static_cast<std::size_t>(best)]);
  }
  ConstituentHierarchy out;
  out.labels.assign(bottom_up.rbegin(), bottom_up.rend());
  return out;
}

inline SentenceHierarchies predict_sentence(const PredictorModel& m,
                                            const std::vector<std::string>& ws,
                                            PredictStats* stats = nullptr) {
  EncodedSentence es = m.encode_words(ws);
  SentenceHierarchies out(ws.size());
  for (HType type : {HType::Start, HType::End}) {
    const ParamStore& p = m.params(type);
    Tape t(p);
    auto h = detail::encode_sentence(t, m.cfg, es);
    for (int i = 0; i < static_cast<int>(ws.size()); ++i) {
      auto hier = predict_word(m, t, h, i, stats);
      if (type == HType::Start) out[i].start = std::move(hier);
      else out[i].end = std::move(hier);
      if (stats) ++stats->words;
    }
  }
  if (stats) stats->words /= 2;  // counted once per type above
  return out;
}

// ---------------------------------------------------------------------------
// Training.

struct PredictorTrainLog {
  std::ostream* out = nullptr;
};

inline PredictorModel make_predictor(const std::vector<Tree>& treebank,
                                     const PredictorConfig& cfg) {
  cfg.validate();
  if (treebank.empty()) throw std::invalid_argument("empty treebank");
  PredictorModel m;
  m.cfg = cfg;
  m.words.add("<unk>");
  m.chars.add("<unk>");
  m.chars.add("<pad>");
  m.labels.add("NULL");  // terminator, id 0
  for (const auto& t : treebank) {
    for (const Tree* l : t.leaves()) {
      m.words.add(l->word);
      for (const auto& c : utf8_chars(l->word)) m.chars.add(c);
    }
    for (const auto& wh : extract_hierarchies(t)) {
      for (const auto& lbl : wh.start.labels) m.labels.add(lbl);
      for (const auto& lbl : wh.end.labels) m.labels.add(lbl);
    }
  }
  std::mt19937_64 rng(cfg.seed);
  detail::init_type_params(m.params_s, cfg, m.words.size(), m.chars.size(),
                           m.labels.size(), rng);
  detail::init_type_params(m.params_e, cfg, m.words.size(), m.chars.size(),
                           m.labels.size(), rng);
  return m;
}

// Corpus-level hierarchy F1 of a model on a tree set, per type.
inline std::pair<PRF, PRF> evaluate_predictor(const PredictorModel& m,
                                              const std::vector<Tree>& trees) {
  HierarchyCounts cs, ce;
  for (const auto& t : trees) {
    std::vector<std::string> ws;
    for (const Tree* l : t.leaves()) ws.push_back(l->word);
    auto gold = extract_hierarchies(t);
    auto pred = predict_sentence(m, ws);
    for (std::size_t i = 0; i < ws.size(); ++i) {
      cs.add(pred[i].start, gold[i].start);
      ce.add(pred[i].end, gold[i].end);
    }
  }
  return {cs.prf(), ce.prf()};
}

inline PredictorModel train_predictor(const std::vector<Tree>& treebank,
                                      const PredictorConfig& cfg,
                                      const std::vector<Tree>* dev = nullptr,
                                      std::ostream* log = nullptr) {
  PredictorModel m = make_predictor(treebank, cfg);

  // Word frequencies for the UNK policy.
  std::map<std::string, long> freq;
  std::vector<EncodedSentence> sents;
  std::vector<SentenceHierarchies> golds;
  for (const auto& t : treebank) {
    std::vector<std::string> ws;
    for (const Tree* l : t.leaves()) {
      ws.push_back(l->word);
      ++freq[l->word];
    }
    sents.push_back(m.encode_words(ws));
    golds.push_back(extract_hierarchies(t));
  }
  std::vector<std::vector<bool>> rare(sents.size());
  for (std::size_t i = 0; i < sents.size(); ++i) {
    const auto ls = treebank[i].leaves();
    rare[i].resize(ls.size());
    for (std::size_t j = 0; j < ls.size(); ++j)
      rare[i][j] = freq[ls[j]->word] <= cfg.unk_cutoff;
  }

  ParamStore vel_s = m.params_s.zeros_like();
  ParamStore vel_e = m.params_e.zeros_like();
  std::mt19937_64 rng(cfg.seed + 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::size_t> order(sents.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  double best_dev = -1;
  ParamStore best_s, best_e;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng() % i]);
    double loss = 0;
    for (std::size_t idx : order) {
      EncodedSentence es = sents[idx];
      for (std::size_t j = 0; j < es.word_ids.size(); ++j)
        if (rare[idx][j] && unit(rng) < cfg.unk_prob) es.word_ids[j] = kUnkId;
      {
        ParamStore g = m.params_s.zeros_like();
        loss += sentence_loss(m, HType::Start, es, golds[idx], &g);
        sgd_momentum_step(m.params_s, g, vel_s, cfg.lr, cfg.momentum, cfg.l2);
      }
      {
        ParamStore g = m.params_e.zeros_like();
        loss += sentence_loss(m, HType::End, es, golds[idx], &g);
        sgd_momentum_step(m.params_e, g, vel_e, cfg.lr, cfg.momentum, cfg.l2);
      }
    }
    if (log) *log << "epoch " << epoch + 1 << ": loss=" << loss;
    if (dev && !dev->empty()) {
      auto [ps, pe] = evaluate_predictor(m, *dev);
      const double score = (ps.f1 + pe.f1) / 2;
      if (log)
        *log << " dev_s_f1=" << ps.f1 << " dev_e_f1=" << pe.f1;
      if (score > best_dev) {
        best_dev = score;
        best_s = m.params_s;
        best_e = m.params_e;
      }
    }
    if (log) *log << '\n';
  }
  if (best_dev >= 0) {
    m.params_s = std::move(best_s);
    m.params_e = std::move(best_e);
  }
  return m;
}

// Ten-fold (by default) jackknifing: sentence i belongs to fold i mod
// `folds`; its prediction comes from a model trained on the other folds.
inline std::vector<SentenceHierarchies> jackknife(
    const std::vector<Tree>& treebank, int folds, const PredictorConfig& cfg,
    std::ostream* log = nullptr) {
  if (folds < 2) throw std::invalid_argument("jackknife needs >= 2 folds");
  if (static_cast<int>(treebank.size()) < folds)
    throw std::invalid_argument("treebank smaller than fold count");
  std::vector<SentenceHierarchies> out(treebank.size());
  for (int f = 0; f < folds; ++f) {
    std::vector<Tree> train;
    for (std::size_t i = 0; i < treebank.size(); ++i)
      if (static_cast<int>(i % folds) != f) train.push_back(treebank[i]);
    PredictorConfig fold_cfg = cfg;
    fold_cfg.seed = cfg.seed + static_cast<std::uint64_t>(f) + 1;
    if (log) *log << "jackknife fold " << f + 1 << "/" << folds << '\n';
    PredictorModel m = train_predictor(train, fold_cfg, nullptr, log);
    for (std::size_t i = f; i < treebank.size(); i += folds) {
      std::vector<std::string> ws;
      for (const Tree* l : treebank[i].leaves()) ws.push_back(l->word);
      out[i] = predict_sentence(m, ws);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization.

namespace detail {

inline void save_params(std::ostream& out, const ParamStore& p) {
  out << "params " << p.values.size() << '\n';
  out << std::setprecision(17);
  for (const auto& [name, m] : p.values) {
    out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (j) out << ' ';
        out << m(i, j);
      }
      out << '\n';
    }
  }
}

inline ParamStore load_params(std::istream& in) {
  std::string word;
  std::size_t count = 0;
  in >> word >> count;
  if (word != "params") throw std::runtime_error("bad predictor model file");
  ParamStore p;
  for (std::size_t k = 0; k < count; ++k) {
    std::string name;
    Eigen::Index rows, cols;
    in >> name >> rows >> cols;
    Mat& m = p.add(name, rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) in >> m(i, j);
  }
  return p;
}

inline void save_vocab(std::ostream& out, const char* tag, const Vocab& v) {
  out << tag << ' ' << v.size() << '\n';
  for (const auto& s : v.items) out << s << '\n';
}

inline Vocab load_vocab(std::istream& in, const char* tag) {
  std::string word;
  int count = 0;
  in >> word >> count;
  if (word != tag) throw std::runtime_error("bad predictor model file");
  std::string line;
  std::getline(in, line);
  Vocab v;
  for (int i = 0; i < count; ++i) {
    std::getline(in, line);
    v.add(line);
  }
  return v;
}

}  // namespace detail

inline void save_predictor(std::ostream& out, const PredictorModel& m) {
  out << "lookahead-predictor-model v1\n";
  const auto& c = m.cfg;
  out << "config word_dim=" << c.word_dim << " word_win=" << c.word_win
      << " char_dim=" << c.char_dim << " char_win=" << c.char_win
      << " hidden=" << c.hidden << " char_hidden=" << c.char_hidden
      << " layers=" << c.layers << " max_depth=" << c.max_depth
      << " epochs=" << c.epochs << " seed=" << c.seed << " lr=" << c.lr
      << " momentum=" << c.momentum << " l2=" << c.l2
      << " unk_cutoff=" << c.unk_cutoff << " unk_prob=" << c.unk_prob
      << " use_chars=" << c.use_chars << " use_wins=" << c.use_wins << '\n';
  detail::save_vocab(out, "words", m.words);
  detail::save_vocab(out, "chars", m.chars);
  detail::save_vocab(out, "labels", m.labels);
  detail::save_params(out, m.params_s);
  detail::save_params(out, m.params_e);
}

inline PredictorModel load_predictor(std::istream& in) {
  std::string line;
  std::getline(in, line);
  if (line != "lookahead-predictor-model v1")
    throw std::runtime_error("predictor schema-version mismatch: " + line);
  std::getline(in, line);
  PredictorModel m;
  {
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;  // "config"
    auto& c = m.cfg;
    while (ls >> tok) {
      auto eq = tok.find('=');
      const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
      if (k == "word_dim") c.word_dim = std::stoi(v);
      else if (k == "word_win") c.word_win = std::stoi(v);
      else if (k == "char_dim") c.char_dim = std::stoi(v);
      else if (k == "char_win") c.char_win = std::stoi(v);
      else if (k == "hidden") c.hidden = std::stoi(v);
      else if (k == "char_hidden") c.char_hidden = std::stoi(v);
      else if (k == "layers") c.layers = std::stoi(v);
      else if (k == "max_depth") c.max_depth = std::stoi(v);
      else if (k == "epochs") c.epochs = std::stoi(v);
      else if (k == "seed") c.seed = std::stoull(v);
      else if (k == "lr") c.lr = std::stod(v);
      else if (k == "momentum") c.momentum = std::stod(v);
      else if (k == "l2") c.l2 = std::stod(v);
      else if (k == "unk_cutoff") c.unk_cutoff = std::stoi(v);
      else if (k == "unk_prob") c.unk_prob = std::stod(v);
      else if (k == "use_chars") c.use_chars = v == "1";
      else if (k == "use_wins") c.use_wins = v == "1";
    }
  }
  m.words = detail::load_vocab(in, "words");
  m.chars = detail::load_vocab(in, "chars");
  m.labels = detail::load_vocab(in, "labels");
  m.params_s = detail::load_params(in);
  m.params_e = detail::load_params(in);
  return m;
}

}  // namespace lookahead

#endif  // LOOKAHEAD_PREDICTOR_HPP
