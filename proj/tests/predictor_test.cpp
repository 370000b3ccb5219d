#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "lookahead/predictor.hpp"
#include "lookahead/synth.hpp"

using namespace lookahead;

namespace {

PredictorConfig tiny_config() {
  PredictorConfig cfg;
  cfg.word_dim = 3;
  cfg.word_win = 1;
  cfg.char_dim = 2;
  cfg.char_win = 1;
  cfg.hidden = 3;
  cfg.char_hidden = 2;
  cfg.layers = 2;
  cfg.epochs = 1;
  cfg.seed = 42;
  return cfg;
}

std::vector<Tree> tiny_treebank() {
  return read_ptb(
      "(S (NP (DT ba) (NN kina)) (VP (VB luve) (NP (NN tuna))))"
      " (S (NP (NN mona)) (VP (VB sive) (PP (IN of) (NP (DT ba) (NN kina)))))"
      " (S (VP (VB luve) (NP (DT ba) (JJ poji) (NN tuna))))");
}

std::vector<std::string> words_of(const Tree& t) {
  std::vector<std::string> ws;
  for (const Tree* l : t.leaves()) ws.push_back(l->word);
  return ws;
}

}  // namespace

TEST_CASE("config dimensions match the published layout") {
  PredictorConfig cfg;  // defaults
  CHECK(cfg.word_dim == 50);
  CHECK(cfg.char_hidden == 60);
  CHECK(cfg.input_dim() == 110);
  CHECK(cfg.window_size() == 5);
  CHECK(cfg.char_window_size() == 5);
  CHECK(cfg.layers == 2);
  CHECK(cfg.hidden == 100);
  cfg.use_chars = false;
  CHECK(cfg.input_dim() == 50);
  cfg.use_wins = false;
  CHECK(cfg.window_size() == 1);

  PredictorConfig bad;
  bad.hidden = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = PredictorConfig{};
  bad.layers = 4;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("utf8_chars splits codepoints") {
  auto cs = utf8_chars("abc");
  REQUIRE(cs.size() == 3);
  CHECK(cs[1] == "b");
  cs = utf8_chars("na\xc3\xafve");  // naïve
  REQUIRE(cs.size() == 5);
  CHECK(cs[2] == "\xc3\xaf");
}

TEST_CASE("vocabulary layout and unknown-word fallback") {
  PredictorModel m = make_predictor(tiny_treebank(), tiny_config());
  CHECK(m.words.items[kUnkId] == "<unk>");
  CHECK(m.chars.items[kUnkId] == "<unk>");
  CHECK(m.chars.items[kPadCharId] == "<pad>");
  CHECK(m.labels.items[kNullLabelId] == "NULL");
  for (const char* lbl : {"S", "NP", "VP", "PP"})
    CHECK(m.labels.index.count(lbl) == 1);

  EncodedSentence es = m.encode_words({"kina", "zzz"});
  CHECK(es.word_ids[0] != kUnkId);
  CHECK(es.word_ids[1] == kUnkId);
  REQUIRE(es.char_ids[1].size() == 3);
  CHECK(es.char_ids[1][0] == kUnkId);  // 'z' unseen in training

  CHECK_THROWS_AS(make_predictor({}, tiny_config()), std::invalid_argument);
}

TEST_CASE("input layer is word embedding plus attended characters") {
  auto cfg = tiny_config();
  PredictorModel m = make_predictor(tiny_treebank(), cfg);
  EncodedSentence es = m.encode_words({"ba"});

  Tape t(m.params_s);
  auto x = detail::embed_word(t, cfg, es.word_ids[0], es.char_ids[0]);
  CHECK(t.value(x).size() == cfg.input_dim());
  CHECK(t.value(x).head(cfg.word_dim) ==
        m.params_s.at("word_emb").row(es.word_ids[0]).transpose());

  // For a one-character word the attention weight is trivially 1, so the
  // character half must equal that character's composed window directly.
  EncodedSentence one = m.encode_words({"o"});
  REQUIRE(one.char_ids[0].size() == 1);
  auto x1 = detail::embed_word(t, cfg, one.word_ids[0], one.char_ids[0]);
  const auto& p = m.params_s;
  Vec window(3 * cfg.char_dim);
  window << p.at("char_emb").row(kPadCharId).transpose(),
      p.at("char_emb").row(one.char_ids[0][0]).transpose(),
      p.at("char_emb").row(kPadCharId).transpose();
  Vec comp =
      (p.at("char_comp_W") * window + p.at("char_comp_b").col(0)).array().tanh();
  CHECK(t.value(x1).tail(cfg.char_hidden).isApprox(comp, 1e-12));
}

TEST_CASE("zero parameters give zero encodings and uniform label loss") {
  auto cfg = tiny_config();
  PredictorModel m = make_predictor(tiny_treebank(), cfg);
  for (auto& [_, v] : m.params_s.values) v.setZero();

  Tree t0 = tiny_treebank()[0];
  EncodedSentence es = m.encode_words(words_of(t0));
  auto gold = extract_hierarchies(t0);

  Tape t(m.params_s);
  auto h = detail::encode_sentence(t, cfg, es);
  REQUIRE(h.size() == 4);
  for (auto hi : h) {
    CHECK(t.value(hi).size() == 2 * cfg.hidden);
    CHECK(t.value(hi).isZero());
  }

  long steps = 0;
  for (const auto& wh : gold)
    steps += static_cast<long>(wh.start.depth()) + 1;
  const double loss = sentence_loss(m, HType::Start, es, gold);
  CHECK(loss == Catch::Approx(steps * std::log(double(m.labels.size()))));
}

TEST_CASE("analytic gradients of the full network match finite differences") {
  auto cfg = tiny_config();
  std::vector<Tree> bank = read_ptb(
      "(S (NP (NN ba)) (VP (VB luve) (NN tuna)))");
  PredictorModel m = make_predictor(bank, cfg);
  EncodedSentence es = m.encode_words(words_of(bank[0]));
  auto gold = extract_hierarchies(bank[0]);

  ParamStore grads = m.params_s.zeros_like();
  sentence_loss(m, HType::Start, es, gold, &grads);

  const double h = 1e-5, tol = 1e-4;
  long checked = 0;
  for (auto& [name, mat] : m.params_s.values) {
    for (Eigen::Index j = 0; j < mat.cols(); ++j)
      for (Eigen::Index i = 0; i < mat.rows(); ++i) {
        const double orig = mat(i, j);
        mat(i, j) = orig + h;
        const double lp = sentence_loss(m, HType::Start, es, gold);
        mat(i, j) = orig - h;
        const double lm = sentence_loss(m, HType::Start, es, gold);
        mat(i, j) = orig;
        const double numeric = (lp - lm) / (2 * h);
        const double analytic = grads.at(name)(i, j);
        INFO(name << "(" << i << "," << j << ")");
        REQUIRE(std::abs(numeric - analytic) <=
                tol * std::max(1.0, std::abs(numeric) + std::abs(analytic)));
        ++checked;
      }
  }
  CHECK(checked > 500);  // the whole parameter set was exercised
}

TEST_CASE("prediction is deterministic and respects the depth cap") {
  auto cfg = tiny_config();
  PredictorModel m = make_predictor(tiny_treebank(), cfg);
  auto ws = words_of(tiny_treebank()[1]);
  auto a = predict_sentence(m, ws);
  auto b = predict_sentence(m, ws);
  CHECK(a == b);

  PredictStats stats;
  predict_sentence(m, ws, &stats);
  CHECK(stats.words == static_cast<long>(ws.size()));

  // Rig the decoder so a non-NULL label always wins: the cap must kick in.
  for (auto& [_, v] : m.params_s.values) v.setZero();
  for (auto& [_, v] : m.params_e.values) v.setZero();
  for (HType type : {HType::Start, HType::End}) {
    auto& p = m.params(type);
    p.at("dec.b2").setConstant(1.0);   // positive cell candidate
    p.at("out_W").row(1).setOnes();    // label 1 beats NULL forever
  }
  PredictStats capped;
  auto pred = predict_sentence(m, ws, &capped);
  CHECK(capped.depth_cap_hits == 2 * static_cast<long>(ws.size()));
  for (const auto& wh : pred) {
    CHECK(wh.start.depth() == static_cast<std::size_t>(cfg.max_depth));
    CHECK(wh.end.depth() == static_cast<std::size_t>(cfg.max_depth));
  }
}

TEST_CASE("training reduces the loss and can memorize a tiny corpus") {
  auto cfg = tiny_config();
  cfg.word_dim = 8;
  cfg.hidden = 12;
  cfg.char_hidden = 4;
  cfg.epochs = 300;
  cfg.lr = 0.02;
  cfg.unk_prob = 0.0;  // no lexical noise on a corpus this small
  auto bank = tiny_treebank();

  std::ostringstream log;
  PredictorModel m = train_predictor(bank, cfg, nullptr, &log);

  // first and last reported epoch losses
  double first = -1, last = -1;
  std::istringstream ls(log.str());
  std::string line;
  while (std::getline(ls, line)) {
    const auto eq = line.find("loss=");
    REQUIRE(eq != std::string::npos);
    last = std::stod(line.substr(eq + 5));
    if (first < 0) first = last;
  }
  CHECK(last < first * 0.2);

  auto [ps, pe] = evaluate_predictor(m, bank);
  CHECK(ps.f1 == 1.0);
  CHECK(pe.f1 == 1.0);
}

TEST_CASE("dev selection keeps the best epoch") {
  auto cfg = tiny_config();
  cfg.epochs = 3;
  auto bank = tiny_treebank();
  std::ostringstream log;
  PredictorModel m = train_predictor(bank, cfg, &bank, &log);
  CHECK(log.str().find("dev_s_f1=") != std::string::npos);
}

TEST_CASE("jackknifing covers every sentence without training on it") {
  auto cfg = tiny_config();
  cfg.epochs = 1;
  auto bank = synth_treebank(3, 9);
  auto preds = jackknife(bank, 3, cfg);
  REQUIRE(preds.size() == bank.size());
  for (std::size_t i = 0; i < bank.size(); ++i)
    CHECK(preds[i].size() == static_cast<std::size_t>(bank[i].word_count()));

  CHECK_THROWS_AS(jackknife(bank, 1, cfg), std::invalid_argument);
  CHECK_THROWS_AS(jackknife(std::vector<Tree>(bank.begin(), bank.begin() + 2),
                            3, cfg),
                  std::invalid_argument);
}

TEST_CASE("predictor save/load round trip preserves behavior") {
  auto cfg = tiny_config();
  PredictorModel m = make_predictor(tiny_treebank(), cfg);
  std::ostringstream out;
  save_predictor(out, m);
  std::istringstream in(out.str());
  PredictorModel back = load_predictor(in);

  CHECK(back.cfg.word_dim == cfg.word_dim);
  CHECK(back.cfg.seed == cfg.seed);
  CHECK(back.words.items == m.words.items);
  CHECK(back.labels.items == m.labels.items);
  auto ws = words_of(tiny_treebank()[2]);
  CHECK(predict_sentence(back, ws) == predict_sentence(m, ws));

  std::istringstream bad("lookahead-predictor-model v2\n");
  CHECK_THROWS(load_predictor(bad));
}
