// Command-line front end: data prep, predictor training, jackknifing,
// parser training, parsing, evaluation and reports.

#include <CLI11.hpp>

#include <atomic>
#include <fstream>
#include <functional>
#include <iostream>
#include <thread>

#include "lookahead/config.hpp"
#include "lookahead/decoder.hpp"
#include "lookahead/eval.hpp"
#include "lookahead/hierarchy.hpp"
#include "lookahead/predictor.hpp"
#include "lookahead/synth.hpp"
#include "lookahead/util.hpp"

namespace lk = lookahead;

namespace {

// Ties CLI flags to config-file keys: an explicit flag wins, otherwise a
// `key=value` line from --config fills in, otherwise the default stands.
struct ConfigBinder {
  CLI::App* app;
  std::string config_path;
  std::vector<std::function<void(const lk::Config&)>> fills;

  explicit ConfigBinder(CLI::App* a) : app(a) {
    app->add_option("--config", config_path,
                    "key=value config file (supports `include`)");
  }

  template <class T>
  CLI::Option* bind(const std::string& flag, const std::string& key, T& var,
                    const std::string& desc) {
    CLI::Option* opt = app->add_option(flag, var, desc);
    fills.push_back([opt, key, &var](const lk::Config& c) {
      if (opt->count() > 0 || !c.has(key)) return;
      if constexpr (std::is_same_v<T, std::string>)
        var = c.get(key, var);
      else if constexpr (std::is_same_v<T, bool>)
        var = c.get(key, var);
      else if constexpr (std::is_floating_point_v<T>)
        var = static_cast<T>(c.get(key, static_cast<double>(var)));
      else
        var = static_cast<T>(c.get(key, static_cast<long>(var)));
    });
    return opt;
  }

  CLI::Option* bind_flag(const std::string& flag, const std::string& key,
                         bool& var, const std::string& desc) {
    CLI::Option* opt = app->add_flag(flag, var, desc);
    fills.push_back([opt, key, &var](const lk::Config& c) {
      if (opt->count() == 0 && c.has(key)) var = c.get(key, var);
    });
    return opt;
  }

  void apply() {
    if (config_path.empty()) return;
    lk::Config c = lk::Config::load(config_path);
    for (auto& f : fills) f(c);
  }
};

std::vector<lk::Tree> read_trees(const std::string& path) {
  return lk::read_ptb(lk::slurp(path), &std::cerr);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

std::vector<std::vector<lk::TaggedWord>> read_tagged_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return lk::read_tagged(in);
}

lk::HeadRules head_rules_from(const std::string& path) {
  if (path.empty()) return lk::HeadRules::default_rules();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open head-rule file: " + path);
  return lk::HeadRules::load(in);
}

// Index-ordered parallel map; results land by index, so output order never
// depends on the worker count.
void parallel_for(int workers, std::size_t n,
                  const std::function<void(std::size_t)>& f) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int count = std::min<int>(workers, static_cast<int>(n));
  for (int w = 0; w < count; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) f(i);
    });
  for (auto& t : pool) t.join();
}

void bind_predictor_config(ConfigBinder& b, lk::PredictorConfig& cfg,
                           bool& no_chars, bool& no_wins) {
  b.bind("--word-dim", "word_dim", cfg.word_dim, "word embedding size");
  b.bind("--word-win", "word_win", cfg.word_win, "word window radius");
  b.bind("--char-dim", "char_dim", cfg.char_dim, "character embedding size");
  b.bind("--char-win", "char_win", cfg.char_win, "character window radius");
  b.bind("--hidden", "hidden", cfg.hidden, "LSTM hidden size per direction");
  b.bind("--char-hidden", "char_hidden", cfg.char_hidden,
         "character composition size");
  b.bind("--layers", "layers", cfg.layers, "encoder LSTM layers");
  b.bind("--max-depth", "max_depth", cfg.max_depth, "hierarchy depth cap");
  b.bind("--epochs", "epochs", cfg.epochs, "training epochs");
  b.bind("--seed", "seed", cfg.seed, "RNG seed");
  b.bind("--lr", "lr", cfg.lr, "learning rate");
  b.bind("--momentum", "momentum", cfg.momentum, "momentum coefficient");
  b.bind("--l2", "l2", cfg.l2, "L2 regularization strength");
  b.bind("--unk-cutoff", "unk_cutoff", cfg.unk_cutoff,
         "rare-word frequency cutoff");
  b.bind("--unk-prob", "unk_prob", cfg.unk_prob,
         "probability of replacing a rare word with UNK");
  b.bind_flag("--no-chars", "no_chars", no_chars,
              "disable the character attention input");
  b.bind_flag("--no-wins", "no_wins", no_wins, "disable input windows");
}

std::vector<std::string> sentence_words(const std::vector<lk::TaggedWord>& s) {
  std::vector<std::string> ws;
  ws.reserve(s.size());
  for (const auto& w : s) ws.push_back(w.word);
  return ws;
}

std::vector<std::string> tree_words(const lk::Tree& t) {
  std::vector<std::string> ws;
  for (const lk::Tree* l : t.leaves()) ws.push_back(l->word);
  return ws;
}

// ---------------------------------------------------------------------------

int cmd_synth(const std::string& out_path, std::uint64_t seed, int count,
              int min_words, int max_words) {
  lk::SynthTreebank gen(seed);
  auto trees = gen.corpus(count, min_words, max_words);
  if (count < 1) throw std::runtime_error("--count must be >= 1");
  if (out_path.empty()) {
    lk::write_ptb(std::cout, trees);
  } else {
    auto out = open_out(out_path);
    lk::write_ptb(out, trees);
  }
  return 0;
}

int cmd_extract(const std::string& gold_path, const std::string& out_path) {
  auto trees = read_trees(gold_path);
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file = open_out(out_path);
    out = &file;
  }
  for (const auto& t : trees)
    lk::write_hierarchies(*out, tree_words(t), lk::extract_hierarchies(t));
  return 0;
}

int cmd_train_predictor(const std::string& train_path,
                        const std::string& dev_path,
                        const std::string& out_path,
                        const lk::PredictorConfig& cfg) {
  auto train = read_trees(train_path);
  std::vector<lk::Tree> dev;
  if (!dev_path.empty()) dev = read_trees(dev_path);
  lk::PredictorModel m = lk::train_predictor(
      train, cfg, dev.empty() ? nullptr : &dev, &std::cerr);
  auto out = open_out(out_path);
  lk::save_predictor(out, m);
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& tagged_path,
                const std::string& ptb_path, const std::string& out_path,
                const std::string& stats_path, int workers, bool f32) {
  if (tagged_path.empty() == ptb_path.empty())
    throw std::runtime_error("give exactly one of --input and --ptb");
  std::ifstream min(model_path);
  if (!min) throw std::runtime_error("cannot open model: " + model_path);
  lk::PredictorModel m = lk::load_predictor(min);
  if (f32) {
    m.params_s.quantize_to_float();
    m.params_e.quantize_to_float();
  }

  std::vector<std::vector<std::string>> sentences;
  std::vector<lk::Tree> gold;
  if (!ptb_path.empty()) {
    gold = read_trees(ptb_path);
    for (const auto& t : gold) sentences.push_back(tree_words(t));
  } else {
    for (const auto& s : read_tagged_file(tagged_path))
      sentences.push_back(sentence_words(s));
  }

  std::vector<lk::SentenceHierarchies> preds(sentences.size());
  std::vector<lk::PredictStats> stats(sentences.size());
  parallel_for(workers, sentences.size(), [&](std::size_t i) {
    preds[i] = lk::predict_sentence(m, sentences[i], &stats[i]);
  });

  {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
      file = open_out(out_path);
      out = &file;
    }
    for (std::size_t i = 0; i < sentences.size(); ++i)
      lk::write_hierarchies(*out, sentences[i], preds[i]);
  }

  if (!stats_path.empty()) {
    lk::PredictStats total;
    for (const auto& s : stats) {
      total.words += s.words;
      total.depth_cap_hits += s.depth_cap_hits;
    }
    auto out = open_out(stats_path);
    out << "words " << total.words << '\n'
        << "depth_cap_hits " << total.depth_cap_hits << '\n';
    if (!gold.empty()) {
      lk::HierarchyCounts cs, ce;
      for (std::size_t i = 0; i < gold.size(); ++i) {
        auto gh = lk::extract_hierarchies(gold[i]);
        for (std::size_t j = 0; j < gh.size(); ++j) {
          cs.add(preds[i][j].start, gh[j].start);
          ce.add(preds[i][j].end, gh[j].end);
        }
      }
      out << "s_f1 " << cs.prf().f1 << '\n' << "e_f1 " << ce.prf().f1 << '\n';
    }
  }
  return 0;
}

int cmd_jackknife(const std::string& train_path, const std::string& out_path,
                  int folds, const lk::PredictorConfig& cfg) {
  auto train = read_trees(train_path);
  auto preds = lk::jackknife(train, folds, cfg, &std::cerr);
  auto out = open_out(out_path);
  for (std::size_t i = 0; i < train.size(); ++i)
    lk::write_hierarchies(out, tree_words(train[i]), preds[i]);
  return 0;
}

int cmd_train_parser(const std::string& train_path,
                     const std::string& hier_path,
                     const std::string& rules_path,
                     const std::string& out_path, const lk::TrainOptions& opt,
                     bool binary) {
  auto train = read_trees(train_path);

  std::vector<lk::SentenceHierarchies> hier;
  std::vector<const lk::SentenceHierarchies*> ptrs;
  std::string hier_hash = "-";
  if (!hier_path.empty()) {
    std::ifstream in(hier_path);
    if (!in) throw std::runtime_error("cannot open hierarchies: " + hier_path);
    lk::HierarchyFile f = lk::read_hierarchies(in);
    if (f.sentences.size() != train.size())
      throw std::runtime_error("hierarchy file covers " +
                               std::to_string(f.sentences.size()) +
                               " sentences, treebank has " +
                               std::to_string(train.size()));
    hier = std::move(f.sentences);
    for (const auto& h : hier) ptrs.push_back(&h);
    hier_hash = lk::file_hash(hier_path);
  }

  lk::LinearModel model = lk::train_parser(
      train, ptrs.empty() ? nullptr : &ptrs, opt, head_rules_from(rules_path));
  model.hierarchy_source_hash = hier_hash;
  auto out = open_out(out_path);
  binary ? model.save_binary(out) : model.save_text(out);
  return 0;
}

int cmd_parse(const std::string& model_path, const std::string& tagged_path,
              const std::string& hier_path, const std::string& out_path,
              int beam, bool no_averaged, int workers) {
  std::ifstream min(model_path);
  if (!min) throw std::runtime_error("cannot open model: " + model_path);
  lk::LinearModel model = lk::LinearModel::load(min);
  auto sentences = read_tagged_file(tagged_path);

  std::vector<lk::SentenceHierarchies> hier;
  if (!hier_path.empty()) {
    std::ifstream in(hier_path);
    if (!in) throw std::runtime_error("cannot open hierarchies: " + hier_path);
    lk::HierarchyFile f = lk::read_hierarchies(in);
    if (f.sentences.size() != sentences.size())
      throw std::runtime_error("hierarchy/sentence count mismatch");
    hier = std::move(f.sentences);
  }

  lk::DecodeOptions opt;
  opt.beam = beam;
  opt.use_averaged = !no_averaged;
  std::vector<lk::Tree> out_trees(sentences.size());
  parallel_for(workers, sentences.size(), [&](std::size_t i) {
    const lk::SentenceHierarchies* ph = hier.empty() ? nullptr : &hier[i];
    out_trees[i] = lk::beam_parse(sentences[i], ph, model, opt);
  });

  if (out_path.empty()) {
    lk::write_ptb(std::cout, out_trees);
  } else {
    auto out = open_out(out_path);
    lk::write_ptb(out, out_trees);
  }
  return 0;
}

int cmd_evaluate(const std::string& gold_path, const std::string& pred_path) {
  auto gold = read_trees(gold_path);
  auto pred = read_trees(pred_path);
  lk::BracketScore s = lk::bracket_f1(pred, gold);
  std::cout << "sentences " << gold.size() << '\n'
            << "matched " << s.matched << '\n'
            << "predicted " << s.predicted << '\n'
            << "gold " << s.gold << '\n'
            << "LP " << s.lp() << '\n'
            << "LR " << s.lr() << '\n'
            << "F1 " << s.f1 << '\n';
  return 0;
}

int cmd_report(const std::string& gold_path, const std::string& pred_path,
               const std::string& out_path) {
  auto gold = read_trees(gold_path);
  auto pred = read_trees(pred_path);
  lk::BracketScore s = lk::bracket_f1(pred, gold);
  lk::Breakdown b = lk::breakdown(pred, gold);
  std::cout << "overall F1 " << s.f1 << " (LP " << s.lp() << ", LR " << s.lr()
            << ", " << gold.size() << " sentences)\n";
  if (out_path.empty()) {
    lk::write_breakdown(std::cout, b);
  } else {
    auto out = open_out(out_path);
    lk::write_breakdown(out, b);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lookahead constituent parsing toolkit"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic treebank");
  ConfigBinder synth_b(synth);
  std::string synth_out;
  std::uint64_t synth_seed = 1;
  int synth_count = 100, synth_min = 5, synth_max = 40;
  synth_b.bind("--seed", "seed", synth_seed, "RNG seed");
  synth_b.bind("--count", "count", synth_count, "number of trees");
  synth_b.bind("--min-words", "min_words", synth_min, "minimum sentence length");
  synth_b.bind("--max-words", "max_words", synth_max, "maximum sentence length");
  synth->add_option("--out", synth_out, "output file (default stdout)");

  // extract-hierarchies
  auto* extract =
      app.add_subcommand("extract-hierarchies", "gold hierarchies from trees");
  std::string extract_gold, extract_out;
  extract->add_option("treebank", extract_gold, "bracketed treebank")
      ->required();
  extract->add_option("--out", extract_out, "output file (default stdout)");

  // train-predictor
  auto* trainp =
      app.add_subcommand("train-predictor", "train the hierarchy predictor");
  ConfigBinder trainp_b(trainp);
  std::string trainp_train, trainp_dev, trainp_out;
  lk::PredictorConfig trainp_cfg;
  bool trainp_nochars = false, trainp_nowins = false;
  trainp->add_option("--train", trainp_train, "training treebank")->required();
  trainp->add_option("--dev", trainp_dev,
                     "development treebank for best-epoch selection");
  trainp->add_option("--out", trainp_out, "model output file")->required();
  bind_predictor_config(trainp_b, trainp_cfg, trainp_nochars, trainp_nowins);

  // predict
  auto* predict =
      app.add_subcommand("predict", "predict hierarchies for sentences");
  std::string pr_model, pr_input, pr_ptb, pr_out, pr_stats;
  int pr_workers = 1;
  bool pr_f32 = false;
  predict->add_option("--model", pr_model, "predictor model file")->required();
  predict->add_option("--input", pr_input, "tagged sentences (word_POS)");
  predict->add_option("--ptb", pr_ptb,
                      "bracketed trees (enables hierarchy F1 in --stats)");
  predict->add_option("--out", pr_out, "hierarchy output (default stdout)");
  predict->add_option("--stats", pr_stats, "stats sidecar file");
  predict->add_option("--workers", pr_workers, "worker threads");
  predict->add_flag("--f32", pr_f32, "32-bit float inference");

  // jackknife
  auto* jack = app.add_subcommand(
      "jackknife", "fold-wise hierarchy predictions for a training set");
  ConfigBinder jack_b(jack);
  std::string jack_train, jack_out;
  int jack_folds = 10;
  lk::PredictorConfig jack_cfg;
  bool jack_nochars = false, jack_nowins = false;
  jack->add_option("--train", jack_train, "training treebank")->required();
  jack->add_option("--out", jack_out, "hierarchy output file")->required();
  jack_b.bind("--folds", "folds", jack_folds, "number of folds");
  bind_predictor_config(jack_b, jack_cfg, jack_nochars, jack_nowins);

  // train-parser
  auto* trains = app.add_subcommand("train-parser",
                                    "train the shift-reduce parser");
  ConfigBinder trains_b(trains);
  std::string ts_train, ts_hier, ts_rules, ts_out;
  lk::TrainOptions ts_opt;
  bool ts_no_early = false, ts_binary = false, ts_train_f1 = false;
  trains->add_option("--train", ts_train, "training treebank")->required();
  trains->add_option("--hierarchies", ts_hier,
                     "jackknifed hierarchy predictions (enables lookahead)");
  trains->add_option("--head-rules", ts_rules, "head rule table file");
  trains->add_option("--out", ts_out, "model output file")->required();
  trains_b.bind("--beam", "beam", ts_opt.beam, "beam size");
  trains_b.bind("--epochs", "epochs", ts_opt.epochs, "training epochs");
  trains_b.bind("--seed", "seed", ts_opt.seed, "shuffle seed");
  trains_b.bind_flag("--no-early-update", "no_early_update", ts_no_early,
                     "disable early update (ablation)");
  trains->add_flag("--log-train-f1", ts_train_f1,
                   "log training-set F1 per epoch");
  trains->add_flag("--binary", ts_binary, "binary model format");

  // parse
  auto* parse = app.add_subcommand("parse", "parse tagged sentences");
  ConfigBinder parse_b(parse);
  std::string pa_model, pa_input, pa_hier, pa_out;
  int pa_beam = 16, pa_workers = 1;
  bool pa_no_avg = false;
  parse->add_option("--model", pa_model, "parser model file")->required();
  parse->add_option("--input", pa_input, "tagged sentences (word_POS)")
      ->required();
  parse->add_option("--hierarchies", pa_hier,
                    "predicted hierarchies for lookahead features");
  parse->add_option("--out", pa_out, "output trees (default stdout)");
  parse_b.bind("--beam", "beam", pa_beam, "beam size");
  parse->add_option("--workers", pa_workers, "worker threads");
  parse->add_flag("--no-averaged", pa_no_avg, "score with raw weights");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "bracketing precision/recall/F1");
  std::string ev_gold, ev_pred;
  eval->add_option("--gold", ev_gold, "gold treebank")->required();
  eval->add_option("--pred", ev_pred, "predicted trees")->required();

  // report
  auto* report =
      app.add_subcommand("report", "error breakdowns by label/span/length");
  std::string rp_gold, rp_pred, rp_out;
  report->add_option("--gold", rp_gold, "gold treebank")->required();
  report->add_option("--pred", rp_pred, "predicted trees")->required();
  report->add_option("--out", rp_out, "tabular output (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      synth_b.apply();
      return cmd_synth(synth_out, synth_seed, synth_count, synth_min, synth_max);
    }
    if (*extract) return cmd_extract(extract_gold, extract_out);
    if (*trainp) {
      trainp_b.apply();
      trainp_cfg.use_chars = !trainp_nochars;
      trainp_cfg.use_wins = !trainp_nowins;
      trainp_cfg.validate();
      return cmd_train_predictor(trainp_train, trainp_dev, trainp_out,
                                 trainp_cfg);
    }
    if (*predict)
      return cmd_predict(pr_model, pr_input, pr_ptb, pr_out, pr_stats,
                         pr_workers, pr_f32);
    if (*jack) {
      jack_b.apply();
      jack_cfg.use_chars = !jack_nochars;
      jack_cfg.use_wins = !jack_nowins;
      jack_cfg.validate();
      return cmd_jackknife(jack_train, jack_out, jack_folds, jack_cfg);
    }
    if (*trains) {
      trains_b.apply();
      ts_opt.early_update = !ts_no_early;
      ts_opt.log_train_f1 = ts_train_f1;
      ts_opt.log = &std::cerr;
      return cmd_train_parser(ts_train, ts_hier, ts_rules, ts_out, ts_opt,
                              ts_binary);
    }
    if (*parse) {
      parse_b.apply();
      return cmd_parse(pa_model, pa_input, pa_hier, pa_out, pa_beam, pa_no_avg,
                       pa_workers);
    }
    if (*eval) return cmd_evaluate(ev_gold, ev_pred);
    if (*report) return cmd_report(rp_gold, rp_pred, rp_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
