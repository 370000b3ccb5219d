#ifndef LOOKAHEAD_PARSER_MODEL_HPP
#define LOOKAHEAD_PARSER_MODEL_HPP

#include <cstdint>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "lookahead/hierarchy.hpp"
#include "lookahead/transition.hpp"

namespace lookahead {

inline constexpr const char* kNoneAtom = "#NONE#";
inline constexpr const char* kNullAtom = "NULL";

using FeatureVector = std::vector<std::string>;

namespace detail {

// Child navigation over the binarized fragment: 'l'/'r' step into a binary
// node's children, 'u' into a unary node's child.
inline const BinNode* navigate(const BinNode* n, const char* path) {
  for (; n && *path; ++path) {
    switch (*path) {
      case 'l': n = n->binary() ? n->left.get() : nullptr; break;
      case 'r': n = n->binary() ? n->right.get() : nullptr; break;
      case 'u': n = n->unary() ? n->left.get() : nullptr; break;
      default: n = nullptr;
    }
  }
  return n;
}

inline std::string atom_w(const BinNode* n) { return n ? n->head_word() : kNoneAtom; }
inline std::string atom_t(const BinNode* n) { return n ? n->head_pos() : kNoneAtom; }
// Constituent label; POS stands in for single-word items.
inline std::string atom_c(const BinNode* n) {
  if (!n) return kNoneAtom;
  return n->leaf() ? n->pos : n->label;
}

}  // namespace detail

// The 57 baseline templates: 18 unigram, 16 bigram, 8 trigram, 15 extended.
// Every template fires on every state; absent atoms render as #NONE#.
inline FeatureVector extract_baseline(const ParserState& state,
                                      const std::vector<TaggedWord>& sentence) {
  using detail::atom_c;
  using detail::atom_t;
  using detail::atom_w;
  using detail::navigate;

  const BinNode* s[4] = {};
  for (int i = 0; i < 4; ++i) {
    const StackItem* it = state.stack_at(i);
    s[i] = it ? it->node.get() : nullptr;
  }
  const int n = static_cast<int>(sentence.size());
  auto qw = [&](int i) -> std::string {
    const int j = state.buffer_front + i;
    return (!state.completed && j < n) ? sentence[j].word : kNoneAtom;
  };
  auto qt = [&](int i) -> std::string {
    const int j = state.buffer_front + i;
    return (!state.completed && j < n) ? sentence[j].pos : kNoneAtom;
  };

  FeatureVector f;
  f.reserve(57);
  auto emit = [&](const char* id, std::initializer_list<std::string> atoms) {
    std::string key = id;
    key += '=';
    bool first = true;
    for (const auto& a : atoms) {
      if (!first) key += '|';
      first = false;
      key += a;
    }
    f.push_back(std::move(key));
  };

  // Unigram
  emit("s0tc", {atom_t(s[0]), atom_c(s[0])});
  emit("s0wc", {atom_w(s[0]), atom_c(s[0])});
  emit("s1tc", {atom_t(s[1]), atom_c(s[1])});
  emit("s1wc", {atom_w(s[1]), atom_c(s[1])});
  emit("s2tc", {atom_t(s[2]), atom_c(s[2])});
  emit("s2wc", {atom_w(s[2]), atom_c(s[2])});
  emit("s3tc", {atom_t(s[3]), atom_c(s[3])});
  emit("s3wc", {atom_w(s[3]), atom_c(s[3])});
  emit("q0wt", {qw(0), qt(0)});
  emit("q1wt", {qw(1), qt(1)});
  emit("q2wt", {qw(2), qt(2)});
  emit("q3wt", {qw(3), qt(3)});
  emit("s0lwc", {atom_w(navigate(s[0], "l")), atom_c(navigate(s[0], "l"))});
  emit("s0rwc", {atom_w(navigate(s[0], "r")), atom_c(navigate(s[0], "r"))});
  emit("s0uwc", {atom_w(navigate(s[0], "u")), atom_c(navigate(s[0], "u"))});
  emit("s1lwc", {atom_w(navigate(s[1], "l")), atom_c(navigate(s[1], "l"))});
  emit("s1rwc", {atom_w(navigate(s[1], "r")), atom_c(navigate(s[1], "r"))});
  emit("s1uwc", {atom_w(navigate(s[1], "u")), atom_c(navigate(s[1], "u"))});
  // Bigram
  emit("s0ws1w", {atom_w(s[0]), atom_w(s[1])});
  emit("s0ws1c", {atom_w(s[0]), atom_c(s[1])});
  emit("s0cs1w", {atom_c(s[0]), atom_w(s[1])});
  emit("s0cs1c", {atom_c(s[0]), atom_c(s[1])});
  emit("s0wq0w", {atom_w(s[0]), qw(0)});
  emit("s0wq0t", {atom_w(s[0]), qt(0)});
  emit("s0cq0w", {atom_c(s[0]), qw(0)});
  emit("s0cq0t", {atom_c(s[0]), qt(0)});
  emit("q0wq1w", {qw(0), qw(1)});
  emit("q0wq1t", {qw(0), qt(1)});
  emit("q0tq1w", {qt(0), qw(1)});
  emit("q0tq1t", {qt(0), qt(1)});
  emit("s1wq0w", {atom_w(s[1]), qw(0)});
  emit("s1wq0t", {atom_w(s[1]), qt(0)});
  emit("s1cq0w", {atom_c(s[1]), qw(0)});
  emit("s1cq0t", {atom_c(s[1]), qt(0)});
  // Trigram
  emit("s0cs1cs2c", {atom_c(s[0]), atom_c(s[1]), atom_c(s[2])});
  emit("s0ws1cs2c", {atom_w(s[0]), atom_c(s[1]), atom_c(s[2])});
  emit("s0cs1wq0t", {atom_c(s[0]), atom_w(s[1]), qt(0)});
  emit("s0cs1cs2w", {atom_c(s[0]), atom_c(s[1]), atom_w(s[2])});
  emit("s0cs1cq0t", {atom_c(s[0]), atom_c(s[1]), qt(0)});
  emit("s0ws1cq0t", {atom_w(s[0]), atom_c(s[1]), qt(0)});
  emit("s0cs1wq0t2", {atom_c(s[0]), atom_w(s[1]), qt(0)});
  emit("s0cs1cq0w", {atom_c(s[0]), atom_c(s[1]), qw(0)});
  // Extended
  for (int i = 0; i < 2; ++i) {
    const std::string base = "s" + std::to_string(i);
    for (const char* p : {"ll", "lr", "lu", "rl", "rr", "ru", "ul", "ur", "uu"}) {
      if (i == 1 && p[0] == 'u') continue;  // Table 2 has no s1u* second level
      const BinNode* n = navigate(s[i], p);
      emit((base + p + "wc").c_str(), {atom_w(n), atom_c(n)});
    }
  }
  return f;
}

// Table 3 lookahead templates: s/e-type next-level constituent for s0, s1,
// q0, q1. Absent item -> #NONE#; present item with an empty or exhausted
// hierarchy -> NULL.
inline FeatureVector extract_lookahead(const ParserState& state,
                                       const std::vector<TaggedWord>& sentence,
                                       const SentenceHierarchies& pred) {
  FeatureVector f;
  f.reserve(8);
  auto value = [](std::optional<std::string> v) {
    return v ? *v : std::string(kNullAtom);
  };
  const int n = static_cast<int>(sentence.size());
  for (int i = 0; i < 2; ++i) {
    const StackItem* it = state.stack_at(i);
    const std::string id = "s" + std::to_string(i);
    f.push_back(id + "cgs=" +
                (it ? value(lookahead_value(*it, pred, HType::Start)) : kNoneAtom));
    f.push_back(id + "cge=" +
                (it ? value(lookahead_value(*it, pred, HType::End)) : kNoneAtom));
  }
  for (int i = 0; i < 2; ++i) {
    const int j = state.buffer_front + i;
    const bool present = !state.completed && j < n;
    const std::string id = "q" + std::to_string(i);
    f.push_back(id + "cgs=" +
                (present ? value(lookahead_value(j, pred, HType::Start)) : kNoneAtom));
    f.push_back(id + "cge=" +
                (present ? value(lookahead_value(j, pred, HType::End)) : kNoneAtom));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Sparse linear model with lazy averaging. Weights are keyed by
// (feature, action); baseline and lookahead templates share the map under
// disjoint template ids, so the extended score stays a single dot product.

class LinearModel {
 public:
  struct Entry {
    double w = 0;       // current weight
    double total = 0;   // sum of per-update snapshots through `last`
    long last = 0;      // update index accounted for in `total`
  };

  Grammar grammar;
  std::string hierarchy_source_hash = "-";

  long update_count() const { return update_count_; }
  std::size_t size() const { return table_.size(); }

  double weight(const std::string& feat, const std::string& action) const {
    auto it = table_.find(key(feat, action));
    return it == table_.end() ? 0.0 : it->second.w;
  }

  double averaged_weight(const std::string& feat, const std::string& action) const {
    auto it = table_.find(key(feat, action));
    if (it == table_.end()) return 0.0;
    return averaged(it->second);
  }

  double score(const FeatureVector& feats, const std::string& action,
               bool use_averaged) const {
    double s = 0;
    std::string k;
    for (const auto& f : feats) {
      k.assign(f);
      k += kSep;
      k += action;
      auto it = table_.find(k);
      if (it == table_.end()) continue;
      s += use_averaged ? averaged(it->second) : it->second.w;
    }
    return s;
  }

  struct Step {
    const FeatureVector* features;
    std::string action;
  };

  // One perceptron update: +1 along the gold prefix, -1 along the predicted
  // prefix. A shared prefix cancels exactly and is skipped.
  void perceptron_update(const std::vector<Step>& gold,
                         const std::vector<Step>& pred) {
    ++update_count_;
    std::size_t common = 0;
    while (common < gold.size() && common < pred.size() &&
           gold[common].action == pred[common].action)
      ++common;
    for (std::size_t i = common; i < gold.size(); ++i)
      bump(gold[i], +1.0);
    for (std::size_t i = common; i < pred.size(); ++i)
      bump(pred[i], -1.0);
  }

  // -------------------------------------------------------------------------
  // Serialization. Text records: feature TAB action TAB weight TAB averaged.

  void save_text(std::ostream& out) const {
    out << "lookahead-parser-model v1\n";
    out << "update_count " << update_count_ << '\n';
    out << "hierarchy_hash " << hierarchy_source_hash << '\n';
    out << "reduce_labels";
    for (const auto& l : grammar.reduce_labels) out << ' ' << l;
    out << "\nunary_labels";
    for (const auto& l : grammar.unary_labels) out << ' ' << l;
    out << "\nfeatures " << table_.size() << '\n';
    std::map<std::string, const Entry*> sorted;
    for (const auto& [k, e] : table_) sorted.emplace(k, &e);
    out << std::setprecision(17);
    for (const auto& [k, e] : sorted) {
      auto sep = k.find(kSep);
      out << k.substr(0, sep) << '\t' << k.substr(sep + 1) << '\t' << e->w
          << '\t' << averaged(*e) << '\n';
    }
  }

  void save_binary(std::ostream& out) const {
    out << "LAPM1\n";
    save_text(out);  // same payload behind a distinguishing magic
  }

  static LinearModel load(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty model file");
    if (line == "LAPM1") {
      if (!std::getline(in, line))
        throw std::runtime_error("truncated model file");
    }
    if (line != "lookahead-parser-model v1")
      throw std::runtime_error("model schema-version mismatch: " + line);
    LinearModel m;
    std::string word;
    in >> word >> m.update_count_;
    in >> word >> m.hierarchy_source_hash;
    in >> word;  // reduce_labels
    std::getline(in, line);
    {
      std::istringstream ls(line);
      std::string l;
      while (ls >> l) m.grammar.reduce_labels.push_back(l);
    }
    in >> word;  // unary_labels
    std::getline(in, line);
    {
      std::istringstream ls(line);
      std::string l;
      while (ls >> l) m.grammar.unary_labels.push_back(l);
    }
    std::size_t count = 0;
    in >> word >> count;
    std::getline(in, line);
    for (std::size_t i = 0; i < count; ++i) {
      if (!std::getline(in, line))
        throw std::runtime_error("truncated model file");
      std::istringstream ls(line);
      std::string feat, action, w, avg;
      std::getline(ls, feat, '\t');
      std::getline(ls, action, '\t');
      std::getline(ls, w, '\t');
      std::getline(ls, avg, '\t');
      Entry e;
      e.w = std::stod(w);
      // Reconstruct totals so averaged() reproduces the stored average.
      e.total = std::stod(avg) * static_cast<double>(m.update_count_);
      e.last = m.update_count_;
      m.table_.emplace(key(feat, action), e);
    }
    return m;
  }

 private:
  static constexpr char kSep = '\x1f';

  static std::string key(const std::string& feat, const std::string& action) {
    std::string k = feat;
    k += kSep;
    k += action;
    return k;
  }

  double averaged(const Entry& e) const {
    if (update_count_ == 0) return e.w;
    return (e.total + e.w * static_cast<double>(update_count_ - e.last)) /
           static_cast<double>(update_count_);
  }

  void bump(const Step& s, double delta) {
    for (const auto& f : *s.features) {
      Entry& e = table_[key(f, s.action)];
      e.total += e.w * static_cast<double>(update_count_ - 1 - e.last);
      e.last = update_count_ - 1;
      e.w += delta;
    }
  }

  std::unordered_map<std::string, Entry> table_;
  long update_count_ = 0;
};

}  // namespace lookahead

#endif  // LOOKAHEAD_PARSER_MODEL_HPP
