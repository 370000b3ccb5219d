#ifndef LOOKAHEAD_EVAL_HPP
#define LOOKAHEAD_EVAL_HPP

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "lookahead/tree.hpp"

namespace lookahead {

struct BracketScore {
  long matched = 0, predicted = 0, gold = 0;

  double lp() const { return predicted ? double(matched) / predicted : 1.0; }
  double lr() const { return gold ? double(matched) / gold : 1.0; }
  double f1_value() const {
    const double p = lp(), r = lr();
    if (predicted == 0 && gold == 0) return 1.0;
    return (p + r) > 0 ? 2 * p * r / (p + r) : 0.0;
  }
  double f1 = 0;  // filled by finalize()
  void finalize() { f1 = f1_value(); }
};

namespace detail {

struct Bracket {
  std::string label;
  int begin, end;
  auto operator<=>(const Bracket&) const = default;
};

// Labelled brackets of a tree. Preterminals carry no bracket (leaves hold
// word+POS), and a TOP/ROOT wrapper label is skipped, matching the
// standard evaluator's deletion list.
inline int collect_brackets(const Tree& t, int begin,
                            std::vector<Bracket>& out) {
  if (t.leaf()) return begin + 1;
  int end = begin;
  for (const auto& c : t.children) end = collect_brackets(c, end, out);
  if (t.label != "TOP" && t.label != "ROOT")
    out.push_back({t.label, begin, end});
  return end;
}

inline std::vector<Bracket> brackets(const Tree& t) {
  std::vector<Bracket> out;
  collect_brackets(t, 0, out);
  std::sort(out.begin(), out.end());
  return out;
}

inline long multiset_intersection(const std::vector<Bracket>& a,
                                  const std::vector<Bracket>& b) {
  long m = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) ++i;
    else if (b[j] < a[i]) ++j;
    else { ++m; ++i; ++j; }
  }
  return m;
}

}  // namespace detail

// Labelled bracketing precision/recall/F1, micro-averaged over the corpus.
inline BracketScore bracket_f1(const std::vector<Tree>& pred,
                               const std::vector<Tree>& gold) {
  if (pred.size() != gold.size())
    throw std::invalid_argument("pred/gold sentence counts differ");
  BracketScore s;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (tagged_words(pred[i]) != tagged_words(gold[i]))
      throw std::invalid_argument("leaf mismatch at sentence " +
                                  std::to_string(i + 1));
    auto bp = detail::brackets(pred[i]);
    auto bg = detail::brackets(gold[i]);
    s.matched += detail::multiset_intersection(bp, bg);
    s.predicted += static_cast<long>(bp.size());
    s.gold += static_cast<long>(bg.size());
  }
  s.finalize();
  return s;
}

// Error breakdowns in the style of the common analyses: per phrase type,
// per span length, and per sentence-length bin (width 10; [0,10) is bin 10).
struct Breakdown {
  std::map<std::string, BracketScore> by_label;
  std::map<int, BracketScore> by_span_length;
  std::map<int, BracketScore> by_sentence_bin;
};

inline int sentence_length_bin(int len, int max_bin = 50) {
  const int bin = (len / 10 + 1) * 10;
  return bin > max_bin ? max_bin + 1 : bin;  // max_bin+1 encodes "50+"
}

inline Breakdown breakdown(const std::vector<Tree>& pred,
                           const std::vector<Tree>& gold) {
  if (pred.size() != gold.size())
    throw std::invalid_argument("pred/gold sentence counts differ");
  Breakdown b;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    auto bp = detail::brackets(pred[i]);
    auto bg = detail::brackets(gold[i]);
    const int bin = sentence_length_bin(gold[i].word_count());

    std::multiset<detail::Bracket> gset(bg.begin(), bg.end());
    for (const auto& br : bp) {
      const bool hit = [&] {
        auto it = gset.find(br);
        if (it == gset.end()) return false;
        gset.erase(it);
        return true;
      }();
      auto bump = [&](BracketScore& s) {
        ++s.predicted;
        if (hit) ++s.matched;
      };
      bump(b.by_label[br.label]);
      bump(b.by_span_length[br.end - br.begin]);
      bump(b.by_sentence_bin[bin]);
    }
    for (const auto& br : bg) {
      ++b.by_label[br.label].gold;
      ++b.by_span_length[br.end - br.begin].gold;
      ++b.by_sentence_bin[bin].gold;
    }
  }
  for (auto& [_, s] : b.by_label) s.finalize();
  for (auto& [_, s] : b.by_span_length) s.finalize();
  for (auto& [_, s] : b.by_sentence_bin) s.finalize();
  return b;
}

inline void write_breakdown(std::ostream& out, const Breakdown& b,
                            int max_bin = 50) {
  out << "# TOP/ROOT wrappers and preterminals excluded from all counts\n";
  out << "section\tkey\tmatched\tpredicted\tgold\tLP\tLR\tF1\n";
  auto row = [&](const std::string& section, const std::string& key,
                 const BracketScore& s) {
    out << section << '\t' << key << '\t' << s.matched << '\t' << s.predicted
        << '\t' << s.gold << '\t' << s.lp() << '\t' << s.lr() << '\t'
        << s.f1_value() << '\n';
  };
  for (const auto& [label, s] : b.by_label) row("label", label, s);
  for (const auto& [len, s] : b.by_span_length)
    row("span", std::to_string(len), s);
  for (const auto& [bin, s] : b.by_sentence_bin)
    row("sentlen", bin > max_bin ? std::to_string(max_bin) + "+"
                                 : std::to_string(bin),
        s);
}

}  // namespace lookahead

#endif  // LOOKAHEAD_EVAL_HPP
