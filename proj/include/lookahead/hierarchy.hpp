#ifndef LOOKAHEAD_HIERARCHY_HPP
#define LOOKAHEAD_HIERARCHY_HPP

#include <optional>
#include <string>
#include <vector>
#include <istream>
#include <ostream>
#include <sstream>

#include "lookahead/transition.hpp"
#include "lookahead/tree.hpp"

namespace lookahead {

// Hierarchies deeper than this are truncated when stored (no WSJ tree
// comes close; guards the predictor's decode loop).
inline constexpr int kMaxHierarchyDepth = 32;

// Ordered top-down list of the constituents a word starts (s) or ends (e).
// Empty list is the phi case.
struct ConstituentHierarchy {
  std::vector<std::string> labels;  // outermost first

  bool empty() const { return labels.empty(); }
  std::size_t depth() const { return labels.size(); }
  bool operator==(const ConstituentHierarchy&) const = default;

  // Label at 1-based bottom-up position p (p=1 is the innermost).
  const std::string* bottom_up(std::size_t p) const {
    if (p == 0 || p > labels.size()) return nullptr;
    return &labels[labels.size() - p];
  }

  std::string str() const {
    if (labels.empty()) return "-";
    std::string s = labels[0];
    for (std::size_t i = 1; i < labels.size(); ++i) s += ">" + labels[i];
    return s;
  }
  static ConstituentHierarchy parse(const std::string& s) {
    ConstituentHierarchy h;
    if (s == "-" || s.empty()) return h;
    std::size_t pos = 0;
    while (pos <= s.size()) {
      auto gt = s.find('>', pos);
      if (gt == std::string::npos) {
        h.labels.push_back(s.substr(pos));
        break;
      }
      h.labels.push_back(s.substr(pos, gt - pos));
      pos = gt + 1;
    }
    return h;
  }
};

struct WordHierarchies {
  ConstituentHierarchy start;  // s-type
  ConstituentHierarchy end;    // e-type
  bool operator==(const WordHierarchies&) const = default;
};

using SentenceHierarchies = std::vector<WordHierarchies>;

namespace detail {

inline int hierarchy_walk(const Tree& t, int begin, SentenceHierarchies& out) {
  if (t.leaf()) return begin + 1;
  // Pre-order gives outermost-first on the s side directly.
  out[begin].start.labels.push_back(t.label);
  int end = begin;
  for (const auto& c : t.children) end = hierarchy_walk(c, end, out);
  out[end - 1].end.labels.push_back(t.label);
  return end;
}

}  // namespace detail

// Per-word s/e hierarchies of an unbinarized tree (POS leaves excluded).
inline SentenceHierarchies extract_hierarchies(const Tree& t) {
  SentenceHierarchies out(static_cast<std::size_t>(t.word_count()));
  detail::hierarchy_walk(t, 0, out);
  // e-side labels accumulate innermost-first (inner constituents close
  // before their ancestors); flip to outermost-first.
  for (auto& wh : out)
    std::reverse(wh.end.labels.begin(), wh.end.labels.end());
  return out;
}

enum class HType { Start, End };

// Next unconsumed level of `which`-type predicted hierarchy for a stack
// item, reading the prediction bottom-up past the constituents the item has
// already closed over its anchor word. Returns nullopt when the hierarchy
// is empty or exhausted (the NULL feature value, distinct from an absent
// item).
inline std::optional<std::string> lookahead_value(
    const StackItem& item, const SentenceHierarchies& pred, HType which) {
  if (which == HType::Start) {
    const auto& h = pred[item.begin].start;
    const std::string* lbl =
        h.bottom_up(static_cast<std::size_t>(item.start_consumed) + 1);
    if (!lbl) return std::nullopt;
    return *lbl;
  }
  const auto& h = pred[item.end - 1].end;
  const std::string* lbl =
      h.bottom_up(static_cast<std::size_t>(item.end_consumed) + 1);
  if (!lbl) return std::nullopt;
  return *lbl;
}

// Buffer words have consumed nothing yet.
inline std::optional<std::string> lookahead_value(
    int word_index, const SentenceHierarchies& pred, HType which) {
  const auto& h = which == HType::Start ? pred[word_index].start
                                        : pred[word_index].end;
  const std::string* lbl = h.bottom_up(1);
  if (!lbl) return std::nullopt;
  return *lbl;
}

// ---------------------------------------------------------------------------
// Hierarchy F1: positions aligned bottom-up; a label is correct iff the
// other side has the same label at the same bottom-up index.

struct PRF {
  double precision = 0, recall = 0, f1 = 0;
};

struct HierarchyCounts {
  long correct = 0, predicted = 0, gold = 0;

  void add(const ConstituentHierarchy& pred, const ConstituentHierarchy& gold_h) {
    const std::size_t np = pred.labels.size(), ng = gold_h.labels.size();
    for (std::size_t k = 1; k <= std::min(np, ng); ++k)
      if (*pred.bottom_up(k) == *gold_h.bottom_up(k)) ++correct;
    predicted += static_cast<long>(np);
    gold += static_cast<long>(ng);
  }

  PRF prf() const {
    PRF r;
    if (predicted == 0 && gold == 0) return {1, 1, 1};
    r.precision = predicted ? static_cast<double>(correct) / predicted : 0;
    r.recall = gold ? static_cast<double>(correct) / gold : 0;
    r.f1 = (r.precision + r.recall) > 0
               ? 2 * r.precision * r.recall / (r.precision + r.recall)
               : 0;
    return r;
  }
};

inline PRF hierarchy_f1(const ConstituentHierarchy& pred,
                        const ConstituentHierarchy& gold) {
  HierarchyCounts c;
  c.add(pred, gold);
  return c.prf();
}

// ---------------------------------------------------------------------------
// File format: one token per line, "word TAB s:S>NP TAB e:-", blank line
// between sentences.

inline void write_hierarchies(std::ostream& out,
                              const std::vector<std::string>& words,
                              const SentenceHierarchies& hs) {
  for (std::size_t i = 0; i < words.size(); ++i)
    out << words[i] << '\t' << "s:" << hs[i].start.str() << '\t'
        << "e:" << hs[i].end.str() << '\n';
  out << '\n';
}

struct HierarchyFile {
  std::vector<std::vector<std::string>> words;
  std::vector<SentenceHierarchies> sentences;
};

inline HierarchyFile read_hierarchies(std::istream& in) {
  HierarchyFile f;
  std::vector<std::string> words;
  SentenceHierarchies hs;
  std::string line;
  auto flush = [&] {
    if (!words.empty()) {
      f.words.push_back(std::move(words));
      f.sentences.push_back(std::move(hs));
      words.clear();
      hs.clear();
    }
  };
  while (std::getline(in, line)) {
    if (line.empty()) { flush(); continue; }
    std::istringstream ls(line);
    std::string w, s, e;
    if (!std::getline(ls, w, '\t') || !std::getline(ls, s, '\t') ||
        !std::getline(ls, e, '\t'))
      throw std::runtime_error("malformed hierarchy line: " + line);
    if (s.rfind("s:", 0) != 0 || e.rfind("e:", 0) != 0)
      throw std::runtime_error("malformed hierarchy line: " + line);
    words.push_back(w);
    hs.push_back({ConstituentHierarchy::parse(s.substr(2)),
                  ConstituentHierarchy::parse(e.substr(2))});
  }
  flush();
  return f;
}

}  // namespace lookahead

#endif  // LOOKAHEAD_HIERARCHY_HPP
