#ifndef LOOKAHEAD_TREE_HPP
#define LOOKAHEAD_TREE_HPP

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>
#include <istream>
#include <ostream>
#include <sstream>
#include <map>
#include <iostream>

namespace lookahead {

// Unbinarized constituency tree. Internal nodes carry a label and children;
// leaves carry a word and its POS tag.
struct Tree {
  std::string label;
  std::vector<Tree> children;
  std::string word;
  std::string pos;

  bool leaf() const { return children.empty(); }

  bool operator==(const Tree& o) const {
    if (leaf() != o.leaf()) return false;
    if (leaf()) return word == o.word && pos == o.pos;
    return label == o.label && children == o.children;
  }
  bool operator!=(const Tree& o) const { return !(*this == o); }

  static Tree make_leaf(std::string w, std::string p) {
    Tree t;
    t.word = std::move(w);
    t.pos = std::move(p);
    return t;
  }
  static Tree make_node(std::string lbl, std::vector<Tree> kids) {
    Tree t;
    t.label = std::move(lbl);
    t.children = std::move(kids);
    return t;
  }

  void leaves(std::vector<const Tree*>& out) const {
    if (leaf()) { out.push_back(this); return; }
    for (const auto& c : children) c.leaves(out);
  }
  std::vector<const Tree*> leaves() const {
    std::vector<const Tree*> out;
    leaves(out);
    return out;
  }
  int word_count() const {
    if (leaf()) return 1;
    int n = 0;
    for (const auto& c : children) n += c.word_count();
    return n;
  }
};

class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& msg, int line, int col)
      : std::runtime_error(msg + " at line " + std::to_string(line) +
                           ", column " + std::to_string(col)),
        line(line), col(col) {}
  int line;
  int col;
};

inline bool is_temporary_label(const std::string& lbl) {
  return !lbl.empty() && lbl.back() == '*';
}

// Binarized tree node. Internal nodes have one child (unary) or two
// (binary, with a head side). Temporary chain nodes carry a '*' suffix.
// Nodes are immutable and shared; parser states branch freely over them.
struct BinNode;
using BinPtr = std::shared_ptr<const BinNode>;

struct BinNode {
  std::string label;      // empty for leaves
  BinPtr left;            // unary child or left child
  BinPtr right;           // null for unary nodes and leaves
  int head_child = 0;     // 0 or 1, meaningful for binary nodes
  std::string word;       // leaf fields
  std::string pos;
  const BinNode* head = nullptr;  // leaf providing the lexical head

  bool leaf() const { return !left; }
  bool unary() const { return left && !right; }
  bool binary() const { return left && right; }
  bool temporary() const { return is_temporary_label(label); }

  const std::string& head_word() const { return head->word; }
  const std::string& head_pos() const { return head->pos; }

  static BinPtr make_leaf(std::string w, std::string p) {
    auto n = std::make_shared<BinNode>();
    n->word = std::move(w);
    n->pos = std::move(p);
    n->head = n.get();
    return n;
  }
  static BinPtr make_unary(std::string lbl, BinPtr child) {
    auto n = std::make_shared<BinNode>();
    n->label = std::move(lbl);
    n->head = child->head;
    n->left = std::move(child);
    return n;
  }
  static BinPtr make_binary(std::string lbl, BinPtr l, BinPtr r, int head_child) {
    auto n = std::make_shared<BinNode>();
    n->label = std::move(lbl);
    n->head_child = head_child;
    n->head = head_child == 0 ? l->head : r->head;
    n->left = std::move(l);
    n->right = std::move(r);
    return n;
  }
};

// Which child carries the lexical head when reducing, keyed by the parent
// label. Default table: VP and PP take the rightmost child, everything
// else the leftmost.
struct HeadRules {
  std::map<std::string, bool> head_last;  // label -> true if last child is head
  bool default_head_last = false;

  bool is_head_last(const std::string& label) const {
    auto it = head_last.find(label);
    return it != head_last.end() ? it->second : default_head_last;
  }

  static HeadRules default_rules() {
    HeadRules r;
    r.head_last["VP"] = true;
    r.head_last["PP"] = true;
    return r;
  }

  // One rule per line: "<LABEL> first|last". '#' comments and blank
  // lines ignored. "default first|last" sets the fallback.
  static HeadRules load(std::istream& in) {
    HeadRules r;
    std::string line;
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      std::istringstream ls(line);
      std::string label, side;
      if (!(ls >> label >> side)) continue;
      bool last;
      if (side == "last") last = true;
      else if (side == "first") last = false;
      else throw std::runtime_error("head rule side must be first|last: " + side);
      if (label == "default") r.default_head_last = last;
      else r.head_last[label] = last;
    }
    return r;
  }
};

namespace detail {

inline BinPtr binarize_node(const Tree& t, const HeadRules& rules);

inline std::vector<BinPtr> binarize_children(const Tree& t, const HeadRules& rules) {
  std::vector<BinPtr> out;
  out.reserve(t.children.size());
  for (const auto& c : t.children) out.push_back(binarize_node(c, rules));
  return out;
}

inline BinPtr binarize_node(const Tree& t, const HeadRules& rules) {
  if (t.leaf()) return BinNode::make_leaf(t.word, t.pos);
  auto kids = binarize_children(t, rules);
  if (kids.size() == 1) return BinNode::make_unary(t.label, kids[0]);
  const std::size_t k = kids.size();
  const std::size_t head = rules.is_head_last(t.label) ? k - 1 : 0;
  // Left-factored chain: ((c0 c1) c2) ... with temporary labels below the top.
  BinPtr acc = kids[0];
  for (std::size_t m = 1; m < k; ++m) {
    const bool top = (m == k - 1);
    const int hc = head >= m ? 1 : 0;
    acc = BinNode::make_binary(top ? t.label : t.label + "*", acc, kids[m], hc);
  }
  return acc;
}

inline void collect_unbinarized(const BinNode& n, std::vector<Tree>& out);

inline Tree unbinarize_node(const BinNode& n) {
  if (n.leaf()) return Tree::make_leaf(n.word, n.pos);
  if (n.temporary())
    throw std::runtime_error("temporary node '" + n.label + "' at tree root");
  Tree t;
  t.label = n.label;
  collect_unbinarized(*n.left, t.children);
  if (n.right) collect_unbinarized(*n.right, t.children);
  return t;
}

inline void collect_unbinarized(const BinNode& n, std::vector<Tree>& out) {
  if (!n.leaf() && n.temporary()) {
    collect_unbinarized(*n.left, out);
    if (n.right) collect_unbinarized(*n.right, out);
  } else {
    out.push_back(unbinarize_node(n));
  }
}

}  // namespace detail

inline BinPtr binarize(const Tree& t, const HeadRules& rules = HeadRules::default_rules()) {
  return detail::binarize_node(t, rules);
}

// Splices out all '*'-suffixed chain nodes. Throws if the root itself is
// temporary.
inline Tree unbinarize(const BinNode& b) { return detail::unbinarize_node(b); }
inline Tree unbinarize(const BinPtr& b) { return detail::unbinarize_node(*b); }

// ---------------------------------------------------------------------------
// Penn-bracketed reading and writing.

namespace detail {

struct PtbLexer {
  std::istream& in;
  int line = 1;
  int col = 0;
  int c = ' ';

  explicit PtbLexer(std::istream& in) : in(in) { advance(); }

  void advance() {
    c = in.get();
    if (c == '\n') { ++line; col = 0; }
    else ++col;
  }

  void skip_space_and_comments() {
    for (;;) {
      while (c != EOF && std::isspace(static_cast<unsigned char>(c))) advance();
      // '#' at the start of a line introduces a comment line
      if (c == '#' && col == 1) {
        while (c != EOF && c != '\n') advance();
        continue;
      }
      break;
    }
  }

  std::string token() {
    std::string t;
    while (c != EOF && c != '(' && c != ')' &&
           !std::isspace(static_cast<unsigned char>(c))) {
      t.push_back(static_cast<char>(c));
      advance();
    }
    return t;
  }
};

// Strip functional tags: truncate at the first '-' or '=' after position 0.
// Leaves labels like -NONE- and -LRB- intact.
inline std::string strip_label(const std::string& lbl) {
  for (std::size_t i = 1; i < lbl.size(); ++i)
    if (lbl[i] == '-' || lbl[i] == '=') return lbl.substr(0, i);
  return lbl;
}

struct RawTree {
  std::string label;
  std::vector<RawTree> children;
  std::string word;  // nonempty iff preterminal: label=POS, word set
  bool preterminal = false;
};

inline RawTree parse_group(PtbLexer& lx) {
  // Called with lx.c == '('
  const int line = lx.line, col = lx.col;
  lx.advance();
  lx.skip_space_and_comments();
  RawTree node;
  if (lx.c != '(' && lx.c != ')') node.label = lx.token();
  lx.skip_space_and_comments();
  if (lx.c == ')') {
    if (node.label.empty())
      throw parse_error("empty bracket group", line, col);
    throw parse_error("bracket group '" + node.label + "' has no children",
                      line, col);
  }
  if (lx.c != '(') {
    // Preterminal: (POS word)
    node.word = lx.token();
    node.preterminal = true;
    lx.skip_space_and_comments();
    if (lx.c != ')')
      throw parse_error("expected ')' after leaf word", lx.line, lx.col);
    lx.advance();
    return node;
  }
  while (lx.c == '(') {
    node.children.push_back(parse_group(lx));
    lx.skip_space_and_comments();
  }
  if (lx.c != ')')
    throw parse_error("unbalanced brackets (expected ')')", lx.line, lx.col);
  lx.advance();
  return node;
}

// Returns false when the subtree vanishes entirely (trace material).
inline bool normalize(const RawTree& raw, Tree& out) {
  if (raw.preterminal) {
    if (raw.label == "-NONE-") return false;
    out = Tree::make_leaf(raw.word, raw.label);
    return true;
  }
  Tree t;
  t.label = strip_label(raw.label);
  for (const auto& c : raw.children) {
    Tree kid;
    if (normalize(c, kid)) t.children.push_back(std::move(kid));
  }
  if (t.children.empty()) return false;
  out = std::move(t);
  return true;
}

}  // namespace detail

// Reads every top-level bracket group. An outer label-less wrapper
// "( (S ...) )" is unwrapped; functional tags are stripped and -NONE-
// subtrees removed. Trees that vanish after trace removal are skipped
// with a warning on `warnings`.
inline std::vector<Tree> read_ptb(std::istream& in,
                                  std::ostream* warnings = nullptr) {
  detail::PtbLexer lx(in);
  std::vector<Tree> trees;
  int index = 0;
  for (;;) {
    lx.skip_space_and_comments();
    if (lx.c == EOF) break;
    if (lx.c != '(')
      throw parse_error("expected '(' at start of tree", lx.line, lx.col);
    const int line = lx.line, col = lx.col;
    detail::RawTree raw = detail::parse_group(lx);
    ++index;
    // Unwrap "( (S ...) )"
    if (raw.label.empty() && !raw.preterminal && raw.children.size() == 1)
      raw = std::move(raw.children[0]);
    if (raw.label.empty() && !raw.preterminal)
      throw parse_error("label-less group with multiple children", line, col);
    Tree t;
    if (!detail::normalize(raw, t)) {
      if (warnings)
        *warnings << "warning: tree " << index
                  << " is empty after trace removal; skipped\n";
      continue;
    }
    trees.push_back(std::move(t));
  }
  return trees;
}

inline std::vector<Tree> read_ptb(const std::string& text,
                                  std::ostream* warnings = nullptr) {
  std::istringstream in(text);
  return read_ptb(in, warnings);
}

inline void write_ptb(std::ostream& out, const Tree& t) {
  if (t.leaf()) {
    out << '(' << t.pos << ' ' << t.word << ')';
    return;
  }
  out << '(' << t.label;
  for (const auto& c : t.children) {
    out << ' ';
    write_ptb(out, c);
  }
  out << ')';
}

inline std::string write_ptb(const Tree& t) {
  std::ostringstream out;
  write_ptb(out, t);
  return out.str();
}

inline void write_ptb(std::ostream& out, const std::vector<Tree>& ts) {
  for (const auto& t : ts) {
    write_ptb(out, t);
    out << '\n';
  }
}

// Tagged word as consumed by the parser front end.
struct TaggedWord {
  std::string word;
  std::string pos;
  bool operator==(const TaggedWord&) const = default;
};

inline std::vector<TaggedWord> tagged_words(const Tree& t) {
  std::vector<TaggedWord> out;
  for (const Tree* l : t.leaves()) out.push_back({l->word, l->pos});
  return out;
}

// "word_POS" tokens, one sentence per line. The split is at the last '_'.
inline std::vector<std::vector<TaggedWord>> read_tagged(std::istream& in) {
  std::vector<std::vector<TaggedWord>> sentences;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<TaggedWord> sent;
    std::string tok;
    while (ls >> tok) {
      auto us = tok.rfind('_');
      if (us == std::string::npos || us == 0 || us + 1 == tok.size())
        throw std::runtime_error("malformed word_POS token: " + tok);
      sent.push_back({tok.substr(0, us), tok.substr(us + 1)});
    }
    if (!sent.empty()) sentences.push_back(std::move(sent));
  }
  return sentences;
}

}  // namespace lookahead

#endif  // LOOKAHEAD_TREE_HPP
