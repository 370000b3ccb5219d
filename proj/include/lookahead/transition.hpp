#ifndef LOOKAHEAD_TRANSITION_HPP
#define LOOKAHEAD_TRANSITION_HPP

#include <algorithm>
#include <cassert>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "lookahead/tree.hpp"

namespace lookahead {

struct Action {
  enum class Kind { Shift, ReduceL, ReduceR, Unary, Finish, Idle };
  Kind kind = Kind::Shift;
  std::string label;  // for ReduceL/ReduceR/Unary

  bool operator==(const Action&) const = default;

  static Action shift() { return {Kind::Shift, {}}; }
  static Action reduce_l(std::string lbl) { return {Kind::ReduceL, std::move(lbl)}; }
  static Action reduce_r(std::string lbl) { return {Kind::ReduceR, std::move(lbl)}; }
  static Action unary(std::string lbl) { return {Kind::Unary, std::move(lbl)}; }
  static Action finish() { return {Kind::Finish, {}}; }
  static Action idle() { return {Kind::Idle, {}}; }

  std::string str() const {
    switch (kind) {
      case Kind::Shift: return "SHIFT";
      case Kind::ReduceL: return "REDUCE-L-" + label;
      case Kind::ReduceR: return "REDUCE-R-" + label;
      case Kind::Unary: return "UNARY-" + label;
      case Kind::Finish: return "FINISH";
      case Kind::Idle: return "IDLE";
    }
    return "?";
  }

  static Action parse(const std::string& s) {
    if (s == "SHIFT") return shift();
    if (s == "FINISH") return finish();
    if (s == "IDLE") return idle();
    if (s.rfind("REDUCE-L-", 0) == 0) return reduce_l(s.substr(9));
    if (s.rfind("REDUCE-R-", 0) == 0) return reduce_r(s.substr(9));
    if (s.rfind("UNARY-", 0) == 0) return unary(s.substr(6));
    throw std::runtime_error("unparseable action: " + s);
  }
};

// Label inventories collected from the training treebank. Reduce labels may
// include temporary '*' symbols; unary labels never do.
struct Grammar {
  std::vector<std::string> reduce_labels;
  std::vector<std::string> unary_labels;

  static Grammar from_binarized(const std::vector<BinPtr>& trees) {
    std::set<std::string> red, un;
    for (const auto& t : trees) collect(*t, red, un);
    Grammar g;
    g.reduce_labels.assign(red.begin(), red.end());
    g.unary_labels.assign(un.begin(), un.end());
    return g;
  }

 private:
  static void collect(const BinNode& n, std::set<std::string>& red,
                      std::set<std::string>& un) {
    if (n.leaf()) return;
    if (n.binary()) {
      red.insert(n.label);
      collect(*n.left, red, un);
      collect(*n.right, red, un);
    } else {
      un.insert(n.label);
      collect(*n.left, red, un);
    }
  }
};

// One stack entry: a binarized fragment with its span and the counts of
// completed unbinarized constituents anchored at the span's first and last
// word (the lookahead cursors).
struct StackItem {
  BinPtr node;
  int begin = 0;
  int end = 0;             // exclusive
  int start_consumed = 0;  // non-temporary constituents starting at `begin`
  int end_consumed = 0;    // non-temporary constituents ending at `end - 1`
  int unary_streak = 0;    // consecutive UNARY actions on this span
};

struct StackCell {
  StackItem item;
  std::shared_ptr<const StackCell> below;
  int depth = 1;
};

// Persistent parser state in the shape [stack, buffer front, completed,
// action count]. Applying an action never mutates; states share structure
// through `below` and `prev` links.
struct ParserState;
using StatePtr = std::shared_ptr<const ParserState>;

struct ParserState {
  std::shared_ptr<const StackCell> stack;
  int buffer_front = 0;
  bool completed = false;
  int action_count = 0;
  int unary_total = 0;
  double score = 0.0;
  StatePtr prev;
  Action last_action;

  int stack_depth() const { return stack ? stack->depth : 0; }
  const StackItem* stack_at(int i) const {
    const StackCell* c = stack.get();
    while (c && i > 0) { c = c->below.get(); --i; }
    return c ? &c->item : nullptr;
  }
  const StackItem& top() const { return stack->item; }

  static StatePtr initial() { return std::make_shared<ParserState>(); }
};

inline std::vector<Action> legal_actions(const ParserState& s, int n,
                                         const Grammar& g) {
  std::vector<Action> out;
  if (s.completed) {
    out.push_back(Action::idle());
    return out;
  }
  if (s.buffer_front < n) out.push_back(Action::shift());
  if (s.stack_depth() >= 2)
    for (const auto& lbl : g.reduce_labels) {
      out.push_back(Action::reduce_l(lbl));
      out.push_back(Action::reduce_r(lbl));
    }
  // Unary chains capped at 2 on a span; a global budget of 2n keeps every
  // derivation within the 4n action bound.
  if (s.stack_depth() >= 1 && s.top().unary_streak < 2 && s.unary_total < 2 * n)
    for (const auto& lbl : g.unary_labels) out.push_back(Action::unary(lbl));
  if (s.buffer_front == n && s.stack_depth() == 1 &&
      !s.top().node->temporary())
    out.push_back(Action::finish());
  return out;
}

inline StatePtr apply(const StatePtr& s, const Action& a,
                      const std::vector<TaggedWord>& sentence,
                      double action_score = 0.0) {
  auto ns = std::make_shared<ParserState>();
  ns->buffer_front = s->buffer_front;
  ns->stack = s->stack;
  ns->completed = s->completed;
  ns->unary_total = s->unary_total;
  ns->action_count = s->action_count + 1;
  ns->score = s->score + action_score;
  ns->prev = s;
  ns->last_action = a;

  auto push = [&](StackItem item, std::shared_ptr<const StackCell> below) {
    auto cell = std::make_shared<StackCell>();
    cell->item = std::move(item);
    cell->depth = below ? below->depth + 1 : 1;
    cell->below = std::move(below);
    ns->stack = cell;
  };

  switch (a.kind) {
    case Action::Kind::Shift: {
      if (s->completed || s->buffer_front >= static_cast<int>(sentence.size()))
        throw std::logic_error("illegal SHIFT");
      const auto& w = sentence[s->buffer_front];
      StackItem item;
      item.node = BinNode::make_leaf(w.word, w.pos);
      item.begin = s->buffer_front;
      item.end = s->buffer_front + 1;
      push(std::move(item), s->stack);
      ns->buffer_front = s->buffer_front + 1;
      break;
    }
    case Action::Kind::ReduceL:
    case Action::Kind::ReduceR: {
      if (s->completed || s->stack_depth() < 2)
        throw std::logic_error("illegal REDUCE");
      const StackItem& r = s->stack->item;
      const StackItem& l = s->stack->below->item;
      const bool temp = is_temporary_label(a.label);
      StackItem item;
      item.node = BinNode::make_binary(a.label, l.node, r.node,
                                       a.kind == Action::Kind::ReduceL ? 0 : 1);
      item.begin = l.begin;
      item.end = r.end;
      item.start_consumed = l.start_consumed + (temp ? 0 : 1);
      item.end_consumed = r.end_consumed + (temp ? 0 : 1);
      push(std::move(item), s->stack->below->below);
      break;
    }
    case Action::Kind::Unary: {
      if (s->completed || s->stack_depth() < 1 || s->top().unary_streak >= 2)
        throw std::logic_error("illegal UNARY");
      const StackItem& t = s->stack->item;
      StackItem item;
      item.node = BinNode::make_unary(a.label, t.node);
      item.begin = t.begin;
      item.end = t.end;
      item.start_consumed = t.start_consumed + 1;
      item.end_consumed = t.end_consumed + 1;
      item.unary_streak = t.unary_streak + 1;
      push(std::move(item), s->stack->below);
      ns->unary_total = s->unary_total + 1;
      break;
    }
    case Action::Kind::Finish: {
      if (s->completed || s->stack_depth() != 1 ||
          s->buffer_front != static_cast<int>(sentence.size()))
        throw std::logic_error("illegal FINISH");
      ns->completed = true;
      break;
    }
    case Action::Kind::Idle: {
      if (!s->completed) throw std::logic_error("illegal IDLE");
      break;
    }
  }
  return ns;
}

// Gold action sequence for a binarized tree: post-order SHIFT/UNARY/REDUCE
// followed by FINISH. Replaying through apply() reconstructs the tree.
inline void oracle_node(const BinNode& n, std::vector<Action>& out) {
  if (n.leaf()) {
    out.push_back(Action::shift());
  } else if (n.unary()) {
    oracle_node(*n.left, out);
    out.push_back(Action::unary(n.label));
  } else {
    oracle_node(*n.left, out);
    oracle_node(*n.right, out);
    out.push_back(n.head_child == 0 ? Action::reduce_l(n.label)
                                    : Action::reduce_r(n.label));
  }
}

inline std::vector<Action> oracle(const BinPtr& b) {
  std::vector<Action> out;
  oracle_node(*b, out);
  out.push_back(Action::finish());
  return out;
}

inline StatePtr replay(const std::vector<Action>& actions,
                       const std::vector<TaggedWord>& sentence) {
  StatePtr s = ParserState::initial();
  for (const auto& a : actions) s = apply(s, a, sentence);
  return s;
}

// Action sequence of a state, oldest first.
inline std::vector<Action> action_history(const ParserState& s) {
  std::vector<Action> out;
  for (const ParserState* p = &s; p->prev; p = p->prev.get())
    out.push_back(p->last_action);
  std::reverse(out.begin(), out.end());
  return out;
}

inline Tree state_tree(const ParserState& s) {
  if (s.stack_depth() != 1)
    throw std::logic_error("state does not hold a single finished tree");
  return unbinarize(s.top().node);
}

}  // namespace lookahead

#endif  // LOOKAHEAD_TRANSITION_HPP
