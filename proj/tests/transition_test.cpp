#include <catch2/catch_amalgamated.hpp>

#include "lookahead/transition.hpp"
#include "test_util.hpp"

using namespace lookahead;

namespace {

Grammar toy_grammar() {
  Grammar g;
  g.reduce_labels = {"NP", "NP*", "S", "VP"};
  g.unary_labels = {"NP", "S", "VP"};
  return g;
}

const std::vector<TaggedWord> kSentence{
    {"They", "PRP"}, {"like", "VBP"}, {"apples", "NNS"}};

bool contains(const std::vector<Action>& as, const Action& a) {
  return std::find(as.begin(), as.end(), a) != as.end();
}

}  // namespace

TEST_CASE("initial state allows only SHIFT") {
  auto s = ParserState::initial();
  auto as = legal_actions(*s, 3, toy_grammar());
  REQUIRE(as.size() == 1);
  CHECK(as[0] == Action::shift());
}

TEST_CASE("completed state allows only IDLE") {
  auto s = ParserState::initial();
  std::vector<TaggedWord> one{{"w", "NN"}};
  s = apply(s, Action::shift(), one);
  s = apply(s, Action::unary("NP"), one);
  s = apply(s, Action::finish(), one);
  CHECK(s->completed);
  auto as = legal_actions(*s, 1, toy_grammar());
  REQUIRE(as.size() == 1);
  CHECK(as[0] == Action::idle());
}

TEST_CASE("single item with empty buffer allows unaries and FINISH") {
  auto s = ParserState::initial();
  std::vector<TaggedWord> one{{"w", "NN"}};
  s = apply(s, Action::shift(), one);
  auto as = legal_actions(*s, 1, toy_grammar());
  for (const auto& lbl : toy_grammar().unary_labels)
    CHECK(contains(as, Action::unary(lbl)));
  CHECK(contains(as, Action::finish()));
  CHECK(!contains(as, Action::shift()));
  CHECK(!contains(as, Action::reduce_l("NP")));
}

TEST_CASE("the worked three-word derivation rebuilds its tree") {
  std::vector<Action> seq{Action::shift(),          Action::shift(),
                          Action::shift(),          Action::reduce_l("VP"),
                          Action::reduce_r("S"),    Action::finish()};
  auto s = replay(seq, kSentence);
  CHECK(s->completed);
  CHECK(s->action_count == 6);
  Tree t = state_tree(*s);
  CHECK(write_ptb(t) == "(S (PRP They) (VP (VBP like) (NNS apples)))");
  // REDUCE-L marks the left child as head
  CHECK(s->top().node->head_word() == "like");
}

TEST_CASE("oracle of the worked example is the exact sequence") {
  Tree t = read_ptb("(S (PRP They) (VP (VBP like) (NNS apples)))")[0];
  // Verb-headed VP and VP-headed S give the classic action letters.
  std::istringstream rules_in("VP first\nS last\n");
  HeadRules rules = HeadRules::load(rules_in);
  auto actions = oracle(binarize(t, rules));
  std::vector<std::string> strs;
  for (const auto& a : actions) strs.push_back(a.str());
  CHECK(strs == std::vector<std::string>{"SHIFT", "SHIFT", "SHIFT",
                                         "REDUCE-L-VP", "REDUCE-R-S",
                                         "FINISH"});
  // The default table picks different head sides but the same structure.
  auto dflt = replay(oracle(binarize(t)), tagged_words(t));
  CHECK(state_tree(*dflt) == t);
}

TEST_CASE("IDLE changes only the action count") {
  auto s = ParserState::initial();
  std::vector<TaggedWord> one{{"w", "NN"}};
  s = apply(s, Action::shift(), one);
  s = apply(s, Action::finish(), one);
  auto s2 = apply(s, Action::idle(), one);
  CHECK(s2->action_count == s->action_count + 1);
  CHECK(s2->stack == s->stack);
  CHECK(s2->buffer_front == s->buffer_front);
  CHECK(s2->completed);
}

TEST_CASE("SHIFT advances the buffer and deepens the stack") {
  auto s = ParserState::initial();
  auto s2 = apply(s, Action::shift(), kSentence);
  CHECK(s2->buffer_front == 1);
  CHECK(s2->stack_depth() == 1);
  // source state untouched
  CHECK(s->buffer_front == 0);
  CHECK(s->stack_depth() == 0);
}

TEST_CASE("illegal actions are contract violations") {
  auto s = ParserState::initial();
  CHECK_THROWS_AS(apply(s, Action::finish(), kSentence), std::logic_error);
  CHECK_THROWS_AS(apply(s, Action::idle(), kSentence), std::logic_error);
  CHECK_THROWS_AS(apply(s, Action::reduce_l("NP"), kSentence), std::logic_error);
}

TEST_CASE("oracle of a single-word tree") {
  Tree t = read_ptb("(NP (NN word))")[0];
  auto actions = oracle(binarize(t));
  REQUIRE(actions.size() == 3);
  CHECK(actions[0] == Action::shift());
  CHECK(actions[1] == Action::unary("NP"));
  CHECK(actions[2] == Action::finish());
}

TEST_CASE("oracle round trip on random trees with action bound") {
  testing::RandomTreeGen gen(123);
  for (const Tree& t : gen.trees(200)) {
    BinPtr b = binarize(t);
    auto actions = oracle(b);
    const int n = t.word_count();
    CHECK(actions.size() >= 2 * static_cast<std::size_t>(n));
    CHECK(actions.size() <= 4 * static_cast<std::size_t>(n));
    auto s = replay(actions, tagged_words(t));
    REQUIRE(s->completed);
    CHECK(state_tree(*s) == t);
    CHECK(action_history(*s) == actions);
  }
}

TEST_CASE("oracle actions are always legal during replay") {
  testing::RandomTreeGen gen(99);
  Grammar g;
  std::vector<Tree> trees = gen.trees(50);
  std::vector<BinPtr> bins;
  for (const auto& t : trees) bins.push_back(binarize(t));
  g = Grammar::from_binarized(bins);
  for (std::size_t k = 0; k < trees.size(); ++k) {
    auto sent = tagged_words(trees[k]);
    const int n = static_cast<int>(sent.size());
    auto s = ParserState::initial();
    for (const auto& a : oracle(bins[k])) {
      auto legal = legal_actions(*s, n, g);
      CHECK(std::find(legal.begin(), legal.end(), a) != legal.end());
      s = apply(s, a, sent);
    }
  }
}

TEST_CASE("action text round trip") {
  for (const auto& a :
       {Action::shift(), Action::reduce_l("NP*"), Action::reduce_r("S"),
        Action::unary("ADJP"), Action::finish(), Action::idle()})
    CHECK(Action::parse(a.str()) == a);
}
