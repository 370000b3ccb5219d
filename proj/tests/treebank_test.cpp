#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "lookahead/tree.hpp"
#include "test_util.hpp"

using namespace lookahead;

TEST_CASE("read_ptb parses a simple tree") {
  auto ts = read_ptb("(S (PRP They) (VBP like) (NP (NNS apples)))");
  REQUIRE(ts.size() == 1);
  const Tree& t = ts[0];
  CHECK(t.label == "S");
  auto ls = t.leaves();
  REQUIRE(ls.size() == 3);
  CHECK(ls[0]->word == "They");
  CHECK(ls[1]->word == "like");
  CHECK(ls[2]->word == "apples");
  CHECK(ls[2]->pos == "NNS");
}

TEST_CASE("read_ptb tolerates the outer wrapper and comments") {
  auto ts = read_ptb("# a comment line\n( (S (NN a) (NN b)) )\n(S (NN c))\n");
  REQUIRE(ts.size() == 2);
  CHECK(ts[0].label == "S");
  CHECK(ts[0].children.size() == 2);
  CHECK(ts[1].leaves()[0]->word == "c");
}

TEST_CASE("read_ptb rejects degenerate input") {
  CHECK_THROWS_AS(read_ptb("( )"), parse_error);
  CHECK_THROWS_AS(read_ptb("(S (NN a)"), parse_error);
  CHECK_THROWS_AS(read_ptb("(S (NN a))) extra )"), parse_error);
}

TEST_CASE("functional tags are stripped, traces removed") {
  auto ts = read_ptb("(NP-SBJ (DT The) (NN dog))");
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].label == "NP");

  ts = read_ptb("(S (NP-SBJ=2 (-NONE- *T*)) (VP (VB go)))");
  REQUIRE(ts.size() == 1);
  REQUIRE(ts[0].children.size() == 1);
  CHECK(ts[0].children[0].label == "VP");

  // -LRB- style labels keep their leading dash
  ts = read_ptb("(S (-LRB- -LRB-) (NN x))");
  CHECK(ts[0].leaves()[0]->pos == "-LRB-");
}

TEST_CASE("tree made only of traces is skipped with a warning") {
  std::ostringstream warn;
  auto ts = read_ptb("(S (-NONE- *)) (S (NN ok))", &warn);
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].leaves()[0]->word == "ok");
  CHECK(warn.str().find("skipped") != std::string::npos);
}

TEST_CASE("write_ptb emits canonical single-line form") {
  auto ts = read_ptb("(S   (PRP They)\n  (VP (VBP like) (NNS apples)))");
  CHECK(write_ptb(ts[0]) == "(S (PRP They) (VP (VBP like) (NNS apples)))");
}

TEST_CASE("read/write round trip on random trees") {
  testing::RandomTreeGen gen(7);
  auto trees = gen.trees(50);
  std::ostringstream out;
  write_ptb(out, trees);
  auto back = read_ptb(out.str());
  CHECK(back == trees);
}

TEST_CASE("binarize left-factors n-ary nodes with temporary labels") {
  auto t = read_ptb("(NP (DT a) (NN b) (NN c))")[0];
  BinPtr b = binarize(t);
  REQUIRE(b->binary());
  CHECK(b->label == "NP");
  CHECK(b->left->label == "NP*");
  CHECK(b->left->left->word == "a");
  CHECK(b->left->right->word == "b");
  CHECK(b->right->word == "c");
  CHECK(unbinarize(b) == t);
}

TEST_CASE("already binary nodes are unchanged") {
  auto t = read_ptb("(S (NN a) (NN b))")[0];
  BinPtr b = binarize(t);
  CHECK(b->binary());
  CHECK(b->left->leaf());
  CHECK(b->right->leaf());
  CHECK(unbinarize(b) == t);
}

TEST_CASE("head rules decide the lexical head") {
  auto t = read_ptb("(VP (VB eat) (NN pie))")[0];
  BinPtr b = binarize(t);  // VP defaults to head-last
  CHECK(b->head_word() == "pie");
  auto t2 = read_ptb("(NP (DT a) (NN dog))")[0];
  CHECK(binarize(t2)->head_word() == "a");

  std::istringstream rules_in("VP first\nNP last\n# comment\n");
  HeadRules rules = HeadRules::load(rules_in);
  CHECK(binarize(t, rules)->head_word() == "eat");
  CHECK(binarize(t2, rules)->head_word() == "dog");
}

TEST_CASE("unary chains are preserved") {
  auto t = read_ptb("(S (VP (VB go)))")[0];
  BinPtr b = binarize(t);
  REQUIRE(b->unary());
  CHECK(b->label == "S");
  REQUIRE(b->left->unary());
  CHECK(b->left->label == "VP");
  CHECK(unbinarize(b) == t);
}

TEST_CASE("unbinarize rejects a temporary root") {
  BinPtr temp = BinNode::make_binary("NP*", BinNode::make_leaf("a", "DT"),
                                     BinNode::make_leaf("b", "NN"), 0);
  CHECK_THROWS_AS(unbinarize(temp), std::runtime_error);
}

TEST_CASE("deep temporary chain flattens back to the n-ary node") {
  auto t = read_ptb("(NP (DT a) (NN b) (NN c) (NN d))")[0];
  Tree back = unbinarize(binarize(t));
  CHECK(back.children.size() == 4);
  CHECK(back == t);
}

TEST_CASE("binarize round trip on random trees") {
  testing::RandomTreeGen gen(42);
  for (const Tree& t : gen.trees(200)) {
    Tree back = unbinarize(binarize(t));
    CHECK(back == t);
    // leaf order preserved
    CHECK(tagged_words(back) == tagged_words(t));
  }
}

TEST_CASE("single-leaf tree round trips") {
  Tree t = Tree::make_leaf("word", "NN");
  CHECK(unbinarize(binarize(t)) == t);
}

TEST_CASE("read_tagged splits word_POS tokens") {
  std::istringstream in("They_PRP like_VBP apples_NNS\n\nsnake_case_word_NN x_X\n");
  auto sents = read_tagged(in);
  REQUIRE(sents.size() == 2);
  CHECK(sents[0][0] == TaggedWord{"They", "PRP"});
  CHECK(sents[1][0] == TaggedWord{"snake_case_word", "NN"});
  std::istringstream bad("oops\n");
  CHECK_THROWS(read_tagged(bad));
}
