#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lookahead/tensor.hpp"

using namespace lookahead;

namespace {

// Central-difference check of d(loss)/d(param) for every parameter entry.
template <class Build>
void check_gradients(ParamStore& params, Build&& build, double h = 1e-5,
                     double tol = 1e-4) {
  ParamStore grads = params.zeros_like();
  {
    Tape t(params);
    t.backward(build(t), grads);
  }
  auto loss_value = [&] {
    Tape t(params);
    return t.value(build(t))(0);
  };
  for (auto& [name, m] : params.values) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double orig = m(i, j);
        m(i, j) = orig + h;
        const double lp = loss_value();
        m(i, j) = orig - h;
        const double lm = loss_value();
        m(i, j) = orig;
        const double numeric = (lp - lm) / (2 * h);
        const double analytic = grads.at(name)(i, j);
        INFO(name << "(" << i << "," << j << ")");
        CHECK(std::abs(numeric - analytic) <=
              tol * std::max(1.0, std::abs(numeric) + std::abs(analytic)));
      }
  }
}

ParamStore random_params(
    const std::vector<std::tuple<std::string, int, int>>& shapes,
    std::uint64_t seed) {
  ParamStore p;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.8, 0.8);
  for (const auto& [name, r, c] : shapes) {
    Mat& m = p.add(name, r, c);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = dist(rng);
  }
  return p;
}

}  // namespace

TEST_CASE("forward values of the primitive ops") {
  ParamStore p;
  p.add("I", 3, 3) = Mat::Identity(3, 3);
  p.add("v", 3) << 1, 2, 3;
  Tape t(p);

  auto x = t.input(Vec::Zero(3));
  CHECK(t.value(t.sigmoid(x)).isApproxToConstant(0.5));
  CHECK(t.value(t.tanh(x)).isZero());
  CHECK(t.value(t.softmax(x)).isApproxToConstant(1.0 / 3.0));
  CHECK(t.value(t.one_minus(x)).isApproxToConstant(1.0));

  auto v = t.param("v");
  CHECK(t.value(t.matvec("I", v)) == t.value(v));
  CHECK(t.value(t.add({v, v}))(2) == 6.0);
  CHECK(t.value(t.hadamard(v, v))(2) == 9.0);
  CHECK(t.value(t.dot(v, v))(0) == 14.0);
  CHECK(t.value(t.concat({v, x})).size() == 6);

  Vec w(2);
  w << 0.25, 0.75;
  auto ws = t.weighted_sum(t.input(w), {v, v});
  CHECK(t.value(ws) == t.value(v));

  Vec logits(3);
  logits << 0, 0, 0;
  auto xe = t.softmax_xent(t.input(logits), 1);
  CHECK(t.value(xe)(0) == Catch::Approx(std::log(3.0)));
  CHECK(t.probs(xe).isApproxToConstant(1.0 / 3.0));
}

TEST_CASE("gradients of individual ops") {
  SECTION("matvec and add with bias") {
    auto p = random_params({{"W", 3, 4}, {"b", 3, 1}, {"x", 4, 1}}, 1);
    check_gradients(p, [](Tape& t) {
      auto y = t.add({t.matvec("W", t.param("x")), t.param("b")});
      return t.dot(y, y);
    });
  }
  SECTION("tanh/sigmoid/one_minus chain") {
    auto p = random_params({{"x", 5, 1}, {"y", 5, 1}}, 2);
    check_gradients(p, [](Tape& t) {
      auto a = t.tanh(t.param("x"));
      auto b = t.sigmoid(t.param("y"));
      return t.dot(a, t.one_minus(b));
    });
  }
  SECTION("hadamard") {
    auto p = random_params({{"x", 4, 1}, {"y", 4, 1}}, 3);
    check_gradients(p, [](Tape& t) {
      auto z = t.hadamard(t.param("x"), t.param("y"));
      return t.dot(z, z);
    });
  }
  SECTION("concat and softmax") {
    auto p = random_params({{"x", 3, 1}, {"y", 2, 1}, {"v", 5, 1}}, 4);
    check_gradients(p, [](Tape& t) {
      auto s = t.softmax(t.concat({t.param("x"), t.param("y")}));
      return t.dot(s, t.param("v"));
    });
  }
  SECTION("weighted_sum") {
    auto p = random_params({{"w", 3, 1}, {"a", 4, 1}, {"b", 4, 1}, {"c", 4, 1}}, 5);
    check_gradients(p, [](Tape& t) {
      auto ws = t.weighted_sum(t.softmax(t.param("w")),
                               {t.param("a"), t.param("b"), t.param("c")});
      return t.dot(ws, ws);
    });
  }
  SECTION("softmax cross entropy") {
    auto p = random_params({{"W", 4, 3}, {"x", 3, 1}}, 6);
    check_gradients(p, [](Tape& t) {
      return t.softmax_xent(t.matvec("W", t.param("x")), 2);
    });
  }
  SECTION("embedding lookup") {
    auto p = random_params({{"emb", 6, 4}, {"W", 3, 4}}, 7);
    check_gradients(p, [](Tape& t) {
      auto y = t.matvec("W", t.lookup("emb", 2));
      return t.dot(y, y);
    });
  }
}

TEST_CASE("gradient of a composite graph touching every op") {
  auto p = random_params({{"emb", 5, 4},
                          {"W", 3, 4},
                          {"b", 3, 1},
                          {"M", 3, 3},
                          {"A", 2, 6},
                          {"v", 3, 1},
                          {"O", 4, 3}},
                         8);
  check_gradients(p, [](Tape& t) {
    auto x = t.lookup("emb", 2);
    auto z = t.sigmoid(t.add({t.matvec("W", x), t.param("b")}));
    auto u = t.tanh(t.matvec("M", z));
    auto g = t.hadamard(z, t.one_minus(u));
    auto w = t.softmax(t.matvec("A", t.concat({g, z})));
    auto ws = t.weighted_sum(w, {g, z});
    auto loss = t.softmax_xent(t.matvec("O", ws), 1);
    return t.add({loss, t.dot(ws, t.param("v"))});
  });
}

TEST_CASE("untouched embedding rows receive zero gradient") {
  auto p = random_params({{"emb", 5, 3}}, 9);
  ParamStore grads = p.zeros_like();
  Tape t(p);
  auto x = t.lookup("emb", 1);
  t.backward(t.dot(x, x), grads);
  CHECK(!grads.at("emb").row(1).isZero());
  for (int r : {0, 2, 3, 4}) CHECK(grads.at("emb").row(r).isZero());
}

TEST_CASE("tape rejects bad graphs") {
  ParamStore p;
  p.add("W", 3, 4);
  p.add("emb", 5, 2);
  Tape t(p);
  CHECK_THROWS_AS(t.matvec("W", t.input(Vec::Zero(3))), std::invalid_argument);
  CHECK_THROWS_AS(t.lookup("emb", 5), std::out_of_range);
  CHECK_THROWS_AS(t.add({t.input(Vec::Zero(2)), t.input(Vec::Zero(3))}),
                  std::invalid_argument);
  Vec bad(2);
  bad << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(t.input(bad), std::runtime_error);
  ParamStore grads = p.zeros_like();
  CHECK_THROWS_AS(t.backward(t.input(Vec::Zero(2)), grads),
                  std::invalid_argument);
}

TEST_CASE("momentum with mu=0 is vanilla SGD") {
  ParamStore p;
  p.add("w", 2) << 1.0, -2.0;
  ParamStore g = p.zeros_like();
  g.at("w") << 0.5, 0.25;
  ParamStore v = p.zeros_like();
  sgd_momentum_step(p, g, v, 0.1, 0.0, 0.0);
  CHECK(p.at("w")(0) == Catch::Approx(1.0 - 0.1 * 0.5));
  CHECK(p.at("w")(1) == Catch::Approx(-2.0 - 0.1 * 0.25));
}

TEST_CASE("weight decay pulls parameters toward zero") {
  ParamStore p;
  p.add("w", 1) << 4.0;
  ParamStore g = p.zeros_like();  // zero gradient: only the decay acts
  ParamStore v = p.zeros_like();
  sgd_momentum_step(p, g, v, 0.1, 0.0, 0.5);
  CHECK(p.at("w")(0) == Catch::Approx(4.0 - 0.1 * 0.5 * 4.0));
}

TEST_CASE("momentum descends a quadratic bowl") {
  // minimize 0.5 * ||w - c||^2
  ParamStore p;
  p.add("w", 3) << 3.0, -1.0, 0.5;
  Vec c(3);
  c << 1.0, 2.0, -0.5;
  ParamStore v = p.zeros_like();
  for (int step = 0; step < 400; ++step) {
    ParamStore g = p.zeros_like();
    g.at("w") = p.at("w") - c;
    sgd_momentum_step(p, g, v, 0.05, 0.9, 0.0);
  }
  CHECK((p.at("w") - c).norm() < 1e-6);
}

TEST_CASE("quantize_to_float drops precision but keeps values close") {
  ParamStore p;
  p.add("w", 1) << 0.1;
  p.quantize_to_float();
  CHECK(p.at("w")(0) == Catch::Approx(0.1).margin(1e-7));
  CHECK(p.at("w")(0) != 0.1);  // 0.1 is not exactly representable in float
  CHECK(p.at("w")(0) == static_cast<double>(0.1f));
}

TEST_CASE("param store bookkeeping") {
  ParamStore p;
  p.add("a", 2, 3);
  CHECK_THROWS_AS(p.add("a", 2, 3), std::logic_error);
  CHECK_THROWS_AS(p.at("missing"), std::logic_error);
  CHECK(p.has("a"));
  ParamStore z = p.zeros_like();
  CHECK(z.at("a").rows() == 2);
  CHECK(z.at("a").isZero());
}

TEST_CASE("initializers stay in their documented ranges") {
  std::mt19937_64 rng(1);
  Mat w(20, 30), e(40, 10);
  init_glorot(w, rng);
  init_embedding(e, rng);
  const double bound = std::sqrt(6.0 / 50.0);
  CHECK(w.maxCoeff() <= bound);
  CHECK(w.minCoeff() >= -bound);
  CHECK(w.maxCoeff() > 0.0);  // actually randomized
  CHECK(e.maxCoeff() <= 0.01);
  CHECK(e.minCoeff() >= -0.01);
}
