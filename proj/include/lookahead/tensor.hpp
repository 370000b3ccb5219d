#ifndef LOOKAHEAD_TENSOR_HPP
#define LOOKAHEAD_TENSOR_HPP

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace lookahead {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Named dense parameters. Vectors are stored as one-column matrices;
// embedding tables as (vocab x dim) matrices addressed by row.
struct ParamStore {
  std::map<std::string, Mat> values;

  Mat& add(const std::string& name, Eigen::Index rows, Eigen::Index cols = 1) {
    auto [it, fresh] = values.emplace(name, Mat::Zero(rows, cols));
    if (!fresh) throw std::logic_error("duplicate parameter: " + name);
    return it->second;
  }
  Mat& at(const std::string& name) {
    auto it = values.find(name);
    if (it == values.end()) throw std::logic_error("unknown parameter: " + name);
    return it->second;
  }
  const Mat& at(const std::string& name) const {
    auto it = values.find(name);
    if (it == values.end()) throw std::logic_error("unknown parameter: " + name);
    return it->second;
  }
  bool has(const std::string& name) const { return values.count(name) > 0; }

  // Zero-valued store with matching shapes (gradients, velocities).
  ParamStore zeros_like() const {
    ParamStore z;
    for (const auto& [k, v] : values) z.values.emplace(k, Mat::Zero(v.rows(), v.cols()));
    return z;
  }

  // Drops precision to 32-bit floats for the inference mode.
  void quantize_to_float() {
    for (auto& [_, v] : values) v = v.cast<float>().cast<double>();
  }
};

// Uniform Glorot init for weight matrices, zeros for biases, small uniform
// for embedding tables.
inline void init_glorot(Mat& m, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / double(m.rows() + m.cols()));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = dist(rng);
}
inline void init_embedding(Mat& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-0.01, 0.01);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = dist(rng);
}

// Classical momentum with L2 as a gradient term:
//   v <- mu*v - eta*(g + lambda*theta);  theta <- theta + v
inline void sgd_momentum_step(ParamStore& params, const ParamStore& grads,
                              ParamStore& velocity, double eta, double mu,
                              double lambda) {
  for (auto& [name, theta] : params.values) {
    const Mat& g = grads.at(name);
    Mat& v = velocity.at(name);
    if (g.rows() != theta.rows() || g.cols() != theta.cols())
      throw std::invalid_argument("shape mismatch for " + name);
    v = mu * v - eta * (g + lambda * theta);
    theta += v;
  }
}

// Reverse-mode tape over vector-valued nodes, covering exactly the ops the
// predictor graph needs.
class Tape {
 public:
  using NodeId = int;

  explicit Tape(const ParamStore& params) : params_(&params) {}

  NodeId input(Vec v) { return push(Kind::Input, {}, std::move(v)); }
  NodeId zeros(Eigen::Index n) { return input(Vec::Zero(n)); }

  NodeId param(const std::string& name) {
    const Mat& m = params_->at(name);
    if (m.cols() != 1)
      throw std::invalid_argument(name + " is not a vector parameter");
    NodeId id = push(Kind::Param, {}, m.col(0));
    nodes_[id].name = name;
    return id;
  }

  NodeId lookup(const std::string& table, Eigen::Index row) {
    const Mat& m = params_->at(table);
    if (row < 0 || row >= m.rows())
      throw std::out_of_range("row " + std::to_string(row) + " in " + table);
    NodeId id = push(Kind::Lookup, {}, m.row(row).transpose());
    nodes_[id].name = table;
    nodes_[id].row = row;
    return id;
  }

  NodeId matvec(const std::string& mat, NodeId x) {
    const Mat& m = params_->at(mat);
    check_dim(x, m.cols(), "matvec " + mat);
    NodeId id = push(Kind::MatVec, {x}, m * value(x));
    nodes_[id].name = mat;
    return id;
  }

  NodeId add(std::vector<NodeId> xs) {
    if (xs.empty()) throw std::invalid_argument("add of nothing");
    Vec v = value(xs[0]);
    for (std::size_t i = 1; i < xs.size(); ++i) {
      check_dim(xs[i], v.size(), "add");
      v += value(xs[i]);
    }
    return push(Kind::Add, std::move(xs), std::move(v));
  }

  NodeId hadamard(NodeId a, NodeId b) {
    check_dim(b, value(a).size(), "hadamard");
    return push(Kind::Hadamard, {a, b},
                value(a).cwiseProduct(value(b)).eval());
  }

  NodeId one_minus(NodeId a) {
    return push(Kind::OneMinus, {a}, (1.0 - value(a).array()).matrix().eval());
  }

  NodeId tanh(NodeId a) {
    return push(Kind::Tanh, {a}, value(a).array().tanh().matrix().eval());
  }

  NodeId sigmoid(NodeId a) {
    return push(Kind::Sigmoid, {a},
                (1.0 / (1.0 + (-value(a).array()).exp())).matrix().eval());
  }

  NodeId concat(const std::vector<NodeId>& xs) {
    Eigen::Index n = 0;
    for (NodeId x : xs) n += value(x).size();
    Vec v(n);
    Eigen::Index off = 0;
    for (NodeId x : xs) {
      v.segment(off, value(x).size()) = value(x);
      off += value(x).size();
    }
    return push(Kind::Concat, xs, std::move(v));
  }

  NodeId dot(NodeId a, NodeId b) {
    check_dim(b, value(a).size(), "dot");
    Vec v(1);
    v(0) = value(a).dot(value(b));
    return push(Kind::Dot, {a, b}, std::move(v));
  }

  NodeId softmax(NodeId a) {
    const Vec& x = value(a);
    Vec e = (x.array() - x.maxCoeff()).exp();
    return push(Kind::Softmax, {a}, (e / e.sum()).eval());
  }

  // y = sum_k w_k * x_k; `weights` has one entry per vector in xs.
  NodeId weighted_sum(NodeId weights, const std::vector<NodeId>& xs) {
    const Vec& w = value(weights);
    if (w.size() != static_cast<Eigen::Index>(xs.size()))
      throw std::invalid_argument("weighted_sum arity mismatch");
    Vec v = Vec::Zero(value(xs[0]).size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
      check_dim(xs[k], v.size(), "weighted_sum");
      v += w(static_cast<Eigen::Index>(k)) * value(xs[k]);
    }
    std::vector<NodeId> in{weights};
    in.insert(in.end(), xs.begin(), xs.end());
    return push(Kind::WeightedSum, std::move(in), std::move(v));
  }

  // Returns a size-1 loss node; the probability vector is kept for reuse.
  NodeId softmax_xent(NodeId logits, Eigen::Index target) {
    const Vec& x = value(logits);
    if (target < 0 || target >= x.size())
      throw std::out_of_range("xent target out of range");
    Vec e = (x.array() - x.maxCoeff()).exp();
    Vec p = e / e.sum();
    Vec loss(1);
    loss(0) = -std::log(p(target));
    NodeId id = push(Kind::SoftmaxXent, {logits}, std::move(loss));
    nodes_[id].aux = std::move(p);
    nodes_[id].row = target;
    return id;
  }

  const Vec& value(NodeId id) const { return nodes_[id].value; }
  const Vec& probs(NodeId xent_id) const { return nodes_[xent_id].aux; }
  std::size_t size() const { return nodes_.size(); }

  // Accumulates d(loss)/d(param) into `grads` for every parameter reached
  // by the graph. `loss` must be a size-1 node.
  void backward(NodeId loss, ParamStore& grads) {
    if (value(loss).size() != 1)
      throw std::invalid_argument("backward requires a scalar loss node");
    for (auto& n : nodes_) n.grad = Vec::Zero(n.value.size());
    nodes_[loss].grad(0) = 1.0;
    for (NodeId id = static_cast<NodeId>(nodes_.size()) - 1; id >= 0; --id) {
      Node& n = nodes_[id];
      const Vec& g = n.grad;
      switch (n.kind) {
        case Kind::Input:
          break;
        case Kind::Param:
          grads.at(n.name).col(0) += g;
          break;
        case Kind::Lookup:
          grads.at(n.name).row(n.row) += g.transpose();
          break;
        case Kind::MatVec: {
          const Mat& m = params_->at(n.name);
          grads.at(n.name) += g * value(n.in[0]).transpose();
          nodes_[n.in[0]].grad += m.transpose() * g;
          break;
        }
        case Kind::Add:
          for (NodeId x : n.in) nodes_[x].grad += g;
          break;
        case Kind::Hadamard:
          nodes_[n.in[0]].grad += value(n.in[1]).cwiseProduct(g);
          nodes_[n.in[1]].grad += value(n.in[0]).cwiseProduct(g);
          break;
        case Kind::OneMinus:
          nodes_[n.in[0]].grad -= g;
          break;
        case Kind::Tanh:
          nodes_[n.in[0]].grad.array() +=
              (1.0 - n.value.array().square()) * g.array();
          break;
        case Kind::Sigmoid:
          nodes_[n.in[0]].grad.array() +=
              n.value.array() * (1.0 - n.value.array()) * g.array();
          break;
        case Kind::Concat: {
          Eigen::Index off = 0;
          for (NodeId x : n.in) {
            nodes_[x].grad += g.segment(off, nodes_[x].value.size());
            off += nodes_[x].value.size();
          }
          break;
        }
        case Kind::Dot:
          nodes_[n.in[0]].grad += g(0) * value(n.in[1]);
          nodes_[n.in[1]].grad += g(0) * value(n.in[0]);
          break;
        case Kind::Softmax: {
          const double dot = n.value.dot(g);
          nodes_[n.in[0]].grad.array() +=
              n.value.array() * (g.array() - dot);
          break;
        }
        case Kind::WeightedSum: {
          const Vec& w = value(n.in[0]);
          Vec& gw = nodes_[n.in[0]].grad;
          for (std::size_t k = 1; k < n.in.size(); ++k) {
            gw(static_cast<Eigen::Index>(k - 1)) += g.dot(value(n.in[k]));
            nodes_[n.in[k]].grad += w(static_cast<Eigen::Index>(k - 1)) * g;
          }
          break;
        }
        case Kind::SoftmaxXent: {
          Vec d = n.aux;
          d(n.row) -= 1.0;
          nodes_[n.in[0]].grad += g(0) * d;
          break;
        }
      }
    }
  }

 private:
  enum class Kind {
    Input, Param, Lookup, MatVec, Add, Hadamard, OneMinus, Tanh, Sigmoid,
    Concat, Dot, Softmax, WeightedSum, SoftmaxXent
  };

  struct Node {
    Kind kind;
    std::vector<NodeId> in;
    Vec value;
    Vec grad;
    Vec aux;            // softmax_xent probabilities
    std::string name;   // parameter name for Param/Lookup/MatVec
    Eigen::Index row = -1;
  };

  NodeId push(Kind kind, std::vector<NodeId> in, Vec value) {
    if (!value.allFinite())
      throw std::runtime_error("non-finite value produced by tensor op");
    Node n;
    n.kind = kind;
    n.in = std::move(in);
    n.value = std::move(value);
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size()) - 1;
  }

  void check_dim(NodeId x, Eigen::Index expected, const std::string& what) const {
    if (value(x).size() != expected)
      throw std::invalid_argument(what + ": dimension mismatch, got " +
                                  std::to_string(value(x).size()) +
                                  ", expected " + std::to_string(expected));
  }

  const ParamStore* params_;
  std::vector<Node> nodes_;
};

}  // namespace lookahead

#endif  // LOOKAHEAD_TENSOR_HPP
