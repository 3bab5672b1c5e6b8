#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ganen/tensor.hpp"

namespace ganen {

/// Lower clamp applied to the argument of `log` so saturated sigmoids give a
/// large negative value instead of -inf.
inline constexpr double kLogClamp = 1e-12;

enum class Op {
  kParam,
  kConstant,
  kMatmul,
  kAffine,
  kAdd,
  kSub,
  kMul,
  kScale,
  kAddScalar,
  kRelu,
  kLeakyRelu,
  kSigmoid,
  kTanh,
  kLog,
  kAbs,
  kPow,
  kSum,
  kMean,
  kLpPowerNorm,
  kConcatCols,
};

std::string_view op_name(Op op);

/// Handle to a node recorded on a Tape. Only meaningful for the tape that
/// created it.
struct Var {
  std::size_t index = 0;
};

/// Computation record for reverse-mode differentiation.
///
/// Every operation appends a node after its parents, so the node list is a
/// topological order and `backward` is a single reverse sweep. Parameters are
/// referenced, not copied: they must outlive the tape and stay unmodified until
/// `accumulate_grads` has run.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Trainable leaf. Registering the same tensor twice returns the same node.
  Var param(const Tensor& p);
  /// Leaf that takes part in the forward pass but receives no gradient.
  Var constant(const Tensor& t);
  /// Owned constant.
  Var input(Tensor t);
  /// Owned leaf that does receive a gradient (used to differentiate w.r.t. data).
  Var variable(Tensor t);

  Var matmul(Var a, Var b);
  /// Dense layer: rows of x[n x k] times w[k x m], plus bias[m] added to every row.
  Var affine(Var x, Var w, Var bias);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double s);
  Var add_scalar(Var a, double s);
  Var relu(Var a);
  Var leaky_relu(Var a, double slope);
  Var sigmoid(Var a);
  Var tanh(Var a);
  /// Natural log of max(a, kLogClamp).
  Var log(Var a);
  Var abs(Var a);
  Var pow(Var a, double p);
  Var sum(Var a);
  Var mean(Var a);
  /// Sum over all entries of |a|^ell for ell in {1, 2}.
  Var lp_power_norm(Var a, int ell);
  /// [a | b] for a[n x p], b[n x q].
  Var concat_cols(Var a, Var b);

  const Tensor& value(Var v) const;
  bool requires_grad(Var v) const { return nodes_.at(v.index).requires_grad; }
  Op op(Var v) const { return nodes_.at(v.index).op; }
  std::vector<std::size_t> parents(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  /// Reverse sweep from a scalar loss. Node gradients are recomputed from
  /// scratch on every call.
  void backward(Var loss);
  /// Gradient of the last backward() w.r.t. a node; zeros if unreachable.
  std::vector<double> grad(Var v) const;
  /// Adds leaf gradients into `p->grad()` for every tensor registered through
  /// param(). Tensors never registered are left untouched.
  void accumulate_grads(std::span<Tensor* const> params) const;

 private:
  struct Node {
    Op op = Op::kConstant;
    std::array<std::size_t, 3> parents{};
    std::size_t n_parents = 0;
    bool requires_grad = false;
    double scalar = 0.0;
    const Tensor* external = nullptr;
    Tensor owned;
    std::vector<double> grad;
  };

  Var push(Node node);
  Var unary(Op op, Var a, double scalar, Tensor out);
  Var binary(Op op, Var a, Var b);
  const Tensor& val(std::size_t i) const;
  void backprop_node(std::size_t i);
  std::vector<double>& grad_slot(std::size_t i);

  std::vector<Node> nodes_;
  std::unordered_map<const Tensor*, std::size_t> param_index_;
  bool has_backward_ = false;
};

}  // namespace ganen
