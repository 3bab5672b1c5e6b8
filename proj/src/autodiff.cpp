#include "ganen/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ganen/error.hpp"

namespace ganen {
namespace {

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_finite(const Tensor& t, Op op) {
  if (!t.all_finite()) {
    throw DivergenceError("non-finite value produced by " + std::string(op_name(op)));
  }
}

bool is_scalar(const Tensor& t) { return t.rank() == 0; }

}  // namespace

std::string_view op_name(Op op) {
  switch (op) {
    case Op::kParam: return "param";
    case Op::kConstant: return "constant";
    case Op::kMatmul: return "matmul";
    case Op::kAffine: return "affine";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kMul: return "mul";
    case Op::kScale: return "scale";
    case Op::kAddScalar: return "add_scalar";
    case Op::kRelu: return "relu";
    case Op::kLeakyRelu: return "leaky_relu";
    case Op::kSigmoid: return "sigmoid";
    case Op::kTanh: return "tanh";
    case Op::kLog: return "log";
    case Op::kAbs: return "abs";
    case Op::kPow: return "pow";
    case Op::kSum: return "sum";
    case Op::kMean: return "mean";
    case Op::kLpPowerNorm: return "lp_power_norm";
    case Op::kConcatCols: return "concat_cols";
  }
  return "unknown";
}

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

const Tensor& Tape::val(std::size_t i) const {
  const Node& n = nodes_[i];
  return n.external ? *n.external : n.owned;
}

const Tensor& Tape::value(Var v) const {
  if (v.index >= nodes_.size()) throw Error("Var does not belong to this tape");
  return val(v.index);
}

std::vector<std::size_t> Tape::parents(Var v) const {
  const Node& n = nodes_.at(v.index);
  return {n.parents.begin(), n.parents.begin() + static_cast<std::ptrdiff_t>(n.n_parents)};
}

Var Tape::param(const Tensor& p) {
  if (auto it = param_index_.find(&p); it != param_index_.end()) return Var{it->second};
  check_finite(p, Op::kParam);
  Node n;
  n.op = Op::kParam;
  n.requires_grad = true;
  n.external = &p;
  Var v = push(std::move(n));
  param_index_.emplace(&p, v.index);
  return v;
}

Var Tape::constant(const Tensor& t) {
  check_finite(t, Op::kConstant);
  Node n;
  n.op = Op::kConstant;
  n.external = &t;
  return push(std::move(n));
}

Var Tape::input(Tensor t) {
  check_finite(t, Op::kConstant);
  Node n;
  n.op = Op::kConstant;
  n.owned = std::move(t);
  return push(std::move(n));
}

Var Tape::variable(Tensor t) {
  check_finite(t, Op::kParam);
  Node n;
  n.op = Op::kParam;
  n.requires_grad = true;
  n.owned = std::move(t);
  return push(std::move(n));
}

Var Tape::unary(Op op, Var a, double scalar, Tensor out) {
  check_finite(out, op);
  Node n;
  n.op = op;
  n.parents[0] = a.index;
  n.n_parents = 1;
  n.requires_grad = nodes_[a.index].requires_grad;
  n.scalar = scalar;
  n.owned = std::move(out);
  return push(std::move(n));
}

Var Tape::matmul(Var a, Var b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  if (A.rank() != 2 || B.rank() != 2 || A.cols() != B.rows()) {
    throw ShapeError("matmul " + shape_string(A.shape()) + " x " + shape_string(B.shape()));
  }
  const std::size_t m = A.rows(), k = A.cols(), p = B.cols();
  Tensor out(Shape{m, p});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t t = 0; t < k; ++t) {
      const double a_it = A[i * k + t];
      for (std::size_t j = 0; j < p; ++j) out[i * p + j] += a_it * B[t * p + j];
    }
  }
  check_finite(out, Op::kMatmul);
  Node n;
  n.op = Op::kMatmul;
  n.parents = {a.index, b.index, 0};
  n.n_parents = 2;
  n.requires_grad = nodes_[a.index].requires_grad || nodes_[b.index].requires_grad;
  n.owned = std::move(out);
  return push(std::move(n));
}

Var Tape::affine(Var x, Var w, Var bias) {
  const Tensor& X = value(x);
  const Tensor& W = value(w);
  const Tensor& B = value(bias);
  if (X.rank() != 2 || W.rank() != 2 || X.cols() != W.rows() || B.size() != W.cols()) {
    throw ShapeError("affine " + shape_string(X.shape()) + " x " + shape_string(W.shape()) +
                     " + " + shape_string(B.shape()));
  }
  const std::size_t m = X.rows(), k = X.cols(), p = W.cols();
  Tensor out(Shape{m, p});
  for (std::size_t i = 0; i < m; ++i) {
    double* row = &out[i * p];
    for (std::size_t j = 0; j < p; ++j) row[j] = B[j];
    for (std::size_t t = 0; t < k; ++t) {
      const double x_it = X[i * k + t];
      const double* wrow = &W[t * p];
      for (std::size_t j = 0; j < p; ++j) row[j] += x_it * wrow[j];
    }
  }
  check_finite(out, Op::kAffine);
  Node n;
  n.op = Op::kAffine;
  n.parents = {x.index, w.index, bias.index};
  n.n_parents = 3;
  n.requires_grad = nodes_[x.index].requires_grad || nodes_[w.index].requires_grad ||
                    nodes_[bias.index].requires_grad;
  n.owned = std::move(out);
  return push(std::move(n));
}

Var Tape::binary(Op op, Var a, Var b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  Shape shape;
  if (A.shape() == B.shape() || is_scalar(B)) {
    shape = A.shape();
  } else if (is_scalar(A)) {
    shape = B.shape();
  } else {
    throw ShapeError(std::string(op_name(op)) + " of " + shape_string(A.shape()) + " and " +
                     shape_string(B.shape()));
  }
  Tensor out(shape);
  const bool a_bcast = A.size() != out.size();
  const bool b_bcast = B.size() != out.size();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = A[a_bcast ? 0 : i];
    const double y = B[b_bcast ? 0 : i];
    switch (op) {
      case Op::kAdd: out[i] = x + y; break;
      case Op::kSub: out[i] = x - y; break;
      case Op::kMul: out[i] = x * y; break;
      default: throw Error("not a binary op");
    }
  }
  check_finite(out, op);
  Node n;
  n.op = op;
  n.parents = {a.index, b.index, 0};
  n.n_parents = 2;
  n.requires_grad = nodes_[a.index].requires_grad || nodes_[b.index].requires_grad;
  n.owned = std::move(out);
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) { return binary(Op::kAdd, a, b); }
Var Tape::sub(Var a, Var b) { return binary(Op::kSub, a, b); }
Var Tape::mul(Var a, Var b) { return binary(Op::kMul, a, b); }

Var Tape::scale(Var a, double s) {
  Tensor out = value(a);
  out.drop_grad();
  for (double& v : out.values()) v *= s;
  return unary(Op::kScale, a, s, std::move(out));
}

Var Tape::add_scalar(Var a, double s) {
  Tensor out = value(a);
  out.drop_grad();
  for (double& v : out.values()) v += s;
  return unary(Op::kAddScalar, a, s, std::move(out));
}

Var Tape::relu(Var a) {
  Tensor out = value(a);
  out.drop_grad();
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return unary(Op::kRelu, a, 0.0, std::move(out));
}

Var Tape::leaky_relu(Var a, double slope) {
  Tensor out = value(a);
  out.drop_grad();
  for (double& v : out.values()) v = v > 0.0 ? v : slope * v;
  return unary(Op::kLeakyRelu, a, slope, std::move(out));
}

Var Tape::sigmoid(Var a) {
  Tensor out = value(a);
  out.drop_grad();
  for (double& v : out.values()) v = stable_sigmoid(v);
  return unary(Op::kSigmoid, a, 0.0, std::move(out));
}

Var Tape::tanh(Var a) {
  Tensor out = value(a);
  out.drop_grad();
  for (double& v : out.values()) v = std::tanh(v);
  return unary(Op::kTanh, a, 0.0, std::move(out));
}

Var Tape::log(Var a) {
  Tensor out = value(a);
  out.drop_grad();
  for (double& v : out.values()) v = std::log(std::max(v, kLogClamp));
  return unary(Op::kLog, a, 0.0, std::move(out));
}

Var Tape::abs(Var a) {
  Tensor out = value(a);
  out.drop_grad();
  for (double& v : out.values()) v = std::fabs(v);
  return unary(Op::kAbs, a, 0.0, std::move(out));
}

Var Tape::pow(Var a, double p) {
  Tensor out = value(a);
  out.drop_grad();
  for (double& v : out.values()) v = std::pow(v, p);
  return unary(Op::kPow, a, p, std::move(out));
}

Var Tape::sum(Var a) {
  double s = 0.0;
  for (double v : value(a).values()) s += v;
  return unary(Op::kSum, a, 0.0, Tensor::scalar(s));
}

Var Tape::mean(Var a) {
  const Tensor& A = value(a);
  double s = 0.0;
  for (double v : A.values()) s += v;
  return unary(Op::kMean, a, 0.0, Tensor::scalar(s / static_cast<double>(A.size())));
}

Var Tape::lp_power_norm(Var a, int ell) {
  if (ell != 1 && ell != 2) throw ValidationError("lp_power_norm supports ell in {1, 2}, got " + std::to_string(ell));
  double s = 0.0;
  for (double v : value(a).values()) s += ell == 1 ? std::fabs(v) : v * v;
  return unary(Op::kLpPowerNorm, a, static_cast<double>(ell), Tensor::scalar(s));
}

Var Tape::concat_cols(Var a, Var b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  if (A.rank() != 2 || B.rank() != 2 || A.rows() != B.rows()) {
    throw ShapeError("concat_cols " + shape_string(A.shape()) + " and " + shape_string(B.shape()));
  }
  const std::size_t n = A.rows(), p = A.cols(), q = B.cols();
  Tensor out(Shape{n, p + q});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) out[i * (p + q) + j] = A[i * p + j];
    for (std::size_t j = 0; j < q; ++j) out[i * (p + q) + p + j] = B[i * q + j];
  }
  Node node;
  node.op = Op::kConcatCols;
  node.parents = {a.index, b.index, 0};
  node.n_parents = 2;
  node.requires_grad = nodes_[a.index].requires_grad || nodes_[b.index].requires_grad;
  node.owned = std::move(out);
  return push(std::move(node));
}

std::vector<double>& Tape::grad_slot(std::size_t i) {
  Node& n = nodes_[i];
  if (n.grad.size() != val(i).size()) n.grad.assign(val(i).size(), 0.0);
  return n.grad;
}

void Tape::backward(Var loss) {
  if (loss.index >= nodes_.size()) throw Error("Var does not belong to this tape");
  if (val(loss.index).size() != 1) {
    throw ShapeError("backward needs a scalar loss, got " + shape_string(val(loss.index).shape()));
  }
  for (Node& n : nodes_) n.grad.clear();
  has_backward_ = true;
  if (!nodes_[loss.index].requires_grad) return;
  grad_slot(loss.index)[0] = 1.0;
  for (std::size_t i = loss.index + 1; i-- > 0;) {
    if (!nodes_[i].requires_grad || nodes_[i].grad.empty()) continue;
    backprop_node(i);
  }
}

void Tape::backprop_node(std::size_t i) {
  // grad_slot() only touches parents, so `g` stays valid.
  const Node& n = nodes_[i];
  const std::vector<double>& g = n.grad;
  const Tensor& out = val(i);
  auto wants = [&](std::size_t k) { return nodes_[n.parents[k]].requires_grad; };

  switch (n.op) {
    case Op::kParam:
    case Op::kConstant:
      return;
    case Op::kMatmul: {
      const Tensor& A = val(n.parents[0]);
      const Tensor& B = val(n.parents[1]);
      const std::size_t m = A.rows(), k = A.cols(), p = B.cols();
      if (wants(0)) {
        auto& ga = grad_slot(n.parents[0]);
        for (std::size_t r = 0; r < m; ++r)
          for (std::size_t t = 0; t < k; ++t) {
            double s = 0.0;
            for (std::size_t j = 0; j < p; ++j) s += g[r * p + j] * B[t * p + j];
            ga[r * k + t] += s;
          }
      }
      if (wants(1)) {
        auto& gb = grad_slot(n.parents[1]);
        for (std::size_t r = 0; r < m; ++r)
          for (std::size_t t = 0; t < k; ++t) {
            const double a_rt = A[r * k + t];
            for (std::size_t j = 0; j < p; ++j) gb[t * p + j] += a_rt * g[r * p + j];
          }
      }
      return;
    }
    case Op::kAffine: {
      const Tensor& X = val(n.parents[0]);
      const Tensor& W = val(n.parents[1]);
      const std::size_t m = X.rows(), k = X.cols(), p = W.cols();
      if (wants(0)) {
        auto& gx = grad_slot(n.parents[0]);
        for (std::size_t r = 0; r < m; ++r)
          for (std::size_t t = 0; t < k; ++t) {
            double s = 0.0;
            const double* wrow = &W[t * p];
            const double* grow = &g[r * p];
            for (std::size_t j = 0; j < p; ++j) s += grow[j] * wrow[j];
            gx[r * k + t] += s;
          }
      }
      if (wants(1)) {
        auto& gw = grad_slot(n.parents[1]);
        for (std::size_t r = 0; r < m; ++r)
          for (std::size_t t = 0; t < k; ++t) {
            const double x_rt = X[r * k + t];
            double* gwrow = &gw[t * p];
            const double* grow = &g[r * p];
            for (std::size_t j = 0; j < p; ++j) gwrow[j] += x_rt * grow[j];
          }
      }
      if (wants(2)) {
        auto& gbias = grad_slot(n.parents[2]);
        for (std::size_t r = 0; r < m; ++r)
          for (std::size_t j = 0; j < p; ++j) gbias[j] += g[r * p + j];
      }
      return;
    }
    case Op::kAdd:
    case Op::kSub:
    case Op::kMul: {
      const Tensor& A = val(n.parents[0]);
      const Tensor& B = val(n.parents[1]);
      const bool a_bcast = A.size() != out.size();
      const bool b_bcast = B.size() != out.size();
      if (wants(0)) {
        auto& ga = grad_slot(n.parents[0]);
        for (std::size_t e = 0; e < out.size(); ++e) {
          const double d = n.op == Op::kMul ? g[e] * B[b_bcast ? 0 : e] : g[e];
          ga[a_bcast ? 0 : e] += d;
        }
      }
      if (wants(1)) {
        auto& gb = grad_slot(n.parents[1]);
        for (std::size_t e = 0; e < out.size(); ++e) {
          double d = g[e];
          if (n.op == Op::kSub) d = -d;
          if (n.op == Op::kMul) d = g[e] * A[a_bcast ? 0 : e];
          gb[b_bcast ? 0 : e] += d;
        }
      }
      return;
    }
    case Op::kConcatCols: {
      const Tensor& A = val(n.parents[0]);
      const Tensor& B = val(n.parents[1]);
      const std::size_t rows = A.rows(), p = A.cols(), q = B.cols();
      if (wants(0)) {
        auto& ga = grad_slot(n.parents[0]);
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t j = 0; j < p; ++j) ga[r * p + j] += g[r * (p + q) + j];
      }
      if (wants(1)) {
        auto& gb = grad_slot(n.parents[1]);
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t j = 0; j < q; ++j) gb[r * q + j] += g[r * (p + q) + p + j];
      }
      return;
    }
    default:
      break;
  }

  // Remaining ops are unary.
  const Tensor& A = val(n.parents[0]);
  auto& ga = grad_slot(n.parents[0]);
  const double s = n.scalar;
  switch (n.op) {
    case Op::kScale:
      for (std::size_t e = 0; e < A.size(); ++e) ga[e] += g[e] * s;
      break;
    case Op::kAddScalar:
      for (std::size_t e = 0; e < A.size(); ++e) ga[e] += g[e];
      break;
    case Op::kRelu:
      for (std::size_t e = 0; e < A.size(); ++e) ga[e] += A[e] > 0.0 ? g[e] : 0.0;
      break;
    case Op::kLeakyRelu:
      for (std::size_t e = 0; e < A.size(); ++e) ga[e] += A[e] > 0.0 ? g[e] : s * g[e];
      break;
    case Op::kSigmoid:
      for (std::size_t e = 0; e < A.size(); ++e) ga[e] += g[e] * out[e] * (1.0 - out[e]);
      break;
    case Op::kTanh:
      for (std::size_t e = 0; e < A.size(); ++e) ga[e] += g[e] * (1.0 - out[e] * out[e]);
      break;
    case Op::kLog:
      for (std::size_t e = 0; e < A.size(); ++e) ga[e] += A[e] >= kLogClamp ? g[e] / A[e] : 0.0;
      break;
    case Op::kAbs:
      for (std::size_t e = 0; e < A.size(); ++e)
        ga[e] += A[e] > 0.0 ? g[e] : (A[e] < 0.0 ? -g[e] : 0.0);
      break;
    case Op::kPow:
      for (std::size_t e = 0; e < A.size(); ++e) ga[e] += g[e] * s * std::pow(A[e], s - 1.0);
      break;
    case Op::kSum:
      for (std::size_t e = 0; e < A.size(); ++e) ga[e] += g[0];
      break;
    case Op::kMean: {
      const double d = g[0] / static_cast<double>(A.size());
      for (std::size_t e = 0; e < A.size(); ++e) ga[e] += d;
      break;
    }
    case Op::kLpPowerNorm:
      if (s == 1.0) {
        for (std::size_t e = 0; e < A.size(); ++e)
          ga[e] += A[e] > 0.0 ? g[0] : (A[e] < 0.0 ? -g[0] : 0.0);
      } else {
        for (std::size_t e = 0; e < A.size(); ++e) ga[e] += 2.0 * A[e] * g[0];
      }
      break;
    default:
      throw Error("backward not registered for " + std::string(op_name(n.op)));
  }
}

std::vector<double> Tape::grad(Var v) const {
  const Node& n = nodes_.at(v.index);
  if (n.grad.empty()) return std::vector<double>(val(v.index).size(), 0.0);
  return n.grad;
}

void Tape::accumulate_grads(std::span<Tensor* const> params) const {
  if (!has_backward_) throw Error("accumulate_grads called before backward");
  for (Tensor* p : params) {
    auto it = param_index_.find(p);
    if (it == param_index_.end()) continue;
    const Node& n = nodes_[it->second];
    if (n.grad.empty()) continue;
    auto& dst = p->grad();
    for (std::size_t e = 0; e < dst.size(); ++e) dst[e] += n.grad[e];
  }
}

}  // namespace ganen
