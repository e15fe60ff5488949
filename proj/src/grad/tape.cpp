#include "dysalign/grad/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dysalign/core/error.hpp"

namespace dysalign::grad {

namespace {

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double stable_softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

}  // namespace

Var Tape::push(const Node& n) {
  nodes_.push_back(n);
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

Var Tape::unary(Op op, Var a, double value, double aux) {
  Node n;
  n.op = op;
  n.a = a.id;
  n.value = value;
  n.aux = aux;
  return push(n);
}

Var Tape::leaf(double value) {
  Node n;
  n.value = value;
  return push(n);
}

void Tape::clear() {
  nodes_.clear();
  args_.clear();
  consts_.clear();
  grads_.clear();
  zero_ = {};
  one_ = {};
}

Var Tape::zero() {
  if (!zero_.valid()) zero_ = leaf(0.0);
  return zero_;
}

Var Tape::one() {
  if (!one_.valid()) one_ = leaf(1.0);
  return one_;
}

Var Tape::add(Var a, Var b) {
  Node n;
  n.op = Op::Add;
  n.a = a.id;
  n.b = b.id;
  n.value = value(a) + value(b);
  return push(n);
}

Var Tape::sub(Var a, Var b) {
  Node n;
  n.op = Op::Sub;
  n.a = a.id;
  n.b = b.id;
  n.value = value(a) - value(b);
  return push(n);
}

Var Tape::mul(Var a, Var b) {
  Node n;
  n.op = Op::Mul;
  n.a = a.id;
  n.b = b.id;
  n.value = value(a) * value(b);
  return push(n);
}

Var Tape::div(Var a, Var b) {
  Node n;
  n.op = Op::Div;
  n.a = a.id;
  n.b = b.id;
  n.value = value(a) / value(b);
  return push(n);
}

Var Tape::scale(Var a, double c) { return unary(Op::Scale, a, value(a) * c, c); }
Var Tape::shift(Var a, double c) { return unary(Op::Shift, a, value(a) + c, c); }
Var Tape::exp(Var a) { return unary(Op::Exp, a, std::exp(value(a))); }
Var Tape::log(Var a) { return unary(Op::Log, a, std::log(value(a))); }
Var Tape::tanh(Var a) { return unary(Op::Tanh, a, std::tanh(value(a))); }
Var Tape::sigmoid(Var a) { return unary(Op::Sigmoid, a, stable_sigmoid(value(a))); }
Var Tape::softplus(Var a) { return unary(Op::Softplus, a, stable_softplus(value(a))); }
Var Tape::square(Var a) { return unary(Op::Square, a, value(a) * value(a)); }

Var Tape::sum(std::span<const Var> xs) {
  Node n;
  n.op = Op::Sum;
  n.args = static_cast<std::uint32_t>(args_.size());
  n.nargs = static_cast<std::uint32_t>(xs.size());
  double acc = 0.0;
  for (Var x : xs) {
    args_.push_back(x.id);
    acc += value(x);
  }
  n.value = acc;
  return push(n);
}

Var Tape::dot(std::span<const Var> xs, std::span<const Var> ys) {
  if (xs.size() != ys.size()) throw ShapeError("dot: operand lengths differ");
  Node n;
  n.op = Op::Dot;
  n.args = static_cast<std::uint32_t>(args_.size());
  n.nargs = static_cast<std::uint32_t>(xs.size());
  double acc = 0.0;
  for (Var x : xs) args_.push_back(x.id);
  for (Var y : ys) args_.push_back(y.id);
  for (std::size_t i = 0; i < xs.size(); ++i) acc += value(xs[i]) * value(ys[i]);
  n.value = acc;
  return push(n);
}

Var Tape::dot(std::span<const double> coeffs, std::span<const Var> xs) {
  if (coeffs.size() != xs.size()) throw ShapeError("dot: operand lengths differ");
  Node n;
  n.op = Op::DotConst;
  n.args = static_cast<std::uint32_t>(args_.size());
  n.consts = static_cast<std::uint32_t>(consts_.size());
  n.nargs = static_cast<std::uint32_t>(xs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    args_.push_back(xs[i].id);
    consts_.push_back(coeffs[i]);
    acc += coeffs[i] * value(xs[i]);
  }
  n.value = acc;
  return push(n);
}

Var Tape::logsumexp(std::span<const Var> xs) {
  if (xs.empty()) return leaf(-std::numeric_limits<double>::infinity());
  Node n;
  n.op = Op::LogSumExp;
  n.args = static_cast<std::uint32_t>(args_.size());
  n.nargs = static_cast<std::uint32_t>(xs.size());
  double m = -std::numeric_limits<double>::infinity();
  for (Var x : xs) {
    args_.push_back(x.id);
    m = std::max(m, value(x));
  }
  if (std::isinf(m)) {
    n.value = m;
  } else {
    double s = 0.0;
    for (Var x : xs) s += std::exp(value(x) - m);
    n.value = m + std::log(s);
  }
  return push(n);
}

Var Tape::pass_through(double forward, Var surrogate) { return unary(Op::PassThrough, surrogate, forward); }

void Tape::zero_grad() { std::fill(grads_.begin(), grads_.end(), 0.0); }

void Tape::backward(Var root) {
  grads_.assign(nodes_.size(), 0.0);
  grads_[root.id] = 1.0;
  for (std::int32_t id = root.id; id >= 0; --id) {
    const double g = grads_[id];
    if (g == 0.0) continue;
    const Node& n = nodes_[id];
    switch (n.op) {
      case Op::Leaf:
        break;
      case Op::Add:
        grads_[n.a] += g;
        grads_[n.b] += g;
        break;
      case Op::Sub:
        grads_[n.a] += g;
        grads_[n.b] -= g;
        break;
      case Op::Mul:
        grads_[n.a] += g * nodes_[n.b].value;
        grads_[n.b] += g * nodes_[n.a].value;
        break;
      case Op::Div: {
        const double bv = nodes_[n.b].value;
        grads_[n.a] += g / bv;
        grads_[n.b] -= g * n.value / bv;
        break;
      }
      case Op::Scale:
        grads_[n.a] += g * n.aux;
        break;
      case Op::Shift:
      case Op::PassThrough:
        grads_[n.a] += g;
        break;
      case Op::Exp:
        grads_[n.a] += g * n.value;
        break;
      case Op::Log:
        grads_[n.a] += g / nodes_[n.a].value;
        break;
      case Op::Tanh:
        grads_[n.a] += g * (1.0 - n.value * n.value);
        break;
      case Op::Sigmoid:
        grads_[n.a] += g * n.value * (1.0 - n.value);
        break;
      case Op::Softplus:
        grads_[n.a] += g * stable_sigmoid(nodes_[n.a].value);
        break;
      case Op::Square:
        grads_[n.a] += g * 2.0 * nodes_[n.a].value;
        break;
      case Op::Sum:
        for (std::uint32_t k = 0; k < n.nargs; ++k) grads_[args_[n.args + k]] += g;
        break;
      case Op::Dot:
        for (std::uint32_t k = 0; k < n.nargs; ++k) {
          const std::int32_t x = args_[n.args + k];
          const std::int32_t y = args_[n.args + n.nargs + k];
          grads_[x] += g * nodes_[y].value;
          grads_[y] += g * nodes_[x].value;
        }
        break;
      case Op::DotConst:
        for (std::uint32_t k = 0; k < n.nargs; ++k) grads_[args_[n.args + k]] += g * consts_[n.consts + k];
        break;
      case Op::LogSumExp:
        if (std::isinf(n.value)) break;
        for (std::uint32_t k = 0; k < n.nargs; ++k) {
          const std::int32_t x = args_[n.args + k];
          grads_[x] += g * std::exp(nodes_[x].value - n.value);
        }
        break;
    }
  }
}

}  // namespace dysalign::grad
