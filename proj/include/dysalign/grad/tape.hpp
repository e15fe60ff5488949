#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dysalign::grad {

// Handle to a scalar node on a Tape.
struct Var {
  std::int32_t id = -1;
  bool valid() const { return id >= 0; }
  friend bool operator==(Var, Var) = default;
};

enum class Op : std::uint8_t {
  Leaf,
  Add,
  Sub,
  Mul,
  Div,
  Scale,     // a * aux
  Shift,     // a + aux
  Exp,
  Log,
  Tanh,
  Sigmoid,
  Softplus,
  Square,
  Sum,       // sum(args)
  Dot,       // sum(args[0:n] * args[n:2n])
  DotConst,  // sum(consts * args)
  LogSumExp,
  PassThrough,  // forward value fixed, gradient copied to `a`
};

// Scalar reverse-mode tape. Nodes are appended in evaluation order, so a
// reverse sweep over ids is a valid reverse topological order. A tape is not
// thread-safe; independent tapes may be used concurrently.
class Tape {
 public:
  Tape() = default;

  void reserve(std::size_t nodes) { nodes_.reserve(nodes); }
  // Drops every node but keeps the allocated capacity.
  void clear();
  std::size_t size() const { return nodes_.size(); }

  Var leaf(double value);
  // Leaf whose gradient is never read. Shared zero/one constants are cached.
  Var constant(double value) { return leaf(value); }
  Var zero();
  Var one();

  double value(Var v) const { return nodes_[v.id].value; }
  double grad(Var v) const { return grads_.empty() ? 0.0 : grads_[v.id]; }

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var div(Var a, Var b);
  Var neg(Var a) { return scale(a, -1.0); }
  Var scale(Var a, double c);
  Var shift(Var a, double c);
  Var exp(Var a);
  Var log(Var a);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var softplus(Var a);
  Var square(Var a);

  Var sum(std::span<const Var> xs);
  Var dot(std::span<const Var> xs, std::span<const Var> ys);
  Var dot(std::span<const double> coeffs, std::span<const Var> xs);
  Var logsumexp(std::span<const Var> xs);
  // Value `forward`, gradient routed unchanged to `surrogate` (straight-through).
  Var pass_through(double forward, Var surrogate);

  // Seeds d(root)/d(root) = 1 and sweeps every node in reverse order.
  void backward(Var root);
  void zero_grad();

 private:
  struct Node {
    Op op = Op::Leaf;
    std::int32_t a = -1;
    std::int32_t b = -1;
    std::uint32_t args = 0;   // offset into args_
    std::uint32_t nargs = 0;  // n-ary fan-in
    std::uint32_t consts = 0; // offset into consts_
    double value = 0.0;
    double aux = 0.0;
  };

  Var push(const Node& n);
  Var unary(Op op, Var a, double value, double aux = 0.0);

  std::vector<Node> nodes_;
  std::vector<std::int32_t> args_;
  std::vector<double> consts_;
  std::vector<double> grads_;
  Var zero_{};
  Var one_{};
};

}  // namespace dysalign::grad
