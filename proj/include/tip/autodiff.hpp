#ifndef TIP_AUTODIFF_HPP_
#define TIP_AUTODIFF_HPP_

#include <functional>
#include <stdexcept>
#include <vector>

#include "tip/rng.hpp"
#include "tip/tensor.hpp"

namespace tip
{

struct NotScalarOutput : std::runtime_error
{
  NotScalarOutput() : std::runtime_error("backward requires a scalar output node") {}
};

/// Reverse-mode autodiff over an append-only tape of dense tensors.
/// Node ids are indices into the tape; inputs of a node always precede it, so
/// one reverse sweep visits every node exactly once.
class Tape
{
public:
  using NodeId = std::size_t;

  Tape() = default;
  Tape(const Tape &) = delete;
  Tape & operator=(const Tape &) = delete;

  NodeId leaf(Tensor value);
  NodeId constant(Tensor value) { return leaf(std::move(value)); }
  NodeId constant_scalar(double v) { return leaf(Tensor::scalar(v)); }

  const Tensor & value(NodeId id) const { return nodes_[id].value; }
  double scalar_value(NodeId id) const { return nodes_[id].value.data[0]; }
  std::size_t size() const { return nodes_.size(); }

  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);  // elementwise
  /// (m,k)·(k,n) or (m,k)·(k) matrix product.
  NodeId matmul(NodeId a, NodeId b);
  NodeId concat(const std::vector<NodeId> & parts);
  NodeId slice(NodeId a, std::size_t start, std::size_t len);

  NodeId tanh_op(NodeId a);
  NodeId sigmoid(NodeId a);
  NodeId relu(NodeId a);
  NodeId exp_op(NodeId a);
  NodeId log_op(NodeId a);
  /// Numerically stabilized softmax over a flat vector.
  NodeId softmax(NodeId a);

  NodeId sum(NodeId a);
  NodeId mean(NodeId a);
  NodeId euclidean_norm(NodeId a);
  /// Min/max over all elements; the subgradient routes to the earliest
  /// arg-extremum, keeping tie behavior deterministic.
  NodeId min_all(NodeId a);
  NodeId max_all(NodeId a);

  /// Inverted dropout: at train time zeroes entries with probability `rate`
  /// and scales survivors by 1/(1-rate); identity at eval time.
  NodeId dropout(NodeId a, double rate, Rng & rng, bool train);
  /// Elementwise product with a constant mask (e.g. validity zero-masking).
  NodeId mask_select(NodeId a, const std::vector<double> & mask);

  NodeId scale(NodeId a, double s);
  NodeId add_const(NodeId a, double c);
  NodeId neg(NodeId a) { return scale(a, -1.0); }

  /// Accumulates gradients of `output` (scalar) w.r.t. every node.
  void backward(NodeId output);
  const Tensor & grad(NodeId id) const { return grads_[id]; }

private:
  struct Node
  {
    Tensor value;
    std::vector<NodeId> parents;
    std::function<void(Tape &, NodeId)> back;  // empty for leaves
  };

  NodeId push(Tensor value, std::vector<NodeId> parents, std::function<void(Tape &, NodeId)> back);
  Tensor & grad_buf(NodeId id) { return grads_[id]; }

  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
};

}  // namespace tip

#endif  // TIP_AUTODIFF_HPP_
