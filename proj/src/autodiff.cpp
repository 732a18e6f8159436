#include "tip/autodiff.hpp"

#include <algorithm>
#include <cmath>

namespace tip
{

Tape::NodeId Tape::push(
  Tensor value, std::vector<NodeId> parents, std::function<void(Tape &, NodeId)> back)
{
  nodes_.push_back(Node{std::move(value), std::move(parents), std::move(back)});
  return nodes_.size() - 1;
}

Tape::NodeId Tape::leaf(Tensor value) { return push(std::move(value), {}, {}); }

Tape::NodeId Tape::add(NodeId a, NodeId b)
{
  const Tensor & va = value(a);
  const Tensor & vb = value(b);
  if (!va.same_shape(vb)) throw ShapeMismatch("add");
  Tensor out = va;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += vb[i];
  return push(std::move(out), {a, b}, [a, b](Tape & t, NodeId self) {
    const Tensor & g = t.grad(self);
    Tensor & ga = t.grad_buf(a);
    Tensor & gb = t.grad_buf(b);
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i];
      gb[i] += g[i];
    }
  });
}

Tape::NodeId Tape::sub(NodeId a, NodeId b)
{
  const Tensor & va = value(a);
  const Tensor & vb = value(b);
  if (!va.same_shape(vb)) throw ShapeMismatch("sub");
  Tensor out = va;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= vb[i];
  return push(std::move(out), {a, b}, [a, b](Tape & t, NodeId self) {
    const Tensor & g = t.grad(self);
    Tensor & ga = t.grad_buf(a);
    Tensor & gb = t.grad_buf(b);
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i];
      gb[i] -= g[i];
    }
  });
}

Tape::NodeId Tape::mul(NodeId a, NodeId b)
{
  const Tensor & va = value(a);
  const Tensor & vb = value(b);
  if (!va.same_shape(vb)) throw ShapeMismatch("mul");
  Tensor out = va;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= vb[i];
  return push(std::move(out), {a, b}, [a, b](Tape & t, NodeId self) {
    const Tensor & g = t.grad(self);
    const Tensor & va = t.value(a);
    const Tensor & vb = t.value(b);
    Tensor & ga = t.grad_buf(a);
    Tensor & gb = t.grad_buf(b);
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i] * vb[i];
      gb[i] += g[i] * va[i];
    }
  });
}

Tape::NodeId Tape::matmul(NodeId a, NodeId b)
{
  const Tensor & va = value(a);
  const Tensor & vb = value(b);
  if (va.shape.size() != 2) throw ShapeMismatch("matmul lhs must be rank 2");
  const std::size_t m = va.shape[0];
  const std::size_t k = va.shape[1];
  const bool vec = vb.shape.size() == 1;
  const std::size_t n = vec ? 1 : vb.shape[1];
  if ((vec ? vb.shape[0] : vb.shape[0]) != k) throw ShapeMismatch("matmul inner dim");
  Tensor out = Tensor::zeros(vec ? std::vector<std::size_t>{m} : std::vector<std::size_t>{m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double aij = va[i * k + j];
      if (aij == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        out[i * n + c] += aij * vb[j * n + c];
      }
    }
  }
  return push(std::move(out), {a, b}, [a, b, m, k, n](Tape & t, NodeId self) {
    const Tensor & g = t.grad(self);
    const Tensor & va = t.value(a);
    const Tensor & vb = t.value(b);
    Tensor & ga = t.grad_buf(a);
    Tensor & gb = t.grad_buf(b);
    // dA = G · Bᵀ
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        double acc = 0.0;
        for (std::size_t c = 0; c < n; ++c) acc += g[i * n + c] * vb[j * n + c];
        ga[i * k + j] += acc;
      }
    }
    // dB = Aᵀ · G
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t c = 0; c < n; ++c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += va[i * k + j] * g[i * n + c];
        gb[j * n + c] += acc;
      }
    }
  });
}

Tape::NodeId Tape::concat(const std::vector<NodeId> & parts)
{
  std::size_t total = 0;
  for (auto p : parts) total += value(p).size();
  Tensor out = Tensor::zeros({total});
  std::size_t off = 0;
  for (auto p : parts) {
    const Tensor & v = value(p);
    std::copy(v.data.begin(), v.data.end(), out.data.begin() + static_cast<long>(off));
    off += v.size();
  }
  return push(std::move(out), parts, [parts](Tape & t, NodeId self) {
    const Tensor & g = t.grad(self);
    std::size_t off = 0;
    for (auto p : parts) {
      Tensor & gp = t.grad_buf(p);
      for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += g[off + i];
      off += gp.size();
    }
  });
}

Tape::NodeId Tape::slice(NodeId a, std::size_t start, std::size_t len)
{
  const Tensor & va = value(a);
  if (start + len > va.size()) throw ShapeMismatch("slice out of range");
  Tensor out = Tensor::zeros({len});
  std::copy(
    va.data.begin() + static_cast<long>(start), va.data.begin() + static_cast<long>(start + len),
    out.data.begin());
  return push(std::move(out), {a}, [a, start, len](Tape & t, NodeId self) {
    const Tensor & g = t.grad(self);
    Tensor & ga = t.grad_buf(a);
    for (std::size_t i = 0; i < len; ++i) ga[start + i] += g[i];
  });
}

Tape::NodeId Tape::tanh_op(NodeId a)
{
  Tensor out = value(a);
  for (auto & v : out.data) v = std::tanh(v);
  return push(std::move(out), {a}, [a](Tape & t, NodeId self) {
    const Tensor & g = t.grad(self);
    const Tensor & y = t.value(self);
    Tensor & ga = t.grad_buf(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Tape::NodeId Tape::sigmoid(NodeId a)
{
  Tensor out = value(a);
  for (auto & v : out.data) v = 1.0 / (1.0 + std::exp(-v));
  return push(std::move(out), {a}, [a](Tape & t, NodeId self) {
    const Tensor & g = t.grad(self);
    const Tensor & y = t.value(self);
    Tensor & ga = t.grad_buf(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

Tape::NodeId Tape::relu(NodeId a)
{
  Tensor out = value(a);
  for (auto & v : out.data) v = v > 0.0 ? v : 0.0;
  return push(std::move(out), {a}, [a](Tape & t, NodeId self) {
    const Tensor & g = t.grad(self);
    const Tensor & x = t.value(a);
    Tensor & ga = t.grad_buf(a);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (x[i] > 0.0) ga[i] += g[i];
    }
  });
}

Tape::NodeId Tape::exp_op(NodeId a)
{
  Tensor out = value(a);
  for (auto & v : out.data) v = std::exp(v);
  return push(std::move(out), {a}, [a](Tape & t, NodeId self) {
    const Tensor & g = t.grad(self);
    const Tensor & y = t.value(self);
    Tensor & ga = t.grad_buf(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i];
  });
}

Tape::NodeId Tape::log_op(NodeId a)
{
  Tensor out = value(a);
  for (auto & v : out.data) {
    if (v <= 0.0) throw DomainError("log of non-positive value");
    v = std::log(v);
  }
  return push(std::move(out), {a}, [a](Tape & t, NodeId self) {
    const Tensor & g = t.grad(self);
    const Tensor & x = t.value(a);
    Tensor & ga = t.grad_buf(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] / x[i];
  });
}

Tape::NodeId Tape::softmax(NodeId a)
{
  const Tensor & x = value(a);
  Tensor out = x;
  const double mx = *std::max_element(x.data.begin(), x.data.end());
  double denom = 0.0;
  for (auto & v : out.data) {
    v = std::exp(v - mx);
    denom += v;
  }
  for (auto & v : out.data) v /= denom;
  return push(std::move(out), {a}, [a](Tape & t, NodeId self) {
    const Tensor & g = t.grad(self);
    const Tensor & y = t.value(self);
    Tensor & ga = t.grad_buf(a);
    double dot = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) dot += g[i] * y[i];
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += y[i] * (g[i] - dot);
  });
}

Tape::NodeId Tape::sum(NodeId a)
{
  double s = 0.0;
  for (double v : value(a).data) s += v;
  return push(Tensor::scalar(s), {a}, [a](Tape & t, NodeId self) {
    const double g = t.grad(self)[0];
    Tensor & ga = t.grad_buf(a);
    for (auto & v : ga.data) v += g;
  });
}

Tape::NodeId Tape::mean(NodeId a)
{
  const std::size_t n = value(a).size();
  double s = 0.0;
  for (double v : value(a).data) s += v;
  return push(Tensor::scalar(s / static_cast<double>(n)), {a}, [a, n](Tape & t, NodeId self) {
    const double g = t.grad(self)[0] / static_cast<double>(n);
    Tensor & ga = t.grad_buf(a);
    for (auto & v : ga.data) v += g;
  });
}

Tape::NodeId Tape::euclidean_norm(NodeId a)
{
  double s = 0.0;
  for (double v : value(a).data) s += v * v;
  const double nrm = std::sqrt(s);
  return push(Tensor::scalar(nrm), {a}, [a](Tape & t, NodeId self) {
    const double g = t.grad(self)[0];
    const double nrm = t.value(self)[0];
    if (nrm == 0.0) return;  // subgradient at the kink
    const Tensor & x = t.value(a);
    Tensor & ga = t.grad_buf(a);
    for (std::size_t i = 0; i < x.size(); ++i) ga[i] += g * x[i] / nrm;
  });
}

Tape::NodeId Tape::min_all(NodeId a)
{
  const Tensor & x = value(a);
  std::size_t arg = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] < x[arg]) arg = i;
  }
  return push(Tensor::scalar(x[arg]), {a}, [a, arg](Tape & t, NodeId self) {
    t.grad_buf(a)[arg] += t.grad(self)[0];
  });
}

Tape::NodeId Tape::max_all(NodeId a)
{
  const Tensor & x = value(a);
  std::size_t arg = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] > x[arg]) arg = i;
  }
  return push(Tensor::scalar(x[arg]), {a}, [a, arg](Tape & t, NodeId self) {
    t.grad_buf(a)[arg] += t.grad(self)[0];
  });
}

Tape::NodeId Tape::dropout(NodeId a, double rate, Rng & rng, bool train)
{
  if (!train || rate == 0.0) {
    // identity node keeps graph structure uniform between modes
    return scale(a, 1.0);
  }
  const Tensor & x = value(a);
  std::vector<double> mask(x.size());
  const double keep = 1.0 - rate;
  for (auto & m : mask) m = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
  return mask_select(a, mask);
}

Tape::NodeId Tape::mask_select(NodeId a, const std::vector<double> & mask)
{
  const Tensor & x = value(a);
  if (mask.size() != x.size()) throw ShapeMismatch("mask_select");
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return push(std::move(out), {a}, [a, mask](Tape & t, NodeId self) {
    const Tensor & g = t.grad(self);
    Tensor & ga = t.grad_buf(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * mask[i];
  });
}

Tape::NodeId Tape::scale(NodeId a, double s)
{
  Tensor out = value(a);
  for (auto & v : out.data) v *= s;
  return push(std::move(out), {a}, [a, s](Tape & t, NodeId self) {
    const Tensor & g = t.grad(self);
    Tensor & ga = t.grad_buf(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * s;
  });
}

Tape::NodeId Tape::add_const(NodeId a, double c)
{
  Tensor out = value(a);
  for (auto & v : out.data) v += c;
  return push(std::move(out), {a}, [a](Tape & t, NodeId self) {
    const Tensor & g = t.grad(self);
    Tensor & ga = t.grad_buf(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

void Tape::backward(NodeId output)
{
  if (!value(output).is_scalar()) throw NotScalarOutput();
  grads_.clear();
  grads_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    grads_[i] = Tensor::zeros(nodes_[i].value.shape);
  }
  grads_[output][0] = 1.0;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    if (nodes_[i].back) {
      nodes_[i].back(*this, i);
    }
  }
}

}  // namespace tip
