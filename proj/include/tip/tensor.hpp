#ifndef TIP_TENSOR_HPP_
#define TIP_TENSOR_HPP_

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace tip
{

struct ShapeMismatch : std::runtime_error
{
  explicit ShapeMismatch(const std::string & what) : std::runtime_error("shape mismatch: " + what)
  {
  }
};

struct DomainError : std::runtime_error
{
  explicit DomainError(const std::string & what) : std::runtime_error("domain error: " + what) {}
};

/// Dense row-major tensor of 64-bit reals.
struct Tensor
{
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;

  static Tensor zeros(std::vector<std::size_t> shape)
  {
    Tensor t;
    t.shape = std::move(shape);
    t.data.assign(t.count(t.shape), 0.0);
    return t;
  }

  static Tensor scalar(double v)
  {
    Tensor t;
    t.shape = {1};
    t.data = {v};
    return t;
  }

  static Tensor vector(std::vector<double> values)
  {
    Tensor t;
    t.shape = {values.size()};
    t.data = std::move(values);
    return t;
  }

  static std::size_t count(const std::vector<std::size_t> & shape)
  {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
  }

  std::size_t size() const { return data.size(); }
  double & operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  bool is_scalar() const { return data.size() == 1; }

  bool same_shape(const Tensor & o) const { return shape == o.shape; }

  /// Rows/cols for rank-2 tensors; a rank-1 tensor is a column vector.
  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }
};

}  // namespace tip

#endif  // TIP_TENSOR_HPP_
