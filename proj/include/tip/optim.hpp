#ifndef TIP_OPTIM_HPP_
#define TIP_OPTIM_HPP_

#include <functional>
#include <map>
#include <string>

#include "tip/tensor.hpp"

namespace tip
{

using ParamMap = std::map<std::string, Tensor>;

struct AdamConfig
{
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState
{
  ParamMap m;
  ParamMap v;
  std::size_t step = 0;
};

/// One bias-corrected Adam update. The moment state is created lazily on the
/// first call from the parameter shapes.
void adam_step(
  ParamMap & params, const ParamMap & grads, AdamState & state, const AdamConfig & cfg);

/// Central-difference gradient check. `f` must be deterministic across calls.
/// Returns the worst relative error with denominator max(|a|, |n|, 1e-8).
double grad_check(
  const std::function<double(const ParamMap &)> & f, const ParamMap & analytic_grads,
  const ParamMap & params, double eps);

}  // namespace tip

#endif  // TIP_OPTIM_HPP_
