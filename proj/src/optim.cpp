#include "tip/optim.hpp"

#include <algorithm>
#include <cmath>

namespace tip
{

void adam_step(ParamMap & params, const ParamMap & grads, AdamState & state, const AdamConfig & cfg)
{
  if (state.m.empty()) {
    for (const auto & [name, p] : params) {
      state.m[name] = Tensor::zeros(p.shape);
      state.v[name] = Tensor::zeros(p.shape);
    }
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (auto & [name, p] : params) {
    const auto git = grads.find(name);
    if (git == grads.end()) throw ShapeMismatch("adam_step: missing gradient for " + name);
    const Tensor & g = git->second;
    Tensor & m = state.m[name];
    Tensor & v = state.v[name];
    if (!p.same_shape(g) || !p.same_shape(m)) throw ShapeMismatch("adam_step: " + name);
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.epsilon);
    }
  }
}

double grad_check(
  const std::function<double(const ParamMap &)> & f, const ParamMap & analytic_grads,
  const ParamMap & params, double eps)
{
  double worst = 0.0;
  ParamMap probe = params;
  for (auto & [name, p] : probe) {
    const auto git = analytic_grads.find(name);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double saved = p[i];
      p[i] = saved + eps;
      const double fp = f(probe);
      p[i] = saved - eps;
      const double fm = f(probe);
      p[i] = saved;
      const double numeric = (fp - fm) / (2.0 * eps);
      const double analytic = git == analytic_grads.end() ? 0.0 : git->second[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(analytic - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace tip
