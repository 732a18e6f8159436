#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "tip/losses.hpp"

using namespace tip;

namespace
{

ModelConfig tiny_config(std::size_t n_agents = 1, std::size_t t_future = 2, std::size_t k = 2)
{
  ModelConfig cfg;
  cfg.n_agents = n_agents;
  cfg.t_future = t_future;
  cfg.k_samples = k;
  return cfg;
}

Tape::NodeId flat_sample(Tape & tape, const std::vector<Point2d> & pts_by_slot)
{
  std::vector<double> flat;
  for (const auto & p : pts_by_slot) {
    flat.push_back(p.x);
    flat.push_back(p.y);
  }
  return tape.leaf(Tensor::vector(flat));
}

}  // namespace

TEST_CASE("sample_distance averages per-point displacement over valid slots")
{
  const ModelConfig cfg = tiny_config(1, 2);
  Tape tape;
  const auto sample = flat_sample(tape, {{0, 0}, {3, 4}});
  const std::vector<Trajectory> gt = {Trajectory({{0, 1}, {0, 0}})};
  // distances: 1 and 5 -> mean 3
  CHECK(tape.scalar_value(sample_distance(tape, sample, gt, cfg)) == doctest::Approx(3.0));
}

TEST_CASE("sample_distance ignores invalid ground-truth steps")
{
  const ModelConfig cfg = tiny_config(1, 2);
  Tape tape;
  const auto sample = flat_sample(tape, {{0, 0}, {3, 4}});
  const std::vector<Trajectory> gt = {
    Trajectory({{0, 1}, {100, 100}}, std::vector<bool>{true, false})};
  CHECK(tape.scalar_value(sample_distance(tape, sample, gt, cfg)) == doctest::Approx(1.0));
}

TEST_CASE("sample_distance averages jointly over agents")
{
  const ModelConfig cfg = tiny_config(2, 1);
  Tape tape;
  const auto sample = flat_sample(tape, {{0, 0}, {0, 0}});
  const std::vector<Trajectory> gt = {Trajectory({{2, 0}}), Trajectory({{0, 4}})};
  CHECK(tape.scalar_value(sample_distance(tape, sample, gt, cfg)) == doctest::Approx(3.0));
}

TEST_CASE("sample_distance requires at least one valid slot")
{
  const ModelConfig cfg = tiny_config(1, 1);
  Tape tape;
  const auto sample = flat_sample(tape, {{0, 0}});
  const std::vector<Trajectory> gt = {Trajectory({{1, 1}}, std::vector<bool>{false})};
  CHECK_THROWS_AS(sample_distance(tape, sample, gt, cfg), EmptyGroundTruth);
}

TEST_CASE("accuracy_loss selects the closest sample and its weight")
{
  const ModelConfig cfg = tiny_config(1, 1, 2);
  Tape tape;
  ForwardNodes preds;
  preds.samples = {flat_sample(tape, {{5, 0}}), flat_sample(tape, {{1, 0}})};
  preds.weights = tape.leaf(Tensor::vector({0.25, 0.75}));
  const std::vector<Trajectory> gt = {Trajectory({{0, 0}})};
  // closest is sample 1 at distance 1 with weight 0.75
  const double expected = -std::log(0.75) + 1.0;
  CHECK(tape.scalar_value(accuracy_loss(tape, preds, gt, cfg)) == doctest::Approx(expected));
}

TEST_CASE("accuracy_loss ties break to the lowest sample index")
{
  const ModelConfig cfg = tiny_config(1, 1, 3);
  Tape tape;
  ForwardNodes preds;
  preds.samples = {
    flat_sample(tape, {{1, 0}}), flat_sample(tape, {{0, 1}}), flat_sample(tape, {{-1, 0}})};
  preds.weights = tape.leaf(Tensor::vector({0.2, 0.5, 0.3}));
  const std::vector<Trajectory> gt = {Trajectory({{0, 0}})};
  const double expected = -std::log(0.2) + 1.0;
  CHECK(tape.scalar_value(accuracy_loss(tape, preds, gt, cfg)) == doctest::Approx(expected));
}

TEST_CASE("accuracy_loss gradient flows only through the selected sample")
{
  const ModelConfig cfg = tiny_config(1, 1, 2);
  Tape tape;
  ForwardNodes preds;
  const auto far = flat_sample(tape, {{5, 0}});
  const auto near = flat_sample(tape, {{1, 0}});
  preds.samples = {far, near};
  preds.weights = tape.softmax(tape.leaf(Tensor::vector({0.0, 0.0})));
  const std::vector<Trajectory> gt = {Trajectory({{0, 0}})};
  tape.backward(accuracy_loss(tape, preds, gt, cfg));
  CHECK(tape.grad(far).data == std::vector<double>{0.0, 0.0});
  CHECK(tape.grad(near).data[0] == doctest::Approx(1.0));
}

TEST_CASE("task_reward is the softmax probability of the optimal decision")
{
  Tape tape;
  const std::vector<Tape::NodeId> utilities = {
    tape.constant_scalar(1.0), tape.constant_scalar(2.0), tape.constant_scalar(0.5)};
  const double denom = std::exp(1.0) + std::exp(2.0) + std::exp(0.5);
  CHECK(
    tape.scalar_value(task_reward(tape, utilities, 1)) ==
    doctest::Approx(std::exp(2.0) / denom));
  CHECK(
    tape.scalar_value(task_reward(tape, utilities, 2)) ==
    doctest::Approx(std::exp(0.5) / denom));
}

TEST_CASE("task reward properties")
{
  Rng rng(31);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 2 + rng.uniform_int(4);
    std::vector<double> utilities;
    // range kept small enough that softmax cannot round to exactly 0 or 1
    for (std::size_t i = 0; i < n; ++i) utilities.push_back(rng.uniform(-8, 8));
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = task_reward_value(utilities, i);
      CHECK(r > 0.0);
      CHECK(r < 1.0);
      total += r;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

    // invariance to a constant shift of all utilities
    std::vector<double> shifted = utilities;
    const double c = rng.uniform(-100, 100);
    for (auto & u : shifted) u += c;
    CHECK(
      task_reward_value(shifted, 0) == doctest::Approx(task_reward_value(utilities, 0)).epsilon(1e-9));

    // raising the optimal utility raises the reward
    std::vector<double> raised = utilities;
    raised[0] += 1.0;
    CHECK(task_reward_value(raised, 0) > task_reward_value(utilities, 0));
  }
}

TEST_CASE("tape task_reward matches the plain-value softmax")
{
  Rng rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.uniform_int(4);
    std::vector<double> utilities;
    Tape tape;
    std::vector<Tape::NodeId> nodes;
    for (std::size_t i = 0; i < n; ++i) {
      utilities.push_back(rng.uniform(-50, 50));
      nodes.push_back(tape.constant_scalar(utilities.back()));
    }
    const std::size_t idx = rng.uniform_int(n);
    CHECK(
      tape.scalar_value(task_reward(tape, nodes, idx)) ==
      doctest::Approx(task_reward_value(utilities, idx)).epsilon(1e-12));
  }
}

TEST_CASE("total_loss combines the terms linearly in alpha")
{
  LossConfig cfg;
  cfg.alpha = 20.0;
  Tape tape;
  const auto acc = tape.constant_scalar(1.5);
  const auto r = tape.constant_scalar(0.3);
  CHECK(tape.scalar_value(total_loss(tape, acc, r, cfg)) == doctest::Approx(1.5 - 20.0 * 0.3));

  LossConfig off;
  off.alpha = 0.0;
  CHECK(tape.scalar_value(total_loss(tape, acc, r, off)) == doctest::Approx(1.5));
}

TEST_CASE("increasing the optimal utility lowers the total loss")
{
  Rng rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    LossConfig cfg;
    cfg.alpha = rng.uniform(0.1, 50.0);
    std::vector<double> utilities = {rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const double acc = rng.uniform(0.0, 3.0);

    auto loss_at = [&](double bump) {
      Tape tape;
      const std::vector<Tape::NodeId> nodes = {
        tape.constant_scalar(utilities[0] + bump), tape.constant_scalar(utilities[1])};
      return tape.scalar_value(
        total_loss(tape, tape.constant_scalar(acc), task_reward(tape, nodes, 0), cfg));
    };
    CHECK(loss_at(0.5) < loss_at(0.0));
  }
}

TEST_CASE("softmax_values handles extreme logits without overflow")
{
  const auto p = softmax_values({1e4, 1e4 - 1.0});
  CHECK(std::isfinite(p[0]));
  CHECK(p[0] + p[1] == doctest::Approx(1.0));
  CHECK(p[0] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
}
