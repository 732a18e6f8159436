#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "tip/tasks.hpp"

using namespace tip;

namespace
{

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

PredictionSampleSet random_preds(Rng & rng, std::size_t k, std::size_t n_agents, std::size_t t)
{
  PredictionSampleSet preds;
  std::vector<double> logits;
  for (std::size_t s = 0; s < k; ++s) {
    std::vector<std::vector<Point2d>> sample(n_agents);
    for (auto & traj : sample) {
      for (std::size_t i = 0; i < t; ++i) traj.push_back({rng.uniform(-8, 8), rng.uniform(-8, 8)});
    }
    preds.samples.push_back(sample);
    logits.push_back(rng.uniform(-1, 1));
  }
  double denom = 0;
  for (double l : logits) denom += std::exp(l);
  for (double l : logits) preds.weights.push_back(std::exp(l) / denom);
  return preds;
}

/// Mirrors a value-level sample set onto a tape so graph and plain utilities
/// can be compared on identical inputs.
ForwardNodes to_nodes(Tape & tape, const PredictionSampleSet & preds, const ModelConfig & cfg)
{
  ForwardNodes fwd;
  for (const auto & sample : preds.samples) {
    std::vector<double> flat;
    for (std::size_t i = 0; i < cfg.n_agents; ++i) {
      for (std::size_t t = 0; t < cfg.t_future; ++t) {
        flat.push_back(sample[i][t].x);
        flat.push_back(sample[i][t].y);
      }
    }
    fwd.samples.push_back(tape.leaf(Tensor::vector(flat)));
  }
  fwd.weights = tape.leaf(Tensor::vector(preds.weights));
  return fwd;
}

Trajectory straight_plan(double speed, std::size_t n, double dt = 0.1)
{
  std::vector<Point2d> pts;
  for (std::size_t t = 0; t < n; ++t) pts.push_back({speed * dt * static_cast<double>(t + 1), 0.0});
  return Trajectory(pts, dt);
}

}  // namespace

TEST_CASE("argmax_lowest breaks ties toward the lowest index")
{
  CHECK(argmax_lowest({1.0, 3.0, 2.0}) == 1);
  CHECK(argmax_lowest({2.0, 2.0, 2.0}) == 0);
  CHECK(argmax_lowest({1.0, 5.0, 5.0}) == 1);
  CHECK(argmax_lowest({4.0}) == 0);
}

TEST_CASE("u_efficiency is the plan path length")
{
  CHECK(u_efficiency(straight_plan(10.0, 5)) == doctest::Approx(10.0 * 0.1 * 4));
  CHECK(u_efficiency(Trajectory({{0, 0}, {3, 4}})) == doctest::Approx(5.0));
}

TEST_CASE("u_safety caps the expectation, not the per-sample distances")
{
  PredictionSampleSet preds;
  // one object whose closest approach is 2 m in sample 0 and 10 m in sample 1
  preds.samples = {
    {{{0.0, 2.0}, {5.0, 2.0}}},
    {{{0.0, 10.0}, {5.0, 10.0}}},
  };
  preds.weights = {0.5, 0.5};
  const Trajectory plan({{0, 0}, {5, 0}});
  const double d_safe = 3.64;
  // expectation 0.5*2 + 0.5*10 = 6, capped afterwards at 3.64.
  // capping inside the expectation would give 2.82 instead.
  CHECK(u_safety(plan, preds, 0, d_safe) == doctest::Approx(3.64));

  preds.weights = {0.9, 0.1};
  // expectation 0.9*2 + 0.1*10 = 2.8, below the cap
  CHECK(u_safety(plan, preds, 0, d_safe) == doctest::Approx(2.8));
}

TEST_CASE("u_safety uses the closest step of each sample")
{
  PredictionSampleSet preds;
  preds.samples = {{{{0.0, 7.0}, {1.0, 1.0}, {2.0, 6.0}}}};
  preds.weights = {1.0};
  const Trajectory plan({{0, 0}, {1, 0}, {2, 0}});
  CHECK(u_safety(plan, preds, 0, 100.0) == doctest::Approx(1.0));
}

TEST_CASE("planning utilities combine efficiency and weighted safety")
{
  PredictionSampleSet preds;
  preds.samples = {{{{0.0, 3.0}, {1.0, 3.0}}}};
  preds.weights = {1.0};
  TaskSpec spec;
  spec.kind = TaskKind::PlanningSelfish;
  const Trajectory plan({{0, 0}, {1, 0}});
  CHECK(u_planning(plan, preds, 0, spec) == doctest::Approx(1.0 + 5.0 * 3.0));

  spec.kind = TaskKind::PlanningAltruistic;
  const Trajectory object_future({{0, 3}, {2, 3}});  // length 2
  CHECK(
    u_planning_altruistic(plan, object_future, preds, 0, spec) == doctest::Approx(2.0 + 5.0 * 3.0));
}

TEST_CASE("hard collision score is a strict threshold on closest approach")
{
  const double d = 3.64;
  std::vector<std::vector<Point2d>> joint = {
    {{0, 0}, {1, 0}},
    {{0, 5}, {1, 5}},
  };
  CHECK(collision_score_hard(joint, 0, {1}, d) == 0);
  joint[1] = {{0, 5}, {1, 2}};
  CHECK(collision_score_hard(joint, 0, {1}, d) == 1);
  // exactly at the threshold counts as safe
  joint[1] = {{0, d}, {1, d}};
  CHECK(collision_score_hard(joint, 0, {1}, d) == 0);
}

TEST_CASE("multi-object collision scores combine as any / max")
{
  const double d = 3.64;
  std::vector<std::vector<Point2d>> joint = {
    {{0, 0}},
    {{0, 100}},
    {{0, 1}},
  };
  CHECK(collision_score_hard(joint, 0, {1}, d) == 0);
  CHECK(collision_score_hard(joint, 0, {1, 2}, d) == 1);
  CHECK(
    collision_score_soft(joint, 0, {1, 2}, d) ==
    doctest::Approx(std::max(sigmoid(d - 100.0), sigmoid(d - 1.0))));
}

TEST_CASE("soft collision score is sigmoid of threshold minus closest approach")
{
  const double d = 3.64;
  std::vector<std::vector<Point2d>> joint = {
    {{0, 0}, {1, 0}},
    {{0, 9}, {1, 2}},
  };
  CHECK(collision_score_soft(joint, 0, {1}, d) == doctest::Approx(sigmoid(d - 2.0)));
  // at the threshold the soft score is exactly one half
  joint[1] = {{0, d}, {5, 5}};
  CHECK(collision_score_soft(joint, 0, {1}, d) == doctest::Approx(0.5));
}

TEST_CASE("warning utilities are the expected score and its complement")
{
  PredictionSampleSet preds;
  preds.samples = {
    {{{0, 0}}, {{0, 1}}},   // collision: distance 1
    {{{0, 0}}, {{0, 50}}},  // clear: distance 50
  };
  preds.weights = {0.3, 0.7};
  TaskSpec spec;
  const auto hard = warning_utilities(preds, 0, {1}, spec, /*soft=*/false);
  CHECK(hard.first == doctest::Approx(0.3));
  CHECK(hard.second == doctest::Approx(0.7));

  const auto soft = warning_utilities(preds, 0, {1}, spec, /*soft=*/true);
  const double expected =
    0.3 * sigmoid(spec.d_warn - 1.0) + 0.7 * sigmoid(spec.d_warn - 50.0);
  CHECK(soft.first == doctest::Approx(expected));
  CHECK(soft.first + soft.second == doctest::Approx(1.0));
}

TEST_CASE("ground truth warning decision follows the realized closest approach")
{
  Scene scene;
  scene.past = {Trajectory({{0, 0}}), Trajectory({{0, 10}})};
  scene.ego_index = 0;
  scene.object_indices = {1};
  TaskSpec spec;

  scene.future = {Trajectory({{0, 0}, {1, 0}}), Trajectory({{0, 10}, {1, 1}})};
  auto warn = ground_truth_decision(scene, spec);
  CHECK(warn.index == 0);
  CHECK(warn.utilities == std::vector<double>{1.0, 0.0});

  scene.future[1] = Trajectory({{0, 10}, {1, 10}});
  auto clear = ground_truth_decision(scene, spec);
  CHECK(clear.index == 1);
  CHECK(clear.utilities == std::vector<double>{0.0, 1.0});
}

TEST_CASE("ground truth planning decision weighs outcomes by probability")
{
  Scene scene;
  scene.past = {Trajectory({{0, 0}}), Trajectory({{0, 10}})};
  scene.future = scene.past;
  scene.object_indices = {1};
  TaskSpec spec;
  spec.kind = TaskKind::PlanningSelfish;

  PlanCandidateSet set;
  PlanCandidate close;
  close.plan = straight_plan(10.0, 3);  // length 2
  close.object_futures = {{
    {0.5, Trajectory({{1.0, 1.0}, {2.0, 1.0}, {3.0, 1.0}})},
    {0.5, Trajectory({{1.0, 2.0}, {2.0, 2.0}, {3.0, 2.0}})},
  }};
  PlanCandidate far;
  far.plan = straight_plan(5.0, 3);  // length 1
  far.object_futures = {{{1.0, Trajectory({{1.0, 100.0}, {2.0, 100.0}, {3.0, 100.0}})}}};
  set.candidates = {close, far};

  const auto decision = ground_truth_decision(scene, spec, &set);
  // close: 2 + 5 * (0.5*min(3.64, ~0.92) + 0.5*min(3.64, ~1.84)) computed per outcome
  const double d0 = std::min(spec.d_safe, distance({1.0, 0.0}, {1.0, 1.0}));
  const double d1 = std::min(spec.d_safe, distance({1.0, 0.0}, {1.0, 2.0}));
  const double u_close = 0.5 * (2.0 + spec.beta * d0) + 0.5 * (2.0 + spec.beta * d1);
  const double u_far = 1.0 + spec.beta * spec.d_safe;
  CHECK(decision.utilities[0] == doctest::Approx(u_close));
  CHECK(decision.utilities[1] == doctest::Approx(u_far));
  CHECK(decision.index == (u_close >= u_far ? 0 : 1));

  // altruistic ground truth scores the object's progress instead
  TaskSpec alt = spec;
  alt.kind = TaskKind::PlanningAltruistic;
  const auto alt_decision = ground_truth_decision(scene, alt, &set);
  const double ua_close = 0.5 * (2.0 + alt.beta * d0) + 0.5 * (2.0 + alt.beta * d1);
  const double ua_far = 2.0 + alt.beta * alt.d_safe;
  CHECK(alt_decision.utilities[0] == doctest::Approx(ua_close));
  CHECK(alt_decision.utilities[1] == doctest::Approx(ua_far));
}

TEST_CASE("planning decisions require simulated futures")
{
  Scene scene;
  scene.past = {Trajectory({{0, 0}})};
  scene.future = scene.past;
  TaskSpec spec;
  spec.kind = TaskKind::PlanningSelfish;
  CHECK_THROWS_AS(ground_truth_decision(scene, spec, nullptr), MissingSimulatedFutures);

  PlanCandidateSet set;
  set.candidates.emplace_back();
  set.candidates[0].plan = straight_plan(1.0, 2);
  CHECK_THROWS_AS(ground_truth_decision(scene, spec, &set), MissingSimulatedFutures);
}

TEST_CASE("graph utilities agree with their plain counterparts")
{
  Rng rng(55);
  for (int trial = 0; trial < 120; ++trial) {
    ModelConfig cfg;
    cfg.n_agents = 2 + rng.uniform_int(2);
    cfg.t_future = 3 + rng.uniform_int(5);
    cfg.k_samples = 1 + rng.uniform_int(4);
    TaskSpec spec;
    spec.kind = TaskKind::PlanningSelfish;

    const auto preds = random_preds(rng, cfg.k_samples, cfg.n_agents, cfg.t_future);
    const Trajectory plan = straight_plan(rng.uniform(1, 12), cfg.t_future);
    std::vector<std::size_t> objects;
    for (std::size_t i = 1; i < cfg.n_agents; ++i) objects.push_back(i);

    Tape tape;
    const auto fwd = to_nodes(tape, preds, cfg);

    const auto safety = u_safety_node(tape, plan, fwd, 1, spec.d_safe, cfg);
    CHECK(tape.scalar_value(safety) == doctest::Approx(u_safety(plan, preds, 1, spec.d_safe)));

    const auto planning =
      u_planning_node(tape, plan, u_efficiency(plan), fwd, 1, spec, cfg);
    CHECK(tape.scalar_value(planning) == doctest::Approx(u_planning(plan, preds, 1, spec)));

    const auto [warn, not_warn] = warning_utilities_node(tape, fwd, 0, objects, spec, cfg);
    const auto plain = warning_utilities(preds, 0, objects, spec, /*soft=*/true);
    CHECK(tape.scalar_value(warn) == doctest::Approx(plain.first));
    CHECK(tape.scalar_value(not_warn) == doctest::Approx(plain.second));
  }
}

TEST_CASE("warning utility gradient pulls on the closest approach")
{
  ModelConfig cfg;
  cfg.n_agents = 2;
  cfg.t_future = 3;
  cfg.k_samples = 1;
  PredictionSampleSet preds;
  preds.samples = {{
    {{0, 0}, {1, 0}, {2, 0}},
    {{0, 9}, {1, 2}, {2, 9}},
  }};
  preds.weights = {1.0};
  Tape tape;
  const auto fwd = to_nodes(tape, preds, cfg);
  TaskSpec spec;
  const auto [warn, not_warn] = warning_utilities_node(tape, fwd, 0, {1}, spec, cfg);
  (void)not_warn;
  tape.backward(warn);
  const auto & g = tape.value(fwd.samples[0]);
  (void)g;
  const auto & grad = tape.grad(fwd.samples[0]);
  // only the step-1 pair moves, and only along y because the pair is
  // x-aligned (ego index 3, object index 9 in the flat layout)
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const bool active = i == 3 || i == 9;
    if (active) {
      CHECK(std::abs(grad[i]) > 1e-6);
    } else {
      CHECK(grad[i] == 0.0);
    }
  }
}

TEST_CASE("u_safety is monotone in the prediction-to-plan clearance")
{
  Rng rng(56);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t t = 3 + rng.uniform_int(4);
    const Trajectory plan = straight_plan(rng.uniform(1, 10), t);
    PredictionSampleSet near, far;
    const double base = rng.uniform(0.2, 1.5);
    const double shift = rng.uniform(0.5, 3.0);
    std::vector<std::vector<Point2d>> sn(2), sf(2);
    for (std::size_t i = 0; i < t; ++i) {
      sn[0].push_back(plan.points[i]);
      sf[0].push_back(plan.points[i]);
      sn[1].push_back({plan.points[i].x, plan.points[i].y + base});
      sf[1].push_back({plan.points[i].x, plan.points[i].y + base + shift});
    }
    near.samples = {sn};
    far.samples = {sf};
    near.weights = far.weights = {1.0};
    CHECK(u_safety(plan, near, 1, 3.64) <= u_safety(plan, far, 1, 3.64));
  }
}
