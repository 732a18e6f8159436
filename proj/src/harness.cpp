#include "tip/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace tip
{

ModelConfig TrainConfig::model_config() const
{
  ModelConfig m;
  m.n_agents = n_agents;
  m.t_past = t_past;
  m.t_future = t_future;
  m.k_samples = k_samples;
  m.dropout_rate = dropout_rate;
  m.has_task_encoder = task != TaskKind::Warning;
  return m;
}

TaskSpec TrainConfig::task_spec() const
{
  TaskSpec spec;
  spec.kind = task;
  spec.d_safe = d_safe;
  spec.d_warn = d_warn;
  spec.beta = beta;
  return spec;
}

std::pair<std::vector<Scene>, std::vector<Scene>> split_dataset(
  const std::vector<Scene> & scenes, std::uint64_t split_seed)
{
  std::set<std::string> ids;
  for (const auto & s : scenes) {
    if (!ids.insert(s.id).second) {
      throw std::runtime_error("duplicate scenario id: " + s.id);
    }
  }
  std::vector<std::size_t> order(scenes.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(split_seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniform_int(i)]);
  }
  const std::size_t n_train = (scenes.size() * 8) / 10;
  std::pair<std::vector<Scene>, std::vector<Scene>> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? out.first : out.second).push_back(scenes[order[i]]);
  }
  return out;
}

namespace
{

double expected_object_path_length(const PlanCandidate & cand)
{
  double total = 0.0;
  for (const auto & outcome : cand.object_futures.front()) {
    total += outcome.probability * path_length(outcome.trajectory);
  }
  return total;
}

Tape::NodeId maybe_noisy(
  Tape & tape, Tape::NodeId utility, const TrainConfig & cfg, Rng & rng)
{
  if (cfg.utility_noise_sigma <= 0.0) return utility;
  const double magnitude = std::abs(tape.scalar_value(utility));
  return tape.add_const(utility, rng.normal(0.0, cfg.utility_noise_sigma * magnitude));
}

}  // namespace

Tape::NodeId build_scene_loss(
  Tape & tape, const ParamNodes & p, const Scene & scene, const TrainConfig & cfg, bool train,
  Rng & rng, double * l_acc_out, double * l_task_out)
{
  const ModelConfig model_cfg = cfg.model_config();
  const TaskSpec spec = cfg.task_spec();
  const LossConfig loss_cfg{cfg.alpha, cfg.beta};

  if (cfg.task == TaskKind::Warning) {
    ForwardNodes preds = forward(tape, scene, nullptr, p, model_cfg, train, rng);
    Tape::NodeId acc = accuracy_loss(tape, preds, scene.future, model_cfg);
    if (l_acc_out) *l_acc_out = tape.scalar_value(acc);
    if (cfg.alpha == 0.0) {
      if (l_task_out) *l_task_out = 0.0;
      return acc;
    }
    auto [u_warn, u_not] =
      warning_utilities_node(tape, preds, scene.ego_index, scene.object_indices, spec, model_cfg);
    u_warn = maybe_noisy(tape, u_warn, cfg, rng);
    u_not = maybe_noisy(tape, u_not, cfg, rng);
    const Decision gt = ground_truth_decision(scene, spec);
    Tape::NodeId r = task_reward(tape, {u_warn, u_not}, gt.index);
    if (l_task_out) *l_task_out = -tape.scalar_value(r);
    return total_loss(tape, acc, r, loss_cfg);
  }

  // planning: build candidates from the observed ego future and simulate the
  // object's reactive behavior for ground-truth utilities
  PlanCandidateSet candidates = generate_plan_candidates(scene.future[scene.ego_index]);
  const std::size_t object = scene.object_indices.front();
  attach_simulated_reactions(
    candidates, scene.future[object], scene.relation, {}, cfg.single_sample_reactions,
    cfg.single_sample_reactions ? &rng : nullptr);

  std::size_t normal_idx = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates.candidates[i].label == PlanLabel::Normal) normal_idx = i;
  }

  if (cfg.alpha == 0.0) {
    ForwardNodes preds =
      forward(tape, scene, &candidates.candidates[normal_idx].plan, p, model_cfg, train, rng);
    Tape::NodeId acc = accuracy_loss(tape, preds, scene.future, model_cfg);
    if (l_acc_out) *l_acc_out = tape.scalar_value(acc);
    if (l_task_out) *l_task_out = 0.0;
    return acc;
  }

  const Decision gt = ground_truth_decision(scene, spec, &candidates);
  Tape::NodeId acc = 0;
  std::vector<Tape::NodeId> utilities;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto & cand = candidates.candidates[i];
    ForwardNodes preds = forward(tape, scene, &cand.plan, p, model_cfg, train, rng);
    if (i == normal_idx) {
      acc = accuracy_loss(tape, preds, scene.future, model_cfg);
    }
    const double efficiency = cfg.task == TaskKind::PlanningAltruistic
                                ? expected_object_path_length(cand)
                                : path_length(cand.plan);
    Tape::NodeId u = u_planning_node(tape, cand.plan, efficiency, preds, object, spec, model_cfg);
    utilities.push_back(maybe_noisy(tape, u, cfg, rng));
  }
  if (l_acc_out) *l_acc_out = tape.scalar_value(acc);
  Tape::NodeId r = task_reward(tape, utilities, gt.index);
  if (l_task_out) *l_task_out = -tape.scalar_value(r);
  return total_loss(tape, acc, r, LossConfig{cfg.alpha, cfg.beta});
}

namespace
{

TrainResult run_training(
  const TrainConfig & cfg, const std::vector<Scene> & dataset, bool accuracy_only)
{
  TrainConfig effective = cfg;
  if (accuracy_only) effective.alpha = 0.0;

  auto [train_scenes, val_scenes] = split_dataset(dataset, cfg.split_seed);
  (void)val_scenes;
  if (train_scenes.empty()) throw std::runtime_error("empty training split");

  std::vector<Scene> normalized;
  normalized.reserve(train_scenes.size());
  for (const auto & s : train_scenes) {
    normalized.push_back(normalize_scene(s).first);
  }

  TrainResult result;
  result.model_cfg = effective.model_config();
  Rng rng(cfg.seed + 0x517cc1b727220a95ULL);
  result.params = init_params(result.model_cfg, rng);
  AdamState adam;
  const AdamConfig adam_cfg{cfg.lr, 0.9, 0.999, 1e-8};

  std::vector<std::size_t> order(normalized.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.uniform_int(i)]);
    }
    double epoch_acc = 0.0;
    double epoch_task = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const ModelParams snapshot = result.params;
      ParamMap grads;
      for (const auto & [name, t] : result.params.tensors) {
        grads[name] = Tensor::zeros(t.shape);
      }
      bool finite = true;
      for (std::size_t bi = start; bi < end; ++bi) {
        Tape tape;
        ParamNodes p = register_params(tape, result.params);
        double l_acc = 0.0, l_task = 0.0;
        Tape::NodeId loss = build_scene_loss(
          tape, p, normalized[order[bi]], effective, /*train=*/true, rng, &l_acc, &l_task);
        if (!std::isfinite(tape.scalar_value(loss))) {
          finite = false;
          break;
        }
        tape.backward(loss);
        for (auto & [name, g] : grads) {
          const Tensor & gp = tape.grad(p.at(name));
          for (std::size_t j = 0; j < g.size(); ++j) g[j] += gp[j];
        }
        epoch_acc += l_acc;
        epoch_task += l_task;
      }
      if (!finite) {
        result.params = snapshot;
        result.aborted = true;
        return result;
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (auto & [name, g] : grads) {
        for (auto & v : g.data) v *= inv;
      }
      adam_step(result.params.tensors, grads, adam, adam_cfg);
    }
    result.log.push_back(
      {epoch, epoch_acc / static_cast<double>(order.size()),
       epoch_task / static_cast<double>(order.size())});
  }
  return result;
}

}  // namespace

TrainResult train(const TrainConfig & cfg, const std::vector<Scene> & dataset)
{
  return run_training(cfg, dataset, /*accuracy_only=*/false);
}

TrainResult train_accuracy_only(const TrainConfig & cfg, const std::vector<Scene> & dataset)
{
  return run_training(cfg, dataset, /*accuracy_only=*/true);
}

MetricsReport evaluate(
  const ModelConfig & model_cfg, const ModelParams & params, const std::vector<Scene> & scenes,
  const TaskSpec & spec)
{
  MetricsReport report;
  double min_ade = 0.0, min_fde = 0.0, w_ade = 0.0, w_fde = 0.0;
  std::vector<double> warn_scores;
  std::vector<int> warn_labels;
  std::vector<std::vector<double>> plan_scores;
  std::vector<int> plan_labels;

  for (const auto & raw : scenes) {
    const Scene scene = normalize_scene(raw).first;
    PredictionSampleSet preds;
    if (spec.kind == TaskKind::Warning) {
      preds = predict(scene, nullptr, params, model_cfg);
      const auto [score, label] = warning_task_scores(preds, scene, spec);
      warn_scores.push_back(score);
      warn_labels.push_back(label ? 1 : 0);
    } else {
      PlanCandidateSet candidates = generate_plan_candidates(scene.future[scene.ego_index]);
      const std::size_t object = scene.object_indices.front();
      attach_simulated_reactions(candidates, scene.future[object], scene.relation);
      const Decision gt = ground_truth_decision(scene, spec, &candidates);
      std::vector<double> utilities;
      for (const auto & cand : candidates.candidates) {
        PredictionSampleSet cond = predict(scene, &cand.plan, params, model_cfg);
        if (cand.label == PlanLabel::Normal) preds = cond;
        const double efficiency = spec.kind == TaskKind::PlanningAltruistic
                                    ? expected_object_path_length(cand)
                                    : path_length(cand.plan);
        utilities.push_back(
          efficiency + spec.beta * u_safety(cand.plan, cond, object, spec.d_safe));
      }
      plan_scores.push_back(softmax_values(utilities));
      plan_labels.push_back(static_cast<int>(gt.index));
    }
    const DisplacementMetrics dm = displacement_metrics(preds, scene.future);
    min_ade += dm.min_ade;
    min_fde += dm.min_fde;
    w_ade += dm.w_ade;
    w_fde += dm.w_fde;
    ++report.n_examples;
  }
  if (report.n_examples == 0) throw std::runtime_error("evaluate: empty dataset");
  const double inv = 1.0 / static_cast<double>(report.n_examples);
  report.min_ade = min_ade * inv;
  report.min_fde = min_fde * inv;
  report.w_ade = w_ade * inv;
  report.w_fde = w_fde * inv;
  report.auc_roc = spec.kind == TaskKind::Warning ? roc_auc_binary(warn_scores, warn_labels)
                                                  : roc_auc_ovo(plan_scores, plan_labels);
  return report;
}

MetricsReport train_and_evaluate(
  const TrainConfig & cfg, const std::vector<Scene> & dataset, TrainResult * out_result)
{
  TrainResult result = train(cfg, dataset);
  auto [train_scenes, val_scenes] = split_dataset(dataset, cfg.split_seed);
  (void)train_scenes;
  MetricsReport report = evaluate(result.model_cfg, result.params, val_scenes, cfg.task_spec());
  if (out_result) *out_result = std::move(result);
  return report;
}

std::string sweep_table_csv(const std::vector<SweepRow> & rows)
{
  std::ostringstream out;
  out << "label,alpha,k,min_ade,min_fde,w_ade,w_fde,auc_roc,n\n";
  for (const auto & r : rows) {
    out << r.label << "," << r.alpha << "," << r.k << "," << r.report.min_ade << ","
        << r.report.min_fde << "," << r.report.w_ade << "," << r.report.w_fde << ","
        << r.report.auc_roc << "," << r.report.n_examples << "\n";
  }
  return out.str();
}

std::vector<SweepRow> experiment_alpha_sweep(
  const TrainConfig & base, const std::vector<double> & alphas, const std::vector<Scene> & dataset)
{
  std::vector<SweepRow> rows;
  for (const double alpha : alphas) {
    TrainConfig cfg = base;
    cfg.alpha = alpha;
    SweepRow row;
    row.label = alpha == 0.0 ? "tap" : "tip";
    row.alpha = alpha;
    row.k = cfg.k_samples;
    row.report = train_and_evaluate(cfg, dataset);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SweepRow> experiment_k_sweep(
  const TrainConfig & base, const std::vector<std::size_t> & ks,
  const std::vector<Scene> & dataset)
{
  std::vector<SweepRow> rows;
  for (const std::size_t k : ks) {
    for (const bool tap : {false, true}) {
      TrainConfig cfg = base;
      cfg.k_samples = k;
      if (tap) cfg.alpha = 0.0;
      SweepRow row;
      row.label = tap ? "tap" : "tip";
      row.alpha = cfg.alpha;
      row.k = k;
      row.report = train_and_evaluate(cfg, dataset);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<SweepRow> experiment_noise_robustness(
  const TrainConfig & base, const std::vector<double> & sigmas, const std::vector<Scene> & dataset)
{
  std::vector<SweepRow> rows;
  for (const double sigma : sigmas) {
    TrainConfig cfg = base;
    cfg.utility_noise_sigma = sigma;
    SweepRow row;
    row.label = "noise_" + std::to_string(sigma);
    row.alpha = cfg.alpha;
    row.k = cfg.k_samples;
    row.report = train_and_evaluate(cfg, dataset);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string training_log_text(const TrainResult & result)
{
  std::ostringstream out;
  for (const auto & e : result.log) {
    out << "epoch " << e.epoch << " l_acc " << e.l_acc << " l_task " << e.l_task << "\n";
  }
  if (result.aborted) out << "aborted non_finite_loss\n";
  return out.str();
}

}  // namespace tip
