#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <utility>

#include "tip/harness.hpp"

namespace py = pybind11;
using namespace tip;

PYBIND11_MODULE(_tip, m)
{
  m.doc() = "task-informed trajectory prediction: scenario generation, training, evaluation";

  // -- geometry and scenes --------------------------------------------------
  py::class_<Point2d>(m, "Point2d")
    .def(py::init<>())
    .def(py::init([](double x, double y) { return Point2d{x, y}; }), py::arg("x"), py::arg("y"))
    .def_readwrite("x", &Point2d::x)
    .def_readwrite("y", &Point2d::y)
    .def("__repr__", [](const Point2d & p) {
      return "Point2d(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
    });

  py::class_<Trajectory>(m, "Trajectory")
    .def(py::init<>())
    .def(
      py::init<std::vector<Point2d>, double>(), py::arg("points"), py::arg("dt") = 0.1)
    .def(
      py::init<std::vector<Point2d>, std::vector<bool>, double>(), py::arg("points"),
      py::arg("valid"), py::arg("dt") = 0.1)
    .def_readwrite("points", &Trajectory::points)
    .def_readwrite("valid", &Trajectory::valid)
    .def_readwrite("dt", &Trajectory::dt)
    .def("__len__", &Trajectory::size)
    .def("is_valid", &Trajectory::is_valid, py::arg("t"));

  py::enum_<Relation>(m, "Relation")
    .value("ObjectYieldsEgo", Relation::ObjectYieldsEgo)
    .value("EgoYieldsObject", Relation::EgoYieldsObject)
    .value("NoInteraction", Relation::None);

  py::class_<Scene>(m, "Scene")
    .def(py::init<>())
    .def_readwrite("past", &Scene::past)
    .def_readwrite("future", &Scene::future)
    .def_readwrite("ego_index", &Scene::ego_index)
    .def_readwrite("object_indices", &Scene::object_indices)
    .def_readwrite("relation", &Scene::relation)
    .def_readwrite("id", &Scene::id)
    .def_property_readonly("num_agents", &Scene::num_agents)
    .def_property_readonly("t_past", &Scene::t_past)
    .def_property_readonly("t_future", &Scene::t_future);

  py::class_<NormalizationFrame>(m, "NormalizationFrame")
    .def(py::init<>())
    .def_readwrite("origin", &NormalizationFrame::origin)
    .def("to_world", &NormalizationFrame::to_world, py::arg("p"))
    .def("to_frame", &NormalizationFrame::to_frame, py::arg("p"));

  m.def("path_length", &path_length, py::arg("trajectory"));
  m.def("min_pairwise_distance", &min_pairwise_distance, py::arg("a"), py::arg("b"));
  m.def("normalize_scene", &normalize_scene, py::arg("scene"));

  // -- scenario generation and datasets ------------------------------------
  py::enum_<ConflictGeometry>(m, "ConflictGeometry")
    .value("Crossing", ConflictGeometry::Crossing)
    .value("Merging", ConflictGeometry::Merging)
    .value("Oncoming", ConflictGeometry::Oncoming);

  py::class_<GeneratorConfig>(m, "GeneratorConfig")
    .def(py::init<>())
    .def_readwrite("n_scenes", &GeneratorConfig::n_scenes)
    .def_readwrite("speed_min", &GeneratorConfig::speed_min)
    .def_readwrite("speed_max", &GeneratorConfig::speed_max)
    .def_readwrite("geometry", &GeneratorConfig::geometry)
    .def_readwrite("arrival_gap_min", &GeneratorConfig::arrival_gap_min)
    .def_readwrite("arrival_gap_max", &GeneratorConfig::arrival_gap_max)
    .def_readwrite("noise_sigma", &GeneratorConfig::noise_sigma)
    .def_readwrite("seed", &GeneratorConfig::seed)
    .def_readwrite("t_past", &GeneratorConfig::t_past)
    .def_readwrite("t_future", &GeneratorConfig::t_future)
    .def_readwrite("dt", &GeneratorConfig::dt)
    .def_readwrite("mode_switch_prob", &GeneratorConfig::mode_switch_prob)
    .def("digest_string", &GeneratorConfig::digest_string);

  m.def("generate_scenes", &generate_scenes, py::arg("config"));
  m.def(
    "write_dataset", &write_dataset, py::arg("scenes"), py::arg("path"), py::arg("digest") = "");
  m.def("read_dataset", &read_dataset, py::arg("path"));
  py::class_<MotionLimits>(m, "MotionLimits")
    .def(py::init<>())
    .def_readwrite("v_max", &MotionLimits::v_max)
    .def_readwrite("a_max", &MotionLimits::a_max);

  m.def(
    "rescale_progress", &rescale_progress, py::arg("trajectory"), py::arg("factor"),
    py::arg("limits") = MotionLimits{});

  // -- model, predictions, checkpoints --------------------------------------
  py::class_<ModelConfig>(m, "ModelConfig")
    .def(py::init<>())
    .def_readwrite("n_agents", &ModelConfig::n_agents)
    .def_readwrite("t_past", &ModelConfig::t_past)
    .def_readwrite("t_future", &ModelConfig::t_future)
    .def_readwrite("k_samples", &ModelConfig::k_samples)
    .def_readwrite("hidden", &ModelConfig::hidden)
    .def_readwrite("dropout_rate", &ModelConfig::dropout_rate)
    .def_readwrite("has_task_encoder", &ModelConfig::has_task_encoder);

  py::class_<ModelParams>(m, "ModelParams").def(py::init<>());

  py::class_<PredictionSampleSet>(m, "PredictionSampleSet")
    .def(py::init<>())
    .def_readwrite("samples", &PredictionSampleSet::samples)
    .def_readwrite("weights", &PredictionSampleSet::weights)
    .def_property_readonly("k", &PredictionSampleSet::k);

  m.def(
    "predict",
    [](const Scene & scene, std::optional<Trajectory> plan, const ModelParams & params,
       const ModelConfig & cfg) {
      return predict(scene, plan ? &*plan : nullptr, params, cfg);
    },
    py::arg("scene"), py::arg("plan"), py::arg("params"), py::arg("config"));
  m.def("save_checkpoint", &save_checkpoint, py::arg("path"), py::arg("config"), py::arg("params"));
  m.def("load_checkpoint", &load_checkpoint, py::arg("path"));

  // -- tasks ----------------------------------------------------------------
  py::enum_<TaskKind>(m, "TaskKind")
    .value("PlanningSelfish", TaskKind::PlanningSelfish)
    .value("PlanningAltruistic", TaskKind::PlanningAltruistic)
    .value("Warning", TaskKind::Warning);

  py::class_<TaskSpec>(m, "TaskSpec")
    .def(py::init<>())
    .def_readwrite("kind", &TaskSpec::kind)
    .def_readwrite("d_safe", &TaskSpec::d_safe)
    .def_readwrite("d_warn", &TaskSpec::d_warn)
    .def_readwrite("beta", &TaskSpec::beta);

  m.def("u_efficiency", &u_efficiency, py::arg("plan"));
  m.def(
    "u_safety", &u_safety, py::arg("plan"), py::arg("predictions"), py::arg("object_index"),
    py::arg("d_safe"));
  m.def(
    "u_planning", &u_planning, py::arg("plan"), py::arg("predictions"), py::arg("object_index"),
    py::arg("spec"));
  m.def(
    "warning_utilities", &warning_utilities, py::arg("predictions"), py::arg("ego_index"),
    py::arg("object_indices"), py::arg("spec"), py::arg("soft"));

  // -- metrics --------------------------------------------------------------
  py::class_<DisplacementMetrics>(m, "DisplacementMetrics")
    .def_readonly("min_ade", &DisplacementMetrics::min_ade)
    .def_readonly("min_fde", &DisplacementMetrics::min_fde)
    .def_readonly("w_ade", &DisplacementMetrics::w_ade)
    .def_readonly("w_fde", &DisplacementMetrics::w_fde);

  py::class_<MetricsReport>(m, "MetricsReport")
    .def_readonly("min_ade", &MetricsReport::min_ade)
    .def_readonly("min_fde", &MetricsReport::min_fde)
    .def_readonly("w_ade", &MetricsReport::w_ade)
    .def_readonly("w_fde", &MetricsReport::w_fde)
    .def_readonly("auc_roc", &MetricsReport::auc_roc)
    .def_readonly("n_examples", &MetricsReport::n_examples)
    .def("to_kv", &MetricsReport::to_kv)
    .def("to_csv", &MetricsReport::to_csv);

  m.def("displacement_metrics", &displacement_metrics, py::arg("predictions"), py::arg("gt"));
  m.def("roc_auc_binary", &roc_auc_binary, py::arg("scores"), py::arg("labels"));
  m.def("roc_auc_ovo", &roc_auc_ovo, py::arg("score_vectors"), py::arg("labels"));

  // -- training and evaluation ----------------------------------------------
  py::class_<TrainConfig>(m, "TrainConfig")
    .def(py::init<>())
    .def_readwrite("task", &TrainConfig::task)
    .def_readwrite("alpha", &TrainConfig::alpha)
    .def_readwrite("beta", &TrainConfig::beta)
    .def_readwrite("epochs", &TrainConfig::epochs)
    .def_readwrite("batch_size", &TrainConfig::batch_size)
    .def_readwrite("lr", &TrainConfig::lr)
    .def_readwrite("seed", &TrainConfig::seed)
    .def_readwrite("k_samples", &TrainConfig::k_samples)
    .def_readwrite("n_agents", &TrainConfig::n_agents)
    .def_readwrite("t_past", &TrainConfig::t_past)
    .def_readwrite("t_future", &TrainConfig::t_future)
    .def_readwrite("dropout_rate", &TrainConfig::dropout_rate)
    .def_readwrite("utility_noise_sigma", &TrainConfig::utility_noise_sigma)
    .def_readwrite("d_safe", &TrainConfig::d_safe)
    .def_readwrite("d_warn", &TrainConfig::d_warn)
    .def_readwrite("single_sample_reactions", &TrainConfig::single_sample_reactions)
    .def_readwrite("split_seed", &TrainConfig::split_seed)
    .def("model_config", &TrainConfig::model_config)
    .def("task_spec", &TrainConfig::task_spec);

  py::class_<EpochLog>(m, "EpochLog")
    .def_readonly("epoch", &EpochLog::epoch)
    .def_readonly("l_acc", &EpochLog::l_acc)
    .def_readonly("l_task", &EpochLog::l_task);

  py::class_<TrainResult>(m, "TrainResult")
    .def(py::init<>())
    .def_readonly("model_cfg", &TrainResult::model_cfg)
    .def_readonly("params", &TrainResult::params)
    .def_readonly("log", &TrainResult::log)
    .def_readonly("aborted", &TrainResult::aborted);

  m.def("split_dataset", &split_dataset, py::arg("scenes"), py::arg("split_seed"));
  m.def("train", &train, py::arg("config"), py::arg("dataset"));
  m.def("evaluate", &evaluate, py::arg("model_config"), py::arg("params"), py::arg("scenes"),
        py::arg("spec"));
  m.def(
    "train_and_evaluate",
    [](const TrainConfig & cfg, const std::vector<Scene> & dataset) {
      TrainResult result;
      MetricsReport report = train_and_evaluate(cfg, dataset, &result);
      return std::make_pair(report, result);
    },
    py::arg("config"), py::arg("dataset"));
  m.def("training_log_text", &training_log_text, py::arg("result"));
}
