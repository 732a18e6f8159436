#include "tip/config.hpp"

#include <fstream>
#include <sstream>

namespace tip
{

TaskKind task_from_string(const std::string & s)
{
  if (s == "warning") return TaskKind::Warning;
  if (s == "planning" || s == "planning_selfish") return TaskKind::PlanningSelfish;
  if (s == "planning_altruistic") return TaskKind::PlanningAltruistic;
  throw ConfigError("unknown task '" + s + "'");
}

std::string to_string(TaskKind kind)
{
  switch (kind) {
    case TaskKind::Warning:
      return "warning";
    case TaskKind::PlanningSelfish:
      return "planning_selfish";
    default:
      return "planning_altruistic";
  }
}

KeyValueConfig KeyValueConfig::from_file(const std::string & path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  KeyValueConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string key, value;
    if (!(ls >> key)) continue;  // blank line
    if (!(ls >> value)) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": key '" + key + "' has no value");
    }
    cfg.set(key, value);
  }
  return cfg;
}

namespace
{

double parse_double(const std::string & key, const std::string & value)
{
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception &) {
    throw ConfigError("bad numeric value '" + value + "' for key '" + key + "'");
  }
}

std::size_t parse_size(const std::string & key, const std::string & value)
{
  const double v = parse_double(key, value);
  if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw ConfigError("expected a non-negative integer for key '" + key + "', got '" + value + "'");
  }
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string & key, const std::string & value)
{
  if (value == "1" || value == "true") return true;
  if (value == "0" || value == "false") return false;
  throw ConfigError("expected a boolean for key '" + key + "', got '" + value + "'");
}

}  // namespace

void KeyValueConfig::apply(TrainConfig & t, GeneratorConfig & g) const
{
  for (const auto & [key, value] : values_) {
    if (key == "task") {
      t.task = task_from_string(value);
    } else if (key == "alpha") {
      t.alpha = parse_double(key, value);
    } else if (key == "beta") {
      t.beta = parse_double(key, value);
    } else if (key == "epochs") {
      t.epochs = parse_size(key, value);
    } else if (key == "batch_size") {
      t.batch_size = parse_size(key, value);
    } else if (key == "lr") {
      t.lr = parse_double(key, value);
    } else if (key == "seed") {
      t.seed = parse_size(key, value);
      g.seed = t.seed;
    } else if (key == "split_seed") {
      t.split_seed = parse_size(key, value);
    } else if (key == "k_samples") {
      t.k_samples = parse_size(key, value);
    } else if (key == "n_agents") {
      t.n_agents = parse_size(key, value);
    } else if (key == "t_past") {
      t.t_past = parse_size(key, value);
      g.t_past = t.t_past;
    } else if (key == "t_future") {
      t.t_future = parse_size(key, value);
      g.t_future = t.t_future;
    } else if (key == "dropout_rate") {
      t.dropout_rate = parse_double(key, value);
    } else if (key == "utility_noise_sigma") {
      t.utility_noise_sigma = parse_double(key, value);
    } else if (key == "d_safe") {
      t.d_safe = parse_double(key, value);
    } else if (key == "d_warn") {
      t.d_warn = parse_double(key, value);
    } else if (key == "single_sample_reactions") {
      t.single_sample_reactions = parse_bool(key, value);
    } else if (key == "n_scenes") {
      g.n_scenes = parse_size(key, value);
    } else if (key == "speed_min") {
      g.speed_min = parse_double(key, value);
    } else if (key == "speed_max") {
      g.speed_max = parse_double(key, value);
    } else if (key == "geometry") {
      try {
        g.geometry = geometry_from_string(value);
      } catch (const std::invalid_argument & e) {
        throw ConfigError(e.what());
      }
    } else if (key == "arrival_gap_min") {
      g.arrival_gap_min = parse_double(key, value);
    } else if (key == "arrival_gap_max") {
      g.arrival_gap_max = parse_double(key, value);
    } else if (key == "noise_sigma") {
      g.noise_sigma = parse_double(key, value);
    } else if (key == "mode_switch_prob") {
      g.mode_switch_prob = parse_double(key, value);
    } else if (key == "dt") {
      g.dt = parse_double(key, value);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  if (t.lr <= 0.0) throw ConfigError("lr must be positive");
  if (t.epochs == 0 || t.batch_size == 0) throw ConfigError("counts must be positive");
  if (t.dropout_rate < 0.0 || t.dropout_rate >= 1.0) {
    throw ConfigError("dropout_rate must be in [0, 1)");
  }
}

}  // namespace tip
