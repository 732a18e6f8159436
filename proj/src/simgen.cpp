#include "tip/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace tip
{

std::string to_string(ConflictGeometry g)
{
  switch (g) {
    case ConflictGeometry::Crossing:
      return "crossing";
    case ConflictGeometry::Merging:
      return "merging";
    default:
      return "oncoming";
  }
}

ConflictGeometry geometry_from_string(const std::string & s)
{
  if (s == "crossing") return ConflictGeometry::Crossing;
  if (s == "merging") return ConflictGeometry::Merging;
  if (s == "oncoming") return ConflictGeometry::Oncoming;
  throw std::invalid_argument("unknown geometry: " + s);
}

namespace
{

std::uint64_t fnv1a_str(const std::string & s)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string GeneratorConfig::digest_string() const
{
  std::ostringstream ss;
  ss << n_scenes << "," << speed_min << "," << speed_max << "," << to_string(geometry) << ","
     << arrival_gap_min << "," << arrival_gap_max << "," << noise_sigma << "," << seed << ","
     << t_past << "," << t_future << "," << dt << "," << mode_switch_prob;
  std::ostringstream hex;
  hex << std::hex << fnv1a_str(ss.str());
  return hex.str();
}

// -- progress rescaling -----------------------------------------------------

namespace
{

/// Point at arc length `s` along the polyline, extrapolating past the end.
Point2d point_at_arclength(const std::vector<Point2d> & pts, const std::vector<double> & cum,
                           double s)
{
  if (pts.size() == 1 || s <= 0.0) return pts.front();
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (s <= cum[i] || i + 1 == pts.size()) {
      const double seg = cum[i] - cum[i - 1];
      if (seg <= 0.0) {
        if (i + 1 == pts.size()) return pts[i];
        continue;
      }
      const double f = (s - cum[i - 1]) / seg;
      return pts[i - 1] + (pts[i] - pts[i - 1]) * f;
    }
  }
  return pts.back();
}

}  // namespace

Trajectory rescale_progress(const Trajectory & traj, double factor, const MotionLimits & limits)
{
  if (traj.size() < 2 || factor == 1.0) return traj;
  const double dt = traj.dt;
  std::vector<double> cum(traj.size(), 0.0);
  for (std::size_t i = 1; i < traj.size(); ++i) {
    cum[i] = cum[i - 1] + distance(traj.points[i - 1], traj.points[i]);
  }
  Trajectory out = traj;
  double prev_ds = cum[1] - cum[0];  // original speed sets the accel baseline
  double progress = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    double ds = factor * (cum[i] - cum[i - 1]);
    ds = std::min(ds, limits.v_max * dt);
    ds = std::clamp(ds, prev_ds - limits.a_max * dt * dt, prev_ds + limits.a_max * dt * dt);
    ds = std::max(ds, 0.0);
    progress += ds;
    prev_ds = ds;
    out.points[i] = point_at_arclength(traj.points, cum, progress);
  }
  return out;
}

// -- scene generation -------------------------------------------------------

Scene generate_scene(Rng & rng, const GeneratorConfig & cfg, std::size_t index)
{
  const double horizon = static_cast<double>(cfg.t_future) * cfg.dt;
  // the validity window below rejects early object arrivals more often than
  // late ones, which would skew the labels; drawing the target relation first
  // and rejecting mismatches keeps the two labels balanced by construction
  // a skewed gap range can make one label unreachable, so only enforce there
  const bool symmetric_gaps = cfg.arrival_gap_min == -cfg.arrival_gap_max;
  const bool want_object_yields = rng.bernoulli(0.5);
  for (int attempt = 0; attempt < 200; ++attempt) {
    const double v_ego = rng.uniform(cfg.speed_min, cfg.speed_max);
    const double v_obj = rng.uniform(cfg.speed_min, cfg.speed_max);
    const double t_ego_arrival = rng.uniform(0.3 * horizon, 0.7 * horizon);
    const double gap = rng.uniform(cfg.arrival_gap_min, cfg.arrival_gap_max);
    const double t_obj_arrival = t_ego_arrival + gap;

    Point2d ego_dir{1.0, 0.0};
    Point2d obj_dir;
    Point2d obj_offset{0.0, 0.0};
    switch (cfg.geometry) {
      case ConflictGeometry::Crossing:
        obj_dir = {0.0, 1.0};
        break;
      case ConflictGeometry::Merging:
        obj_dir = {std::sqrt(0.5), std::sqrt(0.5)};
        break;
      case ConflictGeometry::Oncoming:
        obj_dir = {-1.0, 0.0};
        obj_offset = {0.0, rng.uniform(1.5, 5.0)};
        break;
    }

    // object future re-timing makes the future multimodal given the past
    double mode_factor = 1.0;
    if (rng.bernoulli(cfg.mode_switch_prob)) {
      mode_factor = rng.bernoulli(0.5) ? 1.2 : 0.8;
    }
    const double first_future_t = cfg.dt;
    const double realized_obj_arrival =
      first_future_t + (t_obj_arrival - first_future_t) / mode_factor;
    if (realized_obj_arrival < 0.2 || realized_obj_arrival > horizon + 1.0) {
      continue;
    }
    if (symmetric_gaps && (realized_obj_arrival > t_ego_arrival) != want_object_yields) {
      continue;
    }

    auto ego_pos = [&](double t) { return ego_dir * (v_ego * (t - t_ego_arrival)); };
    auto obj_pos_nominal = [&](double t) { return obj_offset + obj_dir * (v_obj * (t - t_obj_arrival)); };

    Scene scene;
    scene.id = "scene_" + std::to_string(index);
    scene.ego_index = 0;
    scene.object_indices = {1};

    Trajectory ego_past, obj_past, ego_future, obj_future;
    ego_past.dt = obj_past.dt = ego_future.dt = obj_future.dt = cfg.dt;
    for (std::size_t k = 0; k < cfg.t_past; ++k) {
      const double t = (static_cast<double>(k) - static_cast<double>(cfg.t_past - 1)) * cfg.dt;
      Point2d e = ego_pos(t);
      Point2d o = obj_pos_nominal(t);
      if (cfg.noise_sigma > 0.0) {
        e.x += rng.normal(0.0, cfg.noise_sigma);
        e.y += rng.normal(0.0, cfg.noise_sigma);
        o.x += rng.normal(0.0, cfg.noise_sigma);
        o.y += rng.normal(0.0, cfg.noise_sigma);
      }
      ego_past.points.push_back(e);
      obj_past.points.push_back(o);
      ego_past.valid.push_back(true);
      obj_past.valid.push_back(true);
    }
    for (std::size_t k = 1; k <= cfg.t_future; ++k) {
      const double t = static_cast<double>(k) * cfg.dt;
      ego_future.points.push_back(ego_pos(t));
      obj_future.points.push_back(obj_pos_nominal(t));
      ego_future.valid.push_back(true);
      obj_future.valid.push_back(true);
    }
    if (mode_factor != 1.0) {
      obj_future = rescale_progress(obj_future, mode_factor);
    }

    scene.past = {ego_past, obj_past};
    scene.future = {ego_future, obj_future};
    scene.relation = realized_obj_arrival > t_ego_arrival ? Relation::ObjectYieldsEgo
                                                          : Relation::EgoYieldsObject;
    return scene;
  }
  throw DegenerateGeometry();
}

std::vector<Scene> generate_scenes(const GeneratorConfig & cfg)
{
  std::vector<Scene> scenes;
  scenes.reserve(cfg.n_scenes);
  for (std::size_t i = 0; i < cfg.n_scenes; ++i) {
    Rng rng(Rng::derive(cfg.seed, i));
    scenes.push_back(generate_scene(rng, cfg, i));
  }
  return scenes;
}

// -- plan candidates and reactions ------------------------------------------

PlanCandidateSet generate_plan_candidates(const Trajectory & ego_future, const MotionLimits & limits)
{
  PlanCandidateSet set;
  const std::pair<double, PlanLabel> variants[] = {
    {0.8, PlanLabel::Conservative}, {1.0, PlanLabel::Normal}, {1.2, PlanLabel::Aggressive}};
  for (const auto & [factor, label] : variants) {
    PlanCandidate cand;
    cand.label = label;
    cand.plan = rescale_progress(ego_future, factor, limits);
    set.candidates.push_back(std::move(cand));
  }
  return set;
}

std::vector<std::pair<double, double>> reaction_outcomes(PlanLabel label, Relation relation)
{
  if (relation == Relation::ObjectYieldsEgo && label == PlanLabel::Conservative) {
    // speed up to pass or slow down to keep yielding
    return {{1.2, 0.5}, {0.8, 0.5}};
  }
  if (relation == Relation::EgoYieldsObject && label == PlanLabel::Aggressive) {
    // slow down to yield or speed up to maintain the lead
    return {{0.8, 0.5}, {1.2, 0.5}};
  }
  return {{1.0, 1.0}};
}

Trajectory simulate_reaction_heuristic(
  PlanLabel label, const Trajectory & object_future, Relation relation, Rng & rng,
  const MotionLimits & limits)
{
  const auto outcomes = reaction_outcomes(label, relation);
  double factor = outcomes.front().first;
  if (outcomes.size() > 1) {
    double u = rng.uniform();
    for (const auto & [f, p] : outcomes) {
      factor = f;
      if (u < p) break;
      u -= p;
    }
  }
  return rescale_progress(object_future, factor, limits);
}

void attach_simulated_reactions(
  PlanCandidateSet & candidates, const Trajectory & object_future, Relation relation,
  const MotionLimits & limits, bool single_sample, Rng * rng)
{
  for (auto & cand : candidates.candidates) {
    std::vector<SimulatedOutcome> outcomes;
    if (single_sample) {
      if (rng == nullptr) throw std::invalid_argument("single-sample mode needs an rng");
      outcomes.push_back(
        {1.0, simulate_reaction_heuristic(cand.label, object_future, relation, *rng, limits)});
    } else {
      for (const auto & [factor, prob] : reaction_outcomes(cand.label, relation)) {
        outcomes.push_back({prob, rescale_progress(object_future, factor, limits)});
      }
    }
    cand.object_futures = {std::move(outcomes)};
  }
}

// -- IDM --------------------------------------------------------------------

Trajectory simulate_reaction_idm(
  const Trajectory & plan, const Trajectory & object_future, Point2d conflict_point,
  const IdmParams & params)
{
  if (object_future.size() < 2) return object_future;
  const double dt = object_future.dt;
  std::vector<double> cum(object_future.size(), 0.0);
  for (std::size_t i = 1; i < object_future.size(); ++i) {
    cum[i] = cum[i - 1] + distance(object_future.points[i - 1], object_future.points[i]);
  }
  // arc length of the closest polyline vertex to the conflict point
  double s_conflict = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < object_future.size(); ++i) {
    const double d = distance(object_future.points[i], conflict_point);
    if (d < best) {
      best = d;
      s_conflict = cum[i];
    }
  }
  const double v_init = (cum[1] - cum[0]) / dt;
  const double v0 = params.v0 > 0.0 ? params.v0 : std::max(v_init, 0.1);

  Trajectory out = object_future;
  double s = 0.0;
  double v = v_init;
  for (std::size_t i = 1; i < object_future.size(); ++i) {
    double acc = params.a * (1.0 - std::pow(v / v0, params.delta));
    const bool ego_occupies =
      i - 1 < plan.size() && plan.is_valid(i - 1) &&
      distance(plan.points[i - 1], conflict_point) < params.conflict_radius;
    const double gap = (s_conflict - params.conflict_radius) - s;
    if (ego_occupies && gap > 0.0) {
      const double dv = v;  // standing obstacle
      const double s_star =
        params.s0 + std::max(0.0, v * params.headway + v * dv / (2.0 * std::sqrt(params.a * params.b)));
      acc -= params.a * (s_star / gap) * (s_star / gap);
    } else if (ego_occupies && gap <= 0.0 && s < s_conflict) {
      v = 0.0;
      acc = 0.0;
    }
    v = std::max(0.0, v + acc * dt);
    s += v * dt;
    out.points[i] = point_at_arclength(object_future.points, cum, s);
  }
  return out;
}

// -- dataset serialization --------------------------------------------------

namespace
{

void append_trajectory(std::ostringstream & out, const Trajectory & traj)
{
  out << "|";
  for (std::size_t t = 0; t < traj.size(); ++t) {
    if (t) out << ";";
    out << traj.points[t].x << "," << traj.points[t].y << "," << (traj.is_valid(t) ? 1 : 0);
  }
}

std::vector<std::string> split(const std::string & s, char sep)
{
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      break;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

Trajectory parse_trajectory(const std::string & field, double dt, std::size_t line_no)
{
  Trajectory traj;
  traj.dt = dt;
  for (const auto & rec : split(field, ';')) {
    const auto xs = split(rec, ',');
    if (xs.size() != 3) throw ParseError(line_no, "bad trajectory record '" + rec + "'");
    try {
      traj.points.push_back({std::stod(xs[0]), std::stod(xs[1])});
      traj.valid.push_back(std::stoi(xs[2]) != 0);
    } catch (const std::exception &) {
      throw ParseError(line_no, "bad number in trajectory record '" + rec + "'");
    }
  }
  return traj;
}

}  // namespace

void write_dataset(
  const std::vector<Scene> & scenes, const std::string & path, const std::string & digest)
{
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "tipds 1 " << (digest.empty() ? "-" : digest) << "\n";
  for (const auto & scene : scenes) {
    std::ostringstream line;
    line << std::setprecision(17);
    line << scene.id << "|" << scene.dt() << "|" << scene.num_agents() << "|" << scene.ego_index
         << "|";
    for (std::size_t i = 0; i < scene.object_indices.size(); ++i) {
      if (i) line << ",";
      line << scene.object_indices[i];
    }
    line << "|" << to_string(scene.relation);
    for (std::size_t i = 0; i < scene.num_agents(); ++i) {
      append_trajectory(line, scene.past[i]);
      append_trajectory(line, scene.future[i]);
    }
    out << line.str() << "\n";
  }
}

DatasetReader::DatasetReader(const std::string & path) : in_(path)
{
  if (!in_) throw std::runtime_error("cannot open " + path);
  std::string header;
  if (!std::getline(in_, header)) throw ParseError(1, "missing header");
  const auto parts = split(header, ' ');
  if (parts.size() < 3 || parts[0] != "tipds") throw ParseError(1, "bad header '" + header + "'");
  if (parts[1] != "1") throw VersionMismatch(parts[1]);
  digest_ = parts[2];
}

std::optional<Scene> DatasetReader::next()
{
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (line.empty()) continue;
    const auto fields = split(line, '|');
    if (fields.size() < 6) throw ParseError(line_no_, "too few fields");
    Scene scene;
    scene.id = fields[0];
    double dt = 0.1;
    try {
      dt = std::stod(fields[1]);
      const std::size_t n = std::stoul(fields[2]);
      scene.ego_index = std::stoul(fields[3]);
      if (!fields[4].empty()) {
        for (const auto & s : split(fields[4], ',')) scene.object_indices.push_back(std::stoul(s));
      }
      scene.relation = relation_from_string(fields[5]);
      if (fields.size() != 6 + 2 * n) {
        throw ParseError(line_no_, "expected " + std::to_string(6 + 2 * n) + " fields, got " +
                                     std::to_string(fields.size()));
      }
      for (std::size_t i = 0; i < n; ++i) {
        scene.past.push_back(parse_trajectory(fields[6 + 2 * i], dt, line_no_));
        scene.future.push_back(parse_trajectory(fields[7 + 2 * i], dt, line_no_));
      }
    } catch (const ParseError &) {
      throw;
    } catch (const std::exception & e) {
      throw ParseError(line_no_, e.what());
    }
    return scene;
  }
  return std::nullopt;
}

std::vector<Scene> read_dataset(const std::string & path)
{
  DatasetReader reader(path);
  std::vector<Scene> scenes;
  while (auto scene = reader.next()) scenes.push_back(std::move(*scene));
  return scenes;
}

}  // namespace tip
