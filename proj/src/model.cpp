#include "tip/model.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace tip
{

namespace
{

Tensor uniform_init(std::vector<std::size_t> shape, std::size_t fan_in, Rng & rng)
{
  Tensor t = Tensor::zeros(std::move(shape));
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto & v : t.data) v = rng.uniform(-bound, bound);
  return t;
}

}  // namespace

ModelParams init_params(const ModelConfig & cfg, Rng & rng)
{
  const std::size_t h = cfg.hidden;
  ModelParams params;
  auto & m = params.tensors;
  // declare shapes first so initialization order is the canonical map order
  m["state_mlp.w"] = Tensor::zeros({h, 2});
  m["state_mlp.b"] = Tensor::zeros({h});
  m["lstm.w_x"] = Tensor::zeros({4 * h, h});
  m["lstm.w_h"] = Tensor::zeros({4 * h, h});
  m["lstm.b"] = Tensor::zeros({4 * h});
  if (cfg.has_task_encoder) {
    m["task_mlp.w"] = Tensor::zeros({h, 2 * cfg.t_future});
    m["task_mlp.b"] = Tensor::zeros({h});
  }
  m["dec1.w"] = Tensor::zeros({h, cfg.decoder_input_dim()});
  m["dec1.b"] = Tensor::zeros({h});
  m["dec2.w"] = Tensor::zeros({h, h});
  m["dec2.b"] = Tensor::zeros({h});
  m["head.w"] = Tensor::zeros({cfg.head_dim(), h});
  m["head.b"] = Tensor::zeros({cfg.head_dim()});

  for (auto & [name, t] : m) {
    if (name.ends_with(".b")) continue;  // biases stay zero
    const std::size_t fan_in = t.shape[1];
    t = uniform_init(t.shape, fan_in, rng);
  }
  // forget gate bias 1 (gate order: input, forget, cell, output)
  for (std::size_t i = h; i < 2 * h; ++i) m["lstm.b"][i] = 1.0;
  return params;
}

ParamNodes register_params(Tape & tape, const ModelParams & params)
{
  ParamNodes nodes;
  for (const auto & [name, t] : params.tensors) {
    nodes.ids[name] = tape.leaf(t);
  }
  return nodes;
}

namespace
{

Tape::NodeId affine(Tape & tape, Tape::NodeId w, Tape::NodeId x, Tape::NodeId b)
{
  return tape.add(tape.matmul(w, x), b);
}

}  // namespace

Tape::NodeId encode_states(
  Tape & tape, const Scene & scene, const ParamNodes & p, const ModelConfig & cfg, bool train,
  Rng & rng)
{
  if (scene.num_agents() > cfg.n_agents) {
    throw ConfigMismatch("scene has more agents than the model supports");
  }
  if (!scene.past.empty() && scene.t_past() != cfg.t_past) {
    throw ConfigMismatch("past horizon differs from model t_past");
  }
  const std::size_t h = cfg.hidden;
  const auto w_mlp = p.at("state_mlp.w");
  const auto b_mlp = p.at("state_mlp.b");
  const auto w_x = p.at("lstm.w_x");
  const auto w_h = p.at("lstm.w_h");
  const auto b = p.at("lstm.b");
  const std::vector<double> zero_mask(h, 0.0);

  std::vector<Tape::NodeId> agent_hidden;
  for (std::size_t i = 0; i < cfg.n_agents; ++i) {
    const bool present = i < scene.num_agents();
    Tape::NodeId hs = tape.constant(Tensor::zeros({h}));
    Tape::NodeId cs = tape.constant(Tensor::zeros({h}));
    for (std::size_t t = 0; t < cfg.t_past; ++t) {
      const bool valid = present && scene.past[i].is_valid(t);
      const Point2d pt = valid ? scene.past[i].points[t] : Point2d{};
      Tape::NodeId x = tape.constant(Tensor::vector({pt.x, pt.y}));
      Tape::NodeId e = tape.relu(affine(tape, w_mlp, x, b_mlp));
      e = tape.dropout(e, cfg.dropout_rate, rng, train);
      if (!valid) {
        e = tape.mask_select(e, zero_mask);
      }
      Tape::NodeId z = tape.add(affine(tape, w_x, e, b), tape.matmul(w_h, hs));
      Tape::NodeId ig = tape.sigmoid(tape.slice(z, 0, h));
      Tape::NodeId fg = tape.sigmoid(tape.slice(z, h, h));
      Tape::NodeId gg = tape.tanh_op(tape.slice(z, 2 * h, h));
      Tape::NodeId og = tape.sigmoid(tape.slice(z, 3 * h, h));
      cs = tape.add(tape.mul(fg, cs), tape.mul(ig, gg));
      hs = tape.mul(og, tape.tanh_op(cs));
    }
    agent_hidden.push_back(hs);
  }
  return tape.concat(agent_hidden);
}

Tape::NodeId encode_task_info(
  Tape & tape, const Trajectory & plan, const ParamNodes & p, const ModelConfig & cfg, bool train,
  Rng & rng)
{
  if (!cfg.has_task_encoder) throw NoTaskEncoder();
  if (plan.size() != cfg.t_future) {
    throw ConfigMismatch("plan length differs from model t_future");
  }
  Tensor flat = Tensor::zeros({2 * cfg.t_future});
  for (std::size_t t = 0; t < plan.size(); ++t) {
    if (!plan.is_valid(t)) continue;
    flat[2 * t] = plan.points[t].x;
    flat[2 * t + 1] = plan.points[t].y;
  }
  Tape::NodeId x = tape.constant(std::move(flat));
  Tape::NodeId e = tape.relu(affine(tape, p.at("task_mlp.w"), x, p.at("task_mlp.b")));
  return tape.dropout(e, cfg.dropout_rate, rng, train);
}

ForwardNodes decode(Tape & tape, Tape::NodeId h, const ParamNodes & p, const ModelConfig & cfg)
{
  if (tape.value(h).size() != cfg.decoder_input_dim()) {
    throw ShapeMismatch("decoder input width");
  }
  Tape::NodeId h1 = tape.relu(affine(tape, p.at("dec1.w"), h, p.at("dec1.b")));
  Tape::NodeId h2 = tape.relu(affine(tape, p.at("dec2.w"), h1, p.at("dec2.b")));
  Tape::NodeId out = affine(tape, p.at("head.w"), h2, p.at("head.b"));

  ForwardNodes fwd;
  const std::size_t block = cfg.sample_dim();
  for (std::size_t k = 0; k < cfg.k_samples; ++k) {
    fwd.samples.push_back(tape.slice(out, k * block, block));
  }
  fwd.weights = tape.softmax(tape.slice(out, cfg.k_samples * block, cfg.k_samples));
  return fwd;
}

ForwardNodes forward(
  Tape & tape, const Scene & scene, const Trajectory * plan, const ParamNodes & p,
  const ModelConfig & cfg, bool train, Rng & rng)
{
  Tape::NodeId h = encode_states(tape, scene, p, cfg, train, rng);
  if (cfg.has_task_encoder) {
    if (plan == nullptr) throw ConfigMismatch("task-conditioned model requires a plan input");
    Tape::NodeId hv = encode_task_info(tape, *plan, p, cfg, train, rng);
    h = tape.concat({h, hv});
  }
  return decode(tape, h, p, cfg);
}

PredictionSampleSet extract_samples(
  const Tape & tape, const ForwardNodes & fwd, const ModelConfig & cfg, double dt)
{
  PredictionSampleSet out;
  out.weights = tape.value(fwd.weights).data;
  for (const auto sid : fwd.samples) {
    const Tensor & flat = tape.value(sid);
    std::vector<std::vector<Point2d>> sample(cfg.n_agents);
    for (std::size_t i = 0; i < cfg.n_agents; ++i) {
      sample[i].resize(cfg.t_future);
      for (std::size_t t = 0; t < cfg.t_future; ++t) {
        const std::size_t base = (i * cfg.t_future + t) * 2;
        sample[i][t] = {flat[base], flat[base + 1]};
      }
    }
    out.samples.push_back(std::move(sample));
  }
  (void)dt;
  return out;
}

PredictionSampleSet predict(
  const Scene & scene, const Trajectory * plan, const ModelParams & params, const ModelConfig & cfg)
{
  Tape tape;
  Rng rng(0);  // unused in eval mode
  ParamNodes p = register_params(tape, params);
  ForwardNodes fwd = forward(tape, scene, plan, p, cfg, /*train=*/false, rng);
  return extract_samples(tape, fwd, cfg, scene.dt());
}

// -- checkpoint io ----------------------------------------------------------

namespace
{

std::uint64_t fnv1a(const unsigned char * bytes, std::size_t n)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

void append_le_doubles(std::string & out, const std::vector<double> & values)
{
  for (double v : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int b = 0; b < 8; ++b) {
      out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
    }
  }
}

double read_le_double(const unsigned char * p)
{
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void save_checkpoint(const std::string & path, const ModelConfig & cfg, const ModelParams & params)
{
  std::string blob;
  for (const auto & [name, t] : params.tensors) {
    append_le_doubles(blob, t.data);
  }
  const std::uint64_t checksum =
    fnv1a(reinterpret_cast<const unsigned char *>(blob.data()), blob.size());

  std::ostringstream head;
  head << "TIPCKPT 1\n";
  head << "n_agents " << cfg.n_agents << "\n";
  head << "t_past " << cfg.t_past << "\n";
  head << "t_future " << cfg.t_future << "\n";
  head << "k_samples " << cfg.k_samples << "\n";
  head << "hidden " << cfg.hidden << "\n";
  head << "dropout_rate " << cfg.dropout_rate << "\n";
  head << "has_task_encoder " << (cfg.has_task_encoder ? 1 : 0) << "\n";
  head << "tensors " << params.tensors.size() << "\n";
  for (const auto & [name, t] : params.tensors) {
    head << name << " " << t.shape.size();
    for (auto d : t.shape) head << " " << d;
    head << "\n";
  }
  head << "checksum " << std::hex << checksum << std::dec << "\n";
  head << "DATA\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open " + path + " for writing");
  out << head.str();
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
}

std::pair<ModelConfig, ModelParams> load_checkpoint(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "TIPCKPT 1") {
    throw CheckpointError("bad magic or unsupported version in " + path);
  }
  ModelConfig cfg;
  ModelParams params;
  std::vector<std::pair<std::string, std::vector<std::size_t>>> manifest;
  std::uint64_t checksum = 0;
  while (std::getline(in, line)) {
    if (line == "DATA") break;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "n_agents") {
      ls >> cfg.n_agents;
    } else if (key == "t_past") {
      ls >> cfg.t_past;
    } else if (key == "t_future") {
      ls >> cfg.t_future;
    } else if (key == "k_samples") {
      ls >> cfg.k_samples;
    } else if (key == "hidden") {
      ls >> cfg.hidden;
    } else if (key == "dropout_rate") {
      ls >> cfg.dropout_rate;
    } else if (key == "has_task_encoder") {
      int v = 0;
      ls >> v;
      cfg.has_task_encoder = v != 0;
    } else if (key == "tensors") {
      std::size_t count = 0;
      ls >> count;
      for (std::size_t i = 0; i < count; ++i) {
        if (!std::getline(in, line)) throw CheckpointError("truncated manifest");
        std::istringstream ts(line);
        std::string name;
        std::size_t rank = 0;
        ts >> name >> rank;
        std::vector<std::size_t> shape(rank);
        for (auto & d : shape) ts >> d;
        if (!ts) throw CheckpointError("bad manifest entry: " + line);
        manifest.emplace_back(name, shape);
      }
    } else if (key == "checksum") {
      ls >> std::hex >> checksum;
    } else {
      throw CheckpointError("unknown header key: " + key);
    }
  }
  std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t expected = 0;
  for (const auto & [name, shape] : manifest) expected += Tensor::count(shape) * 8;
  if (blob.size() != expected) throw CheckpointError("tensor data size mismatch");
  if (fnv1a(reinterpret_cast<const unsigned char *>(blob.data()), blob.size()) != checksum) {
    throw CheckpointError("checksum mismatch");
  }
  std::size_t off = 0;
  for (const auto & [name, shape] : manifest) {
    Tensor t = Tensor::zeros(shape);
    for (auto & v : t.data) {
      v = read_le_double(reinterpret_cast<const unsigned char *>(blob.data()) + off);
      off += 8;
    }
    params.tensors[name] = std::move(t);
  }
  return {cfg, params};
}

}  // namespace tip
