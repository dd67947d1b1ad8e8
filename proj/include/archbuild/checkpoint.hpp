#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "archbuild/errors.hpp"
#include "archbuild/message.hpp"
#include "archbuild/nn.hpp"
#include "archbuild/textio.hpp"

namespace archbuild {

inline constexpr int kCheckpointVersion = 1;

using json = nlohmann::json;

// Reals travel as hex-float strings so round-trips are bit-exact.

inline json reals_to_json(const std::vector<double>& values) {
  json arr = json::array();
  for (double v : values) arr.push_back(hex_double(v));
  return arr;
}

inline std::vector<double> reals_from_json(const json& arr) {
  std::vector<double> values;
  values.reserve(arr.size());
  for (const auto& item : arr) values.push_back(parse_hex_double(item.get<std::string>()));
  return values;
}

inline json net_to_json(const FeedForwardNet& net) {
  json j;
  j["layer_dims"] = net.dims;
  json weights = json::array();
  for (const Matrix& w : net.weights) weights.push_back(reals_to_json(w.data));
  j["weights"] = std::move(weights);
  json biases = json::array();
  for (const auto& b : net.biases) biases.push_back(reals_to_json(b));
  j["biases"] = std::move(biases);
  return j;
}

inline FeedForwardNet net_from_json(const json& j) {
  FeedForwardNet net;
  net.dims = j.at("layer_dims").get<std::vector<int>>();
  if (net.dims.size() < 2) throw DimensionMismatch("layer_dims needs at least 2 entries");
  const json& weights = j.at("weights");
  const json& biases = j.at("biases");
  if (weights.size() != net.dims.size() - 1 || biases.size() != net.dims.size() - 1) {
    throw DimensionMismatch("weight/bias count does not match layer_dims");
  }
  for (std::size_t l = 0; l + 1 < net.dims.size(); ++l) {
    Matrix w(net.dims[l + 1], net.dims[l]);
    auto data = reals_from_json(weights[l]);
    if (data.size() != w.data.size()) {
      throw DimensionMismatch("weight matrix " + std::to_string(l) + " has " +
                              std::to_string(data.size()) + " entries, expected " +
                              std::to_string(w.data.size()));
    }
    w.data = std::move(data);
    net.weights.push_back(std::move(w));
    auto b = reals_from_json(biases[l]);
    if (b.size() != static_cast<std::size_t>(net.dims[l + 1])) {
      throw DimensionMismatch("bias vector " + std::to_string(l) + " has wrong size");
    }
    net.biases.push_back(std::move(b));
  }
  return net;
}

inline json gradients_to_json(const Gradients& g) {
  json j;
  json weights = json::array();
  for (const Matrix& w : g.weights) weights.push_back(reals_to_json(w.data));
  j["weights"] = std::move(weights);
  json biases = json::array();
  for (const auto& b : g.biases) biases.push_back(reals_to_json(b));
  j["biases"] = std::move(biases);
  return j;
}

inline Gradients gradients_from_json(const json& j, const FeedForwardNet& net) {
  Gradients g = Gradients::like(net);
  const json& weights = j.at("weights");
  const json& biases = j.at("biases");
  if (weights.size() != g.weights.size() || biases.size() != g.biases.size()) {
    throw DimensionMismatch("optimizer moment tensors do not match the network");
  }
  for (std::size_t l = 0; l < g.weights.size(); ++l) {
    auto data = reals_from_json(weights[l]);
    if (data.size() != g.weights[l].data.size()) {
      throw DimensionMismatch("optimizer moment matrix has wrong size");
    }
    g.weights[l].data = std::move(data);
    auto b = reals_from_json(biases[l]);
    if (b.size() != g.biases[l].size()) {
      throw DimensionMismatch("optimizer moment vector has wrong size");
    }
    g.biases[l] = std::move(b);
  }
  return g;
}

inline json optimizer_to_json(const Optimizer& opt) {
  json j;
  j["kind"] = optimizer_kind_name(opt.kind);
  j["learning_rate"] = hex_double(opt.learning_rate);
  j["beta1"] = hex_double(opt.beta1);
  j["beta2"] = hex_double(opt.beta2);
  j["epsilon"] = hex_double(opt.epsilon);
  j["step"] = opt.step_count;
  if (opt.kind == OptimizerKind::adam) {
    j["m"] = gradients_to_json(opt.m);
    j["v"] = gradients_to_json(opt.v);
  }
  return j;
}

inline Optimizer optimizer_from_json(const json& j, const FeedForwardNet& net) {
  Optimizer opt;
  opt.kind = parse_optimizer_kind(j.at("kind").get<std::string>());
  opt.learning_rate = parse_hex_double(j.at("learning_rate").get<std::string>());
  opt.beta1 = parse_hex_double(j.at("beta1").get<std::string>());
  opt.beta2 = parse_hex_double(j.at("beta2").get<std::string>());
  opt.epsilon = parse_hex_double(j.at("epsilon").get<std::string>());
  opt.step_count = j.at("step").get<long>();
  if (opt.kind == OptimizerKind::adam) {
    opt.m = gradients_from_json(j.at("m"), net);
    opt.v = gradients_from_json(j.at("v"), net);
  }
  return opt;
}

inline json lexicon_to_json(const Lexicon& lexicon) {
  json j;
  j["m_max"] = lexicon.m_max();
  json messages = json::array();
  for (const Message& m : lexicon.messages()) {
    json entry;
    entry["id"] = m.id;
    if (m.is_primitive()) {
      entry["kind"] = "primitive";
      entry["name"] = message_name(m.id);
    } else {
      entry["kind"] = "abstraction";
      entry["children"] = m.children;
    }
    messages.push_back(std::move(entry));
  }
  j["messages"] = std::move(messages);
  return j;
}

inline Lexicon lexicon_from_json(const json& j) {
  Lexicon lexicon(j.at("m_max").get<int>());
  const json& messages = j.at("messages");
  if (messages.size() < kPrimitiveCount) {
    throw DimensionMismatch("lexicon must contain the 12 primitives");
  }
  for (std::size_t i = 0; i < messages.size(); ++i) {
    const json& entry = messages[i];
    int id = entry.at("id").get<int>();
    if (id != static_cast<int>(i)) throw DimensionMismatch("lexicon ids must be contiguous");
    std::string kind = entry.at("kind").get<std::string>();
    if (id < kPrimitiveCount) {
      if (kind != "primitive") throw DimensionMismatch("ids 0..11 must be primitives");
    } else {
      if (kind != "abstraction") throw DimensionMismatch("ids >= 12 must be abstractions");
      lexicon.add_abstraction(entry.at("children").get<std::vector<int>>());
    }
  }
  return lexicon;
}

struct Checkpoint {
  FeedForwardNet net;
  Optimizer optimizer;
  Lexicon lexicon{kDefaultMMax};
};

inline void save_checkpoint(const FeedForwardNet& net, const Optimizer& optimizer,
                            const Lexicon& lexicon, const std::filesystem::path& path) {
  json j = net_to_json(net);
  j["version"] = kCheckpointVersion;
  j["optimizer_state"] = optimizer_to_json(optimizer);
  j["lexicon"] = lexicon_to_json(lexicon);
  std::ofstream out(path);
  if (!out) throw IOError("cannot write checkpoint: " + path.string());
  out << j.dump(1) << "\n";
  if (!out) throw IOError("failed writing checkpoint: " + path.string());
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path,
                                  const std::vector<int>* require_dims = nullptr) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open checkpoint: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw CheckpointError("malformed checkpoint " + path.string() + ": " + e.what());
  }
  try {
    int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw FormatVersionMismatch("checkpoint version " + std::to_string(version) +
                                  ", expected " + std::to_string(kCheckpointVersion));
    }
    Checkpoint ckpt;
    ckpt.net = net_from_json(j);
    if (require_dims != nullptr && ckpt.net.dims != *require_dims) {
      throw DimensionMismatch("checkpoint layer_dims do not match the expected architecture");
    }
    ckpt.optimizer = optimizer_from_json(j.at("optimizer_state"), ckpt.net);
    ckpt.lexicon = lexicon_from_json(j.at("lexicon"));
    return ckpt;
  } catch (const json::exception& e) {
    throw CheckpointError("malformed checkpoint " + path.string() + ": " + e.what());
  }
}

}  // namespace archbuild
