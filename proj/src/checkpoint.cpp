// Copyright 2026 The rtblab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rtblab/sac/checkpoint.hpp"

#include <nlohmann/json.hpp>

#include <vector>

#include "rtblab/io.hpp"
#include "rtblab/types.hpp"

namespace rtblab::sac {
namespace {

using nlohmann::json;

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from(const json& doc, Eigen::Index expected, const char* what) {
  if (!doc.is_array() || static_cast<Eigen::Index>(doc.size()) != expected) {
    throw DataError(std::string("checkpoint: ") + what + " has the wrong length");
  }
  Vector v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) v[i] = doc[static_cast<std::size_t>(i)].get<double>();
  return v;
}

json net_json(const Net& net, const AdamState<double>* opt) {
  json out;
  out["layers"] = net.layer_sizes();
  out["params"] = vector_json(net.parameters());
  if (opt != nullptr) {
    out["adam"] = {{"step", opt->step}, {"m", vector_json(opt->m)}, {"v", vector_json(opt->v)}};
  }
  return out;
}

Net net_from(const json& doc, AdamState<double>* opt, const char* what) {
  Net net(doc.at("layers").get<std::vector<int>>());
  net.parameters() = vector_from(doc.at("params"), net.parameter_count(), what);
  if (opt != nullptr) {
    const json& adam = doc.at("adam");
    *opt = AdamState<double>(net.parameter_count());
    opt->step = adam.at("step").get<std::int64_t>();
    opt->m = vector_from(adam.at("m"), net.parameter_count(), what);
    opt->v = vector_from(adam.at("v"), net.parameter_count(), what);
  }
  return net;
}

}  // namespace

BufferMeta buffer_meta(const ReplayBuffer& buffer) {
  return BufferMeta{buffer.capacity(), buffer.size(), buffer.cursor(), buffer.total_pushed()};
}

std::string checkpoint_to_string(const PolicyBundle& b, const BufferMeta& buffer) {
  json doc;
  doc["format"] = "rtblab-sac-checkpoint";
  doc["version"] = kCheckpointVersion;
  doc["actor"] = net_json(b.actor, &b.actor_opt);
  doc["q1"] = net_json(b.q1, &b.q1_opt);
  doc["q2"] = net_json(b.q2, &b.q2_opt);
  doc["target_q1"] = net_json(b.target_q1, nullptr);
  doc["target_q2"] = net_json(b.target_q2, nullptr);
  doc["log_alpha"] = b.log_alpha;
  doc["alpha_adam"] = {{"step", b.alpha_opt.step}, {"m", vector_json(b.alpha_opt.m)}, {"v", vector_json(b.alpha_opt.v)}};
  doc["entropy_target"] = b.entropy_target;
  doc["pctr_scale"] = b.pctr_scale;
  doc["rounds_done"] = b.rounds_done;
  doc["buffer"] = {{"capacity", buffer.capacity},
                   {"size", buffer.size},
                   {"cursor", buffer.cursor},
                   {"total_pushed", buffer.total_pushed}};
  return doc.dump(1) + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
  Checkpoint out;
  try {
    const json doc = json::parse(text);
    if (!doc.contains("version")) throw DataError("checkpoint: missing version");
    const int version = doc.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw DataError("checkpoint: unsupported version " + std::to_string(version));
    }
    PolicyBundle& b = out.bundle;
    b.actor = net_from(doc.at("actor"), &b.actor_opt, "actor");
    b.q1 = net_from(doc.at("q1"), &b.q1_opt, "q1");
    b.q2 = net_from(doc.at("q2"), &b.q2_opt, "q2");
    b.target_q1 = net_from(doc.at("target_q1"), nullptr, "target_q1");
    b.target_q2 = net_from(doc.at("target_q2"), nullptr, "target_q2");
    if (b.target_q1.layer_sizes() != b.q1.layer_sizes() || b.target_q2.layer_sizes() != b.q2.layer_sizes()) {
      throw DataError("checkpoint: target critic shapes differ from critics");
    }
    if (b.actor.input_size() != kStateDim || b.actor.output_size() != 2 * kActionDim ||
        b.q1.input_size() != kStateDim + kActionDim || b.q1.output_size() != 1 ||
        b.q2.input_size() != kStateDim + kActionDim || b.q2.output_size() != 1) {
      throw DataError("checkpoint: network shapes do not match the bidding problem");
    }
    b.log_alpha = doc.at("log_alpha").get<double>();
    const json& alpha_adam = doc.at("alpha_adam");
    b.alpha_opt = AdamState<double>(1);
    b.alpha_opt.step = alpha_adam.at("step").get<std::int64_t>();
    b.alpha_opt.m = vector_from(alpha_adam.at("m"), 1, "alpha_adam");
    b.alpha_opt.v = vector_from(alpha_adam.at("v"), 1, "alpha_adam");
    b.entropy_target = doc.at("entropy_target").get<double>();
    b.pctr_scale = doc.at("pctr_scale").get<double>();
    b.rounds_done = doc.at("rounds_done").get<std::int64_t>();
    const json& buf = doc.at("buffer");
    out.buffer.capacity = buf.at("capacity").get<std::size_t>();
    out.buffer.size = buf.at("size").get<std::size_t>();
    out.buffer.cursor = buf.at("cursor").get<std::size_t>();
    out.buffer.total_pushed = buf.at("total_pushed").get<std::size_t>();
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
  return out;
}

void save_checkpoint(const std::string& path, const PolicyBundle& bundle, const BufferMeta& buffer) {
  write_file_atomic(path, checkpoint_to_string(bundle, buffer));
}

Checkpoint load_checkpoint(const std::string& path) { return checkpoint_from_string(read_file(path)); }

}  // namespace rtblab::sac
