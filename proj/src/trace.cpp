// Copyright 2026 The mpqplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "mpqplan/trace.hpp"

#include <sstream>

#include "json.hpp"
#include "mpqplan/io.hpp"

namespace mpqplan {

using nlohmann::json;

const char* to_string(SublayerKind kind) {
  return kind == SublayerKind::kAttention ? "attention" : "ffn";
}

SublayerKind sublayer_kind_from_string(const std::string& text) {
  if (text == "attention") return SublayerKind::kAttention;
  if (text == "ffn") return SublayerKind::kFfn;
  throw ValidationError("unknown sublayer kind '" + text + "' (expected attention or ffn)");
}

std::vector<int> TraceFile::missing_layers() const {
  std::vector<bool> seen(static_cast<std::size_t>(num_layers), false);
  for (const auto& o : observations) seen[static_cast<std::size_t>(o.layer_id)] = true;
  std::vector<int> missing;
  for (int l = 0; l < num_layers; ++l) {
    if (!seen[static_cast<std::size_t>(l)]) missing.push_back(l);
  }
  return missing;
}

std::vector<SublayerKind> TraceFile::layer_kinds() const {
  std::vector<SublayerKind> kinds;
  std::vector<bool> seen(static_cast<std::size_t>(num_layers), false);
  for (int l = 0; l < num_layers; ++l) kinds.push_back(default_kind(l));
  for (const auto& o : observations) {
    const auto l = static_cast<std::size_t>(o.layer_id);
    if (!seen[l]) {
      kinds[l] = o.kind;
      seen[l] = true;
    }
  }
  return kinds;
}

std::vector<SimilarityObservation> boundary_similarities(const std::vector<BoundaryState>& states) {
  std::vector<SimilarityObservation> out;
  out.reserve(states.size());
  for (const auto& s : states) {
    double sim = 0.0;
    try {
      sim = cosine_similarity(s.before, s.after);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(e.what()) + " at prompt " + std::to_string(s.prompt_id) + ", token " +
                            std::to_string(s.token_index) + ", layer " + std::to_string(s.layer_id));
    }
    out.push_back({s.prompt_id, s.token_index, s.layer_id, s.kind, sim});
  }
  return out;
}

TraceFile parse_trace(const std::string& jsonl_text) {
  TraceFile trace;
  std::istringstream in(jsonl_text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  // A layer keeps the kind of its first observation; later disagreement is an error.
  std::vector<int> kind_of_layer;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "trace line " + std::to_string(line_no) + ": ";
    json item;
    try {
      item = json::parse(line);
    } catch (const json::parse_error&) {
      throw ValidationError(where + "malformed JSON");
    }
    try {
      if (!have_header) {
        trace.model_name = item.at("model").get<std::string>();
        trace.num_layers = item.at("num_layers").get<int>();
        if (trace.num_layers <= 0) throw ValidationError(where + "num_layers must be positive");
        kind_of_layer.assign(static_cast<std::size_t>(trace.num_layers), -1);
        have_header = true;
        continue;
      }
      SimilarityObservation o;
      o.prompt_id = item.at("prompt").get<int>();
      o.token_index = item.at("token").get<int>();
      o.layer_id = item.at("layer").get<int>();
      o.kind = sublayer_kind_from_string(item.at("kind").get<std::string>());
      o.similarity = item.at("sim").get<double>();
      if (o.token_index < 0) throw ValidationError(where + "negative token index");
      if (o.layer_id < 0 || o.layer_id >= trace.num_layers) {
        throw ValidationError(where + "layer " + std::to_string(o.layer_id) + " outside 0.." +
                              std::to_string(trace.num_layers - 1));
      }
      if (!(o.similarity >= -1.0 && o.similarity <= 1.0)) {
        throw ValidationError(where + "similarity " + format_real(o.similarity) + " outside [-1, 1]");
      }
      auto& k = kind_of_layer[static_cast<std::size_t>(o.layer_id)];
      if (k == -1) {
        k = static_cast<int>(o.kind);
      } else if (k != static_cast<int>(o.kind)) {
        throw ValidationError(where + "layer " + std::to_string(o.layer_id) + " changes kind");
      }
      trace.observations.push_back(o);
    } catch (const json::exception& e) {
      throw ValidationError(where + e.what());
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      throw ValidationError(msg.rfind("trace line", 0) == 0 ? msg : where + msg);
    }
  }
  if (!have_header) throw ValidationError("trace: missing header line");
  return trace;
}

TraceFile load_trace(const std::filesystem::path& path) {
  try {
    return parse_trace(read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string trace_to_jsonl(const TraceFile& trace) {
  std::string out = json{{"model", trace.model_name}, {"num_layers", trace.num_layers}}.dump() + "\n";
  for (const auto& o : trace.observations) {
    out += json{{"prompt", o.prompt_id},
                {"token", o.token_index},
                {"layer", o.layer_id},
                {"kind", to_string(o.kind)},
                {"sim", o.similarity}}
               .dump();
    out += "\n";
  }
  return out;
}

}  // namespace mpqplan
