// Copyright 2026 The mpqplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "mpqplan/allocator.hpp"

#include "json.hpp"
#include "mpqplan/error.hpp"

namespace mpqplan {

using nlohmann::json;

std::vector<int> Allocation::type_counts(std::size_t num_types) const {
  std::vector<int> counts(num_types, 0);
  for (auto t : type_of_layer) ++counts.at(t);
  return counts;
}

Allocation allocate(const std::vector<ContributionScore>& scores, const Composition& best,
                    const std::vector<QuantType>& types, const WeightVector& weights) {
  if (best.counts.size() != types.size()) {
    throw ValidationError("allocate: composition has " + std::to_string(best.counts.size()) + " entries for " +
                          std::to_string(types.size()) + " types");
  }
  for (int z : best.counts) {
    if (z < 0) throw ValidationError("allocate: negative count in composition");
  }
  if (static_cast<std::size_t>(best.num_layers()) != scores.size()) {
    throw ValidationError("allocate: composition covers " + std::to_string(best.num_layers()) + " layers but " +
                          std::to_string(scores.size()) + " scores were given");
  }
  for (std::size_t l = 0; l < scores.size(); ++l) {
    if (scores[l].layer_id != static_cast<int>(l)) throw ValidationError("allocate: scores must be indexed 0..L-1");
  }

  const auto order = rank_layers(scores);
  Allocation out;
  out.type_of_layer.assign(scores.size(), 0);
  out.composition = best;
  out.weights = weights;
  std::size_t p = 0;
  for (std::size_t i = 0; i < types.size(); ++i) {
    for (int j = 0; j < best.counts[i]; ++j) {
      out.type_of_layer[static_cast<std::size_t>(order[p])] = i;
      ++p;
    }
  }
  return out;
}

double average_effective_bits(const Allocation& allocation, const std::vector<QuantType>& types) {
  if (allocation.type_of_layer.empty()) throw ValidationError("average_effective_bits: empty allocation");
  const auto counts = allocation.type_counts(types.size());
  double total = 0.0;
  for (std::size_t i = 0; i < types.size(); ++i) total += counts[i] * types[i].effective_bits;
  return total / static_cast<double>(allocation.num_layers());
}

std::string NamingScheme::pattern_for(int block, SublayerKind kind) const {
  std::string pattern = kind == SublayerKind::kAttention ? attention_pattern : ffn_pattern;
  const std::string key = "{block}";
  for (auto pos = pattern.find(key); pos != std::string::npos; pos = pattern.find(key, pos)) {
    pattern.replace(pos, key.size(), std::to_string(block));
  }
  return pattern;
}

Manifest build_manifest(const Allocation& allocation, const Registry& registry, const std::vector<SublayerKind>& kinds,
                        const NamingScheme& naming, const std::string& model) {
  if (kinds.size() != allocation.num_layers()) throw ValidationError("manifest: one sublayer kind per layer required");
  Manifest m;
  m.model = model;
  for (std::size_t j = 0; j < allocation.weights.size(); ++j) m.weights.push_back(allocation.weights[j]);
  const auto counts = allocation.type_counts(registry.types.size());
  for (std::size_t i = 0; i < registry.types.size(); ++i) m.composition.emplace_back(registry.types[i].name, counts[i]);
  m.avg_effective_bits = average_effective_bits(allocation, registry.types);
  for (std::size_t l = 0; l < allocation.num_layers(); ++l) {
    const int block = static_cast<int>(l / 2);
    m.layers.push_back(
        {block, kinds[l], naming.pattern_for(block, kinds[l]), registry.types[allocation.type_of_layer[l]].name});
  }
  const std::string passthrough_type =
      naming.passthrough_type.empty() ? registry.types.front().name : registry.types[registry.type_index(naming.passthrough_type)].name;
  for (const auto& pattern : naming.passthrough_patterns) m.passthrough.emplace_back(pattern, passthrough_type);
  return m;
}

std::string manifest_to_json(const Manifest& manifest) {
  json doc;
  doc["model"] = manifest.model;
  doc["weights"] = manifest.weights;
  doc["composition"] = json::array();
  for (const auto& [type, count] : manifest.composition) doc["composition"].push_back({{"type", type}, {"count", count}});
  doc["avg_effective_bits"] = manifest.avg_effective_bits;
  doc["layers"] = json::array();
  for (const auto& l : manifest.layers) {
    doc["layers"].push_back(
        {{"block", l.block}, {"kind", to_string(l.kind)}, {"tensor_pattern", l.tensor_pattern}, {"quant", l.quant}});
  }
  doc["passthrough"] = json::array();
  for (const auto& [pattern, quant] : manifest.passthrough) {
    doc["passthrough"].push_back({{"tensor_pattern", pattern}, {"quant", quant}});
  }
  return doc.dump(2) + "\n";
}

Manifest parse_manifest(const std::string& json_text) {
  try {
    const json doc = json::parse(json_text);
    Manifest m;
    m.model = doc.at("model").get<std::string>();
    m.weights = doc.at("weights").get<std::vector<double>>();
    for (const auto& c : doc.at("composition")) {
      m.composition.emplace_back(c.at("type").get<std::string>(), c.at("count").get<int>());
    }
    m.avg_effective_bits = doc.at("avg_effective_bits").get<double>();
    for (const auto& l : doc.at("layers")) {
      m.layers.push_back({l.at("block").get<int>(), sublayer_kind_from_string(l.at("kind").get<std::string>()),
                          l.at("tensor_pattern").get<std::string>(), l.at("quant").get<std::string>()});
    }
    for (const auto& p : doc.at("passthrough")) {
      m.passthrough.emplace_back(p.at("tensor_pattern").get<std::string>(), p.at("quant").get<std::string>());
    }
    return m;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest: ") + e.what());
  }
}

}  // namespace mpqplan
