// Copyright 2026 The mpqplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mpqplan/composition.hpp"
#include "mpqplan/registry.hpp"
#include "mpqplan/scorer.hpp"

namespace mpqplan {

/// Per-layer type assignment. type_of_layer[l] indexes the registry's types.
struct Allocation {
  std::vector<std::size_t> type_of_layer;
  Composition composition;
  WeightVector weights;

  std::size_t num_layers() const { return type_of_layer.size(); }
  /// Number of layers assigned to each type.
  std::vector<int> type_counts(std::size_t num_types) const;
};

/// Walks the types from least to most aggressive and hands each one the next
/// counts[i] layers in descending score order (ties by layer id).
/// Throws ValidationError when the score list, the counts and the type list disagree.
Allocation allocate(const std::vector<ContributionScore>& scores, const Composition& best,
                    const std::vector<QuantType>& types, const WeightVector& weights = {});

/// Mean effective bits per parameter over all layers.
double average_effective_bits(const Allocation& allocation, const std::vector<QuantType>& types);

/// Maps (block, sublayer kind) to a tensor-name pattern. `{block}` is substituted.
struct NamingScheme {
  std::string attention_pattern = "blk.{block}.attn_*";
  std::string ffn_pattern = "blk.{block}.ffn_*";
  /// Tensors outside the repeating sublayers, kept at `passthrough_type`.
  std::vector<std::string> passthrough_patterns = {"token_embd.*", "output.*", "output_norm.*"};
  /// Empty means the least aggressive registered type.
  std::string passthrough_type;

  std::string pattern_for(int block, SublayerKind kind) const;
};

struct ManifestLayer {
  int block = 0;
  SublayerKind kind = SublayerKind::kAttention;
  std::string tensor_pattern;
  std::string quant;
};

struct Manifest {
  std::string model;
  std::vector<double> weights;
  std::vector<std::pair<std::string, int>> composition;
  double avg_effective_bits = 0.0;
  std::vector<ManifestLayer> layers;
  std::vector<std::pair<std::string, std::string>> passthrough;
};

/// Layer l belongs to block l / 2; its kind comes from `kinds` (one per layer).
Manifest build_manifest(const Allocation& allocation, const Registry& registry,
                        const std::vector<SublayerKind>& kinds, const NamingScheme& naming,
                        const std::string& model);

std::string manifest_to_json(const Manifest& manifest);
Manifest parse_manifest(const std::string& json_text);

}  // namespace mpqplan
