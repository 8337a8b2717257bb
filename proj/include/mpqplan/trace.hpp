// Copyright 2026 The mpqplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mpqplan/error.hpp"

namespace mpqplan {

enum class SublayerKind { kAttention, kFfn };

const char* to_string(SublayerKind kind);
SublayerKind sublayer_kind_from_string(const std::string& text);

/// Default kind for a sublayer index when a trace does not say: even ids are
/// attention, odd ids are feed-forward (two sublayers per decoder block).
inline SublayerKind default_kind(int layer_id) {
  return layer_id % 2 == 0 ? SublayerKind::kAttention : SublayerKind::kFfn;
}

struct SimilarityObservation {
  int prompt_id = 0;
  int token_index = 0;
  int layer_id = 0;
  SublayerKind kind = SublayerKind::kAttention;
  double similarity = 0.0;

  bool operator==(const SimilarityObservation&) const = default;
};

struct TraceFile {
  std::string model_name;
  int num_layers = 0;
  std::vector<SimilarityObservation> observations;

  /// Layer ids in 0..L-1 with no observation.
  std::vector<int> missing_layers() const;
  /// Kind recorded for each layer (first observation wins), or the parity default.
  std::vector<SublayerKind> layer_kinds() const;
};

/// Cosine of the angle between two vectors. Sums are accumulated in long double so
/// the result does not depend on the order of the entries at double tolerance.
/// Throws ValidationError on a length mismatch or a zero vector.
template <typename DerivedA, typename DerivedB>
double cosine_similarity(const Eigen::MatrixBase<DerivedA>& u, const Eigen::MatrixBase<DerivedB>& v) {
  if (u.size() != v.size()) throw ValidationError("cosine_similarity: length mismatch");
  if (u.size() == 0) throw ValidationError("cosine_similarity: empty vectors");
  long double dot = 0.0L, uu = 0.0L, vv = 0.0L;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const long double a = static_cast<long double>(u.derived().coeff(i));
    const long double b = static_cast<long double>(v.derived().coeff(i));
    dot += a * b;
    uu += a * a;
    vv += b * b;
  }
  if (uu == 0.0L || vv == 0.0L) throw ValidationError("cosine_similarity: zero vector");
  const long double c = dot / (std::sqrt(uu) * std::sqrt(vv));
  return static_cast<double>(std::clamp(c, -1.0L, 1.0L));
}

/// Residual-stream vectors around one sublayer for one token of one prompt.
struct BoundaryState {
  int prompt_id = 0;
  int token_index = 0;
  int layer_id = 0;
  SublayerKind kind = SublayerKind::kAttention;
  Eigen::VectorXd before;
  Eigen::VectorXd after;
};

/// One observation per boundary, in input order.
std::vector<SimilarityObservation> boundary_similarities(const std::vector<BoundaryState>& states);

/// Parses the JSON Lines trace format:
///   {"model": "...", "num_layers": L}
///   {"prompt": 0, "token": 3, "layer": 5, "kind": "ffn", "sim": 0.93}
/// Errors carry the 1-based line number.
TraceFile parse_trace(const std::string& jsonl_text);
TraceFile load_trace(const std::filesystem::path& path);
std::string trace_to_jsonl(const TraceFile& trace);

}  // namespace mpqplan
