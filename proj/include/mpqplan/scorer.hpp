// Copyright 2026 The mpqplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "mpqplan/trace.hpp"

namespace mpqplan {

struct ScoreConfig {
  /// Observations strictly below gamma reward the layer; the rest penalize it.
  double gamma = 0.9;

  void validate() const;
};

struct ContributionScore {
  int layer_id = 0;
  SublayerKind kind = SublayerKind::kAttention;
  long long reward = 0;
  long long penalty = 0;

  long long score() const { return reward - penalty; }
  long long observations() const { return reward + penalty; }

  bool operator==(const ContributionScore&) const = default;
};

/// Reward-penalty count per layer, one entry per layer id 0..L-1. Layers with no
/// observations come back as zeros; find them with TraceFile::missing_layers().
std::vector<ContributionScore> score_layers(const TraceFile& trace, const ScoreConfig& config = {});

/// Layer ids by score descending, ties by layer id ascending.
std::vector<int> rank_layers(const std::vector<ContributionScore>& scores);

/// CSV `layer,kind,reward,penalty,score`.
std::string scores_to_csv(const std::vector<ContributionScore>& scores);
std::vector<ContributionScore> parse_scores_csv(const std::string& csv_text);

}  // namespace mpqplan
