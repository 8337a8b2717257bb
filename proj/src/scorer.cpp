// Copyright 2026 The mpqplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "mpqplan/scorer.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "mpqplan/error.hpp"
#include "mpqplan/io.hpp"

namespace mpqplan {

void ScoreConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ValidationError("gamma must lie in (0, 1], got " + format_real(gamma));
  }
}

std::vector<ContributionScore> score_layers(const TraceFile& trace, const ScoreConfig& config) {
  config.validate();
  const auto kinds = trace.layer_kinds();
  std::vector<ContributionScore> scores(static_cast<std::size_t>(trace.num_layers));
  for (int l = 0; l < trace.num_layers; ++l) {
    scores[static_cast<std::size_t>(l)].layer_id = l;
    scores[static_cast<std::size_t>(l)].kind = kinds[static_cast<std::size_t>(l)];
  }
  for (const auto& o : trace.observations) {
    auto& s = scores.at(static_cast<std::size_t>(o.layer_id));
    if (o.similarity < config.gamma) {
      ++s.reward;
    } else {
      ++s.penalty;
    }
  }
  return scores;
}

std::vector<int> rank_layers(const std::vector<ContributionScore>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a].score() != scores[b].score()) return scores[a].score() > scores[b].score();
    return scores[a].layer_id < scores[b].layer_id;
  });
  std::vector<int> ids;
  ids.reserve(order.size());
  for (auto i : order) ids.push_back(scores[i].layer_id);
  return ids;
}

std::string scores_to_csv(const std::vector<ContributionScore>& scores) {
  std::string out = "layer,kind,reward,penalty,score\n";
  for (const auto& s : scores) {
    out += std::to_string(s.layer_id) + "," + to_string(s.kind) + "," + std::to_string(s.reward) + "," +
           std::to_string(s.penalty) + "," + std::to_string(s.score()) + "\n";
  }
  return out;
}

std::vector<ContributionScore> parse_scores_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<ContributionScore> scores;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    const auto where = "scores line " + std::to_string(line_no) + ": ";
    if (line_no == 1) {
      if (fields != std::vector<std::string>{"layer", "kind", "reward", "penalty", "score"}) {
        throw ValidationError(where + "expected header layer,kind,reward,penalty,score");
      }
      continue;
    }
    if (fields.size() != 5) throw ValidationError(where + "expected 5 fields");
    ContributionScore s;
    s.layer_id = static_cast<int>(parse_integer(fields[0]));
    s.kind = sublayer_kind_from_string(fields[1]);
    s.reward = parse_integer(fields[2]);
    s.penalty = parse_integer(fields[3]);
    if (s.reward < 0 || s.penalty < 0) throw ValidationError(where + "negative count");
    if (parse_integer(fields[4]) != s.score()) throw ValidationError(where + "score != reward - penalty");
    scores.push_back(s);
  }
  for (std::size_t l = 0; l < scores.size(); ++l) {
    if (scores[l].layer_id != static_cast<int>(l)) throw ValidationError("scores: layers must be listed as 0..L-1");
  }
  return scores;
}

}  // namespace mpqplan
