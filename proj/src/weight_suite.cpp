// Copyright 2026 The mpqplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "mpqplan/weight_suite.hpp"

#include <algorithm>
#include <array>
#include <utility>
#include <cmath>

#include "json.hpp"
#include "mpqplan/error.hpp"
#include "mpqplan/io.hpp"

namespace mpqplan {

namespace {

constexpr std::array<const char*, 3> kMetricTags = {"memory", "latency", "accuracy"};

WeightVector make(double memory, double latency, double accuracy) {
  Eigen::VectorXd w(3);
  w << memory, latency, accuracy;
  return WeightVector(std::move(w));
}

WeightVector with(int hot, double value, int other, double other_value) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(3);
  w(hot) = value;
  if (other >= 0) w(other) = other_value;
  return WeightVector(std::move(w));
}

WeightCategory priority_category(Category name, int hot, ResidualMode mode) {
  WeightCategory cat{name, {}};
  const std::string prefix = kMetricTags[static_cast<std::size_t>(hot)];
  const int a = (hot + 1) % 3;
  const int b = (hot + 2) % 3;
  const int lo = std::min(a, b);
  const int hi = std::max(a, b);

  // (prioritized, each of the other two); literals keep the vectors exact in decimal.
  constexpr std::array<std::pair<double, double>, 3> kSkewed = {{{0.7, 0.15}, {0.8, 0.1}, {0.9, 0.05}}};
  for (const auto& [v, split] : kSkewed) {
    const double rest = mode == ResidualMode::kEqualSplit ? split : 0.1;
    Eigen::VectorXd w = Eigen::VectorXd::Constant(3, rest);
    w(hot) = v;
    cat.members.push_back({name, prefix + "-skew-" + format_real(v), WeightVector(std::move(w))});
  }
  cat.members.push_back({name, prefix + "-dominant", with(hot, 1.0, -1, 0.0)});
  constexpr std::array<std::pair<double, double>, 2> kPairs = {{{0.75, 0.25}, {0.9, 0.1}}};
  for (const auto& [v, other_value] : kPairs) {
    for (int other : {lo, hi}) {
      cat.members.push_back({name, prefix + "-pair-" + format_real(v) + "-" + kMetricTags[static_cast<std::size_t>(other)],
                             with(hot, v, other, other_value)});
    }
  }
  return cat;
}

Category dedicated_category(std::size_t metric) {
  switch (metric) {
    case 0: return Category::kMemory;
    case 1: return Category::kLatency;
    default: return Category::kAccuracy;
  }
}

}  // namespace

const char* to_string(Category category) {
  switch (category) {
    case Category::kFairness: return "Fairness";
    case Category::kMemory: return "Memory";
    case Category::kLatency: return "Latency";
    case Category::kAccuracy: return "Accuracy";
  }
  return "?";
}

std::vector<WeightCategory> generate_weight_suite(ResidualMode mode) {
  std::vector<WeightCategory> suite;
  WeightCategory fairness{Category::kFairness, {}};
  fairness.members.push_back({Category::kFairness, "fairness-all", make(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)});
  fairness.members.push_back({Category::kFairness, "fairness-memory-latency", make(0.5, 0.5, 0.0)});
  fairness.members.push_back({Category::kFairness, "fairness-memory-accuracy", make(0.5, 0.0, 0.5)});
  fairness.members.push_back({Category::kFairness, "fairness-latency-accuracy", make(0.0, 0.5, 0.5)});
  suite.push_back(std::move(fairness));
  suite.push_back(priority_category(Category::kMemory, 0, mode));
  suite.push_back(priority_category(Category::kLatency, 1, mode));
  suite.push_back(priority_category(Category::kAccuracy, 2, mode));
  return suite;
}

std::vector<SuiteMember> suite_members(const std::vector<WeightCategory>& suite) {
  std::vector<SuiteMember> out;
  for (const auto& c : suite) out.insert(out.end(), c.members.begin(), c.members.end());
  return out;
}

std::string suite_to_json(const std::vector<WeightCategory>& suite) {
  using nlohmann::json;
  json doc = json::array();
  for (const auto& m : suite_members(suite)) {
    const auto& w = m.weights.values();
    doc.push_back({{"category", to_string(m.category)},
                   {"label", m.label},
                   {"weights", std::vector<double>(w.data(), w.data() + w.size())}});
  }
  return doc.dump(2) + "\n";
}

DistanceReport distance_to_best_report(const std::vector<WeightCategory>& suite,
                                       const std::map<std::string, SolutionPoint>& results,
                                       const std::vector<SolutionPoint>& baseline,
                                       const std::vector<std::string>& metric_names,
                                       const std::vector<Direction>& directions) {
  const auto j_count = static_cast<Eigen::Index>(metric_names.size());
  if (directions.size() != metric_names.size()) throw ValidationError("distance report: one direction per metric required");
  if (j_count != 3) throw ValidationError("distance report expects (memory, latency, accuracy) metrics");

  struct Entry {
    std::string label;
    std::string category;
    const Eigen::VectorXd* values;
  };
  std::vector<Entry> entries;
  for (const auto& m : suite_members(suite)) {
    const auto it = results.find(m.label);
    if (it == results.end()) throw ValidationError("distance report: no result for suite member '" + m.label + "'");
    if (it->second.values.size() != j_count) throw ValidationError("distance report: wrong dimension for '" + m.label + "'");
    entries.push_back({m.label, to_string(m.category), &it->second.values});
  }
  for (const auto& p : baseline) {
    if (p.values.size() != j_count) throw ValidationError("distance report: wrong dimension for '" + p.label + "'");
    entries.push_back({p.label, "Uniform", &p.values});
  }

  DistanceReport r;
  r.metric_names = metric_names;
  r.best.resize(j_count);
  for (Eigen::Index j = 0; j < j_count; ++j) {
    const bool cost = directions[static_cast<std::size_t>(j)] == Direction::kCost;
    const Entry* best = nullptr;
    for (const auto& e : entries) {
      const double v = (*e.values)(j);
      if (best == nullptr || (cost ? v < (*best->values)(j) : v > (*best->values)(j))) best = &e;
    }
    r.best(j) = (*best->values)(j);
    r.best_label.push_back(best->label);
    r.best_category.push_back(best->category);
    r.best_in_dedicated_category.push_back(best->category == to_string(dedicated_category(static_cast<std::size_t>(j))));
  }

  auto row_for = [&](const std::string& name) {
    CategoryDistance row{name, Eigen::VectorXd::Zero(j_count)};
    int n = 0;
    for (const auto& e : entries) {
      if (e.category != name) continue;
      row.mean_distance += (*e.values - r.best).cwiseAbs();
      ++n;
    }
    if (n > 0) row.mean_distance /= n;
    return row;
  };
  for (const auto& c : suite) r.rows.push_back(row_for(to_string(c.name)));
  if (!baseline.empty()) r.rows.push_back(row_for("Uniform"));
  return r;
}

std::string distance_report_to_csv(const DistanceReport& report) {
  std::string out = "category";
  for (const auto& m : report.metric_names) out += "," + m;
  out += "\n";
  for (const auto& row : report.rows) {
    out += row.row;
    for (Eigen::Index j = 0; j < row.mean_distance.size(); ++j) out += "," + format_real(row.mean_distance(j));
    out += "\n";
  }
  return out;
}

}  // namespace mpqplan
