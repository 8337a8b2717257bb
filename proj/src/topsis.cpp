// Copyright 2026 The mpqplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "mpqplan/topsis.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "json.hpp"
#include "mpqplan/error.hpp"

namespace mpqplan {

namespace {

// Fixed work unit. Reductions happen per chunk and are merged in chunk order, which
// makes every floating-point sum independent of how chunks map onto threads.
constexpr std::uint64_t kChunkSize = 1u << 14;

unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

template <typename ChunkFn>
void for_each_chunk(std::uint64_t total, unsigned workers, ChunkFn&& fn) {
  const std::uint64_t chunks = (total + kChunkSize - 1) / kChunkSize;
  const auto threads = static_cast<unsigned>(std::min<std::uint64_t>(resolve_workers(workers), chunks));
  if (threads <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) fn(c, c * kChunkSize, std::min(total, (c + 1) * kChunkSize));
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (auto c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
            fn(c, c * kChunkSize, std::min(total, (c + 1) * kChunkSize));
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void check_inputs(int num_layers, const UniformQoSMatrix& uniform) {
  if (num_layers < 1) throw ValidationError("number of layers must be >= 1");
  if (uniform.rows() == 0 || uniform.cols() == 0) throw ValidationError("empty QoS matrix");
  uniform.validate();
}

void check_weights(const UniformQoSMatrix& uniform, const WeightVector& weights) {
  if (weights.size() != uniform.cols()) {
    throw ValidationError("expected " + std::to_string(uniform.cols()) + " weights, got " +
                          std::to_string(weights.size()));
  }
}

}  // namespace

ColumnStats::ColumnStats(std::size_t metrics)
    : sum_of_squares(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(metrics))),
      min(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(metrics), std::numeric_limits<double>::infinity())),
      max(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(metrics), -std::numeric_limits<double>::infinity())) {}

void ColumnStats::add(std::span<const double> x) {
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    sum_of_squares(jj) += x[j] * x[j];
    min(jj) = std::min(min(jj), x[j]);
    max(jj) = std::max(max(jj), x[j]);
  }
  ++candidates;
}

void ColumnStats::merge(const ColumnStats& later) {
  sum_of_squares += later.sum_of_squares;
  min = min.cwiseMin(later.min);
  max = max.cwiseMax(later.max);
  candidates += later.candidates;
}

IdealPair ideal_pair(const ColumnStats& stats, const Eigen::VectorXd& weights, const std::vector<Direction>& directions) {
  const Eigen::VectorXd norms = stats.norms();
  const auto j_count = norms.size();
  IdealPair p{Eigen::VectorXd(j_count), Eigen::VectorXd(j_count)};
  for (Eigen::Index j = 0; j < j_count; ++j) {
    const double lo = normalize(stats.min(j), norms(j)) * weights(j);
    const double hi = normalize(stats.max(j), norms(j)) * weights(j);
    const bool cost = directions[static_cast<std::size_t>(j)] == Direction::kCost;
    p.ideal(j) = cost ? lo : hi;
    p.negative_ideal(j) = cost ? hi : lo;
  }
  return p;
}

Eigen::VectorXd weigh(const Eigen::VectorXd& estimated, const Eigen::VectorXd& norms, const Eigen::VectorXd& weights) {
  Eigen::VectorXd a(estimated.size());
  for (Eigen::Index j = 0; j < a.size(); ++j) a(j) = normalize(estimated(j), norms(j)) * weights(j);
  return a;
}

ColumnStats collect_column_stats(int num_layers, const UniformQoSMatrix& uniform, const RankOptions& options) {
  check_inputs(num_layers, uniform);
  const int m = static_cast<int>(uniform.rows());
  const std::size_t j_count = uniform.cols();
  const auto total = count_compositions(num_layers, m);
  const auto chunks = (total + kChunkSize - 1) / kChunkSize;
  std::vector<ColumnStats> partial(chunks, ColumnStats(j_count));

  for_each_chunk(total, options.workers, [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
    auto& stats = partial[c];
    std::vector<double> x(j_count);
    CompositionStream s(num_layers, m, begin);
    for (std::uint64_t k = begin; k < end; ++k, s.advance()) {
      estimate_qos_into(std::span<const int>(s.current().counts), uniform.values, std::span<double>(x));
      stats.add(x);
    }
  });

  ColumnStats stats(j_count);
  for (const auto& p : partial) stats.merge(p);
  return stats;
}

Selection select_best(int num_layers, const UniformQoSMatrix& uniform, const WeightVector& weights,
                      const RankOptions& options) {
  check_inputs(num_layers, uniform);
  check_weights(uniform, weights);
  const int m = static_cast<int>(uniform.rows());
  const std::size_t j_count = uniform.cols();
  const auto total = count_compositions(num_layers, m);

  ColumnStats stats = collect_column_stats(num_layers, uniform, options);
  const Eigen::VectorXd norms = stats.norms();
  const Eigen::VectorXd& w = weights.values();
  IdealPair ideals = ideal_pair(stats, w, uniform.registry.directions());

  struct Best {
    double score = -1.0;
    std::uint64_t index = 0;
  };
  const auto chunks = (total + kChunkSize - 1) / kChunkSize;
  std::vector<Best> partial(chunks);

  for_each_chunk(total, options.workers, [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
    Best best;
    std::vector<double> x(j_count);
    Eigen::VectorXd a(static_cast<Eigen::Index>(j_count));
    CompositionStream s(num_layers, m, begin);
    for (std::uint64_t k = begin; k < end; ++k, s.advance()) {
      estimate_qos_into(std::span<const int>(s.current().counts), uniform.values, std::span<double>(x));
      for (std::size_t j = 0; j < j_count; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        a(jj) = normalize(x[j], norms(jj)) * w(jj);
      }
      const double score = ranking_score(a, ideals.ideal, ideals.negative_ideal);
      if (score > best.score) best = {score, k};
    }
    partial[c] = best;
  });

  Best best;
  for (const auto& p : partial) {
    if (p.score > best.score) best = p;
  }

  Selection out{RankedCandidate{}, std::move(stats), std::move(ideals)};
  out.best.composition = unrank_composition(num_layers, m, best.index);
  out.best.estimated = estimate_qos(out.best.composition, uniform);
  out.best.weighted = weigh(out.best.estimated, norms, w);
  out.best.ranking_score = best.score;
  return out;
}

std::vector<RankedCandidate> rank_all(int num_layers, const UniformQoSMatrix& uniform, const WeightVector& weights,
                                      const RankOptions& options) {
  check_inputs(num_layers, uniform);
  check_weights(uniform, weights);
  const int m = static_cast<int>(uniform.rows());
  const auto total = count_compositions(num_layers, m);
  if (total > options.materialization_cap) {
    throw ValidationError(std::to_string(total) + " candidates exceed the materialization cap of " +
                          std::to_string(options.materialization_cap) + "; use select_best instead");
  }
  const ColumnStats stats = collect_column_stats(num_layers, uniform, options);
  const Eigen::VectorXd norms = stats.norms();
  const IdealPair ideals = ideal_pair(stats, weights.values(), uniform.registry.directions());

  std::vector<RankedCandidate> all;
  all.reserve(total);
  for (CompositionStream s(num_layers, m); !s.done(); s.advance()) {
    RankedCandidate r;
    r.composition = s.current();
    r.estimated = estimate_qos(r.composition, uniform);
    r.weighted = weigh(r.estimated, norms, weights.values());
    r.ranking_score = ranking_score(r.weighted, ideals.ideal, ideals.negative_ideal);
    all.push_back(std::move(r));
  }
  std::stable_sort(all.begin(), all.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
    return a.ranking_score > b.ranking_score;
  });
  return all;
}

std::string plan_report_json(const Selection& selection, const UniformQoSMatrix& uniform, const WeightVector& weights) {
  using nlohmann::json;
  const auto& reg = uniform.registry;
  const auto& best = selection.best;
  json doc;
  doc["weights"] = json::array();
  for (std::size_t j = 0; j < weights.size(); ++j) doc["weights"].push_back(weights[j]);
  doc["metrics"] = json::array();
  for (const auto& metric : reg.metrics) {
    doc["metrics"].push_back({{"name", metric.name}, {"unit", metric.unit}, {"direction", to_string(metric.direction)}});
  }
  doc["best_composition"] = json::array();
  for (std::size_t i = 0; i < reg.types.size(); ++i) {
    doc["best_composition"].push_back({{"type", reg.types[i].name}, {"count", best.composition.counts[i]}});
  }
  doc["composition_index"] = best.composition.index;
  doc["num_layers"] = best.composition.num_layers();
  doc["estimated_qos"] = json::array();
  for (std::size_t j = 0; j < reg.metrics.size(); ++j) {
    doc["estimated_qos"].push_back(
        {{"metric", reg.metrics[j].name}, {"value", best.estimated(static_cast<Eigen::Index>(j))}});
  }
  doc["ranking_score"] = best.ranking_score;
  const Eigen::VectorXd norms = selection.stats.norms();
  json stats;
  stats["candidates"] = selection.stats.candidates;
  stats["columns"] = json::array();
  for (std::size_t j = 0; j < reg.metrics.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    stats["columns"].push_back({{"metric", reg.metrics[j].name},
                                {"sum_of_squares", selection.stats.sum_of_squares(jj)},
                                {"norm", norms(jj)},
                                {"min", selection.stats.min(jj)},
                                {"max", selection.stats.max(jj)},
                                {"ideal", selection.ideals.ideal(jj)},
                                {"negative_ideal", selection.ideals.negative_ideal(jj)}});
  }
  doc["column_stats"] = stats;
  return doc.dump(2) + "\n";
}

}  // namespace mpqplan
