// Copyright 2026 The mpqplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mpqplan/registry.hpp"

namespace mpqplan {

/// A distribution of L layers over M types: counts[i] layers use type i.
/// `index` is the position in the lexicographic enumeration of all such vectors.
struct Composition {
  std::vector<int> counts;
  std::uint64_t index = 0;

  int num_layers() const;
  bool operator==(const Composition&) const = default;
};

/// Number of weak compositions of L into M parts, binomial(L+M-1, M-1).
/// Exact; throws RuntimeError if the result does not fit in 64 bits.
std::uint64_t count_compositions(int num_layers, int num_types);

/// Composition at lexicographic position `index`. Throws ValidationError if out of range.
Composition unrank_composition(int num_layers, int num_types, std::uint64_t index);

/// Lexicographic position of `counts` (inverse of unrank_composition).
std::uint64_t rank_composition(std::span<const int> counts);

/// Streams weak compositions in lexicographic order, (0,..,0,L) first and
/// (L,0,..,0) last. Holds one composition at a time.
class CompositionStream {
 public:
  CompositionStream(int num_layers, int num_types);
  /// Starts at position `first`.
  CompositionStream(int num_layers, int num_types, std::uint64_t first);

  bool done() const { return done_; }
  const Composition& current() const { return current_; }
  void advance();

 private:
  Composition current_;
  bool done_ = false;
};

/// Steps `counts` to its lexicographic successor in place; returns false after the last one.
bool next_composition(std::span<int> counts);

/// Linear mixing of uniform-type QoS: out[j] = sum_i (counts[i]/L) * C(i, j),
/// accumulated in i-ascending order.
template <typename Derived>
void estimate_qos_into(std::span<const int> counts, const Eigen::MatrixBase<Derived>& uniform,
                       std::span<typename Derived::Scalar> out) {
  using Scalar = typename Derived::Scalar;
  int total = 0;
  for (int c : counts) total += c;
  const Scalar layers = static_cast<Scalar>(total);
  for (auto& v : out) v = Scalar(0);
  for (Eigen::Index i = 0; i < uniform.rows(); ++i) {
    const int c = counts[static_cast<std::size_t>(i)];
    if (c == 0) continue;
    const Scalar share = static_cast<Scalar>(c) / layers;
    for (Eigen::Index j = 0; j < uniform.cols(); ++j) {
      out[static_cast<std::size_t>(j)] += share * uniform(i, j);
    }
  }
}

/// Estimated QoS vector of one composition. Throws ValidationError on a shape mismatch.
Eigen::VectorXd estimate_qos(const Composition& composition, const UniformQoSMatrix& uniform);

/// Debug dump `k,z_1..z_M,x_1..x_J` of the first `limit` candidates.
std::string compositions_to_csv(int num_layers, const UniformQoSMatrix& uniform, std::uint64_t limit);

}  // namespace mpqplan
