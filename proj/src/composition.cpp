// Copyright 2026 The mpqplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "mpqplan/composition.hpp"

#include <limits>
#include <numeric>

#include "mpqplan/error.hpp"
#include "mpqplan/io.hpp"

namespace mpqplan {

namespace {

// binomial(total + parts - 1, parts - 1); total may be zero.
std::uint64_t weak_compositions(int total, int parts) {
  const unsigned __int128 n = static_cast<unsigned>(total + parts - 1);
  unsigned __int128 k = static_cast<unsigned>(parts - 1);
  if (k > n - k) k = n - k;
  unsigned __int128 result = 1;
  for (unsigned __int128 i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max()) {
      throw RuntimeError("composition count for L=" + std::to_string(total) + ", M=" + std::to_string(parts) +
                         " exceeds 64 bits");
    }
  }
  return static_cast<std::uint64_t>(result);
}

void check_shape(int num_layers, int num_types) {
  if (num_layers < 1) throw ValidationError("number of layers must be >= 1");
  if (num_types < 1) throw ValidationError("number of types must be >= 1");
}

}  // namespace

int Composition::num_layers() const { return std::accumulate(counts.begin(), counts.end(), 0); }

std::uint64_t count_compositions(int num_layers, int num_types) {
  check_shape(num_layers, num_types);
  return weak_compositions(num_layers, num_types);
}

Composition unrank_composition(int num_layers, int num_types, std::uint64_t index) {
  if (index >= count_compositions(num_layers, num_types)) {
    throw ValidationError("composition index " + std::to_string(index) + " out of range");
  }
  Composition c;
  c.index = index;
  c.counts.assign(static_cast<std::size_t>(num_types), 0);
  int remaining = num_layers;
  for (int i = 0; i + 1 < num_types; ++i) {
    const int parts_after = num_types - i - 1;
    for (int v = 0; v <= remaining; ++v) {
      const auto block = weak_compositions(remaining - v, parts_after);
      if (index < block) {
        c.counts[static_cast<std::size_t>(i)] = v;
        remaining -= v;
        break;
      }
      index -= block;
    }
  }
  c.counts.back() = remaining;
  return c;
}

std::uint64_t rank_composition(std::span<const int> counts) {
  if (counts.empty()) throw ValidationError("rank_composition: empty composition");
  int remaining = 0;
  for (int c : counts) {
    if (c < 0) throw ValidationError("rank_composition: negative count");
    remaining += c;
  }
  const int m = static_cast<int>(counts.size());
  std::uint64_t index = 0;
  for (int i = 0; i + 1 < m; ++i) {
    const int parts_after = m - i - 1;
    for (int v = 0; v < counts[static_cast<std::size_t>(i)]; ++v) index += weak_compositions(remaining - v, parts_after);
    remaining -= counts[static_cast<std::size_t>(i)];
  }
  return index;
}

bool next_composition(std::span<int> counts) {
  // The successor raises the entry just before the last non-zero one and moves
  // everything after it, minus one, into the final slot.
  std::size_t last = counts.size();
  for (std::size_t i = counts.size(); i-- > 0;) {
    if (counts[i] != 0) {
      last = i;
      break;
    }
  }
  if (last == 0 || last == counts.size()) return false;
  const int moved = counts[last];
  counts[last] = 0;
  ++counts[last - 1];
  counts.back() = moved - 1;
  return true;
}

CompositionStream::CompositionStream(int num_layers, int num_types) : CompositionStream(num_layers, num_types, 0) {}

CompositionStream::CompositionStream(int num_layers, int num_types, std::uint64_t first)
    : current_(unrank_composition(num_layers, num_types, first)) {}

void CompositionStream::advance() {
  if (done_) return;
  if (next_composition(current_.counts)) {
    ++current_.index;
  } else {
    done_ = true;
  }
}

Eigen::VectorXd estimate_qos(const Composition& composition, const UniformQoSMatrix& uniform) {
  if (composition.counts.size() != uniform.rows()) {
    throw ValidationError("estimate_qos: composition has " + std::to_string(composition.counts.size()) +
                          " entries, matrix has " + std::to_string(uniform.rows()) + " types");
  }
  if (composition.num_layers() <= 0) throw ValidationError("estimate_qos: empty composition");
  Eigen::VectorXd x(uniform.values.cols());
  estimate_qos_into(std::span<const int>(composition.counts), uniform.values, std::span<double>(x.data(), x.size()));
  return x;
}

std::string compositions_to_csv(int num_layers, const UniformQoSMatrix& uniform, std::uint64_t limit) {
  std::string out = "k";
  for (std::size_t i = 0; i < uniform.rows(); ++i) out += ",z_" + std::to_string(i + 1);
  for (std::size_t j = 0; j < uniform.cols(); ++j) out += ",x_" + std::to_string(j + 1);
  out += "\n";
  Eigen::VectorXd x(uniform.values.cols());
  for (CompositionStream s(num_layers, static_cast<int>(uniform.rows())); !s.done() && s.current().index < limit;
       s.advance()) {
    const auto& c = s.current();
    estimate_qos_into(std::span<const int>(c.counts), uniform.values, std::span<double>(x.data(), x.size()));
    out += std::to_string(c.index);
    for (int z : c.counts) out += "," + std::to_string(z);
    for (Eigen::Index j = 0; j < x.size(); ++j) out += "," + format_real(x(j));
    out += "\n";
  }
  return out;
}

}  // namespace mpqplan
