// Copyright 2026 The mpqplan Authors
// SPDX-License-Identifier: Apache-2.0

#include "mpqplan/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "mpqplan/error.hpp"
#include "mpqplan/io.hpp"

namespace mpqplan {

namespace {

void check_dims(const Eigen::VectorXd& p, const Eigen::VectorXd& q, const std::vector<Direction>& directions) {
  if (p.size() != q.size() || static_cast<std::size_t>(p.size()) != directions.size()) {
    throw ValidationError("dimension mismatch between points and metric directions");
  }
}

// Flips benefit coordinates so that smaller is better everywhere.
Eigen::VectorXd to_minimization(const Eigen::VectorXd& v, const std::vector<Direction>& directions) {
  Eigen::VectorXd out = v;
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    if (directions[static_cast<std::size_t>(j)] == Direction::kBenefit) out(j) = -out(j);
  }
  return out;
}

double area_2d(std::vector<std::pair<double, double>> pts, double ref_x, double ref_y) {
  std::sort(pts.begin(), pts.end());
  double area = 0.0;
  double floor_y = ref_y;
  for (const auto& [x, y] : pts) {
    if (y < floor_y) {
      area += (ref_x - x) * (floor_y - y);
      floor_y = y;
    }
  }
  return area;
}

}  // namespace

const char* to_string(Provenance provenance) {
  return provenance == Provenance::kMeasured ? "measured" : "estimated";
}

Provenance provenance_from_string(const std::string& text) {
  if (text == "measured") return Provenance::kMeasured;
  if (text == "estimated") return Provenance::kEstimated;
  throw ValidationError("unknown provenance '" + text + "' (expected measured or estimated)");
}

bool dominates(const Eigen::VectorXd& p, const Eigen::VectorXd& q, const std::vector<Direction>& directions) {
  check_dims(p, q, directions);
  bool strictly_better = false;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const bool cost = directions[static_cast<std::size_t>(j)] == Direction::kCost;
    const double a = cost ? p(j) : -p(j);
    const double b = cost ? q(j) : -q(j);
    if (a > b) return false;
    if (a < b) strictly_better = true;
  }
  return strictly_better;
}

bool dominates(const SolutionPoint& p, const SolutionPoint& q, const std::vector<Direction>& directions) {
  return dominates(p.values, q.values, directions);
}

std::vector<SolutionPoint> pareto_filter(const std::vector<SolutionPoint>& points,
                                         const std::vector<Direction>& directions) {
  std::vector<SolutionPoint> front;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool keep = true;
    for (std::size_t k = 0; k < points.size() && keep; ++k) {
      if (k == i) continue;
      if (dominates(points[k], points[i], directions)) keep = false;
      // Repeats survive only at their first position.
      if (k < i && points[k].values == points[i].values) keep = false;
    }
    if (keep) front.push_back(points[i]);
  }
  return front;
}

double hypervolume_min(const Eigen::MatrixXd& points, const Eigen::VectorXd& reference) {
  const auto dims = reference.size();
  if (dims < 1 || dims > 3) throw ValidationError("hypervolume supports 1 to 3 metrics, got " + std::to_string(dims));
  if (points.cols() != dims) throw ValidationError("hypervolume: dimension mismatch");

  std::vector<Eigen::Index> inside;
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    if ((points.row(r).transpose().array() < reference.array()).all()) inside.push_back(r);
  }
  // Dominated and repeated points would only split slabs; dropping them keeps the sum order fixed.
  std::vector<Eigen::Index> kept;
  for (std::size_t a = 0; a < inside.size(); ++a) {
    bool drop = false;
    for (std::size_t b = 0; b < inside.size() && !drop; ++b) {
      if (a == b) continue;
      const auto pa = points.row(inside[a]).array();
      const auto pb = points.row(inside[b]).array();
      if ((pb <= pa).all() && ((pb < pa).any() || b < a)) drop = true;
    }
    if (!drop) kept.push_back(inside[a]);
  }
  inside = std::move(kept);
  if (inside.empty()) return 0.0;

  if (dims == 1) {
    double best = reference(0);
    for (auto r : inside) best = std::min(best, points(r, 0));
    return reference(0) - best;
  }
  if (dims == 2) {
    std::vector<std::pair<double, double>> pts;
    for (auto r : inside) pts.emplace_back(points(r, 0), points(r, 1));
    return area_2d(std::move(pts), reference(0), reference(1));
  }
  // Sweep along the third coordinate; each slab adds the 2-D area of the points below it.
  std::sort(inside.begin(), inside.end(), [&](Eigen::Index a, Eigen::Index b) { return points(a, 2) < points(b, 2); });
  double volume = 0.0;
  std::vector<std::pair<double, double>> active;
  for (std::size_t i = 0; i < inside.size(); ++i) {
    const auto r = inside[i];
    active.emplace_back(points(r, 0), points(r, 1));
    const double top = i + 1 < inside.size() ? points(inside[i + 1], 2) : reference(2);
    const double height = top - points(r, 2);
    if (height > 0.0) volume += area_2d(active, reference(0), reference(1)) * height;
  }
  return volume;
}

HVResult hypervolume(const std::vector<SolutionPoint>& points, const Eigen::VectorXd& reference,
                     const std::vector<Direction>& directions) {
  if (static_cast<std::size_t>(reference.size()) != directions.size()) {
    throw ValidationError("hypervolume: reference has the wrong dimension");
  }
  if (reference.size() > 3) throw ValidationError("hypervolume supports at most 3 metrics");
  HVResult out;
  out.reference = reference;
  const Eigen::VectorXd ref = to_minimization(reference, directions);
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(points.size()), reference.size());
  Eigen::Index n = 0;
  for (const auto& p : points) {
    if (p.values.size() != reference.size()) throw ValidationError("hypervolume: point '" + p.label + "' has the wrong dimension");
    const Eigen::VectorXd v = to_minimization(p.values, directions);
    if ((v.array() > ref.array()).any()) {
      ++out.clipped_points;
      continue;
    }
    if ((v.array() < ref.array()).all()) ++out.contributing_points;
    rows.row(n++) = v.transpose();
  }
  out.hypervolume = hypervolume_min(rows.topRows(n), ref);
  return out;
}

HVResult normalized_hypervolume(const std::vector<SolutionPoint>& points, const Eigen::VectorXd& reference,
                                const std::vector<Direction>& directions) {
  if ((reference.array() <= 0.0).any()) {
    throw ValidationError("normalized hypervolume needs a strictly positive reference point");
  }
  std::vector<SolutionPoint> scaled = points;
  for (auto& p : scaled) {
    if (p.values.size() != reference.size()) throw ValidationError("hypervolume: point '" + p.label + "' has the wrong dimension");
    p.values = p.values.cwiseQuotient(reference);
  }
  HVResult out = hypervolume(scaled, Eigen::VectorXd::Ones(reference.size()), directions);
  out.reference = reference;
  return out;
}

double hv_gain(double hv_candidate, double hv_baseline) {
  if (!(hv_baseline > 0.0)) throw ValidationError("hv_gain: baseline hypervolume must be positive");
  return (hv_candidate - hv_baseline) / hv_baseline;
}

Eigen::VectorXd reference_from_baseline(const std::vector<SolutionPoint>& baseline,
                                        const std::vector<Direction>& directions) {
  if (baseline.empty()) throw ValidationError("reference point: empty baseline");
  Eigen::VectorXd ref = baseline.front().values;
  if (static_cast<std::size_t>(ref.size()) != directions.size()) throw ValidationError("reference point: dimension mismatch");
  for (const auto& p : baseline) {
    if (p.values.size() != ref.size()) throw ValidationError("reference point: dimension mismatch");
    for (Eigen::Index j = 0; j < ref.size(); ++j) {
      ref(j) = directions[static_cast<std::size_t>(j)] == Direction::kCost ? std::max(ref(j), p.values(j))
                                                                          : std::min(ref(j), p.values(j));
    }
  }
  return ref;
}

PointSet parse_points_csv(const std::string& csv_text) {
  PointSet set;
  std::istringstream in(csv_text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    const auto where = "points line " + std::to_string(line_no) + ": ";
    if (!have_header) {
      if (fields.size() < 3 || fields[0] != "label" || fields[1] != "provenance") {
        throw ValidationError(where + "header must be label,provenance,<metric>...");
      }
      set.metric_names.assign(fields.begin() + 2, fields.end());
      have_header = true;
      continue;
    }
    if (fields.size() != set.metric_names.size() + 2) throw ValidationError(where + "wrong number of fields");
    SolutionPoint p;
    p.label = fields[0];
    try {
      p.provenance = provenance_from_string(fields[1]);
      p.values.resize(static_cast<Eigen::Index>(set.metric_names.size()));
      for (std::size_t j = 0; j < set.metric_names.size(); ++j) {
        const double v = parse_real(fields[j + 2]);
        if (!std::isfinite(v)) throw ValidationError("non-finite value");
        p.values(static_cast<Eigen::Index>(j)) = v;
      }
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
    set.points.push_back(std::move(p));
  }
  if (!have_header) throw ValidationError("points: empty file");
  return set;
}

PointSet load_points(const std::filesystem::path& path) {
  try {
    return parse_points_csv(read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string points_to_csv(const PointSet& set) {
  std::string out = "label,provenance";
  for (const auto& m : set.metric_names) out += "," + m;
  out += "\n";
  for (const auto& p : set.points) {
    out += p.label + "," + to_string(p.provenance);
    for (Eigen::Index j = 0; j < p.values.size(); ++j) out += "," + format_real(p.values(j));
    out += "\n";
  }
  return out;
}

EvalReport evaluate_sets(const PointSet& baseline, const PointSet& candidates, const std::vector<Direction>& directions) {
  if (baseline.metric_names != candidates.metric_names) {
    throw ValidationError("baseline and candidate files have different metric columns");
  }
  if (baseline.metric_names.size() != directions.size()) {
    throw ValidationError("expected " + std::to_string(directions.size()) + " metric columns, found " +
                          std::to_string(baseline.metric_names.size()));
  }
  EvalReport r;
  r.metric_names = baseline.metric_names;
  r.reference = reference_from_baseline(baseline.points, directions);
  r.baseline_raw = hypervolume(baseline.points, r.reference, directions);
  r.candidate_raw = hypervolume(candidates.points, r.reference, directions);
  r.gain_raw = hv_gain(r.candidate_raw.hypervolume, r.baseline_raw.hypervolume);
  r.baseline_normalized = normalized_hypervolume(baseline.points, r.reference, directions);
  r.candidate_normalized = normalized_hypervolume(candidates.points, r.reference, directions);
  r.gain_normalized = hv_gain(r.candidate_normalized.hypervolume, r.baseline_normalized.hypervolume);

  r.baseline_count = baseline.points.size();
  std::vector<SolutionPoint> all = baseline.points;
  all.insert(all.end(), candidates.points.begin(), candidates.points.end());
  for (std::size_t i = 0; i < all.size(); ++i) {
    bool on_front = true;
    for (std::size_t k = 0; k < all.size() && on_front; ++k) {
      if (k != i && dominates(all[k], all[i], directions)) on_front = false;
    }
    r.membership.emplace_back(all[i], on_front);
  }
  return r;
}

std::string eval_report_json(const EvalReport& report) {
  using nlohmann::json;
  auto hv = [](const HVResult& raw, const HVResult& norm) {
    return json{{"hv", raw.hypervolume},
                {"hv_normalized", norm.hypervolume},
                {"contributing_points", raw.contributing_points},
                {"clipped_points", raw.clipped_points}};
  };
  json doc;
  doc["metrics"] = report.metric_names;
  doc["reference"] = std::vector<double>(report.reference.data(), report.reference.data() + report.reference.size());
  doc["baseline"] = hv(report.baseline_raw, report.baseline_normalized);
  doc["candidates"] = hv(report.candidate_raw, report.candidate_normalized);
  doc["hv_gain"] = report.gain_raw;
  doc["hv_gain_normalized"] = report.gain_normalized;
  doc["points"] = json::array();
  for (std::size_t i = 0; i < report.membership.size(); ++i) {
    const auto& [p, on_front] = report.membership[i];
    doc["points"].push_back({{"label", p.label},
                             {"set", i < report.baseline_count ? "baseline" : "candidate"},
                             {"provenance", to_string(p.provenance)},
                             {"values", std::vector<double>(p.values.data(), p.values.data() + p.values.size())},
                             {"on_front", on_front}});
  }
  return doc.dump(2) + "\n";
}

std::string front_to_csv(const EvalReport& report) {
  std::string out = "label,set,provenance";
  for (const auto& m : report.metric_names) out += "," + m;
  out += ",on_front\n";
  for (std::size_t i = 0; i < report.membership.size(); ++i) {
    const auto& [p, on_front] = report.membership[i];
    out += p.label + (i < report.baseline_count ? ",baseline," : ",candidate,") + to_string(p.provenance);
    for (Eigen::Index j = 0; j < p.values.size(); ++j) out += "," + format_real(p.values(j));
    out += on_front ? ",1\n" : ",0\n";
  }
  return out;
}

}  // namespace mpqplan
