// Copyright 2026 The mpqplan Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "mpqplan/trace.hpp"
#include "oracles.hpp"

using namespace mpqplan;

TEST_CASE("cosine_similarity examples") {
  Eigen::Vector2d a(1, 0), b(0, 1), c(3, 4), d(4, 3);
  CHECK(cosine_similarity(a, a) == 1.0);
  CHECK(cosine_similarity(a, b) == 0.0);
  CHECK(cosine_similarity(c, d) == doctest::Approx(0.96).epsilon(1e-15));
  CHECK(cosine_similarity(a, Eigen::Vector2d(-2, 0)) == -1.0);
}

TEST_CASE("cosine_similarity errors") {
  CHECK_THROWS_AS(cosine_similarity(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)), ValidationError);
  CHECK_THROWS_AS(cosine_similarity(Eigen::Vector2d(1, 0), Eigen::Vector3d(1, 0, 0)), ValidationError);
}

TEST_CASE("cosine_similarity works on float vectors and expressions") {
  Eigen::Vector3f u(1.f, 2.f, 3.f);
  CHECK(cosine_similarity(u, 2.f * u) == doctest::Approx(1.0));
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
  CHECK(cosine_similarity(m.col(0), m.col(1)) == 0.0);
}

TEST_CASE("cosine properties: symmetry, scale invariance, permutation stability") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 64;
    Eigen::VectorXd u(n), v(n);
    for (int i = 0; i < n; ++i) {
      u(i) = g(rng);
      v(i) = g(rng);
    }
    const double base = cosine_similarity(u, v);
    CHECK(base >= -1.0);
    CHECK(base <= 1.0);
    CHECK(cosine_similarity(v, u) == base);
    const double alpha = scale(rng);
    CHECK(std::abs(cosine_similarity(u, alpha * v) - base) < 1e-12);

    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::VectorXd pu(n), pv(n);
    for (int i = 0; i < n; ++i) {
      pu(i) = u(perm[static_cast<std::size_t>(i)]);
      pv(i) = v(perm[static_cast<std::size_t>(i)]);
    }
    CHECK(std::abs(cosine_similarity(pu, pv) - base) < 1e-12);
  }
}

TEST_CASE("boundary_similarities") {
  SUBCASE("identical before and after") {
    std::vector<BoundaryState> states;
    for (int l = 0; l < 4; ++l) {
      Eigen::VectorXd h = Eigen::VectorXd::LinSpaced(5, 1.0, 5.0 + l);
      states.push_back({0, 0, l, default_kind(l), h, h});
    }
    for (const auto& o : boundary_similarities(states)) CHECK(o.similarity == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("orthogonal boundary") {
    std::vector<BoundaryState> states = {{2, 7, 3, SublayerKind::kFfn, Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)}};
    const auto obs = boundary_similarities(states);
    REQUIRE(obs.size() == 1);
    CHECK(obs[0] == SimilarityObservation{2, 7, 3, SublayerKind::kFfn, 0.0});
  }
  SUBCASE("matches a scalar-loop oracle on random 8-dim vectors") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<BoundaryState> states;
    std::vector<double> expected;
    for (int k = 0; k < 200; ++k) {
      std::vector<double> u(8), v(8);
      for (auto& x : u) x = g(rng);
      for (auto& x : v) x = g(rng);
      states.push_back({k / 50, k % 50, k % 8, default_kind(k % 8), Eigen::Map<Eigen::VectorXd>(u.data(), 8),
                        Eigen::Map<Eigen::VectorXd>(v.data(), 8)});
      expected.push_back(oracle::scalar_cosine(u, v));
    }
    const auto obs = boundary_similarities(states);
    for (std::size_t k = 0; k < obs.size(); ++k) CHECK(std::abs(obs[k].similarity - expected[k]) < 1e-12);
  }
  SUBCASE("zero vector reports its location") {
    std::vector<BoundaryState> states = {{1, 4, 9, SublayerKind::kFfn, Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 1)}};
    try {
      boundary_similarities(states);
      FAIL("expected an error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("layer 9") != std::string::npos);
    }
  }
}

TEST_CASE("parse_trace") {
  SUBCASE("header and two observations") {
    const auto t = parse_trace(
        "{\"model\": \"toy\", \"num_layers\": 4}\n"
        "{\"prompt\": 0, \"token\": 0, \"layer\": 0, \"kind\": \"attention\", \"sim\": 0.95}\n"
        "{\"prompt\": 0, \"token\": 0, \"layer\": 1, \"kind\": \"ffn\", \"sim\": -0.2}\n");
    CHECK(t.model_name == "toy");
    CHECK(t.num_layers == 4);
    REQUIRE(t.observations.size() == 2);
    CHECK(t.observations[1] == SimilarityObservation{0, 0, 1, SublayerKind::kFfn, -0.2});
    CHECK(t.missing_layers() == std::vector<int>{2, 3});
  }
  SUBCASE("empty observation list is valid") {
    const auto t = parse_trace("{\"model\": \"toy\", \"num_layers\": 2}\n");
    CHECK(t.observations.empty());
    CHECK(t.missing_layers() == std::vector<int>{0, 1});
  }
  SUBCASE("similarity out of range names the line") {
    try {
      parse_trace("{\"model\": \"toy\", \"num_layers\": 2}\n"
                  "{\"prompt\": 0, \"token\": 0, \"layer\": 0, \"kind\": \"attention\", \"sim\": 0.5}\n"
                  "{\"prompt\": 0, \"token\": 0, \"layer\": 1, \"kind\": \"ffn\", \"sim\": 1.2}\n");
      FAIL("expected an error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  SUBCASE("malformed lines") {
    const std::string header = "{\"model\": \"toy\", \"num_layers\": 2}\n";
    CHECK_THROWS_AS(parse_trace(header + "{not json\n"), ValidationError);
    CHECK_THROWS_AS(parse_trace(header + "{\"prompt\": 0, \"token\": 0, \"layer\": 2, \"kind\": \"ffn\", \"sim\": 0.5}\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_trace(header + "{\"prompt\": 0, \"token\": 0, \"layer\": 1, \"kind\": \"mlp\", \"sim\": 0.5}\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_trace(header + "{\"prompt\": 0, \"token\": -1, \"layer\": 1, \"kind\": \"ffn\", \"sim\": 0.5}\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_trace(header + "{\"prompt\": 0, \"layer\": 1, \"kind\": \"ffn\", \"sim\": 0.5}\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_trace(""), ValidationError);
    CHECK_THROWS_AS(parse_trace("{\"model\": \"toy\", \"num_layers\": 0}\n"), ValidationError);
  }
  SUBCASE("a layer keeps one kind") {
    CHECK_THROWS_AS(parse_trace("{\"model\": \"toy\", \"num_layers\": 2}\n"
                                "{\"prompt\": 0, \"token\": 0, \"layer\": 0, \"kind\": \"attention\", \"sim\": 0.5}\n"
                                "{\"prompt\": 0, \"token\": 1, \"layer\": 0, \"kind\": \"ffn\", \"sim\": 0.5}\n"),
                    ValidationError);
  }
}

TEST_CASE("trace serialization round trip") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> sim(-1.0, 1.0);
  TraceFile t{"m", 6, {}};
  for (int k = 0; k < 300; ++k) {
    const int l = k % 6;
    t.observations.push_back({k / 60, k % 60, l, default_kind(l), sim(rng)});
  }
  const auto back = parse_trace(trace_to_jsonl(t));
  CHECK(back.model_name == t.model_name);
  CHECK(back.num_layers == t.num_layers);
  CHECK(back.observations == t.observations);
}
