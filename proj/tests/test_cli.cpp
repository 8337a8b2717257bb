// Copyright 2026 The mpqplan Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "mpqplan/io.hpp"

namespace fs = std::filesystem;
using namespace mpqplan;

namespace {

const std::string kData = MPQPLAN_DATA_DIR;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("mpqplan-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::size_t file_count(const fs::path& dir) {
  std::size_t n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++n;
  return n;
}

}  // namespace

TEST_CASE("count") {
  const auto r = run({"count", "-L", "64", "-M", "5"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out == "814385\n");
  CHECK(run({"count", "-L", "12", "-M", "4", "--enumerate"}).out == "455\n");
  CHECK(run({"count", "-L", "0", "-M", "4"}).code == cli::kExitValidation);
  CHECK(run({"count", "-L", "10000", "-M", "40"}).code == cli::kExitRuntime);
}

TEST_CASE("help and usage errors") {
  const auto help = run({"--help"});
  CHECK(help.code == cli::kExitOk);
  CHECK(help.out.find("plan") != std::string::npos);
  CHECK(run({}).code == cli::kExitValidation);
  CHECK(run({"frobnicate"}).code == cli::kExitValidation);
  CHECK(run({"count", "-L", "x", "-M", "2"}).code == cli::kExitValidation);
}

TEST_CASE("score") {
  SUBCASE("synthetic trace") {
    const auto r = run({"score", "--trace", kData + "/synthetic_trace.jsonl"});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.rfind("layer,kind,reward,penalty,score\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 65);
    CHECK(r.err.empty());
  }
  SUBCASE("missing file names the path") {
    const auto r = run({"score", "--trace", "/nonexistent/trace.jsonl"});
    CHECK(r.code == cli::kExitValidation);
    CHECK(r.err.find("/nonexistent/trace.jsonl") != std::string::npos);
  }
  SUBCASE("gamma out of range") {
    CHECK(run({"score", "--trace", kData + "/synthetic_trace.jsonl", "--gamma", "1.5"}).code == cli::kExitValidation);
  }
  SUBCASE("missing layers are reported") {
    TempDir dir;
    write_file_atomic(dir.file("t.jsonl"),
                      "{\"model\": \"toy\", \"num_layers\": 3}\n"
                      "{\"prompt\": 0, \"token\": 0, \"layer\": 1, \"kind\": \"ffn\", \"sim\": 0.5}\n");
    const auto r = run({"score", "--trace", dir.file("t.jsonl"), "-o", dir.file("s.csv")});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.err.find("warning: 2 layer(s)") != std::string::npos);
    CHECK(read_file(dir.file("s.csv")).find("1,ffn,1,0,1\n") != std::string::npos);
  }
}

TEST_CASE("plan with memory-only weights assigns the smallest type everywhere") {
  TempDir dir;
  const auto r = run({"plan", "--registry", kData + "/kquants_2metric.json", "--qos", kData + "/llama31_qos.csv",
                      "--trace", kData + "/synthetic_trace.jsonl", "--weights", "1,0", "--out-dir", dir.str()});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("q3_K=64") != std::string::npos);
  const auto manifest = nlohmann::json::parse(read_file(dir.file("manifest.json")));
  CHECK(manifest["model"] == "synthetic-32-block");
  REQUIRE(manifest["layers"].size() == 64);
  for (const auto& layer : manifest["layers"]) CHECK(layer["quant"] == "q3_K");
  CHECK(manifest["avg_effective_bits"].get<double>() == doctest::Approx(3.44));
  CHECK(fs::exists(dir.file("plan.json")));
  CHECK(fs::exists(dir.file("scores.csv")));
}

TEST_CASE("plan accepts a scores file and honours naming flags") {
  TempDir dir;
  REQUIRE(run({"score", "--trace", kData + "/synthetic_trace.jsonl", "-o", dir.file("scores-in.csv")}).code == 0);
  const auto r = run({"plan", "--registry", kData + "/kquants_2metric.json", "--qos", kData + "/llama31_qos.csv",
                      "--scores", dir.file("scores-in.csv"), "--weights", "0.5,0.5", "--out-dir", dir.str(),
                      "--model", "toy", "--attn-pattern", "layers.{block}.attn", "--passthrough-type", "q6_K",
                      "--dump-candidates", "5"});
  REQUIRE(r.code == cli::kExitOk);
  const auto manifest = nlohmann::json::parse(read_file(dir.file("manifest.json")));
  CHECK(manifest["model"] == "toy");
  CHECK(manifest["layers"][2]["tensor_pattern"] == "layers.1.attn");
  CHECK(manifest["passthrough"][0]["quant"] == "q6_K");
  const auto candidates = read_file(dir.file("candidates.csv"));
  CHECK(std::count(candidates.begin(), candidates.end(), '\n') == 6);
}

TEST_CASE("plan argument errors") {
  const std::vector<std::string> base = {"plan", "--registry", kData + "/kquants_2metric.json", "--qos",
                                         kData + "/llama31_qos.csv"};
  auto with = [&](std::vector<std::string> extra) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return run(args);
  };
  const std::string trace = kData + "/synthetic_trace.jsonl";
  CHECK(with({"--trace", trace}).code == cli::kExitValidation);
  CHECK(with({"--weights", "1,0"}).code == cli::kExitValidation);
  CHECK(with({"--trace", trace, "--weights", "1,0,0"}).code == cli::kExitValidation);
  CHECK(with({"--trace", trace, "--weights", "0,0"}).code == cli::kExitValidation);
  CHECK(with({"--trace", trace, "--suite"}).code == cli::kExitValidation);
  const auto bad_qos = run({"plan", "--registry", kData + "/kquants_3metric.json", "--qos", kData + "/llama31_qos.csv",
                            "--trace", trace, "--weights", "1,0,0"});
  CHECK(bad_qos.code == cli::kExitValidation);
  CHECK(bad_qos.err.find("qos:") != std::string::npos);
}

TEST_CASE("failed plan leaves no partial outputs") {
  TempDir dir;
  const auto r = run({"plan", "--registry", kData + "/kquants_2metric.json", "--qos", kData + "/llama31_qos.csv",
                      "--trace", kData + "/synthetic_trace.jsonl", "--weights", "0.5,0.5", "--out-dir", dir.str(),
                      "--passthrough-type", "q2_K"});
  CHECK(r.code == cli::kExitValidation);
  CHECK(r.err.find("manifest:") != std::string::npos);
  CHECK(file_count(dir.path()) == 0);
}

TEST_CASE("plan output is byte-identical across runs and worker counts") {
  TempDir a, b;
  const std::vector<std::string> common = {"plan", "--registry", kData + "/kquants_3metric.json", "--qos",
                                           kData + "/synthetic_qos.csv", "--trace", kData + "/synthetic_trace.jsonl",
                                           "--weights", "0.2,0.5,0.3"};
  auto args_a = common;
  args_a.insert(args_a.end(), {"--out-dir", a.str(), "--workers", "1"});
  auto args_b = common;
  args_b.insert(args_b.end(), {"--out-dir", b.str(), "--workers", "4"});
  const auto ra = run(args_a);
  const auto rb = run(args_b);
  REQUIRE(ra.code == 0);
  REQUIRE(rb.code == 0);
  CHECK(ra.out == rb.out);
  for (const char* f : {"plan.json", "manifest.json", "scores.csv"}) {
    CHECK(read_file(a.file(f)) == read_file(b.file(f)));
  }
}

TEST_CASE("plan over the weight suite") {
  TempDir dir;
  const auto r = run({"plan", "--registry", kData + "/kquants_3metric.json", "--qos", kData + "/synthetic_qos.csv",
                      "--trace", kData + "/synthetic_trace.jsonl", "--suite", "--out-dir", dir.str()});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 28);
  CHECK(fs::exists(dir.file("plan-fairness-all.json")));
  CHECK(fs::exists(dir.file("manifest-accuracy-dominant.json")));
  CHECK(fs::exists(dir.file("suite.json")));
  // 28 plans, 28 manifests, scores, suite and estimated points.
  CHECK(file_count(dir.path()) == 59);
  const auto points = read_file(dir.file("estimated_points.csv"));
  CHECK(points.rfind("label,provenance,memory,latency,perplexity\n", 0) == 0);
  CHECK(std::count(points.begin(), points.end(), '\n') == 29);

  // The estimated points feed straight into eval.
  const auto e = run({"eval", "--baseline", kData + "/synthetic_points.csv", "--candidates",
                      dir.file("estimated_points.csv"), "--out-dir", dir.str()});
  CHECK(e.code == cli::kExitOk);
}

TEST_CASE("plan honours the output directory variable") {
  TempDir dir;
  ::setenv("MPQPLAN_OUT_DIR", dir.str().c_str(), 1);
  const auto r = run({"plan", "--registry", kData + "/kquants_2metric.json", "--qos", kData + "/llama31_qos.csv",
                      "--trace", kData + "/synthetic_trace.jsonl", "--weights", "0.5,0.5"});
  ::unsetenv("MPQPLAN_OUT_DIR");
  CHECK(r.code == cli::kExitOk);
  CHECK(fs::exists(dir.file("manifest.json")));
}

TEST_CASE("eval") {
  TempDir dir;
  SUBCASE("baseline alone has zero gain") {
    const auto r = run({"eval", "--baseline", kData + "/llama31_uniform_points.csv", "--out-dir", dir.str()});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(r.out.find("reference: 8 232\n") != std::string::npos);
    CHECK(r.out.find("hv gain 0 (normalized 0)") != std::string::npos);
    const auto report = nlohmann::json::parse(read_file(dir.file("eval.json")));
    CHECK(report["hv_gain"].get<double>() == 0.0);
    CHECK(report["points"].size() == 10);
    CHECK(read_file(dir.file("front.csv")).rfind("label,set,provenance,memory,latency,on_front\n", 0) == 0);
  }
  SUBCASE("dominated candidates do not gain") {
    write_file_atomic(dir.file("cand.csv"), "label,provenance,memory,latency\nx,estimated,7,200\ny,estimated,9,100\n");
    const auto r = run({"eval", "--baseline", kData + "/llama31_uniform_points.csv", "--candidates",
                        dir.file("cand.csv"), "--out-dir", dir.str()});
    REQUIRE(r.code == cli::kExitOk);
    const auto report = nlohmann::json::parse(read_file(dir.file("eval.json")));
    CHECK(report["hv_gain"].get<double>() <= 0.0);
    CHECK(report["candidates"]["clipped_points"] == 1);
    CHECK(r.out.find("warning: 1 candidate point(s)") != std::string::npos);
  }
  SUBCASE("benefit metric names must exist") {
    CHECK(run({"eval", "--baseline", kData + "/llama31_uniform_points.csv", "--benefit", "bleu", "--out-dir",
               dir.str()})
              .code == cli::kExitValidation);
  }
}

TEST_CASE("suite") {
  const auto r = run({"suite"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(nlohmann::json::parse(r.out).size() == 28);
  const auto compat = run({"suite", "--compat-residual"});
  CHECK(compat.out.find("0.15") == std::string::npos);

  TempDir dir;
  std::string csv = "label,provenance,memory,latency,perplexity\n";
  for (const auto& m : nlohmann::json::parse(r.out)) {
    csv += m["label"].get<std::string>() + ",measured,4,100,7.5\n";
  }
  write_file_atomic(dir.file("results.csv"), csv);
  const auto report = run({"suite", "--report", dir.file("results.csv"), "--baseline", kData + "/synthetic_points.csv",
                           "--registry", kData + "/kquants_3metric.json"});
  REQUIRE(report.code == cli::kExitOk);
  CHECK(report.out.rfind("category,memory,latency,perplexity\n", 0) == 0);
  CHECK(report.out.find("Uniform,") != std::string::npos);

  write_file_atomic(dir.file("short.csv"), "label,provenance,memory,latency,perplexity\nfairness-all,measured,1,1,1\n");
  CHECK(run({"suite", "--report", dir.file("short.csv")}).code == cli::kExitValidation);
}
