#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "blink/json_format.hpp"

namespace fs = std::filesystem;

namespace {

struct Workdir {
  fs::path dir;
  Workdir() {
    dir = fs::temp_directory_path() / ("blinkctl_test_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

// Runs blinkctl with stdout/stderr captured next to the work files.
int run(const Workdir& w, const std::string& args) {
  const std::string cmd = std::string(BLINKCTL_PATH) + " " + args + " >" + w("stdout") + " 2>" + w("stderr");
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

double mean_accuracy(const std::string& report_path) {
  return blink::parse_json(slurp(report_path), "report")["mean_accuracy"].get<double>();
}

// Synthesizes and extracts n alert and n drowsy videos, returning the
// feature CSV paths.
std::vector<std::string> make_corpus(const Workdir& w, int n) {
  std::vector<std::string> out;
  for (int label = 0; label < 2; ++label) {
    for (int v = 0; v < n; ++v) {
      const std::string id = std::string(label ? "drowsy" : "alert") + std::to_string(v);
      const std::string onset = label ? " --drowsy-onset-s 120" : "";
      REQUIRE(run(w, "synth --out " + w(id + ".csv") + " --noise-sd 0.01 --seed " +
                         std::to_string(500 + 37 * v + 1000 * label) + onset) == 0);
      REQUIRE(run(w, "extract --input " + w(id + ".csv") + " --video-id " + id + " --label " +
                         std::to_string(label) + " --features " + w(id + ".features.csv")) == 0);
      out.push_back(w(id + ".features.csv"));
    }
  }
  return out;
}

std::string joined(const std::vector<std::string>& paths) {
  std::string s;
  for (const auto& p : paths) s += " " + p;
  return s;
}

}  // namespace

TEST_CASE("usage errors") {
  Workdir w;
  CHECK(run(w, "--help") == 0);
  CHECK(run(w, "") == 2);
  CHECK(run(w, "extract") == 2);
  CHECK(run(w, "extract --input " + w("missing.csv")) == 2);
  CHECK(run(w, "train --features x.csv --model m.json --algorithm xgboost") == 2);
}

TEST_CASE("constant EAR cannot calibrate") {
  Workdir w;
  std::string csv = "frame,t_ms,ear\n";
  for (int i = 0; i < 4000; ++i) csv += std::to_string(i) + "," + blink::format_double(i * 1000.0 / 30.0) + ",0.5\n";
  spit(w("flat.csv"), csv);
  CHECK(run(w, "extract --input " + w("flat.csv")) == 3);
  CHECK(slurp(w("stderr")).find("insufficient calibration") != std::string::npos);
  spit(w("short.csv"), "frame,t_ms,ear\n0,0,0.5\n1,33,0.5\n");
  CHECK(run(w, "extract --input " + w("short.csv")) == 3);
}

TEST_CASE("truncated JSONL names the line") {
  Workdir w;
  REQUIRE(run(w, "synth --out " + w("t.jsonl") + " --duration-s 10") == 0);
  std::istringstream in(slurp(w("t.jsonl")));
  std::string line, text;
  for (int i = 1; std::getline(in, line); ++i) text += (i == 7 ? line.substr(0, line.size() / 3) : line) + "\n";
  spit(w("bad.jsonl"), text);
  CHECK(run(w, "extract --input " + w("bad.jsonl")) == 2);
  CHECK(slurp(w("stderr")).find("line 7") != std::string::npos);
}

TEST_CASE("landmark JSONL and EAR CSV give the same features") {
  Workdir w;
  REQUIRE(run(w, "synth --out " + w("a.jsonl") + " --seed 3 --noise-sd 0.01") == 0);
  REQUIRE(run(w, "synth --out " + w("a.csv") + " --seed 3 --noise-sd 0.01") == 0);
  REQUIRE(run(w, "extract --input " + w("a.jsonl") + " --video-id a --features " + w("j.csv")) == 0);
  REQUIRE(run(w, "extract --input " + w("a.csv") + " --video-id a --features " + w("c.csv")) == 0);
  const auto j = slurp(w("j.csv"));
  const auto c = slurp(w("c.csv"));
  // Landmark geometry reproduces the EAR to rounding, so row counts agree.
  CHECK(std::count(j.begin(), j.end(), '\n') == std::count(c.begin(), c.end(), '\n'));
  CHECK(std::count(c.begin(), c.end(), '\n') > 20);
}

TEST_CASE("end to end: determinism, training, monitoring") {
  Workdir w;
  const auto corpus = make_corpus(w, 3);

  // extract twice
  REQUIRE(run(w, "extract --input " + w("alert0.csv") + " --video-id alert0 --label 0 --features " +
                     w("again.csv") + " --cycles " + w("cyc1.csv") + " --profile " + w("p1.json")) == 0);
  REQUIRE(run(w, "extract --input " + w("alert0.csv") + " --video-id alert0 --label 0 --features " +
                     w("again2.csv") + " --cycles " + w("cyc2.csv") + " --profile " + w("p2.json")) == 0);
  CHECK(slurp(w("again.csv")) == slurp(corpus[0]));
  CHECK(slurp(w("again.csv")) == slurp(w("again2.csv")));
  CHECK(slurp(w("cyc1.csv")) == slurp(w("cyc2.csv")));
  CHECK(slurp(w("p1.json")) == slurp(w("p2.json")));

  // train twice
  const std::string feats = " --features" + joined(corpus);
  REQUIRE(run(w, "train" + feats + " --seed 4 --model " + w("m1.json") + " --report " + w("r1.json") +
                     " --table " + w("t1.txt")) == 0);
  REQUIRE(run(w, "train" + feats + " --seed 4 --model " + w("m2.json") + " --report " + w("r2.json")) == 0);
  CHECK(slurp(w("m1.json")) == slurp(w("m2.json")));
  CHECK(slurp(w("r1.json")) == slurp(w("r2.json")));
  CHECK(mean_accuracy(w("r1.json")) >= 0.95);
  CHECK(slurp(w("t1.txt")).find("random_forest") != std::string::npos);

  // monitor twice on a fresh drowsy stream
  REQUIRE(run(w, "synth --out " + w("live.csv") + " --seed 77 --noise-sd 0.01 --drowsy-onset-s 120") == 0);
  REQUIRE(run(w, "monitor --input " + w("live.csv") + " --model " + w("m1.json")) == 0);
  const std::string out1 = slurp(w("stdout"));
  REQUIRE(run(w, "monitor --input " + w("live.csv") + " --model " + w("m1.json")) == 0);
  CHECK(slurp(w("stdout")) == out1);

  std::istringstream lines(out1);
  std::string line, last;
  int predictions = 0;
  while (std::getline(lines, line)) {
    if (!last.empty()) ++predictions;
    last = line;
  }
  const auto report = blink::parse_json(last, "session report");
  CHECK(report["n_blinks"].get<int>() == predictions);
  CHECK(report["fraction_drowsy"].get<double>() > 0.8);
  CHECK(report["diagnostics"]["frames_balanced"].get<bool>());

  REQUIRE(run(w, "monitor --input " + w("live.csv") + " --model " + w("m1.json") + " --report " + w("s1.json")) == 0);
  CHECK(slurp(w("s1.json")) == last + "\n");

  // a set1 run against an all-features model stops before reading the stream
  CHECK(run(w, "monitor --input " + w("missing.csv") + " --model " + w("m1.json") + " --feature-set set1") == 2);
  CHECK(slurp(w("stderr")).find("feature set") != std::string::npos);

  // evaluate prints a table of every classifier
  REQUIRE(run(w, "evaluate" + feats + " --report " + w("ab.json")) == 0);
  const auto table = slurp(w("stdout"));
  for (const char* name : {"decision_tree", "random_forest", "knn", "logistic_regression", "svm_linear"}) {
    CHECK(table.find(name) != std::string::npos);
  }
}

TEST_CASE("schema drift between feature files") {
  Workdir w;
  REQUIRE(run(w, "synth --out " + w("a.csv") + " --seed 1") == 0);
  REQUIRE(run(w, "extract --input " + w("a.csv") + " --label 0 --features " + w("a.features.csv")) == 0);
  auto text = slurp(w("a.features.csv"));
  text.replace(text.find("f12"), 3, "f12x");
  spit(w("drift.csv"), text);
  CHECK(run(w, "train --features " + w("a.features.csv") + " " + w("drift.csv") + " --model " + w("m.json")) == 2);
  CHECK_FALSE(fs::exists(w("m.json")));
  // unlabeled rows cannot be trained on
  REQUIRE(run(w, "extract --input " + w("a.csv") + " --features " + w("u.csv")) == 0);
  CHECK(run(w, "train --features " + w("u.csv") + " --model " + w("m.json")) == 2);
}

TEST_CASE("config file drives the pipeline") {
  Workdir w;
  spit(w("cfg.json"), "{\"folds\":1}");
  REQUIRE(run(w, "synth --out " + w("a.csv") + " --seed 1") == 0);
  CHECK(run(w, "extract --config " + w("cfg.json") + " --input " + w("a.csv")) == 2);
  spit(w("cfg.json"), "{\"band_fraction\":0.25,\"window_ms\":60000}");
  REQUIRE(run(w, "extract --config " + w("cfg.json") + " --input " + w("a.csv") + " --profile " + w("p.json")) == 0);
  const auto p = blink::parse_json(slurp(w("p.json")), "profile");
  CHECK(p["band_fraction"].get<double>() == 0.25);
  CHECK(p["window_ms"].get<double>() == 60000.0);
}
