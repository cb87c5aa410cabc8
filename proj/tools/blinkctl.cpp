// blinkctl: blink-cycle drowsiness analytics from landmark or EAR streams.
//
//   blinkctl synth    --out trace.csv --truth truth.csv [--format csv|jsonl]
//   blinkctl extract  --input trace.csv --label 0 --features feats.csv
//   blinkctl train    --features a.csv b.csv --model model.json --report cv.json
//   blinkctl evaluate --features a.csv b.csv --table table.txt
//   blinkctl monitor  --input stream.jsonl --model model.json
//
// Exit codes: 0 ok, 2 input or schema error, 3 insufficient calibration.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blink/classifier.hpp"
#include "blink/cross_validation.hpp"
#include "blink/error.hpp"
#include "blink/io.hpp"
#include "blink/pipeline.hpp"
#include "blink/synth.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitCalibration = 3;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> feature_set;
  std::optional<std::string> format;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "Pipeline config JSON");
  cmd->add_option("--seed", o.seed, "Seed for every random choice");
  cmd->add_option("--feature-set", o.feature_set, "set1 or all")->check(CLI::IsMember({"set1", "all"}));
  cmd->add_option("--format", o.format, "Stream format: jsonl or csv")
      ->check(CLI::IsMember({"jsonl", "csv"}));
}

blink::PipelineConfig resolve_config(const CommonOptions& o) {
  blink::PipelineConfig c;
  if (!o.config_path.empty()) c = blink::PipelineConfig::load(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.feature_set) c.feature_set = blink::feature_set_from_string(*o.feature_set);
  c.validate();
  return c;
}

blink::InputFormat resolve_format(const CommonOptions& o, const std::string& path) {
  if (o.format) return blink::input_format_from_string(*o.format);
  return std::filesystem::path(path).extension() == ".jsonl" ? blink::InputFormat::kJsonl
                                                              : blink::InputFormat::kCsv;
}

std::string default_video_id(const std::string& path) {
  if (path == "-") return "stdin";
  return std::filesystem::path(path).stem().string();
}

// "-" means standard output.
void emit(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content << std::flush;
  } else {
    blink::write_file_atomic(path, content);
  }
}

template <typename Fn>
void with_input(const std::string& path, Fn&& fn) {
  if (path == "-") {
    fn(std::cin);
    return;
  }
  std::ifstream in(path);
  if (!in) throw blink::SchemaMismatch("cannot open '" + path + "'");
  fn(in);
}

void print_warnings(const std::vector<std::string>& warnings) {
  constexpr std::size_t kShown = 10;
  for (std::size_t i = 0; i < warnings.size() && i < kShown; ++i) {
    std::cerr << "warning: " << warnings[i] << '\n';
  }
  if (warnings.size() > kShown) {
    std::cerr << "warning: " << warnings.size() - kShown << " more\n";
  }
}

std::vector<blink::FeatureVector> load_features(const std::vector<std::string>& paths) {
  std::vector<blink::FeatureVector> rows;
  for (const auto& p : paths) {
    with_input(p, [&](std::istream& in) {
      auto part = blink::read_feature_csv(in);
      rows.insert(rows.end(), std::make_move_iterator(part.begin()),
                  std::make_move_iterator(part.end()));
    });
  }
  return rows;
}

// ---- synth ----

struct SynthArgs {
  std::string out;
  std::string truth;
  std::string profile_path;
  blink::SynthProfile profile;
  std::optional<double> drowsy_onset_s;
};

int run_synth(SynthArgs& a, const CommonOptions& common) {
  blink::SynthProfile p = a.profile;
  if (!a.profile_path.empty()) {
    p = blink::SynthProfile::from_json(
        blink::parse_json(blink::read_file(a.profile_path), "synthetic profile"));
  }
  if (a.drowsy_onset_s) p.drowsy_onset_s = a.drowsy_onset_s;
  if (common.seed) p.seed = *common.seed;
  const auto trace = blink::generate_trace(p);

  std::ostringstream out;
  if (resolve_format(common, a.out) == blink::InputFormat::kJsonl) {
    for (const auto& s : trace.samples) {
      out << blink::landmark_to_jsonl(blink::synthesize_landmarks(s)) << '\n';
    }
  } else {
    blink::write_ear_csv(out, trace.samples);
  }
  emit(a.out, out.str());
  if (!a.truth.empty()) {
    std::ostringstream truth;
    blink::write_truth_csv(truth, trace.blinks);
    emit(a.truth, truth.str());
  }
  std::cerr << "synth: " << trace.samples.size() << " frames, " << trace.blinks.size()
            << " blinks\n";
  return 0;
}

// ---- extract ----

struct ExtractArgs {
  std::string input;
  std::string video_id;
  std::optional<int> label;
  std::string features = "-";
  std::string cycles;
  std::string profile;
  bool diagnostics_json = false;
};

int run_extract(const ExtractArgs& a, const CommonOptions& common) {
  const auto config = resolve_config(common);
  blink::SampleStream stream;
  with_input(a.input, [&](std::istream& in) {
    stream = blink::read_samples(in, resolve_format(common, a.input));
  });
  print_warnings(stream.warnings);
  const std::string video = a.video_id.empty() ? default_video_id(a.input) : a.video_id;
  auto result = blink::extract_session(stream.samples, config, video, a.label, stream.records,
                                       stream.dropped);
  result.diagnostics.warnings = stream.warnings;

  std::ostringstream feats;
  blink::write_feature_csv(feats, result.features);
  emit(a.features, feats.str());
  if (!a.cycles.empty()) {
    std::ostringstream cyc;
    blink::write_cycle_csv(cyc, result.cycles);
    emit(a.cycles, cyc.str());
  }
  if (!a.profile.empty()) emit(a.profile, blink::profile_to_json(result.profile) + "\n");

  const auto& d = result.diagnostics;
  std::cerr << "extract: " << video << ": " << result.features.size() << " feature rows, "
            << result.profile.n_calibration_blinks << " calibration blinks, " << d.gap_resets
            << " gap resets, " << d.dropped_frames << " dropped frames\n";
  if (!d.balanced()) std::cerr << "warning: frame accounting does not balance\n";
  if (a.diagnostics_json) {
    auto j = d.to_json();
    j.erase("warnings");
    std::cerr << blink::dump_json(j) << '\n';
  }
  return 0;
}

// ---- train / evaluate ----

struct TrainArgs {
  std::vector<std::string> features;
  std::optional<std::string> algorithm;
  std::string model;
  std::string report;
  std::string table;
};

// Table layout with only the trained feature set's columns filled.
std::string single_table(const blink::CvReport& r) {
  char acc[16];
  char f1[16];
  std::snprintf(acc, sizeof acc, "%.2f", 100.0 * r.mean_accuracy);
  std::snprintf(f1, sizeof f1, "%.2f", 100.0 * r.mean_f1);
  const bool set1 = r.feature_set == blink::FeatureSet::kSet1;
  char line[160];
  std::string out;
  std::snprintf(line, sizeof line, "%-20s  %-24s  %-24s\n", "", "blink_set1",
                "blink_set1+blink_set2");
  out += line;
  std::snprintf(line, sizeof line, "%-20s  %-12s%-12s  %-12s%-12s\n", "Classifier",
                "Accuracy(%)", "F1(%)", "Accuracy(%)", "F1(%)");
  out += line;
  std::snprintf(line, sizeof line, "%-20s  %-12s%-12s  %-12s%-12s\n", blink::to_string(r.algorithm),
                set1 ? acc : "-", set1 ? f1 : "-", set1 ? "-" : acc, set1 ? "-" : f1);
  out += line;
  return out;
}

int run_train(const TrainArgs& a, const CommonOptions& common) {
  auto config = resolve_config(common);
  if (a.algorithm) config.algorithm = blink::algorithm_from_string(*a.algorithm);
  blink::Dataset data{load_features(a.features), config.feature_set};
  data.validate();
  const auto report = blink::cross_validate(data, config.algorithm, config.hyperparams,
                                            config.cv_options());
  const auto model = blink::train(data, config.algorithm, config.hyperparams, config.seed);
  emit(a.model, blink::model_to_json(model) + "\n");
  if (!a.report.empty()) emit(a.report, blink::dump_json(blink::cv_report_to_json(report)) + "\n");
  if (!a.table.empty()) emit(a.table, single_table(report));
  std::cerr << "train: " << blink::to_string(config.algorithm) << " on "
            << blink::to_string(config.feature_set) << ", " << data.rows.size()
            << " rows: mean accuracy " << report.mean_accuracy << ", mean F1 " << report.mean_f1
            << '\n';
  return 0;
}

struct EvaluateArgs {
  std::vector<std::string> features;
  std::string report;
  std::string table = "-";
};

int run_evaluate(const EvaluateArgs& a, const CommonOptions& common) {
  const auto config = resolve_config(common);
  const auto rows = load_features(a.features);
  blink::Dataset{rows, blink::FeatureSet::kAll}.validate();
  const auto ab = blink::run_ablation(rows, config.hyperparams, config.cv_options());
  if (!a.report.empty()) emit(a.report, blink::dump_json(blink::ablation_to_json(ab)) + "\n");
  emit(a.table, blink::ablation_table(ab));
  return 0;
}

// ---- monitor ----

struct MonitorArgs {
  std::string input;
  std::string model;
  std::string video_id;
  std::string report;
};

int run_monitor(const MonitorArgs& a, const CommonOptions& common) {
  auto config = resolve_config(common);
  auto model = blink::model_from_json(blink::read_file(a.model));
  // The model defines the active columns unless --feature-set / config says otherwise.
  if (!common.feature_set && common.config_path.empty()) config.feature_set = model.feature_set;
  const std::string video = a.video_id.empty() ? default_video_id(a.input) : a.video_id;
  blink::MonitorSession session(std::move(model), config, video);

  blink::SessionReport report;
  with_input(a.input, [&](std::istream& in) {
    blink::SampleReader reader(in, resolve_format(common, a.input));
    std::vector<blink::BlinkPrediction> out;
    while (auto s = reader.next()) {
      out.clear();
      session.push(*s, out);
      for (const auto& p : out) std::cout << blink::dump_json(blink::prediction_to_json(p)) << '\n';
      if (!out.empty()) std::cout.flush();
    }
    print_warnings(reader.warnings());
    report = session.finish(reader.records(), reader.dropped());
    report.diagnostics.warnings = reader.warnings();
  });

  const std::string doc = blink::dump_json(report.to_json()) + "\n";
  if (a.report.empty()) {
    std::cout << doc;
  } else {
    emit(a.report, doc);
  }
  std::cerr << "monitor: " << video << ": " << report.n_blinks << " blinks, "
            << 100.0 * report.fraction_non_drowsy << "% non-drowsy, "
            << 100.0 * report.fraction_drowsy << "% drowsy\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blink-cycle drowsiness analytics"};
  app.require_subcommand(1);

  CommonOptions common;

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic EAR trace with ground truth");
  add_common(synth_cmd, common);
  synth_cmd->add_option("--out", synth.out, "Trace output (EAR CSV or landmark JSONL)")->required();
  synth_cmd->add_option("--truth", synth.truth, "Ground-truth blink CSV");
  synth_cmd->add_option("--profile-json", synth.profile_path, "Synthetic profile JSON");
  synth_cmd->add_option("--fps", synth.profile.fps);
  synth_cmd->add_option("--duration-s", synth.profile.duration_s);
  synth_cmd->add_option("--blink-rate", synth.profile.blink_rate_per_min, "Blinks per minute");
  synth_cmd->add_option("--blink-ms-min", synth.profile.blink_ms_min);
  synth_cmd->add_option("--blink-ms-max", synth.profile.blink_ms_max);
  synth_cmd->add_option("--open-ear", synth.profile.open_ear);
  synth_cmd->add_option("--closed-ear", synth.profile.closed_ear);
  synth_cmd->add_option("--noise-sd", synth.profile.noise_sd);
  synth_cmd->add_option("--closing-min", synth.profile.closing_fraction_min);
  synth_cmd->add_option("--closing-max", synth.profile.closing_fraction_max);
  synth_cmd->add_option("--drowsy-onset-s", synth.drowsy_onset_s,
                        "Blinks after this time use drowsy dynamics");
  synth_cmd->add_option("--drowsy-closing-min", synth.profile.drowsy_closing_fraction_min);
  synth_cmd->add_option("--drowsy-closing-max", synth.profile.drowsy_closing_fraction_max);

  ExtractArgs extract;
  auto* extract_cmd = app.add_subcommand("extract", "Calibrate, segment and write blink features");
  add_common(extract_cmd, common);
  extract_cmd->add_option("--input", extract.input, "Landmark JSONL or EAR CSV ('-' = stdin)")
      ->required();
  extract_cmd->add_option("--video-id", extract.video_id);
  extract_cmd->add_option("--label", extract.label, "Label stamped on every row (0 or 1)")
      ->check(CLI::Range(0, 1));
  extract_cmd->add_option("--features", extract.features, "Feature CSV output ('-' = stdout)");
  extract_cmd->add_option("--cycles", extract.cycles, "Cycle dump CSV output");
  extract_cmd->add_option("--profile", extract.profile, "Calibration profile JSON output");
  extract_cmd->add_flag("--diagnostics-json", extract.diagnostics_json,
                        "Print frame accounting as JSON on stderr");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Cross-validate and train one classifier");
  add_common(train_cmd, common);
  train_cmd->add_option("--features", train.features, "Labeled feature CSVs")->required();
  train_cmd->add_option("--algorithm", train.algorithm)
      ->check(CLI::IsMember({"decision_tree", "random_forest", "knn", "logistic_regression",
                             "svm_linear"}));
  train_cmd->add_option("--model", train.model, "Model JSON output")->required();
  train_cmd->add_option("--report", train.report, "Cross-validation report JSON");
  train_cmd->add_option("--table", train.table, "Plain-text result table");

  EvaluateArgs evaluate;
  auto* eval_cmd =
      app.add_subcommand("evaluate", "Cross-validate all classifiers on set1 and set1+set2");
  add_common(eval_cmd, common);
  eval_cmd->add_option("--features", evaluate.features, "Labeled feature CSVs")->required();
  eval_cmd->add_option("--report", evaluate.report, "Report JSON");
  eval_cmd->add_option("--table", evaluate.table, "Plain-text table ('-' = stdout)");

  MonitorArgs monitor;
  auto* monitor_cmd = app.add_subcommand("monitor", "Predict each blink of a stream as it completes");
  add_common(monitor_cmd, common);
  monitor_cmd->add_option("--input", monitor.input, "Landmark JSONL or EAR CSV ('-' = stdin)")
      ->required();
  monitor_cmd->add_option("--model", monitor.model, "Model JSON")->required();
  monitor_cmd->add_option("--video-id", monitor.video_id);
  monitor_cmd->add_option("--report", monitor.report, "Session report JSON (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*synth_cmd) return run_synth(synth, common);
    if (*extract_cmd) return run_extract(extract, common);
    if (*train_cmd) return run_train(train, common);
    if (*eval_cmd) return run_evaluate(evaluate, common);
    if (*monitor_cmd) return run_monitor(monitor, common);
  } catch (const blink::InsufficientBlinks& e) {
    std::cerr << "error: insufficient calibration: " << e.what() << '\n';
    return kExitCalibration;
  } catch (const blink::InvalidCalibration& e) {
    std::cerr << "error: insufficient calibration: " << e.what() << '\n';
    return kExitCalibration;
  } catch (const blink::ParseError& e) {
    std::cerr << "error: malformed input: " << e.what() << '\n';
    return kExitInput;
  } catch (const blink::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}
