#include "blink/cross_validation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <random>

#include "blink/error.hpp"

namespace blink {

const char* to_string(F1Mode mode) { return mode == F1Mode::kBinary ? "binary" : "macro"; }

F1Mode f1_mode_from_string(const std::string& name) {
  if (name == "binary") return F1Mode::kBinary;
  if (name == "macro") return F1Mode::kMacro;
  throw InvalidConfig("unknown F1 mode '" + name + "' (expected binary or macro)");
}

Confusion& Confusion::operator+=(const Confusion& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

Confusion confusion(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw SchemaMismatch("label sequences differ in length (" + std::to_string(y_true.size()) +
                         " vs " + std::to_string(y_pred.size()) + ")");
  }
  Confusion c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool truth = y_true[i] == 1;
    const bool pred = y_pred[i] == 1;
    if (truth && pred) ++c.tp;
    else if (!truth && pred) ++c.fp;
    else if (!truth && !pred) ++c.tn;
    else ++c.fn;
  }
  return c;
}

namespace {

double f1_score(std::size_t tp, std::size_t fp, std::size_t fn) {
  const double denom = static_cast<double>(2 * tp + fp + fn);
  return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
}

Metrics metrics_from(const Confusion& c, F1Mode mode) {
  const std::size_t total = c.tp + c.fp + c.tn + c.fn;
  Metrics m;
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
  // 2tp / (2tp + fp + fn) is the harmonic mean of precision and recall.
  const double f1_pos = f1_score(c.tp, c.fp, c.fn);
  m.f1 = mode == F1Mode::kBinary ? f1_pos : 0.5 * (f1_pos + f1_score(c.tn, c.fn, c.fp));
  return m;
}

std::uint64_t fold_seed(std::uint64_t seed, std::size_t fold) {
  return seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(fold) + 1);
}

}  // namespace

Metrics metrics(std::span<const int> y_true, std::span<const int> y_pred, F1Mode mode) {
  if (y_true.empty()) throw SchemaMismatch("metrics need at least one label");
  return metrics_from(confusion(y_true, y_pred), mode);
}

std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds,
                                          std::uint64_t seed) {
  if (folds < 2) throw InvalidConfig("cross-validation needs at least 2 folds");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw SchemaMismatch("labels must be 0 or 1");
    by_class[labels[i]].push_back(i);
  }
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].size() < folds) {
      throw InsufficientPerClass("class " + std::to_string(c) + " has " +
                                 std::to_string(by_class[c].size()) + " rows, need " +
                                 std::to_string(folds));
    }
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> fold_of(labels.size());
  std::size_t next = 0;
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    for (auto i : members) fold_of[i] = next++ % folds;
  }
  return fold_of;
}

std::vector<std::size_t> grouped_folds(const Dataset& data, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw InvalidConfig("cross-validation needs at least 2 folds");
  std::map<std::string, int> video_label;
  for (const auto& r : data.rows) {
    const int label = r.label.value_or(-1);
    auto [it, inserted] = video_label.emplace(r.video_id, label);
    if (!inserted && it->second != label) {
      throw SchemaMismatch("video '" + r.video_id + "' mixes labels; cannot group folds by video");
    }
  }
  std::vector<std::string> videos[2];
  for (const auto& [video, label] : video_label) {
    if (label != 0 && label != 1) throw SchemaMismatch("labels must be 0 or 1");
    videos[label].push_back(video);
  }
  for (int c = 0; c < 2; ++c) {
    if (videos[c].size() < folds) {
      throw InsufficientPerClass("class " + std::to_string(c) + " has " +
                                 std::to_string(videos[c].size()) + " videos, need " +
                                 std::to_string(folds));
    }
  }
  std::mt19937_64 rng(seed);
  std::map<std::string, std::size_t> fold_of_video;
  std::size_t next = 0;
  for (auto& members : videos) {
    std::shuffle(members.begin(), members.end(), rng);
    for (const auto& v : members) fold_of_video[v] = next++ % folds;
  }
  std::vector<std::size_t> fold_of(data.rows.size());
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    fold_of[i] = fold_of_video.at(data.rows[i].video_id);
  }
  return fold_of;
}

CvReport cross_validate(const Dataset& data, Algorithm algorithm, const Hyperparams& hyperparams,
                        const CvOptions& options) {
  data.validate();
  hyperparams.validate();
  const auto labels = data.labels();
  CvReport report;
  report.algorithm = algorithm;
  report.feature_set = data.feature_set;
  report.hyperparams = hyperparams;
  report.options = options;
  report.fold_of_row = options.group_by_video
                           ? grouped_folds(data, options.folds, options.seed)
                           : stratified_folds(labels, options.folds, options.seed);
  report.predictions.assign(data.rows.size(), -1);

  const Matrix x = data.matrix();
  double acc_sum = 0.0;
  double f1_sum = 0.0;
  for (std::size_t fold = 0; fold < options.folds; ++fold) {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
      (report.fold_of_row[i] == fold ? test_rows : train_rows).push_back(i);
    }
    Matrix xt(train_rows.size(), x.cols());
    std::vector<int> yt;
    yt.reserve(train_rows.size());
    for (std::size_t r = 0; r < train_rows.size(); ++r) {
      const auto src = x.row(train_rows[r]);
      std::copy(src.begin(), src.end(), xt.row(r).begin());
      yt.push_back(labels[train_rows[r]]);
    }
    const Model model =
        train(xt, yt, data.feature_set, algorithm, hyperparams, fold_seed(options.seed, fold));

    std::vector<int> truth;
    std::vector<int> pred;
    for (auto i : test_rows) {
      const int p = predict_row(model, x.row(i)).label;
      report.predictions[i] = p;
      truth.push_back(labels[i]);
      pred.push_back(p);
    }
    FoldResult fr;
    fr.n_train = train_rows.size();
    fr.n_test = test_rows.size();
    fr.confusion = confusion(truth, pred);
    const Metrics m = metrics_from(fr.confusion, options.f1_mode);
    fr.accuracy = m.accuracy;
    fr.f1 = m.f1;
    acc_sum += m.accuracy;
    f1_sum += m.f1;
    report.total += fr.confusion;
    report.folds.push_back(fr);
  }
  report.mean_accuracy = acc_sum / static_cast<double>(options.folds);
  report.mean_f1 = f1_sum / static_cast<double>(options.folds);
  return report;
}

ordered_json cv_report_to_json(const CvReport& r) {
  ordered_json j;
  j["algorithm"] = to_string(r.algorithm);
  j["feature_set"] = to_string(r.feature_set);
  j["folds"] = r.options.folds;
  j["seed"] = r.options.seed;
  j["f1_mode"] = to_string(r.options.f1_mode);
  j["group_by_video"] = r.options.group_by_video;
  j["hyperparams"] = r.hyperparams.to_json();
  j["mean_accuracy"] = r.mean_accuracy;
  j["mean_f1"] = r.mean_f1;
  j["confusion"] = {{"tp", r.total.tp}, {"fp", r.total.fp}, {"tn", r.total.tn}, {"fn", r.total.fn}};
  ordered_json folds = ordered_json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"n_train", f.n_train},
                     {"n_test", f.n_test},
                     {"accuracy", f.accuracy},
                     {"f1", f.f1},
                     {"tp", f.confusion.tp},
                     {"fp", f.confusion.fp},
                     {"tn", f.confusion.tn},
                     {"fn", f.confusion.fn}});
  }
  j["per_fold"] = std::move(folds);
  j["fold_of_row"] = r.fold_of_row;
  return j;
}

AblationReport run_ablation(const std::vector<FeatureVector>& rows, const Hyperparams& hyperparams,
                            const CvOptions& options) {
  AblationReport out;
  for (FeatureSet set : {FeatureSet::kSet1, FeatureSet::kAll}) {
    Dataset data{rows, set};
    auto& dest = set == FeatureSet::kSet1 ? out.set1 : out.all;
    for (Algorithm a : kAllAlgorithms) dest.push_back(cross_validate(data, a, hyperparams, options));
  }
  return out;
}

ordered_json ablation_to_json(const AblationReport& report) {
  ordered_json j;
  j["set1"] = ordered_json::array();
  j["all"] = ordered_json::array();
  for (const auto& r : report.set1) j["set1"].push_back(cv_report_to_json(r));
  for (const auto& r : report.all) j["all"].push_back(cv_report_to_json(r));
  return j;
}

std::string ablation_table(const AblationReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-20s  %-24s  %-24s\n", "", "blink_set1",
                "blink_set1+blink_set2");
  out += line;
  std::snprintf(line, sizeof line, "%-20s  %-12s%-12s  %-12s%-12s\n", "Classifier", "Accuracy(%)",
                "F1(%)", "Accuracy(%)", "F1(%)");
  out += line;
  for (std::size_t i = 0; i < report.set1.size() && i < report.all.size(); ++i) {
    const auto& a = report.set1[i];
    const auto& b = report.all[i];
    std::snprintf(line, sizeof line, "%-20s  %-12.2f%-12.2f  %-12.2f%-12.2f\n",
                  to_string(a.algorithm), 100.0 * a.mean_accuracy, 100.0 * a.mean_f1,
                  100.0 * b.mean_accuracy, 100.0 * b.mean_f1);
    out += line;
  }
  return out;
}

}  // namespace blink
