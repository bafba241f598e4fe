#pragma once

// Binary logistic regression over per-paper features: z-score standardization, L2-regularized
// log loss, full-batch gradient descent from zero weights.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "texscope/error.hpp"
#include "texscope/features.hpp"

namespace texscope::classifier {

using features::FeatureVector;

struct TrainConfig {
  double learning_rate = 0.5;
  double l2 = 1e-3;
  std::size_t epochs = 5000;
  double tolerance = 1e-8;  // stop once the loss decreases by less than this
  std::uint64_t seed = 7;   // drives the train/test split
  double test_fraction = 0.2;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

inline const std::vector<std::string>& default_feature_names() {
  static const std::vector<std::string> names = {"multi_file", "comment_words", "words",   "packages",
                                                 "newcommands", "theorems",     "figures", "authors"};
  return names;
}

inline double feature_value(const FeatureVector& fv, std::string_view name) {
  if (name == "multi_file") return fv.multi_file ? 1.0 : 0.0;
  if (name == "comment_words") return static_cast<double>(fv.comment_word_count);
  if (name == "words") return static_cast<double>(fv.word_count);
  if (name == "packages") return static_cast<double>(fv.package_count);
  if (name == "newcommands") return static_cast<double>(fv.newcommand_count);
  if (name == "theorems") return static_cast<double>(fv.theorem_count);
  if (name == "figures") return static_cast<double>(fv.figure_count);
  if (name == "authors") return static_cast<double>(fv.author_count);
  if (name == "theorem_like") return static_cast<double>(fv.theorem_like_count);
  if (name == "figure_envs") return static_cast<double>(fv.figure_env_count);
  throw Error(ErrorCode::InvalidArgument, "unknown feature '" + std::string(name) + "'");
}

// Raw (unstandardized) design matrix with 0/1 labels.
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;

  std::size_t size() const noexcept { return rows.size(); }
};

// Label 1 for papers whose category equals `positive_category`.
inline Dataset make_dataset(std::span<const FeatureVector> docs, std::string_view positive_category,
                            const std::vector<std::string>& names = default_feature_names()) {
  Dataset d;
  d.feature_names = names;
  for (const auto& fv : docs) {
    std::vector<double> row;
    row.reserve(names.size());
    for (const auto& n : names) row.push_back(feature_value(fv, n));
    d.rows.push_back(std::move(row));
    d.labels.push_back(fv.category == positive_category ? 1 : 0);
  }
  return d;
}

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Mean log loss plus (l2 / 2) * |w|^2 over a standardized design matrix. The bias is not
// penalized. params = [w_0 .. w_{d-1}, bias].
class Objective {
 public:
  Objective(const std::vector<std::vector<double>>& z, const std::vector<int>& y, double l2) : z_(z), y_(y), l2_(l2) {}

  std::size_t dimension() const noexcept { return z_.empty() ? 1 : z_.front().size() + 1; }

  double loss(std::span<const double> params) const {
    const std::size_t d = dimension() - 1;
    double total = 0;
    for (std::size_t i = 0; i < z_.size(); ++i) {
      const double m = margin(params, z_[i]);
      total += y_[i] == 1 ? softplus(-m) : softplus(m);
    }
    double penalty = 0;
    for (std::size_t k = 0; k < d; ++k) penalty += params[k] * params[k];
    return total / static_cast<double>(z_.size()) + 0.5 * l2_ * penalty;
  }

  std::vector<double> gradient(std::span<const double> params) const {
    const std::size_t d = dimension() - 1;
    std::vector<double> g(d + 1, 0.0);
    for (std::size_t i = 0; i < z_.size(); ++i) {
      const double residual = sigmoid(margin(params, z_[i])) - y_[i];
      for (std::size_t k = 0; k < d; ++k) g[k] += residual * z_[i][k];
      g[d] += residual;
    }
    const double inv_n = 1.0 / static_cast<double>(z_.size());
    for (std::size_t k = 0; k < d; ++k) g[k] = g[k] * inv_n + l2_ * params[k];
    g[d] *= inv_n;
    return g;
  }

 private:
  static double margin(std::span<const double> params, const std::vector<double>& row) {
    double m = params[row.size()];
    for (std::size_t k = 0; k < row.size(); ++k) m += params[k] * row[k];
    return m;
  }

  const std::vector<std::vector<double>>& z_;
  const std::vector<int>& y_;
  double l2_;
};

struct LogisticModel {
  std::vector<std::string> feature_names;
  std::vector<double> feature_means;
  std::vector<double> feature_stds;
  std::vector<double> weights;
  double bias = 0;
  TrainConfig config;

  friend bool operator==(const LogisticModel&, const LogisticModel&) = default;
};

struct TrainResult {
  LogisticModel model;
  std::vector<double> loss_history;  // loss before each epoch, then the final loss
  std::size_t epochs_run = 0;
  bool converged = false;
  Diagnostics diagnostics;
};

inline TrainResult train(const Dataset& data, const TrainConfig& config = {}) {
  std::size_t positives = 0;
  for (int y : data.labels) positives += y == 1;
  if (positives < 2 || data.size() - positives < 2) {
    throw Error(ErrorCode::SingleClass, "training needs at least two examples of each class");
  }

  TrainResult result;
  LogisticModel& model = result.model;
  model.config = config;
  const double n = static_cast<double>(data.size());
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < data.feature_names.size(); ++k) {
    double mean = 0;
    for (const auto& row : data.rows) mean += row[k];
    mean /= n;
    double var = 0;
    for (const auto& row : data.rows) var += (row[k] - mean) * (row[k] - mean);
    const double sd = std::sqrt(var / n);
    if (!(sd > 0)) {
      result.diagnostics.push_back({ErrorCode::DegenerateFeature,
                                    "feature '" + data.feature_names[k] + "' has zero variance; dropped"});
      continue;
    }
    kept.push_back(k);
    model.feature_names.push_back(data.feature_names[k]);
    model.feature_means.push_back(mean);
    model.feature_stds.push_back(sd);
  }

  std::vector<std::vector<double>> z;
  z.reserve(data.size());
  for (const auto& row : data.rows) {
    std::vector<double> zr;
    zr.reserve(kept.size());
    for (std::size_t c = 0; c < kept.size(); ++c) {
      zr.push_back((row[kept[c]] - model.feature_means[c]) / model.feature_stds[c]);
    }
    z.push_back(std::move(zr));
  }

  const Objective objective(z, data.labels, config.l2);
  std::vector<double> params(kept.size() + 1, 0.0);
  double loss = objective.loss(params);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    result.loss_history.push_back(loss);
    const auto g = objective.gradient(params);
    for (std::size_t k = 0; k < params.size(); ++k) params[k] -= config.learning_rate * g[k];
    const double next = objective.loss(params);
    ++result.epochs_run;
    if (!std::isfinite(next) || next > loss) {
      result.diagnostics.push_back({ErrorCode::Divergence, "loss increased at epoch " + std::to_string(epoch) +
                                                               "; lower the learning rate"});
    }
    const bool done = std::abs(loss - next) < config.tolerance;
    loss = next;
    if (done || !std::isfinite(loss)) {
      result.converged = std::isfinite(loss);
      break;
    }
  }
  result.loss_history.push_back(loss);
  model.weights.assign(params.begin(), params.end() - 1);
  model.bias = params.back();
  return result;
}

struct Prediction {
  int label;
  double probability;
};

// `row` holds raw values for model.feature_names, in order.
inline Prediction predict(const LogisticModel& model, std::span<const double> row) {
  if (row.size() != model.feature_names.size()) {
    throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(model.feature_names.size()) +
                                              " features, got " + std::to_string(row.size()));
  }
  double m = model.bias;
  for (std::size_t k = 0; k < row.size(); ++k) {
    m += model.weights[k] * (row[k] - model.feature_means[k]) / model.feature_stds[k];
  }
  const double p = sigmoid(m);
  return {p >= 0.5 ? 1 : 0, p};
}

inline Prediction predict(const LogisticModel& model, const FeatureVector& fv) {
  std::vector<double> row;
  row.reserve(model.feature_names.size());
  for (const auto& n : model.feature_names) row.push_back(feature_value(fv, n));
  return predict(model, row);
}

struct Confusion {
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t true_negative = 0;
  std::size_t false_negative = 0;

  std::size_t total() const noexcept { return true_positive + false_positive + true_negative + false_negative; }
};

struct WeightReport {
  std::string feature;
  double weight;
};

struct EvalReport {
  double accuracy = 0;
  double majority_baseline = 0;  // accuracy of always predicting the test set's majority class
  Confusion confusion;
  std::vector<WeightReport> weights;  // sorted by descending |weight|
  double bias = 0;
  TrainConfig config;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

// Rows of `data` selected by `rows` (indices into data).
inline Dataset subset(const Dataset& data, std::span<const std::size_t> rows) {
  Dataset out;
  out.feature_names = data.feature_names;
  for (std::size_t i : rows) {
    out.rows.push_back(data.rows[i]);
    out.labels.push_back(data.labels[i]);
  }
  return out;
}

inline EvalReport evaluate(const LogisticModel& model, const Dataset& test) {
  if (test.size() == 0) throw Error(ErrorCode::EmptyTestSet, "no test examples");
  std::vector<std::size_t> columns;
  for (const auto& name : model.feature_names) {
    auto it = std::find(test.feature_names.begin(), test.feature_names.end(), name);
    if (it == test.feature_names.end()) throw Error(ErrorCode::ShapeMismatch, "test set lacks feature '" + name + "'");
    columns.push_back(static_cast<std::size_t>(it - test.feature_names.begin()));
  }

  EvalReport report;
  report.config = model.config;
  report.bias = model.bias;
  report.test_size = test.size();
  std::size_t positives = 0;
  std::vector<double> row(columns.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c) row[c] = test.rows[i][columns[c]];
    const int predicted = predict(model, row).label;
    const int actual = test.labels[i];
    positives += actual == 1;
    if (predicted == 1 && actual == 1) ++report.confusion.true_positive;
    if (predicted == 1 && actual == 0) ++report.confusion.false_positive;
    if (predicted == 0 && actual == 0) ++report.confusion.true_negative;
    if (predicted == 0 && actual == 1) ++report.confusion.false_negative;
  }
  const double n = static_cast<double>(test.size());
  report.accuracy = static_cast<double>(report.confusion.true_positive + report.confusion.true_negative) / n;
  report.majority_baseline = static_cast<double>(std::max(positives, test.size() - positives)) / n;
  for (std::size_t k = 0; k < model.weights.size(); ++k) {
    report.weights.push_back({model.feature_names[k], model.weights[k]});
  }
  std::stable_sort(report.weights.begin(), report.weights.end(),
                   [](const WeightReport& a, const WeightReport& b) { return std::abs(a.weight) > std::abs(b.weight); });
  return report;
}

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded shuffle-and-cut. Uses its own Fisher-Yates over mt19937_64 so the permutation does not
// depend on the standard library's distribution implementations.
inline Split train_test_split(std::size_t n, double test_fraction, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
      r = rng();
    } while (r >= limit);
    std::swap(order[i - 1], order[r % bound]);
  }
  const auto test_n = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  Split s;
  s.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(test_n));
  s.train.assign(order.begin() + static_cast<std::ptrdiff_t>(test_n), order.end());
  return s;
}

struct Experiment {
  TrainResult training;
  EvalReport report;
};

// Split, train and evaluate in one step.
inline Experiment run_experiment(const Dataset& data, const TrainConfig& config = {}) {
  const Split split = train_test_split(data.size(), config.test_fraction, config.seed);
  Experiment e;
  e.training = train(subset(data, split.train), config);
  e.report = evaluate(e.training.model, subset(data, split.test));
  e.report.train_size = split.train.size();
  return e;
}

inline constexpr std::string_view kModelSchema = "texscope-logistic-model 1";

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidArgument, "bad number '" + std::string(s) + "' in model file");
  }
  return v;
}

}  // namespace detail

// Flat line-oriented text record; doubles are written in shortest round-trip form.
inline std::string serialize(const LogisticModel& m) {
  std::ostringstream out;
  const auto line = [&](std::string_view key, const auto& values, auto fmt) {
    out << key;
    for (const auto& v : values) out << ' ' << fmt(v);
    out << '\n';
  };
  const auto id = [](const std::string& s) { return s; };
  out << kModelSchema << '\n';
  line("features", m.feature_names, id);
  line("means", m.feature_means, detail::format_double);
  line("stds", m.feature_stds, detail::format_double);
  line("weights", m.weights, detail::format_double);
  out << "bias " << detail::format_double(m.bias) << '\n';
  out << "config learning_rate=" << detail::format_double(m.config.learning_rate)
      << " l2=" << detail::format_double(m.config.l2) << " epochs=" << m.config.epochs
      << " tolerance=" << detail::format_double(m.config.tolerance) << " seed=" << m.config.seed
      << " test_fraction=" << detail::format_double(m.config.test_fraction) << '\n';
  return out.str();
}

inline LogisticModel deserialize(std::string_view content) {
  std::istringstream in{std::string(content)};
  std::string header;
  std::getline(in, header);
  if (header != kModelSchema) throw Error(ErrorCode::InvalidArgument, "unsupported model schema '" + header + "'");
  LogisticModel m;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string key, item;
    fields >> key;
    std::vector<std::string> items;
    while (fields >> item) items.push_back(item);
    const auto numbers = [&] {
      std::vector<double> v;
      for (const auto& s : items) v.push_back(detail::parse_double(s));
      return v;
    };
    if (key == "features") {
      m.feature_names = items;
    } else if (key == "means") {
      m.feature_means = numbers();
    } else if (key == "stds") {
      m.feature_stds = numbers();
    } else if (key == "weights") {
      m.weights = numbers();
    } else if (key == "bias" && items.size() == 1) {
      m.bias = detail::parse_double(items[0]);
    } else if (key == "config") {
      for (const auto& kv : items) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string_view k = std::string_view(kv).substr(0, eq);
        const std::string_view v = std::string_view(kv).substr(eq + 1);
        if (k == "learning_rate") m.config.learning_rate = detail::parse_double(v);
        if (k == "l2") m.config.l2 = detail::parse_double(v);
        if (k == "epochs") m.config.epochs = static_cast<std::size_t>(detail::parse_double(v));
        if (k == "tolerance") m.config.tolerance = detail::parse_double(v);
        if (k == "seed") m.config.seed = std::stoull(std::string(v));
        if (k == "test_fraction") m.config.test_fraction = detail::parse_double(v);
      }
    }
  }
  const std::size_t d = m.feature_names.size();
  if (m.feature_means.size() != d || m.feature_stds.size() != d || m.weights.size() != d) {
    throw Error(ErrorCode::ShapeMismatch, "model file has inconsistent vector lengths");
  }
  for (double s : m.feature_stds) {
    if (!(s > 0)) throw Error(ErrorCode::InvalidArgument, "model file has a non-positive standard deviation");
  }
  return m;
}

}  // namespace texscope::classifier
