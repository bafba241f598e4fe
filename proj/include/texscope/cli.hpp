#pragma once

// The texscope command-line surface. run() takes its arguments and streams explicitly so the
// whole tool can be driven in-process.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <span>
#include <thread>
#include <tuple>
#include <vector>

#include "CLI11.hpp"

#include "texscope/classifier.hpp"
#include "texscope/error.hpp"
#include "texscope/features.hpp"
#include "texscope/harvest/client.hpp"
#include "texscope/harvest/corpus.hpp"
#include "texscope/harvest/http.hpp"
#include "texscope/io.hpp"
#include "texscope/stats.hpp"

namespace texscope::cli {

using io::json;

enum ExitCode { kOk = 0, kInternal = 1, kUsage = 2 };

// Injection points for tests; empty members select the live defaults.
struct Context {
  std::optional<harvest::Transport> transport;
  std::optional<harvest::Sleeper> sleeper;
};

// Every option of every subcommand; each subcommand reads the fields it registers.
struct RunConfig {
  std::string subcommand;
  std::vector<std::string> inputs;
  std::string output = "-";
  std::string comments_output;
  std::string words_output;
  std::string model_output;
  std::string words_input;
  std::string features_input;
  std::string format = "ndjson";
  std::string group = "archive";  // archive: "cs.AI" -> "cs"; category: keep as is
  std::string label_a;
  std::string label_b;
  std::vector<std::string> regions;
  std::vector<std::string> pairings;
  std::string only_group;
  bool series = false;
  std::string stopwords = "on";
  std::size_t min_length = 3;
  std::size_t k = 10;
  std::uint64_t seed = 7;
  double learning_rate = 0.5;
  double l2 = 1e-3;
  std::size_t epochs = 5000;
  double test_fraction = 0.2;
  std::vector<std::string> feature_names;
  std::size_t jobs = 1;
  bool fail_fast = false;
  bool quarantine = false;
  std::string category;
  std::string from;
  std::string to;
  std::optional<std::size_t> max_papers;
};

namespace detail {

inline std::string group_of(std::string_view category, std::string_view mode) {
  if (mode == "category") return std::string(category);
  return std::string(category.substr(0, category.find('.')));
}

inline void report_error(std::ostream& err, std::string_view subcommand, std::string_view code, std::string_view message) {
  err << json{{"error", code}, {"message", message}, {"subcommand", subcommand}}.dump() << '\n';
}

inline void report_diagnostic(std::ostream& err, const Diagnostic& d, std::string_view subject = {}) {
  json j{{"diagnostic", to_string(d.code)}, {"message", d.message}};
  if (!subject.empty()) j["id"] = subject;
  err << j.dump() << '\n';
}

// Writes to `out` for "-", otherwise to the named file.
template <class Fn>
void with_output(const std::string& path, std::ostream& out, Fn&& fn) {
  if (path == "-" || path.empty()) {
    fn(out);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::IoError, "cannot create " + path);
  fn(static_cast<std::ostream&>(file));
  file.flush();
  if (!file) throw Error(ErrorCode::IoError, "cannot write " + path);
}

inline std::vector<json> read_records(const std::string& path, std::string_view schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingInput, "cannot open input " + path);
  return io::read_ndjson(in, schema);
}

inline std::vector<features::FeatureVector> read_features(const std::string& path) {
  std::vector<features::FeatureVector> out;
  for (const auto& r : read_records(path, io::kFeaturesSchema)) out.push_back(io::feature_vector_from_json(r));
  return out;
}

inline std::vector<features::FeatureVector> grouped(std::vector<features::FeatureVector> fvs, const RunConfig& c) {
  for (auto& fv : fvs) fv.category = group_of(fv.category, c.group);
  return fvs;
}

inline stats::WordFilter word_filter(const RunConfig& c) {
  if (c.stopwords == "on") return {stats::english_stopwords(), c.min_length};
  if (c.stopwords == "off") return {std::nullopt, c.min_length};
  throw Error(ErrorCode::InvalidArgument, "--stopwords must be on or off");
}

inline std::optional<Date> parse_bound(const std::string& s, bool end) {
  if (s.empty()) return std::nullopt;
  auto d = parse_date(s);
  if (!d) throw Error(ErrorCode::InvalidArgument, "bad date '" + s + "' (expected YYYY-MM or YYYY-MM-DD)");
  if (end && s.size() == 7) d = end_of_month(*d);
  return d;
}

struct ExtractedDocument {
  features::DocumentAnalysis analysis;
  std::optional<Error> error;
};

}  // namespace detail

inline int cmd_harvest(const RunConfig& c, std::ostream& out, std::ostream& err, const Context& ctx) {
  if (!harvest::valid_category(c.category)) {
    throw Error(ErrorCode::InvalidArgument, "invalid category '" + c.category + "'");
  }
  std::string dir = c.output;
  if (dir.empty() || dir == "-") {
    const char* cache = std::getenv("TEXSCOPE_CACHE_DIR");
    if (cache == nullptr || *cache == '\0') throw Error(ErrorCode::InvalidArgument, "--out or TEXSCOPE_CACHE_DIR is required");
    dir = cache;
  }
  harvest::HarvestOptions options;
  options.query.category = c.category;
  const auto from = detail::parse_bound(c.from, false);
  const auto to = detail::parse_bound(c.to, true);
  if (from || to) {
    options.query.range = harvest::DateRange{from.value_or(Date{std::chrono::year{1991}, std::chrono::January, std::chrono::day{1}}),
                                             to.value_or(Date{std::chrono::year{9999}, std::chrono::December, std::chrono::day{31}})};
    if (options.query.range->to < options.query.range->from) throw Error(ErrorCode::InvalidArgument, "--to is before --from");
  }
  options.max_papers = c.max_papers;

  harvest::ClientConfig config = harvest::ClientConfig::from_env();
  harvest::Transport transport = ctx.transport ? *ctx.transport : harvest::http_transport(config.user_agent);
  harvest::PoliteClient client(std::move(transport), config, ctx.sleeper ? *ctx.sleeper : harvest::real_sleeper());
  const auto corpus = harvest::Corpus::open(dir, true);
  const harvest::HarvestSummary s = harvest::harvest(client, corpus, options);
  for (const auto& d : s.diagnostics) detail::report_diagnostic(err, d);
  out << "harvested " << s.fetched << " new, skipped " << s.skipped << " existing, " << s.diagnostics.size()
      << " with errors\n";
  return kOk;
}

inline int cmd_extract(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.inputs.size() != 1) throw Error(ErrorCode::InvalidArgument, "extract takes exactly one corpus directory");
  if (!std::filesystem::is_directory(c.inputs[0])) throw Error(ErrorCode::MissingInput, "no corpus at " + c.inputs[0]);
  const io::Format format = io::parse_format(c.format);
  const auto corpus = harvest::Corpus::open(c.inputs[0]);
  harvest::CorpusReader reader(corpus, c.quarantine);

  std::vector<lex::SourceDocument> docs;
  std::size_t without_source = 0;
  while (auto entry = reader.next()) {
    if (entry->document) {
      docs.push_back(std::move(*entry->document));
    } else {
      ++without_source;
    }
  }
  for (const auto& d : reader.diagnostics()) detail::report_diagnostic(err, d);
  std::sort(docs.begin(), docs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

  std::vector<detail::ExtractedDocument> results(docs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  const auto worker = [&] {
    for (std::size_t i = next++; i < docs.size() && !stop; i = next++) {
      try {
        results[i].analysis = features::analyze_document(docs[i]);
      } catch (const Error& e) {
        results[i].error = e;
        if (c.fail_fast) stop = true;
      }
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(c.jobs, docs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<json> feature_records, comment_records, word_records;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (results[i].error) {
      if (c.fail_fast) throw Error(results[i].error->code(), docs[i].id + ": " + results[i].error->what());
      ++failed;
      detail::report_diagnostic(err, {results[i].error->code(), results[i].error->what()}, docs[i].id);
      continue;
    }
    const auto& a = results[i].analysis;
    feature_records.push_back(io::to_json(a.features));
    for (const auto& fc : a.comments) comment_records.push_back(io::to_json(a.features.id, fc));
    word_records.push_back(io::to_json(stats::DocumentVocabulary{a.features.id, a.features.category, a.text_words, a.comment_words}));
  }

  detail::with_output(c.output, out, [&](std::ostream& o) { io::write_records(o, format, io::kFeaturesSchema, feature_records); });
  if (!c.comments_output.empty()) {
    detail::with_output(c.comments_output, out,
                        [&](std::ostream& o) { io::write_records(o, format, io::kCommentsSchema, comment_records); });
  }
  if (!c.words_output.empty()) {
    detail::with_output(c.words_output, out, [&](std::ostream& o) { io::write_ndjson(o, io::kWordsSchema, word_records); });
  }
  err << json{{"event", "extract"},
              {"documents", feature_records.size()},
              {"failed", failed},
              {"without_source", without_source}}
             .dump()
      << '\n';
  return kOk;
}

inline int cmd_stats(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.inputs.size() != 1) throw Error(ErrorCode::InvalidArgument, "stats takes exactly one features file");
  const io::Format format = io::parse_format(c.format);
  const auto fvs = detail::grouped(detail::read_features(c.inputs[0]), c);
  const stats::CorpusSummary summary = stats::summarize(fvs);
  for (const auto& d : stats::date_histograms(fvs).diagnostics) detail::report_diagnostic(err, d);
  std::vector<json> records;
  for (const auto& [cat, s] : summary) records.push_back(io::to_json(s));
  detail::with_output(c.output, out, [&](std::ostream& o) { io::write_records(o, format, io::kSummarySchema, records); });
  return kOk;
}

inline int cmd_discriminate(const RunConfig& c, std::ostream& out, std::ostream&) {
  if (c.label_a.empty() || c.label_b.empty()) throw Error(ErrorCode::InvalidArgument, "--a and --b are required");
  const io::Format format = io::parse_format(c.format);
  std::vector<std::string> regions = c.regions;
  if (regions.empty()) {
    if (!c.words_input.empty()) regions = {"text", "comments"};
    if (!c.features_input.empty()) regions.push_back("packages");
  }
  if (regions.empty()) throw Error(ErrorCode::MissingInput, "--words or --features is required");

  std::vector<json> records;
  const auto emit = [&](std::string_view region, const stats::FrequencyTable& a, const stats::FrequencyTable& b) {
    for (const auto& [label, x, y] : {std::tuple{c.label_a, &a, &b}, std::tuple{c.label_b, &b, &a}}) {
      const auto top = stats::discriminative(*x, *y, c.k);
      for (std::size_t r = 0; r < top.size(); ++r) {
        records.push_back({{"region", region}, {"favors", label}, {"rank", r + 1}, {"word", top[r].word}, {"score", top[r].score}});
      }
    }
  };

  std::vector<stats::DocumentVocabulary> vocab_a, vocab_b;
  if (!c.words_input.empty()) {
    for (const auto& r : detail::read_records(c.words_input, io::kWordsSchema)) {
      auto v = io::vocabulary_from_json(r);
      const std::string g = detail::group_of(v.category, c.group);
      if (g == c.label_a) vocab_a.push_back(std::move(v));
      else if (g == c.label_b) vocab_b.push_back(std::move(v));
    }
  }
  std::vector<features::FeatureVector> fv_a, fv_b;
  if (!c.features_input.empty()) {
    for (auto& fv : detail::grouped(detail::read_features(c.features_input), c)) {
      if (fv.category == c.label_a) fv_a.push_back(std::move(fv));
      else if (fv.category == c.label_b) fv_b.push_back(std::move(fv));
    }
  }

  const stats::WordFilter filter = detail::word_filter(c);
  for (const auto& region : regions) {
    if (region == "text" || region == "comments") {
      if (c.words_input.empty()) throw Error(ErrorCode::MissingInput, "--words is required for region " + region);
      const auto rg = region == "text" ? stats::Region::Text : stats::Region::Comments;
      emit(region, stats::word_frequency(vocab_a, rg, filter), stats::word_frequency(vocab_b, rg, filter));
    } else if (region == "packages") {
      if (c.features_input.empty()) throw Error(ErrorCode::MissingInput, "--features is required for region packages");
      emit(region, stats::package_incidence(fv_a), stats::package_incidence(fv_b));
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown region '" + region + "'");
    }
  }
  detail::with_output(c.output, out,
                      [&](std::ostream& o) { io::write_records(o, format, io::kDiscriminativeSchema, records); });
  return kOk;
}

// Plain "word,count" table for one group, most frequent first, for external plotting tools.
inline int cmd_frequencies(const RunConfig& c, std::ostream& out, std::ostream&) {
  if (c.label_a.empty()) throw Error(ErrorCode::InvalidArgument, "--label is required");
  const std::string region = c.regions.empty() ? "text" : c.regions.front();
  stats::FrequencyTable table;
  if (region == "text" || region == "comments") {
    if (c.words_input.empty()) throw Error(ErrorCode::MissingInput, "--words is required for region " + region);
    std::vector<stats::DocumentVocabulary> docs;
    for (const auto& r : detail::read_records(c.words_input, io::kWordsSchema)) {
      auto v = io::vocabulary_from_json(r);
      if (detail::group_of(v.category, c.group) == c.label_a) docs.push_back(std::move(v));
    }
    table = stats::word_frequency(docs, region == "text" ? stats::Region::Text : stats::Region::Comments,
                                  detail::word_filter(c));
  } else if (region == "packages") {
    if (c.features_input.empty()) throw Error(ErrorCode::MissingInput, "--features is required for region packages");
    auto fvs = detail::grouped(detail::read_features(c.features_input), c);
    std::erase_if(fvs, [&](const auto& fv) { return fv.category != c.label_a; });
    table = stats::package_incidence(fvs);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown region '" + region + "'");
  }
  std::vector<std::pair<std::string, std::uint64_t>> rows(table.counts.begin(), table.counts.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (rows.size() > c.k) rows.resize(c.k);
  detail::with_output(c.output, out, [&](std::ostream& o) {
    o << "word,count\n";
    for (const auto& [w, n] : rows) o << io::detail::csv_quote(w) << ',' << n << '\n';
  });
  return kOk;
}

inline const std::vector<std::pair<stats::Field, stats::Field>>& default_pairings() {
  using F = stats::Field;
  static const std::vector<std::pair<F, F>> p = {{F::Year, F::Pages},      {F::Year, F::Words},
                                                 {F::Year, F::Packages},   {F::Figures, F::Words},
                                                 {F::Theorems, F::Words},  {F::Packages, F::Words},
                                                 {F::Authors, F::Words}};
  return p;
}

inline stats::Field parse_field(std::string_view s) {
  using F = stats::Field;
  for (F f : {F::Year, F::Pages, F::Words, F::CommentWords, F::Packages, F::Newcommands, F::Theorems, F::Figures,
              F::Authors}) {
    if (stats::to_string(f) == s) return f;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown field '" + std::string(s) + "'");
}

inline int cmd_trends(const RunConfig& c, std::ostream& out, std::ostream&) {
  if (c.inputs.size() != 1) throw Error(ErrorCode::InvalidArgument, "trends takes exactly one features file");
  const io::Format format = io::parse_format(c.format);
  auto fvs = detail::grouped(detail::read_features(c.inputs[0]), c);
  if (!c.only_group.empty()) {
    std::erase_if(fvs, [&](const features::FeatureVector& fv) { return fv.category != c.only_group; });
  }
  std::vector<std::pair<stats::Field, stats::Field>> pairings;
  for (const auto& p : c.pairings) {
    const auto colon = p.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::InvalidArgument, "pairing must look like x:y, got '" + p + "'");
    pairings.emplace_back(parse_field(p.substr(0, colon)), parse_field(p.substr(colon + 1)));
  }
  if (pairings.empty()) pairings = default_pairings();

  std::vector<json> records;
  const auto fit_record = [&](stats::Field x, stats::Field y, std::string_view basis, std::span<const stats::Point> pts) {
    json j{{"type", "fit"}, {"x", stats::to_string(x)}, {"y", stats::to_string(y)}, {"basis", basis}, {"n", pts.size()}};
    try {
      const auto fit = stats::linear_trend(pts);
      j["slope"] = fit.slope;
      j["intercept"] = fit.intercept;
      j["r"] = fit.r;
    } catch (const Error& e) {
      j["error"] = std::string(to_string(e.code()));
    }
    records.push_back(std::move(j));
  };
  for (const auto& [x, y] : pairings) {
    const auto points = stats::field_points(fvs, x, y);
    fit_record(x, y, "papers", points);
    if (x == stats::Field::Year) {
      const auto groups = stats::group_points(points);
      fit_record(x, y, "yearly_means", stats::mean_points(groups));
      if (c.series) {
        for (const auto& g : groups) {
          records.push_back({{"type", "series"}, {"x", stats::to_string(x)}, {"y", stats::to_string(y)},
                             {"group", g.group}, {"mean", g.mean}, {"n", g.n}});
        }
      }
    }
  }
  detail::with_output(c.output, out, [&](std::ostream& o) { io::write_records(o, format, io::kTrendsSchema, records); });
  return kOk;
}

inline int cmd_classify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.inputs.size() != 1) throw Error(ErrorCode::InvalidArgument, "classify takes exactly one features file");
  if (c.label_a.empty()) throw Error(ErrorCode::InvalidArgument, "--positive is required");
  const io::Format format = io::parse_format(c.format);
  auto fvs = detail::grouped(detail::read_features(c.inputs[0]), c);
  if (!c.label_b.empty()) {
    std::erase_if(fvs, [&](const auto& fv) { return fv.category != c.label_a && fv.category != c.label_b; });
  }
  const auto& names = c.feature_names.empty() ? classifier::default_feature_names() : c.feature_names;
  const classifier::Dataset data = classifier::make_dataset(fvs, c.label_a, names);
  classifier::TrainConfig config;
  config.learning_rate = c.learning_rate;
  config.l2 = c.l2;
  config.epochs = c.epochs;
  config.seed = c.seed;
  config.test_fraction = c.test_fraction;
  const auto experiment = classifier::run_experiment(data, config);
  for (const auto& d : experiment.training.diagnostics) detail::report_diagnostic(err, d);

  const auto& r = experiment.report;
  std::vector<json> records;
  records.push_back({{"type", "report"},
                     {"positive", c.label_a},
                     {"negative", c.label_b.empty() ? json("*") : json(c.label_b)},
                     {"accuracy", r.accuracy},
                     {"majority_baseline", r.majority_baseline},
                     {"true_positive", r.confusion.true_positive},
                     {"false_positive", r.confusion.false_positive},
                     {"true_negative", r.confusion.true_negative},
                     {"false_negative", r.confusion.false_negative},
                     {"train_size", r.train_size},
                     {"test_size", r.test_size},
                     {"bias", r.bias},
                     {"learning_rate", r.config.learning_rate},
                     {"l2", r.config.l2},
                     {"epochs", r.config.epochs},
                     {"epochs_run", experiment.training.epochs_run},
                     {"converged", experiment.training.converged},
                     {"seed", r.config.seed},
                     {"test_fraction", r.config.test_fraction}});
  for (std::size_t i = 0; i < r.weights.size(); ++i) {
    records.push_back({{"type", "weight"}, {"rank", i + 1}, {"feature", r.weights[i].feature}, {"weight", r.weights[i].weight}});
  }
  detail::with_output(c.output, out, [&](std::ostream& o) { io::write_records(o, format, io::kClassifySchema, records); });
  if (!c.model_output.empty()) {
    detail::with_output(c.model_output, out, [&](std::ostream& o) { o << classifier::serialize(experiment.training.model); });
  }
  return kOk;
}

// Markdown rendering of the per-group summary; the same numbers are available from `stats`.
inline int cmd_report(const RunConfig& c, std::ostream& out, std::ostream&) {
  if (c.inputs.size() != 1) throw Error(ErrorCode::InvalidArgument, "report takes exactly one features file");
  const auto fvs = detail::grouped(detail::read_features(c.inputs[0]), c);
  const stats::CorpusSummary summary = stats::summarize(fvs);
  std::vector<const stats::CategorySummary*> cols;
  for (const auto& [cat, s] : summary) {
    if ((c.label_a.empty() && c.label_b.empty()) || cat == c.label_a || cat == c.label_b) cols.push_back(&s);
  }
  if (cols.empty()) throw Error(ErrorCode::EmptyCorpus, "no papers in the requested groups");

  const auto pct = [](double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(1) << 100.0 * v << "%";
    return s.str();
  };
  const auto num = [](double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << v;
    return s.str();
  };
  using Row = std::pair<std::string, std::function<std::string(const stats::CategorySummary&)>>;
  const std::vector<Row> rows = {
      {"Papers", [](const auto& s) { return std::to_string(s.papers); }},
      {"Multi-file papers", [&](const auto& s) { return pct(s.fraction_multi_file); }},
      {"No comments", [&](const auto& s) { return pct(s.fraction_no_comments); }},
      {"Mean comment words", [&](const auto& s) { return num(s.mean_comment_words); }},
      {"No packages", [&](const auto& s) { return pct(s.fraction_no_packages); }},
      {"Mean packages (users)", [&](const auto& s) { return num(s.mean_packages); }},
      {"Use \\newcommand", [&](const auto& s) { return pct(s.fraction_using_newcommand); }},
      {"Mean \\newcommand", [&](const auto& s) { return num(s.mean_newcommands); }},
      {"Have theorems", [&](const auto& s) { return pct(s.fraction_with_theorems); }},
      {"Mean theorems (users)", [&](const auto& s) { return num(s.mean_theorems); }},
      {"Mean words", [&](const auto& s) { return num(s.mean_words); }},
      {"Mean pages", [&](const auto& s) { return s.papers_with_pages ? num(s.mean_pages) : std::string("n/a"); }},
      {"Mean authors", [&](const auto& s) { return num(s.mean_authors); }},
      {"Single author", [&](const auto& s) { return pct(s.fraction_single_author); }},
  };
  detail::with_output(c.output, out, [&](std::ostream& o) {
    o << "| |";
    for (const auto* s : cols) o << ' ' << s->category << " |";
    o << "\n|---|";
    for (std::size_t i = 0; i < cols.size(); ++i) o << "---|";
    o << '\n';
    for (const auto& [label, fn] : rows) {
      o << "| " << label << " |";
      for (const auto* s : cols) o << ' ' << fn(*s) << " |";
      o << '\n';
    }
  });
  return kOk;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Context& ctx = {}) {
  RunConfig c;
  CLI::App app{"Source-level statistics for LaTeX paper corpora", "texscope"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  const auto add_format = [&](CLI::App* s) {
    s->add_option("--format", c.format, "ndjson or csv")->check(CLI::IsMember({"ndjson", "csv"}));
  };
  const auto add_group = [&](CLI::App* s) {
    s->add_option("--group", c.group, "archive (cs.AI -> cs) or category")->check(CLI::IsMember({"archive", "category"}));
  };

  auto* harvest_cmd = app.add_subcommand("harvest", "fetch metadata and sources into a corpus directory");
  harvest_cmd->add_option("--category", c.category, "category, e.g. cs.DS")->required();
  harvest_cmd->add_option("--from", c.from, "first submission month or day (YYYY-MM[-DD])");
  harvest_cmd->add_option("--to", c.to, "last submission month or day (YYYY-MM[-DD])");
  harvest_cmd->add_option("--out", c.output, "corpus directory (default $TEXSCOPE_CACHE_DIR)");
  harvest_cmd->add_option("--max", c.max_papers, "stop after this many listed papers");

  auto* extract_cmd = app.add_subcommand("extract", "compute feature vectors and comments for a corpus");
  extract_cmd->add_option("corpus", c.inputs, "corpus directory")->required();
  extract_cmd->add_option("--out", c.output, "feature records (default stdout)");
  extract_cmd->add_option("--comments", c.comments_output, "comment records");
  extract_cmd->add_option("--words", c.words_output, "per-document word counts (ndjson)");
  extract_cmd->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  extract_cmd->add_flag("--fail-fast", c.fail_fast, "stop at the first document that cannot be analysed");
  extract_cmd->add_flag("--quarantine", c.quarantine, "move entries with corrupt metadata to quarantine/");
  add_format(extract_cmd);

  auto* stats_cmd = app.add_subcommand("stats", "per-group summary table");
  stats_cmd->add_option("features", c.inputs, "feature records")->required();
  stats_cmd->add_option("--out", c.output, "output file (default stdout)");
  add_format(stats_cmd);
  add_group(stats_cmd);

  auto* disc_cmd = app.add_subcommand("discriminate", "most discriminative words and packages between two groups");
  disc_cmd->add_option("--words", c.words_input, "word records from extract");
  disc_cmd->add_option("--features", c.features_input, "feature records from extract (packages)");
  disc_cmd->add_option("--a", c.label_a, "first group")->required();
  disc_cmd->add_option("--b", c.label_b, "second group")->required();
  disc_cmd->add_option("-k", c.k, "rows per direction")->check(CLI::PositiveNumber);
  disc_cmd->add_option("--region", c.regions, "text, comments or packages (repeatable)");
  disc_cmd->add_option("--stopwords", c.stopwords, "on or off")->check(CLI::IsMember({"on", "off"}));
  disc_cmd->add_option("--min-length", c.min_length, "drop shorter words");
  disc_cmd->add_option("--out", c.output, "output file (default stdout)");
  add_format(disc_cmd);
  add_group(disc_cmd);

  auto* freq_cmd = app.add_subcommand("frequencies", "word,count table for one group");
  freq_cmd->add_option("--words", c.words_input, "word records from extract");
  freq_cmd->add_option("--features", c.features_input, "feature records from extract (packages)");
  freq_cmd->add_option("--label", c.label_a, "group to count")->required();
  freq_cmd->add_option("--region", c.regions, "text, comments or packages")->expected(1);
  freq_cmd->add_option("--stopwords", c.stopwords, "on or off")->check(CLI::IsMember({"on", "off"}));
  freq_cmd->add_option("--min-length", c.min_length, "drop shorter words");
  freq_cmd->add_option("-k", c.k, "keep this many rows (default all)")->check(CLI::PositiveNumber);
  freq_cmd->add_option("--out", c.output, "output file (default stdout)");
  add_group(freq_cmd);

  auto* trends_cmd = app.add_subcommand("trends", "least-squares trends between feature pairs");
  trends_cmd->add_option("features", c.inputs, "feature records")->required();
  trends_cmd->add_option("--pairing", c.pairings, "x:y, e.g. packages:words (repeatable)");
  trends_cmd->add_option("--only", c.only_group, "restrict to one group");
  trends_cmd->add_flag("--series", c.series, "also emit per-year means");
  trends_cmd->add_option("--out", c.output, "output file (default stdout)");
  add_format(trends_cmd);
  add_group(trends_cmd);

  auto* classify_cmd = app.add_subcommand("classify", "train and evaluate the logistic-regression classifier");
  classify_cmd->add_option("features", c.inputs, "feature records")->required();
  classify_cmd->add_option("--positive", c.label_a, "group labelled 1")->required();
  classify_cmd->add_option("--negative", c.label_b, "group labelled 0 (default: everything else)");
  classify_cmd->add_option("--seed", c.seed, "train/test split seed");
  classify_cmd->add_option("--learning-rate", c.learning_rate)->check(CLI::PositiveNumber);
  classify_cmd->add_option("--l2", c.l2)->check(CLI::NonNegativeNumber);
  classify_cmd->add_option("--epochs", c.epochs)->check(CLI::PositiveNumber);
  classify_cmd->add_option("--test-fraction", c.test_fraction)->check(CLI::Range(0.01, 0.99));
  classify_cmd->add_option("--feature", c.feature_names, "feature to use (repeatable)");
  classify_cmd->add_option("--model", c.model_output, "write the trained model here");
  classify_cmd->add_option("--out", c.output, "output file (default stdout)");
  add_format(classify_cmd);
  add_group(classify_cmd);

  auto* report_cmd = app.add_subcommand("report", "markdown comparison table");
  report_cmd->add_option("features", c.inputs, "feature records")->required();
  report_cmd->add_option("--a", c.label_a, "first group");
  report_cmd->add_option("--b", c.label_b, "second group");
  report_cmd->add_option("--out", c.output, "output file (default stdout)");
  add_group(report_cmd);

  std::vector<const char*> argv{"texscope"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    detail::report_error(err, app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name(),
                         "UsageError", e.what());
    return kUsage;
  }

  const CLI::App* sub = app.get_subcommands().front();
  c.subcommand = sub->get_name();
  if (c.subcommand == "frequencies" && sub->count("-k") == 0) c.k = std::numeric_limits<std::size_t>::max();
  try {
    if (c.subcommand == "harvest") return cmd_harvest(c, out, err, ctx);
    if (c.subcommand == "extract") return cmd_extract(c, out, err);
    if (c.subcommand == "stats") return cmd_stats(c, out, err);
    if (c.subcommand == "discriminate") return cmd_discriminate(c, out, err);
    if (c.subcommand == "frequencies") return cmd_frequencies(c, out, err);
    if (c.subcommand == "trends") return cmd_trends(c, out, err);
    if (c.subcommand == "classify") return cmd_classify(c, out, err);
    if (c.subcommand == "report") return cmd_report(c, out, err);
  } catch (const Error& e) {
    detail::report_error(err, c.subcommand, to_string(e.code()), e.what());
    const bool internal = e.code() == ErrorCode::HttpError || e.code() == ErrorCode::RateLimited;
    return internal ? kInternal : kUsage;
  } catch (const std::exception& e) {
    detail::report_error(err, c.subcommand, "InternalError", e.what());
    return kInternal;
  }
  return kUsage;
}

}  // namespace texscope::cli
