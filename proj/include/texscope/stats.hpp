#pragma once

// Corpus-level aggregation: word-frequency tables, discriminative words and packages, summary
// tables, date histograms and least-squares trends.
//
// Every aggregate is built from per-document partial statistics that merge associatively, so
// documents can be reduced in any order or in parallel.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "texscope/error.hpp"
#include "texscope/features.hpp"
#include "texscope/stopwords.hpp"
#include "texscope/text.hpp"

namespace texscope::stats {

using features::FeatureVector;
using text::WordCounts;

struct StopWords {
  std::string name;
  std::set<std::string, std::less<>> words;

  bool contains(std::string_view w) const { return words.contains(w); }

  // One word per line; blank lines and lines starting with '#' are skipped.
  static StopWords parse(std::string name, std::string_view content) {
    StopWords out{std::move(name), {}};
    std::size_t start = 0;
    while (start < content.size()) {
      std::size_t end = content.find('\n', start);
      if (end == std::string_view::npos) end = content.size();
      std::string_view line = text::trim(content.substr(start, end - start));
      if (!line.empty() && line.front() != '#') out.words.insert(text::to_lower(line));
      start = end + 1;
    }
    return out;
  }

  friend bool operator==(const StopWords&, const StopWords&) = default;
};

inline const StopWords& english_stopwords() {
  static const StopWords list = [] {
    StopWords s{std::string(kEnglishStopWordsName), {}};
    for (auto w : kEnglishStopWords) s.words.emplace(w);
    return s;
  }();
  return list;
}

struct WordFilter {
  std::optional<StopWords> stopwords;  // nullopt: keep stop words
  std::size_t min_length = 0;          // words shorter than this are dropped

  bool accepts(std::string_view w) const {
    if (w.size() < min_length) return false;
    return !(stopwords && stopwords->contains(w));
  }

  static WordFilter none() { return {}; }
  static WordFilter standard(std::size_t min_length = 3) { return {english_stopwords(), min_length}; }

  friend bool operator==(const WordFilter&, const WordFilter&) = default;
};

enum class Region { Text, Comments };

// Tokens: counts are word occurrences and frequencies sum to one. DocumentIncidence: counts are
// numbers of documents and the frequency of an entry is the fraction of documents having it.
enum class CountingBasis { Tokens, DocumentIncidence };

// Word bags of one document, split into body text and comments.
struct DocumentVocabulary {
  std::string id;
  std::string category;
  WordCounts text;
  WordCounts comments;
};

struct FrequencyTable {
  CountingBasis basis = CountingBasis::Tokens;
  WordFilter filter;
  std::uint64_t total = 0;  // words (Tokens) or documents (DocumentIncidence)
  WordCounts counts;

  double frequency(std::string_view w) const {
    if (total == 0) return 0.0;
    auto it = counts.find(w);
    return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
  }

  void merge(const FrequencyTable& other) {
    total += other.total;
    for (const auto& [w, c] : other.counts) counts[w] += c;
  }
};

inline FrequencyTable word_frequency(std::span<const DocumentVocabulary> docs, Region region, const WordFilter& filter) {
  if (docs.empty()) throw Error(ErrorCode::EmptyCorpus, "no documents to count");
  FrequencyTable table;
  table.filter = filter;
  for (const auto& doc : docs) {
    const WordCounts& bag = region == Region::Text ? doc.text : doc.comments;
    for (const auto& [w, c] : bag) {
      if (!filter.accepts(w)) continue;
      table.counts[w] += c;
      table.total += c;
    }
  }
  return table;
}

// Fraction of documents declaring each package.
inline FrequencyTable package_incidence(std::span<const FeatureVector> docs) {
  if (docs.empty()) throw Error(ErrorCode::EmptyCorpus, "no documents to count");
  FrequencyTable table;
  table.basis = CountingBasis::DocumentIncidence;
  table.total = docs.size();
  for (const auto& fv : docs) {
    for (const auto& name : fv.package_names) ++table.counts[name];
  }
  return table;
}

struct ScoredWord {
  std::string word;
  double score = 0.0;

  friend bool operator==(const ScoredWord&, const ScoredWord&) = default;
};

// score(w) = freqA(w) - freqB(w) over the union vocabulary, sorted by descending score with
// ties broken lexicographically.
inline std::vector<ScoredWord> discriminative_scores(const FrequencyTable& a, const FrequencyTable& b) {
  if (!(a.filter == b.filter) || a.basis != b.basis) {
    throw Error(ErrorCode::FilterMismatch, "frequency tables were built with different filters or bases");
  }
  std::vector<ScoredWord> scores;
  scores.reserve(a.counts.size() + b.counts.size());
  auto ia = a.counts.begin();
  auto ib = b.counts.begin();
  while (ia != a.counts.end() || ib != b.counts.end()) {
    std::string_view w;
    if (ib == b.counts.end() || (ia != a.counts.end() && ia->first < ib->first)) {
      w = ia->first;
    } else {
      w = ib->first;
    }
    scores.push_back({std::string(w), a.frequency(w) - b.frequency(w)});
    if (ia != a.counts.end() && ia->first == w) ++ia;
    if (ib != b.counts.end() && ib->first == w) ++ib;
  }
  std::stable_sort(scores.begin(), scores.end(),
                   [](const ScoredWord& x, const ScoredWord& y) { return x.score > y.score; });
  return scores;
}

// Top-k words discriminative for A against B.
inline std::vector<ScoredWord> discriminative(const FrequencyTable& a, const FrequencyTable& b, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  auto scores = discriminative_scores(a, b);
  if (scores.size() > k) scores.resize(k);
  return scores;
}

// One column of the per-category comparison table.
struct CategorySummary {
  std::string category;
  std::uint64_t papers = 0;
  double fraction_multi_file = 0;
  double fraction_no_comments = 0;
  double mean_comment_words = 0;
  double fraction_no_packages = 0;
  double mean_packages = 0;  // over papers with at least one package
  double fraction_using_newcommand = 0;
  double mean_newcommands = 0;
  double fraction_with_theorems = 0;
  double mean_theorems = 0;  // over papers with at least one theorem
  double mean_words = 0;
  std::uint64_t papers_with_pages = 0;
  double mean_pages = 0;  // over papers with page metadata
  std::optional<int> mode_pages;
  double fraction_even_pages = 0;
  double mean_authors = 0;
  double fraction_single_author = 0;
  double fraction_graphicx_declared = 0;
  double fraction_graphicx_unused = 0;  // among papers declaring graphicx
  double fraction_epsfig_declared = 0;
  double fraction_epsfig_unused = 0;  // among papers declaring epsfig
  double fraction_both_graphics = 0;
  std::map<int, std::uint64_t> page_histogram;
  std::array<std::uint64_t, 12> monthly_histogram{};
  std::map<int, double> yearly_fraction;

  friend bool operator==(const CategorySummary&, const CategorySummary&) = default;
};

// Sufficient statistics for a CategorySummary: integer counts and sums only, so merging is
// exact and order-independent.
class SummaryAccumulator {
 public:
  void add(const FeatureVector& fv) {
    ++papers_;
    multi_file_ += fv.multi_file;
    no_comments_ += fv.comment_word_count == 0;
    comment_words_ += fv.comment_word_count;
    if (fv.package_count == 0) {
      ++no_packages_;
    } else {
      packages_ += fv.package_count;
    }
    using_newcommand_ += fv.newcommand_count > 0;
    newcommands_ += fv.newcommand_count;
    if (fv.theorem_count > 0) {
      ++with_theorems_;
      theorems_ += fv.theorem_count;
    }
    words_ += fv.word_count;
    if (fv.page_count) {
      ++with_pages_;
      pages_ += static_cast<std::uint64_t>(*fv.page_count);
      even_pages_ += *fv.page_count % 2 == 0;
      ++page_histogram_[*fv.page_count];
    }
    authors_ += fv.author_count;
    single_author_ += fv.author_count == 1;
    graphicx_declared_ += fv.graphicx_declared;
    graphicx_unused_ += fv.graphicx_declared && fv.includegraphics_count == 0;
    epsfig_declared_ += fv.epsfig_declared;
    epsfig_unused_ += fv.epsfig_declared && fv.epsfig_cmd_count == 0;
    both_graphics_ += fv.graphicx_declared && fv.epsfig_declared;
    if (fv.timestamp) {
      ++months_[static_cast<unsigned>(fv.timestamp->month()) - 1];
      ++years_[static_cast<int>(fv.timestamp->year())];
    }
  }

  void merge(const SummaryAccumulator& o) {
    papers_ += o.papers_;
    multi_file_ += o.multi_file_;
    no_comments_ += o.no_comments_;
    comment_words_ += o.comment_words_;
    no_packages_ += o.no_packages_;
    packages_ += o.packages_;
    using_newcommand_ += o.using_newcommand_;
    newcommands_ += o.newcommands_;
    with_theorems_ += o.with_theorems_;
    theorems_ += o.theorems_;
    words_ += o.words_;
    with_pages_ += o.with_pages_;
    pages_ += o.pages_;
    even_pages_ += o.even_pages_;
    authors_ += o.authors_;
    single_author_ += o.single_author_;
    graphicx_declared_ += o.graphicx_declared_;
    graphicx_unused_ += o.graphicx_unused_;
    epsfig_declared_ += o.epsfig_declared_;
    epsfig_unused_ += o.epsfig_unused_;
    both_graphics_ += o.both_graphics_;
    for (const auto& [p, c] : o.page_histogram_) page_histogram_[p] += c;
    for (std::size_t m = 0; m < 12; ++m) months_[m] += o.months_[m];
    for (const auto& [y, c] : o.years_) years_[y] += c;
  }

  std::uint64_t papers() const noexcept { return papers_; }

  CategorySummary finish(std::string category) const {
    const auto ratio = [](std::uint64_t num, std::uint64_t den) {
      return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    CategorySummary s;
    s.category = std::move(category);
    s.papers = papers_;
    s.fraction_multi_file = ratio(multi_file_, papers_);
    s.fraction_no_comments = ratio(no_comments_, papers_);
    s.mean_comment_words = ratio(comment_words_, papers_);
    s.fraction_no_packages = ratio(no_packages_, papers_);
    s.mean_packages = ratio(packages_, papers_ - no_packages_);
    s.fraction_using_newcommand = ratio(using_newcommand_, papers_);
    s.mean_newcommands = ratio(newcommands_, papers_);
    s.fraction_with_theorems = ratio(with_theorems_, papers_);
    s.mean_theorems = ratio(theorems_, with_theorems_);
    s.mean_words = ratio(words_, papers_);
    s.papers_with_pages = with_pages_;
    s.mean_pages = ratio(pages_, with_pages_);
    s.fraction_even_pages = ratio(even_pages_, with_pages_);
    std::uint64_t best = 0;
    for (const auto& [pages, count] : page_histogram_) {
      if (count > best) {
        best = count;
        s.mode_pages = pages;
      }
    }
    s.mean_authors = ratio(authors_, papers_);
    s.fraction_single_author = ratio(single_author_, papers_);
    s.fraction_graphicx_declared = ratio(graphicx_declared_, papers_);
    s.fraction_graphicx_unused = ratio(graphicx_unused_, graphicx_declared_);
    s.fraction_epsfig_declared = ratio(epsfig_declared_, papers_);
    s.fraction_epsfig_unused = ratio(epsfig_unused_, epsfig_declared_);
    s.fraction_both_graphics = ratio(both_graphics_, papers_);
    s.page_histogram = page_histogram_;
    s.monthly_histogram = months_;
    std::uint64_t dated = 0;
    for (const auto& [y, c] : years_) dated += c;
    for (const auto& [y, c] : years_) s.yearly_fraction[y] = ratio(c, dated);
    return s;
  }

 private:
  std::uint64_t papers_ = 0, multi_file_ = 0, no_comments_ = 0, comment_words_ = 0;
  std::uint64_t no_packages_ = 0, packages_ = 0, using_newcommand_ = 0, newcommands_ = 0;
  std::uint64_t with_theorems_ = 0, theorems_ = 0, words_ = 0;
  std::uint64_t with_pages_ = 0, pages_ = 0, even_pages_ = 0;
  std::uint64_t authors_ = 0, single_author_ = 0;
  std::uint64_t graphicx_declared_ = 0, graphicx_unused_ = 0, epsfig_declared_ = 0, epsfig_unused_ = 0;
  std::uint64_t both_graphics_ = 0;
  std::map<int, std::uint64_t> page_histogram_;
  std::array<std::uint64_t, 12> months_{};
  std::map<int, std::uint64_t> years_;
};

// Per-category accumulators.
class CorpusAccumulator {
 public:
  void add(const FeatureVector& fv) { by_category_[fv.category].add(fv); }

  void merge(const CorpusAccumulator& other) {
    for (const auto& [cat, acc] : other.by_category_) by_category_[cat].merge(acc);
  }

  std::map<std::string, CategorySummary> finish() const {
    std::map<std::string, CategorySummary> out;
    for (const auto& [cat, acc] : by_category_) out.emplace(cat, acc.finish(cat));
    return out;
  }

 private:
  std::map<std::string, SummaryAccumulator> by_category_;
};

using CorpusSummary = std::map<std::string, CategorySummary>;

inline CorpusSummary summarize(std::span<const FeatureVector> features) {
  if (features.empty()) throw Error(ErrorCode::EmptyCorpus, "no feature vectors to summarize");
  CorpusAccumulator acc;
  for (const auto& fv : features) acc.add(fv);
  return acc.finish();
}

struct DateHistograms {
  std::array<std::uint64_t, 12> monthly{};
  std::map<int, std::uint64_t> yearly_counts;
  std::map<int, double> yearly_fraction;
  Diagnostics diagnostics;  // one per paper without a timestamp
};

// Month-of-year histogram across all years, and each year's share of the dated papers.
inline DateHistograms date_histograms(std::span<const FeatureVector> features) {
  DateHistograms h;
  std::uint64_t dated = 0;
  for (const auto& fv : features) {
    if (!fv.timestamp) {
      h.diagnostics.push_back({ErrorCode::MissingTimestamp, "paper " + fv.id + " has no timestamp; skipped"});
      continue;
    }
    ++h.monthly[static_cast<unsigned>(fv.timestamp->month()) - 1];
    ++h.yearly_counts[static_cast<int>(fv.timestamp->year())];
    ++dated;
  }
  for (const auto& [y, c] : h.yearly_counts) {
    h.yearly_fraction[y] = static_cast<double>(c) / static_cast<double>(dated);
  }
  return h;
}

struct Point {
  double x;
  double y;
};

struct TrendFit {
  double slope = 0;
  double intercept = 0;
  double r = 0;  // Pearson correlation; 0 when y is constant
  std::size_t n = 0;
};

// Ordinary least squares y = slope * x + intercept.
inline TrendFit linear_trend(std::span<const Point> points) {
  const std::size_t n = points.size();
  if (n < 2) throw Error(ErrorCode::DegenerateX, "a trend needs at least two points");
  double mx = 0, my = 0;
  for (const auto& p : points) {
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& p : points) {
    const double dx = p.x - mx;
    const double dy = p.y - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0) throw Error(ErrorCode::DegenerateX, "all x values are identical");
  TrendFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r = syy == 0 ? 0.0 : std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return fit;
}

// Numeric fields of a FeatureVector usable as regression axes or grouping keys.
enum class Field { Year, Pages, Words, CommentWords, Packages, Newcommands, Theorems, Figures, Authors };

constexpr std::string_view to_string(Field f) noexcept {
  switch (f) {
    case Field::Year: return "year";
    case Field::Pages: return "pages";
    case Field::Words: return "words";
    case Field::CommentWords: return "comment_words";
    case Field::Packages: return "packages";
    case Field::Newcommands: return "newcommands";
    case Field::Theorems: return "theorems";
    case Field::Figures: return "figures";
    case Field::Authors: return "authors";
  }
  return "unknown";
}

inline std::optional<double> field_value(const FeatureVector& fv, Field f) {
  switch (f) {
    case Field::Year:
      if (!fv.timestamp) return std::nullopt;
      return static_cast<double>(static_cast<int>(fv.timestamp->year()));
    case Field::Pages:
      if (!fv.page_count) return std::nullopt;
      return static_cast<double>(*fv.page_count);
    case Field::Words: return static_cast<double>(fv.word_count);
    case Field::CommentWords: return static_cast<double>(fv.comment_word_count);
    case Field::Packages: return static_cast<double>(fv.package_count);
    case Field::Newcommands: return static_cast<double>(fv.newcommand_count);
    case Field::Theorems: return static_cast<double>(fv.theorem_count);
    case Field::Figures: return static_cast<double>(fv.figure_count);
    case Field::Authors: return static_cast<double>(fv.author_count);
  }
  return std::nullopt;
}

// (x, y) for every paper where both fields are present.
inline std::vector<Point> field_points(std::span<const FeatureVector> features, Field x, Field y) {
  std::vector<Point> out;
  for (const auto& fv : features) {
    auto vx = field_value(fv, x);
    auto vy = field_value(fv, y);
    if (vx && vy) out.push_back({*vx, *vy});
  }
  return out;
}

struct GroupMean {
  std::int64_t group;
  double mean;
  std::size_t n;

  friend bool operator==(const GroupMean&, const GroupMean&) = default;
};

// Mean of y per distinct integer x, in ascending x order.
inline std::vector<GroupMean> group_points(std::span<const Point> points) {
  std::map<std::int64_t, std::pair<double, std::size_t>> groups;
  for (const auto& p : points) {
    auto& g = groups[static_cast<std::int64_t>(std::llround(p.x))];
    g.first += p.y;
    ++g.second;
  }
  std::vector<GroupMean> out;
  for (const auto& [key, g] : groups) out.push_back({key, g.first / static_cast<double>(g.second), g.second});
  return out;
}

inline std::vector<GroupMean> grouped_means(std::span<const FeatureVector> features, Field group_by, Field value) {
  const auto points = field_points(features, group_by, value);
  return group_points(points);
}

// Group means as regression points (one point per group).
inline std::vector<Point> mean_points(std::span<const GroupMean> groups) {
  std::vector<Point> out;
  out.reserve(groups.size());
  for (const auto& g : groups) out.push_back({static_cast<double>(g.group), g.mean});
  return out;
}

}  // namespace texscope::stats
