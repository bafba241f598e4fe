#pragma once

// Record formats shared by the command-line tools: newline-delimited JSON with a schema header
// line, and CSV with a "#schema=..." first line. Both are byte-stable: object keys are sorted,
// floating-point values use the shortest round-trip form.

#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "texscope/comments.hpp"
#include "texscope/date.hpp"
#include "texscope/error.hpp"
#include "texscope/features.hpp"
#include "texscope/stats.hpp"

namespace texscope::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum class Format { Ndjson, Csv };

inline Format parse_format(std::string_view s) {
  if (s == "ndjson") return Format::Ndjson;
  if (s == "csv") return Format::Csv;
  throw Error(ErrorCode::InvalidArgument, "unknown format '" + std::string(s) + "' (expected ndjson or csv)");
}

inline json header(std::string_view schema) { return json{{"schema", schema}, {"version", kSchemaVersion}}; }

inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline void write_ndjson(std::ostream& out, std::string_view schema, const std::vector<json>& records) {
  out << header(schema).dump() << '\n';
  for (const auto& r : records) out << r.dump() << '\n';
}

namespace detail {

inline std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_number()) return v.dump();
  return v.dump();
}

inline std::string csv_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

// Columns are the sorted union of record keys; nested values are written as JSON text.
inline void write_csv(std::ostream& out, std::string_view schema, const std::vector<json>& records) {
  out << "#schema=" << schema << ",version=" << kSchemaVersion << '\n';
  std::set<std::string> keys;
  for (const auto& r : records) {
    for (const auto& [k, v] : r.items()) keys.insert(k);
  }
  bool first = true;
  for (const auto& k : keys) {
    out << (first ? "" : ",") << detail::csv_quote(k);
    first = false;
  }
  out << '\n';
  for (const auto& r : records) {
    first = true;
    for (const auto& k : keys) {
      const auto it = r.find(k);
      out << (first ? "" : ",") << detail::csv_quote(it == r.end() ? std::string() : detail::csv_cell(*it));
      first = false;
    }
    out << '\n';
  }
}

inline void write_records(std::ostream& out, Format format, std::string_view schema, const std::vector<json>& records) {
  if (format == Format::Ndjson) {
    write_ndjson(out, schema, records);
  } else {
    write_csv(out, schema, records);
  }
}

// Reads an ndjson stream whose first line is the header for `schema`.
inline std::vector<json> read_ndjson(std::istream& in, std::string_view schema) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::InvalidArgument, "empty input; expected a " + std::string(schema) + " header");
  json head;
  try {
    head = json::parse(line);
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidArgument, "first line is not a JSON header");
  }
  if (head.value("schema", "") != schema || head.value("version", 0) != kSchemaVersion) {
    throw Error(ErrorCode::InvalidArgument, "expected schema " + std::string(schema) + " version " +
                                                std::to_string(kSchemaVersion) + ", found " + line);
  }
  std::vector<json> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline constexpr std::string_view kFeaturesSchema = "texscope.features";
inline constexpr std::string_view kCommentsSchema = "texscope.comments";
inline constexpr std::string_view kWordsSchema = "texscope.words";
inline constexpr std::string_view kSummarySchema = "texscope.summary";
inline constexpr std::string_view kDiscriminativeSchema = "texscope.discriminative";
inline constexpr std::string_view kTrendsSchema = "texscope.trends";
inline constexpr std::string_view kClassifySchema = "texscope.classify";

inline json to_json(const features::FeatureVector& fv) {
  json j;
  j["id"] = fv.id;
  j["category"] = fv.category;
  j["timestamp"] = fv.timestamp ? json(format_date(*fv.timestamp)) : json();
  j["multi_file"] = fv.multi_file;
  j["files"] = fv.file_count;
  j["words"] = fv.word_count;
  j["comment_words"] = fv.comment_word_count;
  if (fv.page_count) j["pages"] = *fv.page_count;
  j["packages"] = fv.package_count;
  j["package_names"] = fv.package_names;
  j["newcommands"] = fv.newcommand_count;
  j["theorems"] = fv.theorem_count;
  j["theorem_like"] = fv.theorem_like_count;
  j["figures"] = fv.figure_count;
  j["figure_envs"] = fv.figure_env_count;
  j["authors"] = fv.author_count;
  j["graphicx_declared"] = fv.graphicx_declared;
  j["graphicx_used"] = fv.includegraphics_count > 0;
  j["epsfig_declared"] = fv.epsfig_declared;
  j["epsfig_used"] = fv.epsfig_cmd_count > 0;
  j["includegraphics"] = fv.includegraphics_count;
  j["epsfig_cmds"] = fv.epsfig_cmd_count;
  j["diagnostics"] = fv.diagnostics;
  return j;
}

inline features::FeatureVector feature_vector_from_json(const json& j) {
  try {
    features::FeatureVector fv;
    fv.id = j.at("id").get<std::string>();
    fv.category = j.at("category").get<std::string>();
    if (const auto it = j.find("timestamp"); it != j.end() && !it->is_null()) {
      fv.timestamp = parse_date(it->get<std::string>());
      if (!fv.timestamp) throw Error(ErrorCode::InvalidArgument, "bad timestamp in record " + fv.id);
    }
    fv.multi_file = j.at("multi_file").get<bool>();
    fv.file_count = j.at("files").get<std::uint64_t>();
    fv.word_count = j.at("words").get<std::uint64_t>();
    fv.comment_word_count = j.at("comment_words").get<std::uint64_t>();
    if (const auto it = j.find("pages"); it != j.end() && !it->is_null()) fv.page_count = it->get<int>();
    fv.package_count = j.at("packages").get<std::uint64_t>();
    fv.package_names = j.value("package_names", std::vector<std::string>{});
    fv.newcommand_count = j.at("newcommands").get<std::uint64_t>();
    fv.theorem_count = j.at("theorems").get<std::uint64_t>();
    fv.theorem_like_count = j.value("theorem_like", std::uint64_t{0});
    fv.figure_count = j.at("figures").get<std::uint64_t>();
    fv.figure_env_count = j.value("figure_envs", std::uint64_t{0});
    fv.author_count = j.at("authors").get<std::uint64_t>();
    fv.graphicx_declared = j.value("graphicx_declared", false);
    fv.epsfig_declared = j.value("epsfig_declared", false);
    fv.includegraphics_count = j.value("includegraphics", std::uint64_t{0});
    fv.epsfig_cmd_count = j.value("epsfig_cmds", std::uint64_t{0});
    fv.diagnostics = j.value("diagnostics", std::vector<std::string>{});
    return fv;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed feature record: ") + e.what());
  }
}

inline json to_json(std::string_view doc_id, const features::FileComment& c) {
  json j;
  j["doc_id"] = doc_id;
  j["file"] = c.file;
  j["kind"] = std::string(comments::to_string(c.span.kind));
  j["macro"] = c.span.macro;
  j["start"] = c.span.first;
  j["end"] = c.span.last;
  j["text"] = c.span.text;
  return j;
}

inline json to_json(const stats::DocumentVocabulary& v) {
  json j;
  j["id"] = v.id;
  j["category"] = v.category;
  j["text"] = json::object();
  for (const auto& [w, c] : v.text) j["text"][w] = c;
  j["comments"] = json::object();
  for (const auto& [w, c] : v.comments) j["comments"][w] = c;
  return j;
}

inline stats::DocumentVocabulary vocabulary_from_json(const json& j) {
  try {
    stats::DocumentVocabulary v;
    v.id = j.at("id").get<std::string>();
    v.category = j.at("category").get<std::string>();
    for (const auto& [w, c] : j.at("text").items()) v.text[w] = c.get<std::uint64_t>();
    for (const auto& [w, c] : j.at("comments").items()) v.comments[w] = c.get<std::uint64_t>();
    return v;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed word record: ") + e.what());
  }
}

inline json to_json(const stats::CategorySummary& s) {
  json j;
  j["category"] = s.category;
  j["papers"] = s.papers;
  j["fraction_multi_file"] = s.fraction_multi_file;
  j["fraction_no_comments"] = s.fraction_no_comments;
  j["mean_comment_words"] = s.mean_comment_words;
  j["fraction_no_packages"] = s.fraction_no_packages;
  j["mean_packages"] = s.mean_packages;
  j["fraction_using_newcommand"] = s.fraction_using_newcommand;
  j["mean_newcommands"] = s.mean_newcommands;
  j["fraction_with_theorems"] = s.fraction_with_theorems;
  j["mean_theorems"] = s.mean_theorems;
  j["mean_words"] = s.mean_words;
  j["papers_with_pages"] = s.papers_with_pages;
  j["mean_pages"] = s.mean_pages;
  j["mode_pages"] = s.mode_pages ? json(*s.mode_pages) : json();
  j["fraction_even_pages"] = s.fraction_even_pages;
  j["mean_authors"] = s.mean_authors;
  j["fraction_single_author"] = s.fraction_single_author;
  j["fraction_graphicx_declared"] = s.fraction_graphicx_declared;
  j["fraction_graphicx_unused"] = s.fraction_graphicx_unused;
  j["fraction_epsfig_declared"] = s.fraction_epsfig_declared;
  j["fraction_epsfig_unused"] = s.fraction_epsfig_unused;
  j["fraction_both_graphics"] = s.fraction_both_graphics;
  json pages = json::object();
  for (const auto& [p, c] : s.page_histogram) pages[std::to_string(p)] = c;
  j["page_histogram"] = pages;
  j["monthly_histogram"] = s.monthly_histogram;
  json years = json::object();
  for (const auto& [y, f] : s.yearly_fraction) years[std::to_string(y)] = f;
  j["yearly_fraction"] = years;
  return j;
}

}  // namespace texscope::io
