#pragma once

// Compares extracted features and comments for the hand-labelled fixture corpus against the
// expected records. Returns one line per mismatch.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "texscope/features.hpp"
#include "texscope/harvest/corpus.hpp"
#include "texscope/io.hpp"

namespace golden {

using texscope::io::json;

inline std::vector<json> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

inline std::vector<std::string> diagnostic_codes(const std::vector<std::string>& diagnostics) {
  std::vector<std::string> out;
  for (const auto& d : diagnostics) out.push_back(d.substr(0, d.find(':')));
  std::sort(out.begin(), out.end());
  return out;
}

struct Outcome {
  std::size_t documents = 0;
  std::size_t fields_checked = 0;
  std::vector<std::string> mismatches;
};

inline Outcome compare(const std::filesystem::path& fixtures) {
  namespace ts = texscope;
  Outcome out;
  const auto corpus = ts::harvest::Corpus::open(fixtures / "golden_corpus");
  std::map<std::string, ts::features::DocumentAnalysis> analyses;
  ts::harvest::CorpusReader reader(corpus);
  while (auto entry = reader.next()) {
    if (!entry->document) {
      out.mismatches.push_back(entry->meta.record.id + ": no source files");
      continue;
    }
    analyses.emplace(entry->meta.record.id, ts::features::analyze_document(*entry->document));
  }

  for (const json& expected : read_lines(fixtures / "golden_features.ndjson")) {
    const std::string id = expected.at("id");
    ++out.documents;
    const auto it = analyses.find(id);
    if (it == analyses.end()) {
      out.mismatches.push_back(id + ": missing from corpus");
      continue;
    }
    const json actual = ts::io::to_json(it->second.features);
    for (const auto& [key, value] : expected.items()) {
      ++out.fields_checked;
      if (key == "diagnostic_codes") {
        const auto codes = diagnostic_codes(it->second.features.diagnostics);
        if (json(codes) != value) out.mismatches.push_back(id + ".diagnostics: got " + json(codes).dump() + ", want " + value.dump());
        continue;
      }
      const auto a = actual.find(key);
      if (a == actual.end() || *a != value) {
        out.mismatches.push_back(id + "." + key + ": got " + (a == actual.end() ? "<absent>" : a->dump()) + ", want " + value.dump());
      }
    }
    if (!expected.contains("pages") && actual.contains("pages")) out.mismatches.push_back(id + ".pages: unexpected");
  }

  std::map<std::string, std::vector<json>> want;
  for (const json& c : read_lines(fixtures / "golden_comments.ndjson")) want[c.at("doc_id")].push_back(c);
  for (const auto& [id, analysis] : analyses) {
    std::vector<json> got;
    for (const auto& c : analysis.comments) got.push_back(ts::io::to_json(id, c));
    const auto& w = want[id];
    out.fields_checked += w.size();
    if (got != w) {
      out.mismatches.push_back(id + ".comments: got " + json(got).dump() + ", want " + json(w).dump());
    }
  }
  return out;
}

}  // namespace golden
