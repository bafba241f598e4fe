#pragma once

#include <algorithm>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "texscope/date.hpp"
#include "texscope/error.hpp"

namespace texscope::harvest {

struct PaperRecord {
  std::string id;
  std::string title;
  std::string primary_category;
  std::vector<std::string> categories;  // includes primary_category
  std::optional<Date> submitted;
  std::optional<int> page_count;
  std::string comment;  // the free-text metadata comment, verbatim

  void validate() const {
    if (id.empty()) throw Error(ErrorCode::CorruptMeta, "paper record has an empty id");
    if (std::find(categories.begin(), categories.end(), primary_category) == categories.end()) {
      throw Error(ErrorCode::CorruptMeta, "primary category " + primary_category + " of " + id +
                                              " is not among its categories");
    }
  }

  friend bool operator==(const PaperRecord&, const PaperRecord&) = default;
};

enum class FileType { Pdf, Postscript, TextHtml, Docx, XEprint, XEprintTar };

constexpr std::string_view to_string(FileType t) noexcept {
  switch (t) {
    case FileType::Pdf: return "pdf";
    case FileType::Postscript: return "postscript";
    case FileType::TextHtml: return "text/html";
    case FileType::Docx: return "docx";
    case FileType::XEprint: return "x-eprint";
    case FileType::XEprintTar: return "x-eprint-tar";
  }
  return "unknown";
}

inline std::optional<FileType> parse_file_type(std::string_view s) {
  for (FileType t : {FileType::Pdf, FileType::Postscript, FileType::TextHtml, FileType::Docx, FileType::XEprint,
                     FileType::XEprintTar}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

// "<N> pages" in the free-text comment field. Several different counts are ambiguous and yield
// nothing.
inline std::optional<int> parse_page_count(std::string_view comment) {
  static const std::regex pattern(R"((^|[^0-9A-Za-z.])(\d{1,5})\s*pages?\b)", std::regex::icase);
  std::optional<int> found;
  const std::string s(comment);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), pattern); it != std::sregex_iterator(); ++it) {
    const int n = std::stoi((*it)[2].str());
    if (n < 1) continue;
    if (found && *found != n) return std::nullopt;
    found = n;
  }
  return found;
}

// Category strings look like "cs.AI", "math.AC", "hep-th" or "q-bio.NC".
inline bool valid_category(std::string_view c) {
  static const std::regex pattern(R"([a-z][a-z-]*(\.[A-Za-z][A-Za-z-]*)?)");
  return std::regex_match(c.begin(), c.end(), pattern);
}

}  // namespace texscope::harvest
