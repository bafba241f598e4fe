#pragma once

// arXiv-style Atom listings: query URLs, feed parsing and pagination.

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "texscope/date.hpp"
#include "texscope/error.hpp"
#include "texscope/harvest/records.hpp"
#include "texscope/text.hpp"

namespace texscope::harvest {

struct DateRange {
  Date from;
  Date to;  // inclusive

  bool contains(const Date& d) const { return from <= d && d <= to; }
};

struct Cursor {
  std::uint64_t start = 0;

  friend bool operator==(const Cursor&, const Cursor&) = default;
};

struct FeedPage {
  std::vector<PaperRecord> entries;  // every entry in document order
  std::uint64_t total_results = 0;
  std::uint64_t start_index = 0;
};

// "http://arxiv.org/abs/1001.0001v2" -> "1001.0001"; "math/0501001v1" -> "math/0501001".
inline std::string normalize_paper_id(std::string_view raw) {
  std::string_view s = text::trim(raw);
  if (const auto abs = s.find("/abs/"); abs != std::string_view::npos) s.remove_prefix(abs + 5);
  std::size_t v = s.size();
  while (v > 0 && s[v - 1] >= '0' && s[v - 1] <= '9') --v;
  if (v > 0 && v < s.size() && s[v - 1] == 'v') s = s.substr(0, v - 1);
  return std::string(s);
}

namespace detail {

namespace pt = boost::property_tree;

inline std::string collapse_spaces(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : text::trim(s)) {
    if (text::is_space(c)) {
      pending = true;
      continue;
    }
    if (pending && !out.empty()) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

inline std::uint64_t parse_count(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(std::string(text::trim(s)), &used);
    if (used != text::trim(s).size()) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::FeedParseError, std::string("bad ") + what + " '" + s + "'");
  }
}

inline PaperRecord parse_entry(const pt::ptree& entry) {
  PaperRecord r;
  r.id = normalize_paper_id(entry.get<std::string>("id", ""));
  if (r.id.empty()) throw Error(ErrorCode::FeedParseError, "entry without an id");
  r.title = collapse_spaces(entry.get<std::string>("title", ""));
  r.comment = collapse_spaces(entry.get<std::string>("arxiv:comment", ""));
  if (!r.comment.empty()) r.page_count = parse_page_count(r.comment);
  const std::string published = entry.get<std::string>("published", "");
  if (!published.empty()) {
    r.submitted = parse_date(published);
    if (!r.submitted) throw Error(ErrorCode::FeedParseError, "bad published date '" + published + "' in " + r.id);
  }
  for (const auto& [key, child] : entry) {
    if (key == "category") {
      const std::string term = child.get<std::string>("<xmlattr>.term", "");
      if (!term.empty() && std::find(r.categories.begin(), r.categories.end(), term) == r.categories.end()) {
        r.categories.push_back(term);
      }
    }
  }
  r.primary_category = entry.get<std::string>("arxiv:primary_category.<xmlattr>.term", "");
  if (r.primary_category.empty()) {
    if (r.categories.empty()) throw Error(ErrorCode::FeedParseError, "entry " + r.id + " has no category");
    r.primary_category = r.categories.front();
  }
  if (std::find(r.categories.begin(), r.categories.end(), r.primary_category) == r.categories.end()) {
    r.categories.insert(r.categories.begin(), r.primary_category);
  }
  return r;
}

}  // namespace detail

inline FeedPage parse_feed(std::string_view xml) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::FeedParseError, e.what());
  }
  const auto feed = tree.get_child_optional("feed");
  if (!feed) throw Error(ErrorCode::FeedParseError, "document has no <feed> root");

  FeedPage page;
  for (const auto& [key, child] : *feed) {
    if (key == "entry") {
      // An API error is reported as a single entry titled "Error".
      if (child.get<std::string>("title", "") == "Error" && !child.get_child_optional("arxiv:primary_category")) {
        throw Error(ErrorCode::FeedParseError, "API error: " + detail::collapse_spaces(child.get<std::string>("summary", "")));
      }
      page.entries.push_back(detail::parse_entry(child));
    }
  }
  const std::string total = feed->get<std::string>("opensearch:totalResults", "");
  page.total_results = total.empty() ? page.entries.size() : detail::parse_count(total, "totalResults");
  const std::string start = feed->get<std::string>("opensearch:startIndex", "");
  page.start_index = start.empty() ? 0 : detail::parse_count(start, "startIndex");
  return page;
}

// Cursor for the page after `page`, or nullopt when the listing is exhausted.
inline std::optional<Cursor> next_cursor(const FeedPage& page) {
  if (page.entries.empty()) return std::nullopt;
  const std::uint64_t next = page.start_index + page.entries.size();
  if (next >= page.total_results) return std::nullopt;
  return Cursor{next};
}

struct ListingQuery {
  std::string category;
  std::optional<DateRange> range;
  std::size_t page_size = 100;
};

namespace detail {

inline std::string compact_date(const Date& d, bool end) {
  std::string s = format_date(d);
  s.erase(std::remove(s.begin(), s.end(), '-'), s.end());
  return s + (end ? "2359" : "0000");
}

}  // namespace detail

inline std::string listing_url(std::string_view base, const ListingQuery& q, const Cursor& cursor) {
  std::string url(base);
  url += "?search_query=cat:" + q.category;
  if (q.range) {
    url += "+AND+submittedDate:%5B" + detail::compact_date(q.range->from, false) + "+TO+" +
           detail::compact_date(q.range->to, true) + "%5D";
  }
  url += "&start=" + std::to_string(cursor.start) + "&max_results=" + std::to_string(q.page_size);
  url += "&sortBy=submittedDate&sortOrder=ascending";
  return url;
}

// Keeps entries whose primary category is the requested one (so a cross-listed paper is captured
// once, under its primary category), inside the date window, and not seen on an earlier page.
class ListingFilter {
 public:
  explicit ListingFilter(ListingQuery query) : query_(std::move(query)) {}

  std::vector<PaperRecord> accept(const FeedPage& page) {
    std::vector<PaperRecord> out;
    for (const auto& r : page.entries) {
      if (r.primary_category != query_.category) continue;
      if (query_.range && r.submitted && !query_.range->contains(*r.submitted)) continue;
      if (!seen_.insert(r.id).second) continue;
      out.push_back(r);
    }
    return out;
  }

  const ListingQuery& query() const noexcept { return query_; }

 private:
  ListingQuery query_;
  std::set<std::string> seen_;
};

}  // namespace texscope::harvest
