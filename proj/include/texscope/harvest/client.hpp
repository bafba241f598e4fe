#pragma once

// Rate-limited fetching and the harvest loop. The transport is a plain function so tests can
// replay recorded responses.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "texscope/error.hpp"
#include "texscope/harvest/archive.hpp"
#include "texscope/harvest/corpus.hpp"
#include "texscope/harvest/feed.hpp"
#include "texscope/harvest/payload.hpp"

namespace texscope::harvest {

struct HttpResponse {
  int status = 0;
  std::string body;
  std::string content_type;
  std::optional<std::chrono::milliseconds> retry_after;
};

using Transport = std::function<HttpResponse(const std::string& url)>;
using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct ClientConfig {
  std::string api_base = "https://export.arxiv.org/api/query";
  std::string source_base = "https://arxiv.org/e-print/";
  std::string user_agent = "texscope/1.0 (source-statistics research client)";
  std::chrono::milliseconds delay{3000};  // between consecutive requests
  int max_retries = 4;                    // on 429 / 503
  std::size_t page_size = 100;
  UnpackLimits limits;

  // TEXSCOPE_API_BASE and TEXSCOPE_RATE_LIMIT (seconds) override the defaults.
  static ClientConfig from_env() {
    ClientConfig c;
    if (const char* base = std::getenv("TEXSCOPE_API_BASE"); base != nullptr && *base != '\0') c.api_base = base;
    if (const char* rate = std::getenv("TEXSCOPE_RATE_LIMIT"); rate != nullptr && *rate != '\0') {
      char* end = nullptr;
      const double seconds = std::strtod(rate, &end);
      if (end == rate || *end != '\0' || !(seconds >= 0)) {
        throw Error(ErrorCode::InvalidArgument, std::string("TEXSCOPE_RATE_LIMIT is not a number of seconds: ") + rate);
      }
      c.delay = std::chrono::milliseconds(static_cast<std::int64_t>(seconds * 1000));
    }
    return c;
  }
};

inline Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

// At most one request in flight, `delay` between requests, exponential backoff on 429/503.
class PoliteClient {
 public:
  PoliteClient(Transport transport, ClientConfig config, Sleeper sleeper = real_sleeper())
      : transport_(std::move(transport)), config_(std::move(config)), sleep_(std::move(sleeper)) {}

  HttpResponse get(const std::string& url) {
    std::chrono::milliseconds backoff = std::max(config_.delay, std::chrono::milliseconds(1000));
    for (int attempt = 0;; ++attempt) {
      wait_turn();
      HttpResponse r = transport_(url);
      last_ = Clock::now();
      ++requests_;
      if (r.status == 429 || r.status == 503) {
        if (attempt >= config_.max_retries) {
          throw Error(ErrorCode::RateLimited, "server kept refusing " + url + " (status " + std::to_string(r.status) + ")");
        }
        sleep_(r.retry_after.value_or(backoff));
        backoff *= 2;
        continue;
      }
      if (r.status < 200 || r.status >= 300) {
        throw Error(ErrorCode::HttpError, "status " + std::to_string(r.status) + " for " + url);
      }
      return r;
    }
  }

  std::uint64_t requests() const noexcept { return requests_; }
  const ClientConfig& config() const noexcept { return config_; }

 private:
  using Clock = std::chrono::steady_clock;

  void wait_turn() {
    if (!last_) return;
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - *last_);
    if (elapsed < config_.delay) sleep_(config_.delay - elapsed);
  }

  Transport transport_;
  ClientConfig config_;
  Sleeper sleep_;
  std::optional<Clock::time_point> last_;
  std::uint64_t requests_ = 0;
};

struct ListingResult {
  std::vector<PaperRecord> records;
  std::optional<Cursor> next;
};

// One page of a listing, filtered to the query's primary category and deduplicated against
// earlier pages seen by `filter`.
inline ListingResult query_listing(PoliteClient& client, ListingFilter& filter, const Cursor& cursor = {}) {
  ListingQuery q = filter.query();
  q.page_size = client.config().page_size;
  const HttpResponse r = client.get(listing_url(client.config().api_base, q, cursor));
  const FeedPage page = parse_feed(r.body);
  return {filter.accept(page), next_cursor(page)};
}

struct HarvestOptions {
  ListingQuery query;
  std::optional<std::size_t> max_papers;
};

struct HarvestSummary {
  std::size_t listed = 0;
  std::size_t fetched = 0;
  std::size_t skipped = 0;  // already in the corpus
  std::size_t unpacked = 0;
  Diagnostics diagnostics;
};

// Fetches one paper's source and turns it into a stored entry. Classification and unpack
// failures are recorded in the entry rather than thrown.
inline void fetch_and_store(PoliteClient& client, const Corpus& corpus, const PaperRecord& record,
                            HarvestSummary& summary) {
  const HttpResponse r = client.get(client.config().source_base + record.id);
  ++summary.fetched;
  StoredEntry entry;
  entry.record = record;
  entry.content_type = r.content_type;
  std::optional<lex::SourceDocument> doc;
  try {
    entry.file_type = classify_payload(r.body, r.content_type);
    if (*entry.file_type == FileType::XEprint || *entry.file_type == FileType::XEprintTar) {
      doc = unpack(r.body, *entry.file_type, record.id, client.config().limits);
      entry.main_file = doc->main_file;
      ++summary.unpacked;
    }
  } catch (const Error& e) {
    entry.errors.push_back(e.what());
    summary.diagnostics.push_back({e.code(), record.id + ": " + e.what()});
  }
  corpus.store(entry, r.body, doc ? &*doc : nullptr);
}

inline HarvestSummary harvest(PoliteClient& client, const Corpus& corpus, const HarvestOptions& options) {
  HarvestSummary summary;
  ListingFilter filter(options.query);
  std::optional<Cursor> cursor = Cursor{};
  while (cursor) {
    ListingResult page = query_listing(client, filter, *cursor);
    for (const auto& record : page.records) {
      if (options.max_papers && summary.listed >= *options.max_papers) return summary;
      ++summary.listed;
      if (corpus.contains(record.id)) {
        ++summary.skipped;
        continue;
      }
      try {
        fetch_and_store(client, corpus, record, summary);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::HttpError) throw;
        summary.diagnostics.push_back({e.code(), record.id + ": " + e.what()});
      }
    }
    cursor = page.next;
  }
  return summary;
}

}  // namespace texscope::harvest
