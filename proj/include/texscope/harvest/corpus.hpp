#pragma once

// Plain-file corpus store.
//
//   <root>/CORPUS_VERSION           "texscope-corpus 1"
//   <root>/<key>/meta.json          paper record, payload type, unpack outcome
//   <root>/<key>/payload.bin        raw payload as fetched (optional)
//   <root>/<key>/files/<path>       unpacked source files
//   <root>/quarantine/<key>/        entries whose meta.json could not be read
//
// <key> is the paper id with '/' replaced by '_'. An entry is written under a temporary name and
// renamed into place, so a present meta.json means the entry is complete.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "texscope/date.hpp"
#include "texscope/error.hpp"
#include "texscope/harvest/records.hpp"
#include "texscope/lex.hpp"
#include "texscope/paths.hpp"
#include "texscope/text.hpp"

namespace texscope::harvest {

namespace fs = std::filesystem;

inline constexpr std::string_view kCorpusVersion = "texscope-corpus 1";
inline constexpr int kMetaVersion = 1;

inline std::string corpus_key(std::string_view id) {
  std::string key(id);
  std::replace(key.begin(), key.end(), '/', '_');
  return key;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read " + p.string());
  return std::move(ss).str();
}

inline void write_file(const fs::path& p, std::string_view bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot create " + p.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + p.string());
}

// What is known about one stored paper.
struct StoredEntry {
  PaperRecord record;
  std::optional<FileType> file_type;
  std::string content_type;
  std::string main_file;            // set when the payload was unpacked
  std::vector<std::string> errors;  // fetch / classify / unpack failures

  friend bool operator==(const StoredEntry&, const StoredEntry&) = default;
};

inline nlohmann::json to_json(const StoredEntry& e) {
  nlohmann::json j;
  j["version"] = kMetaVersion;
  j["id"] = e.record.id;
  j["title"] = e.record.title;
  j["primary_category"] = e.record.primary_category;
  j["categories"] = e.record.categories;
  j["submitted"] = e.record.submitted ? nlohmann::json(format_date(*e.record.submitted)) : nlohmann::json();
  j["page_count"] = e.record.page_count ? nlohmann::json(*e.record.page_count) : nlohmann::json();
  j["comment"] = e.record.comment;
  j["file_type"] = e.file_type ? nlohmann::json(std::string(to_string(*e.file_type))) : nlohmann::json();
  j["content_type"] = e.content_type;
  j["main_file"] = e.main_file;
  j["errors"] = e.errors;
  return j;
}

inline StoredEntry entry_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw Error(ErrorCode::CorruptMeta, "meta record is not an object");
    if (j.value("version", 0) != kMetaVersion) throw Error(ErrorCode::CorruptMeta, "unsupported meta version");
    StoredEntry e;
    e.record.id = j.at("id").get<std::string>();
    e.record.title = j.value("title", "");
    e.record.primary_category = j.at("primary_category").get<std::string>();
    e.record.categories = j.value("categories", std::vector<std::string>{});
    if (e.record.categories.empty()) e.record.categories.push_back(e.record.primary_category);
    if (const auto it = j.find("submitted"); it != j.end() && !it->is_null()) {
      e.record.submitted = parse_date(it->get<std::string>());
      if (!e.record.submitted) throw Error(ErrorCode::CorruptMeta, "bad submitted date");
    }
    if (const auto it = j.find("page_count"); it != j.end() && !it->is_null()) {
      e.record.page_count = it->get<int>();
      if (*e.record.page_count < 1) throw Error(ErrorCode::CorruptMeta, "non-positive page count");
    }
    e.record.comment = j.value("comment", "");
    if (const auto it = j.find("file_type"); it != j.end() && !it->is_null()) {
      e.file_type = parse_file_type(it->get<std::string>());
      if (!e.file_type) throw Error(ErrorCode::CorruptMeta, "unknown file type " + it->dump());
    }
    e.content_type = j.value("content_type", "");
    e.main_file = j.value("main_file", "");
    e.errors = j.value("errors", std::vector<std::string>{});
    e.record.validate();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::CorruptMeta, ex.what());
  }
}

struct LoadedEntry {
  StoredEntry meta;
  std::optional<lex::SourceDocument> document;  // present when source files were stored
};

class Corpus {
 public:
  // Opens or creates the corpus rooted at `root`.
  static Corpus open(const fs::path& root, bool create = false) {
    std::error_code ec;
    if (create) {
      fs::create_directories(root, ec);
      if (ec) throw Error(ErrorCode::IoError, "cannot create " + root.string() + ": " + ec.message());
      if (!fs::exists(root / "CORPUS_VERSION")) write_file(root / "CORPUS_VERSION", std::string(kCorpusVersion) + "\n");
    }
    if (!fs::is_directory(root)) throw Error(ErrorCode::IoError, root.string() + " is not a corpus directory");
    const fs::path version = root / "CORPUS_VERSION";
    if (!fs::exists(version)) throw Error(ErrorCode::IoError, root.string() + " has no CORPUS_VERSION file");
    if (text::trim(read_file(version)) != kCorpusVersion) {
      throw Error(ErrorCode::IoError, "unsupported corpus version in " + version.string());
    }
    return Corpus(root);
  }

  const fs::path& root() const noexcept { return root_; }

  bool contains(std::string_view id) const { return fs::exists(root_ / corpus_key(id) / "meta.json"); }

  // Writes one entry. Existing entries are left untouched (returns false).
  bool store(const StoredEntry& meta, std::string_view payload, const lex::SourceDocument* doc) const {
    if (contains(meta.record.id)) return false;
    const std::string key = corpus_key(meta.record.id);
    const fs::path tmp = root_ / (".tmp-" + key);
    std::error_code ec;
    fs::remove_all(tmp, ec);
    fs::create_directories(tmp, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + tmp.string() + ": " + ec.message());
    if (!payload.empty()) write_file(tmp / "payload.bin", payload);
    if (doc != nullptr) {
      for (const auto& f : doc->files) {
        const auto rel = paths::normalize_relative(f.path);
        if (!rel || *rel != f.path) throw Error(ErrorCode::PathTraversal, "refusing to write '" + f.path + "'");
        const fs::path target = tmp / "files" / fs::path(*rel);
        fs::create_directories(target.parent_path(), ec);
        if (ec) throw Error(ErrorCode::IoError, "cannot create " + target.parent_path().string() + ": " + ec.message());
        write_file(target, f.bytes);
      }
    }
    write_file(tmp / "meta.json", to_json(meta).dump(2) + "\n");
    const fs::path final_dir = root_ / key;
    fs::remove_all(final_dir, ec);
    fs::rename(tmp, final_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot move entry into place: " + ec.message());
    return true;
  }

  // Entry keys in sorted order (quarantine and temporaries excluded).
  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    for (const auto& de : fs::directory_iterator(root_)) {
      const std::string name = de.path().filename().string();
      if (!de.is_directory() || name == "quarantine" || name.starts_with(".")) continue;
      out.push_back(name);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Reads one entry. Throws CorruptMeta for unreadable metadata.
  LoadedEntry load(std::string_view key) const {
    const fs::path dir = root_ / fs::path(std::string(key));
    const fs::path meta_path = dir / "meta.json";
    if (!fs::exists(meta_path)) throw Error(ErrorCode::CorruptMeta, std::string(key) + " has no meta.json");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(meta_path));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::CorruptMeta, std::string(key) + "/meta.json: " + ex.what());
    }
    LoadedEntry out;
    out.meta = entry_from_json(j);
    if (corpus_key(out.meta.record.id) != key) {
      throw Error(ErrorCode::CorruptMeta, std::string(key) + "/meta.json names id " + out.meta.record.id);
    }
    const fs::path files_dir = dir / "files";
    if (fs::is_directory(files_dir)) {
      lex::SourceDocument doc;
      doc.id = out.meta.record.id;
      doc.category = out.meta.record.primary_category;
      doc.timestamp = out.meta.record.submitted;
      doc.page_count = out.meta.record.page_count;
      for (const auto& de : fs::recursive_directory_iterator(files_dir)) {
        if (!de.is_regular_file() || de.is_symlink()) continue;
        doc.files.push_back({fs::relative(de.path(), files_dir).generic_string(), read_file(de.path())});
      }
      std::sort(doc.files.begin(), doc.files.end(),
                [](const lex::SourceFile& a, const lex::SourceFile& b) { return a.path < b.path; });
      if (!out.meta.main_file.empty() && doc.find(out.meta.main_file) != nullptr) doc.main_file = out.meta.main_file;
      if (!doc.files.empty()) out.document = std::move(doc);
    }
    return out;
  }

  // Moves an entry under quarantine/, replacing an earlier quarantined copy.
  void quarantine(std::string_view key) const {
    std::error_code ec;
    fs::create_directories(root_ / "quarantine", ec);
    const fs::path target = root_ / "quarantine" / fs::path(std::string(key));
    fs::remove_all(target, ec);
    fs::rename(root_ / fs::path(std::string(key)), target, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot quarantine " + std::string(key) + ": " + ec.message());
  }

 private:
  explicit Corpus(fs::path root) : root_(std::move(root)) {}

  fs::path root_;
};

// Streams entries one at a time. Corrupt entries become diagnostics (and are moved to
// quarantine/ when `quarantine` is set) instead of stopping the walk.
class CorpusReader {
 public:
  explicit CorpusReader(const Corpus& corpus, bool quarantine = false)
      : corpus_(corpus), keys_(corpus.keys()), quarantine_(quarantine) {}

  std::optional<LoadedEntry> next() {
    while (pos_ < keys_.size()) {
      const std::string& key = keys_[pos_++];
      try {
        return corpus_.load(key);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::CorruptMeta) throw;
        diagnostics_.push_back({ErrorCode::CorruptMeta, key + ": " + e.what()});
        if (quarantine_) corpus_.quarantine(key);
      }
    }
    return std::nullopt;
  }

  const Diagnostics& diagnostics() const noexcept { return diagnostics_; }

 private:
  const Corpus& corpus_;
  std::vector<std::string> keys_;
  bool quarantine_;
  std::size_t pos_ = 0;
  Diagnostics diagnostics_;
};

}  // namespace texscope::harvest
