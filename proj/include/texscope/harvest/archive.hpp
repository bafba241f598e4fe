#pragma once

// Tar reading (ustar, GNU long names, pax path records) and payload unpacking into
// SourceDocuments. Every member path is checked before its data is accepted.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "texscope/error.hpp"
#include "texscope/harvest/payload.hpp"
#include "texscope/harvest/records.hpp"
#include "texscope/lex.hpp"
#include "texscope/paths.hpp"

namespace texscope::harvest {

struct UnpackLimits {
  std::uint64_t max_bytes = kDefaultSizeCap;  // total decompressed size
  std::size_t max_entries = 10000;

  friend bool operator==(const UnpackLimits&, const UnpackLimits&) = default;
};

enum class EntryKind { File, Directory, Link, Other };

struct TarEntry {
  std::string path;  // as stored, after long-name / pax overrides
  EntryKind kind = EntryKind::File;
  std::string data;
};

// Rejects absolute paths, drive letters, backslashes and ".." components. Returns the
// normalized relative path, or nullopt for names that normalize to nothing ("./").
inline std::optional<std::string> checked_member_path(std::string_view raw) {
  if (raw.empty()) return std::nullopt;
  if (raw.front() == '/' || raw.find('\\') != std::string_view::npos || (raw.size() >= 2 && raw[1] == ':') ||
      paths::has_parent_component(raw) || raw.find('\0') != std::string_view::npos) {
    throw Error(ErrorCode::PathTraversal, "archive member '" + std::string(raw) + "' escapes the archive root");
  }
  std::string_view trimmed = raw;
  while (!trimmed.empty() && trimmed.back() == '/') trimmed.remove_suffix(1);
  if (trimmed.empty() || trimmed == ".") return std::nullopt;
  return paths::normalize_relative(trimmed);
}

namespace detail {

inline std::string_view c_field(std::string_view block, std::size_t offset, std::size_t len) {
  std::string_view f = block.substr(offset, len);
  const auto nul = f.find('\0');
  return nul == std::string_view::npos ? f : f.substr(0, nul);
}

inline std::uint64_t numeric_field(std::string_view block, std::size_t offset, std::size_t len) {
  std::string_view f = block.substr(offset, len);
  if (!f.empty() && (static_cast<unsigned char>(f[0]) & 0x80)) {
    // GNU base-256
    std::uint64_t v = static_cast<unsigned char>(f[0]) & 0x7f;
    for (std::size_t i = 1; i < f.size(); ++i) {
      if (v >> 56) throw Error(ErrorCode::ArchiveCorrupt, "tar numeric field overflows");
      v = (v << 8) | static_cast<unsigned char>(f[i]);
    }
    return v;
  }
  std::uint64_t v = 0;
  bool any = false;
  for (char c : f) {
    if (c >= '0' && c <= '7') {
      if (v >> 60) throw Error(ErrorCode::ArchiveCorrupt, "tar numeric field overflows");
      v = v * 8 + static_cast<std::uint64_t>(c - '0');
      any = true;
    } else if (c == ' ' || c == '\0') {
      if (any) break;
    } else {
      throw Error(ErrorCode::ArchiveCorrupt, "bad character in tar numeric field");
    }
  }
  return v;
}

inline bool checksum_ok(std::string_view block) {
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < 512; ++i) {
    sum += (i >= 148 && i < 156) ? ' ' : static_cast<unsigned char>(block[i]);
  }
  return numeric_field(block, 148, 8) == sum;
}

inline bool zero_block(std::string_view block) {
  return block.find_first_not_of('\0') == std::string_view::npos;
}

// "len key=value\n" records; only path is used.
inline std::optional<std::string> pax_path(std::string_view data) {
  std::optional<std::string> path;
  std::size_t pos = 0;
  while (pos < data.size()) {
    const auto space = data.find(' ', pos);
    if (space == std::string_view::npos) break;
    std::size_t len = 0;
    for (std::size_t i = pos; i < space; ++i) {
      if (data[i] < '0' || data[i] > '9') throw Error(ErrorCode::ArchiveCorrupt, "bad pax record length");
      len = len * 10 + static_cast<std::size_t>(data[i] - '0');
    }
    if (len <= space - pos || pos + len > data.size()) throw Error(ErrorCode::ArchiveCorrupt, "bad pax record length");
    std::string_view record = data.substr(space + 1, pos + len - space - 1);
    if (!record.empty() && record.back() == '\n') record.remove_suffix(1);
    const auto eq = record.find('=');
    if (eq != std::string_view::npos && record.substr(0, eq) == "path") path = std::string(record.substr(eq + 1));
    pos += len;
  }
  return path;
}

}  // namespace detail

// Parses an uncompressed tar image. Paths are validated with checked_member_path as headers are
// read, so a hostile name fails before any later member is looked at.
inline std::vector<TarEntry> read_tar(std::string_view tar, const UnpackLimits& limits = {}) {
  std::vector<TarEntry> entries;
  std::optional<std::string> long_name;
  std::uint64_t total = 0;
  std::size_t headers = 0;
  std::size_t pos = 0;
  while (true) {
    if (pos == tar.size()) break;  // tolerate a missing end-of-archive marker
    if (tar.size() - pos < 512) throw Error(ErrorCode::ArchiveCorrupt, "truncated tar header");
    const std::string_view block = tar.substr(pos, 512);
    if (detail::zero_block(block)) break;
    if (!detail::checksum_ok(block)) throw Error(ErrorCode::ArchiveCorrupt, "tar header checksum mismatch");
    if (++headers > limits.max_entries * 2 + 16 || entries.size() >= limits.max_entries) {
      throw Error(ErrorCode::SizeCapExceeded, "archive has more than " + std::to_string(limits.max_entries) + " entries");
    }

    const std::uint64_t size = detail::numeric_field(block, 124, 12);
    const char type = block[156];
    pos += 512;
    if (size > tar.size() - pos) throw Error(ErrorCode::ArchiveCorrupt, "truncated tar member");
    total += size;
    if (total > limits.max_bytes) {
      throw Error(ErrorCode::SizeCapExceeded, "archive contents exceed " + std::to_string(limits.max_bytes) + " bytes");
    }
    const std::string_view data = tar.substr(pos, size);
    pos += (size + 511) / 512 * 512;
    if (pos > tar.size()) pos = tar.size();

    if (type == 'L') {
      long_name = std::string(detail::c_field(data, 0, data.size()));
      continue;
    }
    if (type == 'x') {
      if (auto p = detail::pax_path(data)) long_name = *p;
      continue;
    }
    if (type == 'g' || type == 'K') continue;

    std::string name;
    if (long_name) {
      name = std::move(*long_name);
      long_name.reset();
    } else {
      name = std::string(detail::c_field(block, 0, 100));
      if (block.substr(257, 5) == "ustar") {
        const std::string_view prefix = detail::c_field(block, 345, 155);
        if (!prefix.empty()) name = std::string(prefix) + "/" + name;
      }
    }
    checked_member_path(name);

    TarEntry e;
    e.path = std::move(name);
    switch (type) {
      case '0':
      case '\0':
      case '7':
        e.kind = EntryKind::File;
        e.data = std::string(data);
        break;
      case '5': e.kind = EntryKind::Directory; break;
      case '1':
      case '2': e.kind = EntryKind::Link; break;
      default: e.kind = EntryKind::Other; break;
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

// A single .tex payload or a tar (optionally gzipped) turned into a document. Link and special
// entries are skipped; later duplicates of a path replace earlier ones.
inline lex::SourceDocument unpack(std::string_view payload, FileType type, std::string id,
                                  const UnpackLimits& limits = {}) {
  lex::SourceDocument doc;
  doc.id = std::move(id);
  if (type == FileType::XEprint) {
    std::string bytes = is_gzip(payload) ? gunzip(payload, limits.max_bytes) : std::string(payload);
    if (bytes.size() > limits.max_bytes) {
      throw Error(ErrorCode::SizeCapExceeded, "payload exceeds " + std::to_string(limits.max_bytes) + " bytes");
    }
    doc.files.push_back({"main.tex", std::move(bytes)});
    doc.main_file = "main.tex";
    return doc;
  }
  if (type != FileType::XEprintTar) {
    throw Error(ErrorCode::InvalidArgument, std::string("cannot unpack a ") + std::string(to_string(type)) + " payload");
  }

  const std::string inflated = is_gzip(payload) ? gunzip(payload, limits.max_bytes) : std::string();
  const std::string_view tar = is_gzip(payload) ? std::string_view(inflated) : payload;
  std::map<std::string, std::string> files;
  for (auto& e : read_tar(tar, limits)) {
    if (e.kind != EntryKind::File) continue;
    auto path = checked_member_path(e.path);
    if (!path) continue;
    files[*path] = std::move(e.data);
  }
  if (files.empty()) throw Error(ErrorCode::ArchiveCorrupt, "archive contains no regular files");
  for (auto& [path, bytes] : files) doc.files.push_back({path, std::move(bytes)});
  doc.main_file = lex::detect_main_file(doc.files);
  return doc;
}

}  // namespace texscope::harvest
