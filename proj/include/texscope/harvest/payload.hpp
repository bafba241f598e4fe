#pragma once

// Source payload sniffing and gzip inflation.

#include <zlib.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "texscope/error.hpp"
#include "texscope/harvest/records.hpp"
#include "texscope/text.hpp"

namespace texscope::harvest {

inline constexpr std::uint64_t kDefaultSizeCap = 256ull * 1024 * 1024;

inline bool is_gzip(std::string_view bytes) {
  return bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0x1f &&
         static_cast<unsigned char>(bytes[1]) == 0x8b;
}

// Inflates a gzip stream (concatenated members included). Output beyond `cap` bytes raises
// SizeCapExceeded before it is buffered; with `prefix_only` the first `cap` bytes are returned
// instead.
inline std::string gunzip(std::string_view in, std::uint64_t cap = kDefaultSizeCap, bool prefix_only = false) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 32) != Z_OK) throw Error(ErrorCode::ArchiveCorrupt, "cannot initialise zlib");
  struct Guard {
    z_stream& z;
    ~Guard() { inflateEnd(&z); }
  } guard{zs};

  std::string out;
  char buf[64 * 1024];
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  for (;;) {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof buf;
    const int rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END && rc != Z_BUF_ERROR) {
      throw Error(ErrorCode::ArchiveCorrupt, std::string("gzip stream is corrupt: ") + (zs.msg ? zs.msg : "inflate failed"));
    }
    const std::size_t produced = sizeof buf - zs.avail_out;
    if (out.size() + produced > cap) {
      if (prefix_only) {
        out.append(buf, cap - out.size());
        break;
      }
      throw Error(ErrorCode::SizeCapExceeded, "decompressed payload exceeds " + std::to_string(cap) + " bytes");
    }
    out.append(buf, produced);
    if (rc == Z_STREAM_END) {
      if (zs.avail_in == 0) break;
      if (inflateReset(&zs) != Z_OK) throw Error(ErrorCode::ArchiveCorrupt, "cannot restart gzip member");
      continue;
    }
    if (rc == Z_BUF_ERROR || (produced == 0 && zs.avail_in == 0)) {
      throw Error(ErrorCode::ArchiveCorrupt, "gzip stream is truncated");
    }
  }
  return out;
}

// A ustar/GNU header at offset 0, or at least a block whose checksum is valid.
inline bool looks_like_tar(std::string_view bytes) {
  if (bytes.size() < 512) return false;
  if (bytes.substr(257, 5) == "ustar") return true;
  unsigned sum = 0;
  for (std::size_t i = 0; i < 512; ++i) {
    sum += (i >= 148 && i < 156) ? ' ' : static_cast<unsigned char>(bytes[i]);
  }
  std::string_view field = bytes.substr(148, 8);
  unsigned stored = 0;
  bool digits = false;
  for (char c : field) {
    if (c >= '0' && c <= '7') {
      stored = stored * 8 + static_cast<unsigned>(c - '0');
      digits = true;
    } else if (c != ' ' && c != '\0') {
      return false;
    }
  }
  return digits && stored == sum && bytes[0] != '\0';
}

inline bool looks_like_html(std::string_view bytes) {
  std::string_view s = text::trim(bytes.substr(0, 1024));
  if (s.substr(0, 3) == "\xEF\xBB\xBF") s = text::trim(s.substr(3));
  return text::starts_with_icase(s, "<!doctype html") || text::starts_with_icase(s, "<html") ||
         text::starts_with_icase(s, "<head") || text::starts_with_icase(s, "<body");
}

inline bool looks_like_docx(std::string_view bytes) {
  return bytes.substr(0, 4) == std::string_view("PK\x03\x04", 4) &&
         bytes.find("[Content_Types].xml") != std::string_view::npos;
}

// Text without NUL bytes that uses at least one control sequence.
inline bool looks_like_tex(std::string_view bytes) {
  const std::string_view head = bytes.substr(0, 64 * 1024);
  if (head.find('\0') != std::string_view::npos) return false;
  for (std::size_t i = 0; i + 1 < head.size(); ++i) {
    if (head[i] == '\\' && text::is_letter(head[i + 1])) return true;
  }
  return false;
}

namespace detail {

inline std::optional<FileType> type_from_content_type(std::string_view content_type) {
  std::string ct = text::to_lower(text::trim(content_type.substr(0, content_type.find(';'))));
  if (ct == "application/pdf") return FileType::Pdf;
  if (ct == "application/postscript") return FileType::Postscript;
  if (ct == "text/html") return FileType::TextHtml;
  if (ct == "application/vnd.openxmlformats-officedocument.wordprocessingml.document") return FileType::Docx;
  if (ct == "application/x-eprint") return FileType::XEprint;
  if (ct == "application/x-eprint-tar") return FileType::XEprintTar;
  return std::nullopt;
}

inline constexpr std::uint64_t kSniffBytes = 64 * 1024;

inline std::optional<FileType> type_from_bytes(std::string_view bytes, int depth) {
  if (bytes.substr(0, 4) == "%PDF") return FileType::Pdf;
  if (bytes.substr(0, 4) == "%!PS") return FileType::Postscript;
  if (is_gzip(bytes)) {
    if (depth > 0) return std::nullopt;
    const std::string inner = gunzip(bytes, kSniffBytes, true);
    if (looks_like_tar(inner)) return FileType::XEprintTar;
    return type_from_bytes(inner, depth + 1);
  }
  if (looks_like_tar(bytes)) return FileType::XEprintTar;
  if (looks_like_docx(bytes)) return FileType::Docx;
  if (looks_like_html(bytes)) return FileType::TextHtml;
  if (looks_like_tex(bytes)) return FileType::XEprint;
  return std::nullopt;
}

}  // namespace detail

// Content type first; generic or missing content types fall back to magic bytes.
inline FileType classify_payload(std::string_view bytes, std::string_view content_type = {}) {
  if (bytes.empty()) throw Error(ErrorCode::UnknownPayload, "empty payload");
  if (auto t = detail::type_from_content_type(content_type)) return *t;
  if (auto t = detail::type_from_bytes(bytes, 0)) return *t;
  throw Error(ErrorCode::UnknownPayload, "unrecognised payload (content type '" + std::string(content_type) + "')");
}

}  // namespace texscope::harvest
