#pragma once

// Lexical handling of the relative paths found inside source archives.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace texscope::paths {

// Collapses "." and ".." components of a '/'-separated relative path. Returns nullopt when the
// path is absolute, uses a drive letter or backslashes, or climbs above its root.
inline std::optional<std::string> normalize_relative(std::string_view path) {
  if (path.empty() || path.front() == '/') return std::nullopt;
  if (path.find('\\') != std::string_view::npos) return std::nullopt;
  if (path.size() >= 2 && path[1] == ':') return std::nullopt;
  if (path.find('\0') != std::string_view::npos) return std::nullopt;

  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    std::size_t end = path.find('/', start);
    if (end == std::string_view::npos) end = path.size();
    std::string_view part = path.substr(start, end - start);
    if (part == "..") {
      if (parts.empty()) return std::nullopt;
      parts.pop_back();
    } else if (!part.empty() && part != ".") {
      parts.push_back(part);
    }
    start = end + 1;
  }
  if (parts.empty()) return std::nullopt;

  std::string out;
  for (std::string_view part : parts) {
    if (!out.empty()) out.push_back('/');
    out.append(part);
  }
  return out;
}

// True when any component of the raw path is "..".
inline bool has_parent_component(std::string_view path) {
  std::size_t start = 0;
  while (start <= path.size()) {
    std::size_t end = path.find_first_of("/\\", start);
    if (end == std::string_view::npos) end = path.size();
    if (path.substr(start, end - start) == "..") return true;
    start = end + 1;
  }
  return false;
}

inline std::string_view parent_dir(std::string_view path) {
  auto slash = path.rfind('/');
  return slash == std::string_view::npos ? std::string_view{} : path.substr(0, slash);
}

inline std::string join(std::string_view dir, std::string_view name) {
  if (dir.empty()) return std::string(name);
  std::string out(dir);
  out.push_back('/');
  out.append(name);
  return out;
}

}  // namespace texscope::paths
