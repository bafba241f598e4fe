#pragma once

// Lossless LaTeX tokenizer and the source-document model it operates on.
//
// Category codes are the fixed standard LaTeX ones; \catcode changes are not tracked.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "texscope/date.hpp"
#include "texscope/error.hpp"
#include "texscope/paths.hpp"
#include "texscope/text.hpp"

namespace texscope::lex {

enum class TokenKind : std::uint8_t {
  Command,          // "\name" or "\<one non-letter byte>"; text holds the name
  LineComment,      // "%..." up to and including the newline; text excludes both
  Word,             // maximal run of ASCII letters
  GroupOpen,        // {
  GroupClose,       // }
  OptBracketOpen,   // [
  OptBracketClose,  // ]
  MathShift,        // $
  Whitespace,       // run of blanks and newlines
  Other,            // any other single byte
};

struct Token {
  TokenKind kind;
  std::size_t begin;  // byte offsets into the source, [begin, end)
  std::size_t end;
  std::string text;

  bool is(TokenKind k) const noexcept { return kind == k; }
  bool is_command(std::string_view name) const noexcept {
    return kind == TokenKind::Command && text == name;
  }
  bool is_letter_command() const noexcept {
    return kind == TokenKind::Command && !text.empty() && text::is_letter(text.front());
  }

  friend bool operator==(const Token&, const Token&) = default;
};

// Environments whose bodies are copied verbatim by LaTeX.
inline constexpr std::array<std::string_view, 3> kVerbatimEnvironments = {"verbatim", "verbatim*",
                                                                          "lstlisting"};

namespace detail {

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    while (pos_ < src_.size()) step();
    return std::move(out_);
  }

 private:
  void push(TokenKind kind, std::size_t begin, std::size_t end, std::string text) {
    out_.push_back(Token{kind, begin, end, std::move(text)});
  }

  void push_raw(TokenKind kind, std::size_t begin, std::size_t end) {
    push(kind, begin, end, std::string(src_.substr(begin, end - begin)));
  }

  std::size_t letter_run_end(std::size_t from) const {
    while (from < src_.size() && text::is_letter(src_[from])) ++from;
    return from;
  }

  std::size_t space_run_end(std::size_t from) const {
    while (from < src_.size() && text::is_space(src_[from])) ++from;
    return from;
  }

  void step() {
    const char c = src_[pos_];
    const std::size_t begin = pos_;
    if (c == '\\') {
      lex_command();
    } else if (c == '%') {
      std::size_t nl = src_.find('\n', pos_);
      std::size_t end = nl == std::string_view::npos ? src_.size() : nl + 1;
      std::size_t content_end = nl == std::string_view::npos ? src_.size() : nl;
      push(TokenKind::LineComment, begin, end,
           std::string(src_.substr(pos_ + 1, content_end - pos_ - 1)));
      pos_ = end;
    } else if (text::is_letter(c)) {
      pos_ = letter_run_end(pos_);
      push_raw(TokenKind::Word, begin, pos_);
    } else if (text::is_space(c)) {
      pos_ = space_run_end(pos_);
      push_raw(TokenKind::Whitespace, begin, pos_);
    } else {
      TokenKind kind = TokenKind::Other;
      switch (c) {
        case '{': kind = TokenKind::GroupOpen; break;
        case '}': kind = TokenKind::GroupClose; break;
        case '[': kind = TokenKind::OptBracketOpen; break;
        case ']': kind = TokenKind::OptBracketClose; break;
        case '$': kind = TokenKind::MathShift; break;
        default: break;
      }
      ++pos_;
      push_raw(kind, begin, pos_);
    }
  }

  void lex_command() {
    const std::size_t begin = pos_;
    if (pos_ + 1 >= src_.size()) {
      ++pos_;
      push_raw(TokenKind::Other, begin, pos_);
      return;
    }
    std::size_t name_end = text::is_letter(src_[pos_ + 1]) ? letter_run_end(pos_ + 1) : pos_ + 2;
    std::string name(src_.substr(pos_ + 1, name_end - pos_ - 1));
    pos_ = name_end;
    push(TokenKind::Command, begin, pos_, name);
    if (name == "verb") {
      lex_verb();
    } else if (name == "begin") {
      lex_verbatim_environment();
    }
  }

  // Body text of a verbatim region: words, blanks and single bytes only.
  void lex_raw_region(std::size_t begin, std::size_t end) {
    std::size_t p = begin;
    while (p < end) {
      const std::size_t start = p;
      if (text::is_letter(src_[p])) {
        while (p < end && text::is_letter(src_[p])) ++p;
        push_raw(TokenKind::Word, start, p);
      } else if (text::is_space(src_[p])) {
        while (p < end && text::is_space(src_[p])) ++p;
        push_raw(TokenKind::Whitespace, start, p);
      } else {
        ++p;
        push_raw(TokenKind::Other, start, p);
      }
    }
  }

  // \verb<d>...<d> and \verb*<d>...<d>; an unterminated body stops at the end of the line.
  void lex_verb() {
    std::size_t p = pos_;
    if (p < src_.size() && src_[p] == '*') ++p;
    if (p >= src_.size()) return;
    const char delim = src_[p];
    if (text::is_letter(delim) || text::is_space(delim)) return;
    if (p > pos_) push_raw(TokenKind::Other, pos_, p);
    push_raw(TokenKind::Other, p, p + 1);
    const std::size_t body = p + 1;
    std::size_t close = body;
    while (close < src_.size() && src_[close] != delim && src_[close] != '\n') ++close;
    lex_raw_region(body, close);
    if (close < src_.size() && src_[close] == delim) {
      push_raw(TokenKind::Other, close, close + 1);
      pos_ = close + 1;
    } else {
      pos_ = close;
    }
  }

  // Called right after "\begin": if a verbatim environment opens here, its header is lexed
  // normally and its body as a raw region up to the matching "\end{name}".
  void lex_verbatim_environment() {
    std::size_t p = pos_;
    while (p < src_.size() && (src_[p] == ' ' || src_[p] == '\t')) ++p;
    if (p >= src_.size() || src_[p] != '{') return;
    const std::size_t close = src_.find('}', p);
    if (close == std::string_view::npos) return;
    const std::string_view env = src_.substr(p + 1, close - p - 1);
    if (std::find(kVerbatimEnvironments.begin(), kVerbatimEnvironments.end(), env) ==
        kVerbatimEnvironments.end()) {
      return;
    }
    if (p > pos_) push_raw(TokenKind::Whitespace, pos_, p);
    push_raw(TokenKind::GroupOpen, p, p + 1);
    lex_raw_region(p + 1, close);
    push_raw(TokenKind::GroupClose, close, close + 1);

    const std::string terminator = "\\end{" + std::string(env) + "}";
    std::size_t body_end = src_.find(terminator, close + 1);
    if (body_end == std::string_view::npos) body_end = src_.size();
    lex_raw_region(close + 1, body_end);
    pos_ = body_end;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::vector<Token> out_;
};

}  // namespace detail

// Total and lossless: the concatenated token spans reproduce `source` byte for byte.
inline std::vector<Token> tokenize(std::string_view source) {
  return detail::Lexer(source).run();
}

// The exact source bytes a token was lexed from.
inline std::string_view raw(std::string_view source, const Token& t) {
  return source.substr(t.begin, t.end - t.begin);
}

// Token-stream cursor helpers used by the extractors.

inline std::size_t skip_blank(std::span<const Token> tokens, std::size_t i) {
  while (i < tokens.size() &&
         (tokens[i].kind == TokenKind::Whitespace || tokens[i].kind == TokenKind::LineComment)) {
    ++i;
  }
  return i;
}

struct Group {
  std::size_t open;   // index of the opening token
  std::size_t close;  // index of the matching closing token
};

// Matches the group opening at `open` (a GroupOpen or OptBracketOpen token).
inline std::optional<Group> match_group(std::span<const Token> tokens, std::size_t open) {
  if (open >= tokens.size()) return std::nullopt;
  const TokenKind o = tokens[open].kind;
  if (o != TokenKind::GroupOpen && o != TokenKind::OptBracketOpen) return std::nullopt;
  const TokenKind c = o == TokenKind::GroupOpen ? TokenKind::GroupClose : TokenKind::OptBracketClose;
  std::size_t depth = 0;
  for (std::size_t i = open; i < tokens.size(); ++i) {
    if (tokens[i].kind == o) {
      ++depth;
    } else if (tokens[i].kind == c) {
      if (--depth == 0) return Group{open, i};
    }
  }
  return std::nullopt;
}

// Text of the tokens strictly inside `g`, with comments dropped and command names restored.
inline std::string group_text(std::span<const Token> tokens, const Group& g) {
  std::string out;
  for (std::size_t i = g.open + 1; i < g.close; ++i) {
    const Token& t = tokens[i];
    if (t.kind == TokenKind::LineComment) continue;
    if (t.kind == TokenKind::Command) out.push_back('\\');
    out.append(t.text);
  }
  return out;
}

// Reads the mandatory `{...}` argument following position `i` (blanks skipped).
inline std::optional<Group> next_group(std::span<const Token> tokens, std::size_t i) {
  i = skip_blank(tokens, i);
  if (i >= tokens.size() || tokens[i].kind != TokenKind::GroupOpen) return std::nullopt;
  return match_group(tokens, i);
}

// Environment name of a "\begin{name}" / "\end{name}" at index i.
inline std::optional<std::string> environment_name(std::span<const Token> tokens, std::size_t i) {
  auto g = next_group(tokens, i + 1);
  if (!g) return std::nullopt;
  return std::string(text::trim(group_text(tokens, *g)));
}

// Target of an "\input{x}", "\include{x}" or bare "\input x" command at index i.
inline std::optional<std::string> input_target(std::span<const Token> tokens, std::size_t i) {
  if (auto g = next_group(tokens, i + 1)) {
    auto name = std::string(text::trim(group_text(tokens, *g)));
    if (name.empty()) return std::nullopt;
    return name;
  }
  if (!tokens[i].is_command("input")) return std::nullopt;
  std::size_t j = i + 1;
  while (j < tokens.size() && tokens[j].kind == TokenKind::Whitespace) ++j;
  std::string name;
  while (j < tokens.size() && (tokens[j].kind == TokenKind::Word || tokens[j].kind == TokenKind::Other)) {
    name += tokens[j].text;
    ++j;
  }
  if (name.empty()) return std::nullopt;
  return name;
}

inline bool is_input_command(const Token& t) {
  return t.is_command("input") || t.is_command("include");
}

struct SourceFile {
  std::string path;  // relative, '/'-separated
  std::string bytes;

  friend bool operator==(const SourceFile&, const SourceFile&) = default;
};

// One paper: all of its source files plus harvest metadata.
struct SourceDocument {
  std::string id;
  std::vector<SourceFile> files;
  std::string main_file;  // empty until detected
  std::optional<Date> timestamp;
  std::string category;
  std::optional<int> page_count;

  const SourceFile* find(std::string_view path) const {
    for (const auto& f : files) {
      if (f.path == path) return &f;
    }
    return nullptr;
  }

  bool multi_file() const noexcept { return files.size() > 1; }

  // Throws InvalidArgument when the model invariants do not hold.
  void validate() const {
    if (!main_file.empty() && find(main_file) == nullptr) {
      throw Error(ErrorCode::InvalidArgument, "main file '" + main_file + "' is not part of document " + id);
    }
    if (page_count && *page_count < 1) {
      throw Error(ErrorCode::InvalidArgument, "page count must be positive in document " + id);
    }
  }
};

// Finds the file an \input / \include argument names. LaTeX resolves relative to the directory
// of the main file; the including file's directory is tried second. The ".tex" extension is
// optional.
inline const SourceFile* resolve_input(std::span<const SourceFile> files, std::string_view main_dir,
                                       std::string_view including_dir, std::string_view target) {
  for (std::string_view dir : {main_dir, including_dir}) {
    for (const std::string& candidate :
         {paths::join(dir, target), paths::join(dir, std::string(target) + ".tex")}) {
      auto norm = paths::normalize_relative(candidate);
      if (!norm) continue;
      for (const auto& f : files) {
        if (f.path == *norm) return &f;
      }
    }
  }
  return nullptr;
}

inline bool declares_document_class(std::span<const Token> tokens) {
  return std::any_of(tokens.begin(), tokens.end(), [](const Token& t) {
    return t.is_command("documentclass") || t.is_command("documentstyle");
  });
}

// The file holding \documentclass or \documentstyle. Ties go to the candidate included by the
// fewest other files, then to the lexicographically smallest path.
inline std::string detect_main_file(std::span<const SourceFile> files) {
  if (files.empty()) throw Error(ErrorCode::InvalidArgument, "document has no files");

  std::vector<std::vector<Token>> token_lists;
  token_lists.reserve(files.size());
  for (const auto& f : files) token_lists.push_back(tokenize(f.bytes));

  std::vector<std::size_t> included_by(files.size(), 0);
  for (std::size_t src = 0; src < files.size(); ++src) {
    std::vector<bool> seen(files.size(), false);
    const auto& toks = token_lists[src];
    const std::string_view dir = paths::parent_dir(files[src].path);
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (!is_input_command(toks[i])) continue;
      auto target = input_target(toks, i);
      if (!target) continue;
      const SourceFile* f = resolve_input(files, "", dir, *target);
      if (f == nullptr) continue;
      const auto idx = static_cast<std::size_t>(f - files.data());
      if (idx != src && !seen[idx]) {
        seen[idx] = true;
        ++included_by[idx];
      }
    }
  }

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!declares_document_class(token_lists[i])) continue;
    if (!best || included_by[i] < included_by[*best] ||
        (included_by[i] == included_by[*best] && files[i].path < files[*best].path)) {
      best = i;
    }
  }
  if (!best) throw Error(ErrorCode::NoMainFile, "no file contains \\documentclass or \\documentstyle");
  return files[*best].path;
}

}  // namespace texscope::lex
