#pragma once

// Syntactic comment extraction: '%' line comments and arguments of user macros that discard
// their argument (\newcommand{\hide}[1]{}).

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "texscope/error.hpp"
#include "texscope/lex.hpp"
#include "texscope/text.hpp"

namespace texscope::comments {

using lex::Token;
using lex::TokenKind;

enum class CommentKind { Line, Macro, Semantic };

constexpr std::string_view to_string(CommentKind k) noexcept {
  switch (k) {
    case CommentKind::Line: return "line";
    case CommentKind::Macro: return "macro";
    case CommentKind::Semantic: return "semantic";
  }
  return "unknown";
}

// A located comment. `first`/`last` are a 1-based closed byte interval, so the comment is
// source[first-1 .. last-1].
struct CommentSpan {
  CommentKind kind = CommentKind::Line;
  std::string macro;  // set for Macro comments
  std::size_t first = 0;
  std::size_t last = 0;
  std::string text;

  bool contains(const CommentSpan& other) const noexcept {
    return first <= other.first && other.last <= last;
  }

  friend bool operator==(const CommentSpan&, const CommentSpan&) = default;
};

// One span per LineComment token, in source order. The span covers the '%' and the comment
// text but not the terminating newline.
inline std::vector<CommentSpan> extract_line_comments(std::span<const Token> tokens) {
  std::vector<CommentSpan> out;
  for (const Token& t : tokens) {
    if (t.kind != TokenKind::LineComment) continue;
    CommentSpan span;
    span.kind = CommentKind::Line;
    span.first = t.begin + 1;
    // Token length is 1 ('%') + content + optional "\n".
    const bool newline_terminated = t.end - t.begin == t.text.size() + 2;
    span.last = newline_terminated ? t.end - 1 : t.end;
    span.text = t.text;
    out.push_back(std::move(span));
  }
  return out;
}

namespace detail {

inline bool is_blank(const Token& t) {
  return t.kind == TokenKind::Whitespace || t.kind == TokenKind::LineComment;
}

inline bool group_is_blank(std::span<const Token> tokens, const lex::Group& g) {
  for (std::size_t i = g.open + 1; i < g.close; ++i) {
    if (!is_blank(tokens[i])) return false;
  }
  return true;
}

// The command being defined: "{\name}" or "\name" right after the defining command.
inline std::optional<std::pair<std::string, std::size_t>> defined_name(std::span<const Token> tokens,
                                                                       std::size_t i) {
  i = lex::skip_blank(tokens, i);
  if (i >= tokens.size()) return std::nullopt;
  if (tokens[i].kind == TokenKind::Command) return std::pair{tokens[i].text, i + 1};
  if (tokens[i].kind != TokenKind::GroupOpen) return std::nullopt;
  auto g = lex::match_group(tokens, i);
  if (!g) return std::nullopt;
  std::optional<std::string> name;
  for (std::size_t k = g->open + 1; k < g->close; ++k) {
    if (is_blank(tokens[k])) continue;
    if (tokens[k].kind != TokenKind::Command || name) return std::nullopt;
    name = tokens[k].text;
  }
  if (!name) return std::nullopt;
  return std::pair{*name, g->close + 1};
}

struct Definition {
  std::string name;
  bool ignores_argument = false;
  bool overrides = false;  // \renewcommand and \def replace earlier definitions
};

// Parses "\newcommand{\N}[1]{}" and friends starting at the defining command at index i.
inline std::optional<Definition> parse_newcommand(std::span<const Token> tokens, std::size_t i) {
  Definition def;
  def.overrides = tokens[i].text == "renewcommand";
  std::size_t j = i + 1;
  if (j < tokens.size() && tokens[j].kind == TokenKind::Other && tokens[j].text == "*") ++j;
  auto name = defined_name(tokens, j);
  if (!name) return std::nullopt;
  def.name = name->first;
  j = lex::skip_blank(tokens, name->second);

  std::string arity;
  bool has_default = false;
  if (j < tokens.size() && tokens[j].kind == TokenKind::OptBracketOpen) {
    auto g = lex::match_group(tokens, j);
    if (!g) return def;
    arity = std::string(text::trim(lex::group_text(tokens, *g)));
    j = lex::skip_blank(tokens, g->close + 1);
    if (j < tokens.size() && tokens[j].kind == TokenKind::OptBracketOpen) {
      auto d = lex::match_group(tokens, j);
      if (!d) return def;
      has_default = true;
      j = d->close + 1;
    }
  }
  auto body = lex::next_group(tokens, j);
  def.ignores_argument = body && arity == "1" && !has_default && group_is_blank(tokens, *body);
  return def;
}

// Parses "\def\N#1{}" starting at the \def token at index i.
inline std::optional<Definition> parse_def(std::span<const Token> tokens, std::size_t i) {
  std::size_t j = i + 1;
  if (j >= tokens.size() || tokens[j].kind != TokenKind::Command) return std::nullopt;
  Definition def{tokens[j].text, false, true};
  ++j;
  std::string params;
  while (j < tokens.size() && tokens[j].kind != TokenKind::GroupOpen) {
    if (tokens[j].kind == TokenKind::Command) return def;
    params += tokens[j].text;
    ++j;
  }
  auto body = lex::match_group(tokens, j);
  def.ignores_argument = body && params == "#1" && group_is_blank(tokens, *body);
  return def;
}

inline bool is_definer(const Token& t) {
  return t.is_command("newcommand") || t.is_command("renewcommand") ||
         t.is_command("providecommand") || t.is_command("def") || t.is_command("gdef") ||
         t.is_command("let");
}

}  // namespace detail

// Names N of every macro defined as \newcommand{\N}[1]{}, \renewcommand{\N}[1]{} or \def\N#1{}.
// The first \newcommand/\providecommand of a name wins; \renewcommand and \def replace it.
inline std::set<std::string> detect_ignore_macros(std::span<const Token> tokens) {
  std::map<std::string, bool> defined;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.kind != TokenKind::Command) continue;
    std::optional<detail::Definition> def;
    if (t.text == "newcommand" || t.text == "renewcommand" || t.text == "providecommand") {
      def = detail::parse_newcommand(tokens, i);
    } else if (t.text == "def" || t.text == "gdef") {
      def = detail::parse_def(tokens, i);
    }
    if (!def) continue;
    auto it = defined.find(def->name);
    if (it == defined.end()) {
      defined.emplace(def->name, def->ignores_argument);
    } else if (def->overrides) {
      it->second = def->ignores_argument;
    }
  }
  std::set<std::string> out;
  for (const auto& [name, ignores] : defined) {
    if (ignores) out.insert(name);
  }
  return out;
}

// A "\N{...}" call of an ignore macro, as token indices.
struct Invocation {
  std::size_t command;
  std::size_t open;
  std::size_t close;
};

struct InvocationScan {
  std::vector<Invocation> invocations;  // outermost only, in source order
  std::vector<std::size_t> unbalanced;  // command indices whose argument never closes
};

inline InvocationScan find_invocations(std::span<const Token> tokens, const std::set<std::string>& macros) {
  InvocationScan scan;
  if (macros.empty()) return scan;
  std::size_t i = 0;
  while (i < tokens.size()) {
    const Token& t = tokens[i];
    if (t.kind != TokenKind::Command || !macros.contains(t.text)) {
      ++i;
      continue;
    }
    std::size_t prev = i;
    while (prev > 0 && detail::is_blank(tokens[prev - 1])) --prev;
    const bool at_definition =
        prev > 0 && (detail::is_definer(tokens[prev - 1]) ||
                     (tokens[prev - 1].kind == TokenKind::GroupOpen && prev >= 2 &&
                      detail::is_definer(tokens[prev - 2])));
    std::size_t open = lex::skip_blank(tokens, i + 1);
    if (at_definition || open >= tokens.size() || tokens[open].kind != TokenKind::GroupOpen) {
      ++i;
      continue;
    }
    auto g = lex::match_group(tokens, open);
    if (!g) {
      scan.unbalanced.push_back(i);
      ++i;
      continue;
    }
    scan.invocations.push_back(Invocation{i, g->open, g->close});
    i = g->close + 1;
  }
  return scan;
}

struct MacroComments {
  std::vector<CommentSpan> spans;
  Diagnostics diagnostics;
};

// One Macro span per outermost invocation of a macro in `ignore_macros`. The span covers the
// whole invocation "\N{...}"; the text is the brace-balanced argument.
inline MacroComments extract_macro_comments(std::string_view source, std::span<const Token> tokens,
                                            const std::set<std::string>& ignore_macros) {
  MacroComments out;
  const InvocationScan scan = find_invocations(tokens, ignore_macros);
  for (const Invocation& inv : scan.invocations) {
    CommentSpan span;
    span.kind = CommentKind::Macro;
    span.macro = tokens[inv.command].text;
    span.first = tokens[inv.command].begin + 1;
    span.last = tokens[inv.close].end;
    const std::size_t body = tokens[inv.open].end;
    span.text = std::string(source.substr(body, tokens[inv.close].begin - body));
    out.spans.push_back(std::move(span));
  }
  for (std::size_t cmd : scan.unbalanced) {
    out.diagnostics.push_back({ErrorCode::UnbalancedBraces,
                               "argument of \\" + tokens[cmd].text + " at byte " +
                                   std::to_string(tokens[cmd].begin) + " never closes"});
  }
  return out;
}

struct CommentStats {
  std::uint64_t word_count = 0;
  double word_fraction_of_paper = 0.0;
  std::uint64_t distinct_words = 0;

  friend bool operator==(const CommentStats&, const CommentStats&) = default;
};

// Words are maximal letter runs, case-folded; "\frac" contributes "frac".
inline CommentStats comment_stats(std::span<const CommentSpan> spans, std::uint64_t full_word_count) {
  CommentStats stats;
  text::WordCounts vocabulary;
  for (const auto& span : spans) {
    text::for_each_word(span.text, [&](std::string_view w) {
      ++stats.word_count;
      if (!vocabulary.contains(w)) vocabulary.emplace(std::string(w), 1);
    });
  }
  stats.distinct_words = vocabulary.size();
  const std::uint64_t total = stats.word_count + full_word_count;
  stats.word_fraction_of_paper =
      total == 0 ? 0.0 : static_cast<double>(stats.word_count) / static_cast<double>(total);
  return stats;
}

}  // namespace texscope::comments
