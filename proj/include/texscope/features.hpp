#pragma once

// Per-document structural features: packages, graphics usage, theorems, authors, macro
// definitions and word counts, gathered into one FeatureVector per paper.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "texscope/comments.hpp"
#include "texscope/date.hpp"
#include "texscope/error.hpp"
#include "texscope/lex.hpp"
#include "texscope/paths.hpp"
#include "texscope/text.hpp"

namespace texscope::features {

using lex::Token;
using lex::TokenKind;

struct PackageUse {
  std::string name;
  std::vector<std::string> options;
  std::size_t declared_at = 0;  // byte offset of the \usepackage command

  friend bool operator==(const PackageUse&, const PackageUse&) = default;
};

// Every name in \usepackage[opts]{a,b,c} and \RequirePackage, duplicates kept.
inline std::vector<PackageUse> extract_packages(std::span<const Token> tokens) {
  std::vector<PackageUse> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!tokens[i].is_command("usepackage") && !tokens[i].is_command("RequirePackage")) continue;
    std::size_t j = lex::skip_blank(tokens, i + 1);
    std::vector<std::string> options;
    if (j < tokens.size() && tokens[j].kind == TokenKind::OptBracketOpen) {
      auto opt = lex::match_group(tokens, j);
      if (!opt) continue;
      options = text::split_trimmed(lex::group_text(tokens, *opt), ',');
      j = opt->close + 1;
    }
    auto names = lex::next_group(tokens, j);
    if (!names) continue;
    for (auto& name : text::split_trimmed(lex::group_text(tokens, *names), ',')) {
      out.push_back(PackageUse{std::move(name), options, tokens[i].begin});
    }
  }
  return out;
}

inline std::vector<std::string> distinct_package_names(std::span<const PackageUse> packages) {
  std::set<std::string> names;
  for (const auto& p : packages) names.insert(p.name);
  return {names.begin(), names.end()};
}

struct GraphicsUsage {
  bool graphicx_declared = false;
  bool epsfig_declared = false;
  std::uint64_t includegraphics_count = 0;
  std::uint64_t epsfig_cmd_count = 0;

  bool graphicx_unused() const noexcept { return graphicx_declared && includegraphics_count == 0; }
  bool epsfig_unused() const noexcept { return epsfig_declared && epsfig_cmd_count == 0; }

  friend bool operator==(const GraphicsUsage&, const GraphicsUsage&) = default;
};

inline GraphicsUsage analyze_graphics(std::span<const Token> tokens, std::span<const PackageUse> packages) {
  GraphicsUsage g;
  for (const auto& p : packages) {
    if (p.name == "graphicx") g.graphicx_declared = true;
    if (p.name == "epsfig") g.epsfig_declared = true;
  }
  for (const Token& t : tokens) {
    if (t.is_command("includegraphics")) ++g.includegraphics_count;
    if (t.is_command("epsfig")) ++g.epsfig_cmd_count;
  }
  return g;
}

struct TheoremCounts {
  std::uint64_t theorems = 0;      // theorem environments only
  std::uint64_t theorem_like = 0;  // theorems plus lemmas, propositions and corollaries
};

namespace detail {

inline std::string strip_star(std::string name) {
  if (!name.empty() && name.back() == '*') name.pop_back();
  return name;
}

inline bool is_theorem_like_title(std::string_view title) {
  for (std::string_view t : {"theorem", "lemma", "proposition", "corollary"}) {
    if (text::iequals(title, t)) return true;
  }
  return false;
}

}  // namespace detail

// Counts \begin{theorem} (any case) and \begin{E} for environments bound to the title
// "Theorem" by \newtheorem{E}{Theorem}. Lemmas, propositions and corollaries only enter the
// auxiliary theorem_like count.
inline TheoremCounts extract_theorems(std::span<const Token> tokens) {
  std::set<std::string> theorem_envs;
  std::set<std::string> theorem_like_envs;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!tokens[i].is_command("newtheorem")) continue;
    std::size_t j = i + 1;
    if (j < tokens.size() && tokens[j].kind == TokenKind::Other && tokens[j].text == "*") ++j;
    auto env = lex::next_group(tokens, j);
    if (!env) continue;
    j = lex::skip_blank(tokens, env->close + 1);
    if (j < tokens.size() && tokens[j].kind == TokenKind::OptBracketOpen) {
      auto counter = lex::match_group(tokens, j);
      if (!counter) continue;
      j = counter->close + 1;
    }
    auto title = lex::next_group(tokens, j);
    if (!title) continue;
    const std::string name = detail::strip_star(std::string(text::trim(lex::group_text(tokens, *env))));
    const std::string title_text(text::trim(lex::group_text(tokens, *title)));
    if (text::iequals(title_text, "theorem")) theorem_envs.insert(name);
    if (detail::is_theorem_like_title(title_text)) theorem_like_envs.insert(name);
  }

  TheoremCounts counts;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!tokens[i].is_command("begin")) continue;
    auto env = lex::environment_name(tokens, i);
    if (!env) continue;
    const std::string name = detail::strip_star(*env);
    if (text::iequals(name, "theorem") || theorem_envs.contains(name)) ++counts.theorems;
    if (detail::is_theorem_like_title(name) || theorem_like_envs.contains(name)) ++counts.theorem_like;
  }
  return counts;
}

struct AuthorCount {
  std::uint64_t count = 0;
  bool found = false;  // false when the document has no \author command

  friend bool operator==(const AuthorCount&, const AuthorCount&) = default;
};

namespace detail {

inline bool is_author_separator(const Token& t) {
  return t.is_command("and") || t.is_command("AND") || t.is_command("\\");
}

inline bool is_author_annotation(const Token& t) {
  return t.is_command("thanks") || t.is_command("affil") || t.is_command("footnote");
}

// Number of non-empty author names in one \author argument.
inline std::uint64_t count_names(std::span<const Token> tokens, const lex::Group& g, bool& had_separator) {
  std::uint64_t names = 0;
  bool segment_has_word = false;
  for (std::size_t k = g.open + 1; k < g.close; ++k) {
    const Token& t = tokens[k];
    if (is_author_annotation(t)) {
      std::size_t j = lex::skip_blank(tokens, k + 1);
      if (j < tokens.size() && tokens[j].kind == TokenKind::OptBracketOpen) {
        if (auto opt = lex::match_group(tokens, j)) j = opt->close + 1;
      }
      if (auto arg = lex::next_group(tokens, j); arg && arg->close < g.close) k = arg->close;
      continue;
    }
    if (is_author_separator(t)) {
      had_separator = true;
      if (segment_has_word) ++names;
      segment_has_word = false;
      continue;
    }
    if (t.kind == TokenKind::Word) segment_has_word = true;
  }
  if (segment_has_word) ++names;
  return names;
}

}  // namespace detail

// Authors listed before \maketitle (or anywhere, without one). A single \author block is split
// on \and, \AND and \\; several \author commands without separators (authblk / revtex style)
// count one author each; otherwise the last \author block decides. \thanks, \affil and
// \footnote arguments are ignored.
inline AuthorCount extract_authors(std::span<const Token> tokens) {
  std::size_t limit = tokens.size();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].is_command("maketitle")) {
      limit = i;
      break;
    }
  }

  std::vector<std::uint64_t> per_block;
  bool any_separator = false;
  for (std::size_t i = 0; i < limit; ++i) {
    if (!tokens[i].is_command("author")) continue;
    std::size_t j = lex::skip_blank(tokens, i + 1);
    if (j < tokens.size() && tokens[j].kind == TokenKind::OptBracketOpen) {
      auto opt = lex::match_group(tokens, j);
      if (!opt) continue;
      j = opt->close + 1;
    }
    auto g = lex::next_group(tokens, j);
    if (!g) continue;
    per_block.push_back(detail::count_names(tokens, *g, any_separator));
    i = g->close;
  }

  AuthorCount out;
  out.found = !per_block.empty();
  if (per_block.empty()) return out;
  if (per_block.size() >= 2 && !any_separator) {
    for (auto n : per_block) out.count += n;
  } else {
    out.count = per_block.back();
  }
  return out;
}

inline std::uint64_t count_newcommands(std::span<const Token> tokens) {
  return static_cast<std::uint64_t>(std::count_if(tokens.begin(), tokens.end(), [](const Token& t) {
    return t.is_command("newcommand") || t.is_command("renewcommand");
  }));
}

inline std::uint64_t count_figure_environments(std::span<const Token> tokens) {
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!tokens[i].is_command("begin")) continue;
    auto env = lex::environment_name(tokens, i);
    if (env && (*env == "figure" || *env == "figure*")) ++n;
  }
  return n;
}

// Calls fn(word) for every word outside comments. Words are Word tokens and the names of
// letter commands (without the backslash); invocations of `ignore_macros` are skipped.
// Deleting a comment can fuse its neighbours ("a\hide{x}b" reads as "ab"), so adjacent
// fragments left after skipping an invocation are joined; line comments keep their newline and
// therefore separate words.
template <class Fn>
void for_each_text_word(std::span<const Token> tokens, const std::set<std::string>& ignore_macros, Fn&& fn) {
  const comments::InvocationScan scan = comments::find_invocations(tokens, ignore_macros);
  std::size_t next_invocation = 0;
  std::string current;
  bool open = false;
  const auto flush = [&] {
    if (open) fn(std::string_view(current));
    current.clear();
    open = false;
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (next_invocation < scan.invocations.size() && scan.invocations[next_invocation].command == i) {
      i = scan.invocations[next_invocation++].close;
      continue;
    }
    const Token& t = tokens[i];
    if (t.kind == TokenKind::Word) {
      current += text::to_lower(t.text);
      open = true;
    } else if (t.is_letter_command()) {
      flush();
      current = text::to_lower(t.text);
      open = true;
    } else {
      flush();
    }
  }
  flush();
}

inline std::uint64_t count_words(std::span<const Token> tokens, const std::set<std::string>& ignore_macros = {}) {
  std::uint64_t n = 0;
  for_each_text_word(tokens, ignore_macros, [&](std::string_view) { ++n; });
  return n;
}

inline text::WordCounts text_vocabulary(std::span<const Token> tokens, const std::set<std::string>& ignore_macros = {}) {
  text::WordCounts counts;
  for_each_text_word(tokens, ignore_macros, [&](std::string_view w) {
    auto it = counts.find(w);
    if (it == counts.end()) counts.emplace(std::string(w), 1);
    else ++it->second;
  });
  return counts;
}

// Main file with every reachable \input / \include spliced in. Each file is inlined at most
// once, which also breaks \input cycles.
struct InlinedSource {
  std::string text;
  std::vector<std::string> files;  // visited files, main first, in inlining order
  Diagnostics diagnostics;
};

namespace detail {

class Inliner {
 public:
  Inliner(const lex::SourceDocument& doc, std::string_view main) : doc_(doc), main_dir_(paths::parent_dir(main)) {}

  InlinedSource run(const lex::SourceFile& main) {
    out_.files.push_back(main.path);
    expand(main);
    return std::move(out_);
  }

 private:
  void expand(const lex::SourceFile& file) {
    const std::string source = text::sanitize_utf8(file.bytes);
    const auto tokens = lex::tokenize(source);
    const std::string_view dir = paths::parent_dir(file.path);
    std::size_t copied = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (!lex::is_input_command(tokens[i])) continue;
      auto target = lex::input_target(tokens, i);
      if (!target) continue;
      const std::string command = tokens[i].text;
      // The command spans up to its argument's closing brace or the last bare-name token.
      std::size_t last = i;
      if (auto g = lex::next_group(tokens, i + 1)) {
        last = g->close;
      } else {
        std::size_t j = i + 1;
        while (j < tokens.size() && tokens[j].kind == TokenKind::Whitespace) ++j;
        while (j < tokens.size() && (tokens[j].kind == TokenKind::Word || tokens[j].kind == TokenKind::Other)) {
          last = j++;
        }
      }
      const lex::SourceFile* included = lex::resolve_input(doc_.files, main_dir_, dir, *target);
      if (included == nullptr) {
        out_.diagnostics.push_back(
            {ErrorCode::MissingInput, "\\" + command + "{" + *target + "} in " + file.path + " not found"});
        continue;
      }
      out_.text.append(source, copied, tokens[i].begin - copied);
      copied = tokens[last].end;
      i = last;
      if (std::find(out_.files.begin(), out_.files.end(), included->path) != out_.files.end()) {
        out_.diagnostics.push_back(
            {ErrorCode::RepeatedInput, included->path + " already inlined; repeated \\" + command + " dropped"});
        continue;
      }
      out_.files.push_back(included->path);
      const std::size_t before = out_.text.size();
      expand(*included);
      if (out_.text.size() > before && out_.text.back() != '\n') out_.text.push_back('\n');
    }
    out_.text.append(source, copied);
  }

  const lex::SourceDocument& doc_;
  std::string_view main_dir_;
  InlinedSource out_;
};

}  // namespace detail

inline InlinedSource inline_inputs(const lex::SourceDocument& doc, std::string_view main_file) {
  const lex::SourceFile* main = doc.find(main_file);
  if (main == nullptr) throw Error(ErrorCode::NoMainFile, "main file '" + std::string(main_file) + "' not in document");
  return detail::Inliner(doc, main_file).run(*main);
}

// One row of the per-paper feature table.
struct FeatureVector {
  std::string id;
  std::string category;
  std::optional<Date> timestamp;
  bool multi_file = false;
  std::uint64_t file_count = 0;
  std::uint64_t word_count = 0;
  std::uint64_t comment_word_count = 0;
  std::optional<int> page_count;
  std::uint64_t package_count = 0;  // distinct names
  std::vector<std::string> package_names;
  std::uint64_t newcommand_count = 0;
  std::uint64_t theorem_count = 0;
  std::uint64_t theorem_like_count = 0;
  std::uint64_t figure_count = 0;  // \includegraphics calls
  std::uint64_t figure_env_count = 0;
  std::uint64_t author_count = 0;
  bool graphicx_declared = false;
  bool epsfig_declared = false;
  std::uint64_t includegraphics_count = 0;
  std::uint64_t epsfig_cmd_count = 0;
  std::vector<std::string> diagnostics;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct FileComment {
  std::string file;
  comments::CommentSpan span;

  friend bool operator==(const FileComment&, const FileComment&) = default;
};

// Everything extracted from one document.
struct DocumentAnalysis {
  FeatureVector features;
  std::vector<FileComment> comments;
  text::WordCounts text_words;
  text::WordCounts comment_words;
  Diagnostics diagnostics;
};

// Runs inlining and every extractor. NoMainFile propagates; other problems become diagnostics.
inline DocumentAnalysis analyze_document(const lex::SourceDocument& doc) {
  doc.validate();
  DocumentAnalysis out;
  FeatureVector& fv = out.features;
  fv.id = doc.id;
  fv.category = doc.category;
  fv.timestamp = doc.timestamp;
  fv.file_count = doc.files.size();
  fv.multi_file = doc.multi_file();
  fv.page_count = doc.page_count;

  const std::string main = doc.main_file.empty() ? lex::detect_main_file(doc.files) : doc.main_file;
  InlinedSource inlined = inline_inputs(doc, main);
  out.diagnostics = std::move(inlined.diagnostics);
  const auto tokens = lex::tokenize(inlined.text);
  const std::set<std::string> ignore = comments::detect_ignore_macros(tokens);

  // Comments are located per file so that spans stay file-local.
  std::vector<comments::CommentSpan> all_spans;
  for (const std::string& path : inlined.files) {
    const std::string source = text::sanitize_utf8(doc.find(path)->bytes);
    const auto file_tokens = lex::tokenize(source);
    auto macro = comments::extract_macro_comments(source, file_tokens, ignore);
    for (auto& d : macro.diagnostics) {
      d.message += " in " + path;
      out.diagnostics.push_back(std::move(d));
    }
    std::vector<comments::CommentSpan> spans = std::move(macro.spans);
    for (auto& line : comments::extract_line_comments(file_tokens)) {
      const bool nested = std::any_of(spans.begin(), spans.end(), [&](const comments::CommentSpan& m) {
        return m.kind == comments::CommentKind::Macro && m.contains(line);
      });
      if (!nested) spans.push_back(std::move(line));
    }
    std::sort(spans.begin(), spans.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& span : spans) {
      all_spans.push_back(span);
      out.comments.push_back(FileComment{path, std::move(span)});
    }
  }

  out.text_words = text_vocabulary(tokens, ignore);
  for (const auto& [w, c] : out.text_words) fv.word_count += c;
  for (const auto& span : all_spans) {
    text::for_each_word(span.text, [&](std::string_view w) {
      auto it = out.comment_words.find(w);
      if (it == out.comment_words.end()) out.comment_words.emplace(std::string(w), 1);
      else ++it->second;
    });
  }
  fv.comment_word_count = comments::comment_stats(all_spans, fv.word_count).word_count;

  const auto packages = extract_packages(tokens);
  fv.package_names = distinct_package_names(packages);
  fv.package_count = fv.package_names.size();
  const GraphicsUsage graphics = analyze_graphics(tokens, packages);
  fv.graphicx_declared = graphics.graphicx_declared;
  fv.epsfig_declared = graphics.epsfig_declared;
  fv.includegraphics_count = graphics.includegraphics_count;
  fv.epsfig_cmd_count = graphics.epsfig_cmd_count;
  fv.figure_count = graphics.includegraphics_count;
  fv.figure_env_count = count_figure_environments(tokens);
  fv.newcommand_count = count_newcommands(tokens);
  const TheoremCounts theorems = extract_theorems(tokens);
  fv.theorem_count = theorems.theorems;
  fv.theorem_like_count = theorems.theorem_like;
  const AuthorCount authors = extract_authors(tokens);
  fv.author_count = authors.count;
  if (!authors.found) out.diagnostics.push_back({ErrorCode::NoAuthorBlock, "no \\author command"});

  for (const auto& d : out.diagnostics) fv.diagnostics.push_back(d.to_string());
  return out;
}

inline FeatureVector build_feature_vector(const lex::SourceDocument& doc) {
  return analyze_document(doc).features;
}

}  // namespace texscope::features
