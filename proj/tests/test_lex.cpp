#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "texscope/lex.hpp"

using namespace texscope;
using lex::TokenKind;

namespace {

std::vector<TokenKind> kinds(const std::vector<lex::Token>& toks) {
  std::vector<TokenKind> out;
  for (const auto& t : toks) out.push_back(t.kind);
  return out;
}

std::string concat(std::string_view src, const std::vector<lex::Token>& toks) {
  std::string out;
  for (const auto& t : toks) out += lex::raw(src, t);
  return out;
}

std::size_t count_kind(const std::vector<lex::Token>& toks, TokenKind k) {
  std::size_t n = 0;
  for (const auto& t : toks) n += t.kind == k;
  return n;
}

}  // namespace

TEST(Tokenize, EscapedPercentIsACommand) {
  const auto toks = lex::tokenize("a \\% b");
  EXPECT_EQ(kinds(toks), (std::vector<TokenKind>{TokenKind::Word, TokenKind::Whitespace, TokenKind::Command,
                                                 TokenKind::Whitespace, TokenKind::Word}));
  EXPECT_EQ(toks[2].text, "%");
}

TEST(Tokenize, LineCommentRunsToNewline) {
  const auto toks = lex::tokenize("x %note\ny");
  ASSERT_EQ(kinds(toks), (std::vector<TokenKind>{TokenKind::Word, TokenKind::Whitespace, TokenKind::LineComment,
                                                 TokenKind::Word}));
  EXPECT_EQ(toks[2].text, "note");
  EXPECT_EQ(toks[2].begin, 2u);
  EXPECT_EQ(toks[2].end, 8u);  // newline included
  EXPECT_EQ(toks[3].text, "y");
}

TEST(Tokenize, CommentAtEndOfInputHasNoNewline) {
  const auto toks = lex::tokenize("a%tail");
  ASSERT_EQ(toks.size(), 2u);
  EXPECT_EQ(toks[1].kind, TokenKind::LineComment);
  EXPECT_EQ(toks[1].text, "tail");
  EXPECT_EQ(toks[1].end, 6u);
}

TEST(Tokenize, VerbatimEnvironmentHasNoComments) {
  const std::string src = "\\begin{verbatim}%not a comment\\end{verbatim}";
  const auto toks = lex::tokenize(src);
  EXPECT_EQ(count_kind(toks, TokenKind::LineComment), 0u);
  EXPECT_EQ(concat(src, toks), src);
}

TEST(Tokenize, StarredVerbatimAndListings) {
  for (std::string env : {"verbatim*", "lstlisting"}) {
    const std::string src = "\\begin{" + env + "}\n% x \\foo {\n\\end{" + env + "}% real\n";
    const auto toks = lex::tokenize(src);
    ASSERT_EQ(count_kind(toks, TokenKind::LineComment), 1u) << env;
    EXPECT_EQ(toks.back().text, " real");
  }
}

TEST(Tokenize, VerbatimBodyTokensArePlain) {
  const std::string src = "\\begin{verbatim}{$%}\\x\\end{verbatim}";
  const auto toks = lex::tokenize(src);
  // between the opening and closing commands only Word/Whitespace/Other appear
  std::size_t first_end = 0;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].kind == TokenKind::GroupClose) {
      first_end = i;
      break;
    }
  }
  for (std::size_t i = first_end + 1; i < toks.size(); ++i) {
    if (toks[i].is_command("end")) break;
    EXPECT_TRUE(toks[i].kind == TokenKind::Word || toks[i].kind == TokenKind::Whitespace ||
                toks[i].kind == TokenKind::Other)
        << i;
  }
}

TEST(Tokenize, VerbInline) {
  const std::string src = "\\verb|50%| and \\verb+%+ % c\n";
  const auto toks = lex::tokenize(src);
  ASSERT_EQ(count_kind(toks, TokenKind::LineComment), 1u);
  EXPECT_EQ(toks.back().text, " c");
  EXPECT_EQ(concat(src, toks), src);
}

TEST(Tokenize, UnterminatedVerbatimConsumesRest) {
  const std::string src = "\\begin{verbatim} % x\n";
  const auto toks = lex::tokenize(src);
  EXPECT_EQ(count_kind(toks, TokenKind::LineComment), 0u);
  EXPECT_EQ(concat(src, toks), src);
}

TEST(Tokenize, CommandNames) {
  const auto toks = lex::tokenize("\\section*{A}\\\\\\3");
  ASSERT_GE(toks.size(), 6u);
  EXPECT_TRUE(toks[0].is_command("section"));
  EXPECT_EQ(toks[1].kind, TokenKind::Other);
  EXPECT_TRUE(toks[5].is_command("\\"));
  EXPECT_TRUE(toks[6].is_command("3"));
}

TEST(Tokenize, TrailingBackslash) {
  const auto toks = lex::tokenize("a\\");
  EXPECT_EQ(concat("a\\", toks), "a\\");
  EXPECT_EQ(toks.back().kind, TokenKind::Other);
}

TEST(Tokenize, BracketsAndMath) {
  const auto toks = lex::tokenize("[$x$]{}");
  EXPECT_EQ(kinds(toks), (std::vector<TokenKind>{TokenKind::OptBracketOpen, TokenKind::MathShift, TokenKind::Word,
                                                 TokenKind::MathShift, TokenKind::OptBracketClose,
                                                 TokenKind::GroupOpen, TokenKind::GroupClose}));
}

TEST(Tokenize, EmptyInput) { EXPECT_TRUE(lex::tokenize("").empty()); }

TEST(Tokenize, ArbitraryBytesRoundTrip) {
  std::string src;
  for (int b = 0; b < 256; ++b) src.push_back(static_cast<char>(b));
  src += "\xff\xfe%\x80\n\\\xc3";
  EXPECT_EQ(concat(src, lex::tokenize(src)), src);
}

TEST(Tokenize, RandomRoundTripAndEscapeRule) {
  std::mt19937_64 rng(11);
  const std::string alphabet = "ab \n\\%{}[]$#verbatim";
  for (int iter = 0; iter < 2000; ++iter) {
    std::string src;
    const std::size_t n = rng() % 40;
    for (std::size_t i = 0; i < n; ++i) src.push_back(alphabet[rng() % alphabet.size()]);
    const auto toks = lex::tokenize(src);
    ASSERT_EQ(concat(src, toks), src);
    std::size_t pos = 0;
    for (const auto& t : toks) {
      ASSERT_EQ(t.begin, pos);
      ASSERT_LT(t.begin, t.end);
      pos = t.end;
      if (t.kind == TokenKind::Command) {
        ASSERT_FALSE(t.text.empty());
      }
      if (t.kind == TokenKind::LineComment && t.begin > 0) {
        // an escaping backslash would have been consumed by a Command token
        ASSERT_FALSE(src[t.begin - 1] == '\\' && (t.begin < 2 || src[t.begin - 2] != '\\'));
      }
    }
    ASSERT_EQ(lex::tokenize(src), toks);
  }
}

TEST(DetectMainFile, UniqueCandidate) {
  std::vector<lex::SourceFile> files{{"a.tex", "\\documentclass{article}"}, {"b.bib", "@article{x}"}};
  EXPECT_EQ(lex::detect_main_file(files), "a.tex");
}

TEST(DetectMainFile, LexicographicTieBreak) {
  std::vector<lex::SourceFile> files{{"z.tex", "\\documentclass{article}"}, {"a.tex", "\\documentclass{book}"}};
  EXPECT_EQ(lex::detect_main_file(files), "a.tex");
}

TEST(DetectMainFile, PrefersFileNotIncludedByOthers) {
  std::vector<lex::SourceFile> files{{"a.tex", "\\documentstyle{article}"},
                                     {"z.tex", "\\documentclass{article}\\input{a}"}};
  EXPECT_EQ(lex::detect_main_file(files), "z.tex");
}

TEST(DetectMainFile, CommentedClassDoesNotCount) {
  std::vector<lex::SourceFile> files{{"a.tex", "% \\documentclass{article}"}, {"b.tex", "\\documentclass{x}"}};
  EXPECT_EQ(lex::detect_main_file(files), "b.tex");
}

TEST(DetectMainFile, NoCandidate) {
  std::vector<lex::SourceFile> files{{"fig.eps", "%!PS-Adobe-3.0"}};
  try {
    lex::detect_main_file(files);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoMainFile);
  }
}

TEST(SourceDocument, ValidateRejectsForeignMainFile) {
  lex::SourceDocument doc;
  doc.id = "x";
  doc.files.push_back({"a.tex", ""});
  doc.main_file = "b.tex";
  EXPECT_THROW(doc.validate(), Error);
  doc.main_file = "a.tex";
  doc.page_count = 0;
  EXPECT_THROW(doc.validate(), Error);
  doc.page_count = 3;
  EXPECT_NO_THROW(doc.validate());
}

TEST(ResolveInput, TriesTexExtensionAndDirectories) {
  std::vector<lex::SourceFile> files{{"main.tex", ""}, {"sec/intro.tex", ""}, {"sec/part.tex", ""}};
  EXPECT_EQ(lex::resolve_input(files, "", "", "sec/intro")->path, "sec/intro.tex");
  EXPECT_EQ(lex::resolve_input(files, "", "sec", "part")->path, "sec/part.tex");
  EXPECT_EQ(lex::resolve_input(files, "", "", "missing"), nullptr);
  EXPECT_EQ(lex::resolve_input(files, "", "", "../main"), nullptr);
}
