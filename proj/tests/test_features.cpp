#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "texscope/features.hpp"
#include "texscope/lex.hpp"
#include "golden.hpp"

using namespace texscope;

namespace {

std::vector<std::string> package_names(const std::string& src) {
  std::vector<std::string> out;
  for (const auto& p : features::extract_packages(lex::tokenize(src))) out.push_back(p.name);
  return out;
}

features::GraphicsUsage graphics(const std::string& src) {
  const auto toks = lex::tokenize(src);
  const auto pkgs = features::extract_packages(toks);
  return features::analyze_graphics(toks, pkgs);
}

std::uint64_t theorems(const std::string& src) { return features::extract_theorems(lex::tokenize(src)).theorems; }
features::AuthorCount authors(const std::string& src) { return features::extract_authors(lex::tokenize(src)); }
std::uint64_t newcommands(const std::string& src) { return features::count_newcommands(lex::tokenize(src)); }
std::uint64_t words(const std::string& src) { return features::count_words(lex::tokenize(src)); }

lex::SourceDocument single(std::string body, std::string id = "doc") {
  lex::SourceDocument doc;
  doc.id = std::move(id);
  doc.category = "cs.AI";
  doc.files.push_back({"main.tex", std::move(body)});
  doc.main_file = "main.tex";
  return doc;
}

bool has_diagnostic(const features::FeatureVector& fv, std::string_view code) {
  return std::any_of(fv.diagnostics.begin(), fv.diagnostics.end(),
                     [&](const std::string& d) { return d.starts_with(std::string(code) + ":"); });
}

}  // namespace

TEST(Packages, Single) { EXPECT_EQ(package_names("\\usepackage{amsmath}"), (std::vector<std::string>{"amsmath"})); }

TEST(Packages, Options) {
  const auto p = features::extract_packages(lex::tokenize("x \\usepackage[utf8]{inputenc}"));
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].name, "inputenc");
  EXPECT_EQ(p[0].options, (std::vector<std::string>{"utf8"}));
  EXPECT_EQ(p[0].declared_at, 2u);
}

TEST(Packages, CommaSplit) {
  EXPECT_EQ(package_names("\\usepackage{graphicx,url}"), (std::vector<std::string>{"graphicx", "url"}));
  EXPECT_EQ(package_names("\\usepackage{ a , b,\n c }"), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(Packages, RequirePackageAndDuplicates) {
  const auto toks = lex::tokenize("\\RequirePackage{url}\\usepackage{url}\\usepackage{Url}");
  const auto p = features::extract_packages(toks);
  EXPECT_EQ(p.size(), 3u);
  EXPECT_EQ(features::distinct_package_names(p), (std::vector<std::string>{"Url", "url"}));
}

TEST(Packages, CommentedOut) { EXPECT_TRUE(package_names("%\\usepackage{x}\n").empty()); }

TEST(Graphics, DeclaredButUnused) {
  const auto g = graphics("\\usepackage{graphicx}");
  EXPECT_TRUE(g.graphicx_declared);
  EXPECT_TRUE(g.graphicx_unused());
}

TEST(Graphics, Nothing) { EXPECT_EQ(graphics("text"), features::GraphicsUsage{}); }

TEST(Graphics, EpsfigUsed) {
  const auto g = graphics("\\usepackage{epsfig}\\epsfig{file=a}\\epsfig{file=b}");
  EXPECT_TRUE(g.epsfig_declared);
  EXPECT_EQ(g.epsfig_cmd_count, 2u);
  EXPECT_FALSE(g.epsfig_unused());
}

TEST(Theorems, Plain) {
  EXPECT_EQ(theorems("\\begin{theorem}a\\end{theorem}\\begin{theorem}b\\end{theorem}\\begin{Theorem}c\\end{Theorem}"), 3u);
}

TEST(Theorems, NewtheoremBinding) {
  EXPECT_EQ(theorems("\\newtheorem{thm}{Theorem} x \\begin{thm}y\\end{thm}"), 1u);
  EXPECT_EQ(theorems("\\newtheorem{thm}[section]{Theorem}\\begin{thm*}y\\end{thm*}"), 1u);
}

TEST(Theorems, LemmaIsNotATheorem) {
  const auto c = features::extract_theorems(lex::tokenize("\\newtheorem{lem}{Lemma}\\begin{lemma}\\begin{lem}"));
  EXPECT_EQ(c.theorems, 0u);
  EXPECT_EQ(c.theorem_like, 2u);
}

TEST(Authors, AndSeparated) { EXPECT_EQ(authors("\\author{A. One \\and B. Two}").count, 2u); }

TEST(Authors, RepeatedCommands) { EXPECT_EQ(authors("\\author{A}\\author{B}\\author{C}").count, 3u); }

TEST(Authors, Missing) {
  const auto a = authors("\\title{x}");
  EXPECT_EQ(a.count, 0u);
  EXPECT_FALSE(a.found);
}

TEST(Authors, ThanksAndAffilIgnored) {
  EXPECT_EQ(authors("\\author{Ann\\thanks{Funded by \\and nobody} \\\\ Bob}").count, 2u);
  EXPECT_EQ(authors("\\author[1]{Ann}\\affil[1]{Uni}\\author[2]{Bob}").count, 2u);
}

TEST(Authors, OnlyBeforeMaketitle) {
  EXPECT_EQ(authors("\\author{A \\and B}\\maketitle\\author{C}").count, 2u);
  EXPECT_EQ(authors("\\author{A \\and B}\\author{C}").count, 1u);  // last block wins once separators appear
}

TEST(Newcommands, Counts) {
  EXPECT_EQ(newcommands("\\newcommand{\\a}{1}\\newcommand{\\b}{2}\\newcommand{\\c}{3}\\newcommand{\\d}{4}\\newcommand{\\e}{5}"), 5u);
  EXPECT_EQ(newcommands("plain"), 0u);
  EXPECT_EQ(newcommands("\\newcommand\\a{}\\newcommand\\b{}\\newcommand\\c{}\\renewcommand\\d{}"), 4u);
  EXPECT_EQ(newcommands("%\\newcommand\\a{}\n"), 0u);
}

TEST(Words, Examples) {
  EXPECT_EQ(words("Hello world % hidden"), 2u);
  EXPECT_EQ(words("\\frac{a}{b}"), 3u);
  EXPECT_EQ(words(""), 0u);
}

TEST(Words, Details) {
  EXPECT_EQ(words("x2y"), 2u);
  EXPECT_EQ(words("\\\\ \\% \\,"), 0u);
  EXPECT_EQ(words("ab%c\nd"), 2u);
  const auto vocab = features::text_vocabulary(lex::tokenize("The the \\The"));
  EXPECT_EQ(vocab.at("the"), 3u);
}

TEST(Words, IgnoreMacroInvocationsSkipped) {
  const auto toks = lex::tokenize("a\\hide{x y}b c");
  EXPECT_EQ(features::count_words(toks, {"hide"}), 2u);  // "ab", "c"
  EXPECT_EQ(features::count_words(toks), 6u);
}

TEST(Inlining, SplicesInputs) {
  lex::SourceDocument doc = single("A \\input{sec} B");
  doc.files.push_back({"sec.tex", "middle"});
  const auto in = features::inline_inputs(doc, "main.tex");
  EXPECT_EQ(in.text, "A middle\n B");
  EXPECT_EQ(in.files, (std::vector<std::string>{"main.tex", "sec.tex"}));
  EXPECT_TRUE(in.diagnostics.empty());
}

TEST(Inlining, CyclesTerminate) {
  lex::SourceDocument doc = single("m \\input{a}");
  doc.files.push_back({"a.tex", "a \\input{b}"});
  doc.files.push_back({"b.tex", "b \\input{a} \\input{main}"});
  const auto in = features::inline_inputs(doc, "main.tex");
  EXPECT_EQ(in.files.size(), 3u);
  EXPECT_EQ(in.diagnostics.size(), 2u);
  for (const auto& d : in.diagnostics) EXPECT_EQ(d.code, ErrorCode::RepeatedInput);
  EXPECT_EQ(words(in.text), 3u);  // m, a, b
}

TEST(Inlining, Idempotent) {
  lex::SourceDocument doc = single("x \\include{p} \\input q.tex y");
  doc.files.push_back({"p.tex", "pp"});
  doc.files.push_back({"q.tex", "qq"});
  const auto once = features::inline_inputs(doc, "main.tex");
  const lex::SourceDocument flat = single(once.text);
  const auto twice = features::inline_inputs(flat, "main.tex");
  EXPECT_EQ(twice.text, once.text);
}

TEST(Inlining, MissingTargetIsADiagnostic) {
  const auto in = features::inline_inputs(single("a \\input{nowhere} b"), "main.tex");
  ASSERT_EQ(in.diagnostics.size(), 1u);
  EXPECT_EQ(in.diagnostics[0].code, ErrorCode::MissingInput);
  EXPECT_EQ(in.text, "a \\input{nowhere} b");
}

TEST(Inlining, CommentedInputIgnored) {
  lex::SourceDocument doc = single("%\\input{a}\nz");
  doc.files.push_back({"a.tex", "never"});
  EXPECT_EQ(features::inline_inputs(doc, "main.tex").files.size(), 1u);
}

TEST(FeatureVector, SingleFile) {
  const auto fv = features::build_feature_vector(single("\\documentclass{article}\\author{X}"));
  EXPECT_FALSE(fv.multi_file);
  EXPECT_EQ(fv.file_count, 1u);
  EXPECT_EQ(fv.author_count, 1u);
}

TEST(FeatureVector, ThreeFiles) {
  lex::SourceDocument doc = single("\\documentclass{article}\\input{a}\\input{b}");
  doc.files.push_back({"a.tex", "x"});
  doc.files.push_back({"b.tex", "y"});
  const auto fv = features::build_feature_vector(doc);
  EXPECT_TRUE(fv.multi_file);
  EXPECT_EQ(fv.file_count, 3u);
}

TEST(FeatureVector, SixDistinctPackages) {
  const auto fv = features::build_feature_vector(
      single("\\usepackage{a,b}\\usepackage[x]{c}\\usepackage{d}\\RequirePackage{e}\\usepackage{f,a}"));
  EXPECT_EQ(fv.package_count, 6u);
  EXPECT_EQ(fv.package_names, (std::vector<std::string>{"a", "b", "c", "d", "e", "f"}));
}

TEST(FeatureVector, NoAuthorFlagged) {
  const auto fv = features::build_feature_vector(single("text only"));
  EXPECT_EQ(fv.author_count, 0u);
  EXPECT_TRUE(has_diagnostic(fv, "NoAuthorBlock"));
}

TEST(FeatureVector, MainFileDetectedWhenUnset) {
  lex::SourceDocument doc;
  doc.id = "d";
  doc.files = {{"a.tex", "\\input{b}"}, {"b.tex", "\\documentclass{x}"}};
  EXPECT_EQ(features::build_feature_vector(doc).word_count, 2u);
  doc.files = {{"a.bib", "@x"}};
  EXPECT_THROW(features::build_feature_vector(doc), Error);
}

TEST(FeatureVector, CommentsInEveryFile) {
  lex::SourceDocument doc = single("\\newcommand{\\hide}[1]{}\n\\input{s}% one\n");
  doc.files.push_back({"s.tex", "\\hide{two three} four % five\n"});
  const auto a = features::analyze_document(doc);
  ASSERT_EQ(a.comments.size(), 3u);
  EXPECT_EQ(a.comments[0].file, "main.tex");
  EXPECT_EQ(a.comments[1].file, "s.tex");
  EXPECT_EQ(a.comments[1].span.kind, comments::CommentKind::Macro);
  EXPECT_EQ(a.comments[1].span.first, 1u);
  EXPECT_EQ(a.features.comment_word_count, 4u);
  EXPECT_EQ(a.features.word_count, 3u);  // newcommand, hide, four
}

// Deleting every extracted comment from the source leaves the word count unchanged.
TEST(FeatureVector, CommentsNeverLeakIntoWords) {
  std::mt19937_64 rng(31);
  const std::vector<std::string> parts = {"a", "bc ", "\\x", "\\hide{", "\\note{", "}", "{", " ", "\n", "%",
                                          "%q r\n", "\\%", "\\\\", "2", "\\frac{a}{b}"};
  const std::string preamble = "\\newcommand{\\hide}[1]{}\\def\\note#1{}\n";
  for (int iter = 0; iter < 1000; ++iter) {
    std::string body;
    const int k = static_cast<int>(rng() % 16);
    for (int i = 0; i < k; ++i) body += parts[rng() % parts.size()];
    const std::string src = preamble + body;
    const auto a = features::analyze_document(single(src));
    std::string stripped = src;
    for (auto it = a.comments.rbegin(); it != a.comments.rend(); ++it) {
      stripped.erase(it->span.first - 1, it->span.last - it->span.first + 1);
    }
    const auto b = features::analyze_document(single(stripped));
    ASSERT_EQ(a.features.word_count, b.features.word_count) << src;
    ASSERT_EQ(b.features.comment_word_count, 0u) << stripped;
  }
}

TEST(GoldenCorpus, EveryFieldMatches) {
  const auto outcome = golden::compare(TEXSCOPE_FIXTURES);
  EXPECT_EQ(outcome.documents, 20u);
  for (const auto& m : outcome.mismatches) ADD_FAILURE() << m;
}
