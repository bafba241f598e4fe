// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "texscope/classifier.hpp"
#include "texscope/cli.hpp"
#include "texscope/lex.hpp"
#include "texscope/semantic.hpp"
#include "texscope/stats.hpp"
#include "golden.hpp"
#include "harvest_fixtures.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace texscope;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kFixtures = TEXSCOPE_FIXTURES;

struct Verdict {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Verdict maximal_comments() {
  Verdict v;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  const std::string alphabet = "ab%\n ";
  const auto oracle = semantic::reference_oracle();
  std::size_t overlapping = 0;
  for (int iter = 0; iter < 1000; ++iter) {
    std::string s;
    const std::size_t n = rng() % 25;
    for (std::size_t i = 0; i < n; ++i) s.push_back(alphabet[rng() % alphabet.size()]);
    std::vector<semantic::Interval> got;
    try {
      got = semantic::partition_maximal_comments(s, oracle);
    } catch (const semantic::OverlappingMaximalComments& e) {
      got = e.spans();
      ++overlapping;
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& g : got) pairs.emplace_back(g.first, g.last);
    if (pairs != oracles::maximal_comments(s, true)) v.fail("mismatch on input of length " + std::to_string(n));
  }
  const double secs = seconds_since(t0);
  if (secs >= 10) v.fail("took " + std::to_string(secs) + " s");
  if (v.pass) v.detail = "1000 strings, " + std::to_string(overlapping) + " with overlapping spans, " + std::to_string(secs) + " s";
  return v;
}

Verdict golden_corpus() {
  Verdict v;
  const auto outcome = golden::compare(kFixtures);
  if (outcome.documents != 20) v.fail(std::to_string(outcome.documents) + " documents");
  if (!outcome.mismatches.empty()) v.fail(outcome.mismatches.front());
  if (v.pass) v.detail = std::to_string(outcome.fields_checked) + " fields and comment lists";
  return v;
}

// Inputs are built from segments separated by " \n\n", which closes any open line comment or
// \verb and leaves the next segment in a fresh state. Protected '%' bytes sit behind an
// escaping backslash or inside a verbatim body and must never start a comment.
Verdict lexer_fuzz() {
  Verdict v;
  std::mt19937_64 rng(3);
  const std::string noise = "ab \n\\%{}[]$#*|!";
  const std::string body = "ab %\\{}\n$";
  const auto pick = [&](const std::string& from, std::size_t max_len) {
    std::string s;
    const std::size_t n = rng() % (max_len + 1);
    for (std::size_t i = 0; i < n; ++i) s.push_back(from[rng() % from.size()]);
    return s;
  };
  std::size_t protected_total = 0;
  for (int iter = 0; iter < 10000; ++iter) {
    std::string src;
    std::vector<std::size_t> guarded;
    const std::size_t segments = 1 + rng() % 6;
    for (std::size_t k = 0; k < segments; ++k) {
      if (k > 0) src += " \n\n";
      switch (rng() % 5) {
        case 0:
          src += pick(noise, 16);
          break;
        case 1: {
          src += "\\";
          guarded.push_back(src.size());
          src += "%" + pick("ab %", 6);
          break;
        }
        case 2: {
          const char* env = std::array{"verbatim", "verbatim*", "lstlisting"}[rng() % 3];
          src += std::string("\\begin{") + env + "}";
          const std::string b = pick(body, 20) + "%" + pick(body, 6);
          for (std::size_t i = 0; i < b.size(); ++i) {
            if (b[i] == '%') guarded.push_back(src.size() + i);
          }
          src += b + "\\end{" + env + "}";
          break;
        }
        case 3: {
          const char d = "|+!"[rng() % 3];
          src += std::string("\\verb") + (rng() % 2 ? "*" : "") + d;
          const std::string b = pick("ab %\\{}", 8) + "%";
          for (std::size_t i = 0; i < b.size(); ++i) {
            if (b[i] == '%') guarded.push_back(src.size() + i);
          }
          src += b + d;
          break;
        }
        default:
          src += "\\\\%" + pick("ab ", 5);
          break;
      }
    }
    protected_total += guarded.size();
    const auto toks = lex::tokenize(src);
    std::string joined;
    std::size_t expect_begin = 0;
    std::vector<bool> starts_comment(src.size() + 1, false);
    for (const auto& t : toks) {
      if (t.begin != expect_begin || t.end <= t.begin) v.fail("token spans not contiguous");
      expect_begin = t.end;
      joined += lex::raw(src, t);
      if (t.kind != lex::TokenKind::LineComment) continue;
      starts_comment[t.begin] = true;
      std::size_t run = 0;
      while (run < t.begin && src[t.begin - 1 - run] == '\\') ++run;
      if (run % 2 == 1) v.fail("comment after an escaping backslash in " + src);
    }
    if (joined != src) v.fail("round trip failed");
    for (std::size_t g : guarded) {
      if (starts_comment[g]) v.fail("protected % lexed as a comment in " + src);
    }
  }
  if (v.pass) v.detail = "10000 inputs, " + std::to_string(protected_total) + " protected % bytes";
  return v;
}

Verdict discriminative_words() {
  Verdict v;
  std::mt19937_64 rng(4);
  for (int iter = 0; iter < 1000; ++iter) {
    const std::size_t vocab = 1 + rng() % 50;
    std::map<std::string, std::uint64_t> ca, cb;
    for (std::size_t w = 0; w < vocab; ++w) {
      if (rng() % 3) ca["w" + std::to_string(w)] = 1 + rng() % 9;
      if (rng() % 3) cb["w" + std::to_string(w)] = 1 + rng() % 9;
    }
    if (ca.empty()) ca["w0"] = 1;
    if (cb.empty()) cb["w1"] = 1;
    stats::FrequencyTable a, b;
    for (const auto& [w, c] : ca) a.counts[w] = c, a.total += c;
    for (const auto& [w, c] : cb) b.counts[w] = c, b.total += c;
    const std::size_t k = 1 + rng() % 15;
    const auto brute = oracles::discriminative(ca, cb);
    const auto got = stats::discriminative(a, b, k);
    if (got.size() != std::min(k, brute.size())) v.fail("wrong row count");
    for (std::size_t i = 0; i < got.size() && i < brute.size(); ++i) {
      if (got[i].word != brute[i].second || got[i].score != brute[i].first) v.fail("ranking differs at row " + std::to_string(i));
    }
    std::map<std::string, double> reverse;
    for (const auto& s : stats::discriminative_scores(b, a)) reverse[s.word] = s.score;
    for (const auto& s : stats::discriminative_scores(a, b)) {
      if (!reverse.count(s.word) || reverse[s.word] != -s.score) v.fail("not antisymmetric for " + s.word);
    }
  }
  if (v.pass) v.detail = "1000 instances";
  return v;
}

Verdict regression() {
  Verdict v;
  const auto packages = synthetic::linear_corpus(5000, 370, 4000, 500, 20, 5,
                                                 [](auto& fv, auto x) { fv.package_count = x; });
  const auto theorems = synthetic::linear_corpus(5000, 600, 4000, 500, 20, 6,
                                                 [](auto& fv, auto x) { fv.theorem_count = x; });
  const double s1 = stats::linear_trend(stats::field_points(packages, stats::Field::Packages, stats::Field::Words)).slope;
  const double s2 = stats::linear_trend(stats::field_points(theorems, stats::Field::Theorems, stats::Field::Words)).slope;
  if (std::abs(s1 - 370) > 0.05 * 370) v.fail("packages slope " + std::to_string(s1));
  if (std::abs(s2 - 600) > 0.05 * 600) v.fail("theorems slope " + std::to_string(s2));
  if (v.pass) v.detail = "slopes " + std::to_string(s1) + " and " + std::to_string(s2);
  return v;
}

Verdict classifier_check() {
  Verdict v;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0, 1);
  std::vector<std::vector<double>> z(60, std::vector<double>(5));
  std::vector<int> y(60);
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (auto& x : z[i]) x = g(rng);
    y[i] = z[i][0] - z[i][2] + g(rng) > 0;
  }
  const classifier::Objective objective(z, y, 1e-3);
  double worst = 0;
  for (int point = 0; point < 100; ++point) {
    std::vector<double> p(objective.dimension());
    for (auto& x : p) x = g(rng);
    const auto grad = objective.gradient(p);
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double h = 1e-5;
      auto up = p, down = p;
      up[k] += h;
      down[k] -= h;
      const double numeric = (objective.loss(up) - objective.loss(down)) / (2 * h);
      worst = std::max(worst, std::abs(numeric - grad[k]) / std::max(1.0, std::abs(grad[k]) + std::abs(numeric)));
    }
  }
  if (worst > 1e-5) v.fail("gradient relative error " + std::to_string(worst));

  const auto corpus = synthetic::table_corpus(10000, 7);
  const auto experiment = classifier::run_experiment(classifier::make_dataset(corpus, "math"));
  const auto& r = experiment.report;
  if (r.accuracy < 0.75) v.fail("accuracy " + std::to_string(r.accuracy));
  if (!(r.accuracy > r.majority_baseline)) v.fail("accuracy does not beat the majority baseline");
  double theorem_weight = 0;
  for (const auto& w : r.weights) {
    if (w.feature == "theorems") theorem_weight = w.weight;
  }
  if (!(theorem_weight > 0)) v.fail("theorem weight " + std::to_string(theorem_weight));
  const double secs = seconds_since(t0);
  if (secs >= 30) v.fail("took " + std::to_string(secs) + " s");
  if (v.pass) {
    std::ostringstream d;
    d << "max gradient error " << worst << ", accuracy " << r.accuracy << " vs baseline " << r.majority_baseline
      << ", theorem weight " << theorem_weight << ", " << secs << " s";
    v.detail = d.str();
  }
  return v;
}

Verdict harvest_safety() {
  Verdict v;
  const fs::path scratch = fs::temp_directory_path() / "texscope-acceptance-archives";
  fs::remove_all(scratch);
  std::size_t cases = 0;
  for (const auto& outcome : {harvest_fixtures::check_feeds(kFixtures / "feeds"),
                              harvest_fixtures::check_payloads(kFixtures / "payloads"),
                              harvest_fixtures::check_archives(kFixtures / "archives", scratch)}) {
    cases += outcome.cases;
    if (!outcome.mismatches.empty()) v.fail(outcome.mismatches.front());
  }
  if (cases == 0) v.fail("no fixtures found");
  if (v.pass) v.detail = std::to_string(cases) + " fixtures";
  return v;
}

Verdict determinism() {
  Verdict v;
  const std::string corpus = (kFixtures / "golden_corpus").string();
  std::vector<std::string> runs;
  for (int round = 0; round < 2; ++round) {
    const fs::path d = fs::temp_directory_path() / ("texscope-acceptance-e2e-" + std::to_string(round));
    fs::remove_all(d);
    fs::create_directories(d);
    const std::string f = (d / "features.ndjson").string();
    const std::vector<std::vector<std::string>> steps = {
        {"extract", corpus, "--out", f, "--comments", (d / "comments.ndjson").string()},
        {"stats", f, "--out", (d / "stats.ndjson").string()},
        {"stats", f, "--format", "csv", "--out", (d / "stats.csv").string()},
        {"classify", f, "--positive", "math", "--seed", "7", "--test-fraction", "0.3", "--out",
         (d / "classify.ndjson").string(), "--model", (d / "model.txt").string()}};
    for (const auto& args : steps) {
      std::ostringstream out, err;
      if (cli::run(args, out, err) != 0) v.fail(args.front() + " failed: " + err.str());
    }
    std::string all;
    for (const char* name : {"features.ndjson", "comments.ndjson", "stats.ndjson", "stats.csv", "classify.ndjson", "model.txt"}) {
      all += harvest::read_file(d / name);
    }
    runs.push_back(all);
  }
  if (runs[0] != runs[1]) v.fail("outputs differ between runs");
  if (v.pass) v.detail = std::to_string(runs[0].size()) + " bytes identical";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"maximal comments match brute force", maximal_comments},
      {"golden corpus exact", golden_corpus},
      {"lexer round trip and comment safety", lexer_fuzz},
      {"discriminative words match brute force", discriminative_words},
      {"trend slopes recovered", regression},
      {"classifier gradient and synthetic accuracy", classifier_check},
      {"harvest fixtures and archive safety", harvest_safety},
      {"end-to-end determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << " (" << v.detail << ")\n";
  }
  return failed == 0 ? 0 : 1;
}
