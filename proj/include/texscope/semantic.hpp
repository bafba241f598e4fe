#pragma once

// Semantic comments. Given an oracle deciding whether two sources compile to the same output,
// s[i,j] is a comment when deleting it leaves the output unchanged, and a maximal comment when
// additionally neither one-character extension s[i-1,j] nor s[i,j+1] is a comment. Indices in
// this API are 1-based and closed.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "texscope/error.hpp"

namespace texscope::semantic {

// Stand-in for "P(t1) = P(t2)". Implementations must be reflexive, symmetric and
// deterministic.
template <class O>
concept CompilationOracle = requires(const O& oracle, std::string_view a, std::string_view b) {
  { oracle.equivalent(a, b) } -> std::convertible_to<bool>;
};

// Oracle comparing normal forms produced by a normalizer function.
template <class Normalize>
class NormalizingOracle {
 public:
  explicit NormalizingOracle(Normalize normalize) : normalize_(std::move(normalize)) {}

  bool equivalent(std::string_view a, std::string_view b) const { return normalize_(a) == normalize_(b); }

  std::string normalize(std::string_view s) const { return normalize_(s); }

 private:
  Normalize normalize_;
};

// Oracle backed by an arbitrary predicate; used for adversarial oracles in tests.
class FunctionOracle {
 public:
  explicit FunctionOracle(std::function<bool(std::string_view, std::string_view)> fn) : fn_(std::move(fn)) {}
  bool equivalent(std::string_view a, std::string_view b) const { return fn_(a, b); }

 private:
  std::function<bool(std::string_view, std::string_view)> fn_;
};

// Removes every unescaped '%' through the end of its line (the newline itself is kept).
inline std::string strip_line_comments(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '\\') {
      out.push_back(c);
      if (i + 1 < s.size()) out.push_back(s[++i]);
    } else if (c == '%') {
      while (i + 1 < s.size() && s[i + 1] != '\n') ++i;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_run = false;
  for (char c : s) {
    const bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r';
    if (ws) {
      if (!in_run) out.push_back(' ');
      in_run = true;
    } else {
      out.push_back(c);
      in_run = false;
    }
  }
  return out;
}

inline auto strip_comments_oracle() {
  return NormalizingOracle([](std::string_view s) { return strip_line_comments(s); });
}

// The reference oracle: strip '%' comments, then collapse whitespace runs to one space.
inline auto reference_oracle() {
  return NormalizingOracle([](std::string_view s) { return collapse_whitespace(strip_line_comments(s)); });
}

// Exact string equality: every deletion changes the output.
inline auto identity_oracle() {
  return NormalizingOracle([](std::string_view s) { return std::string(s); });
}

struct Interval {
  std::size_t first;  // 1-based, closed
  std::size_t last;

  bool overlaps(const Interval& o) const noexcept { return first <= o.last && o.first <= last; }
  bool contains(const Interval& o) const noexcept { return first <= o.first && o.last <= last; }

  friend bool operator==(const Interval&, const Interval&) = default;
  friend auto operator<=>(const Interval&, const Interval&) = default;
};

// s with s[first, last] removed.
inline std::string delete_range(std::string_view s, std::size_t first, std::size_t last) {
  std::string out;
  out.reserve(s.size() - (last - first + 1));
  out.append(s.substr(0, first - 1));
  out.append(s.substr(last));
  return out;
}

namespace detail {

inline void check_range(std::string_view s, std::size_t i, std::size_t j) {
  if (i < 1 || i > j || j > s.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "interval [" + std::to_string(i) + ", " + std::to_string(j) +
                                                "] is not within a string of length " +
                                                std::to_string(s.size()));
  }
}

}  // namespace detail

template <CompilationOracle O>
bool is_comment(std::string_view s, std::size_t i, std::size_t j, const O& oracle) {
  detail::check_range(s, i, j);
  return oracle.equivalent(s, delete_range(s, i, j));
}

// Extending past either end of the string counts as changing the output, so maximality holds at
// the boundaries.
template <CompilationOracle O>
bool is_maximal_comment(std::string_view s, std::size_t i, std::size_t j, const O& oracle) {
  detail::check_range(s, i, j);
  if (!oracle.equivalent(s, delete_range(s, i, j))) return false;
  if (i > 1 && oracle.equivalent(s, delete_range(s, i - 1, j))) return false;
  if (j < s.size() && oracle.equivalent(s, delete_range(s, i, j + 1))) return false;
  return true;
}

// Raised when two maximal comments overlap, which the definition is assumed to rule out but an
// oracle can still produce. Carries the full maximal-comment list and the offending pairs.
class OverlappingMaximalComments : public Error {
 public:
  OverlappingMaximalComments(std::vector<Interval> spans, std::vector<std::pair<Interval, Interval>> overlaps)
      : Error(ErrorCode::OverlappingMaximalComments,
              std::to_string(overlaps.size()) + " overlapping pair(s) among " + std::to_string(spans.size()) +
                  " maximal comments"),
        spans_(std::move(spans)),
        overlaps_(std::move(overlaps)) {}

  const std::vector<Interval>& spans() const noexcept { return spans_; }
  const std::vector<std::pair<Interval, Interval>>& overlaps() const noexcept { return overlaps_; }

 private:
  std::vector<Interval> spans_;
  std::vector<std::pair<Interval, Interval>> overlaps_;
};

struct PartitionOptions {
  // Oracle-call cap is budget_factor * n^2 (at least budget_factor).
  std::uint64_t budget_factor = 10;
};

// Wraps an oracle and fails fast once a call budget is spent.
template <CompilationOracle O>
class BudgetedOracle {
 public:
  BudgetedOracle(const O& inner, std::uint64_t budget) : inner_(inner), budget_(budget) {}

  bool equivalent(std::string_view a, std::string_view b) const {
    if (calls_ >= budget_) {
      throw Error(ErrorCode::OracleBudgetExceeded,
                  "oracle budget of " + std::to_string(budget_) + " calls exhausted");
    }
    ++calls_;
    return inner_.equivalent(a, b);
  }

  std::uint64_t calls() const noexcept { return calls_; }

 private:
  const O& inner_;
  std::uint64_t budget_;
  mutable std::uint64_t calls_ = 0;
};

// Comment table over all intervals: one oracle call per interval, shared by the three
// maximality conditions.
class CommentTable {
 public:
  template <CompilationOracle O>
  CommentTable(std::string_view s, const O& oracle) : n_(s.size()), cells_(n_ * n_, 0) {
    for (std::size_t i = 1; i <= n_; ++i) {
      for (std::size_t j = i; j <= n_; ++j) {
        cells_[index(i, j)] = oracle.equivalent(s, delete_range(s, i, j)) ? 1 : 0;
      }
    }
  }

  bool comment(std::size_t i, std::size_t j) const { return cells_[index(i, j)] != 0; }

  bool maximal(std::size_t i, std::size_t j) const {
    return comment(i, j) && (i == 1 || !comment(i - 1, j)) && (j == n_ || !comment(i, j + 1));
  }

  std::size_t size() const noexcept { return n_; }

 private:
  std::size_t index(std::size_t i, std::size_t j) const { return (i - 1) * n_ + (j - 1); }

  std::size_t n_;
  std::vector<unsigned char> cells_;
};

// All maximal comments of s in left-to-right order. Throws OverlappingMaximalComments when any
// two of them overlap and OracleBudgetExceeded when the oracle-call cap is hit.
template <CompilationOracle O>
std::vector<Interval> partition_maximal_comments(std::string_view s, const O& oracle,
                                                 PartitionOptions options = {}) {
  const std::uint64_t n = s.size();
  const std::uint64_t budget = options.budget_factor * std::max<std::uint64_t>(1, n * n);
  BudgetedOracle<O> counted(oracle, budget);
  const CommentTable table(s, counted);

  std::vector<Interval> spans;
  for (std::size_t i = 1; i <= table.size(); ++i) {
    for (std::size_t j = i; j <= table.size(); ++j) {
      if (table.maximal(i, j)) spans.push_back({i, j});
    }
  }

  std::vector<std::pair<Interval, Interval>> overlaps;
  for (std::size_t a = 0; a < spans.size(); ++a) {
    for (std::size_t b = a + 1; b < spans.size(); ++b) {
      if (spans[a].overlaps(spans[b])) overlaps.emplace_back(spans[a], spans[b]);
    }
  }
  if (!overlaps.empty()) throw OverlappingMaximalComments(std::move(spans), std::move(overlaps));
  return spans;
}

// A comment s[outer] containing a sub-interval s[inner] that is not a comment.
struct MonotonicityViolation {
  Interval outer;
  Interval inner;

  friend bool operator==(const MonotonicityViolation&, const MonotonicityViolation&) = default;
};

// Checks the assumption that every substring of a comment is itself a comment. Returns, for
// each comment with a non-comment sub-interval, the first such sub-interval found.
template <CompilationOracle O>
std::vector<MonotonicityViolation> monotonicity_violations(std::string_view s, const O& oracle) {
  const CommentTable table(s, oracle);
  std::vector<MonotonicityViolation> out;
  for (std::size_t i = 1; i <= table.size(); ++i) {
    for (std::size_t j = i; j <= table.size(); ++j) {
      if (!table.comment(i, j)) continue;
      bool found = false;
      for (std::size_t k = i; k <= j && !found; ++k) {
        for (std::size_t l = k; l <= j && !found; ++l) {
          if (!table.comment(k, l)) {
            out.push_back({{i, j}, {k, l}});
            found = true;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace texscope::semantic
