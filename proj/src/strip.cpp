#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "tilediv/ingest.hpp"
#include "tilediv/pylex.hpp"

namespace tilediv {

namespace {

using pylex::LexKind;
using pylex::LexToken;
using Range = std::pair<std::size_t, std::size_t>;

bool is_op(const LexToken& t, std::string_view op) {
  return t.kind == LexKind::kOp && t.text == op;
}

bool is_name(const LexToken& t, std::string_view name) {
  return t.kind == LexKind::kName && t.text == name;
}

class DocstringFinder {
 public:
  explicit DocstringFinder(const std::vector<LexToken>& toks) : toks_(toks) {}

  std::vector<Range> find() {
    collect_at(skip_trivia(0));
    bool statement_start = true;
    for (std::size_t i = 0; i < toks_.size(); ++i) {
      const auto& t = toks_[i];
      if (t.kind == LexKind::kNewline || t.kind == LexKind::kIndent ||
          t.kind == LexKind::kDedent) {
        statement_start = true;
        continue;
      }
      if (t.kind == LexKind::kNl || t.kind == LexKind::kComment) continue;
      if (statement_start && is_name(t, "async")) continue;
      if (statement_start && (is_name(t, "def") || is_name(t, "class"))) {
        header_suite(i);
      }
      statement_start = false;
    }
    return std::move(ranges_);
  }

 private:
  std::size_t skip_trivia(std::size_t i) const {
    while (i < toks_.size() &&
           (toks_[i].kind == LexKind::kNl || toks_[i].kind == LexKind::kComment)) {
      ++i;
    }
    return i;
  }

  void header_suite(std::size_t i) {
    int depth = 0;
    for (; i < toks_.size(); ++i) {
      const auto& t = toks_[i];
      if (t.kind == LexKind::kNewline || t.kind == LexKind::kEnd) return;
      if (t.kind != LexKind::kOp) continue;
      if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
      if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
      if (depth == 0 && t.text == ":") break;
    }
    if (i >= toks_.size()) return;
    std::size_t j = skip_trivia(i + 1);
    if (j < toks_.size() && toks_[j].kind == LexKind::kNewline) {
      j = skip_trivia(j + 1);
      if (j < toks_.size() && toks_[j].kind == LexKind::kIndent) collect_at(skip_trivia(j + 1));
      return;
    }
    collect_at(j);
  }

  // Removes the run of string-only statements starting at token j. Python
  // treats only the first as the docstring; taking the whole run keeps the
  // transformation idempotent.
  void collect_at(std::size_t j) {
    while (j < toks_.size() && toks_[j].kind == LexKind::kString) {
      std::size_t k = j;
      std::size_t last_string = j;
      while (k < toks_.size() &&
             (toks_[k].kind == LexKind::kString || toks_[k].kind == LexKind::kComment)) {
        if (toks_[k].kind == LexKind::kString) last_string = k;
        ++k;
      }
      if (k >= toks_.size()) return;
      const auto& next = toks_[k];
      if (next.kind == LexKind::kNewline || next.kind == LexKind::kEnd) {
        ranges_.emplace_back(toks_[j].begin, toks_[last_string].end);
        j = skip_trivia(k + 1);
      } else if (is_op(next, ";")) {
        ranges_.emplace_back(toks_[j].begin, next.end);
        j = skip_trivia(k + 1);
      } else {
        return;
      }
    }
  }

  const std::vector<LexToken>& toks_;
  std::vector<Range> ranges_;
};

// Comment ranges for sources the lexer rejects: `#` outside quotes, with
// quote state carried across lines only for triple quotes.
std::vector<Range> fallback_comment_ranges(std::string_view src) {
  std::vector<Range> ranges;
  char quote = 0;
  bool triple = false;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const char c = src[i];
    if (quote) {
      if (c == '\\') {
        ++i;
      } else if (c == '\n' && !triple) {
        quote = 0;
      } else if (c == quote) {
        if (!triple) {
          quote = 0;
        } else if (i + 2 < src.size() && src[i + 1] == quote && src[i + 2] == quote) {
          quote = 0;
          i += 2;
        }
      }
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
      triple = i + 2 < src.size() && src[i + 1] == c && src[i + 2] == c;
      if (triple) i += 2;
    } else if (c == '#') {
      auto end = src.find('\n', i);
      if (end == std::string_view::npos) end = src.size();
      ranges.emplace_back(i, end);
      i = end - 1;
    }
  }
  return ranges;
}

std::string apply_removals(std::string_view src, std::vector<Range> ranges) {
  std::sort(ranges.begin(), ranges.end());
  std::string out;
  out.reserve(src.size());
  std::vector<bool> touched{false};
  std::size_t pos = 0;
  auto copy = [&](std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i) {
      out += src[i];
      if (src[i] == '\n') touched.push_back(false);
    }
  };
  for (const auto& [begin, end] : ranges) {
    if (begin < pos) continue;
    copy(pos, begin);
    touched.back() = true;
    pos = end;
  }
  copy(pos, src.size());

  std::string result;
  result.reserve(out.size());
  std::size_t line = 0;
  std::size_t start = 0;
  while (start <= out.size()) {
    auto nl = out.find('\n', start);
    const bool last = nl == std::string::npos;
    std::string_view text(out.data() + start, (last ? out.size() : nl) - start);
    bool keep = true;
    if (touched[line]) {
      while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
        text.remove_suffix(1);
      }
      keep = !text.empty();
    }
    if (keep) {
      result += text;
      if (!last) result += '\n';
    }
    if (last) break;
    start = nl + 1;
    ++line;
  }
  // A dropped final line can leave a dangling separator from the previous one.
  if (!result.empty() && result.back() == '\n' && !out.empty() && out.back() != '\n') {
    result.pop_back();
  }
  return result;
}

}  // namespace

std::string strip_comments_docstrings(std::string_view source) {
  auto lexed = pylex::lex(source);
  if (!lexed.ok) return apply_removals(source, fallback_comment_ranges(source));
  std::vector<Range> ranges;
  for (const auto& t : lexed.tokens) {
    if (t.kind == LexKind::kComment) ranges.emplace_back(t.begin, t.end);
  }
  auto docs = DocstringFinder(lexed.tokens).find();
  ranges.insert(ranges.end(), docs.begin(), docs.end());
  return apply_removals(source, std::move(ranges));
}

}  // namespace tilediv
