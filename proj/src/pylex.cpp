#include "tilediv/pylex.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>

namespace tilediv::pylex {

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",       "assert", "async",
    "await", "break",  "class",   "continue", "def",      "del",    "elif",
    "else",  "except", "finally", "for",      "from",     "global", "if",
    "import", "in",    "is",      "lambda",   "nonlocal", "not",    "or",
    "pass",  "raise",  "return",  "try",      "while",    "with",   "yield"};

constexpr std::array<std::string_view, 5> kOps3 = {"**=", "//=", ">>=", "<<=", "..."};
constexpr std::array<std::string_view, 19> kOps2 = {
    "**", "//", ">>", "<<", "<=", ">=", "==", "!=", "->", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@=", ":="};
constexpr std::string_view kOps1 = "+-*/%@&|^~<>()[]{},:.;=!";

bool name_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool name_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

bool string_prefix(std::string_view p) {
  if (p.size() > 2) return false;
  std::string lower;
  for (char c : p) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return lower == "r" || lower == "b" || lower == "u" || lower == "f" || lower == "rb" ||
         lower == "br" || lower == "fr" || lower == "rf";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  LexResult run() {
    indents_.push_back(0);
    at_line_start_ = true;
    while (pos_ < src_.size()) {
      if (at_line_start_ && depth_ == 0) {
        if (handle_line_start()) continue;
      }
      at_line_start_ = false;
      const auto c = static_cast<unsigned char>(src_[pos_]);
      if (c == '\n') {
        emit(depth_ == 0 && logical_nonempty_ ? LexKind::kNewline : LexKind::kNl, pos_, pos_ + 1);
        if (depth_ == 0) logical_nonempty_ = false;
        advance_newline();
        at_line_start_ = true;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
        ++pos_;
      } else if (c == '\\' && pos_ + 1 < src_.size() &&
                 (src_[pos_ + 1] == '\n' ||
                  (src_[pos_ + 1] == '\r' && pos_ + 2 < src_.size() && src_[pos_ + 2] == '\n'))) {
        pos_ += src_[pos_ + 1] == '\r' ? 2 : 1;
        advance_newline();
      } else if (c == '#') {
        auto start = pos_;
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        emit(LexKind::kComment, start, pos_);
      } else if (name_start(c)) {
        lex_name_or_string();
      } else if (std::isdigit(c) || (c == '.' && pos_ + 1 < src_.size() &&
                                     std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        lex_number();
      } else if (c == '"' || c == '\'') {
        lex_string(pos_, pos_);
      } else {
        lex_op();
      }
    }
    if (logical_nonempty_) emit(LexKind::kNewline, pos_, pos_);
    if (depth_ != 0) fail("unbalanced brackets at end of input");
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(LexKind::kDedent, pos_, pos_);
    }
    emit(LexKind::kEnd, pos_, pos_);
    return std::move(result_);
  }

 private:
  // Measures indentation; returns true when the whole line was consumed
  // (blank or comment-only).
  bool handle_line_start() {
    int width = 0;
    std::size_t p = pos_;
    while (p < src_.size()) {
      const char c = src_[p];
      if (c == ' ') {
        ++width;
      } else if (c == '\t') {
        width = (width / 8 + 1) * 8;
      } else if (c == '\f' || c == '\r') {
        // ignored
      } else {
        break;
      }
      ++p;
    }
    if (p >= src_.size()) {
      pos_ = p;
      return true;
    }
    const char c = src_[p];
    if (c == '\n' || c == '#') {
      pos_ = p;
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        emit(LexKind::kComment, p, pos_);
      }
      if (pos_ < src_.size()) {
        emit(LexKind::kNl, pos_, pos_ + 1);
        advance_newline();
      }
      return true;
    }
    pos_ = p;
    at_line_start_ = false;
    if (width > indents_.back()) {
      indents_.push_back(width);
      emit(LexKind::kIndent, pos_, pos_);
    } else if (width < indents_.back()) {
      while (indents_.size() > 1 && width < indents_.back()) {
        indents_.pop_back();
        emit(LexKind::kDedent, pos_, pos_);
      }
      if (width != indents_.back()) {
        fail("inconsistent dedent");
        indents_.push_back(width);
      }
    }
    return false;
  }

  void lex_name_or_string() {
    const auto start = pos_;
    while (pos_ < src_.size() && name_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'') &&
        string_prefix(src_.substr(start, pos_ - start))) {
      lex_string(start, pos_);
      return;
    }
    emit(LexKind::kName, start, pos_);
  }

  void lex_number() {
    const auto start = pos_;
    const bool hex_like = src_[pos_] == '0' && pos_ + 1 < src_.size() &&
                          std::strchr("xXoObB", src_[pos_ + 1]) != nullptr;
    while (pos_ < src_.size()) {
      const auto c = static_cast<unsigned char>(src_[pos_]);
      if (std::isalnum(c) || c == '_' || c == '.') {
        ++pos_;
      } else if ((c == '+' || c == '-') && !hex_like &&
                 (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E')) {
        ++pos_;
      } else {
        break;
      }
    }
    emit(LexKind::kNumber, start, pos_);
  }

  void lex_string(std::size_t start, std::size_t quote_pos) {
    const char quote = src_[quote_pos];
    const bool triple = quote_pos + 2 < src_.size() && src_[quote_pos + 1] == quote &&
                        src_[quote_pos + 2] == quote;
    pos_ = quote_pos + (triple ? 3 : 1);
    while (true) {
      if (pos_ >= src_.size()) {
        fail(triple ? "unterminated triple-quoted string" : "unterminated string");
        break;
      }
      const char c = src_[pos_];
      if (c == '\\') {
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
          pos_ += 1;
          advance_newline();
        } else {
          pos_ += 2;
        }
        continue;
      }
      if (c == '\n') {
        if (!triple) {
          fail("unterminated string");
          break;
        }
        advance_newline();
        continue;
      }
      if (c == quote) {
        if (!triple) {
          ++pos_;
          break;
        }
        if (pos_ + 2 < src_.size() && src_[pos_ + 1] == quote && src_[pos_ + 2] == quote) {
          pos_ += 3;
          break;
        }
      }
      ++pos_;
    }
    pos_ = std::min(pos_, src_.size());
    emit(LexKind::kString, start, pos_);
  }

  void lex_op() {
    const auto rest = src_.substr(pos_);
    for (auto op : kOps3) {
      if (rest.starts_with(op)) return emit_op(op.size());
    }
    for (auto op : kOps2) {
      if (rest.starts_with(op)) return emit_op(op.size());
    }
    const char c = src_[pos_];
    if (kOps1.find(c) == std::string_view::npos) {
      fail(std::string("unexpected character '") + c + "'");
      return emit_op(1);
    }
    if (c == '(' || c == '[' || c == '{') {
      ++depth_;
    } else if (c == ')' || c == ']' || c == '}') {
      if (depth_ == 0) {
        fail("unmatched closing bracket");
      } else {
        --depth_;
      }
    }
    emit_op(1);
  }

  void emit_op(std::size_t len) {
    emit(LexKind::kOp, pos_, pos_ + len);
    pos_ += len;
  }

  void emit(LexKind kind, std::size_t begin, std::size_t end) {
    LexToken tok{kind, src_.substr(begin, end - begin), begin, end, line_, column_of(begin)};
    if (kind == LexKind::kName || kind == LexKind::kNumber || kind == LexKind::kString ||
        kind == LexKind::kOp) {
      logical_nonempty_ = true;
    }
    // A multi-line token starts on the line recorded before it was scanned.
    if (begin < line_start_) {
      tok.line = token_start_line(begin);
      tok.col = column_from(line_start_of(begin), begin);
    }
    result_.tokens.push_back(tok);
  }

  void advance_newline() {
    // pos_ points at '\n'
    ++pos_;
    line_starts_.push_back(pos_);
    line_start_ = pos_;
    ++line_;
  }

  int column_of(std::size_t offset) const {
    if (offset < line_start_) return 0;
    return column_from(line_start_, offset);
  }

  int column_from(std::size_t from, std::size_t offset) const {
    int col = 0;
    for (std::size_t i = from; i < offset && i < src_.size(); ++i) {
      if ((static_cast<unsigned char>(src_[i]) & 0xC0) != 0x80) ++col;
    }
    return col;
  }

  int token_start_line(std::size_t offset) const {
    auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
    return static_cast<int>(it - line_starts_.begin());
  }

  std::size_t line_start_of(std::size_t offset) const {
    auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
    return *(it - 1);
  }

  void fail(std::string message) {
    if (result_.ok) {
      result_.ok = false;
      result_.error = "line " + std::to_string(line_) + ": " + message;
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  std::vector<std::size_t> line_starts_{0};
  int line_ = 1;
  int depth_ = 0;
  bool at_line_start_ = true;
  bool logical_nonempty_ = false;
  std::vector<int> indents_;
  LexResult result_;
};

}  // namespace

LexResult lex(std::string_view source) { return Lexer(source).run(); }

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

}  // namespace tilediv::pylex
