#include "tilediv/pytokenizer.hpp"

#include <array>
#include <optional>

#include "tilediv/pylex.hpp"

namespace tilediv {

namespace {

constexpr std::array<std::string_view, kVocabularySize> kKindNames = {
    "DEF_BEGIN",      "DEF_END",         "CLASS_BEGIN",
    "CLASS_END",      "DECORATOR",       "IF_BEGIN",
    "ELIF",           "ELSE",            "IF_END",
    "LOOP_BEGIN",     "LOOP_END",        "WHILE_BEGIN",
    "WHILE_END",      "TRY_BEGIN",       "EXCEPT",
    "FINALLY",        "TRY_END",         "WITH_BEGIN",
    "WITH_END",       "ASSIGN",          "AUG_ASSIGN",
    "APPLY",          "RETURN",          "YIELD",
    "RAISE",          "ASSERT",          "IMPORT",
    "LAMBDA",         "COMPREHENSION_BEGIN", "COMPREHENSION_END",
    "COLLECTION",     "CONDITIONAL",     "BINARY_OP",
    "UNARY_OP",       "COMPARE",         "SUBSCRIPT",
    "ATTRIBUTE",      "LITERAL_NUMBER",  "LITERAL_STRING",
    "LITERAL_BOOL_NONE", "IDENT",        "DEL",
    "GLOBAL",         "BREAK",           "CONTINUE",
    "PASS",
};

using pylex::LexKind;
using pylex::LexToken;

struct ParseFailure {};

bool is_op(const LexToken& t, std::string_view op) {
  return t.kind == LexKind::kOp && t.text == op;
}
bool is_name(const LexToken& t, std::string_view name) {
  return t.kind == LexKind::kName && t.text == name;
}
bool is_open(const LexToken& t) {
  return t.kind == LexKind::kOp && (t.text == "(" || t.text == "[" || t.text == "{");
}
bool is_close(const LexToken& t) {
  return t.kind == LexKind::kOp && (t.text == ")" || t.text == "]" || t.text == "}");
}
bool is_aug_assign(const LexToken& t) {
  if (t.kind != LexKind::kOp || t.text.size() < 2 || t.text.back() != '=') return false;
  const auto head = t.text.substr(0, t.text.size() - 1);
  return head == "+" || head == "-" || head == "*" || head == "/" || head == "//" ||
         head == "%" || head == "**" || head == ">>" || head == "<<" || head == "&" ||
         head == "|" || head == "^" || head == "@";
}

std::optional<TokenKind> simple_keyword_kind(std::string_view word) {
  if (word == "return") return TokenKind::kReturn;
  if (word == "pass") return TokenKind::kPass;
  if (word == "break") return TokenKind::kBreak;
  if (word == "continue") return TokenKind::kContinue;
  if (word == "raise") return TokenKind::kRaise;
  if (word == "assert") return TokenKind::kAssert;
  if (word == "import") return TokenKind::kImport;
  if (word == "del") return TokenKind::kDel;
  if (word == "global" || word == "nonlocal") return TokenKind::kGlobal;
  return std::nullopt;
}

// Maps expression-level lexical tokens onto structural kinds. Shared by the
// statement parser (strict) and the lexer-only fallback (lenient).
class ExpressionEmitter {
 public:
  ExpressionEmitter(const std::vector<LexToken>& toks, std::vector<StructuralToken>& out,
                    bool strict)
      : toks_(toks), out_(out), strict_(strict) {}

  void run(std::size_t b, std::size_t e) {
    const auto matches = match_brackets(b, e);
    std::vector<bool> stack;  // is-comprehension per open bracket
    std::vector<int> pending_in(1, 0);
    bool operand = false;
    for (std::size_t i = b; i < e; ++i) {
      const auto& t = toks_[i];
      const auto depth = stack.size();
      switch (t.kind) {
        case LexKind::kNewline:
        case LexKind::kIndent:
        case LexKind::kDedent:
        case LexKind::kEnd:
          operand = false;
          break;
        case LexKind::kNumber:
          emit(TokenKind::kLiteralNumber, t);
          operand = true;
          break;
        case LexKind::kString:
          if (!(i > b && toks_[i - 1].kind == LexKind::kString)) emit(TokenKind::kLiteralString, t);
          operand = true;
          break;
        case LexKind::kName:
          operand = name(i, e, depth, pending_in);
          break;
        case LexKind::kOp: {
          const auto op = t.text;
          if (op == "(" || op == "[" || op == "{") {
            const bool comp = matches[i - b] != kNoMatch && contains_for(i, matches[i - b]);
            if (op == "(" && operand) {
              emit(TokenKind::kApply, t);
            } else if (op == "[" && operand) {
              emit(TokenKind::kSubscript, t);
            } else if (comp) {
              emit(TokenKind::kComprehensionBegin, t);
            } else if (op != "(") {
              emit(TokenKind::kCollection, t);
            }
            stack.push_back(comp && !(operand && op != "{"));
            if (pending_in.size() <= stack.size()) pending_in.resize(stack.size() + 1, 0);
            pending_in[stack.size()] = 0;
            operand = false;
          } else if (op == ")" || op == "]" || op == "}") {
            if (!stack.empty()) {
              if (stack.back()) emit(TokenKind::kComprehensionEnd, t);
              stack.pop_back();
            }
            operand = true;
          } else if (op == ".") {
            emit(TokenKind::kAttribute, t);
            operand = false;
          } else if (op == "...") {
            emit(TokenKind::kLiteralBoolNone, t);
            operand = true;
          } else if (op == "+" || op == "-" || op == "*" || op == "**") {
            emit(operand ? TokenKind::kBinaryOp : TokenKind::kUnaryOp, t);
            operand = false;
          } else if (op == "~") {
            emit(TokenKind::kUnaryOp, t);
            operand = false;
          } else if (op == "/" || op == "//" || op == "%" || op == "@" || op == "<<" ||
                     op == ">>" || op == "&" || op == "|" || op == "^") {
            emit(TokenKind::kBinaryOp, t);
            operand = false;
          } else if (op == "<" || op == ">" || op == "<=" || op == ">=" || op == "==" ||
                     op == "!=") {
            emit(TokenKind::kCompare, t);
            operand = false;
          } else if (op == ":=") {
            emit(TokenKind::kAssign, t);
            operand = false;
          } else if (op == "=") {
            if (!strict_ && depth == 0) emit(TokenKind::kAssign, t);
            operand = false;
          } else if (is_aug_assign(t)) {
            if (strict_) throw ParseFailure{};
            emit(TokenKind::kAugAssign, t);
            operand = false;
          } else {
            operand = false;
          }
          break;
        }
        case LexKind::kComment:
        case LexKind::kNl:
          break;
      }
    }
  }

 private:
  static constexpr std::size_t kNoMatch = static_cast<std::size_t>(-1);

  // Returns whether the name leaves an operand behind it.
  bool name(std::size_t& i, std::size_t e, std::size_t depth, std::vector<int>& pending_in) {
    const auto& t = toks_[i];
    const auto w = t.text;
    if (w == "True" || w == "False" || w == "None") {
      emit(TokenKind::kLiteralBoolNone, t);
      return true;
    }
    if (w == "and" || w == "or") {
      emit(TokenKind::kBinaryOp, t);
      return false;
    }
    if (w == "not") {
      if (i + 1 < e && is_name(toks_[i + 1], "in")) {
        emit(TokenKind::kCompare, t);
        ++i;
      } else {
        emit(TokenKind::kUnaryOp, t);
      }
      return false;
    }
    if (w == "in") {
      if (pending_in.size() <= depth) pending_in.resize(depth + 1, 0);
      if (pending_in[depth] > 0) {
        --pending_in[depth];
      } else {
        emit(TokenKind::kCompare, t);
      }
      return false;
    }
    if (w == "is") {
      emit(TokenKind::kCompare, t);
      if (i + 1 < e && is_name(toks_[i + 1], "not")) ++i;
      return false;
    }
    if (w == "for") {
      if (pending_in.size() <= depth) pending_in.resize(depth + 1, 0);
      ++pending_in[depth];
      return false;
    }
    if (w == "lambda") {
      emit(TokenKind::kLambda, t);
      return false;
    }
    if (w == "if") {
      emit(TokenKind::kConditional, t);
      return false;
    }
    if (w == "yield") {
      emit(TokenKind::kYield, t);
      return false;
    }
    if (w == "else" || w == "async" || w == "await" || w == "from" || w == "as") return false;
    if (pylex::is_keyword(w)) {
      if (strict_) throw ParseFailure{};
      if (auto kind = simple_keyword_kind(w)) emit(*kind, t);
      return false;
    }
    if (i > 0 && is_op(toks_[i - 1], ".")) return true;  // attribute name
    emit(TokenKind::kIdent, t);
    return true;
  }

  std::vector<std::size_t> match_brackets(std::size_t b, std::size_t e) const {
    std::vector<std::size_t> matches(e - b, kNoMatch);
    std::vector<std::size_t> stack;
    for (std::size_t i = b; i < e; ++i) {
      if (is_open(toks_[i])) {
        stack.push_back(i);
      } else if (is_close(toks_[i])) {
        if (stack.empty()) {
          if (strict_) throw ParseFailure{};
          continue;
        }
        matches[stack.back() - b] = i;
        matches[i - b] = stack.back();
        stack.pop_back();
      }
    }
    if (strict_ && !stack.empty()) throw ParseFailure{};
    return matches;
  }

  bool contains_for(std::size_t open, std::size_t close) const {
    int depth = 0;
    for (std::size_t i = open + 1; i < close; ++i) {
      if (is_open(toks_[i])) ++depth;
      if (is_close(toks_[i])) --depth;
      if (depth == 0 && is_name(toks_[i], "for")) return true;
    }
    return false;
  }

  void emit(TokenKind kind, const LexToken& t) { out_.push_back({kind, t.line, t.col}); }

  const std::vector<LexToken>& toks_;
  std::vector<StructuralToken>& out_;
  bool strict_;
};

class StatementParser {
 public:
  explicit StatementParser(const std::vector<LexToken>& toks) : toks_(toks) {}

  std::vector<StructuralToken> run() {
    while (!at_end()) parse_statement();
    return std::move(out_);
  }

 private:
  const LexToken& peek() const { return toks_[pos_]; }
  bool at_end() const { return peek().kind == LexKind::kEnd; }

  void advance() {
    touch(pos_);
    ++pos_;
  }

  void touch(std::size_t i) {
    const auto k = toks_[i].kind;
    if (k == LexKind::kName || k == LexKind::kNumber || k == LexKind::kString ||
        k == LexKind::kOp) {
      last_line_ = toks_[i].line;
      last_col_ = toks_[i].col;
    }
  }

  void expect_op(std::string_view op) {
    if (!is_op(peek(), op)) throw ParseFailure{};
    advance();
  }

  void emit(TokenKind kind, const LexToken& t) { out_.push_back({kind, t.line, t.col}); }
  void emit_end(TokenKind kind) { out_.push_back({kind, last_line_, last_col_}); }

  void expr(std::size_t b, std::size_t e) {
    if (b >= e) return;
    ExpressionEmitter(toks_, out_, true).run(b, e);
    for (std::size_t i = b; i < e; ++i) touch(i);
  }

  std::size_t line_end(std::size_t i) const {
    while (toks_[i].kind != LexKind::kNewline && toks_[i].kind != LexKind::kEnd) {
      if (toks_[i].kind == LexKind::kIndent || toks_[i].kind == LexKind::kDedent) {
        throw ParseFailure{};
      }
      ++i;
    }
    return i;
  }

  // First depth-0 occurrence of `pred` in [b, e); lambdas at depth 0 swallow
  // one colon each.
  template <typename Pred>
  std::optional<std::size_t> find_top(std::size_t b, std::size_t e, Pred pred) const {
    int depth = 0;
    int lambdas = 0;
    for (std::size_t i = b; i < e; ++i) {
      const auto& t = toks_[i];
      if (is_open(t)) ++depth;
      if (is_close(t)) --depth;
      if (depth != 0) continue;
      if (is_name(t, "lambda")) {
        ++lambdas;
        continue;
      }
      if (is_op(t, ":") && lambdas > 0) {
        --lambdas;
        continue;
      }
      if (pred(t)) return i;
    }
    return std::nullopt;
  }

  std::size_t header_colon(std::size_t b) const {
    const auto e = line_end(b);
    auto colon = find_top(b, e, [](const LexToken& t) { return is_op(t, ":"); });
    if (!colon) throw ParseFailure{};
    return *colon;
  }

  void parse_statement() {
    const auto& t = peek();
    if (t.kind == LexKind::kNewline) {
      ++pos_;
      return;
    }
    if (t.kind != LexKind::kName && t.kind != LexKind::kOp && t.kind != LexKind::kNumber &&
        t.kind != LexKind::kString) {
      throw ParseFailure{};
    }
    if (is_op(t, "@")) return parse_decorator();
    if (t.kind == LexKind::kName) {
      if (t.text == "async") {
        advance();
        const auto& next = peek();
        if (!is_name(next, "def") && !is_name(next, "for") && !is_name(next, "with")) {
          throw ParseFailure{};
        }
        return parse_statement();
      }
      if (t.text == "def") return parse_def();
      if (t.text == "class") return parse_class();
      if (t.text == "if") return parse_if();
      if (t.text == "for") return parse_for();
      if (t.text == "while") return parse_while();
      if (t.text == "try") return parse_try();
      if (t.text == "with") return parse_with();
      if (t.text == "elif" || t.text == "else" || t.text == "except" || t.text == "finally") {
        throw ParseFailure{};
      }
    }
    parse_simple_line();
  }

  void parse_suite() {
    if (peek().kind == LexKind::kNewline) {
      ++pos_;
      if (peek().kind != LexKind::kIndent) throw ParseFailure{};
      ++pos_;
      while (peek().kind != LexKind::kDedent && !at_end()) parse_statement();
      if (peek().kind == LexKind::kDedent) ++pos_;
      return;
    }
    if (at_end()) throw ParseFailure{};
    parse_simple_line();
  }

  void parse_simple_line() {
    const auto e = line_end(pos_);
    std::size_t b = pos_;
    while (b < e) {
      auto semi = find_top(b, e, [](const LexToken& t) { return is_op(t, ";"); });
      const auto seg_end = semi.value_or(e);
      if (seg_end > b) parse_simple(b, seg_end);
      if (semi) touch(*semi);
      b = seg_end + (semi ? 1 : 0);
    }
    pos_ = toks_[e].kind == LexKind::kNewline ? e + 1 : e;
  }

  void parse_simple(std::size_t b, std::size_t e) {
    const auto& first = toks_[b];
    if (first.kind == LexKind::kName) {
      const auto w = first.text;
      if (w == "import" || w == "from") {
        emit(TokenKind::kImport, first);
        for (std::size_t i = b; i < e; ++i) touch(i);
        return;
      }
      if (w == "global" || w == "nonlocal") {
        emit(TokenKind::kGlobal, first);
        for (std::size_t i = b; i < e; ++i) touch(i);
        return;
      }
      if (w == "pass" || w == "break" || w == "continue") {
        if (e != b + 1) throw ParseFailure{};
        emit(*simple_keyword_kind(w), first);
        touch(b);
        return;
      }
      if (w == "return" || w == "raise" || w == "assert" || w == "del") {
        emit(*simple_keyword_kind(w), first);
        touch(b);
        expr(b + 1, e);
        return;
      }
      if (w != "yield" && w != "await" && w != "lambda" && w != "not" && w != "True" &&
          w != "False" && w != "None" && pylex::is_keyword(w)) {
        throw ParseFailure{};
      }
    }

    auto aug = find_top(b, e, [](const LexToken& t) { return is_aug_assign(t); });
    if (aug) {
      expr(b, *aug);
      emit(TokenKind::kAugAssign, toks_[*aug]);
      touch(*aug);
      expr(*aug + 1, e);
      return;
    }

    auto assign_or_colon =
        find_top(b, e, [](const LexToken& t) { return is_op(t, "=") || is_op(t, ":"); });
    if (assign_or_colon && is_op(toks_[*assign_or_colon], ":")) {
      // Annotated target; the annotation itself is skipped.
      const auto colon = *assign_or_colon;
      expr(b, colon);
      auto eq = find_top(colon + 1, e, [](const LexToken& t) { return is_op(t, "="); });
      if (eq) {
        emit(TokenKind::kAssign, toks_[*eq]);
        touch(*eq);
        expr(*eq + 1, e);
      } else {
        for (std::size_t i = colon; i < e; ++i) touch(i);
      }
      return;
    }

    std::size_t seg = b;
    while (true) {
      auto eq = find_top(seg, e, [](const LexToken& t) {
        return is_op(t, "=") || is_name(t, "lambda");
      });
      if (!eq || is_name(toks_[*eq], "lambda")) break;
      expr(seg, *eq);
      emit(TokenKind::kAssign, toks_[*eq]);
      touch(*eq);
      seg = *eq + 1;
    }
    expr(seg, e);
  }

  void parse_decorator() {
    emit(TokenKind::kDecorator, peek());
    advance();
    const auto e = line_end(pos_);
    expr(pos_, e);
    pos_ = toks_[e].kind == LexKind::kNewline ? e + 1 : e;
    if (at_end()) throw ParseFailure{};
  }

  std::size_t matching_close(std::size_t open) const {
    int depth = 0;
    for (std::size_t i = open; i < toks_.size(); ++i) {
      if (toks_[i].kind == LexKind::kNewline || toks_[i].kind == LexKind::kEnd) break;
      if (is_open(toks_[i])) ++depth;
      if (is_close(toks_[i]) && --depth == 0) return i;
    }
    throw ParseFailure{};
  }

  void parse_params(std::size_t b, std::size_t e) {
    std::size_t seg = b;
    while (seg < e) {
      auto comma = find_top(seg, e, [](const LexToken& t) { return is_op(t, ","); });
      const auto seg_end = comma.value_or(e);
      std::size_t i = seg;
      while (i < seg_end && (is_op(toks_[i], "*") || is_op(toks_[i], "**"))) ++i;
      if (i < seg_end && toks_[i].kind == LexKind::kName) {
        emit(TokenKind::kIdent, toks_[i]);
        auto eq = find_top(i + 1, seg_end, [](const LexToken& t) { return is_op(t, "="); });
        if (eq) expr(*eq + 1, seg_end);
      } else if (i < seg_end && !is_op(toks_[i], "/")) {
        throw ParseFailure{};
      }
      for (std::size_t k = seg; k < seg_end; ++k) touch(k);
      seg = seg_end + 1;
    }
  }

  void parse_def() {
    emit(TokenKind::kDefBegin, peek());
    advance();
    if (peek().kind != LexKind::kName) throw ParseFailure{};
    advance();
    if (!is_op(peek(), "(")) throw ParseFailure{};
    const auto close = matching_close(pos_);
    parse_params(pos_ + 1, close);
    pos_ = close;
    advance();
    const auto colon = header_colon(pos_);
    for (std::size_t i = pos_; i <= colon; ++i) touch(i);
    pos_ = colon + 1;
    parse_suite();
    emit_end(TokenKind::kDefEnd);
  }

  void parse_class() {
    emit(TokenKind::kClassBegin, peek());
    advance();
    if (peek().kind != LexKind::kName) throw ParseFailure{};
    advance();
    if (is_op(peek(), "(")) {
      const auto close = matching_close(pos_);
      touch(pos_);
      expr(pos_ + 1, close);
      pos_ = close;
      advance();
    }
    expect_op(":");
    parse_suite();
    emit_end(TokenKind::kClassEnd);
  }

  void header_then_suite() {
    const auto colon = header_colon(pos_);
    expr(pos_, colon);
    pos_ = colon;
    advance();
    parse_suite();
  }

  void else_clause() {
    if (!is_name(peek(), "else")) return;
    emit(TokenKind::kElse, peek());
    advance();
    expect_op(":");
    parse_suite();
  }

  void parse_if() {
    emit(TokenKind::kIfBegin, peek());
    advance();
    header_then_suite();
    while (is_name(peek(), "elif")) {
      emit(TokenKind::kElif, peek());
      advance();
      header_then_suite();
    }
    else_clause();
    emit_end(TokenKind::kIfEnd);
  }

  void parse_for() {
    emit(TokenKind::kLoopBegin, peek());
    advance();
    const auto e = line_end(pos_);
    auto in = find_top(pos_, e, [](const LexToken& t) { return is_name(t, "in"); });
    if (!in) throw ParseFailure{};
    expr(pos_, *in);
    pos_ = *in;
    advance();
    header_then_suite();
    else_clause();
    emit_end(TokenKind::kLoopEnd);
  }

  void parse_while() {
    emit(TokenKind::kWhileBegin, peek());
    advance();
    header_then_suite();
    else_clause();
    emit_end(TokenKind::kWhileEnd);
  }

  void parse_try() {
    emit(TokenKind::kTryBegin, peek());
    advance();
    expect_op(":");
    parse_suite();
    int handlers = 0;
    while (is_name(peek(), "except")) {
      emit(TokenKind::kExcept, peek());
      advance();
      if (is_op(peek(), "*")) advance();
      const auto colon = header_colon(pos_);
      auto as = find_top(pos_, colon, [](const LexToken& t) { return is_name(t, "as"); });
      expr(pos_, as.value_or(colon));
      for (std::size_t i = pos_; i <= colon; ++i) touch(i);
      pos_ = colon + 1;
      parse_suite();
      ++handlers;
    }
    else_clause();
    if (is_name(peek(), "finally")) {
      emit(TokenKind::kFinally, peek());
      advance();
      expect_op(":");
      parse_suite();
      ++handlers;
    }
    if (handlers == 0) throw ParseFailure{};
    emit_end(TokenKind::kTryEnd);
  }

  void parse_with() {
    emit(TokenKind::kWithBegin, peek());
    advance();
    header_then_suite();
    emit_end(TokenKind::kWithEnd);
  }

  const std::vector<LexToken>& toks_;
  std::size_t pos_ = 0;
  std::vector<StructuralToken> out_;
  int last_line_ = 1;
  int last_col_ = 0;
};

std::vector<LexToken> significant(const std::vector<LexToken>& toks) {
  std::vector<LexToken> out;
  out.reserve(toks.size());
  for (const auto& t : toks) {
    if (t.kind != LexKind::kComment && t.kind != LexKind::kNl) out.push_back(t);
  }
  return out;
}

TokenStream fallback_stream(const std::vector<LexToken>& toks) {
  std::vector<StructuralToken> out;
  ExpressionEmitter(toks, out, false).run(0, toks.size());
  return TokenStream(std::move(out), true);
}

}  // namespace

std::string_view token_kind_name(TokenKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

const std::vector<std::string>& token_vocabulary() {
  static const std::vector<std::string> vocab(kKindNames.begin(), kKindNames.end());
  return vocab;
}

TokenStream::TokenStream(std::vector<StructuralToken> tokens, bool fallback)
    : tokens_(std::move(tokens)), fallback_(fallback) {
  kinds_.reserve(tokens_.size());
  for (const auto& t : tokens_) kinds_.push_back(static_cast<std::uint8_t>(t.kind));
}

std::string TokenStream::debug_string() const {
  std::string out;
  for (const auto& t : tokens_) {
    out += token_kind_name(t.kind);
    out += ' ';
    out += std::to_string(t.line);
    out += ':';
    out += std::to_string(t.col);
    out += '\n';
  }
  return out;
}

TokenStream tokenize(std::string_view source) {
  auto lexed = pylex::lex(source);
  auto toks = significant(lexed.tokens);
  if (!lexed.ok) return fallback_stream(toks);
  try {
    return TokenStream(StatementParser(toks).run(), false);
  } catch (const ParseFailure&) {
    return fallback_stream(toks);
  }
}

TokenStream tokenize_fallback(std::string_view source) {
  return fallback_stream(significant(pylex::lex(source).tokens));
}

}  // namespace tilediv
