#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tilediv {

// Closed structural vocabulary. Values are part of the serialized debug
// format; append new kinds at the end only.
enum class TokenKind : std::uint8_t {
  kDefBegin,
  kDefEnd,
  kClassBegin,
  kClassEnd,
  kDecorator,
  kIfBegin,
  kElif,
  kElse,
  kIfEnd,
  kLoopBegin,   // for
  kLoopEnd,
  kWhileBegin,
  kWhileEnd,
  kTryBegin,
  kExcept,
  kFinally,
  kTryEnd,
  kWithBegin,
  kWithEnd,
  kAssign,
  kAugAssign,
  kApply,
  kReturn,
  kYield,
  kRaise,
  kAssert,
  kImport,
  kLambda,
  kComprehensionBegin,
  kComprehensionEnd,
  kCollection,   // list / dict / set display
  kConditional,  // `if` inside an expression
  kBinaryOp,
  kUnaryOp,
  kCompare,
  kSubscript,
  kAttribute,
  kLiteralNumber,
  kLiteralString,
  kLiteralBoolNone,
  kIdent,
  kDel,
  kGlobal,  // global / nonlocal
  kBreak,
  kContinue,
  kPass,
};

inline constexpr std::size_t kVocabularySize = static_cast<std::size_t>(TokenKind::kPass) + 1;

std::string_view token_kind_name(TokenKind kind);
const std::vector<std::string>& token_vocabulary();

struct StructuralToken {
  TokenKind kind;
  int line = 1;  // 1-based
  int col = 0;   // 0-based

  friend bool operator==(const StructuralToken&, const StructuralToken&) = default;
};

class TokenStream {
 public:
  TokenStream() = default;
  TokenStream(std::vector<StructuralToken> tokens, bool fallback);

  const std::vector<StructuralToken>& tokens() const { return tokens_; }
  // Token kinds as bytes; the representation similarity matching runs on.
  std::span<const std::uint8_t> kinds() const { return kinds_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  // True when the structural parse failed and the lexer-only path was used.
  bool fallback() const { return fallback_; }

  // `KIND line:col` per token, newline-terminated.
  std::string debug_string() const;

  // Streams compare by kind sequence only; positions are diagnostic.
  bool same_kinds(const TokenStream& other) const { return kinds_ == other.kinds_; }
  friend bool operator==(const TokenStream&, const TokenStream&) = default;

 private:
  std::vector<StructuralToken> tokens_;
  std::vector<std::uint8_t> kinds_;
  bool fallback_ = false;
};

TokenStream tokenize(std::string_view source);

// Lexer-only path, exposed for tests: normalizes identifiers and literals
// but emits no begin/end nesting tokens.
TokenStream tokenize_fallback(std::string_view source);

}  // namespace tilediv
