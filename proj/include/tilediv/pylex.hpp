#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tilediv::pylex {

enum class LexKind {
  kName,
  kNumber,
  kString,
  kOp,
  kComment,
  kNewline,  // end of a logical line
  kNl,       // non-logical line break (blank line, inside brackets)
  kIndent,
  kDedent,
  kEnd,
};

struct LexToken {
  LexKind kind;
  std::string_view text;
  std::size_t begin = 0;  // byte offsets into the source
  std::size_t end = 0;
  int line = 1;  // 1-based
  int col = 0;   // 0-based, in code points
};

struct LexResult {
  std::vector<LexToken> tokens;
  bool ok = true;
  std::string error;  // first lexical error, when !ok
};

// Indentation-aware Python lexer. Never throws: on malformed input it keeps
// going and reports the first problem through `ok` / `error`.
LexResult lex(std::string_view source);

bool is_keyword(std::string_view word);

}  // namespace tilediv::pylex
