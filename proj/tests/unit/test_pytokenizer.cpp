#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "tilediv/ingest.hpp"
#include "tilediv/pytokenizer.hpp"

using namespace tilediv;

namespace {

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(TILEDIV_TEST_DATA) + "/" + name);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<TokenKind> kinds_of(std::string_view src) {
  const auto stream = tokenize(src);
  std::vector<TokenKind> out;
  for (const auto& t : stream.tokens()) out.push_back(t.kind);
  return out;
}

bool contains(const std::vector<TokenKind>& v, TokenKind k) {
  return std::find(v.begin(), v.end(), k) != v.end();
}

const char* kProgram = R"(import math
from os import path as p


@decorator
class Shape(Base):
    sides = 0

    def area(self, scale=2):
        total = 0
        for i in range(self.sides):
            total += i * scale
        while total > 10:
            total -= 1
            if total == 5:
                break
            elif total < 0:
                continue
            else:
                pass
        try:
            value = math.sqrt(total)
        except ValueError as err:
            raise RuntimeError(str(err))
        finally:
            del scale
        with open(p) as fh:
            data = [line.strip() for line in fh if line]
        squares = {k: k ** 2 for k in data}
        f = lambda z: -z
        assert value is not None
        return value if data else None


def gen(n):
    global counter
    yield n[0]
)";

}  // namespace

TEST_CASE("vocabulary") {
  const auto& vocab = token_vocabulary();
  CHECK(vocab.size() == kVocabularySize);
  CHECK(vocab.size() >= 25);
  for (const char* k : {"DEF_BEGIN", "DEF_END", "ASSIGN", "APPLY", "IF_BEGIN", "LOOP_BEGIN", "RETURN"}) {
    CHECK(std::find(vocab.begin(), vocab.end(), k) != vocab.end());
  }
  // Stable order; names are unique.
  auto sorted = vocab;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  CHECK(vocab.front() == "DEF_BEGIN");
  CHECK(token_kind_name(TokenKind::kPass) == "PASS");
}

TEST_CASE("renaming and literal values do not change the stream") {
  CHECK(tokenize("x = 1").same_kinds(tokenize("y = 2")));
  CHECK(tokenize("x = 'a'").same_kinds(tokenize("y = \"bbb\"")));
  CHECK(tokenize(read_fixture("table1_pair1_a.py")).same_kinds(tokenize(read_fixture("table1_pair1_b.py"))));
}

TEST_CASE("for and while loops are distinct") {
  const auto a = kinds_of("for i in a: pass");
  const auto b = kinds_of("while True: pass");
  CHECK(a != b);
  CHECK(a.front() == TokenKind::kLoopBegin);
  CHECK(b.front() == TokenKind::kWhileBegin);
}

TEST_CASE("statement coverage") {
  const auto stream = tokenize(kProgram);
  CHECK_FALSE(stream.fallback());
  std::vector<TokenKind> k;
  for (const auto& t : stream.tokens()) k.push_back(t.kind);
  for (auto want : {TokenKind::kImport, TokenKind::kDecorator, TokenKind::kClassBegin, TokenKind::kClassEnd,
                    TokenKind::kDefBegin, TokenKind::kDefEnd, TokenKind::kLoopBegin, TokenKind::kLoopEnd,
                    TokenKind::kWhileBegin, TokenKind::kWhileEnd, TokenKind::kIfBegin, TokenKind::kElif,
                    TokenKind::kElse, TokenKind::kIfEnd, TokenKind::kTryBegin, TokenKind::kExcept,
                    TokenKind::kFinally, TokenKind::kTryEnd, TokenKind::kWithBegin, TokenKind::kWithEnd,
                    TokenKind::kAssign, TokenKind::kAugAssign, TokenKind::kApply, TokenKind::kReturn,
                    TokenKind::kYield, TokenKind::kRaise, TokenKind::kAssert, TokenKind::kLambda,
                    TokenKind::kComprehensionBegin, TokenKind::kComprehensionEnd, TokenKind::kConditional,
                    TokenKind::kBinaryOp, TokenKind::kUnaryOp, TokenKind::kCompare, TokenKind::kSubscript,
                    TokenKind::kAttribute, TokenKind::kLiteralNumber, TokenKind::kLiteralBoolNone,
                    TokenKind::kIdent, TokenKind::kDel, TokenKind::kGlobal, TokenKind::kBreak,
                    TokenKind::kContinue, TokenKind::kPass}) {
    CHECK_MESSAGE(contains(k, want), token_kind_name(want));
  }
  // Begin/end tokens balance.
  CHECK(std::count(k.begin(), k.end(), TokenKind::kDefBegin) == std::count(k.begin(), k.end(), TokenKind::kDefEnd));
  CHECK(std::count(k.begin(), k.end(), TokenKind::kIfBegin) == std::count(k.begin(), k.end(), TokenKind::kIfEnd));
}

TEST_CASE("positions are nondecreasing") {
  for (const std::string src : {std::string(kProgram), read_fixture("table1_pair2_a.py"),
                                read_fixture("table1_pair2_b.py"), std::string("def (:\n  x = [1,\n")}) {
    const auto stream = tokenize(src);
    for (std::size_t i = 1; i < stream.size(); ++i) {
      const auto& a = stream.tokens()[i - 1];
      const auto& b = stream.tokens()[i];
      CHECK((a.line < b.line || (a.line == b.line && a.col <= b.col)));
    }
  }
}

TEST_CASE("comments do not change the stream") {
  const std::string plain = "def f(a):\n    b = a + 1\n    return b\n";
  const std::string commented = "def f(a):  # entry\n    b = a + 1  # add\n    # note\n    return b  # out\n";
  CHECK(tokenize(plain).same_kinds(tokenize(commented)));
}

TEST_CASE("swapping statements changes the order") {
  CHECK_FALSE(tokenize("x = f()\nreturn_value = 1\nimport os\n")
                  .same_kinds(tokenize("import os\nx = f()\nreturn_value = 1\n")));
}

TEST_CASE("malformed input falls back without throwing") {
  const auto stream = tokenize("def broken(:\n    x = = 1\n");
  CHECK(stream.fallback());
  CHECK_FALSE(stream.empty());
  for (auto k : stream.kinds()) {
    CHECK(k != static_cast<std::uint8_t>(TokenKind::kDefBegin));
  }
  CHECK(tokenize("x = 'unterminated").fallback());
  CHECK(tokenize("").empty());
}

TEST_CASE("debug output") {
  CHECK(tokenize("x = 1\n").debug_string() == "IDENT 1:0\nASSIGN 1:2\nLITERAL_NUMBER 1:4\n");
}

TEST_CASE("random alpha-renaming is invisible") {
  // Rename every identifier of a template program with random fresh names.
  const char* templ = "def @0(@1, @2):\n    @3 = [@4 for @4 in @1 if @4 > @2]\n    return len(@3)\n";
  std::mt19937_64 rng(7);
  auto render = [&](bool random_names) {
    std::string out;
    for (const char* c = templ; *c; ++c) {
      if (*c == '@') {
        ++c;
        out += random_names ? "v" + std::to_string(rng() % 100000) + "_" + *c : std::string("n") + *c;
      } else {
        out += *c;
      }
    }
    return out;
  };
  const auto base = tokenize(render(false));
  for (int i = 0; i < 50; ++i) CHECK(base.same_kinds(tokenize(render(true))));
}
