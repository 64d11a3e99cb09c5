#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tilediv/error.hpp"
#include "tilediv/ingest.hpp"

using namespace tilediv;

namespace {

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(TILEDIV_TEST_DATA) + "/" + name);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Corpus parse(const std::string& text) {
  std::istringstream in(text);
  return parse_corpus(in);
}

std::string parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
    return e.what();
  }
  FAIL("expected a parse error");
  return {};
}

}  // namespace

TEST_CASE("parse_corpus groups records by prompt") {
  const auto corpus = parse(
      R"({"prompt_id":"p","sample_id":2,"source":"x = 1","correct":true})"
      "\n"
      R"({"prompt_id":"p","sample_id":0,"source":"y = 2","correct":true})"
      "\n\n"
      R"({"prompt_id":"p","sample_id":1,"source":"z = 3","correct":false})"
      "\n");
  REQUIRE(corpus.size() == 1);
  const auto& g = corpus.at("p");
  CHECK(g.n() == 3);
  CHECK(g.m() == 2);
  CHECK(g.samples[0].sample_id == 0);
  CHECK(g.samples[1].sample_id == 1);
  CHECK(g.samples[2].sample_id == 2);
  CHECK(g.correctness() == std::vector<bool>{true, false, true});
}

TEST_CASE("parse_corpus of an empty stream") { CHECK(parse("").empty()); }

TEST_CASE("parse_corpus errors carry line numbers") {
  const auto missing = parse_error(
      R"({"prompt_id":"p","sample_id":0,"source":"x","correct":true})"
      "\n"
      R"({"prompt_id":"p","sample_id":1,"source":"x"})");
  CHECK(missing.find("line 2") != std::string::npos);
  CHECK(missing.find("correct") != std::string::npos);

  const auto dup = parse_error(
      R"({"prompt_id":"p","sample_id":0,"source":"x","correct":true})"
      "\n"
      R"({"prompt_id":"p","sample_id":0,"source":"y","correct":false})");
  CHECK(dup.find("line 2") != std::string::npos);

  const auto bad = parse_error("{not json");
  CHECK(bad.find("line 1") != std::string::npos);

  const auto no_code = parse_error(R"({"prompt_id":"p","sample_id":0,"correct":true})");
  CHECK(no_code.find("line 1") != std::string::npos);
}

TEST_CASE("source wins over text") {
  const auto corpus = parse(
      R"({"prompt_id":"p","sample_id":0,"text":"```python\na = 1\n```","source":"b = 2","correct":true})");
  const auto& s = corpus.at("p").samples[0];
  CHECK(s.source == "b = 2");
  CHECK_FALSE(s.extracted);
}

TEST_CASE("parse -> write -> parse is the identity") {
  const std::string text =
      R"({"prompt_id":"a","sample_id":0,"text":"```\nx = 1\n```","correct":true})"
      "\n"
      R"({"prompt_id":"a","sample_id":1,"source":"y = 1","correct":false})"
      "\n"
      R"({"prompt_id":"b","sample_id":7,"text":"no code here","correct":false})"
      "\n";
  const auto first = parse(text);
  std::ostringstream out;
  write_corpus(first, out);
  const auto second = parse(out.str());
  REQUIRE(first.size() == second.size());
  for (const auto& [id, g] : first) {
    const auto& h = second.at(id);
    REQUIRE(g.n() == h.n());
    for (std::size_t i = 0; i < g.n(); ++i) {
      CHECK(g.samples[i].sample_id == h.samples[i].sample_id);
      CHECK(g.samples[i].text == h.samples[i].text);
      CHECK(g.samples[i].source == h.samples[i].source);
      CHECK(g.samples[i].correct == h.samples[i].correct);
    }
  }
  std::ostringstream again;
  write_corpus(second, again);
  CHECK(again.str() == out.str());
}

TEST_CASE("extract_code") {
  CHECK(extract_code("Sure:\n```python\ndef f(): pass\n```\nDone.") == "def f(): pass");
  CHECK_FALSE(extract_code("def f(): pass").has_value());
  CHECK(extract_code("```\nx = 1\n```") == "x = 1");
  // Tagged with another language: skipped.
  CHECK_FALSE(extract_code("```bash\nls\n```").has_value());
  CHECK(extract_code("```python\na\n```\n```bash\nls\n```") == "a");

  // Fixture hand-checked: the second block is the fixed version.
  const auto fixture = read_fixture("two_blocks.md");
  CHECK(extract_code(fixture) ==
        "def add(a, b):\n    \"\"\"Sum of two numbers.\"\"\"\n    return a + b  # plain addition");
}

TEST_CASE("extract_code is idempotent under re-wrapping") {
  for (const char* src : {"x = 1", "def f():\n    return 2", "", "a\n\nb"}) {
    const std::string wrapped = std::string("```python\n") + src + "\n```";
    const auto once = extract_code(wrapped);
    REQUIRE(once.has_value());
    CHECK(extract_code("```python\n" + *once + "\n```") == once);
  }
}

TEST_CASE("strip_comments_docstrings") {
  CHECK(strip_comments_docstrings("x = 1  # note") == "x = 1");
  CHECK(strip_comments_docstrings("def f():\n    \"\"\"Doc.\"\"\"\n    return 0\n") ==
        "def f():\n    return 0\n");
  CHECK(strip_comments_docstrings("s = \"# not a comment\"") == "s = \"# not a comment\"");
  CHECK(strip_comments_docstrings("\"\"\"module doc\"\"\"\nimport os\n") == "import os\n");
  CHECK(strip_comments_docstrings("class A:\n    'doc'\n    x = 1\n") == "class A:\n    x = 1\n");
  // Not in docstring position.
  CHECK(strip_comments_docstrings("x = 1\n'not a doc'\n") == "x = 1\n'not a doc'\n");
  // A full-line comment disappears with its line.
  CHECK(strip_comments_docstrings("a = 1\n# gone\nb = 2\n") == "a = 1\nb = 2\n");
  // Unlexable input still loses its comments.
  CHECK(strip_comments_docstrings("x = (1  # c\ny = '#'  # d\n") == "x = (1\ny = '#'\n");
}

TEST_CASE("strip_comments_docstrings is idempotent") {
  const std::string fixture = *extract_code(read_fixture("two_blocks.md"));
  for (const std::string src :
       {fixture, std::string("def g(x):\n    '''a'''\n    # b\n    return x  # c\n"),
        std::string("x = '#'  # y\n")}) {
    const auto once = strip_comments_docstrings(src);
    CHECK(strip_comments_docstrings(once) == once);
  }
}

TEST_CASE("length_stats") {
  auto corpus = parse(R"({"prompt_id":"p","sample_id":0,"source":"0123456789","correct":true})");
  auto report = length_stats(corpus);
  CHECK(report.corpus.raw_chars.mean == 10);
  CHECK(report.corpus.raw_chars.median == 10);
  CHECK(report.corpus.raw_chars.max == 10);

  auto s = summarize_lengths({10, 20, 30});
  CHECK(s.mean == 20);
  CHECK(s.median == 20);
  CHECK(s.p90 == doctest::Approx(28));
  CHECK(s.count == 3);

  // Fenced text: raw counts the whole completion, extracted only the block.
  const std::string text = "Code:\n```python\nx = 1\n```\n";
  nlohmann::json rec{{"prompt_id", "q"}, {"sample_id", 0}, {"text", text}, {"correct", true}};
  corpus = parse(rec.dump());
  report = length_stats(corpus);
  CHECK(report.corpus.raw_chars.max == 26);
  CHECK(report.corpus.extracted_chars.max == 5);
  CHECK(report.corpus.extracted_chars.max <= report.corpus.raw_chars.max);
}
