#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tilediv {

// One generation within a prompt group. `source` is the code used for
// similarity: either the record's explicit `source` field or the result of
// extract_code on `text` (empty when no fenced block was found).
struct Sample {
  std::int64_t sample_id = 0;
  std::optional<std::string> text;
  std::string source;
  bool explicit_source = false;
  bool extracted = false;
  bool correct = false;
};

struct SampleGroup {
  std::string prompt_id;
  std::vector<Sample> samples;  // ascending sample_id

  std::size_t n() const { return samples.size(); }
  std::size_t m() const;
  std::vector<bool> correctness() const;
  std::vector<std::string> sources() const;
};

// prompt_id -> group. std::map keeps prompt ordering deterministic.
using Corpus = std::map<std::string, SampleGroup>;

Corpus parse_corpus(std::istream& in);
Corpus parse_corpus_file(const std::string& path);
void write_corpus(const Corpus& corpus, std::ostream& out);

// Contents of the last fenced block tagged python (or untagged). Fence lines
// are excluded; an unterminated final fence runs to the end of the text.
std::optional<std::string> extract_code(std::string_view text);

// Removes `#` comments and docstring-position string statements. Lines
// emptied by a removal are dropped; every other byte is kept.
std::string strip_comments_docstrings(std::string_view source);

// Lexical split used for token-unit lengths and 1-gram overlap: identifier
// and number runs kept verbatim, every other non-space character alone.
std::vector<std::string> lexical_tokens(std::string_view source);

std::size_t utf8_length(std::string_view text);

struct LengthSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double p90 = 0.0;
  double max = 0.0;
};

struct LengthSummaries {
  LengthSummary raw_chars;
  LengthSummary extracted_chars;
  LengthSummary raw_tokens;
  LengthSummary extracted_tokens;
};

struct LengthReport {
  std::map<std::string, LengthSummaries> per_group;
  LengthSummaries corpus;
};

// Linear-interpolated quantiles (the numpy default).
LengthSummary summarize_lengths(std::vector<double> values);
LengthReport length_stats(const Corpus& corpus);

}  // namespace tilediv
