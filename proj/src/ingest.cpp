#include "tilediv/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "tilediv/error.hpp"

namespace tilediv {

using json = nlohmann::json;

std::size_t SampleGroup::m() const {
  return static_cast<std::size_t>(std::count_if(
      samples.begin(), samples.end(), [](const Sample& s) { return s.correct; }));
}

std::vector<bool> SampleGroup::correctness() const {
  std::vector<bool> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.correct);
  return out;
}

std::vector<std::string> SampleGroup::sources() const {
  std::vector<std::string> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.source);
  return out;
}

namespace {

Error line_error(std::size_t line_no, const std::string& what) {
  return Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": " + what);
}

const json& require(const json& record, const char* field, std::size_t line_no) {
  auto it = record.find(field);
  if (it == record.end()) {
    throw line_error(line_no, std::string("missing field '") + field + "'");
  }
  return *it;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

Corpus parse_corpus(std::istream& in) {
  Corpus corpus;
  std::set<std::pair<std::string, std::int64_t>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw line_error(line_no, std::string("malformed record: ") + e.what());
    }
    if (!record.is_object()) throw line_error(line_no, "record is not an object");

    const auto& prompt = require(record, "prompt_id", line_no);
    if (!prompt.is_string()) throw line_error(line_no, "field 'prompt_id' must be a string");
    const auto& sid = require(record, "sample_id", line_no);
    if (!sid.is_number_integer() || sid.get<std::int64_t>() < 0) {
      throw line_error(line_no, "field 'sample_id' must be a non-negative integer");
    }
    const auto& correct = require(record, "correct", line_no);
    if (!correct.is_boolean()) throw line_error(line_no, "field 'correct' must be a boolean");

    Sample sample;
    sample.sample_id = sid.get<std::int64_t>();
    sample.correct = correct.get<bool>();
    auto text_it = record.find("text");
    auto source_it = record.find("source");
    if (text_it == record.end() && source_it == record.end()) {
      throw line_error(line_no, "missing field 'text' (or 'source')");
    }
    if (text_it != record.end()) {
      if (!text_it->is_string()) throw line_error(line_no, "field 'text' must be a string");
      sample.text = text_it->get<std::string>();
    }
    if (source_it != record.end()) {
      if (!source_it->is_string()) throw line_error(line_no, "field 'source' must be a string");
      sample.source = source_it->get<std::string>();
      sample.explicit_source = true;
    } else {
      auto code = extract_code(*sample.text);
      sample.extracted = code.has_value();
      sample.source = code.value_or(std::string{});
    }

    const auto prompt_id = prompt.get<std::string>();
    if (!seen.emplace(prompt_id, sample.sample_id).second) {
      throw line_error(line_no, "duplicate (prompt_id, sample_id) = (" + prompt_id + ", " +
                                    std::to_string(sample.sample_id) + ")");
    }
    auto& group = corpus[prompt_id];
    group.prompt_id = prompt_id;
    group.samples.push_back(std::move(sample));
  }
  for (auto& [_, group] : corpus) {
    std::sort(group.samples.begin(), group.samples.end(),
              [](const Sample& a, const Sample& b) { return a.sample_id < b.sample_id; });
  }
  return corpus;
}

Corpus parse_corpus_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open corpus file: " + path);
  return parse_corpus(in);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& [prompt_id, group] : corpus) {
    for (const auto& s : group.samples) {
      json record;
      record["prompt_id"] = prompt_id;
      record["sample_id"] = s.sample_id;
      if (s.text) record["text"] = *s.text;
      if (s.explicit_source) record["source"] = s.source;
      record["correct"] = s.correct;
      out << record.dump() << '\n';
    }
  }
}

namespace {

struct Fence {
  std::size_t ticks = 0;
  std::string_view info;
};

std::optional<Fence> parse_fence(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && i < 3 && line[i] == ' ') ++i;
  std::size_t start = i;
  while (i < line.size() && line[i] == '`') ++i;
  if (i - start < 3) return std::nullopt;
  Fence fence;
  fence.ticks = i - start;
  auto info = line.substr(i);
  while (!info.empty() && std::isspace(static_cast<unsigned char>(info.front()))) info.remove_prefix(1);
  while (!info.empty() && std::isspace(static_cast<unsigned char>(info.back()))) info.remove_suffix(1);
  if (info.find('`') != std::string_view::npos) return std::nullopt;
  fence.info = info;
  return fence;
}

bool python_tag(std::string_view info) {
  auto word = info.substr(0, info.find_first_of(" \t{"));
  std::string lower(word);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return lower.empty() || lower == "python" || lower == "python3" || lower == "py";
}

}  // namespace

std::optional<std::string> extract_code(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos <= text.size();) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }

  std::optional<std::string> last;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto open = parse_fence(line);
    if (!open) continue;
    std::size_t j = i + 1;
    for (; j < lines.size(); ++j) {
      auto candidate = lines[j];
      if (!candidate.empty() && candidate.back() == '\r') candidate.remove_suffix(1);
      auto close = parse_fence(candidate);
      if (close && close->info.empty() && close->ticks >= open->ticks) break;
    }
    if (python_tag(open->info)) {
      std::string body;
      for (std::size_t k = i + 1; k < j; ++k) {
        if (k > i + 1) body += '\n';
        body += lines[k];
      }
      last = std::move(body);
    }
    i = j;
  }
  return last;
}

std::vector<std::string> lexical_tokens(std::string_view source) {
  std::vector<std::string> tokens;
  auto word_char = [](unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; };
  std::size_t i = 0;
  while (i < source.size()) {
    auto c = static_cast<unsigned char>(source[i]);
    if (std::isspace(c)) {
      ++i;
    } else if (word_char(c)) {
      std::size_t j = i;
      while (j < source.size() && word_char(static_cast<unsigned char>(source[j]))) ++j;
      tokens.emplace_back(source.substr(i, j - i));
      i = j;
    } else {
      tokens.emplace_back(1, source[i]);
      ++i;
    }
  }
  return tokens;
}

std::size_t utf8_length(std::string_view text) {
  return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

LengthSummary summarize_lengths(std::vector<double> values) {
  LengthSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(values.size());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  s.median = quantile(0.5);
  s.p90 = quantile(0.9);
  s.max = values.back();
  return s;
}

namespace {

struct LengthColumns {
  std::vector<double> raw_chars, extracted_chars, raw_tokens, extracted_tokens;

  void add(const Sample& s) {
    const std::string_view raw = s.text ? std::string_view(*s.text) : std::string_view(s.source);
    raw_chars.push_back(static_cast<double>(utf8_length(raw)));
    extracted_chars.push_back(static_cast<double>(utf8_length(s.source)));
    raw_tokens.push_back(static_cast<double>(lexical_tokens(raw).size()));
    extracted_tokens.push_back(static_cast<double>(lexical_tokens(s.source).size()));
  }

  LengthSummaries summarize() const {
    return {summarize_lengths(raw_chars), summarize_lengths(extracted_chars),
            summarize_lengths(raw_tokens), summarize_lengths(extracted_tokens)};
  }
};

}  // namespace

LengthReport length_stats(const Corpus& corpus) {
  LengthReport report;
  LengthColumns all;
  for (const auto& [prompt_id, group] : corpus) {
    LengthColumns cols;
    for (const auto& s : group.samples) {
      cols.add(s);
      all.add(s);
    }
    report.per_group.emplace(prompt_id, cols.summarize());
  }
  report.corpus = all.summarize();
  return report;
}

}  // namespace tilediv
