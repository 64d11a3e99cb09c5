#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "tilediv/cli.hpp"
#include "tilediv/error.hpp"
#include "tilediv/parallel.hpp"
#include "tilediv/pytokenizer.hpp"
#include "tilediv/simulator.hpp"

namespace tilediv::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string fixed(double value, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::string fixed(const std::optional<double>& value) { return value ? fixed(*value) : "-"; }

json optional_json(const std::optional<double>& value) {
  return value ? json(*value) : json(nullptr);
}

json summary_json(const LengthSummary& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"median", s.median}, {"p90", s.p90}, {"max", s.max}};
}

json summaries_json(const LengthSummaries& s) {
  return {{"raw_chars", summary_json(s.raw_chars)},
          {"extracted_chars", summary_json(s.extracted_chars)},
          {"raw_tokens", summary_json(s.raw_tokens)},
          {"extracted_tokens", summary_json(s.extracted_tokens)}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, path + ": " + e.what());
  }
}

}  // namespace

EmbeddingTable parse_embeddings(std::istream& in) {
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> dim;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "embeddings line " + std::to_string(line_no) + ": ";
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error&) {
      throw Error(ErrorKind::kParse, where + "malformed record");
    }
    for (const char* f : {"prompt_id", "sample_id", "vector"}) {
      if (!rec.is_object() || !rec.contains(f)) {
        throw Error(ErrorKind::kParse, where + "missing field '" + f + "'");
      }
    }
    std::string prompt;
    std::int64_t sample = 0;
    std::vector<double> vec;
    try {
      prompt = rec["prompt_id"].get<std::string>();
      sample = rec["sample_id"].get<std::int64_t>();
      vec = rec["vector"].get<std::vector<double>>();
    } catch (const json::exception&) {
      throw Error(ErrorKind::kParse, where + "field has the wrong type");
    }
    if (vec.empty()) throw Error(ErrorKind::kParse, where + "empty vector");
    if (dim && *dim != vec.size()) {
      throw Error(ErrorKind::kParse, where + "dimension " + std::to_string(vec.size()) +
                                         " differs from " + std::to_string(*dim));
    }
    dim = vec.size();
    if (!table[prompt].emplace(sample, std::move(vec)).second) {
      throw Error(ErrorKind::kParse, where + "duplicate (prompt_id, sample_id)");
    }
  }
  return table;
}

EmbeddingTable parse_embeddings_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  return parse_embeddings(in);
}

EmbeddingSet group_embeddings(const EmbeddingTable& table, const SampleGroup& group) {
  auto it = table.find(group.prompt_id);
  if (it == table.end()) {
    throw Error(ErrorKind::kMismatch, "no embeddings for prompt '" + group.prompt_id + "'");
  }
  std::vector<std::vector<double>> vectors;
  for (const auto& s : group.samples) {
    auto v = it->second.find(s.sample_id);
    if (v == it->second.end()) {
      throw Error(ErrorKind::kMismatch, "no embedding for prompt '" + group.prompt_id +
                                            "' sample " + std::to_string(s.sample_id));
    }
    vectors.push_back(v->second);
  }
  return EmbeddingSet(std::move(vectors));
}

PreparedGroup prepare_group(const SampleGroup& group) {
  PreparedGroup out;
  for (const auto& s : group.samples) {
    out.sources.push_back(strip_comments_docstrings(s.source));
    out.streams.push_back(tokenize(out.sources.back()));
    if (out.streams.back().fallback()) ++out.fallback_count;
  }
  return out;
}

void cmd_similarity(const SimilarityOptions& options) {
  const Corpus corpus = parse_corpus_file(options.corpus);
  const std::size_t workers = worker_count();
  const fs::path out_dir(options.out);
  Manifest manifest("similarity");
  manifest.add_input("corpus", options.corpus);
  manifest.set_parameter("min_match", options.min_match);
  manifest.set_parameter("format", options.binary ? "binary" : "text");

  json index = json::array();
  for (const auto& [id, group] : corpus) {
    const auto prepared = prepare_group(group);
    const SimMatrix matrix = pairwise_matrix(prepared.streams, options.min_match, workers);
    std::ostringstream body;
    std::string name = "matrices/" + encode_file_name(id) + (options.binary ? ".bin" : ".txt");
    if (options.binary) {
      write_matrix_binary(matrix, body);
    } else {
      write_matrix_text(matrix, body);
    }
    write_file_atomic(out_dir / name, body.str());
    manifest.add_output(name);
    json ids = json::array();
    for (const auto& s : group.samples) ids.push_back(s.sample_id);
    index.push_back({{"prompt_id", id}, {"file", name}, {"sample_ids", ids},
                     {"fallback_streams", prepared.fallback_count}});
  }
  if (!corpus.empty()) {
    write_file_atomic(out_dir / "index.json", index.dump(2) + "\n");
    manifest.add_output("index.json");
  }
  manifest.write(out_dir);
}

PromptMetrics prompt_metrics(const SampleGroup& group, const ReportOptions& options,
                             const EmbeddingTable* embeddings, std::size_t workers) {
  PromptMetrics pm;
  pm.prompt_id = group.prompt_id;
  pm.n = group.n();
  pm.m = group.m();
  for (std::size_t k : options.k_list) {
    if (k > pm.n) {
      throw Error(ErrorKind::kInvalidArgument, "prompt '" + group.prompt_id + "' has n=" +
                                                   std::to_string(pm.n) + " < k=" + std::to_string(k));
    }
    pm.pass_at_k[k] = pass_at_k(pm.n, pm.m, k).value;
  }
  const auto prepared = prepare_group(group);
  pm.fallback_streams = prepared.fallback_count;
  const SimMatrix matrix = pairwise_matrix(prepared.streams, options.min_match, workers);
  if (pm.n >= 2) {
    pm.jdiv = jdiv(matrix);
    pm.one_gram_div = one_gram_div(prepared.sources);
  }
  const Clustering c = clusters(matrix, options.tau);
  pm.cluster_count = c.count();
  pm.eff = effective_clusters(c);
  const auto view = correct_only_view(group, matrix);
  pm.jdiv_c = view.jdiv();
  pm.eff_c = view.effective_clusters(options.tau);
  if (embeddings != nullptr) pm.vendi = vendi_score(group_embeddings(*embeddings, group));
  return pm;
}

json report_json(const std::vector<PromptMetrics>& prompts, const ReportOptions& options,
                 const LengthReport& lengths) {
  json out;
  out["parameters"] = {{"k", options.k_list}, {"tau", options.tau}, {"min_match", options.min_match},
                       {"embeddings", options.embeddings.has_value()}};
  json rows = json::array();
  std::map<std::string, std::pair<double, std::size_t>> totals;
  auto add = [&](const std::string& key, const std::optional<double>& v) {
    auto& t = totals[key];
    if (v) {
      t.first += *v;
      ++t.second;
    }
  };
  for (const auto& pm : prompts) {
    json row;
    row["prompt_id"] = pm.prompt_id;
    row["n"] = pm.n;
    row["m"] = pm.m;
    json pk = json::object();
    for (const auto& [k, v] : pm.pass_at_k) {
      pk[std::to_string(k)] = v;
      add("pass@" + std::to_string(k), v);
    }
    row["pass_at_k"] = pk;
    row["jdiv"] = optional_json(pm.jdiv);
    row["one_gram_div"] = optional_json(pm.one_gram_div);
    row["vendi"] = optional_json(pm.vendi);
    row["eff"] = pm.eff;
    row["clusters"] = pm.cluster_count;
    row["jdiv_c"] = optional_json(pm.jdiv_c);
    row["eff_c"] = optional_json(pm.eff_c);
    row["fallback_streams"] = pm.fallback_streams;
    if (auto it = lengths.per_group.find(pm.prompt_id); it != lengths.per_group.end()) {
      row["lengths"] = summaries_json(it->second);
    }
    add("jdiv", pm.jdiv);
    add("one_gram_div", pm.one_gram_div);
    add("vendi", pm.vendi);
    add("eff", pm.eff);
    add("jdiv_c", pm.jdiv_c);
    add("eff_c", pm.eff_c);
    rows.push_back(std::move(row));
  }
  out["prompts"] = std::move(rows);
  json dataset = json::object();
  dataset["prompts"] = prompts.size();
  for (const auto& [key, t] : totals) {
    dataset[key] = {{"mean", t.second ? json(t.first / static_cast<double>(t.second)) : json(nullptr)},
                    {"count", t.second}};
  }
  dataset["lengths"] = summaries_json(lengths.corpus);
  out["dataset"] = std::move(dataset);
  return out;
}

std::string report_table(const std::vector<PromptMetrics>& prompts, const ReportOptions& options) {
  std::vector<std::string> header{"prompt_id", "n", "m"};
  for (auto k : options.k_list) header.push_back("p@" + std::to_string(k));
  for (const char* h : {"JDiv", "1gDiv", "Vendi", "Eff", "JDiv-c", "Eff-c"}) header.emplace_back(h);

  std::vector<std::vector<std::string>> rows{header};
  std::vector<std::pair<double, std::size_t>> sums(header.size());
  for (const auto& pm : prompts) {
    std::vector<std::optional<double>> values;
    for (auto k : options.k_list) values.emplace_back(pm.pass_at_k.at(k));
    for (const auto& v : {pm.jdiv, pm.one_gram_div, pm.vendi, std::optional<double>(pm.eff), pm.jdiv_c,
                          pm.eff_c}) {
      values.push_back(v);
    }
    std::vector<std::string> row{pm.prompt_id, std::to_string(pm.n), std::to_string(pm.m)};
    for (std::size_t i = 0; i < values.size(); ++i) {
      row.push_back(fixed(values[i]));
      if (values[i]) {
        sums[i + 3].first += *values[i];
        ++sums[i + 3].second;
      }
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::string> mean_row{"mean", "", ""};
  for (std::size_t i = 3; i < header.size(); ++i) {
    mean_row.push_back(sums[i].second ? fixed(sums[i].first / static_cast<double>(sums[i].second)) : "-");
  }
  rows.push_back(std::move(mean_row));

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << "  ";
      if (i == 0) {
        out << row[i] << std::string(width[i] - row[i].size(), ' ');
      } else {
        out << std::string(width[i] - row[i].size(), ' ') << row[i];
      }
    }
    out << '\n';
  }
  return out.str();
}

void cmd_report(const ReportOptions& options) {
  if (options.k_list.empty()) throw Error(ErrorKind::kInvalidArgument, "--k needs at least one value");
  for (auto k : options.k_list) {
    if (k < 1) throw Error(ErrorKind::kInvalidArgument, "k must be >= 1");
  }
  if (!(options.tau >= 0.0 && options.tau <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "tau must lie in [0, 1]");
  }
  const Corpus corpus = parse_corpus_file(options.corpus);
  std::optional<EmbeddingTable> embeddings;
  if (options.embeddings) embeddings = parse_embeddings_file(*options.embeddings);
  const std::size_t workers = worker_count();

  std::vector<const SampleGroup*> groups;
  for (const auto& [id, g] : corpus) groups.push_back(&g);
  std::vector<PromptMetrics> prompts(groups.size());
  parallel_for(groups.size(), workers, [&](std::size_t i) {
    prompts[i] = prompt_metrics(*groups[i], options, embeddings ? &*embeddings : nullptr, 1);
  });

  const fs::path out_dir(options.out);
  Manifest manifest("report");
  manifest.add_input("corpus", options.corpus);
  if (options.embeddings) manifest.add_input("embeddings", *options.embeddings);
  manifest.set_parameter("k", options.k_list);
  manifest.set_parameter("tau", options.tau);
  manifest.set_parameter("min_match", options.min_match);
  write_file_atomic(out_dir / "report.json",
                    report_json(prompts, options, length_stats(corpus)).dump(2) + "\n");
  write_file_atomic(out_dir / "report.txt", report_table(prompts, options));
  manifest.add_output("report.json");
  manifest.add_output("report.txt");
  manifest.write(out_dir);
}

AdvantageVector group_advantages(const SampleGroup& group, const AdvantageOptions& options,
                                 const EmbeddingTable* embeddings) {
  const GroupOutcome outcome(group.correctness());
  auto diversity = [&]() -> AdvantageVector {
    if (options.diversity == DiversityReward::kVendi) {
      if (embeddings == nullptr) {
        throw Error(ErrorKind::kInvalidArgument, "vendi diversity reward needs --embeddings");
      }
      return vendi_diversity_advantages(group_embeddings(*embeddings, group));
    }
    const auto prepared = prepare_group(group);
    if (options.diversity == DiversityReward::kOneGram) {
      return diversity_advantages(one_gram_matrix(prepared.sources));
    }
    return diversity_advantages(pairwise_matrix(prepared.streams, options.min_match, 1));
  };

  AdvantageVector out;
  switch (options.objective) {
    case Objective::kBase:
      out = base_advantages(outcome);
      break;
    case Objective::kPasskLoo:
      if (options.k && *options.k != group.n()) {
        throw Error(ErrorKind::kInvalidArgument, "passk_loo treats the group as the k-sample set; prompt '" +
                                                     group.prompt_id + "' has n=" +
                                                     std::to_string(group.n()));
      }
      out = passk_loo_advantages(outcome);
      break;
    case Objective::kPkpo:
      if (!options.k) throw Error(ErrorKind::kInvalidArgument, "pkpo needs --k");
      out = pkpo_advantages(outcome, *options.k);
      break;
    case Objective::kDiversity:
      out = diversity();
      break;
    case Objective::kCombined:
      out = combine_advantages(base_advantages(outcome), diversity(), options.lambda_div);
      break;
    case Objective::kEntropy:
      throw Error(ErrorKind::kInvalidArgument, "the entropy objective needs a policy; use simulate");
  }
  return out;
}

void cmd_advantages(const AdvantageOptions& options) {
  if (options.lambda_div < 0.0) throw Error(ErrorKind::kInvalidArgument, "lambda_div must be >= 0");
  const Corpus corpus = parse_corpus_file(options.corpus);
  std::optional<EmbeddingTable> embeddings;
  if (options.embeddings) embeddings = parse_embeddings_file(*options.embeddings);

  std::vector<const SampleGroup*> groups;
  for (const auto& [id, g] : corpus) groups.push_back(&g);
  std::vector<AdvantageVector> results(groups.size());
  parallel_for(groups.size(), worker_count(), [&](std::size_t i) {
    results[i] = group_advantages(*groups[i], options, embeddings ? &*embeddings : nullptr);
  });

  const bool uses_div = options.objective == Objective::kDiversity ||
                        options.objective == Objective::kCombined;
  json params = json::object();
  if (options.k) params["k"] = *options.k;
  if (options.objective == Objective::kCombined) params["lambda_div"] = options.lambda_div;
  if (uses_div) params["diversity"] = diversity_reward_name(options.diversity);

  std::string body;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    json ids = json::array();
    for (const auto& s : groups[i]->samples) ids.push_back(s.sample_id);
    json line{{"prompt_id", groups[i]->prompt_id},
              {"objective", objective_name(options.objective)},
              {"params", params},
              {"sample_ids", ids},
              {"advantages", results[i].values}};
    body += line.dump() + "\n";
  }
  const fs::path out_dir(options.out);
  write_file_atomic(out_dir / "advantages.jsonl", body);
  Manifest manifest("advantages");
  manifest.add_input("corpus", options.corpus);
  if (options.embeddings) manifest.add_input("embeddings", *options.embeddings);
  manifest.set_parameter("objective", objective_name(options.objective));
  manifest.set_parameter("k", options.k ? json(*options.k) : json(nullptr));
  manifest.set_parameter("lambda_div", options.lambda_div);
  manifest.set_parameter("diversity", diversity_reward_name(options.diversity));
  manifest.set_parameter("min_match", options.min_match);
  manifest.add_output("advantages.jsonl");
  manifest.write(out_dir);
}

namespace {

// metric name -> prompt_id -> value (absent values skipped)
std::map<std::string, std::map<std::string, double>> report_values(const json& report,
                                                                   const std::string& which) {
  if (!report.is_object() || !report.contains("prompts") || !report["prompts"].is_array()) {
    throw Error(ErrorKind::kParse, "report " + which + " has no 'prompts' array");
  }
  std::map<std::string, std::map<std::string, double>> out;
  for (const auto& row : report["prompts"]) {
    const std::string id = row.at("prompt_id").get<std::string>();
    for (const auto& [k, v] : row.at("pass_at_k").items()) out["pass@" + k][id] = v.get<double>();
    for (const char* key : {"jdiv", "one_gram_div", "vendi", "eff", "jdiv_c", "eff_c"}) {
      if (row.contains(key) && row[key].is_number()) out[key][id] = row[key].get<double>();
    }
  }
  return out;
}

std::set<std::string> prompt_ids(const json& report) {
  std::set<std::string> ids;
  for (const auto& row : report["prompts"]) ids.insert(row.at("prompt_id").get<std::string>());
  return ids;
}

}  // namespace

json compare_reports(const json& a, const json& b, const CompareOptions& options, std::size_t workers) {
  if (options.resamples < kMinResamples) {
    throw Error(ErrorKind::kInvalidArgument, "resamples must be >= " + std::to_string(kMinResamples));
  }
  std::map<std::string, std::map<std::string, double>> va;
  std::map<std::string, std::map<std::string, double>> vb;
  try {
    va = report_values(a, "A");
    vb = report_values(b, "B");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("malformed report: ") + e.what());
  }
  const auto ids_a = prompt_ids(a);
  const auto ids_b = prompt_ids(b);
  if (ids_a != ids_b) {
    std::string missing;
    for (const auto& id : ids_a) {
      if (!ids_b.count(id)) missing += (missing.empty() ? "" : ",") + ("B:" + id);
    }
    for (const auto& id : ids_b) {
      if (!ids_a.count(id)) missing += (missing.empty() ? "" : ",") + ("A:" + id);
    }
    throw Error(ErrorKind::kMismatch, "prompt sets differ; missing " + missing);
  }

  json metrics = json::array();
  for (const auto& [metric, values_a] : va) {
    auto it = vb.find(metric);
    if (it == vb.end()) continue;
    PairedSeries series;
    for (const auto& [id, x] : values_a) {
      if (auto y = it->second.find(id); y != it->second.end()) {
        series.a.push_back(x);
        series.b.push_back(y->second);
      }
    }
    if (series.size() == 0) continue;
    const ChangeReport change = aggregate_changes(series);
    json p = nullptr;
    if (series.size() >= 2) p = paired_bootstrap(series, options.resamples, options.seed, workers);
    metrics.push_back({{"metric", metric},
                       {"comparisons", change.comparisons},
                       {"up_pct", change.up_pct},
                       {"down_pct", change.down_pct},
                       {"tie_pct", change.tie_pct},
                       {"mean_delta", change.mean_delta},
                       {"p_value", p}});
  }
  return {{"resamples", options.resamples}, {"seed", options.seed}, {"metrics", metrics}};
}

void cmd_compare(const CompareOptions& options) {
  const json result =
      compare_reports(read_json_file(options.report_a), read_json_file(options.report_b), options,
                      worker_count());
  std::ostringstream table;
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %6s %8s %8s %10s %8s\n", "metric", "N", "up%", "down%",
                "delta", "p");
  table << line;
  for (const auto& m : result["metrics"]) {
    const std::string p = m["p_value"].is_null() ? "-" : fixed(m["p_value"].get<double>());
    std::snprintf(line, sizeof line, "%-14s %6zu %8.1f %8.1f %+10.4f %8s\n",
                  m["metric"].get<std::string>().c_str(), m["comparisons"].get<std::size_t>(),
                  m["up_pct"].get<double>(), m["down_pct"].get<double>(),
                  m["mean_delta"].get<double>(), p.c_str());
    table << line;
  }
  const fs::path out_dir(options.out);
  write_file_atomic(out_dir / "compare.json", result.dump(2) + "\n");
  write_file_atomic(out_dir / "compare.txt", table.str());
  Manifest manifest("compare");
  manifest.add_input("report_a", options.report_a);
  manifest.add_input("report_b", options.report_b);
  manifest.set_parameter("resamples", options.resamples);
  manifest.set_parameter("seed", options.seed);
  manifest.add_output("compare.json");
  manifest.add_output("compare.txt");
  manifest.write(out_dir);
}

void cmd_simulate(const SimulateOptions& options) {
  std::ifstream in(options.config);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + options.config);
  const sim::ExperimentConfig config = sim::parse_experiment(in);
  const auto runs = config.runs();
  std::vector<sim::TrainingTrace> traces(runs.size());
  parallel_for(runs.size(), worker_count(), [&](std::size_t i) { traces[i] = sim::run(runs[i]); });

  const fs::path out_dir(options.out);
  Manifest manifest("simulate");
  manifest.add_input("config", options.config);
  std::map<std::string, std::vector<const sim::TrainingTrace*>> by_label;
  for (const auto& trace : traces) {
    std::ostringstream body;
    sim::write_trace(trace, body);
    const std::string name =
        "traces/" + encode_file_name(trace.label) + "_seed" + std::to_string(trace.seed) + ".jsonl";
    write_file_atomic(out_dir / name, body.str());
    manifest.add_output(name);
    by_label[trace.label].push_back(&trace);
  }

  json summary = json::array();
  for (const auto& [label, group] : by_label) {
    json entry{{"objective", label}, {"seeds", group.size()}};
    auto field = [&](const char* key, auto get) {
      std::vector<double> initial;
      std::vector<double> final_values;
      for (const auto* t : group) {
        initial.push_back(get(t->records.front()));
        final_values.push_back(get(t->records.back()));
      }
      const auto s0 = seed_summary(initial);
      const auto s1 = seed_summary(final_values);
      entry[key] = {{"initial_mean", s0.mean},
                    {"final_mean", s1.mean},
                    {"final_std", s1.std ? json(*s1.std) : json(nullptr)}};
    };
    field("pass1", [](const sim::TraceRecord& r) { return r.pass1; });
    field("pass_at_k", [](const sim::TraceRecord& r) { return r.pass_k; });
    field("expected_jdiv", [](const sim::TraceRecord& r) { return r.expected_jdiv; });
    field("entropy", [](const sim::TraceRecord& r) { return r.entropy; });
    summary.push_back(std::move(entry));
  }
  write_file_atomic(out_dir / "summary.json", summary.dump(2) + "\n");
  manifest.add_output("summary.json");
  manifest.write(out_dir);
}

std::string tokenize_debug(const std::string& source, bool strip) {
  return tokenize(strip ? strip_comments_docstrings(source) : source).debug_string();
}

}  // namespace tilediv::cli
