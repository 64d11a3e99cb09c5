#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tilediv/cli.hpp"
#include "tilediv/error.hpp"

using namespace tilediv;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return 3;
    case ErrorKind::kInvalidArgument: return 4;
    case ErrorKind::kDomain: return 5;
    case ErrorKind::kIo: return 6;
    case ErrorKind::kMismatch: return 7;
    case ErrorKind::kConfig: return 8;
  }
  return 1;
}

// One line, one class; newlines in messages would break consumers.
void report_error(std::string_view kind, std::string message) {
  for (auto& c : message) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::cerr << "error: " << kind << ": " << message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Redundancy diagnostics and advantages for multi-sample code generations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cli::kToolVersion);

  cli::SimilarityOptions sim_opts;
  auto* similarity = app.add_subcommand("similarity", "Pairwise structural similarity matrices per prompt");
  similarity->add_option("corpus", sim_opts.corpus, "Corpus JSONL")->required();
  similarity->add_option("-o,--out", sim_opts.out, "Output directory")->required();
  similarity->add_option("--min-match", sim_opts.min_match, "Minimum tile length")
      ->check(CLI::PositiveNumber);
  similarity->add_flag("--binary", sim_opts.binary, "Write little-endian float64 matrices");

  cli::ReportOptions rep_opts;
  std::string embeddings_path;
  auto* report = app.add_subcommand("report", "pass@k and diversity report");
  report->add_option("corpus", rep_opts.corpus, "Corpus JSONL")->required();
  report->add_option("-o,--out", rep_opts.out, "Output directory")->required();
  report->add_option("--k", rep_opts.k_list, "Comma-separated k values")->delimiter(',');
  report->add_option("--tau", rep_opts.tau, "Cluster edge threshold (strict)")->check(CLI::Range(0.0, 1.0));
  report->add_option("--min-match", rep_opts.min_match, "Minimum tile length")->check(CLI::PositiveNumber);
  report->add_option("--embeddings", embeddings_path, "Embedding JSONL for Vendi");

  cli::AdvantageOptions adv_opts;
  std::string objective = "base";
  std::string diversity = "jplag";
  std::size_t adv_k = 0;
  std::string adv_embeddings;
  auto* advantages = app.add_subcommand("advantages", "Per-sample advantages for one objective");
  advantages->add_option("corpus", adv_opts.corpus, "Corpus JSONL")->required();
  advantages->add_option("-o,--out", adv_opts.out, "Output directory")->required();
  advantages->add_option("--objective", objective,
                         "base | passk_loo | pkpo | diversity | combined");
  advantages->add_option("--k", adv_k, "Subset size for pkpo")->check(CLI::PositiveNumber);
  advantages->add_option("--lambda-div", adv_opts.lambda_div, "Weight of the diversity term");
  advantages->add_option("--diversity", diversity, "jplag | one_gram | vendi");
  advantages->add_option("--embeddings", adv_embeddings, "Embedding JSONL for the vendi reward");
  advantages->add_option("--min-match", adv_opts.min_match, "Minimum tile length")
      ->check(CLI::PositiveNumber);

  cli::CompareOptions cmp_opts;
  auto* compare = app.add_subcommand("compare", "Prompt-level changes and paired bootstrap between reports");
  compare->add_option("a", cmp_opts.report_a, "Baseline report.json")->required();
  compare->add_option("b", cmp_opts.report_b, "Candidate report.json")->required();
  compare->add_option("-o,--out", cmp_opts.out, "Output directory")->required();
  compare->add_option("--resamples", cmp_opts.resamples, "Bootstrap resamples");
  compare->add_option("--seed", cmp_opts.seed, "Bootstrap seed");

  cli::SimulateOptions simu_opts;
  auto* simulate = app.add_subcommand("simulate", "Synthetic policy-gradient runs from a JSON config");
  simulate->add_option("config", simu_opts.config, "Experiment config JSON")->required();
  simulate->add_option("-o,--out", simu_opts.out, "Output directory")->required();

  std::string tok_path;
  bool tok_raw = false;
  auto* tok = app.add_subcommand("tokenize", "Print the structural token stream of a Python file");
  tok->add_option("source", tok_path, "Python source file")->required();
  tok->add_flag("--no-strip", tok_raw, "Skip comment and docstring removal");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage_error", e.what());
    return 2;
  }

  try {
    if (*similarity) {
      cli::cmd_similarity(sim_opts);
    } else if (*report) {
      if (!embeddings_path.empty()) rep_opts.embeddings = embeddings_path;
      cli::cmd_report(rep_opts);
    } else if (*advantages) {
      adv_opts.objective = parse_objective(objective);
      adv_opts.diversity = parse_diversity_reward(diversity);
      if (adv_k > 0) adv_opts.k = adv_k;
      if (!adv_embeddings.empty()) adv_opts.embeddings = adv_embeddings;
      cli::cmd_advantages(adv_opts);
    } else if (*compare) {
      cli::cmd_compare(cmp_opts);
    } else if (*simulate) {
      cli::cmd_simulate(simu_opts);
    } else if (*tok) {
      std::ifstream in(tok_path, std::ios::binary);
      if (!in) throw Error(ErrorKind::kIo, "cannot open " + tok_path);
      std::ostringstream buf;
      buf << in.rdbuf();
      std::cout << cli::tokenize_debug(buf.str(), !tok_raw);
    }
  } catch (const Error& e) {
    report_error(e.kind_name(), e.what());
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    report_error("io_error", e.what());
    return 6;
  } catch (const std::exception& e) {
    report_error("internal_error", e.what());
    return 1;
  }
  return 0;
}
