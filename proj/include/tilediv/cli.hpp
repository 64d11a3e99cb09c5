#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tilediv/ingest.hpp"
#include "tilediv/metrics.hpp"
#include "tilediv/rewards.hpp"
#include "tilediv/similarity.hpp"
#include "tilediv/stats.hpp"

namespace tilediv::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kWorkersEnv = "TILEDIV_WORKERS";

// Worker count from TILEDIV_WORKERS, else the hardware concurrency.
std::size_t worker_count();

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// Filesystem-safe name for a prompt id: [A-Za-z0-9._-] kept, rest as %XX.
std::string encode_file_name(const std::string& id);

class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)) {}

  void add_input(const std::string& role, const std::filesystem::path& path);
  void set_parameter(const std::string& name, nlohmann::json value);
  void add_output(const std::string& relative_path);
  nlohmann::json to_json() const;
  void write(const std::filesystem::path& out_dir) const;

 private:
  std::string command_;
  nlohmann::json inputs_ = nlohmann::json::array();
  nlohmann::json parameters_ = nlohmann::json::object();
  std::vector<std::string> outputs_;
};

// prompt_id -> sample_id -> vector
using EmbeddingTable = std::map<std::string, std::map<std::int64_t, std::vector<double>>>;
EmbeddingTable parse_embeddings(std::istream& in);
EmbeddingTable parse_embeddings_file(const std::string& path);
// Embeddings of one group in sample order; every sample must be present.
EmbeddingSet group_embeddings(const EmbeddingTable& table, const SampleGroup& group);

// Sources with comments and docstrings removed, and their token streams.
struct PreparedGroup {
  std::vector<std::string> sources;
  std::vector<TokenStream> streams;
  std::size_t fallback_count = 0;
};
PreparedGroup prepare_group(const SampleGroup& group);

struct SimilarityOptions {
  std::string corpus;
  std::string out;
  std::size_t min_match = kDefaultMinMatch;
  bool binary = false;
};
void cmd_similarity(const SimilarityOptions& options);

struct ReportOptions {
  std::string corpus;
  std::string out;
  std::optional<std::string> embeddings;
  std::vector<std::size_t> k_list{1, 10};
  double tau = kDefaultTau;
  std::size_t min_match = kDefaultMinMatch;
};
struct PromptMetrics {
  std::string prompt_id;
  std::size_t n = 0;
  std::size_t m = 0;
  std::map<std::size_t, double> pass_at_k;
  std::optional<double> jdiv;
  std::optional<double> one_gram_div;
  std::optional<double> vendi;
  double eff = 1.0;
  std::size_t cluster_count = 0;
  std::optional<double> jdiv_c;
  std::optional<double> eff_c;
  std::size_t fallback_streams = 0;
};
PromptMetrics prompt_metrics(const SampleGroup& group, const ReportOptions& options,
                             const EmbeddingTable* embeddings, std::size_t workers);
nlohmann::json report_json(const std::vector<PromptMetrics>& prompts, const ReportOptions& options,
                           const LengthReport& lengths);
std::string report_table(const std::vector<PromptMetrics>& prompts, const ReportOptions& options);
void cmd_report(const ReportOptions& options);

struct AdvantageOptions {
  std::string corpus;
  std::string out;
  Objective objective = Objective::kBase;
  std::optional<std::size_t> k;
  double lambda_div = 0.0;
  DiversityReward diversity = DiversityReward::kJplag;
  std::optional<std::string> embeddings;
  std::size_t min_match = kDefaultMinMatch;
};
AdvantageVector group_advantages(const SampleGroup& group, const AdvantageOptions& options,
                                 const EmbeddingTable* embeddings);
void cmd_advantages(const AdvantageOptions& options);

struct CompareOptions {
  std::string report_a;
  std::string report_b;
  std::string out;
  std::size_t resamples = kDefaultResamples;
  std::uint64_t seed = 0;
};
// Per-metric change reports and bootstrap p-values for two report.json files.
nlohmann::json compare_reports(const nlohmann::json& a, const nlohmann::json& b,
                               const CompareOptions& options, std::size_t workers);
void cmd_compare(const CompareOptions& options);

struct SimulateOptions {
  std::string config;
  std::string out;
};
void cmd_simulate(const SimulateOptions& options);

// Debug view of one program: "KIND line:col" per token.
std::string tokenize_debug(const std::string& source, bool strip);

}  // namespace tilediv::cli
