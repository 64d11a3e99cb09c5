#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tilediv/ingest.hpp"
#include "tilediv/similarity.hpp"

namespace tilediv {

struct PassKEstimate {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t k = 0;
  double value = 0.0;
};

// Unbiased pass@k from n samples with m correct:
//   1 - C(n-m, k) / C(n, k) = 1 - prod_{i=n-m+1}^{n} (1 - k/i),
// exactly 1 when n - m < k.
PassKEstimate pass_at_k(std::size_t n, std::size_t m, std::size_t k);

// Unweighted mean of per-prompt estimates.
double dataset_pass_at_k(const Corpus& corpus, std::size_t k);

// One embedding vector per sample, all of the same dimension.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  explicit EmbeddingSet(std::vector<std::vector<double>> vectors);

  std::size_t size() const { return vectors_.size(); }
  std::size_t dimension() const { return vectors_.empty() ? 0 : vectors_.front().size(); }
  const std::vector<double>& operator[](std::size_t i) const { return vectors_[i]; }
  EmbeddingSet subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<std::vector<double>> vectors_;
};

inline constexpr double kVendiEigenFloor = 1e-10;

// exp of the von Neumann entropy of K/n, K the cosine-similarity kernel.
double vendi_score(const EmbeddingSet& embeddings);

struct CorrectOnlyView {
  std::vector<std::size_t> indices;  // positions of correct samples
  SimMatrix matrix;

  std::optional<double> jdiv() const;
  std::optional<double> effective_clusters(double tau = kDefaultTau) const;
};

CorrectOnlyView correct_only_view(const std::vector<bool>& correct, const SimMatrix& matrix);
CorrectOnlyView correct_only_view(const SampleGroup& group, const SimMatrix& matrix);

}  // namespace tilediv
