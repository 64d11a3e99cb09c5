#include "tilediv/metrics.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "tilediv/error.hpp"

namespace tilediv {

PassKEstimate pass_at_k(std::size_t n, std::size_t m, std::size_t k) {
  if (k < 1) throw Error(ErrorKind::kInvalidArgument, "pass@k needs k >= 1");
  if (k > n) {
    throw Error(ErrorKind::kInvalidArgument,
                "pass@k needs k <= n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
  }
  if (m > n) throw Error(ErrorKind::kInvalidArgument, "pass@k needs m <= n");
  PassKEstimate est{n, m, k, 1.0};
  if (n - m < k) return est;
  double miss = 1.0;
  for (std::size_t i = n - m + 1; i <= n; ++i) {
    miss *= 1.0 - static_cast<double>(k) / static_cast<double>(i);
  }
  est.value = 1.0 - miss;
  return est;
}

double dataset_pass_at_k(const Corpus& corpus, std::size_t k) {
  if (corpus.empty()) throw Error(ErrorKind::kDomain, "dataset pass@k over an empty corpus");
  double total = 0.0;
  for (const auto& [prompt_id, group] : corpus) {
    if (group.n() < k) {
      throw Error(ErrorKind::kInvalidArgument, "prompt '" + prompt_id + "' has n=" +
                                                   std::to_string(group.n()) + " < k=" +
                                                   std::to_string(k));
    }
    total += pass_at_k(group.n(), group.m(), k).value;
  }
  return total / static_cast<double>(corpus.size());
}

EmbeddingSet::EmbeddingSet(std::vector<std::vector<double>> vectors)
    : vectors_(std::move(vectors)) {
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    if (vectors_[i].size() != dimension()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "embedding " + std::to_string(i) + " has dimension " +
                      std::to_string(vectors_[i].size()) + ", expected " +
                      std::to_string(dimension()));
    }
    for (double v : vectors_[i]) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::kDomain, "embedding " + std::to_string(i) + " is not finite");
      }
    }
  }
}

EmbeddingSet EmbeddingSet::subset(std::span<const std::size_t> indices) const {
  std::vector<std::vector<double>> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(vectors_[i]);
  return EmbeddingSet(std::move(out));
}

double vendi_score(const EmbeddingSet& embeddings) {
  const auto n = static_cast<Eigen::Index>(embeddings.size());
  if (n == 0) throw Error(ErrorKind::kDomain, "Vendi score needs at least one sample");
  const auto d = static_cast<Eigen::Index>(embeddings.dimension());
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = embeddings[static_cast<std::size_t>(i)][j];
    const double norm = x.row(i).norm();
    if (norm == 0.0) {
      throw Error(ErrorKind::kDomain, "embedding " + std::to_string(i) + " has zero norm");
    }
    x.row(i) /= norm;
  }
  Eigen::MatrixXd kernel = (x * x.transpose()) / static_cast<double>(n);
  kernel = 0.5 * (kernel + kernel.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(kernel, Eigen::EigenvaluesOnly);
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lambda = solver.eigenvalues()(i);
    if (lambda < kVendiEigenFloor) continue;
    entropy -= lambda * std::log(lambda);
  }
  return std::exp(entropy);
}

std::optional<double> CorrectOnlyView::jdiv() const {
  if (matrix.n() < 2) return std::nullopt;
  return tilediv::jdiv(matrix);
}

std::optional<double> CorrectOnlyView::effective_clusters(double tau) const {
  if (matrix.n() < 1) return std::nullopt;
  return tilediv::effective_clusters(clusters(matrix, tau));
}

CorrectOnlyView correct_only_view(const std::vector<bool>& correct, const SimMatrix& matrix) {
  if (correct.size() != matrix.n()) {
    throw Error(ErrorKind::kInvalidArgument, "correctness labels do not match matrix size");
  }
  CorrectOnlyView view;
  for (std::size_t i = 0; i < correct.size(); ++i) {
    if (correct[i]) view.indices.push_back(i);
  }
  view.matrix = matrix.submatrix(view.indices);
  return view;
}

CorrectOnlyView correct_only_view(const SampleGroup& group, const SimMatrix& matrix) {
  return correct_only_view(group.correctness(), matrix);
}

}  // namespace tilediv
