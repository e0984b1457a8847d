#pragma once

// TF-IDF term-document matrix over node text and the LSI model built on it.
//
//   tf(t, d)  = count(t, d) / |d|          (|d| = content tokens in d)
//   idf(t)    = ln(N / df(t))
//   W[t][d]   = tf * idf
//
// A term that occurs in every document gets idf 0; its entries are kept in
// the sparse structure with weight 0 so presence stays observable.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ontoq/svd.hpp"

namespace ontoq {

class KnowledgeGraph;
struct ResourceNode;

struct TermDocMatrix {
  struct Entry {
    std::uint32_t term;
    double weight;
  };

  std::vector<std::string> vocabulary;      // sorted
  std::vector<std::string> doc_ids;         // sorted
  std::vector<std::string> doc_kinds;       // parallel to doc_ids
  std::vector<std::vector<Entry>> columns;  // per document, sorted by term
  std::vector<std::uint32_t> doc_frequencies;
  std::unordered_map<std::string, std::uint32_t> term_index;

  std::size_t term_count() const { return vocabulary.size(); }
  std::size_t doc_count() const { return doc_ids.size(); }
  std::optional<std::uint32_t> term_id(const std::string& term) const;
  std::optional<std::size_t> doc_position(const std::string& id) const;
  double idf(std::uint32_t term) const;
  double weight(std::uint32_t term, std::size_t doc) const;

  /// TF-IDF vector of a bag of terms over the vocabulary; unknown terms are
  /// dropped and tf is normalized by the number of known terms.
  std::vector<double> query_vector(const std::vector<std::string>& terms) const;
};

/// Text indexed for a node: name, kind words, description, non-timestamp
/// property values and API endpoints.
std::string node_text(const ResourceNode& node);

TermDocMatrix build_matrix(const KnowledgeGraph& graph);

/// Matrix over explicit (id, kind, text) documents; used for ad-hoc corpora.
struct TextDocument {
  std::string id;
  std::string kind;
  std::string text;
};
TermDocMatrix build_matrix(std::vector<TextDocument> docs);

/// Sparse view of W as a linear operator (terms x documents).
class TermDocOperator final : public LinearOperator {
 public:
  explicit TermDocOperator(const TermDocMatrix& m) : m_(m) {}
  std::size_t rows() const override { return m_.term_count(); }
  std::size_t cols() const override { return m_.doc_count(); }
  void apply(const double* x, double* y) const override;
  void apply_transpose(const double* x, double* y) const override;

 private:
  const TermDocMatrix& m_;
};

struct LsiModel {
  std::size_t rank = 0;
  std::vector<double> singular_values;  // non-increasing
  DenseMatrix term_factors;             // |vocab| x rank
  DenseMatrix doc_factors;              // |docs| x rank
  DenseMatrix doc_latent;               // |docs| x rank, rows of V * Sigma
  std::vector<std::string> doc_ids;

  bool empty() const { return rank == 0; }
};

inline constexpr std::size_t kDefaultMaxRank = 64;

/// min(64, |vocab|, |docs|).
std::size_t default_rank(const TermDocMatrix& matrix);

/// Rank-k LSI model. k == 0 yields an empty model (no latent space).
LsiModel truncated_svd(const TermDocMatrix& matrix, std::size_t k, double tol = 1e-9, std::size_t max_iter = 500);

/// Folding-in: Sigma^-1 U^T q for the TF-IDF vector q of `terms`.
/// Components with a numerically zero singular value are left at 0.
std::vector<double> embed_query(const LsiModel& model, const TermDocMatrix& matrix,
                                const std::vector<std::string>& terms);

/// Cosine between a folded-in query and a document, measured in the
/// sigma-scaled latent space. Zero-norm vectors score 0.
double latent_cosine(const LsiModel& model, const std::vector<double>& query_latent, std::size_t doc);

/// Documents by descending cosine, ties by id; at most k entries.
std::vector<std::pair<std::string, double>> top_k_similar(const LsiModel& model,
                                                          const std::vector<double>& query_latent, std::size_t k);

}  // namespace ontoq
