#pragma once

// Retrieval evaluation: keyword baseline, precision/recall/F1, the
// side-by-side runner and the synthetic corpus generator.
//
// Metric conventions: P = |hit| / |retrieved| (0 when nothing retrieved),
// R = |hit| / |relevant|, F1 = 2PR / (P + R) or 0. P and R are averaged
// macro (per query, equal weight); the summary F1 is taken from those averages.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ontoq {

class Pipeline;
struct TermDocMatrix;

struct GoldQuery {
  std::string query;
  std::vector<std::string> relevant_ids;  // sorted, unique
  std::string archetype;
  std::optional<std::int64_t> now;  // clock for temporal queries
};

/// JSON lines {query, relevant_ids, archetype, now?}. Throws IoError,
/// InvalidConfig (bad line, with its number) or EmptyGold (no queries, or a
/// query with no relevant ids).
std::vector<GoldQuery> load_gold(const std::string& path);
std::vector<GoldQuery> load_gold(std::istream& in);
void write_gold(const std::vector<GoldQuery>& gold, std::ostream& out);

/// Bag-of-words baseline: sum of the TF-IDF weights of the query's distinct
/// content terms in each document. Documents scoring 0 are not returned.
/// Descending score, ties by id; at most k entries.
std::vector<std::pair<std::string, double>> keyword_search(const TermDocMatrix& matrix, const std::string& query,
                                                           std::size_t k);

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Throws EmptyGold when `relevant` is empty. Duplicate retrieved ids count once.
Metrics compute_metrics(const std::vector<std::string>& retrieved, const std::vector<std::string>& relevant);

struct SystemResult {
  std::vector<std::string> retrieved;
  Metrics metrics;
  double millis = 0.0;
  std::string note;  // e.g. the uncompilable-intent message
};

struct QueryReport {
  GoldQuery gold;
  SystemResult ontology;
  SystemResult keyword;     // cutoff |relevant|
  SystemResult keyword_10;  // cutoff 10
};

struct SystemSummary {
  std::string name;
  Metrics macro;
  double mean_ms = 0.0;
  double median_ms = 0.0;
};

struct ComparisonReport {
  std::vector<SystemSummary> systems;  // ontology, keyword@|gold|, keyword@10
  std::vector<QueryReport> queries;
};

/// Milliseconds from a monotonic source.
using Clock = std::function<double()>;
Clock steady_clock_ms();

/// Runs both systems over every gold query against the pipeline's current
/// snapshot. Gold ids missing from the graph raise InvalidConfig.
ComparisonReport run_comparison(const Pipeline& pipeline, const std::vector<GoldQuery>& gold,
                                const Clock& clock = steady_clock_ms());

std::string render_report(const ComparisonReport& report);
std::string report_json(const ComparisonReport& report);

// ---------------------------------------------------------------- generator

struct GenParams {
  std::uint64_t seed = 42;
  std::int64_t now = 1767225600;  // 2026-01-01T00:00:00Z
  std::size_t compute_instances = 60;
  std::size_t databases = 20;
  std::size_t filler_services = 12;
  std::size_t buckets = 10;
  std::size_t vulnerabilities = 12;
  std::size_t users = 5;
  std::size_t subnets = 4;

  /// Scales the bulk kinds so the corpus has roughly `nodes` nodes.
  static GenParams for_size(std::size_t nodes, std::uint64_t seed = 42);
};

struct GeneratedCorpus {
  std::string corpus;  // JSON lines
  std::vector<GoldQuery> gold;
  std::size_t nodes = 0;
  std::size_t edges = 0;
};

/// Deterministic for fixed parameters. Plants two gold queries for each of
/// the five archetypes (cost, compliance, temporal, security, topology); the
/// compliance answer is exactly nine PCI-subject payment services, next to
/// decoy services that mention PCI without the relationship.
GeneratedCorpus generate_corpus(const GenParams& params);

}  // namespace ontoq
