#pragma once

// Configuration and the shared query pipeline used by the CLI, the REPL,
// the HTTP server and the evaluation runner.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ontoq/answer.hpp"
#include "ontoq/classifier.hpp"
#include "ontoq/graph.hpp"
#include "ontoq/ingestion.hpp"
#include "ontoq/nlq.hpp"
#include "ontoq/semantic_index.hpp"
#include "ontoq/taxonomy.hpp"

namespace ontoq {

/// Directory holding lexicon.json and categories.json; $ONTOQ_DATA_DIR wins
/// over the build-time default.
std::string default_data_dir();

struct AppConfig {
  std::vector<std::string> corpus_paths;
  std::vector<std::string> event_paths;
  std::string lexicon_path;     // empty: <data dir>/lexicon.json
  std::string categories_path;  // empty: <data dir>/categories.json
  std::size_t lsi_rank = kDefaultMaxRank;
  double threshold = kDefaultResolutionThreshold;
  double graph_weight = 0.7;
  double semantic_weight = 0.3;
  bool relax = true;
  std::string default_tenancy = "tenancy-prod";
  std::optional<std::int64_t> now;  // epoch seconds; wall clock when unset
  std::string format = "table";

  /// Reads a JSON config; keys mirror the field names ("corpus" and "events"
  /// take a string or a list). Throws IoError or InvalidConfig.
  static AppConfig load(const std::string& path);
  static AppConfig from_json_text(const std::string& text);

  /// Range checks and file existence. Throws InvalidConfig or IoError.
  void validate() const;
  std::string resolved_lexicon() const;
  std::string resolved_categories() const;
};

/// Immutable graph plus its index; swapped whole on ingest.
struct Snapshot {
  KnowledgeGraph graph;
  LoadReport load_report;
  EventReport event_report;
  std::unordered_map<std::string, std::string> unique_names;  // name -> id, names used once
  TermDocMatrix matrix;
  LsiModel model;
};

struct QueryOutcome {
  QueryIntent intent;
  Answer answer;
};

class Pipeline {
 public:
  /// Loads the lexicons; the graph starts empty.
  explicit Pipeline(AppConfig config);

  const AppConfig& config() const { return config_; }
  const Taxonomy& taxonomy() const { return taxonomy_; }
  const Lexicon& lexicon() const { return lexicon_; }
  const CategoryLexicon& categories() const { return categories_; }

  /// Loads the configured corpus files (concatenated) and event files.
  void load();
  /// Replaces the graph with a corpus read from `in`; returns its report.
  LoadReport ingest(std::istream& in);
  /// Re-indexes and publishes `graph`.
  void publish(KnowledgeGraph graph, LoadReport load_report = {}, EventReport event_report = {});

  std::shared_ptr<const Snapshot> snapshot() const;

  Timestamp now() const;
  /// Natural-language query; relaxation follows the config.
  QueryOutcome ask(const std::string& text) const;
  QueryOutcome ask(const std::string& text, const Snapshot& snap, Timestamp now) const;
  /// Query text in the IR syntax, bypassing the NLQ stage.
  Answer ask_ir(const std::string& ir_text) const;

  std::string render(const Answer& a, const std::string& format) const;

 private:
  AppConfig config_;
  Taxonomy taxonomy_;
  Lexicon lexicon_;
  CategoryLexicon categories_;
  mutable std::mutex mu_;
  std::shared_ptr<const Snapshot> snapshot_;
};

}  // namespace ontoq
