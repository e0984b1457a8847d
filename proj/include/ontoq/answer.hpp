#pragma once

// Executes compiled queries, ranks the bindings and renders the answer.
//
//   score = graph_weight * graph_score + semantic_weight * semantic_score
//
// graph_score is the fraction of intent constraints kept (1 for strict
// execution); semantic_score is the latent cosine between the question and
// the anchor node's document, clamped at 0, or 0 without an index.

#include <optional>
#include <string>
#include <vector>

#include "ontoq/nlq.hpp"
#include "ontoq/query_ir.hpp"

namespace ontoq {

class KnowledgeGraph;
class Taxonomy;
struct LsiModel;
struct TermDocMatrix;

struct RankedResult {
  Binding binding;
  std::vector<std::optional<PropertyValue>> values;  // parallel to the IR's returns
  double score = 0.0;
  double graph_score = 1.0;
  double semantic_score = 0.0;
};

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::size_t total_count = 0;
};

struct AnswerOptions {
  double graph_weight = 0.7;
  double semantic_weight = 0.3;
  bool relax = true;  // fall back to relaxed_answer when strict execution is empty
};

struct Answer {
  GraphQueryIR ir;  // the query actually executed
  ResultTable table;
  std::string summary;
  std::vector<RankedResult> results;
  bool approximate = false;
  std::vector<std::string> dropped;  // displays of relaxed constraints
};

/// Optional semantic side of ranking; both pointers null means no index.
struct SemanticIndexRef {
  const LsiModel* model = nullptr;
  const TermDocMatrix* matrix = nullptr;
};

/// Sorts by score descending, then binding ids ascending.
void rank_results(std::vector<RankedResult>& results);

/// Column headers for the IR's return items.
std::vector<std::string> result_headers(const GraphQueryIR& ir, const Lexicon& lexicon);

ResultTable make_table(const GraphQueryIR& ir, const std::vector<RankedResult>& results, const Lexicon& lexicon);

std::string render_summary(const QueryIntent& intent, const GraphQueryIR& ir, const std::vector<RankedResult>& results,
                           const Lexicon& lexicon);

/// Strict execution of `ir`; queries with ORDER BY keep the executor's order,
/// all others are ranked by score.
Answer answer(const KnowledgeGraph& graph, SemanticIndexRef index, const QueryIntent& intent, const GraphQueryIR& ir,
              const Lexicon& lexicon, const AnswerOptions& options = {});

/// Drops constraints cumulatively, least confident first (later phrases
/// first on ties), until execution returns something. Empty answer when
/// nothing matches even with every constraint dropped.
Answer relaxed_answer(const KnowledgeGraph& graph, SemanticIndexRef index, const QueryIntent& intent,
                      const Taxonomy& taxonomy, const Lexicon& lexicon, const AnswerOptions& options = {});

/// Compiles, answers and relaxes when enabled and the strict answer is empty.
Answer answer_intent(const KnowledgeGraph& graph, SemanticIndexRef index, const QueryIntent& intent,
                     const Taxonomy& taxonomy, const Lexicon& lexicon, const AnswerOptions& options = {});

std::string render_text(const Answer& a);
std::string render_json(const Answer& a);
std::string render_csv(const Answer& a);

}  // namespace ontoq
