#pragma once

// Natural-language questions to graph queries.
//
// Phrases from the lexicon's cue tables are matched against the content
// tokens of the question (stopwords removed), scanning left to right and
// taking the longest phrase at each position. Equal-length candidates are
// ranked temporal > aggregation > relation > value > entity > filler.
// Phrase slots: {N} a count (digits or one..twenty), {unit} a time unit,
// {name} any single token (captured).

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ontoq/property.hpp"
#include "ontoq/query_ir.hpp"

namespace ontoq {

class Taxonomy;
struct LsiModel;
struct TermDocMatrix;

/// Kind name for an unlabeled anchor ("resources").
inline constexpr const char* kAnyResource = "AnyResource";
/// Value-cue kind meaning "a property of the anchor itself".
inline constexpr const char* kAnchorKind = "$anchor";
/// Value placeholder replaced by the configured default tenancy id.
inline constexpr const char* kDefaultTenancy = "$default_tenancy";

struct KindDisplay {
  std::string singular;
  std::string plural;
  std::string header;
  std::string salient = "name";
};

struct RelationCue {
  std::string phrase;
  std::string rel;
  std::string target_kind;
  std::string display;
  /// When set, the next value cue of target_kind becomes the far end of this
  /// relationship instead of an independent condition.
  bool binds_value = false;
  /// When set, the {name} slot is captured as the attribution user.
  bool attribution = false;
  double confidence = 1.0;
};

struct ValueCue {
  std::string phrase;
  std::string kind;
  std::string property;
  PropertyValue value;
  std::string display;  // fragment used in summaries, e.g. "in the production environment"
  std::string noun;     // fragment after a binding relation, e.g. "the crm service"
  double confidence = 1.0;
};

struct AggregationCue {
  std::string phrase;
  std::string property;
  bool descending = true;
};

struct TemporalCue {
  std::string phrase;
  std::string property = "created_at";
};

struct Lexicon {
  std::map<std::string, std::string> entity_synonyms;  // phrase -> kind
  std::vector<RelationCue> relation_cues;
  std::vector<ValueCue> value_cues;
  std::vector<AggregationCue> aggregation_cues;
  std::vector<TemporalCue> temporal_cues;
  std::vector<std::string> filler_phrases;
  std::map<std::string, KindDisplay> kinds;

  /// Display data for a kind; unknown kinds get generated names.
  KindDisplay display(const std::string& kind) const;

  /// Throws IoError or InvalidLexicon (with line numbers for syntax errors).
  static Lexicon load(const std::string& path, const Taxonomy& taxonomy);
  static Lexicon from_json_text(const std::string& text, const Taxonomy& taxonomy);
};

struct Condition {
  std::string kind;  // kAnchorKind for a property of the anchor
  std::string property;
  PropertyValue value;
  std::string display;
  std::optional<std::string> via_rel;  // set by a binding relation cue
  double confidence = 1.0;
  std::size_t position = 0;
};

struct Filter {
  std::string rel_type;
  std::string target_kind;
  std::string display;
  double confidence = 1.0;
  std::size_t position = 0;
};

struct Aggregation {
  std::string property;
  bool descending = true;
  std::size_t limit = 0;
};

struct TimeWindowIntent {
  std::string property;
  Timestamp start;
  Timestamp end;
  std::string display;
  double confidence = 1.0;
  std::size_t position = 0;
};

struct Attribution {
  std::string user;
  double confidence = 1.0;
  std::size_t position = 0;
};

struct DirectId {
  std::string id;
  std::string kind;
  std::size_t position = 0;
};

struct QueryIntent {
  std::string text;
  std::vector<std::string> entity_kinds;  // primary first
  std::vector<Condition> conditions;
  std::vector<Filter> filters;
  std::optional<Aggregation> aggregation;
  std::optional<TimeWindowIntent> time_window;
  std::optional<Attribution> attribution;
  std::vector<DirectId> direct_ids;
  std::vector<std::string> residual_terms;
  double confidence = 0.0;
};

/// Node named by a query token: its id and kind.
struct IdMatch {
  std::string id;
  std::string kind;
};

/// Node whose id (or unique name) is exactly the token, if any.
using IdLookup = std::function<std::optional<IdMatch>(const std::string& token)>;

struct Resolution {
  enum class Type { Kind, Relation, Unresolved };
  Type type = Type::Unresolved;
  std::string value;
  double score = 0.0;
};

inline constexpr double kDefaultResolutionThreshold = 0.35;

struct SemanticContext {
  const LsiModel* model = nullptr;
  const TermDocMatrix* matrix = nullptr;
  double threshold = kDefaultResolutionThreshold;
};

struct ExtractOptions {
  Timestamp now;
  std::string default_tenancy = "tenancy-prod";
  IdLookup ids;              // direct-id matching; off when empty
  SemanticContext semantic;  // LSI fallback; off when model is null
};

/// Exact lexicon hit scores 1.0; otherwise the kind of the most similar
/// indexed document when its cosine reaches the threshold.
Resolution resolve_term(const std::string& term, const Lexicon& lexicon, const SemanticContext& semantic);

/// Throws EmptyQuery when the text has no tokens.
QueryIntent extract_intent(const std::string& text, const Lexicon& lexicon, const ExtractOptions& options);

/// Throws UncompilableIntent when the intent has no entity kind or a
/// condition cannot be connected to the anchor.
GraphQueryIR compile_intent(const QueryIntent& intent, const Taxonomy& taxonomy, const Lexicon& lexicon);

/// One removable constraint of an intent, for relaxation.
struct Constraint {
  enum class Type { Condition, Filter, TimeWindow, Attribution, DirectId };
  Type type;
  std::size_t index = 0;  // into the matching intent list
  double confidence = 1.0;
  std::size_t position = 0;
  std::string display;
};

std::vector<Constraint> constraints_of(const QueryIntent& intent);
/// Copy of the intent without the given constraints.
QueryIntent without(const QueryIntent& intent, const std::vector<Constraint>& dropped);

/// Human-readable dump used by --explain.
std::string describe_intent(const QueryIntent& intent);

}  // namespace ontoq
