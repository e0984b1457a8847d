#pragma once

// Corpus files and change-event streams.
//
// Corpus: one JSON object per line
//   {"id", "kind", "name", "properties", "description",
//    "relationships": [{"rel", "dst", "properties"?}], "api_endpoints",
//    "created_at"}
// Nested property objects are flattened with dot-joined keys, arrays become
// ", "-joined text, nulls are dropped and {"$timestamp": N} is a timestamp.
// Unknown keys are ignored.
//
// Events: one JSON object per line, {"seq", "op", ...payload}
//   upsert_node  {"node": <corpus document without relationships>}
//   remove_node  {"id"}
//   set_property {"id", "key", "value"}
//   add_edge     {"src", "rel", "dst", "properties"?}
//   remove_edge  {"src", "rel", "dst"}

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ontoq/graph.hpp"

namespace ontoq {

class CategoryLexicon;

struct DocumentRelation {
  std::string rel;
  std::string dst;
  PropertyMap properties;
};

struct ResourceDocument {
  std::string id;
  std::string kind;
  std::string name;
  PropertyMap properties;
  std::string description;
  std::vector<DocumentRelation> relationships;
  std::vector<std::string> api_endpoints;
  Timestamp created_at;
};

/// Parses one corpus line. Throws std::invalid_argument naming the cause.
ResourceDocument parse_document(const std::string& line);

/// Node for a document. Services without a "category" property get one from
/// the classifier when it is given and the result is not "unknown".
ResourceNode to_node(const ResourceDocument& doc, const CategoryLexicon* classifier = nullptr);

struct SkippedLine {
  std::size_t line = 0;
  std::string reason;
};

struct DroppedEdge {
  std::size_t line = 0;
  std::string src;
  std::string rel;
  std::string dst;
  std::string reason;
};

struct LoadReport {
  std::size_t lines = 0;
  std::size_t documents = 0;
  std::vector<SkippedLine> skipped;
  std::vector<DroppedEdge> dropped_edges;
};

struct LoadResult {
  KnowledgeGraph graph;
  LoadReport report;
};

/// Two-pass load: every node first, then every edge, so relationships may
/// reference documents later in the file. Malformed lines are skipped and
/// reported; edges whose target is missing or whose type is unknown are
/// dropped and reported. Throws IoError when the file cannot be read.
LoadResult load_corpus(const std::string& path, const CategoryLexicon* classifier = nullptr,
                       Taxonomy taxonomy = Taxonomy::seeded());
LoadResult load_corpus(std::istream& in, const CategoryLexicon* classifier = nullptr,
                       Taxonomy taxonomy = Taxonomy::seeded());

/// Writes the graph back out as a normalized corpus (sorted by id; edges
/// attached to their source document).
void write_corpus(const KnowledgeGraph& graph, std::ostream& out);

enum class EventOp { UpsertNode, RemoveNode, SetProperty, AddEdge, RemoveEdge };

const char* to_string(EventOp op);

struct ChangeEvent {
  std::uint64_t seq = 0;
  EventOp op = EventOp::UpsertNode;
  ResourceNode node;                 // UpsertNode
  std::string id;                    // RemoveNode, SetProperty
  std::string key;                   // SetProperty
  PropertyValue value;               // SetProperty
  RelationshipEdge edge;             // AddEdge, RemoveEdge
};

/// Parses one event line. Throws MalformedEvent carrying `line`.
ChangeEvent parse_event(const std::string& text, std::size_t line = 0);

/// JSON line for an event; parse_event(event_to_json(e)) reproduces e.
std::string event_to_json(const ChangeEvent& event);

struct EventReport {
  std::size_t applied = 0;
  std::vector<std::string> noops;  // removals of absent entities
  std::optional<std::uint64_t> last_seq;
};

/// Applies events in order. seq must strictly increase (also across calls
/// sharing a report); otherwise OutOfOrder(previous, current). Edges with a
/// missing endpoint or unknown type raise MalformedEvent.
void apply_event(KnowledgeGraph& graph, const ChangeEvent& event, EventReport& report, std::size_t line = 0);
EventReport apply_events(KnowledgeGraph& graph, std::istream& in);
EventReport apply_events(KnowledgeGraph& graph, const std::vector<ChangeEvent>& events);
EventReport apply_events_file(KnowledgeGraph& graph, const std::string& path);

/// Mechanical event stream that rebuilds a corpus: every node upsert (in
/// file order), then every edge add. Lines and edges that load_corpus would
/// skip or drop are left out.
std::vector<ChangeEvent> events_from_corpus(std::istream& in, const CategoryLexicon* classifier = nullptr,
                                            const Taxonomy& taxonomy = Taxonomy::seeded());

}  // namespace ontoq
