#pragma once

// In-memory knowledge graph: resource nodes, typed directed edges, a label
// index and mirrored out/in adjacency lists.
//
// Single writer, many readers. Mutations bump `version()`; a reader that
// needs a stable view holds a const graph (or a shared_ptr<const
// KnowledgeGraph> snapshot) while the writer works on a copy.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "ontoq/property.hpp"
#include "ontoq/taxonomy.hpp"

namespace ontoq {

struct ResourceNode {
  std::string id;
  std::string kind;
  std::string name;
  PropertyMap properties;
  std::string description;
  std::vector<std::string> api_endpoints;
  Timestamp created_at;

  friend bool operator==(const ResourceNode&, const ResourceNode&) = default;
};

/// Looks up a property on a node. The built-in fields `id`, `kind`, `name`,
/// `description` and `created_at` take precedence over the property map.
std::optional<PropertyValue> node_property(const ResourceNode& node, const std::string& key);

struct EdgeKey {
  std::string src_id;
  std::string rel_type;
  std::string dst_id;
  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

struct RelationshipEdge {
  std::string src_id;
  std::string dst_id;
  std::string rel_type;
  PropertyMap properties;

  EdgeKey key() const { return {src_id, rel_type, dst_id}; }
  friend bool operator==(const RelationshipEdge&, const RelationshipEdge&) = default;
};

struct AdjacencyEntry {
  std::string rel_type;
  std::string neighbor;
  friend auto operator<=>(const AdjacencyEntry&, const AdjacencyEntry&) = default;
};

struct Violation {
  enum class Kind { DanglingEndpoint, AdjacencyMismatch, LabelIndexMismatch, UnknownKind, UnknownRelType, InvalidProperty };
  Kind kind;
  std::string subject;  // offending node id or "src -[REL]-> dst"
  std::string detail;
};

const char* to_string(Violation::Kind kind);

class KnowledgeGraph {
 public:
  KnowledgeGraph() : taxonomy_(Taxonomy::seeded()) {}
  explicit KnowledgeGraph(Taxonomy taxonomy) : taxonomy_(std::move(taxonomy)) {}

  const Taxonomy& taxonomy() const { return taxonomy_; }
  std::uint64_t version() const { return version_; }

  /// Inserts or fully replaces a node. Throws InvalidNode.
  std::uint64_t upsert_node(ResourceNode node);
  /// Inserts an edge, or replaces the properties of an existing triple.
  /// Throws DanglingEndpoint or UnknownRelType.
  std::uint64_t add_edge(RelationshipEdge edge);
  /// Removes a node and every incident edge. No-op when absent.
  std::uint64_t remove_node(const std::string& id);
  /// Returns false (and leaves the version alone) when the edge is absent.
  bool remove_edge(const EdgeKey& key);
  /// Sets one property on an existing node. Throws InvalidNode when the node
  /// is absent or the value is not storable.
  std::uint64_t set_property(const std::string& id, const std::string& key, PropertyValue value);

  const ResourceNode* find_node(const std::string& id) const;
  bool has_node(const std::string& id) const { return nodes_.count(id) > 0; }
  const RelationshipEdge* find_edge(const EdgeKey& key) const;

  const std::map<std::string, ResourceNode>& nodes() const { return nodes_; }
  const std::map<EdgeKey, RelationshipEdge>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  /// Ids of every node of `kind`, in sorted order.
  const std::set<std::string>& nodes_of_kind(const std::string& kind) const;
  const std::vector<AdjacencyEntry>& out_edges(const std::string& id) const;
  const std::vector<AdjacencyEntry>& in_edges(const std::string& id) const;

  /// Empty iff every structural invariant holds.
  std::vector<Violation> validate() const;

  /// Same nodes and edges (including properties); versions are ignored.
  bool same_content(const KnowledgeGraph& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

 private:
  friend class GraphInspector;  // test-only access to internal indexes

  void check_node(const ResourceNode& node) const;

  Taxonomy taxonomy_;
  std::map<std::string, ResourceNode> nodes_;
  std::map<EdgeKey, RelationshipEdge> edges_;
  std::unordered_map<std::string, std::vector<AdjacencyEntry>> out_adj_;
  std::unordered_map<std::string, std::vector<AdjacencyEntry>> in_adj_;
  std::map<std::string, std::set<std::string>> label_index_;
  std::uint64_t version_ = 0;
};

}  // namespace ontoq
