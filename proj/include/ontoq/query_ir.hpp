#pragma once

// Graph-pattern query IR: node patterns, edge patterns, single-variable
// predicates, projections, ordering and a limit.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ontoq/property.hpp"

namespace ontoq {

class Taxonomy;

struct NodePattern {
  std::string var;
  std::optional<std::string> label;
  PropertyMap prop_equals;
  friend bool operator==(const NodePattern&, const NodePattern&) = default;
};

enum class Direction { Forward, Backward, Either };

/// `Forward` matches a stored edge src_var -> dst_var, `Backward` one stored
/// as dst_var -> src_var, `Either` accepts both.
struct EdgePattern {
  std::string src_var;
  std::string dst_var;
  std::string rel_type;
  Direction direction = Direction::Forward;
  friend bool operator==(const EdgePattern&, const EdgePattern&) = default;
};

struct PropertyRef {
  std::string var;
  std::string property;
  friend bool operator==(const PropertyRef&, const PropertyRef&) = default;
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Compare {
  PropertyRef ref;
  CompareOp op = CompareOp::Eq;
  PropertyValue value;
  friend bool operator==(const Compare&, const Compare&) = default;
};

/// Inclusive on both ends.
struct TimeWindow {
  PropertyRef ref;
  Timestamp start;
  Timestamp end;
  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

struct Exists {
  PropertyRef ref;
  friend bool operator==(const Exists&, const Exists&) = default;
};

using Predicate = std::variant<Compare, TimeWindow, Exists>;

/// `property` empty means the whole node (projected as its id).
struct ReturnItem {
  std::string var;
  std::optional<std::string> property;
  friend bool operator==(const ReturnItem&, const ReturnItem&) = default;
};

struct OrderBy {
  PropertyRef ref;
  bool descending = false;
  friend bool operator==(const OrderBy&, const OrderBy&) = default;
};

struct GraphQueryIR {
  std::vector<NodePattern> node_patterns;
  std::vector<EdgePattern> edge_patterns;
  std::vector<Predicate> predicates;
  std::vector<ReturnItem> returns;
  std::optional<OrderBy> order_by;
  std::optional<std::size_t> limit;

  /// Position of `var` in node_patterns, or nullopt.
  std::optional<std::size_t> var_index(const std::string& var) const;
  friend bool operator==(const GraphQueryIR&, const GraphQueryIR&) = default;
};

/// One match: the bound node id for each node pattern, in declaration order.
struct Binding {
  std::vector<std::string> node_ids;
  friend auto operator<=>(const Binding&, const Binding&) = default;
};

const PropertyRef& predicate_ref(const Predicate& p);
const char* to_string(CompareOp op);

/// Checks the structural invariants (declared, unique vars; non-empty
/// returns; positive limit; ordered time windows). Throws InvalidQuery.
void check_structure(const GraphQueryIR& ir);

/// check_structure plus taxonomy membership of labels and relationship
/// types. Throws InvalidQuery, UnknownLabel or UnknownRelType.
void check_against(const GraphQueryIR& ir, const Taxonomy& taxonomy);

/// True when some bijective renaming of variables maps `a` onto `b`. Node
/// patterns, edge patterns and predicates compare as multisets; return
/// items, order_by and limit compare exactly.
bool equivalent_modulo_vars(const GraphQueryIR& a, const GraphQueryIR& b);

}  // namespace ontoq
