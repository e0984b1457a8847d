#pragma once

#include <cstddef>
#include <vector>

#include "ontoq/graph.hpp"
#include "ontoq/query_ir.hpp"

namespace ontoq {

/// Pattern-match executor. Candidates are seeded from the label index, the
/// most selective variable is bound first, further variables are reached
/// through adjacency when an edge pattern connects them to a bound one.
///
/// Output order: ORDER BY when present (missing values last, ties by id
/// tuple), otherwise lexicographic by bound id tuple; LIMIT applies last.
/// Throws UnknownLabel / UnknownRelType / InvalidQuery.
std::vector<Binding> execute(const KnowledgeGraph& graph, const GraphQueryIR& ir);

/// Reference semantics: enumerates every assignment of nodes to variables.
/// Throws SizeCapExceeded when |nodes|^|vars| exceeds `max_assignments`.
std::vector<Binding> brute_force_execute(const KnowledgeGraph& graph, const GraphQueryIR& ir,
                                         std::size_t max_assignments = 1'000'000);

/// Single-variable semantics shared by both executors.
bool node_matches(const ResourceNode& node, const NodePattern& pattern);
bool predicate_holds(const ResourceNode& node, const Predicate& predicate);

/// Value of a return item for one binding; whole-node items yield the id.
std::optional<PropertyValue> project(const KnowledgeGraph& graph, const GraphQueryIR& ir, const Binding& binding,
                                     const ReturnItem& item);

}  // namespace ontoq
