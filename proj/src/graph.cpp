#include "ontoq/graph.hpp"

#include <algorithm>

#include "ontoq/errors.hpp"

namespace ontoq {

namespace {

const std::vector<AdjacencyEntry> kNoEdges;
const std::set<std::string> kNoIds;

void erase_entry(std::vector<AdjacencyEntry>& list, const AdjacencyEntry& entry) {
  auto it = std::find(list.begin(), list.end(), entry);
  if (it != list.end()) list.erase(it);
}

std::string describe(const EdgeKey& k) { return k.src_id + " -[" + k.rel_type + "]-> " + k.dst_id; }

}  // namespace

const char* to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::DanglingEndpoint: return "DanglingEndpoint";
    case Violation::Kind::AdjacencyMismatch: return "AdjacencyMismatch";
    case Violation::Kind::LabelIndexMismatch: return "LabelIndexMismatch";
    case Violation::Kind::UnknownKind: return "UnknownKind";
    case Violation::Kind::UnknownRelType: return "UnknownRelType";
    case Violation::Kind::InvalidProperty: return "InvalidProperty";
  }
  return "Unknown";
}

std::optional<PropertyValue> node_property(const ResourceNode& node, const std::string& key) {
  if (key == "id") return node.id;
  if (key == "kind") return node.kind;
  if (key == "name") return node.name;
  if (key == "description") return node.description;
  if (key == "created_at") return node.created_at;
  auto it = node.properties.find(key);
  if (it == node.properties.end()) return std::nullopt;
  return it->second;
}

void KnowledgeGraph::check_node(const ResourceNode& node) const {
  if (node.id.empty()) throw InvalidNode("node id must be non-empty");
  if (!taxonomy_.has_kind(node.kind)) throw InvalidNode("node " + node.id + " has unknown kind '" + node.kind + "'");
  if (node.created_at.seconds < 0) throw InvalidNode("node " + node.id + " has a negative created_at");
  for (const auto& [key, value] : node.properties) {
    if (key.empty()) throw InvalidNode("node " + node.id + " has an empty property key");
    if (!is_storable(value)) throw InvalidNode("node " + node.id + " property '" + key + "' is not storable");
  }
}

std::uint64_t KnowledgeGraph::upsert_node(ResourceNode node) {
  check_node(node);
  auto it = nodes_.find(node.id);
  if (it != nodes_.end()) {
    if (it->second.kind != node.kind) {
      label_index_[it->second.kind].erase(node.id);
      if (label_index_[it->second.kind].empty()) label_index_.erase(it->second.kind);
    }
    label_index_[node.kind].insert(node.id);
    it->second = std::move(node);
  } else {
    label_index_[node.kind].insert(node.id);
    out_adj_.try_emplace(node.id);
    in_adj_.try_emplace(node.id);
    std::string id = node.id;
    nodes_.emplace(std::move(id), std::move(node));
  }
  return ++version_;
}

std::uint64_t KnowledgeGraph::add_edge(RelationshipEdge edge) {
  if (edge.src_id.empty() || !has_node(edge.src_id)) throw DanglingEndpoint(edge.src_id);
  if (edge.dst_id.empty() || !has_node(edge.dst_id)) throw DanglingEndpoint(edge.dst_id);
  if (!taxonomy_.has_relation(edge.rel_type)) throw UnknownRelType(edge.rel_type);
  for (const auto& [key, value] : edge.properties) {
    if (key.empty() || !is_storable(value)) throw InvalidNode("edge " + describe(edge.key()) + " has an invalid property");
  }
  EdgeKey key = edge.key();
  auto it = edges_.find(key);
  if (it != edges_.end()) {
    it->second.properties = std::move(edge.properties);
  } else {
    out_adj_[key.src_id].push_back({key.rel_type, key.dst_id});
    in_adj_[key.dst_id].push_back({key.rel_type, key.src_id});
    edges_.emplace(std::move(key), std::move(edge));
  }
  return ++version_;
}

bool KnowledgeGraph::remove_edge(const EdgeKey& key) {
  auto it = edges_.find(key);
  if (it == edges_.end()) return false;
  erase_entry(out_adj_[key.src_id], {key.rel_type, key.dst_id});
  erase_entry(in_adj_[key.dst_id], {key.rel_type, key.src_id});
  edges_.erase(it);
  ++version_;
  return true;
}

std::uint64_t KnowledgeGraph::remove_node(const std::string& id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) return version_;
  for (const auto& e : out_adj_[id]) {
    edges_.erase(EdgeKey{id, e.rel_type, e.neighbor});
    if (e.neighbor != id) erase_entry(in_adj_[e.neighbor], {e.rel_type, id});
  }
  for (const auto& e : in_adj_[id]) {
    edges_.erase(EdgeKey{e.neighbor, e.rel_type, id});
    if (e.neighbor != id) erase_entry(out_adj_[e.neighbor], {e.rel_type, id});
  }
  out_adj_.erase(id);
  in_adj_.erase(id);
  auto& ids = label_index_[it->second.kind];
  ids.erase(id);
  if (ids.empty()) label_index_.erase(it->second.kind);
  nodes_.erase(it);
  return ++version_;
}

std::uint64_t KnowledgeGraph::set_property(const std::string& id, const std::string& key, PropertyValue value) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw InvalidNode("set_property on absent node " + id);
  if (key.empty()) throw InvalidNode("property key must be non-empty");
  if (!is_storable(value)) throw InvalidNode("property '" + key + "' is not storable");
  ResourceNode& node = it->second;
  if (key == "id" || key == "kind") throw InvalidNode("property '" + key + "' cannot be changed in place");
  if (key == "name" || key == "description") {
    const auto* text = std::get_if<std::string>(&value);
    if (!text) throw InvalidNode("property '" + key + "' must be text");
    (key == "name" ? node.name : node.description) = *text;
  } else if (key == "created_at") {
    const auto* ts = std::get_if<Timestamp>(&value);
    if (!ts) throw InvalidNode("created_at must be a timestamp");
    node.created_at = *ts;
  } else {
    node.properties[key] = std::move(value);
  }
  return ++version_;
}

const ResourceNode* KnowledgeGraph::find_node(const std::string& id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const RelationshipEdge* KnowledgeGraph::find_edge(const EdgeKey& key) const {
  auto it = edges_.find(key);
  return it == edges_.end() ? nullptr : &it->second;
}

const std::set<std::string>& KnowledgeGraph::nodes_of_kind(const std::string& kind) const {
  auto it = label_index_.find(kind);
  return it == label_index_.end() ? kNoIds : it->second;
}

const std::vector<AdjacencyEntry>& KnowledgeGraph::out_edges(const std::string& id) const {
  auto it = out_adj_.find(id);
  return it == out_adj_.end() ? kNoEdges : it->second;
}

const std::vector<AdjacencyEntry>& KnowledgeGraph::in_edges(const std::string& id) const {
  auto it = in_adj_.find(id);
  return it == in_adj_.end() ? kNoEdges : it->second;
}

std::vector<Violation> KnowledgeGraph::validate() const {
  std::vector<Violation> out;

  std::map<std::string, std::set<std::string>> expected_labels;
  for (const auto& [id, node] : nodes_) {
    if (id != node.id) out.push_back({Violation::Kind::LabelIndexMismatch, id, "node stored under a different id"});
    if (!taxonomy_.has_kind(node.kind)) out.push_back({Violation::Kind::UnknownKind, id, node.kind});
    for (const auto& [key, value] : node.properties) {
      if (key.empty() || !is_storable(value)) out.push_back({Violation::Kind::InvalidProperty, id, key});
    }
    expected_labels[node.kind].insert(id);
  }
  std::set<std::string> kinds;
  for (const auto& [kind, _] : expected_labels) kinds.insert(kind);
  for (const auto& [kind, _] : label_index_) kinds.insert(kind);
  for (const auto& kind : kinds) {
    auto want = expected_labels.find(kind);
    auto have = label_index_.find(kind);
    const auto& want_ids = want == expected_labels.end() ? kNoIds : want->second;
    const auto& have_ids = have == label_index_.end() ? kNoIds : have->second;
    if (want_ids != have_ids) out.push_back({Violation::Kind::LabelIndexMismatch, kind, "label index differs from node kinds"});
  }

  std::map<std::string, std::vector<AdjacencyEntry>> expected_out;
  std::map<std::string, std::vector<AdjacencyEntry>> expected_in;
  for (const auto& [key, edge] : edges_) {
    bool dangling = false;
    for (const auto* endpoint : {&key.src_id, &key.dst_id}) {
      if (!has_node(*endpoint)) {
        out.push_back({Violation::Kind::DanglingEndpoint, describe(key), "missing node " + *endpoint});
        dangling = true;
        break;
      }
    }
    if (!taxonomy_.has_relation(key.rel_type)) out.push_back({Violation::Kind::UnknownRelType, describe(key), key.rel_type});
    if (dangling) continue;
    expected_out[key.src_id].push_back({key.rel_type, key.dst_id});
    expected_in[key.dst_id].push_back({key.rel_type, key.src_id});
  }

  auto compare_side = [&](const std::unordered_map<std::string, std::vector<AdjacencyEntry>>& have_map,
                          std::map<std::string, std::vector<AdjacencyEntry>>& want_map, const char* side) {
    std::set<std::string> ids;
    for (const auto& [id, list] : have_map) {
      if (!list.empty()) ids.insert(id);
    }
    for (const auto& [id, _] : want_map) ids.insert(id);
    for (const auto& id : ids) {
      std::vector<AdjacencyEntry> have;
      if (auto it = have_map.find(id); it != have_map.end()) have = it->second;
      auto& want = want_map[id];
      std::sort(have.begin(), have.end());
      std::sort(want.begin(), want.end());
      if (have != want) out.push_back({Violation::Kind::AdjacencyMismatch, id, std::string(side) + " adjacency differs from edge set"});
    }
  };
  compare_side(out_adj_, expected_out, "out");
  compare_side(in_adj_, expected_in, "in");
  return out;
}

}  // namespace ontoq
