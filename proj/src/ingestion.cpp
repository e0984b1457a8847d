#include "ontoq/ingestion.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ontoq/classifier.hpp"
#include "ontoq/errors.hpp"

namespace ontoq {

using json = nlohmann::json;

namespace {

std::string array_text(const json& arr);

std::optional<PropertyValue> scalar_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number()) return v.get<double>();
  if (v.is_object() && v.size() == 1 && v.contains("$timestamp")) {
    const json& t = v.at("$timestamp");
    if (!t.is_number_integer()) throw std::invalid_argument("$timestamp must be an integer");
    return Timestamp{t.get<std::int64_t>()};
  }
  if (v.is_array()) return array_text(v);
  return std::nullopt;
}

std::string array_text(const json& arr) {
  std::string out;
  for (const auto& item : arr) {
    auto v = scalar_value(item);
    if (!v) continue;
    if (!out.empty()) out += ", ";
    out += to_display(*v);
  }
  return out;
}

void flatten_into(const json& obj, const std::string& prefix, PropertyMap& out) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (it.key().empty()) throw std::invalid_argument("empty property key");
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    const json& v = it.value();
    if (v.is_null()) continue;
    if (v.is_object() && !(v.size() == 1 && v.contains("$timestamp"))) {
      flatten_into(v, key, out);
      continue;
    }
    if (auto pv = scalar_value(v)) out[key] = std::move(*pv);
  }
}

PropertyMap properties_of(const json& j, const char* field) {
  PropertyMap out;
  if (!j.contains(field) || j.at(field).is_null()) return out;
  if (!j.at(field).is_object()) throw std::invalid_argument(std::string("\"") + field + "\" must be an object");
  flatten_into(j.at(field), "", out);
  return out;
}

std::string required_string(const json& j, const char* field) {
  if (!j.contains(field) || j.at(field).is_null()) throw std::invalid_argument(std::string("missing \"") + field + "\"");
  if (!j.at(field).is_string()) throw std::invalid_argument(std::string("\"") + field + "\" must be a string");
  std::string s = j.at(field).get<std::string>();
  if (s.empty()) throw std::invalid_argument(std::string("empty \"") + field + "\"");
  return s;
}

std::string optional_string(const json& j, const char* field) {
  if (!j.contains(field) || j.at(field).is_null()) return {};
  if (!j.at(field).is_string()) throw std::invalid_argument(std::string("\"") + field + "\" must be a string");
  return j.at(field).get<std::string>();
}

ResourceDocument document_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("line is not a JSON object");
  ResourceDocument d;
  d.id = required_string(j, "id");
  d.kind = required_string(j, "kind");
  d.name = optional_string(j, "name");
  if (d.name.empty()) d.name = d.id;
  d.description = optional_string(j, "description");
  d.properties = properties_of(j, "properties");
  if (j.contains("created_at") && !j.at("created_at").is_null()) {
    const json& c = j.at("created_at");
    if (!c.is_number_integer()) throw std::invalid_argument("\"created_at\" must be integer epoch seconds");
    d.created_at = Timestamp{c.get<std::int64_t>()};
  }
  if (j.contains("api_endpoints") && !j.at("api_endpoints").is_null()) {
    if (!j.at("api_endpoints").is_array()) throw std::invalid_argument("\"api_endpoints\" must be a list");
    for (const auto& e : j.at("api_endpoints")) {
      if (!e.is_string()) throw std::invalid_argument("api endpoint must be a string");
      d.api_endpoints.push_back(e.get<std::string>());
    }
  }
  if (j.contains("relationships") && !j.at("relationships").is_null()) {
    if (!j.at("relationships").is_array()) throw std::invalid_argument("\"relationships\" must be a list");
    for (const auto& r : j.at("relationships")) {
      if (!r.is_object()) throw std::invalid_argument("relationship must be an object");
      d.relationships.push_back({required_string(r, "rel"), required_string(r, "dst"), properties_of(r, "properties")});
    }
  }
  return d;
}

json value_json(const PropertyValue& v) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Timestamp>) return json{{"$timestamp", x.seconds}};
        else return json(x);
      },
      v);
}

json properties_json(const PropertyMap& props) {
  json out = json::object();
  for (const auto& [k, v] : props) out[k] = value_json(v);
  return out;
}

json node_json(const ResourceNode& n) {
  json j;
  j["id"] = n.id;
  j["kind"] = n.kind;
  j["name"] = n.name;
  j["properties"] = properties_json(n.properties);
  j["description"] = n.description;
  j["api_endpoints"] = n.api_endpoints;
  j["created_at"] = n.created_at.seconds;
  return j;
}

// Shared two-pass build. `on_node` / `on_edge` observe each accepted
// mutation so the event derivation follows exactly the same path.
LoadResult build(std::istream& in, const CategoryLexicon* classifier, Taxonomy taxonomy,
                 const std::function<void(const ResourceNode&)>& on_node,
                 const std::function<void(const RelationshipEdge&)>& on_edge) {
  LoadResult result{KnowledgeGraph(std::move(taxonomy)), {}};
  struct Pending {
    std::size_t line;
    std::string src;
    DocumentRelation rel;
  };
  std::vector<Pending> pending;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    ++result.report.lines;
    try {
      ResourceDocument doc = parse_document(text);
      ResourceNode node = to_node(doc, classifier);
      result.graph.upsert_node(node);
      if (on_node) on_node(node);
      ++result.report.documents;
      for (auto& r : doc.relationships) pending.push_back({line, doc.id, std::move(r)});
    } catch (const std::invalid_argument& e) {
      result.report.skipped.push_back({line, e.what()});
    } catch (const InvalidNode& e) {
      result.report.skipped.push_back({line, e.what()});
    }
  }
  for (auto& p : pending) {
    RelationshipEdge edge{p.src, p.rel.dst, p.rel.rel, p.rel.properties};
    std::string reason;
    if (!result.graph.taxonomy().has_relation(edge.rel_type)) reason = "unknown relationship type";
    else if (!result.graph.has_node(edge.src_id)) reason = "source document was skipped";
    else if (!result.graph.has_node(edge.dst_id)) reason = "unresolved target";
    if (!reason.empty()) {
      result.report.dropped_edges.push_back({p.line, edge.src_id, edge.rel_type, edge.dst_id, reason});
      continue;
    }
    result.graph.add_edge(edge);
    if (on_edge) on_edge(edge);
  }
  return result;
}

std::uint64_t parse_seq(const json& j) {
  if (!j.contains("seq") || !j.at("seq").is_number_integer()) throw std::invalid_argument("missing integer \"seq\"");
  const auto s = j.at("seq").get<std::int64_t>();
  if (s <= 0) throw std::invalid_argument("\"seq\" must be positive");
  return static_cast<std::uint64_t>(s);
}

}  // namespace

ResourceDocument parse_document(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("invalid JSON: ") + e.what());
  }
  return document_from_json(j);
}

ResourceNode to_node(const ResourceDocument& doc, const CategoryLexicon* classifier) {
  ResourceNode n{doc.id, doc.kind, doc.name, doc.properties, doc.description, doc.api_endpoints, doc.created_at};
  if (classifier && doc.kind == "Service" && !n.properties.count("category")) {
    ServiceCategory c = classify_service(doc, *classifier);
    if (c.label != "unknown") n.properties["category"] = c.label;
  }
  return n;
}

LoadResult load_corpus(std::istream& in, const CategoryLexicon* classifier, Taxonomy taxonomy) {
  return build(in, classifier, std::move(taxonomy), nullptr, nullptr);
}

LoadResult load_corpus(const std::string& path, const CategoryLexicon* classifier, Taxonomy taxonomy) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file: " + path);
  return load_corpus(in, classifier, std::move(taxonomy));
}

void write_corpus(const KnowledgeGraph& graph, std::ostream& out) {
  for (const auto& [id, node] : graph.nodes()) {
    json j = node_json(node);
    json rels = json::array();
    for (auto it = graph.edges().lower_bound(EdgeKey{id, "", ""}); it != graph.edges().end() && it->first.src_id == id;
         ++it) {
      json r{{"rel", it->second.rel_type}, {"dst", it->second.dst_id}};
      if (!it->second.properties.empty()) r["properties"] = properties_json(it->second.properties);
      rels.push_back(std::move(r));
    }
    j["relationships"] = std::move(rels);
    out << j.dump() << '\n';
  }
}

const char* to_string(EventOp op) {
  switch (op) {
    case EventOp::UpsertNode: return "upsert_node";
    case EventOp::RemoveNode: return "remove_node";
    case EventOp::SetProperty: return "set_property";
    case EventOp::AddEdge: return "add_edge";
    case EventOp::RemoveEdge: return "remove_edge";
  }
  return "?";
}

ChangeEvent parse_event(const std::string& text, std::size_t line) {
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw std::invalid_argument("event is not a JSON object");
    ChangeEvent e;
    e.seq = parse_seq(j);
    const std::string op = required_string(j, "op");
    if (op == "upsert_node") {
      e.op = EventOp::UpsertNode;
      if (!j.contains("node")) throw std::invalid_argument("missing \"node\"");
      ResourceDocument d = document_from_json(j.at("node"));
      if (!d.relationships.empty()) throw std::invalid_argument("upsert_node carries relationships; use add_edge");
      e.node = to_node(d);
    } else if (op == "remove_node") {
      e.op = EventOp::RemoveNode;
      e.id = required_string(j, "id");
    } else if (op == "set_property") {
      e.op = EventOp::SetProperty;
      e.id = required_string(j, "id");
      e.key = required_string(j, "key");
      if (!j.contains("value")) throw std::invalid_argument("missing \"value\"");
      auto v = scalar_value(j.at("value"));
      if (!v) throw std::invalid_argument("\"value\" must be a scalar");
      e.value = std::move(*v);
    } else if (op == "add_edge" || op == "remove_edge") {
      e.op = op == "add_edge" ? EventOp::AddEdge : EventOp::RemoveEdge;
      e.edge.src_id = required_string(j, "src");
      e.edge.rel_type = required_string(j, "rel");
      e.edge.dst_id = required_string(j, "dst");
      if (e.op == EventOp::AddEdge) e.edge.properties = properties_of(j, "properties");
    } else {
      throw std::invalid_argument("unknown op \"" + op + "\"");
    }
    return e;
  } catch (const json::exception& ex) {
    throw MalformedEvent(line, ex.what());
  } catch (const std::invalid_argument& ex) {
    throw MalformedEvent(line, ex.what());
  }
}

std::string event_to_json(const ChangeEvent& e) {
  json j{{"seq", e.seq}, {"op", to_string(e.op)}};
  switch (e.op) {
    case EventOp::UpsertNode: j["node"] = node_json(e.node); break;
    case EventOp::RemoveNode: j["id"] = e.id; break;
    case EventOp::SetProperty:
      j["id"] = e.id;
      j["key"] = e.key;
      j["value"] = value_json(e.value);
      break;
    case EventOp::AddEdge:
    case EventOp::RemoveEdge:
      j["src"] = e.edge.src_id;
      j["rel"] = e.edge.rel_type;
      j["dst"] = e.edge.dst_id;
      if (e.op == EventOp::AddEdge && !e.edge.properties.empty()) j["properties"] = properties_json(e.edge.properties);
      break;
  }
  return j.dump();
}

void apply_event(KnowledgeGraph& graph, const ChangeEvent& e, EventReport& report, std::size_t line) {
  if (report.last_seq && e.seq <= *report.last_seq) throw OutOfOrder(*report.last_seq, e.seq);
  report.last_seq = e.seq;
  try {
    switch (e.op) {
      case EventOp::UpsertNode: graph.upsert_node(e.node); break;
      case EventOp::RemoveNode:
        if (!graph.has_node(e.id)) {
          report.noops.push_back("seq " + std::to_string(e.seq) + ": remove_node " + e.id + " (absent)");
          return;
        }
        graph.remove_node(e.id);
        break;
      case EventOp::SetProperty: graph.set_property(e.id, e.key, e.value); break;
      case EventOp::AddEdge: graph.add_edge(e.edge); break;
      case EventOp::RemoveEdge:
        if (!graph.remove_edge(e.edge.key())) {
          report.noops.push_back("seq " + std::to_string(e.seq) + ": remove_edge " + e.edge.src_id + " -[" +
                                 e.edge.rel_type + "]-> " + e.edge.dst_id + " (absent)");
          return;
        }
        break;
    }
  } catch (const Error& ex) {
    if (ex.code() == ErrorCode::OutOfOrder) throw;
    throw MalformedEvent(line, ex.what());
  }
  ++report.applied;
}

EventReport apply_events(KnowledgeGraph& graph, const std::vector<ChangeEvent>& events) {
  EventReport report;
  for (std::size_t i = 0; i < events.size(); ++i) apply_event(graph, events[i], report, i + 1);
  return report;
}

EventReport apply_events(KnowledgeGraph& graph, std::istream& in) {
  EventReport report;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    apply_event(graph, parse_event(text, line), report, line);
  }
  return report;
}

EventReport apply_events_file(KnowledgeGraph& graph, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open event file: " + path);
  return apply_events(graph, in);
}

std::vector<ChangeEvent> events_from_corpus(std::istream& in, const CategoryLexicon* classifier,
                                            const Taxonomy& taxonomy) {
  std::vector<ChangeEvent> events;
  std::vector<ChangeEvent> edges;
  build(
      in, classifier, taxonomy,
      [&](const ResourceNode& n) {
        ChangeEvent e;
        e.op = EventOp::UpsertNode;
        e.node = n;
        events.push_back(std::move(e));
      },
      [&](const RelationshipEdge& edge) {
        ChangeEvent e;
        e.op = EventOp::AddEdge;
        e.edge = edge;
        edges.push_back(std::move(e));
      });
  for (auto& e : edges) events.push_back(std::move(e));
  for (std::size_t i = 0; i < events.size(); ++i) events[i].seq = i + 1;
  return events;
}

}  // namespace ontoq
