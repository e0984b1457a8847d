#include "ontoq/query_ir.hpp"

#include <algorithm>
#include <set>

#include "ontoq/errors.hpp"
#include "ontoq/taxonomy.hpp"

namespace ontoq {

std::optional<std::size_t> GraphQueryIR::var_index(const std::string& var) const {
  for (std::size_t i = 0; i < node_patterns.size(); ++i) {
    if (node_patterns[i].var == var) return i;
  }
  return std::nullopt;
}

const PropertyRef& predicate_ref(const Predicate& p) {
  return std::visit([](const auto& x) -> const PropertyRef& { return x.ref; }, p);
}

const char* to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "<>";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

void check_structure(const GraphQueryIR& ir) {
  std::set<std::string> vars;
  for (const auto& np : ir.node_patterns) {
    if (np.var.empty()) throw InvalidQuery("node pattern without a variable");
    if (!vars.insert(np.var).second) throw InvalidQuery("variable declared twice: " + np.var);
    for (const auto& [key, value] : np.prop_equals) {
      if (key.empty() || !is_storable(value)) throw InvalidQuery("invalid property constraint on " + np.var);
    }
  }
  auto declared = [&](const std::string& v, const char* where) {
    if (!vars.count(v)) throw InvalidQuery(std::string("undeclared variable in ") + where + ": " + v);
  };
  for (const auto& ep : ir.edge_patterns) {
    declared(ep.src_var, "edge pattern");
    declared(ep.dst_var, "edge pattern");
    if (ep.rel_type.empty()) throw InvalidQuery("edge pattern without a relationship type");
  }
  for (const auto& p : ir.predicates) {
    declared(predicate_ref(p).var, "predicate");
    if (predicate_ref(p).property.empty()) throw InvalidQuery("predicate without a property");
    if (const auto* tw = std::get_if<TimeWindow>(&p); tw && tw->start > tw->end) {
      throw InvalidQuery("time window starts after it ends");
    }
    if (const auto* c = std::get_if<Compare>(&p); c && !is_storable(c->value)) {
      throw InvalidQuery("comparison against a non-finite value");
    }
  }
  if (ir.returns.empty()) throw InvalidQuery("query returns nothing");
  for (const auto& r : ir.returns) declared(r.var, "RETURN");
  if (ir.order_by) declared(ir.order_by->ref.var, "ORDER BY");
  if (ir.limit && *ir.limit == 0) throw InvalidQuery("LIMIT must be positive");
}

void check_against(const GraphQueryIR& ir, const Taxonomy& taxonomy) {
  check_structure(ir);
  for (const auto& np : ir.node_patterns) {
    if (np.label && !taxonomy.has_kind(*np.label)) throw UnknownLabel(*np.label);
  }
  for (const auto& ep : ir.edge_patterns) {
    if (!taxonomy.has_relation(ep.rel_type)) throw UnknownRelType(ep.rel_type);
  }
}

namespace {

using Renaming = std::map<std::string, std::string>;

std::string value_key(const PropertyValue& v) {
  return std::to_string(v.index()) + ":" + to_display(v) +
         (std::holds_alternative<Timestamp>(v) ? std::to_string(std::get<Timestamp>(v).seconds) : "");
}

std::string ref_key(const PropertyRef& r, const Renaming& m) { return m.at(r.var) + "." + r.property; }

std::vector<std::string> edge_keys(const GraphQueryIR& ir, const Renaming& m) {
  std::vector<std::string> out;
  for (const auto& e : ir.edge_patterns) {
    std::string s = m.at(e.src_var);
    std::string d = m.at(e.dst_var);
    if (e.direction == Direction::Backward) std::swap(s, d);
    if (e.direction == Direction::Either && d < s) std::swap(s, d);
    out.push_back(s + "|" + e.rel_type + "|" + d + (e.direction == Direction::Either ? "|-" : "|>"));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> predicate_keys(const GraphQueryIR& ir, const Renaming& m) {
  std::vector<std::string> out;
  for (const auto& p : ir.predicates) {
    if (const auto* c = std::get_if<Compare>(&p)) {
      out.push_back("C|" + ref_key(c->ref, m) + "|" + to_string(c->op) + "|" + value_key(c->value));
    } else if (const auto* t = std::get_if<TimeWindow>(&p)) {
      out.push_back("T|" + ref_key(t->ref, m) + "|" + std::to_string(t->start.seconds) + "|" +
                    std::to_string(t->end.seconds));
    } else {
      out.push_back("E|" + ref_key(std::get<Exists>(p).ref, m));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool same_under(const GraphQueryIR& a, const GraphQueryIR& b, const Renaming& m) {
  Renaming identity;
  for (const auto& np : b.node_patterns) identity[np.var] = np.var;
  if (edge_keys(a, m) != edge_keys(b, identity)) return false;
  if (predicate_keys(a, m) != predicate_keys(b, identity)) return false;
  if (a.returns.size() != b.returns.size()) return false;
  for (std::size_t i = 0; i < a.returns.size(); ++i) {
    if (m.at(a.returns[i].var) != b.returns[i].var || a.returns[i].property != b.returns[i].property) return false;
  }
  if (a.order_by.has_value() != b.order_by.has_value()) return false;
  if (a.order_by && (m.at(a.order_by->ref.var) != b.order_by->ref.var ||
                     a.order_by->ref.property != b.order_by->ref.property ||
                     a.order_by->descending != b.order_by->descending)) {
    return false;
  }
  return a.limit == b.limit;
}

bool search(const GraphQueryIR& a, const GraphQueryIR& b, std::size_t i, Renaming& m, std::vector<bool>& used) {
  if (i == a.node_patterns.size()) return same_under(a, b, m);
  const auto& pa = a.node_patterns[i];
  for (std::size_t j = 0; j < b.node_patterns.size(); ++j) {
    if (used[j]) continue;
    const auto& pb = b.node_patterns[j];
    if (pa.label != pb.label || pa.prop_equals != pb.prop_equals) continue;
    used[j] = true;
    m[pa.var] = pb.var;
    if (search(a, b, i + 1, m, used)) return true;
    m.erase(pa.var);
    used[j] = false;
  }
  return false;
}

}  // namespace

bool equivalent_modulo_vars(const GraphQueryIR& a, const GraphQueryIR& b) {
  if (a.node_patterns.size() != b.node_patterns.size() || a.edge_patterns.size() != b.edge_patterns.size() ||
      a.predicates.size() != b.predicates.size()) {
    return false;
  }
  Renaming m;
  std::vector<bool> used(b.node_patterns.size(), false);
  return search(a, b, 0, m, used);
}

}  // namespace ontoq
