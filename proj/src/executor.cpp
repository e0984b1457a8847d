#include "ontoq/executor.hpp"

#include <algorithm>
#include <limits>
#include <string_view>
#include <unordered_set>

#include "ontoq/errors.hpp"

namespace ontoq {

bool node_matches(const ResourceNode& node, const NodePattern& pattern) {
  if (pattern.label && node.kind != *pattern.label) return false;
  for (const auto& [key, want] : pattern.prop_equals) {
    auto have = node_property(node, key);
    if (!have) return false;
    auto cmp = compare_values(*have, want);
    if (!cmp || *cmp != 0) return false;
  }
  return true;
}

bool predicate_holds(const ResourceNode& node, const Predicate& predicate) {
  auto value = node_property(node, predicate_ref(predicate).property);
  if (!value) return false;
  if (std::holds_alternative<Exists>(predicate)) return true;
  if (const auto* tw = std::get_if<TimeWindow>(&predicate)) {
    const auto* ts = std::get_if<Timestamp>(&*value);
    return ts && tw->start <= *ts && *ts <= tw->end;
  }
  const auto& c = std::get<Compare>(predicate);
  auto cmp = compare_values(*value, c.value);
  if (!cmp) return false;  // cross-type comparisons are false, never errors
  switch (c.op) {
    case CompareOp::Eq: return *cmp == 0;
    case CompareOp::Ne: return *cmp != 0;
    case CompareOp::Lt: return *cmp < 0;
    case CompareOp::Le: return *cmp <= 0;
    case CompareOp::Gt: return *cmp > 0;
    case CompareOp::Ge: return *cmp >= 0;
  }
  return false;
}

std::optional<PropertyValue> project(const KnowledgeGraph& graph, const GraphQueryIR& ir, const Binding& binding,
                                     const ReturnItem& item) {
  auto idx = ir.var_index(item.var);
  if (!idx || *idx >= binding.node_ids.size()) return std::nullopt;
  const std::string& id = binding.node_ids[*idx];
  if (!item.property) return id;
  const ResourceNode* node = graph.find_node(id);
  if (!node) return std::nullopt;
  return node_property(*node, *item.property);
}

namespace {

bool edge_exists(const KnowledgeGraph& g, const EdgePattern& ep, const std::string& src, const std::string& dst) {
  const bool fwd = g.find_edge({src, ep.rel_type, dst}) != nullptr;
  if (ep.direction == Direction::Forward) return fwd;
  const bool bwd = g.find_edge({dst, ep.rel_type, src}) != nullptr;
  if (ep.direction == Direction::Backward) return bwd;
  return fwd || bwd;
}

// ORDER BY key ordering: present values first, then by value (type index
// breaks cross-type ties), then the id tuple.
void sort_bindings(const KnowledgeGraph& graph, const GraphQueryIR& ir, std::vector<Binding>& rows) {
  if (!ir.order_by) {
    std::sort(rows.begin(), rows.end());
    return;
  }
  const std::size_t var = *ir.var_index(ir.order_by->ref.var);
  const bool desc = ir.order_by->descending;
  std::vector<std::pair<std::optional<PropertyValue>, std::size_t>> keys;
  keys.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ResourceNode* node = graph.find_node(rows[i].node_ids[var]);
    keys.emplace_back(node_property(*node, ir.order_by->ref.property), i);
  }
  std::sort(keys.begin(), keys.end(), [&](const auto& a, const auto& b) {
    if (a.first.has_value() != b.first.has_value()) return a.first.has_value();
    if (a.first) {
      const PropertyValue& x = *a.first;
      const PropertyValue& y = *b.first;
      int c = x.index() != y.index() ? (x.index() < y.index() ? -1 : 1) : *compare_values(x, y);
      if (c != 0) return desc ? c > 0 : c < 0;
    }
    return rows[a.second] < rows[b.second];
  });
  std::vector<Binding> sorted;
  sorted.reserve(rows.size());
  for (const auto& k : keys) sorted.push_back(std::move(rows[k.second]));
  rows = std::move(sorted);
}

class Matcher {
 public:
  Matcher(const KnowledgeGraph& g, const GraphQueryIR& ir) : g_(g), ir_(ir), n_(ir.node_patterns.size()) {}

  std::vector<Binding> run() {
    candidates_.resize(n_);
    for (std::size_t v = 0; v < n_; ++v) {
      seed(v);
      if (candidates_[v].empty()) return {};
    }
    plan();
    current_.assign(n_, nullptr);
    extend(0);
    return std::move(out_);
  }

 private:
  struct Step {
    std::size_t var;
    std::optional<std::size_t> via_edge;  // edge pattern used to enumerate neighbours
    std::vector<std::size_t> closing;     // other edge patterns fully bound at this step
  };

  void seed(std::size_t v) {
    const NodePattern& np = ir_.node_patterns[v];
    std::vector<const Predicate*> preds;
    for (const auto& p : ir_.predicates) {
      if (predicate_ref(p).var == np.var) preds.push_back(&p);
    }
    auto consider = [&](const ResourceNode& node) {
      if (!node_matches(node, np)) return;
      for (const auto* p : preds) {
        if (!predicate_holds(node, *p)) return;
      }
      candidates_[v].insert(node.id);
    };
    if (np.label) {
      for (const auto& id : g_.nodes_of_kind(*np.label)) consider(*g_.find_node(id));
    } else {
      for (const auto& [id, node] : g_.nodes()) consider(node);
    }
  }

  std::size_t var_of(const std::string& name) const { return *ir_.var_index(name); }

  void plan() {
    std::vector<bool> bound(n_, false);
    std::vector<bool> edge_used(ir_.edge_patterns.size(), false);
    for (std::size_t step = 0; step < n_; ++step) {
      std::optional<std::size_t> best;
      std::optional<std::size_t> best_edge;
      for (std::size_t v = 0; v < n_; ++v) {
        if (bound[v]) continue;
        std::optional<std::size_t> link;
        for (std::size_t e = 0; e < ir_.edge_patterns.size(); ++e) {
          const auto& ep = ir_.edge_patterns[e];
          std::size_t s = var_of(ep.src_var), d = var_of(ep.dst_var);
          if ((s == v && d != v && bound[d]) || (d == v && s != v && bound[s])) {
            link = e;
            break;
          }
        }
        // Connected variables beat disconnected ones; then fewer candidates.
        bool better = !best || (link.has_value() && !best_edge.has_value()) ||
                      (link.has_value() == best_edge.has_value() && candidates_[v].size() < candidates_[*best].size());
        if (better) {
          best = v;
          best_edge = link;
        }
      }
      Step st{*best, best_edge, {}};
      bound[*best] = true;
      if (best_edge) edge_used[*best_edge] = true;
      for (std::size_t e = 0; e < ir_.edge_patterns.size(); ++e) {
        if (edge_used[e]) continue;
        const auto& ep = ir_.edge_patterns[e];
        if (bound[var_of(ep.src_var)] && bound[var_of(ep.dst_var)]) {
          st.closing.push_back(e);
          edge_used[e] = true;
        }
      }
      steps_.push_back(std::move(st));
    }
  }

  void extend(std::size_t depth) {
    if (depth == steps_.size()) {
      Binding b;
      b.node_ids.reserve(n_);
      for (const auto* id : current_) b.node_ids.push_back(*id);
      out_.push_back(std::move(b));
      return;
    }
    const Step& st = steps_[depth];
    auto try_bind = [&](const std::string& id) {
      current_[st.var] = &id;
      for (std::size_t e : st.closing) {
        const auto& ep = ir_.edge_patterns[e];
        if (!edge_exists(g_, ep, *current_[var_of(ep.src_var)], *current_[var_of(ep.dst_var)])) return;
      }
      extend(depth + 1);
    };

    if (!st.via_edge) {
      std::vector<std::string_view> ordered(candidates_[st.var].begin(), candidates_[st.var].end());
      std::sort(ordered.begin(), ordered.end());
      for (auto id : ordered) try_bind(g_.find_node(std::string(id))->id);
      current_[st.var] = nullptr;
      return;
    }

    const auto& ep = ir_.edge_patterns[*st.via_edge];
    const bool new_is_dst = var_of(ep.dst_var) == st.var;
    const std::string& other = *current_[new_is_dst ? var_of(ep.src_var) : var_of(ep.dst_var)];
    // Stored direction from the bound variable's point of view.
    const bool want_out = ep.direction == Direction::Either || (ep.direction == Direction::Forward) == new_is_dst;
    const bool want_in = ep.direction == Direction::Either || (ep.direction == Direction::Forward) != new_is_dst;
    std::vector<const std::string*> next;
    if (want_out) {
      for (const auto& a : g_.out_edges(other)) {
        if (a.rel_type == ep.rel_type && candidates_[st.var].count(a.neighbor)) next.push_back(&a.neighbor);
      }
    }
    if (want_in) {
      for (const auto& a : g_.in_edges(other)) {
        if (a.rel_type == ep.rel_type && candidates_[st.var].count(a.neighbor)) next.push_back(&a.neighbor);
      }
    }
    std::sort(next.begin(), next.end(), [](const auto* a, const auto* b) { return *a < *b; });
    next.erase(std::unique(next.begin(), next.end(), [](const auto* a, const auto* b) { return *a == *b; }),
               next.end());
    for (const auto* id : next) try_bind(g_.find_node(*id)->id);
    current_[st.var] = nullptr;
  }

  const KnowledgeGraph& g_;
  const GraphQueryIR& ir_;
  std::size_t n_;
  std::vector<std::unordered_set<std::string_view>> candidates_;
  std::vector<Step> steps_;
  std::vector<const std::string*> current_;
  std::vector<Binding> out_;
};

}  // namespace

std::vector<Binding> execute(const KnowledgeGraph& graph, const GraphQueryIR& ir) {
  check_against(ir, graph.taxonomy());
  std::vector<Binding> rows = Matcher(graph, ir).run();
  sort_bindings(graph, ir, rows);
  if (ir.limit && rows.size() > *ir.limit) rows.resize(*ir.limit);
  return rows;
}

std::vector<Binding> brute_force_execute(const KnowledgeGraph& graph, const GraphQueryIR& ir,
                                         std::size_t max_assignments) {
  check_against(ir, graph.taxonomy());
  const std::size_t n = ir.node_patterns.size();
  std::vector<const ResourceNode*> nodes;
  for (const auto& [id, node] : graph.nodes()) nodes.push_back(&node);
  const std::size_t base = nodes.size();

  std::size_t space = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (base != 0 && space > max_assignments / base) {
      throw SizeCapExceeded("assignment space " + std::to_string(base) + "^" + std::to_string(n) + " exceeds cap " +
                            std::to_string(max_assignments));
    }
    space *= base;
  }
  if (base == 0) return {};

  std::vector<Binding> rows;
  std::vector<std::size_t> pick(n, 0);
  for (std::size_t count = 0; count < space; ++count) {
    bool ok = true;
    for (std::size_t v = 0; v < n && ok; ++v) {
      const ResourceNode& node = *nodes[pick[v]];
      ok = node_matches(node, ir.node_patterns[v]);
      for (const auto& p : ir.predicates) {
        if (ok && predicate_ref(p).var == ir.node_patterns[v].var) ok = predicate_holds(node, p);
      }
    }
    for (const auto& ep : ir.edge_patterns) {
      if (!ok) break;
      const std::string& s = nodes[pick[*ir.var_index(ep.src_var)]]->id;
      const std::string& d = nodes[pick[*ir.var_index(ep.dst_var)]]->id;
      bool fwd = false, bwd = false;
      for (const auto& [key, edge] : graph.edges()) {
        if (key.rel_type != ep.rel_type) continue;
        fwd = fwd || (key.src_id == s && key.dst_id == d);
        bwd = bwd || (key.src_id == d && key.dst_id == s);
      }
      ok = ep.direction == Direction::Forward ? fwd : ep.direction == Direction::Backward ? bwd : (fwd || bwd);
    }
    if (ok) {
      Binding b;
      for (std::size_t v = 0; v < n; ++v) b.node_ids.push_back(nodes[pick[v]]->id);
      rows.push_back(std::move(b));
    }
    for (std::size_t v = n; v-- > 0;) {
      if (++pick[v] < base) break;
      pick[v] = 0;
    }
  }

  if (ir.order_by) {
    const std::size_t var = *ir.var_index(ir.order_by->ref.var);
    auto key_of = [&](const Binding& b) { return node_property(*graph.find_node(b.node_ids[var]), ir.order_by->ref.property); };
    std::stable_sort(rows.begin(), rows.end(), [&](const Binding& a, const Binding& b) {
      auto ka = key_of(a), kb = key_of(b);
      if (!ka || !kb) return ka.has_value() && !kb.has_value();
      int c = ka->index() != kb->index() ? (ka->index() < kb->index() ? -1 : 1) : *compare_values(*ka, *kb);
      return ir.order_by->descending ? c > 0 : c < 0;
    });
  }
  if (ir.limit && rows.size() > *ir.limit) rows.resize(*ir.limit);
  return rows;
}

}  // namespace ontoq
