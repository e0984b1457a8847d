#include "ontoq/answer.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <json.hpp>

#include "ontoq/errors.hpp"
#include "ontoq/executor.hpp"
#include "ontoq/graph.hpp"
#include "ontoq/semantic_index.hpp"
#include "ontoq/text.hpp"

namespace ontoq {

namespace {

std::string kind_of_var(const GraphQueryIR& ir, const std::string& var) {
  for (const auto& np : ir.node_patterns)
    if (np.var == var) return np.label ? *np.label : std::string(kAnyResource);
  return kAnyResource;
}

std::string capitalize(std::string s) {
  for (auto& c : s)
    if (c == '_' || c == '.') c = ' ';
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string cell(const std::optional<PropertyValue>& v) { return v ? to_display(*v) : std::string(); }

bool is_order_item(const GraphQueryIR& ir, const ReturnItem& item) {
  return ir.order_by && item.var == ir.order_by->ref.var && item.property &&
         *item.property == ir.order_by->ref.property;
}

std::string join_items(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += (i + 1 == items.size()) ? " and " : ", ";
    out += items[i];
  }
  return out;
}

double semantic_score(SemanticIndexRef index, const std::vector<double>& q, const std::string& id) {
  if (!index.model || !index.matrix || index.model->empty() || q.empty()) return 0.0;
  const auto pos = index.matrix->doc_position(id);
  if (!pos) return 0.0;
  return std::clamp(latent_cosine(*index.model, q, *pos), 0.0, 1.0);
}

std::vector<RankedResult> score_bindings(const KnowledgeGraph& graph, SemanticIndexRef index,
                                         const QueryIntent& intent, const GraphQueryIR& ir,
                                         const std::vector<Binding>& bindings, double graph_score,
                                         const AnswerOptions& options) {
  std::vector<double> q;
  if (index.model && index.matrix && !index.model->empty())
    q = embed_query(*index.model, *index.matrix, content_terms(intent.text));
  std::vector<RankedResult> out;
  out.reserve(bindings.size());
  for (const auto& b : bindings) {
    RankedResult r;
    r.binding = b;
    for (const auto& item : ir.returns) r.values.push_back(project(graph, ir, b, item));
    r.graph_score = graph_score;
    r.semantic_score = b.node_ids.empty() ? 0.0 : semantic_score(index, q, b.node_ids[0]);
    r.score = options.graph_weight * r.graph_score + options.semantic_weight * r.semantic_score;
    out.push_back(std::move(r));
  }
  if (!ir.order_by) rank_results(out);
  return out;
}

Answer build_answer(const KnowledgeGraph& graph, SemanticIndexRef index, const QueryIntent& intent,
                    const GraphQueryIR& ir, const Lexicon& lexicon, double graph_score, const AnswerOptions& options) {
  Answer a;
  a.ir = ir;
  a.results = score_bindings(graph, index, intent, ir, execute(graph, ir), graph_score, options);
  a.table = make_table(ir, a.results, lexicon);
  a.summary = render_summary(intent, ir, a.results, lexicon);
  return a;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void rank_results(std::vector<RankedResult>& results) {
  std::stable_sort(results.begin(), results.end(), [](const RankedResult& a, const RankedResult& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.binding.node_ids < b.binding.node_ids;
  });
}

std::vector<std::string> result_headers(const GraphQueryIR& ir, const Lexicon& lexicon) {
  std::vector<std::string> out;
  for (const auto& item : ir.returns) {
    const KindDisplay d = lexicon.display(kind_of_var(ir, item.var));
    if (!item.property || *item.property == "name" || *item.property == "id" || *item.property == d.salient)
      out.push_back(d.header);
    else
      out.push_back(capitalize(*item.property));
  }
  return out;
}

ResultTable make_table(const GraphQueryIR& ir, const std::vector<RankedResult>& results, const Lexicon& lexicon) {
  ResultTable t;
  t.columns = result_headers(ir, lexicon);
  for (const auto& r : results) {
    std::vector<std::string> row;
    for (const auto& v : r.values) row.push_back(cell(v));
    t.rows.push_back(std::move(row));
  }
  t.total_count = t.rows.size();
  return t;
}

std::string render_summary(const QueryIntent& intent, const GraphQueryIR& ir, const std::vector<RankedResult>& results,
                           const Lexicon& lexicon) {
  const std::string kind = intent.entity_kinds.empty() ? std::string(kAnyResource) : intent.entity_kinds.front();
  const KindDisplay d = lexicon.display(kind);
  if (results.empty()) return "No " + d.plural + " matched the query.";

  std::vector<std::pair<std::size_t, std::string>> fragments;
  for (const auto& c : constraints_of(intent)) {
    std::string text = c.display;
    if (c.type == Constraint::Type::DirectId) text = "related to " + c.display;
    if (!text.empty()) fragments.emplace_back(c.position, text);
  }
  std::stable_sort(fragments.begin(), fragments.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::string head = results.size() == 1 ? "There is 1 " + d.singular
                                         : "There are " + std::to_string(results.size()) + " " + d.plural;
  for (const auto& [pos, text] : fragments) head += " " + text;
  if (ir.order_by)
    head += " ranked by " + ir.order_by->ref.property + (ir.order_by->descending ? ", highest first" : ", lowest first");

  std::vector<std::string> items;
  for (const auto& r : results) {
    std::string item = r.binding.node_ids.empty() ? std::string() : r.binding.node_ids[0];
    std::vector<std::string> extras;
    for (std::size_t k = 1; k < ir.returns.size() && k < r.values.size(); ++k) {
      if (!r.values[k]) continue;
      const std::string v = to_display(*r.values[k]);
      extras.push_back(is_order_item(ir, ir.returns[k]) ? *ir.returns[k].property + " " + v : v);
    }
    for (std::size_t k = 0; k < extras.size(); ++k) item += (k == 0 ? " with " : " / ") + extras[k];
    items.push_back(std::move(item));
  }
  return head + ": " + join_items(items);
}

Answer answer(const KnowledgeGraph& graph, SemanticIndexRef index, const QueryIntent& intent, const GraphQueryIR& ir,
              const Lexicon& lexicon, const AnswerOptions& options) {
  return build_answer(graph, index, intent, ir, lexicon, 1.0, options);
}

Answer relaxed_answer(const KnowledgeGraph& graph, SemanticIndexRef index, const QueryIntent& intent,
                      const Taxonomy& taxonomy, const Lexicon& lexicon, const AnswerOptions& options) {
  std::vector<Constraint> order = constraints_of(intent);
  std::stable_sort(order.begin(), order.end(), [](const Constraint& a, const Constraint& b) {
    if (a.confidence != b.confidence) return a.confidence < b.confidence;
    return a.position > b.position;
  });
  const double total = static_cast<double>(order.size());
  for (std::size_t k = 1; k <= order.size(); ++k) {
    const std::vector<Constraint> dropped(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    const QueryIntent relaxed = without(intent, dropped);
    GraphQueryIR ir;
    try {
      ir = compile_intent(relaxed, taxonomy, lexicon);
    } catch (const UncompilableIntent&) {
      continue;
    }
    Answer a = build_answer(graph, index, relaxed, ir, lexicon, (total - static_cast<double>(k)) / total, options);
    if (a.results.empty()) continue;
    a.approximate = true;
    for (const auto& c : dropped) a.dropped.push_back(c.display);
    return a;
  }
  Answer empty;
  empty.ir = compile_intent(intent, taxonomy, lexicon);
  empty.table.columns = result_headers(empty.ir, lexicon);
  empty.summary = render_summary(intent, empty.ir, {}, lexicon);
  return empty;
}

Answer answer_intent(const KnowledgeGraph& graph, SemanticIndexRef index, const QueryIntent& intent,
                     const Taxonomy& taxonomy, const Lexicon& lexicon, const AnswerOptions& options) {
  const GraphQueryIR ir = compile_intent(intent, taxonomy, lexicon);
  Answer strict = answer(graph, index, intent, ir, lexicon, options);
  if (!strict.results.empty() || !options.relax) return strict;
  Answer relaxed = relaxed_answer(graph, index, intent, taxonomy, lexicon, options);
  return relaxed.results.empty() ? strict : relaxed;
}

std::string render_text(const Answer& a) {
  const auto& t = a.table;
  std::vector<std::size_t> width(t.columns.size(), 0);
  for (std::size_t c = 0; c < t.columns.size(); ++c) width[c] = t.columns[c].size();
  for (const auto& row : t.rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) s += "  ";
      s += cells[c];
      if (c + 1 < cells.size()) s.append(width[c] - cells[c].size(), ' ');
    }
    return s + "\n";
  };
  std::string out = line(t.columns);
  std::vector<std::string> rule;
  for (auto w : width) rule.emplace_back(w, '-');
  out += line(rule);
  for (const auto& row : t.rows) out += line(row);
  out += "\n" + a.summary + "\n";
  if (a.approximate) {
    out += "(approximate: relaxed ";
    for (std::size_t i = 0; i < a.dropped.size(); ++i) out += (i ? ", " : "") + std::string("\"") + a.dropped[i] + "\"";
    out += ")\n";
  }
  return out;
}

std::string render_json(const Answer& a) {
  nlohmann::json j;
  j["columns"] = a.table.columns;
  j["rows"] = a.table.rows;
  std::vector<double> scores;
  for (const auto& r : a.results) scores.push_back(r.score);
  j["scores"] = scores;
  j["total_count"] = a.table.total_count;
  j["summary"] = a.summary;
  j["approximate"] = a.approximate;
  j["relaxed"] = a.dropped;
  return j.dump(2) + "\n";
}

std::string render_csv(const Answer& a) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) out += (c ? "," : "") + csv_field(cells[c]);
    out += "\r\n";
  };
  line(a.table.columns);
  for (const auto& row : a.table.rows) line(row);
  return out;
}

}  // namespace ontoq
