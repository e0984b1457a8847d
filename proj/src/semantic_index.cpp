#include "ontoq/semantic_index.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ontoq/graph.hpp"
#include "ontoq/text.hpp"

namespace ontoq {

std::optional<std::uint32_t> TermDocMatrix::term_id(const std::string& term) const {
  auto it = term_index.find(term);
  if (it == term_index.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> TermDocMatrix::doc_position(const std::string& id) const {
  auto it = std::lower_bound(doc_ids.begin(), doc_ids.end(), id);
  if (it == doc_ids.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - doc_ids.begin());
}

double TermDocMatrix::idf(std::uint32_t term) const {
  return std::log(static_cast<double>(doc_count()) / static_cast<double>(doc_frequencies[term]));
}

double TermDocMatrix::weight(std::uint32_t term, std::size_t doc) const {
  const auto& col = columns[doc];
  auto it = std::lower_bound(col.begin(), col.end(), term, [](const Entry& e, std::uint32_t t) { return e.term < t; });
  return it != col.end() && it->term == term ? it->weight : 0.0;
}

std::vector<double> TermDocMatrix::query_vector(const std::vector<std::string>& terms) const {
  std::vector<double> q(term_count(), 0.0);
  std::map<std::uint32_t, std::size_t> counts;
  std::size_t known = 0;
  for (const auto& t : terms) {
    if (auto id = term_id(t)) {
      ++counts[*id];
      ++known;
    }
  }
  for (const auto& [id, c] : counts) q[id] = static_cast<double>(c) / static_cast<double>(known) * idf(id);
  return q;
}

std::string node_text(const ResourceNode& node) {
  std::string text = node.name + " " + split_camel_case(node.kind) + " " + node.description;
  for (const auto& [key, value] : node.properties) {
    if (!std::holds_alternative<Timestamp>(value)) text += " " + to_display(value);
  }
  for (const auto& ep : node.api_endpoints) text += " " + ep;
  return text;
}

TermDocMatrix build_matrix(std::vector<TextDocument> docs) {
  std::sort(docs.begin(), docs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  TermDocMatrix m;
  std::vector<std::map<std::string, std::size_t>> counts(docs.size());
  std::vector<std::size_t> lengths(docs.size(), 0);
  std::map<std::string, std::uint32_t> df;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    m.doc_ids.push_back(docs[d].id);
    m.doc_kinds.push_back(docs[d].kind);
    for (auto& t : content_terms(docs[d].text)) {
      ++counts[d][t];
      ++lengths[d];
    }
    for (const auto& [t, _] : counts[d]) ++df[t];
  }
  for (const auto& [t, f] : df) {
    m.term_index.emplace(t, static_cast<std::uint32_t>(m.vocabulary.size()));
    m.vocabulary.push_back(t);
    m.doc_frequencies.push_back(f);
  }
  m.columns.resize(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& [t, c] : counts[d]) {
      const std::uint32_t id = m.term_index.at(t);
      const double tf = static_cast<double>(c) / static_cast<double>(lengths[d]);
      m.columns[d].push_back({id, tf * m.idf(id)});
    }
  }
  return m;
}

TermDocMatrix build_matrix(const KnowledgeGraph& graph) {
  std::vector<TextDocument> docs;
  docs.reserve(graph.node_count());
  for (const auto& [id, node] : graph.nodes()) docs.push_back({id, node.kind, node_text(node)});
  return build_matrix(std::move(docs));
}

void TermDocOperator::apply(const double* x, double* y) const {
  std::fill(y, y + m_.term_count(), 0.0);
  for (std::size_t d = 0; d < m_.doc_count(); ++d) {
    if (x[d] == 0.0) continue;
    for (const auto& e : m_.columns[d]) y[e.term] += e.weight * x[d];
  }
}

void TermDocOperator::apply_transpose(const double* x, double* y) const {
  for (std::size_t d = 0; d < m_.doc_count(); ++d) {
    double s = 0.0;
    for (const auto& e : m_.columns[d]) s += e.weight * x[e.term];
    y[d] = s;
  }
}

std::size_t default_rank(const TermDocMatrix& matrix) {
  return std::min({kDefaultMaxRank, matrix.term_count(), matrix.doc_count()});
}

LsiModel truncated_svd(const TermDocMatrix& matrix, std::size_t k, double tol, std::size_t max_iter) {
  LsiModel model;
  model.doc_ids = matrix.doc_ids;
  if (k == 0) return model;
  TermDocOperator op(matrix);
  SvdOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  SvdResult r = truncated_svd(op, k, opt);
  model.rank = k;
  model.singular_values = std::move(r.sigma);
  model.term_factors = std::move(r.u);
  model.doc_factors = std::move(r.v);
  model.doc_latent = model.doc_factors;
  for (std::size_t d = 0; d < model.doc_latent.rows; ++d) {
    for (std::size_t i = 0; i < k; ++i) model.doc_latent(d, i) *= model.singular_values[i];
  }
  return model;
}

std::vector<double> embed_query(const LsiModel& model, const TermDocMatrix& matrix,
                                const std::vector<std::string>& terms) {
  std::vector<double> latent(model.rank, 0.0);
  if (model.empty()) return latent;
  const std::vector<double> q = matrix.query_vector(terms);
  const double floor = 1e-10 * model.singular_values[0];
  for (std::size_t i = 0; i < model.rank; ++i) {
    if (model.singular_values[i] <= floor) continue;
    double s = 0.0;
    for (std::size_t t = 0; t < q.size(); ++t) {
      if (q[t] != 0.0) s += model.term_factors(t, i) * q[t];
    }
    latent[i] = s / model.singular_values[i];
  }
  return latent;
}

double latent_cosine(const LsiModel& model, const std::vector<double>& query_latent, std::size_t doc) {
  double dotp = 0.0, qn = 0.0, dn = 0.0;
  for (std::size_t i = 0; i < model.rank && i < query_latent.size(); ++i) {
    const double a = query_latent[i] * model.singular_values[i];
    const double b = model.doc_latent(doc, i);
    dotp += a * b;
    qn += a * a;
    dn += b * b;
  }
  if (qn == 0.0 || dn == 0.0) return 0.0;
  return dotp / (std::sqrt(qn) * std::sqrt(dn));
}

std::vector<std::pair<std::string, double>> top_k_similar(const LsiModel& model,
                                                          const std::vector<double>& query_latent, std::size_t k) {
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(model.doc_ids.size());
  for (std::size_t d = 0; d < model.doc_ids.size(); ++d) {
    scored.emplace_back(model.doc_ids[d], model.empty() ? 0.0 : latent_cosine(model, query_latent, d));
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

}  // namespace ontoq
