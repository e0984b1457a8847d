#include "ontoq/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ontoq/errors.hpp"
#include "ontoq/pipeline.hpp"
#include "ontoq/semantic_index.hpp"
#include "ontoq/text.hpp"

namespace ontoq {

using json = nlohmann::json;

// ---------------------------------------------------------------- gold files

std::vector<GoldQuery> load_gold(std::istream& in) {
  std::vector<GoldQuery> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    GoldQuery g;
    try {
      const json j = json::parse(line);
      g.query = j.at("query").get<std::string>();
      g.relevant_ids = j.at("relevant_ids").get<std::vector<std::string>>();
      g.archetype = j.value("archetype", std::string());
      if (j.contains("now") && !j.at("now").is_null()) g.now = j.at("now").get<std::int64_t>();
    } catch (const json::exception& e) {
      throw InvalidConfig("gold file line " + std::to_string(n) + ": " + e.what());
    }
    if (g.relevant_ids.empty()) throw EmptyGold("gold file line " + std::to_string(n) + ": no relevant ids");
    std::sort(g.relevant_ids.begin(), g.relevant_ids.end());
    g.relevant_ids.erase(std::unique(g.relevant_ids.begin(), g.relevant_ids.end()), g.relevant_ids.end());
    out.push_back(std::move(g));
  }
  if (out.empty()) throw EmptyGold("gold file has no queries");
  return out;
}

std::vector<GoldQuery> load_gold(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open gold file: " + path);
  return load_gold(in);
}

void write_gold(const std::vector<GoldQuery>& gold, std::ostream& out) {
  for (const auto& g : gold) {
    json j{{"query", g.query}, {"relevant_ids", g.relevant_ids}, {"archetype", g.archetype}};
    if (g.now) j["now"] = *g.now;
    out << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------- baseline

std::vector<std::pair<std::string, double>> keyword_search(const TermDocMatrix& matrix, const std::string& query,
                                                           std::size_t k) {
  std::set<std::uint32_t> terms;
  for (const auto& t : content_terms(query))
    if (auto id = matrix.term_id(t)) terms.insert(*id);
  std::vector<std::pair<std::string, double>> out;
  if (terms.empty() || k == 0) return out;
  for (std::size_t d = 0; d < matrix.doc_count(); ++d) {
    double s = 0.0;
    for (const auto& e : matrix.columns[d])
      if (terms.count(e.term)) s += e.weight;
    if (s > 0.0) out.emplace_back(matrix.doc_ids[d], s);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

// ---------------------------------------------------------------- metrics

Metrics compute_metrics(const std::vector<std::string>& retrieved, const std::vector<std::string>& relevant) {
  if (relevant.empty()) throw EmptyGold("relevant set is empty");
  const std::set<std::string> rel(relevant.begin(), relevant.end());
  const std::set<std::string> got(retrieved.begin(), retrieved.end());
  std::size_t hit = 0;
  for (const auto& id : got) hit += rel.count(id);
  Metrics m;
  m.precision = got.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(got.size());
  m.recall = static_cast<double>(hit) / static_cast<double>(rel.size());
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

Clock steady_clock_ms() {
  return [] {
    using namespace std::chrono;
    return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
  };
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

SystemSummary summarize(const std::string& name, const std::vector<const SystemResult*>& rs) {
  SystemSummary s;
  s.name = name;
  std::vector<double> times;
  for (const auto* r : rs) {
    s.macro.precision += r->metrics.precision;
    s.macro.recall += r->metrics.recall;
    times.push_back(r->millis);
  }
  if (!rs.empty()) {
    const double n = static_cast<double>(rs.size());
    s.macro.precision /= n;
    s.macro.recall /= n;
    s.mean_ms = std::accumulate(times.begin(), times.end(), 0.0) / n;
  }
  // F1 of the averaged P and R, so the identity holds on summary rows too.
  const double pr = s.macro.precision + s.macro.recall;
  s.macro.f1 = pr > 0.0 ? 2.0 * s.macro.precision * s.macro.recall / pr : 0.0;
  s.median_ms = median(times);
  return s;
}

SystemResult run_keyword(const TermDocMatrix& matrix, const GoldQuery& g, std::size_t k, const Clock& clock) {
  SystemResult r;
  const double t0 = clock();
  for (const auto& [id, score] : keyword_search(matrix, g.query, k)) r.retrieved.push_back(id);
  r.millis = clock() - t0;
  r.metrics = compute_metrics(r.retrieved, g.relevant_ids);
  return r;
}

std::string pct(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * x);
  return buf;
}

std::string ms(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

json metrics_json(const Metrics& m) { return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}}; }

json system_json(const SystemResult& r) {
  json j{{"retrieved", r.retrieved}, {"metrics", metrics_json(r.metrics)}, {"millis", r.millis}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

}  // namespace

ComparisonReport run_comparison(const Pipeline& pipeline, const std::vector<GoldQuery>& gold, const Clock& clock) {
  const auto snap = pipeline.snapshot();
  for (const auto& g : gold)
    for (const auto& id : g.relevant_ids)
      if (!snap->graph.has_node(id)) throw InvalidConfig("gold id not in graph: " + id + " (query \"" + g.query + "\")");

  ComparisonReport report;
  for (const auto& g : gold) {
    QueryReport q;
    q.gold = g;
    const Timestamp now = g.now ? Timestamp{*g.now} : pipeline.now();
    const double t0 = clock();
    try {
      const QueryOutcome o = pipeline.ask(g.query, *snap, now);
      std::set<std::string> seen;
      for (const auto& r : o.answer.results)
        if (!r.binding.node_ids.empty() && seen.insert(r.binding.node_ids[0]).second)
          q.ontology.retrieved.push_back(r.binding.node_ids[0]);
      if (o.answer.approximate) q.ontology.note = "approximate";
    } catch (const UncompilableIntent& e) {
      q.ontology.note = e.what();
    } catch (const EmptyQuery& e) {
      q.ontology.note = e.what();
    }
    q.ontology.millis = clock() - t0;
    q.ontology.metrics = compute_metrics(q.ontology.retrieved, g.relevant_ids);
    q.keyword = run_keyword(snap->matrix, g, g.relevant_ids.size(), clock);
    q.keyword_10 = run_keyword(snap->matrix, g, 10, clock);
    report.queries.push_back(std::move(q));
  }

  std::vector<const SystemResult*> onto, kw, kw10;
  for (const auto& q : report.queries) {
    onto.push_back(&q.ontology);
    kw.push_back(&q.keyword);
    kw10.push_back(&q.keyword_10);
  }
  report.systems.push_back(summarize("Ontology-Driven NLP Search", onto));
  report.systems.push_back(summarize("Keyword Search (k = |gold|)", kw));
  report.systems.push_back(summarize("Keyword Search (k = 10)", kw10));
  return report;
}

std::string render_report(const ComparisonReport& report) {
  std::ostringstream os;
  os << pad("Search Approach", 30) << pad("Precision", 11) << pad("Recall", 9) << pad("F1-Score", 10)
     << pad("Mean ms", 10) << "Median ms\n";
  for (const auto& s : report.systems)
    os << pad(s.name, 30) << pad(pct(s.macro.precision), 11) << pad(pct(s.macro.recall), 9)
       << pad(pct(s.macro.f1), 10) << pad(ms(s.mean_ms), 10) << ms(s.median_ms) << '\n';
  os << "\nMacro-averaged over " << report.queries.size()
     << " queries. Timings exclude index construction and depend on this machine.\n"
     << "Absolute figures depend on the corpus and the machine; compare the systems by ordering.\n\n";
  os << "Per query (ontology P/R/F1 | keyword P/R/F1):\n";
  for (const auto& q : report.queries) {
    const auto& o = q.ontology.metrics;
    const auto& k = q.keyword.metrics;
    os << "  [" << q.gold.archetype << "] " << q.gold.query << "\n    " << pct(o.precision) << " / " << pct(o.recall)
       << " / " << pct(o.f1) << " | " << pct(k.precision) << " / " << pct(k.recall) << " / " << pct(k.f1);
    if (!q.ontology.note.empty()) os << "  (" << q.ontology.note << ")";
    os << '\n';
  }
  return os.str();
}

std::string report_json(const ComparisonReport& report) {
  json j;
  j["systems"] = json::array();
  for (const auto& s : report.systems)
    j["systems"].push_back({{"name", s.name},
                            {"metrics", metrics_json(s.macro)},
                            {"mean_ms", s.mean_ms},
                            {"median_ms", s.median_ms}});
  j["queries"] = json::array();
  for (const auto& q : report.queries)
    j["queries"].push_back({{"query", q.gold.query},
                            {"archetype", q.gold.archetype},
                            {"relevant_ids", q.gold.relevant_ids},
                            {"ontology", system_json(q.ontology)},
                            {"keyword", system_json(q.keyword)},
                            {"keyword_10", system_json(q.keyword_10)}});
  return j.dump(2) + "\n";
}

}  // namespace ontoq
