#include "ontoq/pipeline.hpp"

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <map>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ontoq/errors.hpp"
#include "ontoq/ir_text.hpp"

#ifndef ONTOQ_DEFAULT_DATA_DIR
#define ONTOQ_DEFAULT_DATA_DIR "data"
#endif

namespace ontoq {

namespace {

std::vector<std::string> string_or_list(const nlohmann::json& j, const char* key) {
  if (j.is_string()) return {j.get<std::string>()};
  if (!j.is_array()) throw InvalidConfig(std::string("config \"") + key + "\" must be a string or a list");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw InvalidConfig(std::string("config \"") + key + "\" entries must be strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

void require_file(const std::string& path, const char* what) {
  if (!std::filesystem::is_regular_file(path)) throw IoError(std::string("cannot open ") + what + ": " + path);
}

}  // namespace

std::string default_data_dir() {
  if (const char* env = std::getenv("ONTOQ_DATA_DIR"); env && *env) return env;
  return ONTOQ_DEFAULT_DATA_DIR;
}

AppConfig AppConfig::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidConfig(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidConfig("config must be a JSON object");
  AppConfig c;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const auto& v = it.value();
      if (k == "corpus") c.corpus_paths = string_or_list(v, "corpus");
      else if (k == "events") c.event_paths = string_or_list(v, "events");
      else if (k == "lexicon") c.lexicon_path = v.get<std::string>();
      else if (k == "categories") c.categories_path = v.get<std::string>();
      else if (k == "lsi_rank") c.lsi_rank = v.get<std::size_t>();
      else if (k == "threshold") c.threshold = v.get<double>();
      else if (k == "graph_weight") c.graph_weight = v.get<double>();
      else if (k == "semantic_weight") c.semantic_weight = v.get<double>();
      else if (k == "relax") c.relax = v.get<bool>();
      else if (k == "default_tenancy") c.default_tenancy = v.get<std::string>();
      else if (k == "now") c.now = v.get<std::int64_t>();
      else if (k == "format") c.format = v.get<std::string>();
      else throw InvalidConfig("unknown config key \"" + k + "\"");
    }
  } catch (const nlohmann::json::type_error& e) {
    throw InvalidConfig(std::string("config value has the wrong type: ") + e.what());
  }
  return c;
}

AppConfig AppConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string AppConfig::resolved_lexicon() const {
  return lexicon_path.empty() ? default_data_dir() + "/lexicon.json" : lexicon_path;
}

std::string AppConfig::resolved_categories() const {
  return categories_path.empty() ? default_data_dir() + "/categories.json" : categories_path;
}

void AppConfig::validate() const {
  if (lsi_rank < 1) throw InvalidConfig("lsi_rank must be at least 1");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw InvalidConfig("threshold must be in [0, 1]");
  if (!(graph_weight >= 0.0) || !(semantic_weight >= 0.0) || graph_weight + semantic_weight <= 0.0)
    throw InvalidConfig("score weights must be non-negative and not both zero");
  if (format != "table" && format != "json" && format != "csv")
    throw InvalidConfig("format must be table, json or csv");
  for (const auto& p : corpus_paths) require_file(p, "corpus file");
  for (const auto& p : event_paths) require_file(p, "event file");
  require_file(resolved_lexicon(), "lexicon");
  require_file(resolved_categories(), "category lexicon");
}

Pipeline::Pipeline(AppConfig config)
    : config_(std::move(config)),
      taxonomy_(Taxonomy::seeded()),
      lexicon_(Lexicon::load(config_.resolved_lexicon(), taxonomy_)),
      categories_(CategoryLexicon::load(config_.resolved_categories())) {
  config_.validate();
  publish(KnowledgeGraph(taxonomy_));
}

void Pipeline::load() {
  std::stringstream all;
  for (const auto& path : config_.corpus_paths) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file: " + path);
    all << in.rdbuf();
    if (all.tellp() > 0) all << '\n';
  }
  LoadResult r = load_corpus(all, &categories_, taxonomy_);
  EventReport events;
  for (const auto& path : config_.event_paths) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open event file: " + path);
    const EventReport e = apply_events(r.graph, in);
    events.applied += e.applied;
    events.noops.insert(events.noops.end(), e.noops.begin(), e.noops.end());
    if (e.last_seq) events.last_seq = e.last_seq;
  }
  publish(std::move(r.graph), std::move(r.report), std::move(events));
}

LoadReport Pipeline::ingest(std::istream& in) {
  LoadResult r = load_corpus(in, &categories_, taxonomy_);
  LoadReport report = r.report;
  publish(std::move(r.graph), std::move(r.report));
  return report;
}

void Pipeline::publish(KnowledgeGraph graph, LoadReport load_report, EventReport event_report) {
  auto snap = std::make_shared<Snapshot>(Snapshot{std::move(graph), std::move(load_report), std::move(event_report), {}, {}, {}});
  std::map<std::string, std::size_t> name_counts;
  for (const auto& [id, node] : snap->graph.nodes()) ++name_counts[node.name];
  for (const auto& [id, node] : snap->graph.nodes())
    if (!node.name.empty() && name_counts[node.name] == 1) snap->unique_names.emplace(node.name, id);
  snap->matrix = build_matrix(snap->graph);
  snap->model = truncated_svd(snap->matrix, std::min(config_.lsi_rank, default_rank(snap->matrix)));
  std::lock_guard<std::mutex> lock(mu_);
  snapshot_ = std::move(snap);
}

std::shared_ptr<const Snapshot> Pipeline::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return snapshot_;
}

Timestamp Pipeline::now() const {
  return Timestamp{config_.now ? *config_.now : static_cast<std::int64_t>(std::time(nullptr))};
}

QueryOutcome Pipeline::ask(const std::string& text) const { return ask(text, *snapshot(), now()); }

QueryOutcome Pipeline::ask(const std::string& text, const Snapshot& snap, Timestamp now) const {
  ExtractOptions o;
  o.now = now;
  o.default_tenancy = config_.default_tenancy;
  const KnowledgeGraph& graph = snap.graph;
  o.ids = [&snap](const std::string& token) -> std::optional<IdMatch> {
    const ResourceNode* n = snap.graph.find_node(token);
    if (!n) {
      auto it = snap.unique_names.find(token);
      if (it != snap.unique_names.end()) n = snap.graph.find_node(it->second);
    }
    return n ? std::optional<IdMatch>(IdMatch{n->id, n->kind}) : std::nullopt;
  };
  if (!snap.model.empty()) o.semantic = {&snap.model, &snap.matrix, config_.threshold};

  AnswerOptions ao;
  ao.graph_weight = config_.graph_weight;
  ao.semantic_weight = config_.semantic_weight;
  ao.relax = config_.relax;

  QueryOutcome out;
  out.intent = extract_intent(text, lexicon_, o);
  out.answer = answer_intent(graph, {&snap.model, &snap.matrix}, out.intent, taxonomy_, lexicon_, ao);
  return out;
}

Answer Pipeline::ask_ir(const std::string& ir_text) const {
  const auto snap = snapshot();
  const GraphQueryIR ir = parse_ir_text(ir_text);
  check_against(ir, taxonomy_);
  QueryIntent intent;
  intent.entity_kinds = {ir.node_patterns.empty() || !ir.node_patterns[0].label ? std::string(kAnyResource)
                                                                               : *ir.node_patterns[0].label};
  AnswerOptions ao;
  ao.graph_weight = config_.graph_weight;
  ao.semantic_weight = config_.semantic_weight;
  return answer(snap->graph, {&snap->model, &snap->matrix}, intent, ir, lexicon_, ao);
}

std::string Pipeline::render(const Answer& a, const std::string& format) const {
  if (format == "json") return render_json(a);
  if (format == "csv") return render_csv(a);
  if (format == "table") return render_text(a);
  throw InvalidConfig("unknown output format: " + format);
}

}  // namespace ontoq
