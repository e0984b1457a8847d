#include "ontoq/nlq.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ontoq/errors.hpp"
#include "ontoq/semantic_index.hpp"
#include "ontoq/taxonomy.hpp"
#include "ontoq/text.hpp"

namespace ontoq {

using json = nlohmann::json;

namespace {

// ---------------------------------------------------------------- phrases

enum class SlotType { Word, Count, Unit, Name };

struct Slot {
  SlotType type;
  std::string word;
};

std::vector<Slot> slots_of(const std::string& normalized) {
  std::vector<Slot> out;
  std::istringstream ss(normalized);
  std::string w;
  while (ss >> w) {
    if (w == "{N}") out.push_back({SlotType::Count, {}});
    else if (w == "{unit}") out.push_back({SlotType::Unit, {}});
    else if (w == "{name}") out.push_back({SlotType::Name, {}});
    else out.push_back({SlotType::Word, w});
  }
  return out;
}

// Lowercase, stopword-free form of a phrase; placeholder slots survive.
std::string normalize_phrase(const std::string& phrase) {
  std::string out;
  std::istringstream ss(phrase);
  std::string piece;
  while (ss >> piece) {
    std::vector<std::string> words;
    if (piece == "{N}" || piece == "{unit}" || piece == "{name}") {
      words.push_back(piece);
    } else {
      for (const auto& t : tokenize(piece))
        if (!t.stopword) words.push_back(t.text);
    }
    for (const auto& w : words) {
      if (!out.empty()) out += ' ';
      out += w;
    }
  }
  return out;
}

std::optional<std::size_t> count_value(const std::string& token) {
  static const std::array<const char*, 20> words = {"one",     "two",      "three",    "four",    "five",
                                                    "six",     "seven",    "eight",    "nine",    "ten",
                                                    "eleven",  "twelve",   "thirteen", "fourteen", "fifteen",
                                                    "sixteen", "seventeen", "eighteen", "nineteen", "twenty"};
  for (std::size_t i = 0; i < words.size(); ++i)
    if (token == words[i]) return i + 1;
  if (token.empty() || token.size() > 6) return std::nullopt;
  if (!std::all_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c); })) return std::nullopt;
  const std::size_t n = std::stoul(token);
  if (n == 0) return std::nullopt;
  return n;
}

struct UnitInfo {
  std::int64_t seconds;
  const char* singular;
  const char* plural;
};

std::optional<UnitInfo> unit_value(const std::string& token) {
  if (token == "hour" || token == "hours") return UnitInfo{3600, "hour", "hours"};
  if (token == "day" || token == "days") return UnitInfo{86400, "day", "days"};
  if (token == "week" || token == "weeks") return UnitInfo{7 * 86400, "week", "weeks"};
  if (token == "month" || token == "months") return UnitInfo{30 * 86400, "month", "months"};
  if (token == "year" || token == "years") return UnitInfo{365 * 86400, "year", "years"};
  return std::nullopt;
}

// Precedence on equal length, highest first.
enum class Table { Temporal = 0, Aggregation = 1, Relation = 2, Value = 3, Entity = 4, Filler = 5 };

struct Match {
  Table table;
  std::size_t index = 0;
  std::size_t length = 0;
  std::optional<std::size_t> count;
  std::optional<UnitInfo> unit;
  std::string name;
};

std::optional<Match> match_at(const std::vector<Slot>& slots, const std::vector<const Token*>& toks, std::size_t at) {
  if (slots.empty() || at + slots.size() > toks.size()) return std::nullopt;
  Match m{};
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const std::string& t = toks[at + i]->text;
    switch (slots[i].type) {
      case SlotType::Word:
        if (t != slots[i].word) return std::nullopt;
        break;
      case SlotType::Count:
        if (!(m.count = count_value(t))) return std::nullopt;
        break;
      case SlotType::Unit:
        if (!(m.unit = unit_value(t))) return std::nullopt;
        break;
      case SlotType::Name: m.name = t; break;
    }
  }
  m.length = slots.size();
  return m;
}

// ---------------------------------------------------------------- loading

[[noreturn]] void lexicon_error(const std::string& where, const std::string& what) {
  throw InvalidLexicon("lexicon " + where + ": " + what);
}

std::string get_string(const json& j, const char* key, const std::string& where, bool required = true) {
  if (!j.contains(key)) {
    if (required) lexicon_error(where, std::string("missing \"") + key + "\"");
    return {};
  }
  if (!j.at(key).is_string()) lexicon_error(where, std::string("\"") + key + "\" must be a string");
  return j.at(key).get<std::string>();
}

double get_confidence(const json& j, const std::string& where) {
  if (!j.contains("confidence")) return 1.0;
  if (!j.at("confidence").is_number()) lexicon_error(where, "\"confidence\" must be a number");
  const double c = j.at("confidence").get<double>();
  if (!(c > 0.0 && c <= 1.0)) lexicon_error(where, "\"confidence\" must be in (0, 1]");
  return c;
}

std::string checked_phrase(const std::string& raw, const std::string& where, bool allow_slots) {
  const std::string p = normalize_phrase(raw);
  if (p.empty()) lexicon_error(where, "phrase \"" + raw + "\" has no content words");
  if (!allow_slots && p.find('{') != std::string::npos) lexicon_error(where, "phrase \"" + raw + "\" may not use slots");
  return p;
}

void check_kind(const Taxonomy& taxonomy, const std::string& kind, const std::string& where, bool allow_special) {
  if (taxonomy.has_kind(kind)) return;
  if (allow_special && (kind == kAnyResource || kind == kAnchorKind)) return;
  lexicon_error(where, "unknown kind \"" + kind + "\"");
}

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + std::min(offset, text.size()), '\n'));
}

std::string pretty_kind(const std::string& kind) { return split_camel_case(kind); }

}  // namespace

KindDisplay Lexicon::display(const std::string& kind) const {
  auto it = kinds.find(kind);
  if (it != kinds.end()) return it->second;
  KindDisplay d;
  d.singular = pretty_kind(kind);
  d.plural = d.singular + "s";
  d.header = kind;
  return d;
}

Lexicon Lexicon::from_json_text(const std::string& text, const Taxonomy& taxonomy) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidLexicon("lexicon line " + std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
  }
  if (!j.is_object()) lexicon_error("root", "must be an object");
  Lexicon lex;

  if (j.contains("kinds")) {
    for (auto it = j.at("kinds").begin(); it != j.at("kinds").end(); ++it) {
      const std::string where = "kinds." + it.key();
      check_kind(taxonomy, it.key(), where, true);
      KindDisplay d;
      d.singular = get_string(it.value(), "singular", where);
      d.plural = get_string(it.value(), "plural", where);
      d.header = get_string(it.value(), "header", where);
      if (it.value().contains("salient")) d.salient = get_string(it.value(), "salient", where);
      lex.kinds[it.key()] = d;
    }
  }
  if (j.contains("entity_synonyms")) {
    for (auto it = j.at("entity_synonyms").begin(); it != j.at("entity_synonyms").end(); ++it) {
      const std::string where = "entity_synonyms[\"" + it.key() + "\"]";
      if (!it.value().is_string()) lexicon_error(where, "kind must be a string");
      const std::string kind = it.value().get<std::string>();
      check_kind(taxonomy, kind, where, true);
      if (kind == kAnchorKind) lexicon_error(where, "entities cannot use the anchor kind");
      lex.entity_synonyms[checked_phrase(it.key(), where, false)] = kind;
    }
  }
  auto each = [&](const char* table, auto&& fn) {
    if (!j.contains(table)) return;
    if (!j.at(table).is_array()) lexicon_error(table, "must be a list");
    std::size_t i = 0;
    for (const auto& e : j.at(table)) {
      const std::string where = std::string(table) + "[" + std::to_string(i++) + "]";
      if (!e.is_object()) lexicon_error(where, "must be an object");
      fn(e, where);
    }
  };
  each("relation_cues", [&](const json& e, const std::string& where) {
    RelationCue c;
    c.phrase = checked_phrase(get_string(e, "phrase", where), where, true);
    c.rel = get_string(e, "rel", where);
    if (!taxonomy.has_relation(c.rel)) lexicon_error(where, "unknown relationship type \"" + c.rel + "\"");
    c.target_kind = get_string(e, "target_kind", where);
    check_kind(taxonomy, c.target_kind, where, false);
    c.display = get_string(e, "display", where, false);
    c.binds_value = e.value("binds_value", false);
    c.attribution = e.value("attribution", false);
    c.confidence = get_confidence(e, where);
    const auto slots = slots_of(c.phrase);
    const bool has_name = std::any_of(slots.begin(), slots.end(), [](const Slot& s) { return s.type == SlotType::Name; });
    if (c.attribution != has_name) lexicon_error(where, "attribution cues need exactly one {name} slot");
    lex.relation_cues.push_back(std::move(c));
  });
  each("value_cues", [&](const json& e, const std::string& where) {
    ValueCue c;
    c.phrase = checked_phrase(get_string(e, "phrase", where), where, false);
    c.kind = get_string(e, "kind", where);
    check_kind(taxonomy, c.kind, where, true);
    if (c.kind == kAnyResource) lexicon_error(where, "value cues need a concrete kind");
    c.property = get_string(e, "property", where);
    if (c.property.empty()) lexicon_error(where, "empty property");
    if (!e.contains("value")) lexicon_error(where, "missing \"value\"");
    const json& v = e.at("value");
    if (v.is_string()) c.value = v.get<std::string>();
    else if (v.is_boolean()) c.value = v.get<bool>();
    else if (v.is_number()) c.value = v.get<double>();
    else lexicon_error(where, "\"value\" must be a string, number or boolean");
    c.display = get_string(e, "display", where, false);
    c.noun = get_string(e, "noun", where, false);
    if (c.noun.empty()) c.noun = c.display;
    c.confidence = get_confidence(e, where);
    lex.value_cues.push_back(std::move(c));
  });
  each("aggregation_cues", [&](const json& e, const std::string& where) {
    AggregationCue c;
    c.phrase = checked_phrase(get_string(e, "phrase", where), where, true);
    c.property = get_string(e, "property", where);
    c.descending = e.value("descending", true);
    lex.aggregation_cues.push_back(std::move(c));
  });
  each("temporal_cues", [&](const json& e, const std::string& where) {
    TemporalCue c;
    c.phrase = checked_phrase(get_string(e, "phrase", where), where, true);
    if (c.phrase.find("{unit}") == std::string::npos) lexicon_error(where, "temporal cues need a {unit} slot");
    if (e.contains("property")) c.property = get_string(e, "property", where);
    lex.temporal_cues.push_back(std::move(c));
  });
  if (j.contains("filler_phrases")) {
    std::size_t i = 0;
    for (const auto& f : j.at("filler_phrases")) {
      const std::string where = "filler_phrases[" + std::to_string(i++) + "]";
      if (!f.is_string()) lexicon_error(where, "must be a string");
      lex.filler_phrases.push_back(checked_phrase(f.get<std::string>(), where, false));
    }
  }
  return lex;
}

Lexicon Lexicon::load(const std::string& path, const Taxonomy& taxonomy) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str(), taxonomy);
}

// ---------------------------------------------------------------- resolution

Resolution resolve_term(const std::string& term, const Lexicon& lexicon, const SemanticContext& semantic) {
  const std::string norm = normalize_phrase(term);
  if (norm.empty()) return {};
  if (auto it = lexicon.entity_synonyms.find(norm); it != lexicon.entity_synonyms.end())
    return {Resolution::Type::Kind, it->second, 1.0};
  for (const auto& c : lexicon.relation_cues)
    if (c.phrase == norm) return {Resolution::Type::Relation, c.rel, 1.0};
  if (!semantic.model || !semantic.matrix || semantic.model->empty()) return {};
  const auto latent = embed_query(*semantic.model, *semantic.matrix, content_terms(term));
  const auto top = top_k_similar(*semantic.model, latent, 1);
  if (top.empty() || top[0].second < semantic.threshold) return {Resolution::Type::Unresolved, {}, top.empty() ? 0.0 : top[0].second};
  const auto pos = semantic.matrix->doc_position(top[0].first);
  if (!pos) return {};
  return {Resolution::Type::Kind, semantic.matrix->doc_kinds[*pos], top[0].second};
}

// ---------------------------------------------------------------- extraction

QueryIntent extract_intent(const std::string& text, const Lexicon& lexicon, const ExtractOptions& options) {
  const std::vector<Token> all = tokenize(text);
  if (all.empty()) throw EmptyQuery();
  std::vector<const Token*> toks;
  for (const auto& t : all)
    if (!t.stopword) toks.push_back(&t);

  QueryIntent intent;
  intent.text = text;
  std::vector<double> consumed(toks.size(), 0.0);

  struct PendingRelation {
    std::size_t cue;
    std::size_t position;
  };
  std::vector<PendingRelation> relations;

  struct Candidate {
    Match m;
    std::size_t order;  // index within its table, for stable ties
  };

  std::size_t i = 0;
  while (i < toks.size()) {
    std::optional<Match> best;
    auto consider = [&](std::optional<Match> m, Table table, std::size_t index) {
      if (!m) return;
      m->table = table;
      m->index = index;
      if (!best || m->length > best->length ||
          (m->length == best->length && static_cast<int>(table) < static_cast<int>(best->table)))
        best = m;
    };
    for (std::size_t k = 0; k < lexicon.temporal_cues.size(); ++k)
      consider(match_at(slots_of(lexicon.temporal_cues[k].phrase), toks, i), Table::Temporal, k);
    for (std::size_t k = 0; k < lexicon.aggregation_cues.size(); ++k)
      consider(match_at(slots_of(lexicon.aggregation_cues[k].phrase), toks, i), Table::Aggregation, k);
    for (std::size_t k = 0; k < lexicon.relation_cues.size(); ++k)
      consider(match_at(slots_of(lexicon.relation_cues[k].phrase), toks, i), Table::Relation, k);
    for (std::size_t k = 0; k < lexicon.value_cues.size(); ++k)
      consider(match_at(slots_of(lexicon.value_cues[k].phrase), toks, i), Table::Value, k);
    {
      std::size_t k = 0;
      for (const auto& [phrase, kind] : lexicon.entity_synonyms) {
        consider(match_at(slots_of(phrase), toks, i), Table::Entity, k++);
      }
    }
    for (std::size_t k = 0; k < lexicon.filler_phrases.size(); ++k)
      consider(match_at(slots_of(lexicon.filler_phrases[k]), toks, i), Table::Filler, k);

    if (!best) {
      ++i;
      continue;
    }
    const Match& m = *best;
    switch (m.table) {
      case Table::Temporal: {
        if (!intent.time_window) {
          const auto& cue = lexicon.temporal_cues[m.index];
          const std::size_t n = m.count.value_or(1);
          const std::int64_t span = static_cast<std::int64_t>(n) * m.unit->seconds;
          TimeWindowIntent tw;
          tw.property = cue.property;
          tw.end = options.now;
          tw.start = Timestamp{std::max<std::int64_t>(0, options.now.seconds - span)};
          tw.display = "created in the last " + (n == 1 ? std::string(m.unit->singular)
                                                         : std::to_string(n) + " " + m.unit->plural);
          tw.position = i;
          intent.time_window = tw;
        }
        break;
      }
      case Table::Aggregation: {
        if (!intent.aggregation) {
          const auto& cue = lexicon.aggregation_cues[m.index];
          intent.aggregation = Aggregation{cue.property, cue.descending, m.count.value_or(10)};
        }
        break;
      }
      case Table::Relation: {
        const auto& cue = lexicon.relation_cues[m.index];
        if (cue.attribution) {
          if (!intent.attribution) intent.attribution = Attribution{m.name, cue.confidence, i};
        } else {
          relations.push_back({m.index, i});
        }
        break;
      }
      case Table::Value: {
        const auto& cue = lexicon.value_cues[m.index];
        Condition c;
        c.kind = cue.kind;
        c.property = cue.property;
        c.value = cue.value;
        if (auto* s = std::get_if<std::string>(&c.value); s && *s == kDefaultTenancy) c.value = options.default_tenancy;
        c.display = cue.display;
        c.confidence = cue.confidence;
        c.position = i;
        intent.conditions.push_back(std::move(c));
        break;
      }
      case Table::Entity: {
        auto it = lexicon.entity_synonyms.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(m.index));
        if (std::find(intent.entity_kinds.begin(), intent.entity_kinds.end(), it->second) == intent.entity_kinds.end())
          intent.entity_kinds.push_back(it->second);
        break;
      }
      case Table::Filler: break;
    }
    for (std::size_t k = i; k < i + m.length; ++k) consumed[k] = 1.0;
    i += m.length;
  }

  // Binding relations take over the next value condition of their target
  // kind; the rest become filters.
  for (const auto& pr : relations) {
    const auto& cue = lexicon.relation_cues[pr.cue];
    bool bound = false;
    if (cue.binds_value) {
      for (auto& c : intent.conditions) {
        if (c.position > pr.position && c.kind == cue.target_kind && !c.via_rel) {
          c.via_rel = cue.rel;
          const auto vc = std::find_if(lexicon.value_cues.begin(), lexicon.value_cues.end(),
                                       [&](const ValueCue& v) { return v.display == c.display; });
          c.display = cue.display + " " + (vc != lexicon.value_cues.end() ? vc->noun : c.display);
          c.confidence = std::min(c.confidence, cue.confidence);
          bound = true;
          break;
        }
      }
    }
    if (!bound) intent.filters.push_back({cue.rel, cue.target_kind, cue.display, cue.confidence, pr.position});
  }

  // Direct identifiers among the leftovers.
  if (options.ids) {
    for (std::size_t k = 0; k < toks.size(); ++k) {
      if (consumed[k] > 0.0) continue;
      if (auto m = options.ids(toks[k]->original)) {
        intent.direct_ids.push_back({m->id, m->kind, k});
        consumed[k] = 1.0;
      }
    }
  }

  // Semantic fallback for the anchor: maximal runs of unconsumed tokens.
  if (intent.entity_kinds.empty() && options.semantic.model) {
    Resolution best_res;
    std::pair<std::size_t, std::size_t> best_run{0, 0};
    for (std::size_t k = 0; k < toks.size();) {
      if (consumed[k] > 0.0) {
        ++k;
        continue;
      }
      std::size_t e = k;
      std::string run;
      while (e < toks.size() && consumed[e] == 0.0) {
        if (!run.empty()) run += ' ';
        run += toks[e]->text;
        ++e;
      }
      Resolution r = resolve_term(run, lexicon, options.semantic);
      if (r.type == Resolution::Type::Kind && r.score > best_res.score) {
        best_res = r;
        best_run = {k, e};
      }
      k = e;
    }
    if (best_res.type == Resolution::Type::Kind) {
      intent.entity_kinds.push_back(best_res.value);
      for (std::size_t k = best_run.first; k < best_run.second; ++k) consumed[k] = best_res.score;
    }
  }

  if (intent.entity_kinds.empty() && !intent.direct_ids.empty()) intent.entity_kinds.push_back(intent.direct_ids[0].kind);
  if (intent.entity_kinds.empty()) {
    for (const auto& c : intent.conditions) {
      if (c.kind != kAnchorKind && !c.via_rel) {
        intent.entity_kinds.push_back(c.kind);
        break;
      }
    }
  }
  // "show vulnerabilities": the filter target is what is being listed.
  if (intent.entity_kinds.empty() && !intent.filters.empty()) {
    intent.entity_kinds.push_back(intent.filters.front().target_kind);
    intent.filters.erase(intent.filters.begin());
  }

  double weight = 0.0;
  for (std::size_t k = 0; k < toks.size(); ++k) {
    weight += consumed[k];
    if (consumed[k] == 0.0) intent.residual_terms.push_back(toks[k]->text);
  }
  intent.confidence = toks.empty() ? 0.0 : weight / static_cast<double>(toks.size());
  return intent;
}

// ---------------------------------------------------------------- compilation

namespace {

std::string var_stem(const std::string& kind) {
  if (kind == kAnyResource) return "r";
  std::string s;
  for (std::size_t i = 0; i < kind.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(kind[i]);
    if (std::isupper(c) && (i == 0 || !std::isupper(static_cast<unsigned char>(kind[i - 1]))))
      s += static_cast<char>(std::tolower(c));
  }
  return s.empty() ? "n" : s;
}

class VarNames {
 public:
  std::string fresh(const std::string& kind) {
    const std::string stem = var_stem(kind);
    std::string v = stem;
    for (int n = 2; used_.count(v); ++n) v = stem + std::to_string(n);
    used_.insert(v);
    return v;
  }

 private:
  std::set<std::string> used_;
};

void connect(GraphQueryIR& ir, const std::string& anchor_var, const std::string& other_var, const Link& link) {
  EdgePattern ep;
  ep.rel_type = link.rel_type;
  if (link.either) {
    ep.src_var = anchor_var;
    ep.dst_var = other_var;
    ep.direction = Direction::Either;
  } else if (link.forward) {
    ep.src_var = anchor_var;
    ep.dst_var = other_var;
  } else {
    ep.src_var = other_var;
    ep.dst_var = anchor_var;
  }
  ir.edge_patterns.push_back(std::move(ep));
}

}  // namespace

GraphQueryIR compile_intent(const QueryIntent& intent, const Taxonomy& taxonomy, const Lexicon& lexicon) {
  if (intent.entity_kinds.empty()) throw UncompilableIntent(intent.residual_terms);
  const std::string anchor_kind = intent.entity_kinds.front();
  const std::optional<std::string> anchor_label =
      anchor_kind == kAnyResource ? std::nullopt : std::optional<std::string>(anchor_kind);

  GraphQueryIR ir;
  VarNames names;
  const std::string anchor = names.fresh(anchor_kind);
  ir.node_patterns.push_back({anchor, anchor_label, {}});

  auto on_anchor = [&](const std::string& kind, bool via) {
    return kind == kAnchorKind || (!via && anchor_label && kind == *anchor_label);
  };
  auto link_to = [&](const std::string& kind, const std::optional<std::string>& rel) -> Link {
    if (rel) return taxonomy.orient(*rel, anchor_label, kind);
    auto link = taxonomy.link_between(anchor_label, kind);
    if (!link) {
      std::vector<std::string> residual = intent.residual_terms;
      residual.push_back("(no relationship connects " + (anchor_label ? *anchor_label : std::string("resources")) +
                         " to " + kind + ")");
      throw UncompilableIntent(residual);
    }
    return *link;
  };

  for (const auto& c : intent.conditions) {
    if (on_anchor(c.kind, c.via_rel.has_value())) {
      ir.node_patterns[0].prop_equals[c.property] = c.value;
      continue;
    }
    const std::string v = names.fresh(c.kind);
    ir.node_patterns.push_back({v, c.kind, {{c.property, c.value}}});
    connect(ir, anchor, v, link_to(c.kind, c.via_rel));
  }
  for (const auto& d : intent.direct_ids) {
    if (on_anchor(d.kind, false)) {
      ir.node_patterns[0].prop_equals["id"] = d.id;
      continue;
    }
    const std::string v = names.fresh(d.kind);
    ir.node_patterns.push_back({v, d.kind, {{"id", d.id}}});
    connect(ir, anchor, v, link_to(d.kind, std::nullopt));
  }
  std::vector<std::string> filter_vars;
  for (const auto& f : intent.filters) {
    const std::string v = names.fresh(f.target_kind);
    ir.node_patterns.push_back({v, f.target_kind, {}});
    connect(ir, anchor, v, taxonomy.orient(f.rel_type, anchor_label, f.target_kind));
    filter_vars.push_back(v);
  }
  if (intent.attribution) {
    const std::string v = names.fresh("User");
    ir.node_patterns.push_back({v, std::string("User"), {{"name", intent.attribution->user}}});
    connect(ir, anchor, v, taxonomy.orient("CREATED_BY", anchor_label, "User"));
  }
  if (intent.time_window) {
    ir.predicates.push_back(
        TimeWindow{{anchor, intent.time_window->property}, intent.time_window->start, intent.time_window->end});
  }
  ir.returns.push_back({anchor, std::string("name")});
  for (std::size_t k = 0; k < filter_vars.size(); ++k)
    ir.returns.push_back({filter_vars[k], lexicon.display(intent.filters[k].target_kind).salient});
  if (intent.aggregation) {
    const PropertyRef ref{anchor, intent.aggregation->property};
    ir.predicates.push_back(Exists{ref});
    ir.returns.push_back({anchor, intent.aggregation->property});
    ir.order_by = OrderBy{ref, intent.aggregation->descending};
    ir.limit = intent.aggregation->limit;
  }
  check_against(ir, taxonomy);
  return ir;
}

// ---------------------------------------------------------------- relaxation

std::vector<Constraint> constraints_of(const QueryIntent& intent) {
  std::vector<Constraint> out;
  for (std::size_t k = 0; k < intent.conditions.size(); ++k) {
    const auto& c = intent.conditions[k];
    out.push_back({Constraint::Type::Condition, k, c.confidence, c.position, c.display});
  }
  for (std::size_t k = 0; k < intent.filters.size(); ++k) {
    const auto& f = intent.filters[k];
    out.push_back({Constraint::Type::Filter, k, f.confidence, f.position, f.display});
  }
  if (intent.time_window)
    out.push_back({Constraint::Type::TimeWindow, 0, intent.time_window->confidence, intent.time_window->position,
                   intent.time_window->display});
  if (intent.attribution)
    out.push_back({Constraint::Type::Attribution, 0, intent.attribution->confidence, intent.attribution->position,
                   "created by user " + intent.attribution->user});
  for (std::size_t k = 0; k < intent.direct_ids.size(); ++k)
    out.push_back({Constraint::Type::DirectId, k, 1.0, intent.direct_ids[k].position, intent.direct_ids[k].id});
  return out;
}

QueryIntent without(const QueryIntent& intent, const std::vector<Constraint>& dropped) {
  auto is_dropped = [&](Constraint::Type t, std::size_t idx) {
    return std::any_of(dropped.begin(), dropped.end(), [&](const Constraint& c) { return c.type == t && c.index == idx; });
  };
  QueryIntent out = intent;
  out.conditions.clear();
  out.filters.clear();
  out.direct_ids.clear();
  for (std::size_t k = 0; k < intent.conditions.size(); ++k)
    if (!is_dropped(Constraint::Type::Condition, k)) out.conditions.push_back(intent.conditions[k]);
  for (std::size_t k = 0; k < intent.filters.size(); ++k)
    if (!is_dropped(Constraint::Type::Filter, k)) out.filters.push_back(intent.filters[k]);
  for (std::size_t k = 0; k < intent.direct_ids.size(); ++k)
    if (!is_dropped(Constraint::Type::DirectId, k)) out.direct_ids.push_back(intent.direct_ids[k]);
  if (is_dropped(Constraint::Type::TimeWindow, 0)) out.time_window.reset();
  if (is_dropped(Constraint::Type::Attribution, 0)) out.attribution.reset();
  return out;
}

std::string describe_intent(const QueryIntent& intent) {
  std::ostringstream os;
  os << "entities:";
  for (const auto& k : intent.entity_kinds) os << ' ' << k;
  os << '\n';
  for (const auto& c : intent.conditions) {
    os << "condition: " << c.kind << '.' << c.property << " = " << to_display(c.value);
    if (c.via_rel) os << " via " << *c.via_rel;
    os << " (confidence " << format_number(c.confidence) << ")\n";
  }
  for (const auto& f : intent.filters)
    os << "filter: " << f.rel_type << " -> " << f.target_kind << " (confidence " << format_number(f.confidence) << ")\n";
  if (intent.aggregation)
    os << "aggregation: " << intent.aggregation->property << (intent.aggregation->descending ? " desc" : " asc")
       << " limit " << intent.aggregation->limit << '\n';
  if (intent.time_window)
    os << "time window: " << intent.time_window->property << " in [" << format_iso8601(intent.time_window->start)
       << ", " << format_iso8601(intent.time_window->end) << "]\n";
  if (intent.attribution) os << "attribution: " << intent.attribution->user << '\n';
  for (const auto& d : intent.direct_ids) os << "direct id: " << d.id << " (" << d.kind << ")\n";
  os << "residual:";
  for (const auto& r : intent.residual_terms) os << ' ' << r;
  os << "\nconfidence: " << format_number(intent.confidence) << '\n';
  return os.str();
}

}  // namespace ontoq
