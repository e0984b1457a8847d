#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ontoq/errors.hpp"
#include "ontoq/executor.hpp"
#include "ontoq/ingestion.hpp"
#include "ontoq/ir_text.hpp"
#include "ontoq/nlq.hpp"
#include "ontoq/semantic_index.hpp"
#include "ontoq/taxonomy.hpp"
#include "ontoq/text.hpp"
#include "test_support.hpp"

using namespace ontoq;
using ontoq::testing::data_path;
using ontoq::testing::Gen;

namespace {

constexpr std::int64_t kNow = 1766880000;  // 2025-12-28T00:00:00Z
constexpr std::int64_t kDay = 86400;

const Taxonomy& taxonomy() {
  static const Taxonomy t = Taxonomy::seeded();
  return t;
}

const Lexicon& lexicon() {
  static const Lexicon lex = Lexicon::load(data_path("lexicon.json"), taxonomy());
  return lex;
}

ExtractOptions options() {
  ExtractOptions o;
  o.now = Timestamp{kNow};
  return o;
}

QueryIntent extract(const std::string& q) { return extract_intent(q, lexicon(), options()); }

GraphQueryIR compile(const std::string& q) { return compile_intent(extract(q), taxonomy(), lexicon()); }

const KnowledgeGraph& golden() {
  static const LoadResult r = load_corpus(data_path("fixtures/golden_corpus.jsonl"));
  return r.graph;
}

std::set<std::string> anchor_ids(const KnowledgeGraph& g, const GraphQueryIR& ir) {
  std::set<std::string> out;
  for (const auto& b : execute(g, ir)) out.insert(b.node_ids.at(0));
  return out;
}

std::vector<std::string> anchor_list(const KnowledgeGraph& g, const GraphQueryIR& ir) {
  std::vector<std::string> out;
  for (const auto& b : execute(g, ir)) out.push_back(b.node_ids.at(0));
  return out;
}

const std::string kWorkedQuery =
    "List all compute instances in the production environment that have security vulnerabilities.";
const std::string kWorkedCypher =
    "MATCH (ci:ComputeInstance)-[:DEPLOYED_IN]->(:Environment {name:\"Production\"})\n"
    "MATCH (ci)-[:HAS_VULNERABILITY]->(v:Vulnerability)\n"
    "RETURN ci.name, v.description";

}  // namespace

TEST(Lexicon, LoadsShippedFile) {
  const Lexicon& lex = lexicon();
  EXPECT_FALSE(lex.entity_synonyms.empty());
  EXPECT_EQ(lex.entity_synonyms.at("compute instances"), "ComputeInstance");
  EXPECT_EQ(lex.entity_synonyms.count("virtual machine"), 0u);
  EXPECT_EQ(lex.display("Vulnerability").salient, "description");
}

TEST(Lexicon, PhrasesAreNormalized) {
  const Lexicon lex = Lexicon::from_json_text(
      R"({"entity_synonyms": {"The Compute Instances": "ComputeInstance"},
          "relation_cues": [{"phrase": "in front of", "rel": "FRONTED_BY", "target_kind": "Service"}]})",
      taxonomy());
  EXPECT_EQ(lex.entity_synonyms.count("compute instances"), 1u);
  EXPECT_EQ(lex.relation_cues.at(0).phrase, "front");
}

TEST(Lexicon, SyntaxErrorNamesLine) {
  try {
    Lexicon::from_json_text("{\n\"entity_synonyms\": {\n\"vms\": \"ComputeInstance\",,\n}}", taxonomy());
    FAIL();
  } catch (const InvalidLexicon& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Lexicon, RejectsUnknownNames) {
  EXPECT_THROW(Lexicon::from_json_text(R"({"entity_synonyms": {"gizmos": "Gizmo"}})", taxonomy()), InvalidLexicon);
  EXPECT_THROW(Lexicon::from_json_text(
                   R"({"relation_cues": [{"phrase": "owns", "rel": "OWNS", "target_kind": "User"}]})", taxonomy()),
               InvalidLexicon);
  EXPECT_THROW(Lexicon::from_json_text(R"({"value_cues": [{"phrase": "the", "kind": "Environment",
                                          "property": "name", "value": "x"}]})",
                                       taxonomy()),
               InvalidLexicon);
  EXPECT_THROW(Lexicon::from_json_text(R"({"temporal_cues": [{"phrase": "recently"}]})", taxonomy()), InvalidLexicon);
  EXPECT_THROW(Lexicon::load("/nonexistent/lexicon.json", taxonomy()), IoError);
}

TEST(Extract, WorkedQuery) {
  const QueryIntent in = extract(kWorkedQuery);
  EXPECT_EQ(in.entity_kinds, std::vector<std::string>{"ComputeInstance"});
  ASSERT_EQ(in.conditions.size(), 1u);
  EXPECT_EQ(in.conditions[0].kind, "Environment");
  EXPECT_EQ(in.conditions[0].property, "name");
  EXPECT_EQ(in.conditions[0].value, PropertyValue(std::string("Production")));
  ASSERT_EQ(in.filters.size(), 1u);
  EXPECT_EQ(in.filters[0].rel_type, "HAS_VULNERABILITY");
  EXPECT_EQ(in.filters[0].target_kind, "Vulnerability");
  EXPECT_FALSE(in.aggregation);
  EXPECT_FALSE(in.time_window);
  EXPECT_TRUE(in.residual_terms.empty());
  EXPECT_DOUBLE_EQ(in.confidence, 1.0);
}

TEST(Extract, TemporalAndAttribution) {
  const QueryIntent in = extract("List all compute instances created in the last two weeks by user X");
  EXPECT_EQ(in.entity_kinds, std::vector<std::string>{"ComputeInstance"});
  ASSERT_TRUE(in.time_window);
  EXPECT_EQ(in.time_window->property, "created_at");
  EXPECT_EQ(in.time_window->start.seconds, kNow - 14 * kDay);
  EXPECT_EQ(in.time_window->end.seconds, kNow);
  ASSERT_TRUE(in.attribution);
  EXPECT_EQ(in.attribution->user, "x");
  EXPECT_DOUBLE_EQ(in.confidence, 1.0);
}

TEST(Extract, TemporalUnits) {
  EXPECT_EQ(extract("hosts created in the last 3 days").time_window->start.seconds, kNow - 3 * kDay);
  EXPECT_EQ(extract("hosts created last week").time_window->start.seconds, kNow - 7 * kDay);
  EXPECT_EQ(extract("databases from the past 2 months").time_window->start.seconds, kNow - 60 * kDay);
  EXPECT_EQ(extract("buckets created in the last 12 hours").time_window->start.seconds, kNow - 12 * 3600);
}

TEST(Extract, TopExpensiveResources) {
  const QueryIntent in = extract("What are the top 10 expensive resources in my cloud environment?");
  EXPECT_EQ(in.entity_kinds, std::vector<std::string>{kAnyResource});
  ASSERT_TRUE(in.aggregation);
  EXPECT_EQ(in.aggregation->property, "cost");
  EXPECT_TRUE(in.aggregation->descending);
  EXPECT_EQ(in.aggregation->limit, 10u);
  EXPECT_TRUE(in.conditions.empty());
  EXPECT_DOUBLE_EQ(in.confidence, 1.0);
}

TEST(Extract, EmptyQuery) {
  EXPECT_THROW(extract(""), EmptyQuery);
  EXPECT_THROW(extract("  ?!  "), EmptyQuery);
}

TEST(Extract, NlbFrontingCrm) {
  const QueryIntent in = extract("list the NLB that fronts the CRM service in my production tenancy");
  EXPECT_EQ(in.entity_kinds, std::vector<std::string>{"NLB"});
  ASSERT_EQ(in.conditions.size(), 2u);
  EXPECT_EQ(in.conditions[0].kind, "Service");
  EXPECT_EQ(in.conditions[0].via_rel, std::optional<std::string>("FRONTED_BY"));
  EXPECT_EQ(in.conditions[0].value, PropertyValue(std::string("crm")));
  EXPECT_EQ(in.conditions[1].kind, "Tenancy");
  EXPECT_EQ(in.conditions[1].value, PropertyValue(std::string("tenancy-prod")));
  EXPECT_TRUE(in.filters.empty());
}

TEST(Extract, DefaultTenancyFromOptions) {
  ExtractOptions o = options();
  o.default_tenancy = "tenancy-other";
  const QueryIntent in = extract_intent("nlb in my production tenancy", lexicon(), o);
  ASSERT_EQ(in.conditions.size(), 1u);
  EXPECT_EQ(in.conditions[0].value, PropertyValue(std::string("tenancy-other")));
}

TEST(Extract, DirectIdentifier) {
  ExtractOptions o = options();
  o.ids = [](const std::string& id) -> std::optional<IdMatch> {
    const ResourceNode* n = golden().find_node(id);
    return n ? std::optional<IdMatch>(IdMatch{n->id, n->kind}) : std::nullopt;
  };
  const QueryIntent in = extract_intent("vulnerabilities of ins-cloud-host-1427", lexicon(), o);
  ASSERT_EQ(in.direct_ids.size(), 1u);
  EXPECT_EQ(in.direct_ids[0].id, "ins-cloud-host-1427");
  EXPECT_EQ(in.entity_kinds, std::vector<std::string>{"ComputeInstance"});
  const GraphQueryIR ir = compile_intent(in, taxonomy(), lexicon());
  EXPECT_EQ(anchor_ids(golden(), ir), std::set<std::string>{"ins-cloud-host-1427"});
}

TEST(Extract, ResidualTermsAndConfidence) {
  const QueryIntent in = extract("compute instances zzqx blorp");
  EXPECT_EQ(in.residual_terms, (std::vector<std::string>{"zzqx", "blorp"}));
  EXPECT_NEAR(in.confidence, 2.0 / 4.0, 1e-12);
  const QueryIntent junk = extract("zzqx blorp frobnicate");
  EXPECT_DOUBLE_EQ(junk.confidence, 0.0);
  EXPECT_TRUE(junk.entity_kinds.empty());
}

TEST(Resolve, LexiconHitsScoreOne) {
  const Resolution r = resolve_term("vms", lexicon(), {});
  EXPECT_EQ(r.type, Resolution::Type::Kind);
  EXPECT_EQ(r.value, "ComputeInstance");
  EXPECT_DOUBLE_EQ(r.score, 1.0);
  const Resolution rel = resolve_term("fronts", lexicon(), {});
  EXPECT_EQ(rel.type, Resolution::Type::Relation);
  EXPECT_EQ(rel.value, "FRONTED_BY");
}

namespace {

struct ToyIndex {
  TermDocMatrix matrix;
  LsiModel model;
};

ToyIndex toy_index() {
  ToyIndex t;
  t.matrix = build_matrix(std::vector<TextDocument>{
      {"ci-1", "ComputeInstance", "virtual machine running the web tier"},
      {"ci-2", "ComputeInstance", "virtual machine for batch jobs"},
      {"db-1", "Database", "relational database holding orders"},
      {"db-2", "Database", "database replica for reporting"},
      {"b-1", "Bucket", "object storage bucket for backups"},
      {"b-2", "Bucket", "bucket with static web assets"},
  });
  t.model = truncated_svd(t.matrix, default_rank(t.matrix));
  return t;
}

double raw_cosine(const std::vector<double>& a, const TermDocMatrix& m, std::size_t doc) {
  double dot = 0, na = 0, nb = 0;
  for (double x : a) na += x * x;
  for (const auto& e : m.columns[doc]) {
    dot += a[e.term] * e.weight;
    nb += e.weight * e.weight;
  }
  return na > 0 && nb > 0 ? dot / std::sqrt(na * nb) : 0.0;
}

}  // namespace

TEST(Resolve, SemanticFallbackFindsKind) {
  const ToyIndex t = toy_index();
  const SemanticContext ctx{&t.model, &t.matrix, kDefaultResolutionThreshold};
  const Resolution r = resolve_term("virtual machine", lexicon(), ctx);
  EXPECT_EQ(r.type, Resolution::Type::Kind);
  EXPECT_EQ(r.value, "ComputeInstance");
  EXPECT_GE(r.score, 0.35);
  EXPECT_LE(r.score, 1.0 + 1e-9);

  // Brute force in raw TF-IDF space agrees on the best document's kind.
  const auto q = t.matrix.query_vector(content_terms("virtual machine"));
  std::size_t best = 0;
  for (std::size_t d = 1; d < t.matrix.doc_count(); ++d)
    if (raw_cosine(q, t.matrix, d) > raw_cosine(q, t.matrix, best)) best = d;
  EXPECT_EQ(t.matrix.doc_kinds[best], "ComputeInstance");
  EXPECT_GE(raw_cosine(q, t.matrix, best), 0.35);
}

TEST(Resolve, GibberishIsUnresolved) {
  const ToyIndex t = toy_index();
  const SemanticContext ctx{&t.model, &t.matrix, kDefaultResolutionThreshold};
  EXPECT_EQ(resolve_term("zzqx", lexicon(), ctx).type, Resolution::Type::Unresolved);
  EXPECT_EQ(resolve_term("zzqx", lexicon(), {}).type, Resolution::Type::Unresolved);
}

TEST(Extract, SemanticFallbackSuppliesAnchor) {
  const ToyIndex t = toy_index();
  ExtractOptions o = options();
  o.semantic = {&t.model, &t.matrix, kDefaultResolutionThreshold};
  const QueryIntent in = extract_intent("virtual machine in production", lexicon(), o);
  EXPECT_EQ(in.entity_kinds, std::vector<std::string>{"ComputeInstance"});
  EXPECT_GT(in.confidence, 0.35);
  EXPECT_LE(in.confidence, 1.0);
}

TEST(Compile, WorkedQueryMatchesCypher) {
  const GraphQueryIR ir = compile(kWorkedQuery);
  EXPECT_TRUE(equivalent_modulo_vars(ir, parse_ir_text(kWorkedCypher))) << print_ir(ir);
  EXPECT_EQ(anchor_ids(golden(), ir), (std::set<std::string>{"Ins-cloud-host-2109", "ins-cloud-host-1427"}));
}

TEST(Compile, ParaphraseGivesSameIr) {
  const GraphQueryIR a = compile(kWorkedQuery);
  const GraphQueryIR b = compile("vms in production with vulnerabilities");
  EXPECT_TRUE(equivalent_modulo_vars(a, b)) << print_ir(a) << "\n---\n" << print_ir(b);
}

TEST(Compile, NlbFrontingCrm) {
  const GraphQueryIR ir = compile("list the NLB that fronts the CRM service in my production tenancy");
  ASSERT_EQ(ir.node_patterns.at(0).label, std::optional<std::string>("NLB"));
  bool fronted = false, deployed = false;
  for (const auto& e : ir.edge_patterns) {
    if (e.rel_type == "FRONTED_BY") {
      fronted = true;
      EXPECT_EQ(e.dst_var, ir.node_patterns[0].var);  // stored Service -> NLB
    }
    if (e.rel_type == "DEPLOYED_IN") deployed = true;
  }
  EXPECT_TRUE(fronted);
  EXPECT_TRUE(deployed);
  EXPECT_EQ(anchor_ids(golden(), ir), std::set<std::string>{"nlb-crm"});
}

TEST(Compile, TopExpensiveIsUnlabeledAndOrdered) {
  const GraphQueryIR ir = compile("What are the top 10 expensive resources in my cloud environment?");
  EXPECT_FALSE(ir.node_patterns.at(0).label);
  ASSERT_TRUE(ir.order_by);
  EXPECT_TRUE(ir.order_by->descending);
  EXPECT_EQ(ir.limit, std::optional<std::size_t>(10));
  EXPECT_EQ(anchor_list(golden(), ir), (std::vector<std::string>{"ins-cloud-host-3311", "ins-cloud-host-1427",
                                                                   "Ins-cloud-host-2109", "ins-cloud-host-4502"}));
  const GraphQueryIR top2 = compile("top 2 most expensive resources");
  EXPECT_EQ(anchor_list(golden(), top2), (std::vector<std::string>{"ins-cloud-host-3311", "ins-cloud-host-1427"}));
}

TEST(Compile, TimeWindowOnGolden) {
  const GraphQueryIR ir = compile("compute instances created in the last two weeks");
  EXPECT_EQ(anchor_ids(golden(), ir), std::set<std::string>{"ins-cloud-host-4502"});
}

TEST(Compile, AttributionFindsCreator) {
  KnowledgeGraph g;
  g.upsert_node({"ci-a", "ComputeInstance", "a", {}, "", {}, Timestamp{kNow - 3 * kDay}});
  g.upsert_node({"ci-b", "ComputeInstance", "b", {}, "", {}, Timestamp{kNow - 3 * kDay}});
  g.upsert_node({"ci-c", "ComputeInstance", "c", {}, "", {}, Timestamp{kNow - 30 * kDay}});
  g.upsert_node({"u-x", "User", "x", {}, "", {}, Timestamp{0}});
  g.upsert_node({"u-y", "User", "y", {}, "", {}, Timestamp{0}});
  g.add_edge({"ci-a", "u-x", "CREATED_BY", {}});
  g.add_edge({"ci-b", "u-y", "CREATED_BY", {}});
  g.add_edge({"ci-c", "u-x", "CREATED_BY", {}});
  const GraphQueryIR ir = compile("List all compute instances created in the last two weeks by user X");
  EXPECT_EQ(anchor_ids(g, ir), std::set<std::string>{"ci-a"});
}

TEST(Compile, ZeroEntitiesIsUncompilable) {
  const QueryIntent in = extract("zzqx blorp");
  try {
    compile_intent(in, taxonomy(), lexicon());
    FAIL();
  } catch (const UncompilableIntent& e) {
    EXPECT_NE(std::string(e.what()).find("zzqx"), std::string::npos) << e.what();
  }
}

TEST(Compile, UnconnectableKindIsUncompilable) {
  QueryIntent in;
  in.entity_kinds = {"Vulnerability"};
  in.conditions.push_back({"CompliancePolicy", "name", std::string("PCI"), "", std::nullopt, 1.0, 0});
  EXPECT_THROW(compile_intent(in, taxonomy(), lexicon()), UncompilableIntent);
}

TEST(Compile, AnchorPropertyCondition) {
  const GraphQueryIR ir = compile("services that handle financial transactions");
  ASSERT_EQ(ir.node_patterns.size(), 1u);
  EXPECT_EQ(ir.node_patterns[0].prop_equals.at("category"), PropertyValue(std::string("ecommerce")));
}

TEST(Relax, ConstraintsRoundTrip) {
  const QueryIntent in = extract("vms in staging with vulnerabilities created last week by user bob");
  const auto cs = constraints_of(in);
  EXPECT_EQ(cs.size(), 4u);
  const QueryIntent bare = without(in, cs);
  EXPECT_TRUE(bare.conditions.empty());
  EXPECT_TRUE(bare.filters.empty());
  EXPECT_FALSE(bare.time_window);
  EXPECT_FALSE(bare.attribution);
  EXPECT_EQ(bare.entity_kinds, in.entity_kinds);
  const QueryIntent same = without(in, {});
  EXPECT_EQ(constraints_of(same).size(), cs.size());
  EXPECT_FALSE(describe_intent(in).empty());
}

// ---------------------------------------------------------------- properties

namespace {

const std::vector<std::string> kQueryWords = {
    "compute", "instances", "vms", "production", "environment", "security", "vulnerabilities", "databases",
    "top",     "5",         "most", "expensive",  "created",     "last",     "two",             "weeks",
    "by",      "user",      "bob",  "nlb",        "fronts",      "crm",      "service",         "my",
    "tenancy", "zzqx",      "pci",  "compliant",  "in",          "the",      "with",            "staging"};

std::string random_query(Gen& gen) {
  std::string q;
  const std::size_t n = 1 + gen.below(10);
  for (std::size_t i = 0; i < n; ++i) q += (i ? " " : "") + gen.pick(kQueryWords);
  return q;
}

}  // namespace

TEST(NlqProperty, ConfidenceBoundsAndDeterminism) {
  Gen gen(11);
  for (int trial = 0; trial < 500; ++trial) {
    const std::string q = random_query(gen);
    QueryIntent a;
    try {
      a = extract(q);
    } catch (const EmptyQuery&) {
      continue;  // only stopwords-free empties throw; none here
    }
    EXPECT_GE(a.confidence, 0.0) << q;
    EXPECT_LE(a.confidence, 1.0) << q;
    const QueryIntent b = extract(q);
    EXPECT_EQ(describe_intent(a), describe_intent(b)) << q;
    if (a.residual_terms.empty()) {
      // Queries made only of stopwords consume nothing but have no content either.
      const bool has_content = !content_terms(q).empty();
      if (has_content) EXPECT_DOUBLE_EQ(a.confidence, 1.0) << q;
    }
    try {
      const std::string p1 = print_ir(compile_intent(a, taxonomy(), lexicon()));
      const std::string p2 = print_ir(compile_intent(b, taxonomy(), lexicon()));
      EXPECT_EQ(p1, p2) << q;
    } catch (const UncompilableIntent&) {
    }
  }
}

TEST(NlqProperty, LongestMatchWins) {
  Gen gen(23);
  const std::vector<std::string> words = {"alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf"};
  const std::vector<std::string> kinds = {"Database", "Bucket", "Service", "Subnet"};
  for (int trial = 0; trial < 300; ++trial) {
    Lexicon lex;
    std::set<std::string> phrases;
    for (int k = 0; k < 6; ++k) {
      std::string p;
      const std::size_t len = 1 + gen.below(2);
      for (std::size_t i = 0; i < len; ++i) p += (i ? " " : "") + gen.pick(words);
      if (!phrases.insert(p).second) continue;
      if (gen.coin()) {
        lex.entity_synonyms[p] = gen.pick(kinds);
      } else {
        lex.value_cues.push_back({p, "Environment", "name", std::string("E"), "d", "d", 1.0});
      }
    }
    // New longer phrase extending an existing one.
    const std::string base = *std::next(phrases.begin(), static_cast<long>(gen.below(phrases.size())));
    std::string longer = base;
    const std::size_t extra = 1 + gen.below(2);
    for (std::size_t i = 0; i < extra; ++i) longer += " " + gen.pick(words);
    if (phrases.count(longer)) continue;
    lex.entity_synonyms[longer] = "ComputeInstance";
    const QueryIntent in = extract_intent(longer, lex, options());
    EXPECT_EQ(in.entity_kinds, std::vector<std::string>{"ComputeInstance"}) << longer;
    EXPECT_TRUE(in.conditions.empty()) << longer;
    EXPECT_DOUBLE_EQ(in.confidence, 1.0) << longer;
  }
}

TEST(NlqProperty, CompiledQueriesAreSoundOnGolden) {
  // Each archetype against the fixture graph; gold ids must all be returned.
  struct Case {
    std::string query;
    std::set<std::string> gold;
  };
  const std::vector<Case> cases = {
      {kWorkedQuery, {"ins-cloud-host-1427", "Ins-cloud-host-2109"}},
      {"hosts in development", {"ins-cloud-host-4502"}},
      {"compute instances created in the last two weeks", {"ins-cloud-host-4502"}},
      {"top 1 most expensive resources", {"ins-cloud-host-3311"}},
      {"list the NLB that fronts the CRM service in my production tenancy", {"nlb-crm"}},
  };
  for (const auto& c : cases) {
    const auto got = anchor_ids(golden(), compile(c.query));
    for (const auto& id : c.gold) EXPECT_TRUE(got.count(id)) << c.query << " missing " << id;
  }
}
