#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "ontoq/classifier.hpp"
#include "ontoq/errors.hpp"
#include "ontoq/eval.hpp"
#include "ontoq/ingestion.hpp"
#include "ontoq/pipeline.hpp"
#include "ontoq/semantic_index.hpp"
#include "test_support.hpp"

#include <json.hpp>

using namespace ontoq;
using ontoq::testing::data_path;
using ontoq::testing::Gen;

namespace {

AppConfig base_config() {
  AppConfig c;
  c.lexicon_path = data_path("lexicon.json");
  c.categories_path = data_path("categories.json");
  c.now = 1767225600;
  return c;
}

const GeneratedCorpus& seeded() {
  static const GeneratedCorpus g = generate_corpus(GenParams{});
  return g;
}

const Pipeline& seeded_pipeline() {
  static Pipeline* p = [] {
    auto* pl = new Pipeline(base_config());
    std::istringstream in(seeded().corpus);
    pl->ingest(in);
    return pl;
  }();
  return *p;
}

const ComparisonReport& seeded_report() {
  static const ComparisonReport r = run_comparison(seeded_pipeline(), seeded().gold, [] { return 0.0; });
  return r;
}

// Independent metric oracle over plain counts.
void expect_f1_identity(const Metrics& m) {
  const double expected = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  EXPECT_NEAR(m.f1, expected, 1e-12);
}

}  // namespace

TEST(Metrics, HandCase) {
  const Metrics m = compute_metrics({"a", "b", "c"}, {"b", "c", "d"});
  EXPECT_DOUBLE_EQ(m.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.f1, 2.0 / 3.0);
}

TEST(Metrics, EdgeCases) {
  const Metrics same = compute_metrics({"x", "y"}, {"y", "x"});
  EXPECT_EQ(same.precision, 1.0);
  EXPECT_EQ(same.recall, 1.0);
  EXPECT_EQ(same.f1, 1.0);
  const Metrics none = compute_metrics({"p"}, {"q"});
  EXPECT_EQ(none.precision, 0.0);
  EXPECT_EQ(none.recall, 0.0);
  EXPECT_EQ(none.f1, 0.0);
  const Metrics empty = compute_metrics({}, {"q"});
  EXPECT_EQ(empty.precision, 0.0);
  EXPECT_EQ(empty.f1, 0.0);
  const Metrics dup = compute_metrics({"a", "a", "b"}, {"a"});
  EXPECT_DOUBLE_EQ(dup.precision, 0.5);
  EXPECT_THROW(compute_metrics({"a"}, {}), EmptyGold);
}

TEST(MetricsProperty, IdentityAndBounds) {
  Gen gen(77);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> retrieved, relevant;
    const std::size_t universe = 1 + gen.below(20);
    for (std::size_t i = 0; i < universe; ++i) {
      if (gen.coin(0.4)) retrieved.push_back("n" + std::to_string(i));
      if (gen.coin(0.4)) relevant.push_back("n" + std::to_string(i));
    }
    if (relevant.empty()) relevant.push_back("n0");
    const Metrics m = compute_metrics(retrieved, relevant);
    std::size_t hit = 0;
    for (const auto& r : retrieved) hit += std::count(relevant.begin(), relevant.end(), r);
    EXPECT_DOUBLE_EQ(m.precision, retrieved.empty() ? 0.0 : double(hit) / double(retrieved.size()));
    EXPECT_DOUBLE_EQ(m.recall, double(hit) / double(relevant.size()));
    expect_f1_identity(m);
    for (double x : {m.precision, m.recall, m.f1}) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
    if (m.precision > 0 && m.recall > 0) {
      EXPECT_GE(m.f1, std::min(m.precision, m.recall) - 1e-12);
      EXPECT_LE(m.f1, std::max(m.precision, m.recall) + 1e-12);
    }
  }
}

TEST(Gold, LoadErrors) {
  std::istringstream empty("");
  EXPECT_THROW(load_gold(empty), EmptyGold);
  std::istringstream no_ids(R"({"query": "q", "relevant_ids": [], "archetype": "x"})");
  EXPECT_THROW(load_gold(no_ids), EmptyGold);
  std::istringstream bad("{\"query\": \"q\", \"relevant_ids\": [\"a\"]}\nnot json\n");
  try {
    load_gold(bad);
    FAIL();
  } catch (const InvalidConfig& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(load_gold("/nonexistent/gold.jsonl"), IoError);
}

TEST(Gold, RoundTrip) {
  std::ostringstream out;
  write_gold(seeded().gold, out);
  std::istringstream in(out.str());
  const auto back = load_gold(in);
  ASSERT_EQ(back.size(), seeded().gold.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].query, seeded().gold[i].query);
    EXPECT_EQ(back[i].relevant_ids, seeded().gold[i].relevant_ids);
    EXPECT_EQ(back[i].now, seeded().gold[i].now);
  }
}

TEST(Keyword, ToyRanking) {
  const TermDocMatrix m = build_matrix(std::vector<TextDocument>{
      {"a", "Service", "pci payment gateway"}, {"b", "Service", "marketing pci review"}, {"c", "Service", "search"}});
  const auto hits = keyword_search(m, "PCI payment", 10);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].first, "a");
  EXPECT_TRUE(keyword_search(m, "the of and", 10).empty());
  EXPECT_EQ(keyword_search(m, "pci", 1).size(), 1u);
}

TEST(Keyword, PciFindsDecoys) {
  const auto snap = seeded_pipeline().snapshot();
  std::set<std::string> ids;
  for (const auto& [id, s] : keyword_search(snap->matrix, "pci", 1000)) ids.insert(id);
  std::size_t decoys = 0;
  for (const auto& id : ids) decoys += id.rfind("svc-finrep", 0) == 0;
  EXPECT_GE(decoys, 3u);
}

TEST(Keyword, UniqueNameRanksFirst) {
  const auto snap = seeded_pipeline().snapshot();
  for (const char* name : {"host-0007", "payments-03", "nlb-crm-b"}) {
    const auto hits = keyword_search(snap->matrix, name, 3);
    ASSERT_FALSE(hits.empty()) << name;
    const ResourceNode* n = snap->graph.find_node(hits[0].first);
    EXPECT_EQ(n->name, name);
  }
}

TEST(Generator, Deterministic) {
  const GeneratedCorpus a = generate_corpus(GenParams{});
  const GeneratedCorpus b = generate_corpus(GenParams{});
  EXPECT_EQ(a.corpus, b.corpus);
  std::ostringstream ga, gb;
  write_gold(a.gold, ga);
  write_gold(b.gold, gb);
  EXPECT_EQ(ga.str(), gb.str());
  GenParams other;
  other.seed = 7;
  EXPECT_NE(generate_corpus(other).corpus, a.corpus);
}

TEST(Generator, LoadsCleanly) {
  const auto snap = seeded_pipeline().snapshot();
  EXPECT_TRUE(snap->graph.validate().empty());
  EXPECT_TRUE(snap->load_report.skipped.empty());
  EXPECT_TRUE(snap->load_report.dropped_edges.empty());
  EXPECT_EQ(snap->graph.node_count(), seeded().nodes);
  EXPECT_EQ(snap->graph.edge_count(), seeded().edges);
}

TEST(Generator, GoldShape) {
  const auto& gold = seeded().gold;
  ASSERT_EQ(gold.size(), 10u);
  std::map<std::string, int> per;
  for (const auto& g : gold) {
    ++per[g.archetype];
    EXPECT_FALSE(g.relevant_ids.empty()) << g.query;
    EXPECT_TRUE(std::is_sorted(g.relevant_ids.begin(), g.relevant_ids.end()));
  }
  EXPECT_EQ(per.size(), 5u);
  for (const auto& [a, n] : per) EXPECT_EQ(n, 2) << a;
  for (const auto& g : gold)
    if (g.archetype == "compliance") EXPECT_EQ(g.relevant_ids.size(), 9u);
}

TEST(Generator, ServiceCategoriesAsPlanted) {
  const auto snap = seeded_pipeline().snapshot();
  for (const auto& [id, node] : snap->graph.nodes()) {
    if (node.kind != "Service") continue;
    const auto cat = node_property(node, "category");
    const std::string label = cat ? to_display(*cat) : "unknown";
    if (id.rfind("svc-pay", 0) == 0 || id.rfind("svc-shop", 0) == 0) EXPECT_EQ(label, "ecommerce") << id;
    if (id.rfind("svc-finrep", 0) == 0 || id.rfind("svc-cardauth", 0) == 0) EXPECT_NE(label, "ecommerce") << id;
  }
}

TEST(Generator, ScalesToRequestedSize) {
  const GeneratedCorpus big = generate_corpus(GenParams::for_size(10000));
  EXPECT_EQ(big.nodes, 10000u);
  EXPECT_EQ(generate_corpus(GenParams::for_size(2500)).nodes, 2500u);
  const GeneratedCorpus tiny = generate_corpus(GenParams::for_size(1));
  EXPECT_GT(tiny.nodes, 0u);
}

TEST(Comparison, OntologyBeatsKeyword) {
  const auto& r = seeded_report();
  ASSERT_EQ(r.systems.size(), 3u);
  EXPECT_GT(r.systems[0].macro.f1, r.systems[1].macro.f1 + 0.05);
  EXPECT_GT(r.systems[0].macro.f1, r.systems[2].macro.f1);
  for (const auto& q : r.queries) {
    expect_f1_identity(q.ontology.metrics);
    expect_f1_identity(q.keyword.metrics);
    expect_f1_identity(q.keyword_10.metrics);
  }
  const SystemResult QueryReport::*members[] = {&QueryReport::ontology, &QueryReport::keyword,
                                                &QueryReport::keyword_10};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& s = r.systems[i];
    EXPECT_EQ(s.mean_ms, 0.0);
    expect_f1_identity(s.macro);
    double p = 0.0, rec = 0.0;
    for (const auto& q : r.queries) {
      p += (q.*members[i]).metrics.precision;
      rec += (q.*members[i]).metrics.recall;
    }
    EXPECT_NEAR(s.macro.precision, p / double(r.queries.size()), 1e-12);
    EXPECT_NEAR(s.macro.recall, rec / double(r.queries.size()), 1e-12);
  }
}

TEST(Comparison, EveryGoldQueryExactForOntology) {
  for (const auto& q : seeded_report().queries) {
    EXPECT_EQ(q.ontology.metrics.precision, 1.0) << q.gold.query << " " << q.ontology.note;
    EXPECT_EQ(q.ontology.metrics.recall, 1.0) << q.gold.query;
  }
}

TEST(Comparison, ComplianceShape) {
  for (const auto& q : seeded_report().queries) {
    if (q.gold.archetype != "compliance") continue;
    EXPECT_EQ(q.ontology.retrieved.size(), 9u);
    EXPECT_LT(q.keyword.metrics.precision, 1.0) << q.gold.query;
  }
}

TEST(Comparison, LiteralNamesAreEasyForBoth) {
  std::vector<GoldQuery> gold;
  for (const char* id : {"ci-0003", "db-0004", "svc-pay-02", "nlb-crm-dev", "bucket-0002"}) {
    const ResourceNode* n = seeded_pipeline().snapshot()->graph.find_node(id);
    gold.push_back({n->name, {id}, "literal", std::nullopt});
  }
  const ComparisonReport r = run_comparison(seeded_pipeline(), gold, [] { return 0.0; });
  for (const auto& q : r.queries) {
    EXPECT_EQ(q.ontology.metrics.f1, 1.0) << q.gold.query << " " << q.ontology.note;
    EXPECT_EQ(q.keyword.metrics.f1, 1.0) << q.gold.query;
  }
}

TEST(Comparison, UnknownGoldIdRejected) {
  std::vector<GoldQuery> gold = {{"hosts", {"no-such-node"}, "x", std::nullopt}};
  EXPECT_THROW(run_comparison(seeded_pipeline(), gold), InvalidConfig);
}

TEST(Comparison, ReportRendersEverySystem) {
  const std::string text = render_report(seeded_report());
  EXPECT_NE(text.find("Ontology-Driven NLP Search"), std::string::npos);
  EXPECT_NE(text.find("Keyword Search"), std::string::npos);
  const auto j = nlohmann::json::parse(report_json(seeded_report()));
  EXPECT_EQ(j.at("queries").size(), 10u);
}
