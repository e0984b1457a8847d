#include <gtest/gtest.h>

#include <set>

#include "ontoq/errors.hpp"
#include "ontoq/executor.hpp"
#include "ontoq/ir_text.hpp"
#include "test_support.hpp"

namespace ontoq {
namespace {

ResourceNode make(std::string id, std::string kind, std::string name = "", std::string description = "") {
  ResourceNode n;
  n.id = id;
  n.kind = std::move(kind);
  n.name = name.empty() ? id : std::move(name);
  n.description = std::move(description);
  return n;
}

KnowledgeGraph worked_example_graph() {
  KnowledgeGraph g;
  for (const char* id : {"ins-cloud-host-1427", "Ins-cloud-host-2109", "ins-cloud-host-3311", "ins-cloud-host-4502"})
    g.upsert_node(make(id, "ComputeInstance"));
  g.upsert_node(make("env-production", "Environment", "Production"));
  g.upsert_node(make("env-development", "Environment", "Development"));
  g.upsert_node(make("vuln-ssh", "Vulnerability", "open-ssh", "Open SSH Port"));
  g.upsert_node(make("vuln-patch", "Vulnerability", "unpatched", "Unpatched software"));
  g.upsert_node(make("vuln-tls", "Vulnerability", "expired-tls", "Expired TLS certificate"));
  g.add_edge({"ins-cloud-host-1427", "env-production", "DEPLOYED_IN", {}});
  g.add_edge({"Ins-cloud-host-2109", "env-production", "DEPLOYED_IN", {}});
  g.add_edge({"ins-cloud-host-3311", "env-production", "DEPLOYED_IN", {}});
  g.add_edge({"ins-cloud-host-4502", "env-development", "DEPLOYED_IN", {}});
  g.add_edge({"ins-cloud-host-1427", "vuln-ssh", "HAS_VULNERABILITY", {}});
  g.add_edge({"Ins-cloud-host-2109", "vuln-patch", "HAS_VULNERABILITY", {}});
  g.add_edge({"ins-cloud-host-4502", "vuln-tls", "HAS_VULNERABILITY", {}});
  return g;
}

constexpr const char* kWorkedExample =
    "MATCH (ci:ComputeInstance)-[:DEPLOYED_IN]->(:Environment {name:\"Production\"})\n"
    "MATCH (ci)-[:HAS_VULNERABILITY]->(v:Vulnerability)\n"
    "RETURN ci.name, v.description";

std::vector<std::vector<std::string>> projected(const KnowledgeGraph& g, const GraphQueryIR& ir,
                                                const std::vector<Binding>& rows) {
  std::vector<std::vector<std::string>> out;
  for (const auto& b : rows) {
    std::vector<std::string> r;
    for (const auto& item : ir.returns) {
      auto v = project(g, ir, b, item);
      r.push_back(v ? to_display(*v) : "");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::set<Binding> as_set(const std::vector<Binding>& v) { return {v.begin(), v.end()}; }

TEST(Executor, WorkedExampleYieldsTwoRows) {
  const KnowledgeGraph g = worked_example_graph();
  const GraphQueryIR ir = parse_ir_text(kWorkedExample);
  const auto rows = execute(g, ir);
  const std::vector<std::vector<std::string>> expected = {{"Ins-cloud-host-2109", "Unpatched software"},
                                                          {"ins-cloud-host-1427", "Open SSH Port"}};
  EXPECT_EQ(projected(g, ir, rows), expected);  // id-tuple order: 'I' < 'i'
  EXPECT_EQ(brute_force_execute(g, ir), rows);
}

TEST(Executor, EmptyGraphYieldsNothing) {
  const KnowledgeGraph g;
  EXPECT_TRUE(execute(g, parse_ir_text(kWorkedExample)).empty());
  EXPECT_TRUE(execute(g, parse_ir_text("MATCH (n) RETURN n")).empty());
}

TEST(Executor, SingleVarLabelFilter) {
  KnowledgeGraph g;
  g.upsert_node(make("a", "NLB"));
  g.upsert_node(make("b", "VCN"));
  g.upsert_node(make("c", "NLB"));
  const GraphQueryIR ir = parse_ir_text("MATCH (n:NLB) RETURN n");
  const std::vector<Binding> expected = {{{"a"}}, {{"c"}}};
  EXPECT_EQ(brute_force_execute(g, ir), expected);
  EXPECT_EQ(execute(g, ir), expected);
}

TEST(Executor, UnknownTaxonomyEntriesRejected) {
  const KnowledgeGraph g = worked_example_graph();
  EXPECT_THROW(execute(g, parse_ir_text("MATCH (n:Flooble) RETURN n")), UnknownLabel);
  EXPECT_THROW(execute(g, parse_ir_text("MATCH (a)-[:FLOWS_TO]->(b) RETURN a")), UnknownRelType);
}

TEST(Executor, BruteForceSizeCap) {
  const KnowledgeGraph g = worked_example_graph();
  const GraphQueryIR ir = parse_ir_text("MATCH (a), (b), (c) RETURN a");
  EXPECT_THROW(brute_force_execute(g, ir, 100), SizeCapExceeded);
  EXPECT_NO_THROW(brute_force_execute(g, ir, 1000));
}

TEST(Executor, OrderByMissingValuesLastAndLimitPrefix) {
  KnowledgeGraph g;
  auto a = make("a", "Database");
  a.properties["cost"] = 5.0;
  auto b = make("b", "Database");
  b.properties["cost"] = 9.0;
  auto c = make("c", "Database");
  auto d = make("d", "Database");
  d.properties["cost"] = 9.0;
  for (auto& n : {a, b, c, d}) g.upsert_node(n);
  const auto rows = execute(g, parse_ir_text("MATCH (x:Database) RETURN x ORDER BY x.cost DESC"));
  const std::vector<Binding> expected = {{{"b"}}, {{"d"}}, {{"a"}}, {{"c"}}};
  EXPECT_EQ(rows, expected);
  const auto top2 = execute(g, parse_ir_text("MATCH (x:Database) RETURN x ORDER BY x.cost DESC LIMIT 2"));
  EXPECT_EQ(top2, std::vector<Binding>(expected.begin(), expected.begin() + 2));
  const auto asc = execute(g, parse_ir_text("MATCH (x:Database) RETURN x ORDER BY x.cost"));
  const std::vector<Binding> asc_expected = {{{"a"}}, {{"b"}}, {{"d"}}, {{"c"}}};
  EXPECT_EQ(asc, asc_expected);
}

TEST(Executor, CrossTypeComparisonIsFalse) {
  KnowledgeGraph g;
  auto a = make("a", "Database");
  a.properties["size"] = std::string("5");
  g.upsert_node(a);
  EXPECT_TRUE(execute(g, parse_ir_text("MATCH (x) WHERE x.size = 5 RETURN x")).empty());
  EXPECT_TRUE(execute(g, parse_ir_text("MATCH (x) WHERE x.size <> 5 RETURN x")).empty());
  EXPECT_EQ(execute(g, parse_ir_text("MATCH (x) WHERE x.size = \"5\" RETURN x")).size(), 1u);
}

TEST(Executor, TimeWindowInclusive) {
  KnowledgeGraph g;
  for (int i = 0; i < 5; ++i) {
    auto n = make("n" + std::to_string(i), "ComputeInstance");
    n.created_at = Timestamp{i * 10};
    g.upsert_node(n);
  }
  const auto rows = execute(g, parse_ir_text("MATCH (x) WHERE x.created_at BETWEEN timestamp(10) AND timestamp(30) RETURN x"));
  const std::vector<Binding> expected = {{{"n1"}}, {{"n2"}}, {{"n3"}}};
  EXPECT_EQ(rows, expected);
}

TEST(ExecutorProperty, MatchesBruteForceOracle) {
  testing::Gen gen(20240501);
  std::size_t non_empty = 0;
  for (int i = 0; i < 500; ++i) {
    const KnowledgeGraph g = testing::random_graph(gen);
    const GraphQueryIR ir = testing::random_ir(gen, false);
    const auto fast = execute(g, ir);
    const auto slow = brute_force_execute(g, ir);
    ASSERT_EQ(as_set(fast), as_set(slow)) << "case " << i << "\n" << print_ir(ir);
    ASSERT_EQ(fast.size(), slow.size());
    if (!fast.empty()) ++non_empty;
  }
  EXPECT_GT(non_empty, 100u);  // the generator must exercise real matches
}

TEST(ExecutorProperty, OrderedOutputMatchesOracleExactly) {
  testing::Gen gen(77);
  for (int i = 0; i < 200; ++i) {
    const KnowledgeGraph g = testing::random_graph(gen, 15, 30);
    const GraphQueryIR ir = testing::random_ir(gen, true);
    ASSERT_EQ(execute(g, ir), brute_force_execute(g, ir)) << print_ir(ir);
  }
}

TEST(ExecutorProperty, AddingPredicateNeverEnlarges) {
  testing::Gen gen(31);
  for (int i = 0; i < 200; ++i) {
    const KnowledgeGraph g = testing::random_graph(gen);
    GraphQueryIR ir = testing::random_ir(gen, false);
    const auto base = as_set(execute(g, ir));
    ir.predicates.push_back(Exists{{ir.node_patterns[0].var, gen.pick(testing::random_keys())}});
    const auto narrowed = as_set(execute(g, ir));
    for (const auto& b : narrowed) ASSERT_TRUE(base.count(b));
  }
}

TEST(ExecutorProperty, LimitIsPrefixAndRunsAreDeterministic) {
  testing::Gen gen(99);
  for (int i = 0; i < 200; ++i) {
    const KnowledgeGraph g = testing::random_graph(gen);
    GraphQueryIR ir = testing::random_ir(gen, true);
    ir.limit.reset();
    const auto full = execute(g, ir);
    ASSERT_EQ(full, execute(g, ir));
    const std::size_t k = 1 + gen.below(6);
    ir.limit = k;
    const auto limited = execute(g, ir);
    ASSERT_EQ(limited.size(), std::min(k, full.size()));
    ASSERT_TRUE(std::equal(limited.begin(), limited.end(), full.begin()));
  }
}

}  // namespace
}  // namespace ontoq
