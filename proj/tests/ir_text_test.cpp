#include <gtest/gtest.h>

#include "ontoq/errors.hpp"
#include "ontoq/ir_text.hpp"
#include "test_support.hpp"

namespace ontoq {
namespace {

constexpr const char* kWorkedExample =
    "MATCH (ci:ComputeInstance)-[:DEPLOYED_IN]->(:Environment {name:\"Production\"})\n"
    "MATCH (ci)-[:HAS_VULNERABILITY]->(v:Vulnerability)\n"
    "RETURN ci.name, v.description";

TEST(IrText, ParsesWorkedExample) {
  const GraphQueryIR ir = parse_ir_text(kWorkedExample);
  ASSERT_EQ(ir.node_patterns.size(), 3u);
  ASSERT_EQ(ir.edge_patterns.size(), 2u);
  ASSERT_EQ(ir.returns.size(), 2u);
  EXPECT_EQ(ir.node_patterns[0].var, "ci");
  EXPECT_EQ(ir.node_patterns[0].label, "ComputeInstance");
  EXPECT_EQ(ir.node_patterns[1].label, "Environment");
  EXPECT_EQ(std::get<std::string>(ir.node_patterns[1].prop_equals.at("name")), "Production");
  EXPECT_EQ(ir.edge_patterns[0].rel_type, "DEPLOYED_IN");
  EXPECT_EQ(ir.edge_patterns[0].direction, Direction::Forward);
  EXPECT_EQ(ir.edge_patterns[1].src_var, "ci");
  EXPECT_EQ(ir.edge_patterns[1].dst_var, "v");
  EXPECT_EQ(ir.returns[1], (ReturnItem{"v", std::string("description")}));
}

TEST(IrText, WorkedExampleRoundTrips) {
  const GraphQueryIR ir = parse_ir_text(kWorkedExample);
  EXPECT_EQ(parse_ir_text(print_ir(ir)), ir);
}

TEST(IrText, MinimalQuery) {
  const GraphQueryIR ir = parse_ir_text("MATCH (n) RETURN n");
  ASSERT_EQ(ir.node_patterns.size(), 1u);
  EXPECT_FALSE(ir.node_patterns[0].label.has_value());
  ASSERT_EQ(ir.returns.size(), 1u);
  EXPECT_FALSE(ir.returns[0].property.has_value());
}

TEST(IrText, UnclosedPatternIsParseError) {
  try {
    parse_ir_text("MATCH (a:X RETURN a");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_EQ(e.column(), 12u);
    EXPECT_EQ(e.found(), "'RETURN'");
    EXPECT_NE(std::find(e.expected().begin(), e.expected().end(), "')'"), e.expected().end());
  }
}

TEST(IrText, ReportsLineOfError) {
  try {
    parse_ir_text("MATCH (a)\nRETURN a.x\nLIMIT zero");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 7u);
  }
}

TEST(IrText, KeywordsCaseInsensitiveAndWhitespaceFree) {
  const GraphQueryIR a = parse_ir_text("match (n:NLB) where n.cost >= 5 return n.name order by n.cost desc limit 3");
  const GraphQueryIR b = parse_ir_text("MATCH(n:NLB)WHERE n.cost>=5 RETURN n.name ORDER BY n.cost DESC LIMIT 3");
  EXPECT_EQ(a, b);
  ASSERT_TRUE(a.order_by.has_value());
  EXPECT_TRUE(a.order_by->descending);
  EXPECT_EQ(a.limit, 3u);
}

TEST(IrText, PredicateForms) {
  const GraphQueryIR ir = parse_ir_text(
      "MATCH (a:Service)<-[:SUBJECT_TO]-(b), (a)-[:DEPENDS_ON]-(c)\n"
      "WHERE a.cost IS NOT NULL AND a.created_at BETWEEN timestamp(10) AND timestamp(20) AND a.tier <> 'x'\n"
      "RETURN a");
  ASSERT_EQ(ir.predicates.size(), 3u);
  EXPECT_TRUE(std::holds_alternative<Exists>(ir.predicates[0]));
  EXPECT_EQ(std::get<TimeWindow>(ir.predicates[1]).end.seconds, 20);
  EXPECT_EQ(std::get<Compare>(ir.predicates[2]).op, CompareOp::Ne);
  EXPECT_EQ(ir.edge_patterns[0].direction, Direction::Backward);
  EXPECT_EQ(ir.edge_patterns[1].direction, Direction::Either);
}

TEST(IrText, NoPredicatesMeansNoWhere) {
  const std::string text = print_ir(parse_ir_text("MATCH (n:VCN) RETURN n.name"));
  EXPECT_EQ(text.find("WHERE"), std::string::npos);
}

TEST(IrText, BacktickedNamesAndDottedKeys) {
  const GraphQueryIR ir = parse_ir_text("MATCH (`match`:Subnet {network.cidr: \"10.0.0.0/24\"}) RETURN `match`.network.cidr");
  EXPECT_EQ(ir.node_patterns[0].var, "match");
  EXPECT_TRUE(ir.node_patterns[0].prop_equals.count("network.cidr"));
  EXPECT_EQ(parse_ir_text(print_ir(ir)), ir);
}

TEST(IrText, UndeclaredVariableRejected) {
  EXPECT_THROW(parse_ir_text("MATCH (a) RETURN b"), ParseError);
  EXPECT_THROW(parse_ir_text("MATCH (a:NLB), (a:VCN) RETURN a"), ParseError);
}

TEST(IrText, RandomRoundTrip) {
  testing::Gen gen(1001);
  for (int i = 0; i < 1000; ++i) {
    const GraphQueryIR ir = testing::random_ir(gen);
    const std::string text = print_ir(ir);
    GraphQueryIR back;
    ASSERT_NO_THROW(back = parse_ir_text(text)) << text;
    ASSERT_EQ(back, ir) << text;
  }
}

TEST(IrEquivalence, RenamedVariablesAreEquivalent) {
  const GraphQueryIR a = parse_ir_text(kWorkedExample);
  const GraphQueryIR b = parse_ir_text(
      "MATCH (x:Vulnerability), (e:Environment {name:\"Production\"}), (h:ComputeInstance)\n"
      "MATCH (h)-[:HAS_VULNERABILITY]->(x)\n"
      "MATCH (e)<-[:DEPLOYED_IN]-(h)\n"
      "RETURN h.name, x.description");
  EXPECT_TRUE(equivalent_modulo_vars(a, b));
  const GraphQueryIR c = parse_ir_text(
      "MATCH (h:ComputeInstance)-[:DEPLOYED_IN]->(e:Environment {name:\"Staging\"})\n"
      "MATCH (h)-[:HAS_VULNERABILITY]->(x:Vulnerability)\n"
      "RETURN h.name, x.description");
  EXPECT_FALSE(equivalent_modulo_vars(a, c));
}

}  // namespace
}  // namespace ontoq
