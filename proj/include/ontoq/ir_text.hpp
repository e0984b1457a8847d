#pragma once

// Textual form of the query IR, a small Cypher-flavoured grammar:
//
//   query    := match+ [WHERE cond (AND cond)*] RETURN item (',' item)*
//               [ORDER BY ref [ASC|DESC]] [LIMIT int] [';']
//   match    := MATCH pattern (',' pattern)*
//   pattern  := node (rel node)*
//   node     := '(' [var] [':' Label] ['{' key ':' literal (',' ...)* '}'] ')'
//   rel      := '-[:REL]->' | '<-[:REL]-' | '-[:REL]-'
//   cond     := ref op literal | ref IS NOT NULL
//             | ref BETWEEN timestamp(s) AND timestamp(e)
//   op       := '=' | '<>' | '!=' | '<' | '<=' | '>' | '>='
//   ref      := var '.' key          key := name ('.' name)*
//   literal  := "text" | 'text' | number | true | false | timestamp(int)
//
// Keywords are case-insensitive; whitespace is insignificant. Names that are
// not plain identifiers (or collide with keywords) are written in backticks.
// Anonymous node patterns receive generated variables `_anon1`, `_anon2`, ...

#include <string>
#include <string_view>

#include "ontoq/query_ir.hpp"

namespace ontoq {

/// Throws ParseError with line/column and the expected-token set.
GraphQueryIR parse_ir_text(std::string_view text);

/// Canonical text: one MATCH declaring every node pattern, one MATCH per
/// edge pattern, then WHERE / RETURN / ORDER BY / LIMIT on separate lines.
std::string print_ir(const GraphQueryIR& ir);

std::string print_literal(const PropertyValue& value);

}  // namespace ontoq
