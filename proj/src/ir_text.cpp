#include "ontoq/ir_text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "ontoq/errors.hpp"

namespace ontoq {

namespace {

enum class Tok { Ident, Quoted, String, Number, Punct, End };

struct Token {
  Tok type;
  std::string text;
  std::size_t line;
  std::size_t column;
};

const std::set<std::string> kKeywords = {"MATCH", "WHERE", "AND", "RETURN", "ORDER", "BY",    "ASC",
                                         "DESC",  "LIMIT", "IS",  "NOT",    "NULL",  "BETWEEN", "TRUE",
                                         "FALSE", "TIMESTAMP"};

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

void append_utf8(std::string& out, unsigned cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

std::string describe(const Token& t) {
  switch (t.type) {
    case Tok::End: return "end of input";
    case Tok::String: return "string \"" + t.text + "\"";
    case Tok::Number: return "number " + t.text;
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", line_, col_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  [[noreturn]] void fail(std::size_t line, std::size_t col, std::vector<std::string> expected, std::string found) {
    throw ParseError(line, col, std::move(expected), std::move(found));
  }

  char peek(std::size_t ahead = 0) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  Token next() {
    const std::size_t line = line_, col = col_;
    char c = peek();
    if (is_ident_start(c)) {
      std::string s;
      while (is_ident_char(peek())) s += advance();
      return {Tok::Ident, s, line, col};
    }
    if (c == '`') {
      advance();
      std::string s;
      while (pos_ < src_.size() && peek() != '`') s += advance();
      if (pos_ >= src_.size()) fail(line, col, {"closing '`'"}, "end of input");
      advance();
      if (s.empty()) fail(line, col, {"name"}, "empty quoted name");
      return {Tok::Quoted, s, line, col};
    }
    if (c == '"' || c == '\'') return string_literal(line, col);
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string s;
      while (std::isdigit(static_cast<unsigned char>(peek()))) s += advance();
      if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        s += advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) s += advance();
      }
      if ((peek() == 'e' || peek() == 'E') &&
          (std::isdigit(static_cast<unsigned char>(peek(1))) ||
           ((peek(1) == '+' || peek(1) == '-') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
        s += advance();
        if (peek() == '+' || peek() == '-') s += advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) s += advance();
      }
      return {Tok::Number, s, line, col};
    }
    for (const char* two : {"<=", ">=", "<>", "!="}) {
      if (c == two[0] && peek(1) == two[1]) {
        advance();
        advance();
        return {Tok::Punct, two, line, col};
      }
    }
    if (std::string_view("()[]{}:,.-<>=;").find(c) != std::string_view::npos) {
      advance();
      return {Tok::Punct, std::string(1, c), line, col};
    }
    fail(line, col, {"token"}, std::string("character '") + c + "'");
  }

  Token string_literal(std::size_t line, std::size_t col) {
    const char quote = advance();
    std::string s;
    for (;;) {
      if (pos_ >= src_.size()) fail(line, col, {"closing quote"}, "end of input");
      char c = advance();
      if (c == quote) break;
      if (c != '\\') {
        s += c;
        continue;
      }
      if (pos_ >= src_.size()) fail(line_, col_, {"escape sequence"}, "end of input");
      char e = advance();
      switch (e) {
        case 'n': s += '\n'; break;
        case 't': s += '\t'; break;
        case 'r': s += '\r'; break;
        case 'u': {
          unsigned cp = 0;
          for (int i = 0; i < 4; ++i) {
            char h = peek();
            if (!std::isxdigit(static_cast<unsigned char>(h))) fail(line_, col_, {"hex digit"}, std::string(1, h));
            advance();
            cp = cp * 16 + static_cast<unsigned>(std::isdigit(static_cast<unsigned char>(h)) ? h - '0'
                                                                                              : (std::tolower(h) - 'a' + 10));
          }
          append_utf8(s, cp);
          break;
        }
        default: s += e;
      }
    }
    return {Tok::String, s, line, col};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

constexpr char kAnonPrefix = '\x01';

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  GraphQueryIR run() {
    expect_keyword("MATCH");
    match_body();
    while (at_keyword("MATCH")) {
      ++pos_;
      match_body();
    }
    if (at_keyword("WHERE")) {
      ++pos_;
      condition();
      while (at_keyword("AND")) {
        ++pos_;
        condition();
      }
    }
    expect_keyword("RETURN");
    return_item();
    while (at_punct(",")) {
      ++pos_;
      return_item();
    }
    if (at_keyword("ORDER")) {
      ++pos_;
      expect_keyword("BY");
      OrderBy ob;
      ob.ref = property_ref();
      if (at_keyword("DESC")) {
        ob.descending = true;
        ++pos_;
      } else if (at_keyword("ASC")) {
        ++pos_;
      }
      ir_.order_by = ob;
    }
    if (at_keyword("LIMIT")) {
      ++pos_;
      const Token& t = cur();
      std::size_t n = 0;
      auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), n);
      if (t.type != Tok::Number || res.ec != std::errc() || res.ptr != t.text.data() + t.text.size() || n == 0) {
        fail({"positive integer"});
      }
      ir_.limit = n;
      ++pos_;
    }
    if (at_punct(";")) ++pos_;
    if (cur().type != Tok::End) {
      std::vector<std::string> exp;
      if (!ir_.order_by) exp.push_back("ORDER BY");
      if (!ir_.limit) exp.push_back("LIMIT");
      exp.push_back("end of input");
      fail(exp);
    }
    name_anonymous();
    return std::move(ir_);
  }

 private:
  const Token& cur() const { return toks_[pos_]; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    throw ParseError(cur().line, cur().column, std::move(expected), describe(cur()));
  }

  bool at_keyword(const char* kw) const { return cur().type == Tok::Ident && upper(cur().text) == kw; }
  bool at_punct(const char* p) const { return cur().type == Tok::Punct && cur().text == p; }

  void expect_keyword(const char* kw) {
    if (!at_keyword(kw)) fail({kw});
    ++pos_;
  }

  void expect_punct(const char* p) {
    if (!at_punct(p)) fail({std::string("'") + p + "'"});
    ++pos_;
  }

  std::string name(const char* what) {
    const Token& t = cur();
    if (t.type == Tok::Quoted || (t.type == Tok::Ident && !kKeywords.count(upper(t.text)))) {
      ++pos_;
      return t.text;
    }
    fail({what});
  }

  std::string dotted_name(const char* what) {
    std::string s = name(what);
    while (at_punct(".")) {
      ++pos_;
      s += "." + name(what);
    }
    return s;
  }

  void match_body() {
    pattern();
    while (at_punct(",")) {
      ++pos_;
      pattern();
    }
  }

  void pattern() {
    std::string left = node();
    for (;;) {
      Direction dir;
      std::string rel;
      if (at_punct("<")) {
        ++pos_;
        expect_punct("-");
        rel = rel_body();
        expect_punct("-");
        dir = Direction::Backward;
      } else if (at_punct("-")) {
        ++pos_;
        rel = rel_body();
        expect_punct("-");
        if (at_punct(">")) {
          ++pos_;
          dir = Direction::Forward;
        } else {
          dir = Direction::Either;
        }
      } else {
        return;
      }
      std::string right = node();
      ir_.edge_patterns.push_back({left, right, rel, dir});
      left = right;
    }
  }

  std::string rel_body() {
    expect_punct("[");
    expect_punct(":");
    std::string rel = name("relationship type");
    expect_punct("]");
    return rel;
  }

  std::string node() {
    expect_punct("(");
    const Token start = cur();
    std::string var;
    if (cur().type == Tok::Quoted || (cur().type == Tok::Ident && !kKeywords.count(upper(cur().text)))) {
      var = cur().text;
      ++pos_;
    }
    std::optional<std::string> label;
    if (at_punct(":")) {
      ++pos_;
      label = name("label");
    }
    PropertyMap props;
    if (at_punct("{")) {
      ++pos_;
      if (!at_punct("}")) {
        for (;;) {
          std::string key = dotted_name("property key");
          expect_punct(":");
          PropertyValue v = literal();
          if (props.count(key)) fail({"distinct property key"});
          props.emplace(std::move(key), std::move(v));
          if (at_punct(",")) {
            ++pos_;
            continue;
          }
          break;
        }
      }
      if (!at_punct("}")) fail({"','", "'}'"});
      ++pos_;
    }
    if (!at_punct(")")) {
      std::vector<std::string> exp;
      if (!label && props.empty()) exp.push_back("':'");
      if (props.empty()) exp.push_back("'{'");
      exp.push_back("')'");
      fail(exp);
    }
    ++pos_;

    if (var.empty()) {
      var = std::string(1, kAnonPrefix) + std::to_string(++anon_count_);
      ir_.node_patterns.push_back({var, label, std::move(props)});
      return var;
    }
    if (auto idx = ir_.var_index(var)) {
      NodePattern& existing = ir_.node_patterns[*idx];
      if (label) {
        if (existing.label && existing.label != label) {
          throw ParseError(start.line, start.column, {"label " + *existing.label}, "conflicting label " + *label);
        }
        existing.label = label;
      }
      for (auto& [k, v] : props) {
        auto [it, inserted] = existing.prop_equals.emplace(k, v);
        if (!inserted && it->second != v) {
          throw ParseError(start.line, start.column, {"consistent value for " + k}, "conflicting value");
        }
      }
      return var;
    }
    ir_.node_patterns.push_back({var, label, std::move(props)});
    return var;
  }

  PropertyValue literal() {
    const Token& t = cur();
    if (t.type == Tok::String) {
      ++pos_;
      return t.text;
    }
    bool negative = false;
    if (at_punct("-")) {
      negative = true;
      ++pos_;
    }
    if (cur().type == Tok::Number) {
      double d = 0;
      const std::string& s = cur().text;
      auto res = std::from_chars(s.data(), s.data() + s.size(), d);
      if (res.ec != std::errc()) fail({"finite number"});
      ++pos_;
      return negative ? -d : d;
    }
    if (negative) fail({"number"});
    if (at_keyword("TRUE") || at_keyword("FALSE")) {
      bool b = at_keyword("TRUE");
      ++pos_;
      return b;
    }
    if (at_keyword("TIMESTAMP")) return Timestamp{timestamp_body()};
    fail({"string", "number", "true", "false", "timestamp(...)"});
  }

  std::int64_t timestamp_body() {
    expect_keyword("TIMESTAMP");
    expect_punct("(");
    const Token& t = cur();
    std::int64_t v = 0;
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (t.type != Tok::Number || res.ec != std::errc() || res.ptr != t.text.data() + t.text.size()) {
      fail({"non-negative integer"});
    }
    ++pos_;
    expect_punct(")");
    return v;
  }

  std::string declared_var() {
    const Token t = cur();
    std::string v = name("variable");
    if (!ir_.var_index(v)) throw ParseError(t.line, t.column, {"declared variable"}, "undeclared variable " + v);
    return v;
  }

  PropertyRef property_ref() {
    PropertyRef r;
    r.var = declared_var();
    expect_punct(".");
    r.property = dotted_name("property name");
    return r;
  }

  void condition() {
    PropertyRef ref = property_ref();
    if (at_keyword("IS")) {
      ++pos_;
      expect_keyword("NOT");
      expect_keyword("NULL");
      ir_.predicates.push_back(Exists{ref});
      return;
    }
    if (at_keyword("BETWEEN")) {
      ++pos_;
      const Token at = cur();
      std::int64_t start = timestamp_body();
      expect_keyword("AND");
      std::int64_t end = timestamp_body();
      if (start > end) throw ParseError(at.line, at.column, {"start <= end"}, "inverted time window");
      ir_.predicates.push_back(TimeWindow{ref, Timestamp{start}, Timestamp{end}});
      return;
    }
    static const std::map<std::string, CompareOp> ops = {{"=", CompareOp::Eq},  {"<>", CompareOp::Ne},
                                                          {"!=", CompareOp::Ne}, {"<", CompareOp::Lt},
                                                          {"<=", CompareOp::Le}, {">", CompareOp::Gt},
                                                          {">=", CompareOp::Ge}};
    auto it = cur().type == Tok::Punct ? ops.find(cur().text) : ops.end();
    if (it == ops.end()) fail({"comparison operator", "IS NOT NULL", "BETWEEN"});
    ++pos_;
    ir_.predicates.push_back(Compare{ref, it->second, literal()});
  }

  void return_item() {
    ReturnItem item;
    item.var = declared_var();
    if (at_punct(".")) {
      ++pos_;
      item.property = dotted_name("property name");
    }
    ir_.returns.push_back(std::move(item));
  }

  void name_anonymous() {
    if (anon_count_ == 0) return;
    std::set<std::string> taken;
    for (const auto& np : ir_.node_patterns) taken.insert(np.var);
    std::map<std::string, std::string> rename;
    int next = 0;
    for (auto& np : ir_.node_patterns) {
      if (np.var.empty() || np.var[0] != kAnonPrefix) continue;
      std::string fresh;
      do {
        fresh = "_anon" + std::to_string(++next);
      } while (taken.count(fresh));
      taken.insert(fresh);
      rename[np.var] = fresh;
      np.var = fresh;
    }
    for (auto& ep : ir_.edge_patterns) {
      if (auto it = rename.find(ep.src_var); it != rename.end()) ep.src_var = it->second;
      if (auto it = rename.find(ep.dst_var); it != rename.end()) ep.dst_var = it->second;
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int anon_count_ = 0;
  GraphQueryIR ir_;
};

std::string print_name(const std::string& s) {
  bool plain = !s.empty() && is_ident_start(s[0]) && std::all_of(s.begin(), s.end(), is_ident_char) &&
               !kKeywords.count(upper(s));
  return plain ? s : "`" + s + "`";
}

std::string print_dotted(const std::string& s) {
  std::string out;
  std::size_t start = 0;
  for (;;) {
    std::size_t dot = s.find('.', start);
    std::string part = s.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) return print_name(s);  // not representable as a dotted path
    out += print_name(part);
    if (dot == std::string::npos) return out;
    out += ".";
    start = dot + 1;
  }
}

std::string print_ref(const PropertyRef& r) { return print_name(r.var) + "." + print_dotted(r.property); }

}  // namespace

GraphQueryIR parse_ir_text(std::string_view text) { return Parser(Lexer(text).run()).run(); }

std::string print_literal(const PropertyValue& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          std::string out = "\"";
          for (char c : v) {
            switch (c) {
              case '"': out += "\\\""; break;
              case '\\': out += "\\\\"; break;
              case '\n': out += "\\n"; break;
              case '\t': out += "\\t"; break;
              case '\r': out += "\\r"; break;
              default:
                if (static_cast<unsigned char>(c) < 0x20) {
                  char buf[8];
                  std::snprintf(buf, sizeof(buf), "\\u%04x", static_cast<unsigned>(c));
                  out += buf;
                } else {
                  out += c;
                }
            }
          }
          return out + "\"";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_number(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return "timestamp(" + std::to_string(v.seconds) + ")";
        }
      },
      value);
}

std::string print_ir(const GraphQueryIR& ir) {
  std::string out = "MATCH ";
  for (std::size_t i = 0; i < ir.node_patterns.size(); ++i) {
    const auto& np = ir.node_patterns[i];
    if (i > 0) out += ", ";
    out += "(" + print_name(np.var);
    if (np.label) out += ":" + print_name(*np.label);
    if (!np.prop_equals.empty()) {
      out += " {";
      bool first = true;
      for (const auto& [k, v] : np.prop_equals) {
        if (!first) out += ", ";
        first = false;
        out += print_dotted(k) + ": " + print_literal(v);
      }
      out += "}";
    }
    out += ")";
  }
  for (const auto& ep : ir.edge_patterns) {
    out += "\nMATCH (" + print_name(ep.src_var) + ")";
    const std::string rel = "[:" + print_name(ep.rel_type) + "]";
    switch (ep.direction) {
      case Direction::Forward: out += "-" + rel + "->"; break;
      case Direction::Backward: out += "<-" + rel + "-"; break;
      case Direction::Either: out += "-" + rel + "-"; break;
    }
    out += "(" + print_name(ep.dst_var) + ")";
  }
  for (std::size_t i = 0; i < ir.predicates.size(); ++i) {
    out += i == 0 ? "\nWHERE " : " AND ";
    const auto& p = ir.predicates[i];
    if (const auto* c = std::get_if<Compare>(&p)) {
      out += print_ref(c->ref) + " " + to_string(c->op) + " " + print_literal(c->value);
    } else if (const auto* t = std::get_if<TimeWindow>(&p)) {
      out += print_ref(t->ref) + " BETWEEN " + print_literal(t->start) + " AND " + print_literal(t->end);
    } else {
      out += print_ref(std::get<Exists>(p).ref) + " IS NOT NULL";
    }
  }
  out += "\nRETURN ";
  for (std::size_t i = 0; i < ir.returns.size(); ++i) {
    if (i > 0) out += ", ";
    out += print_name(ir.returns[i].var);
    if (ir.returns[i].property) out += "." + print_dotted(*ir.returns[i].property);
  }
  if (ir.order_by) out += "\nORDER BY " + print_ref(ir.order_by->ref) + (ir.order_by->descending ? " DESC" : " ASC");
  if (ir.limit) out += "\nLIMIT " + std::to_string(*ir.limit);
  return out;
}

}  // namespace ontoq
