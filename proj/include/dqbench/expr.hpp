#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dqbench/core.hpp"

namespace dqbench::expr {

// Tokenizer shared by formulas and predicates. Identifiers may contain dots
// ("Project.Type", "dev.eff.hrs"); arbitrary names go in backquotes.
// Keywords (and/or/not/is/missing) are case-insensitive.

enum class TokenKind { number, identifier, string, op, end };

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;
  double number = 0.0;
  std::size_t pos = 0;
};

namespace detail {

inline bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool ident_char(char c) {
  return ident_start(c) || (c >= '0' && c <= '9') || c == '.';
}

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto fail = [&](const std::string& what) {
    throw ParseError("expression error at position " + std::to_string(i) + ": " + what);
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
      continue;
    }
    Token t;
    t.pos = i;
    if ((c >= '0' && c <= '9') || (c == '.' && i + 1 < src.size() &&
                                   src[i + 1] >= '0' && src[i + 1] <= '9')) {
      std::size_t j = i;
      while (j < src.size() && ((src[j] >= '0' && src[j] <= '9') || src[j] == '.'))
        ++j;
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && src[k] >= '0' && src[k] <= '9') {
          while (k < src.size() && src[k] >= '0' && src[k] <= '9') ++k;
          j = k;
        }
      }
      auto parsed = parse_number(src.substr(i, j - i));
      if (!parsed) fail("malformed number");
      t.kind = TokenKind::number;
      t.number = *parsed;
      t.text = std::string(src.substr(i, j - i));
      i = j;
    } else if (c == '`') {
      std::size_t j = src.find('`', i + 1);
      if (j == std::string_view::npos) fail("unterminated backquoted name");
      t.kind = TokenKind::identifier;
      t.text = std::string(src.substr(i + 1, j - i - 1));
      i = j + 1;
    } else if (c == '\'' || c == '"') {
      std::size_t j = src.find(c, i + 1);
      if (j == std::string_view::npos) fail("unterminated string literal");
      t.kind = TokenKind::string;
      t.text = std::string(src.substr(i + 1, j - i - 1));
      i = j + 1;
    } else if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.kind = TokenKind::identifier;
      t.text = std::string(src.substr(i, j - i));
      i = j;
    } else if (c == '<' || c == '>' || c == '!' || c == '=') {
      std::size_t j = i + 1;
      if (j < src.size() && (src[j] == '=' || (c == '<' && src[j] == '>'))) ++j;
      t.kind = TokenKind::op;
      t.text = std::string(src.substr(i, j - i));
      i = j;
      if (t.text == "!") fail("expected '!=' after '!'");
    } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '(' || c == ')') {
      t.kind = TokenKind::op;
      t.text = std::string(1, c);
      ++i;
    } else {
      fail(std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }
  out.push_back(Token{});
  return out;
}

struct Value {
  enum class Kind { missing, number, text } kind = Kind::missing;
  double number = 0.0;
  std::string text;
};

inline Value value_of(const Cell& cell) {
  Value v;
  if (is_missing(cell)) return v;
  if (is_number(cell)) {
    v.kind = Value::Kind::number;
    v.number = as_number(cell);
  } else {
    v.kind = Value::Kind::text;
    v.text = cell_token(cell);
  }
  return v;
}

}  // namespace detail

// Arithmetic formula over attribute values: + - * / with parentheses and
// unary minus. A missing operand makes the result unevaluated; division by
// zero makes it undefined.
class Formula {
 public:
  enum class Status { ok, unevaluated, undefined };
  struct Result {
    Status status = Status::ok;
    double value = 0.0;
  };

  static Formula parse(const std::string& source) {
    Formula f;
    f.source_ = source;
    auto tokens = detail::tokenize(source);
    std::size_t pos = 0;
    f.root_ = parse_sum(tokens, pos, f.names_);
    expect_end(tokens, pos);
    return f;
  }

  Result evaluate(const Dataset& ds, std::size_t record) const {
    return eval_node(*root_, ds, record);
  }

  const std::vector<std::string>& referenced() const { return names_; }
  const std::string& source() const { return source_; }

  // Non-empty only when the whole formula is one attribute reference
  // (possibly parenthesized); arithmetic over an attribute does not count.
  std::string bare_attribute() const {
    return root_->op == Node::Op::attribute ? root_->attribute : std::string();
  }

  void bind_check(const Dataset& ds) const {
    for (const auto& n : names_) ds.require_attribute(n);
  }

 private:
  struct Node {
    enum class Op { constant, attribute, add, sub, mul, div, neg } op;
    double constant = 0.0;
    std::string attribute;
    std::unique_ptr<Node> lhs, rhs;
  };

  std::unique_ptr<Node> root_;
  std::vector<std::string> names_;
  std::string source_;

  static void expect_end(const std::vector<Token>& t, std::size_t pos) {
    if (t[pos].kind != TokenKind::end)
      throw ParseError("expression error at position " + std::to_string(t[pos].pos) +
                       ": unexpected trailing input '" + t[pos].text + "'");
  }

  static std::unique_ptr<Node> parse_sum(const std::vector<Token>& t, std::size_t& pos,
                                         std::vector<std::string>& names) {
    auto lhs = parse_product(t, pos, names);
    while (t[pos].kind == TokenKind::op && (t[pos].text == "+" || t[pos].text == "-")) {
      bool add = t[pos].text == "+";
      ++pos;
      auto rhs = parse_product(t, pos, names);
      auto n = std::make_unique<Node>();
      n->op = add ? Node::Op::add : Node::Op::sub;
      n->lhs = std::move(lhs);
      n->rhs = std::move(rhs);
      lhs = std::move(n);
    }
    return lhs;
  }

  static std::unique_ptr<Node> parse_product(const std::vector<Token>& t,
                                             std::size_t& pos,
                                             std::vector<std::string>& names) {
    auto lhs = parse_unary(t, pos, names);
    while (t[pos].kind == TokenKind::op && (t[pos].text == "*" || t[pos].text == "/")) {
      bool mul = t[pos].text == "*";
      ++pos;
      auto rhs = parse_unary(t, pos, names);
      auto n = std::make_unique<Node>();
      n->op = mul ? Node::Op::mul : Node::Op::div;
      n->lhs = std::move(lhs);
      n->rhs = std::move(rhs);
      lhs = std::move(n);
    }
    return lhs;
  }

  static std::unique_ptr<Node> parse_unary(const std::vector<Token>& t, std::size_t& pos,
                                           std::vector<std::string>& names) {
    if (t[pos].kind == TokenKind::op && t[pos].text == "-") {
      ++pos;
      auto n = std::make_unique<Node>();
      n->op = Node::Op::neg;
      n->lhs = parse_unary(t, pos, names);
      return n;
    }
    return parse_primary(t, pos, names);
  }

  static std::unique_ptr<Node> parse_primary(const std::vector<Token>& t,
                                             std::size_t& pos,
                                             std::vector<std::string>& names) {
    const Token& tok = t[pos];
    auto n = std::make_unique<Node>();
    if (tok.kind == TokenKind::number) {
      n->op = Node::Op::constant;
      n->constant = tok.number;
      ++pos;
      return n;
    }
    if (tok.kind == TokenKind::identifier) {
      n->op = Node::Op::attribute;
      n->attribute = tok.text;
      names.push_back(tok.text);
      ++pos;
      return n;
    }
    if (tok.kind == TokenKind::op && tok.text == "(") {
      ++pos;
      auto inner = parse_sum(t, pos, names);
      if (!(t[pos].kind == TokenKind::op && t[pos].text == ")"))
        throw ParseError("expression error at position " + std::to_string(t[pos].pos) +
                         ": expected ')'");
      ++pos;
      return inner;
    }
    throw ParseError("expression error at position " + std::to_string(tok.pos) +
                     ": expected a value");
  }

  static Result eval_node(const Node& n, const Dataset& ds, std::size_t record) {
    switch (n.op) {
      case Node::Op::constant:
        return {Status::ok, n.constant};
      case Node::Op::attribute: {
        auto idx = ds.require_attribute(n.attribute);
        const Cell& cell = ds.records[record][idx];
        if (is_missing(cell)) return {Status::unevaluated, 0.0};
        if (!is_number(cell))
          throw ValidationError("attribute '" + n.attribute +
                                "' is not numeric; formulas need numeric operands");
        return {Status::ok, as_number(cell)};
      }
      case Node::Op::neg: {
        auto v = eval_node(*n.lhs, ds, record);
        if (v.status != Status::ok) return v;
        return {Status::ok, -v.value};
      }
      default: {
        auto a = eval_node(*n.lhs, ds, record);
        if (a.status != Status::ok) return a;
        auto b = eval_node(*n.rhs, ds, record);
        if (b.status != Status::ok) return b;
        switch (n.op) {
          case Node::Op::add: return {Status::ok, a.value + b.value};
          case Node::Op::sub: return {Status::ok, a.value - b.value};
          case Node::Op::mul: return {Status::ok, a.value * b.value};
          case Node::Op::div:
            if (b.value == 0.0) return {Status::undefined, 0.0};
            return {Status::ok, a.value / b.value};
          default: throw InternalError("unreachable formula op");
        }
      }
    }
  }
};

// Boolean record predicate: comparisons over formulas or strings, combined
// with and/or/not, plus "<attr> is [not] missing". Comparisons touching a
// missing value are false, so filters never drop records on absent evidence.
class Predicate {
 public:
  static Predicate parse(const std::string& source) {
    Predicate p;
    p.source_ = source;
    auto tokens = detail::tokenize(source);
    std::size_t pos = 0;
    p.root_ = parse_or(tokens, pos, p.names_);
    if (tokens[pos].kind != TokenKind::end)
      throw ParseError("expression error at position " +
                       std::to_string(tokens[pos].pos) +
                       ": unexpected trailing input '" + tokens[pos].text + "'");
    return p;
  }

  bool evaluate(const Dataset& ds, std::size_t record) const {
    return eval_node(*root_, ds, record);
  }

  const std::vector<std::string>& referenced() const { return names_; }
  const std::string& source() const { return source_; }

  void bind_check(const Dataset& ds) const {
    for (const auto& n : names_) ds.require_attribute(n);
  }

 private:
  struct Operand {
    enum class Kind { formula, string } kind = Kind::formula;
    std::string attribute;  // set when the formula is a bare attribute
    std::string text;
    std::unique_ptr<Formula> formula;
  };

  struct Node {
    enum class Op { and_, or_, not_, compare, missing_test } op;
    std::string comparator;  // = == != <> < <= > >=
    bool negated = false;    // for "is not missing"
    Operand lhs, rhs;
    std::unique_ptr<Node> a, b;
  };

  std::unique_ptr<Node> root_;
  std::vector<std::string> names_;
  std::string source_;

  static bool keyword(const Token& t, const char* word) {
    return t.kind == TokenKind::identifier && to_lower(t.text) == word;
  }

  static std::unique_ptr<Node> parse_or(const std::vector<Token>& t, std::size_t& pos,
                                        std::vector<std::string>& names) {
    auto lhs = parse_and(t, pos, names);
    while (keyword(t[pos], "or")) {
      ++pos;
      auto n = std::make_unique<Node>();
      n->op = Node::Op::or_;
      n->a = std::move(lhs);
      n->b = parse_and(t, pos, names);
      lhs = std::move(n);
    }
    return lhs;
  }

  static std::unique_ptr<Node> parse_and(const std::vector<Token>& t, std::size_t& pos,
                                         std::vector<std::string>& names) {
    auto lhs = parse_not(t, pos, names);
    while (keyword(t[pos], "and")) {
      ++pos;
      auto n = std::make_unique<Node>();
      n->op = Node::Op::and_;
      n->a = std::move(lhs);
      n->b = parse_not(t, pos, names);
      lhs = std::move(n);
    }
    return lhs;
  }

  static std::unique_ptr<Node> parse_not(const std::vector<Token>& t, std::size_t& pos,
                                         std::vector<std::string>& names) {
    if (keyword(t[pos], "not")) {
      ++pos;
      auto n = std::make_unique<Node>();
      n->op = Node::Op::not_;
      n->a = parse_not(t, pos, names);
      return n;
    }
    if (t[pos].kind == TokenKind::op && t[pos].text == "(") {
      // Try boolean grouping first; fall back to an arithmetic parenthesis.
      std::size_t saved = pos;
      auto saved_names = names;
      ++pos;
      try {
        auto inner = parse_or(t, pos, names);
        if (t[pos].kind == TokenKind::op && t[pos].text == ")") {
          ++pos;
          bool continues_arithmetic =
              t[pos].kind == TokenKind::op &&
              (t[pos].text == "=" || t[pos].text == "==" || t[pos].text == "!=" ||
               t[pos].text == "<>" || t[pos].text == "<" || t[pos].text == "<=" ||
               t[pos].text == ">" || t[pos].text == ">=" || t[pos].text == "+" ||
               t[pos].text == "-" || t[pos].text == "*" || t[pos].text == "/");
          if (!continues_arithmetic) return inner;
        }
      } catch (const ParseError&) {
      }
      pos = saved;
      names = saved_names;
    }
    return parse_comparison(t, pos, names);
  }

  static Operand parse_operand(const std::vector<Token>& t, std::size_t& pos,
                               std::vector<std::string>& names) {
    Operand op;
    if (t[pos].kind == TokenKind::string) {
      op.kind = Operand::Kind::string;
      op.text = t[pos].text;
      ++pos;
      return op;
    }
    // Re-tokenize the arithmetic slice through Formula's parser by splicing
    // tokens back is overkill; instead parse in place with Formula's grammar.
    op.kind = Operand::Kind::formula;
    op.formula = std::make_unique<Formula>(parse_formula_slice(t, pos, names));
    op.attribute = op.formula->bare_attribute();
    return op;
  }

  // Parses a formula from the shared token stream, stopping before boolean
  // keywords, comparison operators, or an unbalanced ')'.
  static Formula parse_formula_slice(const std::vector<Token>& t, std::size_t& pos,
                                     std::vector<std::string>& names) {
    std::size_t start = pos;
    int depth = 0;
    std::string text;
    while (t[pos].kind != TokenKind::end) {
      const Token& tok = t[pos];
      if (tok.kind == TokenKind::op) {
        if (tok.text == "(") {
          ++depth;
        } else if (tok.text == ")") {
          if (depth == 0) break;
          --depth;
        } else if (depth == 0 && tok.text != "+" && tok.text != "-" &&
                   tok.text != "*" && tok.text != "/") {
          break;
        }
      } else if (tok.kind == TokenKind::identifier) {
        auto low = to_lower(tok.text);
        if (low == "and" || low == "or" || low == "is") break;
      } else if (tok.kind == TokenKind::string) {
        break;
      }
      ++pos;
    }
    if (pos == start)
      throw ParseError("expression error at position " + std::to_string(t[start].pos) +
                       ": expected a value");
    for (std::size_t i = start; i < pos; ++i) {
      if (t[i].kind == TokenKind::identifier)
        text += "`" + t[i].text + "`";
      else
        text += t[i].text;
      text += ' ';
    }
    Formula f = Formula::parse(text);
    for (const auto& n : f.referenced()) names.push_back(n);
    return f;
  }

  static std::unique_ptr<Node> parse_comparison(const std::vector<Token>& t,
                                                std::size_t& pos,
                                                std::vector<std::string>& names) {
    auto n = std::make_unique<Node>();
    n->lhs = parse_operand(t, pos, names);
    if (keyword(t[pos], "is")) {
      ++pos;
      n->op = Node::Op::missing_test;
      if (keyword(t[pos], "not")) {
        n->negated = true;
        ++pos;
      }
      if (!keyword(t[pos], "missing"))
        throw ParseError("expression error at position " + std::to_string(t[pos].pos) +
                         ": expected 'missing'");
      ++pos;
      if (n->lhs.kind != Operand::Kind::formula || n->lhs.attribute.empty() ||
          n->lhs.formula->referenced().size() != 1)
        throw ParseError("'is missing' applies to a single attribute");
      return n;
    }
    if (t[pos].kind == TokenKind::op &&
        (t[pos].text == "=" || t[pos].text == "==" || t[pos].text == "!=" ||
         t[pos].text == "<>" || t[pos].text == "<" || t[pos].text == "<=" ||
         t[pos].text == ">" || t[pos].text == ">=")) {
      n->op = Node::Op::compare;
      n->comparator = t[pos].text;
      ++pos;
      n->rhs = parse_operand(t, pos, names);
      return n;
    }
    throw ParseError("expression error at position " + std::to_string(t[pos].pos) +
                     ": expected a comparison");
  }

  struct OperandValue {
    bool missing = false;
    bool is_text = false;
    double number = 0.0;
    std::string text;
  };

  static OperandValue eval_operand(const Operand& op, const Dataset& ds,
                                   std::size_t record) {
    OperandValue v;
    if (op.kind == Operand::Kind::string) {
      v.is_text = true;
      v.text = op.text;
      return v;
    }
    // Bare attribute references read the cell directly so categorical and
    // date columns compare as text instead of failing the numeric check.
    if (!op.attribute.empty()) {
      auto idx = ds.require_attribute(op.attribute);
      const Cell& cell = ds.records[record][idx];
      if (is_missing(cell)) {
        v.missing = true;
        return v;
      }
      if (is_number(cell)) {
        v.number = as_number(cell);
        return v;
      }
      v.is_text = true;
      v.text = cell_token(cell);
      return v;
    }
    auto r = op.formula->evaluate(ds, record);
    if (r.status != Formula::Status::ok) {
      v.missing = true;
      return v;
    }
    v.number = r.value;
    return v;
  }

  static bool eval_node(const Node& n, const Dataset& ds, std::size_t record) {
    switch (n.op) {
      case Node::Op::and_:
        return eval_node(*n.a, ds, record) && eval_node(*n.b, ds, record);
      case Node::Op::or_:
        return eval_node(*n.a, ds, record) || eval_node(*n.b, ds, record);
      case Node::Op::not_:
        return !eval_node(*n.a, ds, record);
      case Node::Op::missing_test: {
        auto idx = ds.require_attribute(n.lhs.attribute);
        bool missing = is_missing(ds.records[record][idx]);
        return n.negated ? !missing : missing;
      }
      case Node::Op::compare: {
        auto a = eval_operand(n.lhs, ds, record);
        auto b = eval_operand(n.rhs, ds, record);
        if (a.missing || b.missing) return false;
        int cmp;
        if (!a.is_text && !b.is_text) {
          cmp = a.number < b.number ? -1 : (a.number > b.number ? 1 : 0);
        } else {
          // Mixed numeric/text comparisons fall back to canonical tokens.
          std::string at = a.is_text ? a.text : format_number(a.number);
          std::string bt = b.is_text ? b.text : format_number(b.number);
          cmp = at < bt ? -1 : (at > bt ? 1 : 0);
        }
        const std::string& c = n.comparator;
        if (c == "=" || c == "==") return cmp == 0;
        if (c == "!=" || c == "<>") return cmp != 0;
        if (c == "<") return cmp < 0;
        if (c == "<=") return cmp <= 0;
        if (c == ">") return cmp > 0;
        return cmp >= 0;
      }
    }
    throw InternalError("unreachable predicate op");
  }
};

}  // namespace dqbench::expr
