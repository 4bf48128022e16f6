// Copyright 2026 The finkpi Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "finkpi/sql.hpp"

#include <array>
#include <charconv>

#include "finkpi/error.hpp"
#include "text_util.hpp"

namespace finkpi::sql {
namespace {

enum class Tok { kIdent, kQuotedIdent, kNumber, kString, kSymbol, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;  // identifiers keep their spelling; symbols as written
  size_t pos = 0;
};

constexpr std::array<std::string_view, 30> kReserved = {
    "SELECT", "DISTINCT", "FROM",  "WHERE", "GROUP", "BY",     "HAVING", "ORDER",
    "ASC",    "DESC",     "LIMIT", "OFFSET", "JOIN", "INNER",  "LEFT",   "OUTER",
    "ON",     "AS",       "AND",   "OR",    "NOT",   "IN",     "BETWEEN", "IS",
    "NULL",   "LIKE",     "UNION", "CROSS", "CASE",  "ALL"};

constexpr std::array<std::string_view, 16> kWriteStatements = {
    "INSERT", "UPDATE", "DELETE", "DROP",   "CREATE", "ALTER",   "REPLACE", "ATTACH",
    "DETACH", "PRAGMA", "VACUUM", "REINDEX", "ANALYZE", "BEGIN", "COMMIT",  "WITH"};

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = text::upper(c);
  return out;
}

bool is_reserved(std::string_view word) {
  std::string u = upper(word);
  for (auto k : kReserved) {
    if (k == u) return true;
  }
  return false;
}

bool is_write_keyword(std::string_view word) {
  std::string u = upper(word);
  for (auto k : kWriteStatements) {
    if (k == u) return true;
  }
  return false;
}

[[noreturn]] void syntax(const std::string& what, size_t pos) {
  throw Error(ErrorCode::kSqlSyntaxError, what + " at offset " + std::to_string(pos));
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (text::is_space(c)) {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < s.size() && s[i + 1] == '-') {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
      size_t end = s.find("*/", i + 2);
      if (end == std::string_view::npos) syntax("unterminated comment", i);
      i = end + 2;
      continue;
    }
    Token t;
    t.pos = i;
    if (text::is_alpha(c) || c == '_') {
      size_t j = i;
      while (j < s.size() && (text::is_alnum(s[j]) || s[j] == '_')) ++j;
      t.kind = Tok::kIdent;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (text::is_digit(c) || (c == '.' && i + 1 < s.size() && text::is_digit(s[i + 1]))) {
      size_t j = i;
      while (j < s.size() && text::is_digit(s[j])) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        while (j < s.size() && text::is_digit(s[j])) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && text::is_digit(s[k])) {
          while (k < s.size() && text::is_digit(s[k])) ++k;
          j = k;
        }
      }
      if (j < s.size() && (text::is_alpha(s[j]) || s[j] == '_')) {
        syntax("malformed number", i);
      }
      t.kind = Tok::kNumber;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (c == '\'') {
      std::string value;
      size_t j = i + 1;
      for (;;) {
        if (j >= s.size()) syntax("unterminated string", i);
        if (s[j] == '\'') {
          if (j + 1 < s.size() && s[j + 1] == '\'') {
            value += '\'';
            j += 2;
            continue;
          }
          break;
        }
        value += s[j++];
      }
      t.kind = Tok::kString;
      t.text = std::move(value);
      i = j + 1;
    } else if (c == '"' || c == '`') {
      size_t end = s.find(c, i + 1);
      if (end == std::string_view::npos) syntax("unterminated identifier", i);
      t.kind = Tok::kQuotedIdent;
      t.text = std::string(s.substr(i + 1, end - i - 1));
      i = end + 1;
    } else {
      static constexpr std::array<std::string_view, 5> kTwo = {"<>", "!=", "<=", ">=", "||"};
      t.kind = Tok::kSymbol;
      for (auto two : kTwo) {
        if (s.substr(i, 2) == two) t.text = std::string(two);
      }
      if (t.text.empty()) {
        if (std::string_view("=<>+-*/%(),.;").find(c) == std::string_view::npos) {
          syntax(std::string("unexpected character '") + c + "'", i);
        }
        t.text = std::string(1, c);
      }
      i += t.text.size();
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.pos = s.size();
  out.push_back(end);
  return out;
}

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

ExprPtr binary(std::string op, ExprPtr l, ExprPtr r) {
  Expr e;
  e.kind = ExprKind::kBinary;
  e.name = std::move(op);
  e.args = {std::move(l), std::move(r)};
  return make(std::move(e));
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  SelectStatement statement() {
    if (!kw("SELECT")) {
      if (peek().kind == Tok::kIdent && is_write_keyword(peek().text)) {
        throw Error(ErrorCode::kNonSelectRejected,
                    "only SELECT statements are allowed, got " + upper(peek().text));
      }
      syntax("expected SELECT", peek().pos);
    }
    SelectStatement s;
    if (kw("DISTINCT")) {
      s.distinct = true;
    } else {
      kw("ALL");
    }
    do {
      s.items.push_back(select_item());
    } while (sym(","));
    expect_kw("FROM");
    s.from = table_ref();
    for (;;) {
      bool left = false;
      if (kw("LEFT")) {
        left = true;
        kw("OUTER");
        expect_kw("JOIN");
      } else if (kw("INNER")) {
        expect_kw("JOIN");
      } else if (!kw("JOIN")) {
        break;
      }
      Join j;
      j.left = left;
      j.table = table_ref();
      expect_kw("ON");
      j.on = expr();
      s.joins.push_back(std::move(j));
    }
    if (kw("WHERE")) s.where = expr();
    if (kw("GROUP")) {
      expect_kw("BY");
      do {
        s.group_by.push_back(expr());
      } while (sym(","));
    }
    if (kw("HAVING")) s.having = expr();
    if (kw("ORDER")) {
      expect_kw("BY");
      do {
        OrderItem o;
        o.expr = expr();
        if (kw("DESC")) {
          o.descending = true;
        } else {
          kw("ASC");
        }
        s.order_by.push_back(std::move(o));
      } while (sym(","));
    }
    if (kw("LIMIT")) {
      s.limit = integer();
      if (kw("OFFSET")) s.offset = integer();
    }
    sym(";");
    if (peek().kind != Tok::kEnd) {
      if (peek().kind == Tok::kIdent && is_write_keyword(peek().text)) {
        throw Error(ErrorCode::kNonSelectRejected,
                    "statement after SELECT: " + upper(peek().text));
      }
      syntax("unexpected '" + peek().text + "'", peek().pos);
    }
    return s;
  }

 private:
  const Token& peek(size_t ahead = 0) const {
    return t_[std::min(i_ + ahead, t_.size() - 1)];
  }
  bool is_kw(std::string_view k, size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::kIdent && upper(t.text) == k;
  }
  bool kw(std::string_view k) {
    if (!is_kw(k)) return false;
    ++i_;
    return true;
  }
  void expect_kw(std::string_view k) {
    if (!kw(k)) syntax("expected " + std::string(k), peek().pos);
  }
  bool sym(std::string_view s) {
    if (peek().kind != Tok::kSymbol || peek().text != s) return false;
    ++i_;
    return true;
  }
  void expect_sym(std::string_view s) {
    if (!sym(s)) syntax("expected '" + std::string(s) + "'", peek().pos);
  }

  std::int64_t integer() {
    const Token& t = peek();
    std::int64_t v = 0;
    if (t.kind != Tok::kNumber ||
        std::from_chars(t.text.data(), t.text.data() + t.text.size(), v).ptr !=
            t.text.data() + t.text.size() ||
        v < 0) {
      syntax("expected a non-negative integer", t.pos);
    }
    ++i_;
    return v;
  }

  std::optional<std::string> identifier() {
    const Token& t = peek();
    if (t.kind == Tok::kQuotedIdent || (t.kind == Tok::kIdent && !is_reserved(t.text))) {
      ++i_;
      return t.text;
    }
    return std::nullopt;
  }

  TableRef table_ref() {
    TableRef r;
    auto name = identifier();
    if (!name) syntax("expected table name", peek().pos);
    r.name = *name;
    if (kw("AS")) {
      auto alias = identifier();
      if (!alias) syntax("expected alias", peek().pos);
      r.alias = *alias;
    } else if (auto alias = identifier()) {
      r.alias = *alias;
    }
    return r;
  }

  SelectItem select_item() {
    SelectItem item;
    if (sym("*")) {
      Expr e;
      e.kind = ExprKind::kStar;
      item.expr = make(std::move(e));
      return item;
    }
    item.expr = expr();
    if (kw("AS")) {
      const Token& t = peek();
      if (t.kind == Tok::kString) {
        item.alias = t.text;
        ++i_;
      } else if (auto a = identifier()) {
        item.alias = *a;
      } else {
        syntax("expected alias", t.pos);
      }
    } else if (auto a = identifier()) {
      item.alias = *a;
    }
    return item;
  }

  ExprPtr expr() { return or_expr(); }

  ExprPtr or_expr() {
    ExprPtr l = and_expr();
    while (kw("OR")) l = binary("OR", l, and_expr());
    return l;
  }

  ExprPtr and_expr() {
    ExprPtr l = not_expr();
    while (kw("AND")) l = binary("AND", l, not_expr());
    return l;
  }

  ExprPtr not_expr() {
    if (kw("NOT")) {
      Expr e;
      e.kind = ExprKind::kUnary;
      e.name = "NOT";
      e.args = {not_expr()};
      return make(std::move(e));
    }
    return comparison();
  }

  ExprPtr comparison() {
    ExprPtr l = additive();
    for (;;) {
      const Token& t = peek();
      if (t.kind == Tok::kSymbol &&
          (t.text == "=" || t.text == "<>" || t.text == "!=" || t.text == "<" ||
           t.text == "<=" || t.text == ">" || t.text == ">=")) {
        std::string op = t.text == "!=" ? "<>" : t.text;
        ++i_;
        l = binary(op, l, additive());
        continue;
      }
      if (is_kw("IS")) {
        ++i_;
        Expr e;
        e.kind = ExprKind::kIsNull;
        e.negated = kw("NOT");
        expect_kw("NULL");
        e.args = {l};
        l = make(std::move(e));
        continue;
      }
      bool negated = false;
      if (is_kw("NOT") && (is_kw("BETWEEN", 1) || is_kw("IN", 1) || is_kw("LIKE", 1))) {
        ++i_;
        negated = true;
      }
      if (kw("BETWEEN")) {
        Expr e;
        e.kind = ExprKind::kBetween;
        e.negated = negated;
        ExprPtr lo = additive();
        expect_kw("AND");
        ExprPtr hi = additive();
        e.args = {l, lo, hi};
        l = make(std::move(e));
        continue;
      }
      if (kw("IN")) {
        Expr e;
        e.kind = ExprKind::kIn;
        e.negated = negated;
        e.args.push_back(l);
        expect_sym("(");
        if (is_kw("SELECT")) syntax("subqueries are not supported", peek().pos);
        do {
          e.args.push_back(expr());
        } while (sym(","));
        expect_sym(")");
        l = make(std::move(e));
        continue;
      }
      if (kw("LIKE")) {
        ExprPtr r = additive();
        l = binary("LIKE", l, r);
        if (negated) {
          Expr n;
          n.kind = ExprKind::kUnary;
          n.name = "NOT";
          n.args = {l};
          l = make(std::move(n));
        }
        continue;
      }
      if (negated) syntax("dangling NOT", peek().pos);
      return l;
    }
  }

  ExprPtr additive() {
    ExprPtr l = multiplicative();
    for (;;) {
      if (sym("+")) {
        l = binary("+", l, multiplicative());
      } else if (sym("-")) {
        l = binary("-", l, multiplicative());
      } else if (sym("||")) {
        l = binary("||", l, multiplicative());
      } else {
        return l;
      }
    }
  }

  ExprPtr multiplicative() {
    ExprPtr l = unary();
    for (;;) {
      if (sym("*")) {
        l = binary("*", l, unary());
      } else if (sym("/")) {
        l = binary("/", l, unary());
      } else if (sym("%")) {
        l = binary("%", l, unary());
      } else {
        return l;
      }
    }
  }

  ExprPtr unary() {
    for (std::string_view op : {"-", "+"}) {
      if (sym(op)) {
        Expr e;
        e.kind = ExprKind::kUnary;
        e.name = std::string(op);
        e.args = {unary()};
        return make(std::move(e));
      }
    }
    return primary();
  }

  ExprPtr primary() {
    const Token& t = peek();
    Expr e;
    switch (t.kind) {
      case Tok::kNumber:
        e.kind = ExprKind::kNumber;
        e.text = t.text;
        ++i_;
        return make(std::move(e));
      case Tok::kString:
        e.kind = ExprKind::kString;
        e.text = t.text;
        ++i_;
        return make(std::move(e));
      case Tok::kSymbol:
        if (t.text == "(") {
          ++i_;
          if (is_kw("SELECT")) syntax("subqueries are not supported", peek().pos);
          ExprPtr inner = expr();
          expect_sym(")");
          return inner;
        }
        syntax("unexpected '" + t.text + "'", t.pos);
      case Tok::kEnd:
        syntax("unexpected end of statement", t.pos);
      case Tok::kIdent:
        if (kw("NULL")) {
          e.kind = ExprKind::kNull;
          return make(std::move(e));
        }
        if (is_reserved(t.text)) syntax("unexpected keyword " + upper(t.text), t.pos);
        [[fallthrough]];
      case Tok::kQuotedIdent:
        break;
    }
    std::string first = t.text;
    bool quoted = t.kind == Tok::kQuotedIdent;
    ++i_;
    if (!quoted && sym("(")) {
      e.kind = ExprKind::kFunction;
      e.name = upper(first);
      if (sym(")")) return make(std::move(e));
      if (sym("*")) {
        Expr star;
        star.kind = ExprKind::kStar;
        e.args.push_back(make(std::move(star)));
      } else {
        e.distinct = kw("DISTINCT");
        do {
          e.args.push_back(expr());
        } while (sym(","));
      }
      expect_sym(")");
      return make(std::move(e));
    }
    e.kind = ExprKind::kColumn;
    if (sym(".")) {
      auto col = identifier();
      if (!col) syntax("expected column name", peek().pos);
      e.table = first;
      e.name = *col;
    } else {
      e.name = first;
    }
    return make(std::move(e));
  }

  std::vector<Token> t_;
  size_t i_ = 0;
};

int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::kBinary:
      if (e.name == "OR") return 1;
      if (e.name == "AND") return 2;
      if (e.name == "+" || e.name == "-" || e.name == "||") return 5;
      if (e.name == "*" || e.name == "/" || e.name == "%") return 6;
      return 4;
    case ExprKind::kUnary: return e.name == "NOT" ? 3 : 7;
    case ExprKind::kBetween:
    case ExprKind::kIn:
    case ExprKind::kIsNull: return 4;
    default: return 8;
  }
}

std::string quote_string(std::string_view v) {
  std::string out = "'";
  for (char c : v) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

std::string operand(const ExprPtr& child, int parent_prec, bool strict) {
  std::string s = to_sql(*child);
  int p = precedence(*child);
  if (p < parent_prec || (strict && p == parent_prec)) return "(" + s + ")";
  return s;
}

}  // namespace

SelectStatement parse_select(std::string_view sql) {
  return Parser(tokenize(sql)).statement();
}

std::string to_sql(const Expr& e) {
  switch (e.kind) {
    case ExprKind::kColumn: return e.table.empty() ? e.name : e.table + "." + e.name;
    case ExprKind::kNumber: return e.text;
    case ExprKind::kString: return quote_string(e.text);
    case ExprKind::kNull: return "NULL";
    case ExprKind::kStar: return "*";
    case ExprKind::kUnary:
      if (e.name == "NOT") return "NOT " + operand(e.args[0], 3, false);
      return e.name + operand(e.args[0], 7, false);
    case ExprKind::kBinary: {
      int p = precedence(e);
      return operand(e.args[0], p, false) + " " + e.name + " " + operand(e.args[1], p, true);
    }
    case ExprKind::kFunction: {
      std::string s = e.name + "(";
      if (e.distinct) s += "DISTINCT ";
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) s += ", ";
        s += to_sql(*e.args[i]);
      }
      return s + ")";
    }
    case ExprKind::kBetween:
      return operand(e.args[0], 5, false) + (e.negated ? " NOT BETWEEN " : " BETWEEN ") +
             operand(e.args[1], 5, false) + " AND " + operand(e.args[2], 5, false);
    case ExprKind::kIn: {
      std::string s = operand(e.args[0], 5, false) + (e.negated ? " NOT IN (" : " IN (");
      for (size_t i = 1; i < e.args.size(); ++i) {
        if (i > 1) s += ", ";
        s += to_sql(*e.args[i]);
      }
      return s + ")";
    }
    case ExprKind::kIsNull:
      return operand(e.args[0], 5, false) + (e.negated ? " IS NOT NULL" : " IS NULL");
  }
  return "";
}

std::string to_sql(const SelectStatement& s) {
  std::string out = "SELECT ";
  if (s.distinct) out += "DISTINCT ";
  for (size_t i = 0; i < s.items.size(); ++i) {
    if (i) out += ", ";
    out += to_sql(*s.items[i].expr);
    if (!s.items[i].alias.empty()) out += " AS " + s.items[i].alias;
  }
  auto table = [](const TableRef& t) { return t.alias.empty() ? t.name : t.name + " " + t.alias; };
  out += " FROM " + table(s.from);
  for (const auto& j : s.joins) {
    out += j.left ? " LEFT JOIN " : " JOIN ";
    out += table(j.table) + " ON " + to_sql(*j.on);
  }
  if (s.where) out += " WHERE " + to_sql(*s.where);
  if (!s.group_by.empty()) {
    out += " GROUP BY ";
    for (size_t i = 0; i < s.group_by.size(); ++i) {
      if (i) out += ", ";
      out += to_sql(*s.group_by[i]);
    }
  }
  if (s.having) out += " HAVING " + to_sql(*s.having);
  if (!s.order_by.empty()) {
    out += " ORDER BY ";
    for (size_t i = 0; i < s.order_by.size(); ++i) {
      if (i) out += ", ";
      out += to_sql(*s.order_by[i].expr);
      if (s.order_by[i].descending) out += " DESC";
    }
  }
  if (s.limit) out += " LIMIT " + std::to_string(*s.limit);
  if (s.offset) out += " OFFSET " + std::to_string(*s.offset);
  return out;
}

std::vector<ExprPtr> conjuncts(const ExprPtr& expr) {
  std::vector<ExprPtr> out;
  if (!expr) return out;
  if (expr->kind == ExprKind::kBinary && expr->name == "AND") {
    for (const auto& a : expr->args) {
      auto sub = conjuncts(a);
      out.insert(out.end(), sub.begin(), sub.end());
    }
  } else {
    out.push_back(expr);
  }
  return out;
}

void visit(const ExprPtr& expr, const std::function<void(const Expr&)>& fn) {
  if (!expr) return;
  fn(*expr);
  for (const auto& a : expr->args) visit(a, fn);
}

}  // namespace finkpi::sql
