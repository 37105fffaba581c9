#pragma once

// Textual rule grammar:
//
//   rule      := "IF" premise? "THEN" name "=" value
//   premise   := clause ("AND" clause)*
//   clause    := range | cmp | member
//   range     := number rel name rel number          rel := "<" | "<="
//   cmp       := name ("<=" | "<" | ">=" | ">" | "=") value
//   member    := name "IN" "{" value ("," value)* "}"
//   value     := ident | quoted-string | number
//   name      := ident | quoted-string
//
// Keywords are upper case. Quoted strings use double quotes with backslash
// escapes (\" \\ \n \t). Numbers are plain decimals with an optional sign and
// fraction; no exponent, no locale.

#include <charconv>
#include <limits>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fiper/error.hpp"
#include "fiper/model.hpp"

namespace fiper {

namespace rule_text_detail {

enum class Tok { kw_if, kw_then, kw_and, kw_in, ident, number, string, lt, le, gt, ge, eq, lbrace, rbrace, comma, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;  // identifier, unescaped string, or number lexeme
  std::size_t line = 1;
  std::size_t column = 1;
};

inline bool is_ident_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}
inline bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

inline bool is_keyword(std::string_view s) {
  return s == "IF" || s == "THEN" || s == "AND" || s == "IN";
}

/// True when `s` can be written without quotes.
inline bool is_bare_ident(std::string_view s) {
  if (s.empty() || !is_ident_start(s.front())) return false;
  for (char c : s)
    if (!is_ident_char(c)) return false;
  return !is_keyword(s);
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        t.kind = Tok::end;
        out.push_back(std::move(t));
        return out;
      }
      const char c = src_[pos_];
      if (is_ident_start(c)) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) advance();
        t.text = std::string(src_.substr(start, pos_ - start));
        if (t.text == "IF") t.kind = Tok::kw_if;
        else if (t.text == "THEN") t.kind = Tok::kw_then;
        else if (t.text == "AND") t.kind = Tok::kw_and;
        else if (t.text == "IN") t.kind = Tok::kw_in;
        else t.kind = Tok::ident;
      } else if (is_digit(c) || (c == '-' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
        std::size_t start = pos_;
        advance();
        while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
        if (pos_ + 1 < src_.size() && src_[pos_] == '.' && is_digit(src_[pos_ + 1])) {
          advance();
          while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
        }
        t.kind = Tok::number;
        t.text = std::string(src_.substr(start, pos_ - start));
      } else if (c == '"') {
        t.kind = Tok::string;
        t.text = read_string(t);
      } else {
        advance();
        switch (c) {
          case '<':
            t.kind = accept('=') ? Tok::le : Tok::lt;
            break;
          case '>':
            t.kind = accept('=') ? Tok::ge : Tok::gt;
            break;
          case '=': t.kind = Tok::eq; break;
          case '{': t.kind = Tok::lbrace; break;
          case '}': t.kind = Tok::rbrace; break;
          case ',': t.kind = Tok::comma; break;
          default:
            throw ParseError("syntax-error", "unexpected character '" + printable(c) + "'", t.line, t.column);
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  static std::string printable(char c) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x20 && u < 0x7f) return std::string(1, c);
    static constexpr char hex[] = "0123456789abcdef";
    return std::string("\\x") + hex[u >> 4] + hex[u & 0xf];
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  bool accept(char c) {
    if (pos_ < src_.size() && src_[pos_] == c) {
      advance();
      return true;
    }
    return false;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') advance();
      else break;
    }
  }

  std::string read_string(const Token& at) {
    advance();  // opening quote
    std::string out;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '"') {
        advance();
        return out;
      }
      if (c == '\\') {
        const std::size_t l = line_, col = col_;
        advance();
        if (pos_ >= src_.size()) break;
        const char e = src_[pos_];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: throw ParseError("syntax-error", "unknown escape '\\" + printable(e) + "'", l, col);
        }
        advance();
        continue;
      }
      out += c;
      advance();
    }
    throw ParseError("syntax-error", "unterminated string", at.line, at.column);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

inline std::string_view describe(Tok t) {
  switch (t) {
    case Tok::kw_if: return "'IF'";
    case Tok::kw_then: return "'THEN'";
    case Tok::kw_and: return "'AND'";
    case Tok::kw_in: return "'IN'";
    case Tok::ident: return "identifier";
    case Tok::number: return "number";
    case Tok::string: return "string";
    case Tok::lt: return "'<'";
    case Tok::le: return "'<='";
    case Tok::gt: return "'>'";
    case Tok::ge: return "'>='";
    case Tok::eq: return "'='";
    case Tok::lbrace: return "'{'";
    case Tok::rbrace: return "'}'";
    case Tok::comma: return "','";
    case Tok::end: return "end of input";
  }
  return "token";
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const DatasetSchema& schema) : toks_(std::move(tokens)), schema_(schema) {}

  Rule run() {
    Rule rule;
    expect(Tok::kw_if);
    if (peek().kind != Tok::kw_then) {
      clause(rule);
      while (peek().kind == Tok::kw_and) {
        next();
        clause(rule);
      }
    }
    expect(Tok::kw_then);
    const Token target = name();
    if (target.text != schema_.target_name)
      throw ParseError("unknown-target", "'" + target.text + "' is not the target '" + schema_.target_name + "'",
                       target.line, target.column);
    expect(Tok::eq);
    rule.consequence = value().text;
    expect(Tok::end);
    return rule;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void unexpected(const Token& t, std::string_view wanted) const {
    throw ParseError("syntax-error", "expected " + std::string(wanted) + ", found " + std::string(describe(t.kind)),
                     t.line, t.column);
  }

  const Token& expect(Tok kind) {
    if (peek().kind != kind) unexpected(peek(), describe(kind));
    return next();
  }

  Token name() {
    if (peek().kind != Tok::ident && peek().kind != Tok::string) unexpected(peek(), "feature name");
    return next();
  }

  Token value() {
    const Tok k = peek().kind;
    if (k != Tok::ident && k != Tok::string && k != Tok::number) unexpected(peek(), "value");
    return next();
  }

  static double number_of(const Token& t) {
    double v = 0.0;
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
      throw ParseError("syntax-error", "number out of range '" + t.text + "'", t.line, t.column);
    return v;
  }

  const FeatureSpec& feature(const Token& t, FeatureKind wanted, std::string_view form) const {
    const FeatureSpec* f = schema_.find(t.text);
    if (!f) throw ParseError("unknown-feature", "unknown feature '" + t.text + "'", t.line, t.column);
    if (f->kind != wanted)
      throw ParseError("kind-mismatch",
                       std::string(form) + " on " + std::string(to_string(f->kind)) + " feature '" + t.text + "'",
                       t.line, t.column);
    return *f;
  }

  void add(Rule& rule, Predicate p, const Token& at) {
    try {
      merge_predicate(rule.premise, std::move(p));
    } catch (const SchemaMismatch& e) {
      throw ParseError("kind-mismatch", e.what(), at.line, at.column);
    }
  }

  void clause(Rule& rule) {
    if (peek().kind == Tok::number) {
      range(rule);
      return;
    }
    const Token feat = name();
    const FeatureSpec* spec = schema_.find(feat.text);
    if (!spec) throw ParseError("unknown-feature", "unknown feature '" + feat.text + "'", feat.line, feat.column);
    const Token op = next();
    switch (op.kind) {
      case Tok::kw_in: {
        feature(feat, FeatureKind::categorical, "set membership");
        expect(Tok::lbrace);
        CategorySet set;
        for (;;) {
          std::string label = value().text;
          if (!set.contains(label)) set.labels.push_back(std::move(label));
          if (peek().kind == Tok::comma) {
            next();
            continue;
          }
          expect(Tok::rbrace);
          break;
        }
        add(rule, {feat.text, std::move(set)}, feat);
        return;
      }
      case Tok::lt:
      case Tok::le:
      case Tok::gt:
      case Tok::ge: {
        feature(feat, FeatureKind::numerical, "comparison");
        if (peek().kind != Tok::number) unexpected(peek(), "number");
        const double v = number_of(next());
        NumericInterval iv;
        if (op.kind == Tok::lt || op.kind == Tok::le) {
          iv.upper = v;
          iv.upper_open = op.kind == Tok::lt;
        } else {
          iv.lower = v;
          iv.lower_open = op.kind == Tok::gt;
        }
        add(rule, {feat.text, iv}, feat);
        return;
      }
      case Tok::eq: {
        if (spec->is_numerical()) {
          if (peek().kind != Tok::number) unexpected(peek(), "number");
          const double v = number_of(next());
          add(rule, {feat.text, NumericInterval{v, v, false, false}}, feat);
        } else {
          add(rule, {feat.text, CategorySet{{value().text}}}, feat);
        }
        return;
      }
      default:
        unexpected(op, "comparison operator or 'IN'");
    }
  }

  void range(Rule& rule) {
    const double lo = number_of(next());
    const Token rel1 = next();
    if (rel1.kind != Tok::lt && rel1.kind != Tok::le) unexpected(rel1, "'<' or '<='");
    const Token feat = name();
    feature(feat, FeatureKind::numerical, "range");
    const Token rel2 = next();
    if (rel2.kind != Tok::lt && rel2.kind != Tok::le) unexpected(rel2, "'<' or '<='");
    if (peek().kind != Tok::number) unexpected(peek(), "number");
    const double hi = number_of(next());
    add(rule, {feat.text, NumericInterval{lo, hi, rel1.kind == Tok::lt, rel2.kind == Tok::lt}}, feat);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const DatasetSchema& schema_;
};

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

inline std::string token_for(std::string_view s) { return is_bare_ident(s) ? std::string(s) : quote(s); }

}  // namespace rule_text_detail

/// Shortest decimal text that reads back to exactly `v`, without exponent.
inline std::string format_number(double v) {
  char buf[512];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  if (ec != std::errc()) return "0";
  return std::string(buf, ptr);
}

/// Parses rule text against `schema`. Duplicate predicates on one feature are
/// intersected. Throws ParseError (codes: syntax-error, unknown-feature,
/// kind-mismatch, unknown-target) with a 1-based line and column.
inline Rule parse_rule_text(std::string_view source, const DatasetSchema& schema) {
  using namespace rule_text_detail;
  return Parser(Lexer(source).run(), schema).run();
}

inline std::string emit_predicate(const Predicate& p) {
  using namespace rule_text_detail;
  const std::string name = token_for(p.feature);
  if (!p.is_interval()) {
    std::string out = name + " IN {";
    const auto& labels = p.set().labels;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (i) out += ", ";
      out += token_for(labels[i]);
    }
    return out + "}";
  }
  const auto& iv = p.interval();
  if (iv.lower && iv.upper)
    return format_number(*iv.lower) + (iv.lower_open ? " < " : " <= ") + name + (iv.upper_open ? " < " : " <= ") +
           format_number(*iv.upper);
  if (iv.upper) return name + (iv.upper_open ? " < " : " <= ") + format_number(*iv.upper);
  if (iv.lower) return name + (iv.lower_open ? " > " : " >= ") + format_number(*iv.lower);
  return name + " >= " + format_number(-std::numeric_limits<double>::max());
}

/// Prints a rule in the canonical grammar: predicates in premise order,
/// two-sided intervals in range form.
inline std::string emit_rule_text(const Rule& rule, std::string_view target_name) {
  using namespace rule_text_detail;
  std::string out = "IF ";
  for (std::size_t i = 0; i < rule.premise.size(); ++i) {
    if (i) out += " AND ";
    out += emit_predicate(rule.premise[i]);
  }
  if (!rule.premise.empty()) out += ' ';
  out += "THEN " + token_for(target_name) + " = " + token_for(rule.consequence);
  return out;
}

}  // namespace fiper
