#pragma once

#include <cctype>
#include <charconv>
#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "asdnk/error.hpp"
#include "asdnk/fields/expr.hpp"

namespace asdnk {

// Grammar (whitespace is ignored between tokens):
//
//   expr     = term { ("+" | "-") term } ;
//   term     = unary { ("*" | "/") unary } ;
//   unary    = ("-" | "+") unary | power ;
//   power    = primary [ "^" unary ] ;          (* right associative *)
//   primary  = number | name | name "(" expr ")" | "(" expr ")" ;
//   number   = digits [ "." [ digits ] ] [ exponent ] | "." digits [ exponent ] ;
//   exponent = ("e" | "E") [ "+" | "-" ] digits ;
//   name     = letter { letter | digit | "_" } ;
//
// Function names: sin, cos, exp, log, sqrt. The name `pi` is a constant.
// Any other name must be a chart coordinate or a supplied parameter;
// parameters are substituted as constants.
class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, const std::vector<std::string>& chart,
                   const std::map<std::string, double>& params)
      : s_(text), chart_(chart), params_(params) {}

  Expr parse() {
    skip();
    if (pos_ == s_.size()) throw ParseError("empty expression", pos_);
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) throw ParseError("unexpected '" + std::string(1, s_[pos_]) + "'", pos_);
    return e;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) {
      std::string found = pos_ < s_.size() ? std::string("'") + s_[pos_] + "'" : "end of input";
      throw ParseError(std::string("expected '") + c + "' but found " + found, pos_);
    }
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+')) e = e + term();
      else if (accept('-')) e = e - term();
      else return e;
    }
  }
  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) e = e * unary();
      else if (accept('/')) e = e / unary();
      else return e;
    }
  }
  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }
  Expr power() {
    Expr base = primary();
    if (accept('^')) return pow(base, unary());
    return base;
  }
  Expr primary() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }
  Expr number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t nd = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      nd += digits();
    }
    if (nd == 0) throw ParseError("malformed number", start);
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;  // "2e" is 2 followed by a name
    }
    double v = 0.0;
    auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != s_.data() + pos_) throw ParseError("malformed number", start);
    return Expr(v);
  }
  Expr name() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    std::string id(s_.substr(start, pos_ - start));
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      Expr arg = expr();
      expect(')');
      if (id == "sin") return sin(arg);
      if (id == "cos") return cos(arg);
      if (id == "exp") return exp(arg);
      if (id == "log") return log(arg);
      if (id == "sqrt") return sqrt(arg);
      throw ParseError("unknown function '" + id + "'", start);
    }
    for (const auto& c : chart_)
      if (c == id) return Expr::variable(id);
    if (auto it = params_.find(id); it != params_.end()) return Expr(it->second);
    if (id == "pi") return Expr(std::numbers::pi);
    throw ParseError("unknown identifier '" + id + "'", start);
  }

  std::string_view s_;
  const std::vector<std::string>& chart_;
  const std::map<std::string, double>& params_;
  std::size_t pos_ = 0;
};

inline Expr parse_expression(std::string_view text, const std::vector<std::string>& chart,
                             const std::map<std::string, double>& params = {}) {
  return ExpressionParser(text, chart, params).parse();
}

}  // namespace asdnk
