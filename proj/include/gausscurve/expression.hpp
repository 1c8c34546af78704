#pragma once

#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gausscurve/core.hpp"

namespace gausscurve {

/// Arithmetic expression over x and y: + - * / ^, parentheses, the constant
/// pi, and sqrt, abs, sin, cos, exp. Parsing is eager; evaluation never throws.
class Expression {
 public:
  Expression() : Expression("0") {}

  explicit Expression(std::string source) : source_(std::move(source)) {
    Parser p{source_, 0};
    fn_ = p.parse_expr();
    p.skip_ws();
    if (p.pos != source_.size()) p.fail("unexpected '" + std::string(1, source_[p.pos]) + "'");
  }

  const std::string& source() const { return source_; }
  double operator()(double x, double y) const { return fn_(x, y); }
  double operator()(Vec2 p) const { return fn_(p.x, p.y); }

 private:
  using Fn = std::function<double(double, double)>;

  struct Parser {
    std::string_view src;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& what) const {
      throw Error(ErrorKind::Parse, what + " at position " + std::to_string(pos) + " in \"" + std::string(src) + "\"");
    }
    void skip_ws() {
      while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    bool accept(char c) {
      skip_ws();
      if (pos < src.size() && src[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    Fn parse_expr() {
      Fn lhs = parse_term();
      for (;;) {
        if (accept('+')) {
          lhs = [a = lhs, b = parse_term()](double x, double y) { return a(x, y) + b(x, y); };
        } else if (accept('-')) {
          lhs = [a = lhs, b = parse_term()](double x, double y) { return a(x, y) - b(x, y); };
        } else {
          return lhs;
        }
      }
    }

    Fn parse_term() {
      Fn lhs = parse_unary();
      for (;;) {
        if (accept('*')) {
          lhs = [a = lhs, b = parse_unary()](double x, double y) { return a(x, y) * b(x, y); };
        } else if (accept('/')) {
          lhs = [a = lhs, b = parse_unary()](double x, double y) { return a(x, y) / b(x, y); };
        } else {
          return lhs;
        }
      }
    }

    Fn parse_unary() {
      if (accept('-')) return [a = parse_unary()](double x, double y) { return -a(x, y); };
      if (accept('+')) return parse_unary();
      return parse_power();
    }

    Fn parse_power() {
      Fn base = parse_primary();
      if (accept('^')) return [a = base, b = parse_unary()](double x, double y) { return std::pow(a(x, y), b(x, y)); };
      return base;
    }

    Fn parse_primary() {
      skip_ws();
      if (pos >= src.size()) fail("unexpected end of expression");
      if (accept('(')) {
        Fn inner = parse_expr();
        if (!accept(')')) fail("expected ')'");
        return inner;
      }
      const char c = src[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t used = 0;
        double value = 0.0;
        try {
          value = std::stod(std::string(src.substr(pos)), &used);
        } catch (const std::exception&) {
          fail("bad number");
        }
        pos += used;
        return [value](double, double) { return value; };
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        const std::size_t start = pos;
        while (pos < src.size() && (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) ++pos;
        const std::string name(src.substr(start, pos - start));
        if (name == "x") return [](double x, double) { return x; };
        if (name == "y") return [](double, double y) { return y; };
        if (name == "pi") return [](double, double) { return kPi; };
        double (*unary)(double) = nullptr;
        if (name == "sqrt") unary = [](double v) { return std::sqrt(v); };
        else if (name == "abs") unary = [](double v) { return std::abs(v); };
        else if (name == "sin") unary = [](double v) { return std::sin(v); };
        else if (name == "cos") unary = [](double v) { return std::cos(v); };
        else if (name == "exp") unary = [](double v) { return std::exp(v); };
        else fail("unknown identifier '" + name + "'");
        if (!accept('(')) fail("expected '(' after " + name);
        Fn arg = parse_expr();
        if (!accept(')')) fail("expected ')'");
        return [unary, arg](double x, double y) { return unary(arg(x, y)); };
      }
      fail("unexpected '" + std::string(1, c) + "'");
    }
  };

  std::string source_;
  Fn fn_;
};

/// Parses a spacing such as "0.125" or "2^-3"; must be finite and positive.
inline double parse_spacing(const std::string& text) {
  const Expression e(text);
  const double h = e(0.0, 0.0);
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorKind::InvalidArgument, "h must be positive: " + text);
  return h;
}

/// Comma-separated spacing list, e.g. "2^-3,2^-4,2^-5".
inline std::vector<double> parse_spacing_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (item.find_first_not_of(" \t") != std::string::npos) out.push_back(parse_spacing(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace gausscurve
