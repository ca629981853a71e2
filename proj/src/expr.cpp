#include "exitlab/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace exitlab {

namespace {

using Fn = std::function<double(double, double)>;

double smooth_min(double a, double b, double r) {
  if (r <= 0.0) return std::min(a, b);
  const double t = std::clamp(0.5 + 0.5 * (b - a) / r, 0.0, 1.0);
  return b * (1.0 - t) + a * t - r * t * (1.0 - t);
}

double sd_disc(double x, double y, double cx, double cy, double r) {
  return std::hypot(x - cx, y - cy) - r;
}

// Approximate signed distance; exact zero level set.
double sd_ellipse(double x, double y, double cx, double cy, double a, double b) {
  const double u = (x - cx) / a, v = (y - cy) / b;
  return (std::hypot(u, v) - 1.0) * std::min(a, b);
}

double sd_rect(double x, double y, double cx, double cy, double w, double h) {
  const double dx = std::fabs(x - cx) - 0.5 * w;
  const double dy = std::fabs(y - cy) - 0.5 * h;
  const double ox = std::max(dx, 0.0), oy = std::max(dy, 0.0);
  return std::hypot(ox, oy) + std::min(std::max(dx, dy), 0.0);
}

struct Parser {
  const std::string& s;
  std::size_t pos = 0;

  explicit Parser(const std::string& text) : s(text) {}

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("implicit expression: " + msg + " at position " +
                                std::to_string(pos) + " in \"" + s + "\"");
  }

  Fn parse_expr() {
    Fn lhs = parse_term();
    for (;;) {
      skip();
      if (eat('+')) {
        Fn rhs = parse_term();
        lhs = [l = std::move(lhs), r = std::move(rhs)](double x, double y) {
          return l(x, y) + r(x, y);
        };
      } else if (eat('-')) {
        Fn rhs = parse_term();
        lhs = [l = std::move(lhs), r = std::move(rhs)](double x, double y) {
          return l(x, y) - r(x, y);
        };
      } else {
        return lhs;
      }
    }
  }

  Fn parse_term() {
    Fn lhs = parse_unary();
    for (;;) {
      skip();
      if (eat('*')) {
        Fn rhs = parse_unary();
        lhs = [l = std::move(lhs), r = std::move(rhs)](double x, double y) {
          return l(x, y) * r(x, y);
        };
      } else if (eat('/')) {
        Fn rhs = parse_unary();
        lhs = [l = std::move(lhs), r = std::move(rhs)](double x, double y) {
          return l(x, y) / r(x, y);
        };
      } else {
        return lhs;
      }
    }
  }

  Fn parse_unary() {
    skip();
    if (eat('-')) {
      Fn inner = parse_unary();
      return [f = std::move(inner)](double x, double y) { return -f(x, y); };
    }
    eat('+');
    return parse_power();
  }

  Fn parse_power() {
    Fn base = parse_atom();
    skip();
    if (eat('^')) {
      Fn exp = parse_unary();
      return [b = std::move(base), e = std::move(exp)](double x, double y) {
        return std::pow(b(x, y), e(x, y));
      };
    }
    return base;
  }

  Fn parse_atom() {
    skip();
    if (pos >= s.size()) fail("unexpected end of input");
    const char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '(') {
      ++pos;
      Fn inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    fail("unexpected character");
  }

  Fn parse_number() {
    skip();
    std::size_t end = pos;
    while (end < s.size() &&
           (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.' ||
            s[end] == 'e' || s[end] == 'E' ||
            ((s[end] == '+' || s[end] == '-') && end > pos &&
             (s[end - 1] == 'e' || s[end - 1] == 'E'))))
      ++end;
    const double v = std::stod(s.substr(pos, end - pos));
    pos = end;
    return [v](double, double) { return v; };
  }

  std::vector<Fn> parse_args(std::size_t lo, std::size_t hi) {
    expect('(');
    std::vector<Fn> args;
    if (!eat(')')) {
      args.push_back(parse_expr());
      while (eat(',')) args.push_back(parse_expr());
      expect(')');
    }
    if (args.size() < lo || args.size() > hi) fail("wrong argument count");
    return args;
  }

  Fn parse_ident() {
    std::size_t end = pos;
    while (end < s.size() && (std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_'))
      ++end;
    const std::string name = s.substr(pos, end - pos);
    pos = end;
    if (name == "x") return [](double x, double) { return x; };
    if (name == "y") return [](double, double y) { return y; };
    if (name == "pi") return [](double, double) { return M_PI; };

    auto unary = [&](double (*f)(double)) {
      auto a = parse_args(1, 1);
      return Fn([g = std::move(a[0]), f](double x, double y) { return f(g(x, y)); });
    };
    if (name == "abs") return unary(std::fabs);
    if (name == "sqrt") return unary(std::sqrt);
    if (name == "sin") return unary(std::sin);
    if (name == "cos") return unary(std::cos);
    if (name == "exp") return unary(std::exp);

    if (name == "min" || name == "max") {
      auto a = parse_args(2, 2);
      const bool is_min = name == "min";
      return [l = std::move(a[0]), r = std::move(a[1]), is_min](double x, double y) {
        return is_min ? std::min(l(x, y), r(x, y)) : std::max(l(x, y), r(x, y));
      };
    }
    if (name == "smin") {
      auto a = parse_args(3, 3);
      return [f = std::move(a[0]), g = std::move(a[1]), r = std::move(a[2])](double x, double y) {
        return smooth_min(f(x, y), g(x, y), r(x, y));
      };
    }
    if (name == "disc") {
      auto a = parse_args(3, 3);
      return [cx = std::move(a[0]), cy = std::move(a[1]), r = std::move(a[2])](double x, double y) {
        return sd_disc(x, y, cx(x, y), cy(x, y), r(x, y));
      };
    }
    if (name == "ellipse") {
      auto a = parse_args(4, 4);
      return [cx = std::move(a[0]), cy = std::move(a[1]), ea = std::move(a[2]),
              eb = std::move(a[3])](double x, double y) {
        return sd_ellipse(x, y, cx(x, y), cy(x, y), ea(x, y), eb(x, y));
      };
    }
    if (name == "rect") {
      auto a = parse_args(4, 4);
      return [cx = std::move(a[0]), cy = std::move(a[1]), w = std::move(a[2]),
              h = std::move(a[3])](double x, double y) {
        return sd_rect(x, y, cx(x, y), cy(x, y), w(x, y), h(x, y));
      };
    }
    fail("unknown identifier '" + name + "'");
  }
};

}  // namespace

ImplicitExpr ImplicitExpr::parse(const std::string& text) {
  Parser p(text);
  Fn f = p.parse_expr();
  p.skip();
  if (p.pos != text.size()) p.fail("trailing input");
  ImplicitExpr e;
  e.eval_ = std::move(f);
  e.text_ = text;
  return e;
}

}  // namespace exitlab
