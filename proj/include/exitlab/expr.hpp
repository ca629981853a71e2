#pragma once

#include <functional>
#include <memory>
#include <string>

// Parser for the implicit-domain expression language: arithmetic, min/max,
// smin(a,b,r) (polynomial smooth union with smoothing radius r), a few
// elementary functions, and the shape primitives disc/ellipse/rect which
// evaluate to signed-distance-like values (negative inside).

namespace exitlab {

class ImplicitExpr {
 public:
  static ImplicitExpr parse(const std::string& text);  // throws std::invalid_argument

  double operator()(double x, double y) const { return eval_(x, y); }
  const std::string& text() const { return text_; }

 private:
  std::function<double(double, double)> eval_;
  std::string text_;
};

}  // namespace exitlab
