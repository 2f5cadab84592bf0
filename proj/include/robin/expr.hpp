#pragma once

#include <memory>
#include <string>

#include "robin/geometry.hpp"

namespace robin {

// Closed-form scalar expressions in the coordinates x1..x3.
// Grammar: + - * / ^, unary minus, exp, sin, cos, numeric literals, parentheses.
// Supports symbolic differentiation (used to back out manufactured data).
class Expr {
 public:
  Expr() = default;
  static Expr parse(const std::string& text);
  static Expr constant(double c);

  double eval(const Vec3& x) const;
  Expr diff(int axis) const;  // d/dx_{axis+1}
  bool is_constant(double* value = nullptr) const;
  std::string str() const;
  bool empty() const { return !node_; }

  Expr operator+(const Expr& o) const;
  Expr operator-(const Expr& o) const;
  Expr operator*(const Expr& o) const;

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

}  // namespace robin
