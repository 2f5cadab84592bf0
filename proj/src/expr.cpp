#include "robin/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace robin {

enum class Kind { num, var, add, sub, mul, div, pow, neg, fexp, fsin, fcos };

struct Expr::Node {
  Kind kind;
  double value = 0.0;  // num
  int axis = 0;        // var
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_num(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Kind::num;
  n->value = v;
  return n;
}

NodePtr make_var(int axis) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Kind::var;
  n->axis = axis;
  return n;
}

bool is_num(const NodePtr& n, double v) { return n->kind == Kind::num && n->value == v; }

NodePtr make_node(Kind k, NodePtr a, NodePtr b = nullptr) {
  // light constant folding keeps derivatives readable and cheap to evaluate
  if (a && a->kind == Kind::num && (!b || b->kind == Kind::num)) {
    const double x = a->value, y = b ? b->value : 0.0;
    switch (k) {
      case Kind::add: return make_num(x + y);
      case Kind::sub: return make_num(x - y);
      case Kind::mul: return make_num(x * y);
      case Kind::div: return make_num(x / y);
      case Kind::pow: return make_num(std::pow(x, y));
      case Kind::neg: return make_num(-x);
      case Kind::fexp: return make_num(std::exp(x));
      case Kind::fsin: return make_num(std::sin(x));
      case Kind::fcos: return make_num(std::cos(x));
      default: break;
    }
  }
  if (k == Kind::add) {
    if (is_num(a, 0.0)) return b;
    if (is_num(b, 0.0)) return a;
  }
  if (k == Kind::sub && is_num(b, 0.0)) return a;
  if (k == Kind::mul) {
    if (is_num(a, 0.0) || is_num(b, 0.0)) return make_num(0.0);
    if (is_num(a, 1.0)) return b;
    if (is_num(b, 1.0)) return a;
  }
  if (k == Kind::div && is_num(a, 0.0)) return make_num(0.0);
  if (k == Kind::pow && is_num(b, 1.0)) return a;
  auto n = std::make_shared<Expr::Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr run() {
    auto e = expression();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression parse error at position " + std::to_string(pos_) +
                                ": " + what + " in \"" + s_ + "\"");
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expression() {
    auto lhs = term();
    for (;;) {
      if (eat('+')) lhs = make_node(Kind::add, lhs, term());
      else if (eat('-')) lhs = make_node(Kind::sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (eat('*')) lhs = make_node(Kind::mul, lhs, unary());
      else if (eat('/')) lhs = make_node(Kind::div, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make_node(Kind::neg, unary());
    if (eat('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = atom();
    if (eat('^')) return make_node(Kind::pow, base, unary());  // right associative
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = expression();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected character");
  }

  NodePtr number() {
    std::size_t end = pos_;
    while (end < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
            s_[end] == 'e' || s_[end] == 'E' ||
            ((s_[end] == '+' || s_[end] == '-') && end > pos_ &&
             (s_[end - 1] == 'e' || s_[end - 1] == 'E')))) {
      ++end;
    }
    double v = 0.0;
    try {
      v = std::stod(s_.substr(pos_, end - pos_));
    } catch (...) {
      fail("bad number");
    }
    pos_ = end;
    return make_num(v);
  }

  NodePtr identifier() {
    std::size_t end = pos_;
    while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])))) ++end;
    const std::string name = s_.substr(pos_, end - pos_);
    pos_ = end;
    if (name == "x1" || name == "x") return make_var(0);
    if (name == "x2" || name == "y") return make_var(1);
    if (name == "x3" || name == "z") return make_var(2);
    if (name == "pi") return make_num(3.14159265358979323846);
    if (name == "exp" || name == "sin" || name == "cos") {
      if (!eat('(')) fail("expected '(' after " + name);
      auto arg = expression();
      if (!eat(')')) fail("expected ')'");
      if (name == "exp") return make_node(Kind::fexp, arg);
      if (name == "sin") return make_node(Kind::fsin, arg);
      return make_node(Kind::fcos, arg);
    }
    fail("unknown identifier '" + name + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double eval_node(const Expr::Node* n, const Vec3& x) {
  switch (n->kind) {
    case Kind::num: return n->value;
    case Kind::var: return x[n->axis];
    case Kind::add: return eval_node(n->a.get(), x) + eval_node(n->b.get(), x);
    case Kind::sub: return eval_node(n->a.get(), x) - eval_node(n->b.get(), x);
    case Kind::mul: return eval_node(n->a.get(), x) * eval_node(n->b.get(), x);
    case Kind::div: return eval_node(n->a.get(), x) / eval_node(n->b.get(), x);
    case Kind::pow: return std::pow(eval_node(n->a.get(), x), eval_node(n->b.get(), x));
    case Kind::neg: return -eval_node(n->a.get(), x);
    case Kind::fexp: return std::exp(eval_node(n->a.get(), x));
    case Kind::fsin: return std::sin(eval_node(n->a.get(), x));
    case Kind::fcos: return std::cos(eval_node(n->a.get(), x));
  }
  return 0.0;
}

NodePtr diff_node(const NodePtr& n, int axis) {
  switch (n->kind) {
    case Kind::num: return make_num(0.0);
    case Kind::var: return make_num(n->axis == axis ? 1.0 : 0.0);
    case Kind::add: return make_node(Kind::add, diff_node(n->a, axis), diff_node(n->b, axis));
    case Kind::sub: return make_node(Kind::sub, diff_node(n->a, axis), diff_node(n->b, axis));
    case Kind::mul:
      return make_node(Kind::add, make_node(Kind::mul, diff_node(n->a, axis), n->b),
                       make_node(Kind::mul, n->a, diff_node(n->b, axis)));
    case Kind::div:
      return make_node(
          Kind::div,
          make_node(Kind::sub, make_node(Kind::mul, diff_node(n->a, axis), n->b),
                    make_node(Kind::mul, n->a, diff_node(n->b, axis))),
          make_node(Kind::mul, n->b, n->b));
    case Kind::pow: {
      if (n->b->kind != Kind::num)
        throw std::invalid_argument("differentiation requires a constant exponent");
      const double c = n->b->value;
      return make_node(Kind::mul, make_num(c),
                       make_node(Kind::mul, make_node(Kind::pow, n->a, make_num(c - 1.0)),
                                 diff_node(n->a, axis)));
    }
    case Kind::neg: return make_node(Kind::neg, diff_node(n->a, axis));
    case Kind::fexp: return make_node(Kind::mul, make_node(Kind::fexp, n->a), diff_node(n->a, axis));
    case Kind::fsin: return make_node(Kind::mul, make_node(Kind::fcos, n->a), diff_node(n->a, axis));
    case Kind::fcos:
      return make_node(Kind::neg,
                       make_node(Kind::mul, make_node(Kind::fsin, n->a), diff_node(n->a, axis)));
  }
  return make_num(0.0);
}

void print_node(const Expr::Node* n, std::ostringstream& out) {
  switch (n->kind) {
    case Kind::num: out << n->value; return;
    case Kind::var: out << "x" << (n->axis + 1); return;
    case Kind::add: out << "("; print_node(n->a.get(), out); out << " + "; print_node(n->b.get(), out); out << ")"; return;
    case Kind::sub: out << "("; print_node(n->a.get(), out); out << " - "; print_node(n->b.get(), out); out << ")"; return;
    case Kind::mul: out << "("; print_node(n->a.get(), out); out << " * "; print_node(n->b.get(), out); out << ")"; return;
    case Kind::div: out << "("; print_node(n->a.get(), out); out << " / "; print_node(n->b.get(), out); out << ")"; return;
    case Kind::pow: out << "("; print_node(n->a.get(), out); out << "^"; print_node(n->b.get(), out); out << ")"; return;
    case Kind::neg: out << "(-"; print_node(n->a.get(), out); out << ")"; return;
    case Kind::fexp: out << "exp("; print_node(n->a.get(), out); out << ")"; return;
    case Kind::fsin: out << "sin("; print_node(n->a.get(), out); out << ")"; return;
    case Kind::fcos: out << "cos("; print_node(n->a.get(), out); out << ")"; return;
  }
}

}  // namespace

Expr Expr::parse(const std::string& text) { return Expr(Parser(text).run()); }

Expr Expr::constant(double c) { return Expr(make_num(c)); }

double Expr::eval(const Vec3& x) const {
  if (!node_) throw std::logic_error("eval of empty expression");
  return eval_node(node_.get(), x);
}

Expr Expr::diff(int axis) const {
  if (!node_) throw std::logic_error("diff of empty expression");
  return Expr(diff_node(node_, axis));
}

bool Expr::is_constant(double* value) const {
  if (node_ && node_->kind == Kind::num) {
    if (value) *value = node_->value;
    return true;
  }
  return false;
}

std::string Expr::str() const {
  if (!node_) return "";
  std::ostringstream out;
  print_node(node_.get(), out);
  return out.str();
}

Expr Expr::operator+(const Expr& o) const { return Expr(make_node(Kind::add, node_, o.node_)); }
Expr Expr::operator-(const Expr& o) const { return Expr(make_node(Kind::sub, node_, o.node_)); }
Expr Expr::operator*(const Expr& o) const { return Expr(make_node(Kind::mul, node_, o.node_)); }

}  // namespace robin
