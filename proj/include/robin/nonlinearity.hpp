#pragma once

#include <functional>
#include <string>
#include <vector>

namespace robin {

// Singular boundary nonlinearity g on (0, inf) with the power envelope
// c1 <= g(y) y^gamma <= c2. Power kind is g(y) = c y^{-gamma} with c1 = c2 = c.
struct Nonlinearity {
  enum class Kind { power, custom };
  Kind kind = Kind::power;
  double gamma = 1.0;
  double c1 = 1.0, c2 = 1.0;
  std::function<double(double)> custom_eval;  // used by Kind::custom, y > 0
  bool nonincreasing = true;                  // sampled for custom kinds

  static Nonlinearity power(double c, double gamma);
  static Nonlinearity custom(std::function<double(double)> eval, double gamma, double c1,
                             double c2);

  double operator()(double y) const;   // g(y), y > 0 (tiny floor guards y <= 0)
  double deriv(double y) const;        // g'(y); finite differences for custom

  // envelope and continuity checks on a log grid; empty means valid
  std::vector<std::string> validate() const;
};

// the regularization g_n(y) = g(y + 1/n) for y > 0, g(1/n) for y <= 0;
// n = 0 stands for the un-shifted limit (g itself, floored near 0)
struct Regularized {
  const Nonlinearity* g;
  long n;
  double operator()(double y) const;
  double deriv(double y) const;
};

Regularized regularize(const Nonlinearity& g, long n);

// truncation T_k(s) = max(-k, min(s, k))
double truncate(double k, double s);

}  // namespace robin
