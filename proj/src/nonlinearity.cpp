#include "robin/nonlinearity.hpp"

#include <cmath>
#include <stdexcept>

namespace robin {

namespace {
// evaluation floor: keeps g total on R without masking genuine blow-up
constexpr double kFloor = 1e-30;
}

Nonlinearity Nonlinearity::power(double c, double gamma) {
  if (!(c > 0) || !(gamma > 0))
    throw std::invalid_argument("nonlinearity: power kind needs c > 0, gamma > 0");
  Nonlinearity g;
  g.kind = Kind::power;
  g.gamma = gamma;
  g.c1 = g.c2 = c;
  g.nonincreasing = true;
  return g;
}

Nonlinearity Nonlinearity::custom(std::function<double(double)> eval, double gamma, double c1,
                                  double c2) {
  if (!(gamma > 0) || !(c1 > 0) || !(c2 >= c1))
    throw std::invalid_argument("nonlinearity: need gamma > 0 and 0 < c1 <= c2");
  Nonlinearity g;
  g.kind = Kind::custom;
  g.gamma = gamma;
  g.c1 = c1;
  g.c2 = c2;
  g.custom_eval = std::move(eval);
  // sample monotonicity on a log grid
  g.nonincreasing = true;
  double prev = g.custom_eval(1e-8);
  for (double y = 1e-8; y <= 1e8; y *= 1.2589254117941673) {
    const double v = g.custom_eval(y);
    if (v > prev * (1 + 1e-12) + 1e-300) {
      g.nonincreasing = false;
      break;
    }
    prev = v;
  }
  return g;
}

double Nonlinearity::operator()(double y) const {
  y = std::max(y, kFloor);
  if (kind == Kind::power) return c1 * std::pow(y, -gamma);
  return custom_eval(y);
}

double Nonlinearity::deriv(double y) const {
  y = std::max(y, kFloor);
  if (kind == Kind::power) return -gamma * c1 * std::pow(y, -gamma - 1.0);
  const double dy = 1e-7 * std::max(1.0, std::abs(y));
  return (custom_eval(y + dy) - custom_eval(std::max(kFloor, y - dy))) / (2 * dy);
}

std::vector<std::string> Nonlinearity::validate() const {
  std::vector<std::string> out;
  if (!(gamma > 0)) out.push_back("gamma must be positive");
  if (!(c1 > 0) || !(c2 >= c1)) out.push_back("need 0 < c1 <= c2");
  if (kind == Kind::custom && !custom_eval) out.push_back("custom nonlinearity without eval");
  if (!out.empty()) return out;
  const double tol = 1e-9;
  for (double y = 1e-8; y <= 1e8; y *= 1.5848931924611136) {
    const double env = (*this)(y)*std::pow(y, gamma);
    if (env < c1 * (1 - tol) - tol || env > c2 * (1 + tol) + tol) {
      out.push_back("(1.4): envelope violated at y = " + std::to_string(y) +
                    " (g(y) y^gamma = " + std::to_string(env) + ")");
      break;
    }
  }
  return out;
}

double Regularized::operator()(double y) const {
  if (n <= 0) return (*g)(y);
  const double shift = 1.0 / static_cast<double>(n);
  return y > 0 ? (*g)(y + shift) : (*g)(shift);
}

double Regularized::deriv(double y) const {
  if (n <= 0) return y > 0 ? g->deriv(y) : 0.0;
  const double shift = 1.0 / static_cast<double>(n);
  return y > 0 ? g->deriv(y + shift) : 0.0;
}

Regularized regularize(const Nonlinearity& g, long n) {
  if (n < 0) throw std::invalid_argument("regularize: n must be >= 0");
  return Regularized{&g, n};
}

double truncate(double k, double s) {
  if (!(k > 0)) throw std::invalid_argument("truncate: k must be positive");
  return std::max(-k, std::min(s, k));
}

}  // namespace robin
