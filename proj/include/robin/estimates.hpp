#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "robin/solver.hpp"

namespace robin {

struct EstimateVerdict {
  std::string name;
  double lhs = 0, rhs = 0;
  double slack = 0;       // lhs / rhs
  double allowance = 0;   // discretization allowance, reported separately
  bool pass = false;
  std::string context;
};

// energy estimate E^kappa(T_k u, T_k u) <= k (mu(D) + ||h g(u)||_L1(sigma))
// checked for every k in the grid with relative tol plus an O(mesh-size)
// allowance
std::vector<EstimateVerdict> check_energy_truncation(const AssembledForm& form,
                                                     const Instance& inst,
                                                     const Nonlinearity& g, const Field& u,
                                                     const std::vector<double>& k_grid,
                                                     double tol = 1e-6,
                                                     double allowance_coeff = 1.0);

// power energy estimate with mu = 0: E^kappa(u^{(1+gamma)/2}, same) against
// ||h||_L1(sigma); the verdict records the empirical ratio c_emp, stability
// across refinements is judged by the caller
EstimateVerdict check_power_energy(const AssembledForm& form, const Instance& inst,
                                   const Field& u, double gamma);

struct TailResult {
  double sup_tr_lambda = 0;  // sup over the t-grid of t^r lambda(t)
  double slope = 0;          // log-log least squares slope of the tail
  std::vector<std::pair<double, double>> curve;  // (t, lambda(t))
};

// weighted distribution tails: lambda(t) = sum of weights where value >= t
TailResult tail_exponent(const std::vector<std::pair<double, double>>& samples, double r_claim);

// exact rational exponents
struct Frac {
  long long num = 0, den = 1;
  double value() const;
  std::string str() const;
};

struct ExponentTable {
  Frac p, q, r;                     // data integrability (Prop on weak solutions)
  Frac m_interior, m_grad, m_boundary;  // Marcinkiewicz orders
  bool in_paper_regime = true;      // d >= 3
};

ExponentTable weak_solution_exponents(int d, double gamma);

// stability of the solution map under L1 perturbations of f (dense level):
// |u_n - u| <= G^kappa |f_n - f| vertexwise
std::vector<EstimateVerdict> check_stability(const DiscreteForm& base,
                                             const std::vector<Eigen::VectorXd>& f_sequence,
                                             const Nonlinearity& g, double tol = 1e-10);

// randomized ordered data pairs on one mesh; returns per-pair verdicts of the
// comparison principle u_1 <= u_2
std::vector<EstimateVerdict> comparison_batch(const Mesh& mesh, int n_pairs, uint64_t seed,
                                              double tol = 1e-8);

}  // namespace robin
