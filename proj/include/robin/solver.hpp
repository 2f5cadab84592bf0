#pragma once

#include <optional>

#include "robin/expr.hpp"
#include "robin/greenop.hpp"
#include "robin/nonlinearity.hpp"
#include "robin/oracle.hpp"

namespace robin {

// One solvable problem: Green operator plus the discrete loads. Wraps both FEM
// instances (mesh + data) and graph instances (DiscreteForm), so the solver
// and the dense oracle run through the same code path.
struct Instance {
  const GreenOperator* op = nullptr;
  Field b_mu;
  double mu_mass = 0.0;
  std::vector<char> boundary_flag;
  int n = 0;

  // vertexwise boundary data (FEM with nodal h, graphs)
  SpMat Bsigma;      // load of w given nodal values: b = Bsigma w
  Field h_vertex;
  // facetwise boundary data (manufactured h, possibly discontinuous at corners)
  bool facetwise = false;
  const Mesh* mesh = nullptr;
  BoundaryField h_facet;

  Field boundary_load_gu(const Field& gu, long h_trunc) const;  // load of T_n(h) g(u)
  double hg_l1(const Field& gu) const;                          // ||h g(u)||_{L1(sigma)}
  bool newton_available() const { return !facetwise; }
};

Instance make_instance(const Mesh& mesh, const ProblemData& data, const GreenOperator& op);
Instance make_instance(const DiscreteForm& form, const GreenOperator& op);

struct SolveOptions {
  long n_max = 1024;        // regularization schedule 1, 2, 4, ..., n_max
  std::vector<long> schedule;  // overrides the doubling schedule when nonempty
  double tol = 1e-8;        // fixed-point residual, scaled by max(1, |u|_inf)
  double tol_outer = 1e-9;  // early stop when consecutive stages agree
  double tol_mono = 1e-7;   // slack for the discrete monotonicity check
  double omega = 0.5;       // damping of the fixed-point iteration
  int max_inner = 600;
  bool polish = true;       // final stage with the un-regularized g
};

struct StageResult {
  long n = 0;  // 0 marks the un-regularized final stage
  Field u;
  int iterations = 0;
  double residual = 0.0;
  bool newton_used = false;
  std::vector<double> residual_history;
};

struct SolveReport {
  std::vector<StageResult> stages;
  Field u;
  double final_residual = 0.0;
  double hg_l1 = 0.0;              // ||h g(u)||_{L1(sigma)} at the solution
  double min_u = 0.0;
  bool monotone_ok = true;         // u_n <= u_{n+1} + tol_mono across the schedule
  double worst_monotonicity_violation = 0.0;
  bool uniqueness_guaranteed = false;  // g nonincreasing
  long green_iterations = 0;           // cumulative CG iterations spent
  double wall_seconds = 0.0;           // never serialized
};

// fixed point of u = G^kappa(b_mu + load(T_n(h) g_n(u))) for one n;
// damped iteration with a Newton fallback once the contraction stalls
StageResult solve_fixed_n(const Instance& inst, const Nonlinearity& g, long n, long h_trunc,
                          const Field& u_init, const SolveOptions& opts);

// the constructive scheme: warm-started schedule n = 1, 2, 4, ... followed by
// the un-regularized fixed point
SolveReport solve(const Instance& inst, const Nonlinearity& g, const SolveOptions& opts = {});

// pure-power companion problems with the envelope constants c1 <= c2;
// returns (u_sub, u_super)
std::pair<Field, Field> bracket_solutions(const Instance& inst, const Nonlinearity& g,
                                          const SolveOptions& opts = {});

struct MixedReport {
  SolveReport main;
  Field u_comp1, u_comp2;  // single-exponent comparison solutions at the final stage
  double worst_comparison_violation = 0.0;  // of u^i_n <= u_n
  double worst_envelope_violation = 0.0;    // of the 2^gamma envelope bound
  bool comparison_ok = true;
  bool envelope_ok = true;
};

// boundary nonlinearity h (g1(u) + g2(u)) with per-stage comparison bounds
MixedReport solve_mixed(const Instance& inst, const Nonlinearity& g1, const Nonlinearity& g2,
                        const SolveOptions& opts = {});

// renormalized-solution defect: nu_k[i] = E^kappa(T_k(u), phi_i) - <mu + h g(u) sigma, phi_i>;
// returns the vector and its total variation
std::pair<Field, double> renormalized_defect(const Instance& inst, const Nonlinearity& g,
                                             const Field& u, double k);

// manufactured problems: back out data so that u_star solves the continuum
// problem exactly
struct ManufacturedProblem {
  ProblemData data;
  Expr u_star;
  std::array<Expr, 3> grad_u_star;
  Field u_star_vertex;
};

ManufacturedProblem manufactured_data(const Mesh& mesh, const Expr& u_star,
                                      const std::array<std::array<Expr, 3>, 3>& a,
                                      const Expr& beta, const Nonlinearity& g);
ManufacturedProblem manufactured_data(const Mesh& mesh, const std::string& u_star,
                                      const std::string& beta, const Nonlinearity& g);

// H1 error |u_h - u*| with the gradient evaluated at simplex centroids
double mms_h1_error(const Mesh& mesh, const Field& u_h, const ManufacturedProblem& mms);

}  // namespace robin
