#pragma once

#include <Eigen/Dense>

#include "robin/forms.hpp"
#include "robin/nonlinearity.hpp"
#include "robin/rng.hpp"

namespace robin {

// Dense discrete Dirichlet-form laboratory on weighted graphs. Supplies exact
// ground truth for the solver tests; capped at small n by design.
struct DiscreteForm {
  Eigen::MatrixXd L;       // symmetric, L.1 = 0, off-diagonals <= 0 in graph mode
  Eigen::VectorXd K;       // diagonal kappa weights (beta * sigma_w)
  Eigen::VectorXd sigma_w; // boundary sigma weights (0 at interior nodes)
  Eigen::VectorXd mu_vec;  // interior measure
  Eigen::VectorXd h_vec;   // boundary h values
  std::vector<char> boundary;

  int n() const { return static_cast<int>(L.rows()); }
};

// exact inverse (L + diag K)^{-1} by dense elimination
Eigen::MatrixXd green_dense(const DiscreteForm& form);

// brute-force fixed point u = G(mu + h g(u) sigma_w) via damped iteration with
// adaptive relaxation; the independent oracle for the solver tests
Eigen::VectorXd fixed_point_exact(const DiscreteForm& form, const Nonlinearity& g,
                                  double tol = 1e-14,
                                  const std::function<double(double)>* g_override = nullptr);

// canonical 3-node path instance: unit edge weights, boundary {0, 2}
DiscreteForm path3(double beta = 1.0, double h = 1.0);

// random connected weighted graph with random admissible data
DiscreteForm random_graph(Rng& rng, int n_max = 50);

// lumped export of a FEM instance (diagonal kappa and sigma weights); the
// adapter below solves the identical operator through the solver machinery
DiscreteForm export_fem(const Mesh& mesh, const ProblemData& data);

// adapter so the FEM-side machinery (GreenOperator, singular solver) can run
// on a graph instance
AssembledForm graph_form(const DiscreteForm& form);

}  // namespace robin
