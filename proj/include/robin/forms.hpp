#pragma once

#include "robin/measures.hpp"

namespace robin {

// Assembled bilinear forms: stiffness with coefficient a, the boundary
// perturbation M_kappa (kappa = beta.sigma), and the companions used for the
// discrete H1 norm and boundary loads.
struct AssembledForm {
  SpMat stiffness;       // A[i][j] = int a grad(phi_j) . grad(phi_i) dx
  SpMat stiffness_unit;  // same with a = I (discrete H1 seminorm)
  SpMat boundary_mass;   // M_kappa[i][j] = int beta phi_i phi_j dsigma
  SpMat boundary_sigma;  // unweighted facet mass (loads, ||.||_L1(sigma))
  SpMat mass;            // volume P1 mass
  double mesh_size = 0;  // max simplex diameter
  int n = 0;
};

AssembledForm assemble(const Mesh& mesh, const ProblemData& data, int threads = 1);

// E^kappa(u, v) = u' (A + M_kappa) v
double energy(const AssembledForm& form, const Field& u, const Field& v);

// discrete H1 norm: sqrt(u' (A_I + M) u)
double h1_norm(const AssembledForm& form, const Field& u);

// extremal constants of ||.||_kappa vs ||.||_H1 (eq. of the norm equivalence):
// returns (c_low, c_high) with c^2 the extreme Rayleigh quotients of
// (A + M_kappa) against (A_I + M). Dense solve up to ~2000 vertices,
// Rayleigh iteration beyond.
std::pair<double, double> norm_equivalence_bounds(const AssembledForm& form);

}  // namespace robin
