#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "robin/mesh.hpp"

namespace robin {

using Field = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

// Piecewise-linear function on the boundary, stored per facet vertex so that
// facewise data (manufactured h) may be discontinuous at corners. Fields built
// from vertex values keep the nodal vector alongside.
struct BoundaryField {
  std::vector<std::array<double, 3>> facet_values;  // one entry per boundary facet
  bool continuous = false;
  Field vertex_values;  // size n_vertices, zero off the boundary; valid iff continuous

  static BoundaryField from_vertex_values(const Mesh& mesh, const Field& values);
  static BoundaryField from_constant(const Mesh& mesh, double value);
  static BoundaryField from_function(const Mesh& mesh,
                                     const std::function<double(const Vec3&)>& f,
                                     bool force_facetwise = false);
  double min_value() const;
  bool empty() const { return facet_values.empty() && !continuous; }
};

// coefficient matrix a on a simplex; unused dimensions act as the identity
using CoeffMat = Eigen::Matrix3d;

struct ProblemData {
  Field f;                                     // interior density per vertex
  std::vector<Vec3> F;                         // divergence part, constant per simplex
  std::vector<std::pair<int, double>> atoms;   // (vertex, mass)
  BoundaryField beta;
  BoundaryField h;
  std::vector<CoeffMat> coeff_a;               // per simplex; empty means a = I
  double lambda_bound = 1.0;                   // ellipticity constant in (2.7)
};

ProblemData constant_data(const Mesh& mesh, double f, double beta, double h);

// admissibility per (1.2), (1.3), (2.7); empty result means admissible
std::vector<std::string> validate_data(const Mesh& mesh, const ProblemData& data);

// load vector of the interior measure mu = f - div(F) + atoms:
// b[i] = int f phi_i dx + int F . grad phi_i dx + atom masses at vertices
Field interior_load(const Mesh& mesh, const ProblemData& data);

// total mass <mu, 1>
double mu_total(const Mesh& mesh, const ProblemData& data);

// b[i] = int_dD w phi_i dsigma, exact for piecewise-linear w
Field boundary_load(const Mesh& mesh, const BoundaryField& w);
Field boundary_load(const Mesh& mesh, const Field& w_vertex);

// int_dD w dsigma (exact)
double boundary_integral(const Mesh& mesh, const BoundaryField& w);

// facet mass matrix with piecewise-linear weight: M[i][j] = int w phi_i phi_j dsigma
SpMat boundary_mass_matrix(const Mesh& mesh, const BoundaryField& weight);

// unweighted facet mass matrix (weight = 1)
SpMat boundary_sigma_matrix(const Mesh& mesh);

// volume P1 mass matrix
SpMat mass_matrix(const Mesh& mesh);

}  // namespace robin
