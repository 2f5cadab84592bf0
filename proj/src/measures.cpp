#include "robin/measures.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace robin {

namespace {

// exact integrals of products of barycentric coordinates on a (d-1)-facet:
// int lambda^alpha = |F| k! prod(alpha_i!) / (k + |alpha|)!  with k = d-1
struct FacetQuad {
  double self2, cross2;        // int l_i l_j, |alpha| = 2
  double self3, two_one, all1; // int l_a l_b l_c patterns, |alpha| = 3
};

FacetQuad facet_quadrature(int dim) {
  if (dim == 2) return {1.0 / 3.0, 1.0 / 6.0, 1.0 / 4.0, 1.0 / 12.0, 0.0};
  return {1.0 / 6.0, 1.0 / 12.0, 1.0 / 10.0, 1.0 / 30.0, 1.0 / 60.0};
}

double triple_integral(const FacetQuad& q, int m, int i, int j) {
  if (m == i && i == j) return q.self3;
  if (m == i || m == j || i == j) return q.two_one;
  return q.all1;
}

}  // namespace

BoundaryField BoundaryField::from_vertex_values(const Mesh& mesh, const Field& values) {
  if (values.size() != mesh.n_vertices())
    throw std::invalid_argument("boundary field: vertex value size mismatch");
  BoundaryField out;
  out.continuous = true;
  out.vertex_values = values;
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (!mesh.boundary_vertex[v]) out.vertex_values[v] = 0.0;
  out.facet_values.resize(mesh.boundary_facets.size());
  for (std::size_t f = 0; f < mesh.boundary_facets.size(); ++f) {
    const auto& bf = mesh.boundary_facets[f];
    for (int k = 0; k < mesh.dim; ++k) out.facet_values[f][k] = out.vertex_values[bf.v[k]];
  }
  return out;
}

BoundaryField BoundaryField::from_constant(const Mesh& mesh, double value) {
  Field v = Field::Constant(mesh.n_vertices(), value);
  return from_vertex_values(mesh, v);
}

BoundaryField BoundaryField::from_function(const Mesh& mesh,
                                           const std::function<double(const Vec3&)>& f,
                                           bool force_facetwise) {
  if (!force_facetwise) {
    Field v = Field::Zero(mesh.n_vertices());
    for (int i = 0; i < mesh.n_vertices(); ++i)
      if (mesh.boundary_vertex[i]) v[i] = f(mesh.vertices[i]);
    return from_vertex_values(mesh, v);
  }
  BoundaryField out;
  out.continuous = false;
  out.facet_values.resize(mesh.boundary_facets.size());
  for (std::size_t fi = 0; fi < mesh.boundary_facets.size(); ++fi) {
    const auto& bf = mesh.boundary_facets[fi];
    for (int k = 0; k < mesh.dim; ++k) out.facet_values[fi][k] = f(mesh.vertices[bf.v[k]]);
  }
  return out;
}

double BoundaryField::min_value() const {
  double m = 0.0;
  bool first = true;
  for (const auto& fv : facet_values)
    for (double x : fv) {
      if (first) { m = x; first = false; }
      m = std::min(m, x);
    }
  return first ? 0.0 : m;
}

ProblemData constant_data(const Mesh& mesh, double f, double beta, double h) {
  ProblemData d;
  d.f = Field::Constant(mesh.n_vertices(), f);
  d.beta = BoundaryField::from_constant(mesh, beta);
  d.h = BoundaryField::from_constant(mesh, h);
  d.lambda_bound = 1.0;
  return d;
}

std::vector<std::string> validate_data(const Mesh& mesh, const ProblemData& data) {
  std::vector<std::string> out;
  const int nv = mesh.n_vertices();
  if (data.f.size() != 0 && data.f.size() != nv) out.push_back("f: size mismatch");
  if (!data.F.empty() && static_cast<int>(data.F.size()) != mesh.n_simplices())
    out.push_back("F: size mismatch");
  if (data.beta.empty()) out.push_back("beta: missing");
  if (data.h.empty()) out.push_back("h: missing");
  if (!out.empty()) return out;

  for (std::size_t fi = 0; fi < data.beta.facet_values.size(); ++fi)
    for (int k = 0; k < mesh.dim; ++k)
      if (data.beta.facet_values[fi][k] < 0) {
        out.push_back("(1.3): beta < 0 on facet " + std::to_string(fi));
        goto beta_sign_done;
      }
beta_sign_done:
  if (boundary_integral(mesh, data.beta) <= 0)
    out.push_back("(1.3): ||beta||_{L1(sigma)} = 0");

  for (std::size_t fi = 0; fi < data.h.facet_values.size(); ++fi)
    for (int k = 0; k < mesh.dim; ++k)
      if (data.h.facet_values[fi][k] < 0) {
        out.push_back("(1.2): h < 0 on facet " + std::to_string(fi));
        goto h_sign_done;
      }
h_sign_done:

  if (data.f.size() == nv)
    for (int v = 0; v < nv; ++v)
      if (data.f[v] < 0) {
        out.push_back("f < 0 at vertex " + std::to_string(v));
        break;
      }
  for (const auto& [v, mass] : data.atoms) {
    if (v < 0 || v >= nv) out.push_back("atom at nonexistent vertex " + std::to_string(v));
    else if (mass < 0) out.push_back("atom mass < 0 at vertex " + std::to_string(v));
  }

  {
    const double total = mu_total(mesh, data) + boundary_integral(mesh, data.h);
    if (!(total > 0)) out.push_back("(1.2): mu(D)+||h||_{L1(sigma)} = 0");
    if (!std::isfinite(total)) out.push_back("(1.2): mu(D)+||h||_{L1(sigma)} not finite");
  }

  if (!data.coeff_a.empty()) {
    if (static_cast<int>(data.coeff_a.size()) != mesh.n_simplices())
      out.push_back("coeff_a: size mismatch");
    else {
      const double lam = data.lambda_bound;
      const double tol = 1e-12 * std::max(1.0, lam);
      for (int s = 0; s < mesh.n_simplices(); ++s) {
        Eigen::MatrixXd a = data.coeff_a[s].topLeftCorner(mesh.dim, mesh.dim);
        if ((a - a.transpose()).cwiseAbs().maxCoeff() > tol) {
          out.push_back("(2.7): coeff_a not symmetric on simplex " + std::to_string(s));
          break;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
        const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
        if (lo < 1.0 / lam - tol || hi > lam + tol) {
          std::ostringstream os;
          os << "(2.7): coeff_a eigenvalues [" << lo << ", " << hi
             << "] outside [1/Lambda, Lambda] on simplex " << s;
          out.push_back(os.str());
          break;
        }
      }
    }
  }
  return out;
}

double mu_total(const Mesh& mesh, const ProblemData& data) {
  // <mu, 1>: the divergence part drops out (hat functions sum to one)
  double total = 0.0;
  if (data.f.size() == mesh.n_vertices()) {
    for (int s = 0; s < mesh.n_simplices(); ++s) {
      const double vol = mesh.simplex_volume(s);
      double favg = 0;
      for (int k = 0; k <= mesh.dim; ++k) favg += data.f[mesh.simplices[s][k]];
      total += vol * favg / (mesh.dim + 1);
    }
  }
  for (const auto& [v, mass] : data.atoms) {
    (void)v;
    total += mass;
  }
  return total;
}

Field interior_load(const Mesh& mesh, const ProblemData& data) {
  const int nv = mesh.n_vertices();
  Field b = Field::Zero(nv);
  const int d = mesh.dim;
  if (data.f.size() == nv) {
    for (int s = 0; s < mesh.n_simplices(); ++s) {
      const double vol = mesh.simplex_volume(s);
      const double diag = 2.0 * vol / ((d + 1) * (d + 2));
      const double off = vol / ((d + 1) * (d + 2));
      const auto& sp = mesh.simplices[s];
      for (int i = 0; i <= d; ++i) {
        double acc = 0;
        for (int j = 0; j <= d; ++j) acc += (i == j ? diag : off) * data.f[sp[j]];
        b[sp[i]] += acc;
      }
    }
  } else if (data.f.size() != 0) {
    throw std::invalid_argument("interior_load: f size mismatch");
  }
  if (!data.F.empty()) {
    for (int s = 0; s < mesh.n_simplices(); ++s) {
      const double vol = mesh.simplex_volume(s);
      const auto g = mesh.hat_gradients(s);
      for (int i = 0; i <= d; ++i) b[mesh.simplices[s][i]] += vol * vdot(data.F[s], g[i]);
    }
  }
  for (const auto& [v, mass] : data.atoms) {
    if (v < 0 || v >= nv)
      throw std::invalid_argument("interior_load: atom at nonexistent vertex " +
                                  std::to_string(v));
    b[v] += mass;
  }
  return b;
}

Field boundary_load(const Mesh& mesh, const BoundaryField& w) {
  if (w.facet_values.size() != mesh.boundary_facets.size())
    throw std::invalid_argument("boundary_load: facet count mismatch");
  const auto q = facet_quadrature(mesh.dim);
  Field b = Field::Zero(mesh.n_vertices());
  for (std::size_t fi = 0; fi < mesh.boundary_facets.size(); ++fi) {
    const auto& bf = mesh.boundary_facets[fi];
    for (int i = 0; i < mesh.dim; ++i) {
      double acc = 0;
      for (int m = 0; m < mesh.dim; ++m)
        acc += w.facet_values[fi][m] * (m == i ? q.self2 : q.cross2);
      b[bf.v[i]] += bf.measure * acc;
    }
  }
  return b;
}

Field boundary_load(const Mesh& mesh, const Field& w_vertex) {
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (mesh.boundary_vertex[v] && w_vertex[v] < 0)
      throw std::invalid_argument("boundary_load: negative entry at vertex " + std::to_string(v));
  return boundary_load(mesh, BoundaryField::from_vertex_values(mesh, w_vertex));
}

double boundary_integral(const Mesh& mesh, const BoundaryField& w) {
  double total = 0;
  for (std::size_t fi = 0; fi < mesh.boundary_facets.size(); ++fi) {
    double mean = 0;
    for (int k = 0; k < mesh.dim; ++k) mean += w.facet_values[fi][k];
    total += mesh.boundary_facets[fi].measure * mean / mesh.dim;
  }
  return total;
}

SpMat boundary_mass_matrix(const Mesh& mesh, const BoundaryField& weight) {
  if (weight.facet_values.size() != mesh.boundary_facets.size())
    throw std::invalid_argument("boundary_mass_matrix: facet count mismatch");
  const auto q = facet_quadrature(mesh.dim);
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t fi = 0; fi < mesh.boundary_facets.size(); ++fi) {
    const auto& bf = mesh.boundary_facets[fi];
    for (int i = 0; i < mesh.dim; ++i)
      for (int j = 0; j < mesh.dim; ++j) {
        double acc = 0;
        for (int m = 0; m < mesh.dim; ++m)
          acc += weight.facet_values[fi][m] * triple_integral(q, m, i, j);
        trips.emplace_back(bf.v[i], bf.v[j], bf.measure * acc);
      }
  }
  SpMat M(mesh.n_vertices(), mesh.n_vertices());
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

SpMat boundary_sigma_matrix(const Mesh& mesh) {
  const auto q = facet_quadrature(mesh.dim);
  std::vector<Eigen::Triplet<double>> trips;
  for (const auto& bf : mesh.boundary_facets)
    for (int i = 0; i < mesh.dim; ++i)
      for (int j = 0; j < mesh.dim; ++j)
        trips.emplace_back(bf.v[i], bf.v[j], bf.measure * (i == j ? q.self2 : q.cross2));
  SpMat M(mesh.n_vertices(), mesh.n_vertices());
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

SpMat mass_matrix(const Mesh& mesh) {
  const int d = mesh.dim;
  std::vector<Eigen::Triplet<double>> trips;
  for (int s = 0; s < mesh.n_simplices(); ++s) {
    const double vol = mesh.simplex_volume(s);
    const double diag = 2.0 * vol / ((d + 1) * (d + 2));
    const double off = vol / ((d + 1) * (d + 2));
    const auto& sp = mesh.simplices[s];
    for (int i = 0; i <= d; ++i)
      for (int j = 0; j <= d; ++j)
        trips.emplace_back(sp[i], sp[j], i == j ? diag : off);
  }
  SpMat M(mesh.n_vertices(), mesh.n_vertices());
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

}  // namespace robin
