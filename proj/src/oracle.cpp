#include "robin/oracle.hpp"

#include <stdexcept>

namespace robin {

Eigen::MatrixXd green_dense(const DiscreteForm& form) {
  if (form.n() > 2000)
    throw std::invalid_argument("green_dense: dense laboratory capped at 2000 nodes");
  Eigen::MatrixXd M = form.L;
  M.diagonal() += form.K;
  Eigen::LDLT<Eigen::MatrixXd> f(M);
  const double dmax = f.vectorD().maxCoeff();
  if (f.info() != Eigen::Success || f.vectorD().minCoeff() <= 1e-12 * std::max(1.0, dmax))
    throw std::runtime_error("green_dense: L + K is not positive definite");
  return f.solve(Eigen::MatrixXd::Identity(form.n(), form.n()));
}

Eigen::VectorXd fixed_point_exact(const DiscreteForm& form, const Nonlinearity& g, double tol,
                                  const std::function<double(double)>* g_override) {
  const Eigen::MatrixXd G = green_dense(form);
  const int n = form.n();
  auto geval = [&](double y) { return g_override ? (*g_override)(std::max(y, 1e-30)) : g(y); };

  auto phi = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd rhs = form.mu_vec;
    for (int i = 0; i < n; ++i)
      if (form.boundary[i] && form.sigma_w[i] > 0)
        rhs[i] += form.h_vec[i] * geval(u[i]) * form.sigma_w[i];
    return (G * rhs).eval();
  };

  Eigen::VectorXd u = phi(Eigen::VectorXd::Ones(n));
  double omega = 0.5;
  double res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 100000; ++it) {
    const Eigen::VectorXd pu = phi(u);
    const double r = (pu - u).lpNorm<Eigen::Infinity>();
    if (r <= tol * std::max(1.0, u.lpNorm<Eigen::Infinity>())) return u;
    if (r > res) omega = std::max(0.05, 0.7 * omega);  // stalled, damp harder
    res = r;
    u = (1 - omega) * u + omega * pu;
  }
  throw std::runtime_error("fixed_point_exact: no convergence (residual " + std::to_string(res) +
                           ")");
}

DiscreteForm path3(double beta, double h) {
  DiscreteForm f;
  f.L.setZero(3, 3);
  f.L << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  f.sigma_w.setZero(3);
  f.sigma_w << 1, 0, 1;
  f.K = beta * f.sigma_w;
  f.mu_vec.setZero(3);
  f.h_vec.setZero(3);
  f.h_vec << h, 0, h;
  f.boundary = {1, 0, 1};
  return f;
}

DiscreteForm random_graph(Rng& rng, int n_max) {
  const int n = 3 + static_cast<int>(rng.next_uniform() * (n_max - 3));
  DiscreteForm f;
  f.L.setZero(n, n);
  auto add_edge = [&](int a, int b, double w) {
    f.L(a, b) -= w;
    f.L(b, a) -= w;
    f.L(a, a) += w;
    f.L(b, b) += w;
  };
  // random spanning tree keeps the graph connected, then a few extra edges
  for (int v = 1; v < n; ++v) {
    const int p = static_cast<int>(rng.next_uniform() * v);
    add_edge(v, p, 0.2 + 1.8 * rng.next_uniform());
  }
  const int extra = n / 3;
  for (int e = 0; e < extra; ++e) {
    const int a = static_cast<int>(rng.next_uniform() * n);
    const int b = static_cast<int>(rng.next_uniform() * n);
    if (a != b) add_edge(a, b, 0.2 + 1.8 * rng.next_uniform());
  }
  f.sigma_w.setZero(n);
  f.K.setZero(n);
  f.mu_vec.setZero(n);
  f.h_vec.setZero(n);
  f.boundary.assign(n, 0);
  int nb = 0;
  for (int v = 0; v < n; ++v) {
    if (rng.next_uniform() < 0.4) {
      f.boundary[v] = 1;
      ++nb;
      f.sigma_w[v] = 0.3 + 1.7 * rng.next_uniform();
      f.h_vec[v] = rng.next_uniform() < 0.8 ? 1.5 * rng.next_uniform() : 0.0;
    }
    f.mu_vec[v] = rng.next_uniform() < 0.5 ? rng.next_uniform() : 0.0;
  }
  if (nb == 0) {
    f.boundary[0] = 1;
    f.sigma_w[0] = 1.0;
    f.h_vec[0] = 1.0;
  }
  // beta > 0 somewhere on the boundary (condition (1.3))
  for (int v = 0; v < n; ++v)
    if (f.boundary[v]) f.K[v] = f.sigma_w[v] * (0.3 + 1.7 * rng.next_uniform());
  // make sure (1.2) is nontrivial
  if (f.mu_vec.sum() + f.h_vec.dot(f.sigma_w) <= 0) f.mu_vec[0] = 1.0;
  return f;
}

DiscreteForm export_fem(const Mesh& mesh, const ProblemData& data) {
  if (mesh.n_vertices() > 2000)
    throw std::invalid_argument("export_fem: dense laboratory capped at 2000 vertices");
  if (!data.h.continuous)
    throw std::invalid_argument("export_fem: requires nodal h");
  DiscreteForm out;
  const int n = mesh.n_vertices();
  out.L = Eigen::MatrixXd(SpMat(assemble(mesh, data).stiffness));
  const Field ones = Field::Ones(n);
  out.K = boundary_mass_matrix(mesh, data.beta) * ones;   // row-sum lumping
  out.sigma_w = boundary_sigma_matrix(mesh) * ones;
  out.mu_vec = interior_load(mesh, data);
  out.h_vec = data.h.vertex_values;
  out.boundary.assign(mesh.boundary_vertex.begin(), mesh.boundary_vertex.end());
  return out;
}

AssembledForm graph_form(const DiscreteForm& form) {
  AssembledForm out;
  const int n = form.n();
  out.n = n;
  out.mesh_size = 0.0;
  out.stiffness = form.L.sparseView();
  out.stiffness_unit = out.stiffness;
  std::vector<Eigen::Triplet<double>> tk, ts, tm;
  for (int i = 0; i < n; ++i) {
    if (form.K[i] != 0) tk.emplace_back(i, i, form.K[i]);
    if (form.sigma_w[i] != 0) ts.emplace_back(i, i, form.sigma_w[i]);
    tm.emplace_back(i, i, 1.0);
  }
  out.boundary_mass.resize(n, n);
  out.boundary_mass.setFromTriplets(tk.begin(), tk.end());
  out.boundary_sigma.resize(n, n);
  out.boundary_sigma.setFromTriplets(ts.begin(), ts.end());
  out.mass.resize(n, n);
  out.mass.setFromTriplets(tm.begin(), tm.end());
  return out;
}

}  // namespace robin
