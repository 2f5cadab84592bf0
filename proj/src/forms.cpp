#include "robin/forms.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

#include "robin/parallel.hpp"

namespace robin {

namespace {

void element_stiffness(const Mesh& mesh, const ProblemData* data, int s,
                       std::vector<Eigen::Triplet<double>>& tA,
                       std::vector<Eigen::Triplet<double>>& tI) {
  const int d = mesh.dim;
  const double vol = mesh.simplex_volume(s);
  const auto g = mesh.hat_gradients(s);
  const auto& sp = mesh.simplices[s];
  const bool has_a = data && !data->coeff_a.empty();
  for (int i = 0; i <= d; ++i)
    for (int j = 0; j <= d; ++j) {
      const double kij = vol * vdot(g[i], g[j]);
      tI.emplace_back(sp[i], sp[j], kij);
      if (has_a) {
        Vec3 ag{0, 0, 0};
        const CoeffMat& a = data->coeff_a[s];
        for (int r = 0; r < d; ++r)
          for (int c = 0; c < d; ++c) ag[r] += a(r, c) * g[j][c];
        tA.emplace_back(sp[i], sp[j], vol * vdot(g[i], ag));
      } else {
        tA.emplace_back(sp[i], sp[j], kij);
      }
    }
}

}  // namespace

AssembledForm assemble(const Mesh& mesh, const ProblemData& data, int threads) {
  AssembledForm form;
  form.n = mesh.n_vertices();
  form.mesh_size = mesh.max_diameter();

  const int ns = mesh.n_simplices();
  // per-chunk accumulation, merged in chunk order so results do not depend on
  // the worker count
  const int nchunks = std::max(1, std::min(threads, ns));
  std::vector<std::vector<Eigen::Triplet<double>>> chunkA(nchunks), chunkI(nchunks);
  parallel_for(nchunks, threads, [&](std::size_t c0, std::size_t c1) {
    for (std::size_t c = c0; c < c1; ++c) {
      const int lo = static_cast<int>(c * ns / nchunks);
      const int hi = static_cast<int>((c + 1) * ns / nchunks);
      for (int s = lo; s < hi; ++s) element_stiffness(mesh, &data, s, chunkA[c], chunkI[c]);
    }
  });
  std::vector<Eigen::Triplet<double>> tA, tI;
  for (int c = 0; c < nchunks; ++c) {
    tA.insert(tA.end(), chunkA[c].begin(), chunkA[c].end());
    tI.insert(tI.end(), chunkI[c].begin(), chunkI[c].end());
  }
  form.stiffness.resize(form.n, form.n);
  form.stiffness.setFromTriplets(tA.begin(), tA.end());
  form.stiffness_unit.resize(form.n, form.n);
  form.stiffness_unit.setFromTriplets(tI.begin(), tI.end());

  form.boundary_mass = boundary_mass_matrix(mesh, data.beta);
  form.boundary_sigma = boundary_sigma_matrix(mesh);
  form.mass = mass_matrix(mesh);
  return form;
}

double energy(const AssembledForm& form, const Field& u, const Field& v) {
  if (u.size() != form.n || v.size() != form.n)
    throw std::invalid_argument("energy: dimension mismatch");
  return u.dot(form.stiffness * v) + u.dot(form.boundary_mass * v);
}

double h1_norm(const AssembledForm& form, const Field& u) {
  return std::sqrt(u.dot(form.stiffness_unit * u) + u.dot(form.mass * u));
}

namespace {

Field cg_once(const SpMat& M, const Field& b, double tol, int max_iter) {
  Field x = Field::Zero(b.size());
  Eigen::VectorXd dinv = M.diagonal();
  for (int i = 0; i < dinv.size(); ++i) dinv[i] = dinv[i] > 0 ? 1.0 / dinv[i] : 1.0;
  Field r = b, z = dinv.asDiagonal() * r, p = z;
  double rz = r.dot(z);
  const double bnorm = b.norm();
  for (int it = 0; it < max_iter && r.norm() > tol * bnorm; ++it) {
    const Field Mp = M * p;
    const double alpha = rz / p.dot(Mp);
    x += alpha * p;
    r -= alpha * Mp;
    z = dinv.asDiagonal() * r;
    const double rz2 = r.dot(z);
    p = z + (rz2 / rz) * p;
    rz = rz2;
  }
  return x;
}

}  // namespace

std::pair<double, double> norm_equivalence_bounds(const AssembledForm& form) {
  const SpMat K = form.stiffness + form.boundary_mass;
  const SpMat H = form.stiffness_unit + form.mass;
  if (form.n <= 2000) {
    const Eigen::MatrixXd Kd(K), Hd(H);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Kd, Hd);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("norm_equivalence_bounds: eigensolver failed");
    const double lo = std::max(0.0, es.eigenvalues().minCoeff());
    const double hi = std::max(0.0, es.eigenvalues().maxCoeff());
    return {std::sqrt(lo), std::sqrt(hi)};
  }
  // large meshes: extremal Rayleigh quotients of the pencil (K, H) by
  // (inverse) power iteration with inner CG solves
  Eigen::VectorXd x = Eigen::VectorXd::Ones(form.n);
  double hi = 0;
  for (int it = 0; it < 100; ++it) {
    x = cg_once(H, K * x, 1e-10, 5000);
    x /= x.norm();
    hi = x.dot(K * x) / x.dot(H * x);
  }
  Eigen::VectorXd y = Eigen::VectorXd::Ones(form.n);
  y[0] += 0.5;  // break symmetry
  double lo = 0;
  for (int it = 0; it < 100; ++it) {
    y = cg_once(K, H * y, 1e-10, 5000);
    y /= y.norm();
    lo = y.dot(K * y) / y.dot(H * y);
  }
  return {std::sqrt(std::max(0.0, lo)), std::sqrt(hi)};
}

}  // namespace robin
