#include <doctest.h>

#include <cstdio>

#include "robin/forms.hpp"
#include "robin/oracle.hpp"
#include "robin/rng.hpp"

using namespace robin;

namespace {
Mesh unit_square(int div) { return build_box_mesh(2, {0, 0, 0}, {1, 1, 0}, {div, div, 1}); }

// independent 2D stiffness oracle: cotangent weights, A_ij = -cot(theta_k)/2
Eigen::MatrixXd cotangent_stiffness(const Mesh& m) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m.n_vertices(), m.n_vertices());
  for (int s = 0; s < m.n_simplices(); ++s) {
    const auto& sp = m.simplices[s];
    for (int k = 0; k < 3; ++k) {
      const int i = sp[(k + 1) % 3], j = sp[(k + 2) % 3], o = sp[k];
      const Vec3 a = vsub(m.vertices[i], m.vertices[o]);
      const Vec3 b = vsub(m.vertices[j], m.vertices[o]);
      const double cot = vdot(a, b) / std::abs(a[0] * b[1] - a[1] * b[0]);
      A(i, j) -= 0.5 * cot;
      A(j, i) -= 0.5 * cot;
      A(i, i) += 0.5 * cot;
      A(j, j) += 0.5 * cot;
    }
  }
  return A;
}
}  // namespace

TEST_CASE("stiffness matches the cotangent oracle and kills constants") {
  const Mesh m = unit_square(3);
  const ProblemData d = constant_data(m, 0, 1, 1);
  const AssembledForm f = assemble(m, d);
  const Eigen::MatrixXd A(f.stiffness);
  const Eigen::MatrixXd want = cotangent_stiffness(m);
  CHECK((A - want).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((A - A.transpose()).cwiseAbs().maxCoeff() < 1e-13);
  const Field ones = Field::Ones(m.n_vertices());
  CHECK((f.stiffness * ones).lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("boundary mass total and coefficient scaling") {
  const Mesh m = unit_square(2);
  ProblemData d = constant_data(m, 0, 1, 1);
  const AssembledForm f1 = assemble(m, d);
  const Field ones = Field::Ones(m.n_vertices());
  CHECK(ones.dot(f1.boundary_mass * ones) == doctest::Approx(4.0).epsilon(1e-13));

  d.coeff_a.assign(m.n_simplices(), CoeffMat::Identity() * 2.0);
  d.lambda_bound = 2.0;
  const AssembledForm f2 = assemble(m, d);
  CHECK((Eigen::MatrixXd(f2.stiffness) - 2.0 * Eigen::MatrixXd(f1.stiffness))
            .cwiseAbs()
            .maxCoeff() < 1e-13);
}

TEST_CASE("energy values") {
  const Mesh m = unit_square(1);
  const AssembledForm f = assemble(m, constant_data(m, 0, 1, 1));
  const Field ones = Field::Ones(4), zero = Field::Zero(4);
  CHECK(energy(f, ones, ones) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(energy(f, zero, zero) == 0.0);
  CHECK_THROWS_AS(energy(f, Field::Ones(3), ones), std::invalid_argument);

  // 3-node path oracle: E part vanishes on constants, kappa part sums beta
  const AssembledForm pf = graph_form(path3(1.0, 1.0));
  const Field u = Field::Ones(3);
  CHECK(energy(pf, u, u) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("energy is a symmetric positive form") {
  const Mesh m = unit_square(3);
  const AssembledForm f = assemble(m, constant_data(m, 0, 1, 1));
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Field u(m.n_vertices()), v(m.n_vertices());
    for (int i = 0; i < m.n_vertices(); ++i) {
      u[i] = rng.next_uniform() - 0.5;
      v[i] = rng.next_uniform() - 0.5;
    }
    CHECK(energy(f, u, v) == doctest::Approx(energy(f, v, u)).epsilon(1e-12));
    CHECK(energy(f, u, u) >= 0.0);
  }
}

TEST_CASE("assembly is additive over simplices") {
  const Mesh m = unit_square(1);
  const AssembledForm f = assemble(m, constant_data(m, 0, 1, 1));
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(4, 4);
  char buf[256];
  for (int s = 0; s < 2; ++s) {
    const auto& sp = m.simplices[s];
    std::snprintf(buf, sizeof buf, "2 3 1 0\n%g %g\n%g %g\n%g %g\n0 1 2\n",
                  m.vertices[sp[0]][0], m.vertices[sp[0]][1], m.vertices[sp[1]][0],
                  m.vertices[sp[1]][1], m.vertices[sp[2]][0], m.vertices[sp[2]][1]);
    const Mesh tri = load_mesh(buf);
    const AssembledForm tf = assemble(tri, constant_data(tri, 0, 1, 1));
    const Eigen::MatrixXd At(tf.stiffness);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) acc(sp[i], sp[j]) += At(i, j);
  }
  CHECK((Eigen::MatrixXd(f.stiffness) - acc).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("norm equivalence bounds") {
  const Mesh m = unit_square(3);
  SUBCASE("beta = 0 gives c_low = 0") {
    ProblemData d = constant_data(m, 0, 0.0, 1);
    const auto [lo, hi] = norm_equivalence_bounds(assemble(m, d));
    CHECK(lo < 1e-6);
    CHECK(hi > 0);
  }
  SUBCASE("beta = 1 gives strictly positive constants") {
    const AssembledForm f = assemble(m, constant_data(m, 0, 1.0, 1));
    const auto [lo, hi] = norm_equivalence_bounds(f);
    CHECK(lo > 0);
    CHECK(hi >= lo);
    // sandwich on random vectors
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
      Field u(m.n_vertices());
      for (int i = 0; i < m.n_vertices(); ++i) u[i] = rng.next_uniform() - 0.3;
      const double k = std::sqrt(energy(f, u, u));
      const double h1 = h1_norm(f, u);
      CHECK(k >= lo * h1 * (1 - 1e-10));
      CHECK(k <= hi * h1 * (1 + 1e-10));
    }
  }
  SUBCASE("scaling beta by 4 multiplies M_kappa by 4 and at most doubles c_high") {
    const AssembledForm f1 = assemble(m, constant_data(m, 0, 1.0, 1));
    const AssembledForm f4 = assemble(m, constant_data(m, 0, 4.0, 1));
    CHECK((Eigen::MatrixXd(f4.boundary_mass) - 4.0 * Eigen::MatrixXd(f1.boundary_mass))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    const auto [lo1, hi1] = norm_equivalence_bounds(f1);
    const auto [lo4, hi4] = norm_equivalence_bounds(f4);
    CHECK(lo4 >= lo1 * (1 - 1e-12));
    CHECK(hi4 <= 2.0 * hi1 * (1 + 1e-12));
  }
}

TEST_CASE("energy zero forces constants vanishing on the beta support") {
  // discrete analogue of the transience argument: energy(u,u) = 0 with
  // ||beta|| > 0 can only happen for u = 0
  const Mesh m = unit_square(2);
  const AssembledForm f = assemble(m, constant_data(m, 0, 1.0, 1));
  const Eigen::MatrixXd K =
      Eigen::MatrixXd(f.stiffness) + Eigen::MatrixXd(f.boundary_mass);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  CHECK(es.eigenvalues().minCoeff() > 0);
}

TEST_CASE("assembly is worker-count independent") {
  const Mesh m = unit_square(4);
  const ProblemData d = constant_data(m, 0, 1, 1);
  const AssembledForm f1 = assemble(m, d, 1);
  const AssembledForm f3 = assemble(m, d, 3);
  CHECK((Eigen::MatrixXd(f1.stiffness) - Eigen::MatrixXd(f3.stiffness)).cwiseAbs().maxCoeff() ==
        0.0);
}
