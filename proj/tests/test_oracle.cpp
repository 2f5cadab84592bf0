#include <doctest.h>

#include "robin/oracle.hpp"
#include "robin/solver.hpp"

using namespace robin;

TEST_CASE("dense Green matrix of the path graph") {
  const DiscreteForm f = path3(1.0, 1.0);
  const Eigen::MatrixXd G = green_dense(f);
  // (L+K) = [[2,-1,0],[-1,2,-1],[0,-1,2]], inverse = (1/4)[[3,2,1],[2,4,2],[1,2,3]]
  Eigen::MatrixXd want(3, 3);
  want << 3, 2, 1, 2, 4, 2, 1, 2, 3;
  want /= 4.0;
  CHECK((G - want).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((G - G.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  const Eigen::VectorXd col = G * Eigen::VectorXd::Unit(3, 1);
  CHECK(col[0] == doctest::Approx(0.5));
  CHECK(col[1] == doctest::Approx(1.0));
  CHECK(col[2] == doctest::Approx(0.5));
}

TEST_CASE("large diagonal limit") {
  DiscreteForm f = path3(1.0, 1.0);
  const double large = 1e9;
  f.K.setConstant(large);
  const Eigen::MatrixXd G = green_dense(f);
  for (int i = 0; i < 3; ++i) CHECK(G(i, i) == doctest::Approx(1.0 / large).epsilon(1e-6));
}

TEST_CASE("singular form is rejected") {
  DiscreteForm f = path3(0.0, 1.0);  // beta = 0: constants in the kernel
  CHECK_THROWS_AS(green_dense(f), std::runtime_error);
}

TEST_CASE("exact fixed points on the path graph") {
  SUBCASE("beta = 1: u = (1,1,1)") {
    const Eigen::VectorXd u = fixed_point_exact(path3(1.0, 1.0), Nonlinearity::power(1, 1));
    for (int i = 0; i < 3; ++i) CHECK(u[i] == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("beta = 2: u = 1/sqrt(2)") {
    const Eigen::VectorXd u = fixed_point_exact(path3(2.0, 1.0), Nonlinearity::power(1, 1));
    for (int i = 0; i < 3; ++i)
      CHECK(u[i] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));
  }
  SUBCASE("h = 0 decouples the nonlinearity") {
    DiscreteForm f = path3(1.0, 0.0);
    f.mu_vec << 0, 1, 0;
    const Eigen::VectorXd u = fixed_point_exact(f, Nonlinearity::power(1, 1));
    CHECK(u[0] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(u[1] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(u[2] == doctest::Approx(0.5).epsilon(1e-13));
  }
}

TEST_CASE("fixed point residual plugs back to 1e-13") {
  Rng rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const DiscreteForm f = random_graph(rng, 30);
    const Nonlinearity g = Nonlinearity::power(0.5 + rng.next_uniform(), 0.5 + rng.next_uniform());
    const Eigen::VectorXd u = fixed_point_exact(f, g);
    const Eigen::MatrixXd G = green_dense(f);
    Eigen::VectorXd rhs = f.mu_vec;
    for (int i = 0; i < f.n(); ++i)
      if (f.boundary[i] && f.sigma_w[i] > 0) rhs[i] += f.h_vec[i] * g(u[i]) * f.sigma_w[i];
    CHECK((u - G * rhs).lpNorm<Eigen::Infinity>() < 1e-12 * std::max(1.0, u.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("random graphs satisfy the structural invariants") {
  Rng rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const DiscreteForm f = random_graph(rng, 50);
    CHECK(f.n() <= 50);
    CHECK((f.L - f.L.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((f.L * Eigen::VectorXd::Ones(f.n())).cwiseAbs().maxCoeff() < 1e-12);
    for (int i = 0; i < f.n(); ++i)
      for (int j = 0; j < f.n(); ++j)
        if (i != j) CHECK(f.L(i, j) <= 0);
    CHECK(f.K.sum() > 0);
    CHECK(f.mu_vec.sum() + f.h_vec.dot(f.sigma_w) > 0);
  }
}

TEST_CASE("lumped FEM export agrees with the solver on the same operator") {
  const Mesh m = build_box_mesh(2, {0, 0, 0}, {1, 1, 0}, {4, 4, 1});
  ProblemData d = constant_data(m, 0.3, 1.0, 1.0);
  const DiscreteForm ex = export_fem(m, d);
  const Nonlinearity g = Nonlinearity::power(1, 1);
  const Eigen::VectorXd u_oracle = fixed_point_exact(ex, g);

  const AssembledForm af = graph_form(ex);
  GreenOperator op(af, GreenMode::dense);
  Instance inst = make_instance(ex, op);
  SolveOptions opts;
  opts.tol = 1e-13;
  const SolveReport rep = robin::solve(inst, g, opts);
  CHECK((rep.u - u_oracle).lpNorm<Eigen::Infinity>() <=
        1e-10 * u_oracle.lpNorm<Eigen::Infinity>());
  // lumping preserves the totals
  CHECK(ex.K.sum() == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(ex.sigma_w.sum() == doctest::Approx(4.0).epsilon(1e-13));
}
