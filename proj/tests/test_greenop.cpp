#include <doctest.h>

#include "robin/greenop.hpp"
#include "robin/oracle.hpp"
#include "robin/rng.hpp"
#include "robin/solver.hpp"

using namespace robin;

namespace {
Mesh unit_square(int div) { return build_box_mesh(2, {0, 0, 0}, {1, 1, 0}, {div, div, 1}); }
}  // namespace

TEST_CASE("path-3 Green actions") {
  const AssembledForm f = graph_form(path3(1.0, 1.0));
  for (GreenMode mode : {GreenMode::dense, GreenMode::iterative}) {
    GreenOperator op(f, mode);
    Field b(3);
    b << 0, 1, 0;
    const Field u = op.apply(b);
    CHECK(u[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(u[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(u[2] == doctest::Approx(0.5).epsilon(1e-12));
    b << 1, 0, 1;
    const Field v = op.apply(b);
    for (int i = 0; i < 3; ++i) CHECK(v[i] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(op.apply(Field::Zero(3)).norm() == 0.0);
  }
}

TEST_CASE("green symmetry on random loads") {
  const Mesh m = unit_square(4);
  const AssembledForm f = assemble(m, constant_data(m, 0, 1, 1));
  GreenOperator op(f, GreenMode::iterative);
  Rng rng(17);
  for (int t = 0; t < 10; ++t) {
    Field b1(m.n_vertices()), b2(m.n_vertices());
    for (int i = 0; i < m.n_vertices(); ++i) {
      b1[i] = rng.next_uniform();
      b2[i] = rng.next_uniform();
    }
    const double s1 = b2.dot(op.apply(b1));
    const double s2 = b1.dot(op.apply(b2));
    CHECK(s1 == doctest::Approx(s2).epsilon(1e-10));
  }
}

TEST_CASE("dense and iterative modes agree") {
  const Mesh m = unit_square(7);  // 64 vertices... 8x8 grid = 64? 8*8=64
  const AssembledForm f = assemble(m, constant_data(m, 0, 1, 1));
  GreenOperator dense(f, GreenMode::dense);
  GreenOperator cg(f, GreenMode::iterative);
  Rng rng(23);
  Field b(m.n_vertices());
  for (int i = 0; i < m.n_vertices(); ++i) b[i] = rng.next_uniform() - 0.2;
  const Field ud = dense.apply(b);
  const Field uc = cg.apply(b);
  CHECK((ud - uc).lpNorm<Eigen::Infinity>() <= 1e-10 * ud.lpNorm<Eigen::Infinity>());
  CHECK(cg.last_iterations() > 0);
}

TEST_CASE("positivity preservation and floor") {
  const AssembledForm f = graph_form(path3(1.0, 1.0));
  GreenOperator op(f, GreenMode::dense);
  Field b(3);
  b << 0, 1, 0;
  int argmin = -1;
  const double delta = positivity_floor(op, b, &argmin);
  CHECK(delta == doctest::Approx(0.5).epsilon(1e-13));
  CHECK((argmin == 0 || argmin == 2));
  CHECK_THROWS_AS(positivity_floor(op, Field::Zero(3)), std::invalid_argument);
  Field neg(3);
  neg << -1, 0, 0;
  CHECK_THROWS_AS(positivity_floor(op, neg), std::invalid_argument);

  // FEM instance: f = 1 load has a strictly positive Green image
  const Mesh m = unit_square(4);
  const AssembledForm ff = assemble(m, constant_data(m, 1, 1, 0));
  GreenOperator fop(ff, GreenMode::iterative);
  ProblemData d = constant_data(m, 1, 1, 0);
  const double dmin = positivity_floor(fop, interior_load(m, d));
  CHECK(dmin > 0);
}

TEST_CASE("monotonicity in kappa at the dense level") {
  // raising beta cannot raise G^kappa b for b >= 0 (entrywise, dense oracle)
  const Eigen::MatrixXd G1 = green_dense(path3(1.0, 1.0));
  const Eigen::MatrixXd G2 = green_dense(path3(2.0, 1.0));
  CHECK(((G1 - G2).array() >= -1e-14).all());
  CHECK((G1.array() > 0).all());
}

TEST_CASE("linear Robin solve with constant g") {
  // constant solution: u = c solves the linear problem with h = beta c / g_const
  const Mesh m = unit_square(3);
  const double c = 2.5, g_const = 1.0 / c;
  ProblemData d = constant_data(m, 0, 1.0, 1.0);
  for (auto& fv : d.h.facet_values)
    for (auto& x : fv) x = c / g_const * 1.0;  // h = beta c / g_const with beta = 1
  d.h = BoundaryField::from_constant(m, c / g_const);
  const Field u = solve_linear_robin(m, d, g_const);
  for (int v = 0; v < m.n_vertices(); ++v) CHECK(u[v] == doctest::Approx(c).epsilon(1e-10));

  // mu = 0, h = 0 gives the zero solution (admissibility deliberately bypassed)
  ProblemData z = constant_data(m, 0, 1.0, 0.0);
  CHECK(solve_linear_robin(m, z, 1.0).norm() == doctest::Approx(0.0));
}

TEST_CASE("atom load on the oracle path") {
  const DiscreteForm pf = path3(1.0, 0.0);
  const AssembledForm f = graph_form(pf);
  GreenOperator op(f, GreenMode::dense);
  Field b(3);
  b << 0, 1, 0;  // atom of mass 1 at the middle node
  const Field u = op.apply(b);
  CHECK(u[0] == doctest::Approx(0.5));
  CHECK(u[1] == doctest::Approx(1.0));
  CHECK(u[2] == doctest::Approx(0.5));
}

TEST_CASE("CG iteration cap raises") {
  const Mesh m = unit_square(3);
  const AssembledForm f = assemble(m, constant_data(m, 0, 1, 1));
  GreenConfig cfg;
  cfg.max_iter = 1;
  cfg.tol = 1e-14;
  GreenOperator op(f, GreenMode::iterative, cfg);
  Field b = Field::Ones(m.n_vertices());
  CHECK_THROWS_WITH_AS(op.apply(b), doctest::Contains("cap"), std::runtime_error);
}
