#include <doctest.h>

#include "robin/config.hpp"
#include "robin/report.hpp"

using namespace robin;

namespace {
const char* kSample = R"(
# sample configuration
[mesh]
dim = 2
lower = [0, 0]
upper = [1, 1]
divisions = 4

[data]
f = "1"
beta = "1"
h = "x1 + x2"
atoms = [[0, 2.0]]

[nonlinearity]
kind = "power"
gamma = 1.0
c1 = 1.0
c2 = 1.0

[solver]
tol = 1e-10
n_max = 256

[mc]
dt = 2e-4
n_paths = 500
seed = 99
probes = [[0.5, 0.5]]

[output]
directory = "out"
)";
}  // namespace

TEST_CASE("config parse and build") {
  const RunConfig cfg = parse_config(kSample);
  CHECK(cfg.has_box);
  CHECK(cfg.dim == 2);
  CHECK(cfg.divisions[0] == 4);
  CHECK(cfg.solver.tol == 1e-10);
  CHECK(cfg.solver.n_max == 256);
  CHECK(cfg.mc.seed == 99);
  REQUIRE(cfg.probes.size() == 1);
  CHECK(cfg.probes[0][0] == 0.5);
  CHECK(cfg.atoms.size() == 1);

  const Mesh m = build_mesh(cfg);
  CHECK(m.n_vertices() == 25);
  const ProblemData d = build_data(cfg, m);
  CHECK(validate_data(m, d).empty());
  CHECK(d.f.size() == m.n_vertices());
  CHECK(d.f[0] == 1.0);
  // h = x1 + x2 evaluated at boundary vertices
  for (int v = 0; v < m.n_vertices(); ++v)
    if (m.boundary_vertex[v])
      CHECK(d.h.vertex_values[v] ==
            doctest::Approx(m.vertices[v][0] + m.vertices[v][1]));
  const Nonlinearity g = build_nonlinearity(cfg);
  CHECK(g.kind == Nonlinearity::Kind::power);
}

TEST_CASE("config rejects bad input") {
  CHECK_THROWS(parse_config("[mesh]\nnonsense = 1\n"));
  CHECK_THROWS(parse_config("[nowhere]\nx = 1\n"));
  CHECK_THROWS(parse_config("[mesh]\ndim 2\n"));
  CHECK_THROWS(parse_config("[mesh]\nfile = \"m.txt\"\ndivisions = 2\n"));
  CHECK_THROWS(parse_config("[data]\nf = \n"));
}

TEST_CASE("mixed nonlinearity config") {
  const RunConfig cfg = parse_config(
      "[nonlinearity]\nkind = \"mixed\"\ngamma1 = 1\ngamma2 = 2\nc1 = 1\nc2 = 1\n");
  const auto [g1, g2] = build_mixed(cfg);
  CHECK(g1.gamma == 1.0);
  CHECK(g2.gamma == 2.0);
  CHECK_THROWS(build_nonlinearity(cfg));
}

TEST_CASE("field csv round trip at full precision") {
  const Mesh m = build_box_mesh(2, {0, 0, 0}, {1, 1, 0}, {2, 2, 1});
  Field u(m.n_vertices());
  for (int v = 0; v < m.n_vertices(); ++v) u[v] = std::sqrt(2.0) * (v + 1) / 7.0;
  const std::string csv = field_csv(m, u);
  const Field back = field_from_csv(csv, m.n_vertices());
  CHECK((back - u).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("json report serialization is stable") {
  EstimateVerdict v;
  v.name = "energy_truncation";
  v.lhs = 2.0;
  v.rhs = 2.0;
  v.slack = 1.0;
  v.pass = true;
  const std::string s1 = verdict_json(v).dump(2);
  const std::string s2 = verdict_json(v).dump(2);
  CHECK(s1 == s2);
  CHECK(s1.find("energy_truncation") != std::string::npos);

  ExponentTable t = weak_solution_exponents(3, 1.0);
  const Json j = exponent_json(t);
  CHECK(j["p"] == "6/5");
  CHECK(j["q"] == "4/3");
  CHECK(j["r"] == "1");
}
