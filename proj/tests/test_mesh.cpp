#include <doctest.h>

#include <algorithm>
#include <set>

#include "robin/mesh.hpp"

using namespace robin;

namespace {
Mesh unit_square(int div) { return build_box_mesh(2, {0, 0, 0}, {1, 1, 0}, {div, div, 1}); }
Mesh unit_cube(int div) { return build_box_mesh(3, {0, 0, 0}, {1, 1, 1}, {div, div, div}); }
}  // namespace

TEST_CASE("unit square, one cell") {
  const Mesh m = unit_square(1);
  CHECK(m.n_vertices() == 4);
  CHECK(m.n_simplices() == 2);
  CHECK(m.boundary_facets.size() == 4);
  for (const auto& f : m.boundary_facets) CHECK(f.measure == doctest::Approx(1.0));
  CHECK(m.total_surface() == doctest::Approx(4.0));
  CHECK(m.total_volume() == doctest::Approx(1.0).epsilon(1e-14));
  validate_mesh(m);
}

TEST_CASE("unit cube, one cell") {
  const Mesh m = unit_cube(1);
  CHECK(m.n_vertices() == 8);
  CHECK(m.n_simplices() == 6);
  CHECK(m.boundary_facets.size() == 12);
  CHECK(m.total_surface() == doctest::Approx(6.0));
  CHECK(m.total_volume() == doctest::Approx(1.0).epsilon(1e-14));
  validate_mesh(m);
}

TEST_CASE("2x2 square grid counts") {
  const Mesh m = unit_square(2);
  CHECK(m.n_vertices() == 9);
  CHECK(m.n_simplices() == 8);
  CHECK(m.boundary_facets.size() == 8);
  CHECK(m.total_surface() == doctest::Approx(4.0));
  validate_mesh(m);
}

TEST_CASE("invalid box requests") {
  CHECK_THROWS(build_box_mesh(4, {0, 0, 0}, {1, 1, 1}, {1, 1, 1}));
  CHECK_THROWS(build_box_mesh(2, {0, 0, 0}, {0, 1, 0}, {1, 1, 1}));
  CHECK_THROWS(build_box_mesh(2, {0, 0, 0}, {1, 1, 0}, {0, 1, 1}));
}

TEST_CASE("refinement counts and conservation") {
  const Mesh m = unit_square(1);
  const Mesh r = refine_uniform(m);
  CHECK(r.n_vertices() == 9);
  CHECK(r.n_simplices() == 8);
  CHECK(r.total_surface() == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(r.total_volume() == doctest::Approx(1.0).epsilon(1e-14));
  validate_mesh(r);

  // refining twice reproduces the divisions-4 vertex set
  const Mesh rr = refine_uniform(r);
  const Mesh d4 = unit_square(4);
  REQUIRE(rr.n_vertices() == d4.n_vertices());
  auto key = [](const Vec3& v) { return std::make_pair(std::llround(v[0] * 1e12), std::llround(v[1] * 1e12)); };
  std::set<std::pair<long long, long long>> a, b;
  for (const auto& v : rr.vertices) a.insert(key(v));
  for (const auto& v : d4.vertices) b.insert(key(v));
  CHECK(a == b);
}

TEST_CASE("3d refinement conserves measures") {
  const Mesh m = unit_cube(1);
  const Mesh r = refine_uniform(m);
  CHECK(r.n_simplices() == 48);
  CHECK(r.total_volume() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(r.total_surface() == doctest::Approx(6.0).epsilon(1e-13));
  validate_mesh(r);
}

TEST_CASE("serialize round trip") {
  const Mesh m = unit_square(1);
  const Mesh l = load_mesh(serialize_mesh(m));
  REQUIRE(l.n_vertices() == m.n_vertices());
  REQUIRE(l.n_simplices() == m.n_simplices());
  for (int v = 0; v < m.n_vertices(); ++v)
    for (int a = 0; a < 2; ++a) CHECK(l.vertices[v][a] == m.vertices[v][a]);
  CHECK(l.boundary_facets.size() == m.boundary_facets.size());
  CHECK(l.total_surface() == doctest::Approx(4.0));
}

TEST_CASE("malformed mesh files") {
  // simplex referencing a missing vertex
  CHECK_THROWS_WITH_AS(load_mesh("2 3 1 0\n0 0\n1 0\n0 1\n0 1 5\n"),
                       doctest::Contains("unknown vertex"), std::runtime_error);
  // duplicated triangle
  CHECK_THROWS_WITH_AS(load_mesh("2 3 2 0\n0 0\n1 0\n0 1\n0 1 2\n0 2 1\n"),
                       doctest::Contains("non-manifold"), std::runtime_error);
  // dangling vertex
  CHECK_THROWS_WITH_AS(load_mesh("2 4 1 0\n0 0\n1 0\n0 1\n5 5\n0 1 2\n"),
                       doctest::Contains("dangling vertex"), std::runtime_error);
  // degenerate simplex
  CHECK_THROWS(load_mesh("2 3 1 0\n0 0\n1 0\n2 0\n0 1 2\n"));
}

TEST_CASE("inward normals point into the box") {
  for (const Mesh& m : {unit_square(3), unit_cube(2)}) {
    for (const auto& f : m.boundary_facets) {
      Vec3 c{0, 0, 0};
      for (int k = 0; k < m.dim; ++k) c = vadd(c, m.vertices[f.v[k]]);
      c = vscale(1.0 / m.dim, c);
      const Vec3 probe = vadd(c, vscale(1e-7, f.inward_normal));
      for (int a = 0; a < m.dim; ++a) {
        CHECK(probe[a] >= m.box->lower[a]);
        CHECK(probe[a] <= m.box->upper[a]);
      }
      CHECK(f.measure > 0);
    }
  }
}

TEST_CASE("point location and interpolation") {
  const Mesh m = unit_square(4);
  std::vector<double> vals(m.n_vertices());
  for (int v = 0; v < m.n_vertices(); ++v) vals[v] = 2 * m.vertices[v][0] - m.vertices[v][1];
  // P1 interpolation reproduces affine functions exactly
  for (const Vec3 x : {Vec3{0.3, 0.7, 0}, Vec3{0.01, 0.99, 0}, Vec3{1.0, 1.0, 0}, Vec3{0.5, 0.0, 0}})
    CHECK(m.interpolate(vals, x) == doctest::Approx(2 * x[0] - x[1]).epsilon(1e-12));
  const Mesh c = unit_cube(2);
  std::vector<double> v3(c.n_vertices());
  for (int v = 0; v < c.n_vertices(); ++v)
    v3[v] = c.vertices[v][0] + 3 * c.vertices[v][1] - c.vertices[v][2];
  for (const Vec3 x : {Vec3{0.2, 0.8, 0.5}, Vec3{1, 1, 1}, Vec3{0.5, 0.5, 0.0}})
    CHECK(c.interpolate(v3, x) == doctest::Approx(x[0] + 3 * x[1] - x[2]).epsilon(1e-12));
}

TEST_CASE("refined box meshes still locate points") {
  Mesh m = refine_uniform(unit_square(2));
  std::vector<double> vals(m.n_vertices(), 1.0);
  CHECK(m.interpolate(vals, {0.37, 0.91, 0}) == doctest::Approx(1.0));
}

TEST_CASE("facet markers are cross-checked on load") {
  // list an interior facet as boundary: rejected
  const std::string bad =
      "2 4 2 1\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 3\n0 2\n";
  CHECK_THROWS_WITH_AS(load_mesh(bad), doctest::Contains("facet marker"), std::runtime_error);
  // incomplete facet list: rejected
  const std::string incomplete =
      "2 4 2 1\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 3\n0 1\n";
  CHECK_THROWS_WITH_AS(load_mesh(incomplete), doctest::Contains("incomplete"),
                       std::runtime_error);
}
