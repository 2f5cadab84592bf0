#include "robin/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace robin {

namespace {

constexpr double kGeomTol = 1e-12;

std::array<int, 3> sorted_facet(std::array<int, 3> f) {
  // 2D facets keep the -1 sentinel in the last slot
  const int n = f[2] < 0 ? 2 : 3;
  std::sort(f.begin(), f.begin() + n);
  return f;
}

double signed_volume(const Mesh& m, const std::array<int, 4>& s) {
  if (m.dim == 2) {
    const Vec3 a = vsub(m.vertices[s[1]], m.vertices[s[0]]);
    const Vec3 b = vsub(m.vertices[s[2]], m.vertices[s[0]]);
    return 0.5 * (a[0] * b[1] - a[1] * b[0]);
  }
  const Vec3 a = vsub(m.vertices[s[1]], m.vertices[s[0]]);
  const Vec3 b = vsub(m.vertices[s[2]], m.vertices[s[0]]);
  const Vec3 c = vsub(m.vertices[s[3]], m.vertices[s[0]]);
  return vdot(a, vcross(b, c)) / 6.0;
}

// the d facets of simplex s obtained by dropping one vertex
std::vector<std::array<int, 3>> simplex_facets(const Mesh& m, int s) {
  const auto& sp = m.simplices[s];
  std::vector<std::array<int, 3>> out;
  if (m.dim == 2) {
    out.push_back({sp[0], sp[1], -1});
    out.push_back({sp[1], sp[2], -1});
    out.push_back({sp[2], sp[0], -1});
  } else {
    out.push_back({sp[1], sp[2], sp[3]});
    out.push_back({sp[0], sp[2], sp[3]});
    out.push_back({sp[0], sp[1], sp[3]});
    out.push_back({sp[0], sp[1], sp[2]});
  }
  return out;
}

double facet_measure(const Mesh& m, const std::array<int, 3>& f) {
  if (m.dim == 2) return vnorm(vsub(m.vertices[f[1]], m.vertices[f[0]]));
  const Vec3 a = vsub(m.vertices[f[1]], m.vertices[f[0]]);
  const Vec3 b = vsub(m.vertices[f[2]], m.vertices[f[0]]);
  return 0.5 * vnorm(vcross(a, b));
}

Vec3 facet_centroid(const Mesh& m, const std::array<int, 3>& f) {
  Vec3 c{0, 0, 0};
  const int nv = m.dim;
  for (int i = 0; i < nv; ++i) c = vadd(c, m.vertices[f[i]]);
  return vscale(1.0 / nv, c);
}

// unit normal of the facet oriented toward the interior of the owner simplex
Vec3 inward_normal(const Mesh& m, const std::array<int, 3>& f, int owner) {
  Vec3 n{0, 0, 0};
  if (m.dim == 2) {
    const Vec3 t = vsub(m.vertices[f[1]], m.vertices[f[0]]);
    n = {-t[1], t[0], 0};
  } else {
    n = vcross(vsub(m.vertices[f[1]], m.vertices[f[0]]),
               vsub(m.vertices[f[2]], m.vertices[f[0]]));
  }
  const double len = vnorm(n);
  if (len <= 0) throw std::runtime_error("mesh: degenerate boundary facet");
  n = vscale(1.0 / len, n);
  // find the vertex of the owner not on the facet and orient toward it
  const auto& sp = m.simplices[owner];
  const Vec3 c = facet_centroid(m, f);
  for (int k = 0; k <= m.dim; ++k) {
    const int v = sp[k];
    if (v != f[0] && v != f[1] && v != f[2]) {
      if (vdot(n, vsub(m.vertices[v], c)) < 0) n = vscale(-1.0, n);
      return n;
    }
  }
  throw std::runtime_error("mesh: facet not contained in its owner simplex");
}

// recompute boundary facets and vertex flags from simplex incidence
void extract_boundary(Mesh& m) {
  std::map<std::array<int, 3>, std::pair<int, int>> incidence;  // sorted facet -> (count, owner)
  for (int s = 0; s < m.n_simplices(); ++s) {
    for (const auto& f : simplex_facets(m, s)) {
      auto key = sorted_facet(f);
      auto it = incidence.find(key);
      if (it == incidence.end()) incidence[key] = {1, s};
      else {
        it->second.first += 1;
      }
    }
  }
  m.boundary_facets.clear();
  for (const auto& [key, ci] : incidence) {
    if (ci.first > 2) {
      std::ostringstream os;
      os << "mesh: non-manifold facet (" << key[0] << " " << key[1];
      if (key[2] >= 0) os << " " << key[2];
      os << ")";
      throw std::runtime_error(os.str());
    }
    if (ci.first == 1) {
      BoundaryFacet bf;
      bf.v = key;
      bf.owner = ci.second;
      bf.measure = facet_measure(m, key);
      bf.inward_normal = inward_normal(m, key, ci.second);
      m.boundary_facets.push_back(bf);
    }
  }
  m.boundary_vertex.assign(m.vertices.size(), 0);
  for (const auto& bf : m.boundary_facets)
    for (int i = 0; i < m.dim; ++i) m.boundary_vertex[bf.v[i]] = 1;
}

void check_duplicates(const Mesh& m) {
  std::set<std::array<int, 4>> seen;
  for (auto s : m.simplices) {
    std::sort(s.begin(), s.begin() + m.dim + 1);
    if (!seen.insert(s).second)
      throw std::runtime_error("mesh: non-manifold facet (duplicate simplex)");
  }
}

void normalize_orientation(Mesh& m) {
  for (int s = 0; s < m.n_simplices(); ++s) {
    double v = signed_volume(m, m.simplices[s]);
    if (v < 0) {
      std::swap(m.simplices[s][0], m.simplices[s][1]);
      v = -v;
    }
    if (!(v > 0))
      throw std::runtime_error("mesh: degenerate simplex " + std::to_string(s));
  }
}

void check_vertex_use(const Mesh& m) {
  std::vector<char> used(m.vertices.size(), 0);
  for (const auto& s : m.simplices)
    for (int k = 0; k <= m.dim; ++k) {
      if (s[k] < 0 || s[k] >= m.n_vertices())
        throw std::runtime_error("mesh: unknown vertex " + std::to_string(s[k]));
      used[s[k]] = 1;
    }
  for (int v = 0; v < m.n_vertices(); ++v)
    if (!used[v]) throw std::runtime_error("mesh: dangling vertex " + std::to_string(v));
}

void build_locator(Mesh& m) {
  LocatorGrid g;
  Vec3 lo = m.vertices[0], hi = m.vertices[0];
  for (const auto& v : m.vertices)
    for (int a = 0; a < m.dim; ++a) {
      lo[a] = std::min(lo[a], v[a]);
      hi[a] = std::max(hi[a], v[a]);
    }
  const int target = std::max(1, static_cast<int>(std::floor(
                                     std::pow(double(m.n_simplices()), 1.0 / m.dim))));
  long ncells = 1;
  for (int a = 0; a < m.dim; ++a) {
    g.dims[a] = target;
    g.origin[a] = lo[a];
    const double w = hi[a] - lo[a];
    g.cell[a] = (w > 0) ? w / target : 1.0;
    ncells *= target;
  }
  auto cell_of = [&](double x, int a) {
    return std::clamp(static_cast<int>((x - g.origin[a]) / g.cell[a]), 0, g.dims[a] - 1);
  };
  std::vector<std::vector<int>> buckets(ncells);
  for (int s = 0; s < m.n_simplices(); ++s) {
    Vec3 slo = m.vertices[m.simplices[s][0]], shi = slo;
    for (int k = 1; k <= m.dim; ++k)
      for (int a = 0; a < m.dim; ++a) {
        slo[a] = std::min(slo[a], m.vertices[m.simplices[s][k]][a]);
        shi[a] = std::max(shi[a], m.vertices[m.simplices[s][k]][a]);
      }
    std::array<int, 3> c0{0, 0, 0}, c1{0, 0, 0};
    for (int a = 0; a < m.dim; ++a) {
      c0[a] = cell_of(slo[a], a);
      c1[a] = cell_of(shi[a], a);
    }
    const int kz0 = (m.dim == 3) ? c0[2] : 0, kz1 = (m.dim == 3) ? c1[2] : 0;
    for (int k = kz0; k <= kz1; ++k)
      for (int j = c0[1]; j <= c1[1]; ++j)
        for (int i = c0[0]; i <= c1[0]; ++i)
          buckets[(k * g.dims[1] + j) * g.dims[0] + i].push_back(s);
  }
  g.offsets.assign(ncells + 1, 0);
  for (long c = 0; c < ncells; ++c) g.offsets[c + 1] = g.offsets[c] + buckets[c].size();
  g.items.reserve(g.offsets.back());
  for (const auto& b : buckets) g.items.insert(g.items.end(), b.begin(), b.end());
  m.locator = std::move(g);
}

void finalize(Mesh& m) {
  check_vertex_use(m);
  check_duplicates(m);
  normalize_orientation(m);
  extract_boundary(m);
  build_locator(m);
}

}  // namespace

double Mesh::simplex_volume(int s) const { return signed_volume(*this, simplices[s]); }

Vec3 Mesh::simplex_centroid(int s) const {
  Vec3 c{0, 0, 0};
  for (int k = 0; k <= dim; ++k) c = vadd(c, vertices[simplices[s][k]]);
  return vscale(1.0 / (dim + 1), c);
}

double Mesh::total_volume() const {
  double v = 0;
  for (int s = 0; s < n_simplices(); ++s) v += simplex_volume(s);
  return v;
}

double Mesh::total_surface() const {
  double a = 0;
  for (const auto& f : boundary_facets) a += f.measure;
  return a;
}

double Mesh::max_diameter() const {
  double h = 0;
  for (const auto& s : simplices)
    for (int i = 0; i <= dim; ++i)
      for (int j = i + 1; j <= dim; ++j)
        h = std::max(h, vnorm(vsub(vertices[s[i]], vertices[s[j]])));
  return h;
}

std::array<Vec3, 4> Mesh::hat_gradients(int s) const {
  const auto& sp = simplices[s];
  std::array<Vec3, 4> g{};
  if (dim == 2) {
    const Vec3& p0 = vertices[sp[0]];
    const Vec3& p1 = vertices[sp[1]];
    const Vec3& p2 = vertices[sp[2]];
    const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]);
    g[0] = {(p1[1] - p2[1]) / det, (p2[0] - p1[0]) / det, 0};
    g[1] = {(p2[1] - p0[1]) / det, (p0[0] - p2[0]) / det, 0};
    g[2] = {(p0[1] - p1[1]) / det, (p1[0] - p0[0]) / det, 0};
  } else {
    // grad lambda_i = (opposite face normal) scaled so that grad.(p_i - p_j) = 1
    for (int i = 0; i < 4; ++i) {
      const Vec3& pi = vertices[sp[i]];
      const Vec3& a = vertices[sp[(i + 1) % 4]];
      const Vec3& b = vertices[sp[(i + 2) % 4]];
      const Vec3& c = vertices[sp[(i + 3) % 4]];
      Vec3 n = vcross(vsub(b, a), vsub(c, a));
      const double h = vdot(n, vsub(pi, a));
      g[i] = vscale(1.0 / h, n);
    }
  }
  return g;
}

Mesh::Location Mesh::locate(const Vec3& x) const {
  // barycentric test against candidate simplices; box meshes narrow the scan
  auto try_simplex = [&](int s, Location& loc) {
    const auto& sp = simplices[s];
    const auto g = hat_gradients(s);
    double bc[4];
    double minb = 1.0;
    bc[0] = 1.0;
    for (int k = 1; k <= dim; ++k) {
      bc[k] = vdot(g[k], vsub(x, vertices[sp[0]]));
      bc[0] -= bc[k];
      minb = std::min(minb, bc[k]);
    }
    minb = std::min(minb, bc[0]);
    if (minb >= -1e-10) {
      loc.simplex = s;
      for (int k = 0; k <= dim; ++k) loc.bary[k] = bc[k];
      return true;
    }
    return false;
  };

  Location loc;
  if (!locator.offsets.empty()) {
    std::array<int, 3> c{0, 0, 0};
    for (int a = 0; a < dim; ++a)
      c[a] = std::clamp(static_cast<int>((x[a] - locator.origin[a]) / locator.cell[a]), 0,
                        locator.dims[a] - 1);
    const int flat = (c[2] * locator.dims[1] + c[1]) * locator.dims[0] + c[0];
    for (int idx = locator.offsets[flat]; idx < locator.offsets[flat + 1]; ++idx)
      if (try_simplex(locator.items[idx], loc)) return loc;
  }
  for (int s = 0; s < n_simplices(); ++s)
    if (try_simplex(s, loc)) return loc;
  return loc;
}

double Mesh::interpolate(const std::vector<double>& vertex_values, const Vec3& x) const {
  const Location loc = locate(x);
  if (loc.simplex < 0) throw std::runtime_error("mesh: point outside mesh");
  double v = 0;
  for (int k = 0; k <= dim; ++k) v += loc.bary[k] * vertex_values[simplices[loc.simplex][k]];
  return v;
}

Mesh build_box_mesh(int dim, const Vec3& lower, const Vec3& upper,
                    const std::array<int, 3>& divisions) {
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("build_box_mesh: dim must be 2 or 3, got " + std::to_string(dim));
  for (int a = 0; a < dim; ++a) {
    if (!(lower[a] < upper[a]))
      throw std::invalid_argument("build_box_mesh: degenerate box on axis " + std::to_string(a + 1));
    if (divisions[a] < 1)
      throw std::invalid_argument("build_box_mesh: divisions must be >= 1 on axis " +
                                  std::to_string(a + 1));
  }

  Mesh m;
  m.dim = dim;
  const int nx = divisions[0], ny = divisions[1], nz = (dim == 3) ? divisions[2] : 1;

  if (dim == 2) {
    auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        m.vertices.push_back({lower[0] + (upper[0] - lower[0]) * i / nx,
                              lower[1] + (upper[1] - lower[1]) * j / ny, 0});
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
        m.simplices.push_back({v00, v10, v11, -1});
        m.simplices.push_back({v00, v11, v01, -1});
      }
  } else {
    auto vid = [&](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };
    for (int k = 0; k <= nz; ++k)
      for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
          m.vertices.push_back({lower[0] + (upper[0] - lower[0]) * i / nx,
                                lower[1] + (upper[1] - lower[1]) * j / ny,
                                lower[2] + (upper[2] - lower[2]) * k / nz});
    // Kuhn subdivision: six tetrahedra per cube around the main diagonal
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
          for (const auto& p : perms) {
            std::array<int, 3> c{i, j, k};
            std::array<int, 4> tet{};
            tet[0] = vid(c[0], c[1], c[2]);
            for (int step = 0; step < 3; ++step) {
              c[p[step]] += 1;
              tet[step + 1] = vid(c[0], c[1], c[2]);
            }
            m.simplices.push_back(tet);
          }
  }

  finalize(m);
  BoxInfo bi;
  bi.lower = lower;
  bi.upper = upper;
  bi.divisions = {nx, ny, (dim == 3) ? nz : 0};
  m.box = bi;
  return m;
}

Mesh refine_uniform(const Mesh& mesh) {
  Mesh out;
  out.dim = mesh.dim;
  out.vertices = mesh.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int id = out.n_vertices();
    out.vertices.push_back(vscale(0.5, vadd(mesh.vertices[a], mesh.vertices[b])));
    midpoint[key] = id;
    return id;
  };

  for (const auto& s : mesh.simplices) {
    if (mesh.dim == 2) {
      const int v0 = s[0], v1 = s[1], v2 = s[2];
      const int m01 = mid(v0, v1), m12 = mid(v1, v2), m02 = mid(v0, v2);
      out.simplices.push_back({v0, m01, m02, -1});
      out.simplices.push_back({m01, v1, m12, -1});
      out.simplices.push_back({m02, m12, v2, -1});
      out.simplices.push_back({m01, m12, m02, -1});
    } else {
      const int v0 = s[0], v1 = s[1], v2 = s[2], v3 = s[3];
      const int m01 = mid(v0, v1), m02 = mid(v0, v2), m03 = mid(v0, v3);
      const int m12 = mid(v1, v2), m13 = mid(v1, v3), m23 = mid(v2, v3);
      out.simplices.push_back({v0, m01, m02, m03});
      out.simplices.push_back({v1, m01, m12, m13});
      out.simplices.push_back({v2, m02, m12, m23});
      out.simplices.push_back({v3, m03, m13, m23});
      // octahedron split along the m01-m23 diagonal
      out.simplices.push_back({m01, m23, m02, m12});
      out.simplices.push_back({m01, m23, m12, m13});
      out.simplices.push_back({m01, m23, m13, m03});
      out.simplices.push_back({m01, m23, m03, m02});
    }
  }

  finalize(out);
  if (mesh.box) {
    BoxInfo bi = *mesh.box;
    for (int a = 0; a < mesh.dim; ++a) bi.divisions[a] *= 2;
    out.box = bi;
  }
  return out;
}

Mesh load_mesh(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> tokens_lines;
  auto next_tokens = [&](std::vector<std::string>& toks) {
    toks.clear();
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      std::istringstream ls(line);
      std::string t;
      while (ls >> t) toks.push_back(t);
      if (!toks.empty()) return true;
    }
    return false;
  };

  std::vector<std::string> toks;
  if (!next_tokens(toks) || toks.size() != 4)
    throw std::runtime_error("mesh load: expected header 'dim nv ns nf'");
  const int dim = std::stoi(toks[0]);
  const long nv = std::stol(toks[1]), ns = std::stol(toks[2]), nf = std::stol(toks[3]);
  if (dim != 2 && dim != 3) throw std::runtime_error("mesh load: dim must be 2 or 3");
  if (nv < dim + 1 || ns < 1) throw std::runtime_error("mesh load: empty mesh");

  Mesh m;
  m.dim = dim;
  for (long v = 0; v < nv; ++v) {
    if (!next_tokens(toks) || static_cast<int>(toks.size()) != dim)
      throw std::runtime_error("mesh load: bad vertex line " + std::to_string(v));
    Vec3 p{0, 0, 0};
    for (int a = 0; a < dim; ++a) p[a] = std::stod(toks[a]);
    m.vertices.push_back(p);
  }
  for (long s = 0; s < ns; ++s) {
    if (!next_tokens(toks) || static_cast<int>(toks.size()) != dim + 1)
      throw std::runtime_error("mesh load: bad simplex line " + std::to_string(s));
    std::array<int, 4> sp{-1, -1, -1, -1};
    for (int k = 0; k <= dim; ++k) {
      sp[k] = std::stoi(toks[k]);
      if (sp[k] < 0 || sp[k] >= nv)
        throw std::runtime_error("mesh load: unknown vertex " + std::to_string(sp[k]) +
                                 " in simplex " + std::to_string(s));
    }
    m.simplices.push_back(sp);
  }
  std::vector<std::array<int, 3>> file_facets;
  for (long f = 0; f < nf; ++f) {
    if (!next_tokens(toks) || static_cast<int>(toks.size()) != dim)
      throw std::runtime_error("mesh load: bad facet line " + std::to_string(f));
    std::array<int, 3> fa{-1, -1, -1};
    for (int k = 0; k < dim; ++k) {
      fa[k] = std::stoi(toks[k]);
      if (fa[k] < 0 || fa[k] >= nv)
        throw std::runtime_error("mesh load: unknown vertex " + std::to_string(fa[k]) +
                                 " in facet " + std::to_string(f));
    }
    file_facets.push_back(sorted_facet(fa));
  }

  finalize(m);

  if (!file_facets.empty()) {
    std::set<std::array<int, 3>> recomputed;
    for (const auto& bf : m.boundary_facets) recomputed.insert(bf.v);
    for (const auto& fa : file_facets)
      if (!recomputed.count(fa))
        throw std::runtime_error("mesh load: facet marker does not match a boundary facet");
    if (file_facets.size() != recomputed.size())
      throw std::runtime_error("mesh load: facet markers incomplete (" +
                               std::to_string(file_facets.size()) + " listed, " +
                               std::to_string(recomputed.size()) + " found)");
  }
  return m;
}

std::string serialize_mesh(const Mesh& mesh) {
  std::ostringstream out;
  char buf[64];
  out << mesh.dim << " " << mesh.n_vertices() << " " << mesh.n_simplices() << " "
      << mesh.boundary_facets.size() << "\n";
  for (const auto& v : mesh.vertices) {
    for (int a = 0; a < mesh.dim; ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", v[a]);
      out << (a ? " " : "") << buf;
    }
    out << "\n";
  }
  for (const auto& s : mesh.simplices) {
    for (int k = 0; k <= mesh.dim; ++k) out << (k ? " " : "") << s[k];
    out << "\n";
  }
  for (const auto& f : mesh.boundary_facets) {
    for (int k = 0; k < mesh.dim; ++k) out << (k ? " " : "") << f.v[k];
    out << "\n";
  }
  return out.str();
}

void validate_mesh(const Mesh& mesh) {
  if (mesh.dim != 2 && mesh.dim != 3) throw std::runtime_error("mesh: invalid dimension");
  check_vertex_use(mesh);
  check_duplicates(mesh);
  for (int s = 0; s < mesh.n_simplices(); ++s)
    if (!(mesh.simplex_volume(s) > 0))
      throw std::runtime_error("mesh: nonpositive volume in simplex " + std::to_string(s));

  // every facet interior to exactly two simplices, boundary to one
  std::map<std::array<int, 3>, int> incidence;
  for (int s = 0; s < mesh.n_simplices(); ++s)
    for (const auto& f : simplex_facets(mesh, s)) incidence[sorted_facet(f)] += 1;
  std::set<std::array<int, 3>> listed;
  for (const auto& bf : mesh.boundary_facets) listed.insert(bf.v);
  for (const auto& [f, c] : incidence) {
    if (c > 2) throw std::runtime_error("mesh: non-manifold facet");
    if (c == 1 && !listed.count(f))
      throw std::runtime_error("mesh: boundary facet missing from facet list");
    if (c == 2 && listed.count(f))
      throw std::runtime_error("mesh: interior facet listed as boundary");
  }

  // inward normal test: centroid + eps*n stays on the owner's side
  for (const auto& bf : mesh.boundary_facets) {
    const Vec3 c = facet_centroid(mesh, bf.v);
    const double eps = 1e-6 * std::max(1.0, vnorm(c));
    const Vec3 probe = vadd(c, vscale(eps, bf.inward_normal));
    if (mesh.box) {
      for (int a = 0; a < mesh.dim; ++a)
        if (probe[a] < mesh.box->lower[a] - kGeomTol || probe[a] > mesh.box->upper[a] + kGeomTol)
          throw std::runtime_error("mesh: inward normal points outside the box");
    }
    const auto loc = mesh.locate(probe);
    if (loc.simplex < 0) throw std::runtime_error("mesh: inward normal points outside the mesh");
  }

  if (mesh.box) {
    double vol = 1.0, surf = 0.0;
    for (int a = 0; a < mesh.dim; ++a) vol *= mesh.box->upper[a] - mesh.box->lower[a];
    for (int a = 0; a < mesh.dim; ++a) {
      double face = 1.0;
      for (int b = 0; b < mesh.dim; ++b)
        if (b != a) face *= mesh.box->upper[b] - mesh.box->lower[b];
      surf += 2 * face;
    }
    if (std::abs(mesh.total_volume() - vol) > 1e-12 * std::max(1.0, vol))
      throw std::runtime_error("mesh: simplex volumes do not sum to the box volume");
    if (std::abs(mesh.total_surface() - surf) > 1e-12 * std::max(1.0, surf))
      throw std::runtime_error("mesh: facet measures do not sum to the box surface");
  }
}

}  // namespace robin
