#include "robin/stochastic.hpp"

#include <cmath>
#include <stdexcept>

#include "robin/forms.hpp"
#include "robin/greenop.hpp"
#include "robin/parallel.hpp"
#include "robin/rng.hpp"

namespace robin {

namespace {

double interp(const Mesh& m, const Field& vals, const Vec3& p) {
  const auto loc = m.locate(p);
  if (loc.simplex < 0) throw std::runtime_error("stochastic: point left the mesh");
  double v = 0;
  for (int k = 0; k <= m.dim; ++k) v += loc.bary[k] * vals[m.simplices[loc.simplex][k]];
  return v;
}

struct PathEnv {
  BoxDomain box;
  int dim = 2;
  double sq2dt = 0;
  double dt = 0;
  double c_ell = 2.0;
  double horizon_eps = 1e-3;
  long max_steps = 0;
  bool beta_const = true;
  double beta_value = 1.0;
  const Field* beta_vertex = nullptr;
  bool h_const = true;
  double h_value = 0.0;
  const Field* h_vertex = nullptr;
  bool f_zero = true;
  bool f_const = false;
  double f_value = 0.0;
  const Field* f_field = nullptr;
  const Nonlinearity* g = nullptr;
  const Field* u_field = nullptr;
  const Mesh* mesh = nullptr;
};

bool nodal_constant(const Mesh& mesh, const BoundaryField& bf, double* value) {
  if (!bf.continuous) return false;
  bool first = true;
  double v0 = 0;
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    if (!mesh.boundary_vertex[v]) continue;
    if (first) {
      v0 = bf.vertex_values[v];
      first = false;
    } else if (bf.vertex_values[v] != v0) {
      return false;
    }
  }
  *value = v0;
  return true;
}

PathEnv make_env(const Mesh& mesh, const ProblemData& data, const Nonlinearity* g,
                 const Field* u_field, const PathConfig& cfg) {
  if (!mesh.box) throw std::invalid_argument("stochastic: requires a generated box mesh");
  for (const auto& a : data.coeff_a) {
    CoeffMat id = CoeffMat::Identity();
    if ((a - id).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("stochastic: general coefficient a not supported (a = I only)");
  }
  if (!data.beta.continuous || !data.h.continuous)
    throw std::invalid_argument("stochastic: beta and h must be nodal boundary data");
  PathEnv env;
  env.box.dim = mesh.dim;
  env.box.lower = mesh.box->lower;
  env.box.upper = mesh.box->upper;
  env.dim = mesh.dim;
  env.dt = cfg.dt;
  env.sq2dt = std::sqrt(2.0 * cfg.dt);
  env.c_ell = cfg.local_time_scale;
  env.horizon_eps = cfg.horizon_eps;
  env.max_steps = static_cast<long>(std::llround(100.0 / cfg.dt));
  env.mesh = &mesh;

  env.beta_const = nodal_constant(mesh, data.beta, &env.beta_value);
  if (!env.beta_const) env.beta_vertex = &data.beta.vertex_values;
  env.h_const = nodal_constant(mesh, data.h, &env.h_value);
  if (!env.h_const) env.h_vertex = &data.h.vertex_values;

  if (data.f.size() == 0 || data.f.lpNorm<Eigen::Infinity>() == 0) {
    env.f_zero = true;
  } else {
    env.f_zero = false;
    env.f_const = (data.f.maxCoeff() == data.f.minCoeff());
    env.f_value = data.f[0];
    env.f_field = &data.f;
  }
  env.g = g;
  env.u_field = u_field;
  return env;
}

struct PathTotals {
  double interior = 0;
  double boundary = 0;
};

// hot path for 2D instances with constant beta and h and no interior density
PathTotals run_path_const2d(uint64_t seed, uint64_t idx, const Vec3& x0, const PathEnv& env) {
  Rng rng(seed, idx);
  double x0c = x0[0], x1c = x0[1];
  double w = 1.0, boundary = 0.0;
  const double lo0 = env.box.lower[0], hi0 = env.box.upper[0];
  const double lo1 = env.box.lower[1], hi1 = env.box.upper[1];
  const double sq = env.sq2dt, beta = env.beta_value, hval = env.h_value;
  const double eps = env.horizon_eps;
  const long max_steps = env.max_steps;

  for (long step = 0; step < max_steps && w >= eps; ++step) {
    double n0, n1;
    rng.next_normal_pair(&n0, &n1);
    double y0 = x0c + sq * n0;
    double y1 = x1c + sq * n1;
    if (y0 >= lo0 && y0 <= hi0 && y1 >= lo1 && y1 <= hi1) {
      x0c = y0;
      x1c = y1;
      continue;
    }
    double lt[4] = {0, 0, 0, 0};
    while (y0 < lo0 || y0 > hi0) {
      if (y0 < lo0) {
        lt[0] += lo0 - y0;
        y0 = 2 * lo0 - y0;
      } else {
        lt[1] += y0 - hi0;
        y0 = 2 * hi0 - y0;
      }
    }
    while (y1 < lo1 || y1 > hi1) {
      if (y1 < lo1) {
        lt[2] += lo1 - y1;
        y1 = 2 * lo1 - y1;
      } else {
        lt[3] += y1 - hi1;
        y1 = 2 * hi1 - y1;
      }
    }
    x0c = y0;
    x1c = y1;
    for (int face = 0; face < 4; ++face) {
      if (lt[face] == 0) continue;
      const double ell = env.c_ell * lt[face];
      double hg = hval;
      if (hg != 0 && env.g) {
        Vec3 p{x0c, x1c, 0};
        const int a = face >> 1;
        p[a] = (face & 1) ? env.box.upper[a] : env.box.lower[a];
        hg *= (*env.g)(interp(*env.mesh, *env.u_field, p));
      }
      const double decay = std::exp(-beta * ell);
      boundary += hg * w * (1.0 - decay) / beta;
      w *= decay;
    }
  }
  return {0.0, boundary};
}

PathTotals run_path(uint64_t seed, uint64_t idx, const Vec3& x0, const PathEnv& env) {
  if (env.dim == 2 && env.f_zero && env.beta_const && env.h_const && env.beta_value > 0)
    return run_path_const2d(seed, idx, x0, env);
  Rng rng(seed, idx);
  Vec3 x = x0;
  double w = 1.0;
  PathTotals tot;
  const double lo0 = env.box.lower[0], lo1 = env.box.lower[1], lo2 = env.box.lower[2];
  const double hi0 = env.box.upper[0], hi1 = env.box.upper[1], hi2 = env.box.upper[2];
  const double los[3] = {lo0, lo1, lo2}, his[3] = {hi0, hi1, hi2};

  for (long step = 0; step < env.max_steps && w >= env.horizon_eps; ++step) {
    if (!env.f_zero)
      tot.interior +=
          w * (env.f_const ? env.f_value : interp(*env.mesh, *env.f_field, x)) * env.dt;

    double lt[6] = {0, 0, 0, 0, 0, 0};
    bool event = false;
    for (int a = 0; a < env.dim; ++a) {
      double y = x[a] + env.sq2dt * rng.next_normal();
      const double lo = los[a], hi = his[a];
      while (y < lo || y > hi) {
        if (y < lo) {
          lt[2 * a] += lo - y;
          y = 2 * lo - y;
        } else {
          lt[2 * a + 1] += y - hi;
          y = 2 * hi - y;
        }
        event = true;
      }
      x[a] = y;
    }
    if (!event) continue;
    for (int face = 0; face < 2 * env.dim; ++face) {
      if (lt[face] == 0) continue;
      const int a = face >> 1;
      Vec3 p = x;
      p[a] = (face & 1) ? his[a] : los[a];
      const double ell = env.c_ell * lt[face];
      const double beta_p =
          env.beta_const ? env.beta_value : interp(*env.mesh, *env.beta_vertex, p);
      double hg = env.h_const ? env.h_value : interp(*env.mesh, *env.h_vertex, p);
      if (hg != 0 && env.g) hg *= (*env.g)(interp(*env.mesh, *env.u_field, p));
      if (beta_p > 0) {
        const double decay = std::exp(-beta_p * ell);
        // exact in-step weighting: int e^{-A} dA over the increment
        tot.boundary += hg * w * (1.0 - decay) / beta_p;
        w *= decay;
      } else {
        tot.boundary += hg * w * ell;
      }
    }
  }
  return tot;
}

}  // namespace

Vec3 step_reflected(const Vec3& x, const Vec3& dw, const BoxDomain& box, double face_lt[6]) {
  for (int f = 0; f < 6; ++f) face_lt[f] = 0;
  Vec3 out = x;
  const double sq2 = std::sqrt(2.0);
  for (int a = 0; a < box.dim; ++a) {
    if (x[a] < box.lower[a] - 1e-14 || x[a] > box.upper[a] + 1e-14)
      throw std::invalid_argument("step_reflected: x outside the closed box");
    double y = x[a] + sq2 * dw[a];
    const double lo = box.lower[a], hi = box.upper[a];
    while (y < lo || y > hi) {
      if (y < lo) {
        face_lt[2 * a] += lo - y;
        y = 2 * lo - y;
      } else {
        face_lt[2 * a + 1] += y - hi;
        y = 2 * hi - y;
      }
    }
    out[a] = y;
  }
  return out;
}

FKEstimate estimate_representation(const Vec3& x, const Mesh& mesh, const ProblemData& data,
                                   const Nonlinearity* g, const Field* u_field,
                                   const PathConfig& cfg) {
  const PathEnv env = make_env(mesh, data, g, u_field, cfg);
  for (int a = 0; a < mesh.dim; ++a)
    if (x[a] < env.box.lower[a] || x[a] > env.box.upper[a])
      throw std::invalid_argument("estimate_representation: probe outside the box");
  if (g) {
    if (!u_field) throw std::invalid_argument("estimate_representation: g needs a solved field");
    for (int v = 0; v < mesh.n_vertices(); ++v)
      if (mesh.boundary_vertex[v] && !((*u_field)[v] > 0))
        throw std::invalid_argument(
            "estimate_representation: u_field not strictly positive on the boundary");
  }
  if (boundary_integral(mesh, data.beta) <= 0)
    throw std::invalid_argument("estimate_representation: ||beta||_L1 = 0 (no killing)");

  const long n = cfg.n_paths;
  std::vector<PathTotals> per_path(n);
  parallel_for(static_cast<std::size_t>(n), cfg.threads, [&](std::size_t p0, std::size_t p1) {
    for (std::size_t p = p0; p < p1; ++p) per_path[p] = run_path(cfg.seed, p, x, env);
  });

  FKEstimate est;
  est.n_paths = n;
  double sum = 0, sum_int = 0, sum_bdy = 0;
  for (long p = 0; p < n; ++p) {
    sum_int += per_path[p].interior;
    sum_bdy += per_path[p].boundary;
    sum += per_path[p].interior + per_path[p].boundary;
  }
  est.mean = sum / n;
  est.interior_mean = sum_int / n;
  est.boundary_mean = sum_bdy / n;
  double ss = 0;
  for (long p = 0; p < n; ++p) {
    const double d = per_path[p].interior + per_path[p].boundary - est.mean;
    ss += d * d;
  }
  est.stderr_ = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  est.truncation_bound =
      cfg.horizon_eps *
      (u_field ? u_field->lpNorm<Eigen::Infinity>() : std::abs(est.mean) + 3 * est.stderr_);
  return est;
}

CalibrationResult calibrate_local_time(const PathConfig& cfg, const Mesh& mesh,
                                       double beta_const, long n_paths) {
  CalibrationResult out;
  if (!mesh.box) throw std::invalid_argument("calibrate_local_time: requires a box mesh");
  if (!(beta_const > 0)) throw std::invalid_argument("calibrate_local_time: beta must be positive");

  // exactly solvable linear reference: f = 1, h = 0. Its value at the center
  // decreases strictly in c_ell (more killing), which pins the constant; the
  // constant-h instance is invariant under c_ell and cannot calibrate.
  ProblemData data = constant_data(mesh, 1.0, beta_const, 0.0);
  const Field u_lin = solve_linear_robin(mesh, data, 0.0);
  Vec3 center;
  for (int a = 0; a < 3; ++a) center[a] = 0.5 * (mesh.box->lower[a] + mesh.box->upper[a]);
  std::vector<double> uv(u_lin.data(), u_lin.data() + u_lin.size());
  out.fem_reference = mesh.interpolate(uv, center);

  // one pass over common paths evaluates the whole c-grid
  const int K = 41;
  std::vector<double> cs(K);
  const double c_lo = 0.6, c_hi = 6.0;
  for (int k = 0; k < K; ++k) cs[k] = c_lo * std::pow(c_hi / c_lo, double(k) / (K - 1));

  const double sq2dt = std::sqrt(2.0 * cfg.dt);
  const long max_steps = static_cast<long>(std::llround(200.0 / cfg.dt));
  const int dim = mesh.dim;
  const Vec3 lo = mesh.box->lower, hi = mesh.box->upper;

  std::vector<std::vector<double>> per_path(n_paths, std::vector<double>(K, 0.0));
  parallel_for(static_cast<std::size_t>(n_paths), cfg.threads,
               [&](std::size_t p0, std::size_t p1) {
    for (std::size_t p = p0; p < p1; ++p) {
      Rng rng(cfg.seed ^ 0x5ca1ab1eULL, p);
      Vec3 x = center;
      std::vector<double> w(K, 1.0), occ(K, 0.0);
      long pending = 0;
      for (long step = 0; step < max_steps && w[0] >= cfg.horizon_eps; ++step) {
        ++pending;
        double raw = 0;
        for (int a = 0; a < dim; ++a) {
          double y = x[a] + sq2dt * rng.next_normal();
          while (y < lo[a] || y > hi[a]) {
            if (y < lo[a]) {
              raw += lo[a] - y;
              y = 2 * lo[a] - y;
            } else {
              raw += y - hi[a];
              y = 2 * hi[a] - y;
            }
          }
          x[a] = y;
        }
        if (raw > 0) {
          for (int k = 0; k < K; ++k) {
            occ[k] += w[k] * pending * cfg.dt;
            w[k] *= std::exp(-beta_const * cs[k] * raw);
          }
          pending = 0;
        }
      }
      for (int k = 0; k < K; ++k) occ[k] += w[k] * pending * cfg.dt;
      per_path[p] = std::move(occ);
    }
  });

  std::vector<double> mean(K, 0.0), sd(K, 0.0);
  for (long p = 0; p < n_paths; ++p)
    for (int k = 0; k < K; ++k) mean[k] += per_path[p][k];
  for (int k = 0; k < K; ++k) mean[k] /= n_paths;
  for (long p = 0; p < n_paths; ++p)
    for (int k = 0; k < K; ++k) {
      const double d = per_path[p][k] - mean[k];
      sd[k] += d * d;
    }
  for (int k = 0; k < K; ++k) sd[k] = std::sqrt(sd[k] / (n_paths - 1) / n_paths);

  // mean[k] decreases in c; bracket the FEM reference and interpolate
  const double target = out.fem_reference;
  if (target > mean[0] || target < mean[K - 1]) {
    out.ok = false;
    std::ostringstream msg;
    msg << "calibration failure: FEM reference " << target << " outside MC range ["
        << mean[K - 1] << ", " << mean[0] << "] over c_ell in [" << c_lo << ", " << c_hi << "]";
    out.message = msg.str();
    return out;
  }
  for (int k = 0; k + 1 < K; ++k) {
    if ((mean[k] - target) * (mean[k + 1] - target) <= 0) {
      const double t = (mean[k] - target) / (mean[k] - mean[k + 1]);
      out.c_ell = cs[k] + t * (cs[k + 1] - cs[k]);
      out.mc_value = mean[k] + t * (mean[k + 1] - mean[k]);
      out.stderr_ = std::max(sd[k], sd[k + 1]);
      out.ok = true;
      break;
    }
  }
  if (!out.ok) out.message = "calibration failure: no bracketing interval";
  return out;
}

std::vector<FellerPoint> feller_diagnostic(const Mesh& mesh, const ProblemData& data,
                                           const std::vector<double>& t_values,
                                           const std::vector<Vec3>& probes,
                                           const PathConfig& cfg) {
  const PathEnv env = make_env(mesh, data, nullptr, nullptr, cfg);
  std::vector<double> ts = t_values;
  std::sort(ts.begin(), ts.end());
  const int nt = static_cast<int>(ts.size());
  std::vector<long> checkpoint(nt);
  for (int i = 0; i < nt; ++i) checkpoint[i] = static_cast<long>(std::llround(ts[i] / cfg.dt));
  const long max_steps = nt ? checkpoint[nt - 1] : 0;

  std::vector<FellerPoint> out(nt);
  for (int i = 0; i < nt; ++i) out[i].t = ts[i];

  for (std::size_t pr = 0; pr < probes.size(); ++pr) {
    const Vec3 x0 = probes[pr];
    for (int a = 0; a < mesh.dim; ++a)
      if (x0[a] < env.box.lower[a] || x0[a] > env.box.upper[a])
        throw std::invalid_argument("feller_diagnostic: probe outside the box");

    std::vector<std::vector<double>> per_path(cfg.n_paths, std::vector<double>(nt, 0.0));
    parallel_for(static_cast<std::size_t>(cfg.n_paths), cfg.threads,
                 [&](std::size_t p0, std::size_t p1) {
      for (std::size_t p = p0; p < p1; ++p) {
        Rng rng(cfg.seed ^ (0xfe11e4 + 7919 * pr), p);
        Vec3 x = x0;
        double w = 1.0;
        int next_cp = 0;
        for (long step = 0; step < max_steps && next_cp < nt; ++step) {
          while (next_cp < nt && checkpoint[next_cp] == step) {
            per_path[p][next_cp] = 1.0 - w;
            ++next_cp;
          }
          if (next_cp >= nt) break;
          double raw_face[6] = {0, 0, 0, 0, 0, 0};
          bool event = false;
          for (int a = 0; a < env.dim; ++a) {
            double y = x[a] + env.sq2dt * rng.next_normal();
            while (y < env.box.lower[a] || y > env.box.upper[a]) {
              if (y < env.box.lower[a]) {
                raw_face[2 * a] += env.box.lower[a] - y;
                y = 2 * env.box.lower[a] - y;
              } else {
                raw_face[2 * a + 1] += y - env.box.upper[a];
                y = 2 * env.box.upper[a] - y;
              }
              event = true;
            }
            x[a] = y;
          }
          if (event) {
            for (int face = 0; face < 2 * env.dim; ++face) {
              if (raw_face[face] == 0) continue;
              double beta_p = env.beta_value;
              if (!env.beta_const) {
                Vec3 pt = x;
                const int a = face >> 1;
                pt[a] = (face & 1) ? env.box.upper[a] : env.box.lower[a];
                beta_p = interp(*env.mesh, *env.beta_vertex, pt);
              }
              w *= std::exp(-beta_p * env.c_ell * raw_face[face]);
            }
          }
        }
        while (next_cp < nt) {
          per_path[p][next_cp] = 1.0 - w;
          ++next_cp;
        }
      }
    });

    for (int i = 0; i < nt; ++i) {
      double m = 0;
      for (long p = 0; p < cfg.n_paths; ++p) m += per_path[p][i];
      m /= cfg.n_paths;
      double ss = 0;
      for (long p = 0; p < cfg.n_paths; ++p) {
        const double d = per_path[p][i] - m;
        ss += d * d;
      }
      const double se = cfg.n_paths > 1 ? std::sqrt(ss / (cfg.n_paths - 1) / cfg.n_paths) : 0.0;
      if (m > out[i].sup_estimate) {
        out[i].sup_estimate = m;
        out[i].stderr_ = se;
      }
    }
  }
  return out;
}

}  // namespace robin
