#include "robin/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace robin {

namespace {

Field truncated_h_vertex(const Field& h, long n) {
  if (n <= 0) return h;
  return h.cwiseMin(static_cast<double>(n));
}

BoundaryField truncated_h_facet(const BoundaryField& h, long n) {
  if (n <= 0) return h;
  BoundaryField out = h;
  for (auto& fv : out.facet_values)
    for (auto& x : fv) x = std::min(x, static_cast<double>(n));
  if (out.continuous) out.vertex_values = out.vertex_values.cwiseMin(static_cast<double>(n));
  return out;
}

}  // namespace

Field Instance::boundary_load_gu(const Field& gu, long h_trunc) const {
  if (!facetwise) {
    const Field hn = truncated_h_vertex(h_vertex, h_trunc);
    return Bsigma * hn.cwiseProduct(gu);
  }
  BoundaryField hn = truncated_h_facet(h_facet, h_trunc);
  BoundaryField w = hn;
  for (std::size_t fi = 0; fi < w.facet_values.size(); ++fi) {
    const auto& bf = mesh->boundary_facets[fi];
    for (int k = 0; k < mesh->dim; ++k) w.facet_values[fi][k] = hn.facet_values[fi][k] * gu[bf.v[k]];
  }
  w.continuous = false;
  return boundary_load(*mesh, w);
}

double Instance::hg_l1(const Field& gu) const {
  // hat functions sum to one, so the load total is the boundary integral
  return boundary_load_gu(gu, 0).sum();
}

Instance make_instance(const Mesh& mesh, const ProblemData& data, const GreenOperator& op) {
  Instance inst;
  inst.op = &op;
  inst.n = mesh.n_vertices();
  inst.b_mu = interior_load(mesh, data);
  inst.mu_mass = mu_total(mesh, data);
  inst.boundary_flag = mesh.boundary_vertex;
  inst.mesh = &mesh;
  if (data.h.continuous) {
    inst.h_vertex = data.h.vertex_values;
    inst.Bsigma = boundary_sigma_matrix(mesh);
  } else {
    inst.facetwise = true;
    inst.h_facet = data.h;
  }
  return inst;
}

Instance make_instance(const DiscreteForm& form, const GreenOperator& op) {
  Instance inst;
  inst.op = &op;
  inst.n = form.n();
  inst.b_mu = form.mu_vec;
  inst.mu_mass = form.mu_vec.sum();
  inst.boundary_flag = form.boundary;
  inst.h_vertex = form.h_vec;
  std::vector<Eigen::Triplet<double>> ts;
  for (int i = 0; i < inst.n; ++i)
    if (form.sigma_w[i] != 0) ts.emplace_back(i, i, form.sigma_w[i]);
  inst.Bsigma.resize(inst.n, inst.n);
  inst.Bsigma.setFromTriplets(ts.begin(), ts.end());
  return inst;
}

StageResult solve_fixed_n(const Instance& inst, const Nonlinearity& g, long n, long h_trunc,
                          const Field& u_init, const SolveOptions& opts) {
  const Regularized gn = regularize(g, n);
  StageResult res;
  res.n = n;

  auto gu_of = [&](const Field& u) {
    Field gu = Field::Zero(inst.n);
    for (int i = 0; i < inst.n; ++i)
      if (inst.boundary_flag[i]) gu[i] = gn(u[i]);
    return gu;
  };
  auto phi = [&](const Field& u) {
    return inst.op->apply(inst.b_mu + inst.boundary_load_gu(gu_of(u), h_trunc));
  };
  auto residual_of = [&](const Field& u, const Field& pu) {
    return (pu - u).lpNorm<Eigen::Infinity>() / std::max(1.0, u.lpNorm<Eigen::Infinity>());
  };

  Field u = u_init;
  double omega = opts.omega;
  Field pu = phi(u);
  double res_now = residual_of(u, pu);
  res.residual_history.push_back(res_now);
  int it = 0;
  const bool can_newton = inst.newton_available() && g.nonincreasing;

  while (res_now > opts.tol && it < opts.max_inner) {
    // switch to Newton once the damped contraction has had its chance
    if (can_newton && it >= 20) break;
    u = (1 - omega) * u + omega * pu;
    pu = phi(u);
    const double r = residual_of(u, pu);
    if (r > res_now) omega = std::max(0.05, 0.6 * omega);
    res_now = r;
    res.residual_history.push_back(res_now);
    ++it;
  }

  if (res_now > opts.tol && can_newton) {
    // Newton on R(u) = (A + M_kappa) u - b_mu - load(h_n g_n(u));
    // J = (A + M_kappa) - Bsigma diag(h_n g_n'(u)) is SPD for nonincreasing g
    const Field hn = truncated_h_vertex(inst.h_vertex, h_trunc);
    res.newton_used = true;
    while (res_now > opts.tol && it < opts.max_inner) {
      Field w = Field::Zero(inst.n);
      for (int i = 0; i < inst.n; ++i)
        if (inst.boundary_flag[i]) w[i] = hn[i] * gn.deriv(u[i]);
      SpMat J = inst.op->matrix() - SpMat(inst.Bsigma * w.asDiagonal());
      const Field R = inst.op->matrix() * u - inst.b_mu - inst.boundary_load_gu(gu_of(u), h_trunc);
      const Field du = inst.op->solve_spd(J, -R);
      const Field u_try = u + du;
      const Field pu_try = phi(u_try);
      const double r_try = residual_of(u_try, pu_try);
      if (r_try < res_now) {
        u = u_try;
        pu = pu_try;
        res_now = r_try;
      } else {
        // Newton overshoot: take a damped fixed-point step instead
        omega = std::max(0.05, 0.6 * omega);
        u = (1 - omega) * u + omega * pu;
        pu = phi(u);
        res_now = residual_of(u, pu);
      }
      res.residual_history.push_back(res_now);
      ++it;
    }
  }

  if (res_now > opts.tol) {
    std::string hist;
    const std::size_t nh = res.residual_history.size();
    for (std::size_t i = nh > 6 ? nh - 6 : 0; i < nh; ++i)
      hist += " " + std::to_string(res.residual_history[i]);
    throw std::runtime_error("solve_fixed_n: inner iteration diverged at n = " +
                             std::to_string(n) + ", residual history ..." + hist);
  }
  res.u = u;
  res.iterations = it;
  res.residual = res_now;
  return res;
}

SolveReport solve(const Instance& inst, const Nonlinearity& g, const SolveOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  rep.uniqueness_guaranteed = g.nonincreasing;
  const long green0 = inst.op->total_iterations();

  // initial guess: linear solve with the boundary weight h_1 g_1(1)
  const Regularized g1 = regularize(g, 1);
  Field gu0 = Field::Zero(inst.n);
  for (int i = 0; i < inst.n; ++i)
    if (inst.boundary_flag[i]) gu0[i] = g1(1.0);
  Field u = inst.op->apply(inst.b_mu + inst.boundary_load_gu(gu0, 1));

  std::vector<long> schedule = opts.schedule;
  if (schedule.empty())
    for (long n = 1; n <= opts.n_max; n *= 2) schedule.push_back(n);
  for (long n : schedule) {
    StageResult st = solve_fixed_n(inst, g, n, n, u, opts);
    if (!rep.stages.empty() && g.nonincreasing) {
      const double viol = (u - st.u).maxCoeff();
      rep.worst_monotonicity_violation = std::max(rep.worst_monotonicity_violation, viol);
      if (viol > opts.tol_mono) rep.monotone_ok = false;
    }
    const double change = (st.u - u).lpNorm<Eigen::Infinity>();
    u = st.u;
    rep.stages.push_back(std::move(st));
    if (rep.stages.size() > 1 && change < opts.tol_outer) break;
  }

  if (opts.polish) {
    StageResult st = solve_fixed_n(inst, g, 0, 0, u, opts);
    if (g.nonincreasing) {
      const double viol = (u - st.u).maxCoeff();
      rep.worst_monotonicity_violation = std::max(rep.worst_monotonicity_violation, viol);
      if (viol > opts.tol_mono) rep.monotone_ok = false;
    }
    u = st.u;
    rep.stages.push_back(std::move(st));
  }

  rep.u = u;
  rep.final_residual = rep.stages.back().residual;
  Field gu = Field::Zero(inst.n);
  for (int i = 0; i < inst.n; ++i)
    if (inst.boundary_flag[i]) gu[i] = g(u[i]);
  rep.hg_l1 = inst.hg_l1(gu);
  rep.min_u = u.minCoeff();
  rep.green_iterations = inst.op->total_iterations() - green0;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

std::pair<Field, Field> bracket_solutions(const Instance& inst, const Nonlinearity& g,
                                          const SolveOptions& opts) {
  const Nonlinearity g_sub = Nonlinearity::power(g.c1, g.gamma);
  const Nonlinearity g_super = Nonlinearity::power(g.c2, g.gamma);
  SolveReport lo = solve(inst, g_sub, opts);
  SolveReport hi = solve(inst, g_super, opts);
  return {lo.u, hi.u};
}

MixedReport solve_mixed(const Instance& inst, const Nonlinearity& g1, const Nonlinearity& g2,
                        const SolveOptions& opts) {
  if (!g1.nonincreasing || !g2.nonincreasing)
    throw std::invalid_argument("solve_mixed: g1, g2 must be nonincreasing");
  MixedReport rep;

  // combined nonlinearity evaluated as a plain sum; the envelope constants of
  // the summands do not transfer, so skip single-power validation
  Nonlinearity gsum;
  gsum.kind = Nonlinearity::Kind::custom;
  gsum.gamma = std::max(g1.gamma, g2.gamma);
  gsum.c1 = std::min(g1.c1, g2.c1);
  gsum.c2 = g1.c2 + g2.c2;
  gsum.nonincreasing = true;
  gsum.custom_eval = [g1, g2](double y) { return g1(y) + g2(y); };

  rep.main.uniqueness_guaranteed = true;
  const Regularized gs1 = regularize(gsum, 1);
  Field gu0 = Field::Zero(inst.n);
  for (int i = 0; i < inst.n; ++i)
    if (inst.boundary_flag[i]) gu0[i] = gs1(1.0);
  Field u = inst.op->apply(inst.b_mu + inst.boundary_load_gu(gu0, 1));
  Field u1, u2;

  auto compare_stage = [&](long n, const Field& un) {
    // single-exponent comparison problems with the lower envelope constant
    const Nonlinearity p1 = Nonlinearity::power(std::min(g1.c1, g2.c1), g1.gamma);
    const Nonlinearity p2 = Nonlinearity::power(std::min(g1.c1, g2.c1), g2.gamma);
    u1 = solve_fixed_n(inst, p1, n, n, un, opts).u;
    u2 = solve_fixed_n(inst, p2, n, n, un, opts).u;
    rep.worst_comparison_violation = std::max(
        {rep.worst_comparison_violation, (u1 - un).maxCoeff(), (u2 - un).maxCoeff()});
    const double shift = n > 0 ? 1.0 / n : 0.0;
    const double c2m = std::max(g1.c2, g2.c2);
    for (int i = 0; i < inst.n; ++i) {
      if (!inst.boundary_flag[i]) continue;
      const double lhs = g1(un[i] + shift) + g2(un[i] + shift);
      const double rhs = c2m * std::pow(2.0, g1.gamma) * std::pow(u1[i] + shift, -g1.gamma) +
                         c2m * std::pow(2.0, g2.gamma) * std::pow(u2[i] + shift, -g2.gamma);
      rep.worst_envelope_violation = std::max(rep.worst_envelope_violation, lhs - rhs);
    }
  };

  for (long n = 1; n <= opts.n_max; n *= 2) {
    StageResult st = solve_fixed_n(inst, gsum, n, n, u, opts);
    if (!rep.main.stages.empty()) {
      const double viol = (u - st.u).maxCoeff();
      rep.main.worst_monotonicity_violation =
          std::max(rep.main.worst_monotonicity_violation, viol);
      if (viol > opts.tol_mono) rep.main.monotone_ok = false;
    }
    compare_stage(n, st.u);
    const double change = (st.u - u).lpNorm<Eigen::Infinity>();
    u = st.u;
    rep.main.stages.push_back(std::move(st));
    if (rep.main.stages.size() > 1 && change < opts.tol_outer) break;
  }
  if (opts.polish) {
    StageResult st = solve_fixed_n(inst, gsum, 0, 0, u, opts);
    compare_stage(0, st.u);
    u = st.u;
    rep.main.stages.push_back(std::move(st));
  }

  const double tol_cmp = 100 * opts.tol;
  rep.comparison_ok = rep.worst_comparison_violation <= tol_cmp;
  rep.envelope_ok = rep.worst_envelope_violation <= tol_cmp;
  rep.main.u = u;
  rep.main.final_residual = rep.main.stages.back().residual;
  Field gu = Field::Zero(inst.n);
  for (int i = 0; i < inst.n; ++i)
    if (inst.boundary_flag[i]) gu[i] = gsum(u[i]);
  rep.main.hg_l1 = inst.hg_l1(gu);
  rep.main.min_u = u.minCoeff();
  rep.u_comp1 = u1;
  rep.u_comp2 = u2;
  return rep;
}

std::pair<Field, double> renormalized_defect(const Instance& inst, const Nonlinearity& g,
                                             const Field& u, double k) {
  if (!(k > 0)) throw std::invalid_argument("renormalized_defect: k must be positive");
  Field tk(u.size());
  for (int i = 0; i < u.size(); ++i) tk[i] = truncate(k, u[i]);
  Field gu = Field::Zero(inst.n);
  for (int i = 0; i < inst.n; ++i)
    if (inst.boundary_flag[i]) gu[i] = g(u[i]);
  const Field nu = inst.op->matrix() * tk - inst.b_mu - inst.boundary_load_gu(gu, 0);
  return {nu, nu.lpNorm<1>()};
}

ManufacturedProblem manufactured_data(const Mesh& mesh, const Expr& u_star,
                                      const std::array<std::array<Expr, 3>, 3>& a,
                                      const Expr& beta, const Nonlinearity& g) {
  const int d = mesh.dim;
  ManufacturedProblem out;
  out.u_star = u_star;

  std::array<Expr, 3> du;
  for (int i = 0; i < d; ++i) du[i] = u_star.diff(i);
  out.grad_u_star = du;

  // flux components (a grad u*)_i and f = -div(a grad u*)
  std::array<Expr, 3> flux;
  for (int i = 0; i < d; ++i) {
    Expr acc = Expr::constant(0.0);
    for (int j = 0; j < d; ++j) acc = acc + a[i][j] * du[j];
    flux[i] = acc;
  }
  Expr f_expr = Expr::constant(0.0);
  for (int i = 0; i < d; ++i) f_expr = f_expr - flux[i].diff(i);

  ProblemData data;
  data.f = Field::Zero(mesh.n_vertices());
  out.u_star_vertex = Field::Zero(mesh.n_vertices());
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    data.f[v] = f_expr.eval(mesh.vertices[v]);
    out.u_star_vertex[v] = u_star.eval(mesh.vertices[v]);
    if (!(out.u_star_vertex[v] > 0))
      throw std::invalid_argument("manufactured_data: u_star must be strictly positive");
  }

  data.beta = BoundaryField::from_function(
      mesh, [&](const Vec3& x) { return beta.eval(x); });

  // h = (-(a grad u*).n_inward + beta u*) / g(u*), per facet vertex (the flux
  // jumps at corners, so h is facetwise)
  BoundaryField h;
  h.continuous = false;
  h.facet_values.resize(mesh.boundary_facets.size());
  for (std::size_t fi = 0; fi < mesh.boundary_facets.size(); ++fi) {
    const auto& bf = mesh.boundary_facets[fi];
    for (int k = 0; k < d; ++k) {
      const Vec3& x = mesh.vertices[bf.v[k]];
      double fdotn = 0;
      for (int i = 0; i < d; ++i) fdotn += flux[i].eval(x) * bf.inward_normal[i];
      const double us = u_star.eval(x);
      double hv = (-fdotn + beta.eval(x) * us) / g(us);
      if (hv < -1e-12 * std::max(1.0, std::abs(hv)))
        throw std::invalid_argument(
            "manufactured_data: computed h < 0 on facet " + std::to_string(fi) +
            " (u_star incompatible with the data class)");
      h.facet_values[fi][k] = std::max(0.0, hv);
    }
  }
  data.h = h;

  bool a_is_identity = true;
  for (int i = 0; i < d && a_is_identity; ++i)
    for (int j = 0; j < d && a_is_identity; ++j) {
      double c = 0;
      if (!a[i][j].is_constant(&c) || c != (i == j ? 1.0 : 0.0)) a_is_identity = false;
    }
  double lam = 1.0;
  if (!a_is_identity) {
    data.coeff_a.resize(mesh.n_simplices());
    for (int s = 0; s < mesh.n_simplices(); ++s) {
      CoeffMat m = CoeffMat::Identity();
      const Vec3 c = mesh.simplex_centroid(s);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = a[i][j].eval(c);
      data.coeff_a[s] = m;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.topLeftCorner(d, d));
      lam = std::max({lam, es.eigenvalues().maxCoeff(), 1.0 / es.eigenvalues().minCoeff()});
    }
  }
  data.lambda_bound = lam;
  out.data = std::move(data);
  return out;
}

ManufacturedProblem manufactured_data(const Mesh& mesh, const std::string& u_star,
                                      const std::string& beta, const Nonlinearity& g) {
  std::array<std::array<Expr, 3>, 3> a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a[i][j] = Expr::constant(i == j ? 1.0 : 0.0);
  return manufactured_data(mesh, Expr::parse(u_star), a, Expr::parse(beta), g);
}

double mms_h1_error(const Mesh& mesh, const Field& u_h, const ManufacturedProblem& mms) {
  double acc = 0;
  for (int s = 0; s < mesh.n_simplices(); ++s) {
    const double vol = mesh.simplex_volume(s);
    const auto grads = mesh.hat_gradients(s);
    const auto& sp = mesh.simplices[s];
    const Vec3 c = mesh.simplex_centroid(s);
    Vec3 gh{0, 0, 0};
    double uh = 0;
    for (int k = 0; k <= mesh.dim; ++k) {
      gh = vadd(gh, vscale(u_h[sp[k]], grads[k]));
      uh += u_h[sp[k]] / (mesh.dim + 1);
    }
    double gerr = 0;
    for (int i = 0; i < mesh.dim; ++i) {
      const double d = gh[i] - mms.grad_u_star[i].eval(c);
      gerr += d * d;
    }
    const double uerr = uh - mms.u_star.eval(c);
    acc += vol * (gerr + uerr * uerr);
  }
  return std::sqrt(acc);
}

}  // namespace robin
