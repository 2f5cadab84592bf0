#include "robin/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace robin {

namespace {

long long gcd_ll(long long a, long long b) {
  while (b) {
    const long long t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

Frac make_frac(long long num, long long den) {
  if (den == 0) return {num >= 0 ? 1 : -1, 0};  // infinity marker
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = gcd_ll(num < 0 ? -num : num, den);
  return {g ? num / g : num, g ? den / g : den};
}

// continued-fraction rational approximation (exact for the gammas in use)
Frac to_frac(double x, long long max_den = 1000000) {
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double v = x;
  for (int it = 0; it < 64; ++it) {
    const long long a = static_cast<long long>(std::floor(v));
    const long long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    if (std::abs(x - double(p1) / double(q1)) < 1e-13 * std::max(1.0, std::abs(x))) break;
    const double frac = v - a;
    if (frac < 1e-15) break;
    v = 1.0 / frac;
  }
  return make_frac(p1, q1);
}

}  // namespace

double Frac::value() const {
  if (den == 0) return std::numeric_limits<double>::infinity();
  return double(num) / double(den);
}

std::string Frac::str() const {
  if (den == 0) return "inf";
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

std::vector<EstimateVerdict> check_energy_truncation(const AssembledForm& form,
                                                     const Instance& inst,
                                                     const Nonlinearity& g, const Field& u,
                                                     const std::vector<double>& k_grid,
                                                     double tol, double allowance_coeff) {
  // both sides recomputed from the raw field, nothing reused from the solver
  Field gu = Field::Zero(inst.n);
  for (int i = 0; i < inst.n; ++i)
    if (inst.boundary_flag[i]) gu[i] = g(u[i]);
  const double hg = inst.hg_l1(gu);
  const double mass = inst.mu_mass + hg;

  std::vector<EstimateVerdict> out;
  for (double k : k_grid) {
    Field tk(u.size());
    for (int i = 0; i < u.size(); ++i) tk[i] = truncate(k, u[i]);
    EstimateVerdict v;
    v.name = "energy_truncation";
    v.lhs = energy(form, tk, tk);
    v.rhs = k * mass;
    v.allowance = allowance_coeff * form.mesh_size * std::abs(v.rhs);
    v.slack = v.rhs != 0 ? v.lhs / v.rhs : (v.lhs > 0 ? std::numeric_limits<double>::infinity() : 1.0);
    v.pass = v.lhs <= v.rhs * (1 + tol) + v.allowance;
    std::ostringstream ctx;
    ctx << "k=" << k << " mu(D)=" << inst.mu_mass << " ||hg(u)||=" << hg
        << " mesh_size=" << form.mesh_size;
    v.context = ctx.str();
    out.push_back(std::move(v));
  }
  return out;
}

EstimateVerdict check_power_energy(const AssembledForm& form, const Instance& inst,
                                   const Field& u, double gamma) {
  if (std::abs(inst.mu_mass) > 1e-14 || inst.b_mu.lpNorm<1>() > 1e-14)
    throw std::invalid_argument("check_power_energy: requires mu = 0");
  if (u.minCoeff() <= 0)
    throw std::invalid_argument("check_power_energy: requires u > 0 at every vertex");
  Field v(u.size());
  for (int i = 0; i < u.size(); ++i) v[i] = std::pow(u[i], 0.5 * (1.0 + gamma));
  Field ones = Field::Ones(inst.n);
  Field one_boundary = Field::Zero(inst.n);
  for (int i = 0; i < inst.n; ++i)
    if (inst.boundary_flag[i]) one_boundary[i] = 1.0;
  EstimateVerdict out;
  out.name = "power_energy";
  out.lhs = energy(form, v, v);
  out.rhs = inst.hg_l1(one_boundary);  // ||h||_L1(sigma)
  out.slack = out.rhs != 0 ? out.lhs / out.rhs : std::numeric_limits<double>::infinity();
  out.pass = std::isfinite(out.slack) && out.slack > 0;
  std::ostringstream ctx;
  ctx << "gamma=" << gamma << " c_emp=" << out.slack << " mesh_size=" << form.mesh_size;
  out.context = ctx.str();
  return out;
}

TailResult tail_exponent(const std::vector<std::pair<double, double>>& samples, double r_claim) {
  if (samples.empty()) throw std::invalid_argument("tail_exponent: empty sample");
  double vmin = std::numeric_limits<double>::infinity(), vmax = 0;
  for (const auto& [v, w] : samples) {
    if (w <= 0) throw std::invalid_argument("tail_exponent: weights must be positive");
    if (v > 0) vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  TailResult out;
  if (!(vmax > 0)) {  // identically zero field
    out.curve.push_back({1.0, 0.0});
    return out;
  }
  if (!std::isfinite(vmin)) vmin = vmax;
  const int npts = 48;
  const double lo = std::log(vmin), hi = std::log(vmax);
  for (int i = 0; i < npts; ++i) {
    // tiny downward nudge so grid points generated from sample values count them
    const double t = std::exp(lo + (hi - lo) * i / (npts - 1)) * (1.0 - 1e-12);
    double lam = 0;
    for (const auto& [v, w] : samples)
      if (v >= t) lam += w;
    out.curve.push_back({t, lam});
    out.sup_tr_lambda = std::max(out.sup_tr_lambda, std::pow(t, r_claim) * lam);
  }
  // slope of log lambda vs log t over the upper half of the grid where lambda > 0
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int i = npts / 2; i < npts; ++i) {
    if (out.curve[i].second <= 0) break;
    const double X = std::log(out.curve[i].first), Y = std::log(out.curve[i].second);
    sx += X; sy += Y; sxx += X * X; sxy += X * Y;
    ++cnt;
  }
  if (cnt >= 2) out.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return out;
}

ExponentTable weak_solution_exponents(int d, double gamma) {
  if (!(gamma > 0)) throw std::invalid_argument("weak_solution_exponents: gamma > 0 required");
  ExponentTable t;
  t.in_paper_regime = d >= 3;
  t.p = make_frac(2 * d, d + 2);
  t.q = make_frac(2 * (d - 1), d);
  const Frac gf = to_frac(gamma);
  // r = 2(d-1) / (d + gamma (d-2)) with gamma = a/b
  t.r = make_frac(2 * (d - 1) * gf.den, d * gf.den + gf.num * (d - 2));
  t.m_interior = make_frac(d, d - 2);
  t.m_grad = make_frac(d, d - 1);
  t.m_boundary = make_frac(d - 1, d - 2);
  return t;
}

std::vector<EstimateVerdict> check_stability(const DiscreteForm& base,
                                             const std::vector<Eigen::VectorXd>& f_sequence,
                                             const Nonlinearity& g, double tol) {
  if (!g.nonincreasing)
    throw std::invalid_argument("check_stability: g must be nonincreasing (uniqueness regime)");
  const Eigen::MatrixXd G = green_dense(base);
  const Eigen::VectorXd u = fixed_point_exact(base, g);
  std::vector<EstimateVerdict> out;
  double prev_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < f_sequence.size(); ++k) {
    DiscreteForm pert = base;
    pert.mu_vec = f_sequence[k];
    const Eigen::VectorXd un = fixed_point_exact(pert, g);
    const Eigen::VectorXd majorant = G * (f_sequence[k] - base.mu_vec).cwiseAbs();
    EstimateVerdict v;
    v.name = "stability";
    v.lhs = 0;
    v.rhs = 0;
    bool ok = true;
    for (int i = 0; i < base.n(); ++i) {
      const double gap = std::abs(un[i] - u[i]);
      v.lhs = std::max(v.lhs, gap - majorant[i]);
      if (gap > majorant[i] + tol) ok = false;
    }
    const double sup_gap = (un - u).lpNorm<Eigen::Infinity>();
    v.rhs = tol;
    v.slack = sup_gap;
    v.pass = ok;
    std::ostringstream ctx;
    ctx << "step " << k << " sup|u_n-u|=" << sup_gap << " prev=" << prev_gap;
    v.context = ctx.str();
    prev_gap = sup_gap;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<EstimateVerdict> comparison_batch(const Mesh& mesh, int n_pairs, uint64_t seed,
                                              double tol) {
  std::vector<EstimateVerdict> out;
  Rng rng(seed);
  const int nv = mesh.n_vertices();
  for (int pair = 0; pair < n_pairs; ++pair) {
    // ordered data: mu_1 <= mu_2, h_1 <= h_2, g_1 <= g_2 (shared beta)
    ProblemData d1, d2;
    const double beta_c = 0.3 + 1.7 * rng.next_uniform();
    d1.beta = d2.beta = BoundaryField::from_constant(mesh, beta_c);
    Field f1(nv), f2(nv), h1(nv), h2(nv);
    for (int v = 0; v < nv; ++v) {
      f1[v] = rng.next_uniform();
      f2[v] = f1[v] + rng.next_uniform();
      h1[v] = 0.5 * rng.next_uniform();
      h2[v] = h1[v] + 0.5 * rng.next_uniform();
    }
    d1.f = f1;
    d2.f = f2;
    d1.h = BoundaryField::from_vertex_values(mesh, h1);
    d2.h = BoundaryField::from_vertex_values(mesh, h2);
    const double gamma = 0.5 + 1.5 * rng.next_uniform();
    const double c1 = 0.3 + rng.next_uniform();
    const double c2 = c1 + rng.next_uniform();

    const AssembledForm form = assemble(mesh, d1);  // beta shared, same operator
    GreenOperator op(form, GreenMode::iterative);
    const Instance i1 = make_instance(mesh, d1, op);
    const Instance i2 = make_instance(mesh, d2, op);
    SolveOptions opts;
    opts.tol = 1e-10;
    const SolveReport r1 = solve(i1, Nonlinearity::power(c1, gamma), opts);
    const SolveReport r2 = solve(i2, Nonlinearity::power(c2, gamma), opts);

    EstimateVerdict v;
    v.name = "comparison";
    v.lhs = (r1.u - r2.u).maxCoeff();  // worst violation of u_1 <= u_2
    v.rhs = tol;
    v.slack = v.lhs;
    v.pass = v.lhs <= tol;
    std::ostringstream ctx;
    ctx << "pair " << pair << " gamma=" << gamma << " c1=" << c1 << " c2=" << c2;
    v.context = ctx.str();
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace robin
