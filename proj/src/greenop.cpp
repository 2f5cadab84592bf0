#include "robin/greenop.hpp"

#include <stdexcept>

namespace robin {

GreenOperator::GreenOperator(const AssembledForm& form, GreenMode mode, GreenConfig cfg)
    : form_(std::make_shared<AssembledForm>(form)), mode_(mode), cfg_(cfg) {
  Ak_ = form_->stiffness + form_->boundary_mass;
  if (mode_ == GreenMode::dense) {
    dense_.compute(Eigen::MatrixXd(Ak_));
    const double dmax = dense_.vectorD().maxCoeff();
    if (dense_.info() != Eigen::Success ||
        dense_.vectorD().minCoeff() <= 1e-12 * std::max(1.0, dmax))
      throw std::runtime_error("green operator: system is not positive definite");
  } else {
    inv_diag_ = Ak_.diagonal();
    for (int i = 0; i < inv_diag_.size(); ++i) {
      if (!(inv_diag_[i] > 0))
        throw std::runtime_error("green operator: nonpositive diagonal (indefinite system?)");
      inv_diag_[i] = 1.0 / inv_diag_[i];
    }
  }
}

Field GreenOperator::solve_spd(const SpMat& M, const Field& b) const {
  const double bnorm = b.norm();
  Field x = Field::Zero(b.size());
  if (bnorm == 0) {
    last_iterations_ = 0;
    return x;
  }
  Eigen::VectorXd dinv = M.diagonal();
  for (int i = 0; i < dinv.size(); ++i) dinv[i] = dinv[i] > 0 ? 1.0 / dinv[i] : 1.0;
  Field r = b;
  Field z = dinv.asDiagonal() * r;
  Field p = z;
  double rz = r.dot(z);
  int it = 0;
  for (; it < cfg_.max_iter; ++it) {
    if (r.norm() <= cfg_.tol * bnorm) break;
    const Field Mp = M * p;
    const double alpha = rz / p.dot(Mp);
    x += alpha * p;
    r -= alpha * Mp;
    z = dinv.asDiagonal() * r;
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  if (r.norm() > cfg_.tol * bnorm)
    throw std::runtime_error("green operator: CG iteration cap exceeded (residual " +
                             std::to_string(r.norm() / bnorm) + ")");
  last_iterations_ = it;
  total_iterations_ += it;
  return x;
}

Field GreenOperator::apply(const Field& b) const {
  if (b.size() != form_->n) throw std::invalid_argument("apply_green: dimension mismatch");
  if (mode_ == GreenMode::dense) {
    last_iterations_ = 0;
    return dense_.solve(b);
  }
  return solve_spd(Ak_, b);
}

Field solve_linear_robin(const Mesh& mesh, const ProblemData& data, double g_const,
                         GreenMode mode, GreenConfig cfg) {
  const AssembledForm form = assemble(mesh, data);
  GreenOperator op(form, mode, cfg);
  Field b = interior_load(mesh, data);
  if (g_const != 0.0) {
    BoundaryField hg = data.h;
    for (auto& fv : hg.facet_values)
      for (auto& x : fv) x *= g_const;
    if (hg.continuous) hg.vertex_values *= g_const;
    b += boundary_load(mesh, hg);
  }
  return op.apply(b);
}

double positivity_floor(const GreenOperator& op, const Field& b, int* argmin) {
  if (b.minCoeff() < 0) throw std::invalid_argument("positivity_floor: b must be nonnegative");
  if (!(b.sum() > 0)) throw std::invalid_argument("positivity_floor: b must be nontrivial");
  const Field u = op.apply(b);
  int idx = 0;
  const double v = u.minCoeff(&idx);
  if (argmin) *argmin = idx;
  return v;
}

}  // namespace robin
