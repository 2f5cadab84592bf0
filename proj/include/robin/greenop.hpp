#pragma once

#include <Eigen/Dense>
#include <memory>

#include "robin/forms.hpp"

namespace robin {

enum class GreenMode { iterative, dense };

struct GreenConfig {
  double tol = 1e-12;  // relative residual
  int max_iter = 20000;
};

// Discrete Green operator G^kappa = (A + M_kappa)^{-1} acting on load vectors.
// Iterative mode runs diagonally preconditioned CG; dense mode factorizes once
// and serves as the exact oracle.
class GreenOperator {
 public:
  GreenOperator(const AssembledForm& form, GreenMode mode = GreenMode::iterative,
                GreenConfig cfg = {});

  Field apply(const Field& b) const;

  const AssembledForm& form() const { return *form_; }
  const SpMat& matrix() const { return Ak_; }
  GreenMode mode() const { return mode_; }
  int last_iterations() const { return last_iterations_; }
  long total_iterations() const { return total_iterations_; }
  const GreenConfig& config() const { return cfg_; }

  // CG solve with an arbitrary SPD matrix sharing this operator's tolerance
  // (used by the Newton inner step)
  Field solve_spd(const SpMat& M, const Field& b) const;

 private:
  std::shared_ptr<const AssembledForm> form_;
  SpMat Ak_;
  GreenMode mode_;
  GreenConfig cfg_;
  Eigen::VectorXd inv_diag_;
  Eigen::LDLT<Eigen::MatrixXd> dense_;
  mutable int last_iterations_ = 0;
  mutable long total_iterations_ = 0;
};

// u = G^kappa(b_mu + b_{h * g_const}); the linear specialization of the
// integral equation with constant g
Field solve_linear_robin(const Mesh& mesh, const ProblemData& data, double g_const,
                         GreenMode mode = GreenMode::iterative, GreenConfig cfg = {});

// min over vertices of G^kappa b for b >= 0, b != 0 (positivity floor delta);
// optionally reports the arg-min vertex
double positivity_floor(const GreenOperator& op, const Field& b, int* argmin = nullptr);

}  // namespace robin
