#pragma once

#include <cstdint>

#include "robin/measures.hpp"
#include "robin/nonlinearity.hpp"

namespace robin {

struct PathConfig {
  double dt = 1e-4;
  double horizon_eps = 1e-3;  // truncate a path once its survival weight drops below this
  long n_paths = 10000;
  uint64_t seed = 1;
  double local_time_scale = 2.0;  // c_ell; ~2 for the overshoot estimator of this walk
  int threads = 1;
};

struct FKEstimate {
  double mean = 0;
  double stderr_ = 0;
  double interior_mean = 0;   // int e^{-A} f dt part
  double boundary_mean = 0;   // int e^{-A} h g(u) dA^sigma part
  double truncation_bound = 0;  // horizon_eps times a bound on the remaining integral
  long n_paths = 0;
};

struct BoxDomain {
  Vec3 lower{0, 0, 0};
  Vec3 upper{1, 1, 1};
  int dim = 2;
};

// one Euler step of the reflected walk: x_next = fold(x + sqrt(2) dw) where dw
// is the Gaussian increment over dt. Raw overshoot distances are accumulated
// into face_lt (face index 2*axis + side); the caller applies c_ell.
Vec3 step_reflected(const Vec3& x, const Vec3& dw, const BoxDomain& box, double face_lt[6]);

// Monte Carlo estimate of the representation
//   u(x) = E int e^{-A_t} f(X_t) dt + E int e^{-A_t} h(X) g(u_field(X)) dA^sigma_t
// with u_field a solved FEM field (verification mode). Requires a box mesh and
// a = I; beta and h must be nodal (continuous) boundary data.
FKEstimate estimate_representation(const Vec3& x, const Mesh& mesh, const ProblemData& data,
                                   const Nonlinearity* g, const Field* u_field,
                                   const PathConfig& cfg);

struct CalibrationResult {
  double c_ell = 0;
  double fem_reference = 0;  // FEM value at the box center
  double mc_value = 0;       // MC estimate at the calibrated c_ell
  double stderr_ = 0;
  bool ok = false;
  std::string message;
};

// pins c_ell against an exactly solvable linear problem (f = 1, h = 0,
// beta = const on the box: the estimate is strictly monotone in c_ell, unlike
// the constant-h case whose estimate is c_ell-invariant)
CalibrationResult calibrate_local_time(const PathConfig& cfg, const Mesh& mesh,
                                       double beta_const, long n_paths);

struct FellerPoint {
  double t = 0;
  double sup_estimate = 0;  // max over probes of E_x(1 - e^{-A_t})
  double stderr_ = 0;       // at the arg-max probe
};

// strong-Feller diagnostic: sup_x E_x(1 - e^{-A_t}) for each t, evaluated on
// the probe grid with common paths per probe (monotone in t by construction)
std::vector<FellerPoint> feller_diagnostic(const Mesh& mesh, const ProblemData& data,
                                           const std::vector<double>& t_values,
                                           const std::vector<Vec3>& probes,
                                           const PathConfig& cfg);

}  // namespace robin
