#pragma once

// Shared result types for the two solvers.

#include <Eigen/Dense>

#include <vector>

#include "rdpf/prob.hpp"

namespace rdpf {

// The two solver schemes: Newton-accelerated and relaxed.
enum class Scheme { nam, ram };

// One outer iteration of either scheme, recorded after the step.
struct IterationRecord {
  long iter = 0;
  double omega = 0.0;          // duality gap after this step
  double v_objective = 0.0;    // descent objective after this step
  double lower = 0.0;          // certified lower bound at (at_D, at_P)
  double upper = 0.0;          // iterate value at the same point
  double at_D = 0.0;
  double at_P = 0.0;
  double c_max = 0.0;          // max of the coefficient vector
  double c_min_support = 0.0;  // min of c over { y : u(y) > support threshold }
  Eigen::VectorXd marginal;    // successor marginal u .* c (pre-clamping)
};

struct SolveDiagnostics {
  double newton_residual_inf = 0.0;  // ||T(root)||_inf at the final outer step
  std::vector<double> v_gap_trace;   // ||u_next - u||_inf per iteration
  std::vector<Eigen::Index> zero_support;  // coordinates pinned at the floor
                                           // for 10+ consecutive iterations
  bool sp_above_guard = false;       // s_P exceeded the convergence threshold
  double sp_threshold = 0.0;         // the threshold that was checked (RAM)
};

struct SolveReport {
  double D_s = 0.0;           // distortion certified by the final iterate
  double P_s = 0.0;           // divergence certified by the final iterate
  double rate = 0.0;          // value of the final iterate; equals upper_bound
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  long outer_iters = 0;
  long total_inner_iters = 0;
  bool converged = false;
  Distribution final_marginal;
  TransitionMatrix final_Q;
  std::vector<IterationRecord> trace;
  SolveDiagnostics diag;
};

// Marginal coordinates below this are excluded from the support when
// reporting c_min_support.
inline constexpr double kSupportThreshold = 1e-12;

}  // namespace rdpf
