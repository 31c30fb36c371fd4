#pragma once

// Relaxed alternating minimization: the marginal update keeps the kernel
// anchored at the current iterate (v[u] = u), giving the multiplicative step
//   q_{n+1} = q_n .* c[q_n, q_n].
// One step per outer iteration, no inner solve, works for non-smooth
// divergence generators (tv). Linear convergence is guaranteed below a
// multiplier threshold estimated by sp_max_estimate.

#include <Eigen/Dense>

#include <optional>
#include <utility>

#include "rdpf/bounds.hpp"
#include "rdpf/divergence.hpp"
#include "rdpf/kernel.hpp"
#include "rdpf/prob.hpp"
#include "rdpf/solve_report.hpp"

namespace rdpf {

enum class SpGuard { off, warn, reject };

struct RamConfig {
  // Stop when the duality gap falls below eps and the coefficient vector
  // certifies stationarity to the same resolution (see solve_nam).
  double eps = 1e-9;
  long max_iters = 100000;
  SpGuard sp_guard = SpGuard::warn;
};

// One relaxed step from q_n: returns the successor marginal u_next = q_n .* c
// (before clamping) together with the coefficient vector c used.
std::pair<Distribution, Eigen::VectorXd> ram_step(const Distribution& p,
                                                  const Distribution& q_n,
                                                  const LagrangePair& s,
                                                  const DistortionMatrix& d,
                                                  const FDivergenceSpec& spec);

// Conservative estimate of the largest s_P with a linear-convergence
// guarantee: 1 / f''(1), the reciprocal curvature of the generator at ratio 1
// (the curvature scale of the divergence penalty near its minimum). When a
// contraction factor theta_max in (0, 1) is supplied the guarded form
// raw = 1/(theta*kappa), eps' = min(raw, (1/kappa)(1/theta - 1)) collapses to
// the same value; both are reported. Non-smooth generators admit no such
// estimate: threshold = +inf with guard_available = false.
struct SpMaxEstimate {
  double threshold = 0.0;
  bool guard_available = false;
  double curvature_at_one = 0.0;  // f''(1)
  double raw = 0.0;               // 1/(theta*kappa) when theta supplied
  double eps_prime = 0.0;
};
SpMaxEstimate sp_max_estimate(const Distribution& p, double s_D,
                              const DistortionMatrix& d,
                              const FDivergenceSpec& spec,
                              std::optional<double> theta_max = std::nullopt);

// Full solve. Non-convergence within max_iters is a first-class outcome
// (converged = false), not an error. The sp_guard policy controls whether an
// s_P above the estimated threshold is ignored, recorded in the diagnostics,
// or rejected with std::invalid_argument.
SolveReport solve_ram(const Distribution& p, const LagrangePair& s,
                      const DistortionMatrix& d, const FDivergenceSpec& spec,
                      const RamConfig& cfg = {},
                      std::optional<Distribution> q0 = std::nullopt);

}  // namespace rdpf
