#pragma once

// Independent reference implementations used to validate the solvers:
// a refining brute-force grid search over the channel polytope (binary and
// ternary sources), a textbook alternating-minimization rate-distortion
// solver, and the closed-form binary rate-distortion function.
//
// Everything here performs its own mutual-information and divergence
// summations; no code is shared with the solver kernel.

#include <Eigen/Dense>

#include "rdpf/divergence.hpp"
#include "rdpf/prob.hpp"

namespace rdpf {

struct OracleResult {
  double lagrangian_value = 0.0;  // min over the grid of I + s_D D + s_P P
  TransitionMatrix argmin_Q;
  double D_at_min = 0.0;
  double P_at_min = 0.0;
  int refinement_levels = 0;
};

// Grid search over row-stochastic Q with rows confined to the open simplex
// (entries in [floor, 1 - floor]). Each refinement level shrinks the search
// window around the incumbent by 4x and rescans. The incumbent is updated
// only on strict improvement in row-major scan order, so the result is
// deterministic. lagrangian_value is non-increasing in refine_levels.
// Supports |X| = |Y| in {2, 3}; ternary scans cap the per-dimension grid at
// 12 points to keep the six-dimensional scan tractable.
OracleResult brute_force_lagrangian(const Distribution& p,
                                    const LagrangePair& s,
                                    const DistortionMatrix& d,
                                    const FDivergenceSpec& spec, int grid_n,
                                    int refine_levels);

// One textbook alternating-minimization update of the output marginal for the
// plain rate-distortion problem (no divergence penalty).
Distribution classical_ba_step(const Distribution& p, const Distribution& q,
                               double s_D, const DistortionMatrix& d);

// Textbook rate-distortion solver at slope s_D; returns (D, R) at the stop
// point where its own duality gap falls below eps. Independent summations,
// no log-domain shifting.
std::pair<double, double> classical_ba(const Distribution& p, double s_D,
                                       const DistortionMatrix& d, double eps);

// Closed-form binary-source Hamming rate-distortion function, in nats:
// h(p) - h(D) for 0 <= D < p, else 0. Requires 0 < p <= 1/2 and D >= 0.
double binary_rdf(double p, double D);

}  // namespace rdpf
