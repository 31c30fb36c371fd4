#pragma once

// Convergence diagnostics: fixed-point Jacobians of both schemes at a solved
// point, their spectra, a distortion-rank probe, and an empirical
// convergence-rate fit from an error trace.

#include <Eigen/Dense>

#include <optional>
#include <utility>
#include <vector>

#include "rdpf/divergence.hpp"
#include "rdpf/kernel.hpp"
#include "rdpf/prob.hpp"
#include "rdpf/solve_report.hpp"

namespace rdpf {

// Jacobian of the exact alternating-minimization marginal map at fixed point
// q_star:  (I + (I - M*) Gamma*)^{-1} (I - M*),  with M* and Gamma* evaluated
// at (q_star, q_star). Requires a smooth generator when s_P > 0.
Eigen::MatrixXd fixed_point_jacobian_oam(const Distribution& p,
                                         const Distribution& q_star,
                                         const LagrangePair& s,
                                         const DistortionMatrix& d,
                                         const FDivergenceSpec& spec);

// Jacobian of the relaxed map at q_star:  (I - M*) (I - Gamma*).
Eigen::MatrixXd fixed_point_jacobian_ram(const Distribution& p,
                                         const Distribution& q_star,
                                         const LagrangePair& s,
                                         const DistortionMatrix& d,
                                         const FDivergenceSpec& spec);

// True when s_D > 0 and d has full column rank (smallest singular value
// above 1e-10 times the largest).
bool distortion_full_rank(const DistortionMatrix& d, double s_D);

// Least-squares fit of log(err) against the iteration index over the trailing
// half of the trace; returns (slope, r_squared). Requires >= 10 entries and
// no negative entries. A zero entry inside the fit window means the trace hit
// exact floating-point convergence; the sentinel (-inf, 0) is returned.
std::pair<double, double> fit_convergence_rate(
    const std::vector<double>& error_trace);

struct SpectralReport {
  double theta_max = 0.0;             // spectral radius of the scheme Jacobian
  std::vector<double> eigs;           // eigenvalue real parts, |.| descending
  bool full_rank_distortion = false;
  bool predicted_exponential = false;  // theta_max < 1 - 1e-9
  std::optional<double> empirical_rate;  // slope from fit_convergence_rate
  std::optional<double> fit_r2;
};

// Assembles the report for one scheme at a solved point. When an error trace
// with >= 10 positive entries is supplied, the empirical fields are filled.
SpectralReport spectral_report(Scheme scheme, const Distribution& p,
                               const Distribution& q_star,
                               const LagrangePair& s,
                               const DistortionMatrix& d,
                               const FDivergenceSpec& spec,
                               const std::vector<double>& error_trace = {});

}  // namespace rdpf
