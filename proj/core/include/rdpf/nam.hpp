#pragma once

// Newton-accelerated alternating minimization. The outer loop alternates the
// channel and marginal minimizations; the marginal step solves the nonlinear
// root equation T[q_n, u] = 0 with a damped-free Newton iteration whose
// Jacobian is an identity-plus-correction that stays well conditioned for
// multipliers below the spectral threshold.
//
// Requires a smooth divergence generator; non-smooth generators (tv) must use
// solve_ram instead.

#include <Eigen/Dense>

#include <optional>

#include "rdpf/bounds.hpp"
#include "rdpf/divergence.hpp"
#include "rdpf/kernel.hpp"
#include "rdpf/prob.hpp"
#include "rdpf/solve_report.hpp"

namespace rdpf {

// Thrown when an inner Newton solve or a linear solve fails to meet its
// tolerance within its iteration budget.
class solver_error : public std::runtime_error {
 public:
  explicit solver_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NewtonConfig {
  double delta = 1e-12;                // inner stop: ||u_{k+1} - u_k||_inf
  int max_inner_iters = 100;
  double jacobian_regularization = 0.0;  // ridge added on near-singularity
};

// Root function of the marginal subproblem: T[q_n, u](i) = u(i) - q_n(i) c(i)
// with c = c_coeff(p, q_n, A[u]). Zero exactly at the subproblem optimum.
// u is any strictly positive vector; inner iterates drift slightly off the
// simplex, and the components of T then sum to sum(u) - 1.
Eigen::VectorXd t_func(const Distribution& p, const Distribution& q_n,
                       const Eigen::VectorXd& u, const LagrangePair& s,
                       const DistortionMatrix& d, const FDivergenceSpec& spec);

// M[w, u](i, j) = w(i) sum_x p(x) A[u](x,i) A[u](x,j) / den(x)^2 where
// den(x) = sum_k w(k) A[u](x,k). Columns sum to c[w, u](j). Shared by the
// Newton Jacobian and the fixed-point Jacobians in the diagnostics module.
Eigen::MatrixXd newton_m(const Distribution& p, const Distribution& w,
                         const Eigen::VectorXd& u, const LagrangePair& s,
                         const DistortionMatrix& d,
                         const FDivergenceSpec& spec);

// Diagonal of Gamma[w, u] = s_P * diag( w(i) * p(i)^2/u(i)^3 f''(p(i)/u(i)) ).
Eigen::VectorXd newton_gamma_diag(const Distribution& p,
                                  const Distribution& w,
                                  const Eigen::VectorXd& u,
                                  const LagrangePair& s,
                                  const FDivergenceSpec& spec);

// Jacobian of u -> T[q_n, u]:  I + (diag(c) - M) * Gamma.  Equals I when
// s_P = 0, so the inner solve then converges in one step.
Eigen::MatrixXd newton_jacobian(const Distribution& p, const Distribution& q_n,
                                const Eigen::VectorXd& u, const LagrangePair& s,
                                const DistortionMatrix& d,
                                const FDivergenceSpec& spec);

// Solves T[q_n, u] = 0 starting from u = q_n. Iterates are clamped to the
// probability floor; the returned root is renormalized to unit mass. Throws
// solver_error if max_inner_iters is exhausted. Optional outputs report the
// final residual ||T||_inf and the iteration count.
Distribution newton_inner(const Distribution& p, const Distribution& q_n,
                          const LagrangePair& s, const DistortionMatrix& d,
                          const FDivergenceSpec& spec, const NewtonConfig& cfg,
                          double* residual_out = nullptr,
                          long* inner_iters_out = nullptr);

// Full solve. Stops when the duality gap drops below eps and the coefficient
// vector certifies stationarity to the same resolution (max c within 10 eps
// of 1 from above, min over support within 10 eps from below); converged =
// true. Exhausting max_outer_iters throws solver_error, as does a failed
// inner solve. q0 defaults to the uniform distribution; it is clamped and
// renormalized to the open simplex. Throws std::invalid_argument for a
// non-smooth spec with s_P > 0.
SolveReport solve_nam(const Distribution& p, const LagrangePair& s,
                      const DistortionMatrix& d, const FDivergenceSpec& spec,
                      double eps, const NewtonConfig& cfg = {},
                      std::optional<Distribution> q0 = std::nullopt,
                      long max_outer_iters = 100000);

}  // namespace rdpf
