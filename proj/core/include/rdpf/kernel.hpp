#pragma once

// The exponential-tilt kernel shared by both alternating-minimization schemes,
// together with the coefficient map, the parametric channel it induces, and
// the two potentials (descent objective and dual value) evaluated on iterates.
//
// For multipliers s = (s_D, s_P) and a reference marginal u the kernel is
//   A[u](x, y) = exp( -s_D d(x,y) - s_P g(p(y), u(y)) ),
// stored row-shifted: entries exp(logA - max_y logA) in (0, 1] plus the shift,
// so large multipliers cannot overflow.

#include <Eigen/Dense>

#include "rdpf/divergence.hpp"
#include "rdpf/prob.hpp"

namespace rdpf {

// Row-shifted kernel: true log-kernel is log(a(x,y)) + row_shift(x).
struct KernelMatrix {
  Eigen::MatrixXd a;          // entries in (0, 1], each row has max 1
  Eigen::VectorXd row_shift;  // per-row max of the log-kernel
};

// Builds A[u]. Requires u strictly positive and, when s_P > 0, finite
// g(p(y), u(y)) for every y (otherwise the domain of the divergence is
// violated and std::invalid_argument is thrown).
KernelMatrix kernel(const Distribution& p, const Distribution& u,
                    const LagrangePair& s, const DistortionMatrix& d,
                    const FDivergenceSpec& spec);

// c[w, r](y) = sum_x p(x) A[r](x,y) / (sum_i w(i) A[r](x,i)).
// Satisfies sum_y w(y) c(y) = sum_x p(x) for any positive weight vector w.
Eigen::VectorXd c_coeff(const Distribution& p, const Distribution& w,
                        const Distribution& r, const LagrangePair& s,
                        const DistortionMatrix& d, const FDivergenceSpec& spec);

// Same with a prebuilt kernel (the kernel argument r is baked into k).
Eigen::VectorXd c_coeff(const Distribution& p, const Distribution& w,
                        const KernelMatrix& k);

// Q(y|x) = u(y) A[r](x,y) / sum_i u(i) A[r](x,i); rows are exactly stochastic.
// Its output marginal under p equals u .* c[u, r] elementwise.
TransitionMatrix parametric_Q(const Distribution& p, const Distribution& u,
                              const Distribution& r, const LagrangePair& s,
                              const DistortionMatrix& d,
                              const FDivergenceSpec& spec);
TransitionMatrix parametric_Q(const Distribution& p, const Distribution& u,
                              const KernelMatrix& k);

// The objective both schemes descend:
//   V = sum_{x,y} p(x) Q(y|x) log( Q(y|x) / u_prev(y) )
//     + s_D E[d; p, Q] + s_P D_f(p || u_next).
// Non-increasing along exact alternating-minimization steps.
double descent_V(const Distribution& p, const Distribution& u_prev,
                 const TransitionMatrix& q_next, const Distribution& u_next,
                 const LagrangePair& s, const DistortionMatrix& d,
                 const FDivergenceSpec& spec);

// Dual potential entering the certified bounds:
//   w_hat = - sum_x p(x) log( sum_y u(y) A[v](x,y) )
//         + s_P sum_y u_next(y) r_y f'(r_y)                  with r_y = p(y)/v(y)
//         + s_P sum_y u_next(y) [ f(p(y)/u_next(y)) - f(r_y) ].
// With u_next = the marginal of parametric_Q(p, u, v) this makes the upper
// bound in bounds() equal to I(p, Q) exactly; the third sum vanishes when
// v = u_next.
double w_hat(const Distribution& p, const Distribution& u,
             const Distribution& v, const Distribution& u_next,
             const LagrangePair& s, const DistortionMatrix& d,
             const FDivergenceSpec& spec);
double w_hat(const Distribution& p, const Distribution& u,
             const Distribution& v, const Distribution& u_next,
             const KernelMatrix& k_of_v, const LagrangePair& s,
             const FDivergenceSpec& spec);

namespace detail {
// Kernel for a strictly positive reference vector that need not be
// normalized; the Newton inner iterates live slightly off the simplex.
KernelMatrix kernel_raw(const Distribution& p, const Eigen::VectorXd& u_pos,
                        const LagrangePair& s, const DistortionMatrix& d,
                        const FDivergenceSpec& spec);
}  // namespace detail

}  // namespace rdpf
