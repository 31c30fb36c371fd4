#pragma once

// Certified sandwich bounds on the rate functional at the (D, P) point an
// iterate certifies, and the duality-gap functional that drives stopping.

#include <Eigen/Dense>

#include "rdpf/divergence.hpp"
#include "rdpf/kernel.hpp"
#include "rdpf/prob.hpp"

namespace rdpf {

struct BoundsPair {
  double lower = 0.0;  // certified lower bound on R(at_D, at_P)
  double upper = 0.0;  // value of the iterate: I(p, Q) at the same point
  double gap = 0.0;    // upper - lower = log(c_max) - sum_y u(y) c(y) log c(y)
  double c_max = 0.0;
  double at_D = 0.0;   // distortion the bounds certify
  double at_P = 0.0;   // divergence the bounds certify
};

// Bounds for the channel parametric_Q(p, u, v) with successor marginal u_next
// and coefficient vector c = c_coeff(p, u, A[v]):
//   upper = -s_D at_D - s_P at_P + w_hat - sum_y u(y) c(y) log c(y)
//   lower = -s_D at_D - s_P at_P + w_hat - log(max_y c(y)).
// upper equals I(p, Q) to machine precision when u_next = u .* c.
BoundsPair bounds(const Distribution& p, const Distribution& u,
                  const Distribution& v, const Distribution& u_next,
                  const Eigen::VectorXd& c, const LagrangePair& s,
                  const DistortionMatrix& d, const FDivergenceSpec& spec);

// log(max_y c(y)) - sum_y u(y) c(y) log c(y). Nonnegative whenever u is a
// distribution and c = c_coeff(p, u, .), since u .* c is then a distribution.
// Cells with u(y) c(y) = 0 contribute zero.
double gap_omega(const Distribution& u, const Eigen::VectorXd& c);

}  // namespace rdpf
