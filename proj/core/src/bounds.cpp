#include "rdpf/bounds.hpp"

#include <cmath>

namespace rdpf {

using detail::require;

double gap_omega(const Distribution& u, const Eigen::VectorXd& c) {
  require(u.size() == c.size(), "gap_omega: size mismatch");
  require((c.array() >= 0.0).all() && c.allFinite(),
          "gap_omega: c must be nonnegative and finite");
  const double c_max = c.maxCoeff();
  require(c_max > 0.0, "gap_omega: c has no positive entry");
  double avg = 0.0;
  for (Eigen::Index y = 0; y < c.size(); ++y) {
    const double w = u[y] * c(y);
    if (w == 0.0) continue;  // 0 log 0 = 0
    avg += w * std::log(c(y));
  }
  return std::log(c_max) - avg;
}

BoundsPair bounds(const Distribution& p, const Distribution& u,
                  const Distribution& v, const Distribution& u_next,
                  const Eigen::VectorXd& c, const LagrangePair& s,
                  const DistortionMatrix& d, const FDivergenceSpec& spec) {
  const KernelMatrix k = kernel(p, v, s, d, spec);
  const TransitionMatrix q = parametric_Q(p, u, k);
  const double at_D = expected_distortion(p, q, d);
  const double at_P = eval_divergence(spec, p, u_next);
  const double wh = w_hat(p, u, v, u_next, k, s, spec);

  require(c.size() == u.size(), "bounds: coefficient vector size mismatch");
  const double c_max = c.maxCoeff();
  require(c_max > 0.0 && std::isfinite(c_max),
          "bounds: c has no positive finite maximum");
  double avg = 0.0;
  for (Eigen::Index y = 0; y < c.size(); ++y) {
    const double w = u[y] * c(y);
    if (w == 0.0) continue;
    avg += w * std::log(c(y));
  }

  BoundsPair b;
  b.c_max = c_max;
  b.at_D = at_D;
  b.at_P = at_P;
  const double base = -s.s_D * at_D - s.s_P * at_P + wh;
  b.lower = base - std::log(c_max);
  b.upper = base - avg;
  b.gap = b.upper - b.lower;  // = log(c_max) - avg exactly
  return b;
}

}  // namespace rdpf
