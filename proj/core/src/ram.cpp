#include "rdpf/ram.hpp"

#include <cmath>
#include <limits>

#include "solver_common.hpp"

namespace rdpf {

using detail::require;

std::pair<Distribution, Eigen::VectorXd> ram_step(const Distribution& p,
                                                  const Distribution& q_n,
                                                  const LagrangePair& s,
                                                  const DistortionMatrix& d,
                                                  const FDivergenceSpec& spec) {
  require(q_n.is_strictly_positive(0.0),
          "ram_step: q_n must be strictly positive");
  const KernelMatrix k = kernel(p, q_n, s, d, spec);
  const Eigen::VectorXd c = c_coeff(p, q_n, k);
  return {Distribution(q_n.vec().cwiseProduct(c)), c};
}

SpMaxEstimate sp_max_estimate(const Distribution& p, double s_D,
                              const DistortionMatrix& d,
                              const FDivergenceSpec& spec,
                              std::optional<double> theta_max) {
  require(std::isfinite(s_D) && s_D >= 0.0,
          "sp_max_estimate: s_D must be finite and >= 0");
  require(p.size() == d.input_size(),
          "sp_max_estimate: source/distortion mismatch");
  SpMaxEstimate e;
  if (!spec.smooth || !spec.d2f) {
    e.threshold = std::numeric_limits<double>::infinity();
    e.guard_available = false;
    return e;
  }
  const double kappa = spec.d2f(1.0);
  e.curvature_at_one = kappa;
  if (!(std::isfinite(kappa) && kappa > 0.0)) {
    e.threshold = std::numeric_limits<double>::infinity();
    e.guard_available = false;
    return e;
  }
  e.guard_available = true;
  if (theta_max.has_value()) {
    const double th = *theta_max;
    require(th > 0.0 && th < 1.0,
            "sp_max_estimate: theta_max must lie in (0, 1)");
    e.raw = 1.0 / (th * kappa);
    e.eps_prime = std::min(e.raw, (1.0 / kappa) * (1.0 / th - 1.0));
    e.threshold = e.raw - e.eps_prime;  // collapses to 1/kappa
  } else {
    e.raw = 1.0 / kappa;
    e.eps_prime = 0.0;
    e.threshold = e.raw;
  }
  return e;
}

SolveReport solve_ram(const Distribution& p, const LagrangePair& s,
                      const DistortionMatrix& d, const FDivergenceSpec& spec,
                      const RamConfig& cfg, std::optional<Distribution> q0) {
  detail::check_multipliers(s);
  require(cfg.eps > 0.0, "solve_ram: eps must be positive");
  require(cfg.max_iters > 0, "solve_ram: iteration cap must be positive");
  require(p.size() == d.input_size(), "solve_ram: source/distortion mismatch");

  SolveReport rep;
  if (s.s_P > 0.0 && cfg.sp_guard != SpGuard::off) {
    const SpMaxEstimate est = sp_max_estimate(p, s.s_D, d, spec);
    if (est.guard_available) {
      rep.diag.sp_threshold = est.threshold;
      if (s.s_P > est.threshold) {
        if (cfg.sp_guard == SpGuard::reject) {
          throw std::invalid_argument(
              "solve_ram: s_P exceeds the estimated convergence threshold " +
              std::to_string(est.threshold) +
              " (sp_guard = reject); no linear-rate guarantee");
        }
        rep.diag.sp_above_guard = true;
      }
    }
  }

  const Eigen::Index ny = d.output_size();
  Distribution q = q0.has_value()
                       ? Distribution::strictly_positive(q0->vec())
                       : Distribution::uniform(ny);
  require(q.size() == ny, "solve_ram: q0/distortion size mismatch");

  internal::ZeroSupportTracker zs(ny);

  for (long n = 0; n < cfg.max_iters; ++n) {
    const KernelMatrix k = kernel(p, q, s, d, spec);
    const internal::StepEval ev =
        internal::evaluate_step(p, q, q, k, s, d, spec);

    rep.trace.push_back(internal::make_record(n + 1, ev));
    rep.diag.v_gap_trace.push_back(
        (ev.m - q.vec()).lpNorm<Eigen::Infinity>());
    zs.update(ev.m, rep.diag.zero_support);
    rep.outer_iters = n + 1;

    // Final assembly mirrors the step just taken whether or not we stop;
    // non-convergence is an outcome, not an error.
    rep.D_s = ev.at_D;
    rep.P_s = ev.at_P;
    rep.rate = ev.upper;
    rep.lower_bound = ev.lower;
    rep.upper_bound = ev.upper;
    rep.final_marginal = ev.m_dist;
    rep.final_Q = ev.Q;

    if (ev.omega < cfg.eps && internal::certificate_ok(ev, cfg.eps)) {
      rep.converged = true;
      return rep;
    }
    q = Distribution::strictly_positive(ev.m);
  }
  rep.converged = false;
  return rep;
}

}  // namespace rdpf
