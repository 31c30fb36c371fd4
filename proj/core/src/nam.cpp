#include "rdpf/nam.hpp"

#include <Eigen/LU>

#include <cmath>

#include "solver_common.hpp"

namespace rdpf {

using detail::require;

namespace {

// den(x) = sum_k w(k) a(x,k) for a prebuilt kernel.
Eigen::VectorXd denominators(const Eigen::MatrixXd& a,
                             const Eigen::VectorXd& w) {
  Eigen::VectorXd den = a * w;
  require((den.array() > 0.0).all(), "newton: kernel row collapsed to zero");
  return den;
}

Eigen::VectorXd c_from(const Eigen::MatrixXd& a, const Eigen::VectorXd& den,
                       const Eigen::VectorXd& p) {
  return a.transpose() * (p.array() / den.array()).matrix();
}

Eigen::MatrixXd m_from(const Eigen::MatrixXd& a, const Eigen::VectorXd& den,
                       const Eigen::VectorXd& p, const Eigen::VectorXd& w) {
  // B(x, i) = a(x, i) / den(x);  M = diag(w) * (B^T diag(p) B).
  Eigen::MatrixXd b = a.array().colwise() / den.array();
  Eigen::MatrixXd m = b.transpose() * p.asDiagonal() * b;
  return w.asDiagonal() * m;
}

Eigen::VectorXd gamma_from(const Distribution& p, const Eigen::VectorXd& w,
                           const Eigen::VectorXd& u, const LagrangePair& s,
                           const FDivergenceSpec& spec) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(u.size());
  if (s.s_P == 0.0) return g;
  require(spec.smooth && bool(spec.d2f),
          "newton: divergence curvature requires a smooth generator");
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double pi = p[i];
    if (pi == 0.0) continue;
    const double ui = u(i);
    g(i) = s.s_P * w(i) * pi * pi / (ui * ui * ui) * spec.d2f(pi / ui);
  }
  return g;
}

void check_positive_vector(const Eigen::VectorXd& u, const char* who) {
  require(u.size() > 0 && u.allFinite() && (u.array() > 0.0).all(),
          std::string(who) + ": u must be strictly positive and finite");
}

}  // namespace

Eigen::VectorXd t_func(const Distribution& p, const Distribution& q_n,
                       const Eigen::VectorXd& u, const LagrangePair& s,
                       const DistortionMatrix& d, const FDivergenceSpec& spec) {
  check_positive_vector(u, "t_func");
  require(q_n.size() == u.size(), "t_func: size mismatch");
  const KernelMatrix k = detail::kernel_raw(p, u, s, d, spec);
  const Eigen::VectorXd den = denominators(k.a, q_n.vec());
  const Eigen::VectorXd c = c_from(k.a, den, p.vec());
  return u - q_n.vec().cwiseProduct(c);
}

Eigen::MatrixXd newton_m(const Distribution& p, const Distribution& w,
                         const Eigen::VectorXd& u, const LagrangePair& s,
                         const DistortionMatrix& d,
                         const FDivergenceSpec& spec) {
  check_positive_vector(u, "newton_m");
  require(w.size() == u.size(), "newton_m: size mismatch");
  const KernelMatrix k = detail::kernel_raw(p, u, s, d, spec);
  const Eigen::VectorXd den = denominators(k.a, w.vec());
  return m_from(k.a, den, p.vec(), w.vec());
}

Eigen::VectorXd newton_gamma_diag(const Distribution& p,
                                  const Distribution& w,
                                  const Eigen::VectorXd& u,
                                  const LagrangePair& s,
                                  const FDivergenceSpec& spec) {
  check_positive_vector(u, "newton_gamma_diag");
  require(w.size() == u.size() && p.size() == u.size(),
          "newton_gamma_diag: size mismatch");
  detail::check_multipliers(s);
  return gamma_from(p, w.vec(), u, s, spec);
}

Eigen::MatrixXd newton_jacobian(const Distribution& p, const Distribution& q_n,
                                const Eigen::VectorXd& u, const LagrangePair& s,
                                const DistortionMatrix& d,
                                const FDivergenceSpec& spec) {
  check_positive_vector(u, "newton_jacobian");
  require(q_n.size() == u.size(), "newton_jacobian: size mismatch");
  const Eigen::Index n = u.size();
  const KernelMatrix k = detail::kernel_raw(p, u, s, d, spec);
  const Eigen::VectorXd den = denominators(k.a, q_n.vec());
  const Eigen::VectorXd c = c_from(k.a, den, p.vec());
  const Eigen::MatrixXd m = m_from(k.a, den, p.vec(), q_n.vec());
  const Eigen::VectorXd gam = gamma_from(p, q_n.vec(), u, s, spec);

  Eigen::MatrixXd j = Eigen::MatrixXd::Identity(n, n);
  if (s.s_P > 0.0) {
    Eigen::MatrixXd cm = -m;
    cm.diagonal() += c;
    j += cm * gam.asDiagonal();
  }
  return j;
}

Distribution newton_inner(const Distribution& p, const Distribution& q_n,
                          const LagrangePair& s, const DistortionMatrix& d,
                          const FDivergenceSpec& spec, const NewtonConfig& cfg,
                          double* residual_out, long* inner_iters_out) {
  detail::check_multipliers(s);
  require(cfg.delta > 0.0, "newton_inner: delta must be positive");
  require(cfg.max_inner_iters > 0,
          "newton_inner: max_inner_iters must be positive");

  const Eigen::Index n = q_n.size();
  Eigen::VectorXd u = q_n.vec();
  long iters = 0;
  bool done = false;

  for (int k = 0; k < cfg.max_inner_iters; ++k) {
    ++iters;
    const KernelMatrix km = detail::kernel_raw(p, u, s, d, spec);
    const Eigen::VectorXd den = denominators(km.a, q_n.vec());
    const Eigen::VectorXd c = c_from(km.a, den, p.vec());
    const Eigen::VectorXd t = u - q_n.vec().cwiseProduct(c);

    Eigen::VectorXd delta_u;
    if (s.s_P == 0.0) {
      delta_u = t;  // Jacobian is the identity
    } else {
      const Eigen::MatrixXd m = m_from(km.a, den, p.vec(), q_n.vec());
      const Eigen::VectorXd gam = gamma_from(p, q_n.vec(), u, s, spec);
      Eigen::MatrixXd cm = -m;
      cm.diagonal() += c;
      Eigen::MatrixXd j = Eigen::MatrixXd::Identity(n, n);
      j += cm * gam.asDiagonal();

      Eigen::FullPivLU<Eigen::MatrixXd> lu(j);
      if (!lu.isInvertible()) {
        if (cfg.jacobian_regularization > 0.0) {
          j.diagonal().array() += cfg.jacobian_regularization;
          lu.compute(j);
        }
        if (!lu.isInvertible()) {
          throw solver_error("newton_inner: singular Jacobian");
        }
      }
      delta_u = lu.solve(t);
    }

    const Eigen::VectorXd u_new = (u - delta_u).cwiseMax(kProbFloor);
    const double step = (u_new - u).lpNorm<Eigen::Infinity>();
    u = u_new;
    if (step < cfg.delta) {
      done = true;
      break;
    }
  }
  if (!done) {
    throw solver_error("newton_inner: no convergence within " +
                       std::to_string(cfg.max_inner_iters) + " iterations");
  }

  const Distribution root(u / u.sum());
  if (residual_out != nullptr) {
    *residual_out =
        t_func(p, q_n, root.vec(), s, d, spec).lpNorm<Eigen::Infinity>();
  }
  if (inner_iters_out != nullptr) *inner_iters_out = iters;
  return root;
}

SolveReport solve_nam(const Distribution& p, const LagrangePair& s,
                      const DistortionMatrix& d, const FDivergenceSpec& spec,
                      double eps, const NewtonConfig& cfg,
                      std::optional<Distribution> q0, long max_outer_iters) {
  detail::check_multipliers(s);
  require(eps > 0.0, "solve_nam: eps must be positive");
  require(max_outer_iters > 0, "solve_nam: iteration cap must be positive");
  require(p.size() == d.input_size(), "solve_nam: source/distortion mismatch");
  if (s.s_P > 0.0) {
    require(spec.smooth && bool(spec.d2f),
            "solve_nam: the Newton scheme needs a smooth divergence "
            "generator; use solve_ram for non-smooth generators");
  }

  const Eigen::Index ny = d.output_size();
  Distribution q = q0.has_value()
                       ? Distribution::strictly_positive(q0->vec())
                       : Distribution::uniform(ny);
  require(q.size() == ny, "solve_nam: q0/distortion size mismatch");

  SolveReport rep;
  internal::ZeroSupportTracker zs(ny);

  for (long n = 0; n < max_outer_iters; ++n) {
    double resid = 0.0;
    long inner = 0;
    const Distribution root =
        newton_inner(p, q, s, d, spec, cfg, &resid, &inner);
    rep.total_inner_iters += inner;
    rep.diag.newton_residual_inf = resid;

    const KernelMatrix k = kernel(p, root, s, d, spec);
    const internal::StepEval ev =
        internal::evaluate_step(p, q, root, k, s, d, spec);

    rep.trace.push_back(internal::make_record(n + 1, ev));
    rep.diag.v_gap_trace.push_back(
        (ev.m - q.vec()).lpNorm<Eigen::Infinity>());
    zs.update(ev.m, rep.diag.zero_support);
    rep.outer_iters = n + 1;

    if (ev.omega < eps && internal::certificate_ok(ev, eps)) {
      rep.converged = true;
      rep.D_s = ev.at_D;
      rep.P_s = ev.at_P;
      rep.rate = ev.upper;
      rep.lower_bound = ev.lower;
      rep.upper_bound = ev.upper;
      rep.final_marginal = ev.m_dist;
      rep.final_Q = ev.Q;
      return rep;
    }
    q = Distribution::strictly_positive(ev.m);
  }
  throw solver_error("solve_nam: outer iteration cap (" +
                     std::to_string(max_outer_iters) + ") exceeded");
}

}  // namespace rdpf
