#include "rdpf/kernel.hpp"

#include <cmath>

namespace rdpf {

using detail::require;

namespace detail {

void check_multipliers(const LagrangePair& s) {
  require(std::isfinite(s.s_D) && s.s_D >= 0.0,
          "multipliers: s_D must be finite and >= 0");
  require(std::isfinite(s.s_P) && s.s_P >= 0.0,
          "multipliers: s_P must be finite and >= 0");
}

}  // namespace detail

KernelMatrix detail::kernel_raw(const Distribution& p,
                                const Eigen::VectorXd& u_pos,
                                const LagrangePair& s,
                                const DistortionMatrix& d,
                                const FDivergenceSpec& spec) {
  detail::check_multipliers(s);
  require(p.size() == d.input_size(), "kernel: source/distortion mismatch");
  require(u_pos.size() == d.output_size(),
          "kernel: marginal/distortion mismatch");
  require(u_pos.allFinite() && (u_pos.array() > 0.0).all(),
          "kernel: u must be strictly positive");

  const Eigen::Index ny = d.output_size();

  // Column exponent offset from the divergence penalty. Depends on y only.
  Eigen::VectorXd pen = Eigen::VectorXd::Zero(ny);
  if (s.s_P > 0.0) {
    for (Eigen::Index y = 0; y < ny; ++y) {
      const double g = g_func(spec, p[y], u_pos(y));
      if (!std::isfinite(g)) {
        throw std::invalid_argument(
            "kernel: non-finite divergence penalty at coordinate " +
            std::to_string(y) + " (divergence domain violated)");
      }
      pen(y) = s.s_P * g;
    }
  }

  Eigen::MatrixXd logk = (-s.s_D) * d.mat();
  logk.rowwise() -= pen.transpose();
  if (!logk.allFinite()) {
    throw std::invalid_argument("kernel: non-finite exponent");
  }

  KernelMatrix k;
  k.row_shift = logk.rowwise().maxCoeff();
  k.a = (logk.colwise() - k.row_shift).array().exp().matrix();
  // After the shift each row max is exp(0) = 1 and every entry is <= 1;
  // entries can underflow to 0 only at extreme multiplier spreads, which the
  // downstream conventions (0 log 0 = 0, floor clamping) absorb.
  return k;
}

KernelMatrix kernel(const Distribution& p, const Distribution& u,
                    const LagrangePair& s, const DistortionMatrix& d,
                    const FDivergenceSpec& spec) {
  return detail::kernel_raw(p, u.vec(), s, d, spec);
}

Eigen::VectorXd c_coeff(const Distribution& p, const Distribution& w,
                        const KernelMatrix& k) {
  require(k.a.rows() == p.size(), "c_coeff: kernel/source mismatch");
  require(k.a.cols() == w.size(), "c_coeff: kernel/weights mismatch");
  const Eigen::VectorXd den = k.a * w.vec();
  require((den.array() > 0.0).all(), "c_coeff: kernel row collapsed to zero");
  // c(y) = sum_x p(x) a(x,y) / den(x); the row shift cancels.
  return k.a.transpose() * (p.vec().array() / den.array()).matrix();
}

Eigen::VectorXd c_coeff(const Distribution& p, const Distribution& w,
                        const Distribution& r, const LagrangePair& s,
                        const DistortionMatrix& d,
                        const FDivergenceSpec& spec) {
  return c_coeff(p, w, kernel(p, r, s, d, spec));
}

TransitionMatrix parametric_Q(const Distribution& p, const Distribution& u,
                              const KernelMatrix& k) {
  require(k.a.rows() == p.size(), "parametric_Q: kernel/source mismatch");
  require(k.a.cols() == u.size(), "parametric_Q: kernel/marginal mismatch");
  const Eigen::VectorXd den = k.a * u.vec();
  require((den.array() > 0.0).all(),
          "parametric_Q: kernel row collapsed to zero");
  Eigen::MatrixXd q = k.a * u.vec().asDiagonal();
  q.array().colwise() /= den.array();
  return TransitionMatrix(std::move(q));
}

TransitionMatrix parametric_Q(const Distribution& p, const Distribution& u,
                              const Distribution& r, const LagrangePair& s,
                              const DistortionMatrix& d,
                              const FDivergenceSpec& spec) {
  return parametric_Q(p, u, kernel(p, r, s, d, spec));
}

double descent_V(const Distribution& p, const Distribution& u_prev,
                 const TransitionMatrix& q_next, const Distribution& u_next,
                 const LagrangePair& s, const DistortionMatrix& d,
                 const FDivergenceSpec& spec) {
  detail::check_multipliers(s);
  require(p.size() == q_next.input_size(), "descent_V: source/channel mismatch");
  require(u_prev.size() == q_next.output_size(),
          "descent_V: marginal/channel mismatch");
  require(u_prev.is_strictly_positive(0.0),
          "descent_V: u_prev must be strictly positive");

  double kl_term = 0.0;
  for (Eigen::Index x = 0; x < q_next.input_size(); ++x) {
    const double px = p[x];
    if (px == 0.0) continue;
    for (Eigen::Index y = 0; y < q_next.output_size(); ++y) {
      const double qxy = q_next(x, y);
      if (qxy == 0.0) continue;
      kl_term += px * qxy * std::log(qxy / u_prev[y]);
    }
  }
  double v = kl_term + s.s_D * expected_distortion(p, q_next, d);
  if (s.s_P > 0.0) v += s.s_P * eval_divergence(spec, p, u_next);
  return v;
}

double w_hat(const Distribution& p, const Distribution& u,
             const Distribution& v, const Distribution& u_next,
             const KernelMatrix& k_of_v, const LagrangePair& s,
             const FDivergenceSpec& spec) {
  require(k_of_v.a.rows() == p.size(), "w_hat: kernel/source mismatch");
  require(k_of_v.a.cols() == u.size(), "w_hat: kernel/marginal mismatch");
  require(u_next.size() == u.size() && v.size() == u.size(),
          "w_hat: size mismatch");

  const Eigen::VectorXd den = k_of_v.a * u.vec();
  require((den.array() > 0.0).all(), "w_hat: kernel row collapsed to zero");
  double term1 = 0.0;
  for (Eigen::Index x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    term1 -= p[x] * (std::log(den(x)) + k_of_v.row_shift(x));
  }

  double term23 = 0.0;
  if (s.s_P > 0.0) {
    for (Eigen::Index y = 0; y < u.size(); ++y) {
      const double un = u_next[y];
      if (un == 0.0) continue;
      const double py = p[y];
      if (py == 0.0) continue;  // r = 0: r f'(r) -> 0 and f(0) - f(0) = 0
      const double r = py / v[y];
      term23 += un * (r * spec.df(r) + spec.f(py / un) - spec.f(r));
    }
    term23 *= s.s_P;
  }
  return term1 + term23;
}

double w_hat(const Distribution& p, const Distribution& u,
             const Distribution& v, const Distribution& u_next,
             const LagrangePair& s, const DistortionMatrix& d,
             const FDivergenceSpec& spec) {
  return w_hat(p, u, v, u_next, kernel(p, v, s, d, spec), s, spec);
}

}  // namespace rdpf
