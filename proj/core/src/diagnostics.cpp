#include "rdpf/diagnostics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

#include "rdpf/nam.hpp"

namespace rdpf {

using detail::require;

namespace {

// M* and Gamma* evaluated at the fixed point (weights = kernel anchor = q*).
void star_matrices(const Distribution& p, const Distribution& q_star,
                   const LagrangePair& s, const DistortionMatrix& d,
                   const FDivergenceSpec& spec, Eigen::MatrixXd& m_star,
                   Eigen::VectorXd& gamma_star) {
  require(q_star.is_strictly_positive(0.0),
          "diagnostics: q_star must be strictly positive");
  m_star = newton_m(p, q_star, q_star.vec(), s, d, spec);
  gamma_star = newton_gamma_diag(p, q_star, q_star.vec(), s, spec);
}

}  // namespace

Eigen::MatrixXd fixed_point_jacobian_oam(const Distribution& p,
                                         const Distribution& q_star,
                                         const LagrangePair& s,
                                         const DistortionMatrix& d,
                                         const FDivergenceSpec& spec) {
  Eigen::MatrixXd m;
  Eigen::VectorXd gam;
  star_matrices(p, q_star, s, d, spec, m, gam);
  const Eigen::Index n = q_star.size();
  const Eigen::MatrixXd i_m = Eigen::MatrixXd::Identity(n, n) - m;
  const Eigen::MatrixXd lhs =
      Eigen::MatrixXd::Identity(n, n) + i_m * gam.asDiagonal();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
  if (!lu.isInvertible()) {
    throw solver_error("fixed_point_jacobian_oam: singular system");
  }
  return lu.solve(i_m);
}

Eigen::MatrixXd fixed_point_jacobian_ram(const Distribution& p,
                                         const Distribution& q_star,
                                         const LagrangePair& s,
                                         const DistortionMatrix& d,
                                         const FDivergenceSpec& spec) {
  Eigen::MatrixXd m;
  Eigen::VectorXd gam;
  star_matrices(p, q_star, s, d, spec, m, gam);
  const Eigen::Index n = q_star.size();
  const Eigen::MatrixXd i_m = Eigen::MatrixXd::Identity(n, n) - m;
  Eigen::MatrixXd i_g = Eigen::MatrixXd::Identity(n, n);
  i_g.diagonal() -= gam;
  return i_m * i_g;
}

bool distortion_full_rank(const DistortionMatrix& d, double s_D) {
  if (!(s_D > 0.0)) return false;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d.mat());
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return false;
  const double smax = sv(0);
  if (smax <= 0.0) return false;
  // Full column rank: every singular value above the relative cutoff.
  if (d.mat().cols() > d.mat().rows()) return false;
  return sv(sv.size() - 1) > 1e-10 * smax;
}

std::pair<double, double> fit_convergence_rate(
    const std::vector<double>& error_trace) {
  require(error_trace.size() >= 10,
          "fit_convergence_rate: need at least 10 entries");
  for (double e : error_trace) {
    require(std::isfinite(e) && e >= 0.0,
            "fit_convergence_rate: entries must be finite and nonnegative");
  }
  const std::size_t n = error_trace.size();
  const std::size_t start = n / 2;  // trailing half
  for (std::size_t i = start; i < n; ++i) {
    if (error_trace[i] == 0.0) {
      // Exact floating-point convergence inside the fit window.
      return {-std::numeric_limits<double>::infinity(), 0.0};
    }
  }

  const std::size_t m = n - start;
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = start; i < n; ++i) {
    sx += double(i);
    sy += std::log(error_trace[i]);
  }
  const double mx = sx / double(m), my = sy / double(m);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = start; i < n; ++i) {
    const double dx = double(i) - mx;
    const double dy = std::log(error_trace[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double slope = sxy / sxx;
  double r2 = 1.0;
  if (syy > 0.0) {
    const double ss_res = syy - sxy * sxy / sxx;
    r2 = 1.0 - ss_res / syy;
  }
  return {slope, r2};
}

SpectralReport spectral_report(Scheme scheme, const Distribution& p,
                               const Distribution& q_star,
                               const LagrangePair& s,
                               const DistortionMatrix& d,
                               const FDivergenceSpec& spec,
                               const std::vector<double>& error_trace) {
  const Eigen::MatrixXd j =
      scheme == Scheme::nam ? fixed_point_jacobian_oam(p, q_star, s, d, spec)
                            : fixed_point_jacobian_ram(p, q_star, s, d, spec);

  Eigen::EigenSolver<Eigen::MatrixXd> es(j, /*computeEigenvectors=*/false);
  const auto& vals = es.eigenvalues();

  SpectralReport rep;
  std::vector<std::pair<double, double>> by_mod;  // (modulus, real part)
  by_mod.reserve(std::size_t(vals.size()));
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    by_mod.emplace_back(std::abs(vals(i)), vals(i).real());
  }
  std::sort(by_mod.begin(), by_mod.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  rep.theta_max = by_mod.empty() ? 0.0 : by_mod.front().first;
  for (const auto& [mod, re] : by_mod) rep.eigs.push_back(re);

  rep.full_rank_distortion = distortion_full_rank(d, s.s_D);
  rep.predicted_exponential = rep.theta_max < 1.0 - 1e-9;

  if (error_trace.size() >= 10) {
    bool ok = true;
    for (double e : error_trace) {
      if (!(std::isfinite(e) && e >= 0.0)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      const auto [slope, r2] = fit_convergence_rate(error_trace);
      rep.empirical_rate = slope;
      rep.fit_r2 = r2;
    }
  }
  return rep;
}

}  // namespace rdpf
