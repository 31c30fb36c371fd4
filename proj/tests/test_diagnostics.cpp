#include <doctest.h>

#include <cmath>
#include <vector>

#include "rdpf/diagnostics.hpp"
#include "rdpf/nam.hpp"
#include "rdpf/ram.hpp"
#include "test_util.hpp"

using namespace rdpf;
using testutil::dist;

namespace {

// Error trace ||m_k - m*||_inf from a converged solve, with the final
// (identically zero) entry dropped.
std::vector<double> error_trace_of(const SolveReport& rep) {
  std::vector<double> errs;
  const Eigen::VectorXd& star = rep.final_marginal.vec();
  for (const IterationRecord& rec : rep.trace) {
    errs.push_back((rec.marginal - star).lpNorm<Eigen::Infinity>());
  }
  if (!errs.empty()) errs.pop_back();
  return errs;
}

}  // namespace

TEST_CASE("both fixed-point jacobians reduce to I - M* when s_P = 0") {
  const Distribution p = dist({0.15, 0.85});
  const DistortionMatrix d = DistortionMatrix::hamming(2);
  const FDivergenceSpec kl = make_builtin("kl");
  const LagrangePair s{2.0, 0.0};
  const SolveReport rep = solve_nam(p, s, d, kl, 1e-12);
  REQUIRE(rep.converged);
  const Distribution q_star =
      Distribution::strictly_positive(rep.final_marginal.vec());

  const Eigen::MatrixXd m = newton_m(p, q_star, q_star.vec(), s, d, kl);
  const Eigen::MatrixXd want = Eigen::MatrixXd::Identity(2, 2) - m;
  CHECK(fixed_point_jacobian_oam(p, q_star, s, d, kl).isApprox(want, 1e-12));
  CHECK(fixed_point_jacobian_ram(p, q_star, s, d, kl).isApprox(want, 1e-12));
}

TEST_CASE("exact-scheme jacobian matches finite differences of the "
          "marginal map") {
  const Distribution p = dist({0.2, 0.5, 0.3});
  const DistortionMatrix d = DistortionMatrix::hamming(3);
  const FDivergenceSpec kl = make_builtin("kl");
  const LagrangePair s{1.0, 0.6};
  const SolveReport rep = solve_nam(p, s, d, kl, 1e-12);
  REQUIRE(rep.converged);
  const Distribution q_star =
      Distribution::strictly_positive(rep.final_marginal.vec());

  const Eigen::MatrixXd j = fixed_point_jacobian_oam(p, q_star, s, d, kl);
  NewtonConfig cfg;
  cfg.delta = 1e-13;
  const auto exact_map = [&](const Eigen::VectorXd& q) {
    return newton_inner(p, Distribution(q), s, d, kl, cfg, nullptr, nullptr)
        .vec();
  };

  // Probe along mass-preserving directions e_j - e_k; iterates live on the
  // simplex, so these span every direction the dynamics can move in.
  const double h = 1e-6;
  for (Eigen::Index a = 0; a < 3; ++a) {
    for (Eigen::Index b = a + 1; b < 3; ++b) {
      Eigen::VectorXd dir = Eigen::VectorXd::Zero(3);
      dir(a) = 1.0;
      dir(b) = -1.0;
      const Eigen::VectorXd fd =
          (exact_map(q_star.vec() + h * dir) -
           exact_map(q_star.vec() - h * dir)) /
          (2.0 * h);
      const Eigen::VectorXd an = j * dir;
      CHECK((fd - an).lpNorm<Eigen::Infinity>() ==
            doctest::Approx(0.0).epsilon(1e-4));
    }
  }
}

TEST_CASE("relaxed-scheme jacobian matches finite differences of the "
          "one-step map") {
  const Distribution p = dist({0.2, 0.5, 0.3});
  const DistortionMatrix d = DistortionMatrix::hamming(3);
  const FDivergenceSpec js = make_builtin("js");
  const LagrangePair s{1.2, 0.7};
  RamConfig cfg;
  cfg.eps = 1e-12;
  const SolveReport rep = solve_ram(p, s, d, js, cfg);
  REQUIRE(rep.converged);
  const Distribution q_star =
      Distribution::strictly_positive(rep.final_marginal.vec());

  const Eigen::MatrixXd j = fixed_point_jacobian_ram(p, q_star, s, d, js);
  const auto one_step = [&](const Eigen::VectorXd& q) {
    return ram_step(p, Distribution(q), s, d, js).first.vec();
  };

  const double h = 1e-6;
  for (Eigen::Index a = 0; a < 3; ++a) {
    for (Eigen::Index b = a + 1; b < 3; ++b) {
      Eigen::VectorXd dir = Eigen::VectorXd::Zero(3);
      dir(a) = 1.0;
      dir(b) = -1.0;
      const Eigen::VectorXd fd =
          (one_step(q_star.vec() + h * dir) -
           one_step(q_star.vec() - h * dir)) /
          (2.0 * h);
      const Eigen::VectorXd an = j * dir;
      CHECK((fd - an).lpNorm<Eigen::Infinity>() ==
            doctest::Approx(0.0).epsilon(1e-4));
    }
  }
}

TEST_CASE("coupling matrix at the fixed point is similar to a symmetric "
          "PSD matrix with unit column sums") {
  const Distribution p = dist({0.15, 0.85});
  const DistortionMatrix d = DistortionMatrix::hamming(2);
  const FDivergenceSpec kl = make_builtin("kl");
  const LagrangePair s{1.0, 1.0};
  const SolveReport rep = solve_nam(p, s, d, kl, 1e-12);
  REQUIRE(rep.converged);
  const Distribution q_star =
      Distribution::strictly_positive(rep.final_marginal.vec());
  const Eigen::MatrixXd m = newton_m(p, q_star, q_star.vec(), s, d, kl);

  // Column sums equal the coefficient vector, which is 1 at the fixed point.
  for (Eigen::Index jcol = 0; jcol < 2; ++jcol) {
    CHECK(m.col(jcol).sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
  // diag(q)^{-1/2} M diag(q)^{1/2} is symmetric PSD, so eigenvalues are real
  // and lie in [0, 1].
  const Eigen::VectorXd sq = q_star.vec().cwiseSqrt();
  const Eigen::MatrixXd sym = sq.cwiseInverse().asDiagonal() * m *
                              sq.asDiagonal();
  CHECK((sym - sym.transpose()).lpNorm<Eigen::Infinity>() <= 1e-9);
  const Eigen::VectorXd eig =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym).eigenvalues();
  CHECK(eig.minCoeff() >= -1e-12);
  CHECK(eig.maxCoeff() <= 1.0 + 1e-9);
}

TEST_CASE("distortion rank probe") {
  CHECK(distortion_full_rank(DistortionMatrix::hamming(2), 1.0));
  CHECK(distortion_full_rank(DistortionMatrix::hamming(3), 0.5));
  // Inactive distortion multiplier: the probe reports false regardless.
  CHECK_FALSE(distortion_full_rank(DistortionMatrix::hamming(2), 0.0));
  // Rank-deficient cost: identical columns.
  Eigen::MatrixXd dm(2, 2);
  dm << 0.0, 0.0, 1.0, 1.0;
  CHECK_FALSE(distortion_full_rank(DistortionMatrix(dm), 1.0));
}

TEST_CASE("convergence-rate fit recovers a geometric decay exactly") {
  std::vector<double> errs;
  const double theta = 0.37;
  for (int k = 0; k < 24; ++k) errs.push_back(0.8 * std::pow(theta, k));
  const auto [slope, r2] = fit_convergence_rate(errs);
  CHECK(slope == doctest::Approx(std::log(theta)).epsilon(1e-10));
  CHECK(r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("convergence-rate fit edge cases") {
  // Too short.
  CHECK_THROWS_AS(fit_convergence_rate(std::vector<double>(9, 0.5)),
                  std::invalid_argument);
  // Negative or non-finite entries.
  std::vector<double> bad(12, 0.5);
  bad[4] = -1.0;
  CHECK_THROWS_AS(fit_convergence_rate(bad), std::invalid_argument);

  // A zero inside the trailing-half window: exact-convergence sentinel.
  std::vector<double> hits(20, 0.0);
  for (int k = 0; k < 20; ++k) hits[std::size_t(k)] = std::pow(0.5, k);
  hits[15] = 0.0;
  const auto [slope, r2] = fit_convergence_rate(hits);
  CHECK(std::isinf(slope));
  CHECK(slope < 0.0);
  CHECK(r2 == 0.0);

  // A zero before the window is ignored by the fit.
  std::vector<double> early(20, 0.0);
  for (int k = 0; k < 20; ++k) early[std::size_t(k)] = std::pow(0.5, k);
  early[3] = 0.0;
  const auto [slope2, r2_2] = fit_convergence_rate(early);
  CHECK(slope2 == doctest::Approx(std::log(0.5)).epsilon(1e-10));
  CHECK(r2_2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectral report predicts and matches the observed linear rate") {
  const Distribution p = dist({0.15, 0.85});
  const DistortionMatrix d = DistortionMatrix::hamming(2);
  const FDivergenceSpec kl = make_builtin("kl");
  const LagrangePair s{1.0, 1.0};

  const SolveReport rep = solve_nam(p, s, d, kl, 1e-11);
  REQUIRE(rep.converged);
  const Distribution q_star =
      Distribution::strictly_positive(rep.final_marginal.vec());
  const std::vector<double> errs = error_trace_of(rep);
  REQUIRE(errs.size() >= 10);

  const SpectralReport sr =
      spectral_report(Scheme::nam, p, q_star, s, d, kl, errs);
  CHECK(sr.theta_max > 0.0);
  CHECK(sr.theta_max < 1.0);
  CHECK(sr.predicted_exponential);
  CHECK(sr.full_rank_distortion);
  CHECK(sr.eigs.size() == 2);
  // Sorted by modulus, descending.
  CHECK(std::abs(sr.eigs.front()) >= std::abs(sr.eigs.back()) - 1e-15);
  REQUIRE(sr.empirical_rate.has_value());
  REQUIRE(sr.fit_r2.has_value());
  // The observed decay is no slower than the spectral prediction.
  CHECK(*sr.empirical_rate <= std::log(sr.theta_max) + 0.1);
  CHECK(*sr.fit_r2 > 0.95);

  // Without a trace the empirical fields stay empty.
  const SpectralReport bare = spectral_report(Scheme::nam, p, q_star, s, d, kl);
  CHECK_FALSE(bare.empirical_rate.has_value());
  CHECK_FALSE(bare.fit_r2.has_value());
}

TEST_CASE("relaxed scheme is flagged at risk above its threshold while the "
          "exact scheme stays contractive") {
  const Distribution p = dist({0.15, 0.85});
  const DistortionMatrix d = DistortionMatrix::hamming(2);
  const FDivergenceSpec kl = make_builtin("kl");
  // Comfortably above the kl threshold of 1 (the relaxed radius here is ~2.1)
  // yet still low enough for a cold inner Newton start to converge.
  const LagrangePair s{1.0, 3.0};

  const SolveReport rep = solve_nam(p, s, d, kl, 1e-10);
  REQUIRE(rep.converged);
  const Distribution q_star =
      Distribution::strictly_positive(rep.final_marginal.vec());

  const SpectralReport ram_view =
      spectral_report(Scheme::ram, p, q_star, s, d, kl);
  const SpectralReport nam_view =
      spectral_report(Scheme::nam, p, q_star, s, d, kl);
  CHECK(ram_view.theta_max >= 1.0);
  CHECK_FALSE(ram_view.predicted_exponential);
  CHECK(nam_view.theta_max < 1.0);
  CHECK(nam_view.predicted_exponential);
}

TEST_CASE("zero-support detection reports a dead output letter") {
  // A source letter with zero mass starves its output coordinate; the
  // marginal is pinned at the floor within a few iterations and the
  // diagnostic fires after ten consecutive pinned iterations.
  const Distribution p = dist({0.5, 0.5, 0.0});
  RamConfig cfg;
  cfg.eps = 1e-16;  // unreachable: run out the clock deterministically
  cfg.max_iters = 40;
  const SolveReport rep = solve_ram(p, {4.0, 0.0}, DistortionMatrix::hamming(3),
                                    make_builtin("kl"), cfg);
  REQUIRE(rep.diag.zero_support.size() == 1);
  CHECK(rep.diag.zero_support[0] == 2);

  // A healthy binary solve reports none.
  const SolveReport ok = solve_nam(dist({0.3, 0.7}), {1.0, 0.5},
                                   DistortionMatrix::hamming(2),
                                   make_builtin("kl"), 1e-10);
  CHECK(ok.diag.zero_support.empty());
}
