#include <doctest.h>

#include <cmath>
#include <random>

#include "rdpf/kernel.hpp"
#include "rdpf/oracle.hpp"
#include "test_util.hpp"

using namespace rdpf;
using testutil::dist;

namespace {

DistortionMatrix random_distortion(std::mt19937& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(0.0, 4.0);
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = 0; y < n; ++y) d(x, y) = u(rng);
  return DistortionMatrix(d);
}

}  // namespace

TEST_CASE("zero multipliers give the all-ones kernel") {
  const Distribution p = dist({0.3, 0.7});
  const Distribution u = dist({0.4, 0.6});
  const FDivergenceSpec kl = make_builtin("kl");
  const KernelMatrix k = kernel(p, u, {0.0, 0.0}, DistortionMatrix::hamming(2),
                                kl);
  CHECK(k.a.isApprox(Eigen::MatrixXd::Ones(2, 2), 1e-15));
  CHECK(k.row_shift.isZero(1e-15));
  // With a flat kernel the coefficient vector is identically 1 and the
  // parametric channel copies u into every row.
  const Eigen::VectorXd c = c_coeff(p, u, k);
  CHECK(c(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c(1) == doctest::Approx(1.0).epsilon(1e-14));
  const TransitionMatrix q = parametric_Q(p, u, k);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      CHECK(q(x, y) == doctest::Approx(u[y]).epsilon(1e-14));
}

TEST_CASE("s_P = 0 reduces to the plain distortion tilt") {
  const Distribution p = dist({0.3, 0.7});
  const Distribution u = dist({0.5, 0.5});
  const KernelMatrix k = kernel(p, u, {2.0, 0.0}, DistortionMatrix::hamming(2),
                                make_builtin("kl"));
  // Hamming rows peak on the diagonal, so the shift is zero and entries are
  // literally exp(-s_D d).
  CHECK(k.row_shift.isZero(1e-15));
  CHECK(k.a(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(k.a(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(k.a(0, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(k.a(1, 0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
}

TEST_CASE("coefficient mass identity: sum_y w(y) c(y) = 1") {
  std::mt19937 rng(21);
  const FDivergenceSpec kl = make_builtin("kl");
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 + Eigen::Index(rng() % 4);
    const Distribution p = testutil::random_dist(rng, n);
    const Distribution w = testutil::random_dist(rng, n);
    const Distribution r = testutil::random_dist(rng, n);
    const DistortionMatrix d = random_distortion(rng, n);
    std::uniform_real_distribution<double> su(0.0, 3.0);
    const LagrangePair s{su(rng), su(rng)};

    const Eigen::VectorXd c = c_coeff(p, w, r, s, d, kl);
    CHECK(w.vec().dot(c) == doctest::Approx(1.0).epsilon(1e-12));

    // The prebuilt-kernel overload computes the same thing.
    const Eigen::VectorXd c2 = c_coeff(p, w, kernel(p, r, s, d, kl));
    CHECK((c - c2).lpNorm<Eigen::Infinity>() == doctest::Approx(0.0));
  }
}

TEST_CASE("mass identity also holds for kernels anchored off the simplex") {
  // The inner Newton iterates evaluate the kernel at positive vectors that
  // do not sum to one; the identity depends only on the kernel being shared
  // between numerator and denominator.
  std::mt19937 rng(22);
  const FDivergenceSpec js = make_builtin("js");
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + Eigen::Index(rng() % 3);
    const Distribution p = testutil::random_dist(rng, n);
    const Distribution w = testutil::random_dist(rng, n);
    const Eigen::VectorXd u_pos = 2.5 * testutil::random_dist(rng, n).vec();
    const DistortionMatrix d = random_distortion(rng, n);
    const KernelMatrix k = detail::kernel_raw(p, u_pos, {1.3, 0.7}, d, js);
    const Eigen::VectorXd c = c_coeff(p, w, k);
    CHECK(w.vec().dot(c) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("parametric channel: stochastic rows, marginal equals u .* c") {
  std::mt19937 rng(23);
  const FDivergenceSpec kl = make_builtin("kl");
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + Eigen::Index(rng() % 4);
    const Distribution p = testutil::random_dist(rng, n);
    const Distribution u = testutil::random_dist(rng, n);
    const DistortionMatrix d = random_distortion(rng, n);
    const LagrangePair s{1.1, 0.6};

    const KernelMatrix k = kernel(p, u, s, d, kl);
    const TransitionMatrix q = parametric_Q(p, u, k);
    for (Eigen::Index x = 0; x < n; ++x) {
      CHECK(q.mat().row(x).sum() == doctest::Approx(1.0).epsilon(1e-13));
    }
    const Eigen::VectorXd m = marginal(p, q).vec();
    const Eigen::VectorXd uc = u.vec().cwiseProduct(c_coeff(p, u, k));
    CHECK((m - uc).lpNorm<Eigen::Infinity>() ==
          doctest::Approx(0.0).epsilon(1e-13));
  }
}

TEST_CASE("q .* c at s_P = 0 is the textbook marginal update") {
  std::mt19937 rng(24);
  const FDivergenceSpec kl = make_builtin("kl");
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + Eigen::Index(rng() % 2);
    const Distribution p = testutil::random_dist(rng, n);
    const Distribution q = testutil::random_dist(rng, n);
    const DistortionMatrix d = DistortionMatrix::hamming(n);
    const double sd = 2.3;

    const Eigen::VectorXd c = c_coeff(p, q, q, {sd, 0.0}, d, kl);
    const Eigen::VectorXd step = q.vec().cwiseProduct(c);
    const Distribution ref = classical_ba_step(p, q, sd, d);
    CHECK((step - ref.vec()).lpNorm<Eigen::Infinity>() ==
          doctest::Approx(0.0).epsilon(1e-13));
  }
}

TEST_CASE("row shift keeps extreme multipliers finite") {
  const Distribution p = dist({0.3, 0.7});
  const Distribution u = dist({0.5, 0.5});
  Eigen::MatrixXd dm(2, 2);
  dm << 1.0, 2.0, 3.0, 0.5;  // no zero cost anywhere, so the shift is active
  const DistortionMatrix d(dm);
  const FDivergenceSpec kl = make_builtin("kl");

  const KernelMatrix k = kernel(p, u, {800.0, 0.0}, d, kl);
  CHECK(k.a.allFinite());
  CHECK(k.a.maxCoeff() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(k.row_shift(0) == doctest::Approx(-800.0).epsilon(1e-15));
  CHECK(k.row_shift(1) == doctest::Approx(-400.0).epsilon(1e-15));
  const Eigen::VectorXd c = c_coeff(p, u, k);
  CHECK(c.allFinite());
  CHECK((c.array() > 0.0).all());
  const TransitionMatrix q = parametric_Q(p, u, k);
  CHECK(q.mat().row(0).sum() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(q.mat().row(1).sum() == doctest::Approx(1.0).epsilon(1e-13));

  // At a moderate multiplier the shifted representation reconstructs the
  // unshifted kernel exactly.
  const double sd = 30.0;
  const KernelMatrix ks = kernel(p, u, {sd, 0.0}, d, kl);
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const double truth = std::exp(-sd * dm(x, y));
      const double rebuilt = ks.a(x, y) * std::exp(ks.row_shift(x));
      CHECK(rebuilt == doctest::Approx(truth).epsilon(1e-12));
    }
  }
}

TEST_CASE("kernel validates its inputs") {
  const Distribution p = dist({0.3, 0.7});
  const DistortionMatrix d = DistortionMatrix::hamming(2);
  const FDivergenceSpec kl = make_builtin("kl");

  // Reference marginal with a dead coordinate is outside the domain.
  CHECK_THROWS_AS(kernel(p, dist({1.0, 0.0}), {1.0, 1.0}, d, kl),
                  std::invalid_argument);
  // Negative multipliers are rejected.
  CHECK_THROWS_AS(kernel(p, dist({0.5, 0.5}), {-1.0, 0.0}, d, kl),
                  std::invalid_argument);
  // Size mismatches are rejected.
  CHECK_THROWS_AS(
      kernel(dist({0.2, 0.3, 0.5}), dist({0.5, 0.5}), {1.0, 0.0}, d, kl),
      std::invalid_argument);
}

TEST_CASE("unbounded divergence penalty at a dead source letter is rejected") {
  // alpha:0 has f(0) = +inf; a source letter with zero mass makes the
  // column penalty g(0, u(y)) infinite, which the kernel must refuse.
  const Distribution p = dist({0.0, 1.0});
  const Distribution u = dist({0.5, 0.5});
  const FDivergenceSpec rev = make_builtin("alpha:0");
  CHECK_THROWS_AS(
      kernel(p, u, {1.0, 1.0}, DistortionMatrix::hamming(2), rev),
      std::invalid_argument);
  // The same point is fine for a generator with finite f(0).
  CHECK_NOTHROW(
      kernel(p, u, {1.0, 1.0}, DistortionMatrix::hamming(2),
             make_builtin("kl")));
}

TEST_CASE("descent objective at a self-consistent point splits into "
          "rate + penalties") {
  std::mt19937 rng(25);
  const FDivergenceSpec js = make_builtin("js");
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + Eigen::Index(rng() % 3);
    const Distribution p = testutil::random_dist(rng, n);
    const TransitionMatrix q = testutil::random_channel(rng, n, n);
    const Distribution m = marginal(p, q);
    const DistortionMatrix d = random_distortion(rng, n);
    const LagrangePair s{1.7, 0.9};

    const double v = descent_V(p, m, q, m, s, d, js);
    const double want = mutual_information(p, q) +
                        s.s_D * expected_distortion(p, q, d) +
                        s.s_P * eval_divergence(js, p, m);
    CHECK(v == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("descent objective drops the divergence term when s_P = 0") {
  // A tv generator with a mismatched marginal would otherwise contribute;
  // with s_P = 0 the term must not even be evaluated.
  const Distribution p = dist({0.3, 0.7});
  const TransitionMatrix q(Eigen::MatrixXd{{0.8, 0.2}, {0.1, 0.9}});
  const Distribution m = marginal(p, q);
  const double v =
      descent_V(p, m, q, m, {1.0, 0.0}, DistortionMatrix::hamming(2),
                make_builtin("tv"));
  const double want = mutual_information(p, q) +
                      expected_distortion(p, q, DistortionMatrix::hamming(2));
  CHECK(v == doctest::Approx(want).epsilon(1e-13));
}
