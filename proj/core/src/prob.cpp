#include "rdpf/prob.hpp"

#include <cmath>

namespace rdpf {

using detail::require;

Distribution::Distribution(Eigen::VectorXd mass) : mass_(std::move(mass)) {
  require(mass_.size() > 0, "Distribution: empty mass vector");
  require(mass_.allFinite(), "Distribution: non-finite entry");
  require((mass_.array() >= 0.0).all(), "Distribution: negative entry");
  require(std::abs(mass_.sum() - 1.0) <= kMassTol,
          "Distribution: mass must sum to 1 within 1e-12");
}

Distribution Distribution::uniform(Eigen::Index n) {
  require(n > 0, "Distribution::uniform: n must be positive");
  return Distribution(Eigen::VectorXd::Constant(n, 1.0 / double(n)));
}

Distribution Distribution::strictly_positive(const Eigen::VectorXd& mass,
                                             double floor) {
  require(mass.size() > 0, "strictly_positive: empty mass vector");
  require(mass.allFinite(), "strictly_positive: non-finite entry");
  require((mass.array() >= 0.0).all(), "strictly_positive: negative entry");
  require(floor > 0.0, "strictly_positive: floor must be positive");
  // The total-mass check runs on the input: flooring must repair rounding,
  // not manufacture a distribution out of an all-zero vector.
  require(mass.sum() > 0.0, "strictly_positive: vector has no mass");
  Eigen::VectorXd v = mass.cwiseMax(floor);
  return Distribution(v / v.sum());
}

bool Distribution::is_strictly_positive(double floor) const {
  return mass_.size() > 0 && (mass_.array() > floor * (1.0 - 1e-9)).all();
}

TransitionMatrix::TransitionMatrix(Eigen::MatrixXd rows) : q_(std::move(rows)) {
  require(q_.rows() > 0 && q_.cols() > 0, "TransitionMatrix: empty matrix");
  require(q_.allFinite(), "TransitionMatrix: non-finite entry");
  require((q_.array() >= 0.0).all(), "TransitionMatrix: negative entry");
  for (Eigen::Index x = 0; x < q_.rows(); ++x) {
    require(std::abs(q_.row(x).sum() - 1.0) <= kMassTol,
            "TransitionMatrix: row " + std::to_string(x) +
                " must sum to 1 within 1e-12");
  }
}

DistortionMatrix::DistortionMatrix(Eigen::MatrixXd d) : d_(std::move(d)) {
  require(d_.rows() > 0 && d_.cols() > 0, "DistortionMatrix: empty matrix");
  require(d_.allFinite(), "DistortionMatrix: non-finite entry");
  require((d_.array() >= 0.0).all(), "DistortionMatrix: negative entry");
}

DistortionMatrix DistortionMatrix::hamming(Eigen::Index n) {
  require(n > 0, "DistortionMatrix::hamming: n must be positive");
  Eigen::MatrixXd d = Eigen::MatrixXd::Ones(n, n);
  d.diagonal().setZero();
  return DistortionMatrix(std::move(d));
}

Distribution marginal(const Distribution& p, const TransitionMatrix& q) {
  require(p.size() == q.input_size(),
          "marginal: source size must match channel input size");
  return Distribution(q.mat().transpose() * p.vec());
}

double expected_distortion(const Distribution& p, const TransitionMatrix& q,
                           const DistortionMatrix& d) {
  require(p.size() == q.input_size(),
          "expected_distortion: source/channel size mismatch");
  require(q.input_size() == d.input_size() &&
              q.output_size() == d.output_size(),
          "expected_distortion: channel/distortion shape mismatch");
  return (p.vec().asDiagonal() * q.mat()).cwiseProduct(d.mat()).sum();
}

double mutual_information(const Distribution& p, const TransitionMatrix& q) {
  require(p.size() == q.input_size(),
          "mutual_information: source/channel size mismatch");
  const Eigen::VectorXd m = q.mat().transpose() * p.vec();
  double total = 0.0;
  for (Eigen::Index x = 0; x < q.input_size(); ++x) {
    const double px = p[x];
    if (px == 0.0) continue;
    for (Eigen::Index y = 0; y < q.output_size(); ++y) {
      const double qxy = q(x, y);
      if (qxy == 0.0) continue;  // 0 log 0 = 0
      // m(y) >= p(x) Q(y|x) > 0 here, so the ratio is safe.
      total += px * qxy * std::log(qxy / m(y));
    }
  }
  return total < 0.0 ? 0.0 : total;
}

double binary_entropy(double a) {
  detail::require(a >= 0.0 && a <= 1.0, "binary_entropy: a must be in [0, 1]");
  if (a == 0.0 || a == 1.0) return 0.0;
  return -a * std::log(a) - (1.0 - a) * std::log(1.0 - a);
}

}  // namespace rdpf
