#pragma once

// Probability primitives: distributions, channels (row-stochastic matrices),
// distortion matrices, and the information-theoretic quantities built on them.
// All value types here are immutable after construction; free functions are pure.

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace rdpf {

// Smallest mass any strictly-positive iterate is allowed to carry.
inline constexpr double kProbFloor = 1e-15;

// Tolerance for "sums to one" checks at construction time.
inline constexpr double kMassTol = 1e-12;

namespace detail {
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}
}  // namespace detail

// Lagrange multiplier pair; both components must be finite and >= 0.
struct LagrangePair {
  double s_D = 0.0;
  double s_P = 0.0;
};

namespace detail {
// Validates a multiplier pair (finite, nonnegative).
void check_multipliers(const LagrangePair& s);
}  // namespace detail

// A finite probability vector: entries >= 0, total mass 1 within kMassTol.
class Distribution {
 public:
  // Empty placeholder (size 0); every validated constructor below yields a
  // genuine distribution. Exists so result structs can be default-constructed.
  Distribution() = default;

  explicit Distribution(Eigen::VectorXd mass);

  // Uniform distribution on n symbols.
  static Distribution uniform(Eigen::Index n);

  // Clamps entries below `floor` up to it, then renormalizes. Accepts any
  // nonnegative vector with positive total mass; the result is strictly
  // positive. Used for solver iterates, which must stay in the open simplex.
  static Distribution strictly_positive(const Eigen::VectorXd& mass,
                                        double floor = kProbFloor);

  const Eigen::VectorXd& vec() const noexcept { return mass_; }
  double operator[](Eigen::Index i) const { return mass_(i); }
  Eigen::Index size() const noexcept { return mass_.size(); }

  // True when every entry exceeds `floor * (1 - 1e-9)`.
  bool is_strictly_positive(double floor = kProbFloor) const;

 private:
  Eigen::VectorXd mass_;
};

// A conditional distribution Q(y|x): each row is a probability vector.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;  // empty placeholder, see Distribution

  explicit TransitionMatrix(Eigen::MatrixXd rows);

  const Eigen::MatrixXd& mat() const noexcept { return q_; }
  double operator()(Eigen::Index x, Eigen::Index y) const { return q_(x, y); }
  Eigen::Index input_size() const noexcept { return q_.rows(); }
  Eigen::Index output_size() const noexcept { return q_.cols(); }

 private:
  Eigen::MatrixXd q_;
};

// A nonnegative finite per-letter cost matrix d(x, y).
class DistortionMatrix {
 public:
  DistortionMatrix() = default;  // empty placeholder, see Distribution

  explicit DistortionMatrix(Eigen::MatrixXd d);

  // 0 on the diagonal, 1 off it.
  static DistortionMatrix hamming(Eigen::Index n);

  const Eigen::MatrixXd& mat() const noexcept { return d_; }
  double operator()(Eigen::Index x, Eigen::Index y) const { return d_(x, y); }
  Eigen::Index input_size() const noexcept { return d_.rows(); }
  Eigen::Index output_size() const noexcept { return d_.cols(); }

 private:
  Eigen::MatrixXd d_;
};

// Output marginal of Q under source p: m(y) = sum_x p(x) Q(y|x).
Distribution marginal(const Distribution& p, const TransitionMatrix& q);

// Average cost sum_{x,y} p(x) Q(y|x) d(x,y).
double expected_distortion(const Distribution& p, const TransitionMatrix& q,
                           const DistortionMatrix& d);

// Mutual information I(p, Q) in nats, with the 0 log 0 = 0 convention.
// Always nonnegative (tiny negative rounding is clamped to zero).
double mutual_information(const Distribution& p, const TransitionMatrix& q);

// Binary entropy in nats; h(0) = h(1) = 0. Requires a in [0, 1].
double binary_entropy(double a);

}  // namespace rdpf
