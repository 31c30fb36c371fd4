#include "rdpf/oracle.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace rdpf {

using detail::require;

namespace {

// All summations below are written out directly on purpose: this module is
// the reference the solver is checked against, so it shares none of the
// solver's kernel or potential code.

double oracle_mutual_information(const Eigen::VectorXd& p,
                                 const Eigen::MatrixXd& q) {
  const Eigen::Index nx = q.rows(), ny = q.cols();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(ny);
  for (Eigen::Index y = 0; y < ny; ++y) {
    for (Eigen::Index x = 0; x < nx; ++x) m(y) += p(x) * q(x, y);
  }
  double total = 0.0;
  for (Eigen::Index x = 0; x < nx; ++x) {
    if (p(x) == 0.0) continue;
    for (Eigen::Index y = 0; y < ny; ++y) {
      if (q(x, y) == 0.0) continue;
      total += p(x) * q(x, y) * std::log(q(x, y) / m(y));
    }
  }
  return total < 0.0 ? 0.0 : total;
}

double oracle_distortion(const Eigen::VectorXd& p, const Eigen::MatrixXd& q,
                         const Eigen::MatrixXd& d) {
  double total = 0.0;
  for (Eigen::Index x = 0; x < q.rows(); ++x) {
    for (Eigen::Index y = 0; y < q.cols(); ++y) {
      total += p(x) * q(x, y) * d(x, y);
    }
  }
  return total;
}

double oracle_divergence(const FDivergenceSpec& spec, const Eigen::VectorXd& p,
                         const Eigen::VectorXd& m) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (m(i) > 0.0) {
      total += p(i) == 0.0 ? m(i) * spec.f_at_zero : m(i) * spec.f(p(i) / m(i));
    } else if (p(i) > 0.0) {
      total += p(i) * spec.fprime_at_inf;  // +inf generators never get here:
                                           // grid marginals stay positive
    }
  }
  return total < 0.0 ? 0.0 : total;
}

double oracle_lagrangian(const Eigen::VectorXd& p, const Eigen::MatrixXd& q,
                         const LagrangePair& s, const Eigen::MatrixXd& d,
                         const FDivergenceSpec& spec) {
  double val = oracle_mutual_information(p, q) +
               s.s_D * oracle_distortion(p, q, d);
  if (s.s_P > 0.0) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(q.cols());
    for (Eigen::Index y = 0; y < q.cols(); ++y) {
      for (Eigen::Index x = 0; x < q.rows(); ++x) m(y) += p(x) * q(x, y);
    }
    val += s.s_P * oracle_divergence(spec, p, m);
  }
  return val;
}

// Assembles the channel from the free parameters. Binary: (Q(1|0), Q(1|1)).
// Ternary: rows (Q(0|x), Q(1|x)) for x = 0..2, last column is the remainder.
Eigen::MatrixXd assemble_q(const std::vector<double>& params, Eigen::Index n) {
  Eigen::MatrixXd q(n, n);
  if (n == 2) {
    q(0, 0) = 1.0 - params[0];
    q(0, 1) = params[0];
    q(1, 0) = 1.0 - params[1];
    q(1, 1) = params[1];
  } else {
    for (Eigen::Index x = 0; x < 3; ++x) {
      const double a = params[std::size_t(2 * x)];
      const double b = params[std::size_t(2 * x + 1)];
      q(x, 0) = a;
      q(x, 1) = b;
      q(x, 2) = 1.0 - a - b;
    }
  }
  return q;
}

bool feasible(const std::vector<double>& params, Eigen::Index n) {
  if (n == 2) return true;  // box already encodes the constraints
  for (int x = 0; x < 3; ++x) {
    if (params[std::size_t(2 * x)] + params[std::size_t(2 * x + 1)] >
        1.0 - kProbFloor) {
      return false;
    }
  }
  return true;
}

}  // namespace

OracleResult brute_force_lagrangian(const Distribution& p,
                                    const LagrangePair& s,
                                    const DistortionMatrix& d,
                                    const FDivergenceSpec& spec, int grid_n,
                                    int refine_levels) {
  detail::check_multipliers(s);
  const Eigen::Index n = p.size();
  require(n == 2 || n == 3,
          "brute_force_lagrangian: only binary and ternary sources");
  require(d.input_size() == n && d.output_size() == n,
          "brute_force_lagrangian: distortion must be square and match p");
  require(grid_n >= 2, "brute_force_lagrangian: grid_n must be >= 2");
  require(refine_levels >= 0,
          "brute_force_lagrangian: refine_levels must be >= 0");

  const std::size_t dims = n == 2 ? 2 : 6;
  // A six-dimensional scan cannot afford grid_n points per axis.
  const int pts = n == 2 ? grid_n : std::min(grid_n, 12);
  const double lo_lim = kProbFloor, hi_lim = 1.0 - kProbFloor;

  std::vector<double> lo(dims, lo_lim), width(dims, hi_lim - lo_lim);
  std::vector<double> best_params(dims, 0.0);
  double best = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best_q;

  std::vector<int> idx(dims, 0);
  std::vector<double> params(dims, 0.0);

  for (int level = 0; level <= refine_levels; ++level) {
    if (level > 0) {
      // Shrink each axis window 4x around the incumbent, clipped to the box.
      for (std::size_t k = 0; k < dims; ++k) {
        const double w = width[k] / 4.0;
        double l = best_params[k] - w / 2.0;
        if (l < lo_lim) l = lo_lim;
        if (l + w > hi_lim) l = hi_lim - w;
        lo[k] = l;
        width[k] = w;
      }
    }
    // Row-major odometer over the grid; strict-improvement updates keep the
    // scan deterministic.
    std::fill(idx.begin(), idx.end(), 0);
    bool scan_done = false;
    while (!scan_done) {
      for (std::size_t k = 0; k < dims; ++k) {
        params[k] = lo[k] + width[k] * double(idx[k]) / double(pts - 1);
      }
      if (feasible(params, n)) {
        const Eigen::MatrixXd q = assemble_q(params, n);
        const double val = oracle_lagrangian(p.vec(), q, s, d.mat(), spec);
        if (val < best) {
          best = val;
          best_params = params;
          best_q = q;
        }
      }
      std::size_t k = dims;
      while (true) {
        if (k == 0) {
          scan_done = true;
          break;
        }
        --k;
        if (++idx[k] < pts) break;
        idx[k] = 0;
      }
    }
  }

  require(std::isfinite(best), "brute_force_lagrangian: no feasible point");
  OracleResult res;
  res.lagrangian_value = best;
  res.argmin_Q = TransitionMatrix(best_q);
  res.D_at_min = oracle_distortion(p.vec(), best_q, d.mat());
  {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
    for (Eigen::Index y = 0; y < n; ++y) {
      for (Eigen::Index x = 0; x < n; ++x) m(y) += p[x] * best_q(x, y);
    }
    res.P_at_min = oracle_divergence(spec, p.vec(), m);
  }
  res.refinement_levels = refine_levels;
  return res;
}

Distribution classical_ba_step(const Distribution& p, const Distribution& q,
                               double s_D, const DistortionMatrix& d) {
  require(std::isfinite(s_D) && s_D >= 0.0,
          "classical_ba_step: s_D must be finite and >= 0");
  require(p.size() == d.input_size() && q.size() == d.output_size(),
          "classical_ba_step: size mismatch");
  const Eigen::Index nx = d.input_size(), ny = d.output_size();
  Eigen::VectorXd next = Eigen::VectorXd::Zero(ny);
  for (Eigen::Index x = 0; x < nx; ++x) {
    double den = 0.0;
    for (Eigen::Index y = 0; y < ny; ++y) {
      den += q[y] * std::exp(-s_D * d(x, y));
    }
    for (Eigen::Index y = 0; y < ny; ++y) {
      next(y) += p[x] * q[y] * std::exp(-s_D * d(x, y)) / den;
    }
  }
  return Distribution(next);
}

std::pair<double, double> classical_ba(const Distribution& p, double s_D,
                                       const DistortionMatrix& d, double eps) {
  require(eps > 0.0, "classical_ba: eps must be positive");
  require(std::isfinite(s_D) && s_D >= 0.0,
          "classical_ba: s_D must be finite and >= 0");
  require(p.size() == d.input_size(), "classical_ba: size mismatch");
  const Eigen::Index nx = d.input_size(), ny = d.output_size();

  Eigen::VectorXd q = Eigen::VectorXd::Constant(ny, 1.0 / double(ny));
  const long cap = 1000000;
  for (long it = 0; it < cap; ++it) {
    // c(y) = sum_x p(x) A(x,y) / den(x)
    Eigen::VectorXd c = Eigen::VectorXd::Zero(ny);
    for (Eigen::Index x = 0; x < nx; ++x) {
      double den = 0.0;
      for (Eigen::Index y = 0; y < ny; ++y) {
        den += q(y) * std::exp(-s_D * d(x, y));
      }
      for (Eigen::Index y = 0; y < ny; ++y) {
        c(y) += p[x] * std::exp(-s_D * d(x, y)) / den;
      }
    }
    double cmax = 0.0, avg = 0.0;
    for (Eigen::Index y = 0; y < ny; ++y) {
      if (c(y) > cmax) cmax = c(y);
      if (q(y) * c(y) > 0.0) avg += q(y) * c(y) * std::log(c(y));
    }
    if (std::log(cmax) - avg < eps) break;
    for (Eigen::Index y = 0; y < ny; ++y) {
      q(y) = std::max(q(y) * c(y), kProbFloor);
    }
    q /= q.sum();
  }

  // Assemble the channel at the stop point and read off (D, R).
  Eigen::MatrixXd qm(nx, ny);
  for (Eigen::Index x = 0; x < nx; ++x) {
    double den = 0.0;
    for (Eigen::Index y = 0; y < ny; ++y) {
      den += q(y) * std::exp(-s_D * d(x, y));
    }
    for (Eigen::Index y = 0; y < ny; ++y) {
      qm(x, y) = q(y) * std::exp(-s_D * d(x, y)) / den;
    }
  }
  return {oracle_distortion(p.vec(), qm, d.mat()),
          oracle_mutual_information(p.vec(), qm)};
}

double binary_rdf(double p, double D) {
  require(p > 0.0 && p <= 0.5, "binary_rdf: p must lie in (0, 1/2]");
  require(D >= 0.0, "binary_rdf: D must be >= 0");
  if (D >= p) return 0.0;
  const auto h = [](double a) {
    if (a == 0.0 || a == 1.0) return 0.0;
    return -a * std::log(a) - (1.0 - a) * std::log(1.0 - a);
  };
  return h(p) - h(D);
}

}  // namespace rdpf
