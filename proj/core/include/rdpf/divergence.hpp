#pragma once

// f-divergences over finite alphabets: D_f(p || q) = sum_x q(x) f(p(x)/q(x))
// for a convex generator f with f(1) = 0. The boundary conventions are
//   f(0)        := lim_{t -> 0+} f(t)                (may be +inf)
//   0 * f(0/0)  := 0
//   0 * f(a/0)  := a * f'(inf),  f'(inf) = lim_{t -> inf} f(t)/t  (may be +inf)
//
// A generator is described by callables for f, f', f'' on (0, inf) plus the
// two boundary constants above. Non-smooth generators (total variation) leave
// d2f empty and set smooth = false.

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

#include "rdpf/prob.hpp"

namespace rdpf {

struct FDivergenceSpec {
  std::string name;
  bool smooth = true;
  std::function<double(double)> f;    // generator on (0, inf)
  std::function<double(double)> df;   // first derivative (subgradient choice
                                      // for non-smooth generators)
  std::function<double(double)> d2f;  // second derivative; empty if !smooth
  double f_at_zero = 0.0;             // lim_{t->0+} f(t)
  double fprime_at_inf = 0.0;         // lim_{t->inf} f(t)/t
};

// Thrown when D_f(p || q) is +inf because q(x) = 0 on a point where p(x) > 0
// and the generator grows superlinearly (f'(inf) = +inf).
class support_violation : public std::runtime_error {
 public:
  explicit support_violation(const std::string& msg)
      : std::runtime_error(msg) {}
};

// Builds one of the built-in generators. Accepted selectors:
//   "kl"              f(t) = t log t
//   "js"              Jensen-Shannon
//   "tv"              f(t) = |t - 1| / 2          (non-smooth)
//   "chi2"            f(t) = (t - 1)^2
//   "alpha:<float>"   Amari alpha family (continuous limits at 0 and 1)
//   "arctan_tv:<int>" smooth surrogate of |t - 1|, sharpness n >= 1
FDivergenceSpec make_builtin(const std::string& selector);

// Alpha family member for an arbitrary real order.
FDivergenceSpec make_alpha(double alpha);

// Smooth total-variation surrogate f_n(t) = (2/pi)(t-1) arctan(n(t-1)).
// Satisfies |f_n(t) - |t-1|| <= 2/(n*pi) and f_n <= |t-1| pointwise.
FDivergenceSpec make_arctan_tv(int n);

// D_f(p || q) under the conventions above. Returns +inf when f(0) = +inf and
// q puts mass where p has none; throws support_violation when p puts mass
// where q has none and f'(inf) = +inf.
double eval_divergence(const FDivergenceSpec& spec, const Distribution& p,
                       const Distribution& q);

// g(x, y) = f(x/y) - (x/y) f'(x/y), the portion of the divergence gradient in
// its second argument that enters the solver kernel: d/dy [ y f(x/y) ] = g(x,y).
// Requires y > 0; at x = 0 this is f(0) (with 0 * f'(0) := 0).
double g_func(const FDivergenceSpec& spec, double x, double y);

// Second derivative of q -> D_f(p || q) in coordinate i at q = v:
// p(i)^2 / v(i)^3 * f''(p(i)/v(i)). Requires a smooth generator and v(i) > 0.
double d2_divergence_wrt_q(const FDivergenceSpec& spec, const Distribution& p,
                           const Distribution& v, Eigen::Index i);

}  // namespace rdpf
