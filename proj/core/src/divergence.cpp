#include "rdpf/divergence.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace rdpf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

FDivergenceSpec make_kl() {
  FDivergenceSpec s;
  s.name = "kl";
  s.smooth = true;
  s.f = [](double t) { return t * std::log(t); };
  s.df = [](double t) { return std::log(t) + 1.0; };
  s.d2f = [](double t) { return 1.0 / t; };
  s.f_at_zero = 0.0;
  s.fprime_at_inf = kInf;
  return s;
}

FDivergenceSpec make_js() {
  FDivergenceSpec s;
  s.name = "js";
  s.smooth = true;
  // f(t) = t log(2t/(t+1)) + log(2/(t+1))
  s.f = [](double t) {
    return t * std::log(2.0 * t / (t + 1.0)) + std::log(2.0 / (t + 1.0));
  };
  s.df = [](double t) { return std::log(2.0 * t / (t + 1.0)); };
  s.d2f = [](double t) { return 1.0 / (t * (t + 1.0)); };
  s.f_at_zero = std::log(2.0);
  s.fprime_at_inf = std::log(2.0);
  return s;
}

FDivergenceSpec make_tv() {
  FDivergenceSpec s;
  s.name = "tv";
  s.smooth = false;
  s.f = [](double t) { return 0.5 * std::abs(t - 1.0); };
  // Subgradient choice: 0 at the kink.
  s.df = [](double t) { return t > 1.0 ? 0.5 : (t < 1.0 ? -0.5 : 0.0); };
  s.d2f = nullptr;
  s.f_at_zero = 0.5;
  s.fprime_at_inf = 0.5;
  return s;
}

FDivergenceSpec make_chi2() {
  FDivergenceSpec s;
  s.name = "chi2";
  s.smooth = true;
  s.f = [](double t) { return (t - 1.0) * (t - 1.0); };
  s.df = [](double t) { return 2.0 * (t - 1.0); };
  s.d2f = [](double) { return 2.0; };
  s.f_at_zero = 1.0;
  s.fprime_at_inf = kInf;
  return s;
}

}  // namespace

FDivergenceSpec make_alpha(double alpha) {
  detail::require(std::isfinite(alpha), "make_alpha: alpha must be finite");
  FDivergenceSpec s;
  {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "alpha:%g", alpha);
    s.name = buf;
  }
  s.smooth = true;
  if (alpha == 1.0) {
    // lim_{a->1} of the family: t log t - t + 1 (KL shifted by an affine
    // term, so eval_divergence agrees with "kl" exactly).
    s.f = [](double t) { return t * std::log(t) - t + 1.0; };
    s.df = [](double t) { return std::log(t); };
    s.f_at_zero = 1.0;
    s.fprime_at_inf = kInf;
  } else if (alpha == 0.0) {
    // lim_{a->0}: -log t + t - 1 (reverse KL up to the affine shift).
    s.f = [](double t) { return -std::log(t) + t - 1.0; };
    s.df = [](double t) { return 1.0 - 1.0 / t; };
    s.f_at_zero = kInf;
    s.fprime_at_inf = 1.0;
  } else {
    const double a = alpha;
    s.f = [a](double t) {
      return (std::pow(t, a) - a * t - (1.0 - a)) / (a * (a - 1.0));
    };
    s.df = [a](double t) { return (std::pow(t, a - 1.0) - 1.0) / (a - 1.0); };
    s.f_at_zero = a > 0.0 ? 1.0 / a : kInf;
    s.fprime_at_inf = a < 1.0 ? 1.0 / (1.0 - a) : kInf;
  }
  // All branches share f''(t) = t^(a-2).
  const double a = alpha;
  s.d2f = [a](double t) { return std::pow(t, a - 2.0); };
  return s;
}

FDivergenceSpec make_arctan_tv(int n) {
  detail::require(n >= 1, "make_arctan_tv: n must be >= 1");
  FDivergenceSpec s;
  s.name = "arctan_tv:" + std::to_string(n);
  s.smooth = true;
  const double nn = double(n);
  s.f = [nn](double t) {
    const double u = t - 1.0;
    return (2.0 / kPi) * u * std::atan(nn * u);
  };
  s.df = [nn](double t) {
    const double u = t - 1.0;
    return (2.0 / kPi) * (std::atan(nn * u) + nn * u / (1.0 + nn * nn * u * u));
  };
  s.d2f = [nn](double t) {
    const double u = t - 1.0;
    const double w = 1.0 + nn * nn * u * u;
    return (4.0 * nn / kPi) / (w * w);
  };
  s.f_at_zero = (2.0 / kPi) * std::atan(nn);
  s.fprime_at_inf = 1.0;
  return s;
}

FDivergenceSpec make_builtin(const std::string& selector) {
  if (selector == "kl") return make_kl();
  if (selector == "js") return make_js();
  if (selector == "tv") return make_tv();
  if (selector == "chi2") return make_chi2();
  if (selector.rfind("alpha:", 0) == 0) {
    const std::string arg = selector.substr(6);
    std::size_t pos = 0;
    double a = 0.0;
    try {
      a = std::stod(arg, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("make_builtin: bad alpha value '" + arg +
                                  "'");
    }
    detail::require(pos == arg.size(),
                    "make_builtin: trailing characters in '" + selector + "'");
    return make_alpha(a);
  }
  if (selector.rfind("arctan_tv:", 0) == 0) {
    const std::string arg = selector.substr(10);
    std::size_t pos = 0;
    int n = 0;
    try {
      n = std::stoi(arg, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("make_builtin: bad arctan_tv sharpness '" +
                                  arg + "'");
    }
    detail::require(pos == arg.size(),
                    "make_builtin: trailing characters in '" + selector + "'");
    return make_arctan_tv(n);
  }
  throw std::invalid_argument("make_builtin: unknown divergence '" + selector +
                              "'");
}

double eval_divergence(const FDivergenceSpec& spec, const Distribution& p,
                       const Distribution& q) {
  detail::require(p.size() == q.size(), "eval_divergence: size mismatch");
  detail::require(bool(spec.f), "eval_divergence: spec has no generator");
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = p[i];
    const double qi = q[i];
    if (qi > 0.0) {
      if (pi == 0.0) {
        total += qi * spec.f_at_zero;  // may be +inf
      } else {
        total += qi * spec.f(pi / qi);
      }
    } else if (pi > 0.0) {
      if (std::isinf(spec.fprime_at_inf)) {
        throw support_violation(
            "eval_divergence: q vanishes on the support of p and the "
            "generator grows superlinearly (divergence is +inf)");
      }
      total += pi * spec.fprime_at_inf;
    }
    // pi == 0 and qi == 0 contributes 0.
  }
  // f(1) = 0 and convexity make the exact value nonnegative; clamp rounding.
  return total < 0.0 ? 0.0 : total;
}

double g_func(const FDivergenceSpec& spec, double x, double y) {
  detail::require(y > 0.0, "g_func: y must be positive");
  detail::require(x >= 0.0, "g_func: x must be nonnegative");
  detail::require(bool(spec.f) && bool(spec.df),
                  "g_func: spec has no generator/derivative");
  if (x == 0.0) return spec.f_at_zero;  // 0 * f'(0) := 0
  const double r = x / y;
  return spec.f(r) - r * spec.df(r);
}

double d2_divergence_wrt_q(const FDivergenceSpec& spec, const Distribution& p,
                           const Distribution& v, Eigen::Index i) {
  detail::require(spec.smooth && bool(spec.d2f),
                  "d2_divergence_wrt_q: requires a smooth generator");
  detail::require(p.size() == v.size(), "d2_divergence_wrt_q: size mismatch");
  detail::require(i >= 0 && i < p.size(),
                  "d2_divergence_wrt_q: index out of range");
  const double pi = p[i];
  const double vi = v[i];
  detail::require(vi > 0.0, "d2_divergence_wrt_q: v(i) must be positive");
  if (pi == 0.0) return 0.0;  // p(i)^2 factor kills the term
  return pi * pi / (vi * vi * vi) * spec.d2f(pi / vi);
}

}  // namespace rdpf
