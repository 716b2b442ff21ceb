#pragma once

// Reference formulas in long double, written directly from the model
// definitions and independent of the library's expression order.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

struct Market {
  long double alpha = 1.64L;
  long double gamma = 100.0L;
  long double sigma_eps_sq = 0.0015L * 0.0015L;
};

inline long double kernel(long double lam, const Market& m) {
  const long double gap = 1.0L + m.gamma - lam;
  return m.gamma * m.gamma * m.alpha * m.alpha * m.sigma_eps_sq / (gap * gap);
}

/// lambda' = (omega / lambda^2 + (1 - omega) A(m))^(-1/2)
inline long double coupled_component(long double lam, long double mean, long double omega,
                                     const Market& m) {
  return 1.0L / std::sqrt(omega / (lam * lam) + (1.0L - omega) * kernel(mean, m));
}

inline long double T(long double x, long double omega, const Market& m) {
  return coupled_component(x, x, omega, m);
}

inline std::vector<long double> coupled(const std::vector<long double>& lam,
                                        const std::vector<long double>& omega,
                                        const std::vector<long double>& pi, const Market& m) {
  long double mean = 0.0L;
  for (std::size_t i = 0; i < lam.size(); ++i) mean += pi[i] * lam[i];
  std::vector<long double> out(lam.size());
  for (std::size_t i = 0; i < lam.size(); ++i)
    out[i] = coupled_component(lam[i], mean, omega[i], m);
  return out;
}

inline long double fiber(long double x, long double y, long double omega1, const Market& m) {
  return coupled_component(x, y, omega1, m);
}

/// Central difference of f at x with step h.
inline long double central_difference(const std::function<long double(long double)>& f,
                                      long double x, long double h) {
  return (f(x + h) - f(x - h)) / (2.0L * h);
}

/// Root of g on [a, b] by bisection; g(a), g(b) of opposite sign.
inline long double bisect(const std::function<long double(long double)>& g, long double a,
                          long double b, int iterations = 200) {
  long double ga = g(a);
  for (int k = 0; k < iterations; ++k) {
    const long double mid = 0.5L * (a + b);
    const long double gm = g(mid);
    if ((gm < 0) == (ga < 0)) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
    }
  }
  return 0.5L * (a + b);
}

/// Slope of T by the analytic quotient rule, written out independently:
/// T = u^(-1/2), u = w x^-2 + (1-w) A(x), T' = -1/2 u^(-3/2) u'.
inline long double T_prime(long double x, long double omega, const Market& m) {
  const long double gap = 1.0L + m.gamma - x;
  const long double c = m.gamma * m.gamma * m.alpha * m.alpha * m.sigma_eps_sq;
  const long double u = omega / (x * x) + (1.0L - omega) * c / (gap * gap);
  const long double du = -2.0L * omega / (x * x * x) + 2.0L * (1.0L - omega) * c / (gap * gap * gap);
  return -0.5L * du / (u * std::sqrt(u));
}

/// Fixed point of x -> fiber(x, c) by plain iteration.
inline long double constant_forcing_fixed_point(long double c, long double omega1,
                                                const Market& m, long double x0 = 50.0L,
                                                int iterations = 20000) {
  long double x = x0;
  for (int k = 0; k < iterations; ++k) x = fiber(x, c, omega1, m);
  return x;
}

/// AR(1) path r_s = phi r_{s-1} + e_s with e ~ N(0, var); r_0 drawn stationary.
inline std::vector<double> ar1_path(double phi, double var, std::size_t n, std::mt19937_64& rng,
                                    double* r_before) {
  std::normal_distribution<double> e(0.0, std::sqrt(var));
  std::normal_distribution<double> stat(0.0, std::sqrt(var / (1.0 - phi * phi)));
  double r = stat(rng);
  *r_before = r;
  std::vector<double> out(n);
  for (auto& v : out) {
    r = phi * r + e(rng);
    v = r;
  }
  return out;
}

}  // namespace oracle
