#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/hermite.hpp>
#include <cmath>
#include <vector>

namespace oracle {

// E[f(x)] for x ~ N(0,1): composite Gauss-Legendre on [-14, 14].
template <class F>
double gaussian_expectation(F f) {
  const double c = 1.0 / std::sqrt(2.0 * M_PI);
  auto g = [&](double x) { return f(x) * c * std::exp(-0.5 * x * x); };
  double total = 0.0;
  for (int p = -14; p < 14; ++p)
    total += boost::math::quadrature::gauss<double, 30>::integrate(g, double(p), double(p + 1));
  return total;
}

// Normalized probabilists' Hermite polynomial from the physicists' family.
inline double hermite(int n, double x) {
  return std::pow(2.0, -0.5 * n) * boost::math::hermite(static_cast<unsigned>(n), x / std::sqrt(2.0)) /
         std::sqrt(boost::math::factorial<double>(static_cast<unsigned>(n)));
}

// E[x^k] for x ~ N(0,1).
inline double gaussian_moment(int k) {
  if (k % 2) return 0.0;
  double m = 1.0;
  for (int j = k - 1; j > 0; j -= 2) m *= j;
  return m;
}

inline double binom(int n, int k) { return boost::math::binomial_coefficient<double>(n, k); }

// E[X^i Y^j] with X = a0 + a1 x1 + a2 x2, Y = b0 + b1 x1 + b2 x2 and x1, x2
// independent standard normals, by full multinomial expansion.
inline double linear_pair_moment(const double a[3], const double b[3], int i, int j) {
  double total = 0.0;
  for (int p0 = 0; p0 <= i; ++p0)
    for (int p1 = 0; p0 + p1 <= i; ++p1) {
      const int p2 = i - p0 - p1;
      const double ca = binom(i, p0) * binom(i - p0, p1) * std::pow(a[0], p0) * std::pow(a[1], p1) *
                        std::pow(a[2], p2);
      for (int q0 = 0; q0 <= j; ++q0)
        for (int q1 = 0; q0 + q1 <= j; ++q1) {
          const int q2 = j - q0 - q1;
          const double cb = binom(j, q0) * binom(j - q0, q1) * std::pow(b[0], q0) *
                            std::pow(b[1], q1) * std::pow(b[2], q2);
          total += ca * cb * gaussian_moment(p1 + q1) * gaussian_moment(p2 + q2);
        }
    }
  return total;
}

// Raw moments m_0..m_n of N(mu, var).
inline std::vector<double> normal_moments(double mu, double var, int n) {
  std::vector<double> m(n + 1, 0.0);
  const double s = std::sqrt(var);
  for (int k = 0; k <= n; ++k)
    for (int p = 0; p <= k; ++p) m[k] += binom(k, p) * std::pow(mu, k - p) * std::pow(s, p) * gaussian_moment(p);
  return m;
}

// Raw moments of U(lo, hi).
inline std::vector<double> uniform_moments(double lo, double hi, int n) {
  std::vector<double> m(n + 1);
  for (int k = 0; k <= n; ++k) m[k] = (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / ((k + 1) * (hi - lo));
  return m;
}

}  // namespace oracle
