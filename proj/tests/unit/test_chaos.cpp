#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "dgpc/chaos.hpp"
#include "dgpc/driver.hpp"
#include "dgpc/hermite.hpp"
#include "oracle.hpp"

using dgpc::ChaosExpansion;
using dgpc::MultiIndex;
using dgpc::MultiIndexSet;

namespace {

dgpc::BasisProducts xi_products(std::size_t K, int N) {
  return {dgpc::cached_xi_tensor(K, N), std::make_shared<dgpc::TripleTensor>(dgpc::TripleTensor::constant_only())};
}

ChaosExpansion linear(const dgpc::BasisProducts& p, const MultiIndexSet& s, std::vector<double> a) {
  ChaosExpansion u(p.xi_size(), 1);
  u(0, 0) = a[0];
  for (std::size_t d = 1; d < a.size(); ++d) u(s.unit_rank(d - 1), 0) = a[d];
  return u;
}

ChaosExpansion random_expansion(const dgpc::BasisProducts& p, const MultiIndexSet& s, int max_deg,
                                std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  ChaosExpansion u(p.xi_size(), 1);
  for (std::size_t r = 0; r < s.size(); ++r)
    if (s[r].degree() <= max_deg) u(r, 0) = c(rng);
  return u;
}

// T_alpha at a point of xi, from the independent Hermite oracle.
double wick(const MultiIndex& a, const std::vector<double>& x) {
  double v = 1.0;
  for (std::size_t d = 0; d < a.dim(); ++d) v *= oracle::hermite(a[d], x[d]);
  return v;
}

}  // namespace

TEST_CASE("constant one is the multiplicative identity") {
  const auto p = xi_products(2, 3);
  const MultiIndexSet s(2, 3);
  std::mt19937_64 rng(1);
  const auto u = random_expansion(p, s, 3, rng);
  const auto one = ChaosExpansion::constant(1.0, p.xi_size(), 1);
  CHECK(dgpc::multiply(u, one, p) == u);
  CHECK(dgpc::multiply(one, u, p) == u);
}

TEST_CASE("square of xi") {
  const auto p = xi_products(1, 2);
  const MultiIndexSet s(1, 2);
  const auto x = linear(p, s, {0.0, 1.0});
  const auto sq = dgpc::multiply(x, x, p);
  CHECK(sq(0, 0) == doctest::Approx(1.0));
  CHECK(sq(1, 0) == 0.0);
  CHECK(sq(2, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  const auto p4 = xi_products(1, 4);
  const auto sq4 = dgpc::power(linear(p4, MultiIndexSet(1, 4), {0.0, 1.0}), 2, p4);
  CHECK(sq4(0, 0) == doctest::Approx(1.0));
  CHECK(sq4(2, 0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(sq4(3, 0) == 0.0);
  CHECK(sq4(4, 0) == 0.0);
}

TEST_CASE("gaussian algebra of linear expansions") {
  const auto p = xi_products(1, 3);
  const MultiIndexSet s(1, 3);
  const double mu = 0.7, sg = 1.3;
  const auto a = linear(p, s, {mu, sg});
  const auto b = linear(p, s, {mu, -sg});
  CHECK(dgpc::multiply(a, b, p).mean() == doctest::Approx(mu * mu - sg * sg).epsilon(1e-14));
  CHECK(dgpc::power(a, 3, p).mean() == doctest::Approx(mu * mu * mu + 3 * mu * sg * sg).epsilon(1e-14));
  CHECK(dgpc::raw_moment(a, 2, p) == doctest::Approx(mu * mu + sg * sg).epsilon(1e-14));
  const auto c = ChaosExpansion::constant(1.5, p.xi_size(), 1);
  const auto c4 = dgpc::power(c, 4, p);
  CHECK(c4.mean() == doctest::Approx(std::pow(1.5, 4)).epsilon(1e-14));
  for (std::size_t r = 1; r < c4.size(); ++r) CHECK(c4.coeffs()[r] == 0.0);
  CHECK(dgpc::power(a, 1, p) == a);

  const auto p4 = xi_products(1, 4);
  const auto x = linear(p4, MultiIndexSet(1, 4), {0.0, 1.0});
  CHECK(dgpc::raw_moment(x, 4, p4) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(dgpc::raw_moment(x, 3, p4) == 0.0);
}

TEST_CASE("galerkin product agrees with a quadrature projection") {
  // products of degree <= N stay in the basis, so projection is exact
  const std::size_t K = 2;
  const int N = 4;
  const auto p = xi_products(K, N);
  const MultiIndexSet s(K, N);
  std::mt19937_64 rng(7);
  const auto g = dgpc::gauss_hermite_rule(N + 2);
  for (int trial = 0; trial < 5; ++trial) {
    const auto u = random_expansion(p, s, 1, rng);
    const auto v = random_expansion(p, s, trial < 3 ? 1 : 3, rng);
    const auto uv = dgpc::multiply(u, v, p);
    std::vector<double> proj(s.size(), 0.0);
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
      for (std::size_t j = 0; j < g.nodes.size(); ++j) {
        const std::vector<double> x{g.nodes[i], g.nodes[j]};
        double uu = 0.0, vv = 0.0;
        for (std::size_t r = 0; r < s.size(); ++r) {
          const double t = wick(s[r], x);
          uu += u(r, 0) * t;
          vv += v(r, 0) * t;
        }
        for (std::size_t r = 0; r < s.size(); ++r)
          proj[r] += g.weights[i] * g.weights[j] * uu * vv * wick(s[r], x);
      }
    for (std::size_t r = 0; r < s.size(); ++r) CHECK(std::abs(uv(r, 0) - proj[r]) < 1e-10);
  }
}

TEST_CASE("product is commutative and linear") {
  const auto p = xi_products(3, 3);
  const MultiIndexSet s(3, 3);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = random_expansion(p, s, 3, rng);
    const auto v = random_expansion(p, s, 3, rng);
    const auto w = random_expansion(p, s, 3, rng);
    const auto uv = dgpc::multiply(u, v, p);
    CHECK(uv == dgpc::multiply(v, u, p));
    CHECK(dgpc::multiply(2.0 * u, v, p) == 2.0 * uv);
    CHECK(dgpc::multiply(u, 0.5 * v, p) == 0.5 * uv);
    const auto lhs = dgpc::multiply(u + w, v, p);
    const auto rhs = uv + dgpc::multiply(w, v, p);
    for (std::size_t r = 0; r < lhs.size(); ++r) CHECK(std::abs(lhs.coeffs()[r] - rhs.coeffs()[r]) < 1e-13);
  }
}

TEST_CASE("moments of linear expansions are gaussian") {
  const int N = 6;
  const auto p = xi_products(2, N);
  const MultiIndexSet s(2, N);
  const double a[3] = {0.4, 0.8, -0.6};
  const auto u = linear(p, s, {a[0], a[1], a[2]});
  const double zero[3] = {1.0, 0.0, 0.0};

  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n01;
  const std::size_t M = 1'000'000;
  std::vector<double> sum(N + 1, 0.0), sum2(N + 1, 0.0);
  for (std::size_t i = 0; i < M; ++i) {
    const double x = a[0] + a[1] * n01(rng) + a[2] * n01(rng);
    double pw = 1.0;
    for (int m = 0; m <= N; ++m) {
      sum[m] += pw;
      sum2[m] += pw * pw;
      pw *= x;
    }
  }
  for (int m = 1; m <= N; ++m) {
    const double exact = oracle::linear_pair_moment(a, zero, m, 0);
    const double got = dgpc::raw_moment(u, m, p);
    CHECK(got == doctest::Approx(exact).epsilon(1e-12));
    const double mean = sum[m] / M;
    const double se = std::sqrt((sum2[m] / M - mean * mean) / M);
    CHECK(std::abs(got - mean) < 3.0 * se);
  }
}

TEST_CASE("mixed moments of a gaussian pair follow Isserlis") {
  const int N = 6;
  const auto p = xi_products(2, N);
  const MultiIndexSet s(2, N);
  const double a[3] = {0.3, 1.1, 0.4};
  const double b[3] = {-0.2, 0.5, -0.9};
  const std::vector<ChaosExpansion> comps{linear(p, s, {a[0], a[1], a[2]}), linear(p, s, {b[0], b[1], b[2]})};
  const auto projected = dgpc::mixed_moments(comps, 6, p);
  const auto exact = dgpc::mixed_moments_xi_exact(comps, 6, s, *p.state);
  const dgpc::StateRule one{{1.0}, {{1.0}}};
  const auto quad = dgpc::mixed_moments_quadrature(comps, 6, s, one);
  REQUIRE(exact);
  REQUIRE(quad);
  const auto& idx = projected.index();
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const double ref = oracle::linear_pair_moment(a, b, idx[r][0], idx[r][1]);
    CHECK(std::abs(projected[r] - ref) < 1e-10 * std::max(1.0, std::abs(ref)));
    CHECK(std::abs((*exact)[r] - ref) < 1e-10 * std::max(1.0, std::abs(ref)));
    CHECK(std::abs((*quad)[r] - ref) < 1e-10 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("simple mixed moments") {
  const auto p = xi_products(2, 2);
  const MultiIndexSet s(2, 2);
  const auto x1 = linear(p, s, {0.0, 1.0, 0.0});
  const auto x2 = linear(p, s, {0.0, 0.0, 1.0});
  const auto t = dgpc::mixed_moments({x1, x2}, 4, p);
  CHECK(t.at({2, 2}) == doctest::Approx(1.0));
  const auto same = dgpc::mixed_moments({x1, x1}, 2, p);
  CHECK(same.at({1, 1}) == doctest::Approx(1.0));
  ChaosExpansion h2(p.xi_size(), 1);
  h2(s.rank(MultiIndex({2, 0})), 0) = 1.0;
  const auto m = dgpc::mixed_moments({x1, h2}, 3, p);
  CHECK(m.at({2, 1}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("exact xi integration recovers what projection truncates") {
  const auto p = xi_products(1, 2);
  const MultiIndexSet s(1, 2);
  ChaosExpansion h2(p.xi_size(), 1);
  h2(2, 0) = 1.0;
  const auto exact = dgpc::mixed_moments_xi_exact({h2}, 4, s, *p.state);
  REQUIRE(exact);
  const double ref = oracle::gaussian_expectation([](double x) { return std::pow(oracle::hermite(2, x), 4); });
  CHECK(ref == doctest::Approx(15.0));
  CHECK(exact->pure(0, 4) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(std::abs(dgpc::mixed_moments({h2}, 4, p).pure(0, 4) - 15.0) > 1.0);
  CHECK_FALSE(dgpc::mixed_moments_xi_exact({h2}, 4, s, *p.state, 2).has_value());
}

TEST_CASE("coefficient algebra") {
  ChaosExpansion u(2, 2, {1.0, 2.0, 3.0, 4.0});
  CHECK(u(1, 0) == 3.0);
  CHECK(u.second_moment() == doctest::Approx(30.0));
  CHECK(u.variance() == doctest::Approx(29.0));
  CHECK(dgpc::inner(u, u) == doctest::Approx(30.0));
  CHECK((u - u).second_moment() == 0.0);
}
