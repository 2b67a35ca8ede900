#include <doctest.h>

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <memory>
#include <random>

#include "dgpc/driver.hpp"
#include "dgpc/errors.hpp"
#include "dgpc/sde.hpp"

using dgpc::ModelKind;
using dgpc::SdeModel;

namespace {

dgpc::BasisProducts xi_products(std::size_t K, int N) {
  return {dgpc::cached_xi_tensor(K, N), std::make_shared<dgpc::TripleTensor>(dgpc::TripleTensor::constant_only())};
}

SdeModel ou(double b, double sigma, double u0) {
  SdeModel m;
  m.kind = ModelKind::OU;
  m.b_u = b;
  m.sigma_u = sigma;
  m.initial = {dgpc::InitialLaw::point(u0)};
  return m;
}

std::vector<double> random_state(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  std::vector<double> y(n);
  for (auto& v : y) v = c(rng);
  return y;
}

}  // namespace

TEST_CASE("model validation") {
  auto m = ou(4.0, 2.0, 1.0);
  CHECK_NOTHROW(m.validate());
  m.b_u = -1.0;
  CHECK_THROWS_AS(m.validate(), dgpc::ConfigError);
  SdeModel c;
  c.kind = ModelKind::CoupledSystem;
  c.b_v = -1.0;
  c.initial = {dgpc::InitialLaw::point(0), dgpc::InitialLaw::point(0)};
  try {
    c.validate();
    FAIL("expected a ConfigError");
  } catch (const dgpc::ConfigError& e) {
    CHECK(std::string(e.what()).find("damping must be positive") != std::string::npos);
  }
}

TEST_CASE("initial laws") {
  const auto g = dgpc::InitialLaw::gaussian(1.0, 0.04);
  const double expect[] = {1.0, 1.0, 1.04, 1.12, 1.2448};
  for (int k = 0; k <= 4; ++k) CHECK(g.raw_moment(k) == doctest::Approx(expect[k]).epsilon(1e-14));
  CHECK(dgpc::InitialLaw::uniform(1.0, 3.0).raw_moment(2) == doctest::Approx(13.0 / 3));
  const auto p = dgpc::InitialLaw::point(1.7);
  for (int k = 0; k <= 6; ++k) CHECK(p.raw_moment(k) == doctest::Approx(std::pow(1.7, k)));
  CHECK(p.deterministic());
  CHECK(dgpc::InitialLaw::uniform(-1, 1).standardized_moment(4) == doctest::Approx(9.0 / 5));
}

TEST_CASE("OU mean equation") {
  auto m = ou(4.0, 2.0, 1.0);
  m.forcing.c0 = 0.3;
  m.forcing.c1 = 0.2;
  const dgpc::MultiIndexSet s(3, 2);
  const auto sys = dgpc::assemble(m, s, xi_products(3, 2), dgpc::ForcingBasis(0.0, 0.2, {3}));
  const auto y = random_state(sys.total_size(), 1);
  std::vector<double> dy(y.size());
  sys.rhs(0.05, y, dy);
  CHECK(dy[0] == doctest::Approx(-4.0 * y[0] + m.forcing(0.05)).epsilon(1e-14));
  CHECK(dy[s.unit_rank(1)] == doctest::Approx(-4.0 * y[s.unit_rank(1)] + 2.0 * std::sqrt(2.0 / 0.2) * std::cos(M_PI * 0.25)));
  CHECK(dy[s.rank(dgpc::MultiIndex({1, 1, 0}))] == doctest::Approx(-4.0 * y[s.rank(dgpc::MultiIndex({1, 1, 0}))]));
}

TEST_CASE("uncoupled system splits into two OU processes") {
  SdeModel c;
  c.kind = ModelKind::CoupledSystem;
  c.b_u = 1.4;
  c.b_v = 0.7;
  c.forcing.c0 = 0.5;
  c.initial = {dgpc::InitialLaw::point(1), dgpc::InitialLaw::point(0)};
  const dgpc::MultiIndexSet s(4, 2);
  const auto p = xi_products(4, 2);
  const auto cs = dgpc::assemble(c, s, p, dgpc::ForcingBasis(0.0, 0.1, {2, 2}));
  auto u = ou(1.4, 0.0, 1.0);
  u.forcing.c0 = 0.5;
  const auto us = dgpc::assemble(u, s, p, dgpc::ForcingBasis(0.0, 0.1, {4}));
  const auto vs = dgpc::assemble(ou(0.7, 0.0, 0.0), s, p, dgpc::ForcingBasis(0.0, 0.1, {4}));
  const auto y = random_state(cs.total_size(), 2);
  const std::size_t m = cs.coefficient_count();
  std::vector<double> dy(y.size()), du(m), dv(m);
  cs.rhs(0.03, y, dy);
  us.rhs(0.03, std::span(y).subspan(0, m), du);
  vs.rhs(0.03, std::span(y).subspan(m, m), dv);
  for (std::size_t i = 0; i < m; ++i) {
    CHECK(dy[i] == du[i]);
    CHECK(dy[m + i] == dv[i]);
  }

  // noise of each component lands on its own process' coordinates
  c.sigma_u = 0.5;
  c.sigma_v = 2.0;
  const dgpc::ForcingBasis fb(0.0, 0.1, {2, 2});
  const auto ns = dgpc::assemble(c, s, p, fb);
  std::vector<double> dn(y.size());
  ns.rhs(0.03, y, dn);
  for (std::size_t k = 0; k < 4; ++k) {
    const std::size_t r = s.unit_rank(k);
    const double mu = k < 2 ? 0.5 * fb.basis_function(int(k) + 1, 0.03) : 0.0;
    const double mv = k >= 2 ? 2.0 * fb.basis_function(int(k) - 1, 0.03) : 0.0;
    CHECK(dn[r] - dy[r] == doctest::Approx(mu).scale(1.0));
    CHECK(dn[m + r] - dy[m + r] == doctest::Approx(mv).scale(1.0));
  }
}

TEST_CASE("cubic drift keeps the mean of a symmetric state at zero") {
  SdeModel m;
  m.kind = ModelKind::CubicOU;
  m.b_u = 1.0;
  m.cubic = 1.0;
  m.sigma_u = 0.0;
  m.initial = {dgpc::InitialLaw::point(0.0)};
  const dgpc::MultiIndexSet s(2, 3);
  const auto sys = dgpc::assemble(m, s, xi_products(2, 3), dgpc::ForcingBasis(0.0, 1.0, {2}));
  std::vector<double> y(sys.total_size(), 0.0);
  auto rng = random_state(s.size(), 3);
  for (std::size_t r = 0; r < s.size(); ++r)
    if (s[r].degree() % 2 == 1) y[r] = rng[r];
  std::vector<double> dy(y.size());
  sys.rhs(0.5, y, dy);
  CHECK(dy[0] == 0.0);
  for (std::size_t r = 0; r < s.size(); ++r)
    if (s[r].degree() % 2 == 0) CHECK(std::abs(dy[r]) < 1e-15);
}

TEST_CASE("runge-kutta integration") {
  const dgpc::RhsFunction zero = [](double, std::span<const double>, std::span<double> d) {
    std::fill(d.begin(), d.end(), 0.0);
  };
  const std::vector<double> y0{1.0, -2.0, 3.5};
  CHECK(dgpc::integrate_ode(zero, y0, 0.0, 1.0, 0.1, 4) == y0);

  const dgpc::RhsFunction decay = [](double, std::span<const double> y, std::span<double> d) { d[0] = -y[0]; };
  CHECK(std::abs(dgpc::integrate_ode(decay, {1.0}, 0.0, 1.0, 0.01, 4)[0] - std::exp(-1.0)) < 1e-9);
  CHECK_THROWS_AS(dgpc::integrate_ode(decay, {1.0}, 0.0, 1.0, 0.01, 3), dgpc::InvalidArgument);

  // OU mean over a full Galerkin system
  const auto m = ou(4.0, 2.0, 1.0);
  const dgpc::MultiIndexSet s(3, 1);
  const auto sys = dgpc::assemble(m, s, xi_products(3, 1), dgpc::ForcingBasis(0.0, 3.0, {3}));
  std::vector<double> c0(sys.total_size(), 0.0);
  c0[0] = 1.0;
  const auto c = dgpc::integrate(sys, c0, 0.0, 3.0, 1e-3, 4);
  CHECK(c[0] == doctest::Approx(std::exp(-12.0)).epsilon(1e-10));
}

TEST_CASE("runge-kutta empirical order") {
  // OU mean with forcing: u' = -b u + c1 cos(2t + 1), closed form below
  auto m = ou(4.0, 0.0, 1.0);
  m.forcing.c1 = 1.0;
  const double b = 4.0, T = 3.0;
  auto exact = [&](double t) {
    // particular solution A cos(2t+1) + B sin(2t+1)
    const double A = b / (b * b + 4.0), B = 2.0 / (b * b + 4.0);
    const double p0 = A * std::cos(1.0) + B * std::sin(1.0);
    return (1.0 - p0) * std::exp(-b * t) + A * std::cos(2 * t + 1) + B * std::sin(2 * t + 1);
  };
  const dgpc::MultiIndexSet s(1, 1);
  const auto sys = dgpc::assemble(m, s, xi_products(1, 1), dgpc::ForcingBasis(0.0, T, {1}));
  std::vector<double> hs, errs;
  for (double h : {1e-1, 5e-2, 2.5e-2}) {
    const auto c = dgpc::integrate(sys, {1.0, 0.0}, 0.0, T, h, 4);
    hs.push_back(h);
    errs.push_back(std::abs(c[0] - exact(T)));
  }
  for (std::size_t i = 1; i < hs.size(); ++i) CHECK(std::log(errs[i - 1] / errs[i]) / std::log(2.0) >= 3.8);
  std::vector<double> oh;
  for (double h : {1e-2, 5e-3, 2.5e-3}) {
    auto mo = ou(4.0, 0.0, 1.0);
    const auto so = dgpc::assemble(mo, s, xi_products(1, 1), dgpc::ForcingBasis(0.0, T, {1}));
    oh.push_back(std::abs(dgpc::integrate(so, {1.0, 0.0}, 0.0, T, h, 4)[0] / std::exp(-12.0) - 1.0));
  }
  for (std::size_t i = 1; i < oh.size(); ++i) CHECK(std::log(oh[i - 1] / oh[i]) / std::log(2.0) >= 3.8);
  // Heun is second order
  const auto c2a = dgpc::integrate(sys, {1.0, 0.0}, 0.0, T, 0.02, 2);
  const auto c2b = dgpc::integrate(sys, {1.0, 0.0}, 0.0, T, 0.01, 2);
  const double r = std::log(std::abs(c2a[0] - exact(T)) / std::abs(c2b[0] - exact(T))) / std::log(2.0);
  CHECK(r == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("OU Galerkin system is linear without forcing") {
  const auto m = ou(2.0, 0.0, 0.0);
  const dgpc::MultiIndexSet s(2, 3);
  const auto sys = dgpc::assemble(m, s, xi_products(2, 3), dgpc::ForcingBasis(0.0, 1.0, {2}));
  const auto y = random_state(sys.total_size(), 4);
  std::vector<double> y2(y);
  for (auto& v : y2) v *= 2.0;
  auto a = dgpc::integrate(sys, y, 0.0, 1.0, 0.01, 4);
  const auto b = dgpc::integrate(sys, y2, 0.0, 1.0, 0.01, 4);
  for (auto& v : a) v *= 2.0;
  CHECK(a == b);
}

TEST_CASE("deterministic coupled system stays at the zero index") {
  SdeModel c;
  c.kind = ModelKind::CoupledSystem;
  c.b_u = 1.2;
  c.b_v = 0.5;
  c.a_u = 1.0;
  c.a_v = 0.3;
  c.forcing = {1.0, 1.1, 0.5, {}};
  c.initial = {dgpc::InitialLaw::point(1.0), dgpc::InitialLaw::point(0.8)};
  const dgpc::MultiIndexSet s(4, 2);
  const auto sys = dgpc::assemble(c, s, xi_products(4, 2), dgpc::ForcingBasis(0.0, 2.0, {2, 2}));
  std::vector<double> y0(sys.total_size(), 0.0);
  const std::size_t m = sys.coefficient_count();
  y0[0] = 1.0;
  y0[m] = 0.8;
  const auto y = dgpc::integrate(sys, y0, 0.0, 2.0, 1e-3, 4);
  for (std::size_t i = 0; i < y.size(); ++i)
    if (i != 0 && i != m) CHECK(y[i] == 0.0);

  using state = std::vector<double>;
  state x{1.0, 0.8};
  auto f = [&](const state& z, state& dz, double t) {
    dz[0] = -(c.b_u + c.a_u * z[1]) * z[0] + c.forcing(t);
    dz[1] = -(c.b_v + c.a_v * z[0]) * z[1];
  };
  boost::numeric::odeint::integrate_adaptive(
      boost::numeric::odeint::make_controlled<boost::numeric::odeint::runge_kutta_dopri5<state>>(1e-12, 1e-12), f, x,
      0.0, 2.0, 1e-3);
  CHECK(y[0] == doctest::Approx(x[0]).epsilon(1e-9));
  CHECK(y[m] == doctest::Approx(x[1]).epsilon(1e-9));
}
