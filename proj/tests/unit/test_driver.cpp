#include <doctest.h>

#include <cmath>

#include "dgpc/driver.hpp"
#include "dgpc/errors.hpp"
#include "dgpc/oracles.hpp"

using dgpc::DgpcConfig;
using dgpc::InitialLaw;
using dgpc::ModelKind;
using dgpc::MomentMethod;
using dgpc::SdeModel;

namespace {

SdeModel ou(double b, double sigma, InitialLaw u0) {
  SdeModel m;
  m.kind = ModelKind::OU;
  m.b_u = b;
  m.sigma_u = sigma;
  m.initial = {u0};
  return m;
}

DgpcConfig method(double t_end, int n, int K, int N, int L) {
  DgpcConfig c;
  c.t_end = t_end;
  c.n_restarts = n;
  c.K = K;
  c.N = N;
  c.L = L;
  return c;
}

SdeModel cubic() {
  SdeModel m;
  m.kind = ModelKind::CubicOU;
  m.b_u = 1.0;
  m.cubic = 1.0;
  m.sigma_u = 2.0;
  m.initial = {InitialLaw::point(1.0)};
  return m;
}

SdeModel coupled() {
  SdeModel m;
  m.kind = ModelKind::CoupledSystem;
  m.b_u = 1.2;
  m.b_v = 0.5;
  m.a_u = 1.0;
  m.a_v = 0.03;
  m.sigma_u = 0.5;
  m.sigma_v = 0.5;
  m.forcing = {1.0, 1.1, 0.5, {}};
  m.initial = {InitialLaw::gaussian(1.0, 0.026), InitialLaw::gaussian(0.0, 0.0625)};
  return m;
}

SdeModel random_damping() {
  SdeModel m;
  m.kind = ModelKind::RandomDampingOU;
  m.sigma_u = 2.0;
  m.initial = {InitialLaw::gaussian(1.0, 0.04), InitialLaw::uniform(1.0, 3.0)};
  return m;
}

SdeModel squared_wiener() {
  SdeModel m;
  m.kind = ModelKind::SquaredWienerForcing;
  m.b_u = 6.0;
  m.sigma_u = 1.0;
  m.initial = {InitialLaw::point(1.0), InitialLaw::point(0.0)};
  return m;
}

void check_projection_consistency(const DgpcConfig& c, const SdeModel& m) {
  const auto records = dgpc::run_dgpc_records(c, m);
  REQUIRE(records.size() == static_cast<std::size_t>(c.n_restarts) + 1);
  for (const auto& r : records) {
    CHECK(r.reinit_mean_error < 1e-10);
    CHECK(r.reinit_variance_error < 1e-10);
  }
}

double endpoint_error(int K) {
  auto c = method(3.0, 15, K, 1, 1);
  const auto r = dgpc::run_dgpc(c, ou(4.0, 2.0, InitialLaw::point(1.0)));
  return std::abs(r.variance_trajectory(0).back() - 0.5 * (1 - std::exp(-24.0)));
}

}  // namespace

TEST_CASE("configuration checks") {
  auto c = method(1.0, 0, 1, 1, 1);
  CHECK_THROWS_AS(c.validate(), dgpc::ConfigError);
  c = method(1.0, 4, 2, 2, 2);
  CHECK(c.delta_t() == 0.25);
  CHECK(c.restart_time(2) == 0.5);
  CHECK(c.moment_order() == 6);
  c.L = 4;
  CHECK(c.moment_order() == 12);
  CHECK(dgpc::parse_moment_method("quadrature") == MomentMethod::Quadrature);
  CHECK(std::string(dgpc::moment_method_name(MomentMethod::XiQuadrature)) == "xi_quadrature");
  CHECK_THROWS_AS(dgpc::parse_moment_method("simpson"), dgpc::ConfigError);
}

TEST_CASE("initial moment table") {
  const auto t = dgpc::initial_moment_table({InitialLaw::gaussian(1.0, 0.04), InitialLaw::uniform(1.0, 3.0)}, 4);
  CHECK(t.at({4, 0}) == doctest::Approx(1.2448));
  CHECK(t.at({0, 2}) == doctest::Approx(13.0 / 3));
  CHECK(t.at({1, 1}) == doctest::Approx(2.0));
}

TEST_CASE("OU variance after restarts") {
  const auto r = dgpc::run_dgpc(method(3.0, 15, 8, 1, 1), ou(4.0, 2.0, InitialLaw::point(1.0)));
  const double exact = 0.5 * (1 - std::exp(-24.0));
  CHECK(std::abs(r.variance_trajectory(0).back() - exact) < 1e-3 * exact);
  CHECK(r.mean_trajectory(0).back() == doctest::Approx(std::exp(-12.0)).epsilon(1e-6));
  CHECK(r.records.size() == 16);
}

TEST_CASE("endpoint error decreases with K") {
  CHECK(endpoint_error(8) * 4.0 < endpoint_error(4));
}

TEST_CASE("variance is accurate only at restart times") {
  auto c = method(3.0, 15, 8, 1, 1);
  c.output_dt = 0.05;
  const auto m = ou(4.0, 2.0, InitialLaw::point(1.0));
  const auto r = dgpc::run_dgpc(c, m);
  const auto t = r.times();
  const auto v = r.variance_trajectory(0);
  double mid = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (std::abs(t[i] - 1.5) < 1e-9) mid = std::abs(v[i] - dgpc::ou_exact(4, 2, m.initial[0], 1.5).variance);
  const double end = std::abs(v.back() - dgpc::ou_exact(4, 2, m.initial[0], 3.0).variance);
  CHECK(mid > end);
  CHECK(v[0] == 0.0);
}

TEST_CASE("deterministic model follows the ODE") {
  auto m = ou(2.0, 0.0, InitialLaw::point(1.0));
  m.forcing.c0 = 1.0;
  const auto r = dgpc::run_dgpc(method(2.0, 4, 2, 2, 2), m);
  for (const auto& s : r.samples) {
    CHECK(s.mean[0] == doctest::Approx(0.5 + 0.5 * std::exp(-2.0 * s.time)).epsilon(1e-10));
    CHECK(s.variance[0] == 0.0);
  }
}

TEST_CASE("single interval agrees with the Hermite expansion") {
  const auto m = ou(1.5, 0.8, InitialLaw::gaussian(0.4, 0.3));
  const auto c = method(1.0, 1, 3, 2, 2);
  const auto a = dgpc::run_dgpc(c, m).final_record();
  const auto b = dgpc::run_hermite_pc(c, m).final_record();
  REQUIRE(a.coefficients.size() == 1);
  REQUIRE(b.coefficients.size() == 1);
  REQUIRE(a.coefficients[0].size() == b.coefficients[0].size());
  for (std::size_t i = 0; i < a.coefficients[0].size(); ++i)
    CHECK(std::abs(a.coefficients[0].coeffs()[i] - b.coefficients[0].coeffs()[i]) < 1e-12);
}

TEST_CASE("restarts preserve mean and variance") {
  check_projection_consistency(method(1.0, 5, 3, 2, 1), ou(4.0, 2.0, InitialLaw::gaussian(1.0, 0.2)));
  check_projection_consistency(method(2.0, 8, 5, 2, 4), cubic());
  check_projection_consistency(method(1.0, 5, 4, 3, 4), random_damping());
  check_projection_consistency(method(1.0, 5, 4, 2, 2), coupled());
  check_projection_consistency(method(1.0, 5, 5, 2, 2), squared_wiener());
  for (auto mm : {MomentMethod::Projected, MomentMethod::XiQuadrature, MomentMethod::Quadrature}) {
    auto c = method(1.0, 4, 5, 2, 3);
    c.moment_method = mm;
    check_projection_consistency(c, cubic());
  }
}

TEST_CASE("moment method selection") {
  auto c = method(1.0, 4, 5, 2, 3);
  c.moment_method = MomentMethod::Quadrature;
  const auto q = dgpc::run_dgpc_records(c, cubic());
  for (std::size_t j = 1; j < q.size(); ++j) CHECK(q[j].moment_method == MomentMethod::Quadrature);
  c.moment_method = MomentMethod::Auto;
  c.quadrature_budget = 1;
  const auto p = dgpc::run_dgpc_records(c, cubic());
  for (std::size_t j = 1; j < p.size(); ++j) CHECK(p[j].moment_method == MomentMethod::Projected);
  c.moment_method = MomentMethod::XiQuadrature;
  CHECK_THROWS_AS(dgpc::run_dgpc_records(c, cubic()), dgpc::InvalidArgument);
}

TEST_CASE("cubic cumulants become stationary") {
  const auto records = dgpc::run_dgpc_records(method(4.0, 16, 5, 2, 4), cubic());
  for (std::size_t j = 1; j < records.size(); ++j) {
    if (records[j].time < 3.0 - 1e-12) continue;
    CHECK(std::abs(records[j].cumulants.univariate[0][2] - records[j - 1].cumulants.univariate[0][2]) < 1e-3);
  }
  const auto& k = records.back().cumulants.univariate[0];
  CHECK(std::abs(k[2] - 0.7319) < 5e-3);
  CHECK(std::abs(k[1]) < 5e-3);
  CHECK(std::abs(k[3]) < 5e-3);
}
