// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "dgpc/cli_io.hpp"
#include "dgpc/driver.hpp"
#include "dgpc/oracles.hpp"

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

char buf[512];

template <class... A>
std::string fmt(const char* f, A... a) {
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

dgpc::DgpcConfig baseline_of(const dgpc::RunConfig& cfg) {
  auto b = cfg.method;
  if (cfg.baseline) {
    if (cfg.baseline->K) b.K = cfg.baseline->K;
    if (cfg.baseline->N) b.N = cfg.baseline->N;
    if (cfg.baseline->L) b.L = cfg.baseline->L;
  }
  if (b.output_dt == 0.0) b.output_dt = cfg.method.delta_t();
  return b;
}

// Relative variance errors of component 0 against the exact statistics, t > 0.
std::vector<std::pair<double, double>> variance_errors(const dgpc::DgpcResult& r, const dgpc::SdeModel& m) {
  const auto t = r.times();
  const auto v = r.variance_trajectory(0);
  const auto ref = dgpc::exact_reference(m, t);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] > 0.0) out.push_back({t[i], std::abs(v[i] - ref->variance[0][i]) / ref->variance[0][i]});
  return out;
}

dgpc::SdeModel ou_model() {
  dgpc::SdeModel m;
  m.kind = dgpc::ModelKind::OU;
  m.b_u = 4.0;
  m.sigma_u = 2.0;
  m.initial = {dgpc::InitialLaw::point(1.0)};
  return m;
}

Outcome ou_invariant_variance() {
  const auto cfg = dgpc::load_preset("ex1");
  const auto r = dgpc::run_dgpc(cfg.method, cfg.model);
  const double exact = 0.5 * (1.0 - std::exp(-24.0));
  const double rel = std::abs(r.variance_trajectory(0).back() - exact) / exact;
  return {rel < 1e-3, fmt("var(3) = %.7f, relative error %.2e", r.variance_trajectory(0).back(), rel)};
}

Outcome k_convergence() {
  const auto m = ou_model();
  const std::vector<double> Ks{2, 4, 6, 8};
  std::string detail;
  bool pass = true;
  double hermite[2];
  int idx = 0;
  for (double T : {3.0, 15.0}) {
    const double exact = 0.5 * (1.0 - std::exp(-8.0 * T));
    std::vector<double> ed, eh;
    for (double K : Ks) {
      dgpc::DgpcConfig c;
      c.t_end = T;
      c.n_restarts = static_cast<int>(std::lround(T / 0.2));
      c.K = static_cast<int>(K);
      c.N = 1;
      c.L = 1;
      ed.push_back(std::abs(dgpc::run_dgpc(c, m).variance_trajectory(0).back() - exact));
      c.n_restarts = 1;
      eh.push_back(std::abs(dgpc::run_hermite_pc(c, m).variance_trajectory(0).back() - exact));
    }
    const double sd = fitted_slope(Ks, ed);
    hermite[idx++] = fitted_slope(Ks, eh);
    pass = pass && std::abs(sd + 3.0) <= 0.7;
    detail += fmt("t=%g: slope %.3f, Hermite %.3f; ", T, sd, hermite[idx - 1]);
  }
  pass = pass && hermite[1] - hermite[0] >= 0.5;
  return {pass, detail + fmt("Hermite degradation %.3f", hermite[1] - hermite[0])};
}

Outcome cubic_invariant() {
  const auto cfg = dgpc::load_preset("ex2");
  const auto r = dgpc::run_dgpc(cfg.method, cfg.model);
  const auto& k = r.final_record().cumulants.univariate[0];
  const auto fp = dgpc::invariant_cumulants_1d({0.0, -cfg.model.b_u, 0.0, -cfg.model.cubic}, cfg.model.sigma_u);
  const bool pass = std::abs(k[2] - fp[2]) <= 0.005 && std::abs(k[4] - fp[4]) <= 0.02 &&
                    std::abs(k[6] - fp[6]) <= 0.08 && std::abs(k[1]) < 5e-3 && std::abs(k[3]) < 5e-3 &&
                    std::abs(k[5]) < 5e-3;
  return {pass, fmt("k2 %.5f (%.5f), k4 %.5f (%.5f), k6 %.5f (%.5f), |k1|,|k3|,|k5| %.1e %.1e %.1e", k[2], fp[2],
                    k[4], fp[4], k[6], fp[6], std::abs(k[1]), std::abs(k[3]), std::abs(k[5]))};
}

Outcome random_damping() {
  const auto cfg = dgpc::load_preset("ex3");
  const auto r = dgpc::run_dgpc(cfg.method, cfg.model);
  const auto& k = r.final_record().cumulants.univariate[0];
  const auto fp = dgpc::averaged_ou_invariant(cfg.model.initial[1], cfg.model.sigma_u);
  const double l3 = std::log(3.0);
  const bool pass = std::abs(k[2] - l3) <= 0.01 && std::abs(k[4] - (4.0 - 3.0 * l3 * l3)) <= 0.02 &&
                    std::abs(fp[2] - 1.10) < 5e-3 && std::abs(fp[4] - 0.379) < 5e-4;
  return {pass, fmt("k2 %.6f (ln 3 = %.6f), k4 %.6f (%.6f)", k[2], l3, k[4], 4.0 - 3.0 * l3 * l3)};
}

Outcome restart_refinement() {
  const auto cfg = dgpc::load_preset("ex4");
  auto mc_cfg = dgpc::mc_config_of(cfg);
  const auto mc = dgpc::mc_simulate(cfg.model, mc_cfg);
  std::vector<double> avg;
  std::string detail;
  for (int n : {6, 10, 30}) {
    auto c = cfg.method;
    c.n_restarts = n;
    const auto r = dgpc::run_dgpc(c, cfg.model);
    const auto t = r.times();
    const auto v = r.variance_trajectory(0);
    double s = 0.0;
    int cnt = 0;
    for (const auto& p : mc.points) {
      if (p.time <= 0.0) continue;
      for (std::size_t i = 0; i < t.size(); ++i)
        if (std::abs(t[i] - p.time) < 1e-9) {
          s += std::abs(v[i] - p.variance[0]) / p.variance[0];
          ++cnt;
        }
    }
    avg.push_back(s / cnt);
    detail += fmt("dt %.3f: %.5f (%d points); ", cfg.method.t_end / n, avg.back(), cnt);
  }
  const bool pass = avg[0] > avg[1] && avg[1] > avg[2];
  return {pass, detail + "time-averaged eps_var"};
}

Outcome coupled_intermittent() {
  const auto cfg = dgpc::load_preset("ex5");
  const auto r = dgpc::run_dgpc(cfg.method, cfg.model);
  const auto b = dgpc::run_hermite_pc(baseline_of(cfg), cfg.model);
  const auto ed = variance_errors(r, cfg.model);
  const auto eb = variance_errors(b, cfg.model);
  std::vector<double> all;
  for (const auto& [t, e] : ed) all.push_back(e);
  const double med = median(all);
  std::vector<double> late;
  for (const auto& [t, e] : eb)
    if (t >= 3.0) late.push_back(e);
  const double base = median(late);
  const bool pass = med < 5e-3 && base > 10.0 * med;
  return {pass, fmt("time-median eps_var %.2e; baseline median for t >= 3: %.2e (%.0fx)", med, base, base / med)};
}

Outcome property_suites() {
  const auto start = std::chrono::steady_clock::now();
  const int status = std::system(DGPC_UNIT_TEST_PATH " --test-suite-exclude=slow > /dev/null 2>&1");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {status == 0 && secs < 60.0, fmt("unit property suites %s in %.1f s", status == 0 ? "passed" : "failed", secs)};
}

Outcome bursts_one(const std::string& name) {
  const auto cfg = dgpc::load_preset(name);
  const auto rec = dgpc::run_dgpc_records(cfg.method, cfg.model);
  double dk2 = 0.0, kv = 0.0, ku_min = 1e300, ku_max = -1e300;
  for (std::size_t j = 1; j < rec.size(); ++j) {
    if (rec[j].time < 8.0 - 1e-9) continue;
    dk2 = std::max(dk2, std::abs(rec[j].cumulants.univariate[0][2] - rec[j - 1].cumulants.univariate[0][2]));
    kv = std::max(kv, std::abs(rec[j].cumulants.kurtosis_excess[1]));
    ku_min = std::min(ku_min, rec[j].cumulants.kurtosis_excess[0]);
    ku_max = std::max(ku_max, rec[j].cumulants.kurtosis_excess[0]);
  }
  const bool settled = (ku_min > 0.1) || (ku_max < -0.1);
  return {dk2 < 1e-2 && kv <= 0.05 && settled,
          fmt("%s: max dk2(u) %.1e, max |kurt v| %.3f, kurt u in [%.3f, %.3f]", name.c_str(), dk2, kv, ku_min, ku_max)};
}

Outcome bursts() {
  const auto a = bursts_one("ex6");
  const auto b = bursts_one("ex7");
  return {a.pass && b.pass, a.detail + "; " + b.detail};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    double limit;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {1, "OU invariant variance", 5.0, ou_invariant_variance},
      {2, "K-convergence", 120.0, k_convergence},
      {3, "cubic invariant measure", 120.0, cubic_invariant},
      {4, "random damping", 300.0, random_damping},
      {5, "restart refinement", 300.0, restart_refinement},
      {6, "coupled intermittent system", 600.0, coupled_intermittent},
      {7, "property suites", 60.0, property_suites},
      {8, "intermittent bursts stationarity", 600.0, bursts},
  };
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < c.limit;
    failed += !pass;
    std::printf("criterion %d (%s): %s  %s [%.1f s of %.0f s]\n", c.id, c.name, pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs, c.limit);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
