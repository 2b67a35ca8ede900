#include "dgpc/driver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "dgpc/errors.hpp"
#include "dgpc/forcing.hpp"
#include "dgpc/hermite.hpp"
#include "dgpc/orthogonalization.hpp"

namespace dgpc {

void DgpcConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(t_end > 0.0 && std::isfinite(t_end), "t_end must be positive");
  require(n_restarts >= 1, "n_restarts must be >= 1");
  require(K >= 1, "K must be >= 1");
  require(N >= 1, "N must be >= 1");
  require(L >= 1, "L must be >= 1");
  require(order == 2 || order == 4, "integrator order must be 2 or 4");
  require(h > 0.0, "integration step h must be positive");
  require(output_dt >= 0.0, "output_dt must be non-negative");
  require(quadrature_budget >= 1, "quadrature_budget must be >= 1");
}

const char* moment_method_name(MomentMethod m) {
  switch (m) {
    case MomentMethod::Auto: return "auto";
    case MomentMethod::Projected: return "projected";
    case MomentMethod::XiQuadrature: return "xi_quadrature";
    case MomentMethod::Quadrature: return "quadrature";
  }
  return "auto";
}

MomentMethod parse_moment_method(const std::string& name) {
  if (name == "auto") return MomentMethod::Auto;
  if (name == "projected") return MomentMethod::Projected;
  if (name == "xi_quadrature") return MomentMethod::XiQuadrature;
  if (name == "quadrature") return MomentMethod::Quadrature;
  throw ConfigError("unknown moment method '" + name + "'");
}

std::vector<double> DgpcResult::times() const {
  std::vector<double> t;
  for (const auto& s : samples) t.push_back(s.time);
  return t;
}

std::vector<double> DgpcResult::mean_trajectory(std::size_t c) const {
  std::vector<double> out;
  for (const auto& s : samples) out.push_back(s.mean.at(c));
  return out;
}

std::vector<double> DgpcResult::variance_trajectory(std::size_t c) const {
  std::vector<double> out;
  for (const auto& s : samples) out.push_back(s.variance.at(c));
  return out;
}

MomentTable initial_moment_table(const std::vector<InitialLaw>& laws, int order) {
  std::vector<std::vector<double>> marginals;
  for (const auto& law : laws) {
    std::vector<double> m(static_cast<std::size_t>(order) + 1);
    for (int k = 0; k <= order; ++k) m[k] = law.raw_moment(k);
    marginals.push_back(std::move(m));
  }
  return independent_moment_table(marginals, order);
}

std::shared_ptr<const TripleTensor> cached_xi_tensor(std::size_t K, int N) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, int>, std::shared_ptr<const TripleTensor>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{K, N}];
  if (!slot) slot = std::make_shared<const TripleTensor>(build_xi_triple_tensor(MultiIndexSet(K, N)));
  return slot;
}

namespace {

bool is_active(double mean, double var) { return var > 1e-24 * std::max(1.0, mean * mean); }

std::string time_label(double t) {
  std::ostringstream os;
  os.precision(10);
  os << "t_j = " << t;
  return os.str();
}

// Moments and affine data of the state at a restart time.
struct Snapshot {
  std::vector<double> mean, var, stddev;
  std::vector<bool> active;
  MomentTable standardized;  // active components only
  MomentMethod method = MomentMethod::Projected;

  std::size_t active_count() const { return static_cast<std::size_t>(std::count(active.begin(), active.end(), true)); }
};

Snapshot snapshot_from_laws(const SdeModel& model, int order) {
  Snapshot s;
  std::vector<std::vector<double>> marginals;
  for (const auto& law : model.initial) {
    s.mean.push_back(law.mean());
    s.var.push_back(law.variance());
    s.stddev.push_back(std::sqrt(law.variance()));
    s.active.push_back(!law.deterministic());
    if (law.deterministic()) continue;
    std::vector<double> m(static_cast<std::size_t>(order) + 1);
    for (int k = 0; k <= order; ++k) m[k] = law.standardized_moment(k);
    marginals.push_back(std::move(m));
  }
  if (!marginals.empty()) s.standardized = independent_moment_table(marginals, order);
  return s;
}

struct IntervalSetup {
  BasisProducts products;
  std::vector<ChaosExpansion> init;
  double gram_condition = 1.0;
  int state_degree = 0;
  /// Discrete law of the state variables; set when at most one is active.
  std::optional<StateRule> state_rule;
};

Snapshot snapshot_from_expansions(const std::vector<ChaosExpansion>& comps, const IntervalSetup& setup,
                                  const MultiIndexSet& xi_set, int order, const DgpcConfig& config) {
  const BasisProducts& products = setup.products;
  Snapshot s;
  std::vector<ChaosExpansion> z;
  for (const auto& c : comps) {
    const double m = c.mean();
    const double v = c.variance();
    s.mean.push_back(m);
    s.var.push_back(v);
    s.stddev.push_back(std::sqrt(std::max(v, 0.0)));
    s.active.push_back(is_active(m, v));
    if (!s.active.back()) continue;
    ChaosExpansion zc = c;
    zc.coeffs()[0] -= m;
    zc *= 1.0 / s.stddev.back();
    z.push_back(std::move(zc));
  }
  if (z.empty()) return s;
  const MomentMethod method = config.moment_method;
  if (method != MomentMethod::Projected) {
    std::optional<MomentTable> table;
    MomentMethod used = MomentMethod::XiQuadrature;
    if (method != MomentMethod::XiQuadrature && setup.state_rule) {
      table = mixed_moments_quadrature(z, order, xi_set, *setup.state_rule, config.quadrature_budget);
      used = MomentMethod::Quadrature;
    } else {
      table = mixed_moments_xi_exact(z, order, xi_set, *products.state, config.quadrature_budget);
    }
    if (table) {
      s.standardized = std::move(*table);
      s.method = used;
      return s;
    }
    if (method != MomentMethod::Auto)
      throw InvalidArgument("xi quadrature needs " + std::to_string(xi_quadrature_size(z, order, xi_set)) +
                            " nodes, above the budget of " + std::to_string(config.quadrature_budget));
  }
  s.standardized = mixed_moments(z, order, products);
  return s;
}


IntervalSetup setup_from_snapshot(const Snapshot& snap, std::shared_ptr<const TripleTensor> xi, int L) {
  IntervalSetup out;
  out.products.xi = std::move(xi);
  const std::size_t nxi = out.products.xi->basis_size();
  std::vector<double> ma, sa;
  for (std::size_t c = 0; c < snap.mean.size(); ++c) {
    if (!snap.active[c]) continue;
    ma.push_back(snap.mean[c]);
    sa.push_back(snap.stddev[c]);
  }
  std::vector<ChaosExpansion> active_init;
  if (ma.empty()) {
    out.products.state = std::make_shared<const TripleTensor>(TripleTensor::constant_only());
    out.state_rule = StateRule{{1.0}, {{1.0}}};
  } else {
    const OrthonormalBasis basis = orthonormalize_up_to(snap.standardized, L);
    out.state_degree = basis.degree();
    out.products.state = std::make_shared<const TripleTensor>(state_triple_products(basis));
    out.gram_condition = basis.gram_condition();
    active_init = initial_condition_coeffs(ma, sa, basis, nxi);
    if (ma.size() == 1) {
      const int top = snap.standardized.max_order();
      const GaussRule g = gauss_rule_from_moments(snap.standardized.marginal(0, top), (top + 1) / 2);
      StateRule rule;
      for (std::size_t a = 0; a < g.nodes.size(); ++a) {
        rule.weights.push_back(g.weights[a]);
        std::vector<double> row(basis.size());
        for (std::size_t k = 0; k < row.size(); ++k) row[k] = basis.evaluate(k, std::span<const double>(&g.nodes[a], 1));
        rule.values.push_back(std::move(row));
      }
      out.state_rule = std::move(rule);
    }
  }
  const std::size_t ns = out.products.state_size();
  std::size_t slot = 0;
  for (std::size_t c = 0; c < snap.mean.size(); ++c) {
    if (snap.active[c]) {
      out.init.push_back(std::move(active_init[slot++]));
    } else {
      out.init.push_back(ChaosExpansion::constant(snap.mean[c], nxi, ns));
    }
  }
  return out;
}

std::vector<double> flatten(const std::vector<ChaosExpansion>& comps) {
  std::vector<double> y;
  for (const auto& c : comps) y.insert(y.end(), c.coeffs().begin(), c.coeffs().end());
  return y;
}

std::vector<ChaosExpansion> unflatten(const std::vector<double>& y, std::size_t d, std::size_t nxi,
                                      std::size_t ns) {
  const std::size_t m = nxi * ns;
  std::vector<ChaosExpansion> out;
  for (std::size_t c = 0; c < d; ++c)
    out.emplace_back(nxi, ns, std::vector<double>(y.begin() + c * m, y.begin() + (c + 1) * m));
  return out;
}

TimeSample sample_of(double t, const std::vector<double>& y, std::size_t d, std::size_t m) {
  TimeSample s;
  s.time = t;
  for (std::size_t c = 0; c < d; ++c) {
    s.mean.push_back(y[c * m]);
    double sq = 0.0;
    for (std::size_t i = 1; i < m; ++i) sq += y[c * m + i] * y[c * m + i];
    s.variance.push_back(sq);
  }
  return s;
}

// Integrates over [t0, t1], appending a sample at every output time in (t0, t1].
std::vector<double> integrate_sampled(const GalerkinSystem& system, std::vector<double> y, double t0,
                                      double t1, const DgpcConfig& cfg, std::vector<TimeSample>& samples) {
  std::vector<double> stops;
  if (cfg.output_dt > 0.0) {
    const double tol = 1e-9 * cfg.output_dt;
    for (long k = static_cast<long>(std::floor(t0 / cfg.output_dt)); ; ++k) {
      const double t = k * cfg.output_dt;
      if (t >= t1 - tol) break;
      if (t > t0 + tol) stops.push_back(t);
    }
  }
  stops.push_back(t1);
  const std::size_t d = system.dim();
  const std::size_t m = system.coefficient_count();
  double t = t0;
  for (double s : stops) {
    y = integrate(system, std::move(y), t, s, cfg.h, cfg.order);
    samples.push_back(sample_of(s, y, d, m));
    t = s;
  }
  return y;
}

RestartRecord record_of(double t, const Snapshot& snap) {
  RestartRecord r;
  r.time = t;
  r.mean = snap.mean;
  r.variance = snap.var;
  r.active = snap.active;
  r.moments = snap.standardized;
  r.moment_method = snap.method;
  r.cumulants = make_cumulant_report(t, snap.mean, snap.stddev, snap.active,
                                     snap.active_count() ? &snap.standardized : nullptr, 6);
  return r;
}

void reinit_diagnostics(RestartRecord& rec, const Snapshot& snap, const IntervalSetup& setup, int L) {
  std::vector<ChaosExpansion> z;
  for (std::size_t c = 0; c < snap.mean.size(); ++c) {
    const auto& e = setup.init[c];
    const double scale = std::max(std::abs(snap.mean[c]), snap.stddev[c]);
    if (scale > 0.0)
      rec.reinit_mean_error = std::max(rec.reinit_mean_error, std::abs(e.mean() - snap.mean[c]) / scale);
    if (!snap.active[c]) continue;
    rec.reinit_variance_error =
        std::max(rec.reinit_variance_error, std::abs(e.variance() - snap.var[c]) / snap.var[c]);
    ChaosExpansion zc = e;
    zc.coeffs()[0] -= snap.mean[c];
    zc *= 1.0 / snap.stddev[c];
    z.push_back(std::move(zc));
  }
  if (z.empty()) return;
  const MomentTable after = mixed_moments(z, 2 * L, setup.products);
  const MomentTable before = snap.standardized.truncated(2 * L);
  double loss = 0.0;
  for (std::size_t i = 0; i < after.values().size(); ++i) loss = std::max(loss, std::abs(after[i] - before[i]));
  rec.reinit_moment_loss = loss;
}

}  // namespace

DgpcResult run_dgpc(const DgpcConfig& config, const SdeModel& model) {
  config.validate();
  model.validate();
  const std::size_t d = model.state_dim();
  const int P = static_cast<int>(model.wiener_processes());
  const MultiIndexSet xi_set(static_cast<std::size_t>(config.K), config.N);
  const auto xi = cached_xi_tensor(static_cast<std::size_t>(config.K), config.N);
  const int order = config.moment_order();

  DgpcResult result;
  result.components = model.component_names();

  Snapshot cur = snapshot_from_laws(model, order);
  result.records.push_back(record_of(0.0, cur));
  {
    TimeSample s0;
    s0.mean = cur.mean;
    s0.variance = cur.var;
    result.samples.push_back(s0);
  }

  for (int j = 0; j < config.n_restarts; ++j) {
    const double t0 = config.restart_time(j);
    const double t1 = config.restart_time(j + 1);
    try {
      IntervalSetup setup = setup_from_snapshot(cur, xi, config.L);
      RestartRecord& here = result.records.back();
      here.gram_condition = setup.gram_condition;
      here.state_basis_size = setup.products.state_size();
      here.state_degree = setup.state_degree;
      if (j > 0) reinit_diagnostics(here, cur, setup, config.L);

      const ForcingBasis forcing = ForcingBasis::split(t0, t1, config.K, P);
      const GalerkinSystem system = assemble(model, xi_set, setup.products, forcing);
      std::vector<double> y = integrate_sampled(system, flatten(setup.init), t0, t1, config, result.samples);

      auto comps = unflatten(y, d, setup.products.xi_size(), setup.products.state_size());
      cur = snapshot_from_expansions(comps, setup, xi_set, order, config);
      RestartRecord next = record_of(t1, cur);
      next.coefficients = std::move(comps);
      result.records.push_back(std::move(next));
    } catch (const Error& e) {
      rethrow_with_context(e, time_label(t0));
    }
  }
  return result;
}

std::vector<RestartRecord> run_dgpc_records(const DgpcConfig& config, const SdeModel& model) {
  return run_dgpc(config, model).records;
}

DgpcResult run_hermite_pc(const DgpcConfig& config, const SdeModel& model) {
  config.validate();
  model.validate();
  const std::size_t d = model.state_dim();
  const int P = static_cast<int>(model.wiener_processes());
  const MultiIndexSet xi_set(static_cast<std::size_t>(config.K), config.N);
  const auto xi = cached_xi_tensor(static_cast<std::size_t>(config.K), config.N);
  const int order = config.moment_order();

  DgpcResult result;
  result.components = model.component_names();
  const Snapshot init = snapshot_from_laws(model, order);
  result.records.push_back(record_of(0.0, init));
  {
    TimeSample s0;
    s0.mean = init.mean;
    s0.variance = init.var;
    result.samples.push_back(s0);
  }

  bool all_gaussian = init.active_count() > 0;
  for (std::size_t c = 0; c < d; ++c)
    if (init.active[c] && model.initial[c].kind != InitialLaw::Kind::Gaussian) all_gaussian = false;

  IntervalSetup setup;
  if (all_gaussian) {
    const std::size_t da = init.active_count();
    const MultiIndexSet state_set(da, config.L);
    setup.products.xi = xi;
    setup.products.state = std::make_shared<const TripleTensor>(build_xi_triple_tensor(state_set));
    const std::size_t nxi = xi->basis_size();
    std::size_t slot = 0;
    for (std::size_t c = 0; c < d; ++c) {
      ChaosExpansion e = ChaosExpansion::constant(init.mean[c], nxi, state_set.size());
      if (init.active[c]) e(0, state_set.unit_rank(slot++)) = init.stddev[c];
      setup.init.push_back(std::move(e));
    }
    if (da == 1) {
      const GaussRule g = gauss_hermite_rule((order + 1) / 2);
      StateRule rule;
      for (std::size_t a = 0; a < g.nodes.size(); ++a) {
        rule.weights.push_back(g.weights[a]);
        std::vector<double> row(state_set.size());
        for (std::size_t k = 0; k < row.size(); ++k) row[k] = hermite_eval(static_cast<int>(k), g.nodes[a]);
        rule.values.push_back(std::move(row));
      }
      setup.state_rule = std::move(rule);
    }
  } else {
    setup = setup_from_snapshot(init, xi, config.L);
  }
  result.records.back().gram_condition = setup.gram_condition;
  result.records.back().state_basis_size = setup.products.state_size();

  try {
    const ForcingBasis forcing = ForcingBasis::split(0.0, config.t_end, config.K, P);
    const GalerkinSystem system = assemble(model, xi_set, setup.products, forcing);
    std::vector<double> y = integrate_sampled(system, flatten(setup.init), 0.0, config.t_end, config, result.samples);
    auto comps = unflatten(y, d, setup.products.xi_size(), setup.products.state_size());
    const Snapshot fin = snapshot_from_expansions(comps, setup, xi_set, order, config);
    RestartRecord rec = record_of(config.t_end, fin);
    rec.coefficients = std::move(comps);
    result.records.push_back(std::move(rec));
  } catch (const Error& e) {
    rethrow_with_context(e, time_label(0.0));
  }
  return result;
}

}  // namespace dgpc
