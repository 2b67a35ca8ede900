#include "dgpc/oracles.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <thread>

#include "dgpc/errors.hpp"

namespace dgpc {

MeanVariance ou_exact(double b, double sigma, const InitialLaw& u0, double s) {
  if (!(b > 0.0)) throw InvalidArgument("OU damping must be positive");
  if (u0.kind == InitialLaw::Kind::Uniform) throw InvalidArgument("OU closed form needs a Gaussian or point initial law");
  const double e = std::exp(-b * s);
  return {u0.mean() * e, u0.variance() * e * e + sigma * sigma * (1.0 - e * e) / (2.0 * b)};
}

void McConfig::validate() const {
  if (n_samples < 1) throw ConfigError("MC needs at least one sample");
  if (!(dt > 0.0)) throw ConfigError("MC step dt must be positive");
  if (!(t_end > 0.0)) throw ConfigError("MC horizon must be positive");
  if (output_dt < 0.0) throw ConfigError("MC output_dt must be non-negative");
  if (batches < 30) throw ConfigError("MC needs at least 30 batches for batch-means errors");
  if (n_samples < static_cast<std::size_t>(batches)) throw ConfigError("MC needs at least one sample per batch");
}

std::vector<double> McResult::times() const {
  std::vector<double> t;
  for (const auto& p : points) t.push_back(p.time);
  return t;
}

std::vector<double> McResult::mean_trajectory(std::size_t c) const {
  std::vector<double> out;
  for (const auto& p : points) out.push_back(p.mean.at(c));
  return out;
}

std::vector<double> McResult::variance_trajectory(std::size_t c) const {
  std::vector<double> out;
  for (const auto& p : points) out.push_back(p.variance.at(c));
  return out;
}

namespace {

constexpr int kMcOrder = 6;

int thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DGPC_NUM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

struct BatchSums {
  std::vector<std::vector<double>> sums;  // [point][monomial]
  std::vector<std::size_t> counts;        // finite samples per point
  std::size_t non_finite = 0;
};

double draw(const InitialLaw& law, std::mt19937_64& rng) {
  switch (law.kind) {
    case InitialLaw::Kind::Gaussian: return std::normal_distribution<double>(law.first, std::sqrt(law.second))(rng);
    case InitialLaw::Kind::Uniform: return std::uniform_real_distribution<double>(law.first, law.second)(rng);
    case InitialLaw::Kind::Point: return law.first;
  }
  return 0.0;
}

BatchSums run_batch(const SdeModel& model, const McConfig& cfg, const MultiIndexSet& monomials,
                    const std::vector<long>& output_steps, long total_steps, std::size_t n, std::uint64_t batch) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(batch)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t d = model.state_dim();
  BatchSums out;
  out.sums.assign(output_steps.size(), std::vector<double>(monomials.size(), 0.0));
  out.counts.assign(output_steps.size(), 0);
  const double dt = cfg.dt;
  const double sq = std::sqrt(dt);
  std::vector<double> x(d);
  double pw[2][kMcOrder + 1];

  auto accumulate = [&](std::size_t p) {
    for (std::size_t c = 0; c < d; ++c) {
      pw[c][0] = 1.0;
      for (int k = 1; k <= kMcOrder; ++k) pw[c][k] = pw[c][k - 1] * x[c];
    }
    auto& s = out.sums[p];
    for (std::size_t m = 0; m < monomials.size(); ++m) {
      double v = 1.0;
      for (std::size_t c = 0; c < d; ++c) v *= pw[c][monomials[m][c]];
      s[m] += v;
    }
    ++out.counts[p];
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < d; ++c) x[c] = draw(model.initial[c], rng);
    std::size_t next = 0;
    bool finite = true;
    while (next < output_steps.size() && output_steps[next] == 0) accumulate(next++);
    for (long step = 1; step <= total_steps && finite; ++step) {
      const double t = (step - 1) * dt;
      const double f = model.forcing.is_zero() ? 0.0 : model.forcing(t);
      double& u = x[0];
      switch (model.kind) {
        case ModelKind::OU:
          u += (-model.b_u * u + f) * dt + model.sigma_u * sq * normal(rng);
          break;
        case ModelKind::CubicOU:
          u += (-model.b_u * u - model.cubic * u * u * u + f) * dt + model.sigma_u * sq * normal(rng);
          break;
        case ModelKind::RandomDampingOU:
          u += (-x[1] * u + f) * dt + model.sigma_u * sq * normal(rng);
          break;
        case ModelKind::SquaredWienerForcing: {
          // exact increment of W^2 - s over the step
          const double dw = sq * normal(rng);
          const double w = x[1];
          u += (-model.b_u * u + f) * dt + model.sigma_u * (dw * dw + 2.0 * w * dw - dt);
          x[1] = w + dw;
          break;
        }
        case ModelKind::CoupledSystem: {
          const double uu = u, vv = x[1];
          const double dwu = sq * normal(rng), dwv = sq * normal(rng);
          u = uu + (-(model.b_u + model.a_u * vv) * uu + f) * dt + model.sigma_u * dwu;
          x[1] = vv - (model.b_v + model.a_v * uu) * vv * dt + model.sigma_v * dwv;
          break;
        }
      }
      for (double v : x) finite = finite && std::isfinite(v);
      while (finite && next < output_steps.size() && output_steps[next] == step) accumulate(next++);
    }
    if (!finite) ++out.non_finite;
  }
  return out;
}

double sample_std(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= n;
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (n - 1.0));
}

}  // namespace

McResult mc_simulate(const SdeModel& model, const McConfig& cfg) {
  model.validate();
  cfg.validate();
  const std::size_t d = model.state_dim();
  const MultiIndexSet monomials(d, kMcOrder);
  const long total_steps = std::lround(cfg.t_end / cfg.dt);
  if (std::abs(total_steps * cfg.dt - cfg.t_end) > 1e-9 * cfg.t_end)
    throw ConfigError("MC step dt must divide t_end");

  std::vector<long> output_steps;
  std::vector<double> output_times;
  output_steps.push_back(0);
  output_times.push_back(0.0);
  if (cfg.output_dt > 0.0) {
    for (long k = 1;; ++k) {
      const double t = k * cfg.output_dt;
      if (t > cfg.t_end * (1.0 + 1e-12)) break;
      output_steps.push_back(std::lround(t / cfg.dt));
      output_times.push_back(t);
    }
  }
  if (output_steps.back() != total_steps) {
    output_steps.push_back(total_steps);
    output_times.push_back(cfg.t_end);
  }

  const int B = cfg.batches;
  std::vector<BatchSums> batches(static_cast<std::size_t>(B));
  auto batch_size = [&](int b) { return cfg.n_samples / B + (static_cast<std::size_t>(b) < cfg.n_samples % B ? 1 : 0); };
  const int nthreads = std::min(thread_count(cfg.threads), B);
  if (nthreads <= 1) {
    for (int b = 0; b < B; ++b)
      batches[b] = run_batch(model, cfg, monomials, output_steps, total_steps, batch_size(b), static_cast<std::uint64_t>(b));
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nthreads; ++w) {
      pool.emplace_back([&, w] {
        for (int b = w; b < B; b += nthreads)
          batches[b] = run_batch(model, cfg, monomials, output_steps, total_steps, batch_size(b), static_cast<std::uint64_t>(b));
      });
    }
    for (auto& t : pool) t.join();
  }

  McResult res;
  res.components = model.component_names();
  res.samples = cfg.n_samples;
  for (const auto& b : batches) res.non_finite += b.non_finite;
  if (static_cast<double>(res.non_finite) > 1e-4 * static_cast<double>(cfg.n_samples))
    throw NonFinite("MC: " + std::to_string(res.non_finite) + " of " + std::to_string(cfg.n_samples) +
                    " samples became non-finite");

  for (std::size_t p = 0; p < output_steps.size(); ++p) {
    McPoint pt;
    pt.time = output_times[p];
    std::vector<double> sums(monomials.size(), 0.0);
    std::size_t count = 0;
    std::vector<std::vector<double>> batch_mean(d), batch_var(d);
    for (const auto& b : batches) {
      const auto& s = b.sums[p];
      for (std::size_t m = 0; m < sums.size(); ++m) sums[m] += s[m];
      count += b.counts[p];
      if (b.counts[p] == 0) continue;
      const double nb = static_cast<double>(b.counts[p]);
      for (std::size_t c = 0; c < d; ++c) {
        const double m1 = s[monomials.unit_rank(c)] / nb;
        const double m2 = s[monomials.rank(MultiIndex::unit(d, c) + MultiIndex::unit(d, c))] / nb;
        batch_mean[c].push_back(m1);
        batch_var[c].push_back(m2 - m1 * m1);
      }
    }
    for (double& s : sums) s /= static_cast<double>(count);
    pt.raw = MomentTable(d, kMcOrder, sums);
    std::vector<double> sd(d);
    std::vector<bool> active(d);
    for (std::size_t c = 0; c < d; ++c) {
      const double m1 = pt.raw.pure(c, 1);
      // below this level the raw-moment difference is rounding noise
      const double noise = 64.0 * std::numeric_limits<double>::epsilon() * m1 * m1;
      double var = pt.raw.pure(c, 2) - m1 * m1;
      if (var <= noise) var = 0.0;
      pt.mean.push_back(m1);
      pt.variance.push_back(var);
      sd[c] = std::sqrt(var);
      active[c] = var > 0.0;
      pt.mean_se.push_back(sample_std(batch_mean[c]) / std::sqrt(static_cast<double>(batch_mean[c].size())));
      pt.variance_se.push_back(sample_std(batch_var[c]) / std::sqrt(static_cast<double>(batch_var[c].size())));
    }
    // standardized table over the active components only
    std::vector<std::size_t> act;
    for (std::size_t c = 0; c < d; ++c)
      if (active[c]) act.push_back(c);
    MomentTable standardized;
    if (!act.empty()) {
      MomentTable sub(act.size(), kMcOrder);
      std::vector<double> ma, sa;
      for (std::size_t c : act) {
        ma.push_back(pt.mean[c]);
        sa.push_back(sd[c]);
      }
      for (std::size_t r = 0; r < sub.index().size(); ++r) {
        std::vector<int> e(d, 0);
        for (std::size_t i = 0; i < act.size(); ++i) e[act[i]] = sub.index()[r][i];
        sub[r] = pt.raw.at(MultiIndex(e));
      }
      standardized = sub.standardized(ma, sa);
    }
    pt.cumulants = make_cumulant_report(pt.time, pt.mean, sd, active, act.empty() ? nullptr : &standardized, kMcOrder);
    res.points.push_back(std::move(pt));
  }
  return res;
}

namespace {

double poly(const std::vector<double>& c, double v) {
  double r = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) r = r * v + c[k];
  return r;
}

}  // namespace

std::vector<double> invariant_cumulants_1d(const std::vector<double>& drift, double sigma, int order) {
  using boost::math::quadrature::gauss_kronrod;
  if (!(sigma > 0.0)) throw InvalidArgument("stationary density needs sigma > 0");
  if (order < 1 || order > 6) throw InvalidArgument("cumulant order must be in 1..6");
  std::size_t deg = drift.size();
  while (deg > 0 && drift[deg - 1] == 0.0) --deg;
  if (deg == 0 || (deg - 1) % 2 == 0 || drift[deg - 1] >= 0.0)
    throw NonIntegrable("drift must have an odd leading term with a negative coefficient");

  // log-density 2/sigma^2 int_0^v drift
  std::vector<double> pot(deg + 1, 0.0);
  for (std::size_t k = 0; k < deg; ++k) pot[k + 1] = 2.0 * drift[k] / ((k + 1.0) * sigma * sigma);
  bool odd = true;
  for (std::size_t k = 0; k < deg; k += 2) odd = odd && drift[k] == 0.0;

  auto peak_on = [&](double R) {
    double best = -INFINITY;
    const int n = 4000;
    for (int i = 0; i <= n; ++i) best = std::max(best, poly(pot, -R + 2.0 * R * i / n));
    return best;
  };
  double R = 1.0;
  double peak = peak_on(R);
  while (true) {
    peak = std::max(peak, peak_on(R));
    if (poly(pot, R) - peak < std::log(1e-14) && poly(pot, -R) - peak < std::log(1e-14)) break;
    R *= 1.5;
    if (R > 1e6) throw NonIntegrable("stationary density does not decay");
  }

  std::vector<double> m(static_cast<std::size_t>(order) + 1, 0.0);
  auto integrate = [&](int k, double a, double b) {
    auto f = [&](double v) { return std::pow(v, k) * std::exp(poly(pot, v) - peak); };
    return gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
  };
  const double z = odd ? 2.0 * integrate(0, 0.0, R) : integrate(0, -R, R);
  if (!(z > 0.0) || !std::isfinite(z)) throw NonIntegrable("stationary density normalization failed");
  m[0] = 1.0;
  for (int k = 1; k <= order; ++k) {
    if (odd) {
      m[k] = k % 2 ? 0.0 : 2.0 * integrate(k, 0.0, R) / z;
    } else {
      m[k] = integrate(k, -R, R) / z;
    }
  }
  return cumulants_from_moments(m, order);
}

std::vector<double> averaged_ou_invariant(const InitialLaw& b_law, double sigma, int order) {
  using boost::math::quadrature::gauss_kronrod;
  if (order < 1 || order > 6) throw InvalidArgument("cumulant order must be in 1..6");
  if (b_law.kind == InitialLaw::Kind::Gaussian) throw InvalidArgument("damping law must have bounded support");
  const double lo = b_law.kind == InitialLaw::Kind::Uniform ? b_law.first : b_law.mean();
  if (!(lo > 0.0)) throw InvalidArgument("damping support must be strictly positive");
  std::vector<double> m(static_cast<std::size_t>(order) + 1, 0.0);
  m[0] = 1.0;
  for (int k = 2; k <= order; k += 2) {
    double dfact = 1.0;
    for (int j = k - 1; j > 1; j -= 2) dfact *= j;
    const int half = k / 2;
    auto g = [&](double b) { return std::pow(sigma * sigma / (2.0 * b), half); };
    double avg;
    if (b_law.kind == InitialLaw::Kind::Point) {
      avg = g(b_law.first);
    } else {
      avg = gauss_kronrod<double, 61>::integrate(g, b_law.first, b_law.second, 15, 1e-15) /
            (b_law.second - b_law.first);
    }
    m[k] = dfact * avg;
  }
  return cumulants_from_moments(m, order);
}

namespace {

// Gaussian statistics of J(s, t) = int_s^t v for the OU component v.
struct PathIntegralLaw {
  double b, m0, q0, stat;  // damping, E v0, Var v0, sigma_v^2 / (2b)
  double t;

  double e1(double s) const { return (std::exp(-b * s) - std::exp(-b * t)) / b; }
  double mean(double s) const { return m0 * e1(s); }
  double cov(double s1, double s2) const {
    if (s1 > s2) std::swap(s1, s2);
    const double l = t - s2;
    double I = 2.0 * (l / b - (1.0 - std::exp(-b * l)) / (b * b));
    I += (1.0 - std::exp(-b * (s2 - s1))) * (1.0 - std::exp(-b * l)) / (b * b);
    return q0 * e1(s1) * e1(s2) + stat * (I - e1(s1) * e1(s2));
  }
};

template <class F>
double gl_panels(F&& f, double a, double b, double width) {
  using boost::math::quadrature::gauss;
  if (b <= a) return 0.0;
  const int n = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
  const double hstep = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += gauss<double, 20>::integrate(f, a + i * hstep, a + (i + 1) * hstep);
  return s;
}

void require_coupled_gaussian(const SdeModel& model) {
  if (model.kind != ModelKind::CoupledSystem) throw InvalidArgument("coupled oracle needs the coupled model");
  if (model.a_v != 0.0) throw InvalidArgument("coupled oracle needs a_v = 0");
  for (const auto& law : model.initial)
    if (law.kind == InitialLaw::Kind::Uniform) throw InvalidArgument("coupled oracle needs Gaussian initial data");
}

}  // namespace

MeanVariance coupled_exact_v(const SdeModel& model, double t) {
  require_coupled_gaussian(model);
  return ou_exact(model.b_v, model.sigma_v, model.initial[1], t);
}

MeanVariance coupled_exact(const SdeModel& model, double t) {
  require_coupled_gaussian(model);
  if (t == 0.0) return {model.initial[0].mean(), model.initial[0].variance()};
  const PathIntegralLaw J{model.b_v, model.initial[1].mean(), model.initial[1].variance(),
                          model.sigma_v * model.sigma_v / (2.0 * model.b_v), t};
  const double bu = model.b_u, a = model.a_u;
  // E[Phi(s,t)] and E[Phi(s1,t) Phi(s2,t)]
  auto phi1 = [&](double s) { return std::exp(-bu * (t - s) - a * J.mean(s) + 0.5 * a * a * J.cov(s, s)); };
  auto phi2 = [&](double s1, double s2) {
    const double var = J.cov(s1, s1) + J.cov(s2, s2) + 2.0 * J.cov(s1, s2);
    return std::exp(-bu * (2.0 * t - s1 - s2) - a * (J.mean(s1) + J.mean(s2)) + 0.5 * a * a * var);
  };
  const auto& f = model.forcing;
  const double width = 0.5;
  const double mu0 = model.initial[0].mean();
  const double m20 = model.initial[0].raw_moment(2);

  double mean = mu0 * phi1(0.0);
  if (!f.is_zero()) mean += gl_panels([&](double s) { return f(s) * phi1(s); }, 0.0, t, width);

  double second = m20 * phi2(0.0, 0.0);
  if (!f.is_zero()) {
    second += 2.0 * mu0 * gl_panels([&](double s) { return f(s) * phi2(0.0, s); }, 0.0, t, width);
    // symmetric kernel; each triangle s1 < s2 is smooth
    const double tri = gl_panels(
        [&](double s2) {
          return f(s2) * gl_panels([&](double s1) { return f(s1) * phi2(s1, s2); }, 0.0, s2, width);
        },
        0.0, t, width);
    second += 2.0 * tri;
  }
  const double su = model.sigma_u;
  if (su != 0.0) second += su * su * gl_panels([&](double s) { return phi2(s, s); }, 0.0, t, width);
  return {mean, second - mean * mean};
}

}  // namespace dgpc
