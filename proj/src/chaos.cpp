#include "dgpc/chaos.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "dgpc/errors.hpp"
#include "dgpc/hermite.hpp"

namespace dgpc {

ChaosExpansion::ChaosExpansion(std::size_t xi_size, std::size_t state_size)
    : xi_size_(xi_size), state_size_(state_size), coeffs_(xi_size * state_size, 0.0) {}

ChaosExpansion::ChaosExpansion(std::size_t xi_size, std::size_t state_size,
                               std::vector<double> coeffs)
    : xi_size_(xi_size), state_size_(state_size), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != xi_size * state_size)
    throw InvalidArgument("coefficient array length must equal |xi basis| x |state basis|");
}

ChaosExpansion ChaosExpansion::constant(double value, std::size_t xi_size, std::size_t state_size) {
  ChaosExpansion e(xi_size, state_size);
  e.coeffs_[0] = value;
  return e;
}

double ChaosExpansion::second_moment() const {
  double s = 0.0;
  for (double c : coeffs_) s += c * c;
  return s;
}

double ChaosExpansion::variance() const {
  double s = 0.0;
  for (std::size_t i = 1; i < coeffs_.size(); ++i) s += coeffs_[i] * coeffs_[i];
  return s;
}

ChaosExpansion& ChaosExpansion::operator+=(const ChaosExpansion& other) {
  if (!same_basis(other)) throw InvalidArgument("chaos expansions live on different bases");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

ChaosExpansion& ChaosExpansion::operator-=(const ChaosExpansion& other) {
  if (!same_basis(other)) throw InvalidArgument("chaos expansions live on different bases");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

ChaosExpansion& ChaosExpansion::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

void multiply_into(std::span<const double> u, std::span<const double> v,
                   const BasisProducts& products, std::span<double> out, ProductWorkspace& work) {
  const std::size_t nx = products.xi_size();
  const std::size_t ns = products.state_size();
  const std::size_t n = nx * ns;
  if (u.size() != n || v.size() != n || out.size() != n)
    throw InvalidArgument("Galerkin product: coefficient arrays do not match the basis");
  const std::size_t npairs = ns * (ns + 1) / 2;

  auto& g = work.pair_sums;
  g.assign(nx * npairs, 0.0);
  work.u_nonzero.assign(nx, 0);
  work.v_nonzero.assign(nx, 0);
  for (std::size_t a = 0; a < nx; ++a) {
    for (std::size_t k = 0; k < ns; ++k) {
      if (u[a * ns + k] != 0.0) work.u_nonzero[a] = 1;
      if (v[a * ns + k] != 0.0) work.v_nonzero[a] = 1;
    }
  }

  // Stage 1: contract the xi part, accumulating per unordered state pair (k <= l).
  for (const auto& e : products.xi->pair_entries()) {
    const std::size_t a = e.a, b = e.b;
    if ((!work.u_nonzero[a] && !work.u_nonzero[b]) || (!work.v_nonzero[a] && !work.v_nonzero[b]))
      continue;
    const double* ua = u.data() + a * ns;
    const double* ub = u.data() + b * ns;
    const double* va = v.data() + a * ns;
    const double* vb = v.data() + b * ns;
    double* gc = g.data() + e.c * npairs;
    std::size_t p = 0;
    if (a < b) {
      for (std::size_t k = 0; k < ns; ++k) {
        gc[p++] += e.value * (ua[k] * vb[k] + ub[k] * va[k]);
        for (std::size_t l = k + 1; l < ns; ++l)
          gc[p++] += e.value * ((ua[k] * vb[l] + ub[l] * va[k]) + (ub[k] * va[l] + ua[l] * vb[k]));
      }
    } else {
      for (std::size_t k = 0; k < ns; ++k) {
        gc[p++] += e.value * (ua[k] * va[k]);
        for (std::size_t l = k + 1; l < ns; ++l) gc[p++] += e.value * (ua[k] * va[l] + ua[l] * va[k]);
      }
    }
  }

  // Stage 2: contract the state part.
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& s : products.state->pair_entries()) {
    // rank of (a <= b) in the row-major upper triangle
    const std::size_t p = s.a * ns - s.a * (s.a - 1) / 2 + (s.b - s.a);
    for (std::size_t c = 0; c < nx; ++c) out[c * ns + s.c] += s.value * g[c * npairs + p];
  }
}

ChaosExpansion multiply(const ChaosExpansion& u, const ChaosExpansion& v,
                        const BasisProducts& products) {
  if (!u.same_basis(v) || u.xi_size() != products.xi_size() ||
      u.state_size() != products.state_size())
    throw InvalidArgument("Galerkin product: basis mismatch");
  ChaosExpansion out(u.xi_size(), u.state_size());
  ProductWorkspace work;
  multiply_into(u.coeffs(), v.coeffs(), products, out.coeffs(), work);
  return out;
}

ChaosExpansion power(const ChaosExpansion& u, int m, const BasisProducts& products) {
  if (m < 1) throw InvalidArgument("power exponent must be >= 1");
  ChaosExpansion acc = u;
  ProductWorkspace work;
  ChaosExpansion next(u.xi_size(), u.state_size());
  for (int i = 1; i < m; ++i) {
    multiply_into(acc.coeffs(), u.coeffs(), products, next.coeffs(), work);
    std::swap(acc, next);
  }
  return acc;
}

double raw_moment(const ChaosExpansion& u, int m, const BasisProducts& products) {
  return power(u, m, products).mean();
}

double inner(const ChaosExpansion& u, const ChaosExpansion& v) {
  if (!u.same_basis(v)) throw InvalidArgument("inner product: basis mismatch");
  const auto a = u.coeffs();
  const auto b = v.coeffs();
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

MomentTable mixed_moments(const std::vector<ChaosExpansion>& components, int max_total_order,
                          const BasisProducts& products) {
  if (components.empty()) throw InvalidArgument("mixed moments need at least one component");
  if (max_total_order < 1) throw InvalidArgument("mixed moments need max_total_order >= 1");
  const std::size_t d = components.size();
  for (const auto& c : components)
    if (!c.same_basis(components.front()) || c.xi_size() != products.xi_size() ||
        c.state_size() != products.state_size())
      throw InvalidArgument("mixed moments: components must share one basis pair");

  const std::size_t nx = products.xi_size(), ns = products.state_size();
  ProductWorkspace work;
  // powers[i][a] = projected v_i^a
  std::vector<std::vector<ChaosExpansion>> powers(d);
  for (std::size_t i = 0; i < d; ++i) {
    auto& p = powers[i];
    p.reserve(static_cast<std::size_t>(max_total_order) + 1);
    p.push_back(ChaosExpansion::constant(1.0, nx, ns));
    p.push_back(components[i]);
    for (int a = 2; a <= max_total_order; ++a) {
      ChaosExpansion next(nx, ns);
      multiply_into(p.back().coeffs(), components[i].coeffs(), products, next.coeffs(), work);
      p.push_back(std::move(next));
    }
  }

  MomentTable table(d, max_total_order);
  const auto& idx = table.index();
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const auto& l = idx[r];
    if (d == 1) {
      table[r] = powers[0][l[0]].mean();
      continue;
    }
    ChaosExpansion cur = powers[0][l[0]];
    for (std::size_t i = 1; i + 1 < d; ++i) {
      if (l[i] == 0) continue;
      ChaosExpansion next(nx, ns);
      multiply_into(cur.coeffs(), powers[i][l[i]].coeffs(), products, next.coeffs(), work);
      cur = std::move(next);
    }
    table[r] = inner(cur, powers[d - 1][l[d - 1]]);
  }
  return table;
}

namespace {

struct XiPlan {
  std::vector<std::size_t> coords;      // xi coordinates in use
  std::vector<int> degree;              // max exponent per used coordinate
  std::vector<int> points;              // Gauss nodes per used coordinate
  std::vector<std::size_t> alphas;      // xi ranks with a nonzero coefficient
  std::vector<std::vector<std::pair<std::size_t, int>>> support;  // (used coord, exponent)
  std::size_t nodes = 1;
};

XiPlan plan_xi_quadrature(const std::vector<ChaosExpansion>& components, int max_total_order,
                          const MultiIndexSet& xi_basis) {
  if (components.empty()) throw InvalidArgument("mixed moments need at least one component");
  if (max_total_order < 1) throw InvalidArgument("mixed moments need max_total_order >= 1");
  const std::size_t nx = xi_basis.size();
  for (const auto& c : components)
    if (c.xi_size() != nx || !c.same_basis(components.front()))
      throw InvalidArgument("mixed moments: components must share one basis pair");
  const std::size_t ns = components.front().state_size();

  XiPlan plan;
  std::vector<int> deg(xi_basis.dim(), 0);
  for (std::size_t r = 0; r < nx; ++r) {
    bool used = false;
    for (const auto& c : components)
      for (std::size_t k = 0; k < ns && !used; ++k) used = c(r, k) != 0.0;
    if (!used) continue;
    plan.alphas.push_back(r);
    for (std::size_t i = 0; i < deg.size(); ++i) deg[i] = std::max(deg[i], xi_basis[r][i]);
  }
  std::vector<std::size_t> position(deg.size(), 0);
  for (std::size_t i = 0; i < deg.size(); ++i) {
    if (deg[i] == 0) continue;
    position[i] = plan.coords.size();
    plan.coords.push_back(i);
    plan.degree.push_back(deg[i]);
    const int q = max_total_order * deg[i] / 2 + 1;
    plan.points.push_back(q);
    const auto uq = static_cast<std::size_t>(q);
    plan.nodes = plan.nodes > std::numeric_limits<std::size_t>::max() / uq
                     ? std::numeric_limits<std::size_t>::max()
                     : plan.nodes * uq;
  }
  for (std::size_t r : plan.alphas) {
    std::vector<std::pair<std::size_t, int>> sup;
    for (std::size_t i = 0; i < deg.size(); ++i)
      if (xi_basis[r][i] > 0) sup.emplace_back(position[i], xi_basis[r][i]);
    plan.support.push_back(std::move(sup));
  }
  return plan;
}

void state_product(const std::vector<double>& u, const std::vector<double>& v, const TripleTensor& t,
                   std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& e : t.pair_entries()) {
    const double f = e.a == e.b ? u[e.a] * v[e.a] : u[e.a] * v[e.b] + u[e.b] * v[e.a];
    out[e.c] += e.value * f;
  }
}

}  // namespace

std::size_t xi_quadrature_size(const std::vector<ChaosExpansion>& components, int max_total_order,
                               const MultiIndexSet& xi_basis) {
  return plan_xi_quadrature(components, max_total_order, xi_basis).nodes;
}

std::optional<MomentTable> mixed_moments_xi_exact(const std::vector<ChaosExpansion>& components,
                                                  int max_total_order, const MultiIndexSet& xi_basis,
                                                  const TripleTensor& state, std::size_t max_nodes) {
  const XiPlan plan = plan_xi_quadrature(components, max_total_order, xi_basis);
  if (plan.nodes > max_nodes) return std::nullopt;
  const std::size_t d = components.size();
  const std::size_t ns = components.front().state_size();
  if (state.basis_size() != ns) throw InvalidArgument("mixed moments: state tensor size mismatch");
  const std::size_t m = plan.coords.size();

  // hermite[i][n][q] = H_n at node q of coordinate i
  std::vector<GaussRule> rules;
  std::vector<std::vector<std::vector<double>>> hermite(m);
  for (std::size_t i = 0; i < m; ++i) {
    rules.push_back(gauss_hermite_rule(plan.points[i]));
    hermite[i].assign(plan.degree[i] + 1, std::vector<double>(plan.points[i]));
    for (int n = 0; n <= plan.degree[i]; ++n)
      for (int q = 0; q < plan.points[i]; ++q) hermite[i][n][q] = hermite_eval(n, rules[i].nodes[q]);
  }

  MomentTable table(d, max_total_order);
  const auto& idx = table.index();
  std::vector<double> acc(idx.size(), 0.0);
  std::vector<std::size_t> node(m, 0);
  std::vector<double> t_alpha(plan.alphas.size());
  std::vector<std::vector<std::vector<double>>> powers(
      d, std::vector<std::vector<double>>(max_total_order + 1, std::vector<double>(ns, 0.0)));
  std::vector<double> cur(ns), next(ns);

  for (std::size_t count = 0; count < plan.nodes; ++count) {
    double weight = 1.0;
    for (std::size_t i = 0; i < m; ++i) weight *= rules[i].weights[node[i]];
    for (std::size_t a = 0; a < plan.alphas.size(); ++a) {
      double v = 1.0;
      for (const auto& [i, n] : plan.support[a]) v *= hermite[i][n][node[i]];
      t_alpha[a] = v;
    }
    for (std::size_t c = 0; c < d; ++c) {
      auto& p = powers[c];
      std::fill(p[0].begin(), p[0].end(), 0.0);
      p[0][0] = 1.0;
      std::fill(p[1].begin(), p[1].end(), 0.0);
      for (std::size_t a = 0; a < plan.alphas.size(); ++a)
        for (std::size_t k = 0; k < ns; ++k) p[1][k] += components[c](plan.alphas[a], k) * t_alpha[a];
      for (int e = 2; e <= max_total_order; ++e) state_product(p[e - 1], p[1], state, p[e]);
    }
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const auto& l = idx[r];
      double value;
      if (d == 1) {
        value = powers[0][l[0]][0];
      } else {
        cur = powers[0][l[0]];
        for (std::size_t i = 1; i + 1 < d; ++i) {
          if (l[i] == 0) continue;
          state_product(cur, powers[i][l[i]], state, next);
          std::swap(cur, next);
        }
        const auto& last = powers[d - 1][l[d - 1]];
        value = std::inner_product(cur.begin(), cur.end(), last.begin(), 0.0);
      }
      acc[r] += weight * value;
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (++node[i] < static_cast<std::size_t>(plan.points[i])) break;
      node[i] = 0;
    }
  }
  for (std::size_t r = 0; r < idx.size(); ++r) table[r] = acc[r];
  return table;
}

std::optional<MomentTable> mixed_moments_quadrature(const std::vector<ChaosExpansion>& components,
                                                    int max_total_order, const MultiIndexSet& xi_basis,
                                                    const StateRule& rule, std::size_t max_nodes) {
  const XiPlan plan = plan_xi_quadrature(components, max_total_order, xi_basis);
  if (plan.nodes > max_nodes) return std::nullopt;
  const std::size_t d = components.size();
  const std::size_t ns = components.front().state_size();
  const std::size_t atoms = rule.weights.size();
  if (rule.values.size() != atoms) throw InvalidArgument("state rule: weights and values differ in length");
  for (const auto& v : rule.values)
    if (v.size() != ns) throw InvalidArgument("state rule: value rows must match the state basis");
  const std::size_t m = plan.coords.size();

  std::vector<GaussRule> rules;
  std::vector<std::vector<std::vector<double>>> hermite(m);
  for (std::size_t i = 0; i < m; ++i) {
    rules.push_back(gauss_hermite_rule(plan.points[i]));
    hermite[i].assign(plan.degree[i] + 1, std::vector<double>(plan.points[i]));
    for (int n = 0; n <= plan.degree[i]; ++n)
      for (int q = 0; q < plan.points[i]; ++q) hermite[i][n][q] = hermite_eval(n, rules[i].nodes[q]);
  }

  MomentTable table(d, max_total_order);
  const auto& idx = table.index();
  std::vector<double> acc(idx.size(), 0.0);
  std::vector<std::size_t> node(m, 0);
  std::vector<double> t_alpha(plan.alphas.size());
  std::vector<std::vector<double>> xi_part(d, std::vector<double>(ns));
  std::vector<std::vector<double>> pw(d, std::vector<double>(max_total_order + 1));

  for (std::size_t count = 0; count < plan.nodes; ++count) {
    double weight = 1.0;
    for (std::size_t i = 0; i < m; ++i) weight *= rules[i].weights[node[i]];
    for (std::size_t a = 0; a < plan.alphas.size(); ++a) {
      double v = 1.0;
      for (const auto& [i, n] : plan.support[a]) v *= hermite[i][n][node[i]];
      t_alpha[a] = v;
    }
    for (std::size_t c = 0; c < d; ++c) {
      std::fill(xi_part[c].begin(), xi_part[c].end(), 0.0);
      for (std::size_t a = 0; a < plan.alphas.size(); ++a)
        for (std::size_t k = 0; k < ns; ++k) xi_part[c][k] += components[c](plan.alphas[a], k) * t_alpha[a];
    }
    for (std::size_t at = 0; at < atoms; ++at) {
      const double w = weight * rule.weights[at];
      for (std::size_t c = 0; c < d; ++c) {
        const double g = std::inner_product(xi_part[c].begin(), xi_part[c].end(), rule.values[at].begin(), 0.0);
        pw[c][0] = 1.0;
        for (int e = 1; e <= max_total_order; ++e) pw[c][e] = pw[c][e - 1] * g;
      }
      for (std::size_t r = 0; r < idx.size(); ++r) {
        double v = w;
        for (std::size_t c = 0; c < d; ++c) v *= pw[c][idx[r][c]];
        acc[r] += v;
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (++node[i] < static_cast<std::size_t>(plan.points[i])) break;
      node[i] = 0;
    }
  }
  for (std::size_t r = 0; r < idx.size(); ++r) table[r] = acc[r];
  return table;
}

}  // namespace dgpc
