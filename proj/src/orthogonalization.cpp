#include "dgpc/orthogonalization.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dgpc/errors.hpp"

namespace dgpc {

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double monomial(const MultiIndex& e, std::span<const double> z) {
  double p = 1.0;
  for (std::size_t i = 0; i < e.dim(); ++i)
    for (int j = 0; j < e[i]; ++j) p *= z[i];
  return p;
}

double condition_number(const Eigen::MatrixXd& gram) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

OrthonormalBasis::OrthonormalBasis(std::vector<double> mean, std::vector<double> stddev,
                                   MomentTable standardized, Eigen::MatrixXd change_of_basis,
                                   double gram_condition)
    : mean_(std::move(mean)),
      stddev_(std::move(stddev)),
      moments_(std::move(standardized)),
      change_(std::move(change_of_basis)),
      gram_condition_(gram_condition) {
  const auto n = static_cast<std::size_t>(change_.rows());
  int degree = 0;
  while (binomial(mean_.size() + static_cast<std::size_t>(degree), mean_.size()) < n) ++degree;
  monomials_ = MultiIndexSet(mean_.size(), degree);
  if (monomials_.size() != n) throw InvalidArgument("change of basis has a non-simplex size");
}

Eigen::MatrixXd OrthonormalBasis::monomial_coefficients() const {
  const std::size_t n = size();
  const std::size_t d = dim();
  // raw[m][q]: coefficient of v^{e_q} in z^{e_m}
  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t m = 0; m < n; ++m) {
    const auto& em = monomials_[m];
    for (std::size_t q = 0; q <= m; ++q) {
      const auto& eq = monomials_[q];
      if (!eq.dominated_by(em)) continue;
      double w = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        w *= binom(em[i], eq[i]) * std::pow(-mean_[i], em[i] - eq[i]) / std::pow(stddev_[i], em[i]);
      }
      raw(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(q)) = w;
    }
  }
  return change_ * raw;
}

double OrthonormalBasis::evaluate(std::size_t k, std::span<const double> point) const {
  if (point.size() != dim()) throw InvalidArgument("evaluation point dimension mismatch");
  std::vector<double> z(dim());
  for (std::size_t i = 0; i < dim(); ++i) z[i] = (point[i] - mean_[i]) / stddev_[i];
  double s = 0.0;
  for (std::size_t m = 0; m <= k; ++m)
    s += change_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) * monomial(monomials_[m], z);
  return s;
}

namespace {

Eigen::MatrixXd gram_matrix(const MultiIndexSet& monomials, const MomentTable& moments) {
  const auto n = static_cast<Eigen::Index>(monomials.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b <= a; ++b) {
      const double v = moments.at(monomials[a] + monomials[b]);
      g(a, b) = v;
      g(b, a) = v;
    }
  return g;
}

}  // namespace

Eigen::MatrixXd OrthonormalBasis::gram_through_moments() const {
  const Eigen::MatrixXd g = gram_matrix(monomials_, moments_);
  return change_ * g * change_.transpose();
}

std::vector<double> OrthonormalBasis::coordinate_expansion(std::size_t component) const {
  const std::size_t n = size();
  const MultiIndex ei = MultiIndex::unit(dim(), component);
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t m = 0; m <= k; ++m)
      s += change_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) *
           moments_.at(ei + monomials_[m]);
    out[k] = s;
  }
  return out;
}

OrthonormalBasis orthonormalize(const MomentTable& moments, int degree, double pivot_tolerance) {
  if (degree < 0) throw InvalidArgument("orthonormal basis degree must be non-negative");
  const std::size_t d = moments.dim();
  if (d == 0) throw InvalidArgument("empty moment table");
  if (moments.max_order() < std::max(2 * degree, 2))
    throw MissingMoment("orthonormalization to degree " + std::to_string(degree) + " needs moments to order " +
                        std::to_string(std::max(2 * degree, 2)));
  if (std::abs(moments.at(MultiIndex::zero(d)) - 1.0) > 1e-10)
    throw DegenerateMeasure("moment table is not normalized (E[1] != 1)");

  std::vector<double> mean(d), stddev(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double m1 = moments.pure(i, 1);
    const double m2 = moments.pure(i, 2);
    const double var = m2 - m1 * m1;
    if (!(var > 1e-12 * std::abs(m2)) || !std::isfinite(var))
      throw DegenerateMeasure("component " + std::to_string(i) + " has (near-)zero variance");
    mean[i] = m1;
    stddev[i] = std::sqrt(var);
  }
  MomentTable z = moments.standardized(mean, stddev);

  const MultiIndexSet monomials(d, degree);
  const auto n = static_cast<Eigen::Index>(monomials.size());
  const Eigen::MatrixXd g = gram_matrix(monomials, z);
  auto ip = [&g](const Eigen::VectorXd& p, const Eigen::VectorXd& q) { return p.dot(g * q); };

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    p(m) = 1.0;
    const double original = g(m, m);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < m; ++k) {
        const Eigen::VectorXd tk = c.row(k).transpose();
        p -= ip(p, tk) * tk;
      }
    }
    const double norm2 = ip(p, p);
    if (!(norm2 > pivot_tolerance * original))
      throw DegenerateMeasure("Gram-Schmidt pivot " + std::to_string(norm2) +
                              " below tolerance at monomial " + std::to_string(m));
    c.row(m) = p.transpose() / std::sqrt(norm2);
  }
  // T_0 = 1 exactly
  c.row(0).setZero();
  c(0, 0) = 1.0;

  return OrthonormalBasis(std::move(mean), std::move(stddev), std::move(z), std::move(c),
                          condition_number(g));
}

OrthonormalBasis orthonormalize_up_to(const MomentTable& moments, int max_degree, double pivot_tolerance) {
  for (int deg = max_degree; deg > 1; --deg) {
    try {
      return orthonormalize(moments, deg, pivot_tolerance);
    } catch (const DegenerateMeasure&) {
    }
  }
  return orthonormalize(moments, std::min(max_degree, 1), pivot_tolerance);
}

GaussRule gauss_rule_from_moments(std::span<const double> moments, int n) {
  if (n < 1) throw InvalidArgument("Gauss rule needs at least one node");
  if (moments.size() < static_cast<std::size_t>(2 * n))
    throw MissingMoment("Gauss rule with " + std::to_string(n) + " nodes needs moments to order " +
                        std::to_string(2 * n - 1));
  if (!(moments[0] > 0.0)) throw DegenerateMeasure("moment m_0 must be positive");
  GaussRule rule;
  if (n == 1) {
    rule.nodes = {moments[1] / moments[0]};
    rule.weights = {1.0};
    return rule;
  }
  const int top = 2 * (n - 1);
  const MomentTable table(1, top, std::vector<double>(moments.begin(), moments.begin() + top + 1));
  const OrthonormalBasis basis = orthonormalize_up_to(table, n - 1);
  // Jacobi matrix E[v T_k T_l] in the raw variable
  const Eigen::MatrixXd c = basis.monomial_coefficients();
  const auto r = c.rows();
  Eigen::MatrixXd shifted(r, r);
  for (Eigen::Index a = 0; a < r; ++a)
    for (Eigen::Index b = 0; b < r; ++b) shifted(a, b) = moments[static_cast<std::size_t>(a + b + 1)] / moments[0];
  const Eigen::MatrixXd jacobi = c * shifted * c.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (jacobi + jacobi.transpose()));
  for (Eigen::Index k = 0; k < r; ++k) {
    rule.nodes.push_back(eig.eigenvalues()(k));
    const double v = eig.eigenvectors()(0, k);
    rule.weights.push_back(v * v);
  }
  return rule;
}

StateTripleTensor state_triple_products(const OrthonormalBasis& basis) {
  const std::size_t d = basis.dim();
  const int deg = basis.degree();
  const auto& moments = basis.source_moments();
  if (moments.max_order() < 3 * deg)
    throw MissingMoment("state triple products need moments to order " + std::to_string(3 * deg));
  const auto& mono = basis.monomials();
  const auto& c = basis.change_of_basis();
  const std::size_t n = mono.size();
  const MultiIndexSet pairs(d, 2 * deg);
  const std::size_t np = pairs.size();

  // mx(e, m) = E[z^{e + e_m}] for e in J_{d,2L}, m in J_{d,L}; r = mx * C^T
  Eigen::MatrixXd mx(static_cast<Eigen::Index>(np), static_cast<Eigen::Index>(n));
  for (std::size_t e = 0; e < np; ++e)
    for (std::size_t m = 0; m < n; ++m)
      mx(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(m)) = moments.at(pairs[e] + mono[m]);
  const Eigen::MatrixXd r = mx * c.transpose();

  std::vector<std::vector<std::size_t>> sum_rank(n, std::vector<std::size_t>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) sum_rank[a][b] = pairs.rank(mono[a] + mono[b]);

  std::vector<TripleEntry> entries;
  Eigen::VectorXd q(static_cast<Eigen::Index>(np));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k; l < n; ++l) {
      if (k == 0) {
        entries.push_back({0, static_cast<std::uint32_t>(l), static_cast<std::uint32_t>(l), 1.0});
        continue;
      }
      q.setZero();
      for (std::size_t a = 0; a <= k; ++a)
        for (std::size_t b = 0; b <= l; ++b)
          q(static_cast<Eigen::Index>(sum_rank[a][b])) +=
              c(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(a)) *
              c(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(b));
      for (std::size_t m = l; m < n; ++m) {
        const double v = q.dot(r.col(static_cast<Eigen::Index>(m)));
        if (std::abs(v) > 1e-13)
          entries.push_back({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(l),
                             static_cast<std::uint32_t>(m), v});
      }
    }
  }
  return TripleTensor(n, std::move(entries));
}

std::vector<ChaosExpansion> initial_condition_coeffs(std::span<const double> mean,
                                                     std::span<const double> stddev,
                                                     const OrthonormalBasis& basis,
                                                     std::size_t xi_size) {
  const std::size_t d = basis.dim();
  if (mean.size() != d || stddev.size() != d)
    throw InvalidArgument("initial condition: one mean and std per basis variable required");
  std::vector<ChaosExpansion> out;
  out.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (!(stddev[i] > 0.0))
      throw DegenerateMeasure("initial condition needs a positive standard deviation");
    ChaosExpansion e(xi_size, basis.size());
    e(0, 0) = mean[i];
    const auto z = basis.coordinate_expansion(i);
    // z_i lies in the span of the degree-1 rows
    for (std::size_t k = 1; k <= d && k < basis.size(); ++k) e(0, k) = stddev[i] * z[k];
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace dgpc
