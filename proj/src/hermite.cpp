#include "dgpc/hermite.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <Eigen/Dense>

#include "dgpc/errors.hpp"

namespace dgpc {

namespace {

constexpr int kExactFactorialMax = 20;

double log_factorial(int n) {
  static const auto table = [] {
    std::array<double, kExactFactorialMax + 1> t{};
    double f = 1.0;
    t[0] = 0.0;
    for (int i = 1; i <= kExactFactorialMax; ++i) {
      f *= i;
      t[i] = std::log(f);
    }
    return t;
  }();
  if (n <= kExactFactorialMax) return table[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double binomial_real(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k)));
}

}  // namespace

double hermite_eval(int n, double x) {
  if (n < 0) throw InvalidArgument("Hermite degree must be non-negative");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < n; ++k) {
    const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
                        std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
  }
  return cur;
}

GaussRule gauss_hermite_rule(int n) {
  if (n < 1) throw InvalidArgument("Gauss-Hermite rule needs at least one node");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jacobi(k - 1, k) = jacobi(k, k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    // the rule is symmetric; pairing nodes removes the solver's asymmetry
    rule.nodes[k] = 0.5 * (eig.eigenvalues()(k) - eig.eigenvalues()(n - 1 - k));
  }
  // Christoffel weights 1 / sum_j H_j(x)^2 are accurate in the tails.
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = rule.nodes[k];
    double prev = 0.0, cur = 1.0, sum = 1.0;
    for (int j = 1; j < n; ++j) {
      const double next = (x * cur - std::sqrt(static_cast<double>(j - 1)) * prev) / std::sqrt(static_cast<double>(j));
      prev = cur;
      cur = next;
      sum += cur * cur;
    }
    rule.weights[k] = 1.0 / sum;
    total += rule.weights[k];
  }
  for (auto& w : rule.weights) w /= total;
  return rule;
}

double triple_product_1d(int a, int b, int c) {
  if (a < 0 || b < 0 || c < 0) throw InvalidArgument("Hermite degree must be non-negative");
  if ((a + b + c) % 2 != 0) return 0.0;
  const int s = (a + b + c) / 2;
  if (s < a || s < b || s < c) return 0.0;
  const double log_value = 0.5 * (log_factorial(a) + log_factorial(b) + log_factorial(c)) -
                           log_factorial(s - a) - log_factorial(s - b) - log_factorial(s - c);
  return std::exp(log_value);
}

double product_coefficient(const MultiIndex& alpha, const MultiIndex& beta,
                           const MultiIndex& gamma) {
  if (alpha.dim() != beta.dim() || alpha.dim() != gamma.dim())
    throw InvalidArgument("product coefficient: dimension mismatch");
  if (!beta.dominated_by(alpha))
    throw InvalidArgument("product coefficient requires beta <= alpha componentwise");
  double prod = 1.0;
  for (std::size_t i = 0; i < alpha.dim(); ++i) {
    const int a = alpha[i], b = beta[i], g = gamma[i];
    prod *= binomial_real(a, b) * binomial_real(b + g, g) * binomial_real(a - b + g, g);
  }
  return std::sqrt(prod);
}

XiTripleTensor build_xi_triple_tensor(const MultiIndexSet& basis) {
  const std::size_t m = basis.size();
  const std::size_t dim = basis.dim();
  std::vector<TripleEntry> entries;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& ai = basis[i];
    for (std::size_t j = i; j < m; ++j) {
      const auto& aj = basis[j];
      for (std::size_t k = j; k < m; ++k) {
        const auto& ak = basis[k];
        if ((ai.degree() + aj.degree() + ak.degree()) % 2 != 0) continue;
        double value = 1.0;
        for (std::size_t d = 0; d < dim && value != 0.0; ++d)
          value *= triple_product_1d(ai[d], aj[d], ak[d]);
        if (value != 0.0)
          entries.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                             static_cast<std::uint32_t>(k), value});
      }
    }
  }
  return TripleTensor(m, std::move(entries));
}

namespace {

template <class T>
void put_le(std::ostream& os, T value) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
    throw IoError("truncated triple tensor cache");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void save_xi_tensor(const std::filesystem::path& path, const MultiIndexSet& basis,
                    const XiTripleTensor& tensor) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(basis.dim()));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(basis.max_degree()));
  put_le<std::uint64_t>(os, tensor.nonzero_count());
  for (const auto& e : tensor.unique_entries()) {
    put_le(os, e.i);
    put_le(os, e.j);
    put_le(os, e.k);
    put_le(os, e.value);
  }
  if (!os) throw IoError("failed writing " + path.string());
}

XiTripleTensor load_xi_tensor(const std::filesystem::path& path, const MultiIndexSet& basis) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  const auto dim = get_le<std::uint32_t>(is);
  const auto degree = get_le<std::uint32_t>(is);
  if (dim != basis.dim() || static_cast<int>(degree) != basis.max_degree())
    throw IoError("triple tensor cache was built for a different (K,N)");
  const auto count = get_le<std::uint64_t>(is);
  std::vector<TripleEntry> entries;
  entries.reserve(count);
  for (std::uint64_t n = 0; n < count; ++n) {
    TripleEntry e{};
    e.i = get_le<std::uint32_t>(is);
    e.j = get_le<std::uint32_t>(is);
    e.k = get_le<std::uint32_t>(is);
    e.value = get_le<double>(is);
    entries.push_back(e);
  }
  return TripleTensor(basis.size(), std::move(entries));
}

}  // namespace dgpc
