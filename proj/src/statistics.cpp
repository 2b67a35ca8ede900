#include "dgpc/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dgpc/errors.hpp"

namespace dgpc {

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::vector<double> cumulants_from_moments(std::span<const double> raw, int order) {
  if (order < 1) throw InvalidArgument("cumulant order must be >= 1");
  if (raw.size() < static_cast<std::size_t>(order) + 1)
    throw MissingMoment("cumulants to order " + std::to_string(order) + " need moments m_0..m_" +
                        std::to_string(order));
  std::vector<double> kappa(static_cast<std::size_t>(order) + 1, 0.0);
  for (int n = 1; n <= order; ++n) {
    double k = raw[n];
    for (int j = 1; j < n; ++j) k -= binom(n - 1, j - 1) * kappa[j] * raw[n - j];
    kappa[n] = k;
  }
  return kappa;
}

std::vector<double> cumulants_from_moments(const MomentTable& univariate, int order) {
  if (univariate.dim() != 1) throw InvalidArgument("expected a univariate moment table");
  return cumulants_from_moments(univariate.values(), order);
}

namespace {

// Enumerate set partitions of {0..n-1} as restricted growth strings.
template <class F>
void for_each_partition(int n, F&& visit) {
  std::vector<int> block(static_cast<std::size_t>(n), 0);
  std::vector<int> max_before(static_cast<std::size_t>(n), 0);
  while (true) {
    visit(block);
    int i = n - 1;
    while (i > 0 && block[i] == max_before[i] + 1) --i;
    if (i <= 0) return;
    ++block[i];
    for (int j = i + 1; j < n; ++j) {
      block[j] = 0;
      max_before[j] = std::max(max_before[j - 1], block[j - 1]);
    }
  }
}

}  // namespace

double joint_cumulant(const MomentTable& raw, const MultiIndex& exponent) {
  const int n = exponent.degree();
  if (n == 0) return 0.0;
  if (n > 6) throw InvalidArgument("joint cumulants are limited to total order 6");
  const std::size_t d = raw.dim();
  std::vector<int> label;
  for (std::size_t i = 0; i < d; ++i)
    for (int r = 0; r < exponent[i]; ++r) label.push_back(static_cast<int>(i));

  double factorial[7] = {1, 1, 2, 6, 24, 120, 720};
  double total = 0.0;
  for_each_partition(n, [&](const std::vector<int>& block) {
    const int nblocks = *std::max_element(block.begin(), block.end()) + 1;
    std::vector<std::vector<int>> exps(static_cast<std::size_t>(nblocks), std::vector<int>(d, 0));
    for (int p = 0; p < n; ++p) ++exps[block[p]][label[p]];
    double prod = 1.0;
    for (auto& e : exps) prod *= raw.at(MultiIndex(e));
    const double sign = (nblocks - 1) % 2 == 0 ? 1.0 : -1.0;
    total += sign * factorial[nblocks - 1] * prod;
  });
  return total;
}

std::size_t CrossCumulants::slot(int i, int j) const {
  if (i < 0 || j < 0 || i + j > max_total_) throw InvalidArgument("cross cumulant index out of range");
  // rows i = 0.. have (max_total - i + 1) entries
  std::size_t s = 0;
  for (int r = 0; r < i; ++r) s += static_cast<std::size_t>(max_total_ - r + 1);
  return s + static_cast<std::size_t>(j);
}

CrossCumulants::CrossCumulants(const MomentTable& raw, int max_total) : max_total_(max_total) {
  if (raw.dim() != 2) throw InvalidArgument("cross cumulants need a bivariate moment table");
  if (max_total > raw.max_order()) throw MissingMoment("moment table too short for cross cumulants");
  values_.assign(static_cast<std::size_t>((max_total + 1) * (max_total + 2) / 2), 0.0);
  for (int i = 0; i <= max_total; ++i)
    for (int j = 0; i + j <= max_total; ++j)
      values_[slot(i, j)] = joint_cumulant(raw, MultiIndex({i, j}));
}

double CrossCumulants::operator()(int i, int j) const { return values_.at(slot(i, j)); }

CrossCumulants CrossCumulants::scaled(double su, double sv) const {
  CrossCumulants out = *this;
  for (int i = 0; i <= max_total_; ++i)
    for (int j = 0; i + j <= max_total_; ++j)
      out.values_[slot(i, j)] *= std::pow(su, i) * std::pow(sv, j);
  return out;
}

CrossCumulants cross_cumulants(const MomentTable& raw_bivariate, int max_total) {
  return CrossCumulants(raw_bivariate, max_total);
}

CumulantReport make_cumulant_report(double time, std::span<const double> mean,
                                    std::span<const double> stddev, const std::vector<bool>& active,
                                    const MomentTable* standardized_active, int order) {
  const std::size_t d = mean.size();
  CumulantReport rep;
  rep.time = time;
  rep.univariate.assign(d, std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0));
  rep.kurtosis_excess.assign(d, kNaN);
  std::size_t slot = 0;
  for (std::size_t c = 0; c < d; ++c) {
    auto& k = rep.univariate[c];
    if (!active[c]) {
      k[1] = mean[c];
      continue;
    }
    const auto z = cumulants_from_moments(standardized_active->marginal(slot, order), order);
    const double s = stddev[c];
    k[1] = mean[c] + s * z[1];
    double sp = s;
    for (int n = 2; n <= order; ++n) {
      sp *= s;
      k[n] = sp * z[n];
    }
    if (order >= 4) rep.kurtosis_excess[c] = k[4] / (k[2] * k[2]);
    ++slot;
  }
  if (d == 2) {
    if (active[0] && active[1]) {
      rep.cross = CrossCumulants(*standardized_active, std::min(order, standardized_active->max_order()))
                      .scaled(stddev[0], stddev[1]);
      rep.cross.set(1, 0, rep.univariate[0][1]);
      rep.cross.set(0, 1, rep.univariate[1][1]);
    } else {
      MomentTable zero(2, order);
      zero[0] = 1.0;
      rep.cross = CrossCumulants(zero, order);
      for (int c = 0; c < 2; ++c)
        for (int n = 1; n <= order; ++n)
          rep.cross.set(c == 0 ? n : 0, c == 0 ? 0 : n, rep.univariate[c][n]);
    }
  }
  return rep;
}

std::vector<double> relative_errors(std::span<const double> approx, std::span<const double> reference,
                                    double floor) {
  if (approx.size() != reference.size())
    throw InvalidArgument("relative errors need trajectories on a common grid");
  std::vector<double> out(approx.size());
  for (std::size_t i = 0; i < approx.size(); ++i)
    out[i] = std::abs(reference[i]) > floor ? std::abs((approx[i] - reference[i]) / reference[i]) : kNaN;
  return out;
}

ErrorSummary summarize_errors(std::span<const double> errors) {
  ErrorSummary s;
  std::vector<double> defined;
  for (double e : errors) {
    if (std::isnan(e)) {
      ++s.undefined;
    } else {
      defined.push_back(e);
    }
  }
  s.defined = defined.size();
  if (defined.empty()) {
    s.mean = s.median = s.max = kNaN;
    return s;
  }
  double sum = 0.0;
  for (double e : defined) sum += e;
  s.mean = sum / static_cast<double>(defined.size());
  s.max = *std::max_element(defined.begin(), defined.end());
  std::sort(defined.begin(), defined.end());
  const std::size_t n = defined.size();
  s.median = n % 2 ? defined[n / 2] : 0.5 * (defined[n / 2 - 1] + defined[n / 2]);
  return s;
}

}  // namespace dgpc
