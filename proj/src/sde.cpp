#include "dgpc/sde.hpp"

#include <cmath>

#include "dgpc/errors.hpp"

namespace dgpc {

double InitialLaw::mean() const {
  switch (kind) {
    case Kind::Gaussian: return first;
    case Kind::Uniform: return 0.5 * (first + second);
    case Kind::Point: return first;
  }
  return 0.0;
}

double InitialLaw::variance() const {
  switch (kind) {
    case Kind::Gaussian: return second;
    case Kind::Uniform: return (second - first) * (second - first) / 12.0;
    case Kind::Point: return 0.0;
  }
  return 0.0;
}

double InitialLaw::raw_moment(int k) const {
  if (k < 0) throw InvalidArgument("negative moment order");
  switch (kind) {
    case Kind::Gaussian: {
      double prev = 1.0, cur = first;
      if (k == 0) return 1.0;
      for (int j = 2; j <= k; ++j) {
        const double next = first * cur + (j - 1) * second * prev;
        prev = cur;
        cur = next;
      }
      return cur;
    }
    case Kind::Uniform:
      return (std::pow(second, k + 1) - std::pow(first, k + 1)) / ((k + 1) * (second - first));
    case Kind::Point: return std::pow(first, k);
  }
  return 0.0;
}

double InitialLaw::standardized_moment(int k) const {
  if (k < 0) throw InvalidArgument("negative moment order");
  if (deterministic()) throw DegenerateMeasure("point mass has no standardized moments");
  if (k % 2 == 1) return 0.0;
  switch (kind) {
    case Kind::Gaussian: {
      double r = 1.0;
      for (int j = k - 1; j > 1; j -= 2) r *= j;
      return r;
    }
    case Kind::Uniform: return std::pow(3.0, k / 2) / (k + 1);
    case Kind::Point: break;
  }
  return 0.0;
}

double DeterministicForcing::operator()(double t) const {
  if (custom) return custom(t);
  return c0 + c1 * std::cos(2.0 * t + 1.0) + c2 * std::cos(4.0 * t);
}

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::OU: return "ou";
    case ModelKind::CubicOU: return "cubic_ou";
    case ModelKind::RandomDampingOU: return "random_damping_ou";
    case ModelKind::SquaredWienerForcing: return "squared_wiener";
    case ModelKind::CoupledSystem: return "coupled";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& name) {
  for (auto k : {ModelKind::OU, ModelKind::CubicOU, ModelKind::RandomDampingOU,
                 ModelKind::SquaredWienerForcing, ModelKind::CoupledSystem})
    if (name == model_kind_name(k)) return k;
  throw ConfigError("unknown model kind '" + name + "'");
}

std::size_t SdeModel::state_dim() const { return kind == ModelKind::OU || kind == ModelKind::CubicOU ? 1 : 2; }

std::size_t SdeModel::wiener_processes() const { return kind == ModelKind::CoupledSystem ? 2 : 1; }

std::vector<std::string> SdeModel::component_names() const {
  switch (kind) {
    case ModelKind::OU:
    case ModelKind::CubicOU: return {"u"};
    case ModelKind::RandomDampingOU: return {"u", "b"};
    case ModelKind::SquaredWienerForcing: return {"u", "w"};
    case ModelKind::CoupledSystem: return {"u", "v"};
  }
  return {};
}

void SdeModel::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  if (kind != ModelKind::RandomDampingOU) require(b_u > 0.0, "damping must be positive (b_u)");
  if (kind == ModelKind::CoupledSystem) {
    require(b_v > 0.0, "damping must be positive (b_v)");
    require(a_u >= 0.0 && a_v >= 0.0, "coupling coefficients must be non-negative (a_u, a_v)");
    require(sigma_v >= 0.0, "noise amplitude must be non-negative (sigma_v)");
  }
  require(sigma_u >= 0.0, "noise amplitude must be non-negative (sigma_u)");
  if (kind == ModelKind::CubicOU) require(cubic >= 0.0, "cubic damping must be non-negative");
  require(initial.size() == state_dim(),
          "expected " + std::to_string(state_dim()) + " initial laws, got " + std::to_string(initial.size()));
  for (const auto& law : initial) {
    if (law.kind == InitialLaw::Kind::Gaussian) require(law.second >= 0.0, "Gaussian variance must be non-negative");
    if (law.kind == InitialLaw::Kind::Uniform) require(law.second > law.first, "uniform law needs lo < hi");
  }
  if (kind == ModelKind::RandomDampingOU) {
    const auto& b = initial[1];
    const double lo = b.kind == InitialLaw::Kind::Uniform ? b.first : b.mean();
    require(b.kind != InitialLaw::Kind::Gaussian, "random damping law must have bounded support");
    require(lo > 0.0, "damping must be positive (random damping support)");
  }
  if (kind == ModelKind::SquaredWienerForcing)
    require(initial[1].kind == InitialLaw::Kind::Point && initial[1].first == 0.0,
            "the Wiener component must start at W(0) = 0");
}

GalerkinSystem::GalerkinSystem(SdeModel model, const MultiIndexSet& xi_basis, BasisProducts products,
                               ForcingBasis forcing)
    : model_(std::move(model)),
      products_(std::move(products)),
      forcing_(std::move(forcing)),
      dim_(model_.state_dim()) {
  if (products_.xi_size() != xi_basis.size())
    throw InvalidArgument("xi triple products do not match the xi basis");
  if (forcing_.processes() != model_.wiener_processes())
    throw InvalidArgument("forcing basis has the wrong number of Wiener processes");
  if (static_cast<std::size_t>(forcing_.total_modes()) != xi_basis.dim() &&
      !(forcing_.total_modes() == 0 && xi_basis.max_degree() == 0))
    throw InvalidArgument("xi basis dimension must equal the number of forcing modes");
  const std::size_t ns = products_.state_size();
  noise_slots_.resize(forcing_.processes());
  for (std::size_t p = 0; p < forcing_.processes(); ++p) {
    for (int i = 1; i <= forcing_.modes(p); ++i) {
      if (xi_basis.max_degree() < 1) throw InvalidArgument("xi basis of degree 0 cannot carry noise");
      const std::size_t r = xi_basis.unit_rank(forcing_.coordinate(p, i));
      noise_slots_[p].push_back({r * ns, i});
    }
  }
  scratch_a_.resize(products_.size());
  scratch_b_.resize(products_.size());
}

void GalerkinSystem::add_noise(std::size_t process, double scale, double t,
                               std::span<double> out) const {
  if (scale == 0.0) return;
  for (const auto& [slot, mode] : noise_slots_[process])
    out[slot] += scale * forcing_.basis_function(mode, t);
}

void GalerkinSystem::rhs(double t, std::span<const double> y, std::span<double> dy) const {
  const std::size_t m = products_.size();
  if (y.size() != dim_ * m || dy.size() != dim_ * m)
    throw InvalidArgument("Galerkin state has the wrong length");
  auto u = y.subspan(0, m);
  auto du = dy.subspan(0, m);
  const double f = model_.forcing(t);

  switch (model_.kind) {
    case ModelKind::OU:
      for (std::size_t i = 0; i < m; ++i) du[i] = -model_.b_u * u[i];
      break;
    case ModelKind::CubicOU: {
      multiply_into(u, u, products_, scratch_a_, work_);
      multiply_into(scratch_a_, u, products_, scratch_b_, work_);
      for (std::size_t i = 0; i < m; ++i) du[i] = -model_.b_u * u[i] - model_.cubic * scratch_b_[i];
      break;
    }
    case ModelKind::RandomDampingOU: {
      auto b = y.subspan(m, m);
      multiply_into(b, u, products_, scratch_a_, work_);
      for (std::size_t i = 0; i < m; ++i) du[i] = -scratch_a_[i];
      std::fill(dy.begin() + static_cast<std::ptrdiff_t>(m), dy.end(), 0.0);
      break;
    }
    case ModelKind::SquaredWienerForcing: {
      auto w = y.subspan(m, m);
      auto dw = dy.subspan(m, m);
      std::fill(dw.begin(), dw.end(), 0.0);
      add_noise(0, 1.0, t, dw);
      // Stratonovich form: d(W^2 - s) = 2 W o dW - ds
      multiply_into(w, dw, products_, scratch_a_, work_);
      for (std::size_t i = 0; i < m; ++i) du[i] = -model_.b_u * u[i] + 2.0 * model_.sigma_u * scratch_a_[i];
      du[0] -= model_.sigma_u;
      break;
    }
    case ModelKind::CoupledSystem: {
      auto v = y.subspan(m, m);
      auto dv = dy.subspan(m, m);
      if (model_.a_u != 0.0 || model_.a_v != 0.0) {
        multiply_into(u, v, products_, scratch_a_, work_);
      } else {
        std::fill(scratch_a_.begin(), scratch_a_.end(), 0.0);
      }
      for (std::size_t i = 0; i < m; ++i) {
        du[i] = -model_.b_u * u[i] - model_.a_u * scratch_a_[i];
        dv[i] = -model_.b_v * v[i] - model_.a_v * scratch_a_[i];
      }
      add_noise(1, model_.sigma_v, t, dv);
      break;
    }
  }
  du[0] += f;
  if (model_.kind != ModelKind::SquaredWienerForcing) add_noise(0, model_.sigma_u, t, du);
}

GalerkinSystem assemble(const SdeModel& model, const MultiIndexSet& xi_basis,
                        const BasisProducts& products, const ForcingBasis& forcing) {
  model.validate();
  return GalerkinSystem(model, xi_basis, products, forcing);
}

std::vector<double> integrate_ode(const RhsFunction& rhs, std::vector<double> y, double t0,
                                  double t1, double h, int order) {
  if (order != 2 && order != 4) throw InvalidArgument("integrator order must be 2 or 4");
  if (!(h > 0.0)) throw InvalidArgument("time step must be positive");
  if (t1 < t0) throw InvalidArgument("integration interval is reversed");
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  double t = t0;
  const double slack = 1e-9 * h;
  while (t1 - t > slack) {
    const double step = (t1 - t) < h + slack ? t1 - t : h;
    if (order == 4) {
      rhs(t, y, k1);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * step * k1[i];
      rhs(t + 0.5 * step, tmp, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * step * k2[i];
      rhs(t + 0.5 * step, tmp, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + step * k3[i];
      rhs(t + step, tmp, k4);
      for (std::size_t i = 0; i < n; ++i)
        y[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    } else {
      rhs(t, y, k1);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + step * k1[i];
      rhs(t + step, tmp, k2);
      for (std::size_t i = 0; i < n; ++i) y[i] += 0.5 * step * (k1[i] + k2[i]);
    }
    t = (t1 - t) < h + slack ? t1 : t + step;
    for (double v : y)
      if (!std::isfinite(v)) throw NonFinite("coefficient blow-up at t = " + std::to_string(t));
  }
  return y;
}

std::vector<double> integrate(const GalerkinSystem& system, std::vector<double> coeffs0, double t0,
                              double t1, double h, int order) {
  return integrate_ode(
      [&system](double t, std::span<const double> y, std::span<double> dy) { system.rhs(t, y, dy); },
      std::move(coeffs0), t0, t1, h, order);
}

}  // namespace dgpc
