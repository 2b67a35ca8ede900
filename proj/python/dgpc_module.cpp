#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dgpc/cli_io.hpp"
#include "dgpc/driver.hpp"
#include "dgpc/errors.hpp"
#include "dgpc/hermite.hpp"
#include "dgpc/oracles.hpp"
#include "dgpc/orthogonalization.hpp"
#include "dgpc/statistics.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::array_t<double> to_matrix(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n ? rows.front().size() : 0;
  py::array_t<double> out({n, m});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) a(i, j) = rows[i][j];
  return out;
}

// Trajectory as {"time", "components", "mean", "variance", "cumulants", ...};
// per-component arrays are indexed [component, time].
py::dict trajectory_dict(const dgpc::Trajectory& t) {
  const std::size_t d = t.components.size();
  std::vector<double> time;
  std::vector<std::vector<double>> mean(d), var(d), eps_mean(d), eps_var(d);
  std::vector<std::vector<double>> cum;
  std::vector<double> cum_time;
  for (const auto& r : t.rows) {
    time.push_back(r.time);
    for (std::size_t c = 0; c < d; ++c) {
      mean[c].push_back(r.mean[c]);
      var[c].push_back(r.variance[c]);
      if (t.has_reference) {
        eps_mean[c].push_back(r.eps_mean[c]);
        eps_var[c].push_back(r.eps_var[c]);
      }
    }
    if (r.cumulants) {
      cum_time.push_back(r.time);
      for (std::size_t c = 0; c < d; ++c) cum.push_back(r.cumulants->univariate[c]);
    }
  }
  py::dict out;
  out["components"] = t.components;
  out["time"] = to_array(time);
  out["mean"] = to_matrix(mean);
  out["variance"] = to_matrix(var);
  if (t.has_reference) {
    out["eps_mean"] = to_matrix(eps_mean);
    out["eps_var"] = to_matrix(eps_var);
  }
  // cumulants[k, c, n] = kappa_n of component c at cumulant_time[k]
  const std::size_t nk = cum_time.size();
  const std::size_t width = cum.empty() ? 0 : cum.front().size();
  py::array_t<double> kappa({nk, d, width});
  auto a = kappa.mutable_unchecked<3>();
  for (std::size_t k = 0; k < nk; ++k)
    for (std::size_t c = 0; c < d; ++c)
      for (std::size_t n = 0; n < width; ++n) a(k, c, n) = cum[k * d + c][n];
  out["cumulant_time"] = to_array(cum_time);
  out["cumulants"] = kappa;
  return out;
}

dgpc::RunConfig config_from(const std::string& text) { return dgpc::parse_config(text); }

}  // namespace

PYBIND11_MODULE(_dgpc, m) {
  m.doc() = "Dynamical generalized polynomial chaos for SDEs";
  m.attr("__version__") = "0.1.0";

  auto base = py::register_exception<dgpc::Error>(m, "DgpcError", PyExc_RuntimeError);
  py::register_exception<dgpc::ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<dgpc::DegenerateMeasure>(m, "DegenerateMeasure", base.ptr());
  py::register_exception<dgpc::MissingMoment>(m, "MissingMoment", base.ptr());
  py::register_exception<dgpc::NonFinite>(m, "NonFinite", base.ptr());
  py::register_exception<dgpc::NonIntegrable>(m, "NonIntegrable", base.ptr());
  py::register_exception<dgpc::IoError>(m, "IoError", base.ptr());
  py::register_exception<dgpc::InvalidArgument>(m, "InvalidArgument", base.ptr());

  m.def("canonical_config", [](const std::string& text) { return dgpc::to_json(config_from(text)); },
        "config"_a, "Parse and validate a JSON run configuration; returns its canonical form.");

  m.def(
      "run_dgpc",
      [](const std::string& text) {
        const auto cfg = config_from(text);
        dgpc::DgpcResult r;
        {
          py::gil_scoped_release release;
          r = dgpc::run_dgpc(cfg.method, cfg.model);
        }
        return trajectory_dict(dgpc::trajectory_of(r));
      },
      "config"_a, "Restarted expansion; statistics at every output time.");

  m.def(
      "run_hermite",
      [](const std::string& text) {
        const auto cfg = config_from(text);
        dgpc::DgpcResult r;
        {
          py::gil_scoped_release release;
          r = dgpc::run_hermite_pc(cfg.method, cfg.model);
        }
        return trajectory_dict(dgpc::trajectory_of(r));
      },
      "config"_a, "Single Hermite expansion over the whole horizon.");

  m.def(
      "monte_carlo",
      [](const std::string& text) {
        const auto cfg = config_from(text);
        dgpc::McResult r;
        {
          py::gil_scoped_release release;
          r = dgpc::mc_simulate(cfg.model, dgpc::mc_config_of(cfg));
        }
        return trajectory_dict(dgpc::trajectory_of(r));
      },
      "config"_a);

  m.def(
      "run",
      [](const std::string& text) {
        const auto cfg = config_from(text);
        std::ostringstream out;
        dgpc::Trajectory t;
        {
          py::gil_scoped_release release;
          t = dgpc::run_config(cfg, out);
        }
        py::dict d = trajectory_dict(t);
        d["csv"] = out.str();
        return d;
      },
      "config"_a, "Run the configured command; the CSV text is returned under 'csv' when no output path is set.");

  m.def(
      "run_experiment",
      [](const std::string& name, const std::string& out_dir, const std::string& preset_dir) {
        py::gil_scoped_release release;
        return dgpc::run_experiment(name, out_dir, preset_dir.empty() ? dgpc::default_preset_dir() : std::filesystem::path(preset_dir));
      },
      "name"_a, "out_dir"_a, "preset_dir"_a = "");

  m.def("invariant_cumulants", &dgpc::invariant_cumulants_1d, "drift"_a, "sigma"_a, "order"_a = 6,
        "Cumulants of the stationary density of du = p(u) ds + sigma dW; drift holds the coefficients of p.");

  m.def(
      "cumulants_from_moments",
      [](const std::vector<double>& moments) {
        return dgpc::cumulants_from_moments(moments, static_cast<int>(moments.size()) - 1);
      },
      "moments"_a, "Raw moments m_0..m_n to cumulants (index 0 is unused).");

  m.def("hermite", &dgpc::hermite_eval, "n"_a, "x"_a, "Normalized probabilists' Hermite polynomial.");
  m.def("hermite_triple", &dgpc::triple_product_1d, "a"_a, "b"_a, "c"_a);

  m.def(
      "gauss_hermite",
      [](int n) {
        const auto g = dgpc::gauss_hermite_rule(n);
        return py::make_tuple(to_array(g.nodes), to_array(g.weights));
      },
      "n"_a, "Nodes and weights of the n-point Gauss rule for N(0,1).");

  m.def(
      "orthonormal_polynomials",
      [](const std::vector<double>& moments, int degree) {
        const dgpc::MomentTable table(1, static_cast<int>(moments.size()) - 1, moments);
        const auto basis = dgpc::orthonormalize(table, degree);
        const Eigen::MatrixXd c = basis.monomial_coefficients();
        py::array_t<double> out({c.rows(), c.cols()});
        auto a = out.mutable_unchecked<2>();
        for (Eigen::Index i = 0; i < c.rows(); ++i)
          for (Eigen::Index j = 0; j < c.cols(); ++j) a(i, j) = c(i, j);
        return out;
      },
      "moments"_a, "degree"_a,
      "Orthonormal polynomials of a univariate measure; row k holds the monomial coefficients of T_k.");
}
