#include "dgpc/cli_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "dgpc/errors.hpp"

namespace dgpc {

using json = nlohmann::ordered_json;

const char* command_name(Command c) {
  switch (c) {
    case Command::Dgpc: return "dgpc";
    case Command::Hermite: return "hermite";
    case Command::Mc: return "mc";
    case Command::Invariant: return "invariant";
    case Command::Compare: return "compare";
    case Command::Sweep: return "sweep";
  }
  return "?";
}

const char* oracle_kind_name(OracleKind k) {
  switch (k) {
    case OracleKind::Auto: return "auto";
    case OracleKind::Exact: return "exact";
    case OracleKind::Mc: return "mc";
    case OracleKind::Invariant: return "invariant";
    case OracleKind::None: return "none";
  }
  return "?";
}

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

double num(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("key '" + std::string(key) + "' in " + where + " must be a number");
  return v.get<double>();
}

long long integer(const json& obj, const char* key, long long fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw ConfigError("key '" + std::string(key) + "' in " + where + " must be an integer");
  return v.get<long long>();
}

std::string text(const json& obj, const char* key, const std::string& fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError("key '" + std::string(key) + "' in " + where + " must be a string");
  return v.get<std::string>();
}

InitialLaw parse_law(const json& j, const std::string& where) {
  const std::string law = text(j, "law", "", where);
  if (law == "gaussian") {
    check_keys(j, {"law", "mean", "variance"}, where);
    return InitialLaw::gaussian(num(j, "mean", 0.0, where), num(j, "variance", 0.0, where));
  }
  if (law == "uniform") {
    check_keys(j, {"law", "lo", "hi"}, where);
    if (!j.contains("lo") || !j.contains("hi")) throw ConfigError(where + ": uniform law needs lo and hi");
    return InitialLaw::uniform(num(j, "lo", 0.0, where), num(j, "hi", 0.0, where));
  }
  if (law == "point") {
    check_keys(j, {"law", "value"}, where);
    return InitialLaw::point(num(j, "value", 0.0, where));
  }
  throw ConfigError(where + ": unsupported law '" + law + "' (gaussian, uniform, point)");
}

json law_json(const InitialLaw& law) {
  json j;
  switch (law.kind) {
    case InitialLaw::Kind::Gaussian:
      j["law"] = "gaussian";
      j["mean"] = law.first;
      j["variance"] = law.second;
      break;
    case InitialLaw::Kind::Uniform:
      j["law"] = "uniform";
      j["lo"] = law.first;
      j["hi"] = law.second;
      break;
    case InitialLaw::Kind::Point:
      j["law"] = "point";
      j["value"] = law.first;
      break;
  }
  return j;
}

SdeModel parse_model(const json& j) {
  check_keys(j, {"kind", "b_u", "b_v", "a_u", "a_v", "sigma_u", "sigma_v", "cubic", "forcing", "initial"}, "model");
  if (!j.contains("kind")) throw ConfigError("model block needs a 'kind'");
  SdeModel m;
  m.kind = parse_model_kind(text(j, "kind", "", "model"));
  for (const char* key : {"b_u", "b_v"})
    if (j.contains(key) && !(num(j, key, 1.0, "model") > 0.0))
      throw ConfigError(std::string("damping must be positive (") + key + ")");
  m.b_u = num(j, "b_u", m.b_u, "model");
  m.b_v = num(j, "b_v", m.b_v, "model");
  m.a_u = num(j, "a_u", m.a_u, "model");
  m.a_v = num(j, "a_v", m.a_v, "model");
  m.sigma_u = num(j, "sigma_u", m.sigma_u, "model");
  m.sigma_v = num(j, "sigma_v", m.sigma_v, "model");
  m.cubic = num(j, "cubic", m.cubic, "model");
  if (j.contains("forcing")) {
    const auto& f = j.at("forcing");
    check_keys(f, {"c0", "c1", "c2"}, "model.forcing");
    m.forcing.c0 = num(f, "c0", 0.0, "model.forcing");
    m.forcing.c1 = num(f, "c1", 0.0, "model.forcing");
    m.forcing.c2 = num(f, "c2", 0.0, "model.forcing");
  }
  if (j.contains("initial")) {
    const auto& init = j.at("initial");
    if (!init.is_array()) throw ConfigError("model.initial must be a list of laws");
    for (std::size_t i = 0; i < init.size(); ++i)
      m.initial.push_back(parse_law(init[i], "model.initial[" + std::to_string(i) + "]"));
  } else {
    m.initial.assign(m.state_dim(), InitialLaw::point(0.0));
  }
  m.validate();
  return m;
}

DgpcConfig parse_method(const json& j) {
  check_keys(j, {"K", "N", "L", "n_restarts", "t_end", "integrator", "h", "output_dt", "seed", "moments", "quadrature_budget"},
             "method");
  DgpcConfig c;
  c.K = static_cast<int>(integer(j, "K", c.K, "method"));
  c.N = static_cast<int>(integer(j, "N", c.N, "method"));
  c.L = static_cast<int>(integer(j, "L", c.L, "method"));
  c.n_restarts = static_cast<int>(integer(j, "n_restarts", c.n_restarts, "method"));
  c.t_end = num(j, "t_end", c.t_end, "method");
  const std::string integrator = text(j, "integrator", "rk4", "method");
  if (integrator == "rk4") {
    c.order = 4;
  } else if (integrator == "heun") {
    c.order = 2;
  } else {
    throw ConfigError("method.integrator must be 'rk4' or 'heun'");
  }
  c.h = num(j, "h", c.h, "method");
  c.output_dt = num(j, "output_dt", c.output_dt, "method");
  c.seed = static_cast<std::uint64_t>(integer(j, "seed", 0, "method"));
  c.moment_method = parse_moment_method(text(j, "moments", "auto", "method"));
  const long long budget = integer(j, "quadrature_budget", static_cast<long long>(c.quadrature_budget), "method");
  if (budget < 1) throw ConfigError("quadrature_budget must be >= 1");
  c.quadrature_budget = static_cast<std::size_t>(budget);
  c.validate();
  return c;
}

OracleConfig parse_oracle(const json& j) {
  check_keys(j, {"kind", "samples", "dt", "seed", "batches"}, "oracle");
  OracleConfig o;
  const std::string kind = text(j, "kind", "auto", "oracle");
  bool found = false;
  for (auto k : {OracleKind::Auto, OracleKind::Exact, OracleKind::Mc, OracleKind::Invariant, OracleKind::None})
    if (kind == oracle_kind_name(k)) {
      o.kind = k;
      found = true;
    }
  if (!found) throw ConfigError("unknown oracle kind '" + kind + "'");
  const long long samples = integer(j, "samples", static_cast<long long>(o.samples), "oracle");
  if (samples < 1) throw ConfigError("oracle.samples must be >= 1");
  o.samples = static_cast<std::size_t>(samples);
  o.dt = num(j, "dt", o.dt, "oracle");
  if (!(o.dt > 0.0)) throw ConfigError("oracle.dt must be positive");
  o.seed = static_cast<std::uint64_t>(integer(j, "seed", static_cast<long long>(o.seed), "oracle"));
  o.batches = static_cast<int>(integer(j, "batches", o.batches, "oracle"));
  if (o.batches < 30) throw ConfigError("oracle.batches must be >= 30");
  return o;
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  method.validate();
  if (command == Command::Sweep) {
    if (!sweep) throw ConfigError("sweep command needs a sweep block");
    const std::set<std::string> ok{"K", "N", "L", "n_restarts"};
    if (!ok.count(sweep->parameter)) throw ConfigError("sweep.parameter must be one of K, N, L, n_restarts");
    if (sweep->values.empty()) throw ConfigError("sweep.values must not be empty");
    for (int v : sweep->values)
      if (v < 1) throw ConfigError("sweep values must be >= 1");
  }
  if (baseline) {
    if (baseline->K < 0 || baseline->N < 0 || baseline->L < 0)
      throw ConfigError("baseline K, N, L must be non-negative");
  }
}

bool RunConfig::operator==(const RunConfig& other) const { return to_json(*this) == to_json(other); }

RunConfig parse_config(const std::string& source) {
  json j;
  try {
    j = json::parse(source);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  check_keys(j, {"command", "model", "method", "oracle", "baseline", "sweep", "output"}, "config");
  RunConfig c;
  const std::string cmd = text(j, "command", "dgpc", "config");
  bool found = false;
  for (auto k : {Command::Dgpc, Command::Hermite, Command::Mc, Command::Invariant, Command::Compare, Command::Sweep})
    if (cmd == command_name(k)) {
      c.command = k;
      found = true;
    }
  if (!found) throw ConfigError("unknown command '" + cmd + "'");
  if (!j.contains("model")) throw ConfigError("config needs a model block");
  c.model = parse_model(j.at("model"));
  c.method = j.contains("method") ? parse_method(j.at("method")) : DgpcConfig{};
  if (j.contains("oracle")) c.oracle = parse_oracle(j.at("oracle"));
  if (j.contains("baseline")) {
    const auto& b = j.at("baseline");
    check_keys(b, {"K", "N", "L"}, "baseline");
    BaselineConfig bc;
    bc.K = static_cast<int>(integer(b, "K", 0, "baseline"));
    bc.N = static_cast<int>(integer(b, "N", 0, "baseline"));
    bc.L = static_cast<int>(integer(b, "L", 0, "baseline"));
    c.baseline = bc;
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    check_keys(s, {"parameter", "values"}, "sweep");
    SweepConfig sc;
    sc.parameter = text(s, "parameter", "", "sweep");
    if (!s.contains("values") || !s.at("values").is_array()) throw ConfigError("sweep.values must be a list");
    for (const auto& v : s.at("values")) {
      if (!v.is_number_integer()) throw ConfigError("sweep.values must be integers");
      sc.values.push_back(v.get<int>());
    }
    c.sweep = sc;
  }
  c.output = text(j, "output", "", "config");
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const RunConfig& c) {
  json j;
  j["command"] = command_name(c.command);
  json m;
  m["kind"] = model_kind_name(c.model.kind);
  m["b_u"] = c.model.b_u;
  m["b_v"] = c.model.b_v;
  m["a_u"] = c.model.a_u;
  m["a_v"] = c.model.a_v;
  m["sigma_u"] = c.model.sigma_u;
  m["sigma_v"] = c.model.sigma_v;
  m["cubic"] = c.model.cubic;
  m["forcing"] = {{"c0", c.model.forcing.c0}, {"c1", c.model.forcing.c1}, {"c2", c.model.forcing.c2}};
  m["initial"] = json::array();
  for (const auto& law : c.model.initial) m["initial"].push_back(law_json(law));
  j["model"] = m;
  j["method"] = {{"K", c.method.K},
                 {"N", c.method.N},
                 {"L", c.method.L},
                 {"n_restarts", c.method.n_restarts},
                 {"t_end", c.method.t_end},
                 {"integrator", c.method.order == 4 ? "rk4" : "heun"},
                 {"h", c.method.h},
                 {"output_dt", c.method.output_dt},
                 {"seed", c.method.seed},
                 {"moments", moment_method_name(c.method.moment_method)},
                 {"quadrature_budget", c.method.quadrature_budget}};
  j["oracle"] = {{"kind", oracle_kind_name(c.oracle.kind)},
                 {"samples", c.oracle.samples},
                 {"dt", c.oracle.dt},
                 {"seed", c.oracle.seed},
                 {"batches", c.oracle.batches}};
  if (c.baseline) j["baseline"] = {{"K", c.baseline->K}, {"N", c.baseline->N}, {"L", c.baseline->L}};
  if (c.sweep) j["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}};
  j["output"] = c.output;
  return j.dump(2);
}

namespace {

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

}  // namespace

Trajectory trajectory_of(const DgpcResult& result) {
  Trajectory t;
  t.components = result.components;
  std::size_t r = 0;
  for (const auto& s : result.samples) {
    TrajectoryRow row;
    row.time = s.time;
    row.mean = s.mean;
    row.variance = s.variance;
    while (r < result.records.size() && result.records[r].time < s.time && !same_time(result.records[r].time, s.time)) ++r;
    if (r < result.records.size() && same_time(result.records[r].time, s.time)) {
      row.cumulants = result.records[r].cumulants;
      if (result.records[r].state_basis_size > 0) row.gram_condition = result.records[r].gram_condition;
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Trajectory trajectory_of(const McResult& result) {
  Trajectory t;
  t.components = result.components;
  for (const auto& p : result.points) {
    TrajectoryRow row;
    row.time = p.time;
    row.mean = p.mean;
    row.variance = p.variance;
    row.cumulants = p.cumulants;
    t.rows.push_back(std::move(row));
  }
  return t;
}

ReferenceSeries reference_of(const Trajectory& traj) {
  ReferenceSeries ref;
  const std::size_t d = traj.components.size();
  ref.mean.assign(d, {});
  ref.variance.assign(d, {});
  for (const auto& row : traj.rows) {
    ref.times.push_back(row.time);
    for (std::size_t c = 0; c < d; ++c) {
      ref.mean[c].push_back(row.mean[c]);
      ref.variance[c].push_back(row.variance[c]);
    }
  }
  return ref;
}

void attach_reference(Trajectory& traj, const ReferenceSeries& ref) {
  const std::size_t d = traj.components.size();
  if (ref.mean.size() != d || ref.variance.size() != d)
    throw InvalidArgument("reference has the wrong number of components");
  std::size_t k = 0;
  for (auto& row : traj.rows) {
    while (k < ref.times.size() && ref.times[k] < row.time && !same_time(ref.times[k], row.time)) ++k;
    if (k >= ref.times.size() || !same_time(ref.times[k], row.time))
      throw InvalidArgument("reference grid does not contain t = " + std::to_string(row.time));
    row.eps_mean.resize(d);
    row.eps_var.resize(d);
    for (std::size_t c = 0; c < d; ++c) {
      const double am[1] = {row.mean[c]}, rm[1] = {ref.mean[c][k]};
      const double av[1] = {row.variance[c]}, rv[1] = {ref.variance[c][k]};
      row.eps_mean[c] = relative_errors(am, rm)[0];
      row.eps_var[c] = relative_errors(av, rv)[0];
    }
  }
  traj.has_reference = true;
}

namespace {

std::vector<std::pair<int, int>> cross_columns() {
  std::vector<std::pair<int, int>> out;
  for (int total = 2; total <= 6; ++total)
    for (int i = total - 1; i >= 1; --i) out.emplace_back(i, total - i);
  return out;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::string> csv_header(const Trajectory& traj) {
  std::vector<std::string> h{"time"};
  for (const auto& c : traj.components) {
    h.push_back("mean_" + c);
    h.push_back("var_" + c);
    for (int n = 3; n <= 6; ++n) h.push_back("k" + std::to_string(n) + "_" + c);
    h.push_back("kurt_" + c);
  }
  if (traj.components.size() == 2)
    for (auto [i, j] : cross_columns()) h.push_back("k_" + std::to_string(i) + "_" + std::to_string(j));
  if (traj.has_reference)
    for (const auto& c : traj.components) {
      h.push_back("eps_mean_" + c);
      h.push_back("eps_var_" + c);
    }
  h.push_back("gram_condition");
  return h;
}

void write_csv(const Trajectory& traj, std::ostream& out) {
  const auto header = csv_header(traj);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::size_t d = traj.components.size();
  for (const auto& row : traj.rows) {
    std::vector<double> v{row.time};
    for (std::size_t c = 0; c < d; ++c) {
      v.push_back(row.mean[c]);
      v.push_back(row.variance[c]);
      for (int n = 3; n <= 6; ++n) v.push_back(row.cumulants ? row.cumulants->univariate[c][n] : nan);
      v.push_back(row.cumulants ? row.cumulants->kurtosis_excess[c] : nan);
    }
    if (d == 2)
      for (auto [i, j] : cross_columns())
        v.push_back(row.cumulants && !row.cumulants->cross.empty() && i + j <= row.cumulants->cross.max_total()
                        ? row.cumulants->cross(i, j)
                        : nan);
    if (traj.has_reference)
      for (std::size_t c = 0; c < d; ++c) {
        v.push_back(row.eps_mean.empty() ? nan : row.eps_mean[c]);
        v.push_back(row.eps_var.empty() ? nan : row.eps_var[c]);
      }
    v.push_back(row.gram_condition);
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << fmt(v[i]);
    out << '\n';
  }
}

void emit_csv(const Trajectory& traj, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  write_csv(traj, out);
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::optional<ReferenceSeries> exact_reference(const SdeModel& model, const std::vector<double>& times) {
  const std::size_t d = model.state_dim();
  ReferenceSeries ref;
  ref.times = times;
  ref.mean.assign(d, {});
  ref.variance.assign(d, {});
  if (model.kind == ModelKind::OU && model.forcing.is_zero() &&
      model.initial[0].kind != InitialLaw::Kind::Uniform) {
    for (double t : times) {
      const auto mv = ou_exact(model.b_u, model.sigma_u, model.initial[0], t);
      ref.mean[0].push_back(mv.mean);
      ref.variance[0].push_back(mv.variance);
    }
    return ref;
  }
  if (model.kind == ModelKind::CoupledSystem && model.a_v == 0.0 &&
      model.initial[0].kind != InitialLaw::Kind::Uniform && model.initial[1].kind != InitialLaw::Kind::Uniform) {
    for (double t : times) {
      const auto u = coupled_exact(model, t);
      const auto v = coupled_exact_v(model, t);
      ref.mean[0].push_back(u.mean);
      ref.variance[0].push_back(u.variance);
      ref.mean[1].push_back(v.mean);
      ref.variance[1].push_back(v.variance);
    }
    return ref;
  }
  return std::nullopt;
}

McConfig mc_config_of(const RunConfig& config) {
  McConfig mc;
  mc.n_samples = config.oracle.samples;
  mc.dt = config.oracle.dt;
  mc.seed = config.oracle.seed;
  mc.batches = config.oracle.batches;
  mc.t_end = config.method.t_end;
  mc.output_dt = config.method.output_dt > 0.0 ? config.method.output_dt : config.method.delta_t();
  return mc;
}

namespace {

Trajectory invariant_trajectory(const RunConfig& config) {
  const auto& m = config.model;
  std::vector<double> kappa;
  switch (m.kind) {
    case ModelKind::OU: kappa = invariant_cumulants_1d({m.forcing.c0, -m.b_u}, m.sigma_u); break;
    case ModelKind::CubicOU: kappa = invariant_cumulants_1d({m.forcing.c0, -m.b_u, 0.0, -m.cubic}, m.sigma_u); break;
    case ModelKind::RandomDampingOU: kappa = averaged_ou_invariant(m.initial[1], m.sigma_u); break;
    default: throw ConfigError("no stationary-density oracle for model '" + std::string(model_kind_name(m.kind)) + "'");
  }
  if (m.kind != ModelKind::RandomDampingOU && !(m.forcing.c1 == 0.0 && m.forcing.c2 == 0.0))
    throw ConfigError("stationary-density oracle needs time-independent forcing");
  Trajectory t;
  t.components = {"u"};
  TrajectoryRow row;
  row.time = config.method.t_end;
  row.mean = {kappa[1]};
  row.variance = {kappa[2]};
  CumulantReport rep;
  rep.time = row.time;
  rep.univariate = {kappa};
  rep.kurtosis_excess = {kappa[4] / (kappa[2] * kappa[2])};
  row.cumulants = rep;
  t.rows.push_back(std::move(row));
  return t;
}

// Reference on the DgPC grid: exact where available, else MC.
std::optional<ReferenceSeries> reference_for(const RunConfig& config, const std::vector<double>& times) {
  const OracleKind k = config.oracle.kind;
  if (k == OracleKind::None || k == OracleKind::Invariant) return std::nullopt;
  if (k == OracleKind::Exact || k == OracleKind::Auto) {
    auto ref = exact_reference(config.model, times);
    if (ref || k == OracleKind::Exact) {
      if (!ref) throw ConfigError("no exact oracle for this model");
      return ref;
    }
  }
  return reference_of(trajectory_of(mc_simulate(config.model, mc_config_of(config))));
}

Trajectory run_with_reference(const RunConfig& config, const DgpcConfig& method) {
  Trajectory t = trajectory_of(run_dgpc(method, config.model));
  RunConfig c = config;
  c.method = method;
  if (auto ref = reference_for(c, [&] {
        std::vector<double> ts;
        for (const auto& r : t.rows) ts.push_back(r.time);
        return ts;
      }()))
    attach_reference(t, *ref);
  return t;
}

void write_to(const Trajectory& t, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    write_csv(t, out);
  } else {
    emit_csv(t, path);
  }
}

DgpcConfig with_parameter(DgpcConfig m, const std::string& p, int v) {
  if (p == "K") m.K = v;
  if (p == "N") m.N = v;
  if (p == "L") m.L = v;
  if (p == "n_restarts") m.n_restarts = v;
  return m;
}

std::filesystem::path suffixed(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  return p.parent_path() / (p.stem().string() + suffix + (p.has_extension() ? p.extension().string() : ".csv"));
}

}  // namespace

Trajectory run_config(const RunConfig& config, std::ostream& out) {
  config.validate();
  Trajectory t;
  switch (config.command) {
    case Command::Dgpc: {
      t = trajectory_of(run_dgpc(config.method, config.model));
      if (config.oracle.kind == OracleKind::Exact || config.oracle.kind == OracleKind::Auto) {
        std::vector<double> ts;
        for (const auto& r : t.rows) ts.push_back(r.time);
        if (auto ref = exact_reference(config.model, ts)) attach_reference(t, *ref);
      }
      break;
    }
    case Command::Hermite: {
      t = trajectory_of(run_hermite_pc(config.method, config.model));
      std::vector<double> ts;
      for (const auto& r : t.rows) ts.push_back(r.time);
      if (config.oracle.kind != OracleKind::None)
        if (auto ref = exact_reference(config.model, ts)) attach_reference(t, *ref);
      break;
    }
    case Command::Mc: t = trajectory_of(mc_simulate(config.model, mc_config_of(config))); break;
    case Command::Invariant: t = invariant_trajectory(config); break;
    case Command::Compare: t = run_with_reference(config, config.method); break;
    case Command::Sweep: {
      std::ostringstream summary;
      summary << "parameter,value,time";
      for (const auto& c : config.model.component_names()) summary << ",mean_" << c << ",var_" << c;
      summary << ",median_eps_var_u,max_eps_var_u\n";
      for (int v : config.sweep->values) {
        const DgpcConfig m = with_parameter(config.method, config.sweep->parameter, v);
        t = run_with_reference(config, m);
        if (!config.output.empty()) emit_csv(t, suffixed(config.output, "_" + config.sweep->parameter + std::to_string(v)));
        const auto& last = t.rows.back();
        summary << config.sweep->parameter << ',' << v << ',' << fmt(last.time);
        for (std::size_t c = 0; c < last.mean.size(); ++c) summary << ',' << fmt(last.mean[c]) << ',' << fmt(last.variance[c]);
        std::vector<double> eps;
        for (const auto& r : t.rows)
          if (!r.eps_var.empty()) eps.push_back(r.eps_var[0]);
        const auto s = summarize_errors(eps);
        summary << ',' << fmt(s.median) << ',' << fmt(s.max) << '\n';
      }
      if (config.output.empty()) {
        out << summary.str();
      } else {
        std::ofstream f(suffixed(config.output, "_summary"));
        if (!f) throw IoError("cannot write sweep summary");
        f << summary.str();
      }
      return t;
    }
  }
  write_to(t, config.output, out);
  return t;
}

Trajectory compare_configs(const RunConfig& a, const RunConfig& b) {
  std::ostringstream sink;
  RunConfig ca = a, cb = b;
  ca.output.clear();
  cb.output.clear();
  Trajectory ta = run_config(ca, sink);
  const Trajectory tb = run_config(cb, sink);
  if (ta.components != tb.components) throw InvalidArgument("compared runs have different components");
  ta.has_reference = false;
  for (auto& r : ta.rows) {
    r.eps_mean.clear();
    r.eps_var.clear();
  }
  attach_reference(ta, reference_of(tb));
  return ta;
}

std::filesystem::path default_preset_dir() {
  if (const char* env = std::getenv("DGPC_PRESET_DIR")) return env;
#ifdef DGPC_PRESET_DIR
  return DGPC_PRESET_DIR;
#else
  return "presets";
#endif
}

RunConfig load_preset(const std::string& name, const std::filesystem::path& preset_dir) {
  const auto path = preset_dir / (name + ".json");
  if (!std::filesystem::exists(path)) throw ConfigError("no preset named '" + name + "' in " + preset_dir.string());
  return load_config(path);
}

std::string run_experiment(const std::string& name, const std::filesystem::path& out_dir,
                           const std::filesystem::path& preset_dir) {
  const RunConfig cfg = load_preset(name, preset_dir);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "'");

  std::ostringstream summary;
  summary << "method,component,time";
  for (int n = 1; n <= 6; ++n) summary << ",k" << n;
  summary << ",kurt\n";
  auto add_rows = [&](const std::string& label, const Trajectory& t) {
    const auto& last = t.rows.back();
    if (!last.cumulants) return;
    for (std::size_t c = 0; c < t.components.size(); ++c) {
      summary << label << ',' << t.components[c] << ',' << fmt(last.time);
      for (int n = 1; n <= 6; ++n) summary << ',' << fmt(last.cumulants->univariate[c][n]);
      summary << ',' << fmt(last.cumulants->kurtosis_excess[c]) << '\n';
    }
  };

  // DgPC runs (one per sweep value)
  std::vector<std::pair<std::string, DgpcConfig>> runs;
  if (cfg.sweep) {
    for (int v : cfg.sweep->values)
      runs.emplace_back(cfg.sweep->parameter + std::to_string(v), with_parameter(cfg.method, cfg.sweep->parameter, v));
  } else {
    runs.emplace_back("", cfg.method);
  }
  std::optional<ReferenceSeries> mc_ref;
  Trajectory oracle;
  bool have_oracle = false;
  for (const auto& [tag, method] : runs) {
    Trajectory t = trajectory_of(run_dgpc(method, cfg.model));
    std::vector<double> ts;
    for (const auto& r : t.rows) ts.push_back(r.time);
    RunConfig c = cfg;
    c.method = method;
    std::optional<ReferenceSeries> ref;
    if (cfg.oracle.kind == OracleKind::Auto || cfg.oracle.kind == OracleKind::Exact)
      ref = exact_reference(cfg.model, ts);
    if (!ref && (cfg.oracle.kind == OracleKind::Mc || cfg.oracle.kind == OracleKind::Auto)) {
      if (mc_ref && mc_ref->times == ts) {
        ref = mc_ref;
      } else {
        const Trajectory mc = trajectory_of(mc_simulate(cfg.model, mc_config_of(c)));
        ref = reference_of(mc);
        mc_ref = ref;
        if (!have_oracle) {
          oracle = mc;
          have_oracle = true;
        }
      }
    }
    if (ref) {
      attach_reference(t, *ref);
      if (!have_oracle) {
        oracle.components = t.components;
        for (std::size_t k = 0; k < ref->times.size(); ++k) {
          TrajectoryRow row;
          row.time = ref->times[k];
          for (std::size_t comp = 0; comp < t.components.size(); ++comp) {
            row.mean.push_back(ref->mean[comp][k]);
            row.variance.push_back(ref->variance[comp][k]);
          }
          oracle.rows.push_back(std::move(row));
        }
        have_oracle = true;
      }
    }
    emit_csv(t, out_dir / (tag.empty() ? "dgpc.csv" : "dgpc_" + tag + ".csv"));
    add_rows(tag.empty() ? "dgpc" : "dgpc_" + tag, t);
  }
  if (cfg.oracle.kind == OracleKind::Invariant) {
    oracle = invariant_trajectory(cfg);
    have_oracle = true;
  }

  DgpcConfig base = cfg.method;
  if (cfg.baseline) {
    if (cfg.baseline->K) base.K = cfg.baseline->K;
    if (cfg.baseline->N) base.N = cfg.baseline->N;
    if (cfg.baseline->L) base.L = cfg.baseline->L;
  }
  if (base.output_dt == 0.0) base.output_dt = cfg.method.delta_t();
  Trajectory baseline = trajectory_of(run_hermite_pc(base, cfg.model));
  {
    std::vector<double> ts;
    for (const auto& r : baseline.rows) ts.push_back(r.time);
    if (auto ref = exact_reference(cfg.model, ts)) attach_reference(baseline, *ref);
  }
  emit_csv(baseline, out_dir / "baseline.csv");
  add_rows("hermite", baseline);
  if (have_oracle) {
    emit_csv(oracle, out_dir / "oracle.csv");
    add_rows(cfg.oracle.kind == OracleKind::Invariant ? "fokker_planck" : "mc", oracle);
  }
  std::ofstream f(out_dir / "summary.csv");
  if (!f) throw IoError("cannot write summary");
  f << summary.str();
  return summary.str();
}

}  // namespace dgpc
