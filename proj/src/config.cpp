#include "qqcm/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qqcm/errors.hpp"

namespace qqcm {

namespace {

using json = nlohmann::json;

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ArgumentError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) throw ArgumentError(where + ": unknown key '" + key + "'");
  }
}

// Numbers, or strings "pi", "pi/N", "A*pi" and "A*pi/N" since JSON has no pi.
double parse_real(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw ArgumentError(where + ": expected a number");
  std::string s = j.get<std::string>();
  std::erase(s, ' ');
  const auto bad = [&] { return ArgumentError(where + ": cannot parse '" + s + "'"); };
  const auto to_double = [&](const std::string& t) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != t.size()) throw bad();
    return v;
  };
  const auto pos = s.find("pi");
  if (pos == std::string::npos) return to_double(s);
  double factor = 1.0;
  if (pos > 0) {
    if (s[pos - 1] != '*') throw bad();
    factor = to_double(s.substr(0, pos - 1));
  }
  double divisor = 1.0;
  const std::string rest = s.substr(pos + 2);
  if (!rest.empty()) {
    if (rest[0] != '/') throw bad();
    divisor = to_double(rest.substr(1));
  }
  return factor * std::numbers::pi / divisor;
}

double get_real(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ArgumentError(where + ": missing '" + key + "'");
  return parse_real(j.at(key), where + "." + key);
}

double get_real_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? parse_real(j.at(key), where + "." + key) : fallback;
}

std::string get_string(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ArgumentError(where + ": missing string '" + key + "'");
  }
  return j.at(key).get<std::string>();
}

std::size_t get_count(const json& j, const char* key, std::size_t fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ArgumentError(where + "." + key + ": expected a nonnegative integer");
  }
  return v.get<std::size_t>();
}

DistributionSpec parse_distribution(const json& j, const std::string& where) {
  const std::string kind = get_string(j, "kind", where);
  if (kind == "exponential") {
    check_keys(j, where, {"kind", "rate"});
    return DistributionSpec::exponential(get_real(j, "rate", where));
  }
  if (kind == "deterministic") {
    check_keys(j, where, {"kind", "value"});
    return DistributionSpec::deterministic(get_real(j, "value", where));
  }
  throw ArgumentError(where + ": unknown distribution kind '" + kind + "'");
}

QueueConfig parse_queue(const json& j) {
  const std::string where = "queue";
  QueueConfig q;
  const std::string kind = get_string(j, "kind", where);
  if (kind == "MD1" || kind == "MM1") {
    check_keys(j, where, {"kind", "mu", "r"});
    q.kind = kind == "MD1" ? QueueKind::MD1 : QueueKind::MM1;
    q.mu = get_real_or(j, "mu", 1.0, where);
    q.r = get_real(j, "r", where);
  } else if (kind == "explicit") {
    check_keys(j, where, {"kind", "arrival", "service"});
    q.kind = QueueKind::Explicit;
    if (!j.contains("arrival") || !j.contains("service")) {
      throw ArgumentError("queue: explicit queues need 'arrival' and 'service'");
    }
    q.arrival = parse_distribution(j.at("arrival"), "queue.arrival");
    q.service = parse_distribution(j.at("service"), "queue.service");
  } else {
    throw ArgumentError("queue: unknown kind '" + kind + "'");
  }
  return q;
}

ChannelSpec parse_channel(const json& j, const std::string& where) {
  const std::string kind = get_string(j, "kind", where);
  if (kind == "identity") {
    check_keys(j, where, {"kind"});
    return IdentityChannel{};
  }
  if (kind == "dephasing") {
    check_keys(j, where, {"kind", "gamma", "convention"});
    Dephasing d;
    d.gamma = get_real(j, "gamma", where);
    if (j.contains("convention")) {
      d.convention = dephasing_convention_from_string(get_string(j, "convention", where));
    }
    return d;
  }
  if (kind == "partial_swap") {
    check_keys(j, where, {"kind", "g"});
    return PartialSwapUnitary{get_real(j, "g", where)};
  }
  if (kind == "xxz") {
    check_keys(j, where, {"kind", "g", "delta", "g_delta", "gamma"});
    XxzDephasing x;
    x.g = get_real(j, "g", where);
    x.gamma = get_real_or(j, "gamma", 0.0, where);
    if (j.contains("delta") == j.contains("g_delta")) {
      throw ArgumentError(where + ": give exactly one of 'delta' and 'g_delta'");
    }
    if (j.contains("delta")) {
      x.delta = get_real(j, "delta", where);
    } else {
      if (x.g == 0.0) throw ArgumentError(where + ": 'g_delta' needs g != 0");
      x.delta = get_real(j, "g_delta", where) / x.g;
    }
    return x;
  }
  throw ArgumentError(where + ": unknown channel kind '" + kind + "'");
}

DensityMatrix parse_state(const json& j, const std::string& where) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "zero") return DensityMatrix::ket0();
    if (s == "one") return DensityMatrix::ket1();
    if (s == "plus") return DensityMatrix::ket_plus();
    if (s == "mixed") return DensityMatrix::maximally_mixed(2);
    throw ArgumentError(where + ": unknown state '" + s + "'");
  }
  check_keys(j, where, {"re", "im"});
  if (!j.contains("re")) throw ArgumentError(where + ": missing 're'");
  const auto& re = j.at("re");
  if (!re.is_array() || re.size() != 2) throw ArgumentError(where + ": expected a 2 x 2 matrix");
  Matrix m = Matrix::Zero(2, 2);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      double im = 0.0;
      if (j.contains("im")) im = parse_real(j.at("im").at(r).at(c), where + ".im");
      m(r, c) = cplx(parse_real(re.at(r).at(c), where + ".re"), im);
    }
  }
  return DensityMatrix(m);
}

SweepConfig parse_sweep(const json& j) {
  check_keys(j, "sweep", {"axis", "values"});
  SweepConfig s;
  const std::string axis = get_string(j, "axis", "sweep");
  if (axis == "r") {
    s.axis = SweepAxis::R;
  } else if (axis == "g_delta") {
    s.axis = SweepAxis::GDelta;
  } else {
    throw ArgumentError("sweep: unknown axis '" + axis + "'");
  }
  if (!j.contains("values") || !j.at("values").is_array()) {
    throw ArgumentError("sweep: missing 'values' array");
  }
  for (const auto& v : j.at("values")) s.values.push_back(parse_real(v, "sweep.values"));
  return s;
}

LindleyConfig parse_lindley(const json& j) {
  const std::string w = "lindley";
  check_keys(j, w,
             {"mode", "quantity", "grid_points", "x_max", "tol", "max_iterations", "n_samples",
              "stride", "burn_in_customers", "customer"});
  LindleyConfig l;
  if (j.contains("mode")) {
    const std::string m = get_string(j, "mode", w);
    if (m == "fixed_point") {
      l.mode = LindleyMode::FixedPoint;
    } else if (m == "transient") {
      l.mode = LindleyMode::Transient;
    } else {
      throw ArgumentError("lindley: unknown mode '" + m + "'");
    }
  }
  if (j.contains("quantity")) {
    const std::string q = get_string(j, "quantity", w);
    if (q == "waiting") {
      l.quantity = LindleyQuantity::Waiting;
    } else if (q == "idle") {
      l.quantity = LindleyQuantity::Idle;
    } else {
      throw ArgumentError("lindley: unknown quantity '" + q + "'");
    }
  }
  l.grid_points = get_count(j, "grid_points", l.grid_points, w);
  if (j.contains("x_max")) l.x_max = get_real(j, "x_max", w);
  l.tol = get_real_or(j, "tol", l.tol, w);
  l.max_iterations = get_count(j, "max_iterations", l.max_iterations, w);
  l.n_samples = get_count(j, "n_samples", l.n_samples, w);
  l.stride = get_count(j, "stride", l.stride, w);
  l.burn_in_customers = get_count(j, "burn_in_customers", l.burn_in_customers, w);
  l.customer = get_count(j, "customer", l.customer, w);
  return l;
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

QueueLaws QueueConfig::laws(double r_value) const {
  switch (kind) {
    case QueueKind::MD1:
      return md1(r_value, mu);
    case QueueKind::MM1:
      return mm1(r_value, mu);
    case QueueKind::Explicit:
      return QueueLaws{*arrival, *service};
  }
  throw ArgumentError("unknown queue kind");
}

ModelSpec ExperimentConfig::model() const {
  const QueueLaws q = queue.laws();
  return ModelSpec{q.arrival,       q.service,     idle_channel,          waiting_channel,
                   interaction_channel, ancilla_state, initial_system_state};
}

ModelSpec ExperimentConfig::model_at(SweepAxis axis, double value) const {
  if (axis == SweepAxis::R) {
    if (queue.kind == QueueKind::Explicit) {
      throw ArgumentError("an r sweep needs an MD1 or MM1 queue");
    }
    ModelSpec m = model();
    const QueueLaws q = queue.laws(value);
    m.arrival = q.arrival;
    m.service = q.service;
    return m;
  }
  auto* x = std::get_if<XxzDephasing>(&interaction_channel);
  if (x == nullptr || x->g == 0.0) {
    throw ArgumentError("a g_delta sweep needs an xxz interaction with g != 0");
  }
  ModelSpec m = model();
  XxzDephasing swept = *x;
  swept.delta = value / x->g;
  m.interaction_channel = swept;
  return m;
}

void ExperimentConfig::validate() const {
  if (queue.kind != QueueKind::Explicit) {
    if (!(finite(queue.mu) && queue.mu > 0.0)) throw ArgumentError("queue.mu must be > 0");
    if (!(finite(queue.r) && queue.r > 0.0)) throw ArgumentError("queue.r must be > 0");
  }
  if (n_ancillas < 1) throw ArgumentError("n_ancillas must be >= 1");
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) {
    throw ArgumentError("burn_in_fraction must lie in [0, 1)");
  }
  if (n_runs < 1) throw ArgumentError("n_runs must be >= 1");
  if (quadrature_nodes < 2) throw ArgumentError("fixed_point.quadrature_nodes must be >= 2");
  if (sweep) {
    if (sweep->values.empty()) throw ArgumentError("sweep.values must be nonempty");
    for (double v : sweep->values) {
      if (!finite(v)) throw ArgumentError("sweep.values must be finite");
      if (sweep->axis == SweepAxis::R && !(v > 0.0)) throw ArgumentError("sweep r values must be > 0");
      model_at(sweep->axis, v).validate();
    }
  }
  const auto& l = lindley;
  if (l.grid_points < 2) throw ArgumentError("lindley.grid_points must be >= 2");
  if (l.x_max && !(finite(*l.x_max) && *l.x_max > 0.0)) throw ArgumentError("lindley.x_max must be > 0");
  if (!(l.tol > 0.0)) throw ArgumentError("lindley.tol must be > 0");
  if (l.n_samples < 1 || l.stride < 1 || l.customer < 1) {
    throw ArgumentError("lindley.n_samples, stride and customer must be >= 1");
  }
  model().validate();
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ArgumentError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"description", "queue", "idle_channel", "waiting_channel", "interaction_channel",
              "ancilla_state", "initial_system_state", "n_ancillas", "burn_in_fraction", "seed",
              "n_runs", "sweep", "fixed_point", "lindley", "output", "queue_trace_output"});
  ExperimentConfig c;
  try {
    if (!j.contains("queue")) throw ArgumentError("config: missing 'queue'");
    c.queue = parse_queue(j.at("queue"));
    if (j.contains("idle_channel")) c.idle_channel = parse_channel(j.at("idle_channel"), "idle_channel");
    if (j.contains("waiting_channel")) {
      c.waiting_channel = parse_channel(j.at("waiting_channel"), "waiting_channel");
    }
    if (j.contains("interaction_channel")) {
      c.interaction_channel = parse_channel(j.at("interaction_channel"), "interaction_channel");
    }
    if (j.contains("ancilla_state")) c.ancilla_state = parse_state(j.at("ancilla_state"), "ancilla_state");
    if (j.contains("initial_system_state")) {
      c.initial_system_state = parse_state(j.at("initial_system_state"), "initial_system_state");
    }
    c.n_ancillas = get_count(j, "n_ancillas", c.n_ancillas, "config");
    c.burn_in_fraction = get_real_or(j, "burn_in_fraction", c.burn_in_fraction, "config");
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned()) throw ArgumentError("config.seed: expected an unsigned integer");
      c.seed = j.at("seed").get<std::uint64_t>();
    }
    c.n_runs = get_count(j, "n_runs", c.n_runs, "config");
    if (j.contains("sweep")) c.sweep = parse_sweep(j.at("sweep"));
    if (j.contains("fixed_point")) {
      const auto& f = j.at("fixed_point");
      check_keys(f, "fixed_point", {"mode", "quadrature_nodes"});
      if (f.contains("mode")) c.fixed_point_mode = fixed_point_mode_from_string(get_string(f, "mode", "fixed_point"));
      c.quadrature_nodes = static_cast<int>(get_count(f, "quadrature_nodes", 200, "fixed_point"));
    }
    if (j.contains("lindley")) c.lindley = parse_lindley(j.at("lindley"));
    if (j.contains("output")) c.output = get_string(j, "output", "config");
    if (j.contains("queue_trace_output")) c.queue_trace_output = get_string(j, "queue_trace_output", "config");
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_string(SweepAxis a) { return a == SweepAxis::R ? "r" : "g_delta"; }

}  // namespace qqcm
