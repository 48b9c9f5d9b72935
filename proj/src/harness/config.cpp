#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include "fraclap/harness.hpp"

namespace fraclap {

namespace {

using json = nlohmann::json;
using Setter = std::function<void(ExperimentConfig&, const json&)>;

template <class T>
Setter field(T ExperimentConfig::*member) {
  return [member](ExperimentConfig& c, const json& v) {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw std::invalid_argument("expected a number");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
      if constexpr (std::is_unsigned_v<T>)
        if (v.get<std::int64_t>() < 0) throw std::invalid_argument("expected a nonnegative integer");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw std::invalid_argument("expected a string");
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      if (!v.is_array()) throw std::invalid_argument("expected an array of numbers");
      for (const auto& e : v)
        if (!e.is_number()) throw std::invalid_argument("expected an array of numbers");
    } else if constexpr (std::is_same_v<T, std::vector<std::int64_t>>) {
      if (!v.is_array()) throw std::invalid_argument("expected an array of integers");
      for (const auto& e : v)
        if (!e.is_number_integer()) throw std::invalid_argument("expected an array of integers");
    }
    c.*member = v.get<T>();
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"n", field(&ExperimentConfig::n)},
      {"alpha", field(&ExperimentConfig::alpha)},
      {"radius", field(&ExperimentConfig::radius)},
      {"L", field(&ExperimentConfig::L)},
      {"P", field(&ExperimentConfig::P)},
      {"M", field(&ExperimentConfig::M)},
      {"h", field(&ExperimentConfig::h)},
      {"box_length", field(&ExperimentConfig::box_length)},
      {"step_method", field(&ExperimentConfig::step_method)},
      {"T", field(&ExperimentConfig::T)},
      {"initial", field(&ExperimentConfig::initial)},
      {"bump_width", field(&ExperimentConfig::bump_width)},
      {"N", field(&ExperimentConfig::N)},
      {"seed", field(&ExperimentConfig::seed)},
      {"steps", field(&ExperimentConfig::steps)},
      {"threads", field(&ExperimentConfig::threads)},
      {"reference", field(&ExperimentConfig::reference)},
      {"xi", field(&ExperimentConfig::xi)},
      {"norm", field(&ExperimentConfig::norm)},
      {"leak_cap", field(&ExperimentConfig::leak_cap)},
      {"order_min", field(&ExperimentConfig::order_min)},
      {"beta", field(&ExperimentConfig::beta)},
      {"moment_radii", field(&ExperimentConfig::moment_radii)},
      {"eps", field(&ExperimentConfig::eps)},
      {"r_out", field(&ExperimentConfig::r_out)},
      {"angular_nodes", field(&ExperimentConfig::angular_nodes)},
      {"min_oscillations", field(&ExperimentConfig::min_oscillations)},
      {"xi_magnitudes", field(&ExperimentConfig::xi_magnitudes)},
      {"test_function", field(&ExperimentConfig::test_function)},
      {"a_multiplier", field(&ExperimentConfig::a_multiplier)},
      {"rel_tol", field(&ExperimentConfig::rel_tol)},
  };
  return table;
}

void apply(ConfigResult& r, const std::string& key, const json& value, const char* origin) {
  if (key == "experiment") {
    if (!value.is_string() || parse_kind(value.get<std::string>()) != r.config.kind)
      r.errors.push_back(std::string(origin) + ": experiment '" + value.dump() +
                         "' does not match the subcommand '" + to_string(r.config.kind) + "'");
    return;
  }
  const auto it = setters().find(key);
  if (it == setters().end()) {
    r.errors.push_back(std::string(origin) + ": unknown key '" + key + "'");
    return;
  }
  try {
    it->second(r.config, value);
  } catch (const std::exception& e) {
    r.errors.push_back(std::string(origin) + ": " + key + ": " + e.what());
  }
}

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
  for (const char* o : options)
    if (v == o) return true;
  return false;
}

void validate(ConfigResult& r) {
  const auto& c = r.config;
  auto& e = r.errors;
  const bool timed = c.kind == ExperimentKind::evolve || c.kind == ExperimentKind::converge;
  if (c.n < 1 || c.n > 3) e.push_back("n: must be 1, 2 or 3");
  if (!(c.alpha > 0.0 && c.alpha < 2.0)) e.push_back("alpha: must lie in (0, 2)");
  if (c.radius < 0) e.push_back("radius: must be >= 0 (0 selects the default)");
  if (!(c.L > 0.0)) e.push_back("L: must be positive");
  if (c.P < 2) e.push_back("P: must be >= 2");
  if (c.M < 0) e.push_back("M: must be >= 0 (0 selects the default)");
  if (c.h.empty()) e.push_back("h: must be non-empty");
  for (double v : c.h)
    if (!(v > 0.0)) e.push_back("h: entries must be positive");
  if (c.kind == ExperimentKind::converge) {
    if (c.h.size() < 2) e.push_back("h: converge needs at least two spacings");
    for (std::size_t i = 1; i < c.h.size(); ++i)
      if (!(c.h[i] < c.h[i - 1])) {
        e.push_back("h: must be strictly decreasing for converge");
        break;
      }
  }
  if (!(c.box_length > 0.0)) e.push_back("box_length: must be positive");
  if (!one_of(c.step_method, {"auto", "direct", "fft"}))
    e.push_back("step_method: must be auto, direct or fft");
  if (timed && !(c.T > 0.0)) e.push_back("T: must be positive");
  if (!one_of(c.initial, {"bump", "delta"})) e.push_back("initial: must be bump or delta");
  if (!(c.bump_width > 0.0)) e.push_back("bump_width: must be positive");
  if (c.N < 1) e.push_back("N: must be >= 1");
  if (c.threads < 1) e.push_back("threads: must be >= 1");
  if (!one_of(c.reference, {"charfn", "spectral"}))
    e.push_back("reference: must be charfn or spectral");
  if (c.xi.empty()) e.push_back("xi: must be non-empty");
  if (!one_of(c.norm, {"sup", "l1"})) e.push_back("norm: must be sup or l1");
  if (!(c.leak_cap > 0.0)) e.push_back("leak_cap: must be positive");
  for (double b : c.beta)
    if (!(b >= 0.0)) e.push_back("beta: entries must be nonnegative");
  if (c.moment_radii.empty()) e.push_back("moment_radii: must be non-empty");
  for (std::size_t i = 0; i < c.moment_radii.size(); ++i) {
    if (c.moment_radii[i] < 1 || (i > 0 && c.moment_radii[i] <= c.moment_radii[i - 1])) {
      e.push_back("moment_radii: must be >= 1 and strictly increasing");
      break;
    }
  }
  if (!c.moment_radii.empty() && c.kind == ExperimentKind::moments) {
    const std::int64_t cap = c.n == 1 ? 100000000 : (c.n == 2 ? 4096 : 256);
    if (c.moment_radii.back() > cap)
      e.push_back("moment_radii: largest radius exceeds " + std::to_string(cap) +
                  " for n = " + std::to_string(c.n));
  }
  if (c.kind == ExperimentKind::moments && c.moment_radii.size() < 3)
    e.push_back("moment_radii: moments needs at least three radii");
  if (c.kind == ExperimentKind::operators && c.n >= 1 && c.n <= 3 &&
      std::pow(static_cast<double>(c.P), 2.0 * c.n) > 1e11)
    e.push_back("P: the direct quadrature costs P^(2n) operations; reduce P for n = " +
                std::to_string(c.n));
  if (c.kind == ExperimentKind::converge && c.n >= 2 && c.n <= 3 && !c.h.empty() &&
      c.h.back() > 0.0) {
    const double m = c.M > 0 ? static_cast<double>(c.M) : c.box_length / c.h.back();
    const double r = c.radius > 0 ? static_cast<double>(c.radius) : 2.0 * m;
    if (std::pow(2.0 * std::max(m, r) + 1.0, c.n) > 5e7)
      e.push_back("box_length: the finest lattice box or jump ball exceeds 5e7 sites; "
                  "reduce box_length, M or radius");
  }
  if (!(c.eps > 0.0)) e.push_back("eps: must be positive");
  if (!(c.eps < c.r_out)) e.push_back("r_out: must exceed eps");
  if (c.angular_nodes < 0 || c.angular_nodes % 2 != 0)
    e.push_back("angular_nodes: must be a nonnegative even integer");
  if (c.min_oscillations < 1) e.push_back("min_oscillations: must be >= 1");
  if (c.xi_magnitudes.empty()) e.push_back("xi_magnitudes: must be non-empty");
  for (double v : c.xi_magnitudes)
    if (!(v > 0.0)) e.push_back("xi_magnitudes: entries must be positive");
  if (!one_of(c.test_function, {"cos", "expsin", "constant"}))
    e.push_back("test_function: must be cos, expsin or constant");
  if (!(c.a_multiplier > 0.0)) e.push_back("a_multiplier: must be positive");
  if (!(c.rel_tol > 0.0)) e.push_back("rel_tol: must be positive");
}

}  // namespace

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::walk: return "walk";
    case ExperimentKind::evolve: return "evolve";
    case ExperimentKind::symbol: return "symbol";
    case ExperimentKind::operators: return "operators";
    case ExperimentKind::converge: return "converge";
    case ExperimentKind::moments: return "moments";
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_kind(const std::string& s) {
  for (auto k : {ExperimentKind::walk, ExperimentKind::evolve, ExperimentKind::symbol,
                 ExperimentKind::operators, ExperimentKind::converge, ExperimentKind::moments})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

SymbolConfig ExperimentConfig::symbol_config() const {
  SymbolConfig s;
  s.inner_cutoff = eps;
  s.outer_cutoff = r_out;
  s.angular_nodes = angular_nodes;
  s.min_oscillations = min_oscillations;
  return s;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return json{
      {"experiment", to_string(c.kind)},
      {"n", c.n},
      {"alpha", c.alpha},
      {"radius", c.radius},
      {"L", c.L},
      {"P", c.P},
      {"M", c.M},
      {"h", c.h},
      {"box_length", c.box_length},
      {"step_method", c.step_method},
      {"T", c.T},
      {"initial", c.initial},
      {"bump_width", c.bump_width},
      {"N", c.N},
      {"seed", c.seed},
      {"steps", c.steps},
      {"threads", c.threads},
      {"reference", c.reference},
      {"xi", c.xi},
      {"norm", c.norm},
      {"leak_cap", c.leak_cap},
      {"order_min", c.order_min},
      {"beta", c.beta},
      {"moment_radii", c.moment_radii},
      {"eps", c.eps},
      {"r_out", c.r_out},
      {"angular_nodes", c.angular_nodes},
      {"min_oscillations", c.min_oscillations},
      {"xi_magnitudes", c.xi_magnitudes},
      {"test_function", c.test_function},
      {"a_multiplier", c.a_multiplier},
      {"rel_tol", c.rel_tol},
  };
}

std::string config_hash(const ExperimentConfig& c) {
  // threads never changes results, so it stays out of the hash.
  json j = to_json(c);
  j.erase("threads");
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ConfigResult load_config(ExperimentKind kind, const nlohmann::json& file,
                         const std::vector<std::string>& overrides) {
  ConfigResult r;
  r.config.kind = kind;
  if (!file.is_null()) {
    if (!file.is_object()) {
      r.errors.push_back("config file: top level must be a JSON object");
    } else {
      for (const auto& [key, value] : file.items()) apply(r, key, value, "config file");
    }
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) {
      r.errors.push_back("--set '" + o + "': expected key=value");
      continue;
    }
    const std::string key = o.substr(0, eq), text = o.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    apply(r, key, value, "--set");
  }
  validate(r);
  return r;
}

}  // namespace fraclap
