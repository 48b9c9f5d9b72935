#include <chrono>
#include <ctime>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "fraclap/harness.hpp"
#include "fraclap/io.hpp"

namespace fraclap {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class RunLog {
 public:
  explicit RunLog(const fs::path& path) : out_(path, std::ios::app) {}
  void line(const std::string& text) {
    if (out_) out_ << timestamp() << ' ' << text << '\n' << std::flush;
  }

 private:
  std::ofstream out_;
};

json header(const ExperimentConfig& c) {
  return json{{"schema_version", kSchemaVersion},
              {"experiment", to_string(c.kind)},
              {"config_hash", config_hash(c)}};
}

void write_json(const fs::path& path, const json& j) { atomic_write(path, j.dump(2) + "\n"); }

bool emit_walk(const ExperimentConfig& c, const fs::path& dir) {
  const auto rep = run_walk(c);
  atomic_write(dir / "walk_empirical.csv", distribution_csv(rep.empirical));
  atomic_write(dir / "walk_master.csv", distribution_csv(rep.master));
  json j = header(c);
  j["total_variation"] = rep.tv;
  j["envelope"] = rep.envelope;
  j["occupied_sites"] = rep.occupied;
  j["chi_square"] = {{"statistic", rep.chi_square.statistic},
                     {"degrees_of_freedom", rep.chi_square.degrees_of_freedom},
                     {"p_value", rep.chi_square.p_value}};
  j["empirical_leaked"] = rep.empirical.leaked;
  j["master_leaked"] = rep.master.leaked;
  j["half_width"] = rep.master.half_width;
  j["pass"] = rep.pass;
  write_json(dir / "report.json", j);
  return rep.pass;
}

bool emit_evolve(const ExperimentConfig& c, const fs::path& dir) {
  const auto rep = run_evolve(c);
  atomic_write(dir / "evolve_initial.csv", distribution_csv(rep.initial));
  atomic_write(dir / "evolve_final.csv", distribution_csv(rep.final));
  json j = header(c);
  j["summary"] = distribution_summary(rep.final, rep.beta_probes);
  j["leak_cap"] = c.leak_cap;
  j["pass"] = rep.pass;
  write_json(dir / "report.json", j);
  return rep.pass;
}

bool emit_symbol(const ExperimentConfig& c, const fs::path& dir) {
  const auto rep = run_symbol(c);
  fmt::memory_buffer csv;
  auto out = std::back_inserter(csv);
  fmt::format_to(out, "label,magnitude,value,error_estimate,ratio,deviation,allowed\n");
  fmt::format_to(out, "A,1,{:.17g},{:.17g},1,0,0\n", rep.a.value, rep.a.error_estimate);
  json rays = json::array();
  for (std::size_t i = 0; i < rep.rays.size(); ++i) {
    for (const auto& r : rep.rays[i].rows)
      fmt::format_to(out, "{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                     rep.ray_labels[i], r.magnitude, r.value, r.error_estimate, r.ratio,
                     r.deviation, r.allowed);
    rays.push_back({{"label", rep.ray_labels[i]},
                    {"max_deviation", rep.rays[i].max_deviation},
                    {"within_error_estimates", rep.rays[i].pass}});
  }
  atomic_write(dir / "symbol.csv", fmt::to_string(csv));
  json j = header(c);
  j["A"] = {{"value", rep.a.value}, {"error_estimate", rep.a.error_estimate}};
  j["rays"] = rays;
  j["max_deviation"] = rep.max_deviation;
  j["rel_tol"] = c.rel_tol;
  j["pass"] = rep.pass;
  write_json(dir / "report.json", j);
  return rep.pass;
}

bool emit_operators(const ExperimentConfig& c, const fs::path& dir) {
  const auto rep = run_operators(c);
  fmt::memory_buffer csv;
  auto out = std::back_inserter(csv);
  for (int d = 0; d < c.n; ++d) fmt::format_to(out, "x{},", d + 1);
  fmt::format_to(out, "spectral,quadrature_over_a\n");
  for (std::size_t i = 0; i < rep.spectral.size(); ++i) {
    const auto x = rep.spectral.coordinates(i);
    for (int d = 0; d < c.n; ++d) fmt::format_to(out, "{:.17g},", x[d]);
    fmt::format_to(out, "{:.17g},{:.17g}\n", rep.spectral.values[i],
                   rep.quadrature_over_a.values[i]);
  }
  atomic_write(dir / "operators.csv", fmt::to_string(csv));
  json j = header(c);
  j["A"] = {{"value", rep.a_value}, {"error_estimate", rep.a_error}, {"used", rep.a_used}};
  j["worst_relative_error"] = rep.worst_relative_error;
  j["rel_tol"] = c.rel_tol;
  j["pass"] = rep.pass;
  write_json(dir / "report.json", j);
  return rep.pass;
}

bool emit_converge(const ExperimentConfig& c, const fs::path& dir, RunLog& log) {
  const auto rep = run_converge(c);
  fmt::memory_buffer csv;
  auto out = std::back_inserter(csv);
  fmt::format_to(out, "h,half_width,radius,steps,time,continuum_time,error,leaked\n");
  json rows = json::array();
  for (const auto& r : rep.rows) {
    fmt::format_to(out, "{:.17g},{},{},{},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.h, r.half_width,
                   r.radius, r.steps, r.time, r.continuum_time, r.error, r.leaked);
    rows.push_back({{"h", r.h},
                    {"half_width", r.half_width},
                    {"radius", r.radius},
                    {"steps", r.steps},
                    {"time", r.time},
                    {"time_adjustment", r.time - c.T},
                    {"continuum_time", r.continuum_time},
                    {"error", r.error},
                    {"leaked", r.leaked}});
  }
  atomic_write(dir / "converge.csv", fmt::to_string(csv));
  json j = header(c);
  j["reference"] = rep.reference;
  j["norm"] = c.norm;
  j["A"] = {{"value", rep.a_value}, {"error_estimate", rep.a_error}};
  j["rows"] = rows;
  j["fitted_order"] = rep.order;
  j["monotone"] = rep.monotone;
  j["leak_ok"] = rep.leak_ok;
  j["leak_cap"] = c.leak_cap;
  j["order_min"] = c.order_min;
  j["message"] = rep.message;
  j["pass"] = rep.pass;
  write_json(dir / "report.json", j);
  if (!rep.message.empty()) log.line(rep.message);
  return rep.pass;
}

bool emit_moments(const ExperimentConfig& c, const fs::path& dir) {
  const auto rows = run_moments(c);
  fmt::memory_buffer partial_csv, class_csv;
  fmt::format_to(std::back_inserter(partial_csv), "beta,radius,partial_sum\n");
  fmt::format_to(std::back_inserter(class_csv), "beta,growth_exponent,empirical,analytic\n");
  json list = json::array();
  bool agree = true;
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.partials.size(); ++i)
      fmt::format_to(std::back_inserter(partial_csv), "{:.17g},{},{:.17g}\n", r.beta,
                     c.moment_radii[i], r.partials[i]);
    fmt::format_to(std::back_inserter(class_csv), "{:.17g},{:.17g},{},{}\n", r.beta,
                   r.growth_exponent, to_string(r.empirical), to_string(r.analytic));
    list.push_back({{"beta", r.beta},
                    {"growth_exponent", r.growth_exponent},
                    {"empirical", to_string(r.empirical)},
                    {"analytic", to_string(r.analytic)}});
    if (r.empirical != r.analytic) agree = false;
  }
  atomic_write(dir / "moments_partials.csv", fmt::to_string(partial_csv));
  atomic_write(dir / "moments.csv", fmt::to_string(class_csv));
  json j = header(c);
  j["rows"] = list;
  j["pass"] = agree;
  write_json(dir / "report.json", j);
  return agree;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& c, const std::filesystem::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir))
    return {2, "cannot create output directory " + out_dir.string() + ": " + ec.message()};
  try {
    json cfg = to_json(c);
    cfg["schema_version"] = kSchemaVersion;
    cfg["config_hash"] = config_hash(c);
    write_json(out_dir / "config.json", cfg);
  } catch (const std::exception& e) {
    return {2, std::string("cannot write to output directory: ") + e.what()};
  }

  RunLog log(out_dir / "run.log");
  log.line(std::string("start ") + to_string(c.kind) + " config_hash=" + config_hash(c));
  try {
    bool pass = false;
    switch (c.kind) {
      case ExperimentKind::walk: pass = emit_walk(c, out_dir); break;
      case ExperimentKind::evolve: pass = emit_evolve(c, out_dir); break;
      case ExperimentKind::symbol: pass = emit_symbol(c, out_dir); break;
      case ExperimentKind::operators: pass = emit_operators(c, out_dir); break;
      case ExperimentKind::converge: pass = emit_converge(c, out_dir, log); break;
      case ExperimentKind::moments: pass = emit_moments(c, out_dir); break;
    }
    const std::string verdict = pass ? "PASS" : "FAIL";
    log.line("end " + verdict);
    return {pass ? 0 : 1, std::string(to_string(c.kind)) + ": " + verdict};
  } catch (const std::exception& e) {
    log.line(std::string("error ") + e.what());
    return {2, std::string(to_string(c.kind)) + ": error: " + e.what()};
  }
}

}  // namespace fraclap
