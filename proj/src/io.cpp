#include "fraclap/io.hpp"

#include <fmt/format.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fraclap {

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return r;
}

}  // namespace

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string distribution_csv(const LatticeDistribution& dist) {
  fmt::memory_buffer buf;
  for (int d = 0; d < dist.n; ++d) fmt::format_to(std::back_inserter(buf), "k{},", d + 1);
  fmt::format_to(std::back_inserter(buf), "mass\n");
  for (std::size_t i = 0; i < dist.mass.size(); ++i) {
    const auto k = dist.site_of(i);
    for (int d = 0; d < dist.n; ++d) fmt::format_to(std::back_inserter(buf), "{},", k[d]);
    fmt::format_to(std::back_inserter(buf), "{:.17g}\n", dist.mass[i]);
  }
  return fmt::to_string(buf);
}

nlohmann::json distribution_summary(const LatticeDistribution& dist,
                                    std::span<const double> beta_probes) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = dist.n;
  j["h"] = dist.h;
  j["half_width"] = dist.half_width;
  j["steps"] = dist.steps;
  j["time"] = dist.time;
  j["leaked"] = dist.leaked;
  j["total_mass"] = dist.total_mass();
  auto moments = nlohmann::json::array();
  for (double b : beta_probes) moments.push_back({{"beta", b}, {"value", absolute_moment(dist, b)}});
  j["moments"] = moments;
  return j;
}

std::string grid_csv(const GridFunction& u) {
  fmt::memory_buffer buf;
  for (int d = 0; d < u.n; ++d) fmt::format_to(std::back_inserter(buf), "x{},", d + 1);
  fmt::format_to(std::back_inserter(buf), "value\n");
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto x = u.coordinates(i);
    for (int d = 0; d < u.n; ++d) fmt::format_to(std::back_inserter(buf), "{:.17g},", x[d]);
    fmt::format_to(std::back_inserter(buf), "{:.17g}\n", u.values[i]);
  }
  return fmt::to_string(buf);
}

void write_grid_binary(const GridFunction& u, const std::filesystem::path& base) {
  std::string bytes(u.size() * 8, '\0');
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto le = to_little_endian(std::bit_cast<std::uint64_t>(u.values[i]));
    std::memcpy(bytes.data() + 8 * i, &le, 8);
  }
  nlohmann::json header{{"schema_version", kSchemaVersion}, {"n", u.n},
                        {"L", u.period},  {"P", u.points},
                        {"dtype", "float64"}, {"byte_order", "little"}};
  auto bin = base;
  bin += ".bin";
  auto js = base;
  js += ".json";
  atomic_write(bin, bytes);
  atomic_write(js, header.dump(2) + "\n");
}

GridFunction read_grid_binary(const std::filesystem::path& base) {
  auto bin = base;
  bin += ".bin";
  auto js = base;
  js += ".json";
  const auto header = nlohmann::json::parse(read_file(js));
  if (header.at("dtype") != "float64" || header.at("byte_order") != "little")
    throw std::runtime_error("unsupported grid encoding");
  GridFunction u = make_grid(header.at("n").get<int>(), header.at("L").get<double>(),
                             header.at("P").get<int>());
  const std::string bytes = read_file(bin);
  if (bytes.size() != 8 * u.size()) throw std::runtime_error("grid payload has the wrong size");
  for (std::size_t i = 0; i < u.size(); ++i) {
    std::uint64_t le = 0;
    std::memcpy(&le, bytes.data() + 8 * i, 8);
    u.values[i] = std::bit_cast<double>(to_little_endian(le));
  }
  return u;
}

}  // namespace fraclap
