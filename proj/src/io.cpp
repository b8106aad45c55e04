#include "wnac/io.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace wnac {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError("not a number: '" + text + "'");
  }
  return v;
}

namespace {

std::ofstream open_for_write(const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing: " + std::strerror(errno));
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path, const std::string& header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw ValidationError(path.string() + ": expected header '" + header + "'");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

constexpr const char* kSweepHeader = "mode,sigma,seed,delta,diverged";
constexpr const char* kAggregateHeader = "mode,sigma,mean_delta,std_delta,divergence_fraction";

}  // namespace

void write_sweep_csv(const fs::path& path, const std::vector<SweepRow>& rows) {
  auto out = open_for_write(path);
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << to_string(r.mode) << ',' << format_double(r.sigma) << ',' << r.seed << ','
        << format_double(r.delta) << ',' << (r.diverged ? 1 : 0) << '\n';
  }
  finish(out, path);
}

std::vector<SweepRow> read_sweep_csv(const fs::path& path) {
  std::vector<SweepRow> rows;
  for (const auto& f : read_csv(path, kSweepHeader)) {
    if (f.size() != 5) throw ValidationError(path.string() + ": malformed sweep row");
    rows.push_back({parse_coherence_mode(f[0]), parse_double(f[1]), std::stoull(f[2]),
                    parse_double(f[3]), f[4] == "1"});
  }
  return rows;
}

void write_aggregates_csv(const fs::path& path, const std::vector<SweepAggregate>& aggregates) {
  auto out = open_for_write(path);
  out << kAggregateHeader << '\n';
  for (const auto& a : aggregates) {
    out << to_string(a.mode) << ',' << format_double(a.sigma) << ',' << format_double(a.mean_delta)
        << ',' << format_double(a.std_delta) << ',' << format_double(a.divergence_fraction) << '\n';
  }
  finish(out, path);
}

std::vector<SweepAggregate> read_aggregates_csv(const fs::path& path) {
  std::vector<SweepAggregate> out;
  for (const auto& f : read_csv(path, kAggregateHeader)) {
    if (f.size() != 5) throw ValidationError(path.string() + ": malformed aggregate row");
    out.push_back({parse_coherence_mode(f[0]), parse_double(f[1]), parse_double(f[2]),
                   parse_double(f[3]), parse_double(f[4])});
  }
  return out;
}

void write_trajectory_csv(const fs::path& path, const Trajectory& traj, std::size_t stride) {
  if (stride == 0) throw ValidationError("trajectory export: stride must be positive");
  auto out = open_for_write(path);
  out << 't';
  for (std::size_t i = 0; i < traj.dimension(); ++i) out << ",x" << (i + 1);
  out << '\n';
  for (std::size_t k = 0; k <= traj.steps_taken(); k += stride) {
    out << format_double(traj.grid.time(k));
    for (Eigen::Index i = 0; i < traj.states.cols(); ++i) {
      out << ',' << format_double(traj.states(static_cast<Eigen::Index>(k), i));
    }
    out << '\n';
  }
  finish(out, path);
}

void write_json(const fs::path& path, const nlohmann::ordered_json& doc) {
  auto out = open_for_write(path);
  out << doc.dump(2) << '\n';
  finish(out, path);
}

nlohmann::ordered_json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  try {
    return nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
}

}  // namespace wnac
