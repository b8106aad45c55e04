#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wnac/harness.hpp"

namespace wnac {

// Shortest-round-trip-safe form: 17 significant digits, "inf"/"-inf"/"nan".
std::string format_double(double v);
double parse_double(const std::string& text);

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);
void write_aggregates_csv(const std::filesystem::path& path,
                          const std::vector<SweepAggregate>& aggregates);
std::vector<SweepAggregate> read_aggregates_csv(const std::filesystem::path& path);
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);

// Columns t,x1..xn; every `stride`-th state row plus row 0.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          std::size_t stride = 100);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);
nlohmann::ordered_json read_json(const std::filesystem::path& path);

}  // namespace wnac
