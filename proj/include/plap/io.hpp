#pragma once

// CSV and JSON serialization of grid functions, trajectories and records.

#include "plap/grid.hpp"
#include "plap/orbits.hpp"
#include "plap/semiflow.hpp"
#include "plap/stationary.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace plap {

using Json = nlohmann::ordered_json;

/// Columns x,u over all grid nodes including the boundary.
void write_grid_function_csv(const std::filesystem::path& path, const GridFunction& u);

/// Columns t,sup,l2,energy,lyapunov,udot_l2.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

struct EigenRow {
  int n = 1;
  double p = 2.0;
  double l = 1.0;
  double lambda_closed = 0.0;
  double lambda_shooting = 0.0;
  double gap = 0.0;  // relative
};

/// Columns n,p,l,lambda_closed,lambda_shooting,gap.
void write_eigen_csv(const std::filesystem::path& path, const std::vector<EigenRow>& rows);

void write_json(const std::filesystem::path& path, const Json& value);

/// Finite values as numbers, others as "nan", "inf", "-inf".
Json json_number(double v);

Json to_json(const EquilibriumRecord& rec);
Json to_json(const Trajectory& traj);  // summary, no profiles
Json to_json(const DirectionReport& dir);
Json to_json(const ConnectingOrbitRecord& orbit, const std::vector<EquilibriumRecord>& equilibria);
Json to_json(const ChainReport& chain);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace plap
