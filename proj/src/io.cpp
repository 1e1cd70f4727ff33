#include "plap/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace plap {
namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  return out;
}

Json number(double v) { return json_number(v); }

}  // namespace

void write_grid_function_csv(const std::filesystem::path& path, const GridFunction& u) {
  auto out = open_output(path);
  out << "x,u\n";
  for (int i = 0; i <= u.grid().n_cells(); ++i) out << u.grid().node(i) << ',' << u.node_value(i) << '\n';
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  auto out = open_output(path);
  out << "t,sup,l2,energy,lyapunov,udot_l2\n";
  for (const auto& s : traj.snapshots) {
    out << s.t << ',' << s.sup << ',' << s.l2 << ',' << s.energy << ',' << s.lyapunov << ',' << s.udot_l2 << '\n';
  }
}

void write_eigen_csv(const std::filesystem::path& path, const std::vector<EigenRow>& rows) {
  auto out = open_output(path);
  out << "n,p,l,lambda_closed,lambda_shooting,gap\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.p << ',' << r.l << ',' << r.lambda_closed << ',' << r.lambda_shooting << ',' << r.gap
        << '\n';
  }
}

Json json_number(double v) {
  // Non-finite values are not valid JSON numbers.
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

void write_json(const std::filesystem::path& path, const Json& value) {
  auto out = open_output(path);
  out << value.dump(2) << '\n';
}

Json to_json(const EquilibriumRecord& rec) {
  Json j;
  j["trivial"] = rec.trivial;
  j["shooting_slope"] = number(rec.shooting_slope);
  j["boundary_mismatch"] = number(rec.boundary_mismatch);
  j["elliptic_residual"] = number(rec.elliptic_residual);
  j["sampled_residual"] = number(rec.sampled_residual);
  j["lyapunov_value"] = number(rec.lyapunov_value);
  j["n_sign_changes"] = rec.n_sign_changes;
  j["stability_hint"] = to_string(rec.stability_hint);
  j["sup"] = number(sup_norm(rec.u));
  return j;
}

Json to_json(const Trajectory& traj) {
  Json j;
  j["p"] = traj.p;
  j["termination"] = to_string(traj.termination);
  j["termination_time"] = number(traj.termination_time);
  j["steps"] = traj.steps;
  j["snapshots"] = traj.snapshots.size();
  j["reached_steady_state"] = traj.reached_steady_state;
  j["max_prox_residual"] = number(traj.max_prox_residual);
  if (!traj.snapshots.empty()) {
    const auto& f = traj.final();
    j["final"] = {{"t", number(f.t)},           {"sup", number(f.sup)},
                  {"l2", number(f.l2)},         {"energy", number(f.energy)},
                  {"lyapunov", number(f.lyapunov)}, {"udot_l2", number(f.udot_l2)}};
  }
  return j;
}

Json to_json(const DirectionReport& dir) {
  return {{"direction", dir.direction_index},
          {"sign", dir.sign},
          {"outcome", to_string(dir.outcome)},
          {"final_udot", number(dir.final_udot)},
          {"closest_distance", number(dir.closest_distance)}};
}

Json to_json(const ConnectingOrbitRecord& orbit, const std::vector<EquilibriumRecord>& equilibria) {
  Json j;
  j["source"] = orbit.source;
  j["target"] = orbit.target;
  j["direction"] = orbit.direction_index;
  j["sign"] = orbit.direction_sign;
  j["lyapunov_source"] = number(equilibria.at(orbit.source).lyapunov_value);
  j["lyapunov_target"] = number(equilibria.at(orbit.target).lyapunov_value);
  j["lyapunov_drop"] = number(orbit.lyapunov_drop);
  j["final_udot"] = number(orbit.final_udot);
  j["final_distance"] = number(orbit.final_distance);
  j["initial_distance"] = number(orbit.initial_distance);
  j["trajectory"] = to_json(orbit.trajectory);
  return j;
}

Json to_json(const ChainReport& chain) {
  Json edges = Json::array();
  for (const auto& e : chain.edges) {
    edges.push_back({{"from", chain.nodes[e.from]}, {"to", chain.nodes[e.to]}, {"lyapunov_drop", number(e.lyapunov_drop)}});
  }
  return {{"nodes", chain.nodes}, {"edges", edges}, {"acyclic", chain.acyclic}};
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << value;
  return os.str();
}

}  // namespace plap
