#include "plap/orbits.hpp"

#include "plap/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace plap {
namespace {

std::size_t closest(const GridFunction& u, const std::vector<EquilibriumRecord>& candidates, double& distance) {
  std::size_t best = 0;
  distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double d = sup_distance(u, candidates[i].u);
    if (d < distance) {
      distance = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

std::string to_string(DirectionOutcome outcome) {
  switch (outcome) {
    case DirectionOutcome::connected:
      return "connected";
    case DirectionOutcome::returned:
      return "returned";
    case DirectionOutcome::blowup:
      return "blowup";
    case DirectionOutcome::unmatched:
      return "unmatched";
    case DirectionOutcome::solver_failure:
      return "solver_failure";
  }
  return "unmatched";
}

std::optional<std::size_t> omega_limit_detect(const Trajectory& traj, const std::vector<EquilibriumRecord>& candidates,
                                              const ConvergenceCriteria& criteria) {
  if (traj.termination != Termination::completed || candidates.empty() || traj.snapshots.size() < 2) {
    return std::nullopt;
  }
  const std::size_t window = static_cast<std::size_t>(std::max(1, criteria.window));
  // The initial snapshot has no velocity, so it cannot count toward the window.
  if (traj.snapshots.size() - 1 < window) return std::nullopt;

  double d = 0.0;
  const std::size_t match = closest(traj.final().u, candidates, d);
  if (d > criteria.distance_tol) return std::nullopt;
  for (std::size_t k = traj.snapshots.size() - window; k < traj.snapshots.size(); ++k) {
    const auto& snap = traj.snapshots[k];
    if (snap.udot_l2 > criteria.udot_tol) return std::nullopt;
    if (sup_distance(snap.u, candidates[match].u) > criteria.distance_tol) return std::nullopt;
  }
  return match;
}

std::vector<SignedDirection> default_directions(const Reaction& r, const Grid& grid) {
  int k0 = 1;
  try {
    k0 = std::max(1, index_bracket(r, grid.length()).k0);
  } catch (const ResonanceError&) {
    // Resonant slope at zero: fall back to the first mode.
  }
  std::vector<SignedDirection> out;
  for (int n = 1; n <= k0; ++n) {
    const GridFunction e = eigenfunction(n, r.p(), grid).eigenfunction;
    out.push_back({n, 1.0, e});
    out.push_back({n, -1.0, -e});
  }
  return out;
}

ConnectionReport connect(const Reaction& r, const std::vector<EquilibriumRecord>& equilibria, std::size_t from,
                         const std::vector<SignedDirection>& directions, double eps, const EvolutionConfig& cfg,
                         const ConvergenceCriteria& criteria) {
  if (from >= equilibria.size()) throw std::out_of_range("source equilibrium index out of range");
  if (!(eps > 0.0)) throw std::invalid_argument("perturbation size must be positive");
  const EquilibriumRecord& source = equilibria[from];

  std::vector<GridFunction> seeds;
  for (const auto& dir : directions) {
    const double scale = sup_norm(dir.shape);
    if (!(scale > 0.0)) throw std::invalid_argument("perturbation direction is zero");
    seeds.push_back(source.u + (eps / scale) * dir.shape);
  }
  std::vector<Trajectory> flows(directions.size());
  parallel_for(directions.size(), [&](std::size_t i) { flows[i] = evolve(seeds[i], r, cfg); });

  ConnectionReport report;
  for (std::size_t i = 0; i < directions.size(); ++i) {
    const auto& dir = directions[i];
    const GridFunction& seed = seeds[i];
    Trajectory& traj = flows[i];

    DirectionReport dr{dir.index, dir.sign};
    dr.final_udot = traj.final().udot_l2;
    closest(traj.final().u, equilibria, dr.closest_distance);
    if (traj.termination == Termination::blowup) {
      dr.outcome = DirectionOutcome::blowup;
    } else if (traj.termination == Termination::solver_failure) {
      dr.outcome = DirectionOutcome::solver_failure;
    } else if (auto target = omega_limit_detect(traj, equilibria, criteria); !target) {
      dr.outcome = DirectionOutcome::unmatched;
    } else if (*target == from) {
      dr.outcome = DirectionOutcome::returned;
    } else {
      dr.outcome = DirectionOutcome::connected;
      ConnectingOrbitRecord rec;
      rec.source = from;
      rec.target = *target;
      rec.direction_index = dir.index;
      rec.direction_sign = dir.sign;
      rec.lyapunov_drop = source.lyapunov_value - equilibria[*target].lyapunov_value;
      rec.final_udot = dr.final_udot;
      rec.final_distance = sup_distance(traj.final().u, equilibria[*target].u);
      rec.initial_distance = sup_distance(seed, source.u);
      rec.trajectory = std::move(traj);
      report.orbits.push_back(std::move(rec));
    }
    report.directions.push_back(dr);
  }
  return report;
}

ChainReport heteroclinic_chain_report(const std::vector<EquilibriumRecord>& equilibria,
                                      const std::vector<ConnectingOrbitRecord>& orbits) {
  ChainReport report;
  report.nodes.resize(equilibria.size());
  for (std::size_t i = 0; i < equilibria.size(); ++i) report.nodes[i] = i;
  std::stable_sort(report.nodes.begin(), report.nodes.end(), [&](std::size_t a, std::size_t b) {
    return equilibria[a].lyapunov_value > equilibria[b].lyapunov_value;
  });
  std::vector<std::size_t> position(equilibria.size());
  for (std::size_t k = 0; k < report.nodes.size(); ++k) position[report.nodes[k]] = k;

  std::vector<std::vector<std::size_t>> adjacency(equilibria.size());
  std::vector<int> indegree(equilibria.size(), 0);
  for (const auto& orbit : orbits) {
    if (orbit.source >= equilibria.size() || orbit.target >= equilibria.size()) {
      throw std::out_of_range("orbit refers to an unknown equilibrium");
    }
    const std::size_t a = position[orbit.source], b = position[orbit.target];
    const bool duplicate = std::any_of(report.edges.begin(), report.edges.end(),
                                       [&](const ChainEdge& e) { return e.from == a && e.to == b; });
    if (duplicate) continue;
    report.edges.push_back({a, b, orbit.lyapunov_drop});
    adjacency[a].push_back(b);
    ++indegree[b];
  }

  // Kahn's algorithm; leftover nodes sit on a directed cycle.
  std::queue<std::size_t> ready;
  for (std::size_t k = 0; k < indegree.size(); ++k) {
    if (indegree[k] == 0) ready.push(k);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const std::size_t k = ready.front();
    ready.pop();
    ++visited;
    for (const std::size_t next : adjacency[k]) {
      if (--indegree[next] == 0) ready.push(next);
    }
  }
  report.acyclic = visited == indegree.size();
  if (!report.acyclic) throw ChainCycleError("connection graph has a directed cycle");
  return report;
}

}  // namespace plap
