#pragma once

// Connecting orbits between equilibria, found by flowing small perturbations
// forward and matching the omega-limit against a list of known equilibria.

#include "plap/reaction.hpp"
#include "plap/semiflow.hpp"
#include "plap/spectrum.hpp"
#include "plap/stationary.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace plap {

struct ConvergenceCriteria {
  double udot_tol = 1e-6;
  double distance_tol = 1e-4;
  /// Consecutive trailing snapshots that must satisfy both bounds.
  int window = 10;
};

/// Index of the candidate the trajectory has settled on, if any.
std::optional<std::size_t> omega_limit_detect(const Trajectory& traj, const std::vector<EquilibriumRecord>& candidates,
                                              const ConvergenceCriteria& criteria = {});

struct ConnectingOrbitRecord {
  std::size_t source = 0;  // indices into the equilibrium list
  std::size_t target = 0;
  int direction_index = 0;
  double direction_sign = 1.0;
  Trajectory trajectory;
  double lyapunov_drop = 0.0;
  double final_udot = 0.0;
  double final_distance = 0.0;
  /// sup-distance of the seed to the source.
  double initial_distance = 0.0;
};

enum class DirectionOutcome { connected, returned, blowup, unmatched, solver_failure };

std::string to_string(DirectionOutcome outcome);

struct DirectionReport {
  int direction_index = 0;
  double sign = 1.0;
  DirectionOutcome outcome = DirectionOutcome::unmatched;
  double final_udot = 0.0;
  /// Distance to the closest listed equilibrium at the end of the run.
  double closest_distance = 0.0;
};

struct ConnectionReport {
  std::vector<ConnectingOrbitRecord> orbits;
  std::vector<DirectionReport> directions;
};

struct SignedDirection {
  int index = 1;      // eigenfunction index n
  double sign = 1.0;  // +-1
  GridFunction shape;
};

/// +-e_n for n = 1..max(k0, 1), sup-normalized on the grid.
std::vector<SignedDirection> default_directions(const Reaction& r, const Grid& grid);

/// Seeds from + eps * direction for each direction, evolves, and matches the
/// omega-limit. Blow-up, return to `from`, and unmatched ends are reported per
/// direction, not as orbits.
ConnectionReport connect(const Reaction& r, const std::vector<EquilibriumRecord>& equilibria, std::size_t from,
                         const std::vector<SignedDirection>& directions, double eps, const EvolutionConfig& cfg,
                         const ConvergenceCriteria& criteria = {});

class ChainCycleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct ChainEdge {
  std::size_t from = 0;  // node positions (sorted order)
  std::size_t to = 0;
  double lyapunov_drop = 0.0;
};

struct ChainReport {
  /// Equilibrium indices sorted by decreasing lyapunov_value.
  std::vector<std::size_t> nodes;
  std::vector<ChainEdge> edges;
  bool acyclic = true;
};

/// Lyapunov-ordered connection graph; throws ChainCycleError on a directed cycle.
ChainReport heteroclinic_chain_report(const std::vector<EquilibriumRecord>& equilibria,
                                      const std::vector<ConnectingOrbitRecord>& orbits);

}  // namespace plap
