#pragma once

// Experiment configuration: a JSON document, parsed strictly (unknown keys are errors).

#include "plap/grid.hpp"
#include "plap/orbits.hpp"
#include "plap/reaction.hpp"
#include "plap/semiflow.hpp"
#include "plap/stationary.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace plap {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::string field = {}, int line = 0);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

enum class ExperimentKind { eigen, evolve, equilibria, connect, verify };

std::string to_string(ExperimentKind kind);

struct ReactionSpec {
  std::string form = "zero";  // zero | homogeneous | interpolated
  double p = 2.0;
  std::vector<double> g{0.0};  // one value = constant, else table over [0, l]
  double a0 = 0.0;
  double a_inf = 0.0;
  double s = 2.0;

  Reaction build(double l) const;
};

struct InitialSpec {
  std::string kind = "eigenfunction";  // eigenfunction | random | values
  int n = 1;
  double amplitude = 1.0;
  std::vector<double> values;  // interior nodal values

  GridFunction build(const Grid& grid, double p, std::uint64_t seed) const;
};

struct EigenSpec {
  std::vector<double> p{2.0};
  int n_max = 3;
  double tol = 1e-10;
};

struct ConnectSpec {
  /// Source equilibrium: the trivial one unless an index into the sorted list is given.
  std::optional<int> from;
  double epsilon = 1e-3;
  /// Signed eigenfunction indices (+n for e_n, -n for -e_n); empty = defaults.
  std::vector<int> directions;
  ConvergenceCriteria criteria;
};

struct VerifySpec {
  std::vector<std::string> only;
  double tolerance_scale = 1.0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::verify;
  std::string output = "out";
  std::optional<std::uint64_t> seed;
  double l = 1.0;
  int n_cells = 64;
  std::optional<ReactionSpec> reaction;
  EvolutionConfig evolution;
  bool write_profiles = false;
  InitialSpec initial;
  EigenSpec eigen;
  EquilibriumSearch equilibria;
  ConnectSpec connect;
  VerifySpec verify;

  Grid grid() const { return Grid(l, n_cells); }
};

/// Parses `text`; `source` names the document in diagnostics.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "config");
ExperimentConfig load_config(const std::string& path);

}  // namespace plap
