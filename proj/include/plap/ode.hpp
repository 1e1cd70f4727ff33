#pragma once

// Adaptive Dormand-Prince 5(4) integrator for planar systems with continuous
// (4th order) dense output.  Used by every shooting computation.

#include <Eigen/Core>

#include <functional>
#include <stdexcept>
#include <string>

namespace plap {

class IntegrationError : public std::runtime_error {
 public:
  enum class Kind { step_underflow, too_many_steps, non_finite };
  IntegrationError(Kind kind, double x, const std::string& what)
      : std::runtime_error(what), kind_(kind), x_(x) {}
  Kind kind() const { return kind_; }
  double position() const { return x_; }

 private:
  Kind kind_;
  double x_;
};

struct OdeOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-13;
  double initial_step = 1e-3;
  double max_step = 0.0;  // 0: unbounded
  long max_steps = 2'000'000;
};

class DormandPrince {
 public:
  using State = Eigen::Vector2d;
  using Rhs = std::function<State(double, const State&)>;

  DormandPrince(Rhs rhs, OdeOptions options);

  void initialize(double x0, const State& y0);

  /// Advances by one accepted step, never past `x_limit`.  Returns false once x == x_limit.
  bool step(double x_limit);

  double x() const { return x_; }
  const State& y() const { return y_; }
  double x_previous() const { return x_old_; }
  const State& y_previous() const { return y_old_; }
  long steps_taken() const { return steps_; }

  /// Continuous extension on [x_previous(), x()].
  State dense(double x) const;

 private:
  Rhs rhs_;
  OdeOptions options_;
  double x_ = 0.0;
  double x_old_ = 0.0;
  double h_ = 0.0;
  State y_ = State::Zero();
  State y_old_ = State::Zero();
  State k1_ = State::Zero();
  // Dense-output coefficients of the last accepted step.
  State r1_, r2_, r3_, r4_, r5_;
  double h_last_ = 0.0;
  long steps_ = 0;
};

}  // namespace plap
