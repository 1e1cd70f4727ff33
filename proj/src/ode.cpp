#include "plap/ode.hpp"

#include <algorithm>
#include <cmath>

namespace plap {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Hairer's continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

bool finite(const DormandPrince::State& s) { return std::isfinite(s[0]) && std::isfinite(s[1]); }

}  // namespace

DormandPrince::DormandPrince(Rhs rhs, OdeOptions options)
    : rhs_(std::move(rhs)), options_(options) {}

void DormandPrince::initialize(double x0, const State& y0) {
  x_ = x_old_ = x0;
  y_ = y_old_ = y0;
  h_ = options_.initial_step;
  k1_ = rhs_(x0, y0);
  steps_ = 0;
  h_last_ = 0.0;
  r1_ = r2_ = r3_ = r4_ = r5_ = State::Zero();
  r1_ = y0;
}

bool DormandPrince::step(double x_limit) {
  const double remaining = x_limit - x_;
  if (remaining <= 0.0) return false;
  if (++steps_ > options_.max_steps) {
    throw IntegrationError(IntegrationError::Kind::too_many_steps, x_, "ODE step budget exhausted");
  }
  double h = std::min(h_, remaining);
  if (options_.max_step > 0.0) h = std::min(h, options_.max_step);
  const double h_min = 1e-15 * std::max(1.0, std::abs(x_));

  for (;;) {
    const bool last = h >= remaining;
    if (last) h = remaining;
    const State k2 = rhs_(x_ + c2 * h, y_ + h * (a21 * k1_));
    const State k3 = rhs_(x_ + c3 * h, y_ + h * (a31 * k1_ + a32 * k2));
    const State k4 = rhs_(x_ + c4 * h, y_ + h * (a41 * k1_ + a42 * k2 + a43 * k3));
    const State k5 = rhs_(x_ + c5 * h, y_ + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4));
    const State k6 =
        rhs_(x_ + h, y_ + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const State y_new = y_ + h * (a71 * k1_ + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const double x_new = last ? x_limit : x_ + h;
    const State k7 = rhs_(x_new, y_new);

    const State err = h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err_norm = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double scale =
          options_.abs_tol + options_.rel_tol * std::max(std::abs(y_[i]), std::abs(y_new[i]));
      err_norm += (err[i] / scale) * (err[i] / scale);
    }
    err_norm = std::sqrt(err_norm / 2.0);

    if (!finite(y_new) || !std::isfinite(err_norm)) {
      if (h <= h_min) {
        throw IntegrationError(IntegrationError::Kind::non_finite, x_, "ODE state became non-finite");
      }
      h *= 0.1;
      continue;
    }

    if (err_norm <= 1.0) {
      const State ydiff = y_new - y_;
      const State bspl = h * k1_ - ydiff;
      r1_ = y_;
      r2_ = ydiff;
      r3_ = bspl;
      r4_ = ydiff - h * k7 - bspl;
      r5_ = h * (d1 * k1_ + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      h_last_ = h;
      x_old_ = x_;
      y_old_ = y_;
      x_ = x_new;
      y_ = y_new;
      k1_ = k7;
      const double grow = err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
      h_ = std::max(h * grow, h_min);
      return true;
    }

    const double shrink = std::clamp(0.9 * std::pow(err_norm, -0.2), 0.1, 0.9);
    h *= shrink;
    if (h < h_min) {
      throw IntegrationError(IntegrationError::Kind::step_underflow, x_, "ODE step size underflow");
    }
  }
}

DormandPrince::State DormandPrince::dense(double x) const {
  if (h_last_ == 0.0) return y_;
  const double theta = (x - x_old_) / h_last_;
  const double theta1 = 1.0 - theta;
  return r1_ + theta * (r2_ + theta1 * (r3_ + theta * (r4_ + theta1 * r5_)));
}

}  // namespace plap
