#pragma once

// Uniform Dirichlet grid on [0, l] and the discrete p-energy machinery built on it.
//
// A grid function stores only interior nodal values; the boundary values are
// identically zero and enter every difference quotient implicitly.  With the
// weighted pairing <u, v>_h = sum u_i v_i dx the flux-form p-Laplacian is the
// exact gradient of the discrete energy (1/p) sum |D_{i+1/2} u|^p dx.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace plap {

class GridMismatch : public std::invalid_argument {
 public:
  GridMismatch() : std::invalid_argument("grid functions live on different grids") {}
};

template <typename Scalar>
class BasicGrid {
 public:
  BasicGrid(Scalar length, int n_cells)
      : length_(length), n_cells_(n_cells), spacing_(length / static_cast<Scalar>(n_cells)) {
    if (!(length > Scalar(0)) || !std::isfinite(static_cast<double>(length))) {
      throw std::invalid_argument("grid length must be positive and finite");
    }
    if (n_cells < 2) {
      throw std::invalid_argument("grid needs at least 2 cells");
    }
  }

  Scalar length() const { return length_; }
  int n_cells() const { return n_cells_; }
  int n_interior() const { return n_cells_ - 1; }
  Scalar spacing() const { return spacing_; }

  /// x_i for i = 0..n_cells; the right endpoint is returned as l exactly.
  Scalar node(int i) const {
    return i == n_cells_ ? length_ : static_cast<Scalar>(i) * spacing_;
  }

  /// Coordinate of interior unknown k (node k + 1).
  Scalar interior_node(int k) const { return node(k + 1); }

  bool operator==(const BasicGrid& other) const {
    return length_ == other.length_ && n_cells_ == other.n_cells_;
  }
  bool operator!=(const BasicGrid& other) const { return !(*this == other); }

 private:
  Scalar length_;
  int n_cells_;
  Scalar spacing_;
};

template <typename Scalar>
class BasicGridFunction {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit BasicGridFunction(BasicGrid<Scalar> grid)
      : grid_(std::move(grid)), values_(Vector::Zero(grid_.n_interior())) {}

  BasicGridFunction(BasicGrid<Scalar> grid, Vector values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.n_interior()) {
      throw std::invalid_argument("grid function needs n_cells - 1 interior values, got " +
                                  std::to_string(values_.size()));
    }
  }

  /// Samples `f` at the interior nodes.
  template <typename F>
  static BasicGridFunction sample(const BasicGrid<Scalar>& grid, F&& f) {
    Vector v(grid.n_interior());
    for (int k = 0; k < grid.n_interior(); ++k) v[k] = f(grid.interior_node(k));
    return BasicGridFunction(grid, std::move(v));
  }

  const BasicGrid<Scalar>& grid() const { return grid_; }
  const Vector& values() const { return values_; }
  Vector& values() { return values_; }
  int size() const { return static_cast<int>(values_.size()); }

  Scalar operator[](int k) const { return values_[k]; }
  Scalar& operator[](int k) { return values_[k]; }

  /// Value at node i = 0..n_cells, including the zero boundary values.
  Scalar node_value(int i) const {
    return (i <= 0 || i >= grid_.n_cells()) ? Scalar(0) : values_[i - 1];
  }

  /// Difference quotients D_{i+1/2} = (u_{i+1} - u_i) / dx for i = 0..n_cells-1.
  Vector differences() const {
    const int n = grid_.n_cells();
    Vector d(n);
    const Scalar inv_dx = Scalar(1) / grid_.spacing();
    for (int i = 0; i < n; ++i) d[i] = (node_value(i + 1) - node_value(i)) * inv_dx;
    return d;
  }

  BasicGridFunction& operator+=(const BasicGridFunction& o) {
    require_same_grid(o);
    values_ += o.values_;
    return *this;
  }
  BasicGridFunction& operator-=(const BasicGridFunction& o) {
    require_same_grid(o);
    values_ -= o.values_;
    return *this;
  }
  BasicGridFunction& operator*=(Scalar c) {
    values_ *= c;
    return *this;
  }

  void require_same_grid(const BasicGridFunction& o) const {
    if (grid_ != o.grid_) throw GridMismatch();
  }

 private:
  BasicGrid<Scalar> grid_;
  Vector values_;
};

template <typename Scalar>
BasicGridFunction<Scalar> operator+(BasicGridFunction<Scalar> a, const BasicGridFunction<Scalar>& b) {
  return a += b;
}
template <typename Scalar>
BasicGridFunction<Scalar> operator-(BasicGridFunction<Scalar> a, const BasicGridFunction<Scalar>& b) {
  return a -= b;
}
template <typename Scalar>
BasicGridFunction<Scalar> operator-(BasicGridFunction<Scalar> a) {
  return a *= Scalar(-1);
}
template <typename Scalar>
BasicGridFunction<Scalar> operator*(Scalar c, BasicGridFunction<Scalar> a) {
  return a *= c;
}
template <typename Scalar>
BasicGridFunction<Scalar> operator*(BasicGridFunction<Scalar> a, Scalar c) {
  return a *= c;
}

using Grid = BasicGrid<double>;
using GridFunction = BasicGridFunction<double>;

inline void require_p(double p) {
  if (!(p >= 2.0) || !std::isfinite(p)) {
    throw std::invalid_argument("exponent p must be a finite real >= 2, got " + std::to_string(p));
  }
}

/// Phi(s) = |s|^{p-2} s.
template <typename Scalar>
Scalar flux(Scalar s, Scalar p) {
  using std::abs;
  using std::pow;
  if (p == Scalar(2)) return s;
  return pow(abs(s), p - Scalar(2)) * s;
}

/// Phi'(s) = (p - 1) |s|^{p-2}.
template <typename Scalar>
Scalar flux_derivative(Scalar s, Scalar p) {
  using std::abs;
  using std::pow;
  if (p == Scalar(2)) return Scalar(1);
  return (p - Scalar(1)) * pow(abs(s), p - Scalar(2));
}

/// phi_p^h(u) = sum_i (1/p) |D_{i+1/2} u|^p dx.
template <typename Scalar>
Scalar p_dirichlet_energy(const BasicGridFunction<Scalar>& u, Scalar p) {
  require_p(static_cast<double>(p));
  using std::abs;
  using std::pow;
  const auto d = u.differences();
  Scalar sum(0);
  for (Eigen::Index i = 0; i < d.size(); ++i) sum += pow(abs(d[i]), p);
  return sum * u.grid().spacing() / p;
}

/// (A_p^h u)_i = -(Phi(D_{i+1/2}) - Phi(D_{i-1/2})) / dx.
template <typename Scalar>
BasicGridFunction<Scalar> p_laplacian(const BasicGridFunction<Scalar>& u, Scalar p) {
  require_p(static_cast<double>(p));
  const auto d = u.differences();
  const Scalar inv_dx = Scalar(1) / u.grid().spacing();
  typename BasicGridFunction<Scalar>::Vector out(u.size());
  Scalar left = flux(d[0], p);
  for (int k = 0; k < u.size(); ++k) {
    const Scalar right = flux(d[k + 1], p);
    out[k] = -(right - left) * inv_dx;
    left = right;
  }
  return BasicGridFunction<Scalar>(u.grid(), std::move(out));
}

template <typename Scalar>
Scalar inner_product(const BasicGridFunction<Scalar>& u, const BasicGridFunction<Scalar>& v) {
  u.require_same_grid(v);
  return u.values().dot(v.values()) * u.grid().spacing();
}

template <typename Scalar>
Scalar sup_norm(const BasicGridFunction<Scalar>& u) {
  return u.size() == 0 ? Scalar(0) : u.values().cwiseAbs().maxCoeff();
}

template <typename Scalar>
Scalar l2_norm(const BasicGridFunction<Scalar>& u) {
  using std::sqrt;
  return sqrt(u.values().squaredNorm() * u.grid().spacing());
}

/// (sum |D_{i+1/2} u|^p dx)^{1/p}; a norm on grid functions by the zero boundary values.
template <typename Scalar>
Scalar w1p_seminorm(const BasicGridFunction<Scalar>& u, Scalar p) {
  require_p(static_cast<double>(p));
  using std::pow;
  return pow(p * p_dirichlet_energy(u, p), Scalar(1) / p);
}

struct NormKind {
  enum class Type { sup, l2, w1p };
  Type type = Type::l2;
  double p = 2.0;

  static NormKind sup() { return {Type::sup, 2.0}; }
  static NormKind l2() { return {Type::l2, 2.0}; }
  static NormKind w1p(double p) { return {Type::w1p, p}; }
};

template <typename Scalar>
Scalar norm(const BasicGridFunction<Scalar>& u, NormKind kind) {
  switch (kind.type) {
    case NormKind::Type::sup:
      return sup_norm(u);
    case NormKind::Type::l2:
      return l2_norm(u);
    case NormKind::Type::w1p:
      return w1p_seminorm(u, static_cast<Scalar>(kind.p));
  }
  return Scalar(0);
}

template <typename Scalar>
Scalar sup_distance(const BasicGridFunction<Scalar>& u, const BasicGridFunction<Scalar>& v) {
  u.require_same_grid(v);
  return u.size() == 0 ? Scalar(0) : (u.values() - v.values()).cwiseAbs().maxCoeff();
}

/// Sign changes of the interior values, skipping exact zeros.
template <typename Scalar>
int count_sign_changes(const BasicGridFunction<Scalar>& u, Scalar zero_tol = Scalar(0)) {
  int changes = 0;
  int last_sign = 0;
  for (int k = 0; k < u.size(); ++k) {
    const Scalar v = u[k];
    const int s = v > zero_tol ? 1 : (v < -zero_tol ? -1 : 0);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) ++changes;
    last_sign = s;
  }
  return changes;
}

/// Symmetric tridiagonal system stored by diagonals (off-diagonal entry k couples k and k+1).
template <typename Scalar>
struct SymmetricTridiagonal {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector diagonal;
  Vector off_diagonal;

  Vector multiply(const Vector& x) const {
    const Eigen::Index n = diagonal.size();
    Vector y = diagonal.cwiseProduct(x);
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      y[k] += off_diagonal[k] * x[k + 1];
      y[k + 1] += off_diagonal[k] * x[k];
    }
    return y;
  }

  /// Thomas elimination; intended for diagonally dominant or SPD systems.
  Vector solve(const Vector& rhs) const {
    const Eigen::Index n = diagonal.size();
    Vector c(n), x(n);
    Scalar denom = diagonal[0];
    c[0] = n > 1 ? off_diagonal[0] / denom : Scalar(0);
    x[0] = rhs[0] / denom;
    for (Eigen::Index k = 1; k < n; ++k) {
      denom = diagonal[k] - off_diagonal[k - 1] * c[k - 1];
      c[k] = k + 1 < n ? off_diagonal[k] / denom : Scalar(0);
      x[k] = (rhs[k] - off_diagonal[k - 1] * x[k - 1]) / denom;
    }
    for (Eigen::Index k = n - 2; k >= 0; --k) x[k] -= c[k] * x[k + 1];
    return x;
  }
};

/// Jacobian of A_p^h at u (in the weighted pairing).  Curvature terms Phi'(D) are
/// floored by 1e-12 (1 + |D|^{p-2}) so flat slopes never produce a singular system.
template <typename Scalar>
SymmetricTridiagonal<Scalar> p_laplacian_jacobian(const BasicGridFunction<Scalar>& u, Scalar p) {
  require_p(static_cast<double>(p));
  using std::abs;
  using std::pow;
  const auto d = u.differences();
  const Scalar inv_dx2 = Scalar(1) / (u.grid().spacing() * u.grid().spacing());
  const int n = u.size();
  typename BasicGridFunction<Scalar>::Vector curvature(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const Scalar floor = Scalar(1e-12) * (Scalar(1) + pow(abs(d[i]), p - Scalar(2)));
    curvature[i] = (flux_derivative(d[i], p) + floor) * inv_dx2;
  }
  SymmetricTridiagonal<Scalar> jac;
  jac.diagonal.resize(n);
  jac.off_diagonal.resize(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) {
    jac.diagonal[k] = curvature[k] + curvature[k + 1];
    if (k + 1 < n) jac.off_diagonal[k] = -curvature[k + 1];
  }
  return jac;
}

}  // namespace plap
