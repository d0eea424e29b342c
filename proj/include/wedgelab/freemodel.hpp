#pragma once

// One-particle scalar model in 1+1 dimensions on a rapidity grid.  The
// momentum at grid point k is p = m (cosh kh, sinh kh); translations are
// diagonal, boosts by commensurate rapidity are index shifts, and the
// modular data of the wedges is given in Bisognano-Wichmann form.

#include "wedgelab/tomita.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wedgelab {

/// Two-dimensional Minkowski vector (x0, x1).
using Vec2 = Eigen::Vector2d;

inline double minkowski_inner2(const Vec2& x, const Vec2& y) { return x(0) * y(0) - x(1) * y(1); }

/// 1+1 boost with rapidity chi.
inline Eigen::Matrix2d boost2(double chi) {
  Eigen::Matrix2d b;
  b << std::cosh(chi), std::sinh(chi), std::sinh(chi), std::cosh(chi);
  return b;
}

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A rapidity that is not an integer multiple of the grid spacing.
class CommensurabilityError : public ModelError {
 public:
  CommensurabilityError(double requested, double lower, double upper)
      : ModelError(message(requested, lower, upper)), lower_(lower), upper_(upper) {}
  double lower() const { return lower_; }
  double upper() const { return upper_; }

 private:
  static std::string message(double requested, double lower, double upper) {
    std::ostringstream os;
    os << "rapidity " << requested << " is not a multiple of the grid spacing; nearest commensurate values are "
       << lower << " and " << upper;
    return os.str();
  }
  double lower_, upper_;
};

struct RapidityGrid {
  double mass = 1.0;
  int K = 1;
  double h = 0.1;

  RapidityGrid() = default;
  RapidityGrid(double m, int k, double spacing) : mass(m), K(k), h(spacing) {
    if (!(m > 0) || !std::isfinite(m)) throw ModelError("mass must be positive");
    if (k < 1) throw ModelError("grid half-size K must be at least 1");
    if (!(spacing > 0) || !std::isfinite(spacing)) throw ModelError("grid spacing must be positive");
  }

  int dim() const { return 2 * K + 1; }
  /// Row of grid label k in [-K, K].
  int row(int k) const { return k + K; }
  double theta(int k) const { return k * h; }

  /// Number of grid steps in rapidity chi; throws for non-integer ratios.
  int steps(double chi, double tol = 1e-9) const {
    const double r = chi / h;
    const double n = std::round(r);
    if (std::abs(r - n) > tol) throw CommensurabilityError(chi, std::floor(r) * h, std::ceil(r) * h);
    return static_cast<int>(n);
  }
};

enum class Side { Right, Left };

inline const char* side_name(Side s) { return s == Side::Right ? "Right" : "Left"; }

/// Right(xi) is the wedge {x : |x0 - xi0| < x1 - xi1}; Left(xi) is its
/// causal complement.
struct ModelWedgeTag {
  Side side = Side::Right;
  Vec2 xi = Vec2::Zero();

  static ModelWedgeTag right(const Vec2& xi) { return {Side::Right, xi}; }
  static ModelWedgeTag left(const Vec2& xi) { return {Side::Left, xi}; }
};

struct BoostRep {
  LinOp op;
  int shift = 0;
  /// Grid labels whose image leaves the grid; their columns are zero.
  std::vector<int> dropped;
};

class ModelFixture {
 public:
  /// With time_reflected set, every translation is composed with the time
  /// reflection (x0, x1) -> (-x0, x1); its spectrum lies in the backward cone.
  explicit ModelFixture(RapidityGrid grid, bool time_reflected = false)
      : grid_(grid), time_reflected_(time_reflected) {}

  const RapidityGrid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  bool time_reflected() const { return time_reflected_; }

  /// Spectral point of the translation generators at grid label k.
  Vec2 momentum(int k) const {
    const auto p = momentum_ext(k);
    return {static_cast<double>(p[0]), static_cast<double>(p[1])};
  }

  /// Phases are evaluated in extended precision: near the grid edge p.xi
  /// reaches 1e3 rad, where rounding the argument in double alone costs 1e-12.
  Eigen::VectorXcd translation_phases(const Vec2& xi) const {
    Eigen::VectorXcd d(dim());
    for (int k = -grid_.K; k <= grid_.K; ++k) {
      const auto p = momentum_ext(k);
      const long double phase = p[0] * xi(0) - p[1] * xi(1);
      d(grid_.row(k)) = Complex(static_cast<double>(std::cos(phase)), static_cast<double>(std::sin(phase)));
    }
    return d;
  }

  /// Diagonal unitary e^{i p . xi}.
  LinOp translation_rep(const Vec2& xi) const { return translation_phases(xi).asDiagonal(); }

  /// Shift e_k -> e_{k+s}, s = chi / h.
  BoostRep boost_rep(double chi) const {
    BoostRep b;
    b.shift = grid_.steps(chi);
    b.op = LinOp::Zero(dim(), dim());
    for (int k = -grid_.K; k <= grid_.K; ++k) {
      const int target = k + b.shift;
      if (target < -grid_.K || target > grid_.K)
        b.dropped.push_back(k);
      else
        b.op(grid_.row(target), grid_.row(k)) = 1.0;
    }
    return b;
  }

  /// U(xi) J0 U(-xi), J0 the componentwise conjugation.  Left and Right
  /// wedges with the same apex share the operator.
  AntilinearOperator wedge_conjugation(const ModelWedgeTag& tag) const {
    return AntilinearOperator(translation_rep(Vec2(2.0 * tag.xi)));
  }

  /// Delta^{it} = U(xi) B(-2 pi t) U(-xi) for Right(xi); the complement
  /// flows the other way.
  LinOp modular_flow(const ModelWedgeTag& tag, double t) const {
    const double chi = (tag.side == Side::Right ? -2.0 : 2.0) * std::numbers::pi * t;
    const BoostRep b = boost_rep(chi);
    return product(product(translation_rep(tag.xi), b.op), translation_rep(Vec2(-tag.xi)));
  }

  /// Rows of grid labels with |k| <= K - margin.
  std::vector<int> interior_rows(int margin) const {
    std::vector<int> rows;
    for (int k = -grid_.K + margin; k <= grid_.K - margin; ++k) rows.push_back(grid_.row(k));
    return rows;
  }

  /// max_k |p_k . xi| over the grid.
  double phase_rate(const Vec2& xi) const {
    double c = 0;
    for (int k = -grid_.K; k <= grid_.K; ++k) c = std::max(c, std::abs(minkowski_inner2(momentum(k), xi)));
    return c;
  }

  /// Rows "theta,p0,p1" for every grid point.
  void write_spectrum_csv(std::ostream& os) const {
    os << "theta,p0,p1\n" << std::setprecision(17);
    for (int k = -grid_.K; k <= grid_.K; ++k) {
      const Vec2 p = momentum(k);
      os << grid_.theta(k) << ',' << p(0) << ',' << p(1) << '\n';
    }
  }

 private:
  std::array<long double, 2> momentum_ext(int k) const {
    if (k < -grid_.K || k > grid_.K) throw ModelError("grid index out of range");
    const long double th = static_cast<long double>(k) * grid_.h;
    const long double p0 = grid_.mass * std::cosh(th);
    return {time_reflected_ ? -p0 : p0, grid_.mass * std::sinh(th)};
  }

  RapidityGrid grid_;
  bool time_reflected_ = false;
};

inline ModelFixture build_model(double mass, int K, double h, bool time_reflected = false) {
  return ModelFixture(RapidityGrid(mass, K, h), time_reflected);
}

}  // namespace wedgelab
