#pragma once

// Minkowski four-vectors and the Poincare group as concrete 4x4 matrices.
// Signature is (+,-,-,-); a Poincare element acts as x -> Lambda x + a.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace wedgelab {

struct Tolerances {
  double geo = 1e-10;
  double op = 1e-9;
};

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

class FourVector {
 public:
  FourVector() : c_(Vec4::Zero()) {}
  FourVector(double x0, double x1, double x2, double x3) : c_(x0, x1, x2, x3) { check(); }
  explicit FourVector(const Vec4& v) : c_(v) { check(); }

  static FourVector time(double t) { return {t, 0, 0, 0}; }
  static FourVector axis(int i, double s) {
    Vec4 v = Vec4::Zero();
    v(i) = s;
    return FourVector(v);
  }

  double operator[](int i) const { return c_(i); }
  const Vec4& vec() const { return c_; }
  Eigen::Vector3d spatial() const { return c_.tail<3>(); }

  FourVector operator+(const FourVector& o) const { return FourVector(Vec4(c_ + o.c_)); }
  FourVector operator-(const FourVector& o) const { return FourVector(Vec4(c_ - o.c_)); }
  FourVector operator-() const { return FourVector(Vec4(-c_)); }
  FourVector operator*(double s) const { return FourVector(Vec4(c_ * s)); }
  friend FourVector operator*(double s, const FourVector& v) { return v * s; }
  FourVector operator/(double s) const { return FourVector(Vec4(c_ / s)); }

  double max_abs() const { return c_.cwiseAbs().maxCoeff(); }

 private:
  void check() const {
    if (!c_.allFinite()) throw GeometryError("four-vector with non-finite component");
  }
  Vec4 c_;
};

inline const Mat4& metric() {
  static const Mat4 g = Vec4(1, -1, -1, -1).asDiagonal();
  return g;
}

inline double minkowski_inner(const Vec4& x, const Vec4& y) {
  return x(0) * y(0) - x(1) * y(1) - x(2) * y(2) - x(3) * y(3);
}

inline double minkowski_inner(const FourVector& x, const FourVector& y) {
  return minkowski_inner(x.vec(), y.vec());
}

/// ||Lambda^T g Lambda - g||_max.
inline double metric_residual(const Mat4& lambda) {
  return (lambda.transpose() * metric() * lambda - metric()).cwiseAbs().maxCoeff();
}

struct LorentzClass {
  bool proper = true;
  bool orthochronous = true;
  bool operator==(const LorentzClass&) const = default;
};

class PoincareElement {
 public:
  PoincareElement() : lambda_(Mat4::Identity()), a_() {}
  PoincareElement(const Mat4& lambda, const FourVector& a, double tol = Tolerances{}.geo)
      : lambda_(lambda), a_(a) {
    if (!lambda_.allFinite()) throw GeometryError("Lorentz matrix with non-finite entry");
    if (wedgelab::metric_residual(lambda_) > tol)
      throw GeometryError("not a Lorentz matrix: metric residual " +
                          std::to_string(wedgelab::metric_residual(lambda_)));
    if (std::abs(std::abs(lambda_.determinant()) - 1.0) > tol)
      throw GeometryError("Lorentz matrix determinant is not +-1");
  }

  static PoincareElement identity() { return {}; }
  static PoincareElement translation(const FourVector& a) { return {Mat4::Identity(), a}; }
  static PoincareElement lorentz(const Mat4& lambda, double tol = Tolerances{}.geo) {
    return {lambda, FourVector(), tol};
  }

  const Mat4& lambda() const { return lambda_; }
  const FourVector& translation_part() const { return a_; }

  FourVector apply(const FourVector& x) const { return FourVector(Vec4(lambda_ * x.vec() + a_.vec())); }
  /// Action on difference vectors (no translation).
  FourVector apply_linear(const FourVector& x) const { return FourVector(Vec4(lambda_ * x.vec())); }

  double metric_residual() const { return wedgelab::metric_residual(lambda_); }

  /// Largest entry-wise deviation of both the matrix and the translation.
  double distance(const PoincareElement& o) const {
    return std::max((lambda_ - o.lambda_).cwiseAbs().maxCoeff(), (a_ - o.a_).max_abs());
  }

 private:
  // Unchecked construction for products of already-valid elements; rounding
  // drift is reported through metric_residual rather than rejected.
  struct Unchecked {};
  PoincareElement(Unchecked, const Mat4& lambda, const Vec4& a) : lambda_(lambda), a_(a) {}

  friend PoincareElement compose(const PoincareElement&, const PoincareElement&);
  friend PoincareElement invert(const PoincareElement&);

  Mat4 lambda_;
  FourVector a_;
};

/// (l1 . l2)(x) = l1(l2(x)).
inline PoincareElement compose(const PoincareElement& l1, const PoincareElement& l2) {
  return {PoincareElement::Unchecked{}, l1.lambda_ * l2.lambda_,
          l1.lambda_ * l2.a_.vec() + l1.a_.vec()};
}

inline PoincareElement invert(const PoincareElement& l) {
  // Lambda^{-1} = g Lambda^T g for Lorentz matrices.
  const Mat4 inv = metric() * l.lambda_.transpose() * metric();
  return {PoincareElement::Unchecked{}, inv, -inv * l.a_.vec()};
}

inline FourVector apply(const PoincareElement& l, const FourVector& x) { return l.apply(x); }

inline LorentzClass classify(const PoincareElement& l, double tol = Tolerances{}.geo) {
  if (l.metric_residual() > tol) throw GeometryError("invalid Lorentz matrix");
  return {l.lambda().determinant() > 0, l.lambda()(0, 0) > 0};
}

// ---- standard generators -------------------------------------------------

/// Rotation of the spatial part about a unit axis by angle (right-handed).
inline Mat4 rotation_matrix(const Eigen::Vector3d& axis, double angle) {
  Mat4 m = Mat4::Identity();
  m.block<3, 3>(1, 1) = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
  return m;
}

/// Pure boost with rapidity chi along the unit spatial direction n.
inline Mat4 boost_matrix(const Eigen::Vector3d& direction, double chi) {
  const Eigen::Vector3d n = direction.normalized();
  Mat4 m = Mat4::Identity();
  const double ch = std::cosh(chi), sh = std::sinh(chi);
  m(0, 0) = ch;
  m.block<1, 3>(0, 1) = sh * n.transpose();
  m.block<3, 1>(1, 0) = sh * n;
  m.block<3, 3>(1, 1) += (ch - 1.0) * n * n.transpose();
  return m;
}

inline Mat4 boost_matrix(int axis, double chi) {
  return boost_matrix(Eigen::Vector3d::Unit(axis - 1), chi);
}

inline Eigen::Vector3d random_unit3(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Vector3d v;
  do {
    v = {n(rng), n(rng), n(rng)};
  } while (v.norm() < 1e-6);
  return v.normalized();
}

/// rotation * boost * rotation with |chi| <= max_rapidity.
inline Mat4 random_restricted_lorentz(std::mt19937_64& rng, double max_rapidity = 3.0) {
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> rap(-max_rapidity, max_rapidity);
  return rotation_matrix(random_unit3(rng), angle(rng)) * boost_matrix(random_unit3(rng), rap(rng)) *
         rotation_matrix(random_unit3(rng), angle(rng));
}

inline FourVector random_four_vector(std::mt19937_64& rng, double scale = 5.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng), u(rng)};
}

/// Random element of the full Poincare group; the four Lorentz classes are
/// drawn with equal probability unless proper_only is set.
inline PoincareElement random_poincare(std::mt19937_64& rng, bool proper_only = false,
                                       double max_rapidity = 3.0) {
  Mat4 m = random_restricted_lorentz(rng, max_rapidity);
  std::uniform_int_distribution<int> cls(0, proper_only ? 1 : 3);
  switch (cls(rng)) {
    case 1:  // proper, non-orthochronous
      m = Vec4(-1, -1, 1, 1).asDiagonal() * m;
      break;
    case 2:  // parity
      m = Vec4(1, -1, 1, 1).asDiagonal() * m;
      break;
    case 3:  // time reversal
      m = Vec4(-1, 1, 1, 1).asDiagonal() * m;
      break;
    default:
      break;
  }
  return {m, random_four_vector(rng), 1e-8};
}

}  // namespace wedgelab
