#pragma once

// Wedge regions W = { x : (x - xi).l+ > 0  and  -(x - xi).l- > 0 } with
// future-pointing null rays l+- normalized to time component 1.  With
// l+ = (1,-1,0,0), l- = (1,1,0,0) and xi = 0 this is { x1 > |x0| }.

#include "wedgelab/feasibility.hpp"
#include "wedgelab/geometry.hpp"

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace wedgelab {

/// Future-pointing null vector with time component exactly 1.
class LightRay {
 public:
  LightRay() : l_(1, 1, 0, 0) {}

  static LightRay make(const FourVector& v, double tol = Tolerances{}.geo) {
    const Vec4& x = v.vec();
    if (!(x(0) > 0)) throw GeometryError("light ray must be future pointing");
    const double scale = x.cwiseAbs().maxCoeff();
    if (std::abs(minkowski_inner(x, x)) > tol * scale * scale)
      throw GeometryError("light ray vector is not null");
    return from_direction(x.tail<3>());
  }

  /// (1, n/|n|).
  static LightRay from_direction(const Eigen::Vector3d& n) {
    if (!(n.norm() > 0)) throw GeometryError("light ray with zero spatial part");
    LightRay r;
    r.l_ << 1.0, n.normalized();
    return r;
  }

  const Vec4& vec() const { return l_; }
  Eigen::Vector3d direction() const { return l_.tail<3>(); }
  FourVector four_vector() const { return FourVector(l_); }

 private:
  Vec4 l_;
};

class Wedge {
 public:
  Wedge() : Wedge(LightRay::from_direction({-1, 0, 0}), LightRay::from_direction({1, 0, 0}), Vec4::Zero()) {}

  const LightRay& ell_plus() const { return plus_; }
  const LightRay& ell_minus() const { return minus_; }
  /// Canonical apex: the representative lying in span{l+, l-}.
  const FourVector& xi() const { return xi_; }

  /// c = l+ . l- > 0.
  double ray_product() const { return minkowski_inner(plus_.vec(), minus_.vec()); }

  Wedge operator+(const FourVector& shift) const { return {plus_, minus_, xi_.vec() + shift.vec()}; }
  Wedge operator-(const FourVector& shift) const { return *this + (-shift); }

 private:
  Wedge(const LightRay& lp, const LightRay& lm, const Vec4& xi) : plus_(lp), minus_(lm) {
    const double c = minkowski_inner(lp.vec(), lm.vec());
    if (!(c > 1e-12)) throw GeometryError("parallel light rays do not bound a wedge");
    const Vec4 canon = (minkowski_inner(xi, lm.vec()) / c) * lp.vec() + (minkowski_inner(xi, lp.vec()) / c) * lm.vec();
    xi_ = FourVector(canon);
  }

  friend Wedge make_wedge(const LightRay&, const LightRay&, const FourVector&, double);
  friend Wedge wedge_from_rays(const Vec4&, const Vec4&, const Vec4&);

  LightRay plus_;
  LightRay minus_;
  FourVector xi_;
};

inline Wedge make_wedge(const LightRay& lp, const LightRay& lm, const FourVector& xi,
                        double tol = Tolerances{}.geo) {
  if ((lp.direction() - lm.direction()).norm() <= tol)
    throw GeometryError("parallel light rays do not bound a wedge");
  return {lp, lm, xi.vec()};
}

/// Builds a wedge from arbitrary future-pointing ray representatives.
inline Wedge wedge_from_rays(const Vec4& lp, const Vec4& lm, const Vec4& xi) {
  return {LightRay::from_direction(lp.tail<3>()), LightRay::from_direction(lm.tail<3>()), xi};
}

/// { x : x.e > |x0| } shifted by apex; e is a spatial direction.
inline Wedge wedge_along(const Eigen::Vector3d& e, const FourVector& apex = {}) {
  return make_wedge(LightRay::from_direction(-e), LightRay::from_direction(e), apex);
}

/// W_i = { x : x_i > |x0| }, i = 1, 2, 3.
inline Wedge standard_wedge(int i) { return wedge_along(Eigen::Vector3d::Unit(i - 1)); }

inline bool contains(const Wedge& w, const FourVector& x) {
  const Vec4 d = x.vec() - w.xi().vec();
  return minkowski_inner(d, w.ell_plus().vec()) > 0 && -minkowski_inner(d, w.ell_minus().vec()) > 0;
}

inline Wedge complement(const Wedge& w) {
  return make_wedge(w.ell_minus(), w.ell_plus(), w.xi());
}

inline Wedge transform(const PoincareElement& l, const Wedge& w) {
  const Vec4 mp = l.lambda() * w.ell_plus().vec();
  const Vec4 mm = l.lambda() * w.ell_minus().vec();
  const Vec4 apex = l.apply(w.xi()).vec();
  // A time-reversing map sends future rays to past rays; the sign flip
  // exchanges the roles of the two half-space inequalities.
  if (mp(0) > 0) return wedge_from_rays(mp, mm, apex);
  return wedge_from_rays(-mm, -mp, apex);
}

/// x -> s x.
inline Wedge dilate(const Wedge& w, double s) {
  return make_wedge(w.ell_plus(), w.ell_minus(), w.xi() * s);
}

inline double wedge_distance(const Wedge& a, const Wedge& b) {
  return std::max({(a.ell_plus().vec() - b.ell_plus().vec()).cwiseAbs().maxCoeff(),
                   (a.ell_minus().vec() - b.ell_minus().vec()).cwiseAbs().maxCoeff(),
                   (a.xi() - b.xi()).max_abs()});
}

inline bool approx_equal(const Wedge& a, const Wedge& b, double tol = Tolerances{}.geo) {
  return wedge_distance(a, b) <= tol;
}

inline bool same_rays(const Wedge& a, const Wedge& b, double tol = Tolerances{}.geo) {
  return (a.ell_plus().vec() - b.ell_plus().vec()).cwiseAbs().maxCoeff() <= tol &&
         (a.ell_minus().vec() - b.ell_minus().vec()).cwiseAbs().maxCoeff() <= tol;
}

/// W1 subset of W2 as point sets.
inline bool included(const Wedge& w1, const Wedge& w2, double tol = Tolerances{}.geo) {
  if (!same_rays(w1, w2, tol)) return false;
  const Vec4 d = w1.xi().vec() - w2.xi().vec();
  return minkowski_inner(d, w2.ell_plus().vec()) >= -tol && -minkowski_inner(d, w2.ell_minus().vec()) >= -tol;
}

namespace detail {

inline void append_halfspaces(std::vector<LinearInequality>& sys, const Wedge& w, bool strict) {
  // (x - xi).l > 0  <=>  (g l)^T x > xi.l
  const Vec4 gp = metric() * w.ell_plus().vec();
  const Vec4 gm = metric() * w.ell_minus().vec();
  sys.push_back({gp, minkowski_inner(w.xi().vec(), w.ell_plus().vec()), strict});
  sys.push_back({-gm, -minkowski_inner(w.xi().vec(), w.ell_minus().vec()), strict});
}

}  // namespace detail

/// A point in the open intersection, or nullopt if the wedges are disjoint.
inline std::optional<FourVector> intersection_witness(const Wedge& w1, const Wedge& w2,
                                                      double tol = Tolerances{}.geo) {
  std::vector<LinearInequality> sys;
  detail::append_halfspaces(sys, w1, true);
  detail::append_halfspaces(sys, w2, true);
  auto x = fourier_motzkin(std::move(sys), 4, tol);
  if (!x) return std::nullopt;
  return FourVector(Vec4(*x));
}

inline bool disjoint(const Wedge& w1, const Wedge& w2, double tol = Tolerances{}.geo) {
  return !intersection_witness(w1, w2, tol).has_value();
}

/// Whether the closures of the two wedges meet.
inline bool closures_intersect(const Wedge& w1, const Wedge& w2, double tol = Tolerances{}.geo) {
  std::vector<LinearInequality> sys;
  detail::append_halfspaces(sys, w1, false);
  detail::append_halfspaces(sys, w2, false);
  return fourier_motzkin(std::move(sys), 4, tol).has_value();
}

struct Edge {
  FourVector point;
  FourVector span1;
  FourVector span2;
};

/// The 2-plane { x : (x - xi).l+ = (x - xi).l- = 0 }.
inline Edge edge(const Wedge& w) {
  Eigen::Matrix<double, 2, 4> rows;
  rows.row(0) = (metric() * w.ell_plus().vec()).transpose();
  rows.row(1) = (metric() * w.ell_minus().vec()).transpose();
  Eigen::JacobiSVD<Eigen::Matrix<double, 2, 4>> svd(rows, Eigen::ComputeFullV);
  const Mat4& v = svd.matrixV();
  return {w.xi(), FourVector(Vec4(v.col(2))), FourVector(Vec4(v.col(3)))};
}

/// The involution in P+ fixing edge(W) pointwise and exchanging W and W'.
inline PoincareElement edge_reflection(const Wedge& w) {
  const Vec4& lp = w.ell_plus().vec();
  const Vec4& lm = w.ell_minus().vec();
  const Mat4 proj = (lp * (metric() * lm).transpose() + lm * (metric() * lp).transpose()) / w.ray_product();
  const Mat4 lambda = Mat4::Identity() - 2.0 * proj;
  const Vec4 a = w.xi().vec() - lambda * w.xi().vec();
  return {lambda, FourVector(a), 1e-8};
}

/// Translation induced by lambda_{W+xi} lambda_W, i.e. xi - Lambda_W xi.
inline FourVector reflection_translation(const Wedge& w, const FourVector& xi, double tol = Tolerances{}.geo) {
  const PoincareElement lw = edge_reflection(w);
  const FourVector t = xi - lw.apply_linear(xi);
  const PoincareElement prod = compose(edge_reflection(w + xi), lw);
  if (prod.distance(PoincareElement::translation(t)) > tol * std::max(1.0, xi.max_abs()))
    throw GeometryError("edge reflections of W+xi and W do not compose to a translation");
  return t;
}

/// lambda_{w[0]} ... lambda_{w[n-1]}; the identity for an empty word.
inline PoincareElement compose_word(const std::vector<Wedge>& word) {
  PoincareElement out;
  for (const auto& w : word) out = compose(out, edge_reflection(w));
  return out;
}

namespace detail {

inline Eigen::Vector3d any_orthogonal(const Eigen::Vector3d& n) {
  Eigen::Index i = 0;
  n.cwiseAbs().minCoeff(&i);
  const Eigen::Vector3d e = Eigen::Vector3d::Unit(i);
  return (e - e.dot(n) * n).normalized();
}

// First significant component positive.
inline bool lexicographically_positive(const Eigen::Vector3d& u) {
  for (int i = 0; i < 3; ++i)
    if (std::abs(u(i)) > 1e-9) return u(i) > 0;
  return true;
}

}  // namespace detail

/// If l is the edge reflection of some wedge, returns that wedge (the
/// representative of the pair {W, W'} whose l- direction is
/// lexicographically positive).
inline std::optional<Wedge> as_edge_reflection(const PoincareElement& l, double tol = Tolerances{}.geo) {
  const Mat4& m = l.lambda();
  if (m.determinant() < 0 || m(0, 0) > 0) return std::nullopt;
  if (compose(l, l).distance(PoincareElement::identity()) > tol * std::max(1.0, l.translation_part().max_abs()))
    return std::nullopt;
  Eigen::JacobiSVD<Mat4> svd(Mat4(m + Mat4::Identity()), Eigen::ComputeFullV);
  const Vec4 s = svd.singularValues();
  if (s(2) > 1e-6 || s(1) < 1e-6) return std::nullopt;
  const Vec4 p = svd.matrixV().col(2), q = svd.matrixV().col(3);
  const double pp = minkowski_inner(p, p), pq = minkowski_inner(p, q), qq = minkowski_inner(q, q);
  // Null directions alpha p + beta q of the reflected plane.
  Vec4 n1, n2;
  if (std::abs(qq) > 1e-12) {
    const double disc = pq * pq - pp * qq;
    if (disc <= 0) return std::nullopt;
    const double r = std::sqrt(disc);
    n1 = p + ((-pq + r) / qq) * q;
    n2 = p + ((-pq - r) / qq) * q;
  } else {
    if (std::abs(pq) < 1e-12) return std::nullopt;
    n1 = q;
    n2 = p - (pp / (2 * pq)) * q;
  }
  if (n1(0) < 0) n1 = -n1;
  if (n2(0) < 0) n2 = -n2;
  if (n1(0) < 1e-12 || n2(0) < 1e-12) return std::nullopt;
  Eigen::Vector3d u1 = n1.tail<3>() / n1(0), u2 = n2.tail<3>() / n2(0);
  if (!detail::lexicographically_positive(u1)) std::swap(u1, u2);
  const Wedge w = make_wedge(LightRay::from_direction(u2), LightRay::from_direction(u1),
                             l.translation_part() / 2.0);
  if (edge_reflection(w).distance(l) > 1e-8) return std::nullopt;
  return w;
}

/// Wedge word whose composed edge reflections equal l (up to rounding);
/// at most 7 wedges.  Only proper elements are products of edge reflections.
inline std::vector<Wedge> decompose_poincare(const PoincareElement& l, double tol = Tolerances{}.geo) {
  if (l.lambda().determinant() < 0) throw GeometryError("improper element is not in P+");
  if (l.distance(PoincareElement::identity()) <= tol) return {};
  if (auto w = as_edge_reflection(l, tol)) return {*w};

  std::vector<Wedge> word;

  // Translation: lambda_{W_e + a/2} lambda_{W_e} translates by (a0, (a.e) e).
  const FourVector& a = l.translation_part();
  if (a.max_abs() > tol) {
    const Eigen::Vector3d sp = a.spatial();
    const Eigen::Vector3d e = sp.norm() > tol ? Eigen::Vector3d(sp.normalized()) : Eigen::Vector3d::UnitX();
    word.push_back(wedge_along(e, a / 2.0));
    word.push_back(wedge_along(e));
  }

  Mat4 rest = l.lambda();
  if (rest(0, 0) < 0) {
    word.push_back(standard_wedge(1));
    rest = Vec4(-1, -1, 1, 1).asDiagonal() * rest;
  }

  // rest = B(n, chi) R with the boost read off the image of the time axis.
  const Eigen::Vector3d u = rest.block<3, 1>(1, 0);
  if (u.norm() > tol) {
    const Eigen::Vector3d n = u.normalized();
    const double chi = std::asinh(u.norm());
    // lambda_{W_f} lambda_{B W_f} = B(n, chi) for f orthogonal to n and
    // B the boost by -chi/2.
    const Wedge wf = wedge_along(detail::any_orthogonal(n));
    word.push_back(wf);
    word.push_back(transform(PoincareElement::lorentz(boost_matrix(n, -chi / 2.0), 1e-8), wf));
    rest = boost_matrix(n, -chi) * rest;
  }

  Eigen::Matrix3d r = rest.block<3, 3>(1, 1);
  // Re-orthonormalize before extracting the axis.
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  r = svd.matrixU() * svd.matrixV().transpose();
  const Eigen::AngleAxisd aa(r);
  if (std::abs(aa.angle()) > tol) {
    // Reflections with normals e2 then e1 rotate by twice the angle from e2 to e1.
    const Eigen::Vector3d e2 = detail::any_orthogonal(aa.axis());
    const Eigen::Vector3d e1 = Eigen::AngleAxisd(aa.angle() / 2.0, aa.axis()) * e2;
    word.push_back(wedge_along(e1));
    word.push_back(wedge_along(e2));
  }
  return word;
}

// ---- wedge maps -------------------------------------------------------------

struct WedgeMapSample {
  std::vector<std::pair<Wedge, Wedge>> pairs;
};

inline WedgeMapSample sample_map(const std::vector<Wedge>& wedges, const PoincareElement& l, double scale = 1.0) {
  WedgeMapSample s;
  for (const auto& w : wedges) s.pairs.emplace_back(w, dilate(transform(l, w), scale));
  return s;
}

struct IdentifiedMap {
  PoincareElement lambda;
  double scale = 1.0;
  double residual = 0.0;
};

/// Recovers (lambda, s) with image = s * lambda(W) for every sampled pair.
/// Throws GeometryError if no such map fits within consistency_tol.
inline IdentifiedMap identify_wedge_map(const WedgeMapSample& sample, double consistency_tol = 1e-6) {
  const auto& pairs = sample.pairs;
  const int n = static_cast<int>(pairs.size());
  if (n < 5) throw GeometryError("identify_wedge_map needs at least 5 sampled wedges");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (approx_equal(pairs[i].first, pairs[j].first))
        throw GeometryError("sampled wedges must be pairwise distinct");

  // Lorentz part: Lambda l_j = mu_j m_j for each ray.  Orthochronous maps
  // send l+ to a positive multiple of the image l+, time-reversing maps
  // send l+ to a negative multiple of the image l-.
  struct Fit {
    Mat4 lambda;
    double sigma = 0.0;
  };
  auto fit = [&](bool swapped) {
    const int cols = 16 + 2 * n;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(8 * n, cols);
    for (int i = 0; i < n; ++i) {
      const auto& [src, img] = pairs[i];
      const Vec4 ls[2] = {src.ell_plus().vec(), src.ell_minus().vec()};
      const Vec4 ms[2] = {swapped ? img.ell_minus().vec() : img.ell_plus().vec(),
                          swapped ? img.ell_plus().vec() : img.ell_minus().vec()};
      for (int r = 0; r < 2; ++r) {
        const int row0 = 8 * i + 4 * r;
        const int mu = 16 + 2 * i + r;
        for (int k = 0; k < 4; ++k) {
          for (int c = 0; c < 4; ++c) a(row0 + k, 4 * k + c) = ls[r](c);
          a(row0 + k, mu) = -ms[r](k);
        }
      }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
    const Eigen::VectorXd x = svd.matrixV().col(cols - 1);
    Fit f;
    f.sigma = svd.singularValues()(cols - 1) / svd.singularValues()(0);
    for (int k = 0; k < 4; ++k)
      for (int c = 0; c < 4; ++c) f.lambda(k, c) = x(4 * k + c);
    const double c2 = (f.lambda.transpose() * metric() * f.lambda)(0, 0);
    if (!(c2 > 0)) {
      f.sigma = 1.0;
      return f;
    }
    double sign = x(16) > 0 ? 1.0 : -1.0;
    if (swapped) sign = -sign;
    f.lambda *= sign / std::sqrt(c2);
    return f;
  };
  const Fit orth = fit(false);
  const Fit flip = fit(true);
  const Fit& best = orth.sigma <= flip.sigma ? orth : flip;
  if (metric_residual(best.lambda) > consistency_tol)
    throw GeometryError("sample is not induced by a point transformation (ray map inconsistent)");

  // Scale and translation: s (Lambda xi_i).r + b.r = eta_i.r, b = s a.
  Eigen::MatrixXd m(2 * n, 5);
  Eigen::VectorXd rhs(2 * n);
  for (int i = 0; i < n; ++i) {
    const auto& [src, img] = pairs[i];
    const Vec4 lx = best.lambda * src.xi().vec();
    const Vec4 rays[2] = {img.ell_plus().vec(), img.ell_minus().vec()};
    for (int r = 0; r < 2; ++r) {
      m(2 * i + r, 0) = minkowski_inner(lx, rays[r]);
      m.block<1, 4>(2 * i + r, 1) = (metric() * rays[r]).transpose();
      rhs(2 * i + r) = minkowski_inner(img.xi().vec(), rays[r]);
    }
  }
  const Eigen::VectorXd sol = m.colPivHouseholderQr().solve(rhs);
  const double s = sol(0);
  if (!(s > 0)) throw GeometryError("sample is not induced by an orientation-preserving dilation");
  IdentifiedMap out{PoincareElement(best.lambda, FourVector(Vec4(sol.tail<4>() / s)), 1e-6), s, 0.0};
  for (const auto& [src, img] : pairs)
    out.residual = std::max(out.residual, wedge_distance(dilate(transform(out.lambda, src), s), img));
  if (out.residual > consistency_tol * std::max(1.0, s))
    throw GeometryError("sample is not induced by a Poincare map with dilation (residual " +
                        std::to_string(out.residual) + ")");
  return out;
}

struct PropertyViolation {
  std::size_t first = 0;
  std::size_t second = 0;
  char property = 'A';  // 'A' inclusion, 'B' disjointness
};

/// All pairs violating (A) W1 < W2 <=> tau W1 < tau W2 or
/// (B) W1 n W2 = 0 <=> tau W1 n tau W2 = 0.
inline std::vector<PropertyViolation> check_automorphism_properties(const WedgeMapSample& sample,
                                                                    double tol = Tolerances{}.geo) {
  std::vector<PropertyViolation> out;
  const auto& p = sample.pairs;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (included(p[i].first, p[j].first, tol) != included(p[i].second, p[j].second, tol))
        out.push_back({i, j, 'A'});
      if (i < j && disjoint(p[i].first, p[j].first, tol) != disjoint(p[i].second, p[j].second, tol))
        out.push_back({i, j, 'B'});
    }
  }
  return out;
}

/// Random wedge whose ray directions are at least 90 degrees apart, so that
/// l+ . l- >= 1 and the edge reflection stays well conditioned.
inline Wedge random_wedge(std::mt19937_64& rng, double apex_scale = 5.0) {
  Eigen::Vector3d a = random_unit3(rng), b = random_unit3(rng);
  while (a.dot(b) > 0) b = random_unit3(rng);
  return make_wedge(LightRay::from_direction(a), LightRay::from_direction(b), random_four_vector(rng, apex_scale));
}

}  // namespace wedgelab
