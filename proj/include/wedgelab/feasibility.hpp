#pragma once

// Fourier-Motzkin elimination for small systems of linear inequalities
//   a . x > b   (strict)   or   a . x >= b   (non-strict)
// over R^n, with back-substitution to produce a witness point.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace wedgelab {

struct LinearInequality {
  Eigen::VectorXd a;
  double b = 0.0;
  bool strict = true;
};

namespace detail {

inline LinearInequality normalized(LinearInequality c) {
  const double s = std::max(c.a.cwiseAbs().maxCoeff(), std::abs(c.b));
  if (s > 0) {
    c.a /= s;
    c.b /= s;
  }
  return c;
}

// Interval of values for variable k allowed by constraints whose other
// variables are fixed in x.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

inline double pick(const Interval& iv) {
  if (std::isinf(iv.lo) && std::isinf(iv.hi)) return 0.0;
  if (std::isinf(iv.lo)) return iv.hi - 1.0;
  if (std::isinf(iv.hi)) return iv.lo + 1.0;
  return 0.5 * (iv.lo + iv.hi);
}

}  // namespace detail

/// Solves the system exactly up to the coefficient tolerance `tol`.
/// Returns a witness point if the system is feasible, std::nullopt otherwise.
/// Degenerate constant constraints 0 > b are treated as infeasible when
/// b >= -tol, so boundary-touching open regions count as empty.
inline std::optional<Eigen::VectorXd> fourier_motzkin(std::vector<LinearInequality> system, int n,
                                                      double tol = 1e-10) {
  std::vector<std::vector<LinearInequality>> stages;
  for (auto& c : system) c = detail::normalized(c);

  for (int k = n - 1; k >= 0; --k) {
    stages.push_back(system);
    std::vector<LinearInequality> pos, neg, rest;
    for (const auto& c : system) {
      if (c.a(k) > tol)
        pos.push_back(c);
      else if (c.a(k) < -tol)
        neg.push_back(c);
      else {
        LinearInequality z = c;
        z.a(k) = 0.0;
        rest.push_back(z);
      }
    }
    for (const auto& p : pos) {
      for (const auto& q : neg) {
        // p: a_k x_k > b_p - ..., q: a_k < 0; combine to cancel x_k.
        LinearInequality c;
        c.a = p.a * (-q.a(k)) + q.a * p.a(k);
        c.b = p.b * (-q.a(k)) + q.b * p.a(k);
        c.a(k) = 0.0;
        c.strict = p.strict || q.strict;
        // Parents have unit max-norm, so cancellation noise is absolute.
        c.a = c.a.unaryExpr([tol](double v) { return std::abs(v) <= tol ? 0.0 : v; });
        if (std::abs(c.b) <= tol) c.b = 0.0;
        rest.push_back(detail::normalized(c));
      }
    }
    system = std::move(rest);
  }

  for (const auto& c : system) {
    // All coefficients eliminated: 0 > b or 0 >= b.
    if (c.strict ? (c.b >= -tol) : (c.b > tol)) return std::nullopt;
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k) {
    const auto& cons = stages[static_cast<std::size_t>(n - 1 - k)];
    detail::Interval iv;
    for (const auto& c : cons) {
      double rhs = c.b;
      for (int j = 0; j < k; ++j) rhs -= c.a(j) * x(j);
      if (c.a(k) > tol)
        iv.lo = std::max(iv.lo, rhs / c.a(k));
      else if (c.a(k) < -tol)
        iv.hi = std::min(iv.hi, rhs / c.a(k));
    }
    x(k) = detail::pick(iv);
  }
  return x;
}

}  // namespace wedgelab
