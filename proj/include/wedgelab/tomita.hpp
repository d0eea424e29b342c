#pragma once

// Finite-dimensional Tomita-Takesaki theory.
//
// Antilinear operators are stored as a matrix M acting as psi -> M conj(psi)
// in the fixed orthonormal basis.  With that convention
//   (A1 A2) = M1 conj(M2)            (two antilinear -> linear)
//   adjoint(A) = M^T
//   A X A^{-1} = M conj(X) M^{-1}    (X linear)

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace wedgelab {

using Complex = std::complex<double>;
using LinOp = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

class ModularError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double op_norm(const LinOp& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<LinOp>(m).singularValues()(0);
}

/// Entry-wise max norm; cheaper than the spectral norm and within a factor
/// dim of it.
inline double max_norm(const LinOp& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

namespace detail {

inline bool mostly_zero(const LinOp& m) {
  if (m.rows() < 64) return false;
  Eigen::Index nnz = 0;
  const Eigen::Index limit = 8 * m.rows();
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != Complex(0.0) && ++nnz > limit) return false;
  return true;
}

}  // namespace detail

/// Matrix product with a sparse path for the diagonal and permutation
/// operators of the grid model.
inline LinOp product(const LinOp& a, const LinOp& b) {
  if (detail::mostly_zero(a) && detail::mostly_zero(b)) {
    const Eigen::SparseMatrix<Complex> sa = a.sparseView(), sb = b.sparseView();
    return LinOp(sa * sb);
  }
  return a * b;
}

/// Inverse using the adjoint when the matrix is unitary.
inline LinOp inverse(const LinOp& m) {
  const LinOp adj = m.adjoint();
  const LinOp p = product(adj, m);
  if ((p - LinOp::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= 1e-13) return adj;
  return m.inverse();
}

inline LinOp kron(const LinOp& a, const LinOp& b) {
  LinOp out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline LinOp matrix_unit(int n, int i, int j) {
  LinOp e = LinOp::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

inline double unitarity_residual(const LinOp& u) {
  return max_norm(LinOp(product(u.adjoint(), u) - LinOp::Identity(u.rows(), u.cols())));
}

class AntilinearOperator {
 public:
  AntilinearOperator() = default;
  explicit AntilinearOperator(LinOp m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw ModularError("antilinear operator must be square");
    if (!m_.allFinite()) throw ModularError("antilinear operator with non-finite entry");
  }

  /// Componentwise complex conjugation.
  static AntilinearOperator conjugation(Eigen::Index dim) { return AntilinearOperator(LinOp::Identity(dim, dim)); }

  const LinOp& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  StateVector apply(const StateVector& v) const { return m_ * v.conjugate(); }

  AntilinearOperator adjoint() const { return AntilinearOperator(m_.transpose()); }
  AntilinearOperator inverse() const { return AntilinearOperator(LinOp(wedgelab::inverse(m_).conjugate())); }

  LinOp operator*(const AntilinearOperator& o) const { return product(m_, o.m_.conjugate()); }
  AntilinearOperator operator*(const LinOp& x) const { return AntilinearOperator(product(m_, x.conjugate())); }
  friend AntilinearOperator operator*(const LinOp& x, const AntilinearOperator& a) {
    return AntilinearOperator(product(x, a.m_));
  }

  /// A X A^{-1}.
  LinOp adjoint_action(const LinOp& x) const { return product(product(m_, x.conjugate()), wedgelab::inverse(m_)); }

  double antiunitarity_residual() const { return unitarity_residual(m_); }
  /// ||A^2 - 1||_max.
  double involution_residual() const {
    return max_norm(LinOp(product(m_, m_.conjugate()) - LinOp::Identity(dim(), dim())));
  }

 private:
  LinOp m_;
};

/// An operator that is either linear or antilinear; products of modular
/// conjugations live here.
class SemilinearOp {
 public:
  SemilinearOp() = default;
  SemilinearOp(LinOp m, bool antilinear) : m_(std::move(m)), anti_(antilinear) {}
  explicit SemilinearOp(const AntilinearOperator& a) : m_(a.matrix()), anti_(true) {}

  static SemilinearOp identity(Eigen::Index dim) { return {LinOp::Identity(dim, dim), false}; }

  const LinOp& matrix() const { return m_; }
  bool antilinear() const { return anti_; }

  SemilinearOp operator*(const SemilinearOp& o) const {
    return {product(m_, anti_ ? LinOp(o.m_.conjugate()) : o.m_), anti_ != o.anti_};
  }
  SemilinearOp inverse() const {
    const LinOp inv = wedgelab::inverse(m_);
    return {anti_ ? LinOp(inv.conjugate()) : inv, anti_};
  }
  StateVector apply(const StateVector& v) const { return anti_ ? StateVector(m_ * v.conjugate()) : StateVector(m_ * v); }

  /// T X T^{-1} for linear X.
  LinOp adjoint_action(const LinOp& x) const {
    return product(product(m_, anti_ ? LinOp(x.conjugate()) : x), wedgelab::inverse(m_));
  }
  /// T A T^{-1} for antilinear A.
  AntilinearOperator adjoint_action(const AntilinearOperator& a) const {
    const SemilinearOp r = (*this) * SemilinearOp(a) * inverse();
    return AntilinearOperator(r.m_);
  }

  /// Distance to another operator of the same kind; infinity across kinds.
  double distance(const SemilinearOp& o) const {
    if (anti_ != o.anti_) return std::numeric_limits<double>::infinity();
    return max_norm(LinOp(m_ - o.m_));
  }

 private:
  LinOp m_;
  bool anti_ = false;
};

// ---- algebras ---------------------------------------------------------------

namespace detail {

inline Eigen::VectorXcd vec(const LinOp& m) { return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size()); }

inline LinOp unvec(const Eigen::VectorXcd& v, Eigen::Index n) { return Eigen::Map<const LinOp>(v.data(), n, n); }

}  // namespace detail

/// Unital *-subalgebra of M_n, stored as a Hilbert-Schmidt orthonormal basis.
class FiniteVNAlgebra {
 public:
  FiniteVNAlgebra() = default;

  /// The span of `elements` together with the identity.  The caller asserts
  /// that the span is already a *-algebra; algebra_closure() builds one from
  /// arbitrary generators.
  static FiniteVNAlgebra from_span(Eigen::Index n, const std::vector<LinOp>& elements, double tol = 1e-10) {
    FiniteVNAlgebra a;
    a.n_ = n;
    a.frame_.resize(n * n, 0);
    a.add(LinOp::Identity(n, n), tol);
    for (const auto& e : elements) {
      if (e.rows() != n || e.cols() != n) throw ModularError("algebra element dimension mismatch");
      a.add(e, tol);
    }
    a.generators_ = elements;
    return a;
  }

  Eigen::Index dim() const { return n_; }
  Eigen::Index size() const { return frame_.cols(); }
  LinOp basis(Eigen::Index j) const { return detail::unvec(frame_.col(j), n_); }
  std::vector<LinOp> basis() const {
    std::vector<LinOp> out;
    for (Eigen::Index j = 0; j < size(); ++j) out.push_back(basis(j));
    return out;
  }
  const std::vector<LinOp>& generators() const { return generators_; }
  void set_generators(std::vector<LinOp> g) { generators_ = std::move(g); }

  /// ||x - P x||_HS / ||x||_HS, P the orthogonal projection onto the algebra.
  double containment_residual(const LinOp& x) const {
    const Eigen::VectorXcd v = detail::vec(x);
    const double nv = v.norm();
    if (nv == 0) return 0.0;
    return (v - frame_ * (frame_.adjoint() * v)).norm() / nv;
  }

  /// Max containment residual of this algebra's basis in `other`.
  double residual_in(const FiniteVNAlgebra& other) const {
    double r = 0;
    for (Eigen::Index j = 0; j < size(); ++j) r = std::max(r, other.containment_residual(basis(j)));
    return r;
  }

  /// Adds x if it is independent of the current span; returns whether it was added.
  bool add(const LinOp& x, double tol) {
    Eigen::VectorXcd v = detail::vec(x);
    const double nv = v.norm();
    if (nv == 0) return false;
    for (int pass = 0; pass < 2; ++pass) v -= frame_ * (frame_.adjoint() * v);
    if (v.norm() <= tol * nv) return false;
    frame_.conservativeResize(Eigen::NoChange, frame_.cols() + 1);
    frame_.col(frame_.cols() - 1) = v / v.norm();
    return true;
  }

 private:
  Eigen::Index n_ = 0;
  Eigen::MatrixXcd frame_;
  std::vector<LinOp> generators_;
};

/// Mutual containment residual; zero iff the spans agree.
inline double span_distance(const FiniteVNAlgebra& a, const FiniteVNAlgebra& b) {
  if (a.dim() != b.dim()) return std::numeric_limits<double>::infinity();
  return std::max(a.residual_in(b), b.residual_in(a));
}

/// Smallest unital *-algebra containing the generators.
inline FiniteVNAlgebra algebra_closure(const std::vector<LinOp>& generators, double tol = 1e-10) {
  if (generators.empty()) throw ModularError("algebra_closure needs at least one generator");
  const Eigen::Index n = generators.front().rows();
  std::vector<LinOp> letters;
  for (const auto& g : generators) {
    if (g.rows() != n || g.cols() != n) throw ModularError("generator dimension mismatch");
    letters.push_back(g);
    letters.push_back(g.adjoint());
  }
  FiniteVNAlgebra a = FiniteVNAlgebra::from_span(n, {}, tol);
  std::vector<LinOp> frontier{LinOp::Identity(n, n)};
  while (!frontier.empty()) {
    std::vector<LinOp> next;
    for (const auto& w : frontier)
      for (const auto& l : letters) {
        LinOp p = l * w;
        if (a.add(p, tol)) next.push_back(std::move(p));
      }
    frontier = std::move(next);
  }
  // Keep the original generators for commutant computations.
  a.set_generators(generators);
  return a;
}

namespace detail {

// Sum over m of ad_m^dagger ad_m acting on column-major vec(X), where
// ad_m(X) = X m - m X; built from Kronecker products.
inline Eigen::MatrixXcd commutator_gram(const std::vector<LinOp>& ms, Eigen::Index n) {
  const LinOp id = LinOp::Identity(n, n);
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n * n, n * n);
  for (const auto& m : ms) {
    // vec(X m) = (m^T kron 1) vec X,  vec(m X) = (1 kron m) vec X
    const LinOp mc = m.conjugate();
    g += kron(LinOp(mc * m.transpose()), id) - kron(mc, m) - kron(LinOp(m.transpose()), LinOp(m.adjoint())) +
         kron(id, LinOp(m.adjoint() * m));
  }
  return g;
}

inline std::vector<LinOp> small_generating_set(const FiniteVNAlgebra& a) {
  if (!a.generators().empty() && a.generators().size() <= 8) return a.generators();
  // Two generic self-adjoint elements generate a finite-dimensional
  // C*-algebra for almost every choice; the caller verifies.
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> nd;
  std::vector<LinOp> out;
  for (int k = 0; k < 2; ++k) {
    LinOp h = LinOp::Zero(a.dim(), a.dim());
    for (Eigen::Index j = 0; j < a.size(); ++j) h += Complex(nd(rng), nd(rng)) * a.basis(j);
    out.push_back((h + h.adjoint()) / 2.0);
  }
  return out;
}

inline FiniteVNAlgebra commutant_of(const std::vector<LinOp>& ms, Eigen::Index n, double tol) {
  Eigen::MatrixXcd g = commutator_gram(ms, n);
  g = (g + g.adjoint()).eval() / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
  const double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  std::vector<LinOp> elems;
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j)
    if (es.eigenvalues()(j) <= 1e-12 * top) elems.push_back(unvec(es.eigenvectors().col(j), n));
  return FiniteVNAlgebra::from_span(n, elems, tol);
}

}  // namespace detail

/// { x : [x, m] = 0 for all m in A }.
inline FiniteVNAlgebra commutant(const FiniteVNAlgebra& a, double tol = 1e-10) {
  const auto gens = detail::small_generating_set(a);
  FiniteVNAlgebra c = detail::commutant_of(gens, a.dim(), tol);
  // A non-generating choice gives a commutant that is too large.
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const LinOp x = c.basis(i);
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      const LinOp m = a.basis(j);
      if (max_norm(LinOp(x * m - m * x)) > 1e-8) return detail::commutant_of(a.basis(), a.dim(), tol);
    }
  }
  return c;
}

/// Intersection of two algebras (itself a *-algebra).
inline FiniteVNAlgebra intersection(const FiniteVNAlgebra& a, const FiniteVNAlgebra& b, double tol = 1e-10) {
  // Principal vectors with cosine 1 between the two spans.
  Eigen::MatrixXcd fa(a.dim() * a.dim(), a.size()), fb(b.dim() * b.dim(), b.size());
  for (Eigen::Index j = 0; j < a.size(); ++j) fa.col(j) = detail::vec(a.basis(j));
  for (Eigen::Index j = 0; j < b.size(); ++j) fb.col(j) = detail::vec(b.basis(j));
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Eigen::MatrixXcd(fa.adjoint() * fb), Eigen::ComputeFullU);
  std::vector<LinOp> elems;
  for (Eigen::Index j = 0; j < svd.singularValues().size(); ++j)
    if (svd.singularValues()(j) >= 1.0 - 1e-9) elems.push_back(detail::unvec(fa * svd.matrixU().col(j), a.dim()));
  return FiniteVNAlgebra::from_span(a.dim(), elems, tol);
}

inline Eigen::Index numerical_rank(const Eigen::MatrixXcd& m, double rel_tol = 1e-10) {
  if (m.size() == 0) return 0;
  const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues();
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s(i) > rel_tol * s(0);
  return r;
}

struct CyclicSeparating {
  bool cyclic = false;
  bool separating = false;
};

namespace detail {

inline Eigen::MatrixXcd orbit(const FiniteVNAlgebra& a, const StateVector& omega) {
  Eigen::MatrixXcd x(a.dim(), a.size());
  for (Eigen::Index j = 0; j < a.size(); ++j) x.col(j) = a.basis(j) * omega;
  return x;
}

}  // namespace detail

/// Cyclic: {a Omega} spans the space.  Separating: a -> a Omega is
/// injective, equivalently Omega is cyclic for the commutant.
inline CyclicSeparating is_cyclic_separating(const FiniteVNAlgebra& a, const StateVector& omega) {
  if (omega.size() != a.dim()) throw ModularError("vector dimension does not match algebra");
  if (!(omega.norm() > 0)) throw ModularError("zero vector cannot be cyclic or separating");
  const Eigen::Index r = numerical_rank(detail::orbit(a, omega.normalized()));
  return {r == a.dim(), r == a.size()};
}

// ---- modular data -----------------------------------------------------------

struct ModularData {
  AntilinearOperator J;
  LinOp Delta;
  StateVector Omega;
  Eigen::VectorXd spectrum;  // eigenvalues of Delta, ascending
  LinOp eigenvectors;

  /// Delta^{z} for real exponent (via the stored eigendecomposition).
  LinOp power(double z) const {
    return eigenvectors * spectrum.array().pow(z).matrix().cast<Complex>().asDiagonal() * eigenvectors.adjoint();
  }
};

inline LinOp modular_flow(const ModularData& d, double t) {
  const Eigen::VectorXcd phases =
      (Complex(0, t) * d.spectrum.array().log().cast<Complex>()).exp().matrix();
  return d.eigenvectors * phases.asDiagonal() * d.eigenvectors.adjoint();
}

struct ModularConfig {
  double tol = 1e-9;
  double max_condition = 1e8;
};

/// Closure of S: a Omega -> a* Omega and its polar decomposition
/// S = J Delta^{1/2}, Delta = S* S.
inline ModularData compute_modular(const FiniteVNAlgebra& a, const StateVector& omega_in, const ModularConfig& cfg = {}) {
  const auto cs = is_cyclic_separating(a, omega_in);
  if (!cs.cyclic || !cs.separating) {
    std::string what;
    if (!cs.cyclic) what = "not cyclic";
    if (!cs.separating) what += what.empty() ? "not separating" : " and not separating";
    throw ModularError("vector is " + what + " for the algebra");
  }
  const StateVector omega = omega_in.normalized();

  const Eigen::MatrixXcd x = detail::orbit(a, omega);
  Eigen::MatrixXcd y(a.dim(), a.size());
  for (Eigen::Index j = 0; j < a.size(); ++j) y.col(j) = a.basis(j).adjoint() * omega;
  // M_S conj(X) = Y  <=>  conj(X)^T M_S^T = Y^T
  const Eigen::MatrixXcd xt = x.conjugate().transpose();
  const LinOp ms = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd>(xt).solve(Eigen::MatrixXcd(y.transpose())).transpose();
  const double fit = max_norm(LinOp(ms * x.conjugate() - y));
  if (fit > cfg.tol * std::max(1.0, max_norm(ms)))
    throw ModularError("Tomita operator does not reproduce a* Omega (residual " + std::to_string(fit) + ")");

  // S = M_S conj, so Delta = S*S = N^* N with N = conj(M_S).  With the SVD
  // N = U Sigma V^*, Delta = V Sigma^2 V^* and J = M_S conj(Delta^{-1/2}) =
  // conj(U V^*).
  const LinOp nmat = ms.conjugate();
  Eigen::JacobiSVD<LinOp> svd(nmat, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Index n = nmat.rows();
  // Singular values come in descending order; store ascending.
  Eigen::VectorXd ev(n);
  LinOp vecs(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ev(i) = svd.singularValues()(n - 1 - i) * svd.singularValues()(n - 1 - i);
    vecs.col(i) = svd.matrixV().col(n - 1 - i);
  }
  if (!(ev(0) > 0) || ev(n - 1) / ev(0) > cfg.max_condition)
    throw ModularError("modular operator is ill-conditioned: spectrum [" + std::to_string(ev(0)) + ", " +
                       std::to_string(ev(n - 1)) + "]");

  ModularData d;
  d.Omega = omega;
  d.spectrum = ev;
  d.eigenvectors = vecs;
  d.Delta = d.power(1.0);
  d.J = AntilinearOperator(LinOp((svd.matrixU() * svd.matrixV().adjoint()).conjugate()));
  return d;
}

struct TomitaReport {
  std::map<std::string, double> residuals;

  double worst() const {
    double w = 0;
    for (const auto& [k, v] : residuals) w = std::max(w, v);
    return w;
  }
  bool passed(double tol) const { return worst() <= tol; }
};

/// Residuals of the Tomita theorem and of the modular-data invariants.
inline TomitaReport verify_tomita(const FiniteVNAlgebra& a, const ModularData& d,
                                  const std::vector<double>& times = {0.1, 1.0, 7.0}) {
  TomitaReport r;
  const LinOp& mj = d.J.matrix();

  std::vector<LinOp> reflected;
  for (Eigen::Index j = 0; j < a.size(); ++j) reflected.push_back(d.J.adjoint_action(a.basis(j)));
  const auto jaj = FiniteVNAlgebra::from_span(a.dim(), reflected);
  r.residuals["jmj_commutant"] = span_distance(jaj, commutant(a));

  double flow = 0;
  for (double t : times) {
    const LinOp u = modular_flow(d, t);
    for (Eigen::Index j = 0; j < a.size(); ++j)
      flow = std::max(flow, a.containment_residual(LinOp(u * a.basis(j) * u.adjoint())));
  }
  r.residuals["modular_flow_invariance"] = flow;

  r.residuals["j_omega"] = (d.J.apply(d.Omega) - d.Omega).norm();
  r.residuals["delta_omega"] = (d.Delta * d.Omega - d.Omega).norm();

  const LinOp half = d.power(0.5);
  double rel = 0;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    const LinOp b = a.basis(j);
    rel = std::max(rel, (half * (b * d.Omega) - d.J.apply(b.adjoint() * d.Omega)).norm());
  }
  r.residuals["delta_half_relation"] = rel;

  // <Omega, a Delta b Omega> = <Omega, b a Omega>
  double kms = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const LinOp x = a.basis(i);
    const StateVector xs_omega = x.adjoint() * d.Omega;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      const LinOp y = a.basis(j);
      const StateVector y_omega = y * d.Omega;
      kms = std::max(kms, std::abs(xs_omega.dot(d.Delta * y_omega) - d.Omega.dot(y * (x * d.Omega))));
    }
  }
  r.residuals["kms"] = kms;

  r.residuals["j_antiunitary"] = unitarity_residual(mj);
  r.residuals["j_involution"] = d.J.involution_residual();
  // J Delta J = Delta^{-1}
  r.residuals["j_delta_j"] = max_norm(LinOp(d.J.adjoint_action(d.Delta) - d.power(-1.0))) /
                             std::max(1.0, d.spectrum.cwiseInverse().maxCoeff());
  return r;
}

struct TransportReport {
  bool precondition_ok = false;
  std::string precondition_failure;
  double j_residual = 0.0;
  double delta_residual = 0.0;

  bool passed(double tol) const { return precondition_ok && j_residual <= tol && delta_residual <= tol; }
};

/// For u A u* = B and u OmegaA = OmegaB, checks u J_A u* = J_B and
/// u Delta_A u* = Delta_B.
inline TransportReport transport_modular(const LinOp& u, const FiniteVNAlgebra& a, const FiniteVNAlgebra& b,
                                         const StateVector& omega_a, const StateVector& omega_b, double tol = 1e-9) {
  TransportReport rep;
  if (unitarity_residual(u) > tol) {
    rep.precondition_failure = "u is not unitary";
    return rep;
  }
  std::vector<LinOp> moved;
  for (Eigen::Index j = 0; j < a.size(); ++j) moved.push_back(u * a.basis(j) * u.adjoint());
  if (span_distance(FiniteVNAlgebra::from_span(a.dim(), moved), b) > tol) {
    rep.precondition_failure = "u A u* differs from B";
    return rep;
  }
  if ((u * omega_a - omega_b).norm() > tol) {
    rep.precondition_failure = "u OmegaA differs from OmegaB";
    return rep;
  }
  rep.precondition_ok = true;
  const ModularData da = compute_modular(a, omega_a), db = compute_modular(b, omega_b);
  rep.j_residual = max_norm(LinOp(u * da.J.matrix() * u.transpose() - db.J.matrix()));
  rep.delta_residual = max_norm(LinOp(u * da.Delta * u.adjoint() - db.Delta));
  return rep;
}

// ---- fixtures ---------------------------------------------------------------

/// M_a (x) 1_b on C^a (x) C^b, basis e_i (x) e_j at index i*b + j.
inline FiniteVNAlgebra left_factor_algebra(int a, int b) {
  std::vector<LinOp> elems;
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j) elems.push_back(kron(matrix_unit(a, i, j), LinOp::Identity(b, b)));
  return FiniteVNAlgebra::from_span(a * b, elems);
}

/// 1_a (x) M_b.
inline FiniteVNAlgebra right_factor_algebra(int a, int b) {
  std::vector<LinOp> elems;
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < b; ++j) elems.push_back(kron(LinOp::Identity(a, a), matrix_unit(b, i, j)));
  return FiniteVNAlgebra::from_span(a * b, elems);
}

/// sum_i sqrt(p_i) e_i (x) e_i.
inline StateVector schmidt_vector(const std::vector<double>& p) {
  const auto n = static_cast<Eigen::Index>(p.size());
  StateVector v = StateVector::Zero(n * n);
  for (Eigen::Index i = 0; i < n; ++i) v(i * n + i) = std::sqrt(p[static_cast<std::size_t>(i)]);
  return v;
}

/// Swap of tensor factors on C^n (x) C^n.
inline LinOp tensor_swap(int n) {
  LinOp s = LinOp::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(j * n + i, i * n + j) = 1.0;
  return s;
}

/// Block-diagonal direct sum of algebras M_{a_k} (x) 1_{a_k}.
inline FiniteVNAlgebra direct_sum_fixture(const std::vector<int>& blocks) {
  Eigen::Index n = 0;
  for (int a : blocks) n += a * a;
  std::vector<LinOp> elems;
  Eigen::Index off = 0;
  for (int a : blocks) {
    for (int i = 0; i < a; ++i)
      for (int j = 0; j < a; ++j) {
        LinOp e = LinOp::Zero(n, n);
        e.block(off, off, a * a, a * a) = kron(matrix_unit(a, i, j), LinOp::Identity(a, a));
        elems.push_back(e);
      }
    off += a * a;
  }
  return FiniteVNAlgebra::from_span(n, elems);
}

/// Random unit vector with full Schmidt rank in every block of
/// direct_sum_fixture(blocks); rejects draws whose modular operator would
/// have condition number above max_condition.
inline StateVector random_faithful_vector(const std::vector<int>& blocks, std::mt19937_64& rng,
                                          double max_condition = 1e6) {
  std::normal_distribution<double> nd;
  Eigen::Index n = 0;
  for (int a : blocks) n += a * a;
  for (;;) {
    StateVector v(n);
    Eigen::Index off = 0;
    double smin = INFINITY, smax = 0;
    for (int a : blocks) {
      LinOp c(a, a);
      for (int i = 0; i < a; ++i)
        for (int j = 0; j < a; ++j) c(i, j) = Complex(nd(rng), nd(rng));
      const Eigen::VectorXd s = Eigen::JacobiSVD<LinOp>(c).singularValues();
      smin = std::min(smin, s.minCoeff());
      smax = std::max(smax, s.maxCoeff());
      for (int i = 0; i < a; ++i)
        for (int j = 0; j < a; ++j) v(off + i * a + j) = c(i, j);
      off += a * a;
    }
    if (smin > 0 && (smax * smax) / (smin * smin) <= max_condition) return v.normalized();
  }
}

}  // namespace wedgelab
