#include "wedgelab/tomita.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <random>

using namespace wedgelab;

namespace {

FiniteVNAlgebra two_by_two() { return left_factor_algebra(2, 2); }

StateVector bell() { return schmidt_vector({0.5, 0.5}); }

// Brute-force Tomita operator for a matrix-unit basis: solve S (a_j Omega) =
// a_j* Omega with a dense LU inverse and read Delta's spectrum off the
// singular values of S.
Eigen::VectorXd oracle_spectrum(int a, const StateVector& omega) {
  LinOp x(a * a, a * a), y(a * a, a * a);
  int col = 0;
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j, ++col) {
      const LinOp e = kron(matrix_unit(a, i, j), LinOp::Identity(a, a));
      x.col(col) = e * omega;
      y.col(col) = e.adjoint() * omega;
    }
  const LinOp ms = y * Eigen::FullPivLU<LinOp>(LinOp(x.conjugate())).inverse();
  Eigen::VectorXd s = Eigen::JacobiSVD<LinOp>(ms).singularValues().array().square();
  std::sort(s.data(), s.data() + s.size());
  return s;
}

LinOp random_unitary(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  LinOp g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = Complex(nd(rng), nd(rng));
  return Eigen::HouseholderQR<LinOp>(g).householderQ();
}

}  // namespace

TEST(Antilinear, CompositionRules) {
  std::mt19937_64 rng(3);
  const LinOp u = random_unitary(3, rng), v = random_unitary(3, rng);
  const AntilinearOperator a(u), b(v);
  StateVector psi(3);
  psi << Complex(1, 2), Complex(-0.5, 0.3), Complex(0, 1);
  EXPECT_LT((SemilinearOp(a * b, false).apply(psi) - a.apply(b.apply(psi))).norm(), 1e-12);
  EXPECT_LT(((a * v).apply(psi) - a.apply(v * psi)).norm(), 1e-12);
  EXPECT_LT(((v * a).apply(psi) - v * a.apply(psi)).norm(), 1e-12);
  EXPECT_LT((a.inverse().apply(a.apply(psi)) - psi).norm(), 1e-12);
  // <A phi, psi> = conj <phi, A* psi>
  StateVector phi = StateVector::Ones(3);
  const Complex lhs = a.apply(phi).dot(psi);
  const Complex rhs = std::conj(phi.dot(a.adjoint().apply(psi)));
  EXPECT_LT(std::abs(lhs - rhs), 1e-12);
  EXPECT_LT(a.antiunitarity_residual(), 1e-12);
  EXPECT_NEAR(AntilinearOperator::conjugation(3).involution_residual(), 0.0, 0.0);
}

TEST(Algebra, ClosureOfPauliGeneratesFullMatrixAlgebra) {
  LinOp sx(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sz << 1, 0, 0, -1;
  EXPECT_EQ(algebra_closure({sx, sz}).size(), 4);
  EXPECT_EQ(algebra_closure({sz}).size(), 2);
}

TEST(Algebra, CommutantOfLeftFactorIsRightFactor) {
  const auto a = two_by_two();
  EXPECT_EQ(a.size(), 4);
  const auto c = commutant(a);
  EXPECT_EQ(c.size(), 4);
  EXPECT_LT(span_distance(c, right_factor_algebra(2, 2)), 1e-10);
  // Double commutant.
  EXPECT_LT(span_distance(commutant(c), a), 1e-10);
}

TEST(Algebra, CommutantOfDirectSum) {
  const auto a = direct_sum_fixture({1, 2});
  // M_1 (x) 1_1 plus M_2 (x) 1_2 on C^1 + C^4: commutant is C + 1 (x) M_2.
  EXPECT_EQ(a.size(), 5);
  EXPECT_EQ(commutant(a).size(), 5);
}

TEST(Algebra, IntersectionOfFactors) {
  const auto a = left_factor_algebra(2, 2), b = right_factor_algebra(2, 2);
  EXPECT_EQ(intersection(a, b).size(), 1);
  EXPECT_EQ(intersection(a, a).size(), 4);
}

TEST(CyclicSeparating, BellAndProductVectors) {
  const auto a = two_by_two();
  const auto bell_cs = is_cyclic_separating(a, bell());
  EXPECT_TRUE(bell_cs.cyclic);
  EXPECT_TRUE(bell_cs.separating);
  const auto prod = is_cyclic_separating(a, schmidt_vector({1.0, 0.0}));
  EXPECT_FALSE(prod.cyclic);
  EXPECT_FALSE(prod.separating);
  EXPECT_THROW(is_cyclic_separating(a, StateVector::Zero(4)), ModularError);
}

TEST(CyclicSeparating, SeparatingMatchesCyclicForCommutant) {
  std::mt19937_64 rng(11);
  for (const std::vector<int>& blocks : {std::vector<int>{2}, {1, 2}, {3}, {2, 2}}) {
    const auto a = direct_sum_fixture(blocks);
    const StateVector v = random_faithful_vector(blocks, rng);
    EXPECT_EQ(is_cyclic_separating(a, v).separating, is_cyclic_separating(commutant(a), v).cyclic);
    EXPECT_TRUE(is_cyclic_separating(a, v).separating);
  }
}

TEST(Modular, BellStateTracialCase) {
  const auto a = two_by_two();
  const auto d = compute_modular(a, bell());
  EXPECT_LT(max_norm(LinOp(d.Delta - LinOp::Identity(4, 4))), 1e-12);
  // J = swap composed with complex conjugation.
  EXPECT_LT(max_norm(LinOp(d.J.matrix() - tensor_swap(2))), 1e-12);
  EXPECT_TRUE(verify_tomita(a, d).passed(1e-9));
}

TEST(Modular, UnequalSchmidtCoefficientsMatchOracle) {
  const auto a = two_by_two();
  const StateVector omega = schmidt_vector({2.0 / 3.0, 1.0 / 3.0});
  const auto d = compute_modular(a, omega);
  const Eigen::VectorXd oracle = oracle_spectrum(2, omega);
  Eigen::VectorXd frozen(4);
  frozen << 0.5, 1.0, 1.0, 2.0;
  ASSERT_EQ(d.spectrum.size(), 4);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(d.spectrum(i), oracle(i), 1e-12);
    EXPECT_NEAR(d.spectrum(i), frozen(i), 1e-12);
  }
  // Delta = rho (x) rho^{-1} on the diagonal matrix-unit basis.
  EXPECT_NEAR(d.Delta(1, 1).real(), 2.0, 1e-12);
  EXPECT_NEAR(d.Delta(2, 2).real(), 0.5, 1e-12);
  EXPECT_LT(max_norm(LinOp(d.J.matrix() - tensor_swap(2))), 1e-12);
  const auto rep = verify_tomita(a, d);
  for (const auto& [name, r] : rep.residuals) EXPECT_LT(r, 1e-9) << name;
}

TEST(Modular, ModularFlowIsInnerForFactor) {
  const auto a = two_by_two();
  const StateVector omega = schmidt_vector({0.8, 0.2});
  const auto d = compute_modular(a, omega);
  // Delta^{it} = rho^{it} (x) rho^{-it}.
  const double t = 0.37;
  LinOp r(2, 2);
  r.setZero();
  r(0, 0) = std::exp(Complex(0, t * std::log(0.8)));
  r(1, 1) = std::exp(Complex(0, t * std::log(0.2)));
  EXPECT_LT(max_norm(LinOp(modular_flow(d, t) - kron(r, LinOp(r.conjugate())))), 1e-12);
}

TEST(Modular, RandomFixturesSatisfyTomita) {
  std::mt19937_64 rng(2024);
  const std::vector<std::vector<int>> shapes{{2}, {3}, {1, 2}, {2, 2}, {1, 1, 2}, {3, 1}};
  for (int trial = 0; trial < 18; ++trial) {
    const auto& blocks = shapes[static_cast<std::size_t>(trial) % shapes.size()];
    const auto a = direct_sum_fixture(blocks);
    const StateVector omega = random_faithful_vector(blocks, rng);
    const auto d = compute_modular(a, omega);
    const auto rep = verify_tomita(a, d);
    for (const auto& [name, r] : rep.residuals) EXPECT_LT(r, 1e-9) << name << " trial " << trial;
  }
}

TEST(Modular, RejectsNonCyclicAndIllConditioned) {
  const auto a = two_by_two();
  EXPECT_THROW(compute_modular(a, schmidt_vector({1.0, 0.0})), ModularError);
  EXPECT_THROW(compute_modular(a, schmidt_vector({1.0 - 1e-10, 1e-10})), ModularError);
}

TEST(Modular, SabotagedConjugationIsDetected) {
  const auto a = two_by_two();
  auto d = compute_modular(a, schmidt_vector({2.0 / 3.0, 1.0 / 3.0}));
  auto plain = d;
  plain.J = AntilinearOperator::conjugation(4);
  EXPECT_GT(verify_tomita(a, plain).residuals.at("jmj_commutant"), 1e-3);

  auto flat = d;
  flat.Delta = LinOp::Identity(4, 4);
  flat.spectrum = Eigen::VectorXd::Ones(4);
  flat.eigenvectors = LinOp::Identity(4, 4);
  EXPECT_GT(verify_tomita(a, flat).residuals.at("delta_half_relation"), 1e-3);
}

TEST(Transport, UnitaryCovariance) {
  std::mt19937_64 rng(5);
  const auto a = direct_sum_fixture({2});
  const StateVector omega = random_faithful_vector({2}, rng);
  const LinOp u = random_unitary(4, rng);
  std::vector<LinOp> moved;
  for (const auto& b : a.basis()) moved.push_back(u * b * u.adjoint());
  const auto b = FiniteVNAlgebra::from_span(4, moved);
  const auto rep = transport_modular(u, a, b, omega, u * omega);
  EXPECT_TRUE(rep.precondition_ok);
  EXPECT_LT(rep.j_residual, 1e-9);
  EXPECT_LT(rep.delta_residual, 1e-9);

  const auto bad = transport_modular(u, a, b, omega, omega);
  EXPECT_FALSE(bad.precondition_ok);
  EXPECT_EQ(bad.precondition_failure, "u OmegaA differs from OmegaB");
}

TEST(Antilinear, AdjointConventions) {
  std::mt19937_64 rng(8);
  const LinOp m1 = random_unitary(3, rng) * 1.7, m2 = random_unitary(3, rng) + LinOp::Identity(3, 3);
  const AntilinearOperator t1(m1), t2(m2);
  EXPECT_EQ(t1.adjoint().adjoint().matrix(), m1);
  // (T1 T2)* = T2* T1*, both sides linear.
  const LinOp lhs = (t1 * t2).adjoint();
  const LinOp rhs = t2.adjoint() * t1.adjoint();
  EXPECT_LT(max_norm(LinOp(lhs - rhs)), 1e-15);
}

TEST(Algebra, DiagonalAndFullAlgebraCommutants) {
  const auto diag = algebra_closure({LinOp(Eigen::Vector2cd(1.0, -1.0).asDiagonal())});
  EXPECT_LT(span_distance(commutant(diag), diag), 1e-10);
  std::vector<LinOp> units;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) units.push_back(matrix_unit(3, i, j));
  const auto full = FiniteVNAlgebra::from_span(3, units);
  EXPECT_EQ(commutant(full).size(), 1);
  EXPECT_EQ(algebra_closure({LinOp::Identity(3, 3)}).size(), 1);
  // Idempotent.
  EXPECT_EQ(algebra_closure(full.basis()).size(), 9);

  const StateVector e0 = StateVector::Unit(3, 0);
  const auto cs = is_cyclic_separating(full, e0);
  EXPECT_TRUE(cs.cyclic);
  EXPECT_FALSE(cs.separating);
}

TEST(Algebra, DoubleCommutantOfRandomClosures) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = direct_sum_fixture({1, 2});
    LinOp h = LinOp::Zero(5, 5);
    for (const auto& b : a.basis()) h += nd(rng) * (b + b.adjoint());
    const auto gen = algebra_closure({h});
    EXPECT_LT(span_distance(commutant(commutant(gen)), gen), 1e-10);
  }
}

TEST(Modular, DiagonalAlgebraWithUniformVector) {
  const auto diag = algebra_closure({LinOp(Eigen::Vector2cd(1.0, 0.0).asDiagonal())});
  const auto d = compute_modular(diag, StateVector::Ones(2) / std::sqrt(2.0));
  EXPECT_LT(max_norm(LinOp(d.Delta - LinOp::Identity(2, 2))), 1e-12);
  EXPECT_LT(max_norm(LinOp(d.J.matrix() - LinOp::Identity(2, 2))), 1e-12);
}

TEST(Modular, FlowGroupLawAndPeriod) {
  const auto d = compute_modular(two_by_two(), schmidt_vector({2.0 / 3.0, 1.0 / 3.0}));
  EXPECT_LT(max_norm(LinOp(modular_flow(d, 0.0) - LinOp::Identity(4, 4))), 1e-14);
  EXPECT_LT(max_norm(LinOp(modular_flow(d, 0.3) * modular_flow(d, 1.1) - modular_flow(d, 1.4))), 1e-12);
  EXPECT_LT(unitarity_residual(modular_flow(d, 2.5)), 1e-12);
  // Eigenvalues 2 and 1/2 both return to phase 1 at t = 2 pi / ln 2.
  EXPECT_LT(max_norm(LinOp(modular_flow(d, 2 * std::numbers::pi / std::log(2.0)) - LinOp::Identity(4, 4))), 1e-12);
}

TEST(Modular, HundredRandomFixturesAtTightTolerance) {
  std::mt19937_64 rng(99);
  const std::vector<std::vector<int>> shapes{{2}, {3}, {4}, {1, 2}, {2, 2}, {1, 1, 2}, {3, 1}, {2, 3}};
  for (int trial = 0; trial < 100; ++trial) {
    const auto& blocks = shapes[static_cast<std::size_t>(trial) % shapes.size()];
    const auto a = direct_sum_fixture(blocks);
    ASSERT_LE(a.dim(), 16);
    const auto d = compute_modular(a, random_faithful_vector(blocks, rng));
    const auto rep = verify_tomita(a, d);
    for (const auto& [name, r] : rep.residuals) EXPECT_LT(r, 1e-10) << name << " trial " << trial;
  }
}

TEST(Transport, SwapMapsFactorsWithSymmetricVector) {
  const auto a = left_factor_algebra(2, 2), b = right_factor_algebra(2, 2);
  const StateVector omega = schmidt_vector({2.0 / 3.0, 1.0 / 3.0});
  const auto rep = transport_modular(tensor_swap(2), a, b, omega, omega);
  EXPECT_TRUE(rep.precondition_ok);
  EXPECT_LT(rep.j_residual, 1e-9);
  EXPECT_LT(rep.delta_residual, 1e-9);
  EXPECT_TRUE(transport_modular(LinOp::Identity(4, 4), a, a, omega, omega).passed(1e-9));
}
