#include "wedgelab/freemodel.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace wedgelab;

namespace {

const ModelFixture& small_model() {
  static const ModelFixture m = build_model(1.0, 40, 0.05);
  return m;
}

StateVector random_interior_vector(const ModelFixture& m, int margin, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  StateVector v = StateVector::Zero(m.dim());
  for (int r : m.interior_rows(margin)) v(r) = Complex(nd(rng), nd(rng));
  return v.normalized();
}

double interior_distance(const ModelFixture& m, const LinOp& a, const LinOp& b, int margin) {
  double d = 0;
  for (int r : m.interior_rows(margin))
    for (int c : m.interior_rows(margin)) d = std::max(d, std::abs(a(r, c) - b(r, c)));
  return d;
}

}  // namespace

TEST(Grid, DimensionAndValidation) {
  EXPECT_EQ(build_model(1.0, 200, 0.05).dim(), 401);
  EXPECT_THROW(build_model(0.0, 10, 0.1), ModelError);
  EXPECT_THROW(build_model(1.0, 0, 0.1), ModelError);
  EXPECT_THROW(build_model(1.0, 10, -0.1), ModelError);
}

TEST(Momentum, MassShellPoints) {
  const auto& m = small_model();
  EXPECT_DOUBLE_EQ(m.momentum(0)(0), 1.0);
  EXPECT_DOUBLE_EQ(m.momentum(0)(1), 0.0);
  const auto ln2 = build_model(1.0, 2, std::log(2.0));
  EXPECT_NEAR(ln2.momentum(1)(0), 1.25, 1e-15);
  EXPECT_NEAR(ln2.momentum(1)(1), 0.75, 1e-15);
  for (int k = -40; k <= 40; ++k) EXPECT_GE(m.momentum(k)(0), std::abs(m.momentum(k)(1)));
  EXPECT_THROW(m.momentum(41), ModelError);
}

TEST(Translation, GroupLaw) {
  const auto& m = small_model();
  const int n = m.dim();
  EXPECT_EQ(m.translation_rep(Vec2::Zero()), LinOp::Identity(n, n));
  EXPECT_NEAR(std::abs(m.translation_rep(Vec2(2 * std::numbers::pi, 0))(40, 40) - 1.0), 0.0, 1e-15);
  const Vec2 a(0.3, -1.2), b(-0.7, 0.4);
  EXPECT_LT(max_norm(LinOp(m.translation_rep(a) * m.translation_rep(Vec2(-a)) - LinOp::Identity(n, n))), 1e-15);
  EXPECT_LT(max_norm(LinOp(m.translation_rep(a) * m.translation_rep(b) - m.translation_rep(Vec2(a + b)))), 1e-12);
}

TEST(Boost, ShiftsAndCommensurability) {
  const auto& m = small_model();
  const int n = m.dim();
  const auto id = m.boost_rep(0.0);
  EXPECT_EQ(id.op, LinOp::Identity(n, n));
  EXPECT_TRUE(id.dropped.empty());

  const auto one = m.boost_rep(0.05);
  EXPECT_EQ(one.shift, 1);
  EXPECT_EQ(one.op(m.grid().row(1), m.grid().row(0)), Complex(1.0));
  ASSERT_EQ(one.dropped.size(), 1u);
  EXPECT_EQ(one.dropped[0], 40);

  try {
    m.boost_rep(0.025);
    FAIL() << "expected CommensurabilityError";
  } catch (const CommensurabilityError& e) {
    EXPECT_DOUBLE_EQ(e.lower(), 0.0);
    EXPECT_DOUBLE_EQ(e.upper(), 0.05);
  }
}

TEST(Boost, CovarianceOfTranslations) {
  const auto& m = small_model();
  const double chi = 0.15;
  const auto b = m.boost_rep(chi);
  const Vec2 xi(0.4, 0.9);
  const LinOp lhs = b.op * m.translation_rep(xi) * b.op.transpose();
  const LinOp rhs = m.translation_rep(Vec2(boost2(chi) * xi));
  EXPECT_LT(interior_distance(m, lhs, rhs, b.shift), 1e-12);
  // Spectral points are permuted among themselves.
  for (int k = -37; k <= 37; ++k) EXPECT_LT((boost2(chi) * m.momentum(k) - m.momentum(k + 3)).norm(), 1e-12);
}

TEST(Conjugation, InvolutionCovarianceAndDuality) {
  const auto& m = small_model();
  const int n = m.dim();
  const auto j0 = m.wedge_conjugation(ModelWedgeTag::right(Vec2::Zero()));
  EXPECT_EQ(j0.matrix(), LinOp::Identity(n, n));
  EXPECT_LT(j0.involution_residual(), 1e-15);

  const Vec2 xi(0.2, 0.7);
  const auto jr = m.wedge_conjugation(ModelWedgeTag::right(xi));
  const auto jl = m.wedge_conjugation(ModelWedgeTag::left(xi));
  EXPECT_EQ(jr.matrix(), jl.matrix());
  EXPECT_LT(jr.involution_residual(), 1e-12);
  EXPECT_LT(jr.antiunitarity_residual(), 1e-12);
  const auto expected = m.translation_rep(xi) * j0 * m.translation_rep(Vec2(-xi));
  EXPECT_LT(max_norm(LinOp(jr.matrix() - expected.matrix())), 1e-12);

  // J0 U(eta) J0 = U(-eta).
  const Vec2 eta(1.1, -0.3);
  EXPECT_LT(max_norm(LinOp(j0.adjoint_action(m.translation_rep(eta)) - m.translation_rep(Vec2(-eta)))), 1e-15);
}

TEST(Conjugation, ProductsGiveTranslations) {
  const auto m = build_model(1.0, 200, 0.05);
  const auto j0 = m.wedge_conjugation(ModelWedgeTag::right(Vec2::Zero()));
  const Vec2 xi(0.013, 0.021);
  const LinOp u = m.wedge_conjugation(ModelWedgeTag::right(Vec2(xi / 2))) * j0;
  EXPECT_LT(max_norm(LinOp(u - m.translation_rep(xi))), 1e-12);

  // V(t) = J_{Right(t xi / 2)} J_0.
  auto v = [&](double t) { return LinOp(m.wedge_conjugation(ModelWedgeTag::right(Vec2(t * xi / 2))) * j0); };
  for (double t : {0.1, 0.5, 1.3}) {
    EXPECT_LT(max_norm(LinOp(v(t) * v(t) - v(2 * t))), 1e-12);
    const LinOp lhs = (v(t) * j0).matrix();
    const LinOp rhs = (j0 * LinOp(v(t).adjoint())).matrix();
    EXPECT_LT(max_norm(LinOp(lhs - rhs)), 1e-12);
  }
}

TEST(Conjugation, StrongContinuityBound) {
  const auto& m = small_model();
  const Vec2 xi(0.5, 0.25);
  const double c = m.phase_rate(xi);
  const auto j0 = m.wedge_conjugation(ModelWedgeTag::right(Vec2::Zero()));
  // Worst case over unit vectors: |e^{2 i t p.xi} - 1| <= 2 |t| |p.xi|.
  for (double t : {1e-4, 1e-3, 0.01, 0.3, 1.0}) {
    const auto jt = m.wedge_conjugation(ModelWedgeTag::right(Vec2(t * xi)));
    for (int k = -40; k <= 40; ++k) {
      const StateVector e = StateVector::Unit(m.dim(), m.grid().row(k));
      EXPECT_LE((jt.apply(e) - j0.apply(e)).norm(), 2 * c * std::abs(t) * (1 + 1e-12));
    }
  }
}

TEST(Flow, IdentityShiftAndGroupLaw) {
  const auto& m = small_model();
  const int n = m.dim();
  const auto r0 = ModelWedgeTag::right(Vec2::Zero());
  EXPECT_EQ(m.modular_flow(r0, 0.0), LinOp::Identity(n, n));
  const double t1 = 0.05 / (2 * std::numbers::pi);
  EXPECT_EQ(m.modular_flow(r0, t1), m.boost_rep(-0.05).op);
  EXPECT_THROW(m.modular_flow(r0, 0.3), CommensurabilityError);

  const auto rx = ModelWedgeTag::right(Vec2(0.3, 0.5));
  const LinOp lhs = m.modular_flow(rx, 2 * t1) * m.modular_flow(rx, 3 * t1);
  EXPECT_LT(interior_distance(m, lhs, m.modular_flow(rx, 5 * t1), 5), 1e-12);
  // Complement flows backwards.
  const auto lx = ModelWedgeTag::left(Vec2(0.3, 0.5));
  EXPECT_LT(interior_distance(m, LinOp(m.modular_flow(lx, t1) * m.modular_flow(rx, t1)), LinOp::Identity(n, n), 1),
            1e-12);
}

TEST(Flow, CovarianceOfConjugations) {
  const auto& m = small_model();
  const double t = 2 * 0.05 / (2 * std::numbers::pi);
  const LinOp f = m.modular_flow(ModelWedgeTag::right(Vec2::Zero()), t);
  const Vec2 xi(0.2, 0.6);
  const auto moved = f * m.wedge_conjugation(ModelWedgeTag::right(xi)) * LinOp(f.adjoint());
  const auto expected = m.wedge_conjugation(ModelWedgeTag::right(Vec2(boost2(-2 * std::numbers::pi * t) * xi)));
  EXPECT_LT(interior_distance(m, moved.matrix(), expected.matrix(), 2), 1e-12);
}

TEST(TimeReflection, BackwardMomenta) {
  const auto m = build_model(1.0, 10, 0.1, true);
  for (int k = -10; k <= 10; ++k) EXPECT_LE(m.momentum(k)(0), -std::abs(m.momentum(k)(1)));
}

TEST(Export, SpectrumCsv) {
  std::ostringstream os;
  build_model(1.0, 1, 0.5).write_spectrum_csv(os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "theta,p0,p1");
  std::getline(is, line);
  EXPECT_EQ(line.substr(0, 5), "-0.5,");
  int rows = 1;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(Vectors, InteriorSupport) {
  std::mt19937_64 rng(1);
  const auto& m = small_model();
  const StateVector v = random_interior_vector(m, 5, rng);
  EXPECT_NEAR(v.norm(), 1.0, 1e-15);
  EXPECT_EQ(v(0), Complex(0.0));
  // Boosts within the margin preserve the norm.
  EXPECT_NEAR((m.boost_rep(0.2).op * v).norm(), 1.0, 1e-14);
}
