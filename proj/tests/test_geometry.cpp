#include "wedgelab/geometry.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace wedgelab;

namespace {

Mat4 diag(double a, double b, double c, double d) { return Vec4(a, b, c, d).asDiagonal(); }

}  // namespace

TEST(Geometry, MinkowskiInner) {
  EXPECT_EQ(minkowski_inner(FourVector(1, 1, 0, 0), FourVector(1, 1, 0, 0)), 0.0);
  EXPECT_EQ(minkowski_inner(FourVector(1, 0, 0, 0), FourVector(1, 0, 0, 0)), 1.0);
  EXPECT_EQ(minkowski_inner(FourVector(1, 1, 0, 0), FourVector(1, -1, 0, 0)), 2.0);
}

TEST(Geometry, RejectsNonFinite) {
  EXPECT_THROW(FourVector(std::nan(""), 0, 0, 0), GeometryError);
  EXPECT_THROW(FourVector(0, INFINITY, 0, 0), GeometryError);
  EXPECT_THROW(PoincareElement(diag(2, 1, 1, 1), FourVector()), GeometryError);
}

TEST(Geometry, ComposeExamples) {
  std::mt19937_64 rng(7);
  const PoincareElement l = random_poincare(rng);
  EXPECT_LE(compose(l, PoincareElement::identity()).distance(l), 0.0);
  EXPECT_LE(compose(l, invert(l)).distance(PoincareElement::identity()), 1e-10);
  const auto r = PoincareElement::lorentz(diag(-1, -1, 1, 1));
  EXPECT_EQ(compose(r, r).distance(PoincareElement::identity()), 0.0);
}

TEST(Geometry, ApplyExamples) {
  const FourVector x(1, 2, 3, 4);
  EXPECT_EQ((apply(PoincareElement::identity(), x) - x).max_abs(), 0.0);
  const FourVector a(0.5, -1, 2, 0);
  EXPECT_EQ((apply(PoincareElement::translation(a), x) - (x + a)).max_abs(), 0.0);
  const FourVector y = apply(PoincareElement::lorentz(diag(-1, -1, 1, 1)), x);
  EXPECT_EQ((y - FourVector(-1, -2, 3, 4)).max_abs(), 0.0);
}

TEST(Geometry, ClassifyExamples) {
  EXPECT_EQ(classify(PoincareElement::identity()), (LorentzClass{true, true}));
  EXPECT_EQ(classify(PoincareElement::lorentz(diag(-1, -1, 1, 1))), (LorentzClass{true, false}));
  EXPECT_EQ(classify(PoincareElement::lorentz(diag(1, -1, 1, 1))), (LorentzClass{false, true}));
}

TEST(Geometry, RandomElementsStayLorentz) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const auto l1 = random_poincare(rng);
    const auto l2 = random_poincare(rng);
    const auto c = compose(l1, l2);
    ASSERT_LE(c.metric_residual(), 1e-10);
    ASSERT_LE(invert(l1).metric_residual(), 1e-10);

    const auto c1 = classify(l1), c2 = classify(l2), cc = classify(c);
    ASSERT_EQ(cc.proper, c1.proper == c2.proper);
    ASSERT_EQ(cc.orthochronous, c1.orthochronous == c2.orthochronous);

    const FourVector x = random_four_vector(rng);
    const double scale = std::max(1.0, apply(c, x).max_abs());
    ASSERT_LE((apply(c, x) - apply(l1, apply(l2, x))).max_abs(), 1e-10 * scale);
  }
}

TEST(Geometry, BoostAndRotationAreRestricted) {
  const Mat4 b = boost_matrix(Eigen::Vector3d(1, 2, -1), 1.3);
  EXPECT_LE(metric_residual(b), 1e-12);
  EXPECT_EQ(classify(PoincareElement::lorentz(b)), (LorentzClass{true, true}));
  const Mat4 r = rotation_matrix(Eigen::Vector3d(0, 0, 1), 0.7);
  EXPECT_LE(metric_residual(r), 1e-14);
  EXPECT_NEAR(boost_matrix(1, 0.5)(0, 1), std::sinh(0.5), 1e-15);
}
