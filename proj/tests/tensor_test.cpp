#include <gtest/gtest.h>

#include "support/random.hpp"
#include "weylglue/tensor.hpp"

using namespace weylglue;
using testsupport::Rng;

namespace {
const Sym2 I4 = Sym2::Identity();
}

TEST(KulkarniNomizu, ConventionPin) {
  Rank4 t = kulkarni_nomizu(I4, I4);
  EXPECT_DOUBLE_EQ(t(0, 1, 0, 1), -1.0);
  EXPECT_DOUBLE_EQ(t(0, 1, 1, 0), 1.0);
  EXPECT_EQ(validate(t, SymmetryClass::riemann).max(), 0.0);
}

TEST(KulkarniNomizu, SymmetricBilinearRiemannClass) {
  Rng rng(11);
  for (int n = 0; n < 20; ++n) {
    Sym2 a = rng.sym(), b = rng.sym(), c = rng.sym();
    Rank4 ab = kulkarni_nomizu(a, b);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) EXPECT_EQ(ab(i, j, k, l), ab(k, l, i, j));
    EXPECT_LT((ab - kulkarni_nomizu(b, a)).max_abs(), 1e-14);
    Rank4 lin = kulkarni_nomizu(a + 2.0 * c, b) - ab - 2.0 * kulkarni_nomizu(c, b);
    EXPECT_LT(lin.max_abs(), 1e-13);
    // first Bianchi holds as well
    EXPECT_LT(validate(ab, SymmetryClass::weyl).bianchi, 1e-14);
  }
}

TEST(WeylFromRiemann, ConstantCurvatureIsConformallyFlat) {
  Rank4 riem = kulkarni_nomizu(I4, I4);
  AlgWeyl w = weyl_from_riemann(riem, I4);
  EXPECT_LT(w.tensor.max_abs(), 1e-15);
}

TEST(WeylFromRiemann, FixesWeylTensorsAndProjects) {
  Rng rng(12);
  for (int n = 0; n < 20; ++n) {
    Rank4 w0 = rng.weyl().tensor;
    EXPECT_LT((weyl_from_riemann(w0, I4).tensor - w0).max_abs(), 1e-13);
    Rank4 shifted = kulkarni_nomizu(I4, I4) + w0;
    EXPECT_LT((weyl_from_riemann(shifted, I4).tensor - w0).max_abs(), 1e-13);
    Rank4 r = rng.riemann_class();
    Rank4 w = weyl_from_riemann(r, I4).tensor;
    EXPECT_LT(ricci_contraction(w, I4).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(validate(w, SymmetryClass::weyl).max(), 1e-12);
  }
}

TEST(WeylFromRiemann, DegenerateMetricRejected) {
  Sym2 g = I4;
  g(3, 3) = 0;
  EXPECT_THROW(weyl_from_riemann(kulkarni_nomizu(I4, I4), g), Error);
}

TEST(TwoForms, NormRelationAndRoundTrip) {
  Rng rng(13);
  EXPECT_EQ(op_from_tensor(Rank4{}).matrix.norm(), 0.0);
  for (int n = 0; n < 20; ++n) {
    Rank4 w = rng.weyl().tensor;
    TwoFormOp op = op_from_tensor(w);
    EXPECT_NEAR(w.norm2(), 4 * op.matrix.squaredNorm(), 1e-12 * w.norm2());
    EXPECT_LT((tensor_from_op(op) - w).max_abs(), 1e-13);
    Rank4 r = rng.riemann_class();
    EXPECT_NEAR(r.norm2(), 4 * op_from_tensor(r).matrix.squaredNorm(), 1e-11 * r.norm2());
  }
}

TEST(TwoForms, OperatorNormOfUnitSpectrum) {
  AlgWeyl w = algweyl_from_spectrum({1, 0, -1}, {0, 0, 0});
  EXPECT_NEAR(op_from_tensor(w.tensor).matrix.squaredNorm(), 2.0, 1e-14);
  EXPECT_NEAR(w.tensor.norm2(), 8.0, 1e-13);
}

TEST(TwoForms, AsymmetricInputRejected) {
  Rank4 t = kulkarni_nomizu(I4, I4);
  t(0, 1, 2, 3) += 0.5;
  EXPECT_THROW(op_from_tensor(t), Error);
}

TEST(TwoForms, HodgeStarIsAnInvolution) {
  EXPECT_LT((hodge_star() * hodge_star() - Mat6::Identity()).norm(), 1e-15);
  Vec4 e[4];
  for (int i = 0; i < 4; ++i) e[i] = Vec4::Unit(i);
  // *(e1^e2) = e3^e4 and *(e1^e3) = e4^e2
  EXPECT_LT((hodge_star() * wedge(e[0], e[1]) - wedge(e[2], e[3])).norm(), 1e-15);
  EXPECT_LT((hodge_star() * wedge(e[0], e[2]) - wedge(e[3], e[1])).norm(), 1e-15);
}

TEST(AlgWeylFromSpectrum, ZeroAndSelfDual) {
  EXPECT_EQ(algweyl_from_spectrum({0, 0, 0}, {0, 0, 0}).tensor.max_abs(), 0.0);
  AlgWeyl w = algweyl_from_spectrum({1, 0, -1}, {0, 0, 0});
  Mat6 m = op_from_tensor(w.tensor).matrix;
  EXPECT_LT((hodge_star() * m - m).norm(), 1e-14);
  EXPECT_LT((m * hodge_star() - m).norm(), 1e-14);
}

TEST(AlgWeylFromSpectrum, WeylClassForAnyFrame) {
  Rng rng(14);
  AlgWeyl w = algweyl_from_spectrum({2, -1, -1}, {1, 1, -2});
  EXPECT_LE(validate(w.tensor, SymmetryClass::weyl).bianchi, 1e-13);
  for (int n = 0; n < 50; ++n) {
    AlgWeyl r = rng.weyl();
    EXPECT_LE(validate(r.tensor, SymmetryClass::weyl).max(), 1e-13);
    Mat6 m = op_from_tensor(r.tensor).matrix;
    EXPECT_LT((hodge_star() * m - m * hodge_star()).norm(), 1e-13);
  }
}

TEST(AlgWeylFromSpectrum, TraceFreeViolation) {
  EXPECT_THROW(algweyl_from_spectrum({1, 0, 0}, {0, 0, 0}), Error);
  EXPECT_THROW(algweyl_from_spectrum({0, 0, 0}, {1, 1, 1}), Error);
}

TEST(Validate, ReportsPerturbation) {
  Rank4 t = kulkarni_nomizu(I4, I4);
  for (double v : {validate(t, SymmetryClass::riemann).max()}) EXPECT_EQ(v, 0.0);
  t(0, 1, 2, 3) += 1e-3;
  auto rep = validate(t, SymmetryClass::riemann);
  EXPECT_NEAR(rep.pair, 1e-3, 1e-15);
}

TEST(Validate, SpectrumNormIdentity) {
  Rng rng(15);
  for (int n = 0; n < 20; ++n) {
    auto sd = rng.triple(), asd = rng.triple();
    AlgWeyl w = algweyl_from_spectrum(sd, asd, rng.rotation());
    double s2 = 0;
    for (int m = 0; m < 3; ++m) s2 += sd[m] * sd[m] + asd[m] * asd[m];
    EXPECT_NEAR(w.tensor.norm2(), 4 * s2, 1e-12 * (1 + s2));
  }
}
