#include <gtest/gtest.h>

#include "support/fd_oracle.hpp"
#include "weylglue/jet.hpp"

using namespace weylglue;

TEST(Jet, TableSizes) {
  EXPECT_EQ(JetTable<2>::get().size, 15);
  EXPECT_EQ(JetTable<4>::get().size, 70);
  // x_i sits right after the constant
  EXPECT_EQ(JetTable<4>::get().exps[3][2], 1);
}

TEST(Jet, PolynomialDerivativesAreExact) {
  Vec4 x0(0.3, -0.2, 0.7, 1.1);
  auto X = [&](int i) { return Jet<4>::variable(i, x0(i)); };
  // f = x0^2 x1 x3 + 3 x2^4
  Jet<4> f = X(0) * X(0) * X(1) * X(3) + 3.0 * X(2) * X(2) * X(2) * X(2);
  EXPECT_NEAR(f.value(), 0.09 * -0.2 * 1.1 + 3 * std::pow(0.7, 4), 1e-15);
  EXPECT_NEAR(f.d(0), 2 * 0.3 * -0.2 * 1.1, 1e-15);
  EXPECT_NEAR(f.d(0, 0, 1, 3), 2.0, 1e-14);
  EXPECT_NEAR(f.d(2, 2, 2, 2), 72.0, 1e-12);
  EXPECT_NEAR(f.d(2, 2, 2), 72.0 * 0.7, 1e-12);
  EXPECT_EQ(f.d(1, 1), 0.0);
}

TEST(Jet, PowerMatchesFiniteDifferences) {
  Vec4 x0(0.4, 0.1, -0.5, 0.2);
  auto f = [](const Vec4& x) { return std::pow(x.squaredNorm(), -1.5) * x(0); };
  Jet<3> s = radius_squared<3>(x0);
  Jet<3> j = pow(s, -1.5) * Jet<3>::variable(0, x0(0));
  EXPECT_NEAR(j.value(), f(x0), 1e-13);
  for (int a = 0; a < 4; ++a) {
    double fd = testsupport::fd_x(f, x0, a);
    EXPECT_NEAR(j.d(a), fd, 1e-7 * std::max(1.0, std::abs(fd)));
    for (int b = 0; b < 4; ++b) {
      double fd2 = testsupport::fd_xx(f, x0, a, b);
      EXPECT_NEAR(j.d(a, b), fd2, 1e-5 * std::max(1.0, std::abs(fd2)));
    }
  }
}

TEST(Jet, ComposeIsHornerInTheIncrement) {
  Vec4 x0(0.2, 0.0, 0.0, 0.0);
  Jet<4> u = Jet<4>::variable(0, x0(0));
  // exp(u) via its derivative table
  std::array<double, 5> g;
  g.fill(std::exp(0.2));
  Jet<4> e = compose(g, u);
  for (int k = 0; k <= 4; ++k) {
    std::array<int, 4> m{k, 0, 0, 0};
    EXPECT_NEAR(e.derivative(m), std::exp(0.2), 1e-14);
  }
}
