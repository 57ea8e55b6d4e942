#ifndef WEYLGLUE_TEST_CHARTS_HPP
#define WEYLGLUE_TEST_CHARTS_HPP

// Small charts and fields used as test fixtures.

#include "random.hpp"
#include "weylglue/field.hpp"

namespace testsupport {

using namespace weylglue;

// random polynomial of degree <= deg in each component, coefficients ~ scale
inline PolynomialField random_poly(Rng& rng, double scale, int deg = 4, Domain d = {}) {
  const auto& t = JetTable<4>::get();
  PolynomialField::Coeffs c{};
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j)
      for (int m = 0; m < t.size; ++m)
        if (t.degree[m] <= deg) c[i][j].coeff(m) = scale * rng.normal();
  return PolynomialField(c, d);
}

// delta + small polynomial, positive definite on the unit box for small eps
inline std::shared_ptr<PerturbedChart> random_metric(Rng& rng, double eps) {
  auto p = std::make_shared<PolynomialField>(random_poly(rng, 1.0));
  return std::make_shared<PerturbedChart>(std::make_shared<FlatChart>(), p, eps);
}

// round sphere of curvature 1 in stereographic coordinates
class StereoSphere : public JetSource<StereoSphere, MetricChart> {
 public:
  ChartKind kind() const override { return ChartKind::custom; }
  template <int N>
  SymJet<N> make(const Vec4& x) const {
    Jet<N> f = 4.0 * pow(1.0 + radius_squared<N>(x), -2.0);
    SymJet<N> g;
    for (int i = 0; i < 4; ++i) g[i][i] = f;
    return g;
  }
};

// Q_ij = W_kijl x^k x^l, transverse-traceless on flat space
class WeylQuadraticField : public JetSource<WeylQuadraticField> {
 public:
  explicit WeylQuadraticField(const Rank4& w) : q_(w) {}
  template <int N>
  SymJet<N> make(const Vec4& x) const { return q_.jet<N>(x); }

 private:
  WeylQuadratic q_;
};

}  // namespace testsupport

#endif
