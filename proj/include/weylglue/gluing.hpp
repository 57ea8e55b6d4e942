#ifndef WEYLGLUE_GLUING_HPP
#define WEYLGLUE_GLUING_HPP

// Model tensors, the inversion, the cutoff and the glued metric on a <= |x| <= 2.

#include <limits>
#include <random>

#include "biharmonic.hpp"

namespace weylglue {

// H_ij = -1/3 W_kijl x^k x^l
class ModelH : public JetSource<ModelH> {
 public:
  explicit ModelH(const AlgWeyl& w) : q_(make_weyl(w.tensor, 1e-10).tensor) {}
  template <int N>
  SymJet<N> make(const Vec4& x) const {
    SymJet<N> h = q_.jet<N>(x);
    for (auto& row : h)
      for (auto& v : row) v *= -1.0 / 3;
    return h;
  }

 private:
  WeylQuadratic q_;
};

// F_ij = -1/3 W_kijl x^k x^l / |x|^4, away from the origin
class ModelF : public JetSource<ModelF> {
 public:
  explicit ModelF(const AlgWeyl& w) : q_(make_weyl(w.tensor, 1e-10).tensor) {}
  Domain domain() const override { return Domain::annulus(1e-300, std::numeric_limits<double>::infinity()); }
  template <int N>
  SymJet<N> make(const Vec4& x) const {
    if (x.squaredNorm() == 0) throw Error("point outside chart domain");
    Jet<N> f = -1.0 / 3 * pow(radius_squared<N>(x), -2.0);
    SymJet<N> h = q_.jet<N>(x);
    for (auto& row : h)
      for (auto& v : row) v = f * v;
    return h;
  }

 private:
  WeylQuadratic q_;
};

// delta - 1/3 W_kijl z^k z^l
inline std::shared_ptr<PerturbedChart> cnc_model(const AlgWeyl& w) {
  return std::make_shared<PerturbedChart>(std::make_shared<FlatChart>(), std::make_shared<ModelH>(w), 1.0,
                                          ChartKind::cnc_model);
}

// g_a = delta + a^2 F, the shrunk inverted piece in the gluing coordinates
inline std::shared_ptr<PerturbedChart> ga_model(const AlgWeyl& wm, double a) {
  auto f = std::make_shared<ModelF>(wm);
  return std::make_shared<PerturbedChart>(std::make_shared<FlatChart>(), f, a * a, ChartKind::inverted_model,
                                          f->domain());
}

// g_b = delta + b^2 H
inline std::shared_ptr<PerturbedChart> gb_model(const AlgWeyl& wz, double b) {
  return std::make_shared<PerturbedChart>(std::make_shared<FlatChart>(), std::make_shared<ModelH>(wz), b * b,
                                          ChartKind::cnc_model);
}

// C_ij(z) = sum_k z^k (z . K[i][j][k] z), a cubic correction to the normal-coordinate model
struct CubicTerm {
  std::array<std::array<std::array<Mat4, 4>, 4>, 4> K{};

  static CubicTerm random(std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    CubicTerm c;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
          Mat4 m;
          for (int p = 0; p < 4; ++p)
            for (int q = p; q < 4; ++q) m(p, q) = m(q, p) = scale * u(gen);
          c.K[i][j][k] = c.K[j][i][k] = m;
        }
    return c;
  }
  Sym2 value(const Vec4& z) const {
    Sym2 m = Sym2::Zero();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) m(i, j) += z(k) * z.dot(K[i][j][k] * z);
    return m;
  }
};

struct InversionReport {
  Sym2 pullback;   // |y|^4 (I^* m)(y)
  Sym2 expansion;  // delta - 1/3 W_kijl y^k y^l / |y|^4
  double residual; // max |pullback - expansion|
};

// The model m is trusted for |z| <= truncation_radius, i.e. |y| >= 1/truncation_radius.
inline InversionReport invert_pullback(const AlgWeyl& wm, const Vec4& y, double truncation_radius = 1.0,
                                       const CubicTerm* cubic = nullptr) {
  double r2 = y.squaredNorm();
  if (!(std::sqrt(r2) * truncation_radius >= 1 - 1e-12)) throw Error("inversion needs |y| >= 1/truncation_radius");
  WeylQuadratic q(wm.tensor);
  Vec4 z = y / r2;
  Sym2 m = Sym2::Identity() - q.value(z) / 3;
  if (cubic) m += cubic->value(z);
  // dz^a/dy^i = (delta_ai |y|^2 - 2 y_a y_i) / |y|^4
  Mat4 J = (Mat4::Identity() * r2 - 2 * y * y.transpose()) / (r2 * r2);
  InversionReport rep;
  rep.pullback = r2 * r2 * (J.transpose() * m * J);
  rep.expansion = Sym2::Identity() - q.value(y) / (3 * r2 * r2);
  rep.residual = (rep.pullback - rep.expansion).cwiseAbs().maxCoeff();
  return rep;
}

// chi_a: 0 below sqrt(a)/4, 1 above 3 sqrt(a)/4, quintic smoothstep between
struct Cutoff {
  double a;

  double lo() const { return std::sqrt(a) / 4; }
  double hi() const { return 3 * std::sqrt(a) / 4; }

  // chi and its first N derivatives in t
  template <int N>
  std::array<double, N + 1> derivatives(double t) const {
    std::array<double, N + 1> d{};
    if (t <= lo()) return d;
    if (t >= hi()) {
      d[0] = 1;
      return d;
    }
    double w = hi() - lo(), s = (t - lo()) / w;
    // p(s) = 10 s^3 - 15 s^4 + 6 s^5
    std::array<double, 6> p{0, 0, 0, 10, -15, 6};
    for (int k = 0; k <= N && k <= 5; ++k) {
      // p^(k)(s) by Horner over n = 5..k
      double v = 0;
      for (int n = 5; n >= k; --n) {
        double c = p[n];
        for (int m = 0; m < k; ++m) c *= (n - m);
        v = v * s + c;
      }
      d[k] = v / std::pow(w, k);
    }
    return d;
  }
  double operator()(double t) const { return derivatives<0>(t)[0]; }

  // sup of |chi| + sqrt(a)|chi'| + a|chi''| on a dense grid of the band
  double realized_constant(int samples = 20001) const {
    double m = 0;
    for (int n = 0; n < samples; ++n) {
      double t = lo() + (hi() - lo()) * n / (samples - 1);
      auto d = derivatives<2>(t);
      m = std::max(m, std::abs(d[0]) + std::sqrt(a) * std::abs(d[1]) + a * std::abs(d[2]));
    }
    return m;
  }
};

struct ErrorModel {
  enum class Kind { truncated, synthetic };
  Kind kind = Kind::truncated;
  double zeta_scale = 0, eta_scale = 0;  // a^3 and b^3 in the construction
  std::uint64_t seed = 1;

  static ErrorModel truncated() { return {}; }
  static ErrorModel synthetic(double zeta, double eta, std::uint64_t seed = 1) {
    return {Kind::synthetic, zeta, eta, seed};
  }
};

// zeta_ij = zeta_scale A_ij |x|^-3 and eta_ij = eta_scale B_ij |x|^3, A and B fixed by the seed
struct SyntheticError {
  Sym2 A = Sym2::Zero(), B = Sym2::Zero();
  double zeta_scale = 0, eta_scale = 0;

  explicit SyntheticError(const ErrorModel& e = {}) : zeta_scale(e.zeta_scale), eta_scale(e.eta_scale) {
    if (e.kind == ErrorModel::Kind::truncated) {
      zeta_scale = eta_scale = 0;
      return;
    }
    std::mt19937_64 gen(e.seed);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        A(i, j) = A(j, i) = u(gen);
        B(i, j) = B(j, i) = u(gen);
      }
  }
  Sym2 zeta(const Vec4& x) const { return zeta_scale * std::pow(x.norm(), -3) * A; }
  Sym2 eta(const Vec4& x) const { return eta_scale * std::pow(x.norm(), 3) * B; }
  // constant C with |zeta||x|^3 <= C zeta_scale and |eta||x|^-3 <= C eta_scale
  double declared_constant() const { return std::max(A.cwiseAbs().maxCoeff(), B.cwiseAbs().maxCoeff()); }
};

class GluedChart : public JetSource<GluedChart, MetricChart> {
 public:
  enum class Zone { inner, interp, outer };

  GluedChart(const AlgWeyl& wm, const AlgWeyl& wz, const GluingParams& p, InterpSolution interp,
             ErrorModel err = ErrorModel::truncated())
      : p_(p), interp_(std::move(interp)), F_(wm), H_(wz), err_(err), syn_(err), cut_{p.a} {
    p.validate();
    const auto& q = interp_.params;
    if (q.a != p.a || q.gamma != p.gamma || q.lambda != p.lambda || (interp_.wm.tensor - wm.tensor).max_abs() != 0 ||
        (interp_.wz.tensor - wz.tensor).max_abs() != 0)
      throw Error("interpolant was built from different inputs");
  }

  ChartKind kind() const override { return ChartKind::glued; }
  Domain domain() const override { return Domain::annulus(p_.a, 2.0); }
  const GluingParams& params() const { return p_; }
  const InterpSolution& interpolant() const { return interp_; }
  const SyntheticError& synthetic() const { return syn_; }

  Zone zone(const Vec4& x) const {
    double r = x.norm();
    if (r < p_.gamma) return Zone::inner;
    if (r < 1) return Zone::interp;
    return Zone::outer;
  }

  template <int N>
  SymJet<N> make(const Vec4& x) const {
    return zone_jet<N>(zone(x), x);
  }

  // formula of one zone, evaluated anywhere it makes sense (used for one-sided limits)
  template <int N>
  SymJet<N> zone_jet(Zone z, const Vec4& x) const {
    SymJet<N> g;
    for (int i = 0; i < 4; ++i) g[i][i] = Jet<N>(1.0);
    if (z == Zone::interp) {
      SymJet<N> w = interp_.collapsed->template jet<N>(x);
      add(g, w, p_.a * p_.a);
      return g;
    }
    Jet<N> s = radius_squared<N>(x);
    Jet<N> r = sqrt(s);
    if (z == Zone::inner) {
      add(g, F_.make<N>(x), p_.a * p_.a);
      if (syn_.zeta_scale != 0) {
        Jet<N> chi = compose(cut_.derivatives<N>(p_.gamma - r.value()), p_.gamma + (-r));
        Jet<N> amp = syn_.zeta_scale * pow(s, -1.5) * chi;
        add_const(g, syn_.A, amp);
      }
    } else {
      add(g, H_.make<N>(x), p_.b() * p_.b());
      if (syn_.eta_scale != 0) {
        Jet<N> chi = compose(cut_.derivatives<N>(r.value() - 1), r + (-1.0));
        Jet<N> amp = syn_.eta_scale * pow(s, 1.5) * chi;
        add_const(g, syn_.B, amp);
      }
    }
    return g;
  }

 private:
  template <int N>
  static void add(SymJet<N>& g, const SymJet<N>& h, double t) {
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g[i][j] += t * h[i][j];
  }
  template <int N>
  static void add_const(SymJet<N>& g, const Sym2& m, const Jet<N>& amp) {
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (m(i, j) != 0) g[i][j] += m(i, j) * amp;
  }

  GluingParams p_;
  InterpSolution interp_;
  ModelF F_;
  ModelH H_;
  ErrorModel err_;
  SyntheticError syn_;
  Cutoff cut_;
};

}  // namespace weylglue

#endif
