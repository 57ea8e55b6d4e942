#ifndef WEYLGLUE_BIHARMONIC_HPP
#define WEYLGLUE_BIHARMONIC_HPP

// Biharmonic interpolation on the annulus gamma < |x| < 1.  Boundary data are
// degree-2 spherical harmonics, so each mode is f(r) P(x)/r^2 with f in the
// span of r^-4, r^-2, r^2, r^4.  Coefficients are kept divided by a^2.

#include <Eigen/LU>
#include <functional>
#include <memory>

#include "curvature.hpp"
#include "params.hpp"

namespace weylglue {

// restriction to S^3 of x^k x^l (phi) or (x^k)^2 - (x^l)^2 (psi), k != l
struct SphHarm2 {
  enum class Kind { phi, psi };
  Kind kind = Kind::phi;
  int k = 0, l = 1;

  // symmetric K with P(x) = x . K x
  Mat4 matrix() const {
    Mat4 m = Mat4::Zero();
    if (kind == Kind::phi) {
      m(k, l) = m(l, k) = 0.5;
    } else {
      m(k, k) = 1;
      m(l, l) = -1;
    }
    return m;
  }
  double polynomial(const Vec4& x) const { return x.dot(matrix() * x); }
  double operator()(const Vec4& x) const { return polynomial(x) / x.squaredNorm(); }
};

constexpr std::array<int, 4> kRadialPowers{-4, -2, 2, 4};

struct RadialProfile {
  std::array<double, 4> c{};  // coefficients of r^-4, r^-2, r^2, r^4

  // f and its first four derivatives
  std::array<double, 5> derivatives(double r) const {
    std::array<double, 5> d{};
    for (int m = 0; m < 4; ++m) {
      double p = kRadialPowers[m], coef = c[m];
      for (int k = 0; k <= 4; ++k) {
        d[k] += coef * std::pow(r, p - k);
        coef *= (p - k);
      }
    }
    return d;
  }
  double operator()(double r) const { return derivatives(r)[0]; }

  // f(r)/r^2 as a jet at x; in s = r^2 it is sum c_m s^(p_m/2 - 1)
  template <int N>
  Jet<N> over_r2_jet(const Vec4& x) const {
    Jet<N> s = radius_squared<N>(x);
    double s0 = s.value();
    std::array<double, N + 1> g{};
    for (int m = 0; m < 4; ++m) {
      double e = kRadialPowers[m] / 2 - 1, coef = c[m];
      for (int k = 0; k <= N; ++k) {
        g[k] += coef * std::pow(s0, e - k);
        coef *= (e - k);
      }
    }
    return compose(g, s);
  }
};

// T(f) = f'''' + 6/r f''' - 13/r^2 f'' - 19/r^3 f' + 64/r^4 f
inline double radial_bilaplacian(const std::array<double, 5>& f, double r) {
  if (!(r > 0)) throw Error("radial_bilaplacian needs r > 0");
  return f[4] + 6 / r * f[3] - 13 / (r * r) * f[2] - 19 / (r * r * r) * f[1] + 64 / std::pow(r, 4) * f[0];
}
inline double radial_bilaplacian(const RadialProfile& p, double r) {
  if (!(r > 0)) throw Error("radial_bilaplacian needs r > 0");
  return radial_bilaplacian(p.derivatives(r), r);
}

struct AGamma {
  Mat4 matrix;
  double det;
};

inline void check_gamma(double g) {
  if (!(g > 0 && g < 1)) throw Error("gamma must lie in (0,1)");
}

inline AGamma a_gamma(double g) {
  check_gamma(g);
  double g2 = g * g, g6 = std::pow(g, 6), g8 = std::pow(g, 8);
  AGamma A;
  A.matrix << 1, g2, g6, g8, -4, -2 * g2, 2 * g6, 4 * g8, 1, 1, 1, 1, -4, -2, 2, 4;
  A.det = 4 * g2 * std::pow(g - 1, 4) * std::pow(g + 1, 4) * (g2 * g2 + 4 * g2 + 1);
  return A;
}

enum class BoundaryCase { diag_phi, diag_psi, offdiag_phi, offdiag_phi_st, offdiag_psi_st };

inline std::string to_string(BoundaryCase c) {
  switch (c) {
    case BoundaryCase::diag_phi: return "diag-phi";
    case BoundaryCase::diag_psi: return "diag-psi";
    case BoundaryCase::offdiag_phi: return "offdiag-phi";
    case BoundaryCase::offdiag_phi_st: return "offdiag-phi-st";
    case BoundaryCase::offdiag_psi_st: return "offdiag-psi-st";
  }
  return "";
}

// component (i,j) of the metric and the harmonic (alpha,beta) it multiplies
struct ModeIndex {
  int i, j, alpha, beta;
};

using BoundaryVector = Eigen::Vector4d;

// Weyl component that weights the mode, and the -1/3 or -2/3 prefactor
inline std::pair<double, double> mode_weight(BoundaryCase c, const ModeIndex& m, const Rank4& w) {
  auto bad = [] { throw Error("invalid index combination for boundary case"); };
  auto in = [](int v) { return v >= 0 && v < 4; };
  const int i = m.i, j = m.j, al = m.alpha, be = m.beta;
  if (!in(i) || !in(j) || !in(al) || !in(be) || al == be) bad();
  switch (c) {
    case BoundaryCase::diag_phi:
      if (i != j || al == i || be == i) bad();
      return {w(al, i, i, be), -2.0 / 3};
    case BoundaryCase::diag_psi:
      if (i != j || al == i || be == i) bad();
      return {w(al, i, i, al), -1.0 / 3};
    case BoundaryCase::offdiag_phi:
      if (i == j || !((al == j) || (be == i && al != j))) bad();
      return {w(al, i, j, be), -1.0 / 3};
    case BoundaryCase::offdiag_phi_st:
      if (i == j || al == i || al == j || be == i || be == j) bad();
      return {w(al, i, j, be) + w(be, i, j, al), -1.0 / 3};
    case BoundaryCase::offdiag_psi_st:
      if (i == j || al == i || al == j || be == i || be == j) bad();
      return {w(al, i, j, al), -1.0 / 3};
  }
  bad();
  return {};
}

// right-hand side of A_gamma c = a^2 v, with b^2/a^2 = lambda^2
inline BoundaryVector boundary_vector(BoundaryCase c, const ModeIndex& m, const AlgWeyl& wm, const AlgWeyl& wz,
                                      double gamma, double lambda) {
  auto [em, k] = mode_weight(c, m, wm.tensor);
  double ez = mode_weight(c, m, wz.tensor).first;
  double g2 = gamma * gamma, l2 = lambda * lambda;
  return BoundaryVector(k * g2 * em, -2 * k * g2 * em, k * l2 * ez, 2 * k * l2 * ez);
}

// closed-form solution of A_gamma c = v
inline RadialProfile solve_profile(double g, const BoundaryVector& v) {
  check_gamma(g);
  const double v1 = v(0), v2 = v(1), v3 = v(2), v4 = v(3);
  const double g2 = g * g, g4 = g2 * g2, g6 = g4 * g2;
  const double den = 2 * g2 * std::pow(g2 - 1, 3) * (1 + 4 * g2 + g4);
  RadialProfile p;
  p.c[0] = g2 * (2 * v1 * (1 + g2 + 4 * g4) + v2 * (1 + g2 - 2 * g4) -
                 g6 * (2 * v3 * (4 + g2 + g4) + v4 * (-2 + g2 + g4)));
  p.c[1] = -4 * v1 * (1 + g2 + g4 + 3 * g6) + v2 * (g2 - 1) * (1 + 2 * g2 + 3 * g4) +
           g6 * (3 * (4 * v3 - v4) + (4 * v3 + v4) * (g2 + g4 + g6));
  p.c[2] = 4 * v1 * (3 + g2 + g4 + g6) - v2 * (-3 + g2 + g4 + g6) +
           g2 * ((-4 * v3 + v4) * (1 + g2 + g4) - 3 * g6 * (4 * v3 + v4));
  p.c[3] = -2 * v1 * (4 + g2 + g4) + v2 * (-2 + g2 + g4) +
           g2 * (2 * v3 * (1 + g2 + 4 * g4) + v4 * (-1 - g2 + 2 * g4));
  for (double& c : p.c) c /= den;
  return p;
}

// LU solve of the same system; columns scaled by 1, g^2, g^6, g^8 first
inline RadialProfile solve_profile_direct(double g, const BoundaryVector& v) {
  Mat4 A = a_gamma(g).matrix;
  Eigen::Vector4d d(1, g * g, std::pow(g, 6), std::pow(g, 8));
  Mat4 As = A * d.cwiseInverse().asDiagonal();
  Eigen::Vector4d y = As.fullPivLu().solve(v);
  RadialProfile p;
  for (int k = 0; k < 4; ++k) p.c[k] = y(k) / d(k);
  return p;
}

struct SmallGammaExpansion {
  std::array<double, 4> c{};
  std::array<int, 4> remainder_order{10, 6, 6, 6};  // O(gamma^n (1 + lambda^2))
};

// leading terms as gamma -> 0 for data with v2 = -2 v1, v4 = 2 v3
inline SmallGammaExpansion smallgamma_expansion(const BoundaryVector& v, double g) {
  check_gamma(g);
  double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  if (std::abs(v(1) + 2 * v(0)) > 1e-12 * scale || std::abs(v(3) - 2 * v(2)) > 1e-12 * scale)
    throw Error("boundary vector violates v2 = -2 v1, v4 = 2 v3");
  const double v1 = v(0), v3 = v(2);
  const double g2 = g * g, g4 = g2 * g2, g6 = g4 * g2;
  SmallGammaExpansion e;
  e.c[0] = -6 * v1 * g4 + 2 * v3 * g6 + 6 * v1 * g6;
  e.c[1] = v1 / g2 + 9 * v1 * g2 - 3 * v3 * g4;
  e.c[2] = -3 * v1 / g2 + v3 - 27 * v1 * g2 + 9 * v3 * g4;
  e.c[3] = 2 * v1 / g2 + 18 * v1 * g2 - 6 * v3 * g4;
  return e;
}

struct HarmonicMode {
  BoundaryCase kind;
  ModeIndex index;
  SphHarm2 harmonic;
  RadialProfile profile;
};

// wdot_ij = sum over modes f(r) P(x)/r^2
class HarmonicSumField : public JetSource<HarmonicSumField> {
 public:
  HarmonicSumField(std::array<std::array<std::vector<HarmonicMode>, 4>, 4> modes, Domain d)
      : modes_(std::move(modes)), dom_(d) {}
  Domain domain() const override { return dom_; }
  const std::vector<HarmonicMode>& modes(int i, int j) const { return modes_[std::min(i, j)][std::max(i, j)]; }

  template <int N>
  SymJet<N> make(const Vec4& x) const {
    SymJet<N> h;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j)
        for (const auto& m : modes_[i][j])
          h[i][j] += m.profile.template over_r2_jet<N>(x) * quadratic_jet<N>(m.harmonic.matrix(), x);
    symmetrize_upper(h);
    return h;
  }

 private:
  std::array<std::array<std::vector<HarmonicMode>, 4>, 4> modes_;
  Domain dom_;
};

// wdot_ij = rho_M(r) W^M_kijl x^k x^l / r^2 + rho_Z(r) W^Z_kijl x^k x^l / r^2
class CollapsedField : public JetSource<CollapsedField> {
 public:
  CollapsedField(const Rank4& wm, const Rank4& wz, RadialProfile pm, RadialProfile pz, Domain d)
      : qm_(wm), qz_(wz), pm_(pm), pz_(pz), dom_(d) {}
  Domain domain() const override { return dom_; }

  template <int N>
  SymJet<N> make(const Vec4& x) const {
    Jet<N> rm = pm_.over_r2_jet<N>(x), rz = pz_.over_r2_jet<N>(x);
    SymJet<N> qm = qm_.jet<N>(x), qz = qz_.jet<N>(x), h;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) h[i][j] = rm * qm[i][j] + rz * qz[i][j];
    symmetrize_upper(h);
    return h;
  }

 private:
  WeylQuadratic qm_, qz_;
  RadialProfile pm_, pz_;
  Domain dom_;
};

struct InterpSolution {
  AlgWeyl wm, wz;
  GluingParams params;
  std::shared_ptr<const HarmonicSumField> harmonic;   // audit path
  std::shared_ptr<const CollapsedField> collapsed;    // production path
  RadialProfile profile_m, profile_z;                 // the collapsed coefficients C^M, C^Z
  std::shared_ptr<const PerturbedChart> metric;       // w = delta + a^2 wdot

  const SymField& wdot() const { return *collapsed; }
  Domain domain() const { return Domain::annulus(params.gamma, 1.0); }
};

// every (case, index) pair used for component (i,j), i <= j
inline std::vector<std::pair<BoundaryCase, ModeIndex>> mode_table(int i, int j) {
  std::vector<std::pair<BoundaryCase, ModeIndex>> out;
  std::vector<int> rest;
  for (int k = 0; k < 4; ++k)
    if (k != i && k != j) rest.push_back(k);
  if (i == j) {
    int s = rest[0], t = rest[1], u = rest[2];
    for (auto [al, be] : {std::pair{s, t}, {s, u}, {t, u}}) out.push_back({BoundaryCase::diag_phi, {i, i, al, be}});
    out.push_back({BoundaryCase::diag_psi, {i, i, s, u}});
    out.push_back({BoundaryCase::diag_psi, {i, i, t, u}});
  } else {
    int s = rest[0], t = rest[1];
    for (auto [al, be] : {std::pair{j, i}, {j, s}, {j, t}, {s, i}, {t, i}})
      out.push_back({BoundaryCase::offdiag_phi, {i, j, al, be}});
    out.push_back({BoundaryCase::offdiag_phi_st, {i, j, s, t}});
    out.push_back({BoundaryCase::offdiag_psi_st, {i, j, s, t}});
  }
  return out;
}

inline SphHarm2 harmonic_of(BoundaryCase c, const ModeIndex& m) {
  bool psi = c == BoundaryCase::diag_psi || c == BoundaryCase::offdiag_psi_st;
  return {psi ? SphHarm2::Kind::psi : SphHarm2::Kind::phi, m.alpha, m.beta};
}

// wm, wz must already be expressed in the shared aligned frame
inline InterpSolution assemble_interpolant(const AlgWeyl& wm, const AlgWeyl& wz, const GluingParams& p) {
  p.validate();
  InterpSolution s{wm, wz, p, nullptr, nullptr, {}, {}, nullptr};
  const double g = p.gamma, l = p.lambda;
  std::array<std::array<std::vector<HarmonicMode>, 4>, 4> modes;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j)
      for (auto [c, m] : mode_table(i, j)) {
        BoundaryVector v = boundary_vector(c, m, wm, wz, g, l);
        modes[i][j].push_back({c, m, harmonic_of(c, m), solve_profile(g, v)});
      }
  Domain d = s.domain();
  s.harmonic = std::make_shared<HarmonicSumField>(std::move(modes), d);
  s.profile_m = solve_profile(g, BoundaryVector(-g * g / 3, 2 * g * g / 3, 0, 0));
  s.profile_z = solve_profile(g, BoundaryVector(0, 0, -l * l / 3, -2 * l * l / 3));
  s.collapsed = std::make_shared<CollapsedField>(wm.tensor, wz.tensor, s.profile_m, s.profile_z, d);
  s.metric = std::make_shared<PerturbedChart>(std::make_shared<FlatChart>(), s.collapsed, p.a * p.a,
                                              ChartKind::glued, d);
  return s;
}

// trace and divergence of wdot at x
inline std::pair<double, Vec4> tt_residual(const InterpSolution& s, const Vec4& x) {
  s.collapsed->require(x);
  return tt_defect(s.collapsed->jet2(x));
}

}  // namespace weylglue

#endif
