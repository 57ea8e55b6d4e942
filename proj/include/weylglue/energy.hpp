#ifndef WEYLGLUE_ENERGY_HPP
#define WEYLGLUE_ENERGY_HPP

// Weyl energies: direct quadrature of |W|^2 dV, the boundary form of the
// second variation at the flat metric, the inner and outer functionals of
// the interpolant, and the balance assembled from them.
//
// Boundary integrals use the five families
//   T1 = -1/2 h_ij d_a(Lap h_ij) nu^a
//   T2 =      d_ij h_ab   d_b h_ij nu^a
//   T3 = -2   d_bj h_ia   d_b h_ij nu^a
//   T4 =      d_ab h_ij   d_b h_ij nu^a
//   T5 = -1/2 Lap h_ij    d_a h_ij nu^a
// (summed over i, j, a, b) with nu the outward normal of the region.

#include <Eigen/SVD>
#include <limits>
#include <numbers>

#include "curvature.hpp"
#include "duality.hpp"
#include "gluing.hpp"
#include "quadrature.hpp"

namespace weylglue {

struct Region {
  enum class Kind { ball, annulus, exterior };
  Kind kind = Kind::ball;
  double r0 = 0, r1 = 1;

  static Region ball(double r) { return {Kind::ball, 0, r}; }
  static Region annulus(double r0, double r1) { return {Kind::annulus, r0, r1}; }
  static Region exterior(double r0) { return {Kind::exterior, r0, std::numeric_limits<double>::infinity()}; }

  bool bounded() const { return kind != Kind::exterior; }
  void validate() const {
    bool ok = kind == Kind::ball ? r1 > 0 : kind == Kind::annulus ? (r0 > 0 && r1 > r0) : r0 > 0;
    if (!ok) throw Error("invalid integration region");
  }
};

struct EnergyRule {
  int sphere_level = 12;
  int radial_nodes = 24;
};

inline Rule1D radial_rule(const Region& g, int n) {
  g.validate();
  if (!g.bounded()) throw Error("radial rule needs a bounded region");
  if (g.kind == Region::Kind::annulus && g.r1 / g.r0 > 4) return log_radial(n, g.r0, g.r1);
  return gauss_legendre(n, g.r0, g.r1);
}

// int_region f(x) dx, evaluated node-parallel and summed in node order
template <class F>
double integrate_region(const Region& g, const EnergyRule& rule, F&& f) {
  SphereRule S = SphereRule::make(rule.sphere_level);
  Rule1D R = radial_rule(g, rule.radial_nodes);
  std::size_t ns = S.size();
  auto vals = parallel_map<double>(R.x.size() * ns, [&](std::size_t n) {
    std::size_t k = n / ns, s = n % ns;
    double r = R.x[k];
    return R.w[k] * r * r * r * S.w[s] * f(Vec4(r * S.z[s]));
  });
  return pairwise_sum(vals);
}

// ---- direct energy ----------------------------------------------------------

inline double weyl_density(const SymField& chart, const Vec4& x) {
  LocalGeometry G = local_geometry(chart, x);
  return weyl_norm2(weyl_of(G), G.ginv) * std::sqrt(G.detg);
}

inline double weyl_energy_numeric(const SymField& chart, const Region& g, const EnergyRule& rule = {}) {
  if (!g.bounded()) throw Error("numeric energy needs a bounded region");
  return integrate_region(g, rule, [&](const Vec4& x) { return weyl_density(chart, x); });
}

// ---- second variation in boundary form ---------------------------------------

inline constexpr std::array<const char*, 5> kBoundaryFamilies{
    "h_dlap_h", "d2ij_hab_db_hij", "d2bj_hia_db_hij", "d2ab_hij_db_hij", "lap_hij_da_hij"};

struct BoundaryFunctional {
  double value = 0;
  double bulk = 0;                   // 1/2 int (Lap^2 h_ij) h_ij
  std::array<double, 5> families{};  // T1..T5 summed over all boundary spheres
  bool bulk_evaluated = false;
  double biharmonic_form = std::numeric_limits<double>::quiet_NaN();  // 1/2 int (Lap h)^2 + T2+T3+T4+2 T5
  double tt_defect = 0;              // worst trace/divergence at boundary nodes, relative
};

struct FamilyDensity {
  std::array<double, 5> t{};
  double tt = 0;
};

inline FamilyDensity family_density(const SymJet<3>& j, const Vec4& nu, double r) {
  double v[4][4], d1[4][4][4], d2[4][4][4][4], dl[4][4][4];
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      const auto& h = j[i][k];
      v[i][k] = h.value();
      for (int a = 0; a < 4; ++a) {
        d1[i][k][a] = h.d(a);
        double s = 0;
        for (int b = 0; b < 4; ++b) {
          d2[i][k][a][b] = h.d(a, b);
          s += h.d(a, b, b);
        }
        dl[i][k][a] = s;
      }
    }
  FamilyDensity out;
  auto& t = out.t;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k)
      for (int a = 0; a < 4; ++a) {
        if (nu[a] == 0) continue;
        double lap = 0;
        for (int b = 0; b < 4; ++b) lap += d2[i][k][b][b];
        t[0] += -0.5 * v[i][k] * dl[i][k][a] * nu[a];
        t[4] += -0.5 * lap * d1[i][k][a] * nu[a];
        for (int b = 0; b < 4; ++b) {
          double db = d1[i][k][b] * nu[a];
          t[1] += d2[a][b][i][k] * db;
          t[2] += -2 * d2[i][a][b][k] * db;
          t[3] += d2[i][k][a][b] * db;
        }
      }
  double scale = 0, tr = 0, div = 0;
  for (int i = 0; i < 4; ++i) {
    tr += v[i][i];
    double dv = 0;
    for (int k = 0; k < 4; ++k) {
      dv += d1[k][i][k];
      scale = std::max(scale, std::abs(v[i][k]) / r);
      for (int a = 0; a < 4; ++a) scale = std::max(scale, std::abs(d1[i][k][a]));
    }
    div = std::max(div, std::abs(dv));
  }
  out.tt = scale > 0 ? std::max(std::abs(tr) / r, div) / scale : 0.0;
  return out;
}

// families on the sphere |x| = r with nu = orient * x/|x|
inline FamilyDensity sphere_families(const SymField& h, double r, double orient, const SphereRule& S) {
  auto dens = parallel_map<FamilyDensity>(S.size(), [&](std::size_t s) {
    Vec4 x = r * S.z[s];
    h.require(x);
    return family_density(h.jet3(x), orient * S.z[s], r);
  });
  FamilyDensity out;
  std::vector<double> col(S.size());
  for (int f = 0; f < 5; ++f) {
    for (std::size_t s = 0; s < S.size(); ++s) col[s] = S.w[s] * dens[s].t[f];
    out.t[f] = r * r * r * pairwise_sum(col);
  }
  for (const auto& d : dens) out.tt = std::max(out.tt, d.tt);
  return out;
}

inline double family_sum(const std::array<double, 5>& t) { return t[0] + t[1] + t[2] + t[3] + t[4]; }

// TT fields only; the tolerance is relative to the local size of h and dh
inline BoundaryFunctional second_variation_boundary(const SymField& h, const Region& g, const EnergyRule& rule = {},
                                                    double tt_tol = 1e-8) {
  g.validate();
  SphereRule S = SphereRule::make(rule.sphere_level);
  BoundaryFunctional B;
  auto add = [&](double r, double orient) {
    FamilyDensity d = sphere_families(h, r, orient, S);
    for (int f = 0; f < 5; ++f) B.families[f] += d.t[f];
    B.tt_defect = std::max(B.tt_defect, d.tt);
  };
  if (g.kind != Region::Kind::exterior) add(g.r1, 1.0);
  if (g.kind != Region::Kind::ball) add(g.r0, -1.0);
  if (B.tt_defect > tt_tol) throw Error("TT violation");

  if (g.bounded()) {
    auto pair = [&](const Vec4& x) {
      auto j = h.jet4(x);
      double bilap = 0, lap2 = 0;
      for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
          double b2 = 0, l = 0;
          for (int a = 0; a < 4; ++a) {
            l += j[i][k].d(a, a);
            for (int b = 0; b < 4; ++b) b2 += j[i][k].d(a, a, b, b);
          }
          bilap += b2 * j[i][k].value();
          lap2 += l * l;
        }
      return std::array<double, 2>{bilap, lap2};
    };
    // two passes keep each sum in plain node order
    B.bulk = 0.5 * integrate_region(g, rule, [&](const Vec4& x) { return pair(x)[0]; });
    double lap2 = 0.5 * integrate_region(g, rule, [&](const Vec4& x) { return pair(x)[1]; });
    B.bulk_evaluated = true;
    const auto& t = B.families;
    B.biharmonic_form = lap2 + t[1] + t[2] + t[3] + 2 * t[4];
  }
  B.value = B.bulk + family_sum(B.families);
  return B;
}

// ---- inner and outer functionals of the interpolant ---------------------------

// Phi_gamma: on |x| = gamma, with the interpolation annulus' own outer normal -x/|x|.
// Written with nu = x/|x| this is +1/2 h d(Lap h) nu - [...] nu, so the two
// readings agree.
inline double phi_inner(const InterpSolution& s, const EnergyRule& rule = {}) {
  return family_sum(sphere_families(s.wdot(), s.params.gamma, -1.0, SphereRule::make(rule.sphere_level)).t);
}

// Phi_1: on |x| = 1 with nu = x
inline double phi_outer(const InterpSolution& s, const EnergyRule& rule = {}) {
  return family_sum(sphere_families(s.wdot(), 1.0, 1.0, SphereRule::make(rule.sphere_level)).t);
}

// a^-4 times the energy of g_a outside B_gamma, at leading order (nu points to the origin)
inline double f_expression(const AlgWeyl& wm, double gamma, const EnergyRule& rule = {}) {
  return family_sum(sphere_families(ModelF(wm), gamma, -1.0, SphereRule::make(rule.sphere_level)).t);
}

// b^-4 times the energy of g_b in B_1, at leading order
inline double h_expression(const AlgWeyl& wz, const EnergyRule& rule = {}) {
  return family_sum(sphere_families(ModelH(wz), 1.0, 1.0, SphereRule::make(rule.sphere_level)).t);
}

// ---- interaction coefficient -------------------------------------------------

inline double interaction_coefficient_prediction(double star) {
  return -2.0 / 9 * std::numbers::pi * std::numbers::pi * star;
}

// least squares of y against {1, lambda^2, lambda^4}
struct EvenQuarticFit {
  std::array<double, 3> coef{};
  double residual = 0;   // max |fit - y| / max |y|
  double condition = 0;  // of the column-scaled design
};

inline EvenQuarticFit fit_even_quartic(const std::vector<double>& lam, const std::vector<double>& y) {
  if (lam.size() != y.size() || lam.size() < 3) throw Error("fit needs at least three points");
  Eigen::MatrixXd A(lam.size(), 3);
  Eigen::VectorXd b(lam.size());
  for (std::size_t k = 0; k < lam.size(); ++k) {
    double l2 = lam[k] * lam[k];
    A.row(k) << 1, l2, l2 * l2;
    b[k] = y[k];
  }
  Eigen::Vector3d colscale = A.colwise().norm().transpose();
  if ((colscale.array() == 0).any()) throw Error("ill-conditioned fit");
  Eigen::MatrixXd As = A * colscale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(As, Eigen::ComputeThinU | Eigen::ComputeThinV);
  auto sv = svd.singularValues();
  EvenQuarticFit f;
  f.condition = sv[0] / sv[sv.size() - 1];
  if (!(f.condition < 1e8)) throw Error("ill-conditioned fit");
  Eigen::Vector3d c = svd.solve(b).cwiseQuotient(colscale);
  for (int k = 0; k < 3; ++k) f.coef[k] = c[k];
  double ymax = b.cwiseAbs().maxCoeff();
  f.residual = ymax > 0 ? (A * c - b).cwiseAbs().maxCoeff() / ymax : 0.0;
  return f;
}

// {2,4,6,8,10} shrunk so that the top point keeps gamma <= 1/(10 lambda)
inline std::vector<double> default_lambda_grid(double gamma) {
  double s = std::min(1.0, 1 / (100 * gamma));
  return {2 * s, 4 * s, 6 * s, 8 * s, 10 * s};
}

struct InteractionFit {
  double gamma = 0;
  std::vector<double> lambdas;
  EvenQuarticFit inner, outer;
  double coeff_inner = 0, coeff_outer = 0;  // the lambda^2 coefficients
  double star = 0;                          // W^M * W^Z in the given frames
  double predicted = 0;                     // -(2/9) pi^2 star
};

// wm, wz already in the shared frame
inline InteractionFit extract_interaction_coefficient(const AlgWeyl& wm, const AlgWeyl& wz, double gamma,
                                                      std::vector<double> lambdas = {}, const EnergyRule& rule = {}) {
  check_gamma(gamma);
  if (lambdas.empty()) lambdas = default_lambda_grid(gamma);
  InteractionFit r;
  r.gamma = gamma;
  r.lambdas = lambdas;
  std::vector<double> pin, pout;
  for (double l : lambdas) {
    if (!(l > 0)) throw Error("invalid parameters: need lambda > 0");
    InterpSolution s = assemble_interpolant(wm, wz, {gamma * gamma / 100, gamma, l});
    pin.push_back(phi_inner(s, rule));
    pout.push_back(phi_outer(s, rule));
  }
  r.inner = fit_even_quartic(lambdas, pin);
  r.outer = fit_even_quartic(lambdas, pout);
  r.coeff_inner = r.inner.coef[1];
  r.coeff_outer = r.outer.coef[1];
  r.star = interaction_star(wm, wz);
  r.predicted = interaction_coefficient_prediction(r.star);
  return r;
}

// ---- rough bound ---------------------------------------------------------------

// Pointwise, with Euclidean Frobenius norms and G = |g|_2, Gi = |g^-1|_2:
//   |Riem|_F <= 2 |d2 g| + 4.5 Gi |dg|^2      (Christoffels lowered: |Gamma| <= 1.5 |dg|)
//   |W|_g^2 <= |Riem|_g^2 <= Gi^4 |Riem|_F^2,  sqrt(det g) <= G^2
// so |W|^2 dV <= C (|dg^-1|^2 |dg|^2 + |dg|^4 + |d2 g|^2) with
//   C = 2 G^2 Gi^4 max(4, 20.25 Gi^2).
struct RoughDensity {
  double value = 0, constant = 0;
};

inline RoughDensity rough_density(const SymJet<2>& jet) {
  Partials2 p = partials(jet);
  Eigen::SelfAdjointEigenSolver<Sym2> es(p.v, Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues()[0], hi = es.eigenvalues()[3];
  if (!(lo > 0)) throw Error("degenerate metric");
  double G = hi, Gi = 1 / lo;
  Sym2 gi = p.v.inverse();
  double dg2 = 0, dgi2 = 0, ddg2 = 0;
  for (int a = 0; a < 4; ++a) {
    dg2 += p.d[a].squaredNorm();
    dgi2 += (gi * p.d[a] * gi).squaredNorm();
    for (int b = 0; b < 4; ++b) ddg2 += p.dd[a][b].squaredNorm();
  }
  RoughDensity r;
  r.constant = 2 * G * G * std::pow(Gi, 4) * std::max(4.0, 20.25 * Gi * Gi);
  r.value = r.constant * (dgi2 * dg2 + dg2 * dg2 + ddg2);
  return r;
}

struct RoughBound {
  double value = 0;
  double max_constant = 0;  // the realized C, largest over the nodes
};

inline RoughBound rough_energy_bound(const SymField& chart, const Region& g, const EnergyRule& rule = {}) {
  if (!g.bounded()) throw Error("rough bound needs a bounded region");
  SphereRule S = SphereRule::make(rule.sphere_level);
  Rule1D R = radial_rule(g, rule.radial_nodes);
  std::size_t ns = S.size();
  auto dens = parallel_map<RoughDensity>(R.x.size() * ns, [&](std::size_t n) {
    Vec4 x = R.x[n / ns] * S.z[n % ns];
    chart.require(x);
    return rough_density(chart.jet2(x));
  });
  std::vector<double> v(dens.size());
  RoughBound b;
  for (std::size_t n = 0; n < dens.size(); ++n) {
    double r = R.x[n / ns];
    v[n] = R.w[n / ns] * r * r * r * S.w[n % ns] * dens[n].value;
    b.max_constant = std::max(b.max_constant, dens[n].constant);
  }
  b.value = pairwise_sum(v);
  return b;
}

// ---- balance -------------------------------------------------------------------

struct EnergyBalance {
  GluingParams params;
  double phi_inner = 0, phi_outer = 0;
  double f_expression = 0, h_expression = 0;
  double leading_bracket = 0;   // Phi_gamma + Phi_1 - F-expression - lambda^4 H-expression
  double constant_C = 0;        // the same bracket with W^Z = 0
  double interaction = 0;       // W^M * W^Z
  double interaction_term = 0;  // -(4/9) pi^2 lambda^2 W^M * W^Z
  double remainder = 0;         // bracket - C - interaction_term
  double remainder_scaled = 0;  // remainder / (lambda^2 gamma^2)
  std::string error_model = "truncated";
  double error_region = 0;      // a^-4 times the rough bound on the two cutoff shells
  bool sign_conclusive = false;
  std::vector<std::string> warnings;

  double leading_total() const { return std::pow(params.a, 4) * leading_bracket; }
  double total() const { return std::pow(params.a, 4) * (leading_bracket + error_region); }
};

struct BalanceOptions {
  EnergyRule rule{};
  ErrorModel error = ErrorModel::truncated();
};

namespace detail {
struct BracketParts {
  double pin, pout, f, h, bracket;
};
inline BracketParts bracket_parts(const AlgWeyl& wm, const AlgWeyl& wz, const GluingParams& p,
                                  const EnergyRule& rule) {
  InterpSolution s = assemble_interpolant(wm, wz, p);
  BracketParts b{phi_inner(s, rule), phi_outer(s, rule), f_expression(wm, p.gamma, rule), h_expression(wz, rule), 0};
  b.bracket = b.pin + b.pout - b.f - std::pow(p.lambda, 4) * b.h;
  return b;
}
}  // namespace detail

// wm, wz already in the shared frame
inline EnergyBalance energy_balance(const AlgWeyl& wm, const AlgWeyl& wz, const GluingParams& p,
                                    const BalanceOptions& opt = {}) {
  p.validate();
  EnergyBalance e;
  e.params = p;
  e.warnings = p.warnings();
  auto full = detail::bracket_parts(wm, wz, p, opt.rule);
  e.phi_inner = full.pin;
  e.phi_outer = full.pout;
  e.f_expression = full.f;
  e.h_expression = full.h;
  e.leading_bracket = full.bracket;
  AlgWeyl zero{Rank4{}, std::nullopt};
  e.constant_C = detail::bracket_parts(wm, zero, p, opt.rule).bracket;
  e.interaction = interaction_star(wm, wz);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  e.interaction_term = -4.0 / 9 * pi2 * p.lambda * p.lambda * e.interaction;
  e.remainder = e.leading_bracket - e.constant_C - e.interaction_term;
  e.remainder_scaled = e.remainder / (p.lambda * p.lambda * p.gamma * p.gamma);

  PositivityReport pos = positivity_bound(wm, wz);
  if (pos.excluded) e.interaction = e.interaction_term = 0;  // snapped like the aligned value
  e.sign_conclusive = pos.hypotheses_hold() && e.interaction > 0;
  if (!pos.hypotheses_hold())
    e.warnings.push_back(pos.lcf() ? "conformally flat input: no sign conclusion"
                                   : "self-dual against anti-self-dual: interaction vanishes, no sign conclusion");

  if (opt.error.kind == ErrorModel::Kind::synthetic) {
    e.error_model = "synthetic";
    InterpSolution s = assemble_interpolant(wm, wz, p);
    GluedChart glued(wm, wz, p, s, opt.error);
    double w = std::sqrt(p.a);
    EnergyRule shell{opt.rule.sphere_level, 8};
    double inner = rough_energy_bound(glued, Region::annulus(std::max(p.gamma - w, p.a), p.gamma), shell).value;
    double outer = rough_energy_bound(glued, Region::annulus(1.0, std::min(1 + w, 2.0)), shell).value;
    e.error_region = (inner + outer) / std::pow(p.a, 4);
  }
  return e;
}

struct ParameterChoice {
  GluingParams params;
  EnergyBalance balance;
  AlignedPair pair;
  double constant_C0 = 0;  // constant from the W^Z = 0 run used to pick lambda
  int gamma_halvings = 0;
};

// Picks lambda from the leading two terms, then halves gamma until the
// measured bracket clears -margin, then sets a = gamma^2 / 100.
inline ParameterChoice choose_parameters(const AlgWeyl& wm, const AlgWeyl& wz, double margin,
                                         const BalanceOptions& opt = {}) {
  if (!(margin > 0)) throw Error("margin must be positive");
  PositivityReport pos = positivity_bound(wm, wz);
  if (!pos.hypotheses_hold())
    throw Error(std::string("hypotheses of the gluing theorem violated: ") +
                (pos.lcf() ? "conformally flat input" : "one input self-dual, the other anti-self-dual"));
  ParameterChoice c;
  c.pair = align_and_interact(wm, wz).pair;
  const AlgWeyl& m = c.pair.wm;
  const AlgWeyl& z = c.pair.wz;
  double star = interaction_star(m, z);
  const double pi2 = std::numbers::pi * std::numbers::pi;

  const double g0 = 0.02;
  c.constant_C0 = detail::bracket_parts(m, AlgWeyl{Rank4{}, std::nullopt}, {g0 * g0 / 100, g0, 1.0}, opt.rule).bracket;
  double need = std::max(c.constant_C0 + 2 * margin, 0.0);
  double lambda = std::max(1.1 * std::sqrt(need / (4.0 / 9 * pi2 * star)), 1.0);

  double gamma = std::min(0.1, 1 / (10 * lambda));
  for (int k = 0; k < 24; ++k, gamma /= 2) {
    GluingParams p{gamma * gamma / 100, gamma, lambda};
    EnergyBalance b = energy_balance(m, z, p, opt);
    if (b.leading_bracket < -margin) {
      c.params = p;
      c.balance = std::move(b);
      c.gamma_halvings = k;
      return c;
    }
  }
  throw Error("could not reach the requested margin");
}

}  // namespace weylglue

#endif
