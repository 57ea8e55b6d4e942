// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <cstdio>
#include <functional>
#include <string>

#include "support/charts.hpp"
#include "support/fd_oracle.hpp"
#include "weylglue/energy.hpp"

using namespace weylglue;
using namespace testsupport;

namespace {

const double kPi2 = std::numbers::pi * std::numbers::pi;

AlgWeyl standard() { return algweyl_from_spectrum({1, 0, -1}, {1, 0, -1}); }

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double n = x.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    double u = std::log(x[k]), v = std::log(std::abs(y[k]));
    sx += u, sy += v, sxx += u * u, sxy += u * v;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

template <int N>
double jet_scale(const SymJet<N>& h, int order) {
  const auto& t = JetTable<N>::get();
  double m = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int q = 0; q < t.size; ++q)
        if (t.degree[q] <= order) m = std::max(m, std::abs(h[i][j].derivative(t.exps[q])));
  return m;
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... v) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

// ---- 1 ---------------------------------------------------------------------------
Outcome sphere_moments() {
  SphereRule s = SphereRule::make(16);
  std::vector<double> w(s.w.begin(), s.w.end());
  double vol = std::abs(pairwise_sum(w) - 2 * kPi2);
  double worst = 0;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          std::vector<double> v(s.size());
          for (std::size_t q = 0; q < s.size(); ++q) v[q] = s.w[q] * s.z[q][m] * s.z[q][n] * s.z[q][k] * s.z[q][l];
          auto d = [](int a, int b) { return a == b ? 1.0 : 0.0; };
          double oracle = kPi2 / 12 * (d(m, n) * d(k, l) + d(m, k) * d(n, l) + d(m, l) * d(n, k));
          worst = std::max(worst, std::abs(pairwise_sum(v) - oracle));
        }
  return {worst <= 1e-10 && vol <= 1e-12, fmt("max moment error %.2e, volume error %.2e", worst, vol)};
}

// ---- 2 ---------------------------------------------------------------------------
Outcome linearization() {
  Rng rng(1002);
  double worst = 0;
  for (int n = 0; n < 20; ++n) {
    auto g = random_metric(rng, 0.1);
    auto h = std::make_shared<PolynomialField>(random_poly(rng, 1.0));
    Vec4 x = 0.5 * rng.unit();
    Linearization L = linearize_curvature(*g, *h, x);
    using V = Eigen::Matrix<double, Eigen::Dynamic, 1>;
    auto pack = [&](double t) -> V {
      LocalGeometry G = local_geometry(PerturbedChart(std::shared_ptr<const SymField>(g), h, t), x);
      V v(16 + 64 + 256 * 3 + 16 + 1);
      int p = 0;
      for (int k = 0; k < 16; ++k) v(p++) = G.ginv.data()[k];
      for (double c : G.gamma.c) v(p++) = c;
      for (int k = 0; k < 256; ++k) v(p++) = G.r13.c[k];
      for (int k = 0; k < 256; ++k) v(p++) = G.riem.c[k];
      Rank4 w = weyl_of(G);
      for (int k = 0; k < 256; ++k) v(p++) = w.c[k];
      for (int k = 0; k < 16; ++k) v(p++) = G.ric.data()[k];
      v(p++) = G.scal;
      return v;
    };
    V d = fd_t(pack, 1e-3);
    int p = 0;
    auto cmp = [&](double a) {
      worst = std::max(worst, std::abs(a - d(p)) / (1 + std::abs(d(p))));
      ++p;
    };
    for (int k = 0; k < 16; ++k) cmp(L.inv_dot.data()[k]);
    for (double c : L.gamma_dot.c) cmp(c);
    for (int k = 0; k < 256; ++k) cmp(L.riem13_dot.c[k]);
    for (int k = 0; k < 256; ++k) cmp(L.riem04_dot.c[k]);
    for (int k = 0; k < 256; ++k) cmp(L.weyl_dot.c[k]);
    for (int k = 0; k < 16; ++k) cmp(L.ric_dot.data()[k]);
    cmp(L.scal_dot);
  }
  return {worst <= 1e-6, fmt("max relative deviation %.2e over 20 charts", worst)};
}

// ---- 3 ---------------------------------------------------------------------------
Outcome biharmonic() {
  Rng rng(1003);
  double solve = 0, bc = 0, bilap = 0;
  for (double g : {0.3, 0.1, 0.02}) {
    for (int n = 0; n < 50; ++n) {
      AlignedPair pair = align_and_interact(rng.weyl(), rng.weyl()).pair;
      InterpSolution s = assemble_interpolant(pair.wm, pair.wz, {g * g / 100, g, 4.0});
      // the profile system itself, against Eigen's LU
      BoundaryVector v(rng.normal(), rng.normal(), rng.normal(), rng.normal());
      RadialProfile c = solve_profile(g, v);
      Eigen::Vector4d direct = a_gamma(g).matrix.fullPivLu().solve(v);
      double m = 0, sc = 0;
      for (int k = 0; k < 4; ++k) m = std::max(m, std::abs(c.c[k] - direct(k))), sc = std::max(sc, std::abs(direct(k)));
      solve = std::max(solve, m / sc);
      // matching to the two models on both spheres
      WeylQuadratic qm(s.wm.tensor), qz(s.wz.tensor);
      double l2 = s.params.lambda * s.params.lambda;
      for (double r : {g, 1.0}) {
        Vec4 x = r * rng.unit();
        SymJet<2> j = s.collapsed->jet2(x);
        Sym2 val = r == g ? Sym2(-qm.value(x) / (3 * std::pow(r, 4))) : Sym2(-l2 * qz.value(x) / 3);
        Sym2 dr = r == g ? Sym2(2 * qm.value(x) / (3 * std::pow(r, 5))) : Sym2(-2 * l2 * qz.value(x) / 3);
        double scale = std::max(val.cwiseAbs().maxCoeff(), r * dr.cwiseAbs().maxCoeff());
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) {
            double d = 0;
            for (int q = 0; q < 4; ++q) d += j[a][b].d(q) * x(q) / r;
            bc = std::max({bc, std::abs(j[a][b].value() - val(a, b)) / scale, std::abs(r * (d - dr(a, b))) / scale});
          }
      }
      if (n < 34) {  // 100 interior points per gamma
        for (int k = 0; k < (n < 32 ? 3 : 2); ++k) {
          Vec4 x = rng.shell(g, 1.0);
          SymJet<4> h = s.collapsed->jet4(x);
          double s4 = jet_scale(h, 4);
          for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
              double t = 0;
              for (int p = 0; p < 4; ++p)
                for (int q = 0; q < 4; ++q) t += h[a][b].d(p, p, q, q);
              bilap = std::max(bilap, std::abs(t) / s4);
            }
        }
      }
    }
  }
  // small-gamma expansion: residual orders 6 for c2..c4 and 10 for c1
  const double kappa = -1.0 / 3, v3 = 0.7;
  auto v_at = [&](double g) { return BoundaryVector(kappa * g * g, -2 * kappa * g * g, v3, 2 * v3); };
  auto resid = [&](double g, int k) {
    return std::abs(solve_profile(g, v_at(g)).c[k] - smallgamma_expansion(v_at(g), g).c[k]);
  };
  double order_dev = std::abs(std::log2(resid(0.1, 0) / resid(0.05, 0)) - 10);
  for (int k = 1; k < 4; ++k) order_dev = std::max(order_dev, std::abs(std::log2(resid(0.02, k) / resid(0.01, k)) - 6));
  bool ok = solve <= 1e-11 && bc <= 1e-10 && bilap <= 1e-9 && order_dev <= 0.3;
  return {ok, fmt("solve %.2e, boundary %.2e, bilaplacian %.2e, order deviation %.2f", solve, bc, bilap, order_dev)};
}

// ---- 4 ---------------------------------------------------------------------------
Outcome transverse_traceless() {
  Rng rng(1004);
  double tt = 0, rep = 0;
  for (int n = 0; n < 50; ++n) {
    double g = std::array{0.3, 0.1, 0.02}[n % 3];
    AlignedPair pair = align_and_interact(rng.weyl(), rng.weyl()).pair;
    InterpSolution s = assemble_interpolant(pair.wm, pair.wz, {g * g / 100, g, 4.0});
    for (int k = 0; k < 100; ++k) {
      Vec4 x = rng.shell(g, 1.0);
      SymJet<2> h = s.collapsed->jet2(x), hh = s.harmonic->jet2(x);
      double s0 = jet_scale(h, 0), s1 = jet_scale(h, 1);
      auto [tr, div] = tt_residual(s, x);
      tt = std::max({tt, std::abs(tr) / s0, div.cwiseAbs().maxCoeff() / s1});
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          rep = std::max(rep, std::abs(h[a][b].value() - hh[a][b].value()) / s0);
          for (int m = 0; m < 4; ++m) rep = std::max(rep, std::abs(h[a][b].d(m) - hh[a][b].d(m)) / s1);
        }
    }
  }
  return {tt <= 1e-10 && rep <= 1e-12, fmt("trace/divergence %.2e, representations %.2e", tt, rep)};
}

// ---- 5 ---------------------------------------------------------------------------
Outcome second_variation() {
  AlgWeyl w = standard();
  auto b = second_variation_boundary(ModelH(w), Region::ball(1));
  std::vector<double> ts{1e-2, 5e-3, 2e-3, 1e-3}, diffs;
  for (double t : ts) {
    PerturbedChart c(std::make_shared<FlatChart>(), std::make_shared<ModelH>(w), t);
    diffs.push_back(weyl_energy_numeric(c, Region::ball(1)) - t * t * b.value);
  }
  double sl = slope(ts, diffs);
  double forms = std::abs(b.value - b.biharmonic_form) / std::abs(b.value);
  // and on an interpolation annulus, where the bilaplacian bulk is not trivially zero
  Rng rng(1005);
  AlignedPair pair = align_and_interact(rng.weyl(), rng.weyl()).pair;
  InterpSolution s = assemble_interpolant(pair.wm, pair.wz, {9e-4, 0.3, 1.5});
  auto ba = second_variation_boundary(s.wdot(), Region::annulus(0.3, 1), {12, 48});
  forms = std::max(forms, std::abs(ba.value - ba.biharmonic_form) / (std::abs(phi_inner(s)) + std::abs(phi_outer(s))));
  return {sl >= 2.7 && forms <= 1e-10, fmt("truncation slope %.2f, form disagreement %.2e", sl, forms)};
}

// ---- 6 ---------------------------------------------------------------------------
Outcome interaction() {
  Rng rng(1006);
  double ident = 0, viol = 0;
  for (int n = 0; n < 1000; ++n) {
    auto sm = rng.triple(), am = rng.triple(), sz = rng.triple(), az = rng.triple();
    AlgWeyl m = algweyl_from_spectrum(sm, am, rng.rotation()), z = algweyl_from_spectrum(sz, az, rng.rotation());
    AlignResult r = align_and_interact(m, z);
    // oracle from sorted eigenvalues alone
    for (auto* t : {&sm, &am, &sz, &az}) std::sort(t->begin(), t->end());
    double six = 6 * (sm[0] * sz[0] + sm[1] * sz[1] + sm[2] * sz[2] + am[0] * az[0] + am[1] * az[1] + am[2] * az[2]);
    double three_halves = 1.5 * r.pair.wm.tensor.dot(r.pair.wz.tensor);
    double scale = std::max(1.0, std::abs(six));
    ident = std::max({ident, std::abs(r.value - six) / scale, std::abs(three_halves - six) / scale});
    auto norm = [](const std::array<double, 3>& t) { return std::sqrt(t[0] * t[0] + t[1] * t[1] + t[2] * t[2]); };
    double bound = 3 * (norm(sm) * norm(sz) + norm(am) * norm(az));
    viol = std::max(viol, bound - r.value);
  }
  // the reported value in the excluded case, for rotated inputs too
  double excluded = 0;
  bool flagged = true;
  for (int n = 0; n < 20; ++n) {
    AlgWeyl sd = algweyl_from_spectrum(rng.triple(), {0, 0, 0}, rng.rotation());
    AlgWeyl asd = algweyl_from_spectrum({0, 0, 0}, rng.triple(), rng.rotation());
    PositivityReport p = positivity_bound(sd, asd);
    flagged = flagged && p.excluded;
    excluded = std::max(excluded, std::abs(p.aligned_value));
  }
  return {ident <= 1e-10 && viol <= 1e-10 && flagged && excluded == 0.0,
          fmt("identity %.2e, worst bound violation %.2e, excluded value %g", ident, std::max(0.0, viol), excluded)};
}

// ---- 7 ---------------------------------------------------------------------------
Outcome coefficient() {
  AlgWeyl w = standard();
  auto fit = extract_interaction_coefficient(w, w, 0.02);
  double oracle = -2.0 / 9 * kPi2 * 24;
  double ei = std::abs(fit.coeff_inner / oracle - 1), eo = std::abs(fit.coeff_outer / oracle - 1);
  double eio = std::abs(fit.coeff_inner / fit.coeff_outer - 1);
  std::vector<double> gs{0.08, 0.04, 0.02}, dev;
  for (double g : gs) {
    auto f = extract_interaction_coefficient(w, w, g);
    dev.push_back(std::abs(f.coeff_inner - oracle) + std::abs(f.coeff_outer - oracle));
  }
  double sl = slope(gs, dev);
  bool ok = ei <= 1e-2 && eo <= 1e-2 && eio <= 2e-2 && dev[1] < dev[0] && dev[2] < dev[1] && sl >= 1.7;
  return {ok, fmt("inner %.1e, outer %.1e, mutual %.1e, deviation slope %.2f", ei, eo, eio, sl)};
}

// ---- 8 ---------------------------------------------------------------------------
Outcome mechanism() {
  AlgWeyl w = standard();
  auto c = choose_parameters(w, w, 1.0);
  bool ok = c.balance.leading_bracket < -1 && c.balance.leading_total() < 0 && c.balance.sign_conclusive;
  AlgWeyl sd = algweyl_from_spectrum({2, -1, -1}, {0, 0, 0}), asd = algweyl_from_spectrum({0, 0, 0}, {1, 0, -1});
  auto e = energy_balance(sd, asd, c.params);
  bool refused = false;
  try {
    choose_parameters(sd, asd, 1.0);
  } catch (const Error&) {
    refused = true;
  }
  ok = ok && e.interaction == 0.0 && !e.sign_conclusive && refused;
  return {ok, fmt("lambda %.4f gamma %.5f a %.3e bracket %.2f; excluded interaction %g, conclusive %d", c.params.lambda,
                  c.params.gamma, c.params.a, c.balance.leading_bracket, e.interaction, int(e.sign_conclusive))};
}

// ---- 9 ---------------------------------------------------------------------------
Outcome inversion() {
  Rng rng(1009);
  double worst = 0;
  for (int n = 0; n < 50; ++n) {
    AlgWeyl w = rng.weyl();
    Vec4 y = rng.uniform(1.5, 10) * rng.unit();
    // independent oracle: J^T (delta - W x x / 3) J / |y|^4 with x = y/|y|^2
    double r2 = y.squaredNorm();
    Vec4 x = y / r2;
    Mat4 J = (Mat4::Identity() - 2 * y * y.transpose() / r2) / r2;
    Sym2 gx = Sym2::Identity() - WeylQuadratic(w.tensor).value(x) / 3;
    Sym2 pull = J.transpose() * gx * J * r2 * r2;
    Sym2 expect = Sym2::Identity() - WeylQuadratic(w.tensor).value(y) / (3 * r2 * r2);
    worst = std::max(worst, (pull - expect).cwiseAbs().maxCoeff());
    worst = std::max(worst, invert_pullback(w, y).residual);
  }
  AlgWeyl w = rng.weyl();
  CubicTerm c = CubicTerm::random(9);
  Vec4 dir = rng.unit();
  std::vector<double> rs, res;
  for (double r = 4; r <= 64; r *= 2) {
    rs.push_back(r);
    res.push_back(invert_pullback(w, r * dir, 1.0, &c).residual);
  }
  double sl = slope(rs, res);
  return {worst <= 1e-12 && sl <= -2.7, fmt("quadratic model %.2e, cubic residual slope %.2f", worst, sl)};
}

// ---- 10 --------------------------------------------------------------------------
Outcome error_region() {
  AlgWeyl w = standard();
  Eigen::MatrixXd A(9, 3);
  Eigen::VectorXd y(9);
  int n = 0;
  for (double a : {1e-6, 1e-7, 1e-8})
    for (double g : {0.05, 0.1, 0.2}) {
      auto ga = ga_model(w, a);
      A.row(n) << 1, std::log(a), std::log(g);
      y[n++] = std::log(rough_energy_bound(*ga, Region::annulus(g - std::sqrt(a), g), {8, 6}).value);
    }
  Eigen::Vector3d c = A.colPivHouseholderQr().solve(y);
  return {std::abs(c[1] - 4.5) <= 0.3 && std::abs(c[2] + 5) <= 0.3, fmt("a exponent %.3f, gamma exponent %.3f", c[1], c[2])};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{sphere_moments, linearization, biharmonic,  transverse_traceless,
                                                        second_variation, interaction, coefficient, mechanism,
                                                        inversion,        error_region};
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("CRITERION %zu: %s  %s\n", k + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
