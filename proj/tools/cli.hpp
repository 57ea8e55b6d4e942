#ifndef WEYLGLUE_TOOLS_CLI_HPP
#define WEYLGLUE_TOOLS_CLI_HPP

// Command implementations for the weylglue executable.  Kept in a header so
// the test suite can drive them in-process.
//
// Exit status: 0 = checks pass / bracket negative, 1 = checks fail / bracket
// not negative, 2 = input error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "weylglue/energy.hpp"

namespace weylglue::cli {

using json = nlohmann::json;

struct InputError : Error {
  using Error::Error;
};

// ---- inputs ----------------------------------------------------------------------

inline std::array<double, 3> read_triple(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3) throw InputError(std::string("spectrum needs a 3-array '") + key + "'");
  std::array<double, 3> t{};
  for (int k = 0; k < 3; ++k) {
    if (!j[key][k].is_number()) throw InputError(std::string("non-numeric entry in '") + key + "'");
    t[k] = j[key][k].get<double>();
  }
  double s = t[0] + t[1] + t[2];
  if (std::abs(s) > 1e-9) throw InputError(std::string("trace-sum violation in '") + key + "'");
  for (double& v : t) v -= s / 3;  // project roundoff away
  return t;
}

// {"sd": [..3], "asd": [..3]}
inline AlgWeyl parse_spectrum(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("spectrum file must hold a JSON object");
  return algweyl_from_spectrum(read_triple(j, "sd"), read_triple(j, "asd"));
}

inline AlgWeyl load_spectrum(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spectrum(ss.str());
}

inline json spectrum_json(const Spectrum& s) { return {{"sd", s.sd}, {"asd", s.asd}}; }

inline json matrix_json(const Mat4& m) {
  json rows = json::array();
  for (int i = 0; i < 4; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2), m(i, 3)});
  return rows;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- verify ------------------------------------------------------------------------

struct Check {
  std::string suite, name, ref;
  double residual = 0;
};

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : gen_(seed) {}
  double normal() { return std::normal_distribution<double>(0, 1)(gen_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  Vec4 unit() { return Vec4(normal(), normal(), normal(), normal()).normalized(); }
  Sym2 sym() {
    Sym2 m;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) m(i, j) = m(j, i) = normal();
    return m;
  }
  Mat4 rotation() {
    Mat4 a;
    for (int i = 0; i < 16; ++i) a.data()[i] = normal();
    Eigen::HouseholderQR<Mat4> qr(a);
    Mat4 q = qr.householderQ();
    if (q.determinant() < 0) q.col(0) *= -1;
    return q;
  }
  std::array<double, 3> triple() {
    double a = normal(), b = normal();
    return {a, b, -a - b};
  }
  AlgWeyl weyl() { return algweyl_from_spectrum(triple(), triple(), rotation()); }

 private:
  std::mt19937_64 gen_;
};

inline double rel_gap(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

inline std::vector<Check> suite_sphere(Sampler&) {
  std::vector<Check> out;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  SphereRule s16 = SphereRule::make(16), s12 = SphereRule::make(12);
  auto integrate = [](const SphereRule& s, auto&& f) {
    std::vector<double> v(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) v[k] = s.w[k] * f(s.z[k]);
    return pairwise_sum(v);
  };
  out.push_back({"sphere", "volume of S^3", "quadrature rule", rel_gap(integrate(s16, [](const Vec4&) { return 1.0; }), 2 * pi2)});
  double worst = 0;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          double q = integrate(s16, [&](const Vec4& z) { return z[m] * z[n] * z[k] * z[l]; });
          worst = std::max(worst, std::abs(q - sphere_moment(m, n, k, l)));
        }
  out.push_back({"sphere", "fourth moments, all 256 tuples", "sphere moment identity", worst});
  worst = 0;
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; a + b <= 8; ++b)
      for (int c = 0; a + b + c <= 8; ++c)
        for (int d = 0; a + b + c + d <= 8; ++d) {
          std::array<int, 4> e{a, b, c, d};
          double q = integrate(s12, [&](const Vec4& z) {
            return std::pow(z[0], a) * std::pow(z[1], b) * std::pow(z[2], c) * std::pow(z[3], d);
          });
          worst = std::max(worst, std::abs(q - sphere_monomial(e)));
        }
  out.push_back({"sphere", "monomials through degree 8 at level 12", "quadrature rule", worst});
  return out;
}

inline std::vector<Check> suite_tensor(Sampler& rng) {
  std::vector<Check> out;
  double sym = 0, kn = 0, split = 0, ident = 0, pos = 0;
  for (int n = 0; n < 50; ++n) {
    AlgWeyl w = rng.weyl();
    double scale = std::sqrt(w.tensor.norm2());
    sym = std::max(sym, validate(w.tensor, SymmetryClass::weyl).max() / scale);
    split = std::max(split, hodge_split(w, 1.0).off_diagonal / scale);
    Sym2 a = rng.sym(), b = rng.sym();
    Rank4 k = kulkarni_nomizu(a, b);
    kn = std::max(kn, validate(k, SymmetryClass::riemann).max() / std::max(1.0, std::sqrt(k.norm2())));
  }
  for (int n = 0; n < 200; ++n) {
    AlgWeyl m = rng.weyl(), z = rng.weyl();
    AlignResult r = align_and_interact(m, z);
    ident = std::max(ident, rel_gap(r.value, aligned_value(r.pair.spectra_m, r.pair.spectra_z)));
    ident = std::max(ident, rel_gap(r.value, interaction_star(r.pair.wm, r.pair.wz)));
    PositivityReport p = positivity_bound(m, z);
    pos = std::max(pos, std::max(0.0, p.bound - p.aligned_value) / p.bound);
  }
  out.push_back({"tensor", "Weyl symmetries of random tensors", "algebraic Weyl tensor", sym});
  out.push_back({"tensor", "Kulkarni-Nomizu product has Riemann symmetries", "Kulkarni-Nomizu product", kn});
  out.push_back({"tensor", "Weyl operator is block diagonal in Lambda+/-", "self-dual / anti-self-dual splitting", split});
  out.push_back({"tensor", "aligned value = 3/2 <W,W> = 6 sum of eigenvalue products", "aligned interaction", ident});
  out.push_back({"tensor", "aligned value >= positivity bound", "interaction positivity", pos});
  return out;
}

inline std::vector<Check> suite_curvature(Sampler& rng) {
  std::vector<Check> out;
  double origin = 0, ric = 0, scaled = 0, lin = 0;
  for (int n = 0; n < 10; ++n) {
    AlgWeyl w = rng.weyl();
    double scale = std::sqrt(w.tensor.norm2());
    auto cnc = cnc_model(w);
    LocalGeometry G = local_geometry(*cnc, Vec4::Zero());
    origin = std::max(origin, std::sqrt((weyl_of(G) - w.tensor).norm2()) / scale);
    ric = std::max(ric, G.ric.norm() / scale);
    Vec4 x = 0.3 * rng.unit();
    double c = rng.uniform(0.5, 3);
    ScaledChart sc(cnc, c);
    Rank4 ws = weyl(sc, x).tensor, w0 = weyl(*cnc, x).tensor;
    scaled = std::max(scaled, std::sqrt((ws - c * w0).norm2()) / std::sqrt((c * w0).norm2()));
  }
  // Richardson-extrapolated central differences in t of the nonlinear quantities
  for (int n = 0; n < 5; ++n) {
    auto g = std::make_shared<PerturbedChart>(std::make_shared<FlatChart>(), std::make_shared<ModelH>(rng.weyl()), 0.3);
    auto h = std::make_shared<ModelH>(rng.weyl());
    Vec4 x = 0.5 * rng.unit();
    Linearization L = linearize_curvature(*g, *h, x);
    auto at = [&](double t) {
      LocalGeometry G = local_geometry(PerturbedChart(g, h, t), x);
      return std::tuple{weyl_of(G), G.ric, G.scal};
    };
    const double s = 1e-3;
    auto [w1, r1, c1] = at(s);
    auto [w2, r2, c2] = at(-s);
    auto [w3, r3, c3] = at(2 * s);
    auto [w4, r4, c4] = at(-2 * s);
    Rank4 dw = (8.0 * (w1 - w2) - (w3 - w4)) * (1 / (12 * s));
    Sym2 dr = (8.0 * (r1 - r2) - (r3 - r4)) / (12 * s);
    double ds = (8 * (c1 - c2) - (c3 - c4)) / (12 * s);
    double wscale = std::max(1.0, std::sqrt(dw.norm2()));
    lin = std::max(lin, std::sqrt((dw - L.weyl_dot).norm2()) / wscale);
    lin = std::max(lin, (dr - L.ric_dot).norm() / std::max(1.0, dr.norm()));
    lin = std::max(lin, std::abs(ds - L.scal_dot) / std::max(1.0, std::abs(ds)));
  }
  out.push_back({"curvature", "conformal normal model has Weyl = W at the origin", "conformal normal coordinates", origin});
  out.push_back({"curvature", "conformal normal model is Ricci-flat at the origin", "conformal normal coordinates", ric});
  out.push_back({"curvature", "constant rescaling multiplies lowered Weyl by the factor", "conformal covariance", scaled});
  out.push_back({"curvature", "linearized Weyl, Ricci, scalar vs finite differences", "linearized curvature", lin});
  return out;
}

inline std::vector<Check> suite_biharmonic(Sampler& rng) {
  std::vector<Check> out;
  double closed = 0, rows = 0, bilap = 0;
  for (double g : {0.3, 0.1, 0.02}) {
    AGamma A = a_gamma(g);
    for (int n = 0; n < 20; ++n) {
      BoundaryVector v(g * g * rng.normal(), g * g * rng.normal(), rng.normal(), rng.normal());
      RadialProfile c = solve_profile(g, v), d = solve_profile_direct(g, v);
      Eigen::Vector4d cv(c.c[0], c.c[1], c.c[2], c.c[3]), dv(d.c[0], d.c[1], d.c[2], d.c[3]);
      closed = std::max(closed, (cv - dv).norm() / dv.norm());
      rows = std::max(rows, (A.matrix * cv - v).norm() / v.norm());
    }
  }
  for (int n = 0; n < 10; ++n) {
    auto pair = align_and_interact(rng.weyl(), rng.weyl()).pair;
    double g = 0.1;
    InterpSolution s = assemble_interpolant(pair.wm, pair.wz, {g * g / 100, g, 2});
    Vec4 x = rng.uniform(g, 1) * rng.unit();
    auto j = s.wdot().jet4(x);
    double worst = 0, scale = 0;
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) {
        double b = 0;
        for (int a = 0; a < 4; ++a)
          for (int c = 0; c < 4; ++c) {
            b += j[i][k].d(a, a, c, c);
            scale = std::max(scale, std::abs(j[i][k].d(a, a, c, c)));
          }
        worst = std::max(worst, std::abs(b));
      }
    bilap = std::max(bilap, worst / std::max(scale, 1e-300));
  }
  out.push_back({"biharmonic", "closed-form coefficients vs direct solve", "biharmonic system solution", closed});
  out.push_back({"biharmonic", "boundary rows A_gamma c = v", "interpolation boundary conditions", rows});
  out.push_back({"biharmonic", "bilaplacian of wdot at random annulus points", "biharmonic interpolation", bilap});
  return out;
}

inline std::vector<Check> suite_tt(Sampler& rng) {
  std::vector<Check> out;
  double tt = 0, rep = 0;
  for (int n = 0; n < 20; ++n) {
    auto pair = align_and_interact(rng.weyl(), rng.weyl()).pair;
    double g = rng.uniform(0.02, 0.3);
    InterpSolution s = assemble_interpolant(pair.wm, pair.wz, {g * g / 100, g, rng.uniform(0.5, 3)});
    for (int k = 0; k < 5; ++k) {
      Vec4 x = rng.uniform(g, 1) * rng.unit();
      auto j = s.wdot().jet2(x);
      double scale = 0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          for (int c = 0; c < 4; ++c) scale = std::max({scale, std::abs(j[a][b].d(c)), std::abs(j[a][b].value()) / x.norm()});
      auto [tr, div] = tt_defect(j);
      tt = std::max(tt, std::max(std::abs(tr) / x.norm(), div.cwiseAbs().maxCoeff()) / scale);
      Sym2 hc = s.collapsed->eval(x), hh = s.harmonic->eval(x);
      rep = std::max(rep, (hc - hh).cwiseAbs().maxCoeff() / std::max(hc.cwiseAbs().maxCoeff(), 1e-300));
    }
  }
  out.push_back({"tt", "trace and divergence of wdot", "wdot is transverse-traceless", tt});
  out.push_back({"tt", "harmonic-sum and collapsed representations agree", "collapsed interpolant", rep});
  return out;
}

inline std::vector<Check> suite_variation(Sampler& rng) {
  std::vector<Check> out;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  AlgWeyl w = rng.weyl();
  auto b = second_variation_boundary(ModelH(w), Region::ball(1));
  out.push_back({"variation", "boundary functional of H on B_1 = |W|^2 pi^2/2", "second variation, model on the ball",
                 rel_gap(b.value, w.tensor.norm2() * pi2 / 2)});
  out.push_back({"variation", "two boundary forms agree on B_1", "second variation, two boundary forms",
                 rel_gap(b.value, b.biharmonic_form)});
  auto pair = align_and_interact(rng.weyl(), rng.weyl()).pair;
  InterpSolution s = assemble_interpolant(pair.wm, pair.wz, {9e-4, 0.3, 1.5});
  auto ba = second_variation_boundary(s.wdot(), Region::annulus(0.3, 1), {12, 48});
  out.push_back({"variation", "two boundary forms agree on the interpolation annulus",
                 "second variation, two boundary forms", rel_gap(ba.value, ba.biharmonic_form)});
  out.push_back({"variation", "annulus functional = Phi_gamma + Phi_1", "inner and outer functionals",
                 rel_gap(ba.value, phi_inner(s) + phi_outer(s))});
  // O(t^3) truncation: residual is how far the slope falls short of 2.7
  std::vector<double> ts{1e-2, 3e-3, 1e-3}, lx, ly;
  for (double t : ts) {
    PerturbedChart c(std::make_shared<FlatChart>(), std::make_shared<ModelH>(w), t);
    lx.push_back(std::log(t));
    ly.push_back(std::log(std::abs(weyl_energy_numeric(c, Region::ball(1)) - t * t * b.value)));
  }
  double mx = (lx[0] + lx[1] + lx[2]) / 3, my = (ly[0] + ly[1] + ly[2]) / 3, sxy = 0, sxx = 0;
  for (int k = 0; k < 3; ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }
  out.push_back({"variation", "energy minus t^2 functional decays with slope >= 2.7", "Taylor expansion of the energy",
                 std::max(0.0, 2.7 - sxy / sxx)});
  return out;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"all", "tensor", "curvature", "biharmonic", "sphere", "tt", "variation"};
  return names;
}

inline std::vector<Check> run_suite(const std::string& suite, std::uint64_t seed) {
  std::vector<Check> all;
  auto add = [&](const std::string& name, auto&& fn) {
    if (suite != "all" && suite != name) return;
    Sampler rng(seed);
    auto c = fn(rng);
    all.insert(all.end(), c.begin(), c.end());
  };
  add("tensor", suite_tensor);
  add("curvature", suite_curvature);
  add("biharmonic", suite_biharmonic);
  add("sphere", suite_sphere);
  add("tt", suite_tt);
  add("variation", suite_variation);
  if (all.empty()) throw InputError("unknown suite " + suite);
  return all;
}

// ---- reports -----------------------------------------------------------------------

inline json balance_json(const EnergyBalance& e) {
  const auto& p = e.params;
  json j;
  j["params"] = {{"a", p.a}, {"gamma", p.gamma}, {"lambda", p.lambda}, {"b", p.b()}};
  j["error_model"] = e.error_model;
  j["phi_inner"] = e.phi_inner;
  j["phi_outer"] = e.phi_outer;
  j["f_expression"] = e.f_expression;
  j["h_expression"] = e.h_expression;
  j["leading_bracket"] = e.leading_bracket;
  j["constant_C"] = e.constant_C;
  j["interaction"] = e.interaction;
  j["interaction_term"] = e.interaction_term;
  j["remainder"] = e.remainder;
  j["remainder_over_lambda2_gamma2"] = e.remainder_scaled;
  j["error_region"] = e.error_region;
  j["leading_total"] = e.leading_total();
  j["sign_conclusive"] = e.sign_conclusive;
  j["negative"] = e.sign_conclusive && e.leading_bracket + e.error_region < 0;
  j["warnings"] = e.warnings;
  j["refs"] = {
      {"phi_inner", "inner boundary functional on |x| = gamma"},
      {"phi_outer", "outer boundary functional on |x| = 1"},
      {"f_expression", "leading energy of g_a outside B_gamma"},
      {"h_expression", "leading energy of g_b in B_1"},
      {"leading_bracket", "energy balance bracket"},
      {"constant_C", "constant depending on W^M, from the W^Z = 0 run"},
      {"interaction_term", "-(4/9) pi^2 lambda^2 W^M * W^Z"},
      {"remainder", "O(lambda^2 gamma^2) remainder"},
      {"error_region", "cutoff-shell error bound, a^-4 scaled"},
  };
  return j;
}

inline std::string sweep_header() { return "lambda,gamma,a,bracket,interaction,constant_C,fit_residual,sign,ref\n"; }

inline std::string sweep_row(const EnergyBalance& e) {
  const auto& p = e.params;
  std::string sign = !e.sign_conclusive ? "inconclusive" : e.leading_bracket < 0 ? "negative" : "nonnegative";
  return num(p.lambda) + "," + num(p.gamma) + "," + num(p.a) + "," + num(e.leading_bracket) + "," + num(e.interaction) +
         "," + num(e.constant_C) + "," + num(e.remainder) + "," + sign + ",energy balance bracket\n";
}

inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

// ---- entry point ---------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical companion for Weyl-energy gluing of four-manifolds", "weylglue"};
  app.set_config("--config", "", "INI/TOML file with the same keys as the flags (flags win)");
  app.require_subcommand(1);
  app.fallthrough();  // lets --config follow the subcommand name

  std::string suite = "all", out_path;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  auto* verify = app.add_subcommand("verify", "Run a verification suite and print a JSON report");
  verify->add_option("suite", suite, "Suite name")->check(CLI::IsMember(suite_names()));
  verify->add_option("--tol", tol, "Largest accepted residual");
  verify->add_option("--seed", seed, "Seed for the random samples");
  verify->add_option("--out", out_path, "Output file (default stdout)");

  std::string wm_path, wz_path;
  bool align = false;
  auto* interact = app.add_subcommand("interact", "Aligned interaction, positivity bound and hypothesis flags");
  interact->add_option("--wm", wm_path, "Spectrum file for W^M")->required();
  interact->add_option("--wz", wz_path, "Spectrum file for W^Z")->required();
  interact->add_flag("--align", align, "Also report the Derdzinski frames used for alignment");
  interact->add_option("--out", out_path, "Output file (default stdout)");

  GluingParams params;
  std::string error_model = "truncated", sweep_path;
  double margin = 0;
  int level = 12;
  auto* balance = app.add_subcommand("balance", "Energy balance for one parameter set");
  balance->add_option("--wm", wm_path, "Spectrum file for W^M")->required();
  balance->add_option("--wz", wz_path, "Spectrum file for W^Z")->required();
  balance->add_option("--lambda", params.lambda, "b / a");
  balance->add_option("--gamma", params.gamma, "Inner radius of the interpolation annulus");
  balance->add_option("--a", params.a, "Scale of the blown-up piece");
  balance->add_option("--error-model", error_model, "truncated or synthetic")
      ->check(CLI::IsMember({"truncated", "synthetic"}));
  balance->add_option("--seed", seed, "Seed of the synthetic error model");
  balance->add_option("--auto", margin, "Choose (lambda, gamma, a) so the bracket is below -margin");
  balance->add_option("--sweep", sweep_path, "Also write a CSV sweep over the default lambda grid");
  balance->add_option("--level", level, "Sphere quadrature level")->check(CLI::Range(4, 64));
  balance->add_option("--out", out_path, "Output file (default stdout)");

  std::vector<double> lambdas, gammas;
  double fixed_a = 0;
  auto* sweep = app.add_subcommand("sweep", "CSV table of the balance over a lambda x gamma grid");
  sweep->add_option("--wm", wm_path, "Spectrum file for W^M")->required();
  sweep->add_option("--wz", wz_path, "Spectrum file for W^Z")->required();
  sweep->add_option("--lambdas", lambdas, "Comma-separated lambda grid")->delimiter(',');
  sweep->add_option("--gammas", gammas, "Comma-separated gamma grid")->delimiter(',');
  sweep->add_option("--a", fixed_a, "Fixed a (default gamma^2 / 100 per row)");
  sweep->add_option("--level", level, "Sphere quadrature level")->check(CLI::Range(4, 64));
  sweep->add_option("--out", out_path, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*verify) {
      auto checks = run_suite(suite, seed);
      json rows = json::array();
      bool pass = true;
      for (const auto& c : checks) {
        bool ok = c.residual <= tol;
        pass &= ok;
        rows.push_back({{"suite", c.suite}, {"name", c.name}, {"ref", c.ref}, {"residual", c.residual}, {"pass", ok}});
      }
      json rep{{"command", "verify"}, {"suite", suite}, {"tol", tol}, {"seed", seed}, {"checks", rows}, {"pass", pass}};
      emit(rep.dump(2) + "\n", out_path, out);
      return pass ? 0 : 1;
    }

    AlgWeyl wm = load_spectrum(wm_path), wz = load_spectrum(wz_path);

    if (*interact) {
      PositivityReport p = positivity_bound(wm, wz);
      AlignResult r = align_and_interact(wm, wz);
      json rep{{"command", "interact"},
               {"spectra", {{"wm", spectrum_json(r.pair.spectra_m)}, {"wz", spectrum_json(r.pair.spectra_z)}}},
               {"bound", p.bound},
               {"value", p.aligned_value},
               {"flags",
                {{"lcf_m", p.lcf_m}, {"lcf_z", p.lcf_z}, {"lcf", p.lcf()}, {"excluded", p.excluded},
                 {"hypotheses_hold", p.hypotheses_hold()}}},
               {"refs", {{"value", "aligned interaction W^M * W^Z"}, {"bound", "interaction positivity bound"}}}};
      if (align) rep["frames"] = {{"wm", matrix_json(r.pair.frame_m)}, {"wz", matrix_json(r.pair.frame_z)}};
      emit(rep.dump(2) + "\n", out_path, out);
      return 0;
    }

    BalanceOptions opt;
    opt.rule.sphere_level = level;
    AlignedPair pair = align_and_interact(wm, wz).pair;

    if (*balance) {
      json rep;
      EnergyBalance e;
      if (balance->count("--auto")) {
        ParameterChoice c = choose_parameters(wm, wz, margin, opt);
        e = c.balance;
        params = c.params;
        rep = balance_json(e);
        rep["auto"] = {{"margin", margin}, {"constant_C0", c.constant_C0}, {"gamma_halvings", c.gamma_halvings}};
      } else {
        params.validate();
        if (error_model == "synthetic")
          opt.error = ErrorModel::synthetic(std::pow(params.a, 3), std::pow(params.b(), 3), seed);
        e = energy_balance(pair.wm, pair.wz, params, opt);
        rep = balance_json(e);
      }
      rep["command"] = "balance";
      if (!sweep_path.empty()) {
        std::string csv = sweep_header();
        for (double l : default_lambda_grid(params.gamma)) {
          GluingParams q{params.a, params.gamma, l};
          csv += sweep_row(energy_balance(pair.wm, pair.wz, q, opt));
        }
        emit(csv, sweep_path, out);
      }
      emit(rep.dump(2) + "\n", out_path, out);
      return rep["negative"].get<bool>() ? 0 : 1;
    }

    if (*sweep) {
      if (lambdas.empty() || gammas.empty()) throw InputError("empty grid");
      std::string csv = sweep_header();
      for (double l : lambdas)
        for (double g : gammas) {
          GluingParams q{fixed_a > 0 ? fixed_a : g * g / 100, g, l};
          q.validate();
          csv += sweep_row(energy_balance(pair.wm, pair.wz, q, opt));
        }
      emit(csv, out_path, out);
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace weylglue::cli

#endif
