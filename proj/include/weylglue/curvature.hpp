#ifndef WEYLGLUE_CURVATURE_HPP
#define WEYLGLUE_CURVATURE_HPP

// Curvature of metric charts and its first-order variation.
// Index layout: gamma(k,i,j) = Gamma^k_ij, r13(i,j,k,l) = R_ijk^l with
// R(e_i,e_j)e_k = R_ijk^l e_l, riem(i,j,k,l) = R_ijk^s g_sl.

#include "field.hpp"

namespace weylglue {

struct Rank3 {
  std::array<double, 64> c{};
  double& operator()(int i, int j, int k) { return c[(i * 4 + j) * 4 + k]; }
  double operator()(int i, int j, int k) const { return c[(i * 4 + j) * 4 + k]; }
  double max_abs() const {
    double m = 0;
    for (double v : c) m = std::max(m, std::abs(v));
    return m;
  }
};

// value, first and second partials of a symmetric field at a point
struct Partials2 {
  Sym2 v;
  std::array<Sym2, 4> d;                    // d[a](i,j) = d_a h_ij
  std::array<std::array<Sym2, 4>, 4> dd;    // dd[a][b](i,j)
};

inline Partials2 partials(const SymJet<2>& j) {
  Partials2 p;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      p.v(i, k) = j[i][k].value();
      for (int a = 0; a < 4; ++a) {
        p.d[a](i, k) = j[i][k].d(a);
        for (int b = 0; b < 4; ++b) p.dd[a][b](i, k) = j[i][k].d(a, b);
      }
    }
  return p;
}

struct LocalGeometry {
  Sym2 g, ginv;
  double detg = 1;
  std::array<Sym2, 4> dg;
  std::array<std::array<Sym2, 4>, 4> ddg;
  Rank3 gamma;
  std::array<Rank3, 4> dgamma;  // dgamma[m](k,i,j) = d_m Gamma^k_ij
  Rank4 r13, riem;
  Sym2 ric;
  double scal = 0;
  bool flat_derivs = false;     // all first and second partials vanish
};

inline LocalGeometry local_geometry(const SymJet<2>& jet) {
  LocalGeometry G;
  Partials2 p = partials(jet);
  G.g = p.v;
  G.dg = p.d;
  G.ddg = p.dd;
  G.detg = G.g.determinant();
  double scale = G.g.cwiseAbs().maxCoeff();
  if (!(std::abs(G.detg) > 1e-14 * std::pow(scale, 4))) throw Error("degenerate metric");
  G.ginv = G.g.inverse();
  const Sym2& gi = G.ginv;

  double dmax = 0;
  for (int a = 0; a < 4; ++a) {
    dmax = std::max(dmax, G.dg[a].cwiseAbs().maxCoeff());
    for (int b = 0; b < 4; ++b) dmax = std::max(dmax, G.ddg[a][b].cwiseAbs().maxCoeff());
  }
  G.flat_derivs = dmax == 0.0;
  G.ric.setZero();
  if (G.flat_derivs) return G;

  // lowered symbols Gamma_{ijs} = 1/2 (d_i g_js + d_j g_is - d_s g_ij) and their partials
  Rank3 low;
  std::array<Rank3, 4> dlow;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int s = 0; s < 4; ++s) {
        low(i, j, s) = 0.5 * (G.dg[i](j, s) + G.dg[j](i, s) - G.dg[s](i, j));
        for (int m = 0; m < 4; ++m)
          dlow[m](i, j, s) = 0.5 * (G.ddg[m][i](j, s) + G.ddg[m][j](i, s) - G.ddg[m][s](i, j));
      }
  // d_m g^{ks} = -g^{ka} d_m g_ab g^{bs}
  std::array<Sym2, 4> dgi;
  for (int m = 0; m < 4; ++m) dgi[m] = -gi * G.dg[m] * gi;

  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double s0 = 0;
        for (int s = 0; s < 4; ++s) s0 += gi(k, s) * low(i, j, s);
        G.gamma(k, i, j) = s0;
        for (int m = 0; m < 4; ++m) {
          double s1 = 0;
          for (int s = 0; s < 4; ++s) s1 += dgi[m](k, s) * low(i, j, s) + gi(k, s) * dlow[m](i, j, s);
          G.dgamma[m](k, i, j) = s1;
        }
      }
  // R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_is Gamma^s_jk - Gamma^l_js Gamma^s_ik
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          double v = G.dgamma[i](l, j, k) - G.dgamma[j](l, i, k);
          for (int s = 0; s < 4; ++s) v += G.gamma(l, i, s) * G.gamma(s, j, k) - G.gamma(l, j, s) * G.gamma(s, i, k);
          G.r13(i, j, k, l) = v;
        }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          double v = 0;
          for (int s = 0; s < 4; ++s) v += G.r13(i, j, k, s) * G.g(s, l);
          G.riem(i, j, k, l) = v;
        }
  G.ric = ricci_contraction(G.riem, gi);
  G.scal = gi.cwiseProduct(G.ric).sum();
  return G;
}

inline LocalGeometry local_geometry(const SymField& chart, const Vec4& x) {
  chart.require(x);
  return local_geometry(chart.jet2(x));
}

inline Rank3 christoffel(const SymField& chart, const Vec4& x) { return local_geometry(chart, x).gamma; }
inline Rank4 riemann(const SymField& chart, const Vec4& x) { return local_geometry(chart, x).riem; }
inline Sym2 ricci(const SymField& chart, const Vec4& x) { return local_geometry(chart, x).ric; }
inline double scalar(const SymField& chart, const Vec4& x) { return local_geometry(chart, x).scal; }

inline Rank4 weyl_of(const LocalGeometry& G) { return weyl_projection(G.riem, G.g, G.ric, G.scal); }

inline AlgWeyl weyl(const SymField& chart, const Vec4& x) { return {weyl_of(local_geometry(chart, x)), std::nullopt}; }

// |W|^2 with all indices raised by g^{-1}
inline double weyl_norm2(const Rank4& w, const Sym2& ginv) {
  if ((ginv - Sym2::Identity()).cwiseAbs().maxCoeff() == 0.0) return w.norm2();
  Rank4 up = rotate(w, ginv);  // W_abcd g^ai g^bj g^ck g^dl
  return up.dot(w);
}

// ---- linearization ----------------------------------------------------------

struct Linearization {
  Sym2 inv_dot;        // d/dt g^ij
  Rank3 gamma_dot;     // (k,i,j)
  Rank4 riem13_dot;    // (i,j,k,l) for R_ijk^l
  Rank4 riem04_dot;
  Sym2 ric_dot;
  double scal_dot = 0;
  Rank4 weyl_dot;
};

inline Linearization linearize_curvature(const LocalGeometry& G, const SymJet<2>& hjet) {
  Partials2 h = partials(hjet);
  const Sym2& gi = G.ginv;
  const auto& Ga = G.gamma;
  const bool flat = G.flat_derivs;

  // nabla_a h_bc and nabla_m nabla_a h_bc
  Rank3 nh;
  std::array<Rank3, 4> dnh;  // d_m (nabla_a h_bc)
  Rank4 nnh;                  // (m,a,b,c)
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        double v = h.d[a](b, c);
        if (!flat)
          for (int s = 0; s < 4; ++s) v -= Ga(s, a, b) * h.v(s, c) + Ga(s, a, c) * h.v(b, s);
        nh(a, b, c) = v;
        for (int m = 0; m < 4; ++m) {
          double w = h.dd[m][a](b, c);
          if (!flat)
            for (int s = 0; s < 4; ++s)
              w -= G.dgamma[m](s, a, b) * h.v(s, c) + Ga(s, a, b) * h.d[m](s, c) +
                   G.dgamma[m](s, a, c) * h.v(b, s) + Ga(s, a, c) * h.d[m](b, s);
          dnh[m](a, b, c) = w;
        }
      }
  for (int m = 0; m < 4; ++m)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) {
          double v = dnh[m](a, b, c);
          if (!flat)
            for (int s = 0; s < 4; ++s)
              v -= Ga(s, m, a) * nh(s, b, c) + Ga(s, m, b) * nh(a, s, c) + Ga(s, m, c) * nh(a, b, s);
          nnh(m, a, b, c) = v;
        }

  Linearization L;
  L.inv_dot = -gi * h.v * gi;

  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double v = 0;
        for (int l = 0; l < 4; ++l) v += gi(k, l) * (nh(i, l, j) + nh(j, i, l) - nh(l, i, j));
        L.gamma_dot(k, i, j) = 0.5 * v;
      }

  // (1,3) and (0,4) variations
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          double low = nnh(i, k, j, l) + nnh(j, l, i, k) - nnh(i, l, j, k) - nnh(j, k, i, l);
          double curv = 0;
          for (int s = 0; s < 4; ++s) curv += G.r13(i, j, k, s) * h.v(l, s) - G.r13(i, j, l, s) * h.v(s, k);
          L.riem04_dot(i, j, k, l) = 0.5 * (low + curv);
        }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          double v = 0;
          for (int s = 0; s < 4; ++s) {
            double br = nnh(i, k, j, s) + nnh(j, s, i, k) - nnh(i, s, j, k) - nnh(j, k, i, s);
            for (int r = 0; r < 4; ++r) br -= G.r13(i, j, s, r) * h.v(r, k) + G.r13(i, j, k, r) * h.v(s, r);
            v += gi(s, l) * br;
          }
          L.riem13_dot(i, j, k, l) = 0.5 * v;
        }

  // Ricci
  Sym2 lap, hess_tr, grad_div;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double a1 = 0, a2 = 0, a3 = 0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          a1 += gi(a, b) * nnh(a, b, i, j);
          a2 += gi(a, b) * nnh(i, j, a, b);
          a3 += gi(a, b) * nnh(i, a, j, b);
        }
      lap(i, j) = a1;
      hess_tr(i, j) = a2;
      grad_div(i, j) = a3;  // nabla_i (delta h)_j
    }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double v = -lap(i, j) - hess_tr(i, j) + grad_div(i, j) + grad_div(j, i);
      for (int s = 0; s < 4; ++s) {
        // R_i^s h_sj = g^{st} R_is h_tj
        for (int t = 0; t < 4; ++t) v += gi(s, t) * (G.ric(i, s) * h.v(t, j) + G.ric(j, s) * h.v(i, t));
      }
      double rr = 0;
      for (int r = 0; r < 4; ++r)
        for (int t = 0; t < 4; ++t)
          for (int s = 0; s < 4; ++s) rr += gi(r, t) * G.r13(r, i, j, s) * h.v(t, s);
      v -= 2 * rr;
      L.ric_dot(i, j) = 0.5 * v;
    }

  // scalar
  double lap_tr = 0, div2 = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          lap_tr += gi(a, b) * gi(c, d) * nnh(a, b, c, d);
          div2 += gi(a, b) * gi(c, d) * nnh(a, c, b, d);
        }
  Sym2 hup = gi * h.v * gi;
  L.scal_dot = -lap_tr + div2 - hup.cwiseProduct(G.ric).sum();

  // Weyl by the product rule on W = Riem - Ric.g + (R/6) g.g
  L.weyl_dot = L.riem04_dot - kulkarni_nomizu(L.ric_dot, G.g) - kulkarni_nomizu(G.ric, h.v) +
               (L.scal_dot / 6.0) * kulkarni_nomizu(G.g, G.g) + (G.scal / 3.0) * kulkarni_nomizu(h.v, G.g);
  return L;
}

inline Linearization linearize_curvature(const SymField& g, const SymField& h, const Vec4& x) {
  g.require(x);
  h.require(x);
  return linearize_curvature(local_geometry(g.jet2(x)), h.jet2(x));
}

// trace and divergence of h at x (flat background)
inline std::pair<double, Vec4> tt_defect(const SymJet<2>& h) {
  double tr = 0;
  Vec4 div = Vec4::Zero();
  for (int i = 0; i < 4; ++i) {
    tr += h[i][i].value();
    for (int k = 0; k < 4; ++k) div(i) += h[i][k].d(k);
  }
  return {tr, div};
}

inline Rank4 linearized_weyl_flat_tt(const SymField& hf, const Vec4& x, double tol = 1e-10) {
  hf.require(x);
  SymJet<2> h = hf.jet2(x);
  auto [tr, div] = tt_defect(h);
  double scale = 1;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      scale = std::max(scale, std::abs(h[i][j].value()));
      for (int a = 0; a < 4; ++a) scale = std::max(scale, std::abs(h[i][j].d(a)));
    }
  if (std::abs(tr) > tol * scale || div.cwiseAbs().maxCoeff() > tol * scale) throw Error("not transverse-traceless");
  auto dd = [&](int a, int b, int i, int j) { return h[i][j].d(a, b); };
  auto lap = [&](int i, int j) {
    double s = 0;
    for (int a = 0; a < 4; ++a) s += h[i][j].d(a, a);
    return s;
  };
  auto del = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  Rank4 w;
  for (int al = 0; al < 4; ++al)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int be = 0; be < 4; ++be)
          w(al, i, j, be) = 0.5 * (dd(al, j, i, be) + dd(i, be, al, j) - dd(al, be, i, j) - dd(i, j, al, be)) +
                            0.25 * (del(al, be) * lap(i, j) + del(i, j) * lap(al, be) - del(i, be) * lap(al, j) -
                                    del(al, j) * lap(i, be));
  return w;
}

}  // namespace weylglue

#endif
