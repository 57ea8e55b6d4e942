#ifndef WEYLGLUE_TENSOR_HPP
#define WEYLGLUE_TENSOR_HPP

// Dense rank-4 algebra in dimension four.
//
// Conventions used everywhere in the library:
//   R(X,Y)Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z,   R_ijkl = g(R(e_i,e_j)e_k, e_l)
//   Ric_ij  = R_kijl g^kl
//   (a . b)_ijkl = 1/2 (a_il b_jk + a_jk b_il - a_ik b_jl - a_jl b_ik)
// so the unit sphere has Riem = g . g and (delta . delta)_1212 = -1.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace weylglue {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Sym2 = Eigen::Matrix4d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

struct Rank4 {
  std::array<double, 256> c{};

  static constexpr int at(int i, int j, int k, int l) { return ((i * 4 + j) * 4 + k) * 4 + l; }
  double& operator()(int i, int j, int k, int l) { return c[at(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return c[at(i, j, k, l)]; }

  Rank4& operator+=(const Rank4& o) {
    for (int n = 0; n < 256; ++n) c[n] += o.c[n];
    return *this;
  }
  Rank4& operator-=(const Rank4& o) {
    for (int n = 0; n < 256; ++n) c[n] -= o.c[n];
    return *this;
  }
  Rank4& operator*=(double s) {
    for (double& v : c) v *= s;
    return *this;
  }
  friend Rank4 operator+(Rank4 a, const Rank4& b) { return a += b; }
  friend Rank4 operator-(Rank4 a, const Rank4& b) { return a -= b; }
  friend Rank4 operator*(Rank4 a, double s) { return a *= s; }
  friend Rank4 operator*(double s, Rank4 a) { return a *= s; }

  // full contraction with the identity metric
  double dot(const Rank4& o) const {
    double s = 0;
    for (int n = 0; n < 256; ++n) s += c[n] * o.c[n];
    return s;
  }
  double norm2() const { return dot(*this); }
  double max_abs() const {
    double m = 0;
    for (double v : c) m = std::max(m, std::abs(v));
    return m;
  }
};

enum class SymmetryClass { none, riemann, weyl };

inline Rank4 kulkarni_nomizu(const Sym2& a, const Sym2& b) {
  Rank4 t;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
          t(i, j, k, l) = 0.5 * (a(i, l) * b(j, k) + a(j, k) * b(i, l) - a(i, k) * b(j, l) - a(j, l) * b(i, k));
  return t;
}

// Contraction over slots 1 and 4 with g^{-1}; zero for a Weyl tensor.
inline Sym2 ricci_contraction(const Rank4& t, const Sym2& ginv) {
  Sym2 r = Sym2::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) r(i, j) += t(k, i, j, l) * ginv(k, l);
  return r;
}

// W_ijkl A_ia A_jb A_kc A_ld: components of t in the frame given by A's columns
inline Rank4 rotate(const Rank4& t, const Mat4& A) {
  Rank4 a, b;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int d = 0; d < 4; ++d) {
          double s = 0;
          for (int l = 0; l < 4; ++l) s += t(i, j, k, l) * A(l, d);
          a(i, j, k, d) = s;
        }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          double s = 0;
          for (int k = 0; k < 4; ++k) s += a(i, j, k, d) * A(k, c);
          b(i, j, c, d) = s;
        }
  for (int i = 0; i < 4; ++i)
    for (int bb = 0; bb < 4; ++bb)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          double s = 0;
          for (int j = 0; j < 4; ++j) s += b(i, j, c, d) * A(j, bb);
          a(i, bb, c, d) = s;
        }
  for (int aa = 0; aa < 4; ++aa)
    for (int bb = 0; bb < 4; ++bb)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          double s = 0;
          for (int i = 0; i < 4; ++i) s += a(i, bb, c, d) * A(i, aa);
          b(aa, bb, c, d) = s;
        }
  return b;
}

struct SymmetryReport {
  double antisym_first = 0;  // T_ijkl + T_jikl
  double antisym_last = 0;   // T_ijkl + T_ijlk
  double pair = 0;           // T_ijkl - T_klij
  double bianchi = 0;        // T_ijkl + T_jkil + T_kijl
  double trace = 0;          // sum_k T_kijk
  double max() const { return std::max({antisym_first, antisym_last, pair, bianchi, trace}); }
};

inline SymmetryReport validate(const Rank4& t, SymmetryClass cls) {
  SymmetryReport r;
  if (cls == SymmetryClass::none) return r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          r.antisym_first = std::max(r.antisym_first, std::abs(t(i, j, k, l) + t(j, i, k, l)));
          r.antisym_last = std::max(r.antisym_last, std::abs(t(i, j, k, l) + t(i, j, l, k)));
          r.pair = std::max(r.pair, std::abs(t(i, j, k, l) - t(k, l, i, j)));
          if (cls == SymmetryClass::weyl)
            r.bianchi = std::max(r.bianchi, std::abs(t(i, j, k, l) + t(j, k, i, l) + t(k, i, j, l)));
        }
  if (cls == SymmetryClass::weyl)
    r.trace = ricci_contraction(t, Sym2::Identity()).cwiseAbs().maxCoeff();
  return r;
}

// ---- 2-forms -------------------------------------------------------------
// basis e12, e13, e14, e23, e24, e34

inline constexpr std::array<std::array<int, 2>, 6> kPairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

inline int pair_index(int i, int j) {
  for (int a = 0; a < 6; ++a)
    if (kPairs[a][0] == i && kPairs[a][1] == j) return a;
  return -1;
}

inline const Mat6& hodge_star() {
  static const Mat6 s = [] {
    Mat6 m = Mat6::Zero();
    // *e12 = e34, *e13 = -e24, *e14 = e23 and back
    m(5, 0) = 1;  m(0, 5) = 1;
    m(4, 1) = -1; m(1, 4) = -1;
    m(3, 2) = 1;  m(2, 3) = 1;
    return m;
  }();
  return s;
}

inline Vec6 wedge(const Vec4& u, const Vec4& v) {
  Vec6 w;
  for (int a = 0; a < 6; ++a) w(a) = u(kPairs[a][0]) * v(kPairs[a][1]) - u(kPairs[a][1]) * v(kPairs[a][0]);
  return w;
}

// antisymmetric 4x4 matrix of a 2-form
inline Mat4 form_matrix(const Vec6& f) {
  Mat4 m = Mat4::Zero();
  for (int a = 0; a < 6; ++a) {
    m(kPairs[a][0], kPairs[a][1]) = f(a);
    m(kPairs[a][1], kPairs[a][0]) = -f(a);
  }
  return m;
}

// omega+, eta+, theta+, omega-, eta-, theta- of an oriented frame (columns)
inline std::array<Vec6, 6> frame_forms(const Mat4& e) {
  Vec4 e1 = e.col(0), e2 = e.col(1), e3 = e.col(2), e4 = e.col(3);
  return {wedge(e1, e2) + wedge(e3, e4), wedge(e1, e3) + wedge(e4, e2), wedge(e1, e4) + wedge(e2, e3),
          wedge(e1, e2) - wedge(e3, e4), wedge(e1, e3) - wedge(e4, e2), wedge(e1, e4) - wedge(e2, e3)};
}

struct TwoFormOp {
  Mat6 matrix = Mat6::Zero();
  int orientation = 1;
};

inline TwoFormOp op_from_tensor(const Rank4& w, double tol = 1e-12) {
  auto rep = validate(w, SymmetryClass::riemann);
  if (rep.max() > tol * std::max(1.0, w.max_abs())) throw Error("asymmetric input");
  TwoFormOp op;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) op.matrix(a, b) = -w(kPairs[a][0], kPairs[a][1], kPairs[b][0], kPairs[b][1]);
  return op;
}

inline Rank4 tensor_from_op(const TwoFormOp& op) {
  Rank4 t;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      int i = kPairs[a][0], j = kPairs[a][1], k = kPairs[b][0], l = kPairs[b][1];
      double v = -0.5 * (op.matrix(a, b) + op.matrix(b, a));
      t(i, j, k, l) = v;
      t(j, i, k, l) = -v;
      t(i, j, l, k) = -v;
      t(j, i, l, k) = v;
    }
  return t;
}

// ---- algebraic Weyl tensors ---------------------------------------------

struct Spectrum {
  std::array<double, 3> sd{0, 0, 0};
  std::array<double, 3> asd{0, 0, 0};
};

inline std::array<double, 3> sorted_desc(std::array<double, 3> t) {
  std::sort(t.begin(), t.end(), std::greater<>());
  return t;
}

struct AlgWeyl {
  Rank4 tensor;
  std::optional<Spectrum> spectra;
};

inline AlgWeyl make_weyl(const Rank4& t, double tol = 1e-12) {
  auto rep = validate(t, SymmetryClass::weyl);
  if (rep.max() > tol * std::max(1.0, t.max_abs())) throw Error("not an algebraic Weyl tensor");
  return {t, std::nullopt};
}

// W = Riem - Ric.g + (R/6) g.g, the Weyl part for n = 4
inline Rank4 weyl_projection(const Rank4& riem, const Sym2& g, const Sym2& ric, double scal) {
  Rank4 w = riem - kulkarni_nomizu(ric, g) + (scal / 6.0) * kulkarni_nomizu(g, g);
  return w;
}

inline AlgWeyl weyl_from_riemann(const Rank4& riem, const Sym2& g, const Sym2& ric, double scal,
                                 double tol = 1e-12) {
  double scale = g.cwiseAbs().maxCoeff();
  if (!(std::abs(g.determinant()) > 1e-14 * std::pow(scale, 4))) throw Error("degenerate metric");
  if (validate(riem, SymmetryClass::riemann).max() > tol * std::max(1.0, riem.max_abs()))
    throw Error("asymmetric input");
  return {weyl_projection(riem, g, ric, scal), std::nullopt};
}

// Ricci contraction, scalar curvature and Weyl part of a Riemann-class tensor
inline AlgWeyl weyl_from_riemann(const Rank4& riem, const Sym2& g, double tol = 1e-12) {
  double scale = g.cwiseAbs().maxCoeff();
  if (!(std::abs(g.determinant()) > 1e-14 * std::pow(scale, 4))) throw Error("degenerate metric");
  Sym2 ginv = g.inverse();
  Sym2 ric = ricci_contraction(riem, ginv);
  double scal = (ginv.cwiseProduct(ric)).sum();
  return weyl_from_riemann(riem, g, ric, scal, tol);
}

inline AlgWeyl algweyl_from_spectrum(const std::array<double, 3>& sd, const std::array<double, 3>& asd,
                                     const Mat4& frame = Mat4::Identity()) {
  for (const auto* t : {&sd, &asd})
    if (std::abs((*t)[0] + (*t)[1] + (*t)[2]) > 1e-12) throw Error("trace-free violation");
  auto forms = frame_forms(frame);
  TwoFormOp op;
  for (int m = 0; m < 3; ++m) {
    op.matrix += 0.5 * sd[m] * forms[m] * forms[m].transpose();
    op.matrix += 0.5 * asd[m] * forms[m + 3] * forms[m + 3].transpose();
  }
  return {tensor_from_op(op), Spectrum{sorted_desc(sd), sorted_desc(asd)}};
}

}  // namespace weylglue

#endif
