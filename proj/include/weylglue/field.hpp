#ifndef WEYLGLUE_FIELD_HPP
#define WEYLGLUE_FIELD_HPP

// Symmetric (0,2) fields on subsets of R^4 with exact derivatives to order 4.
// Metric charts are fields that are positive definite on their domain.

#include <memory>
#include <string>

#include "jet.hpp"
#include "tensor.hpp"

namespace weylglue {

template <int N>
using SymJet = std::array<std::array<Jet<N>, 4>, 4>;

template <int N>
void symmetrize_upper(SymJet<N>& h) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) h[i][j] = h[j][i];
}

struct Domain {
  enum class Kind { everywhere, box, annulus };
  Kind kind = Kind::everywhere;
  double lo = 0, hi = 0;  // box: lo <= x_i <= hi; annulus: lo <= |x| <= hi

  static Domain box(double lo, double hi) { return {Kind::box, lo, hi}; }
  static Domain annulus(double r0, double r1) { return {Kind::annulus, r0, r1}; }

  bool contains(const Vec4& x, double slack = 1e-12) const {
    switch (kind) {
      case Kind::everywhere: return true;
      case Kind::box: return x.minCoeff() >= lo - slack && x.maxCoeff() <= hi + slack;
      case Kind::annulus: {
        double r = x.norm();
        return r >= lo * (1 - slack) && r <= hi * (1 + slack);
      }
    }
    return false;
  }
};

class SymField {
 public:
  virtual ~SymField() = default;
  virtual SymJet<2> jet2(const Vec4& x) const = 0;
  virtual SymJet<3> jet3(const Vec4& x) const = 0;
  virtual SymJet<4> jet4(const Vec4& x) const = 0;
  virtual Domain domain() const { return {}; }

  template <int N>
  SymJet<N> jet(const Vec4& x) const {
    if constexpr (N == 2) return jet2(x);
    else if constexpr (N == 3) return jet3(x);
    else return jet4(x);
  }

  Sym2 eval(const Vec4& x) const {
    require(x);
    auto j = jet2(x);
    Sym2 m;
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) m(i, k) = j[i][k].value();
    return m;
  }

  // d^e h_ij at x, with |e| <= 4
  double derivative(const Vec4& x, int i, int j, const std::array<int, 4>& e) const {
    return jet4(x)[i][j].derivative(e);
  }

  void require(const Vec4& x) const {
    if (!domain().contains(x)) throw Error("point outside chart domain");
  }
};

enum class ChartKind { flat, cnc_model, inverted_model, scaled, glued, custom };

inline std::string to_string(ChartKind k) {
  switch (k) {
    case ChartKind::flat: return "flat";
    case ChartKind::cnc_model: return "cnc_model";
    case ChartKind::inverted_model: return "inverted_model";
    case ChartKind::scaled: return "scaled";
    case ChartKind::glued: return "glued";
    case ChartKind::custom: return "custom";
  }
  return "custom";
}

class MetricChart : public SymField {
 public:
  virtual ChartKind kind() const = 0;
};

// CRTP bridge: Derived provides template<int N> SymJet<N> make(const Vec4&)
template <class Derived, class Base = SymField>
class JetSource : public Base {
 public:
  SymJet<2> jet2(const Vec4& x) const override { return self().template make<2>(x); }
  SymJet<3> jet3(const Vec4& x) const override { return self().template make<3>(x); }
  SymJet<4> jet4(const Vec4& x) const override { return self().template make<4>(x); }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

// Quadratic form K_kl x^k x^l expanded at x0 (exact; coefficients written directly).
template <int N>
Jet<N> quadratic_jet(const Mat4& K, const Vec4& x0) {
  Jet<N> q(x0.dot(K * x0));
  if constexpr (N >= 1) {
    const auto& t = JetTable<N>::get();
    Vec4 g = (K + K.transpose()) * x0;
    for (int a = 0; a < 4; ++a) q.coeff(1 + a) = g(a);
    if constexpr (N >= 2)
      for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b) {
          std::array<int, 4> e{0, 0, 0, 0};
          ++e[a];
          ++e[b];
          q.coeff(t.index(e)) = a == b ? K(a, a) : K(a, b) + K(b, a);
        }
  }
  return q;
}

// the symmetric matrices K^{ij}_{kl} = 1/2 (W_kijl + W_lijk), so that
// W_kijl x^k x^l = x . K^{ij} x
struct WeylQuadratic {
  std::array<std::array<Mat4, 4>, 4> K;
  explicit WeylQuadratic(const Rank4& w) {
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) K[i][j](k, l) = 0.5 * (w(k, i, j, l) + w(l, i, j, k));
  }
  template <int N>
  SymJet<N> jet(const Vec4& x) const {
    SymJet<N> q;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) q[i][j] = quadratic_jet<N>(K[i][j], x);
    symmetrize_upper(q);
    return q;
  }
  Sym2 value(const Vec4& x) const {
    Sym2 m;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m(i, j) = x.dot(K[i][j] * x);
    return m;
  }
};

class ZeroField : public JetSource<ZeroField> {
 public:
  template <int N>
  SymJet<N> make(const Vec4&) const { return {}; }
};

// Components are polynomials of degree <= 4, stored as Taylor coefficients at 0.
class PolynomialField : public JetSource<PolynomialField> {
 public:
  using Coeffs = std::array<std::array<Jet<4>, 4>, 4>;
  PolynomialField() = default;
  explicit PolynomialField(const Coeffs& c, Domain d = {}) : c_(c), dom_(d) {
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < i; ++j) c_[i][j] = c_[j][i];
  }
  Domain domain() const override { return dom_; }

  template <int N>
  SymJet<N> make(const Vec4& x) const {
    const auto& t4 = JetTable<4>::get();
    // powers x_a^k as jets at x
    std::array<std::array<Jet<N>, 5>, 4> pw;
    for (int a = 0; a < 4; ++a) {
      pw[a][0] = Jet<N>(1.0);
      Jet<N> xa = Jet<N>::variable(a, x(a));
      for (int k = 1; k <= 4; ++k) pw[a][k] = pw[a][k - 1] * xa;
    }
    std::array<Jet<N>, jet_size(4)> mono;
    for (int m = 0; m < t4.size; ++m) {
      const auto& e = t4.exps[m];
      mono[m] = pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]] * pw[3][e[3]];
    }
    SymJet<N> h;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j)
        for (int m = 0; m < t4.size; ++m)
          if (c_[i][j].coeff(m) != 0.0) h[i][j] += c_[i][j].coeff(m) * mono[m];
    symmetrize_upper(h);
    return h;
  }

 private:
  Coeffs c_{};
  Domain dom_{};
};

// g = base + t * h
class PerturbedChart : public JetSource<PerturbedChart, MetricChart> {
 public:
  PerturbedChart(std::shared_ptr<const SymField> base, std::shared_ptr<const SymField> h, double t,
                 ChartKind kind = ChartKind::custom, std::optional<Domain> dom = std::nullopt)
      : base_(std::move(base)), h_(std::move(h)), t_(t), kind_(kind), dom_(dom) {}

  ChartKind kind() const override { return kind_; }
  Domain domain() const override { return dom_ ? *dom_ : h_->domain(); }

  template <int N>
  SymJet<N> make(const Vec4& x) const {
    SymJet<N> g = base_->jet<N>(x);
    if (t_ != 0.0) {
      SymJet<N> h = h_->jet<N>(x);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g[i][j] += t_ * h[i][j];
    }
    return g;
  }

 private:
  std::shared_ptr<const SymField> base_, h_;
  double t_;
  ChartKind kind_;
  std::optional<Domain> dom_;
};

class FlatChart : public JetSource<FlatChart, MetricChart> {
 public:
  explicit FlatChart(Domain d = {}) : dom_(d) {}
  ChartKind kind() const override { return ChartKind::flat; }
  Domain domain() const override { return dom_; }
  template <int N>
  SymJet<N> make(const Vec4&) const {
    SymJet<N> g;
    for (int i = 0; i < 4; ++i) g[i][i] = Jet<N>(1.0);
    return g;
  }

 private:
  Domain dom_;
};

// constant conformal rescaling: factor * g
class ScaledChart : public JetSource<ScaledChart, MetricChart> {
 public:
  ScaledChart(std::shared_ptr<const MetricChart> base, double factor) : base_(std::move(base)), f_(factor) {}
  ChartKind kind() const override { return ChartKind::scaled; }
  Domain domain() const override { return base_->domain(); }
  template <int N>
  SymJet<N> make(const Vec4& x) const {
    SymJet<N> g = base_->jet<N>(x);
    for (auto& row : g)
      for (auto& v : row) v *= f_;
    return g;
  }
  double factor() const { return f_; }

 private:
  std::shared_ptr<const MetricChart> base_;
  double f_;
};

}  // namespace weylglue

#endif
