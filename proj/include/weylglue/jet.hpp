#ifndef WEYLGLUE_JET_HPP
#define WEYLGLUE_JET_HPP

// Truncated Taylor polynomials in four variables.  A Jet<N> at x0 holds the
// coefficients c_a of f(x0 + e) = sum_a c_a e^a for |a| <= N, so partial
// derivatives come out exactly as a! c_a.  Every metric model in the library
// is built from these, which is how curvature gets exact derivatives.

#include <array>
#include <cmath>
#include <vector>

namespace weylglue {

constexpr int jet_size(int n) { return (n + 1) * (n + 2) * (n + 3) * (n + 4) / 24; }

template <int N>
struct JetTable {
  static constexpr int size = jet_size(N);
  std::array<std::array<int, 4>, size> exps{};
  std::array<int, size> degree{};
  std::array<double, size> fact{};
  std::array<int, (N + 1) * (N + 1) * (N + 1) * (N + 1)> lookup{};
  struct Term { int a, b, out; };
  std::vector<Term> products;

  static int slot(int e0, int e1, int e2, int e3) {
    return ((e0 * (N + 1) + e1) * (N + 1) + e2) * (N + 1) + e3;
  }

  JetTable() {
    lookup.fill(-1);
    int n = 0;
    // graded order: degree 0, then x0..x3, then degree 2, ...
    for (int d = 0; d <= N; ++d)
      for (int e0 = d; e0 >= 0; --e0)
        for (int e1 = d - e0; e1 >= 0; --e1)
          for (int e2 = d - e0 - e1; e2 >= 0; --e2) {
            int e3 = d - e0 - e1 - e2;
            exps[n] = {e0, e1, e2, e3};
            degree[n] = d;
            double f = 1;
            for (int e : exps[n])
              for (int k = 2; k <= e; ++k) f *= k;
            fact[n] = f;
            lookup[slot(e0, e1, e2, e3)] = n;
            ++n;
          }
    for (int a = 0; a < size; ++a)
      for (int b = 0; b < size; ++b) {
        if (degree[a] + degree[b] > N) continue;
        const auto& x = exps[a];
        const auto& y = exps[b];
        products.push_back({a, b, lookup[slot(x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3])]});
      }
  }

  int index(const std::array<int, 4>& e) const {
    if (e[0] + e[1] + e[2] + e[3] > N) return -1;
    return lookup[slot(e[0], e[1], e[2], e[3])];
  }

  static const JetTable& get() {
    static const JetTable table;
    return table;
  }
};

template <int N>
class Jet {
 public:
  static constexpr int order = N;
  static constexpr int size = jet_size(N);

  Jet() { c_.fill(0.0); }
  explicit Jet(double v) {
    c_.fill(0.0);
    c_[0] = v;
  }

  // the coordinate function x_i expanded at a point whose i-th entry is x0
  static Jet variable(int i, double x0) {
    Jet j(x0);
    if constexpr (N >= 1) j.c_[1 + i] = 1.0;
    return j;
  }

  double value() const { return c_[0]; }
  double coeff(int k) const { return c_[k]; }
  double& coeff(int k) { return c_[k]; }

  // partial derivative for the multi-index given as a list of axes
  template <class... Axes>
  double d(Axes... axes) const {
    std::array<int, 4> e{0, 0, 0, 0};
    (++e[axes], ...);
    const auto& t = JetTable<N>::get();
    int k = t.index(e);
    return k < 0 ? 0.0 : c_[k] * t.fact[k];
  }

  double derivative(const std::array<int, 4>& e) const {
    const auto& t = JetTable<N>::get();
    int k = t.index(e);
    return k < 0 ? 0.0 : c_[k] * t.fact[k];
  }

  Jet& operator+=(const Jet& o) {
    for (int k = 0; k < size; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k < size; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) { return a *= -1.0; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (const auto& t : JetTable<N>::get().products) r.c_[t.out] += a.c_[t.a] * b.c_[t.b];
    return r;
  }

  // g(u) for univariate g with derivatives g^(k)(u0), k = 0..N
  friend Jet compose(const std::array<double, N + 1>& g, const Jet& u) {
    Jet du = u;
    du.c_[0] = 0.0;
    double fk = 1;
    for (int k = 2; k <= N; ++k) fk *= k;
    Jet r(g[N] / fk);
    for (int k = N - 1; k >= 0; --k) {
      fk /= (k + 1);
      r = r * du;
      r.c_[0] += g[k] / fk;
    }
    return r;
  }

  friend Jet pow(const Jet& u, double p) {
    std::array<double, N + 1> g{};
    double u0 = u.c_[0];
    double coef = 1;
    for (int k = 0; k <= N; ++k) {
      g[k] = coef * std::pow(u0, p - k);
      coef *= (p - k);
    }
    return compose(g, u);
  }

  friend Jet sqrt(const Jet& u) { return pow(u, 0.5); }
  friend Jet reciprocal(const Jet& u) { return pow(u, -1.0); }

 private:
  std::array<double, jet_size(N)> c_;
};

// |x|^2 around x0, exact (it is a quadratic)
template <int N, class V>
Jet<N> radius_squared(const V& x0) {
  Jet<N> s;
  for (int i = 0; i < 4; ++i) {
    Jet<N> xi = Jet<N>::variable(i, x0[i]);
    s += xi * xi;
  }
  return s;
}

}  // namespace weylglue

#endif
