#ifndef WEYLGLUE_QUADRATURE_HPP
#define WEYLGLUE_QUADRATURE_HPP

// Deterministic rules on S^3, on radial intervals and on shells, plus a small
// thread pool whose reductions do not depend on the thread count.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <span>
#include <thread>
#include <vector>

#include "tensor.hpp"

namespace weylglue {

struct Rule1D {
  std::vector<double> x, w;
};

// Gauss-Legendre on [-1, 1], Newton on P_n from the Chebyshev guesses
inline Rule1D gauss_legendre(int n) {
  if (n < 1) throw Error("quadrature needs at least one node");
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)), dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int k = 1; k <= n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2 * k - 1) * z * p1 - (k - 1) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1);
      double step = p0 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = r.w[n - 1 - i] = 2 / ((1 - z * z) * dp * dp);
  }
  return r;
}

inline Rule1D gauss_legendre(int n, double lo, double hi) {
  Rule1D r = gauss_legendre(n);
  double h = 0.5 * (hi - lo), m = 0.5 * (hi + lo);
  for (int i = 0; i < n; ++i) {
    r.x[i] = m + h * r.x[i];
    r.w[i] *= h;
  }
  return r;
}

// Nodes in log r for shells that span decades; weights still integrate dr.
inline Rule1D log_radial(int n, double r0, double r1) {
  if (!(r0 > 0 && r1 > r0)) throw Error("log radial rule needs 0 < r0 < r1");
  Rule1D u = gauss_legendre(n, std::log(r0), std::log(r1));
  for (int i = 0; i < n; ++i) {
    u.x[i] = std::exp(u.x[i]);
    u.w[i] *= u.x[i];
  }
  return u;
}

// Product rule on the unit S^3 in hyperspherical angles
//   z = (cos psi, sin psi cos th, sin psi sin th cos ph, sin psi sin th sin ph).
// psi uses the Gauss rule for the sin^2 weight (nodes k pi/(L+1)), th is
// Gauss-Legendre in cos th, ph is the 2L-point trapezoid.  Exact for
// polynomials in z of degree <= 2L-1.
struct SphereRule {
  int level = 0;
  std::vector<Vec4> z;
  std::vector<double> w;

  static SphereRule make(int L) {
    if (L < 2) throw Error("sphere rule level must be >= 2");
    SphereRule s;
    s.level = L;
    const double pi = std::numbers::pi;
    Rule1D th = gauss_legendre(L);
    int nph = 2 * L;
    for (int k = 1; k <= L; ++k) {
      double psi = k * pi / (L + 1), sp = std::sin(psi);
      double wpsi = pi / (L + 1) * sp * sp;
      for (int j = 0; j < L; ++j) {
        double ct = th.x[j], st = std::sqrt(std::max(0.0, 1 - ct * ct));
        for (int m = 0; m < nph; ++m) {
          double ph = 2 * pi * (m + 0.5) / nph;
          s.z.push_back(Vec4(std::cos(psi), sp * ct, sp * st * std::cos(ph), sp * st * std::sin(ph)));
          s.w.push_back(wpsi * th.w[j] * (2 * pi / nph));
        }
      }
    }
    return s;
  }

  std::size_t size() const { return z.size(); }
};

// int_{S^3} z^mu z^nu z^k z^l dsigma, indices 0-based
inline double sphere_moment(int mu, int nu, int k, int l) {
  for (int i : {mu, nu, k, l})
    if (i < 0 || i > 3) throw Error("sphere moment index out of range");
  auto d = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  return std::numbers::pi * std::numbers::pi / 12 * (d(mu, nu) * d(k, l) + d(mu, k) * d(nu, l) + d(mu, l) * d(nu, k));
}

// closed form of int_{S^3} z^e for a monomial exponent e
inline double sphere_monomial(const std::array<int, 4>& e) {
  for (int v : e)
    if (v % 2) return 0.0;
  // 2 prod Gamma((e_i+1)/2) / Gamma((|e|+4)/2)
  double s = 0;
  int n = 0;
  for (int v : e) {
    s += std::lgamma((v + 1) / 2.0);
    n += v;
  }
  return 2 * std::exp(s - std::lgamma((n + 4) / 2.0));
}

// ---- deterministic parallel evaluation --------------------------------------

inline unsigned thread_cap() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("WEYLGLUE_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<unsigned>(std::min<long>(v, hw));
  }
  return hw;
}

// out[i] = f(i) for i < n, split in contiguous blocks.  The first exception
// thrown by any block is rethrown here.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& f) {
  std::vector<T> out(n);
  unsigned nt = std::min<std::size_t>(thread_cap(), std::max<std::size_t>(1, n / 64));
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::exception_ptr> errs(nt);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < nt; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = n * t / nt; i < n * (t + 1) / nt; ++i) out[i] = f(i);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

// pairwise summation, so the result is fixed by the order of v alone
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0;
    for (double x : v) s += x;
    return s;
  }
  std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

}  // namespace weylglue

#endif
