#ifndef WEYLGLUE_DUALITY_HPP
#define WEYLGLUE_DUALITY_HPP

// Self-dual / anti-self-dual splitting of the Weyl operator, frames realizing
// prescribed eigenforms, and the interaction term between two Weyl tensors.

#include <Eigen/Eigenvalues>
#include <vector>

#include "tensor.hpp"

namespace weylglue {

// orthonormal basis of Lambda+ then Lambda-, as columns, from the standard frame
inline const Mat6& duality_basis() {
  static const Mat6 u = [] {
    auto f = frame_forms(Mat4::Identity());
    Mat6 m;
    for (int a = 0; a < 6; ++a) m.col(a) = f[a] / std::sqrt(2.0);
    return m;
  }();
  return u;
}

struct HodgeBlocks {
  Mat3 sd = Mat3::Zero();
  Mat3 asd = Mat3::Zero();
  double off_diagonal = 0;
};

inline HodgeBlocks hodge_split(const AlgWeyl& w, double tol = 1e-12) {
  Mat6 b = duality_basis().transpose() * op_from_tensor(w.tensor).matrix * duality_basis();
  HodgeBlocks h;
  h.sd = b.topLeftCorner<3, 3>();
  h.asd = b.bottomRightCorner<3, 3>();
  h.off_diagonal = b.topRightCorner<3, 3>().cwiseAbs().maxCoeff();
  double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (h.off_diagonal > tol * scale || std::abs(h.sd.trace()) > tol * scale || std::abs(h.asd.trace()) > tol * scale)
    throw Error("not an algebraic Weyl tensor");
  return h;
}

struct BlockEigen {
  std::array<double, 3> values;  // descending
  Mat3 vectors;                  // columns, det +1
};

// descending eigenvalues; each eigenvector has its largest-magnitude entry
// positive, then the last one is flipped if needed so that det = +1
inline BlockEigen block_eigen(const Mat3& block) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (block + block.transpose()));
  BlockEigen r;
  for (int m = 0; m < 3; ++m) {
    r.values[m] = es.eigenvalues()(2 - m);
    Eigen::Vector3d v = es.eigenvectors().col(2 - m);
    int k;
    v.cwiseAbs().maxCoeff(&k);
    if (v(k) < 0) v = -v;
    r.vectors.col(m) = v;
  }
  if (r.vectors.determinant() < 0) r.vectors.col(2) *= -1;
  return r;
}

struct Eigenforms {
  std::array<Vec6, 3> sd, asd;  // norm sqrt(2), in the lexicographic basis
  Spectrum spectrum;
};

inline Eigenforms eigenforms(const AlgWeyl& w) {
  HodgeBlocks h = hodge_split(w, 1e-10);
  BlockEigen p = block_eigen(h.sd), m = block_eigen(h.asd);
  Eigenforms e;
  const Mat6& u = duality_basis();
  for (int k = 0; k < 3; ++k) {
    e.sd[k] = std::sqrt(2.0) * u.leftCols<3>() * p.vectors.col(k);
    e.asd[k] = std::sqrt(2.0) * u.rightCols<3>() * m.vectors.col(k);
  }
  e.spectrum = {p.values, m.values};
  return e;
}

// Oriented orthonormal frame e whose forms omega, eta, theta (+ and -) are the
// given ones.  The frame is unique up to e -> -e; we fix trace(e) > 0.
inline Mat4 derdzinski_frame(const std::array<Vec6, 3>& sd, const std::array<Vec6, 3>& asd, double tol = 1e-8) {
  const Mat6& star = hodge_star();
  const Mat6& u = duality_basis();
  auto check_family = [&](const std::array<Vec6, 3>& f, double sign, int offset) {
    Mat3 coords;
    for (int a = 0; a < 3; ++a) {
      if ((star * f[a] - sign * f[a]).norm() > tol) throw Error("eigenform not in the expected half of the 2-forms");
      for (int b = 0; b < 3; ++b) {
        double ip = f[a].dot(f[b]);
        if (std::abs(ip - (a == b ? 2.0 : 0.0)) > tol) throw Error("eigenforms not orthogonal with norm sqrt(2)");
        coords(b, a) = u.col(offset + b).dot(f[a]) / std::sqrt(2.0);
      }
    }
    if (coords.determinant() < 0) throw Error("eigenforms not positively oriented");
  };
  check_family(sd, 1.0, 0);
  check_family(asd, -1.0, 3);

  Mat4 b12 = form_matrix(0.5 * (sd[0] + asd[0]));
  Mat4 b13 = form_matrix(0.5 * (sd[1] + asd[1]));
  Mat4 b14 = form_matrix(0.5 * (sd[2] + asd[2]));
  // -B^2 projects onto the plane of a decomposable unit 2-form
  Mat4 p = -(b12 * b12) - (b13 * b13);
  Eigen::SelfAdjointEigenSolver<Mat4> es(p);
  Vec4 a1 = es.eigenvectors().col(3);
  Mat4 e;
  e.col(0) = a1;
  e.col(1) = -b12 * a1;
  e.col(2) = -b13 * a1;
  e.col(3) = -b14 * a1;
  if (e.trace() < 0 || (e.trace() == 0 && e.col(0).maxCoeff() < -e.col(0).minCoeff())) e = -e;

  if ((e.transpose() * e - Mat4::Identity()).cwiseAbs().maxCoeff() > 1e-9 || e.determinant() < 0)
    throw Error("eigenforms do not come from an oriented orthonormal frame");
  auto f = frame_forms(e);
  for (int k = 0; k < 3; ++k)
    if ((f[k] - sd[k]).norm() > 1e-9 || (f[k + 3] - asd[k]).norm() > 1e-9)
      throw Error("eigenforms do not come from an oriented orthonormal frame");
  return e;
}

// sum_{ijkl} Z_kijl (M_kijl + M_lijk)
inline double interaction_star(const AlgWeyl& wm, const AlgWeyl& wz) {
  const Rank4& m = wm.tensor;
  const Rank4& z = wz.tensor;
  double s = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) s += z(k, i, j, l) * (m(k, i, j, l) + m(l, i, j, k));
  return s;
}

struct AlignedPair {
  AlgWeyl wm, wz;        // both expressed in the shared frame
  Mat4 frame_m, frame_z;  // eigenframes of the inputs, in input coordinates
  Mat4 shared_frame = Mat4::Identity();
  Spectrum spectra_m, spectra_z;
};

struct AlignResult {
  AlignedPair pair;
  double value = 0;
};

inline double aligned_value(const Spectrum& a, const Spectrum& b) {
  double s = 0;
  for (int k = 0; k < 3; ++k) s += a.sd[k] * b.sd[k] + a.asd[k] * b.asd[k];
  return 6 * s;
}

inline AlignResult align_and_interact(const AlgWeyl& wm, const AlgWeyl& wz) {
  Eigenforms em = eigenforms(wm), ez = eigenforms(wz);
  AlignResult r;
  r.pair.frame_m = derdzinski_frame(em.sd, em.asd);
  r.pair.frame_z = derdzinski_frame(ez.sd, ez.asd);
  r.pair.wm = {rotate(wm.tensor, r.pair.frame_m), em.spectrum};
  r.pair.wz = {rotate(wz.tensor, r.pair.frame_z), ez.spectrum};
  r.pair.spectra_m = em.spectrum;
  r.pair.spectra_z = ez.spectrum;
  r.value = 1.5 * r.pair.wm.tensor.dot(r.pair.wz.tensor);
  return r;
}

struct PositivityReport {
  double bound = 0;
  double aligned_value = 0;
  bool lcf_m = false, lcf_z = false;
  bool excluded = false;  // one purely self-dual, the other purely anti-self-dual
  bool lcf() const { return lcf_m || lcf_z; }
  bool hypotheses_hold() const { return !lcf() && !excluded; }
};

inline PositivityReport positivity_bound(const AlgWeyl& wm, const AlgWeyl& wz, double zero_tol = 1e-12) {
  HodgeBlocks m = hodge_split(wm, 1e-10), z = hodge_split(wz, 1e-10);
  double mp = m.sd.norm(), mm = m.asd.norm(), zp = z.sd.norm(), zm = z.asd.norm();
  PositivityReport r;
  r.bound = 3 * (mp * zp + mm * zm);
  r.aligned_value = align_and_interact(wm, wz).value;
  r.lcf_m = mp <= zero_tol && mm <= zero_tol;
  r.lcf_z = zp <= zero_tol && zm <= zero_tol;
  // blocks are compared with their tensor's size, since a rotated input
  // carries roundoff in the block that should vanish
  double sm = std::max(1.0, std::hypot(mp, mm)), sz = std::max(1.0, std::hypot(zp, zm));
  bool m_sd = mm <= zero_tol * sm, m_asd = mp <= zero_tol * sm;
  bool z_sd = zm <= zero_tol * sz, z_asd = zp <= zero_tol * sz;
  r.excluded = !r.lcf() && ((m_sd && z_asd) || (m_asd && z_sd));
  // the blocks that meet are zero by the same test that set the flag
  if (r.excluded) r.aligned_value = 0.0;
  return r;
}

// reflection e1 -> -e1 swaps the self-dual and anti-self-dual parts
inline AlgWeyl reverse_orientation(const AlgWeyl& w) {
  AlgWeyl r = w;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          int flips = (i == 0) + (j == 0) + (k == 0) + (l == 0);
          if (flips % 2) r.tensor(i, j, k, l) = -w.tensor(i, j, k, l);
        }
  if (w.spectra) r.spectra = Spectrum{w.spectra->asd, w.spectra->sd};
  return r;
}

}  // namespace weylglue

#endif
