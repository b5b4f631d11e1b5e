/*
 * Copyright 2026 the fcmi authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FCMI_LINALG_HPP
#define FCMI_LINALG_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <limits>

#include "fcmi/errors.hpp"
#include "fcmi/rng.hpp"

namespace fcmi {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using CLD = std::complex<long double>;
using CMatLD = Eigen::Matrix<CLD, Eigen::Dynamic, Eigen::Dynamic>;
using CVecLD = Eigen::Matrix<CLD, Eigen::Dynamic, 1>;

/// Reference inverse via LU with partial pivoting. This is the oracle every
/// error report is measured against.
inline Mat lu_inverse(const Mat& a) {
  if (a.rows() != a.cols()) throw ParameterError("lu_inverse: matrix not square");
  Eigen::PartialPivLU<Mat> lu(a);
  // PartialPivLU does not signal singularity; check the factor diagonal.
  const Vec diag = lu.matrixLU().diagonal().cwiseAbs();
  if (diag.minCoeff() <= a.norm() * 1e-300)
    throw SingularityError("lu_inverse: numerically singular matrix");
  return lu.inverse();
}

inline CMat lu_inverse(const CMat& a) {
  if (a.rows() != a.cols()) throw ParameterError("lu_inverse: matrix not square");
  return a.partialPivLu().inverse();
}

/// Largest singular value by power iteration on A^T A.
inline double spectral_norm(const Mat& a, double tol = 1e-8,
                            int max_iters = 1000, std::uint64_t seed = 0x5eedu) {
  if (a.size() == 0) return 0.0;
  Rng rng(seed);
  Vec v(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  v.normalize();
  double sigma = 0.0;
  for (int t = 0; t < max_iters; ++t) {
    Vec w = a.transpose() * (a * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    w /= nw;
    const double s = (a * w).norm();
    if (std::abs(s - sigma) <= tol * s) return s;
    sigma = s;
    v = w;
  }
  return sigma;
}

struct SingularPair {
  double min = 0.0;
  double max = 0.0;
};

/// Extreme singular values. Full SVD at desk scale (N <= 512), power and
/// inverse iteration beyond that.
inline SingularPair singular_extremes(const Mat& a, double tol = 1e-6) {
  SingularPair out;
  if (a.rows() <= 512 && a.cols() <= 512) {
    Eigen::JacobiSVD<Mat> svd(a);
    out.max = svd.singularValues()(0);
    out.min = svd.singularValues()(svd.singularValues().size() - 1);
    return out;
  }
  out.max = spectral_norm(a, tol);
  // Inverse power iteration on A^T A through an LU solve.
  Eigen::PartialPivLU<Mat> lu(a.transpose() * a);
  Rng rng(0xabcdu);
  Vec v(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  v.normalize();
  double lambda = 0.0;
  for (int t = 0; t < 1000; ++t) {
    Vec w = lu.solve(v);
    const double nw = w.norm();
    if (!std::isfinite(nw) || nw == 0.0)
      throw SingularityError("singular_extremes: inverse iteration broke down");
    w /= nw;
    const double l = w.dot(a.transpose() * (a * w));
    if (std::abs(l - lambda) <= tol * std::abs(l)) { lambda = l; break; }
    lambda = l;
    v = w;
  }
  out.min = std::sqrt(std::max(lambda, 0.0));
  return out;
}

inline double condition_number(const Mat& a) {
  const SingularPair s = singular_extremes(a);
  if (s.min <= 0.0) return std::numeric_limits<double>::infinity();
  return s.max / s.min;
}

inline double condition_number(const CMat& a) {
  Eigen::JacobiSVD<CMat> svd(a);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / sv(sv.size() - 1);
}

/// Entry count of |a - b| above the floating-point support threshold.
inline long support_diff(const Mat& a, const Mat& b, double tol = 1e-9) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ParameterError("support_diff: shape mismatch");
  return ((a - b).cwiseAbs().array() > tol).count();
}

inline bool all_finite(const Mat& a) { return a.allFinite(); }
inline bool all_finite(const CMat& a) { return a.allFinite(); }

/// Strips an imaginary residue, throwing when it exceeds `tol` relative to
/// the matrix scale.
inline Mat strip_imaginary(const CMat& a, double tol, const char* where) {
  const double scale = a.norm();
  const double resid = a.imag().norm();
  if (scale > 0.0 && resid > tol * scale)
    throw NumericalIntegrityError(std::string(where) +
                                  ": imaginary residue " + std::to_string(resid / scale) +
                                  " exceeds tolerance");
  return a.real();
}

}  // namespace fcmi

#endif  // FCMI_LINALG_HPP
