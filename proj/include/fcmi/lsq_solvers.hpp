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

#ifndef FCMI_LSQ_SOLVERS_HPP
#define FCMI_LSQ_SOLVERS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "fcmi/errors.hpp"
#include "fcmi/linalg.hpp"

namespace fcmi {

// Iterative least-squares engines behind the column estimator: steepest
// descent on f(b) = ||Ab - y||^2 with gradient-norm termination, and CG on
// the normal equations with iterate-displacement termination.

enum class Method { kSd, kCg, kLuOracle };
enum class StepRule { kExactLineSearch, kFixedStep };

struct SolverConfig {
  Method method = Method::kSd;
  double epsilon = 1e-8;   // gradient norm (SD) or iterate displacement (CG)
  long max_iters = 0;      // 0 resolves to 10N for SD, N for CG
  StepRule step_rule = StepRule::kExactLineSearch;
  double fixed_step = 0.0;          // 0 resolves to 1/sigma_max(A)^2
  std::uint64_t seed = 0;           // reproducibility tag carried into traces
  bool spectral_path = false;       // SD block runs in the eigenbasis of A^T A
};

struct SolveTrace {
  long iterations = 0;
  double final_grad_norm = 0.0;
  double final_residual = 0.0;  // ||A b - y||_2
  bool converged = false;
};

namespace detail {
inline long resolve_max_iters(const SolverConfig& cfg, Eigen::Index n, bool sd) {
  if (cfg.max_iters > 0) return cfg.max_iters;
  return sd ? 10 * static_cast<long>(n) : static_cast<long>(n);
}
}  // namespace detail

/// Steepest descent on ||Ab - y||^2 from b = 0, stopping at
/// ||grad f|| <= epsilon. The observer, when set, sees (iteration, f) after
/// every step.
inline std::pair<Vec, SolveTrace> sd_solve(
    const Mat& a, const Vec& y, const SolverConfig& cfg,
    const std::function<void(long, double)>& observer = nullptr) {
  if (a.size() == 0 || a.norm() == 0.0) throw ParameterError("sd_solve: A is zero");
  if (a.rows() != y.size()) throw ParameterError("sd_solve: shape mismatch");
  const long max_iters = detail::resolve_max_iters(cfg, a.cols(), true);

  double fixed = cfg.fixed_step;
  if (cfg.step_rule == StepRule::kFixedStep && fixed <= 0.0) {
    const double smax = spectral_norm(a);
    fixed = 1.0 / (smax * smax);
  }

  Vec b = Vec::Zero(a.cols());
  Vec r = -y;                       // A b - y at b = 0
  Vec g = 2.0 * (a.transpose() * r);
  SolveTrace trace;
  long t = 0;
  for (; t < max_iters; ++t) {
    const double gn = g.norm();
    if (gn <= cfg.epsilon) { trace.converged = true; break; }
    Vec step;
    if (cfg.step_rule == StepRule::kExactLineSearch) {
      const Vec ag = a * g;
      const double denom = 2.0 * ag.squaredNorm();
      if (denom <= 0.0) throw SingularityError("sd_solve: flat direction");
      step = (gn * gn / denom) * g;
    } else {
      step = fixed * g;
    }
    b -= step;
    r = a * b - y;
    g = 2.0 * (a.transpose() * r);
    if (!g.allFinite() || !b.allFinite())
      throw DivergenceError("sd_solve: non-finite iterate", t + 1);
    if (observer) observer(t + 1, r.squaredNorm());
  }
  trace.iterations = t;
  trace.final_grad_norm = g.norm();
  trace.final_residual = (a * b - y).norm();
  if (t >= max_iters && !trace.converged) trace.converged = false;
  return {std::move(b), trace};
}

/// CG on the normal equations A^T A b = A^T y from b = 0, stopping when the
/// iterate displacement ||b_t - b_{t-1}|| falls to epsilon.
inline std::pair<Vec, SolveTrace> cg_solve_normal(const Mat& a, const Vec& y,
                                                  const SolverConfig& cfg) {
  if (a.size() == 0) throw ParameterError("cg_solve_normal: empty matrix");
  if (a.rows() != y.size()) throw ParameterError("cg_solve_normal: shape mismatch");
  const long max_iters = detail::resolve_max_iters(cfg, a.cols(), false);

  Vec b = Vec::Zero(a.cols());
  Vec r = a.transpose() * y;  // residual of the normal equations at b = 0
  Vec p = r;
  double rs = r.squaredNorm();
  SolveTrace trace;
  long t = 0;
  for (; t < max_iters; ++t) {
    if (rs == 0.0) { trace.converged = true; break; }
    const Vec mp = a.transpose() * (a * p);
    const double curvature = p.dot(mp);
    if (curvature <= 0.0)
      throw SingularityError("cg_solve_normal: nonpositive curvature, matrix is "
                             "numerically rank-deficient");
    const double alpha = rs / curvature;
    b += alpha * p;
    const double displacement = std::abs(alpha) * p.norm();
    r -= alpha * mp;
    const double rs_new = r.squaredNorm();
    p = r + (rs_new / rs) * p;
    rs = rs_new;
    if (!b.allFinite()) throw DivergenceError("cg_solve_normal: non-finite iterate", t + 1);
    if (displacement <= cfg.epsilon) { trace.converged = true; ++t; break; }
  }
  trace.iterations = t;
  trace.final_grad_norm = 2.0 * (a.transpose() * (a * b - y)).norm();
  trace.final_residual = (a * b - y).norm();
  return {std::move(b), trace};
}

struct Preconditioned {
  double p = 1.0;  // approx 1/sigma_min(A)
  Mat scaled;      // p * A
};

/// Scalar preconditioning: run downstream work on pA with p ~ 1/sigma_min,
/// then rescale results by p.
inline Preconditioned precondition_scale(const Mat& a) {
  const SingularPair s = singular_extremes(a);
  if (s.min < 1e-13 * s.max)
    throw SingularityError("precondition_scale: matrix numerically singular");
  Preconditioned out;
  out.p = 1.0 / s.min;
  out.scaled = out.p * a;
  return out;
}

// ---------------------------------------------------------------------------
// Grid solvers: one pass per column records the iterate at the first crossing
// of each tolerance in a descending grid. The trajectory for a looser
// tolerance is a prefix of the tighter one, so a single pass reproduces the
// per-epsilon runs exactly.

struct GridOptions {
  std::vector<double> eps;          // descending tolerances
  long max_col_iters = 30'000'000;  // per-column cap
  StepRule step_rule = StepRule::kExactLineSearch;
  int cg_sustain = 5;  // consecutive iterations the displacement must stay low
};

struct GridResult {
  std::vector<Mat> estimates;            // one N x m matrix per tolerance
  std::vector<std::vector<long>> iters;  // [eps][column]
  std::vector<bool> capped;              // per column
  Vec eigenvalues;                       // spectrum of A^T A (SD path only)
};

/// Steepest descent over a tolerance grid, run per column in the eigenbasis
/// of A^T A. The iteration is the same exact-line-search recurrence expressed
/// in rotated coordinates; the gradient is recomputed at every candidate
/// crossing so drift cannot fake a termination.
inline GridResult sd_grid_solve(const Mat& a, const Mat& targets, const GridOptions& opt) {
  if (opt.eps.empty()) throw ParameterError("sd_grid_solve: empty tolerance grid");
  for (std::size_t i = 1; i < opt.eps.size(); ++i)
    if (opt.eps[i] >= opt.eps[i - 1])
      throw ParameterError("sd_grid_solve: tolerances must be strictly descending");
  const Eigen::Index n = a.cols(), m = targets.cols();

  Eigen::SelfAdjointEigenSolver<Mat> es(a.transpose() * a);
  if (es.info() != Eigen::Success)
    throw SingularityError("sd_grid_solve: eigendecomposition failed");
  const Vec lam = es.eigenvalues();
  const Mat& q = es.eigenvectors();
  const Mat c_all = q.transpose() * (a.transpose() * targets);

  GridResult out;
  out.eigenvalues = lam;
  out.estimates.assign(opt.eps.size(), Mat::Zero(n, m));
  out.iters.assign(opt.eps.size(), std::vector<long>(static_cast<std::size_t>(m), 0));
  out.capped.assign(static_cast<std::size_t>(m), false);

  const double lam_max = lam.maxCoeff();
  const double fixed = 1.0 / lam_max;

  Vec b(n), g(n), lg(n);
  for (Eigen::Index col = 0; col < m; ++col) {
    const Vec c = c_all.col(col);
    b.setZero();
    g = -2.0 * c;
    std::size_t level = 0;
    long t = 0;
    while (level < opt.eps.size() && t < opt.max_col_iters) {
      double gn = g.norm();
      if (gn <= opt.eps[level]) {
        // confirm against the exact gradient before recording
        g = 2.0 * (lam.cwiseProduct(b) - c);
        gn = g.norm();
        while (level < opt.eps.size() && gn <= opt.eps[level]) {
          out.estimates[level].col(col) = b;
          out.iters[level][static_cast<std::size_t>(col)] = t;
          ++level;
        }
        if (level >= opt.eps.size()) break;
      }
      lg = lam.cwiseProduct(g);
      double xi;
      if (opt.step_rule == StepRule::kExactLineSearch) {
        const double denom = 2.0 * g.dot(lg);
        if (denom <= 0.0) throw SingularityError("sd_grid_solve: flat direction");
        xi = gn * gn / denom;
      } else {
        xi = fixed;
      }
      b -= xi * g;
      g -= (2.0 * xi) * lg;
      ++t;
      if ((t & 4095) == 0) g = 2.0 * (lam.cwiseProduct(b) - c);  // drift refresh
    }
    if (level < opt.eps.size()) {
      out.capped[static_cast<std::size_t>(col)] = true;
      for (; level < opt.eps.size(); ++level) {
        out.estimates[level].col(col) = b;
        out.iters[level][static_cast<std::size_t>(col)] = t;
      }
    }
  }
  for (auto& est : out.estimates) est = q * est;  // back to the original basis
  return out;
}

/// CG-on-normal-equations over a tolerance grid. A crossing counts once the
/// displacement has stayed at or below the tolerance for `cg_sustain`
/// consecutive iterations; single-iteration dips during the stagnation
/// plateau would otherwise stop the solver far from the recorded accuracy.
inline GridResult cg_grid_solve(const Mat& a, const Mat& targets, const GridOptions& opt) {
  if (opt.eps.empty()) throw ParameterError("cg_grid_solve: empty tolerance grid");
  const Eigen::Index n = a.cols(), m = targets.cols();
  const Mat gram = a.transpose() * a;

  GridResult out;
  out.estimates.assign(opt.eps.size(), Mat::Zero(n, m));
  out.iters.assign(opt.eps.size(), std::vector<long>(static_cast<std::size_t>(m), 0));
  out.capped.assign(static_cast<std::size_t>(m), false);

  for (Eigen::Index col = 0; col < m; ++col) {
    Vec b = Vec::Zero(n);
    Vec r = a.transpose() * targets.col(col);
    Vec p = r;
    double rs = r.squaredNorm();
    std::size_t level = 0;
    int streak = 0;
    long t = 0;
    while (level < opt.eps.size() && t < opt.max_col_iters) {
      if (rs == 0.0) break;
      const Vec mp = gram * p;
      const double curvature = p.dot(mp);
      if (curvature <= 0.0) break;
      const double alpha = rs / curvature;
      b += alpha * p;
      const double displacement = std::abs(alpha) * p.norm();
      r -= alpha * mp;
      const double rs_new = r.squaredNorm();
      p = r + (rs_new / rs) * p;
      rs = rs_new;
      ++t;
      streak = displacement <= opt.eps[level] ? streak + 1 : 0;
      while (level < opt.eps.size() && displacement <= opt.eps[level] &&
             streak >= opt.cg_sustain) {
        out.estimates[level].col(col) = b;
        out.iters[level][static_cast<std::size_t>(col)] = t;
        ++level;
      }
    }
    if (level < opt.eps.size()) {
      out.capped[static_cast<std::size_t>(col)] = true;
      for (; level < opt.eps.size(); ++level) {
        out.estimates[level].col(col) = b;
        out.iters[level][static_cast<std::size_t>(col)] = t;
      }
    }
  }
  return out;
}

}  // namespace fcmi

#endif  // FCMI_LSQ_SOLVERS_HPP
