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

#ifndef FCMI_INVERSE_CORE_HPP
#define FCMI_INVERSE_CORE_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fcmi/errors.hpp"
#include "fcmi/linalg.hpp"
#include "fcmi/lsq_solvers.hpp"

namespace fcmi {

// Column-wise inverse estimation: column i of A^{-1} solves
// min_b ||A b - e_i||^2, so any least-squares engine yields the inverse one
// column at a time. The same machinery estimates the left pseudoinverse
// through the Gram matrix.

struct InverseEstimate {
  Mat matrix;                        // N x N (or N x columns for a sub-range)
  std::vector<SolveTrace> traces;    // one per estimated column
  SolverConfig config;
  Eigen::Index first_column = 0;     // sub-range support for per-worker tasks
};

/// Runs Algorithm-style column estimation. `first_column`/`num_columns`
/// restrict to a consecutive block, which is exactly a worker's task.
inline InverseEstimate estimate_inverse(const Mat& a, const SolverConfig& cfg,
                                        Eigen::Index first_column = 0,
                                        Eigen::Index num_columns = -1) {
  if (a.rows() != a.cols()) throw ParameterError("estimate_inverse: matrix not square");
  const Eigen::Index n = a.rows();
  if (num_columns < 0) num_columns = n - first_column;
  if (first_column < 0 || first_column + num_columns > n)
    throw ParameterError("estimate_inverse: column range out of bounds");
  {
    const SingularPair s = singular_extremes(a);
    if (!(s.min > 0.0) || s.max / s.min >= 1e12)
      throw SingularityError("estimate_inverse: condition estimate above 1e12");
  }

  InverseEstimate est;
  est.config = cfg;
  est.first_column = first_column;
  est.matrix.resize(n, num_columns);
  est.traces.resize(static_cast<std::size_t>(num_columns));

  if (cfg.method == Method::kLuOracle) {
    Eigen::PartialPivLU<Mat> lu(a);
    for (Eigen::Index j = 0; j < num_columns; ++j) {
      Vec e = Vec::Zero(n);
      e(first_column + j) = 1.0;
      est.matrix.col(j) = lu.solve(e);
      est.traces[static_cast<std::size_t>(j)] = {0, 0.0,
          (a * est.matrix.col(j) - e).norm(), true};
    }
    return est;
  }

  if (cfg.method == Method::kSd && cfg.spectral_path) {
    Mat targets = Mat::Zero(n, num_columns);
    for (Eigen::Index j = 0; j < num_columns; ++j) targets(first_column + j, j) = 1.0;
    GridOptions opt;
    opt.eps = {cfg.epsilon};
    opt.max_col_iters = detail::resolve_max_iters(cfg, n, true);
    opt.step_rule = cfg.step_rule;
    GridResult grid = sd_grid_solve(a, targets, opt);
    est.matrix = grid.estimates[0];
    for (Eigen::Index j = 0; j < num_columns; ++j) {
      const auto cj = static_cast<std::size_t>(j);
      Vec e = Vec::Zero(n);
      e(first_column + j) = 1.0;
      const Vec r = a * est.matrix.col(j) - e;
      est.traces[cj] = {grid.iters[0][cj], 2.0 * (a.transpose() * r).norm(), r.norm(),
                        !grid.capped[cj]};
    }
    return est;
  }

  for (Eigen::Index j = 0; j < num_columns; ++j) {
    Vec e = Vec::Zero(n);
    e(first_column + j) = 1.0;
    try {
      auto [b, trace] = cfg.method == Method::kCg ? cg_solve_normal(a, e, cfg)
                                                  : sd_solve(a, e, cfg);
      est.matrix.col(j) = b;
      est.traces[static_cast<std::size_t>(j)] = trace;
    } catch (const DivergenceError& ex) {
      throw DivergenceError("estimate_inverse: column " +
                            std::to_string(first_column + j) + ": " + ex.what(),
                            ex.iteration());
    }
  }
  return est;
}

struct ErrorReport {
  double err_l2 = 0.0;   // spectral-norm error
  double err_f = 0.0;    // Frobenius error
  double err_rf = 0.0;   // relative Frobenius error
  long support_diff = 0; // entries differing beyond 1e-9
};

inline ErrorReport error_report(const Mat& approx, const Mat& reference_inverse) {
  if (approx.rows() != reference_inverse.rows() || approx.cols() != reference_inverse.cols())
    throw ParameterError("error_report: shape mismatch");
  ErrorReport rep;
  const Mat diff = approx - reference_inverse;
  rep.err_l2 = spectral_norm(diff);
  rep.err_f = diff.norm();
  const double ref = reference_inverse.norm();
  rep.err_rf = ref > 0.0 ? rep.err_f / ref : rep.err_f;
  rep.support_diff = support_diff(approx, reference_inverse);
  return rep;
}

enum class BoundKind { kSd, kCg, kPseudoinverseSd };

struct BoundReport {
  BoundKind kind = BoundKind::kSd;
  double err_f_bound = 0.0;
  double err_rf_bound = 0.0;  // unset (0) for the CG bound
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

/// Closed-form error bounds for the stated termination criteria:
///   SD:   err_F <= eps sqrt(N/2) / sigma_min^2,  err_rF <= eps sqrt(N/2) / sigma_min
///   CG:   err_F <= N eps
///   pinv: err_F <= sqrt(M) eps kappa / (sqrt 2 sigma_min^3),
///         err_rF <= sqrt(M) eps kappa / (sqrt 2 sigma_min^2)
inline BoundReport theoretical_bounds(const Mat& a, double epsilon, BoundKind kind) {
  BoundReport rep;
  rep.kind = kind;
  const SingularPair s = singular_extremes(a);
  rep.sigma_min = s.min;
  rep.sigma_max = s.max;
  const double n = static_cast<double>(a.rows());
  const double m = static_cast<double>(a.cols());
  switch (kind) {
    case BoundKind::kSd:
      rep.err_f_bound = epsilon * std::sqrt(n / 2.0) / (s.min * s.min);
      rep.err_rf_bound = epsilon * std::sqrt(n / 2.0) / s.min;
      break;
    case BoundKind::kCg:
      rep.err_f_bound = n * epsilon;
      rep.err_rf_bound = 0.0;
      break;
    case BoundKind::kPseudoinverseSd: {
      const double kappa = s.max / s.min;
      rep.err_f_bound = std::sqrt(m) * epsilon * kappa /
                        (std::sqrt(2.0) * s.min * s.min * s.min);
      rep.err_rf_bound = std::sqrt(m) * epsilon * kappa / (std::sqrt(2.0) * s.min * s.min);
      break;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Block partitioning with the transport-padding rule: splitting C columns
// into `count` blocks, the first count - (C mod count) blocks are one column
// short and get a single zero column appended, so every block ships with the
// same width ceil(C/count). Reconstruction strips the padding exactly.

struct BlockPartition {
  std::vector<Mat> blocks;
  Eigen::Index original_cols = 0;
  Eigen::Index block_width = 0;          // common width after padding
  std::vector<std::uint8_t> padded;      // per block: 1 if a zero column was appended
  Eigen::Index pad_cols = 0;             // total appended zero columns
};

inline BlockPartition partition_blocks(const Mat& mx, std::size_t count) {
  if (count < 1) throw ParameterError("partition_blocks: count must be >= 1");
  const Eigen::Index c = mx.cols();
  if (static_cast<Eigen::Index>(count) > c && c > 0 && count != static_cast<std::size_t>(c)) {
    // More blocks than columns still works: short blocks are width-1 zeros.
  }
  BlockPartition out;
  out.original_cols = c;
  const Eigen::Index base = c / static_cast<Eigen::Index>(count);
  const Eigen::Index rem = c % static_cast<Eigen::Index>(count);
  const Eigen::Index n_short = rem == 0 ? 0 : static_cast<Eigen::Index>(count) - rem;
  out.block_width = rem == 0 ? base : base + 1;
  out.padded.assign(count, 0);
  Eigen::Index col = 0;
  for (Eigen::Index b = 0; b < static_cast<Eigen::Index>(count); ++b) {
    const bool is_short = b < n_short && rem != 0;
    const Eigen::Index real_w = is_short ? base : out.block_width;
    Mat blk = Mat::Zero(mx.rows(), out.block_width);
    blk.leftCols(real_w) = mx.middleCols(col, real_w);
    col += real_w;
    if (is_short) {
      out.padded[static_cast<std::size_t>(b)] = 1;
      ++out.pad_cols;
    }
    out.blocks.push_back(std::move(blk));
  }
  return out;
}

inline Mat departition_blocks(const BlockPartition& part, Eigen::Index rows = -1) {
  if (part.blocks.empty()) return Mat(rows < 0 ? 0 : rows, 0);
  const Eigen::Index r = part.blocks.front().rows();
  Mat out(r, part.original_cols);
  Eigen::Index col = 0;
  for (std::size_t b = 0; b < part.blocks.size(); ++b) {
    const Eigen::Index w = part.block_width - (part.padded[b] ? 1 : 0);
    out.middleCols(col, w) = part.blocks[b].leftCols(w);
    col += w;
  }
  return out;
}

/// Left pseudoinverse of a tall full-column-rank matrix through the Gram
/// matrix: rows of B^{-1} = (A^T A)^{-1} are estimated column-wise (B is
/// symmetric), then multiplied by A^T.
inline Mat estimate_pseudoinverse(const Mat& a, const SolverConfig& cfg) {
  if (a.rows() <= a.cols())
    throw ParameterError("estimate_pseudoinverse: need a tall matrix (N > M)");
  const Mat b = a.transpose() * a;
  {
    const SingularPair s = singular_extremes(b);
    if (!(s.min > 0.0) || s.max / s.min >= 1e12)
      throw SingularityError(
          "estimate_pseudoinverse: Gram matrix numerically rank-deficient; "
          "row estimation is not strictly convex");
  }
  const InverseEstimate binv = estimate_inverse(b, cfg);
  return binv.matrix * a.transpose();
}

inline nlohmann::json to_json(const SolveTrace& t) {
  return {{"iterations", t.iterations},
          {"final_grad_norm", t.final_grad_norm},
          {"final_residual", t.final_residual},
          {"converged", t.converged}};
}

inline nlohmann::json to_json(const ErrorReport& r) {
  return {{"err_l2", r.err_l2}, {"err_F", r.err_f}, {"err_rF", r.err_rf},
          {"support_diff", r.support_diff}};
}

}  // namespace fcmi

#endif  // FCMI_INVERSE_CORE_HPP
