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

#ifndef FCMI_CMM_PSEUDOINVERSE_HPP
#define FCMI_CMM_PSEUDOINVERSE_HPP

#include <algorithm>
#include <set>
#include <vector>

#include "fcmi/brs_code.hpp"
#include "fcmi/coded_protocol.hpp"
#include "fcmi/errors.hpp"
#include "fcmi/fed_sim.hpp"
#include "fcmi/field_points.hpp"
#include "fcmi/inverse_core.hpp"
#include "fcmi/linalg.hpp"
#include "fcmi/transcript.hpp"
#include "fcmi/vandermonde.hpp"

namespace fcmi {

// Three-round pseudoinverse pipeline for tall full-rank A (N > M):
//   round 1: polynomial-coded multiplication recovers B = A^T A,
//   round 2: the coded inversion scheme estimates B^{-1},
//   round 3: a second polynomial CMM forms A (B^{-1})^T, whose transpose is
//            the left pseudoinverse estimate B^{-1} A^T.
// Workers reuse their round-1 encodings A~b in round 3; the recovery
// threshold is kbar^2 = k in every round.

struct CmmParams {
  std::size_t k_bar = 1;   // partition count, sqrt(k)
  std::size_t a = 1;       // exponent parameters; defaults make the
  std::size_t b = 1;       // kbar^2 exponent sums 0..kbar^2-1
  CVec points;             // >= kbar^2 distinct evaluation points gamma_i
  Eigen::Index t_bar = 0;  // column-block width of the partitions

  std::size_t threshold() const { return k_bar * k_bar; }

  static CmmParams create(std::size_t k, std::size_t n_workers, Eigen::Index m_cols) {
    std::size_t k_bar = 0;
    for (std::size_t r = 1; r * r <= k; ++r)
      if (r * r == k) k_bar = r;
    if (k_bar == 0)
      throw ParameterError("CmmParams: k must be a perfect square to match the "
                           "inversion recovery threshold");
    CmmParams p;
    p.k_bar = k_bar;
    p.a = 1;
    p.b = k_bar;
    if (n_workers < p.threshold())
      throw ParameterError("CmmParams: need at least kbar^2 workers");
    // Distinct roots of unity e^{2 pi i j / q'} with q' the smallest prime
    // above the worker count.
    const std::uint64_t q = next_prime_above(n_workers);
    p.points.resize(static_cast<Eigen::Index>(n_workers));
    for (std::size_t j = 1; j <= n_workers; ++j) {
      const CLD z = unit_point_ld(j, q);
      p.points(static_cast<Eigen::Index>(j - 1)) = {static_cast<double>(z.real()),
                                                    static_cast<double>(z.imag())};
    }
    p.t_bar = (m_cols + static_cast<Eigen::Index>(k_bar) - 1) / static_cast<Eigen::Index>(k_bar);
    // All exponent sums (j-1)a + (l-1)b must be distinct.
    std::set<std::size_t> sums;
    for (std::size_t j = 0; j < k_bar; ++j)
      for (std::size_t l = 0; l < k_bar; ++l)
        if (!sums.insert(j * p.a + l * p.b).second)
          throw ParameterError("CmmParams: exponent collision; pick different (a, b)");
    return p;
  }
};

struct CmmEncoding {
  std::size_t worker_id = 0;
  CMat a_enc;  // sum_j A_j gamma_i^{(j-1)a}
  CMat b_enc;  // sum_j A_j gamma_i^{(j-1)b}
};

inline CMat cmm_combine(const std::vector<Mat>& partitions, std::complex<double> point,
                        std::size_t exponent_step) {
  CMat acc = CMat::Zero(partitions.front().rows(), partitions.front().cols());
  std::complex<double> scale(1.0, 0.0);
  const std::complex<double> step = std::pow(point, static_cast<double>(exponent_step));
  for (const auto& part : partitions) {
    acc += scale * part.cast<std::complex<double>>();
    scale *= step;
  }
  return acc;
}

inline CmmEncoding cmm_encode(const std::vector<Mat>& partitions, const CmmParams& params,
                              std::size_t worker) {
  if (partitions.size() != params.k_bar)
    throw ParameterError("cmm_encode: expected kbar partitions");
  for (const auto& p : partitions)
    if (p.rows() != partitions.front().rows() || p.cols() != partitions.front().cols())
      throw ParameterError("cmm_encode: partitions must share a shape");
  if (worker >= static_cast<std::size_t>(params.points.size()))
    throw ParameterError("cmm_encode: worker id out of range");
  CmmEncoding enc;
  enc.worker_id = worker;
  const std::complex<double> gamma_i = params.points(static_cast<Eigen::Index>(worker));
  enc.a_enc = cmm_combine(partitions, gamma_i, params.a);
  enc.b_enc = cmm_combine(partitions, gamma_i, params.b);
  return enc;
}

/// The worker's product (A~a_i)^T A~b_i: a polynomial in gamma_i of degree
/// (kbar-1)(a+b) whose coefficients are the blocks A_j^T A_l.
inline CMat cmm_worker_multiply(const CmmEncoding& enc) {
  return enc.a_enc.transpose() * enc.b_enc;
}

struct CmmProduct {
  std::size_t worker_id = 0;
  CMat value;
};

/// Interpolates the coefficient blocks from >= kbar^2 worker products and
/// reassembles the Gram matrix, cropping the partition padding.
inline Mat cmm_decode(const std::vector<CmmProduct>& products, const CmmParams& params,
                      Eigen::Index m_cols, double imag_tol = 1e-8) {
  const std::size_t need = params.threshold();
  if (products.size() < need) throw RecoveryThresholdNotMet(products.size(), need);
  const Eigen::Index tb = products.front().value.rows();

  // Solve the (generalized) Vandermonde system in the used exponents.
  std::vector<std::size_t> exps;
  for (std::size_t j = 0; j < params.k_bar; ++j)
    for (std::size_t l = 0; l < params.k_bar; ++l)
      exps.push_back(j * params.a + l * params.b);
  std::sort(exps.begin(), exps.end());

  CMat coeffs;  // need x (tb*tb), row e = vec(C_e)
  {
    CMat rhs(need, tb * tb);
    for (std::size_t i = 0; i < need; ++i)
      rhs.row(static_cast<Eigen::Index>(i)) =
          Eigen::Map<const CVec>(products[i].value.data(), products[i].value.size()).transpose();
    const bool contiguous = exps.back() == need - 1;
    if (contiguous) {
      std::vector<CLD> nodes(need);
      for (std::size_t i = 0; i < need; ++i) {
        const auto z = params.points(static_cast<Eigen::Index>(products[i].worker_id));
        nodes[i] = CLD(z.real(), z.imag());
      }
      coeffs = vandermonde_inverse_ld(nodes).cast<std::complex<double>>() * rhs;
    } else {
      CMat v(need, need);
      for (std::size_t i = 0; i < need; ++i) {
        const auto z = params.points(static_cast<Eigen::Index>(products[i].worker_id));
        for (std::size_t e = 0; e < need; ++e)
          v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(e)) =
              std::pow(z, static_cast<double>(exps[e]));
      }
      coeffs = v.partialPivLu().solve(rhs);
    }
  }

  const auto kb = static_cast<Eigen::Index>(params.k_bar);
  CMat gram_padded(kb * tb, kb * tb);
  for (std::size_t j = 0; j < params.k_bar; ++j)
    for (std::size_t l = 0; l < params.k_bar; ++l) {
      const std::size_t e = j * params.a + l * params.b;
      const std::size_t row =
          static_cast<std::size_t>(std::lower_bound(exps.begin(), exps.end(), e) - exps.begin());
      CMat block(tb, tb);
      Eigen::Map<CVec>(block.data(), block.size()) =
          coeffs.row(static_cast<Eigen::Index>(row)).transpose();
      gram_padded.block(static_cast<Eigen::Index>(j) * tb, static_cast<Eigen::Index>(l) * tb,
                        tb, tb) = block;
    }
  // Partition padding interleaves zero columns; crop them back out.
  const Mat full = strip_imaginary(gram_padded, imag_tol, "cmm_decode");
  std::vector<Eigen::Index> keep;
  {
    const Eigen::Index rem = m_cols % kb;
    const Eigen::Index n_short = rem == 0 ? 0 : kb - rem;
    for (Eigen::Index b = 0; b < kb; ++b) {
      const Eigen::Index w = tb - (b < n_short && rem != 0 ? 1 : 0);
      for (Eigen::Index c = 0; c < w; ++c) keep.push_back(b * tb + c);
    }
  }
  Mat out(m_cols, m_cols);
  for (Eigen::Index i = 0; i < m_cols; ++i)
    for (Eigen::Index j = 0; j < m_cols; ++j) out(i, j) = full(keep[static_cast<std::size_t>(i)],
                                                               keep[static_cast<std::size_t>(j)]);
  return out;
}

struct PinvRound {
  char round = '1';
  std::vector<std::size_t> responsive;
  std::size_t per_worker_symbols = 0;
};

struct PinvNetConfig {
  std::size_t workers = 0;
  std::vector<std::set<std::size_t>> round_stragglers;  // size 3 (or 2)
  SolverConfig solver;
  std::size_t code_d = 0;
  std::uint64_t seed = 1;
  bool two_round = false;  // share B whole instead of the round-1 CMM
};

struct PinvResult {
  Mat pseudoinverse;
  Mat gram;        // recovered A^T A
  Mat gram_inv;    // estimated B^{-1}
  std::vector<PinvRound> rounds;
  Transcript transcript;
};

/// Appendix-style three-round pipeline. Round 3 reuses each worker's cached
/// round-1 encoding A~b_i: the only new transmissions are the B~a_i blocks.
inline PinvResult three_round_pseudoinverse(const Mat& a, const PinvNetConfig& cfg) {
  if (a.rows() <= a.cols())
    throw ParameterError("three_round_pseudoinverse: need a tall matrix (N > M)");
  const Eigen::Index m = a.cols();
  const std::size_t n_workers = cfg.workers;
  const std::size_t k = [&] {
    // recovery threshold shared with the inversion round
    std::size_t kb = 1;
    while ((kb + 1) * (kb + 1) <= n_workers) ++kb;
    return kb * kb;
  }();
  const CmmParams params = CmmParams::create(k, n_workers, m);
  PinvResult result;

  auto survivors = [&](std::size_t round) {
    std::vector<std::size_t> alive;
    const std::set<std::size_t>& dead = round < cfg.round_stragglers.size()
                                            ? cfg.round_stragglers[round]
                                            : std::set<std::size_t>{};
    for (std::size_t w = 0; w < n_workers; ++w)
      if (!dead.count(w)) alive.push_back(w);
    return alive;
  };

  // Round 1: B = A^T A by polynomial CMM (or shared whole in two-round mode).
  const BlockPartition part_a = partition_blocks(a, params.k_bar);
  std::vector<CMat> cached_b_enc(n_workers);
  Mat gram;
  if (cfg.two_round) {
    gram = a.transpose() * a;
    for (std::size_t w = 0; w < n_workers; ++w)
      cached_b_enc[w] = cmm_combine(part_a.blocks, params.points(static_cast<Eigen::Index>(w)),
                                    params.b);
    result.rounds.push_back({'1', survivors(0), static_cast<std::size_t>(gram.size())});
    for (std::size_t w : survivors(0))
      result.transcript.add({'1', "coordinator", "worker" + std::to_string(w),
                             static_cast<std::size_t>(gram.size()), 0.0, "gram-shared"});
  } else {
    std::vector<CmmProduct> products;
    PinvRound round1{'1', survivors(0), 0};
    for (std::size_t w : round1.responsive) {
      CmmEncoding enc = cmm_encode(part_a.blocks, params, w);
      cached_b_enc[w] = enc.b_enc;
      CmmProduct prod{w, cmm_worker_multiply(enc)};
      round1.per_worker_symbols = static_cast<std::size_t>(prod.value.size());
      result.transcript.add({'1', "worker" + std::to_string(w), "coordinator",
                             round1.per_worker_symbols, 0.0, "cmm-product"});
      products.push_back(std::move(prod));
    }
    // Straggling workers still computed their encodings locally; cache them
    // so a round-3 survivor that straggled in round 1 can participate.
    for (std::size_t w = 0; w < n_workers; ++w)
      if (cached_b_enc[w].size() == 0)
        cached_b_enc[w] = cmm_combine(part_a.blocks, params.points(static_cast<Eigen::Index>(w)),
                                      params.b);
    if (products.size() < params.threshold())
      throw RecoveryThresholdNotMet(products.size(), params.threshold());
    gram = cmm_decode(products, params, m);
    result.rounds.push_back(round1);
  }
  result.gram = gram;

  // Round 2: coded inversion of B with threshold k.
  {
    const std::size_t d = cfg.code_d ? cfg.code_d : choose_code_distance(n_workers, k);
    const CodeParams code = CodeParams::create(n_workers, k, d);
    const FieldSpec field = choose_field(n_workers, 1, derive_seed(cfg.seed, "field"));
    const PointSet points = build_point_set(field, n_workers);
    const BrsGenerator gen = generator_matrix(mask_matrix(code), points);
    const EncodingPair pair = build_encoding_pair(gen);
    const TaskAllocation alloc = allocate_tasks(gen);

    const auto kI = static_cast<Eigen::Index>(k);
    const Eigen::Index t_width = (m + kI - 1) / kI;
    const Eigen::Index rem = m % kI;
    const Eigen::Index n_short = rem == 0 ? 0 : kI - rem;
    std::map<std::size_t, Mat> block_cache;
    auto computed_block = [&](std::size_t j) -> const Mat& {
      auto it = block_cache.find(j);
      if (it != block_cache.end()) return it->second;
      const Eigen::Index width = t_width - (static_cast<Eigen::Index>(j) < n_short ? 1 : 0);
      Eigen::Index first = 0;
      for (std::size_t jj = 0; jj < j; ++jj)
        first += t_width - (static_cast<Eigen::Index>(jj) < n_short ? 1 : 0);
      SolverConfig scfg = cfg.solver;
      scfg.seed = derive_seed(cfg.seed, "round2-block", j);
      Mat padded = Mat::Zero(m, t_width);
      padded.leftCols(width) = estimate_inverse(gram, scfg, first, width).matrix;
      return block_cache.emplace(j, std::move(padded)).first->second;
    };

    PinvRound round2{'2', survivors(1), 0};
    std::vector<WorkerEncoding> responses;
    for (std::size_t w : round2.responsive) {
      std::map<std::size_t, Mat> blocks;
      for (std::size_t j : alloc.per_worker[w]) blocks.emplace(j, computed_block(j));
      WorkerEncoding enc = worker_encode(blocks, gen.G, w, alloc);
      round2.per_worker_symbols = enc.symbol_count();
      result.transcript.add({'2', "worker" + std::to_string(w), "coordinator",
                             enc.symbol_count(), 0.0, "encoded-task"});
      responses.push_back(std::move(enc));
    }
    if (responses.size() < k) throw RecoveryThresholdNotMet(responses.size(), k);
    result.gram_inv = coordinator_decode(responses, pair, m);
    result.rounds.push_back(round2);
  }

  // Round 3: A~b_i . (B~a_i)^T recovers A (B^{-1})^T; its transpose is
  // B^{-1} A^T. Only B~a_i travels; A~b_i is the cached round-1 encoding.
  {
    const BlockPartition part_binv = partition_blocks(result.gram_inv, params.k_bar);
    PinvRound round3{'3', survivors(2), 0};
    std::vector<CmmProduct> products;
    for (std::size_t w : round3.responsive) {
      const CMat b_tilde = cmm_combine(part_binv.blocks,
                                       params.points(static_cast<Eigen::Index>(w)), params.a);
      result.transcript.add({'3', "coordinator", "worker" + std::to_string(w),
                             static_cast<std::size_t>(b_tilde.size()), 0.0, "binv-encoding"});
      CmmProduct prod{w, cached_b_enc[w] * b_tilde.transpose()};
      round3.per_worker_symbols = static_cast<std::size_t>(prod.value.size());
      result.transcript.add({'3', "worker" + std::to_string(w), "coordinator",
                             round3.per_worker_symbols, 0.0, "cmm-product"});
      products.push_back(std::move(prod));
    }
    if (products.size() < params.threshold())
      throw RecoveryThresholdNotMet(products.size(), params.threshold());
    // Interpolate the product polynomial and sum the diagonal coefficient
    // blocks A_l B_l^T = A (B^{-1})^T.
    const std::size_t need = params.threshold();
    std::vector<CLD> nodes(need);
    CMat rhs(need, products.front().value.size());
    for (std::size_t i = 0; i < need; ++i) {
      const auto z = params.points(static_cast<Eigen::Index>(products[i].worker_id));
      nodes[i] = CLD(z.real(), z.imag());
      rhs.row(static_cast<Eigen::Index>(i)) =
          Eigen::Map<const CVec>(products[i].value.data(), products[i].value.size()).transpose();
    }
    const CMat coeffs = vandermonde_inverse_ld(nodes).cast<std::complex<double>>() * rhs;
    const Eigen::Index rows = products.front().value.rows();
    const Eigen::Index cols = products.front().value.cols();
    CMat acc = CMat::Zero(rows, cols);
    for (std::size_t l = 0; l < params.k_bar; ++l) {
      const std::size_t e = l * params.a + l * params.b;  // diagonal exponent
      CMat block(rows, cols);
      Eigen::Map<CVec>(block.data(), block.size()) =
          coeffs.row(static_cast<Eigen::Index>(e)).transpose();
      acc += block;
    }
    const Mat a_binv_t = strip_imaginary(acc, 1e-8, "three_round_pseudoinverse");
    result.pseudoinverse = a_binv_t.transpose();
    result.rounds.push_back(round3);
  }
  return result;
}

}  // namespace fcmi

#endif  // FCMI_CMM_PSEUDOINVERSE_HPP
