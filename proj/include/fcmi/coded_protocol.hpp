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

#ifndef FCMI_CODED_PROTOCOL_HPP
#define FCMI_CODED_PROTOCOL_HPP

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "fcmi/brs_code.hpp"
#include "fcmi/errors.hpp"
#include "fcmi/linalg.hpp"
#include "fcmi/matrix_io.hpp"

namespace fcmi {

// Phases (c)-(d): the encoding acts on computed blocks, never on the data.
// Worker iota holds the blocks indexed by the support of generator row iota
// and ships W_iota = sum_j G(iota,j) * block_j^T; any k responses decode by
// applying G_I^{-1} blockwise. The Kronecker-lifted pair (I_T (x) G,
// I_T (x) G_I^{-1}) is never materialized: decoding is one k x k by
// k x (T N) multiplication.

struct TaskAllocation {
  std::vector<std::vector<std::size_t>> per_worker;  // J_iota, block indices
};

inline TaskAllocation allocate_tasks(const CMat& g, double tol = 1e-9) {
  TaskAllocation alloc;
  alloc.per_worker.resize(static_cast<std::size_t>(g.rows()));
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      if (std::abs(g(i, j)) > tol)
        alloc.per_worker[static_cast<std::size_t>(i)].push_back(static_cast<std::size_t>(j));
  return alloc;
}

inline TaskAllocation allocate_tasks(const BrsGenerator& gen) {
  TaskAllocation alloc = allocate_tasks(gen.G);
  for (const auto& tasks : alloc.per_worker)
    if (tasks.size() != gen.params.w)
      throw ParameterError("allocate_tasks: row support differs from w");
  return alloc;
}

struct WorkerEncoding {
  std::size_t worker_id = 0;
  CMat w;  // T x N

  std::size_t symbol_count() const { return static_cast<std::size_t>(w.size()); }
};

/// W_iota = sum_{j in J_iota} G(iota, j) * block_j^T.
inline WorkerEncoding worker_encode(const std::map<std::size_t, Mat>& blocks,
                                    const CMat& g, std::size_t worker,
                                    const TaskAllocation& alloc) {
  if (worker >= alloc.per_worker.size())
    throw ParameterError("worker_encode: worker id out of range");
  const auto& tasks = alloc.per_worker[worker];
  if (tasks.empty()) throw ParameterError("worker_encode: worker has no tasks");
  WorkerEncoding enc;
  enc.worker_id = worker;
  bool first = true;
  for (std::size_t j : tasks) {
    auto it = blocks.find(j);
    if (it == blocks.end())
      throw ParameterError("worker_encode: missing computed block " + std::to_string(j));
    const CMat term = g(static_cast<Eigen::Index>(worker), static_cast<Eigen::Index>(j)) *
                      it->second.transpose().cast<std::complex<double>>();
    if (first) { enc.w = term; first = false; }
    else {
      if (term.rows() != enc.w.rows() || term.cols() != enc.w.cols())
        throw ParameterError("worker_encode: inconsistent block shapes");
      enc.w += term;
    }
  }
  return enc;
}

/// An encode/decode pair closed over a verified MDS generator. The decode
/// backend is the structured P^{-1} H_I^{-1} path for BRS generators and a
/// plain LU inverse for anything else.
struct EncodingPair {
  CMat g;
  std::size_t n = 0, k = 0;
  MdsReport verification;
  std::function<CMat(const std::vector<std::size_t>&)> restricted_inverse;
};

inline EncodingPair build_encoding_pair(const BrsGenerator& gen,
                                        std::size_t verify_cap = 100000) {
  EncodingPair pair;
  pair.g = gen.G;
  pair.n = gen.params.n;
  pair.k = gen.params.k;
  pair.verification = verify_mds(gen, verify_cap);
  if (!pair.verification.pass)
    throw ParameterError("build_encoding_pair: generator failed MDS verification");
  // capture the generator by value; it is immutable after construction
  pair.restricted_inverse = [gen](const std::vector<std::size_t>& rows) {
    return fcmi::restricted_inverse(gen, rows);
  };
  return pair;
}

inline EncodingPair build_encoding_pair(const CMat& g, std::size_t verify_cap = 100000,
                                        std::uint64_t verify_seed = 17) {
  EncodingPair pair;
  pair.g = g;
  pair.n = static_cast<std::size_t>(g.rows());
  pair.k = static_cast<std::size_t>(g.cols());
  pair.verification = verify_mds(g, verify_cap, verify_seed);
  if (!pair.verification.pass)
    throw ParameterError("build_encoding_pair: generator failed MDS verification");
  pair.restricted_inverse = [g, k = pair.k](const std::vector<std::size_t>& rows) {
    check_subset(rows, static_cast<std::size_t>(g.rows()), k);
    CMat gi(k, k);
    for (std::size_t r = 0; r < k; ++r)
      gi.row(static_cast<Eigen::Index>(r)) = g.row(static_cast<Eigen::Index>(rows[r]));
    return lu_inverse(gi);
  };
  return pair;
}

/// Recovers the k transposed blocks from the first k responsive encodings.
/// One k x k inverse applied to the k x (T N) stack; the Kronecker structure
/// stays implicit.
inline std::vector<CMat> decode_blocks(const std::vector<WorkerEncoding>& responses,
                                       const EncodingPair& pair) {
  if (responses.size() < pair.k) throw RecoveryThresholdNotMet(responses.size(), pair.k);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < pair.k; ++i) rows.push_back(responses[i].worker_id);
  const CMat gi_inv = pair.restricted_inverse(rows);

  const Eigen::Index t = responses.front().w.rows();
  const Eigen::Index n = responses.front().w.cols();
  CMat stack(pair.k, t * n);
  for (std::size_t i = 0; i < pair.k; ++i) {
    const CMat& w = responses[i].w;
    if (w.rows() != t || w.cols() != n)
      throw ProtocolError("decode_blocks: inconsistent encoding shapes");
    stack.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const CVec>(w.data(), w.size()).transpose();
  }
  const CMat decoded = gi_inv * stack;
  std::vector<CMat> blocks;
  for (std::size_t j = 0; j < pair.k; ++j) {
    CMat blk(t, n);
    Eigen::Map<CVec>(blk.data(), blk.size()) =
        decoded.row(static_cast<Eigen::Index>(j)).transpose();
    blocks.push_back(std::move(blk));
  }
  return blocks;
}

/// Full decode to the estimate: reassembles (A^{-1})^T from the recovered
/// transposed blocks, transposes, strips transport padding and the complex
/// residue.
inline Mat coordinator_decode(const std::vector<WorkerEncoding>& responses,
                              const EncodingPair& pair, Eigen::Index original_cols,
                              double imag_tol = 1e-8) {
  const std::vector<CMat> blocks = decode_blocks(responses, pair);
  const Eigen::Index t = blocks.front().rows();
  const Eigen::Index n = blocks.front().cols();
  CMat transposed(static_cast<Eigen::Index>(pair.k) * t, n);
  for (std::size_t j = 0; j < pair.k; ++j)
    transposed.middleRows(static_cast<Eigen::Index>(j) * t, t) = blocks[j];
  const Mat wide = strip_imaginary(transposed.transpose(), imag_tol, "coordinator_decode");

  // Undo the per-block transport padding.
  BlockPartition layout;
  layout.original_cols = original_cols;
  layout.block_width = t;
  const Eigen::Index rem = original_cols % static_cast<Eigen::Index>(pair.k);
  const Eigen::Index n_short = rem == 0 ? 0 : static_cast<Eigen::Index>(pair.k) - rem;
  layout.padded.assign(pair.k, 0);
  for (Eigen::Index b = 0; b < n_short; ++b) layout.padded[static_cast<std::size_t>(b)] = 1;
  for (std::size_t j = 0; j < pair.k; ++j)
    layout.blocks.push_back(wide.middleCols(static_cast<Eigen::Index>(j) * t, t));
  return departition_blocks(layout);
}

// Worker-encoding wire format mirrors the encrypted block's.
inline std::pair<nlohmann::json, std::vector<std::uint8_t>> to_wire(const WorkerEncoding& enc) {
  nlohmann::json header{{"worker_id", enc.worker_id}, {"T", enc.w.rows()}, {"N", enc.w.cols()}};
  std::vector<std::uint8_t> blob;
  append_complex_payload(blob, enc.w);
  return {std::move(header), std::move(blob)};
}

inline WorkerEncoding worker_encoding_from_wire(const nlohmann::json& header,
                                                const std::vector<std::uint8_t>& blob) {
  WorkerEncoding enc;
  enc.worker_id = header.at("worker_id").get<std::size_t>();
  const auto t = header.at("T").get<Eigen::Index>();
  const auto n = header.at("N").get<Eigen::Index>();
  const std::uint8_t* p = blob.data();
  enc.w = read_complex_payload(p, blob.data() + blob.size(), t, n);
  return enc;
}

}  // namespace fcmi

#endif  // FCMI_CODED_PROTOCOL_HPP
