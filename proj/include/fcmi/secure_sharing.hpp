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

#ifndef FCMI_SECURE_SHARING_HPP
#define FCMI_SECURE_SHARING_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fcmi/errors.hpp"
#include "fcmi/field_points.hpp"
#include "fcmi/inverse_core.hpp"
#include "fcmi/linalg.hpp"
#include "fcmi/matrix_io.hpp"
#include "fcmi/rng.hpp"
#include "fcmi/vandermonde.hpp"

namespace fcmi {

// Client-side data encryption for phases (a)-(b): a data block A (N x T) is
// split into gamma sub-blocks, each blinded by a permuted eta coefficient,
// and packed as the matrix-valued Lagrange interpolant
//   f(x) = sum_j A^j eta_{sigma(j)} prod_{l != j} (x - beta_l)/(beta_j - beta_l),
// stored in the monomial basis. Evaluating at beta_j and dividing the blind
// back out recovers the sub-blocks; the coefficients carry exactly N*T
// symbols, the proven minimum for sharing a dense block.

struct Prp {
  std::vector<std::size_t> perm;  // bijection on 0..gamma-1
  std::uint64_t seed = 0;

  std::size_t size() const { return perm.size(); }
  std::size_t operator()(std::size_t i) const { return perm.at(i); }
};

inline Prp generate_prp(std::size_t gamma, std::uint64_t seed) {
  if (gamma < 1) throw ParameterError("generate_prp: gamma must be >= 1");
  Prp prp;
  prp.seed = seed;
  prp.perm.resize(gamma);
  for (std::size_t i = 0; i < gamma; ++i) prp.perm[i] = i;
  Rng rng(seed);
  for (std::size_t i = gamma - 1; i > 0; --i)
    std::swap(prp.perm[i], prp.perm[rng.bounded(i + 1)]);
  return prp;
}

struct EncryptedBlock {
  std::size_t client_id = 0;
  std::size_t gamma = 0;
  Eigen::Index rows = 0;           // N
  Eigen::Index sub_width = 0;      // Gamma, the padded sub-block width
  Eigen::Index original_cols = 0;  // T before transport padding
  std::vector<CMat> coeffs;        // gamma monomial coefficients, each N x Gamma

  /// gamma * N * Gamma == N * T_padded.
  std::size_t symbol_count() const {
    return gamma * static_cast<std::size_t>(rows) * static_cast<std::size_t>(sub_width);
  }
};

inline EncryptedBlock encrypt_block(const Mat& block, const PointSet& points,
                                    const EtaMultiset& eta, const Prp& prp,
                                    std::size_t client_id = 0) {
  const std::size_t gamma = prp.size();
  if (gamma < 1) throw ParameterError("encrypt_block: empty permutation");
  if (eta.size() != gamma) throw ProtocolError("encrypt_block: eta size != gamma");
  if (points.size() < gamma)
    throw ParameterError("encrypt_block: need at least gamma interpolation points");

  const BlockPartition part = partition_blocks(block, gamma);
  EncryptedBlock enc;
  enc.client_id = client_id;
  enc.gamma = gamma;
  enc.rows = block.rows();
  enc.sub_width = part.block_width;
  enc.original_cols = block.cols();

  // Column j of the inverse Vandermonde holds the monomial coefficients of
  // the j-th Lagrange basis polynomial over the first gamma points.
  std::vector<CLD> nodes(points.embedded_ld.begin(),
                         points.embedded_ld.begin() + static_cast<long>(gamma));
  const CMat lagr = vandermonde_inverse_ld(nodes).cast<std::complex<double>>();

  enc.coeffs.assign(gamma, CMat::Zero(enc.rows, enc.sub_width));
  for (std::size_t j = 0; j < gamma; ++j) {
    const CMat blinded = eta.values(static_cast<Eigen::Index>(prp(j))) *
                         part.blocks[j].cast<std::complex<double>>();
    for (std::size_t c = 0; c < gamma; ++c)
      enc.coeffs[c] += lagr(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j)) * blinded;
  }
  return enc;
}

inline Mat decrypt_block(const EncryptedBlock& enc, const Prp& prp, const EtaMultiset& eta,
                         const PointSet& points) {
  const std::size_t gamma = enc.gamma;
  if (prp.size() != gamma) throw ProtocolError("decrypt_block: permutation size mismatch");
  if (eta.size() != gamma) throw ProtocolError("decrypt_block: eta size mismatch");
  if (points.size() < gamma) throw ProtocolError("decrypt_block: too few points");
  if (enc.coeffs.size() != gamma) throw ProtocolError("decrypt_block: malformed block");

  BlockPartition part;
  part.original_cols = enc.original_cols;
  part.block_width = enc.sub_width;
  const Eigen::Index rem = enc.original_cols % static_cast<Eigen::Index>(gamma);
  const Eigen::Index n_short = rem == 0 ? 0 : static_cast<Eigen::Index>(gamma) - rem;
  part.padded.assign(gamma, 0);
  for (Eigen::Index b = 0; b < n_short; ++b) part.padded[static_cast<std::size_t>(b)] = 1;

  for (std::size_t j = 0; j < gamma; ++j) {
    const std::complex<double> x = points.embedded(static_cast<Eigen::Index>(j));
    CMat acc = enc.coeffs[gamma - 1];
    for (std::size_t c = gamma - 1; c > 0; --c) acc = acc * x + enc.coeffs[c - 1];
    acc /= eta.values(static_cast<Eigen::Index>(prp(j)));
    part.blocks.push_back(strip_imaginary(acc, 1e-9, "decrypt_block").eval());
  }
  return departition_blocks(part);
}

// Wire format: JSON header + interleaved re/im little-endian doubles.

inline std::pair<nlohmann::json, std::vector<std::uint8_t>> to_wire(const EncryptedBlock& enc) {
  nlohmann::json header{{"client_id", enc.client_id}, {"N", enc.rows},
                        {"Gamma", enc.sub_width},     {"gamma", enc.gamma},
                        {"T", enc.original_cols}};
  std::vector<std::uint8_t> blob;
  blob.reserve(enc.symbol_count() * 16);
  for (const auto& c : enc.coeffs) append_complex_payload(blob, c);
  return {std::move(header), std::move(blob)};
}

inline EncryptedBlock encrypted_block_from_wire(const nlohmann::json& header,
                                                const std::vector<std::uint8_t>& blob) {
  EncryptedBlock enc;
  enc.client_id = header.at("client_id").get<std::size_t>();
  enc.rows = header.at("N").get<Eigen::Index>();
  enc.sub_width = header.at("Gamma").get<Eigen::Index>();
  enc.gamma = header.at("gamma").get<std::size_t>();
  enc.original_cols = header.at("T").get<Eigen::Index>();
  const std::uint8_t* p = blob.data();
  const std::uint8_t* end = blob.data() + blob.size();
  for (std::size_t c = 0; c < enc.gamma; ++c)
    enc.coeffs.push_back(read_complex_payload(p, end, enc.rows, enc.sub_width));
  if (p != end) throw ProtocolError("encrypted block blob has trailing bytes");
  return enc;
}

}  // namespace fcmi

#endif  // FCMI_SECURE_SHARING_HPP
