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

#ifndef FCMI_FED_SIM_HPP
#define FCMI_FED_SIM_HPP

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "fcmi/brs_code.hpp"
#include "fcmi/coded_protocol.hpp"
#include "fcmi/errors.hpp"
#include "fcmi/field_points.hpp"
#include "fcmi/inverse_core.hpp"
#include "fcmi/secure_sharing.hpp"
#include "fcmi/transcript.hpp"

namespace fcmi {

// Deterministic simulation of the four-phase protocol:
//   (a) the coordinator shares the field element beta and the blinding
//       multiset over the key channel,
//   (b) clients exchange Lagrange-encrypted data blocks (and their PRPs over
//       the key channel) and reconstruct the data matrix,
//   (c) every server estimates its assigned inverse blocks and returns one
//       linear encoding,
//   (d) the coordinator decodes from the first k arrivals.
// Time is synthetic: a unit cost per transmitted symbol plus a per-iteration
// compute cost, enough to order arrivals for the first-k rule.

struct StragglerModel {
  enum Kind { kFixedSet, kRandomSubset, kExpDelay } kind = kFixedSet;
  std::set<std::size_t> fixed;   // kFixedSet
  std::size_t count = 0;         // kRandomSubset
  double rate = 1.0;             // kExpDelay
  double deadline = std::numeric_limits<double>::infinity();

  static StragglerModel fixed_set(std::set<std::size_t> s) {
    StragglerModel m; m.kind = kFixedSet; m.fixed = std::move(s); return m;
  }
  static StragglerModel random_subset(std::size_t count) {
    StragglerModel m; m.kind = kRandomSubset; m.count = count; return m;
  }
  static StragglerModel exp_delay(double rate, double deadline) {
    StragglerModel m; m.kind = kExpDelay; m.rate = rate; m.deadline = deadline; return m;
  }
};

struct NetworkConfig {
  std::vector<std::size_t> client_servers;  // n_i per client; k = size()
  Eigen::Index n_order = 0;                 // N, the matrix order
  std::size_t gamma = 1;
  StragglerModel straggler;
  SolverConfig solver;
  std::uint64_t seed = 1;
  std::size_t code_d = 0;  // 0: choose automatically
  PointMode point_mode = PointMode::kPrimitiveRoot;
  double symbol_time = 1e-6;
  double iter_time = 1e-9;

  std::size_t clients() const { return client_servers.size(); }
  std::size_t workers() const {
    return std::accumulate(client_servers.begin(), client_servers.end(), std::size_t{0});
  }
};

/// Smallest feasible column weight for (n, k): integral w, d >= ceil(n/2),
/// and small enough zero-set groups for an invertible polynomial family.
inline std::size_t choose_code_distance(std::size_t n, std::size_t k) {
  if (n == k) return 1;
  const std::size_t s = n - k;
  for (std::size_t d = (n + 1) / 2; d <= n; ++d) {
    if ((k * d) % n != 0) continue;
    if (d <= s) continue;
    const std::size_t n_groups = n / std::gcd(n, d);
    const std::size_t max_group = (k + n_groups - 1) / n_groups;
    if (max_group <= d - s) return d;
  }
  throw ParameterError("choose_code_distance: no feasible d for n=" + std::to_string(n) +
                       " k=" + std::to_string(k));
}

inline std::set<std::size_t> sample_stragglers(const StragglerModel& model, std::size_t n,
                                               std::uint64_t seed) {
  switch (model.kind) {
    case StragglerModel::kFixedSet: {
      for (std::size_t w : model.fixed)
        if (w >= n) throw ConfigError("/straggler/fixed", "worker index out of range");
      if (model.fixed.size() > n)
        throw ConfigError("/straggler/fixed", "more stragglers than workers");
      return model.fixed;
    }
    case StragglerModel::kRandomSubset: {
      if (model.count > n) throw ConfigError("/straggler/count", "more stragglers than workers");
      Rng rng(seed);
      std::vector<std::size_t> pool(n);
      std::iota(pool.begin(), pool.end(), std::size_t{0});
      std::set<std::size_t> out;
      for (std::size_t i = 0; i < model.count; ++i) {
        std::swap(pool[i], pool[i + rng.bounded(n - i)]);
        out.insert(pool[i]);
      }
      return out;
    }
    case StragglerModel::kExpDelay: {
      Rng rng(seed);
      std::set<std::size_t> out;
      for (std::size_t w = 0; w < n; ++w)
        if (rng.exponential(model.rate) > model.deadline) out.insert(w);
      return out;
    }
  }
  throw ConfigError("/straggler", "unknown model");
}

struct SimResult {
  bool threshold_met = false;
  Mat estimate;  // empty when the threshold was not met
  Transcript transcript;
  std::optional<ErrorReport> error;  // vs the LU oracle
  CodeParams code;
  FieldSpec field;
  std::set<std::size_t> stragglers;
};

namespace detail {

/// Structural guard: raw data never flows to the coordinator. Client
/// payloads (phases a/b) are routed here; a coordinator receiver is a
/// protocol violation, not a loggable event.
inline void route_client_event(Transcript& log, TranscriptEvent ev) {
  if ((ev.phase == 'b') && ev.receiver == "coordinator")
    throw ProtocolError("router: phase-b payloads must not reach the coordinator");
  log.add(std::move(ev));
}

}  // namespace detail

inline SimResult run_protocol(const std::vector<Mat>& data_blocks, const NetworkConfig& cfg) {
  const std::size_t k = cfg.clients();
  const std::size_t n = cfg.workers();
  if (k < 1) throw ConfigError("/clients", "need at least one client");
  if (n < k) throw ConfigError("/clients", "need at least k servers in total");
  if (data_blocks.size() != k) throw ConfigError("/data", "one block per client required");
  Eigen::Index total_cols = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (data_blocks[i].rows() != cfg.n_order)
      throw ConfigError("/data/" + std::to_string(i), "block row count must equal N");
    total_cols += data_blocks[i].cols();
  }
  if (total_cols != cfg.n_order)
    throw ConfigError("/data", "client blocks must concatenate to a square N x N matrix");
  if (cfg.gamma < 1 || cfg.gamma > n) throw ConfigError("/gamma", "need 1 <= gamma <= n");

  SimResult result;
  Transcript& log = result.transcript;

  // Phase (a): field parameters over the key channel.
  const FieldSpec field = choose_field(n, cfg.gamma, derive_seed(cfg.seed, "field"));
  const PointSet points = build_point_set(field, n, cfg.point_mode);
  const EtaMultiset eta = sample_eta(field, cfg.gamma, derive_seed(cfg.seed, "eta"));
  result.field = field;

  SecureChannel key_channel(&log, derive_seed(cfg.seed, "key-channel"), "key");
  SecureChannel data_channel(&log, derive_seed(cfg.seed, "data-channel"), "data");

  std::vector<std::string> client_names;
  for (std::size_t c = 0; c < k; ++c) client_names.push_back("client" + std::to_string(c));

  double clock = 0.0;
  const std::size_t phase_a_symbols = 2 + cfg.gamma;  // q, beta, gamma eta values
  key_channel.broadcast('a', "coordinator", client_names, "field-params", phase_a_symbols,
                        {{"q", field.q}, {"beta", field.beta}}, clock);
  clock += static_cast<double>(phase_a_symbols) * cfg.symbol_time;

  // Phase (b): encryption and exchange between clients.
  std::vector<Prp> prps;
  std::vector<EncryptedBlock> encrypted;
  for (std::size_t c = 0; c < k; ++c) {
    prps.push_back(generate_prp(cfg.gamma, derive_seed(cfg.seed, "prp", c)));
    encrypted.push_back(encrypt_block(data_blocks[c], points, eta, prps[c], c));
  }
  double phase_b_end = clock;
  for (std::size_t c = 0; c < k; ++c) {
    auto [header, blob] = to_wire(encrypted[c]);
    const std::size_t symbols = encrypted[c].symbol_count();
    const std::uint64_t handle = log.store_payload(data_channel.key(), header);
    const double t_arrive = clock + static_cast<double>(symbols) * cfg.symbol_time;
    for (std::size_t other = 0; other < k; ++other) {
      if (other == c) continue;
      detail::route_client_event(log, {'b', client_names[c], client_names[other], symbols,
                                       t_arrive, "encrypted-block", handle});
    }
    // PRPs ride the key channel, sized gamma symbols.
    key_channel.broadcast('b', client_names[c],
                          {client_names.begin(), client_names.end()}, "prp",
                          cfg.gamma, {{"client", c}}, t_arrive);
    phase_b_end = std::max(phase_b_end, t_arrive + static_cast<double>(cfg.gamma) * cfg.symbol_time);
  }

  // Every client decrypts its peers' blocks and reconstructs A; the result is
  // identical across clients, so reconstruct once.
  Mat a_full(cfg.n_order, cfg.n_order);
  {
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const Mat block = decrypt_block(encrypted[c], prps[c], eta, points);
      a_full.middleCols(col, block.cols()) = block;
      col += block.cols();
    }
  }

  // Phase (c): per-worker block estimation and encoding.
  const std::size_t d = cfg.code_d ? cfg.code_d : choose_code_distance(n, k);
  const CodeParams params = CodeParams::create(n, k, d);
  result.code = params;
  const MaskMatrix mask = mask_matrix(params);
  const BrsGenerator gen = generator_matrix(mask, points);
  const EncodingPair pair = build_encoding_pair(gen);
  const TaskAllocation alloc = allocate_tasks(gen);

  // Column-block layout of the estimate, padded to a common width.
  const auto kI = static_cast<Eigen::Index>(k);
  const Eigen::Index t_width = (cfg.n_order + kI - 1) / kI;
  const Eigen::Index rem = cfg.n_order % kI;
  const Eigen::Index n_short = rem == 0 ? 0 : kI - rem;

  // Workers assigned the same block compute identical estimates: solver state
  // is seeded per block index, and each distinct block is computed once.
  std::map<std::size_t, Mat> block_cache;
  std::map<std::size_t, long> block_iters;
  auto computed_block = [&](std::size_t j) -> const Mat& {
    auto it = block_cache.find(j);
    if (it != block_cache.end()) return it->second;
    const Eigen::Index width = t_width - (static_cast<Eigen::Index>(j) < n_short ? 1 : 0);
    Eigen::Index first = 0;
    for (std::size_t jj = 0; jj < j; ++jj)
      first += t_width - (static_cast<Eigen::Index>(jj) < n_short ? 1 : 0);
    SolverConfig scfg = cfg.solver;
    scfg.seed = derive_seed(cfg.seed, "block", j);
    const InverseEstimate est = estimate_inverse(a_full, scfg, first, width);
    long iters = 0;
    for (const auto& tr : est.traces) iters += std::max(tr.iterations, 1L);
    block_iters[j] = iters;
    Mat padded = Mat::Zero(cfg.n_order, t_width);
    padded.leftCols(width) = est.matrix;
    return block_cache.emplace(j, std::move(padded)).first->second;
  };

  result.stragglers = sample_stragglers(cfg.straggler, n, derive_seed(cfg.seed, "straggler"));
  log.straggler_set = result.stragglers;

  struct Arrival {
    double time;
    std::size_t worker;
    WorkerEncoding enc;
  };
  std::vector<Arrival> arrivals;
  Rng delay_rng(derive_seed(cfg.seed, "delay"));
  for (std::size_t w = 0; w < n; ++w) {
    double delay = 0.0;
    if (cfg.straggler.kind == StragglerModel::kExpDelay)
      delay = delay_rng.exponential(cfg.straggler.rate);
    if (result.stragglers.count(w)) continue;
    std::map<std::size_t, Mat> blocks;
    long iters = 0;
    for (std::size_t j : alloc.per_worker[w]) {
      blocks.emplace(j, computed_block(j));
      iters += block_iters[j];
    }
    WorkerEncoding enc = worker_encode(blocks, gen.G, w, alloc);
    const std::size_t symbols = enc.symbol_count();
    double t_arrive;
    if (cfg.straggler.kind == StragglerModel::kExpDelay) {
      t_arrive = phase_b_end + delay;
    } else {
      t_arrive = phase_b_end + static_cast<double>(iters) * cfg.iter_time +
                 static_cast<double>(symbols) * cfg.symbol_time;
    }
    arrivals.push_back({t_arrive, w, std::move(enc)});
  }
  std::sort(arrivals.begin(), arrivals.end(), [](const Arrival& a, const Arrival& b) {
    return a.time != b.time ? a.time < b.time : a.worker < b.worker;
  });
  for (const auto& a : arrivals)
    log.add({'c', "worker" + std::to_string(a.worker), "coordinator",
             a.enc.symbol_count(), a.time, "encoded-task"});

  // Phase (d): decode from the first k arrivals.
  if (arrivals.size() < k) {
    result.threshold_met = false;
    return result;
  }
  std::vector<WorkerEncoding> responses;
  for (std::size_t i = 0; i < k; ++i) responses.push_back(arrivals[i].enc);
  result.estimate = coordinator_decode(responses, pair, cfg.n_order);
  result.threshold_met = true;
  log.decode_time = arrivals[k - 1].time;
  log.add({'d', "coordinator", "coordinator", 0, log.decode_time, "decode"});

  result.error = error_report(result.estimate, lu_inverse(a_full));
  return result;
}

struct LoadTable {
  std::map<char, std::size_t> phase_totals;
  std::map<std::string, std::size_t> phase_b_by_sender;
  std::map<std::string, std::size_t> phase_c_by_sender;
};

inline LoadTable account_communication(const Transcript& transcript) {
  LoadTable table;
  for (const auto& ev : transcript.events) {
    table.phase_totals[ev.phase] += ev.symbols;
    if (ev.phase == 'b' && ev.label == "encrypted-block")
      table.phase_b_by_sender[ev.sender] += ev.symbols;
    if (ev.phase == 'c') table.phase_c_by_sender[ev.sender] += ev.symbols;
  }
  return table;
}

/// Asserts the optimal-load equalities: every client ships N*T encrypted
/// symbols per peer in phase (b), every worker ships N^2/k in phase (c).
inline void validate_loads(const LoadTable& table, Eigen::Index n_order, std::size_t k,
                           std::size_t gamma) {
  const auto kI = static_cast<Eigen::Index>(k);
  const Eigen::Index t_pad = (n_order + kI - 1) / kI;
  const auto gI = static_cast<Eigen::Index>(gamma);
  for (const auto& [sender, symbols] : table.phase_b_by_sender) {
    // each client sends to k-1 peers; per-peer payload is gamma*N*ceil(T/gamma)
    const Eigen::Index width = t_pad;  // equal-size blocks assumed at call sites
    const Eigen::Index gpad = (width + gI - 1) / gI;
    const std::size_t expected =
        (k - 1) * static_cast<std::size_t>(n_order) * static_cast<std::size_t>(gI * gpad);
    if (symbols != expected)
      throw ProtocolError("phase-b load mismatch for " + sender + ": " +
                          std::to_string(symbols) + " vs expected " + std::to_string(expected));
  }
  for (const auto& [sender, symbols] : table.phase_c_by_sender) {
    const std::size_t expected = static_cast<std::size_t>(n_order) *
                                 static_cast<std::size_t>(t_pad);
    if (symbols != expected)
      throw ProtocolError("phase-c load mismatch for " + sender + ": " +
                          std::to_string(symbols) + " vs expected " + std::to_string(expected));
  }
}

}  // namespace fcmi

#endif  // FCMI_FED_SIM_HPP
