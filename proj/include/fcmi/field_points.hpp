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

#ifndef FCMI_FIELD_POINTS_HPP
#define FCMI_FIELD_POINTS_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "fcmi/errors.hpp"
#include "fcmi/linalg.hpp"
#include "fcmi/rng.hpp"

namespace fcmi {

// Prime-field layer. The coding scheme is stated over F_q but all downstream
// arithmetic happens over C after embedding the nonzero field elements as
// roots of unity; this layer only constructs points and checks primitivity.

inline bool is_prime(std::uint64_t m) {
  if (m < 2) return false;
  if (m % 2 == 0) return m == 2;
  for (std::uint64_t i = 3; i * i <= m; i += 2)
    if (m % i == 0) return false;
  return true;
}

inline std::uint64_t next_prime_above(std::uint64_t n) {
  std::uint64_t q = n + 1;
  while (!is_prime(q)) ++q;
  return q;
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  unsigned __int128 acc = 1, b = base % mod;
  while (exp) {
    if (exp & 1) acc = acc * b % mod;
    b = b * b % mod;
    exp >>= 1;
  }
  return static_cast<std::uint64_t>(acc);
}

inline std::vector<std::uint64_t> distinct_prime_factors(std::uint64_t m) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
    if (m % p == 0) {
      out.push_back(p);
      while (m % p == 0) m /= p;
    }
  }
  if (m > 1) out.push_back(m);
  return out;
}

inline bool is_primitive_root(std::uint64_t beta, std::uint64_t q,
                              const std::vector<std::uint64_t>& factors_of_q1) {
  if (beta % q == 0) return false;
  for (std::uint64_t p : factors_of_q1)
    if (pow_mod(beta, (q - 1) / p, q) == 1) return false;
  return true;
}

inline std::vector<std::uint64_t> primitive_roots(std::uint64_t q) {
  if (q == 2) return {1};
  const auto factors = distinct_prime_factors(q - 1);
  std::vector<std::uint64_t> roots;
  for (std::uint64_t b = 2; b < q; ++b)
    if (is_primitive_root(b, q, factors)) roots.push_back(b);
  return roots;
}

struct FieldSpec {
  std::uint64_t q = 2;     // prime modulus, q > n >= gamma
  std::uint64_t beta = 1;  // primitive root of F_q
};

/// Smallest prime strictly above the worker count, with a uniformly seeded
/// primitive root.
inline FieldSpec choose_field(std::size_t n, std::size_t gamma, std::uint64_t seed) {
  if (n < 1 || gamma < 1) throw ParameterError("choose_field: n and gamma must be >= 1");
  if (gamma > n) throw ParameterError("choose_field: gamma must not exceed n");
  FieldSpec spec;
  spec.q = next_prime_above(n);
  if (spec.q == 2) {
    spec.beta = 1;  // F_2^x is trivial
    return spec;
  }
  const auto roots = primitive_roots(spec.q);
  Rng rng(seed);
  spec.beta = roots[rng.bounded(roots.size())];
  return spec;
}

enum class PointMode {
  kPrimitiveRoot,  // beta_j = beta^j, embedded through the field element value
  kDirect,         // beta_j = e^{2 pi i j / q}, no primitive-root scrambling
};

struct PointSet {
  std::uint64_t q = 2;
  PointMode mode = PointMode::kPrimitiveRoot;
  std::vector<std::uint64_t> exponents;  // field element values beta^j mod q
  CVec embedded;                         // e^{2 pi i exponents[j] / q}
  std::vector<CLD> embedded_ld;          // same points at extended precision

  std::size_t size() const { return exponents.size(); }
};

inline CLD unit_point_ld(std::uint64_t value, std::uint64_t q) {
  const long double theta = 2.0L * 3.14159265358979323846264338327950288L *
                            static_cast<long double>(value) / static_cast<long double>(q);
  return {std::cos(theta), std::sin(theta)};
}

inline PointSet build_point_set(const FieldSpec& spec, std::size_t n,
                                PointMode mode = PointMode::kPrimitiveRoot) {
  if (n >= spec.q)
    throw ParameterError("build_point_set: n must be below q, points would collide");
  PointSet ps;
  ps.q = spec.q;
  ps.mode = mode;
  ps.exponents.resize(n);
  ps.embedded.resize(static_cast<Eigen::Index>(n));
  ps.embedded_ld.resize(n);
  for (std::size_t j = 1; j <= n; ++j) {
    const std::uint64_t value =
        mode == PointMode::kPrimitiveRoot ? pow_mod(spec.beta, j, spec.q) : j % spec.q;
    ps.exponents[j - 1] = value;
    const CLD z = unit_point_ld(value, spec.q);
    ps.embedded_ld[j - 1] = z;
    ps.embedded(static_cast<Eigen::Index>(j - 1)) = {static_cast<double>(z.real()),
                                                     static_cast<double>(z.imag())};
  }
  return ps;
}

struct EtaMultiset {
  CVec values;                   // gamma unit-modulus blinding coefficients
  std::vector<CLD> values_ld;
  std::uint64_t seed = 0;

  std::size_t size() const { return values_ld.size(); }
};

/// Random multiset of gamma nonzero embedded field elements (repeats allowed).
inline EtaMultiset sample_eta(const FieldSpec& spec, std::size_t gamma, std::uint64_t seed) {
  if (gamma < 1) throw ParameterError("sample_eta: gamma must be >= 1");
  EtaMultiset eta;
  eta.seed = seed;
  eta.values.resize(static_cast<Eigen::Index>(gamma));
  eta.values_ld.resize(gamma);
  Rng rng(seed);
  for (std::size_t i = 0; i < gamma; ++i) {
    const std::uint64_t m = 1 + rng.bounded(spec.q - 1);  // uniform over F_q^x
    const CLD z = unit_point_ld(m, spec.q);
    eta.values_ld[i] = z;
    eta.values(static_cast<Eigen::Index>(i)) = {static_cast<double>(z.real()),
                                                static_cast<double>(z.imag())};
  }
  return eta;
}

inline nlohmann::json to_json(const FieldSpec& spec) {
  return {{"q", spec.q}, {"beta", spec.beta}};
}

inline nlohmann::json to_json(const PointSet& ps) {
  return {{"q", ps.q},
          {"n", ps.exponents.size()},
          {"mode", ps.mode == PointMode::kPrimitiveRoot ? "primitive_root" : "direct"},
          {"exponents", ps.exponents}};
}

}  // namespace fcmi

#endif  // FCMI_FIELD_POINTS_HPP
