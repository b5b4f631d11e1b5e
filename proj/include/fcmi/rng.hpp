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

#ifndef FCMI_RNG_HPP
#define FCMI_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

namespace fcmi {

// Counter-mode generator (splitmix64). All randomness in the library goes
// through this so that runs are reproducible across platforms; the standard
// <random> distributions are not portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). Rejection-free is not needed here;
  /// simple rejection keeps the draw exactly uniform.
  std::uint64_t bounded(std::uint64_t bound) {
    const std::uint64_t lim = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t v;
    do { v = next(); } while (v >= lim);
    return v % bound;
  }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do { u1 = unit(); } while (u1 <= 0.0);
    u2 = unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// Exponential with the given rate.
  double exponential(double rate) {
    double u;
    do { u = unit(); } while (u <= 0.0);
    return -std::log(u) / rate;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Derives an independent stream seed from a base seed and a tag, so separate
/// protocol roles (field choice, eta, per-client PRPs, stragglers) never share
/// a stream.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                 std::uint64_t index = 0) {
  std::uint64_t h = 0xcbf29ce484222325ull ^ base;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  h ^= index + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  Rng mix(h);
  return mix.next();
}

}  // namespace fcmi

#endif  // FCMI_RNG_HPP
