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

#ifndef FCMI_VANDERMONDE_HPP
#define FCMI_VANDERMONDE_HPP

#include <complex>
#include <vector>

#include "fcmi/errors.hpp"
#include "fcmi/linalg.hpp"

namespace fcmi {

// Polynomial utilities in the monomial basis (coefficients ascending) and the
// O(k^2) explicit Vandermonde inverse used by the decoder. Internals run at
// extended precision: the master-polynomial coefficients are the weak point
// of this algorithm family and the extra mantissa bits are cheap.

template <typename R>
std::vector<std::complex<R>> poly_mul_linear(std::vector<std::complex<R>> p,
                                             std::complex<R> root) {
  // p(x) <- p(x) * (x - root)
  p.push_back({});
  for (std::size_t i = p.size() - 1; i > 0; --i)
    p[i] = p[i - 1] - root * p[i];
  p[0] = -root * p[0];
  return p;
}

template <typename R>
std::complex<R> horner(const std::vector<std::complex<R>>& coeffs, std::complex<R> x) {
  std::complex<R> v{};
  for (std::size_t i = coeffs.size(); i > 0; --i) v = v * x + coeffs[i - 1];
  return v;
}

/// prod_i (x - nodes[i]) as ascending coefficients (size nodes.size()+1).
template <typename R>
std::vector<std::complex<R>> master_polynomial(const std::vector<std::complex<R>>& nodes) {
  std::vector<std::complex<R>> m{std::complex<R>(1)};
  for (const auto& x : nodes) m = poly_mul_linear(m, x);
  return m;
}

template <typename R>
void check_distinct_nodes(const std::vector<std::complex<R>>& nodes, double tol = 1e-12) {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      if (std::abs(std::complex<double>(static_cast<double>((nodes[i] - nodes[j]).real()),
                                        static_cast<double>((nodes[i] - nodes[j]).imag()))) < tol)
        throw SingularityError("vandermonde: duplicate nodes at indices " +
                               std::to_string(i) + "," + std::to_string(j));
}

/// Explicit inverse of V_ij = nodes[i]^j in O(k^2): column i of V^{-1} is
/// the coefficient vector of the i-th Lagrange basis polynomial, obtained by
/// synthetic division of the master polynomial.
template <typename R>
Eigen::Matrix<std::complex<R>, Eigen::Dynamic, Eigen::Dynamic> vandermonde_inverse_t(
    const std::vector<std::complex<R>>& nodes) {
  using C = std::complex<R>;
  const std::size_t k = nodes.size();
  check_distinct_nodes(nodes);
  Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic> inv(k, k);
  if (k == 0) return inv;
  const auto master = master_polynomial(nodes);
  std::vector<C> q(k);
  for (std::size_t i = 0; i < k; ++i) {
    const C x = nodes[i];
    q[k - 1] = master[k];
    for (std::size_t t = k - 1; t > 0; --t) q[t - 1] = master[t] + x * q[t];
    C denom{};  // q(x) = master'(x)
    for (std::size_t t = k; t > 0; --t) denom = denom * x + q[t - 1];
    for (std::size_t t = 0; t < k; ++t)
      inv(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = q[t] / denom;
  }
  return inv;
}

/// Double-precision contract; computed at extended precision internally.
inline CMat vandermonde_inverse(const CVec& nodes) {
  std::vector<CLD> nd(static_cast<std::size_t>(nodes.size()));
  for (Eigen::Index i = 0; i < nodes.size(); ++i)
    nd[static_cast<std::size_t>(i)] = CLD(nodes(i).real(), nodes(i).imag());
  return vandermonde_inverse_t<long double>(nd).cast<std::complex<double>>();
}

inline CMatLD vandermonde_inverse_ld(const std::vector<CLD>& nodes) {
  return vandermonde_inverse_t<long double>(nodes);
}

template <typename R>
Eigen::Matrix<std::complex<R>, Eigen::Dynamic, Eigen::Dynamic> vandermonde_matrix_t(
    const std::vector<std::complex<R>>& nodes, std::size_t cols) {
  Eigen::Matrix<std::complex<R>, Eigen::Dynamic, Eigen::Dynamic> v(nodes.size(), cols);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::complex<R> p(1);
    for (std::size_t j = 0; j < cols; ++j) {
      v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = p;
      p *= nodes[i];
    }
  }
  return v;
}

inline CMat vandermonde_matrix(const CVec& nodes, std::size_t cols) {
  std::vector<std::complex<double>> nd(nodes.data(), nodes.data() + nodes.size());
  return vandermonde_matrix_t<double>(nd, cols);
}

}  // namespace fcmi

#endif  // FCMI_VANDERMONDE_HPP
