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

#ifndef FCMI_BRS_CODE_HPP
#define FCMI_BRS_CODE_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fcmi/errors.hpp"
#include "fcmi/field_points.hpp"
#include "fcmi/linalg.hpp"
#include "fcmi/rng.hpp"
#include "fcmi/vandermonde.hpp"

namespace fcmi {

// Balanced Reed-Solomon generator matrices for the coded-inversion scheme.
//
// The generator G (n workers x k tasks) is column-sparsest with d nonzeros
// per column and row-balanced with w = kd/n nonzeros per row, decomposing as
// G = H P with H the Vandermonde matrix over the interpolation points and P
// the column-polynomial coefficients. Restricting to any k rows keeps an
// invertible matrix, and the restricted inverse factors as P^{-1} H_I^{-1}
// with H_I^{-1} available in O(k^2).

struct CodeParams {
  std::size_t n = 1;  // workers
  std::size_t k = 1;  // recovery threshold
  std::size_t s = 0;  // tolerated stragglers, n - k
  std::size_t d = 1;  // column weight / code distance
  std::size_t w = 1;  // row weight, kd/n

  /// d != s+1. The distance identity d = s+1 forces deg(p_j) = k-1; outside
  /// it the mask is still balanced but column degrees fall short of k-1 and
  /// duplicate zero sets appear, which the generator construction has to
  /// compensate for.
  bool extended_regime() const { return d != s + 1; }

  static CodeParams create(std::size_t n, std::size_t k, std::size_t d) {
    if (k < 1 || n < k) throw ParameterError("CodeParams: need n >= k >= 1");
    if (d < 1 || d > n) throw ParameterError("CodeParams: need 1 <= d <= n");
    if ((k * d) % n != 0)
      throw ParameterError("CodeParams: row weight w = kd/n is not an integer for n=" +
                           std::to_string(n) + " k=" + std::to_string(k) +
                           " d=" + std::to_string(d));
    const bool identity_case = (n == k && d == 1);
    if (!identity_case && 2 * d < n)
      throw ParameterError(
          "CodeParams: d must be at least ceil(n/2); the mask construction is not "
          "guaranteed to balance below that");
    CodeParams p;
    p.n = n; p.k = k; p.d = d;
    p.s = n - k;
    p.w = k * d / n;
    return p;
  }

  /// Distance-matched variant d = s+1 (requires k(s+1)/n integral).
  static CodeParams standard(std::size_t n, std::size_t k) {
    return create(n, k, n - k + 1);
  }
};

struct MaskMatrix {
  std::size_t n = 0, k = 0, d = 0, w = 0;
  std::vector<std::uint8_t> bits;  // row-major n x k

  std::uint8_t at(std::size_t row, std::size_t col) const { return bits[row * k + col]; }
  std::uint8_t& at(std::size_t row, std::size_t col) { return bits[row * k + col]; }

  std::vector<std::size_t> zero_rows(std::size_t col) const {
    std::vector<std::size_t> z;
    for (std::size_t i = 0; i < n; ++i)
      if (!at(i, col)) z.push_back(i);
    return z;
  }

  std::vector<std::size_t> support_rows(std::size_t col) const {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (at(i, col)) s.push_back(i);
    return s;
  }
};

/// Sparsest-balanced mask: column `col` gets its d ones at rows
/// (i + col*d) mod n for i = 0..d-1.
inline MaskMatrix mask_matrix(const CodeParams& params) {
  MaskMatrix m;
  m.n = params.n; m.k = params.k; m.d = params.d; m.w = params.w;
  m.bits.assign(params.n * params.k, 0);
  for (std::size_t col = 0; col < params.k; ++col)
    for (std::size_t i = 0; i < params.d; ++i)
      m.at((i + col * params.d) % params.n, col) = 1;
  // The index recurrence balances rows exactly when w is integral and
  // d >= n/2; verify rather than trust.
  for (std::size_t col = 0; col < m.k; ++col) {
    std::size_t cnt = 0;
    for (std::size_t row = 0; row < m.n; ++row) cnt += m.at(row, col);
    if (cnt != m.d) throw ParameterError("mask_matrix: column weight mismatch");
  }
  for (std::size_t row = 0; row < m.n; ++row) {
    std::size_t cnt = 0;
    for (std::size_t col = 0; col < m.k; ++col) cnt += m.at(row, col);
    if (cnt != m.w)
      throw ParameterError("mask_matrix: row " + std::to_string(row) +
                           " has weight " + std::to_string(cnt) + ", expected w=" +
                           std::to_string(m.w));
  }
  return m;
}

namespace detail {

struct ColumnGrouping {
  // Columns sharing a zero set must carry linearly independent polynomials;
  // each gets a monomial multiplier x^e with per-group distinct exponents
  // drawn from a balanced multiset over 0..d-s-1 so the family spans degree
  // k-1. With distinct zero sets (d = s+1) every exponent is 0 and the
  // construction reduces to the plain normalized product.
  std::vector<std::size_t> group_of_col;
  std::vector<std::vector<std::size_t>> group_cols;
  std::vector<std::size_t> exponent_of_col;
};

inline ColumnGrouping group_columns(const MaskMatrix& mask, const CodeParams& params) {
  ColumnGrouping g;
  g.group_of_col.resize(mask.k);
  g.exponent_of_col.assign(mask.k, 0);
  std::map<std::vector<std::size_t>, std::size_t> seen;
  for (std::size_t col = 0; col < mask.k; ++col) {
    auto z = mask.zero_rows(col);
    auto it = seen.find(z);
    if (it == seen.end()) {
      it = seen.emplace(std::move(z), g.group_cols.size()).first;
      g.group_cols.emplace_back();
    }
    g.group_of_col[col] = it->second;
    g.group_cols[it->second].push_back(col);
  }
  const std::size_t mcap = params.d - params.s;  // multiplier degrees 0..mcap-1
  for (const auto& cols : g.group_cols)
    if (cols.size() > mcap)
      throw ParameterError(
          "mask admits no invertible polynomial family: " + std::to_string(cols.size()) +
          " columns share a zero set but only " + std::to_string(mcap) +
          " multiplier degrees fit below k");
  // Balanced exponent multiset: floor(k/mcap) or one more per degree slot.
  std::vector<std::size_t> pool;
  const std::size_t base = mask.k / mcap, rem = mask.k % mcap;
  for (std::size_t e = 0; e < mcap; ++e)
    pool.insert(pool.end(), base + (e < rem ? 1 : 0), e);
  // Deal ascending exponents cyclically over groups, skipping full groups and
  // repeats within a group.
  const std::size_t ng = g.group_cols.size();
  std::vector<std::vector<std::size_t>> dealt(ng);
  std::size_t cursor = 0;
  for (std::size_t e : pool) {
    bool placed = false;
    for (std::size_t t = 0; t < ng && !placed; ++t) {
      const std::size_t gi = (cursor + t) % ng;
      if (dealt[gi].size() < g.group_cols[gi].size() &&
          std::find(dealt[gi].begin(), dealt[gi].end(), e) == dealt[gi].end()) {
        dealt[gi].push_back(e);
        cursor = gi + 1;
        placed = true;
      }
    }
    if (!placed)
      throw ParameterError("mask grouping: exponent assignment failed (unexpected)");
  }
  for (std::size_t gi = 0; gi < ng; ++gi) {
    if (dealt[gi].size() != g.group_cols[gi].size())
      throw ParameterError("mask grouping: exponent assignment incomplete (unexpected)");
    for (std::size_t r = 0; r < dealt[gi].size(); ++r)
      g.exponent_of_col[g.group_cols[gi][r]] = dealt[gi][r];
  }
  return g;
}

/// Coefficients (ascending, extended precision) of column `col`'s polynomial:
/// x^e * prod_{i: M_ic=0} (x - beta_i), normalized to 1 at the column's
/// anchor point (beta_col when the mask allows, else its first support row).
inline std::vector<CLD> column_poly_ld(std::size_t col, const MaskMatrix& mask,
                                       const PointSet& points, const ColumnGrouping& grouping) {
  std::vector<CLD> coeffs{CLD(1)};
  for (std::size_t i : mask.zero_rows(col))
    coeffs = poly_mul_linear<long double>(coeffs, points.embedded_ld[i]);
  const std::size_t e = grouping.exponent_of_col[col];
  coeffs.insert(coeffs.begin(), e, CLD(0));
  if (coeffs.size() > mask.k)
    throw ParameterError("column polynomial degree exceeds k-1 (unexpected)");
  // Anchor: the paper normalizes at beta_col, which is undefined when the
  // mask zeroes its own diagonal; fall back to the first support row. Any
  // nonzero column scale yields the same code.
  std::size_t anchor = col;
  if (col >= mask.n || !mask.at(col, col)) anchor = mask.support_rows(col).front();
  const CLD v = horner(coeffs, points.embedded_ld[anchor]);
  if (std::abs(std::complex<double>(static_cast<double>(v.real()),
                                    static_cast<double>(v.imag()))) < 1e-300)
    throw SingularityError("column polynomial vanishes at its anchor point");
  for (auto& c : coeffs) c /= v;
  coeffs.resize(mask.k, CLD(0));
  return coeffs;
}

}  // namespace detail

struct ColumnPolynomial {
  CVec coeffs;                        // k monomial coefficients, ascending
  std::vector<std::size_t> zero_rows; // rows where the polynomial vanishes
  std::size_t degree = 0;
  std::size_t multiplier_exponent = 0;
};

inline ColumnPolynomial column_polynomial(std::size_t col, const MaskMatrix& mask,
                                          const PointSet& points) {
  if (col >= mask.k) throw ParameterError("column_polynomial: column out of range");
  if (points.size() < mask.n)
    throw ParameterError("column_polynomial: point set smaller than worker count");
  const auto params = CodeParams::create(mask.n, mask.k, mask.d);
  const auto grouping = detail::group_columns(mask, params);
  const auto ld = detail::column_poly_ld(col, mask, points, grouping);
  ColumnPolynomial p;
  p.zero_rows = mask.zero_rows(col);
  p.multiplier_exponent = grouping.exponent_of_col[col];
  p.degree = p.zero_rows.size() + p.multiplier_exponent;
  p.coeffs.resize(static_cast<Eigen::Index>(mask.k));
  for (std::size_t i = 0; i < mask.k; ++i)
    p.coeffs(static_cast<Eigen::Index>(i)) = {static_cast<double>(ld[i].real()),
                                              static_cast<double>(ld[i].imag())};
  return p;
}

struct BrsGenerator {
  CodeParams params;
  PointSet points;
  MaskMatrix mask;
  CMat G;      // n x k, G_ij = p_j(beta_i), columns scaled to unit norm
  CMat H;      // n x k Vandermonde factor
  CMat P;      // k x k coefficient factor (same column scaling as G)
  CMat P_inv;  // cached inverse of P
  double cond_P = 0.0;
  bool ill_conditioned = false;
  std::vector<std::string> warnings;

  // Extended-precision internals backing the structured restricted inverse.
  CMatLD P_inv_ld;
};

inline BrsGenerator generator_matrix(const MaskMatrix& mask, const PointSet& points) {
  if (points.size() < mask.n)
    throw ParameterError("generator_matrix: point set smaller than worker count");
  BrsGenerator gen;
  gen.params = CodeParams::create(mask.n, mask.k, mask.d);
  gen.points = points;
  gen.mask = mask;

  const auto grouping = detail::group_columns(mask, gen.params);
  const std::size_t n = mask.n, k = mask.k;

  CMatLD P(k, k);
  for (std::size_t col = 0; col < k; ++col) {
    const auto c = detail::column_poly_ld(col, mask, points, grouping);
    for (std::size_t i = 0; i < k; ++i)
      P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col)) = c[i];
  }
  CMatLD H(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    CLD p(1);
    for (std::size_t j = 0; j < k; ++j) {
      H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = p;
      p *= points.embedded_ld[i];
    }
  }
  CMatLD G = H * P;

  // Unit column norms. The polynomial normalization is a free scale; unit
  // columns keep the restricted systems as well-conditioned as this family
  // allows.
  for (std::size_t col = 0; col < k; ++col) {
    const long double nrm = G.col(static_cast<Eigen::Index>(col)).norm();
    G.col(static_cast<Eigen::Index>(col)) /= nrm;
    P.col(static_cast<Eigen::Index>(col)) /= nrm;
  }

  gen.G = G.cast<std::complex<double>>();
  gen.H = H.cast<std::complex<double>>();
  gen.P = P.cast<std::complex<double>>();

  Eigen::PartialPivLU<CMatLD> lu(P);
  CMatLD P_inv = lu.inverse();
  P_inv = P_inv * (CMatLD::Identity(k, k) * CLD(2) - P * P_inv);  // one Newton step
  gen.P_inv_ld = P_inv;
  gen.P_inv = P_inv.cast<std::complex<double>>();

  gen.cond_P = condition_number(gen.P);
  if (!(gen.cond_P < 1e12)) {
    gen.ill_conditioned = true;
    gen.warnings.push_back("P condition estimate " + std::to_string(gen.cond_P) +
                           " exceeds 1e12; restricted inverses are unreliable");
  }
  // Support must match the mask exactly.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t col = 0; col < k; ++col) {
      const bool nz = std::abs(gen.G(static_cast<Eigen::Index>(i),
                                     static_cast<Eigen::Index>(col))) > 1e-9;
      if (nz != static_cast<bool>(mask.at(i, col))) {
        gen.warnings.push_back("support mismatch at (" + std::to_string(i) + "," +
                               std::to_string(col) + ")");
        gen.ill_conditioned = true;
      }
    }
  return gen;
}

inline void check_subset(const std::vector<std::size_t>& rows, std::size_t n, std::size_t k) {
  if (rows.size() != k)
    throw RecoveryThresholdNotMet(rows.size(), k);
  std::vector<std::size_t> sorted = rows;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ParameterError("row subset has duplicates");
  if (sorted.back() >= n) throw ParameterError("row subset index out of range");
}

/// G_I^{-1} = P^{-1} H_I^{-1} with the Vandermonde factor inverted by the
/// O(k^2) synthetic-division recurrence; O(k^2 + k^omega) total.
inline CMat restricted_inverse(const BrsGenerator& gen, const std::vector<std::size_t>& rows) {
  check_subset(rows, gen.params.n, gen.params.k);
  std::vector<CLD> nodes(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) nodes[i] = gen.points.embedded_ld[rows[i]];
  const CMatLD vinv = vandermonde_inverse_ld(nodes);
  return (gen.P_inv_ld * vinv).cast<std::complex<double>>();
}

struct MdsReport {
  std::size_t checked = 0;
  bool exhaustive = false;
  double min_abs_det = 0.0;
  double max_condition = 0.0;
  bool pass = false;
  std::vector<std::size_t> worst_subset;  // subset attaining max_condition
};

namespace detail {

inline bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t k = c.size();
  for (std::size_t i = k; i > 0; --i) {
    if (c[i - 1] < n - k + (i - 1)) {
      ++c[i - 1];
      for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

inline double binomial_hint(std::size_t n, std::size_t k) {
  double v = 1.0;
  for (std::size_t i = 0; i < k; ++i) v *= static_cast<double>(n - i) / static_cast<double>(i + 1);
  return v;
}

}  // namespace detail

/// Checks the MDS property on row subsets: exhaustive when C(n,k) fits under
/// the cap, a seeded random sample otherwise. Pass means every sampled
/// restriction has condition below 1e10.
inline MdsReport verify_mds(const CMat& G, std::size_t max_subsets = 100000,
                            std::uint64_t seed = 17) {
  const std::size_t n = static_cast<std::size_t>(G.rows());
  const std::size_t k = static_cast<std::size_t>(G.cols());
  MdsReport rep;
  rep.pass = true;
  rep.min_abs_det = std::numeric_limits<double>::infinity();
  const double total = detail::binomial_hint(n, k);
  rep.exhaustive = total <= static_cast<double>(max_subsets);

  auto probe = [&](const std::vector<std::size_t>& rows) {
    CMat gi(k, k);
    for (std::size_t r = 0; r < k; ++r) gi.row(static_cast<Eigen::Index>(r)) =
        G.row(static_cast<Eigen::Index>(rows[r]));
    Eigen::JacobiSVD<CMat> svd(gi);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1), smax = sv(0);
    const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) logdet += std::log(std::max(sv(i), 1e-300));
    const double absdet = std::exp(logdet);
    rep.min_abs_det = std::min(rep.min_abs_det, absdet);
    if (cond > rep.max_condition) {
      rep.max_condition = cond;
      rep.worst_subset = rows;
    }
    if (!(cond < 1e10)) rep.pass = false;
    ++rep.checked;
  };

  if (rep.exhaustive) {
    std::vector<std::size_t> rows(k);
    for (std::size_t i = 0; i < k; ++i) rows[i] = i;
    do { probe(rows); } while (detail::next_combination(rows, n));
  } else {
    Rng rng(seed);
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    for (std::size_t t = 0; t < max_subsets; ++t) {
      for (std::size_t i = 0; i < k; ++i)
        std::swap(pool[i], pool[i + rng.bounded(n - i)]);
      std::vector<std::size_t> rows(pool.begin(), pool.begin() + static_cast<long>(k));
      std::sort(rows.begin(), rows.end());
      probe(rows);
    }
  }
  return rep;
}

inline MdsReport verify_mds(const BrsGenerator& gen, std::size_t max_subsets = 100000,
                            std::uint64_t seed = 17) {
  return verify_mds(gen.G, max_subsets, seed);
}

/// Cyclic-MDS alternative generator: the circulant of cyclic shifts of the
/// degree-s polynomial prod_{i=1..s} (x - beta_i), with s columns erased.
/// Row weights need not balance (and w = kd/n need not be integral); decoding
/// falls back to LU.
inline CMat cyclic_generator(std::size_t n, std::size_t s, const FieldSpec& spec,
                             const std::vector<std::size_t>& erase_cols = {}) {
  if (n < 1 || s >= n) throw ParameterError("cyclic_generator: need 0 <= s < n");
  const std::size_t k = n - s;
  const std::size_t d = s + 1;
  const PointSet points = build_point_set(spec, n);
  std::vector<CLD> roots(points.embedded_ld.begin(), points.embedded_ld.begin() + static_cast<long>(s));
  const auto g1 = master_polynomial(roots);  // support s+1; all coefficients nonzero
  std::vector<std::size_t> erase = erase_cols;
  if (erase.empty())
    for (std::size_t c = k; c < n; ++c) erase.push_back(c);  // default: trailing s columns
  if (erase.size() != s) throw ParameterError("cyclic_generator: need exactly s erased columns");
  std::vector<bool> erased(n, false);
  for (std::size_t c : erase) {
    if (c >= n || erased[c]) throw ParameterError("cyclic_generator: bad erase column");
    erased[c] = true;
  }
  CMat G(n, k);
  std::size_t out_col = 0;
  for (std::size_t col = 0; col < n; ++col) {
    if (erased[col]) continue;
    for (std::size_t row = 0; row < n; ++row) {
      const std::size_t offset = (row + n - col % n) % n;
      const CLD v = offset <= s ? g1[offset] : CLD(0);
      G(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(out_col)) = {
          static_cast<double>(v.real()), static_cast<double>(v.imag())};
    }
    ++out_col;
  }
  for (std::size_t row = 0; row < n; ++row) {
    const long weight = (G.row(static_cast<Eigen::Index>(row)).cwiseAbs().array() > 1e-12).count();
    if (weight < 1 || weight > static_cast<long>(d))
      throw ParameterError("cyclic_generator: row weight out of range after erasure");
  }
  return G;
}

inline nlohmann::json to_json(const BrsGenerator& gen) {
  nlohmann::json j;
  j["params"] = {{"n", gen.params.n}, {"k", gen.params.k}, {"s", gen.params.s},
                 {"d", gen.params.d}, {"w", gen.params.w}};
  j["mask"] = gen.mask.bits;
  auto dump = [](const CMat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index jx = 0; jx < m.cols(); ++jx)
        row.push_back({m(i, jx).real(), m(i, jx).imag()});
      rows.push_back(std::move(row));
    }
    return rows;
  };
  j["G"] = dump(gen.G);
  j["H"] = dump(gen.H);
  j["P"] = dump(gen.P);
  j["cond_P"] = gen.cond_P;
  j["warnings"] = gen.warnings;
  return j;
}

}  // namespace fcmi

#endif  // FCMI_BRS_CODE_HPP
