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

#ifndef FCMI_MATRIX_IO_HPP
#define FCMI_MATRIX_IO_HPP

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fcmi/errors.hpp"
#include "fcmi/linalg.hpp"

namespace fcmi {

// Matrices travel in two formats: row-major decimal CSV for people, and a
// compact binary ("FCMIMAT1" magic, two int64 dims, row-major little-endian
// doubles) for everything else. This code assumes a little-endian host.

inline void save_csv(const std::string& path, const Mat& m) {
  std::ofstream f(path);
  if (!f) throw Error("save_csv: cannot open " + path);
  f.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) f << ',';
      f << m(i, j);
    }
    f << '\n';
  }
}

inline Mat load_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("load_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error("load_csv: ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error("load_csv: empty file " + path);
  Mat m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

inline constexpr char kBinMagic[9] = "FCMIMAT1";

inline void save_bin(const std::string& path, const Mat& m) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("save_bin: cannot open " + path);
  f.write(kBinMagic, 8);
  const std::int64_t r = m.rows(), c = m.cols();
  f.write(reinterpret_cast<const char*>(&r), 8);
  f.write(reinterpret_cast<const char*>(&c), 8);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      f.write(reinterpret_cast<const char*>(&v), 8);
    }
}

inline Mat load_bin(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("load_bin: cannot open " + path);
  char magic[8];
  f.read(magic, 8);
  if (!f || std::memcmp(magic, kBinMagic, 8) != 0)
    throw Error("load_bin: bad magic in " + path);
  std::int64_t r = 0, c = 0;
  f.read(reinterpret_cast<char*>(&r), 8);
  f.read(reinterpret_cast<char*>(&c), 8);
  if (!f || r < 0 || c < 0) throw Error("load_bin: bad dims in " + path);
  Mat m(r, c);
  for (std::int64_t i = 0; i < r; ++i)
    for (std::int64_t j = 0; j < c; ++j) {
      double v;
      f.read(reinterpret_cast<char*>(&v), 8);
      if (!f) throw Error("load_bin: truncated file " + path);
      m(i, j) = v;
    }
  return m;
}

/// Loads .csv or binary depending on extension.
inline Mat load_matrix(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return load_csv(path);
  return load_bin(path);
}

// Complex payload blob: little-endian doubles, interleaved re/im, row-major.
// Used by the encrypted-block and worker-encoding wire formats.
inline void append_complex_payload(std::vector<std::uint8_t>& out, const CMat& m) {
  const std::size_t base = out.size();
  out.resize(base + static_cast<std::size_t>(m.size()) * 16);
  std::uint8_t* p = out.data() + base;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double re = m(i, j).real(), im = m(i, j).imag();
      std::memcpy(p, &re, 8); p += 8;
      std::memcpy(p, &im, 8); p += 8;
    }
}

inline CMat read_complex_payload(const std::uint8_t*& p, const std::uint8_t* end,
                                 Eigen::Index rows, Eigen::Index cols) {
  if (end - p < rows * cols * 16) throw Error("read_complex_payload: truncated blob");
  CMat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      double re, im;
      std::memcpy(&re, p, 8); p += 8;
      std::memcpy(&im, p, 8); p += 8;
      m(i, j) = {re, im};
    }
  return m;
}

}  // namespace fcmi

#endif  // FCMI_MATRIX_IO_HPP
