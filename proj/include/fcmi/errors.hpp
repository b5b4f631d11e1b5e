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

#ifndef FCMI_ERRORS_HPP
#define FCMI_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fcmi {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid code/solver/partition parameters.
class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(what) {}
};

/// Config-file schema violation; `path` is a JSON-pointer-style location.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Numerically singular input (duplicate nodes, rank-deficient matrix).
class SingularityError : public Error {
 public:
  explicit SingularityError(const std::string& what) : Error(what) {}
};

/// An iterative solver produced non-finite values.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long iteration)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  long iteration() const { return iteration_; }

 private:
  long iteration_;
};

/// Fewer responsive workers than the recovery threshold.
class RecoveryThresholdNotMet : public Error {
 public:
  RecoveryThresholdNotMet(std::size_t have, std::size_t need)
      : Error("recovery threshold not met: have " + std::to_string(have) +
              " responses, need " + std::to_string(need)),
        have_(have), need_(need) {}
  std::size_t have() const { return have_; }
  std::size_t need() const { return need_; }

 private:
  std::size_t have_, need_;
};

/// A supposedly real result carried an imaginary residue above tolerance.
class NumericalIntegrityError : public Error {
 public:
  explicit NumericalIntegrityError(const std::string& what) : Error(what) {}
};

/// Mismatched keys, permutations or message shapes between protocol peers.
class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what) : Error(what) {}
};

}  // namespace fcmi

#endif  // FCMI_ERRORS_HPP
