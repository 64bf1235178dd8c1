// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace narrowcap {

/// Base of every error raised by the toolkit. `kind()` is the short
/// machine-readable tag surfaced by the CLI error object.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Input outside an operation's domain (point inside a trap, |t| >= rho, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain", what) {}
};

/// Malformed surface/run configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

/// E(x, x) requested; the diagonal value lives in regular_part().
class SingularityError : public Error {
 public:
  explicit SingularityError(const std::string& what)
      : Error("singularity", what) {}
};

/// An iterative method did not converge. `history` carries whatever
/// diagnostic sequence the solver tracked (residuals, ladder values, ...).
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history = {})
      : Error("convergence", what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// Geodesic shooting failed; the graph shortest-path estimate is attached.
class DistanceError : public Error {
 public:
  DistanceError(const std::string& what, double fallback)
      : Error("distance", what), fallback_(fallback) {}
  double fallback() const noexcept { return fallback_; }
  bool used_fallback() const noexcept { return true; }

 private:
  double fallback_;
};

}  // namespace narrowcap
