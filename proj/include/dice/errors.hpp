// Copyright 2026 The dice Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DICE_ERRORS_HPP_
#define DICE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace dice {

// Malformed configuration or arguments. CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Persisted data (trace CSV, problem CSV, sidecar) violates its contract.
// Treated as a configuration problem at the CLI boundary (exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A privacy calibration cannot be satisfied. CLI exit code 3.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numeric quantity degenerated (non-finite loss, iterate, or statistic).
// CLI exit code 4.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dice

#endif  // DICE_ERRORS_HPP_
