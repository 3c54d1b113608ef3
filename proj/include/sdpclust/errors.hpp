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

#ifndef SDPCLUST_ERRORS_HPP
#define SDPCLUST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sdpclust {

struct ParamError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Balanced label vectors need even n.
struct BalanceError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Operation applied to an observation of the wrong kind.
struct KindError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct MagnitudeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SizeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct BudgetError : std::runtime_error {
  BudgetError(const std::string& msg, double required)
      : std::runtime_error(msg), required_trials(required) {}
  double required_trials;
};

struct IdentityViolation : std::runtime_error {
  IdentityViolation(const std::string& identity, double deviation)
      : std::runtime_error("identity '" + identity + "' deviates by " +
                           std::to_string(deviation)),
        identity_name(identity), deviation(deviation) {}
  std::string identity_name;
  double deviation;
};

struct EstimateViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FactViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SymmetryError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sdpclust

#endif  // SDPCLUST_ERRORS_HPP
