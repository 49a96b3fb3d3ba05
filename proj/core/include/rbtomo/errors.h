// Copyright 2026 The rbtomo Authors
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

#ifndef RBTOMO_ERRORS_H
#define RBTOMO_ERRORS_H

#include <stdexcept>
#include <string>

namespace rbtomo {

/// Bad user input: out-of-range parameters, mismatched dimensions, malformed documents.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A computation could not be completed reliably (singular systems, diverging estimators).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a map that must be inverted is singular or too close to singular.
struct SingularMapError : NumericalError {
    SingularMapError(const std::string &what, double smallest_singular_value, double condition_number)
        : NumericalError(what),
          smallest_singular_value(smallest_singular_value),
          condition_number(condition_number) {
    }
    double smallest_singular_value;
    double condition_number;
};

}  // namespace rbtomo

#endif
