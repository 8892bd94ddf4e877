// Copyright 2026 The CaCo Authors.
//
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

#ifndef CACO_ERRORS_H_
#define CACO_ERRORS_H_

#include <stdexcept>
#include <string>

namespace caco {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes are incompatible.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A scalar hyper-parameter is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// An embedding has (numerically) zero norm and cannot be normalized.
class DegenerateEmbeddingError : public Error {
 public:
  using Error::Error;
};

// A documented precondition was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

// The categorical dictionary does not yet hold a full group for the request.
class NotWarmError : public Error {
 public:
  using Error::Error;
};

// Malformed experiment spec, unknown key or unusable output location.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace caco

#endif  // CACO_ERRORS_H_
