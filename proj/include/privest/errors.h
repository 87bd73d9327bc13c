//
// Copyright 2026 The privest Authors
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
//

#ifndef PRIVEST_ERRORS_H_
#define PRIVEST_ERRORS_H_

#include <stdexcept>
#include <string>

namespace privest {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed inputs: asymmetric adjacency, negative weights, bad dimensions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Arguments outside an operation's domain (e.g. an edge that does not exist).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A solver failed or a recursion produced a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A configuration file could not be read or is missing a key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace privest

#endif  // PRIVEST_ERRORS_H_
