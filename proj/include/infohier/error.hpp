// Copyright 2026 The infohier Authors.
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

#ifndef INFOHIER_ERROR_HPP_
#define INFOHIER_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace infohier {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data.
class InputError : public Error {
 public:
  using Error::Error;
};

// A record references a question id absent from the dataset.
class UnknownQuestionError : public InputError {
 public:
  explicit UnknownQuestionError(const std::string& id)
      : InputError("unknown question id: " + id), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace infohier

#endif  // INFOHIER_ERROR_HPP_
