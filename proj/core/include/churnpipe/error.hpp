// Copyright 2026 The Churnpipe Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace churnpipe {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration: invalid parameters, malformed config files,
// catalog violations. CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Bad or inconsistent data: unreadable files, schema mismatches,
// too many rejected rows. CLI maps this to exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage failed mid-run; carries the stage name. CLI maps this
// to exit code 4.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : Error("stage '" + stage + "' failed: " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace churnpipe
