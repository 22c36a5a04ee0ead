/*
  Copyright (c) 2026 The coag authors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

#ifndef COAG_CORE_ERROR_HPP
#define COAG_CORE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace coag {

enum class Status {
  Ok = 0,
  Domain,
  InvalidArgument,
  Unsupported,
  Config,
  Constructive,
  Io,
  Numerical,
  Internal
};

class Error : public std::runtime_error {
 public:
  Error(Status s, const std::string& what) : std::runtime_error(what), status_(s) {}
  Status status() const noexcept { return status_; }

 private:
  Status status_;
};

// Constructive failure carries the first index m that could not be met.
class ConstructiveError : public Error {
 public:
  ConstructiveError(int m, const std::string& what)
      : Error(Status::Constructive, what), index_(m) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

[[noreturn]] inline void fail(Status s, const std::string& what) { throw Error(s, what); }

}  // namespace coag

#endif
