// Copyright 2026  The trivox authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRIVOX_CORE_CHECK_H_
#define TRIVOX_CORE_CHECK_H_

#include <sstream>
#include <stdexcept>
#include <string>

namespace trivox {

// Raised for contract violations (bad inputs, malformed files, dimension
// mismatches). The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {
struct MsgStream {
  std::ostringstream os;
  template <typename T>
  MsgStream& operator<<(const T& v) {
    os << v;
    return *this;
  }
};
struct Thrower {
  [[noreturn]] void operator&&(const MsgStream& s) { throw Error(s.os.str()); }
};
}  // namespace detail

}  // namespace trivox

// TVX_CHECK(cond) << "message"; throws trivox::Error when cond is false.
#define TVX_CHECK(cond) \
  if (cond) {           \
  } else                \
    ::trivox::detail::Thrower{}&& ::trivox::detail::MsgStream{}

#define TVX_FAIL() ::trivox::detail::Thrower{}&& ::trivox::detail::MsgStream{}

#endif  // TRIVOX_CORE_CHECK_H_
