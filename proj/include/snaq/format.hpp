// Copyright 2026 The snaq Authors
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

#ifndef SNAQ_FORMAT_HPP
#define SNAQ_FORMAT_HPP

#include <charconv>
#include <string>

namespace snaq {

// Locale-independent formatting with a fixed digit budget.
inline std::string format_sig15(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 15);
  return std::string(buf, r.ptr);
}

inline std::string format_fixed15(double x) {
  char buf[400];
  auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, 15);
  return std::string(buf, r.ptr);
}

// Rounds to 15 significant digits so serialized output is stable.
inline double round15(double x) {
  const std::string s = format_sig15(x);
  double out = x;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

}  // namespace snaq

#endif  // SNAQ_FORMAT_HPP
