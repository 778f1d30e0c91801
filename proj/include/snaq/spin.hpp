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

#ifndef SNAQ_SPIN_HPP
#define SNAQ_SPIN_HPP

#include <compare>
#include <stdexcept>
#include <string>
#include <vector>

namespace snaq {

// Representation label j, stored as the non-negative integer 2j.
class SpinLabel {
 public:
  constexpr SpinLabel() = default;
  constexpr explicit SpinLabel(int twice_j) : twice_(twice_j) {
    if (twice_j < 0) throw std::invalid_argument("negative twice-spin label");
  }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return twice_ / 2.0; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }

  constexpr auto operator<=>(const SpinLabel&) const = default;

  std::string str() const {
    return twice_ % 2 == 0 ? std::to_string(twice_ / 2)
                           : std::to_string(twice_) + "/2";
  }

 private:
  int twice_ = 0;
};

inline constexpr SpinLabel kSpin0{0};
inline constexpr SpinLabel kSpinHalf{1};

// Deformation level k >= 1; labels run over 2j = 0..k.
class Level {
 public:
  constexpr explicit Level(int k) : k_(k) {
    if (k < 1) throw std::invalid_argument("level k must be >= 1");
  }

  constexpr int k() const { return k_; }
  constexpr int num_labels() const { return k_ + 1; }
  constexpr bool contains(SpinLabel j) const { return j.twice() <= k_; }

  void require(SpinLabel j) const {
    if (!contains(j)) {
      throw std::out_of_range("label 2j=" + std::to_string(j.twice()) +
                              " out of range for k=" + std::to_string(k_));
    }
  }

  std::vector<SpinLabel> labels() const {
    std::vector<SpinLabel> out;
    for (int t = 0; t <= k_; ++t) out.emplace_back(t);
    return out;
  }

  constexpr bool operator==(const Level&) const = default;

 private:
  int k_;
};

}  // namespace snaq

#endif  // SNAQ_SPIN_HPP
