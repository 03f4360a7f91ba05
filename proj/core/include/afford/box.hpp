// Copyright 2026 The Afford Authors. All Rights Reserved.
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

#ifndef AFFORD_BOX_HPP_
#define AFFORD_BOX_HPP_

#include <array>

namespace afford {

// Axis-aligned box in image pixels, origin top-left.
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  // Throws kInvalidBox unless all coordinates are finite and min < max.
  static BoundingBox make(double x_min, double y_min, double x_max,
                          double y_max);
  static BoundingBox from_array(const std::array<double, 4>& xyxy) {
    return make(xyxy[0], xyxy[1], xyxy[2], xyxy[3]);
  }

  bool valid() const noexcept;
  double width() const noexcept { return x_max - x_min; }
  double height() const noexcept { return y_max - y_min; }
  double area() const noexcept { return width() * height(); }
  double center_x() const noexcept { return 0.5 * (x_min + x_max); }
  double center_y() const noexcept { return 0.5 * (y_min + y_max); }
  std::array<double, 4> to_array() const { return {x_min, y_min, x_max, y_max}; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

}  // namespace afford

#endif  // AFFORD_BOX_HPP_
