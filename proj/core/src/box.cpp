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

#include "afford/box.hpp"

#include <cmath>
#include <sstream>

#include "afford/error.hpp"

namespace afford {

bool BoundingBox::valid() const noexcept {
  return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
         std::isfinite(y_max) && x_min < x_max && y_min < y_max;
}

BoundingBox BoundingBox::make(double x_min, double y_min, double x_max,
                              double y_max) {
  BoundingBox box{x_min, y_min, x_max, y_max};
  if (!box.valid()) {
    std::ostringstream msg;
    msg << "box [" << x_min << ", " << y_min << ", " << x_max << ", " << y_max
        << "] needs finite coordinates with min < max";
    throw Error(ErrorCode::kInvalidBox, msg.str());
  }
  return box;
}

}  // namespace afford
