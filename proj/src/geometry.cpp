// Copyright 2026 The littertrack Authors. All Rights Reserved.
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

#include "littertrack/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "littertrack/error.hpp"

namespace littertrack {

bool is_valid(const BoundingBox& b) {
  return std::isfinite(b.left) && std::isfinite(b.top) &&
         std::isfinite(b.width) && std::isfinite(b.height) && b.width > 0.0 &&
         b.height > 0.0;
}

BoundingBox make_box(double left, double top, double width, double height) {
  BoundingBox b{left, top, width, height};
  if (!is_valid(b)) {
    throw DegenerateBoxError(fmt::format(
        "invalid box (left={}, top={}, width={}, height={})", left, top, width,
        height));
  }
  return b;
}

double intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const double w = std::min(a.right(), b.right()) - std::max(a.left, b.left);
  const double h = std::min(a.bottom(), b.bottom()) - std::max(a.top, b.top);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::min(1.0, inter / uni);
}

BoundingBox expand(const BoundingBox& b, double margin) {
  return make_box(b.left - margin, b.top - margin, b.width + 2.0 * margin,
                  b.height + 2.0 * margin);
}

double centroid_distance(const BoundingBox& a, const BoundingBox& b) {
  return std::hypot(a.center_x() - b.center_x(), a.center_y() - b.center_y());
}

Measurement to_measurement(const BoundingBox& b) {
  return {b.left + b.width / 2.0, b.top + b.height / 2.0, b.width / b.height,
          b.height};
}

BoundingBox from_measurement(const Measurement& m) {
  const double w = m.aspect * m.h;
  return {m.cx - w / 2.0, m.cy - m.h / 2.0, w, m.h};
}

}  // namespace littertrack
