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

#pragma once

namespace littertrack {

// Axis-aligned box in continuous pixel coordinates. (left, top) is the
// upper-left corner; width and height are strictly positive.
struct BoundingBox {
  double left = 0.0;
  double top = 0.0;
  double width = 1.0;
  double height = 1.0;

  double right() const { return left + width; }
  double bottom() const { return top + height; }
  double area() const { return width * height; }
  double center_x() const { return left + width / 2.0; }
  double center_y() const { return top + height / 2.0; }

  bool operator==(const BoundingBox&) const = default;
};

// Filter measurement space: box center, aspect ratio (width / height) and
// height.
struct Measurement {
  double cx = 0.0;
  double cy = 0.0;
  double aspect = 1.0;
  double h = 1.0;

  bool operator==(const Measurement&) const = default;
};

bool is_valid(const BoundingBox& b);

// Throws DegenerateBoxError unless the box is finite with positive size.
BoundingBox make_box(double left, double top, double width, double height);

double intersection_area(const BoundingBox& a, const BoundingBox& b);

// Intersection over union; 0 for disjoint boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

// Grows every side by `margin` pixels (shrinks for negative margins).
BoundingBox expand(const BoundingBox& b, double margin);

double centroid_distance(const BoundingBox& a, const BoundingBox& b);

Measurement to_measurement(const BoundingBox& b);
BoundingBox from_measurement(const Measurement& m);

}  // namespace littertrack
