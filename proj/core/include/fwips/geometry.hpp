#pragma once

#include <cstddef>
#include <vector>

namespace fwips {

// A location in the region of interest, in meters. Dimension D >= 1.
using Point = std::vector<double>;

// RSS readings of the N visible access points at one location, in dBm.
using Fingerprint = std::vector<double>;

// Axis-aligned box; min and max corners share the dimension D.
struct BoundingBox {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t dims() const { return min.size(); }
  double side(std::size_t axis) const { return max[axis] - min[axis]; }
  bool contains(const Point& p, double tol = 0.0) const;

  bool operator==(const BoundingBox&) const = default;
};

// Throws std::invalid_argument unless corners are finite, equally sized,
// non-empty and ordered (min <= max per axis).
void validate_box(const BoundingBox& box);

// Tight bounding box of a non-empty point set.
BoundingBox bounding_box_of(const std::vector<Point>& points);

double squared_distance(const Point& a, const Point& b);
double distance(const Point& a, const Point& b);

bool all_finite(const std::vector<double>& values);

}  // namespace fwips
