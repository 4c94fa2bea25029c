#include "fwips/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace fwips {

bool all_finite(const std::vector<double>& values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool BoundingBox::contains(const Point& p, double tol) const {
  if (p.size() != dims()) return false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < min[i] - tol || p[i] > max[i] + tol) return false;
  }
  return true;
}

void validate_box(const BoundingBox& box) {
  if (box.min.empty() || box.min.size() != box.max.size()) {
    throw std::invalid_argument("bounding box: corners must be non-empty and equally sized");
  }
  if (!all_finite(box.min) || !all_finite(box.max)) {
    throw std::invalid_argument("bounding box: corners must be finite");
  }
  for (std::size_t i = 0; i < box.min.size(); ++i) {
    if (box.min[i] > box.max[i]) {
      throw std::invalid_argument("bounding box: min exceeds max on axis " + std::to_string(i));
    }
  }
}

BoundingBox bounding_box_of(const std::vector<Point>& points) {
  if (points.empty()) {
    throw std::invalid_argument("bounding_box_of: empty point set");
  }
  BoundingBox box{points.front(), points.front()};
  for (const Point& p : points) {
    if (p.size() != box.min.size()) {
      throw std::invalid_argument("bounding_box_of: inconsistent point dimensions");
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
      box.min[i] = std::min(box.min[i], p[i]);
      box.max[i] = std::max(box.max[i], p[i]);
    }
  }
  return box;
}

double squared_distance(const Point& a, const Point& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("squared_distance: dimension mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double distance(const Point& a, const Point& b) {
  return std::sqrt(squared_distance(a, b));
}

}  // namespace fwips
