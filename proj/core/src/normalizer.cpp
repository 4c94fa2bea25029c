#include "fwips/normalizer.hpp"

#include <cmath>
#include <stdexcept>

namespace fwips {

AffineNormalizer::AffineNormalizer(std::vector<double> scale,
                                   std::vector<double> offset,
                                   std::vector<double> reference)
    : scale_(std::move(scale)),
      offset_(std::move(offset)),
      reference_(std::move(reference)) {
  if (scale_.size() != offset_.size() || scale_.size() != reference_.size()) {
    throw std::invalid_argument("normalizer: parameter vectors must agree in size");
  }
}

AffineNormalizer AffineNormalizer::fit(
    const std::vector<std::vector<double>>& data) {
  if (data.empty()) {
    throw std::invalid_argument("normalizer fit: empty data");
  }
  const std::size_t dims = data.front().size();
  std::vector<double> lo = data.front();
  std::vector<double> hi = data.front();
  for (const auto& row : data) {
    if (row.size() != dims) {
      throw std::invalid_argument("normalizer fit: inconsistent row lengths");
    }
    for (std::size_t i = 0; i < dims; ++i) {
      if (!std::isfinite(row[i])) {
        throw std::invalid_argument("normalizer fit: non-finite value");
      }
      lo[i] = std::min(lo[i], row[i]);
      hi[i] = std::max(hi[i], row[i]);
    }
  }
  std::vector<double> scale(dims), offset(dims);
  for (std::size_t i = 0; i < dims; ++i) {
    const double range = hi[i] - lo[i];
    if (range > 0.0) {
      scale[i] = 1.0 / range;
      offset[i] = -lo[i] / range;
    } else {
      // Zero-range dimension: everything maps to the interval midpoint.
      scale[i] = 0.0;
      offset[i] = 0.5;
    }
  }
  return AffineNormalizer(std::move(scale), std::move(offset), std::move(lo));
}

AffineNormalizer AffineNormalizer::identity(std::size_t dims) {
  return AffineNormalizer(std::vector<double>(dims, 1.0),
                          std::vector<double>(dims, 0.0),
                          std::vector<double>(dims, 0.0));
}

std::vector<double> AffineNormalizer::forward(
    const std::vector<double>& x) const {
  if (passthrough()) return x;
  if (x.size() != dims()) {
    throw std::invalid_argument("normalizer forward: dimension mismatch");
  }
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = scale_[i] * x[i] + offset_[i];
  }
  return out;
}

std::vector<double> AffineNormalizer::inverse(
    const std::vector<double>& y) const {
  if (passthrough()) return y;
  if (y.size() != dims()) {
    throw std::invalid_argument("normalizer inverse: dimension mismatch");
  }
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    out[i] = scale_[i] != 0.0 ? (y[i] - offset_[i]) / scale_[i] : reference_[i];
  }
  return out;
}

}  // namespace fwips
