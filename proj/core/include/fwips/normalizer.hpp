#pragma once

#include <cstddef>
#include <vector>

namespace fwips {

// Per-dimension affine map fitted so the fitting data spans [0, 1]: the
// per-dimension minimum maps to 0 and the maximum to 1. A dimension with zero
// range maps everything to 0.5 and its inverse returns the fitted constant.
//
// A default-constructed normalizer is a passthrough identity that accepts any
// input length.
class AffineNormalizer {
 public:
  AffineNormalizer() = default;
  AffineNormalizer(std::vector<double> scale, std::vector<double> offset,
                   std::vector<double> reference);

  static AffineNormalizer fit(const std::vector<std::vector<double>>& data);
  static AffineNormalizer identity(std::size_t dims);

  std::vector<double> forward(const std::vector<double>& x) const;
  std::vector<double> inverse(const std::vector<double>& y) const;

  bool passthrough() const { return scale_.empty(); }
  std::size_t dims() const { return scale_.size(); }

  const std::vector<double>& scale() const { return scale_; }
  const std::vector<double>& offset() const { return offset_; }
  const std::vector<double>& reference() const { return reference_; }

  bool operator==(const AffineNormalizer&) const = default;

 private:
  std::vector<double> scale_;
  std::vector<double> offset_;
  // Fitted per-dimension minimum; the inverse of a degenerate dimension
  // returns this value.
  std::vector<double> reference_;
};

}  // namespace fwips
