#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fwips/geometry.hpp"

namespace fwips {

// RSS value recorded for an access point that was not received. Below any
// plausible reading.
inline constexpr double kMissingApRssDbm = -100.0;

enum class MapKind { Orm, Trm, Rrm };

const char* to_string(MapKind kind);
MapKind map_kind_from_string(const std::string& text);

// Paired reference-point coordinates and fingerprints plus lattice metadata.
// M reference points, N access points, D coordinate dimensions. The extent is
// the tight bounding box of the reference points and is recomputed on
// construction, so it survives file roundtrips without being serialized.
// Immutable after construction.
class RadioMap {
 public:
  RadioMap(std::vector<Point> points, std::vector<Fingerprint> fingerprints,
           double grid_size_m2, MapKind kind);

  std::size_t rp_count() const { return points_.size(); }   // M
  std::size_t ap_count() const { return ap_count_; }        // N
  std::size_t dims() const { return dims_; }                // D

  const std::vector<Point>& points() const { return points_; }
  const std::vector<Fingerprint>& fingerprints() const { return fingerprints_; }
  double grid_size_m2() const { return grid_size_m2_; }
  MapKind kind() const { return kind_; }
  const BoundingBox& extent() const { return extent_; }

 private:
  std::vector<Point> points_;
  std::vector<Fingerprint> fingerprints_;
  double grid_size_m2_;
  MapKind kind_;
  BoundingBox extent_;
  std::size_t dims_ = 0;
  std::size_t ap_count_ = 0;
};

// Ground-truth positions with the fingerprints measured there, used for
// end-to-end positioning evaluation.
class EvalSet {
 public:
  EvalSet(std::vector<Point> truths, std::vector<Fingerprint> queries);

  std::size_t size() const { return truths_.size(); }  // T
  const std::vector<Point>& truths() const { return truths_; }
  const std::vector<Fingerprint>& queries() const { return queries_; }

 private:
  std::vector<Point> truths_;
  std::vector<Fingerprint> queries_;
};

// Square lattice of spacing sqrt(grid_size_m2) anchored at the extent's
// minimum corner, boundary points included, axis 0 varying fastest. An axis
// whose side is shorter than the spacing contributes the minimum corner only;
// when that happens *spacing_exceeds_extent is set if provided.
std::vector<Point> make_grid(const BoundingBox& extent, double grid_size_m2,
                             bool* spacing_exceeds_extent = nullptr);

// Keeps exactly the reference points lying on the coarser lattice anchored at
// the extent's minimum corner; fingerprints are carried unchanged. The target
// spacing must be an integer multiple of the source spacing.
RadioMap downsample(const RadioMap& source, double target_grid_size_m2);

// CSV schema, shared by radio maps and evaluation sets:
//   line 1: D=<d>,N=<n>,G=<grid_size_m2>,KIND=<ORM|TRM|RRM|VDS>
//   line 2: x1,..,xD,ap1,..,apN
//   then one row per point, full-precision decimal values, newline-terminated.
// VDS files carry G=0 (no lattice). Missing-AP readings are stored as the
// sentinel value, see kMissingApRssDbm.
void save_radiomap(const RadioMap& map, const std::string& path);
RadioMap load_radiomap(const std::string& path);

void save_evalset(const EvalSet& set, const std::string& path);
EvalSet load_evalset(const std::string& path);

}  // namespace fwips
