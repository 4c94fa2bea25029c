#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fwips/radiomap.hpp"
#include "fwips/rng.hpp"

namespace fwips {

// Log-distance path-loss scene with Gaussian dB noise, standing in for a
// physical site survey. Also carries the generation defaults the CLI uses.
struct SynthScene {
  std::vector<Point> ap_positions;
  double tx_power_dbm = -30.0;      // RSS at the reference distance d0 = 1 m
  double path_loss_exponent = 2.5;
  double noise_std_db = 2.0;
  double min_rss_dbm = kMissingApRssDbm;  // clamp floor, doubles as sentinel
  std::uint64_t seed = 1;

  BoundingBox extent;
  double orm_grid_size_m2 = 0.25;
  std::size_t orm_samples_per_rp = 4;
  std::size_t vds_count = 200;

  std::size_t ap_count() const { return ap_positions.size(); }
  void validate() const;
};

// 8 APs on the boundary of a 20 x 15 m region, 0.25 m^2 lattice, 2 dB noise.
SynthScene default_scene();

double noiseless_rss(const SynthScene& scene, const Point& p,
                     std::size_t ap_index);

// Noiseless value plus one Gaussian draw (skipped when noise_std_db == 0),
// clamped below at min_rss_dbm.
double rss_at(const SynthScene& scene, const Point& p, std::size_t ap_index,
              Rng& rng);

// Averages samples_per_rp noisy draws per AP at every lattice point. Uses the
// scene seed; identical scenes produce identical maps.
RadioMap generate_orm(const SynthScene& scene, const BoundingBox& extent,
                      double grid_size_m2, std::size_t samples_per_rp);

// Uniform-random off-grid truth points, one noisy fingerprint each.
EvalSet generate_vds(const SynthScene& scene, const BoundingBox& extent,
                     std::size_t count, std::uint64_t seed);

// key = value text file covering every SynthScene field; `ap` repeats per
// access point.
SynthScene load_scene(const std::string& path);
void save_scene(const SynthScene& scene, const std::string& path);

}  // namespace fwips
