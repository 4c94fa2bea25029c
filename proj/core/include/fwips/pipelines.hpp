#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fwips/fla.hpp"
#include "fwips/radiomap.hpp"
#include "fwips/training.hpp"

namespace fwips {

// Fingerprint -> position regressor (network maps N RSS values to D
// coordinates). Immutable once trained.
struct LocalizationModel {
  TrainingOutcome training;

  const Network& network() const { return training.network; }
  Point locate(const Fingerprint& rss) const;
};

// Position -> expected-fingerprint regressor (D coordinates to N RSS values).
struct RadioMapModel {
  TrainingOutcome training;

  const Network& network() const { return training.network; }
  Fingerprint predict(const Point& position) const;
};

// Trains a localization network on the map's fingerprints/coordinates with
// normalizers fitted on the map. Throws std::runtime_error on divergence; a
// persistently inconsistent train/validation/test split is reported through
// training.consistent instead.
LocalizationModel train_la(const RadioMap& trm, std::size_t hidden_layers,
                           const std::vector<std::size_t>& hidden_widths,
                           const TrainingConfig& config);

// Symmetric trainer for the radio-map direction (coordinates in, RSS out).
RadioMapModel train_rm(const RadioMap& trm, std::size_t hidden_layers,
                       const std::vector<std::size_t>& hidden_widths,
                       const TrainingConfig& config);

// Evaluates the model over a fresh lattice and pairs coordinates with the
// predicted fingerprints; the reconstructed map never extrapolates beyond the
// given extent.
RadioMap reconstruct(const RadioMapModel& model, const BoundingBox& extent,
                     double grid_size_m2);

// Per-replicate mean/std error radii plus the spread caused by random
// initialization: sigma_mean and sigma_std are the sample stds (divisor n-1)
// of the per-replicate means and stds.
struct ReplicateStats {
  std::vector<double> means;
  std::vector<double> stds;
  double sigma_mean = 0.0;
  double sigma_std = 0.0;
  std::size_t failed = 0;
  std::vector<std::string> failures;
};

using LocatorBuilder = std::function<Locator(std::uint64_t seed)>;

// Builds one locator per seed base_seed + 0 .. replicates-1, evaluates each
// on the eval set, and aggregates. Failed replicates are excluded with a
// warning; fewer than two survivors is an error. Replicates run concurrently;
// results are ordered by replicate index.
ReplicateStats replicate_experiment(const LocatorBuilder& builder,
                                    const EvalSet& eval_set,
                                    std::size_t replicates = 100,
                                    std::uint64_t base_seed = 0);

}  // namespace fwips
