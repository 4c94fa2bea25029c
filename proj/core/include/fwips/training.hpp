#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fwips/network.hpp"

namespace fwips {

// Paired raw-unit samples; inputs[i] belongs to targets[i].
struct Dataset {
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> targets;

  std::size_t size() const { return inputs.size(); }
  bool empty() const { return inputs.empty(); }
  void push_back(std::vector<double> input, std::vector<double> target);
};

struct SplitRatios {
  double train = 0.70;
  double validation = 0.15;
  double test = 0.15;
};

struct TrainingConfig {
  double learning_rate = 0.05;
  std::size_t max_epochs = 1000;
  // Validation MSE threshold, in squared physical units (m^2 or dB^2).
  double max_error = 0.25;
  std::size_t max_failed_validations = 6;
  SplitRatios split_ratios{};
  std::uint64_t seed = 0;
  std::size_t max_repartitions = 5;
  std::size_t batch_size = 16;
  // Test MSE within this factor of validation MSE counts as consistent.
  double consistency_factor = 1.5;

  static TrainingConfig localization();  // max_error 0.25 m^2
  static TrainingConfig radio_map();     // max_error 1 dB^2

  void validate() const;
};

enum class StopReason {
  MaxErrorReached,      // validation MSE fell to max_error or below
  MaxEpochsReached,     // epoch budget exhausted
  ValidationFailures,   // validation MSE rose for max_failed_validations
                        // consecutive epochs; parameters roll back to the
                        // epoch preceding the increase run
  Diverged              // non-finite loss, see diagnostic
};

const char* to_string(StopReason reason);

struct EpochMse {
  double train = 0.0;
  double validation = 0.0;
};

struct TrainingOutcome {
  Network network;  // parameters of the selected epoch
  StopReason stop_reason = StopReason::MaxEpochsReached;
  std::size_t epochs_run = 0;
  std::size_t selected_epoch = 0;  // index into mse_history
  std::vector<EpochMse> mse_history;
  double test_mse = 0.0;
  bool consistent = false;
  std::size_t partitions_tried = 1;
  std::string diagnostic;  // set when stop_reason == Diverged
};

struct Partition {
  Dataset train;
  Dataset validation;
  Dataset test;
};

// Seeded shuffle followed by a largest-remainder split (fraction ties go to
// the later subset); every subset receives at least one sample. Requires
// at least 3 samples.
Partition partition(const Dataset& data, const SplitRatios& ratios,
                    std::uint64_t seed);

// One gradient-descent update with the mean gradient over the batch.
void sgd_step(Network& net, const Dataset& data,
              std::span<const std::size_t> batch_indices, double learning_rate);
void sgd_step(Network& net, const Dataset& batch, double learning_rate);

// Mean over samples of the per-sample mean squared output error, computed on
// denormalized outputs so thresholds carry physical units.
double mse(const Network& net, const Dataset& data);

// Epoch loop of shuffled mini-batch gradient descent with the three stopping
// rules, followed by the test-set consistency check; inconsistent attempts
// are repartitioned with a fresh seed up to max_repartitions times.
TrainingOutcome train(const Network& initial, const Dataset& data,
                      const TrainingConfig& config);

}  // namespace fwips
