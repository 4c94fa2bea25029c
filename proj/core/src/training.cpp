#include "fwips/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fwips/rng.hpp"

namespace fwips {
namespace {

constexpr double kQuietNan = std::numeric_limits<double>::quiet_NaN();

void add_into(Gradients& acc, const Gradients& g) {
  if (acc.weights.empty()) {
    acc = g;
    return;
  }
  for (std::size_t m = 0; m < g.weights.size(); ++m) {
    for (std::size_t i = 0; i < g.weights[m].data.size(); ++i) {
      acc.weights[m].data[i] += g.weights[m].data[i];
    }
    for (std::size_t i = 0; i < g.biases[m].size(); ++i) {
      acc.biases[m][i] += g.biases[m][i];
    }
  }
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

void fisher_yates(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::swap(idx[i - 1], idx[rng.below(i)]);
  }
}

struct Attempt {
  TrainingOutcome outcome;
  double validation_at_selected = kQuietNan;
};

Attempt run_attempt(const Network& initial, const Partition& parts,
                    const TrainingConfig& config, std::uint64_t attempt_seed) {
  Attempt attempt;
  TrainingOutcome& outcome = attempt.outcome;
  outcome.network = initial;

  Network net = initial;
  Network rollback = initial;
  std::size_t rollback_epoch = 0;
  std::size_t failed_validations = 0;
  double previous_validation = kQuietNan;
  bool stopped = false;

  Rng shuffle_rng(mix_seed(attempt_seed, 0x5345u));
  std::vector<std::size_t> order = all_indices(parts.train.size());

  for (std::size_t epoch = 0; epoch < config.max_epochs && !stopped; ++epoch) {
    fisher_yates(order, shuffle_rng);
    try {
      for (std::size_t start = 0; start < order.size();
           start += config.batch_size) {
        const std::size_t count =
            std::min(config.batch_size, order.size() - start);
        sgd_step(net, parts.train,
                 std::span<const std::size_t>(order.data() + start, count),
                 config.learning_rate);
      }
    } catch (const std::runtime_error& e) {
      outcome.stop_reason = StopReason::Diverged;
      outcome.diagnostic =
          "divergence during epoch " + std::to_string(epoch + 1) + ": " + e.what();
      outcome.epochs_run = outcome.mse_history.size();
      outcome.test_mse = kQuietNan;
      return attempt;
    }

    const double train_mse = mse(net, parts.train);
    const double validation_mse = mse(net, parts.validation);
    if (!std::isfinite(train_mse) || !std::isfinite(validation_mse)) {
      outcome.stop_reason = StopReason::Diverged;
      outcome.diagnostic =
          "non-finite loss after epoch " + std::to_string(epoch + 1);
      outcome.epochs_run = outcome.mse_history.size();
      outcome.test_mse = kQuietNan;
      return attempt;
    }
    outcome.mse_history.push_back({train_mse, validation_mse});

    if (validation_mse <= config.max_error) {
      outcome.stop_reason = StopReason::MaxErrorReached;
      outcome.selected_epoch = epoch;
      outcome.network = net;
      stopped = true;
      break;
    }

    if (epoch == 0 || validation_mse <= previous_validation) {
      // Not an increase: the failure window restarts here.
      failed_validations = 0;
      rollback = net;
      rollback_epoch = epoch;
    } else if (++failed_validations >= config.max_failed_validations) {
      outcome.stop_reason = StopReason::ValidationFailures;
      outcome.selected_epoch = rollback_epoch;
      outcome.network = rollback;
      stopped = true;
      break;
    }
    previous_validation = validation_mse;
  }

  if (!stopped) {
    outcome.stop_reason = StopReason::MaxEpochsReached;
    outcome.selected_epoch = outcome.mse_history.size() - 1;
    outcome.network = net;
  }
  outcome.epochs_run = outcome.mse_history.size();

  attempt.validation_at_selected =
      outcome.mse_history[outcome.selected_epoch].validation;
  outcome.test_mse = mse(outcome.network, parts.test);
  outcome.consistent =
      outcome.test_mse <=
      config.consistency_factor * attempt.validation_at_selected;
  return attempt;
}

}  // namespace

void Dataset::push_back(std::vector<double> input, std::vector<double> target) {
  inputs.push_back(std::move(input));
  targets.push_back(std::move(target));
}

TrainingConfig TrainingConfig::localization() {
  TrainingConfig config;
  config.max_error = 0.25;  // m^2
  return config;
}

TrainingConfig TrainingConfig::radio_map() {
  TrainingConfig config;
  config.max_error = 1.0;  // dB^2
  return config;
}

void TrainingConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("config: learning rate must be finite and >= 0");
  }
  if (max_epochs < 1) {
    throw std::invalid_argument("config: max_epochs must be >= 1");
  }
  if (!std::isfinite(max_error)) {
    throw std::invalid_argument("config: max_error must be finite");
  }
  if (max_failed_validations < 1) {
    throw std::invalid_argument("config: max_failed_validations must be >= 1");
  }
  if (batch_size < 1) {
    throw std::invalid_argument("config: batch_size must be >= 1");
  }
  if (!(consistency_factor >= 0.0)) {
    throw std::invalid_argument("config: consistency_factor must be >= 0");
  }
  const SplitRatios& r = split_ratios;
  if (!(r.train > 0.0 && r.validation > 0.0 && r.test > 0.0)) {
    throw std::invalid_argument("config: split ratios must be positive");
  }
  if (std::abs(r.train + r.validation + r.test - 1.0) > 1e-9) {
    throw std::invalid_argument("config: split ratios must sum to 1");
  }
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::MaxErrorReached: return "MaxErrorReached";
    case StopReason::MaxEpochsReached: return "MaxEpochsReached";
    case StopReason::ValidationFailures: return "ValidationFailures";
    case StopReason::Diverged: return "Diverged";
  }
  return "?";
}

Partition partition(const Dataset& data, const SplitRatios& ratios,
                    std::uint64_t seed) {
  if (data.size() < 3) {
    throw std::invalid_argument("partition: needs at least 3 samples");
  }
  if (data.inputs.size() != data.targets.size()) {
    throw std::invalid_argument("partition: inputs/targets size mismatch");
  }
  const double fractions[3] = {ratios.train, ratios.validation, ratios.test};
  for (double f : fractions) {
    if (!(f > 0.0)) {
      throw std::invalid_argument("partition: ratios must be positive");
    }
  }
  if (std::abs(fractions[0] + fractions[1] + fractions[2] - 1.0) > 1e-9) {
    throw std::invalid_argument("partition: ratios must sum to 1");
  }

  const std::size_t n = data.size();

  // Largest-remainder apportionment; fraction ties go to the later subset.
  std::size_t counts[3];
  double remainders[3];
  std::size_t assigned = 0;
  for (int s = 0; s < 3; ++s) {
    const double share = fractions[s] * static_cast<double>(n);
    counts[s] = static_cast<std::size_t>(std::floor(share));
    remainders[s] = share - std::floor(share);
    assigned += counts[s];
  }
  int order[3] = {0, 1, 2};
  std::stable_sort(order, order + 3, [&](int a, int b) {
    if (remainders[a] != remainders[b]) return remainders[a] > remainders[b];
    return a > b;
  });
  for (std::size_t leftover = n - assigned, i = 0; i < leftover; ++i) {
    ++counts[order[i % 3]];
  }
  // No subset may be empty; train() needs all three.
  for (int s = 0; s < 3; ++s) {
    while (counts[s] == 0) {
      int largest = 0;
      for (int t = 1; t < 3; ++t) {
        if (counts[t] > counts[largest]) largest = t;
      }
      --counts[largest];
      ++counts[s];
    }
  }

  std::vector<std::size_t> idx = all_indices(n);
  Rng rng(seed);
  fisher_yates(idx, rng);

  Partition parts;
  Dataset* slots[3] = {&parts.train, &parts.validation, &parts.test};
  std::size_t cursor = 0;
  for (int s = 0; s < 3; ++s) {
    for (std::size_t i = 0; i < counts[s]; ++i, ++cursor) {
      slots[s]->push_back(data.inputs[idx[cursor]], data.targets[idx[cursor]]);
    }
  }
  return parts;
}

void sgd_step(Network& net, const Dataset& data,
              std::span<const std::size_t> batch_indices, double learning_rate) {
  if (batch_indices.empty()) {
    throw std::invalid_argument("sgd_step: empty batch");
  }
  Gradients acc;
  for (std::size_t idx : batch_indices) {
    add_into(acc, net.backward(data.inputs[idx], data.targets[idx]));
  }
  const double scale = learning_rate / static_cast<double>(batch_indices.size());
  auto& layers = net.layers();
  for (std::size_t m = 0; m < layers.size(); ++m) {
    for (std::size_t i = 0; i < layers[m].weights.data.size(); ++i) {
      layers[m].weights.data[i] -= scale * acc.weights[m].data[i];
    }
    for (std::size_t i = 0; i < layers[m].biases.size(); ++i) {
      layers[m].biases[i] -= scale * acc.biases[m][i];
    }
  }
}

void sgd_step(Network& net, const Dataset& batch, double learning_rate) {
  std::vector<std::size_t> idx = all_indices(batch.size());
  sgd_step(net, batch, idx, learning_rate);
}

double mse(const Network& net, const Dataset& data) {
  if (data.empty()) {
    throw std::invalid_argument("mse: empty dataset");
  }
  double total = 0.0;
  for (std::size_t s = 0; s < data.size(); ++s) {
    const std::vector<double> y = net.forward(data.inputs[s]);
    const std::vector<double>& t = data.targets[s];
    if (t.size() != y.size()) {
      throw std::invalid_argument("mse: target length does not match out_dim");
    }
    double sample = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
      const double d = t[j] - y[j];
      sample += d * d;
    }
    total += sample / static_cast<double>(y.size());
  }
  return total / static_cast<double>(data.size());
}

TrainingOutcome train(const Network& initial, const Dataset& data,
                      const TrainingConfig& config) {
  config.validate();

  TrainingOutcome best;
  double best_ratio = std::numeric_limits<double>::infinity();
  bool have_best = false;

  for (std::size_t attempt_no = 0; attempt_no <= config.max_repartitions;
       ++attempt_no) {
    const std::uint64_t attempt_seed = config.seed + attempt_no;
    const Partition parts = partition(data, config.split_ratios, attempt_seed);
    Attempt attempt = run_attempt(initial, parts, config, attempt_seed);
    attempt.outcome.partitions_tried = attempt_no + 1;

    // A repartition cannot fix a divergent learning rate.
    if (attempt.outcome.stop_reason == StopReason::Diverged) {
      return attempt.outcome;
    }
    if (attempt.outcome.consistent) {
      return attempt.outcome;
    }

    const double validation = attempt.validation_at_selected;
    const double ratio = validation > 0.0
                             ? attempt.outcome.test_mse / validation
                             : std::numeric_limits<double>::infinity();
    if (!have_best || ratio < best_ratio) {
      best_ratio = ratio;
      best = std::move(attempt.outcome);
      have_best = true;
    }
  }
  best.partitions_tried = config.max_repartitions + 1;
  return best;
}

}  // namespace fwips
