#include "fwips/pipelines.hpp"

#include <atomic>
#include <iostream>
#include <stdexcept>
#include <thread>

namespace fwips {
namespace {

Dataset la_dataset(const RadioMap& trm) {
  Dataset data;
  for (std::size_t i = 0; i < trm.rp_count(); ++i) {
    data.push_back(trm.fingerprints()[i], trm.points()[i]);
  }
  return data;
}

Dataset rm_dataset(const RadioMap& trm) {
  Dataset data;
  for (std::size_t i = 0; i < trm.rp_count(); ++i) {
    data.push_back(trm.points()[i], trm.fingerprints()[i]);
  }
  return data;
}

TrainingOutcome train_regressor(const Dataset& data, std::size_t hidden_layers,
                                const std::vector<std::size_t>& hidden_widths,
                                const TrainingConfig& config) {
  const AffineNormalizer input_normalizer = AffineNormalizer::fit(data.inputs);
  const AffineNormalizer target_normalizer = AffineNormalizer::fit(data.targets);
  const Network net =
      init_network(hidden_layers, hidden_widths, data.inputs.front().size(),
                   data.targets.front().size(), config.seed, input_normalizer,
                   target_normalizer);
  TrainingOutcome outcome = train(net, data, config);
  if (outcome.stop_reason == StopReason::Diverged) {
    throw std::runtime_error("training diverged: " + outcome.diagnostic);
  }
  return outcome;
}

}  // namespace

Point LocalizationModel::locate(const Fingerprint& rss) const {
  return training.network.forward(rss);
}

Fingerprint RadioMapModel::predict(const Point& position) const {
  return training.network.forward(position);
}

LocalizationModel train_la(const RadioMap& trm, std::size_t hidden_layers,
                           const std::vector<std::size_t>& hidden_widths,
                           const TrainingConfig& config) {
  return LocalizationModel{
      train_regressor(la_dataset(trm), hidden_layers, hidden_widths, config)};
}

RadioMapModel train_rm(const RadioMap& trm, std::size_t hidden_layers,
                       const std::vector<std::size_t>& hidden_widths,
                       const TrainingConfig& config) {
  return RadioMapModel{
      train_regressor(rm_dataset(trm), hidden_layers, hidden_widths, config)};
}

RadioMap reconstruct(const RadioMapModel& model, const BoundingBox& extent,
                     double grid_size_m2) {
  const std::vector<Point> points = make_grid(extent, grid_size_m2);
  std::vector<Fingerprint> fingerprints;
  fingerprints.reserve(points.size());
  for (const Point& p : points) {
    fingerprints.push_back(model.predict(p));
  }
  return RadioMap(points, std::move(fingerprints), grid_size_m2, MapKind::Rrm);
}

ReplicateStats replicate_experiment(const LocatorBuilder& builder,
                                    const EvalSet& eval_set,
                                    std::size_t replicates,
                                    std::uint64_t base_seed) {
  if (replicates < 2) {
    throw std::invalid_argument("replicate_experiment: needs n >= 2");
  }

  struct Slot {
    bool ok = false;
    double mean = 0.0;
    double std = 0.0;
    std::string error;
  };
  std::vector<Slot> slots(replicates);

  const std::size_t workers =
      std::min<std::size_t>(replicates,
                            std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    while (true) {
      const std::size_t r = cursor.fetch_add(1);
      if (r >= replicates) return;
      try {
        const Locator locate = builder(base_seed + r);
        const EvalReport report = evaluate(locate, eval_set);
        slots[r] = {true, report.mean_m, report.std_m, {}};
      } catch (const std::exception& e) {
        slots[r] = {false, 0.0, 0.0, e.what()};
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  ReplicateStats stats;
  for (std::size_t r = 0; r < replicates; ++r) {
    if (slots[r].ok) {
      stats.means.push_back(slots[r].mean);
      stats.stds.push_back(slots[r].std);
    } else {
      ++stats.failed;
      stats.failures.push_back("replicate " + std::to_string(r) + ": " +
                               slots[r].error);
      std::cerr << "warning: excluded " << stats.failures.back() << "\n";
    }
  }
  if (stats.means.size() < 2) {
    throw std::runtime_error(
        "replicate_experiment: fewer than 2 replicates survived");
  }
  stats.sigma_mean = sample_std_of(stats.means);
  stats.sigma_std = sample_std_of(stats.stds);
  return stats;
}

}  // namespace fwips
