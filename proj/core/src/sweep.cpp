#include "fwips/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <thread>

#include "fwips/fla.hpp"
#include "fwips/pipelines.hpp"
#include "text_io.hpp"

namespace fwips {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct CellConfig {
  double g_s = 0.0;
  double g_r = kNan;
  std::string fla;
  int lambda = -1;
  std::vector<std::size_t> gamma;
};

std::vector<std::vector<std::size_t>> width_combinations(
    const std::vector<std::size_t>& widths, std::size_t lambda) {
  std::vector<std::vector<std::size_t>> combos{{}};
  for (std::size_t level = 0; level < lambda; ++level) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& prefix : combos) {
      for (std::size_t w : widths) {
        auto extended = prefix;
        extended.push_back(w);
        next.push_back(std::move(extended));
      }
    }
    combos = std::move(next);
  }
  return combos;
}

std::vector<CellConfig> enumerate_configs(const ExperimentSpec& spec) {
  std::vector<CellConfig> configs;
  for (double gs : spec.gs_list) {
    for (const std::string& fla : spec.flas) {
      if (fla == "bpnn-la") {
        for (std::size_t lambda : spec.lambdas) {
          for (auto& gamma : width_combinations(spec.widths, lambda)) {
            configs.push_back({gs, kNan, fla, static_cast<int>(lambda), gamma});
          }
        }
        continue;
      }
      // Map-based algorithm: the plain training map first, then every
      // reconstructed map (the architecture columns describe the
      // reconstruction network).
      configs.push_back({gs, kNan, fla, -1, {}});
      for (double gr : spec.gr_list) {
        for (std::size_t lambda : spec.lambdas) {
          for (auto& gamma : width_combinations(spec.widths, lambda)) {
            configs.push_back({gs, gr, fla, static_cast<int>(lambda), gamma});
          }
        }
      }
    }
  }
  return configs;
}

std::size_t resolve_k(const KPolicy& policy, std::size_t rp_count) {
  const std::size_t bound = k_upper_bound(rp_count);
  if (policy.use_upper_bound) {
    return policy.k == 0 ? bound : std::min(policy.k, bound);
  }
  return policy.k == 0 ? bound : policy.k;
}

std::string sanitize_note(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n') c = ';';
  }
  return text;
}

std::string format_gamma(const std::vector<std::size_t>& gamma) {
  if (gamma.empty()) return "na";
  std::string out;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(gamma[i]);
  }
  return out;
}

std::string format_or_na(double v) {
  return std::isnan(v) ? "na" : detail::format_double(v);
}

struct ReplicateData {
  std::optional<RadioMap> orm;
  std::optional<EvalSet> vds;
  std::map<double, RadioMap> trms;
  std::map<double, std::string> trm_errors;
  std::string error;
};

}  // namespace

void ExperimentSpec::validate() const {
  if (gs_list.empty()) {
    throw std::invalid_argument("experiment: gs_list must not be empty");
  }
  if (flas.empty()) {
    throw std::invalid_argument("experiment: flas must not be empty");
  }
  bool needs_network = !gr_list.empty();
  for (const std::string& fla : flas) {
    if (fla != "knn" && fla != "wknn" && fla != "bpnn-la") {
      throw std::invalid_argument("experiment: unknown fla '" + fla + "'");
    }
    if (fla == "bpnn-la") needs_network = true;
  }
  if (needs_network && (lambdas.empty() || widths.empty())) {
    throw std::invalid_argument(
        "experiment: lambdas/widths required for bpnn-la or reconstruction");
  }
  if (replicates < 1) {
    throw std::invalid_argument("experiment: replicates must be >= 1");
  }
  if (out_dir.empty()) {
    throw std::invalid_argument("experiment: out directory missing");
  }
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open experiment spec '" + path + "'");
  const std::string context = "'" + path + "'";

  ExperimentSpec spec;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = detail::strip(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(context + " line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key = detail::strip(stripped.substr(0, eq));
    const std::string value = detail::strip(stripped.substr(eq + 1));
    const std::string where = context + " key '" + key + "'";

    auto doubles = [&] {
      std::vector<double> out;
      for (const std::string& cell : detail::split(value, ',')) {
        out.push_back(detail::parse_double(cell, where));
      }
      return out;
    };
    auto sizes = [&] {
      std::vector<std::size_t> out;
      for (const std::string& cell : detail::split(value, ',')) {
        out.push_back(static_cast<std::size_t>(detail::parse_int(cell, where)));
      }
      return out;
    };

    if (key == "scene") {
      spec.scene_path = value;
    } else if (key == "gs_list") {
      spec.gs_list = doubles();
    } else if (key == "gr_list") {
      spec.gr_list = doubles();
    } else if (key == "lambdas") {
      spec.lambdas = sizes();
    } else if (key == "widths") {
      spec.widths = sizes();
    } else if (key == "replicates") {
      spec.replicates = static_cast<std::size_t>(detail::parse_int(value, where));
    } else if (key == "flas") {
      spec.flas.clear();
      for (const std::string& cell : detail::split(value, ',')) {
        spec.flas.push_back(detail::strip(cell));
      }
    } else if (key == "k") {
      spec.k_policy.k = static_cast<std::size_t>(detail::parse_int(value, where));
    } else if (key == "k_policy") {
      if (value == "upper-bound") {
        spec.k_policy.use_upper_bound = true;
      } else if (value == "explicit") {
        spec.k_policy.use_upper_bound = false;
      } else {
        throw std::invalid_argument(where + ": expected upper-bound or explicit");
      }
    } else if (key == "out") {
      spec.out_dir = value;
    } else if (key == "seed") {
      spec.base_seed = static_cast<std::uint64_t>(detail::parse_int(value, where));
    } else if (key == "lr") {
      spec.learning_rate = detail::parse_double(value, where);
    } else if (key == "max_epochs") {
      spec.max_epochs = static_cast<std::size_t>(detail::parse_int(value, where));
    } else {
      throw std::invalid_argument(where + ": unknown key");
    }
  }
  spec.validate();
  return spec;
}

SweepResult run_sweep(const ExperimentSpec& spec, std::size_t workers) {
  spec.validate();
  const SynthScene scene =
      spec.scene_path.empty() ? default_scene() : load_scene(spec.scene_path);

  // Per-replicate artifacts: one noisy survey and one validation set per
  // replicate seed, shared read-only by every configuration.
  std::vector<ReplicateData> replicate_data(spec.replicates);
  for (std::size_t r = 0; r < spec.replicates; ++r) {
    ReplicateData& data = replicate_data[r];
    try {
      SynthScene replicate_scene = scene;
      replicate_scene.seed = scene.seed + spec.base_seed + r;
      data.orm = generate_orm(replicate_scene, scene.extent,
                              scene.orm_grid_size_m2, scene.orm_samples_per_rp);
      data.vds = generate_vds(replicate_scene, scene.extent, scene.vds_count,
                              replicate_scene.seed);
      for (double gs : spec.gs_list) {
        try {
          data.trms.emplace(gs, downsample(*data.orm, gs));
        } catch (const std::exception& e) {
          data.trm_errors.emplace(gs, e.what());
        }
      }
    } catch (const std::exception& e) {
      data.error = e.what();
    }
  }

  const std::vector<CellConfig> configs = enumerate_configs(spec);
  const std::size_t cells = configs.size() * spec.replicates;
  std::vector<SweepRow> replicate_rows(cells);

  if (workers == 0) {
    workers = std::max(1u, std::thread::hardware_concurrency());
  }
  workers = std::min(workers, std::max<std::size_t>(cells, 1));

  std::atomic<std::size_t> cursor{0};
  auto run_cell = [&](std::size_t cell) {
    const std::size_t config_index = cell / spec.replicates;
    const std::size_t r = cell % spec.replicates;
    const CellConfig& config = configs[config_index];
    const ReplicateData& data = replicate_data[r];

    SweepRow row;
    row.g_s = config.g_s;
    row.g_r = config.g_r;
    row.fla = config.fla;
    row.lambda = config.lambda;
    row.gamma = config.gamma;
    row.seed = spec.base_seed + r;
    row.replicate = r;
    row.mean_m = kNan;
    row.std_m = kNan;
    row.sigma_mean = kNan;
    row.sigma_std = kNan;
    row.test_mse = kNan;

    try {
      if (!data.error.empty()) throw std::runtime_error(data.error);
      if (auto it = data.trm_errors.find(config.g_s); it != data.trm_errors.end()) {
        throw std::runtime_error(it->second);
      }
      const RadioMap& trm = data.trms.at(config.g_s);

      Locator locate;
      if (config.fla == "bpnn-la") {
        TrainingConfig training = TrainingConfig::localization();
        training.seed = row.seed;
        training.learning_rate = spec.learning_rate;
        training.max_epochs = spec.max_epochs;
        auto model = std::make_shared<LocalizationModel>(train_la(
            trm, static_cast<std::size_t>(config.lambda), config.gamma, training));
        row.stop_reason = to_string(model->training.stop_reason);
        row.epochs = model->training.epochs_run;
        row.test_mse = model->training.test_mse;
        locate = [model](const Fingerprint& rss) { return model->locate(rss); };
      } else {
        std::shared_ptr<const RadioMap> map;
        if (std::isnan(config.g_r)) {
          map = std::shared_ptr<const RadioMap>(&trm, [](const RadioMap*) {});
        } else {
          TrainingConfig training = TrainingConfig::radio_map();
          training.seed = row.seed;
          training.learning_rate = spec.learning_rate;
          training.max_epochs = spec.max_epochs;
          const RadioMapModel model = train_rm(
              trm, static_cast<std::size_t>(config.lambda), config.gamma, training);
          row.stop_reason = to_string(model.training.stop_reason);
          row.epochs = model.training.epochs_run;
          row.test_mse = model.training.test_mse;
          map = std::make_shared<RadioMap>(
              reconstruct(model, trm.extent(), config.g_r));
        }
        const std::size_t k = resolve_k(spec.k_policy, map->rp_count());
        const bool weighted = config.fla == "wknn";
        locate = [map, k, weighted](const Fingerprint& rss) {
          return weighted ? wknn_locate(*map, rss, k) : knn_locate(*map, rss, k);
        };
      }

      const EvalReport report = evaluate(locate, *data.vds);
      row.mean_m = report.mean_m;
      row.std_m = report.std_m;
    } catch (const std::exception& e) {
      row.note = sanitize_note(e.what());
    }
    replicate_rows[cell] = std::move(row);
  };

  auto worker = [&] {
    while (true) {
      const std::size_t cell = cursor.fetch_add(1);
      if (cell >= cells) return;
      run_cell(cell);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  // Merge: replicate rows in configuration-major order, each configuration
  // followed by its aggregate row.
  std::vector<SweepRow> rows;
  rows.reserve(cells + configs.size());
  std::vector<std::size_t> aggregate_indices;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    std::vector<double> means;
    std::vector<double> stds;
    for (std::size_t r = 0; r < spec.replicates; ++r) {
      const SweepRow& row = replicate_rows[c * spec.replicates + r];
      if (row.note.empty()) {
        means.push_back(row.mean_m);
        stds.push_back(row.std_m);
      }
      rows.push_back(row);
    }

    SweepRow aggregate;
    aggregate.aggregate = true;
    aggregate.g_s = configs[c].g_s;
    aggregate.g_r = configs[c].g_r;
    aggregate.fla = configs[c].fla;
    aggregate.lambda = configs[c].lambda;
    aggregate.gamma = configs[c].gamma;
    aggregate.mean_m = kNan;
    aggregate.std_m = kNan;
    aggregate.sigma_mean = kNan;
    aggregate.sigma_std = kNan;
    aggregate.test_mse = kNan;
    if (means.empty()) {
      aggregate.note = "all replicates failed";
    } else {
      aggregate.mean_m = mean_of(means);
      aggregate.std_m = mean_of(stds);
      if (means.size() >= 2) {
        aggregate.sigma_mean = sample_std_of(means);
        aggregate.sigma_std = sample_std_of(stds);
      }
      if (means.size() < spec.replicates) {
        aggregate.note = std::to_string(spec.replicates - means.size()) +
                         " replicate(s) failed";
      }
    }
    aggregate_indices.push_back(rows.size());
    rows.push_back(std::move(aggregate));
  }

  // Locally optimal flag: minimum mean error among the aggregates of each
  // (g_s, g_r, fla, lambda) group.
  std::map<std::tuple<double, double, std::string, int>, std::size_t> best;
  for (std::size_t idx : aggregate_indices) {
    const SweepRow& row = rows[idx];
    if (std::isnan(row.mean_m)) continue;
    const auto key = std::make_tuple(
        row.g_s, std::isnan(row.g_r) ? -1.0 : row.g_r, row.fla, row.lambda);
    const auto it = best.find(key);
    if (it == best.end() || row.mean_m < rows[it->second].mean_m) {
      best[key] = idx;
    }
  }
  for (const auto& [key, idx] : best) rows[idx].locally_optimal = true;

  SweepResult result;
  result.rows = std::move(rows);
  std::filesystem::create_directories(spec.out_dir);
  result.csv_path =
      (std::filesystem::path(spec.out_dir) / "results.csv").string();
  save_sweep_csv(result.rows, result.csv_path);
  return result;
}

void save_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "row,g_s,g_r,fla,lambda,gamma,seed,replicate,mean_m,std_m,"
         "sigma_mean,sigma_std,stop_reason,epochs,test_mse,locally_optimal,note\n";
  for (const SweepRow& row : rows) {
    out << (row.aggregate ? "aggregate" : "replicate") << ","
        << detail::format_double(row.g_s) << "," << format_or_na(row.g_r) << ","
        << row.fla << ","
        << (row.lambda < 0 ? std::string("na") : std::to_string(row.lambda))
        << "," << format_gamma(row.gamma) << ",";
    if (row.aggregate) {
      out << "na,na,";
    } else {
      out << row.seed << "," << row.replicate << ",";
    }
    out << format_or_na(row.mean_m) << "," << format_or_na(row.std_m) << ","
        << format_or_na(row.sigma_mean) << "," << format_or_na(row.sigma_std)
        << "," << (row.stop_reason.empty() ? "na" : row.stop_reason) << ",";
    if (row.stop_reason.empty()) {
      out << "na,";
    } else {
      out << row.epochs << ",";
    }
    out << format_or_na(row.test_mse) << "," << (row.locally_optimal ? 1 : 0)
        << "," << row.note << "\n";
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace fwips
