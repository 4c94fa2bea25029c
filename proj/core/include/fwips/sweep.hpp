#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fwips/synth.hpp"
#include "fwips/training.hpp"

namespace fwips {

struct KPolicy {
  bool use_upper_bound = true;  // clamp k to floor(sqrt(M))
  std::size_t k = 0;            // 0 -> the upper bound itself
};

// Declarative description of a parameter study: grid sizes, architectures,
// localization algorithms and replicate count. Parsed from a key = value
// file; list values are comma separated.
struct ExperimentSpec {
  std::string scene_path;              // empty -> default_scene()
  std::vector<double> gs_list;         // training-map grid sizes (m^2)
  std::vector<double> gr_list;         // reconstruction grid sizes; empty -> none
  std::vector<std::size_t> lambdas;    // hidden-layer counts
  std::vector<std::size_t> widths;     // per-layer width candidates
  std::size_t replicates = 10;
  std::vector<std::string> flas;       // knn, wknn, bpnn-la
  KPolicy k_policy;
  std::string out_dir;
  std::uint64_t base_seed = 0;
  double learning_rate = 0.05;
  std::size_t max_epochs = 1000;

  void validate() const;
};

ExperimentSpec load_experiment_spec(const std::string& path);

// One line of the results table. Replicate rows carry per-run statistics;
// aggregate rows summarize all successful replicates of one configuration
// and carry the replicate-spread columns.
struct SweepRow {
  bool aggregate = false;
  double g_s = 0.0;
  double g_r = 0.0;                 // NaN when no reconstruction is involved
  std::string fla;
  int lambda = -1;                  // -1 -> not applicable
  std::vector<std::size_t> gamma;
  std::uint64_t seed = 0;
  std::size_t replicate = 0;
  double mean_m = 0.0;
  double std_m = 0.0;
  double sigma_mean = 0.0;          // aggregate only; NaN when < 2 replicates
  double sigma_std = 0.0;
  std::string stop_reason;          // empty for map-based algorithms
  std::size_t epochs = 0;
  double test_mse = 0.0;
  bool locally_optimal = false;
  std::string note;                 // error text for failed cells
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::string csv_path;
};

// Runs every configuration x replicate cell (worker pool, deterministic row
// order), writes <out_dir>/results.csv and returns the rows. Cell failures
// are recorded in the row and never abort the sweep. The aggregate row with
// the smallest mean error within each (g_s, g_r, fla, lambda) group is
// flagged locally optimal.
SweepResult run_sweep(const ExperimentSpec& spec, std::size_t workers = 0);

void save_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

}  // namespace fwips
