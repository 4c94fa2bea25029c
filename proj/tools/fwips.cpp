// Command-line front end: scene synthesis, lattice down-sampling, network
// training, radio-map reconstruction, evaluation and parameter sweeps.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fwips/fla.hpp"
#include "fwips/model_io.hpp"
#include "fwips/pipelines.hpp"
#include "fwips/radiomap.hpp"
#include "fwips/sweep.hpp"
#include "fwips/synth.hpp"

namespace {

namespace fs = std::filesystem;

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::size_t> parse_width_list(const std::string& text) {
  std::vector<std::size_t> widths;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(',', start);
    const std::string cell =
        text.substr(start, pos == std::string::npos ? pos : pos - start);
    widths.push_back(static_cast<std::size_t>(std::stoul(cell)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return widths;
}

fwips::BoundingBox parse_extent(const std::string& text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(',', start);
    values.push_back(std::stod(
        text.substr(start, pos == std::string::npos ? pos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (values.size() % 2 != 0 || values.empty()) {
    throw std::invalid_argument("--extent needs an even number of values");
  }
  const std::size_t dims = values.size() / 2;
  fwips::BoundingBox box;
  box.min.assign(values.begin(), values.begin() + dims);
  box.max.assign(values.begin() + dims, values.end());
  fwips::validate_box(box);
  return box;
}

bool file_is_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  return line.rfind(fwips::kModelMagic, 0) == 0;
}

void write_training_log(const fwips::TrainingOutcome& outcome,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "epoch,train_mse,valid_mse\n";
  for (std::size_t e = 0; e < outcome.mse_history.size(); ++e) {
    out << (e + 1) << "," << format_full(outcome.mse_history[e].train) << ","
        << format_full(outcome.mse_history[e].validation) << "\n";
  }
  out << "epochs_run=" << outcome.epochs_run << "\n";
  out << "selected_epoch=" << (outcome.selected_epoch + 1) << "\n";
  out << "test_mse=" << format_full(outcome.test_mse) << "\n";
  out << "consistent=" << (outcome.consistent ? "true" : "false") << "\n";
  out << "partitions_tried=" << outcome.partitions_tried << "\n";
  if (!outcome.diagnostic.empty()) {
    out << "diagnostic=" << outcome.diagnostic << "\n";
  }
  out << "stop_reason=" << to_string(outcome.stop_reason) << "\n";
}

struct TrainingFlags {
  double learning_rate = 0.05;
  std::size_t max_epochs = 1000;
  double max_error = -1.0;  // < 0 -> keep the per-pipeline default
  std::size_t max_failed_validations = 6;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--lr", learning_rate, "learning rate");
    cmd->add_option("--max-epochs", max_epochs, "epoch budget");
    cmd->add_option("--max-error", max_error,
                    "validation MSE stopping threshold (squared units)");
    cmd->add_option("--max-failed-validations", max_failed_validations,
                    "consecutive validation increases before rollback");
    cmd->add_option("--batch-size", batch_size, "mini-batch size");
    cmd->add_option("--seed", seed, "initialization/partition seed");
  }

  fwips::TrainingConfig resolve(fwips::TrainingConfig base) const {
    base.learning_rate = learning_rate;
    base.max_epochs = max_epochs;
    if (max_error >= 0.0) base.max_error = max_error;
    base.max_failed_validations = max_failed_validations;
    base.batch_size = batch_size;
    base.seed = seed;
    return base;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Fingerprinting WiFi indoor positioning toolkit"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand(
      "synth", "generate a synthetic survey (ORM) and validation set (VDS)");
  std::string synth_scene;
  std::string synth_out;
  std::uint64_t synth_seed = 0;
  double synth_grid = 0.0;
  synth->add_option("scene", synth_scene, "scene config file (default scene if omitted)");
  synth->add_option("--out", synth_out, "output directory")->required();
  auto* synth_seed_opt = synth->add_option("--seed", synth_seed, "scene seed override");
  synth->add_option("--grid-size", synth_grid, "ORM grid size override (m^2)");
  synth->callback([&] {
    fwips::SynthScene scene = synth_scene.empty() ? fwips::default_scene()
                                                  : fwips::load_scene(synth_scene);
    if (synth_seed_opt->count() > 0) scene.seed = synth_seed;
    if (synth_grid > 0.0) scene.orm_grid_size_m2 = synth_grid;
    fs::create_directories(synth_out);
    const fwips::RadioMap orm =
        generate_orm(scene, scene.extent, scene.orm_grid_size_m2,
                     scene.orm_samples_per_rp);
    const fwips::EvalSet vds =
        generate_vds(scene, scene.extent, scene.vds_count, scene.seed);
    const std::string orm_path = (fs::path(synth_out) / "orm.csv").string();
    const std::string vds_path = (fs::path(synth_out) / "vds.csv").string();
    save_radiomap(orm, orm_path);
    save_evalset(vds, vds_path);
    std::cout << "orm=" << orm_path << " rps=" << orm.rp_count() << "\n"
              << "vds=" << vds_path << " queries=" << vds.size() << "\n";
  });

  // downsample
  auto* down = app.add_subcommand("downsample", "extract a coarser TRM from an ORM");
  std::string down_map;
  std::string down_out;
  double down_grid = 0.0;
  down->add_option("orm", down_map, "source radio-map CSV")->required();
  down->add_option("--grid-size", down_grid, "target grid size (m^2)")->required();
  down->add_option("--out", down_out, "output TRM CSV")->required();
  down->callback([&] {
    const fwips::RadioMap orm = fwips::load_radiomap(down_map);
    const fwips::RadioMap trm = fwips::downsample(orm, down_grid);
    save_radiomap(trm, down_out);
    std::cout << "trm=" << down_out << " rps=" << trm.rp_count() << "\n";
  });

  // train-la / train-rm
  struct TrainCmd {
    CLI::App* cmd = nullptr;
    std::string map_path;
    std::string out;
    std::size_t layers = 1;
    std::string widths = "9";
    TrainingFlags flags;
  };
  TrainCmd la, rm;
  la.cmd = app.add_subcommand("train-la", "train a fingerprint -> position network");
  rm.cmd = app.add_subcommand("train-rm", "train a position -> fingerprint network");
  for (TrainCmd* t : {&la, &rm}) {
    t->cmd->add_option("trm", t->map_path, "training radio-map CSV")->required();
    t->cmd->add_option("--layers", t->layers, "number of hidden layers");
    t->cmd->add_option("--widths", t->widths, "comma-separated hidden widths");
    t->cmd->add_option("--out", t->out, "output model file")->required();
    t->flags.add_to(t->cmd);
  }
  la.cmd->callback([&] {
    const fwips::RadioMap trm = fwips::load_radiomap(la.map_path);
    const fwips::LocalizationModel model =
        train_la(trm, la.layers, parse_width_list(la.widths),
                 la.flags.resolve(fwips::TrainingConfig::localization()));
    save_network(model.network(), la.out);
    write_training_log(model.training, la.out + ".log");
    std::cout << "model=" << la.out
              << " stop_reason=" << to_string(model.training.stop_reason)
              << " epochs=" << model.training.epochs_run << "\n";
  });
  rm.cmd->callback([&] {
    const fwips::RadioMap trm = fwips::load_radiomap(rm.map_path);
    const fwips::RadioMapModel model =
        train_rm(trm, rm.layers, parse_width_list(rm.widths),
                 rm.flags.resolve(fwips::TrainingConfig::radio_map()));
    save_network(model.network(), rm.out);
    write_training_log(model.training, rm.out + ".log");
    std::cout << "model=" << rm.out
              << " stop_reason=" << to_string(model.training.stop_reason)
              << " epochs=" << model.training.epochs_run << "\n";
  });

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct",
                                 "evaluate a radio-map network over a lattice");
  std::string rec_model;
  std::string rec_out;
  std::string rec_extent;
  std::string rec_like;
  double rec_grid = 0.0;
  rec->add_option("model", rec_model, "radio-map model file")->required();
  rec->add_option("--grid-size", rec_grid, "RRM grid size (m^2)")->required();
  rec->add_option("--extent", rec_extent, "min..,max.. corner list");
  rec->add_option("--like", rec_like, "radio-map CSV whose extent to reuse");
  rec->add_option("--out", rec_out, "output RRM CSV")->required();
  rec->callback([&] {
    if (rec_extent.empty() == rec_like.empty()) {
      throw std::invalid_argument("reconstruct needs exactly one of --extent/--like");
    }
    const fwips::BoundingBox extent =
        rec_extent.empty() ? fwips::load_radiomap(rec_like).extent()
                           : parse_extent(rec_extent);
    fwips::RadioMapModel model;
    model.training.network = fwips::load_network(rec_model);
    const fwips::RadioMap rrm = reconstruct(model, extent, rec_grid);
    save_radiomap(rrm, rec_out);
    std::cout << "rrm=" << rec_out << " rps=" << rrm.rp_count() << "\n";
  });

  // evaluate
  auto* eval = app.add_subcommand("evaluate",
                                  "run a locator over a validation set");
  std::string eval_target;
  std::string eval_vds;
  std::string eval_out;
  std::string eval_fla;
  std::string eval_policy = "upper-bound";
  std::size_t eval_k = 0;
  eval->add_option("target", eval_target, "radio-map CSV or model file")->required();
  eval->add_option("vds", eval_vds, "validation-set CSV")->required();
  eval->add_option("--fla", eval_fla, "knn | wknn | bpnn-la (default by target)");
  eval->add_option("--k", eval_k, "neighbor count (0 -> upper bound)");
  eval->add_option("--k-policy", eval_policy, "upper-bound | explicit");
  eval->add_option("--out", eval_out, "output directory")->required();
  eval->callback([&] {
    const fwips::EvalSet vds = fwips::load_evalset(eval_vds);
    fwips::Locator locate;
    if (file_is_model(eval_target)) {
      if (!eval_fla.empty() && eval_fla != "bpnn-la") {
        throw std::invalid_argument("'" + eval_fla + "' needs a radio-map target");
      }
      auto net = std::make_shared<fwips::Network>(fwips::load_network(eval_target));
      locate = [net](const fwips::Fingerprint& rss) { return net->forward(rss); };
    } else {
      if (eval_fla == "bpnn-la") {
        throw std::invalid_argument("bpnn-la needs a model target");
      }
      auto map = std::make_shared<fwips::RadioMap>(fwips::load_radiomap(eval_target));
      std::size_t k = eval_k;
      if (eval_policy == "upper-bound") {
        const std::size_t bound = fwips::k_upper_bound(map->rp_count());
        if (k == 0) {
          k = bound;
        } else if (k > bound) {
          std::cerr << "warning: k=" << k << " exceeds floor(sqrt(M))=" << bound
                    << ", clamped\n";
          k = bound;
        }
      } else if (eval_policy == "explicit") {
        if (k == 0) k = fwips::k_upper_bound(map->rp_count());
      } else {
        throw std::invalid_argument("unknown k policy '" + eval_policy + "'");
      }
      const bool weighted = eval_fla == "wknn";
      locate = [map, k, weighted](const fwips::Fingerprint& rss) {
        return weighted ? wknn_locate(*map, rss, k) : knn_locate(*map, rss, k);
      };
    }
    const fwips::EvalReport report = evaluate(locate, vds);
    fs::create_directories(eval_out);
    save_report_csv(report, (fs::path(eval_out) / "report.csv").string());
    save_cdf_csv(cdf(report), (fs::path(eval_out) / "cdf.csv").string());
    std::cout << "queries=" << vds.size() << "\n"
              << "mean_m=" << format_full(report.mean_m) << "\n"
              << "std_m=" << format_full(report.std_m) << "\n";
  });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a parameter study");
  std::string sweep_spec;
  std::string sweep_out;
  std::uint64_t sweep_seed = 0;
  std::size_t sweep_replicates = 0;
  sweep->add_option("spec", sweep_spec, "experiment spec file")->required();
  sweep->add_option("--out", sweep_out, "output directory override");
  auto* sweep_seed_opt = sweep->add_option("--seed", sweep_seed, "base seed override");
  sweep->add_option("--replicates", sweep_replicates, "replicate count override");
  sweep->callback([&] {
    fwips::ExperimentSpec spec = fwips::load_experiment_spec(sweep_spec);
    if (!sweep_out.empty()) spec.out_dir = sweep_out;
    if (sweep_seed_opt->count() > 0) spec.base_seed = sweep_seed;
    if (sweep_replicates > 0) spec.replicates = sweep_replicates;
    const fwips::SweepResult result = run_sweep(spec);
    std::cout << "results=" << result.csv_path << " rows=" << result.rows.size()
              << "\n";
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
