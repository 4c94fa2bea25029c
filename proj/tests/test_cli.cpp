// End-to-end coverage of the command-line front end via subprocesses.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "fwips/radiomap.hpp"
#include "fwips/synth.hpp"
#include "support/temp_dir.hpp"

namespace fwips {
namespace {

namespace fs = std::filesystem;
using test::TempDir;

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

CommandResult run_cli(const TempDir& dir, const std::string& args,
                      const std::string& workdir = {}) {
  const std::string out_path = dir.file("cmd_stdout.txt");
  const std::string err_path = dir.file("cmd_stderr.txt");
  std::string command;
  if (!workdir.empty()) command += "cd " + workdir + " && ";
  command += std::string(FWIPS_CLI_PATH) + " " + args + " >" + out_path +
             " 2>" + err_path;
  const int status = std::system(command.c_str());
  CommandResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

std::string first_line(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

std::string last_line(const std::string& path) {
  std::ifstream in(path);
  std::string line, last;
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  return last;
}

// TRM whose fingerprints are affine in position; cheap for the network to fit.
std::string write_affine_trm(const TempDir& dir, const std::string& name) {
  const auto points = make_grid(BoundingBox{{0, 0}, {8, 6}}, 1.0);
  std::vector<Fingerprint> fps;
  for (const Point& p : points) {
    fps.push_back({-30.0 - 2.0 * p[0] - 1.0 * p[1],
                   -35.0 - 0.5 * p[0] - 2.0 * p[1],
                   -40.0 + 1.5 * p[0] - 0.5 * p[1]});
  }
  const RadioMap trm(points, fps, 1.0, MapKind::Trm);
  const std::string path = dir.file(name);
  save_radiomap(trm, path);
  return path;
}

std::string write_self_vds(const TempDir& dir, const std::string& map_path,
                           const std::string& name) {
  const RadioMap map = load_radiomap(map_path);
  const EvalSet vds(map.points(), map.fingerprints());
  const std::string path = dir.file(name);
  save_evalset(vds, path);
  return path;
}

TEST(CliSynth, WritesOrmAndVdsWithDefaultScene) {
  TempDir dir;
  const auto result = run_cli(dir, "synth --grid-size 4 --out " + dir.file("data"));
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_EQ(first_line(dir.file("data/orm.csv")).substr(0, 4), "D=2,");
  EXPECT_NE(first_line(dir.file("data/orm.csv")).find("KIND=ORM"),
            std::string::npos);
  EXPECT_NE(first_line(dir.file("data/vds.csv")).find("KIND=VDS"),
            std::string::npos);
}

TEST(CliSynth, MissingSceneFileFailsWithDiagnostic) {
  TempDir dir;
  const auto result =
      run_cli(dir, "synth " + dir.file("absent.cfg") + " --out " + dir.file("o"));
  EXPECT_NE(result.exit_code, 0);
  EXPECT_NE(result.err.find("error"), std::string::npos);
}

TEST(CliSynth, SeedRepetitionIsByteIdentical) {
  TempDir dir;
  ASSERT_EQ(run_cli(dir, "synth --seed 5 --grid-size 4 --out " + dir.file("a")).exit_code, 0);
  ASSERT_EQ(run_cli(dir, "synth --seed 5 --grid-size 4 --out " + dir.file("b")).exit_code, 0);
  ASSERT_EQ(run_cli(dir, "synth --seed 6 --grid-size 4 --out " + dir.file("c")).exit_code, 0);
  EXPECT_EQ(slurp(dir.file("a/orm.csv")), slurp(dir.file("b/orm.csv")));
  EXPECT_EQ(slurp(dir.file("a/vds.csv")), slurp(dir.file("b/vds.csv")));
  EXPECT_NE(slurp(dir.file("a/orm.csv")), slurp(dir.file("c/orm.csv")));
}

TEST(CliDownsample, ProducesCoarserTrm) {
  TempDir dir;
  ASSERT_EQ(run_cli(dir, "synth --seed 1 --grid-size 1 --out " + dir.file("d")).exit_code, 0);
  const auto result =
      run_cli(dir, "downsample " + dir.file("d/orm.csv") + " --grid-size 4 --out " +
                       dir.file("trm.csv"));
  EXPECT_EQ(result.exit_code, 0);
  const RadioMap trm = load_radiomap(dir.file("trm.csv"));
  EXPECT_EQ(trm.kind(), MapKind::Trm);
  EXPECT_EQ(trm.grid_size_m2(), 4.0);

  const auto bad = run_cli(dir, "downsample " + dir.file("d/orm.csv") +
                                    " --grid-size 2 --out " + dir.file("x.csv"));
  EXPECT_NE(bad.exit_code, 0);
  EXPECT_NE(bad.err.find("integer multiple"), std::string::npos);
}

TEST(CliTrainLa, AffineTrmTrainsToMaxErrorAndLogsIt) {
  TempDir dir;
  const std::string trm = write_affine_trm(dir, "trm.csv");
  const auto result = run_cli(
      dir, "train-la " + trm + " --layers 1 --widths 10 --lr 0.4 --seed 1 --out " +
               dir.file("model.txt"));
  ASSERT_EQ(result.exit_code, 0) << result.err;
  EXPECT_EQ(last_line(dir.file("model.txt.log")), "stop_reason=MaxErrorReached");
  EXPECT_EQ(first_line(dir.file("model.txt")), "fwips-model v1");
}

TEST(CliTrainLa, EpochBudgetFlagIsHonored) {
  TempDir dir;
  const std::string trm = write_affine_trm(dir, "trm.csv");
  const auto result = run_cli(
      dir, "train-la " + trm + " --layers 1 --widths 4 --max-epochs 5 --out " +
               dir.file("m.txt"));
  ASSERT_EQ(result.exit_code, 0) << result.err;
  const std::string log = slurp(dir.file("m.txt.log"));
  const auto pos = log.find("epochs_run=");
  ASSERT_NE(pos, std::string::npos);
  const int epochs = std::stoi(log.substr(pos + 11));
  EXPECT_LE(epochs, 5);
}

TEST(CliTrainLa, IdenticalInvocationsProduceIdenticalModels) {
  TempDir dir;
  const std::string trm = write_affine_trm(dir, "trm.csv");
  const std::string args = "train-la " + trm +
                           " --layers 1 --widths 6 --max-epochs 20 --seed 3 --out ";
  ASSERT_EQ(run_cli(dir, args + dir.file("m1.txt")).exit_code, 0);
  ASSERT_EQ(run_cli(dir, args + dir.file("m2.txt")).exit_code, 0);
  EXPECT_EQ(slurp(dir.file("m1.txt")), slurp(dir.file("m2.txt")));
  EXPECT_EQ(slurp(dir.file("m1.txt.log")), slurp(dir.file("m2.txt.log")));
}

TEST(CliReconstruct, RebuildsLatticeFromModel) {
  TempDir dir;
  const std::string trm = write_affine_trm(dir, "trm.csv");
  ASSERT_EQ(run_cli(dir, "train-rm " + trm +
                             " --layers 1 --widths 8 --lr 0.4 --max-epochs 200 "
                             "--seed 2 --out " +
                             dir.file("rm.txt"))
                .exit_code,
            0);
  const auto result = run_cli(
      dir, "reconstruct " + dir.file("rm.txt") + " --grid-size 2.25 --like " + trm +
               " --out " + dir.file("rrm.csv"));
  ASSERT_EQ(result.exit_code, 0) << result.err;
  const RadioMap rrm = load_radiomap(dir.file("rrm.csv"));
  EXPECT_EQ(rrm.kind(), MapKind::Rrm);
  EXPECT_EQ(rrm.rp_count(), 30u);  // 6 x 5 lattice of spacing 1.5 over 8 x 6

  const auto both = run_cli(dir, "reconstruct " + dir.file("rm.txt") +
                                     " --grid-size 1 --like " + trm +
                                     " --extent 0,0,8,6 --out " + dir.file("x.csv"));
  EXPECT_NE(both.exit_code, 0);
}

TEST(CliEvaluate, SelfQueriesLocalizeExactly) {
  TempDir dir;
  const std::string trm = write_affine_trm(dir, "trm.csv");
  const std::string vds = write_self_vds(dir, trm, "vds.csv");
  const auto result = run_cli(
      dir, "evaluate " + trm + " " + vds + " --fla knn --k 1 --k-policy explicit "
               "--out " + dir.file("eval"));
  ASSERT_EQ(result.exit_code, 0) << result.err;
  EXPECT_NE(result.out.find("mean_m=0\n"), std::string::npos);
  EXPECT_EQ(first_line(dir.file("eval/report.csv")), "error_m");
  const std::string final_cdf = last_line(dir.file("eval/cdf.csv"));
  EXPECT_EQ(final_cdf.substr(final_cdf.rfind(',') + 1), "1");
}

TEST(CliEvaluate, ClampsKUnderUpperBoundPolicy) {
  TempDir dir;
  const std::string trm = write_affine_trm(dir, "trm.csv");  // 63 RPs, bound 7
  const std::string vds = write_self_vds(dir, trm, "vds.csv");
  const auto result = run_cli(
      dir, "evaluate " + trm + " " + vds + " --k 50 --out " + dir.file("eval"));
  ASSERT_EQ(result.exit_code, 0);
  EXPECT_NE(result.err.find("clamped"), std::string::npos);
  EXPECT_NE(result.err.find("7"), std::string::npos);
}

TEST(CliEvaluate, RunsTrainedLocalizationModels) {
  TempDir dir;
  const std::string trm = write_affine_trm(dir, "trm.csv");
  const std::string vds = write_self_vds(dir, trm, "vds.csv");
  ASSERT_EQ(run_cli(dir, "train-la " + trm +
                             " --layers 1 --widths 10 --lr 0.4 --seed 1 --out " +
                             dir.file("model.txt"))
                .exit_code,
            0);
  const auto result = run_cli(dir, "evaluate " + dir.file("model.txt") + " " + vds +
                                       " --out " + dir.file("eval"));
  ASSERT_EQ(result.exit_code, 0) << result.err;
  EXPECT_NE(result.out.find("mean_m="), std::string::npos);

  const auto wrong = run_cli(dir, "evaluate " + dir.file("model.txt") + " " + vds +
                                      " --fla knn --out " + dir.file("e2"));
  EXPECT_NE(wrong.exit_code, 0);
}

TEST(CliSweep, RunsSpecAndIsIdempotent) {
  TempDir dir;
  SynthScene scene;
  scene.extent = BoundingBox{{0, 0}, {8, 6}};
  scene.ap_positions = {{0.0, 0.0}, {8.0, 0.0}, {0.0, 6.0}, {8.0, 6.0}};
  scene.noise_std_db = 1.0;
  scene.orm_grid_size_m2 = 1.0;
  scene.orm_samples_per_rp = 2;
  scene.vds_count = 20;
  save_scene(scene, dir.file("scene.cfg"));
  std::ofstream(dir.file("exp.cfg"))
      << "scene = " << dir.file("scene.cfg") << "\n"
      << "gs_list = 1.0,4.0\n"
      << "flas = knn,wknn\n"
      << "replicates = 2\n"
      << "out = " << dir.file("res_a") << "\n";

  const auto a = run_cli(dir, "sweep " + dir.file("exp.cfg"));
  ASSERT_EQ(a.exit_code, 0) << a.err;
  const auto b =
      run_cli(dir, "sweep " + dir.file("exp.cfg") + " --out " + dir.file("res_b"));
  ASSERT_EQ(b.exit_code, 0);
  EXPECT_EQ(slurp(dir.file("res_a/results.csv")), slurp(dir.file("res_b/results.csv")));
}

TEST(CliHygiene, CommandsOnlyWriteInsideTheirOutput) {
  TempDir dir;
  const std::string scratch = dir.file("scratch");
  fs::create_directories(scratch);
  const auto result = run_cli(dir, "synth --grid-size 4 --out out", scratch);
  ASSERT_EQ(result.exit_code, 0);
  std::set<std::string> entries;
  for (const auto& entry : fs::directory_iterator(scratch)) {
    entries.insert(entry.path().filename().string());
  }
  EXPECT_EQ(entries, (std::set<std::string>{"out"}));
}

TEST(CliParsing, UnknownSubcommandFails) {
  TempDir dir;
  EXPECT_NE(run_cli(dir, "frobnicate").exit_code, 0);
  EXPECT_NE(run_cli(dir, "").exit_code, 0);
}

}  // namespace
}  // namespace fwips
