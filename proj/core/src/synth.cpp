#include "fwips/synth.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "text_io.hpp"

namespace fwips {
namespace {

constexpr double kReferenceDistanceM = 1.0;
// Stream offset separating fingerprint noise of the VDS from its coordinates.
constexpr std::uint64_t kVdsStream = 0x56445331u;

}  // namespace

void SynthScene::validate() const {
  if (ap_positions.empty()) {
    throw std::invalid_argument("scene: needs at least one AP");
  }
  const std::size_t dims = ap_positions.front().size();
  for (const Point& ap : ap_positions) {
    if (ap.size() != dims || !all_finite(ap)) {
      throw std::invalid_argument("scene: malformed AP position");
    }
  }
  if (!(path_loss_exponent > 0.0)) {
    throw std::invalid_argument("scene: path-loss exponent must be positive");
  }
  if (!(noise_std_db >= 0.0)) {
    throw std::invalid_argument("scene: noise std must be non-negative");
  }
  if (!std::isfinite(tx_power_dbm) || !std::isfinite(min_rss_dbm)) {
    throw std::invalid_argument("scene: non-finite power level");
  }
}

SynthScene default_scene() {
  SynthScene scene;
  scene.extent = BoundingBox{{0.0, 0.0}, {20.0, 15.0}};
  scene.ap_positions = {
      {0.0, 0.0}, {10.0, 0.0}, {20.0, 0.0},  {20.0, 7.5},
      {20.0, 15.0}, {10.0, 15.0}, {0.0, 15.0}, {0.0, 7.5},
  };
  return scene;
}

double noiseless_rss(const SynthScene& scene, const Point& p,
                     std::size_t ap_index) {
  if (ap_index >= scene.ap_count()) {
    throw std::invalid_argument("rss: AP index out of range");
  }
  const double d = distance(p, scene.ap_positions[ap_index]);
  const double rss =
      scene.tx_power_dbm -
      10.0 * scene.path_loss_exponent * std::log10(std::max(d, kReferenceDistanceM));
  return std::max(rss, scene.min_rss_dbm);
}

double rss_at(const SynthScene& scene, const Point& p, std::size_t ap_index,
              Rng& rng) {
  double rss = noiseless_rss(scene, p, ap_index);
  if (scene.noise_std_db > 0.0) {
    rss = std::max(rss + rng.gaussian(0.0, scene.noise_std_db),
                   scene.min_rss_dbm);
  }
  return rss;
}

RadioMap generate_orm(const SynthScene& scene, const BoundingBox& extent,
                      double grid_size_m2, std::size_t samples_per_rp) {
  scene.validate();
  if (samples_per_rp < 1) {
    throw std::invalid_argument("generate_orm: samples_per_rp must be >= 1");
  }
  const std::vector<Point> points = make_grid(extent, grid_size_m2);

  Rng rng(scene.seed);
  std::vector<Fingerprint> fingerprints;
  fingerprints.reserve(points.size());
  for (const Point& rp : points) {
    Fingerprint fp(scene.ap_count());
    for (std::size_t ap = 0; ap < scene.ap_count(); ++ap) {
      if (scene.noise_std_db == 0.0) {
        fp[ap] = noiseless_rss(scene, rp, ap);
        continue;
      }
      double sum = 0.0;
      for (std::size_t s = 0; s < samples_per_rp; ++s) {
        sum += rss_at(scene, rp, ap, rng);
      }
      fp[ap] = sum / static_cast<double>(samples_per_rp);
    }
    fingerprints.push_back(std::move(fp));
  }
  return RadioMap(points, std::move(fingerprints), grid_size_m2, MapKind::Orm);
}

EvalSet generate_vds(const SynthScene& scene, const BoundingBox& extent,
                     std::size_t count, std::uint64_t seed) {
  scene.validate();
  validate_box(extent);
  if (count < 1) {
    throw std::invalid_argument("generate_vds: count must be >= 1");
  }
  Rng rng(mix_seed(seed, kVdsStream));
  std::vector<Point> truths;
  std::vector<Fingerprint> queries;
  truths.reserve(count);
  queries.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    Point p(extent.dims());
    for (std::size_t a = 0; a < p.size(); ++a) {
      p[a] = rng.uniform(extent.min[a], extent.max[a]);
    }
    Fingerprint fp(scene.ap_count());
    for (std::size_t ap = 0; ap < scene.ap_count(); ++ap) {
      fp[ap] = rss_at(scene, p, ap, rng);
    }
    truths.push_back(std::move(p));
    queries.push_back(std::move(fp));
  }
  return EvalSet(std::move(truths), std::move(queries));
}

namespace {

std::vector<double> parse_number_list(const std::string& text,
                                      const std::string& context) {
  std::vector<double> values;
  for (const std::string& cell : detail::split(text, ',')) {
    values.push_back(detail::parse_double(cell, context));
  }
  return values;
}

}  // namespace

SynthScene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scene file '" + path + "'");
  const std::string context = "'" + path + "'";

  SynthScene scene;
  scene.ap_positions.clear();
  bool have_extent = false;

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

    if (key == "ap") {
      scene.ap_positions.push_back(parse_number_list(value, where));
    } else if (key == "tx_power_dbm") {
      scene.tx_power_dbm = detail::parse_double(value, where);
    } else if (key == "path_loss_exponent") {
      scene.path_loss_exponent = detail::parse_double(value, where);
    } else if (key == "noise_std_db") {
      scene.noise_std_db = detail::parse_double(value, where);
    } else if (key == "min_rss_dbm") {
      scene.min_rss_dbm = detail::parse_double(value, where);
    } else if (key == "seed") {
      scene.seed = static_cast<std::uint64_t>(detail::parse_int(value, where));
    } else if (key == "extent") {
      const auto corners = parse_number_list(value, where);
      if (corners.size() % 2 != 0 || corners.empty()) {
        throw std::invalid_argument(where + ": expected min..,max.. corner list");
      }
      const std::size_t dims = corners.size() / 2;
      scene.extent.min.assign(corners.begin(), corners.begin() + dims);
      scene.extent.max.assign(corners.begin() + dims, corners.end());
      have_extent = true;
    } else if (key == "orm_grid_size_m2") {
      scene.orm_grid_size_m2 = detail::parse_double(value, where);
    } else if (key == "orm_samples_per_rp") {
      scene.orm_samples_per_rp =
          static_cast<std::size_t>(detail::parse_int(value, where));
    } else if (key == "vds_count") {
      scene.vds_count = static_cast<std::size_t>(detail::parse_int(value, where));
    } else {
      throw std::invalid_argument(where + ": unknown key");
    }
  }

  if (!have_extent) {
    throw std::invalid_argument(context + ": missing extent");
  }
  validate_box(scene.extent);
  scene.validate();
  return scene;
}

void save_scene(const SynthScene& scene, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "tx_power_dbm = " << detail::format_double(scene.tx_power_dbm) << "\n";
  out << "path_loss_exponent = " << detail::format_double(scene.path_loss_exponent) << "\n";
  out << "noise_std_db = " << detail::format_double(scene.noise_std_db) << "\n";
  out << "min_rss_dbm = " << detail::format_double(scene.min_rss_dbm) << "\n";
  out << "seed = " << scene.seed << "\n";
  out << "extent = ";
  for (std::size_t a = 0; a < scene.extent.dims(); ++a) {
    out << (a ? "," : "") << detail::format_double(scene.extent.min[a]);
  }
  for (std::size_t a = 0; a < scene.extent.dims(); ++a) {
    out << "," << detail::format_double(scene.extent.max[a]);
  }
  out << "\n";
  out << "orm_grid_size_m2 = " << detail::format_double(scene.orm_grid_size_m2) << "\n";
  out << "orm_samples_per_rp = " << scene.orm_samples_per_rp << "\n";
  out << "vds_count = " << scene.vds_count << "\n";
  for (const Point& ap : scene.ap_positions) {
    out << "ap = ";
    for (std::size_t a = 0; a < ap.size(); ++a) {
      out << (a ? "," : "") << detail::format_double(ap[a]);
    }
    out << "\n";
  }
}

}  // namespace fwips
