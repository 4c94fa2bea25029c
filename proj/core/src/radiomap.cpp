#include "fwips/radiomap.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "text_io.hpp"

namespace fwips {
namespace {

constexpr double kLatticeTol = 1e-9;

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

double grid_spacing(double grid_size_m2) {
  require(std::isfinite(grid_size_m2) && grid_size_m2 > 0.0,
          "grid size must be positive");
  return std::sqrt(grid_size_m2);
}

void check_paired(const std::vector<Point>& points,
                  const std::vector<Fingerprint>& fingerprints,
                  const char* what) {
  require(!points.empty(), std::string(what) + ": needs at least one entry");
  require(points.size() == fingerprints.size(),
          std::string(what) + ": point/fingerprint counts differ");
  const std::size_t dims = points.front().size();
  const std::size_t aps = fingerprints.front().size();
  require(dims >= 1, std::string(what) + ": zero-dimensional coordinates");
  require(aps >= 1, std::string(what) + ": empty fingerprints");
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(points[i].size() == dims,
            std::string(what) + ": inconsistent coordinate dimension");
    require(fingerprints[i].size() == aps,
            std::string(what) + ": inconsistent fingerprint length");
    require(all_finite(points[i]) && all_finite(fingerprints[i]),
            std::string(what) + ": non-finite value");
  }
}

}  // namespace

const char* to_string(MapKind kind) {
  switch (kind) {
    case MapKind::Orm: return "ORM";
    case MapKind::Trm: return "TRM";
    case MapKind::Rrm: return "RRM";
  }
  return "?";
}

MapKind map_kind_from_string(const std::string& text) {
  if (text == "ORM") return MapKind::Orm;
  if (text == "TRM") return MapKind::Trm;
  if (text == "RRM") return MapKind::Rrm;
  throw std::invalid_argument("unknown radio-map kind '" + text + "'");
}

RadioMap::RadioMap(std::vector<Point> points,
                   std::vector<Fingerprint> fingerprints, double grid_size_m2,
                   MapKind kind)
    : points_(std::move(points)),
      fingerprints_(std::move(fingerprints)),
      grid_size_m2_(grid_size_m2),
      kind_(kind) {
  check_paired(points_, fingerprints_, "radio map");
  grid_spacing(grid_size_m2_);  // positivity check
  dims_ = points_.front().size();
  ap_count_ = fingerprints_.front().size();
  extent_ = bounding_box_of(points_);
}

EvalSet::EvalSet(std::vector<Point> truths, std::vector<Fingerprint> queries)
    : truths_(std::move(truths)), queries_(std::move(queries)) {
  check_paired(truths_, queries_, "eval set");
}

std::vector<Point> make_grid(const BoundingBox& extent, double grid_size_m2,
                             bool* spacing_exceeds_extent) {
  validate_box(extent);
  const double spacing = grid_spacing(grid_size_m2);
  const std::size_t dims = extent.dims();
  for (std::size_t a = 0; a < dims; ++a) {
    require(extent.side(a) > 0.0, "make_grid: degenerate extent on axis " +
                                      std::to_string(a));
  }

  bool exceeded = false;
  std::vector<std::size_t> counts(dims);
  for (std::size_t a = 0; a < dims; ++a) {
    const double len = extent.side(a);
    counts[a] = static_cast<std::size_t>(std::floor(len / spacing + kLatticeTol)) + 1;
    if (counts[a] == 1) exceeded = true;
  }
  if (spacing_exceeds_extent != nullptr) *spacing_exceeds_extent = exceeded;

  std::size_t total = 1;
  for (std::size_t c : counts) total *= c;

  std::vector<Point> grid;
  grid.reserve(total);
  std::vector<std::size_t> idx(dims, 0);
  for (std::size_t n = 0; n < total; ++n) {
    Point p(dims);
    for (std::size_t a = 0; a < dims; ++a) {
      p[a] = extent.min[a] + static_cast<double>(idx[a]) * spacing;
    }
    grid.push_back(std::move(p));
    // odometer, axis 0 fastest
    for (std::size_t a = 0; a < dims; ++a) {
      if (++idx[a] < counts[a]) break;
      idx[a] = 0;
    }
  }
  return grid;
}

RadioMap downsample(const RadioMap& source, double target_grid_size_m2) {
  const double src_spacing = grid_spacing(source.grid_size_m2());
  const double tgt_spacing = grid_spacing(target_grid_size_m2);
  const double ratio = tgt_spacing / src_spacing;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > kLatticeTol) {
    std::ostringstream msg;
    msg << "downsample: target spacing " << tgt_spacing
        << " m is not an integer multiple of source spacing " << src_spacing
        << " m (ratio " << ratio << ")";
    throw std::invalid_argument(msg.str());
  }

  if (rounded == 1.0) {
    return RadioMap(source.points(), source.fingerprints(),
                    target_grid_size_m2, MapKind::Trm);
  }

  const BoundingBox& extent = source.extent();
  std::vector<Point> points;
  std::vector<Fingerprint> fingerprints;
  for (std::size_t i = 0; i < source.rp_count(); ++i) {
    const Point& p = source.points()[i];
    bool on_lattice = true;
    for (std::size_t a = 0; a < p.size(); ++a) {
      const double steps = (p[a] - extent.min[a]) / tgt_spacing;
      if (std::abs(steps - std::round(steps)) > kLatticeTol) {
        on_lattice = false;
        break;
      }
    }
    if (on_lattice) {
      points.push_back(p);
      fingerprints.push_back(source.fingerprints()[i]);
    }
  }
  if (points.empty()) {
    throw std::invalid_argument("downsample: no reference points on the target lattice");
  }
  return RadioMap(std::move(points), std::move(fingerprints),
                  target_grid_size_m2, MapKind::Trm);
}

namespace {

void write_table(std::ofstream& out, const std::string& kind_label,
                 double grid_size, const std::vector<Point>& points,
                 const std::vector<Fingerprint>& fingerprints) {
  const std::size_t dims = points.front().size();
  const std::size_t aps = fingerprints.front().size();
  out << "D=" << dims << ",N=" << aps << ",G=" << detail::format_double(grid_size)
      << ",KIND=" << kind_label << "\n";
  for (std::size_t a = 0; a < dims; ++a) out << (a ? "," : "") << "x" << (a + 1);
  for (std::size_t a = 0; a < aps; ++a) out << ",ap" << (a + 1);
  out << "\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t a = 0; a < dims; ++a) {
      out << (a ? "," : "") << detail::format_double(points[i][a]);
    }
    for (std::size_t a = 0; a < aps; ++a) {
      out << "," << detail::format_double(fingerprints[i][a]);
    }
    out << "\n";
  }
}

struct Table {
  std::size_t dims = 0;
  std::size_t aps = 0;
  double grid_size = 0.0;
  std::string kind;
  std::vector<Point> points;
  std::vector<Fingerprint> fingerprints;
};

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "' for reading");
  }
  const std::string context = "'" + path + "'";

  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument(context + ": missing header line");
  }
  auto fields = detail::split(detail::strip(line), ',');
  if (fields.size() != 4) {
    throw std::invalid_argument(context + ": header must have 4 fields");
  }
  Table table;
  const char* expected[] = {"D=", "N=", "G=", "KIND="};
  std::string values[4];
  for (int f = 0; f < 4; ++f) {
    const std::string& field = fields[f];
    const std::string key = expected[f];
    if (field.rfind(key, 0) != 0) {
      throw std::invalid_argument(context + ": malformed header field '" + field + "'");
    }
    values[f] = field.substr(key.size());
  }
  table.dims = static_cast<std::size_t>(detail::parse_int(values[0], context));
  table.aps = static_cast<std::size_t>(detail::parse_int(values[1], context));
  table.grid_size = detail::parse_double(values[2], context);
  table.kind = values[3];
  if (table.dims < 1 || table.aps < 1) {
    throw std::invalid_argument(context + ": header declares empty dimensions");
  }

  if (!std::getline(in, line)) {
    throw std::invalid_argument(context + ": missing column-name line");
  }
  if (detail::split(detail::strip(line), ',').size() != table.dims + table.aps) {
    throw std::invalid_argument(context + ": column-name count does not match header");
  }

  std::size_t row_no = 2;
  while (std::getline(in, line)) {
    ++row_no;
    const std::string stripped = detail::strip(line);
    if (stripped.empty()) continue;
    auto cells = detail::split(stripped, ',');
    if (cells.size() != table.dims + table.aps) {
      throw std::invalid_argument(context + ": row " + std::to_string(row_no) +
                                  " has " + std::to_string(cells.size()) +
                                  " cells, expected " +
                                  std::to_string(table.dims + table.aps));
    }
    const std::string row_context = context + " row " + std::to_string(row_no);
    Point p(table.dims);
    Fingerprint fp(table.aps);
    for (std::size_t a = 0; a < table.dims; ++a) {
      p[a] = detail::parse_double(cells[a], row_context);
    }
    for (std::size_t a = 0; a < table.aps; ++a) {
      fp[a] = detail::parse_double(cells[table.dims + a], row_context);
    }
    table.points.push_back(std::move(p));
    table.fingerprints.push_back(std::move(fp));
  }
  if (table.points.empty()) {
    throw std::invalid_argument(context + ": no data rows");
  }
  return table;
}

}  // namespace

void save_radiomap(const RadioMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_table(out, to_string(map.kind()), map.grid_size_m2(), map.points(),
              map.fingerprints());
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

RadioMap load_radiomap(const std::string& path) {
  Table table = read_table(path);
  if (table.kind == "VDS") {
    throw std::invalid_argument("'" + path +
                                "' holds an evaluation set, use load_evalset");
  }
  return RadioMap(std::move(table.points), std::move(table.fingerprints),
                  table.grid_size, map_kind_from_string(table.kind));
}

void save_evalset(const EvalSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_table(out, "VDS", 0.0, set.truths(), set.queries());
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

EvalSet load_evalset(const std::string& path) {
  Table table = read_table(path);
  if (table.kind != "VDS") {
    throw std::invalid_argument("'" + path + "' is not an evaluation set (KIND=" +
                                table.kind + ")");
  }
  return EvalSet(std::move(table.points), std::move(table.fingerprints));
}

}  // namespace fwips
