#include "fwips/fla.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "text_io.hpp"

namespace fwips {
namespace {

// Indices of the k fingerprints nearest to the query together with their
// squared signal-space distances; ties broken by ascending index. Linear scan
// plus a size-k selection, O(kNM) overall.
std::vector<std::pair<double, std::size_t>> nearest_neighbors(
    const RadioMap& rm, const Fingerprint& query, std::size_t k) {
  if (query.size() != rm.ap_count()) {
    throw std::invalid_argument("locate: query length does not match AP count");
  }
  if (k < 1 || k > rm.rp_count()) {
    throw std::invalid_argument("locate: k out of range [1, M]");
  }
  std::vector<std::pair<double, std::size_t>> dist(rm.rp_count());
  for (std::size_t i = 0; i < rm.rp_count(); ++i) {
    dist[i] = {squared_distance(rm.fingerprints()[i], query), i};
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                    dist.end());
  dist.resize(k);
  return dist;
}

}  // namespace

double mean_of(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("mean of empty vector");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sample_std_of(const std::vector<double>& values) {
  if (values.size() < 2) {
    throw std::invalid_argument("sample std needs at least two values");
  }
  const double m = mean_of(values);
  double sum = 0.0;
  for (double v : values) sum += (v - m) * (v - m);
  return std::sqrt(sum / static_cast<double>(values.size() - 1));
}

std::size_t k_upper_bound(std::size_t rp_count) {
  if (rp_count == 0) {
    throw std::invalid_argument("k_upper_bound: empty radio map");
  }
  auto r = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(rp_count))));
  while ((r + 1) * (r + 1) <= rp_count) ++r;
  while (r * r > rp_count) --r;
  return r;
}

Point knn_locate(const RadioMap& rm, const Fingerprint& query, std::size_t k) {
  const auto neighbors = nearest_neighbors(rm, query, k);
  Point estimate(rm.dims(), 0.0);
  for (const auto& [d2, idx] : neighbors) {
    const Point& rp = rm.points()[idx];
    for (std::size_t a = 0; a < estimate.size(); ++a) estimate[a] += rp[a];
  }
  for (double& c : estimate) c /= static_cast<double>(k);
  return estimate;
}

Point wknn_locate(const RadioMap& rm, const Fingerprint& query, std::size_t k) {
  const auto neighbors = nearest_neighbors(rm, query, k);
  // Zero signal distance would make the inverse-distance weight singular; the
  // weighted mean degenerates to that reference point.
  if (neighbors.front().first == 0.0) {
    return rm.points()[neighbors.front().second];
  }
  Point estimate(rm.dims(), 0.0);
  double weight_sum = 0.0;
  for (const auto& [d2, idx] : neighbors) {
    const double w = 1.0 / std::sqrt(d2);
    weight_sum += w;
    const Point& rp = rm.points()[idx];
    for (std::size_t a = 0; a < estimate.size(); ++a) estimate[a] += w * rp[a];
  }
  for (double& c : estimate) c /= weight_sum;
  return estimate;
}

double error_radius(const Point& estimate, const Point& truth) {
  return distance(estimate, truth);
}

EvalReport evaluate(const Locator& locate, const EvalSet& eval_set) {
  if (eval_set.size() < 2) {
    throw std::invalid_argument("evaluate: needs T >= 2 queries for the std");
  }
  EvalReport report;
  report.errors.reserve(eval_set.size());
  for (std::size_t t = 0; t < eval_set.size(); ++t) {
    const Point estimate = locate(eval_set.queries()[t]);
    report.errors.push_back(error_radius(estimate, eval_set.truths()[t]));
  }
  report.mean_m = mean_of(report.errors);
  report.std_m = sample_std_of(report.errors);
  return report;
}

Cdf cdf(const EvalReport& report) {
  if (report.errors.empty()) {
    throw std::invalid_argument("cdf: empty report");
  }
  Cdf curve;
  curve.sorted_errors = report.errors;
  std::sort(curve.sorted_errors.begin(), curve.sorted_errors.end());
  const auto count = static_cast<double>(curve.sorted_errors.size());
  curve.probabilities.resize(curve.sorted_errors.size());
  for (std::size_t i = 0; i < curve.probabilities.size(); ++i) {
    curve.probabilities[i] = static_cast<double>(i + 1) / count;
  }
  return curve;
}

double Cdf::quantile(double p) const {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("quantile: p must lie in (0, 1]");
  }
  const auto count = static_cast<double>(sorted_errors.size());
  auto idx = static_cast<std::size_t>(std::ceil(p * count));
  if (idx > 0) --idx;
  return sorted_errors[std::min(idx, sorted_errors.size() - 1)];
}

void save_report_csv(const EvalReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "error_m\n";
  for (double e : report.errors) out << detail::format_double(e) << "\n";
}

void save_cdf_csv(const Cdf& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "error_m,probability\n";
  for (std::size_t i = 0; i < curve.sorted_errors.size(); ++i) {
    out << detail::format_double(curve.sorted_errors[i]) << ","
        << detail::format_double(curve.probabilities[i]) << "\n";
  }
}

}  // namespace fwips
