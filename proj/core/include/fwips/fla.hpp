#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "fwips/radiomap.hpp"

namespace fwips {

// Per-query error radii in meters with their sample statistics
// (std uses the T-1 divisor).
struct EvalReport {
  std::vector<double> errors;
  double mean_m = 0.0;
  double std_m = 0.0;
};

// Empirical distribution of error radii: step i/T at the i-th sorted error.
struct Cdf {
  std::vector<double> sorted_errors;
  std::vector<double> probabilities;

  // Smallest error whose cumulative probability reaches p, p in (0, 1].
  double quantile(double p) const;
};

using Locator = std::function<Point(const Fingerprint&)>;

double mean_of(const std::vector<double>& values);
double sample_std_of(const std::vector<double>& values);  // divisor n-1

// floor(sqrt(M)), the customary upper bound for k given M reference points.
std::size_t k_upper_bound(std::size_t rp_count);

// Mean of the coordinates of the k reference points whose fingerprints are
// nearest to the query in RSS space (squared Euclidean distance, raw dBm).
// Ties broken by ascending reference-point index.
Point knn_locate(const RadioMap& rm, const Fingerprint& query, std::size_t k);

// Weighted variant: weights are the inverse signal-space distances. A query
// at zero distance from a stored fingerprint returns that point directly.
Point wknn_locate(const RadioMap& rm, const Fingerprint& query, std::size_t k);

// Euclidean distance between estimate and ground truth, in meters.
double error_radius(const Point& estimate, const Point& truth);

// Runs the locator over every query; requires T >= 2 so the std is defined.
EvalReport evaluate(const Locator& locate, const EvalSet& eval_set);

Cdf cdf(const EvalReport& report);

// Single `error_m` column / `error_m,probability` columns, for external
// plotting.
void save_report_csv(const EvalReport& report, const std::string& path);
void save_cdf_csv(const Cdf& curve, const std::string& path);

}  // namespace fwips
