#pragma once

// Independent reference implementations used to freeze expected values.
// These deliberately avoid the library's code paths: full sorts instead of
// selections, long-double accumulation, finite differences instead of
// backpropagation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "fwips/fla.hpp"
#include "fwips/network.hpp"
#include "fwips/radiomap.hpp"
#include "fwips/rng.hpp"

namespace fwips::test {

inline std::vector<std::pair<double, std::size_t>> full_sort_neighbors(
    const RadioMap& rm, const Fingerprint& query) {
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(rm.rp_count());
  for (std::size_t i = 0; i < rm.rp_count(); ++i) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < query.size(); ++j) {
      const double diff = rm.fingerprints()[i][j] - query[j];
      d2 += diff * diff;
    }
    order.emplace_back(d2, i);
  }
  std::sort(order.begin(), order.end());
  return order;
}

inline Point brute_force_knn(const RadioMap& rm, const Fingerprint& query,
                             std::size_t k) {
  const auto order = full_sort_neighbors(rm, query);
  Point out(rm.dims(), 0.0);
  for (std::size_t n = 0; n < k; ++n) {
    const Point& rp = rm.points()[order[n].second];
    for (std::size_t a = 0; a < out.size(); ++a) out[a] += rp[a];
  }
  for (double& c : out) c /= static_cast<double>(k);
  return out;
}

inline Point brute_force_wknn(const RadioMap& rm, const Fingerprint& query,
                              std::size_t k) {
  const auto order = full_sort_neighbors(rm, query);
  if (order.front().first == 0.0) return rm.points()[order.front().second];
  Point out(rm.dims(), 0.0);
  double weight_sum = 0.0;
  for (std::size_t n = 0; n < k; ++n) {
    const double w = 1.0 / std::sqrt(order[n].first);
    weight_sum += w;
    const Point& rp = rm.points()[order[n].second];
    for (std::size_t a = 0; a < out.size(); ++a) out[a] += w * rp[a];
  }
  for (double& c : out) c /= weight_sum;
  return out;
}

inline double oracle_mean(const std::vector<double>& values) {
  long double sum = 0.0L;
  for (double v : values) sum += v;
  return static_cast<double>(sum / static_cast<long double>(values.size()));
}

inline double oracle_sample_std(const std::vector<double>& values) {
  const long double m = oracle_mean(values);
  long double sum = 0.0L;
  for (double v : values) sum += (v - m) * (v - m);
  return static_cast<double>(
      std::sqrt(sum / static_cast<long double>(values.size() - 1)));
}

inline double oracle_distance(const Point& a, const Point& b) {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double d = static_cast<long double>(a[i]) - b[i];
    sum += d * d;
  }
  return static_cast<double>(std::sqrt(sum));
}

// Axis-stepping enumeration, independent of the floor-division formula.
inline std::size_t grid_count_oracle(const BoundingBox& extent,
                                     double grid_size_m2) {
  const double spacing = std::sqrt(grid_size_m2);
  std::size_t total = 1;
  for (std::size_t a = 0; a < extent.dims(); ++a) {
    std::size_t count = 0;
    double x = extent.min[a];
    while (x <= extent.max[a] + 1e-9) {
      ++count;
      x = extent.min[a] + static_cast<double>(count) * spacing;
    }
    total *= count;
  }
  return total;
}

// Central finite differences of the normalized-space squared error over every
// parameter, in layer-major weights-then-biases order.
inline std::vector<double> finite_difference_gradients(
    const Network& net, const std::vector<double>& x,
    const std::vector<double>& target, double step) {
  Network work = net;
  std::vector<double> grads;
  auto differentiate = [&](double& param) {
    const double saved = param;
    param = saved + step;
    const double plus = work.sample_loss(x, target);
    param = saved - step;
    const double minus = work.sample_loss(x, target);
    param = saved;
    grads.push_back((plus - minus) / (2.0 * step));
  };
  for (Layer& layer : work.layers()) {
    for (double& w : layer.weights.data) differentiate(w);
    for (double& b : layer.biases) differentiate(b);
  }
  return grads;
}

inline std::vector<double> flatten(const Gradients& grads) {
  std::vector<double> flat;
  for (std::size_t m = 0; m < grads.weights.size(); ++m) {
    flat.insert(flat.end(), grads.weights[m].data.begin(),
                grads.weights[m].data.end());
    flat.insert(flat.end(), grads.biases[m].begin(), grads.biases[m].end());
  }
  return flat;
}

// Plain column-at-a-time evaluation of the layer composition.
inline std::vector<double> forward_oracle(const Network& net,
                                          const std::vector<double>& x_norm) {
  std::vector<double> current = x_norm;
  for (const Layer& layer : net.layers()) {
    std::vector<double> next(layer.fan_out(), 0.0);
    for (std::size_t j = 0; j < layer.fan_out(); ++j) {
      next[j] = layer.biases[j];
    }
    for (std::size_t i = 0; i < layer.fan_in(); ++i) {
      for (std::size_t j = 0; j < layer.fan_out(); ++j) {
        next[j] += layer.weights(i, j) * current[i];
      }
    }
    if (layer.activation == Activation::Sigmoid) {
      for (double& v : next) v = 1.0 / (1.0 + std::exp(-v));
    }
    current = std::move(next);
  }
  return current;
}

inline RadioMap random_map(Rng& rng, std::size_t rp_count, std::size_t ap_count,
                           std::size_t dims, MapKind kind = MapKind::Orm) {
  std::vector<Point> points;
  std::vector<Fingerprint> fingerprints;
  for (std::size_t i = 0; i < rp_count; ++i) {
    Point p(dims);
    for (double& c : p) c = rng.uniform(0.0, 10.0);
    Fingerprint fp(ap_count);
    for (double& v : fp) v = rng.uniform(-90.0, -30.0);
    points.push_back(std::move(p));
    fingerprints.push_back(std::move(fp));
  }
  return RadioMap(std::move(points), std::move(fingerprints), 1.0, kind);
}

inline Network random_network(Rng& rng, std::size_t in_dim,
                              const std::vector<std::size_t>& hidden_widths,
                              std::size_t out_dim) {
  return init_network(hidden_widths.size(), hidden_widths, in_dim, out_dim,
                      rng.next());
}

}  // namespace fwips::test
