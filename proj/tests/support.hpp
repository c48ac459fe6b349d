#pragma once

#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "gen/graph.hpp"
#include "gen/matrix.hpp"
#include "gen/rng.hpp"
#include "gen/unit_model.hpp"

namespace gen::testing {

// Random symmetric 0/1 adjacency with a zero diagonal on local ids 0..n-1.
inline SubNetwork random_subnetwork(std::size_t n, double density, Rng& rng) {
  SubNetwork g;
  g.local_to_global.resize(n);
  std::iota(g.local_to_global.begin(), g.local_to_global.end(), NodeId{0});
  g.adjacency = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      if (uniform01(rng) < density) g.adjacency(i, k) = g.adjacency(k, i) = 1.0;
    }
  }
  return g;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (double& x : m.data()) x = scale * (2.0 * uniform01(rng) - 1.0);
  return m;
}

// Central differences of f at theta, one coordinate at a time.
inline std::vector<double> numeric_gradient(const std::function<double(const ParamVector&)>& f,
                                            const ParamVector& theta, double h) {
  std::vector<double> out(theta.size());
  ParamVector probe = theta;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double saved = probe.values[i];
    probe.values[i] = saved + h;
    const double up = f(probe);
    probe.values[i] = saved - h;
    const double down = f(probe);
    probe.values[i] = saved;
    out[i] = (up - down) / (2.0 * h);
  }
  return out;
}

// ||a - b|| / max(||a||, ||b||, 1e-12)
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-12});
}

}  // namespace gen::testing
