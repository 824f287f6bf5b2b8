// Copyright 2026 The ribridge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ribridge/oracle.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "ribridge/solver.hpp"

namespace ribridge {

GridSpec GridSpec::defaults_for(Eigen::Index m) {
  GridSpec g;
  g.resolution = m <= 2 ? 1e-3 : 1e-2;
  return g;
}

GridResult grid_search_f(const Problem& problem, const GridSpec& grid) {
  require_valid(problem);
  const auto m = problem.num_actions();
  if (m > grid.max_actions) {
    throw Error(ErrorCode::TooManyActions, "grid oracle supports at most " +
                                               std::to_string(grid.max_actions) + " actions");
  }
  if (!(grid.resolution > 0.0 && grid.resolution < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "grid resolution must lie in (0, 1)");
  }
  const long steps = std::lround(1.0 / grid.resolution);
  const double step = 1.0 / static_cast<double>(steps);

  // Plain-domain kernel; the oracle deliberately avoids the solver's log path.
  const Matrix gibbs = gibbs_kernel(problem).array().exp().matrix();
  const Vector& mu = problem.prior;

  GridResult best;
  best.f_best = -std::numeric_limits<double>::infinity();
  best.resolution = step;
  double max_spread = 0.0;

  std::vector<long> counts(static_cast<std::size_t>(m), 0);
  Vector nu(m);
  std::function<void(Eigen::Index, long)> visit = [&](Eigen::Index k, long left) {
    if (k == m - 1) {
      counts[static_cast<std::size_t>(k)] = left;
      for (Eigen::Index i = 0; i < m; ++i) {
        nu[i] = static_cast<double>(counts[static_cast<std::size_t>(i)]) * step;
      }
      const Eigen::RowVectorXd z = nu.transpose() * gibbs;
      double f = 0.0;
      for (Eigen::Index j = 0; j < z.size(); ++j) f += mu[j] * std::log(z[j]);
      // g(a) = sum_w mu(w) e^{u/lambda} / Z(w) is the partial derivative of f.
      const Vector g = gibbs * (mu.array() / z.transpose().array()).matrix();
      max_spread = std::max(max_spread, g.maxCoeff() - g.minCoeff());
      ++best.points;
      if (f > best.f_best) {
        best.f_best = f;
        best.nu_best = nu;
      }
      return;
    }
    for (long c = 0; c <= left; ++c) {
      counts[static_cast<std::size_t>(k)] = c;
      visit(k + 1, left - c);
    }
  };
  visit(0, steps);

  // Rounding the optimum to the lattice moves each coordinate by < step, so
  // the l1 move is < m * step and concavity bounds the loss by spread/2 per
  // unit of l1 mass.
  best.lipschitz = 0.5 * static_cast<double>(m) * max_spread;
  return best;
}

double exhaustive_mi(const Matrix& joint) {
  const auto m = joint.rows();
  const auto n = joint.cols();
  std::vector<double> rows(static_cast<std::size_t>(m), 0.0);
  std::vector<double> cols(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      rows[static_cast<std::size_t>(i)] += joint(i, j);
      cols[static_cast<std::size_t>(j)] += joint(i, j);
    }
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double p = joint(i, j);
      if (p > 0.0) {
        total += p * std::log(p / (rows[static_cast<std::size_t>(i)] *
                                   cols[static_cast<std::size_t>(j)]));
      }
    }
  }
  return total;
}

}  // namespace ribridge
