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

// Shared fixtures and seeded instance generators for the test binaries.

#ifndef RIBRIDGE_TESTS_SUPPORT_HPP_
#define RIBRIDGE_TESTS_SUPPORT_HPP_

#include <cmath>
#include <cstdint>
#include <string>

#include "ribridge/core.hpp"
#include "ribridge/io.hpp"

namespace ribridge::testing {

inline std::string fixture(const std::string& name) {
  return std::string(RIBRIDGE_FIXTURE_DIR) + "/" + name;
}

inline const io::json& derived() {
  static const io::json doc = io::read_json_file(fixture("derived.json"));
  return doc;
}

inline Vector vector_of(const io::json& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  return out;
}

inline Matrix matrix_of(const io::json& v) {
  Matrix out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v[0].size()));
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      out(i, j) = v[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
    }
  }
  return out;
}

// {"utility", "lambda", "prior"} as written by the reference generator.
inline Problem problem_of(const io::json& doc) {
  Vector mu = vector_of(doc.at("prior"));
  mu /= mu.sum();
  return make_problem(matrix_of(doc.at("utility")), doc.at("lambda").get<double>(), mu);
}

inline Problem symmetric_2x2(double lambda = 1.0) {
  return make_problem(Matrix::Identity(2, 2), lambda, Vector::Constant(2, 0.5));
}

inline Problem state_independent() {
  Matrix u(2, 2);
  u << 2, 2, 1, 1;
  return make_problem(u, 1.0, Vector::Constant(2, 0.5));
}

// splitmix64; small, deterministic across platforms.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  Eigen::Index index(Eigen::Index n) { return static_cast<Eigen::Index>(next() % static_cast<std::uint64_t>(n)); }

  Vector simplex(Eigen::Index m) {
    Vector w(m);
    for (Eigen::Index i = 0; i < m; ++i) w[i] = -std::log(1.0 - uniform()) + 1e-12;
    return w / w.sum();
  }

  Matrix utility(Eigen::Index m, Eigen::Index n, double spread = 1.0) {
    Matrix u(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) u(i, j) = uniform(-spread, spread);
    }
    return u;
  }

  Problem problem(Eigen::Index m, Eigen::Index n, double lambda, double spread = 1.0) {
    Vector mu(n);
    for (Eigen::Index j = 0; j < n; ++j) mu[j] = uniform() + 0.1;
    return make_problem(utility(m, n, spread), lambda, mu / mu.sum());
  }

  Matrix joint(Eigen::Index m, Eigen::Index n) {
    Matrix p(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) p(i, j) = uniform() + 0.01;
    }
    return p / p.sum();
  }

 private:
  std::uint64_t state_;
};

}  // namespace ribridge::testing

#endif  // RIBRIDGE_TESTS_SUPPORT_HPP_
