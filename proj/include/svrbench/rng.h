// include/svrbench/rng.h

// Copyright 2026  SVRBench Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SVRBENCH_RNG_H_
#define SVRBENCH_RNG_H_

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace svrbench {

// Seeded generator with self-contained uniform/Gaussian transforms so that
// draws do not depend on the standard library's distribution implementations.
// All randomized code in this library takes an explicit Rng (or a seed),
// which is what makes runs reproducible.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t Raw() { return gen_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double Uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [0, n); unbiased via rejection.
  uint64_t UniformInt(uint64_t n) {
    uint64_t scaling = UINT64_MAX / n;
    uint64_t limit = scaling * n;
    uint64_t r;
    do {
      r = gen_();
    } while (r >= limit);
    return r / scaling;
  }

  // Standard normal, Box-Muller with a cached second value.
  double Gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
    double u2 = Uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  Eigen::VectorXd GaussianVector(int dim) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; i++) v[i] = Gaussian();
    return v;
  }

  Eigen::MatrixXd GaussianMatrix(int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    // Row-major fill order is part of the reproducibility contract.
    for (int r = 0; r < rows; r++)
      for (int c = 0; c < cols; c++) m(r, c) = Gaussian();
    return m;
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace svrbench

#endif  // SVRBENCH_RNG_H_
